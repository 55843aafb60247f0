//! Synthetic frameworks for tests, training data and benchmarks.

use rand::Rng;

use crate::af::ArgumentationFramework;

/// Every ordered pair `(a, b)`, `a ≠ b`, is an attack with probability `p`;
/// self-attacks are drawn with probability `p_self`.
pub fn erdos_renyi<R: Rng>(rng: &mut R, n: usize, p: f64, p_self: f64) -> ArgumentationFramework {
    let mut attacks = Vec::new();
    for a in 0..n {
        for b in 0..n {
            let prob = if a == b { p_self } else { p };
            if prob > 0.0 && rng.gen_bool(prob) {
                attacks.push((a, b));
            }
        }
    }
    ArgumentationFramework::new(n, attacks).expect("indices are in range")
}

/// `1 → 2 → … → n`.
pub fn chain(n: usize) -> ArgumentationFramework {
    ArgumentationFramework::new(n, (1..n).map(|i| (i - 1, i))).expect("indices are in range")
}

/// AdmBuster-shaped framework with `n` arguments (rounded up to even): two
/// hub arguments `a ↔ b` and pairs `aᵢ ↔ bᵢ` with `bᵢ → a` and `a → bᵢ`.
/// The attack count is linear in `n`; nothing is grounded-decided except
/// through the hubs.
pub fn adm_buster(n: usize) -> ArgumentationFramework {
    let pairs = n.saturating_sub(2).div_ceil(2);
    let total = 2 + 2 * pairs;
    let (a, b) = (0, 1);
    let mut attacks = vec![(a, b), (b, a)];
    for i in 0..pairs {
        let (ai, bi) = (2 + 2 * i, 3 + 2 * i);
        attacks.extend([(ai, bi), (bi, ai), (bi, a), (a, bi)]);
    }
    ArgumentationFramework::new(total, attacks).expect("indices are in range")
}
