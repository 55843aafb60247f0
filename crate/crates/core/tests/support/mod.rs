//! Fixtures shared by the integration tests.
#![allow(dead_code)]

pub mod gat_trainer;

use afgnn::generate::erdos_renyi;
use afgnn::ArgumentationFramework;
use rand::Rng;

fn from_one_based(n: usize, attacks: &[(usize, usize)]) -> ArgumentationFramework {
    ArgumentationFramework::new(n, attacks.iter().map(|&(a, b)| (a - 1, b - 1))).unwrap()
}

/// Seven arguments: `a1→a2→a3↔a4→a5→a6→a7→a5`.
pub fn f1() -> ArgumentationFramework {
    from_one_based(
        7,
        &[
            (1, 2),
            (2, 3),
            (3, 4),
            (4, 3),
            (4, 5),
            (5, 6),
            (6, 7),
            (7, 5),
        ],
    )
}

/// Six arguments with two self-attackers.
pub fn f2() -> ArgumentationFramework {
    from_one_based(
        6,
        &[
            (1, 1),
            (1, 2),
            (2, 5),
            (2, 4),
            (3, 3),
            (3, 4),
            (5, 2),
            (5, 4),
            (6, 5),
        ],
    )
}

/// Random framework with `1..=max_n` arguments and a random density.
pub fn random_af<R: Rng>(rng: &mut R, max_n: usize) -> ArgumentationFramework {
    let n = rng.gen_range(1..=max_n);
    let p = rng.gen_range(0.05..0.4);
    erdos_renyi(rng, n, p, 0.05)
}

/// Uniformly random permutation of `0..n`.
pub fn random_permutation<R: Rng>(rng: &mut R, n: usize) -> Vec<usize> {
    use rand::seq::SliceRandom;
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    perm
}
