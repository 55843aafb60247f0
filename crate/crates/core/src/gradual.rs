//! Gradual semantics as fixed points of their defining equations.
//!
//! All four use synchronous (Jacobi) iteration from the all-ones vector and
//! stop once the sup-norm change drops below [`TOLERANCE`] or after
//! [`MAX_ITERATIONS`] sweeps, whichever comes first.

use crate::af::ArgumentationFramework;

pub const TOLERANCE: f64 = 1e-6;
pub const MAX_ITERATIONS: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GradualSemantics {
    HCategorizer,
    NoSelfAttacker,
    MaxBased,
    CardBased,
}

impl GradualSemantics {
    pub const ALL: [GradualSemantics; 4] = [
        GradualSemantics::HCategorizer,
        GradualSemantics::NoSelfAttacker,
        GradualSemantics::MaxBased,
        GradualSemantics::CardBased,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            GradualSemantics::HCategorizer => "h-cat",
            GradualSemantics::NoSelfAttacker => "nsa",
            GradualSemantics::MaxBased => "Mbs",
            GradualSemantics::CardBased => "Cbs",
        }
    }

    /// One application of the defining equation for argument `a`, reading
    /// attacker degrees from `current`.
    pub fn update(self, af: &ArgumentationFramework, a: usize, current: &[f64]) -> f64 {
        let attackers = af.attackers_of(a);
        let degrees = attackers.iter().map(|&b| current[b as usize]);
        match self {
            GradualSemantics::HCategorizer => 1.0 / (1.0 + degrees.sum::<f64>()),
            GradualSemantics::NoSelfAttacker => {
                if af.is_self_attacking(a) {
                    0.0
                } else {
                    1.0 / (1.0 + degrees.sum::<f64>())
                }
            }
            GradualSemantics::MaxBased => 1.0 / (1.0 + degrees.fold(0.0, f64::max)),
            GradualSemantics::CardBased => {
                if attackers.is_empty() {
                    1.0
                } else {
                    let k = attackers.len() as f64;
                    1.0 / (1.0 + k + degrees.sum::<f64>() / k)
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DegreeVector {
    pub semantics: GradualSemantics,
    pub degrees: Vec<f64>,
    pub iterations_used: usize,
    pub converged: bool,
}

pub fn compute(af: &ArgumentationFramework, semantics: GradualSemantics) -> DegreeVector {
    let n = af.num_arguments();
    let pinned =
        |a: usize| semantics == GradualSemantics::NoSelfAttacker && af.is_self_attacking(a);
    let mut current: Vec<f64> = (0..n).map(|a| if pinned(a) { 0.0 } else { 1.0 }).collect();
    let mut next = vec![0.0; n];
    let mut iterations_used = 0;
    let mut converged = false;
    while iterations_used < MAX_ITERATIONS {
        let mut change = 0.0f64;
        for (a, slot) in next.iter_mut().enumerate() {
            *slot = semantics.update(af, a, &current);
            change = change.max((*slot - current[a]).abs());
        }
        std::mem::swap(&mut current, &mut next);
        iterations_used += 1;
        if change < TOLERANCE {
            converged = true;
            break;
        }
    }
    DegreeVector {
        semantics,
        degrees: current,
        iterations_used,
        converged,
    }
}

pub fn hcat(af: &ArgumentationFramework) -> DegreeVector {
    compute(af, GradualSemantics::HCategorizer)
}

pub fn nsa(af: &ArgumentationFramework) -> DegreeVector {
    compute(af, GradualSemantics::NoSelfAttacker)
}

pub fn mbs(af: &ArgumentationFramework) -> DegreeVector {
    compute(af, GradualSemantics::MaxBased)
}

pub fn cbs(af: &ArgumentationFramework) -> DegreeVector {
    compute(af, GradualSemantics::CardBased)
}
