//! Exhaustive extension enumeration for small frameworks.
//!
//! Conflict-free sets are generated by a depth-first include/exclude search
//! that never extends a set with an argument conflicting with it. Each
//! conflict-free set is then tested for completeness and stability directly
//! from the definitions; preferred and grounded extensions are the
//! ⊆-maximal and ⊆-minimal complete extensions.

use std::fmt;
use std::io::{self, BufRead, Write};

use crate::af::ArgumentationFramework;
use crate::task::{Decision, Task};

/// Largest framework the enumerator accepts.
pub const MAX_ARGUMENTS: usize = 22;

/// Argument set over at most [`MAX_ARGUMENTS`] arguments, one bit per index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ArgSet(pub u32);

impl ArgSet {
    pub fn from_indices(indices: impl IntoIterator<Item = usize>) -> Self {
        ArgSet(indices.into_iter().fold(0, |m, i| m | (1 << i)))
    }

    pub fn full(n: usize) -> Self {
        ArgSet(if n >= 32 { u32::MAX } else { (1u32 << n) - 1 })
    }

    pub fn contains(self, a: usize) -> bool {
        self.0 >> a & 1 == 1
    }

    pub fn is_subset(self, other: ArgSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..32).filter(move |&i| self.contains(i))
    }
}

impl fmt::Display for ArgSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ids: Vec<String> = self.iter().map(|i| format!("a{}", i + 1)).collect();
        write!(f, "{{{}}}", ids.join(","))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Semantics {
    Complete,
    Preferred,
    Grounded,
    Stable,
}

impl Semantics {
    pub const ALL: [Semantics; 4] = [
        Semantics::Complete,
        Semantics::Preferred,
        Semantics::Grounded,
        Semantics::Stable,
    ];
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("framework has {n} arguments, enumeration is limited to {MAX_ARGUMENTS}")]
    TooLarge { n: usize },
    #[error("instances {instances:?} exceed the enumeration limit of {MAX_ARGUMENTS} arguments")]
    GuardViolation { instances: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionSet {
    pub semantics: Semantics,
    /// Sorted by bitmask.
    pub extensions: Vec<ArgSet>,
    /// Union of the extensions.
    pub cred: ArgSet,
    /// Intersection of the extensions; every argument when there are none.
    pub skep: ArgSet,
}

struct Masks {
    n: usize,
    attackers: Vec<u32>,
    targets: Vec<u32>,
}

impl Masks {
    fn new(af: &ArgumentationFramework) -> Result<Self, OracleError> {
        let n = af.num_arguments();
        if n > MAX_ARGUMENTS {
            return Err(OracleError::TooLarge { n });
        }
        let mask = |row: &[u32]| row.iter().fold(0u32, |m, &b| m | 1 << b);
        Ok(Masks {
            n,
            attackers: (0..n).map(|a| mask(af.attackers_of(a))).collect(),
            targets: (0..n).map(|a| mask(af.targets_of(a))).collect(),
        })
    }

    fn attacked_by(&self, set: u32) -> u32 {
        ArgSet(set).iter().fold(0, |m, a| m | self.targets[a])
    }

    fn defended_by(&self, set: u32) -> u32 {
        let attacked = self.attacked_by(set);
        (0..self.n)
            .filter(|&a| self.attackers[a] & !attacked == 0)
            .fold(0, |m, a| m | 1 << a)
    }

    fn conflict_free_sets(&self) -> Vec<u32> {
        let mut out = Vec::new();
        self.extend(0, 0, 0, &mut out);
        out
    }

    // `hostile` holds every argument attacking or attacked by `set`
    fn extend(&self, next: usize, set: u32, hostile: u32, out: &mut Vec<u32>) {
        if next == self.n {
            out.push(set);
            return;
        }
        self.extend(next + 1, set, hostile, out);
        let bit = 1u32 << next;
        let self_attack = self.targets[next] & bit != 0;
        if hostile & bit == 0 && !self_attack {
            let hostile = hostile | self.targets[next] | self.attackers[next];
            self.extend(next + 1, set | bit, hostile, out);
        }
    }
}

fn is_conflict_free(m: &Masks, set: u32) -> bool {
    m.attacked_by(set) & set == 0
}

/// Conflict-free and defends each member.
pub fn is_admissible(af: &ArgumentationFramework, set: ArgSet) -> bool {
    let Ok(m) = Masks::new(af) else { return false };
    is_conflict_free(&m, set.0) && set.0 & !m.defended_by(set.0) == 0
}

fn complete_sets(m: &Masks, cf: &[u32]) -> Vec<u32> {
    cf.iter()
        .copied()
        .filter(|&s| m.defended_by(s) == s)
        .collect()
}

fn stable_sets(m: &Masks, cf: &[u32]) -> Vec<u32> {
    let all = ArgSet::full(m.n).0;
    cf.iter()
        .copied()
        .filter(|&s| s | m.attacked_by(s) == all)
        .collect()
}

fn extremal(sets: &[u32], maximal: bool) -> Vec<u32> {
    sets.iter()
        .copied()
        .filter(|&s| {
            !sets
                .iter()
                .any(|&t| t != s && if maximal { s & !t == 0 } else { t & !s == 0 })
        })
        .collect()
}

pub fn enumerate(
    af: &ArgumentationFramework,
    semantics: Semantics,
) -> Result<ExtensionSet, OracleError> {
    let m = Masks::new(af)?;
    let cf = m.conflict_free_sets();
    let mut family = match semantics {
        Semantics::Stable => stable_sets(&m, &cf),
        _ => {
            let complete = complete_sets(&m, &cf);
            match semantics {
                Semantics::Complete => complete,
                Semantics::Preferred => extremal(&complete, true),
                Semantics::Grounded => extremal(&complete, false),
                Semantics::Stable => unreachable!(),
            }
        }
    };
    family.sort_unstable();
    let cred = family.iter().fold(0, |u, &s| u | s);
    let skep = family.iter().fold(ArgSet::full(m.n).0, |i, &s| i & s);
    Ok(ExtensionSet {
        semantics,
        extensions: family.into_iter().map(ArgSet).collect(),
        cred: ArgSet(cred),
        skep: ArgSet(skep),
    })
}

/// Exact per-argument answers for `task`.
pub fn task_labels(af: &ArgumentationFramework, task: Task) -> Result<Vec<Decision>, OracleError> {
    let (semantics, credulous) = match task {
        Task::DcCo => (Semantics::Complete, true),
        Task::DcSt => (Semantics::Stable, true),
        Task::DsPr => (Semantics::Preferred, false),
        Task::DsSt => (Semantics::Stable, false),
    };
    let ext = enumerate(af, semantics)?;
    let accepted = if credulous { ext.cred } else { ext.skep };
    Ok((0..af.num_arguments())
        .map(|a| Decision::from_bool(accepted.contains(a)))
        .collect())
}

/// Labels every framework; fails listing all instances over the guard.
pub fn label_dataset(
    afs: &[ArgumentationFramework],
    task: Task,
) -> Result<Vec<Vec<Decision>>, OracleError> {
    let too_large: Vec<usize> = afs
        .iter()
        .enumerate()
        .filter(|(_, af)| af.num_arguments() > MAX_ARGUMENTS)
        .map(|(i, _)| i)
        .collect();
    if !too_large.is_empty() {
        return Err(OracleError::GuardViolation {
            instances: too_large,
        });
    }
    use rayon::prelude::*;
    afs.par_iter().map(|af| task_labels(af, task)).collect()
}

/// Writes `<argument-id> <YES|NO>` lines.
pub fn write_labels<W: Write>(mut out: W, labels: &[Decision]) -> io::Result<()> {
    for (i, d) in labels.iter().enumerate() {
        writeln!(out, "{} {}", i + 1, d)?;
    }
    Ok(())
}

#[derive(Debug, thiserror::Error)]
pub enum LabelFileError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: expected `<argument-id> <YES|NO>`")]
    Malformed { line: usize },
    #[error("argument {0} is labelled more than once")]
    Duplicate(usize),
    #[error("argument {0} has no label")]
    Missing(usize),
    #[error("argument {id} is outside 1..={n}")]
    OutOfRange { id: usize, n: usize },
}

/// Reads a label file for a framework with `n` arguments; every argument
/// must be labelled exactly once.
pub fn read_labels<R: BufRead>(input: R, n: usize) -> Result<Vec<Decision>, LabelFileError> {
    let mut labels: Vec<Option<Decision>> = vec![None; n];
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        let malformed = || LabelFileError::Malformed { line: i + 1 };
        let mut tokens = text.split_ascii_whitespace();
        let (Some(id), Some(answer), None) = (tokens.next(), tokens.next(), tokens.next()) else {
            return Err(malformed());
        };
        let id: usize = id.parse().map_err(|_| malformed())?;
        let answer = match answer {
            "YES" => Decision::Yes,
            "NO" => Decision::No,
            _ => return Err(malformed()),
        };
        if id == 0 || id > n {
            return Err(LabelFileError::OutOfRange { id, n });
        }
        if labels[id - 1].replace(answer).is_some() {
            return Err(LabelFileError::Duplicate(id));
        }
    }
    labels
        .into_iter()
        .enumerate()
        .map(|(i, l)| l.ok_or(LabelFileError::Missing(i + 1)))
        .collect()
}
