//! Argumentation-framework data model.
//!
//! A framework is stored as two compressed adjacency lists (attackers and
//! targets of every argument), so memory stays linear in `n + |attacks|`.
//! Internally arguments are dense 0-based indices; [`ArgumentId`] is the
//! 1-based identifier used by the file formats and by all reporting.

mod parse;

use std::fmt;

pub use parse::{parse_apx, parse_iccma, ParseError};

/// 1-based argument identifier as it appears in input files.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ArgumentId(u32);

impl ArgumentId {
    /// Returns `None` for 0.
    pub fn new(id: u32) -> Option<Self> {
        (id > 0).then_some(ArgumentId(id))
    }

    pub fn from_index(index: usize) -> Self {
        ArgumentId(index as u32 + 1)
    }

    pub fn get(self) -> u32 {
        self.0
    }

    /// Dense 0-based offset.
    pub fn index(self) -> usize {
        self.0 as usize - 1
    }
}

impl fmt::Display for ArgumentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum AfError {
    #[error("an argumentation framework needs at least one argument")]
    NoArguments,
    #[error("attack ({0}, {1}) references an argument outside 0..{2}")]
    IndexOutOfRange(usize, usize, usize),
}

/// Compressed sparse rows: `items[offsets[i]..offsets[i + 1]]` is row `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Csr {
    offsets: Vec<u32>,
    items: Vec<u32>,
}

impl Csr {
    /// Builds rows from `(row, item)` pairs with a counting sort. Items keep
    /// the order in which they appear in `pairs`.
    fn from_pairs(rows: usize, pairs: impl Iterator<Item = (u32, u32)> + Clone) -> Self {
        let mut offsets = vec![0u32; rows + 1];
        for (r, _) in pairs.clone() {
            offsets[r as usize + 1] += 1;
        }
        for i in 0..rows {
            offsets[i + 1] += offsets[i];
        }
        let mut cursor: Vec<u32> = offsets[..rows].to_vec();
        let mut items = vec![0u32; offsets[rows] as usize];
        for (r, it) in pairs {
            let c = &mut cursor[r as usize];
            items[*c as usize] = it;
            *c += 1;
        }
        Csr { offsets, items }
    }

    fn row(&self, i: usize) -> &[u32] {
        &self.items[self.offsets[i] as usize..self.offsets[i + 1] as usize]
    }
}

/// Immutable attack graph `⟨A, R⟩` with forward and backward adjacency.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArgumentationFramework {
    n: usize,
    attackers: Csr,
    targets: Csr,
    names: Option<Vec<String>>,
}

impl ArgumentationFramework {
    /// Builds a framework over `n` arguments from 0-based attack pairs.
    /// Duplicate pairs collapse to one attack.
    pub fn new<I>(n: usize, attacks: I) -> Result<Self, AfError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if n == 0 {
            return Err(AfError::NoArguments);
        }
        let mut pairs = Vec::new();
        for (a, b) in attacks {
            if a >= n || b >= n {
                return Err(AfError::IndexOutOfRange(a, b, n));
            }
            pairs.push((a as u32, b as u32));
        }
        Ok(Self::from_checked_pairs(n, pairs))
    }

    pub(crate) fn from_checked_pairs(n: usize, mut pairs: Vec<(u32, u32)>) -> Self {
        pairs.sort_unstable();
        pairs.dedup();
        let targets = Csr::from_pairs(n, pairs.iter().copied());
        let attackers = Csr::from_pairs(n, pairs.iter().map(|&(a, b)| (b, a)));
        ArgumentationFramework {
            n,
            attackers,
            targets,
            names: None,
        }
    }

    pub(crate) fn with_names(mut self, names: Vec<String>) -> Self {
        debug_assert_eq!(names.len(), self.n);
        self.names = Some(names);
        self
    }

    pub fn num_arguments(&self) -> usize {
        self.n
    }

    pub fn num_attacks(&self) -> usize {
        self.targets.items.len()
    }

    /// Attackers of argument `a` (the set `a⁻`), ascending.
    pub fn attackers_of(&self, a: usize) -> &[u32] {
        self.attackers.row(a)
    }

    /// Arguments attacked by `a`, ascending.
    pub fn targets_of(&self, a: usize) -> &[u32] {
        self.targets.row(a)
    }

    pub fn attacks(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |a| self.targets_of(a).iter().map(move |&b| (a, b as usize)))
    }

    pub fn has_attack(&self, a: usize, b: usize) -> bool {
        self.targets_of(a).binary_search(&(b as u32)).is_ok()
    }

    pub fn is_self_attacking(&self, a: usize) -> bool {
        self.has_attack(a, a)
    }

    /// `(in_degree, out_degree)` per argument.
    pub fn degrees(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .map(|a| (self.attackers_of(a).len(), self.targets_of(a).len()))
            .collect()
    }

    /// Neighbors in the symmetrized graph (either attack direction),
    /// self-loops excluded, ascending and deduplicated.
    pub fn undirected_neighbors(&self) -> UndirectedAdjacency {
        let mut offsets = Vec::with_capacity(self.n + 1);
        let mut items = Vec::with_capacity(2 * self.num_attacks());
        offsets.push(0u32);
        for a in 0..self.n {
            // merge of two sorted rows
            let (ins, outs) = (self.attackers_of(a), self.targets_of(a));
            let (mut i, mut j) = (0, 0);
            while i < ins.len() || j < outs.len() {
                let next = match (ins.get(i), outs.get(j)) {
                    (Some(&x), Some(&y)) if x == y => {
                        i += 1;
                        j += 1;
                        x
                    }
                    (Some(&x), Some(&y)) if x < y => {
                        i += 1;
                        x
                    }
                    (Some(_), Some(&y)) => {
                        j += 1;
                        y
                    }
                    (Some(&x), None) => {
                        i += 1;
                        x
                    }
                    (None, Some(&y)) => {
                        j += 1;
                        y
                    }
                    (None, None) => unreachable!(),
                };
                if next as usize != a {
                    items.push(next);
                }
            }
            offsets.push(items.len() as u32);
        }
        UndirectedAdjacency(Csr { offsets, items })
    }

    /// Argument name for reporting: the APX name when the framework was
    /// read from APX, the 1-based id otherwise.
    pub fn name_of(&self, a: usize) -> String {
        match &self.names {
            Some(names) => names[a].clone(),
            None => ArgumentId::from_index(a).to_string(),
        }
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    /// Resolves a query token: an APX name if names are present, otherwise a
    /// 1-based id.
    pub fn resolve(&self, token: &str) -> Option<usize> {
        if let Some(names) = &self.names {
            if let Some(i) = names.iter().position(|n| n == token) {
                return Some(i);
            }
        }
        let id: u32 = token.parse().ok()?;
        let id = ArgumentId::new(id)?;
        (id.index() < self.n).then_some(id.index())
    }

    /// Canonical ICCMA'23 text: header, then attacks in ascending order.
    pub fn to_iccma(&self) -> String {
        use std::fmt::Write;
        let mut out = format!("p af {}\n", self.n);
        for (a, b) in self.attacks() {
            let _ = writeln!(out, "{} {}", a + 1, b + 1);
        }
        out
    }

    /// Relabels arguments: argument `i` becomes `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.n);
        let pairs = self
            .attacks()
            .map(|(a, b)| (perm[a] as u32, perm[b] as u32))
            .collect();
        Self::from_checked_pairs(self.n, pairs)
    }
}

/// Symmetrized adjacency without self-loops.
#[derive(Clone, Debug)]
pub struct UndirectedAdjacency(Csr);

impl UndirectedAdjacency {
    pub fn neighbors(&self, a: usize) -> &[u32] {
        self.0.row(a)
    }

    pub fn len(&self) -> usize {
        self.0.offsets.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn num_edges(&self) -> usize {
        self.0.items.len() / 2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f1() -> ArgumentationFramework {
        let att = [
            (1, 2),
            (2, 3),
            (3, 4),
            (4, 3),
            (4, 5),
            (5, 6),
            (6, 7),
            (7, 5),
        ];
        ArgumentationFramework::new(7, att.iter().map(|&(a, b)| (a - 1, b - 1))).unwrap()
    }

    #[test]
    fn degrees_of_f1() {
        let d = f1().degrees();
        assert_eq!(d[2], (2, 1));
        assert_eq!(d[0], (0, 1));
    }

    #[test]
    fn isolated_and_self_attacker_degrees() {
        let af = ArgumentationFramework::new(2, [(1, 1)]).unwrap();
        assert_eq!(af.degrees(), vec![(0, 0), (1, 1)]);
        assert!(af.is_self_attacking(1));
    }

    #[test]
    fn duplicates_collapse() {
        let af = ArgumentationFramework::new(2, [(0, 1), (0, 1), (1, 0)]).unwrap();
        assert_eq!(af.num_attacks(), 2);
    }

    #[test]
    fn rejects_empty_and_out_of_range() {
        assert_eq!(
            ArgumentationFramework::new(0, []).unwrap_err(),
            AfError::NoArguments
        );
        assert!(ArgumentationFramework::new(2, [(0, 2)]).is_err());
    }

    #[test]
    fn transposition_is_exact() {
        let af = f1();
        for (a, b) in af.attacks() {
            assert!(af.attackers_of(b).contains(&(a as u32)));
        }
        let total_in: usize = (0..7).map(|a| af.attackers_of(a).len()).sum();
        assert_eq!(total_in, af.num_attacks());
    }

    #[test]
    fn undirected_neighbors_merge_both_directions() {
        let af = f1();
        let adj = af.undirected_neighbors();
        assert_eq!(adj.neighbors(2), &[1, 3]);
        assert_eq!(adj.neighbors(4), &[3, 5, 6]);
        let loops = ArgumentationFramework::new(1, [(0, 0)]).unwrap();
        assert!(loops.undirected_neighbors().neighbors(0).is_empty());
    }

    #[test]
    fn resolve_ids() {
        let af = f1();
        assert_eq!(af.resolve("3"), Some(2));
        assert_eq!(af.resolve("0"), None);
        assert_eq!(af.resolve("8"), None);
        assert_eq!(af.resolve("x"), None);
    }
}
