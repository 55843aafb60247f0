//! Grounded labelling in `O(n + |attacks|)` time and space.
//!
//! Every argument carries a counter of attackers that are not yet OUT.
//! Arguments whose counter is zero are IN; their targets become OUT, which
//! decrements the counters of the arguments those targets attack. Whatever is
//! never reached stays UNDEC.

use crate::af::ArgumentationFramework;
use crate::task::{Decision, Task};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Label {
    In,
    Out,
    Undec,
}

impl Label {
    /// Encoding used in the node embedding.
    pub fn feature_value(self) -> f64 {
        match self {
            Label::In => 1.0,
            Label::Out => 0.0,
            Label::Undec => 0.5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundedLabelling {
    labels: Vec<Label>,
}

impl GroundedLabelling {
    pub fn label(&self, a: usize) -> Label {
        self.labels[a]
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn with_label(&self, label: Label) -> impl Iterator<Item = usize> + '_ {
        self.labels
            .iter()
            .enumerate()
            .filter(move |(_, &l)| l == label)
            .map(|(i, _)| i)
    }

    /// The grounded extension (IN arguments), ascending.
    pub fn extension(&self) -> Vec<usize> {
        self.with_label(Label::In).collect()
    }

    pub fn count(&self, label: Label) -> usize {
        self.labels.iter().filter(|&&l| l == label).count()
    }
}

pub fn grounded_labelling(af: &ArgumentationFramework) -> GroundedLabelling {
    let n = af.num_arguments();
    let mut live_attackers: Vec<u32> = (0..n).map(|a| af.attackers_of(a).len() as u32).collect();
    let mut labels = vec![Label::Undec; n];
    let mut worklist: Vec<u32> = (0..n as u32)
        .filter(|&a| live_attackers[a as usize] == 0)
        .collect();
    while let Some(a) = worklist.pop() {
        labels[a as usize] = Label::In;
        for &b in af.targets_of(a as usize) {
            if labels[b as usize] == Label::Out {
                continue;
            }
            labels[b as usize] = Label::Out;
            for &c in af.targets_of(b as usize) {
                let count = &mut live_attackers[c as usize];
                *count -= 1;
                if *count == 0 && labels[c as usize] == Label::Undec {
                    worklist.push(c);
                }
            }
        }
    }
    GroundedLabelling { labels }
}

/// Answers a query from the grounded labelling alone: IN gives YES and OUT
/// gives NO for every supported task, UNDEC gives no decision.
///
/// IN ⇒ YES is exact for DC-CO and DS-PR, OUT ⇒ NO is exact for DC-CO, DC-ST
/// and DS-PR. For the stable tasks the answer can be wrong on frameworks
/// without stable extensions (IN under DC-ST, OUT under DS-ST).
pub fn grounded_shortcut(lab: &GroundedLabelling, query: usize, _task: Task) -> Option<Decision> {
    match lab.label(query) {
        Label::In => Some(Decision::Yes),
        Label::Out => Some(Decision::No),
        Label::Undec => None,
    }
}
