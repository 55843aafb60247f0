//! Approximate acceptability reasoning for abstract argumentation.
//!
//! The pipeline parses a framework, labels it with the grounded semantics,
//! answers IN/OUT queries directly, and otherwise builds a node embedding and
//! runs a GCN or GATv2 model. An exhaustive [`oracle`] provides exact answers
//! on small frameworks, and [`bench`] measures accuracy and stage timings.

pub mod af;
pub mod bench;
pub mod features;
pub mod generate;
pub mod gnn;
pub mod gradual;
pub mod grounded;
pub mod oracle;
pub mod solver;
pub mod task;

pub use af::{parse_apx, parse_iccma, ArgumentId, ArgumentationFramework};
pub use grounded::{grounded_labelling, grounded_shortcut, GroundedLabelling, Label};
pub use task::{Decision, Task};
