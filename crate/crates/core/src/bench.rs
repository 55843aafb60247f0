//! Accuracy and timing harness.
//!
//! Accuracy follows the per-instance convention: each framework gets
//! `θ = correct / arguments`, and the reported figure is the plain mean of
//! the θ values. Positive- and negative-restricted accuracies are averaged
//! the same way over the instances that have at least one YES (resp. NO)
//! label; instances without any are left out of that average.

use std::io;
use std::time::Instant;

use rayon::prelude::*;

use crate::af::ArgumentationFramework;
use crate::features::build_embedding;
use crate::gnn::InferenceError;
use crate::grounded::{grounded_labelling, Label};
use crate::solver::{fallback_decision, InputFormat, Solver};
use crate::task::{Decision, Task};

pub const CSV_SCHEMA_VERSION: u32 = 1;
pub const CSV_HEADER: [&str; 10] = [
    "instance",
    "task",
    "n_args",
    "theta",
    "pos_acc",
    "neg_acc",
    "parse_ms",
    "grounded_ms",
    "features_ms",
    "infer_ms",
];

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("instance `{instance}` has {labels} labels for {n} arguments")]
    LabelMismatch {
        instance: String,
        labels: usize,
        n: usize,
    },
    #[error("instance `{instance}`: {source}")]
    Inference {
        instance: String,
        source: InferenceError,
    },
    #[error("instance `{instance}`: {source}")]
    Parse {
        instance: String,
        source: crate::af::ParseError,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Produces a YES/NO answer for every argument of a framework.
pub trait Predictor: Sync {
    fn predict(&self, af: &ArgumentationFramework) -> Result<Vec<Decision>, InferenceError>;
}

/// Grounded labelling only: IN → YES, OUT → NO, UNDEC → the solver's
/// fallback answer for the task.
pub struct GroundedBaseline(pub Task);

impl Predictor for GroundedBaseline {
    fn predict(&self, af: &ArgumentationFramework) -> Result<Vec<Decision>, InferenceError> {
        let undec = fallback_decision(self.0);
        Ok(grounded_labelling(af)
            .labels()
            .iter()
            .map(|l| match l {
                Label::In => Decision::Yes,
                Label::Out => Decision::No,
                Label::Undec => undec,
            })
            .collect())
    }
}

pub struct ConstantPredictor(pub Decision);

impl Predictor for ConstantPredictor {
    fn predict(&self, af: &ArgumentationFramework) -> Result<Vec<Decision>, InferenceError> {
        Ok(vec![self.0; af.num_arguments()])
    }
}

/// One forward pass per framework. With `shortcut`, IN/OUT arguments take
/// their grounded answer and only UNDEC arguments use the network output.
pub struct NetworkPredictor<'a> {
    pub solver: &'a Solver,
    pub shortcut: bool,
}

impl Predictor for NetworkPredictor<'_> {
    fn predict(&self, af: &ArgumentationFramework) -> Result<Vec<Decision>, InferenceError> {
        let lab = grounded_labelling(af);
        let probs = self.solver.probabilities(af)?;
        Ok(probs
            .iter()
            .zip(lab.labels())
            .map(|(&p, l)| match (self.shortcut, l) {
                (true, Label::In) => Decision::Yes,
                (true, Label::Out) => Decision::No,
                _ => self.solver.accepts(p),
            })
            .collect())
    }
}

pub struct LabelledInstance {
    pub name: String,
    pub af: ArgumentationFramework,
    pub labels: Vec<Decision>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InstanceScore {
    pub name: String,
    pub n_args: usize,
    pub pos_correct: usize,
    pub pos_total: usize,
    pub neg_correct: usize,
    pub neg_total: usize,
    pub infer_ms: f64,
}

impl InstanceScore {
    pub fn theta(&self) -> f64 {
        (self.pos_correct + self.neg_correct) as f64 / self.n_args as f64
    }

    /// `None` when the instance has no YES label.
    pub fn pos_accuracy(&self) -> Option<f64> {
        (self.pos_total > 0).then(|| self.pos_correct as f64 / self.pos_total as f64)
    }

    /// `None` when the instance has no NO label.
    pub fn neg_accuracy(&self) -> Option<f64> {
        (self.neg_total > 0).then(|| self.neg_correct as f64 / self.neg_total as f64)
    }
}

pub fn score(name: &str, predictions: &[Decision], labels: &[Decision]) -> InstanceScore {
    assert_eq!(predictions.len(), labels.len());
    let mut s = InstanceScore {
        name: name.to_string(),
        n_args: labels.len(),
        pos_correct: 0,
        pos_total: 0,
        neg_correct: 0,
        neg_total: 0,
        infer_ms: 0.0,
    };
    for (p, l) in predictions.iter().zip(labels) {
        match l {
            Decision::Yes => {
                s.pos_total += 1;
                s.pos_correct += (p == l) as usize;
            }
            Decision::No => {
                s.neg_total += 1;
                s.neg_correct += (p == l) as usize;
            }
        }
    }
    s
}

/// Mean of `values`, `None` when empty.
pub fn macro_average(values: impl IntoIterator<Item = f64>) -> Option<f64> {
    let (sum, count) = values
        .into_iter()
        .fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    (count > 0).then(|| sum / count as f64)
}

#[derive(Clone, Debug, PartialEq)]
pub struct WallClock {
    pub total_ms: f64,
    pub mean_ms: f64,
    pub max_ms: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AccuracyReport {
    pub task: Task,
    pub instances: Vec<InstanceScore>,
    /// `None` only for an empty dataset.
    pub macro_accuracy: Option<f64>,
    pub pos_accuracy: Option<f64>,
    pub neg_accuracy: Option<f64>,
    pub wall_clock: WallClock,
}

impl AccuracyReport {
    pub fn from_scores(task: Task, instances: Vec<InstanceScore>) -> Self {
        let times: Vec<f64> = instances.iter().map(|s| s.infer_ms).collect();
        let total_ms: f64 = times.iter().sum();
        AccuracyReport {
            task,
            macro_accuracy: macro_average(instances.iter().map(InstanceScore::theta)),
            pos_accuracy: macro_average(instances.iter().filter_map(InstanceScore::pos_accuracy)),
            neg_accuracy: macro_average(instances.iter().filter_map(InstanceScore::neg_accuracy)),
            wall_clock: WallClock {
                total_ms,
                mean_ms: if times.is_empty() {
                    0.0
                } else {
                    total_ms / times.len() as f64
                },
                max_ms: times.iter().copied().fold(0.0, f64::max),
            },
            instances,
        }
    }

    pub fn rows(&self) -> Vec<ReportRow> {
        self.instances
            .iter()
            .map(|s| ReportRow {
                instance: s.name.clone(),
                task: Some(self.task),
                n_args: s.n_args,
                theta: Some(s.theta()),
                pos_acc: s.pos_accuracy(),
                neg_acc: s.neg_accuracy(),
                infer_ms: Some(s.infer_ms),
                ..ReportRow::default()
            })
            .collect()
    }
}

/// Scores `predictor` on every argument of every instance.
pub fn evaluate<P: Predictor>(
    predictor: &P,
    instances: &[LabelledInstance],
    task: Task,
) -> Result<AccuracyReport, BenchError> {
    for inst in instances {
        if inst.labels.len() != inst.af.num_arguments() {
            return Err(BenchError::LabelMismatch {
                instance: inst.name.clone(),
                labels: inst.labels.len(),
                n: inst.af.num_arguments(),
            });
        }
    }
    let scores = instances
        .par_iter()
        .map(|inst| {
            let start = Instant::now();
            let predictions =
                predictor
                    .predict(&inst.af)
                    .map_err(|source| BenchError::Inference {
                        instance: inst.name.clone(),
                        source,
                    })?;
            let elapsed = start.elapsed().as_secs_f64() * 1e3;
            let mut s = score(&inst.name, &predictions, &inst.labels);
            s.infer_ms = elapsed;
            Ok(s)
        })
        .collect::<Result<Vec<_>, BenchError>>()?;
    Ok(AccuracyReport::from_scores(task, scores))
}

/// Framework with a single query argument and its expected answer.
pub struct QueryInstance {
    pub name: String,
    pub af: ArgumentationFramework,
    pub query: usize,
    pub expected: Decision,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolvedCount {
    pub solved: usize,
    pub total: usize,
}

/// Single-query mode: counts instances whose answer matches the expected
/// one. Errors count as unsolved.
pub fn count_solved<F>(instances: &[QueryInstance], answer: F) -> SolvedCount
where
    F: Fn(&ArgumentationFramework, usize) -> Option<Decision> + Sync,
{
    let solved = instances
        .par_iter()
        .filter(|q| answer(&q.af, q.query) == Some(q.expected))
        .count();
    SolvedCount {
        solved,
        total: instances.len(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stage {
    Parse,
    Grounded,
    Features,
    Inference,
}

impl Stage {
    pub const ALL: [Stage; 4] = [
        Stage::Parse,
        Stage::Grounded,
        Stage::Features,
        Stage::Inference,
    ];
}

/// One CSV line. Empty cells stand for values that were not measured.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ReportRow {
    pub instance: String,
    pub task: Option<Task>,
    pub n_args: usize,
    pub theta: Option<f64>,
    pub pos_acc: Option<f64>,
    pub neg_acc: Option<f64>,
    pub parse_ms: Option<f64>,
    pub grounded_ms: Option<f64>,
    pub features_ms: Option<f64>,
    pub infer_ms: Option<f64>,
}

pub struct RawInstance<'a> {
    pub name: String,
    pub bytes: &'a [u8],
    pub format: InputFormat,
}

fn ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// Times the pipeline stage by stage. Stages run in pipeline order up to the
/// last requested one; only requested stages are reported. An empty filter
/// requests all stages. Inference is skipped without a solver.
pub fn time_pipeline(
    instances: &[RawInstance<'_>],
    stages: &[Stage],
    solver: Option<&Solver>,
) -> Result<Vec<ReportRow>, BenchError> {
    let wanted = |s: Stage| stages.is_empty() || stages.contains(&s);
    let last = Stage::ALL
        .into_iter()
        .filter(|&s| wanted(s))
        .max()
        .unwrap_or(Stage::Parse);
    instances
        .iter()
        .map(|inst| {
            let mut row = ReportRow {
                instance: inst.name.clone(),
                task: solver.map(|s| s.model().task),
                ..ReportRow::default()
            };
            let t = Instant::now();
            let af = inst
                .format
                .parse(inst.bytes)
                .map_err(|source| BenchError::Parse {
                    instance: inst.name.clone(),
                    source,
                })?;
            row.parse_ms = Some(ms(t));
            row.n_args = af.num_arguments();
            if last >= Stage::Grounded {
                let t = Instant::now();
                let lab = grounded_labelling(&af);
                row.grounded_ms = Some(ms(t));
                if last >= Stage::Features {
                    let (layout, seed) = solver
                        .map(|s| (s.model().feature_set, s.model().seed))
                        .unwrap_or((crate::features::FeatureLayout::P11, 0));
                    let t = Instant::now();
                    let features = build_embedding(&af, &lab, layout, seed);
                    row.features_ms = Some(ms(t));
                    if let (true, Some(solver)) = (last >= Stage::Inference, solver) {
                        let t = Instant::now();
                        solver.model().predict(&features, &af).map_err(|source| {
                            BenchError::Inference {
                                instance: inst.name.clone(),
                                source,
                            }
                        })?;
                        row.infer_ms = Some(ms(t));
                    }
                }
            }
            for (stage, cell) in [
                (Stage::Parse, &mut row.parse_ms),
                (Stage::Grounded, &mut row.grounded_ms),
                (Stage::Features, &mut row.features_ms),
                (Stage::Inference, &mut row.infer_ms),
            ] {
                if !wanted(stage) {
                    *cell = None;
                }
            }
            Ok(row)
        })
        .collect()
}

/// Writes a `# afgnn-bench-csv v<version>` comment line, the header, and one
/// line per row.
pub fn write_csv<W: io::Write>(mut out: W, rows: &[ReportRow]) -> Result<(), BenchError> {
    writeln!(out, "# afgnn-bench-csv v{CSV_SCHEMA_VERSION}")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    let cell = |v: Option<f64>| v.map(|x| format!("{x:.6}")).unwrap_or_default();
    for r in rows {
        w.write_record([
            r.instance.clone(),
            r.task.map(|t| t.to_string()).unwrap_or_default(),
            r.n_args.to_string(),
            cell(r.theta),
            cell(r.pos_acc),
            cell(r.neg_acc),
            cell(r.parse_ms),
            cell(r.grounded_ms),
            cell(r.features_ms),
            cell(r.infer_ms),
        ])?;
    }
    w.flush()?;
    Ok(())
}
