//! Query pipeline: parse, grounded shortcut, embedding, GNN inference.

use std::path::PathBuf;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{mpsc, Arc};
use std::time::{Duration, Instant};

use crate::af::{parse_apx, parse_iccma, ArgumentationFramework, ParseError};
use crate::features::build_embedding;
use crate::gnn::{load_model, GnnModel, InferenceError, ModelError};
use crate::grounded::{grounded_labelling, grounded_shortcut, Label};
use crate::task::{Decision, Task};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InputFormat {
    Iccma23,
    Apx,
}

impl InputFormat {
    pub fn parse(self, bytes: &[u8]) -> Result<ArgumentationFramework, ParseError> {
        match self {
            InputFormat::Iccma23 => parse_iccma(bytes),
            InputFormat::Apx => parse_apx(bytes),
        }
    }
}

impl FromStr for InputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "iccma23" | "i23" => Ok(InputFormat::Iccma23),
            "apx" => Ok(InputFormat::Apx),
            _ => Err(format!(
                "unsupported format `{s}` (expected iccma23 or apx)"
            )),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SolveError {
    #[error("cannot read {path}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot parse {path}")]
    Parse { path: PathBuf, source: ParseError },
    #[error("cannot load model {path}")]
    Model { path: PathBuf, source: ModelError },
    #[error("argument `{0}` does not exist in the framework")]
    UnknownArgument(String),
    #[error("model was trained for {model}, query asks {query}")]
    TaskMismatch { model: Task, query: Task },
    #[error(transparent)]
    Inference(#[from] InferenceError),
}

/// How an answer was reached.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Route {
    Shortcut,
    Network {
        probability: f64,
    },
    /// Budget expired before inference finished.
    Fallback,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Outcome {
    pub decision: Decision,
    pub route: Route,
}

/// Answer for an UNDEC argument when no network output is available.
pub fn fallback_decision(task: Task) -> Decision {
    match task {
        Task::DcCo | Task::DcSt | Task::DsPr => Decision::No,
        Task::DsSt => Decision::Yes,
    }
}

/// A loaded model plus instrumentation counters.
pub struct Solver {
    model: GnnModel,
    embeddings_built: AtomicUsize,
    forward_passes: AtomicUsize,
}

impl Solver {
    pub fn new(model: GnnModel) -> Self {
        Solver {
            model,
            embeddings_built: AtomicUsize::new(0),
            forward_passes: AtomicUsize::new(0),
        }
    }

    pub fn model(&self) -> &GnnModel {
        &self.model
    }

    pub fn embeddings_built(&self) -> usize {
        self.embeddings_built.load(Ordering::Relaxed)
    }

    pub fn forward_passes(&self) -> usize {
        self.forward_passes.load(Ordering::Relaxed)
    }

    fn check_task(&self, task: Task) -> Result<(), SolveError> {
        if self.model.task != task {
            return Err(SolveError::TaskMismatch {
                model: self.model.task,
                query: task,
            });
        }
        Ok(())
    }

    /// Probabilities for every argument (one forward pass).
    pub fn probabilities(&self, af: &ArgumentationFramework) -> Result<Vec<f64>, InferenceError> {
        let lab = grounded_labelling(af);
        self.probabilities_with(af, &lab)
    }

    fn probabilities_with(
        &self,
        af: &ArgumentationFramework,
        lab: &crate::grounded::GroundedLabelling,
    ) -> Result<Vec<f64>, InferenceError> {
        let features = build_embedding(af, lab, self.model.feature_set, self.model.seed);
        self.embeddings_built.fetch_add(1, Ordering::Relaxed);
        let out = self.model.predict(&features, af)?;
        self.forward_passes.fetch_add(1, Ordering::Relaxed);
        Ok(out)
    }

    pub fn accepts(&self, probability: f64) -> Decision {
        Decision::from_bool(probability >= self.model.threshold)
    }

    pub fn solve(
        &self,
        af: &ArgumentationFramework,
        query: usize,
        task: Task,
    ) -> Result<Outcome, SolveError> {
        self.check_task(task)?;
        let lab = grounded_labelling(af);
        if let Some(decision) = grounded_shortcut(&lab, query, task) {
            return Ok(Outcome {
                decision,
                route: Route::Shortcut,
            });
        }
        let probability = self.probabilities_with(af, &lab)?[query];
        Ok(Outcome {
            decision: self.accepts(probability),
            route: Route::Network { probability },
        })
    }

    /// Like [`Solver::solve`], but answers with [`fallback_decision`] if the
    /// network has not finished when `budget` (measured from `start`) runs out.
    pub fn solve_within(
        self: &Arc<Self>,
        af: Arc<ArgumentationFramework>,
        query: usize,
        task: Task,
        start: Instant,
        budget: Duration,
    ) -> Result<Outcome, SolveError> {
        self.check_task(task)?;
        let lab = grounded_labelling(&af);
        if let Some(decision) = grounded_shortcut(&lab, query, task) {
            return Ok(Outcome {
                decision,
                route: Route::Shortcut,
            });
        }
        debug_assert_eq!(lab.label(query), Label::Undec);
        let fallback = Outcome {
            decision: fallback_decision(task),
            route: Route::Fallback,
        };
        let Some(remaining) = budget.checked_sub(start.elapsed()) else {
            return Ok(fallback);
        };
        let (tx, rx) = mpsc::channel();
        let solver = Arc::clone(self);
        std::thread::spawn(move || {
            let _ = tx.send(solver.probabilities_with(&af, &lab));
        });
        match rx.recv_timeout(remaining) {
            Ok(result) => {
                let probability = result?[query];
                Ok(Outcome {
                    decision: self.accepts(probability),
                    route: Route::Network { probability },
                })
            }
            Err(_) => Ok(fallback),
        }
    }
}

/// A complete command-line query.
#[derive(Clone, Debug)]
pub struct Query {
    pub task: Task,
    pub file: PathBuf,
    pub format: InputFormat,
    pub argument: String,
    pub model: PathBuf,
    pub timeout: Option<Duration>,
}

/// Reads the framework and model named by `q` and answers it.
pub fn run_query(q: &Query) -> Result<Outcome, SolveError> {
    let start = Instant::now();
    let bytes = std::fs::read(&q.file).map_err(|source| SolveError::Io {
        path: q.file.clone(),
        source,
    })?;
    let af = q.format.parse(&bytes).map_err(|source| SolveError::Parse {
        path: q.file.clone(),
        source,
    })?;
    let query = af
        .resolve(&q.argument)
        .ok_or_else(|| SolveError::UnknownArgument(q.argument.clone()))?;
    let model_bytes = std::fs::read(&q.model).map_err(|source| SolveError::Io {
        path: q.model.clone(),
        source,
    })?;
    let model = load_model(&model_bytes).map_err(|source| SolveError::Model {
        path: q.model.clone(),
        source,
    })?;
    let solver = Arc::new(Solver::new(model));
    match q.timeout {
        Some(budget) => solver.solve_within(Arc::new(af), query, q.task, start, budget),
        None => solver.solve(&af, query, q.task),
    }
}
