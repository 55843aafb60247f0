//! Graph neural network inference: residual GCN and three-layer GATv2.
//!
//! Weights are plain row-major `in × out` matrices, so a layer maps node rows
//! with `H · W`. Propagation over the framework is sparse and edge-wise.

mod codec;
pub mod gat;
pub mod gcn;

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::af::ArgumentationFramework;
use crate::features::{FeatureLayout, FeatureMatrix, FEATURE_SCHEMA_VERSION};
use crate::task::Task;

pub use codec::{load_model, save_model, FORMAT_VERSION, MAGIC};
pub use gat::{attention_neighborhoods, gatv2_forward, Neighborhoods};
pub use gcn::{gcn_forward, gcn_layer, NormalizedAdjacency};

/// Head counts and per-head widths of the three attentional layers.
pub const GAT_HEADS: [usize; 3] = [5, 3, 3];
pub const GAT_HEAD_WIDTHS: [usize; 3] = [5, 5, 1];
/// Slope of the leaky ReLU inside attention scoring.
pub const ATTENTION_SLOPE: f64 = 0.2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Architecture {
    Gcn,
    GatV2,
}

impl Architecture {
    pub fn as_str(self) -> &'static str {
        match self {
            Architecture::Gcn => "GCN",
            Architecture::GatV2 => "GATV2",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Activation {
    Relu,
    /// Slope 0.2.
    LeakyRelu,
    Sigmoid,
    Identity,
}

impl Activation {
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Relu => x.max(0.0),
            Activation::LeakyRelu => {
                if x >= 0.0 {
                    x
                } else {
                    ATTENTION_SLOPE * x
                }
            }
            Activation::Sigmoid => sigmoid(x),
            Activation::Identity => x,
        }
    }

    pub(crate) fn apply_all(self, m: &mut Array2<f64>) {
        if self != Activation::Identity {
            m.mapv_inplace(|x| self.apply(x));
        }
    }
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Dense {
    pub weight: Array2<f64>,
    pub bias: Array1<f64>,
    pub activation: Activation,
}

/// Graph convolution followed by bias and activation. With `residual` the
/// block input is `[H_prev ‖ H_0]`.
#[derive(Clone, Debug, PartialEq)]
pub struct GcnBlock {
    pub weight: Array2<f64>,
    pub bias: Array1<f64>,
    pub residual: bool,
    pub activation: Activation,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GatHead {
    /// Applied to the receiving node `i` (`in × out`).
    pub w_target: Array2<f64>,
    /// Applied to the neighbor `j`; also produces the message (`in × out`).
    pub w_source: Array2<f64>,
    pub attention: Array1<f64>,
    pub bias: Array1<f64>,
}

impl GatHead {
    pub fn in_dim(&self) -> usize {
        self.w_source.nrows()
    }

    pub fn out_dim(&self) -> usize {
        self.w_source.ncols()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum HeadCombine {
    Concat,
    Mean,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GatLayer {
    pub heads: Vec<GatHead>,
    pub combine: HeadCombine,
    pub activation: Activation,
}

impl GatLayer {
    pub fn in_dim(&self) -> usize {
        self.heads.first().map_or(0, GatHead::in_dim)
    }

    pub fn out_dim(&self) -> usize {
        let width = self.heads.first().map_or(0, GatHead::out_dim);
        match self.combine {
            HeadCombine::Concat => width * self.heads.len(),
            HeadCombine::Mean => width,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Layer {
    GcnBlock(GcnBlock),
    Dense(Dense),
    Gat(GatLayer),
}

#[derive(Clone, Debug, PartialEq)]
pub struct GnnModel {
    pub arch: Architecture,
    pub task: Task,
    pub feature_set: FeatureLayout,
    /// Column definition version the weights were trained against.
    pub feature_schema: u32,
    pub seed: u64,
    pub threshold: f64,
    /// Training metadata; inference never drops units.
    pub dropout_rate: f64,
    pub layers: Vec<Layer>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("not a model file (bad magic)")]
    BadMagic,
    #[error("unsupported model format version {0}")]
    Version(u32),
    #[error("model file truncated at byte {0}")]
    Truncated(usize),
    #[error("{0} trailing bytes after the last layer")]
    TrailingBytes(usize),
    #[error("unknown {field} tag {value}")]
    UnknownTag { field: &'static str, value: u32 },
    #[error("feature schema {found} does not match this build ({expected})")]
    FeatureSchema { found: u32, expected: u32 },
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("invalid {field}: {value}")]
    InvalidParameter { field: &'static str, value: f64 },
    #[error("invalid structure: {0}")]
    Structure(String),
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum InferenceError {
    #[error("model expects {expected} features, got {found}")]
    FeatureSetMismatch {
        expected: FeatureLayout,
        found: FeatureLayout,
    },
    #[error("feature matrix has {rows} rows for {n} arguments")]
    RowMismatch { rows: usize, n: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("model architecture is {0}")]
    WrongArchitecture(&'static str),
}

fn dim_err(what: String) -> ModelError {
    ModelError::Dimension(what)
}

impl GnnModel {
    pub fn input_width(&self) -> usize {
        self.feature_set.width()
    }

    /// Checks every dimension and structural rule; loading runs this.
    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(ModelError::InvalidParameter {
                field: "threshold",
                value: self.threshold,
            });
        }
        if !(0.0..1.0).contains(&self.dropout_rate) {
            return Err(ModelError::InvalidParameter {
                field: "dropout_rate",
                value: self.dropout_rate,
            });
        }
        if self.feature_schema != FEATURE_SCHEMA_VERSION {
            return Err(ModelError::FeatureSchema {
                found: self.feature_schema,
                expected: FEATURE_SCHEMA_VERSION,
            });
        }
        for (i, layer) in self.layers.iter().enumerate() {
            check_layer_arrays(i, layer)?;
        }
        match self.arch {
            Architecture::Gcn => self.validate_gcn(),
            Architecture::GatV2 => self.validate_gat(),
        }
    }

    fn validate_gcn(&self) -> Result<(), ModelError> {
        let d0 = self.input_width();
        let Some((Layer::Dense(head), blocks)) = self.layers.split_last() else {
            return Err(ModelError::Structure(
                "a GCN model ends with a dense output layer".into(),
            ));
        };
        if blocks.is_empty() {
            return Err(ModelError::Structure(
                "a GCN model needs at least one block".into(),
            ));
        }
        let mut width = d0;
        for (i, layer) in blocks.iter().enumerate() {
            let Layer::GcnBlock(b) = layer else {
                return Err(ModelError::Structure(format!(
                    "layer {i} of a GCN model is not a GCN block"
                )));
            };
            let expected = width + if b.residual { d0 } else { 0 };
            if b.weight.nrows() != expected {
                return Err(dim_err(format!(
                    "layer {i}: in_dim {} but the previous layer provides {expected}",
                    b.weight.nrows()
                )));
            }
            width = b.weight.ncols();
        }
        if head.weight.nrows() != width || head.weight.ncols() != 1 {
            return Err(dim_err(format!(
                "output layer is {}x{}, expected {width}x1",
                head.weight.nrows(),
                head.weight.ncols()
            )));
        }
        if head.activation != Activation::Sigmoid {
            return Err(ModelError::Structure(
                "the output layer must use sigmoid".into(),
            ));
        }
        Ok(())
    }

    fn validate_gat(&self) -> Result<(), ModelError> {
        if self.feature_set != FeatureLayout::P11 {
            return Err(dim_err("GATV2 models take the 11-column layout".into()));
        }
        if self.layers.len() != 3 {
            return Err(ModelError::Structure(format!(
                "GATV2 models have 3 attentional layers, found {}",
                self.layers.len()
            )));
        }
        let mut width = self.input_width();
        for (i, layer) in self.layers.iter().enumerate() {
            let Layer::Gat(g) = layer else {
                return Err(ModelError::Structure(format!(
                    "layer {i} is not attentional"
                )));
            };
            if g.heads.len() != GAT_HEADS[i] {
                return Err(ModelError::Structure(format!(
                    "layer {i} has {} heads, expected {}",
                    g.heads.len(),
                    GAT_HEADS[i]
                )));
            }
            for (h, head) in g.heads.iter().enumerate() {
                if head.in_dim() != width || head.out_dim() != GAT_HEAD_WIDTHS[i] {
                    return Err(dim_err(format!(
                        "layer {i} head {h} is {}x{}, expected {width}x{}",
                        head.in_dim(),
                        head.out_dim(),
                        GAT_HEAD_WIDTHS[i]
                    )));
                }
            }
            let last = i == 2;
            let expected_combine = if last {
                HeadCombine::Mean
            } else {
                HeadCombine::Concat
            };
            if g.combine != expected_combine {
                return Err(ModelError::Structure(format!(
                    "layer {i} combines heads with {:?}",
                    g.combine
                )));
            }
            if last && g.activation != Activation::Sigmoid {
                return Err(ModelError::Structure(
                    "the last layer must use sigmoid".into(),
                ));
            }
            width = g.out_dim();
        }
        Ok(())
    }

    /// Per-argument acceptance probability.
    pub fn predict(
        &self,
        features: &FeatureMatrix,
        af: &ArgumentationFramework,
    ) -> Result<Vec<f64>, InferenceError> {
        match self.arch {
            Architecture::Gcn => gcn_forward(self, features, af),
            Architecture::GatV2 => gatv2_forward(self, features, af),
        }
    }

    pub(crate) fn check_input(
        &self,
        features: &FeatureMatrix,
        af: &ArgumentationFramework,
    ) -> Result<(), InferenceError> {
        if features.layout != self.feature_set {
            return Err(InferenceError::FeatureSetMismatch {
                expected: self.feature_set,
                found: features.layout,
            });
        }
        if features.values.nrows() != af.num_arguments() {
            return Err(InferenceError::RowMismatch {
                rows: features.values.nrows(),
                n: af.num_arguments(),
            });
        }
        if features.values.ncols() != self.input_width() {
            return Err(InferenceError::Dimension(format!(
                "feature matrix has {} columns",
                features.values.ncols()
            )));
        }
        Ok(())
    }

    /// Residual GCN with `blocks` blocks of width `hidden` and Glorot-uniform
    /// weights drawn from `seed`. Block 1 reads the input features, later
    /// blocks read `[H_prev ‖ H_0]`.
    pub fn gcn_random(
        task: Task,
        layout: FeatureLayout,
        hidden: usize,
        blocks: usize,
        seed: u64,
    ) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d0 = layout.width();
        let mut layers = Vec::with_capacity(blocks + 1);
        for k in 0..blocks {
            let in_dim = if k == 0 { d0 } else { hidden + d0 };
            layers.push(Layer::GcnBlock(GcnBlock {
                weight: glorot(&mut rng, in_dim, hidden),
                bias: Array1::zeros(hidden),
                residual: k > 0,
                activation: Activation::Relu,
            }));
        }
        layers.push(Layer::Dense(Dense {
            weight: glorot(&mut rng, hidden, 1),
            bias: Array1::zeros(1),
            activation: Activation::Sigmoid,
        }));
        GnnModel {
            arch: Architecture::Gcn,
            task,
            feature_set: layout,
            feature_schema: FEATURE_SCHEMA_VERSION,
            seed,
            threshold: 0.5,
            dropout_rate: 0.0,
            layers,
        }
    }

    /// The 4-block GCN with hidden width equal to the input width.
    pub fn gcn_default(task: Task, layout: FeatureLayout, seed: u64) -> Self {
        Self::gcn_random(task, layout, layout.width(), 4, seed)
    }

    /// Three-layer GATv2 over the 11-column layout with Glorot-uniform
    /// weights drawn from `seed`.
    pub fn gatv2_random(task: Task, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut width = FeatureLayout::P11.width();
        let mut layers = Vec::with_capacity(3);
        for i in 0..3 {
            let out = GAT_HEAD_WIDTHS[i];
            let heads = (0..GAT_HEADS[i])
                .map(|_| GatHead {
                    w_target: glorot(&mut rng, width, out),
                    w_source: glorot(&mut rng, width, out),
                    attention: glorot(&mut rng, out, 1).column(0).to_owned(),
                    bias: Array1::zeros(out),
                })
                .collect();
            let last = i == 2;
            let layer = GatLayer {
                heads,
                combine: if last {
                    HeadCombine::Mean
                } else {
                    HeadCombine::Concat
                },
                activation: if last {
                    Activation::Sigmoid
                } else {
                    Activation::LeakyRelu
                },
            };
            width = layer.out_dim();
            layers.push(Layer::Gat(layer));
        }
        GnnModel {
            arch: Architecture::GatV2,
            task,
            feature_set: FeatureLayout::P11,
            feature_schema: FEATURE_SCHEMA_VERSION,
            seed,
            threshold: 0.5,
            dropout_rate: 0.0,
            layers,
        }
    }

    /// Same shape with every weight, bias and attention entry set to zero.
    pub fn zeroed(mut self) -> Self {
        for layer in &mut self.layers {
            match layer {
                Layer::GcnBlock(b) => {
                    b.weight.fill(0.0);
                    b.bias.fill(0.0);
                }
                Layer::Dense(d) => {
                    d.weight.fill(0.0);
                    d.bias.fill(0.0);
                }
                Layer::Gat(g) => {
                    for h in &mut g.heads {
                        h.w_target.fill(0.0);
                        h.w_source.fill(0.0);
                        h.attention.fill(0.0);
                        h.bias.fill(0.0);
                    }
                }
            }
        }
        self
    }
}

fn check_layer_arrays(i: usize, layer: &Layer) -> Result<(), ModelError> {
    let bad = |what: &str| Err(dim_err(format!("layer {i}: {what}")));
    match layer {
        Layer::GcnBlock(GcnBlock { weight, bias, .. })
        | Layer::Dense(Dense { weight, bias, .. }) => {
            if weight.ncols() != bias.len() {
                return bad("bias length differs from out_dim");
            }
        }
        Layer::Gat(g) => {
            if g.heads.is_empty() {
                return bad("no attention heads");
            }
            let (in_dim, out_dim) = (g.heads[0].in_dim(), g.heads[0].out_dim());
            for h in &g.heads {
                if h.w_target.dim() != (in_dim, out_dim) || h.w_source.dim() != (in_dim, out_dim) {
                    return bad("heads have different shapes");
                }
                if h.attention.len() != out_dim || h.bias.len() != out_dim {
                    return bad("attention or bias length differs from the head width");
                }
            }
        }
    }
    Ok(())
}

fn glorot(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Array2<f64> {
    let limit = (6.0 / (rows + cols) as f64).sqrt();
    Array2::from_shape_fn((rows, cols), |_| rng.gen_range(-limit..limit))
}
