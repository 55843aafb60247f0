//! Canonical binary model file.
//!
//! All integers and floats are little-endian; arrays are row-major `f64`.
//!
//! ```text
//! magic          8 bytes  "AFGNNMDL"
//! format_version u32      1
//! arch           u8       0 = GCN, 1 = GATV2
//! task           u8       0 = DC-CO, 1 = DC-ST, 2 = DS-PR, 3 = DS-ST
//! feature_set    u8       0 = P11, 1 = P128
//! feature_schema u32
//! seed           u64
//! threshold      f64
//! dropout_rate   f64
//! layer_count    u32
//! layers:
//!   kind         u8       0 = gcn-block, 1 = dense, 2 = gat-head-block
//!   activation   u8       0 = relu, 1 = leaky-relu(0.2), 2 = sigmoid, 3 = identity
//!   in_dim       u32
//!   out_dim      u32      per head for gat-head-block
//!   gcn-block:   residual u8, weight in·out, bias out
//!   dense:       weight in·out, bias out
//!   gat-head-block: combine u8 (0 = concat, 1 = mean), heads u32,
//!                then per head w_target in·out, w_source in·out,
//!                attention out, bias out
//! ```

use ndarray::{Array1, Array2};

use super::{
    Activation, Architecture, Dense, GatHead, GatLayer, GcnBlock, GnnModel, HeadCombine, Layer,
    ModelError,
};
use crate::features::FeatureLayout;
use crate::task::Task;

pub const MAGIC: &[u8; 8] = b"AFGNNMDL";
pub const FORMAT_VERSION: u32 = 1;

// Upper bound on any single dimension; guards allocations on corrupt input.
const MAX_DIM: u32 = 1 << 16;

fn activation_code(a: Activation) -> u8 {
    match a {
        Activation::Relu => 0,
        Activation::LeakyRelu => 1,
        Activation::Sigmoid => 2,
        Activation::Identity => 3,
    }
}

fn activation_from(code: u8) -> Result<Activation, ModelError> {
    Ok(match code {
        0 => Activation::Relu,
        1 => Activation::LeakyRelu,
        2 => Activation::Sigmoid,
        3 => Activation::Identity,
        v => return Err(unknown("activation", v as u32)),
    })
}

fn unknown(field: &'static str, value: u32) -> ModelError {
    ModelError::UnknownTag { field, value }
}

struct Writer(Vec<u8>);

impl Writer {
    fn u8(&mut self, v: u8) {
        self.0.push(v);
    }
    fn u32(&mut self, v: u32) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn u64(&mut self, v: u64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn f64(&mut self, v: f64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn floats<'a>(&mut self, values: impl IntoIterator<Item = &'a f64>) {
        for &v in values {
            self.f64(v);
        }
    }
    // `iter()` on a standard-layout array walks it in row-major order
    fn matrix(&mut self, m: &Array2<f64>) {
        self.floats(m.iter());
    }
}

pub fn save_model(model: &GnnModel) -> Vec<u8> {
    let mut w = Writer(Vec::new());
    w.0.extend_from_slice(MAGIC);
    w.u32(FORMAT_VERSION);
    w.u8(match model.arch {
        Architecture::Gcn => 0,
        Architecture::GatV2 => 1,
    });
    w.u8(model.task.code());
    w.u8(model.feature_set.code());
    w.u32(model.feature_schema);
    w.u64(model.seed);
    w.f64(model.threshold);
    w.f64(model.dropout_rate);
    w.u32(model.layers.len() as u32);
    for layer in &model.layers {
        match layer {
            Layer::GcnBlock(b) => {
                w.u8(0);
                w.u8(activation_code(b.activation));
                w.u32(b.weight.nrows() as u32);
                w.u32(b.weight.ncols() as u32);
                w.u8(b.residual as u8);
                w.matrix(&b.weight);
                w.floats(b.bias.iter());
            }
            Layer::Dense(d) => {
                w.u8(1);
                w.u8(activation_code(d.activation));
                w.u32(d.weight.nrows() as u32);
                w.u32(d.weight.ncols() as u32);
                w.matrix(&d.weight);
                w.floats(d.bias.iter());
            }
            Layer::Gat(g) => {
                w.u8(2);
                w.u8(activation_code(g.activation));
                w.u32(g.in_dim() as u32);
                w.u32(g.heads.first().map_or(0, |h| h.out_dim()) as u32);
                w.u8(match g.combine {
                    HeadCombine::Concat => 0,
                    HeadCombine::Mean => 1,
                });
                w.u32(g.heads.len() as u32);
                for h in &g.heads {
                    w.matrix(&h.w_target);
                    w.matrix(&h.w_source);
                    w.floats(h.attention.iter());
                    w.floats(h.bias.iter());
                }
            }
        }
    }
    w.0
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, len: usize) -> Result<&'a [u8], ModelError> {
        let end = self
            .pos
            .checked_add(len)
            .filter(|&e| e <= self.bytes.len())
            .ok_or(ModelError::Truncated(self.bytes.len()))?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }
    fn u8(&mut self) -> Result<u8, ModelError> {
        Ok(self.take(1)?[0])
    }
    fn u32(&mut self) -> Result<u32, ModelError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn u64(&mut self) -> Result<u64, ModelError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn f64(&mut self) -> Result<f64, ModelError> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn dim(&mut self) -> Result<usize, ModelError> {
        let d = self.u32()?;
        if d == 0 || d > MAX_DIM {
            return Err(ModelError::Dimension(format!(
                "layer dimension {d} out of range"
            )));
        }
        Ok(d as usize)
    }
    fn vector(&mut self, len: usize) -> Result<Array1<f64>, ModelError> {
        let raw = self.take(len * 8)?;
        Ok(raw
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }
    fn matrix(&mut self, rows: usize, cols: usize) -> Result<Array2<f64>, ModelError> {
        let flat = self.vector(rows * cols)?;
        Ok(flat
            .into_shape_with_order((rows, cols))
            .expect("length checked"))
    }
}

/// Decodes and validates a model file.
pub fn load_model(bytes: &[u8]) -> Result<GnnModel, ModelError> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(MAGIC.len()).map_err(|_| ModelError::BadMagic)? != MAGIC {
        return Err(ModelError::BadMagic);
    }
    let version = r.u32()?;
    if version != FORMAT_VERSION {
        return Err(ModelError::Version(version));
    }
    let arch = match r.u8()? {
        0 => Architecture::Gcn,
        1 => Architecture::GatV2,
        v => return Err(unknown("arch", v as u32)),
    };
    let task = r.u8()?;
    let task = Task::from_code(task).ok_or(unknown("task", task as u32))?;
    let layout = r.u8()?;
    let feature_set =
        FeatureLayout::from_code(layout).ok_or(unknown("feature_set", layout as u32))?;
    let feature_schema = r.u32()?;
    let seed = r.u64()?;
    let threshold = r.f64()?;
    let dropout_rate = r.f64()?;
    let layer_count = r.u32()?;
    if layer_count > 64 {
        return Err(ModelError::Structure(format!("{layer_count} layers")));
    }
    let mut layers = Vec::with_capacity(layer_count as usize);
    for _ in 0..layer_count {
        let kind = r.u8()?;
        let activation = activation_from(r.u8()?)?;
        let (in_dim, out_dim) = (r.dim()?, r.dim()?);
        layers.push(match kind {
            0 => {
                let residual = match r.u8()? {
                    0 => false,
                    1 => true,
                    v => return Err(unknown("residual", v as u32)),
                };
                Layer::GcnBlock(GcnBlock {
                    weight: r.matrix(in_dim, out_dim)?,
                    bias: r.vector(out_dim)?,
                    residual,
                    activation,
                })
            }
            1 => Layer::Dense(Dense {
                weight: r.matrix(in_dim, out_dim)?,
                bias: r.vector(out_dim)?,
                activation,
            }),
            2 => {
                let combine = match r.u8()? {
                    0 => HeadCombine::Concat,
                    1 => HeadCombine::Mean,
                    v => return Err(unknown("combine", v as u32)),
                };
                let heads = r.u32()?;
                if heads == 0 || heads > 64 {
                    return Err(ModelError::Structure(format!("{heads} attention heads")));
                }
                let heads = (0..heads)
                    .map(|_| {
                        Ok(GatHead {
                            w_target: r.matrix(in_dim, out_dim)?,
                            w_source: r.matrix(in_dim, out_dim)?,
                            attention: r.vector(out_dim)?,
                            bias: r.vector(out_dim)?,
                        })
                    })
                    .collect::<Result<Vec<_>, ModelError>>()?;
                Layer::Gat(GatLayer {
                    heads,
                    combine,
                    activation,
                })
            }
            v => return Err(unknown("layer kind", v as u32)),
        });
    }
    if r.pos != bytes.len() {
        return Err(ModelError::TrailingBytes(bytes.len() - r.pos));
    }
    let model = GnnModel {
        arch,
        task,
        feature_set,
        feature_schema,
        seed,
        threshold,
        dropout_rate,
        layers,
    };
    model.validate()?;
    Ok(model)
}
