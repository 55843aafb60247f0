use ndarray::{concatenate, Array2, ArrayView2, Axis};

use super::{Activation, Architecture, GnnModel, InferenceError, Layer};
use crate::af::{ArgumentationFramework, UndirectedAdjacency};
use crate::features::FeatureMatrix;

/// `D̂^{-1/2} Â D̂^{-1/2}` for the symmetrized attack graph with a self-loop
/// on every argument, kept in sparse form.
pub struct NormalizedAdjacency {
    adj: UndirectedAdjacency,
    inv_sqrt_degree: Vec<f64>,
}

impl NormalizedAdjacency {
    pub fn new(af: &ArgumentationFramework) -> Self {
        let adj = af.undirected_neighbors();
        let inv_sqrt_degree = (0..adj.len())
            .map(|a| 1.0 / ((adj.neighbors(a).len() + 1) as f64).sqrt())
            .collect();
        NormalizedAdjacency {
            adj,
            inv_sqrt_degree,
        }
    }

    /// Row `i` of the result is `Σ_{j ∈ N(i) ∪ {i}} x_j / √(d_i d_j)`.
    pub fn propagate(&self, x: ArrayView2<f64>) -> Array2<f64> {
        let mut out = Array2::zeros(x.raw_dim());
        for (i, mut row) in out.axis_iter_mut(Axis(0)).enumerate() {
            let di = self.inv_sqrt_degree[i];
            row.scaled_add(di * di, &x.row(i));
            for &j in self.adj.neighbors(i) {
                let j = j as usize;
                row.scaled_add(di * self.inv_sqrt_degree[j], &x.row(j));
            }
        }
        out
    }
}

/// One graph convolution `σ(D̂^{-1/2} Â D̂^{-1/2} H W)`.
pub fn gcn_layer(
    h: &Array2<f64>,
    af: &ArgumentationFramework,
    w: &Array2<f64>,
    activation: Activation,
) -> Result<Array2<f64>, InferenceError> {
    if h.nrows() != af.num_arguments() || h.ncols() != w.nrows() {
        return Err(InferenceError::Dimension(format!(
            "H is {}x{}, W is {}x{}, framework has {} arguments",
            h.nrows(),
            h.ncols(),
            w.nrows(),
            w.ncols(),
            af.num_arguments()
        )));
    }
    let norm = NormalizedAdjacency::new(af);
    let mut out = norm.propagate(h.dot(w).view());
    activation.apply_all(&mut out);
    Ok(out)
}

/// Residual GCN forward pass. Dropout is inactive at inference.
pub fn gcn_forward(
    model: &GnnModel,
    features: &FeatureMatrix,
    af: &ArgumentationFramework,
) -> Result<Vec<f64>, InferenceError> {
    if model.arch != Architecture::Gcn {
        return Err(InferenceError::WrongArchitecture(model.arch.as_str()));
    }
    model.check_input(features, af)?;
    let norm = NormalizedAdjacency::new(af);
    let h0 = &features.values;
    let mut h = h0.clone();
    for layer in &model.layers {
        h = match layer {
            Layer::GcnBlock(block) => {
                let input = if block.residual {
                    concatenate(Axis(1), &[h.view(), h0.view()])
                        .map_err(|e| InferenceError::Dimension(e.to_string()))?
                } else {
                    h
                };
                if input.ncols() != block.weight.nrows() {
                    return Err(InferenceError::Dimension(format!(
                        "block expects {} inputs, got {}",
                        block.weight.nrows(),
                        input.ncols()
                    )));
                }
                let mut out = norm.propagate(input.dot(&block.weight).view());
                out += &block.bias;
                block.activation.apply_all(&mut out);
                out
            }
            Layer::Dense(dense) => {
                let mut out = h.dot(&dense.weight);
                out += &dense.bias;
                dense.activation.apply_all(&mut out);
                out
            }
            Layer::Gat(_) => {
                return Err(InferenceError::Dimension(
                    "attention layer inside a GCN".into(),
                ))
            }
        };
    }
    Ok(h.column(0).to_vec())
}
