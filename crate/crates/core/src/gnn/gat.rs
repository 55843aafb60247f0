//! GATv2 attention. For receiving node `i` and neighbor `j ∈ N(i)`:
//!
//! ```text
//! e_ij = aᵀ · leaky_relu(W_t h_i + W_s h_j)      (= aᵀ · leaky_relu(W [h_i ‖ h_j]))
//! α_ij = softmax_j(e_ij)
//! h'_i = Σ_j α_ij W_s h_j + b
//! ```
//!
//! `N(i)` is the attackers of `i` plus `i` itself.

use ndarray::{concatenate, Array2, Axis};

use super::{
    Architecture, GatHead, GatLayer, GnnModel, HeadCombine, InferenceError, Layer, ATTENTION_SLOPE,
};
use crate::af::ArgumentationFramework;
use crate::features::FeatureMatrix;

/// Attention neighborhoods: each row lists the node itself first, then its
/// attackers other than itself.
pub struct Neighborhoods {
    offsets: Vec<usize>,
    items: Vec<u32>,
}

impl Neighborhoods {
    pub fn of(&self, i: usize) -> &[u32] {
        &self.items[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn range(&self, i: usize) -> std::ops::Range<usize> {
        self.offsets[i]..self.offsets[i + 1]
    }

    pub fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub fn attention_neighborhoods(af: &ArgumentationFramework) -> Neighborhoods {
    let n = af.num_arguments();
    let mut offsets = Vec::with_capacity(n + 1);
    let mut items = Vec::with_capacity(n + af.num_attacks());
    offsets.push(0);
    for i in 0..n {
        items.push(i as u32);
        items.extend(
            af.attackers_of(i)
                .iter()
                .copied()
                .filter(|&j| j as usize != i),
        );
        offsets.push(items.len());
    }
    Neighborhoods { offsets, items }
}

fn leaky(x: f64) -> f64 {
    if x >= 0.0 {
        x
    } else {
        ATTENTION_SLOPE * x
    }
}

/// Output of one attention head.
pub struct HeadOutput {
    /// `n × out`, bias included.
    pub values: Array2<f64>,
    /// Attention weights aligned with the neighborhood rows.
    pub attention: Vec<f64>,
}

impl GatHead {
    pub fn forward(
        &self,
        h: &Array2<f64>,
        nb: &Neighborhoods,
    ) -> Result<HeadOutput, InferenceError> {
        if h.ncols() != self.in_dim() || h.nrows() != nb.len() {
            return Err(InferenceError::Dimension(format!(
                "head expects {} inputs per node, got {}x{}",
                self.in_dim(),
                h.nrows(),
                h.ncols()
            )));
        }
        let target = h.dot(&self.w_target);
        let source = h.dot(&self.w_source);
        let out_dim = self.out_dim();
        let mut values = Array2::zeros((h.nrows(), out_dim));
        let mut attention = vec![0.0; nb.items.len()];
        for i in 0..nb.len() {
            let range = nb.range(i);
            let ti = target.row(i);
            for (slot, &j) in attention[range.clone()].iter_mut().zip(nb.of(i)) {
                let sj = source.row(j as usize);
                *slot = (0..out_dim)
                    .map(|k| self.attention[k] * leaky(ti[k] + sj[k]))
                    .sum();
            }
            let scores = &mut attention[range];
            let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let mut total = 0.0;
            for s in scores.iter_mut() {
                *s = (*s - max).exp();
                total += *s;
            }
            let mut row = values.row_mut(i);
            for (s, &j) in scores.iter_mut().zip(nb.of(i)) {
                *s /= total;
                row.scaled_add(*s, &source.row(j as usize));
            }
            row += &self.bias;
        }
        Ok(HeadOutput { values, attention })
    }
}

impl GatLayer {
    pub fn forward(
        &self,
        h: &Array2<f64>,
        nb: &Neighborhoods,
    ) -> Result<Array2<f64>, InferenceError> {
        let outputs = self
            .heads
            .iter()
            .map(|head| head.forward(h, nb).map(|o| o.values))
            .collect::<Result<Vec<_>, _>>()?;
        let mut combined = match self.combine {
            HeadCombine::Concat => {
                let views: Vec<_> = outputs.iter().map(|o| o.view()).collect();
                concatenate(Axis(1), &views)
                    .map_err(|e| InferenceError::Dimension(e.to_string()))?
            }
            HeadCombine::Mean => {
                let mut sum = outputs[0].clone();
                for o in &outputs[1..] {
                    sum += o;
                }
                sum / outputs.len() as f64
            }
        };
        self.activation.apply_all(&mut combined);
        Ok(combined)
    }
}

pub fn gatv2_forward(
    model: &GnnModel,
    features: &FeatureMatrix,
    af: &ArgumentationFramework,
) -> Result<Vec<f64>, InferenceError> {
    if model.arch != Architecture::GatV2 {
        return Err(InferenceError::WrongArchitecture(model.arch.as_str()));
    }
    if features.values.ncols() != 11 {
        return Err(InferenceError::Dimension(format!(
            "GATv2 takes 11 features per argument, got {}",
            features.values.ncols()
        )));
    }
    model.check_input(features, af)?;
    let nb = attention_neighborhoods(af);
    let mut h = features.values.clone();
    for layer in &model.layers {
        let Layer::Gat(g) = layer else {
            return Err(InferenceError::Dimension(
                "non-attentional layer inside a GATv2".into(),
            ));
        };
        h = g.forward(&h, &nb)?;
    }
    Ok(h.column(0).to_vec())
}
