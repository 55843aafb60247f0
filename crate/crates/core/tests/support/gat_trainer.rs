//! Small GATv2 trainer used to produce desk-scale models for the tests.
//!
//! Gradients are written out by hand for the fixed three-layer shape; the
//! per-head backward pass follows the forward pass of the inference engine
//! term by term. Loss is per-argument binary cross-entropy averaged over
//! each framework, optimised with Adam.

use afgnn::features::{build_embedding, FeatureLayout};
use afgnn::gnn::{
    attention_neighborhoods, sigmoid, Activation, GatHead, GnnModel, HeadCombine, Layer,
    Neighborhoods, ATTENTION_SLOPE,
};
use afgnn::{grounded_labelling, ArgumentationFramework, Decision};
use ndarray::{s, Array2, Axis};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub struct Sample {
    pub af: ArgumentationFramework,
    pub features: Array2<f64>,
    pub nb: Neighborhoods,
    pub labels: Vec<f64>,
}

impl Sample {
    pub fn new(af: ArgumentationFramework, labels: &[Decision]) -> Self {
        let lab = grounded_labelling(&af);
        let features = build_embedding(&af, &lab, FeatureLayout::P11, 0).values;
        let nb = attention_neighborhoods(&af);
        Sample {
            labels: labels
                .iter()
                .map(|d| if d.is_yes() { 1.0 } else { 0.0 })
                .collect(),
            af,
            features,
            nb,
        }
    }
}

pub struct Config {
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            learning_rate: 0.01,
            epochs: 400,
            batch_size: 4,
            seed: 0,
        }
    }
}

fn leaky(x: f64) -> f64 {
    if x >= 0.0 {
        x
    } else {
        ATTENTION_SLOPE * x
    }
}

fn leaky_grad(x: f64) -> f64 {
    if x >= 0.0 {
        1.0
    } else {
        ATTENTION_SLOPE
    }
}

struct HeadCache {
    target: Array2<f64>,
    source: Array2<f64>,
    attention: Vec<f64>,
}

struct LayerCache {
    input: Array2<f64>,
    heads: Vec<HeadCache>,
    pre: Array2<f64>,
}

fn head_forward(head: &GatHead, x: &Array2<f64>, nb: &Neighborhoods) -> (Array2<f64>, HeadCache) {
    let target = x.dot(&head.w_target);
    let source = x.dot(&head.w_source);
    let d = head.w_source.ncols();
    let mut out = Array2::zeros((x.nrows(), d));
    let mut attention = Vec::new();
    for i in 0..nb.len() {
        let scores: Vec<f64> = nb
            .of(i)
            .iter()
            .map(|&j| {
                (0..d)
                    .map(|k| head.attention[k] * leaky(target[[i, k]] + source[[j as usize, k]]))
                    .sum()
            })
            .collect();
        let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let exps: Vec<f64> = scores.iter().map(|e| (e - max).exp()).collect();
        let total: f64 = exps.iter().sum();
        for (w, &j) in exps.iter().zip(nb.of(i)) {
            let alpha = w / total;
            attention.push(alpha);
            for k in 0..d {
                out[[i, k]] += alpha * source[[j as usize, k]];
            }
        }
        for k in 0..d {
            out[[i, k]] += head.bias[k];
        }
    }
    (
        out,
        HeadCache {
            target,
            source,
            attention,
        },
    )
}

/// Accumulates parameter gradients into `grad` and returns `dL/dX`.
fn head_backward(
    head: &GatHead,
    cache: &HeadCache,
    x: &Array2<f64>,
    nb: &Neighborhoods,
    d_out: &Array2<f64>,
    grad: &mut GatHead,
) -> Array2<f64> {
    let d = head.w_source.ncols();
    let n = x.nrows();
    let mut d_target = Array2::<f64>::zeros((n, d));
    let mut d_source = Array2::<f64>::zeros((n, d));
    grad.bias += &d_out.sum_axis(Axis(0));
    for i in 0..n {
        let range = nb.range(i);
        let alphas = &cache.attention[range];
        let js = nb.of(i);
        let d_alpha: Vec<f64> = js
            .iter()
            .map(|&j| {
                (0..d)
                    .map(|k| d_out[[i, k]] * cache.source[[j as usize, k]])
                    .sum()
            })
            .collect();
        let mean: f64 = alphas.iter().zip(&d_alpha).map(|(a, g)| a * g).sum();
        for ((&alpha, &da), &j) in alphas.iter().zip(&d_alpha).zip(js) {
            let j = j as usize;
            let de = alpha * (da - mean);
            for k in 0..d {
                d_source[[j, k]] += alpha * d_out[[i, k]];
                let z = cache.target[[i, k]] + cache.source[[j, k]];
                grad.attention[k] += de * leaky(z);
                let dz = de * head.attention[k] * leaky_grad(z);
                d_target[[i, k]] += dz;
                d_source[[j, k]] += dz;
            }
        }
    }
    grad.w_target += &x.t().dot(&d_target);
    grad.w_source += &x.t().dot(&d_source);
    d_target.dot(&head.w_target.t()) + d_source.dot(&head.w_source.t())
}

fn gat_layers(model: &GnnModel) -> impl Iterator<Item = &afgnn::gnn::GatLayer> {
    model.layers.iter().map(|l| match l {
        Layer::Gat(g) => g,
        _ => panic!("trainer handles GATv2 models only"),
    })
}

fn forward(model: &GnnModel, x: &Array2<f64>, nb: &Neighborhoods) -> (Vec<f64>, Vec<LayerCache>) {
    let mut h = x.clone();
    let mut caches = Vec::new();
    for layer in gat_layers(model) {
        let (outs, heads): (Vec<_>, Vec<_>) = layer
            .heads
            .iter()
            .map(|hd| head_forward(hd, &h, nb))
            .unzip();
        let pre = match layer.combine {
            HeadCombine::Concat => {
                let views: Vec<_> = outs.iter().map(|o| o.view()).collect();
                ndarray::concatenate(Axis(1), &views).unwrap()
            }
            HeadCombine::Mean => {
                outs.iter()
                    .fold(Array2::zeros(outs[0].raw_dim()), |acc, o| acc + o)
                    / outs.len() as f64
            }
        };
        let post = pre.mapv(|v| layer.activation.apply(v));
        caches.push(LayerCache {
            input: h,
            heads,
            pre,
        });
        h = post;
    }
    (h.column(0).to_vec(), caches)
}

/// Training-side forward pass.
pub fn predict(model: &GnnModel, sample: &Sample) -> Vec<f64> {
    forward(model, &sample.features, &sample.nb).0
}

pub fn loss(model: &GnnModel, sample: &Sample) -> f64 {
    let p = predict(model, sample);
    bce(&p, &sample.labels)
}

fn bce(p: &[f64], y: &[f64]) -> f64 {
    let eps = 1e-12;
    p.iter()
        .zip(y)
        .map(|(&p, &y)| -(y * (p + eps).ln() + (1.0 - y) * (1.0 - p + eps).ln()))
        .sum::<f64>()
        / p.len() as f64
}

/// Adds the gradient of the per-sample loss to `grad` and returns the loss.
pub fn accumulate_gradient(model: &GnnModel, sample: &Sample, grad: &mut GnnModel) -> f64 {
    let (p, caches) = forward(model, &sample.features, &sample.nb);
    let n = p.len() as f64;
    let layers: Vec<_> = gat_layers(model).collect();
    let last = layers.len() - 1;
    let mut d_post: Array2<f64> = Array2::zeros((p.len(), 1));
    for (layer_idx, (layer, cache)) in layers.iter().zip(&caches).enumerate().rev() {
        let d_pre = if layer_idx == last {
            assert_eq!(layer.activation, Activation::Sigmoid);
            // sigmoid and cross-entropy together
            Array2::from_shape_fn((p.len(), 1), |(i, _)| {
                (sigmoid(cache.pre[[i, 0]]) - sample.labels[i]) / n
            })
        } else {
            let slope = |v: f64| match layer.activation {
                Activation::LeakyRelu => leaky_grad(v),
                Activation::Relu => (v > 0.0) as u8 as f64,
                Activation::Identity => 1.0,
                Activation::Sigmoid => sigmoid(v) * (1.0 - sigmoid(v)),
            };
            &d_post * &cache.pre.mapv(slope)
        };
        let Layer::Gat(g_layer) = &mut grad.layers[layer_idx] else {
            unreachable!()
        };
        let h = layer.heads.len();
        let mut d_input = Array2::zeros(cache.input.raw_dim());
        for (k, (head, hc)) in layer.heads.iter().zip(&cache.heads).enumerate() {
            let d_head = match layer.combine {
                HeadCombine::Concat => {
                    let w = head.w_source.ncols();
                    d_pre.slice(s![.., k * w..(k + 1) * w]).to_owned()
                }
                HeadCombine::Mean => &d_pre / h as f64,
            };
            d_input += &head_backward(
                head,
                hc,
                &cache.input,
                &sample.nb,
                &d_head,
                &mut g_layer.heads[k],
            );
        }
        d_post = d_input;
    }
    bce(&p, &sample.labels)
}

/// Every trainable value, in a fixed order.
pub fn parameters_mut(model: &mut GnnModel) -> Vec<&mut f64> {
    let mut out = Vec::new();
    for layer in &mut model.layers {
        let Layer::Gat(g) = layer else { continue };
        for h in &mut g.heads {
            out.extend(h.w_target.iter_mut());
            out.extend(h.w_source.iter_mut());
            out.extend(h.attention.iter_mut());
            out.extend(h.bias.iter_mut());
        }
    }
    out
}

pub fn parameters(model: &GnnModel) -> Vec<f64> {
    parameters_mut(&mut model.clone())
        .into_iter()
        .map(|v| *v)
        .collect()
}

struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl Adam {
    fn step(&mut self, model: &mut GnnModel, grad: &[f64], lr: f64) {
        let (b1, b2, eps): (f64, f64, f64) = (0.9, 0.999, 1e-7);
        self.t += 1;
        let c1 = 1.0 - b1.powi(self.t);
        let c2 = 1.0 - b2.powi(self.t);
        for (i, p) in parameters_mut(model).into_iter().enumerate() {
            self.m[i] = b1 * self.m[i] + (1.0 - b1) * grad[i];
            self.v[i] = b2 * self.v[i] + (1.0 - b2) * grad[i] * grad[i];
            *p -= lr * (self.m[i] / c1) / ((self.v[i] / c2).sqrt() + eps);
        }
    }
}

/// Trains `model` in place; returns the mean training loss of every epoch.
pub fn train(model: &mut GnnModel, samples: &[Sample], config: &Config) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let count = parameters(model).len();
    let mut adam = Adam {
        m: vec![0.0; count],
        v: vec![0.0; count],
        t: 0,
    };
    let mut order: Vec<usize> = (0..samples.len()).collect();
    let mut curve = Vec::with_capacity(config.epochs);
    for _ in 0..config.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for batch in order.chunks(config.batch_size) {
            let mut grad = model.clone().zeroed();
            for &i in batch {
                epoch_loss += accumulate_gradient(model, &samples[i], &mut grad);
            }
            let g: Vec<f64> = parameters(&grad)
                .iter()
                .map(|v| v / batch.len() as f64)
                .collect();
            adam.step(model, &g, config.learning_rate);
        }
        curve.push(epoch_loss / samples.len() as f64);
    }
    curve
}
