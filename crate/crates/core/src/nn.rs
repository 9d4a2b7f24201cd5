//! A small dense-network engine: batched fully connected layers with ReLU,
//! softmax cross-entropy, and Adam.
//!
//! This is deliberately minimal — fixed-architecture classifier heads over
//! precomputed features are all the pipeline needs — but the math is exact
//! and deterministic given a seed, which the tests lean on heavily.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::util::checksum_f32;

/// `out += a (rows x k) * b (k x n)`, row-major.
pub(crate) fn matmul_acc(a: &[f32], rows: usize, k: usize, b: &[f32], n: usize, out: &mut [f32]) {
    debug_assert_eq!(a.len(), rows * k);
    debug_assert_eq!(b.len(), k * n);
    debug_assert_eq!(out.len(), rows * n);
    for i in 0..rows {
        let a_row = &a[i * k..(i + 1) * k];
        let out_row = &mut out[i * n..(i + 1) * n];
        for (l, &av) in a_row.iter().enumerate() {
            let b_row = &b[l * n..(l + 1) * n];
            for (o, &bv) in out_row.iter_mut().zip(b_row) {
                *o += av * bv;
            }
        }
    }
}

/// `out += a^T (k x rows) * b (rows x n)` where `a` is stored rows x k.
pub(crate) fn matmul_at_b_acc(a: &[f32], rows: usize, k: usize, b: &[f32], n: usize, out: &mut [f32]) {
    debug_assert_eq!(a.len(), rows * k);
    debug_assert_eq!(b.len(), rows * n);
    debug_assert_eq!(out.len(), k * n);
    for r in 0..rows {
        let a_row = &a[r * k..(r + 1) * k];
        let b_row = &b[r * n..(r + 1) * n];
        for (l, &av) in a_row.iter().enumerate() {
            let out_row = &mut out[l * n..(l + 1) * n];
            for (o, &bv) in out_row.iter_mut().zip(b_row) {
                *o += av * bv;
            }
        }
    }
}

/// `out = a (rows x n) * b^T (k x n)` producing rows x k; `b` stored k x n.
pub(crate) fn matmul_a_bt(a: &[f32], rows: usize, n: usize, b: &[f32], k: usize, out: &mut [f32]) {
    debug_assert_eq!(a.len(), rows * n);
    debug_assert_eq!(b.len(), k * n);
    debug_assert_eq!(out.len(), rows * k);
    for r in 0..rows {
        let a_row = &a[r * n..(r + 1) * n];
        let out_row = &mut out[r * k..(r + 1) * k];
        for (l, o) in out_row.iter_mut().enumerate() {
            let b_row = &b[l * n..(l + 1) * n];
            let mut acc = 0.0f32;
            for (&av, &bv) in a_row.iter().zip(b_row) {
                acc += av * bv;
            }
            *o = acc;
        }
    }
}

/// One fully connected layer. Parameters are stored as a single flat vector:
/// the `in_dim x out_dim` weight matrix (row-major) followed by the bias.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseLayer {
    in_dim: usize,
    out_dim: usize,
    params: Vec<f32>,
}

impl DenseLayer {
    /// Glorot-uniform initialization.
    pub fn glorot(in_dim: usize, out_dim: usize, rng: &mut ChaCha8Rng) -> Self {
        let limit = libm::sqrtf(6.0 / (in_dim + out_dim) as f32);
        let mut params = Vec::with_capacity(in_dim * out_dim + out_dim);
        for _ in 0..(in_dim * out_dim) {
            params.push(rng.gen_range(-limit..limit));
        }
        params.extend(core::iter::repeat(0.0).take(out_dim));
        DenseLayer {
            in_dim,
            out_dim,
            params,
        }
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn param_count(&self) -> usize {
        self.params.len()
    }

    pub fn params(&self) -> &[f32] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f32] {
        &mut self.params
    }

    fn weights(&self) -> &[f32] {
        &self.params[..self.in_dim * self.out_dim]
    }

    fn bias(&self) -> &[f32] {
        &self.params[self.in_dim * self.out_dim..]
    }

    /// `y = x W + b` for a batch of `rows` inputs.
    pub fn forward(&self, x: &[f32], rows: usize) -> Vec<f32> {
        debug_assert_eq!(x.len(), rows * self.in_dim);
        let mut out = vec![0.0f32; rows * self.out_dim];
        for r in 0..rows {
            out[r * self.out_dim..(r + 1) * self.out_dim].copy_from_slice(self.bias());
        }
        matmul_acc(x, rows, self.in_dim, self.weights(), self.out_dim, &mut out);
        out
    }

    /// Gradients for a batch: returns flat `(dW | db)` matching the parameter
    /// layout and writes `dx` if requested.
    pub fn backward(&self, x: &[f32], dy: &[f32], rows: usize, dx: Option<&mut [f32]>) -> Vec<f32> {
        let mut grads = vec![0.0f32; self.params.len()];
        let (dw, db) = grads.split_at_mut(self.in_dim * self.out_dim);
        matmul_at_b_acc(x, rows, self.in_dim, dy, self.out_dim, dw);
        for r in 0..rows {
            let dy_row = &dy[r * self.out_dim..(r + 1) * self.out_dim];
            for (g, &d) in db.iter_mut().zip(dy_row) {
                *g += d;
            }
        }
        if let Some(dx) = dx {
            matmul_a_bt(dy, rows, self.out_dim, self.weights(), self.in_dim, dx);
        }
        grads
    }
}

/// Adam optimizer state for one parameter tensor.
#[derive(Debug, Clone)]
pub struct Adam {
    lr: f32,
    beta1: f32,
    beta2: f32,
    eps: f32,
    t: u64,
    m: Vec<f32>,
    v: Vec<f32>,
}

impl Adam {
    pub fn new(param_count: usize, lr: f32) -> Self {
        Adam {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            t: 0,
            m: vec![0.0; param_count],
            v: vec![0.0; param_count],
        }
    }

    pub fn step(&mut self, params: &mut [f32], grads: &[f32]) {
        debug_assert_eq!(params.len(), self.m.len());
        debug_assert_eq!(grads.len(), self.m.len());
        self.t += 1;
        let bc1 = 1.0 - libm::powf(self.beta1, self.t as f32);
        let bc2 = 1.0 - libm::powf(self.beta2, self.t as f32);
        for i in 0..params.len() {
            let g = grads[i];
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * g;
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * g * g;
            let m_hat = self.m[i] / bc1;
            let v_hat = self.v[i] / bc2;
            params[i] -= self.lr * m_hat / (libm::sqrtf(v_hat) + self.eps);
        }
    }
}

/// A stack of dense layers with ReLU between them (none after the last).
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    layers: Vec<DenseLayer>,
}

/// Forward-pass activations kept for the backward pass: the input and each
/// layer's post-activation output.
pub struct MlpActivations {
    rows: usize,
    // acts[0] is the input; acts[i] is layer i-1's output after ReLU
    // (the last entry is raw logits).
    acts: Vec<Vec<f32>>,
}

impl MlpActivations {
    pub fn logits(&self) -> &[f32] {
        self.acts.last().expect("at least one layer")
    }
}

impl Mlp {
    /// Build from layer widths (input width first, output width last).
    pub fn new(widths: &[usize], rng: &mut ChaCha8Rng) -> Self {
        assert!(widths.len() >= 2, "an MLP needs an input and an output width");
        let layers = widths
            .windows(2)
            .map(|w| DenseLayer::glorot(w[0], w[1], rng))
            .collect();
        Mlp { layers }
    }

    pub fn widths(&self) -> Vec<usize> {
        let mut widths = vec![self.layers[0].in_dim()];
        widths.extend(self.layers.iter().map(DenseLayer::out_dim));
        widths
    }

    pub fn in_dim(&self) -> usize {
        self.layers[0].in_dim()
    }

    pub fn out_dim(&self) -> usize {
        self.layers.last().expect("non-empty").out_dim()
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(DenseLayer::param_count).sum()
    }

    pub(crate) fn layers_mut(&mut self) -> &mut [DenseLayer] {
        &mut self.layers
    }

    pub fn checksum(&self) -> u64 {
        checksum_f32(&self.flatten_params())
    }

    pub fn flatten_params(&self) -> Vec<f32> {
        let mut flat = Vec::with_capacity(self.param_count());
        for layer in &self.layers {
            flat.extend_from_slice(layer.params());
        }
        flat
    }

    pub fn load_params(&mut self, flat: &[f32]) {
        assert_eq!(flat.len(), self.param_count(), "parameter count mismatch");
        let mut offset = 0;
        for layer in &mut self.layers {
            let n = layer.param_count();
            layer.params_mut().copy_from_slice(&flat[offset..offset + n]);
            offset += n;
        }
    }

    pub fn forward(&self, x: &[f32], rows: usize) -> MlpActivations {
        let mut acts = Vec::with_capacity(self.layers.len() + 1);
        acts.push(x.to_vec());
        for (i, layer) in self.layers.iter().enumerate() {
            let mut y = layer.forward(acts.last().expect("input present"), rows);
            if i + 1 < self.layers.len() {
                for v in &mut y {
                    if *v < 0.0 {
                        *v = 0.0;
                    }
                }
            }
            acts.push(y);
        }
        MlpActivations { rows, acts }
    }

    pub fn logits(&self, x: &[f32], rows: usize) -> Vec<f32> {
        let mut acts = self.forward(x, rows);
        acts.acts.pop().expect("logits present")
    }

    /// Post-ReLU activations of the last hidden layer — the network's
    /// penultimate representation. Panics on a single-layer network.
    pub fn penultimate(&self, x: &[f32], rows: usize) -> Vec<f32> {
        assert!(self.layers.len() >= 2, "single-layer network has no penultimate");
        let mut acts = self.forward(x, rows);
        acts.acts.pop();
        acts.acts.pop().expect("penultimate present")
    }

    /// Backpropagate `dlogits`, returning per-layer flat gradients aligned
    /// with `self.layers`.
    pub fn backward(&self, acts: &MlpActivations, dlogits: &[f32]) -> Vec<Vec<f32>> {
        let rows = acts.rows;
        let n_layers = self.layers.len();
        let mut grads = vec![Vec::new(); n_layers];
        let mut dy = dlogits.to_vec();
        for (i, layer) in self.layers.iter().enumerate().rev() {
            let x = &acts.acts[i];
            let needs_dx = i > 0;
            let mut dx = if needs_dx {
                vec![0.0f32; rows * layer.in_dim()]
            } else {
                Vec::new()
            };
            grads[i] = layer.backward(x, &dy, rows, needs_dx.then_some(dx.as_mut_slice()));
            if needs_dx {
                // ReLU mask from layer i-1's post-activation output.
                for (d, &a) in dx.iter_mut().zip(&acts.acts[i]) {
                    if a <= 0.0 {
                        *d = 0.0;
                    }
                }
                dy = dx;
            }
        }
        grads
    }
}

/// Mean softmax cross-entropy over a batch plus the gradient w.r.t. logits.
pub fn softmax_cross_entropy(
    logits: &[f32],
    rows: usize,
    classes: usize,
    labels: &[usize],
) -> (f64, Vec<f32>) {
    debug_assert_eq!(logits.len(), rows * classes);
    debug_assert_eq!(labels.len(), rows);
    let mut loss = 0.0f64;
    let mut dlogits = vec![0.0f32; logits.len()];
    for r in 0..rows {
        let row = &logits[r * classes..(r + 1) * classes];
        let probs = softmax_row(row);
        let p = f64::from(probs[labels[r]]).max(1e-12);
        loss -= libm::log(p);
        let drow = &mut dlogits[r * classes..(r + 1) * classes];
        for (c, &pr) in probs.iter().enumerate() {
            drow[c] = (pr - if c == labels[r] { 1.0 } else { 0.0 }) / rows as f32;
        }
    }
    (loss / rows as f64, dlogits)
}

/// Numerically stable softmax of one row.
pub fn softmax_row(row: &[f32]) -> Vec<f32> {
    let max = row.iter().copied().fold(f32::NEG_INFINITY, f32::max);
    let exps: Vec<f32> = row.iter().map(|&v| libm::expf(v - max)).collect();
    let sum: f32 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// Argmax with ties broken toward the lowest class index.
pub fn argmax_lowest(scores: &[f32]) -> usize {
    let mut best = 0;
    for (i, &v) in scores.iter().enumerate().skip(1) {
        if v > scores[best] {
            best = i;
        }
    }
    best
}

/// A class decision along with the per-class softmax scores behind it.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Prediction {
    pub class: usize,
    pub scores: Vec<f32>,
}

impl Prediction {
    /// Decide from raw logits: softmax scores, argmax with lowest-index ties.
    pub fn from_logits(logits: &[f32]) -> Self {
        let scores = softmax_row(logits);
        Prediction {
            class: argmax_lowest(&scores),
            scores,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn naive_matmul(a: &[f32], rows: usize, k: usize, b: &[f32], n: usize) -> Vec<f32> {
        let mut out = vec![0.0f32; rows * n];
        for i in 0..rows {
            for j in 0..n {
                let mut acc = 0.0f32;
                for l in 0..k {
                    acc += a[i * k + l] * b[l * n + j];
                }
                out[i * n + j] = acc;
            }
        }
        out
    }

    #[test]
    fn matmul_matches_naive_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for &(rows, k, n) in &[(1usize, 1usize, 1usize), (3, 4, 5), (8, 16, 2), (5, 1, 7)] {
            let a: Vec<f32> = (0..rows * k).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let b: Vec<f32> = (0..k * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let mut out = vec![0.0f32; rows * n];
            matmul_acc(&a, rows, k, &b, n, &mut out);
            let expect = naive_matmul(&a, rows, k, &b, n);
            for (x, y) in out.iter().zip(&expect) {
                assert!((x - y).abs() < 1e-5);
            }
        }
    }

    #[test]
    fn transposed_matmuls_match_naive() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let (rows, k, n) = (4usize, 3usize, 5usize);
        let a: Vec<f32> = (0..rows * k).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let dy: Vec<f32> = (0..rows * n).map(|_| rng.gen_range(-1.0..1.0)).collect();

        // a^T * dy == naive with a transposed.
        let mut at = vec![0.0f32; k * rows];
        for r in 0..rows {
            for l in 0..k {
                at[l * rows + r] = a[r * k + l];
            }
        }
        let mut got = vec![0.0f32; k * n];
        matmul_at_b_acc(&a, rows, k, &dy, n, &mut got);
        let expect = naive_matmul(&at, k, rows, &dy, n);
        for (x, y) in got.iter().zip(&expect) {
            assert!((x - y).abs() < 1e-5);
        }

        // dy * w^T == naive with w transposed.
        let w: Vec<f32> = (0..k * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut wt = vec![0.0f32; n * k];
        for l in 0..k {
            for j in 0..n {
                wt[j * k + l] = w[l * n + j];
            }
        }
        let mut got = vec![0.0f32; rows * k];
        matmul_a_bt(&dy, rows, n, &w, k, &mut got);
        let expect = naive_matmul(&dy, rows, n, &wt, k);
        for (x, y) in got.iter().zip(&expect) {
            assert!((x - y).abs() < 1e-5);
        }
    }

    #[test]
    fn argmax_breaks_ties_toward_lowest_index() {
        assert_eq!(argmax_lowest(&[0.1, 0.7, 0.1, 0.1]), 1);
        assert_eq!(argmax_lowest(&[0.5, 0.5]), 0);
        assert_eq!(argmax_lowest(&[1.0, 2.0, 2.0]), 1);
    }

    #[test]
    fn scaling_logits_keeps_the_argmax() {
        let logits = [0.3f32, -1.2, 0.9, 0.2];
        let base = Prediction::from_logits(&logits).class;
        for scale in [0.5f32, 2.0, 10.0] {
            let scaled: Vec<f32> = logits.iter().map(|&v| v * scale).collect();
            assert_eq!(Prediction::from_logits(&scaled).class, base);
        }
    }

    #[test]
    fn softmax_scores_are_a_distribution() {
        let p = Prediction::from_logits(&[1.0, 2.0, 3.0]);
        let sum: f32 = p.scores.iter().sum();
        assert!((sum - 1.0).abs() < 1e-6);
        assert_eq!(p.class, 2);
    }

    /// Finite-difference check of softmax cross-entropy gradients through a
    /// two-layer network.
    #[test]
    fn gradients_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut net = Mlp::new(&[4, 6, 3], &mut rng);
        let rows = 5;
        let x: Vec<f32> = (0..rows * 4).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let labels: Vec<usize> = (0..rows).map(|_| rng.gen_range(0..3)).collect();

        let acts = net.forward(&x, rows);
        let (_, dlogits) = softmax_cross_entropy(acts.logits(), rows, 3, &labels);
        let grads = net.backward(&acts, &dlogits);

        let loss_of = |net: &Mlp| {
            let logits = net.logits(&x, rows);
            softmax_cross_entropy(&logits, rows, 3, &labels).0
        };

        let eps = 1e-3f32;
        let flat_grads: Vec<f32> = grads.concat();
        let base_params = net.flatten_params();
        // Spot-check a spread of parameters.
        for idx in (0..base_params.len()).step_by(7) {
            let mut plus = base_params.clone();
            plus[idx] += eps;
            net.load_params(&plus);
            let lp = loss_of(&net);
            let mut minus = base_params.clone();
            minus[idx] -= eps;
            net.load_params(&minus);
            let lm = loss_of(&net);
            net.load_params(&base_params);
            let numeric = ((lp - lm) / (2.0 * f64::from(eps))) as f32;
            assert!(
                (numeric - flat_grads[idx]).abs() < 2e-2,
                "param {idx}: numeric {numeric} vs analytic {}",
                flat_grads[idx]
            );
        }
    }

    #[test]
    fn adam_first_step_moves_by_learning_rate() {
        // With zero state, one Adam step moves each parameter by about lr
        // against the gradient sign.
        let mut adam = Adam::new(2, 0.01);
        let mut params = vec![1.0f32, -1.0];
        adam.step(&mut params, &[0.5, -0.25]);
        assert!((params[0] - (1.0 - 0.01)).abs() < 1e-4);
        assert!((params[1] - (-1.0 + 0.01)).abs() < 1e-4);
    }

    #[test]
    fn mlp_shapes_and_checksums() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let net = Mlp::new(&[1024, 512, 128, 32, 5], &mut rng);
        assert_eq!(net.widths(), vec![1024, 512, 128, 32, 5]);
        let expected = 1024 * 512 + 512 * 128 + 128 * 32 + 32 * 5 + (512 + 128 + 32 + 5);
        assert_eq!(net.param_count(), expected);

        let sum = net.checksum();
        let mut copy = net.clone();
        copy.load_params(&net.flatten_params());
        assert_eq!(copy.checksum(), sum);
    }

    #[test]
    fn penultimate_is_post_relu_hidden_output() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let net = Mlp::new(&[3, 4, 2], &mut rng);
        let x = [0.5f32, -0.3, 1.0];
        let pen = net.penultimate(&x, 1);
        assert_eq!(pen.len(), 4);
        assert!(pen.iter().all(|&v| v >= 0.0));
    }
}
