//! The scoring network: `in -> 128 -> 32 -> 1`, ReLU and inverted dropout
//! after both hidden layers, linear output.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Init, LtrError, Scheme};
use crate::features::StandardizationStats;
use crate::math::sqrt;

pub const HIDDEN_SIZES: [usize; 2] = [128, 32];

/// Fully connected layer; `weights` is row-major `outputs x inputs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub inputs: usize,
    pub outputs: usize,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl Dense {
    pub fn zeros(inputs: usize, outputs: usize) -> Self {
        Self { inputs, outputs, weights: vec![0.0; inputs * outputs], bias: vec![0.0; outputs] }
    }

    fn glorot(inputs: usize, outputs: usize, rng: &mut ChaCha8Rng) -> Self {
        let limit = sqrt(6.0 / (inputs + outputs) as f64);
        let weights = (0..inputs * outputs).map(|_| rng.random_range(-limit..limit)).collect();
        Self { inputs, outputs, weights, bias: vec![0.0; outputs] }
    }

    fn forward_into(&self, x: &[f64], out: &mut [f64]) {
        for (o, (row, b)) in out.iter_mut().zip(self.weights.chunks_exact(self.inputs).zip(&self.bias)) {
            *o = b + row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>();
        }
    }

    fn is_finite(&self) -> bool {
        self.weights.iter().chain(&self.bias).all(|v| v.is_finite())
    }

    fn shape_ok(&self) -> bool {
        self.weights.len() == self.inputs * self.outputs && self.bias.len() == self.outputs
    }
}

/// Two hidden layers and a single linear output neuron.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    pub hidden1: Dense,
    pub hidden2: Dense,
    pub output: Dense,
}

/// Activations kept for backpropagation of one row.
#[derive(Debug, Clone)]
pub(crate) struct Trace {
    pre1: Vec<f64>,
    out1: Vec<f64>,
    mask1: Vec<f64>,
    pre2: Vec<f64>,
    out2: Vec<f64>,
    mask2: Vec<f64>,
}

impl Mlp {
    pub fn new(input_dim: usize, hidden: [usize; 2], init: Init, seed: u64) -> Self {
        match init {
            Init::Zeros => Self {
                hidden1: Dense::zeros(input_dim, hidden[0]),
                hidden2: Dense::zeros(hidden[0], hidden[1]),
                output: Dense::zeros(hidden[1], 1),
            },
            Init::Glorot => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                Self {
                    hidden1: Dense::glorot(input_dim, hidden[0], &mut rng),
                    hidden2: Dense::glorot(hidden[0], hidden[1], &mut rng),
                    output: Dense::glorot(hidden[1], 1, &mut rng),
                }
            }
        }
    }

    pub fn input_dim(&self) -> usize {
        self.hidden1.inputs
    }

    pub fn layers(&self) -> [&Dense; 3] {
        [&self.hidden1, &self.hidden2, &self.output]
    }

    /// Shapes chain together and every value is finite.
    pub fn is_valid(&self) -> bool {
        let [a, b, c] = self.layers();
        a.shape_ok()
            && b.shape_ok()
            && c.shape_ok()
            && a.outputs == b.inputs
            && b.outputs == c.inputs
            && c.outputs == 1
            && a.is_finite()
            && b.is_finite()
            && c.is_finite()
    }

    fn check_input(&self, x: &[f64]) -> Result<(), LtrError> {
        if x.len() != self.input_dim() {
            return Err(LtrError::DimensionMismatch { expected: self.input_dim(), got: x.len() });
        }
        Ok(())
    }

    /// Deterministic evaluation-mode score.
    pub fn score(&self, x: &[f64]) -> Result<f64, LtrError> {
        self.check_input(x)?;
        let mut h1 = vec![0.0; self.hidden1.outputs];
        self.hidden1.forward_into(x, &mut h1);
        h1.iter_mut().for_each(|v| *v = v.max(0.0));
        let mut h2 = vec![0.0; self.hidden2.outputs];
        self.hidden2.forward_into(&h1, &mut h2);
        h2.iter_mut().for_each(|v| *v = v.max(0.0));
        let mut out = [0.0];
        self.output.forward_into(&h2, &mut out);
        Ok(out[0])
    }

    /// Score with dropout drawn from `rng`, or in evaluation mode when
    /// `dropout` is `None`.
    pub fn forward<R: Rng>(&self, x: &[f64], dropout: Option<(f64, &mut R)>) -> Result<f64, LtrError> {
        match dropout {
            None => self.score(x),
            Some((p, rng)) => {
                self.check_input(x)?;
                Ok(self.forward_traced(x, p, rng).0)
            }
        }
    }

    pub(crate) fn forward_traced<R: Rng>(&self, x: &[f64], p: f64, rng: &mut R) -> (f64, Trace) {
        let keep_scale = 1.0 / (1.0 - p);
        let mut draw_mask = |n: usize| -> Vec<f64> {
            (0..n)
                .map(|_| if p > 0.0 && rng.random::<f64>() < p { 0.0 } else { keep_scale })
                .collect()
        };
        let mut pre1 = vec![0.0; self.hidden1.outputs];
        self.hidden1.forward_into(x, &mut pre1);
        let mask1 = draw_mask(pre1.len());
        let out1: Vec<f64> = pre1.iter().zip(&mask1).map(|(z, m)| z.max(0.0) * m).collect();

        let mut pre2 = vec![0.0; self.hidden2.outputs];
        self.hidden2.forward_into(&out1, &mut pre2);
        let mask2 = draw_mask(pre2.len());
        let out2: Vec<f64> = pre2.iter().zip(&mask2).map(|(z, m)| z.max(0.0) * m).collect();

        let mut s = [0.0];
        self.output.forward_into(&out2, &mut s);
        (s[0], Trace { pre1, out1, mask1, pre2, out2, mask2 })
    }

    /// Adds `d loss / d params` for one row to `grad` given `d loss / d score`.
    pub(crate) fn backward(&self, x: &[f64], trace: &Trace, dscore: f64, grad: &mut Mlp) {
        // output layer
        for (g, h) in grad.output.weights.iter_mut().zip(&trace.out2) {
            *g += dscore * h;
        }
        grad.output.bias[0] += dscore;

        let n2 = self.hidden2.outputs;
        let mut dpre2 = vec![0.0; n2];
        for k in 0..n2 {
            if trace.pre2[k] > 0.0 {
                dpre2[k] = dscore * self.output.weights[k] * trace.mask2[k];
            }
        }
        let n1 = self.hidden1.outputs;
        let mut dout1 = vec![0.0; n1];
        for k in 0..n2 {
            let d = dpre2[k];
            if d == 0.0 {
                continue;
            }
            let row = &self.hidden2.weights[k * n1..(k + 1) * n1];
            let grow = &mut grad.hidden2.weights[k * n1..(k + 1) * n1];
            for j in 0..n1 {
                grow[j] += d * trace.out1[j];
                dout1[j] += d * row[j];
            }
            grad.hidden2.bias[k] += d;
        }

        let ni = self.hidden1.inputs;
        for j in 0..n1 {
            if trace.pre1[j] <= 0.0 {
                continue;
            }
            let d = dout1[j] * trace.mask1[j];
            if d == 0.0 {
                continue;
            }
            let grow = &mut grad.hidden1.weights[j * ni..(j + 1) * ni];
            for (g, v) in grow.iter_mut().zip(x) {
                *g += d * v;
            }
            grad.hidden1.bias[j] += d;
        }
    }

    pub(crate) fn zeros_like(&self) -> Mlp {
        Mlp {
            hidden1: Dense::zeros(self.hidden1.inputs, self.hidden1.outputs),
            hidden2: Dense::zeros(self.hidden2.inputs, self.hidden2.outputs),
            output: Dense::zeros(self.output.inputs, self.output.outputs),
        }
    }

    fn params_mut(&mut self) -> impl Iterator<Item = &mut f64> {
        let Mlp { hidden1, hidden2, output } = self;
        [hidden1, hidden2, output]
            .into_iter()
            .flat_map(|l| l.weights.iter_mut().chain(l.bias.iter_mut()))
    }

    fn params(&self) -> impl Iterator<Item = &f64> {
        self.layers().into_iter().flat_map(|l| l.weights.iter().chain(&l.bias))
    }

    /// `self -= rate * grad`.
    pub(crate) fn descend(&mut self, grad: &Mlp, rate: f64) {
        for (p, g) in self.params_mut().zip(grad.params()) {
            *p -= rate * g;
        }
    }
}

/// A trained network together with what is needed to reproduce its inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub network: Mlp,
    pub seed: u64,
    pub scheme: Scheme,
    pub stats: Option<StandardizationStats>,
}

impl ModelParams {
    /// Scores a raw (unstandardized) row, applying the attached statistics
    /// first when present.
    pub fn score_raw(&self, row: &[f64]) -> Result<f64, LtrError> {
        match &self.stats {
            Some(stats) => self.network.score(&stats.apply_row(row)?),
            None => self.network.score(row),
        }
    }
}
