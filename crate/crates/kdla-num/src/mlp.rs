//! Multilayer perceptron over column-batched data.
//!
//! Data matrices carry one sample per column, so a forward pass through
//! layer `l` is `A_l = act(W_l A_{l-1} + b_l)` with `W_l` of shape
//! `layer_sizes[l+1] x layer_sizes[l]`. The cache stores every layer
//! activation (including the input), which is enough to run an exact
//! reverse pass: for all supported activations the derivative is
//! recoverable from the activation value itself.

use crate::error::NumError;
use crate::matrix::Matrix;
use crate::rng::SplitMix64;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    /// exp(z) - 1 for z <= 0, identity above (alpha = 1).
    Elu,
    Tanh,
    Sigmoid,
    Linear,
}

impl Activation {
    #[inline]
    pub fn apply<T: Real>(self, z: T) -> T {
        match self {
            Activation::Elu => {
                if z > T::zero() {
                    z
                } else {
                    z.exp() - T::one()
                }
            }
            Activation::Tanh => z.tanh(),
            Activation::Sigmoid => T::one() / (T::one() + (-z).exp()),
            Activation::Linear => z,
        }
    }

    /// Derivative expressed through the activation output `a`.
    #[inline]
    pub fn derivative_from_output<T: Real>(self, a: T) -> T {
        match self {
            // ELU is sign-preserving: a > 0 iff z > 0, and a + 1 = exp(z)
            // on the negative branch (continuous at 0 where both give 1).
            Activation::Elu => {
                if a > T::zero() {
                    T::one()
                } else {
                    a + T::one()
                }
            }
            Activation::Tanh => T::one() - a * a,
            Activation::Sigmoid => a * (T::one() - a),
            Activation::Linear => T::one(),
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Activation::Elu => "elu",
            Activation::Tanh => "tanh",
            Activation::Sigmoid => "sigmoid",
            Activation::Linear => "linear",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Activation> {
        match tag {
            "elu" => Some(Activation::Elu),
            "tanh" => Some(Activation::Tanh),
            "sigmoid" => Some(Activation::Sigmoid),
            "linear" => Some(Activation::Linear),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MlpParams<T> {
    layer_sizes: Vec<usize>,
    weights: Vec<Matrix<T>>,
    biases: Vec<Vec<T>>,
    activations: Vec<Activation>,
}

/// Layer activations from a forward pass: `acts[0]` is the input,
/// `acts[L]` the output.
#[derive(Debug, Clone)]
pub struct MlpCache<T> {
    acts: Vec<Matrix<T>>,
}

impl<T: Real> MlpCache<T> {
    pub fn output(&self) -> &Matrix<T> {
        self.acts.last().expect("cache always holds the input")
    }
}

#[derive(Debug, Clone)]
pub struct MlpGrads<T> {
    pub d_weights: Vec<Matrix<T>>,
    pub d_biases: Vec<Vec<T>>,
}

impl<T: Real> MlpGrads<T> {
    pub fn zeros_like(params: &MlpParams<T>) -> Self {
        MlpGrads {
            d_weights: params
                .weights
                .iter()
                .map(|w| Matrix::zeros(w.rows(), w.cols()))
                .collect(),
            d_biases: params.biases.iter().map(|b| vec![T::zero(); b.len()]).collect(),
        }
    }

    pub fn add_assign(&mut self, other: &MlpGrads<T>) {
        for (a, b) in self.d_weights.iter_mut().zip(&other.d_weights) {
            a.add_assign(b);
        }
        for (a, b) in self.d_biases.iter_mut().zip(&other.d_biases) {
            for (x, &y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
    }

    pub fn scale_mut(&mut self, s: T) {
        for w in &mut self.d_weights {
            w.scale_mut(s);
        }
        for b in &mut self.d_biases {
            for x in b.iter_mut() {
                *x *= s;
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        self.d_weights.iter().all(|w| w.is_finite())
            && self.d_biases.iter().flatten().all(|x| x.is_finite())
    }

    pub fn norm(&self) -> T {
        let mut acc = T::zero();
        for w in &self.d_weights {
            let n = w.fro_norm();
            acc += n * n;
        }
        for b in &self.d_biases {
            for &x in b {
                acc += x * x;
            }
        }
        acc.sqrt()
    }
}

impl<T: Real> MlpParams<T> {
    /// Seeded init: weights uniform in +-sqrt(6/(fan_in+fan_out)), biases zero.
    pub fn new_seeded(layer_sizes: &[usize], activations: &[Activation], seed: u64) -> Self {
        assert!(layer_sizes.len() >= 2, "need at least one layer");
        assert_eq!(
            activations.len(),
            layer_sizes.len() - 1,
            "one activation per layer"
        );
        let mut rng = SplitMix64::new(seed);
        let mut weights = Vec::new();
        let mut biases = Vec::new();
        for l in 0..layer_sizes.len() - 1 {
            let (fan_in, fan_out) = (layer_sizes[l], layer_sizes[l + 1]);
            let bound = (6.0 / (fan_in + fan_out).max(1) as f64).sqrt();
            weights.push(Matrix::from_fn(fan_out, fan_in, |_, _| {
                T::from_f64(rng.uniform_in(-bound, bound))
            }));
            biases.push(vec![T::zero(); fan_out]);
        }
        MlpParams {
            layer_sizes: layer_sizes.to_vec(),
            weights,
            biases,
            activations: activations.to_vec(),
        }
    }

    /// Assemble from explicit parts (deserialization path).
    pub fn from_parts(
        layer_sizes: Vec<usize>,
        weights: Vec<Matrix<T>>,
        biases: Vec<Vec<T>>,
        activations: Vec<Activation>,
    ) -> Result<Self, NumError> {
        if layer_sizes.len() < 2
            || weights.len() != layer_sizes.len() - 1
            || biases.len() != weights.len()
            || activations.len() != weights.len()
        {
            return Err(NumError::dim("mlp_from_parts", "inconsistent layer counts"));
        }
        for l in 0..weights.len() {
            if weights[l].rows() != layer_sizes[l + 1]
                || weights[l].cols() != layer_sizes[l]
                || biases[l].len() != layer_sizes[l + 1]
            {
                return Err(NumError::dim(
                    "mlp_from_parts",
                    format!("layer {l} shape mismatch"),
                ));
            }
        }
        Ok(MlpParams {
            layer_sizes,
            weights,
            biases,
            activations,
        })
    }

    pub fn layer_sizes(&self) -> &[usize] {
        &self.layer_sizes
    }

    pub fn input_dim(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.layer_sizes.last().unwrap()
    }

    pub fn num_layers(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[Matrix<T>] {
        &self.weights
    }

    pub fn biases(&self) -> &[Vec<T>] {
        &self.biases
    }

    pub fn activations(&self) -> &[Activation] {
        &self.activations
    }

    pub fn weights_mut(&mut self) -> &mut [Matrix<T>] {
        &mut self.weights
    }

    pub fn biases_mut(&mut self) -> &mut [Vec<T>] {
        &mut self.biases
    }

    pub fn param_count(&self) -> usize {
        self.weights
            .iter()
            .map(|w| w.rows() * w.cols())
            .sum::<usize>()
            + self.biases.iter().map(|b| b.len()).sum::<usize>()
    }

    /// Forward pass over a column batch.
    pub fn forward(&self, x: &Matrix<T>) -> Result<(Matrix<T>, MlpCache<T>), NumError> {
        if x.rows() != self.input_dim() {
            return Err(x.shape_err("mlp_forward", (self.input_dim(), x.cols())));
        }
        if x.cols() == 0 {
            return Err(NumError::dim("mlp_forward", "empty batch"));
        }
        let mut acts = Vec::with_capacity(self.num_layers() + 1);
        acts.push(x.clone());
        for l in 0..self.num_layers() {
            let mut z = self.weights[l].mul(&acts[l]);
            let act = self.activations[l];
            let b = &self.biases[l];
            for i in 0..z.rows() {
                let bi = b[i];
                for v in z.row_mut(i) {
                    *v = act.apply(*v + bi);
                }
            }
            acts.push(z);
        }
        let y = acts.last().unwrap().clone();
        Ok((y, MlpCache { acts }))
    }

    /// Reverse pass: gradients of `<upstream, output>` with respect to all
    /// parameters, plus the gradient with respect to the input batch.
    pub fn backward(
        &self,
        cache: &MlpCache<T>,
        upstream: &Matrix<T>,
    ) -> Result<(MlpGrads<T>, Matrix<T>), NumError> {
        let last = cache.output();
        if upstream.rows() != last.rows() || upstream.cols() != last.cols() {
            return Err(upstream.shape_err("mlp_backward", (last.rows(), last.cols())));
        }
        if cache.acts.len() != self.num_layers() + 1
            || cache.acts[0].rows() != self.input_dim()
            || cache
                .acts
                .iter()
                .zip(&self.layer_sizes)
                .any(|(a, &s)| a.rows() != s)
        {
            return Err(NumError::dim(
                "mlp_backward",
                "cache does not match these parameters",
            ));
        }
        let mut grads = MlpGrads::zeros_like(self);
        let mut d_out = upstream.clone();
        for l in (0..self.num_layers()).rev() {
            // dZ = dA ⊙ act'(A)
            let act = self.activations[l];
            let a = &cache.acts[l + 1];
            for (dz, &av) in d_out.data_mut().iter_mut().zip(a.data()) {
                *dz = *dz * act.derivative_from_output(av);
            }
            grads.d_weights[l] = d_out.mul_transpose_b(&cache.acts[l]);
            grads.d_biases[l] = d_out.row_sums();
            d_out = self.weights[l].tr_mul(&d_out);
        }
        Ok((grads, d_out))
    }
}
