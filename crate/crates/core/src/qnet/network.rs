use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Tanh,
    Identity,
}

impl Activation {
    #[inline]
    fn apply<T: Scalar>(self, x: T) -> T {
        match self {
            Activation::Tanh => x.tanh(),
            Activation::Identity => x,
        }
    }

    /// Derivative expressed through the activation's output.
    #[inline]
    fn derivative_from_output<T: Scalar>(self, y: T) -> T {
        match self {
            Activation::Tanh => T::one() - y * y,
            Activation::Identity => T::one(),
        }
    }
}

/// Fully connected layer; `weights` is `outputs × inputs`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseLayer<T> {
    inputs: usize,
    outputs: usize,
    pub(crate) weights: Vec<T>,
    pub(crate) biases: Vec<T>,
    activation: Activation,
}

impl<T: Scalar> DenseLayer<T> {
    pub fn new(
        inputs: usize,
        outputs: usize,
        weights: Vec<T>,
        biases: Vec<T>,
        activation: Activation,
    ) -> Result<Self> {
        if weights.len() != inputs * outputs {
            return Err(Error::Dimension {
                expected: inputs * outputs,
                actual: weights.len(),
            });
        }
        if biases.len() != outputs {
            return Err(Error::Dimension {
                expected: outputs,
                actual: biases.len(),
            });
        }
        Ok(DenseLayer {
            inputs,
            outputs,
            weights,
            biases,
            activation,
        })
    }

    pub fn zeros(inputs: usize, outputs: usize, activation: Activation) -> Self {
        DenseLayer {
            inputs,
            outputs,
            weights: vec![T::zero(); inputs * outputs],
            biases: vec![T::zero(); outputs],
            activation,
        }
    }

    /// Glorot-uniform weights and zero biases.
    pub fn glorot<R: Rng + ?Sized>(
        inputs: usize,
        outputs: usize,
        activation: Activation,
        rng: &mut R,
    ) -> Self {
        let limit = (6.0 / (inputs + outputs) as f64).sqrt();
        let weights = (0..inputs * outputs)
            .map(|_| T::lit(rng.gen_range(-limit..limit)))
            .collect();
        DenseLayer {
            inputs,
            outputs,
            weights,
            biases: vec![T::zero(); outputs],
            activation,
        }
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn biases(&self) -> &[T] {
        &self.biases
    }

    fn forward_into(&self, input: &[T], out: &mut Vec<T>) {
        out.clear();
        for (row, &b) in self.weights.chunks_exact(self.inputs).zip(&self.biases) {
            out.push(self.activation.apply(b + dot(row, input)));
        }
    }
}

/// Dot product with four independent partial sums.
#[inline]
fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    let mut acc = [T::zero(); 4];
    let (a4, b4) = (a.chunks_exact(4), b.chunks_exact(4));
    let tail = a4.remainder().iter().zip(b4.remainder()).fold(T::zero(), |s, (&x, &y)| s + x * y);
    for (x, y) in a4.zip(b4) {
        for k in 0..4 {
            acc[k] += x[k] * y[k];
        }
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// Dense feed-forward Q-network: tanh hidden layers and a linear output layer.
#[derive(Debug, Clone, PartialEq)]
pub struct QNetwork<T> {
    layers: Vec<DenseLayer<T>>,
}

/// Per-layer activations of one forward pass, input included.
#[derive(Debug, Clone, Default)]
pub struct Trace<T> {
    activations: Vec<Vec<T>>,
}

impl<T: Scalar> Trace<T> {
    pub fn output(&self) -> &[T] {
        self.activations.last().map(Vec::as_slice).unwrap_or(&[])
    }
}

/// Gradients shaped like the parameters of a [`QNetwork`].
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients<T> {
    pub(crate) weights: Vec<Vec<T>>,
    pub(crate) biases: Vec<Vec<T>>,
}

impl<T: Scalar> Gradients<T> {
    pub fn zero(&mut self) {
        for g in self.weights.iter_mut().chain(self.biases.iter_mut()) {
            g.iter_mut().for_each(|x| *x = T::zero());
        }
    }

    /// Layer by layer: weights row-major, then biases.
    pub fn flatten(&self) -> Vec<T> {
        self.weights
            .iter()
            .zip(&self.biases)
            .flat_map(|(w, b)| w.iter().chain(b.iter()).copied())
            .collect()
    }
}

impl<T: Scalar> QNetwork<T> {
    pub fn from_layers(layers: Vec<DenseLayer<T>>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::config("a network needs at least one layer"));
        }
        for pair in layers.windows(2) {
            if pair[0].outputs != pair[1].inputs {
                return Err(Error::Dimension {
                    expected: pair[0].outputs,
                    actual: pair[1].inputs,
                });
            }
        }
        Ok(QNetwork { layers })
    }

    /// `sizes = [input, hidden.., output]`: tanh on every hidden layer, identity on the output.
    pub fn glorot<R: Rng + ?Sized>(sizes: &[usize], rng: &mut R) -> Result<Self> {
        Self::check_sizes(sizes)?;
        let last = sizes.len() - 2;
        let layers = sizes
            .windows(2)
            .enumerate()
            .map(|(i, w)| DenseLayer::glorot(w[0], w[1], Self::activation_at(i, last), rng))
            .collect();
        Self::from_layers(layers)
    }

    pub fn zeros(sizes: &[usize]) -> Result<Self> {
        Self::check_sizes(sizes)?;
        let last = sizes.len() - 2;
        let layers = sizes
            .windows(2)
            .enumerate()
            .map(|(i, w)| DenseLayer::zeros(w[0], w[1], Self::activation_at(i, last)))
            .collect();
        Self::from_layers(layers)
    }

    fn activation_at(index: usize, last: usize) -> Activation {
        if index == last {
            Activation::Identity
        } else {
            Activation::Tanh
        }
    }

    fn check_sizes(sizes: &[usize]) -> Result<()> {
        if sizes.len() < 2 || sizes.contains(&0) {
            return Err(Error::config(format!("invalid layer sizes {sizes:?}")));
        }
        Ok(())
    }

    pub fn layers(&self) -> &[DenseLayer<T>] {
        &self.layers
    }

    pub(crate) fn layers_mut(&mut self) -> &mut [DenseLayer<T>] {
        &mut self.layers
    }

    pub fn layer_sizes(&self) -> Vec<usize> {
        std::iter::once(self.input_dim())
            .chain(self.layers.iter().map(|l| l.outputs))
            .collect()
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].inputs
    }

    pub fn output_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].outputs
    }

    pub fn parameter_count(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weights.len() + l.biases.len())
            .sum()
    }

    fn check_input(&self, input: &[T]) -> Result<()> {
        if input.len() != self.input_dim() {
            return Err(Error::Dimension {
                expected: self.input_dim(),
                actual: input.len(),
            });
        }
        Ok(())
    }

    /// Q-values for every action.
    pub fn forward(&self, input: &[T]) -> Result<Vec<T>> {
        let mut trace = Trace::default();
        self.forward_trace(input, &mut trace)?;
        Ok(trace.activations.pop().unwrap_or_default())
    }

    /// Forward pass that keeps every layer's activation for backpropagation.
    pub fn forward_trace(&self, input: &[T], trace: &mut Trace<T>) -> Result<()> {
        self.check_input(input)?;
        trace.activations.resize_with(self.layers.len() + 1, Vec::new);
        trace.activations[0].clear();
        trace.activations[0].extend_from_slice(input);
        for (i, layer) in self.layers.iter().enumerate() {
            let (done, rest) = trace.activations.split_at_mut(i + 1);
            layer.forward_into(&done[i], &mut rest[0]);
        }
        Ok(())
    }

    pub fn zero_gradients(&self) -> Gradients<T> {
        Gradients {
            weights: self
                .layers
                .iter()
                .map(|l| vec![T::zero(); l.weights.len()])
                .collect(),
            biases: self
                .layers
                .iter()
                .map(|l| vec![T::zero(); l.biases.len()])
                .collect(),
        }
    }

    /// Adds `∂L/∂θ` to `grads`, given `∂L/∂output` for the pass recorded in `trace`.
    pub fn accumulate_gradients(&self, trace: &Trace<T>, d_output: &[T], grads: &mut Gradients<T>) {
        assert_eq!(d_output.len(), self.output_dim(), "output gradient length");
        let mut delta: Vec<T> = d_output.to_vec();
        let mut next = Vec::new();
        for (i, layer) in self.layers.iter().enumerate().rev() {
            let out = &trace.activations[i + 1];
            let inp = &trace.activations[i];
            for (d, &y) in delta.iter_mut().zip(out) {
                *d *= layer.activation.derivative_from_output(y);
            }
            let gw = &mut grads.weights[i];
            let gb = &mut grads.biases[i];
            for (o, &d) in delta.iter().enumerate() {
                if d == T::zero() {
                    continue;
                }
                gb[o] += d;
                for (g, &x) in gw[o * layer.inputs..(o + 1) * layer.inputs].iter_mut().zip(inp) {
                    *g += d * x;
                }
            }
            if i > 0 {
                next.clear();
                next.resize(layer.inputs, T::zero());
                for (row, &d) in layer.weights.chunks_exact(layer.inputs).zip(&delta) {
                    if d == T::zero() {
                        continue;
                    }
                    for (n, &w) in next.iter_mut().zip(row) {
                        *n += d * w;
                    }
                }
                std::mem::swap(&mut delta, &mut next);
            }
        }
    }

    /// Every parameter in [`Gradients::flatten`] order.
    pub fn parameters_mut(&mut self) -> impl Iterator<Item = &mut T> {
        self.layers
            .iter_mut()
            .flat_map(|l| l.weights.iter_mut().chain(l.biases.iter_mut()))
    }

    pub fn parameters(&self) -> impl Iterator<Item = &T> {
        self.layers
            .iter()
            .flat_map(|l| l.weights.iter().chain(l.biases.iter()))
    }

    pub fn is_finite(&self) -> bool {
        self.parameters().all(|p| p.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Straightforward matrix chain used as an independent reference.
    fn reference_forward(net: &QNetwork<f64>, input: &[f64]) -> Vec<f64> {
        let mut x = input.to_vec();
        for layer in net.layers() {
            let mut y = vec![0.0; layer.outputs()];
            for o in 0..layer.outputs() {
                let mut z = layer.biases()[o];
                for i in 0..layer.inputs() {
                    z += layer.weights()[o * layer.inputs() + i] * x[i];
                }
                y[o] = match layer.activation() {
                    Activation::Tanh => z.tanh(),
                    Activation::Identity => z,
                };
            }
            x = y;
        }
        x
    }

    #[test]
    fn zero_network_outputs_zero() {
        let net = QNetwork::<f64>::zeros(&[8, 24, 24, 24, 2]).unwrap();
        assert_eq!(net.forward(&[0.7; 8]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn output_bias_passes_through() {
        let mut net = QNetwork::<f64>::zeros(&[3, 5, 2]).unwrap();
        net.layers[1].biases = vec![0.25, -1.5];
        assert_eq!(net.forward(&[1.0, -2.0, 3.0]).unwrap(), vec![0.25, -1.5]);
    }

    #[test]
    fn matches_reference_chain() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let mut net = QNetwork::<f64>::glorot(&[6, 7, 5, 2], &mut rng).unwrap();
            for p in net.parameters_mut() {
                *p += rng.gen_range(-0.3..0.3);
            }
            let input: Vec<f64> = (0..6).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let got = net.forward(&input).unwrap();
            let want = reference_forward(&net, &input);
            for (g, w) in got.iter().zip(&want) {
                assert!((g - w).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let net = QNetwork::<f64>::zeros(&[4, 3, 2]).unwrap();
        assert!(matches!(
            net.forward(&[1.0; 5]),
            Err(Error::Dimension { expected: 4, actual: 5 })
        ));
    }

    #[test]
    fn layout_of_default_agent() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let net = QNetwork::<f32>::glorot(&[8, 24, 24, 24, 2], &mut rng).unwrap();
        assert_eq!(net.layers().len(), 4);
        assert_eq!(net.layer_sizes(), vec![8, 24, 24, 24, 2]);
        let acts: Vec<_> = net.layers().iter().map(|l| l.activation()).collect();
        assert_eq!(
            acts,
            vec![Activation::Tanh, Activation::Tanh, Activation::Tanh, Activation::Identity]
        );
        assert!(net.layers().iter().all(|l| l.biases().iter().all(|&b| b == 0.0)));
        let limit = (6.0f32 / 32.0).sqrt();
        assert!(net.layers()[0].weights().iter().all(|w| w.abs() <= limit));
    }

    #[test]
    fn rejects_broken_chain() {
        let a = DenseLayer::<f64>::zeros(3, 4, Activation::Tanh);
        let b = DenseLayer::<f64>::zeros(5, 2, Activation::Identity);
        assert!(QNetwork::from_layers(vec![a, b]).is_err());
    }
}
