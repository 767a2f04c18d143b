use crate::qnet::network::{Gradients, QNetwork};
use crate::scalar::Scalar;

/// Adam with bias-corrected first and second moments.
#[derive(Debug, Clone)]
pub struct Adam<T> {
    learning_rate: T,
    beta1: T,
    beta2: T,
    epsilon: T,
    steps: i32,
    first: Gradients<T>,
    second: Gradients<T>,
}

impl<T: Scalar> Adam<T> {
    /// β = (0.9, 0.999), ε = 1e-8.
    pub fn new(net: &QNetwork<T>, learning_rate: T) -> Self {
        Self::with_moments(net, learning_rate, T::lit(0.9), T::lit(0.999), T::lit(1e-8))
    }

    pub fn with_moments(net: &QNetwork<T>, learning_rate: T, beta1: T, beta2: T, epsilon: T) -> Self {
        Adam {
            learning_rate,
            beta1,
            beta2,
            epsilon,
            steps: 0,
            first: net.zero_gradients(),
            second: net.zero_gradients(),
        }
    }

    pub fn learning_rate(&self) -> T {
        self.learning_rate
    }

    pub fn set_learning_rate(&mut self, lr: T) {
        self.learning_rate = lr;
    }

    pub fn steps(&self) -> i32 {
        self.steps
    }

    pub fn step(&mut self, net: &mut QNetwork<T>, grads: &Gradients<T>) {
        self.steps += 1;
        let one = T::one();
        let c1 = one - self.beta1.powi(self.steps);
        let c2 = one - self.beta2.powi(self.steps);
        let (b1, b2, lr, eps) = (self.beta1, self.beta2, self.learning_rate, self.epsilon);

        for (i, layer) in net.layers_mut().iter_mut().enumerate() {
            let params = layer.weights.iter_mut().chain(layer.biases.iter_mut());
            let m = self.first.weights[i].iter_mut().chain(self.first.biases[i].iter_mut());
            let v = self.second.weights[i].iter_mut().chain(self.second.biases[i].iter_mut());
            let g = grads.weights[i].iter().chain(grads.biases[i].iter());
            for (((p, m), v), &g) in params.zip(m).zip(v).zip(g) {
                *m = b1 * *m + (one - b1) * g;
                *v = b2 * *v + (one - b2) * g * g;
                let m_hat = *m / c1;
                let v_hat = *v / c2;
                *p -= lr * m_hat / (v_hat.sqrt() + eps);
            }
        }
    }
}
