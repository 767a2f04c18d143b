//! Dense Q-network, its training step, and the experience replay store.
//!
//! Targets are formed with the same parameters that are being trained (no
//! separate target network) and are held constant inside each update.

mod adam;
mod network;
mod persist;
mod replay;

pub use adam::Adam;
pub use network::{Activation, DenseLayer, Gradients, QNetwork, Trace};
pub use persist::{load_network, save_network, FORMAT_VERSION};
pub use replay::{Experience, ReplayBuffer};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Bellman target `r + γ·max_a Q(s′, a)`.
pub fn q_target<T: Scalar>(reward: T, next_q: &[T], gamma: T) -> T {
    let best = next_q
        .iter()
        .copied()
        .fold(T::neg_infinity(), T::max);
    reward + gamma * best
}

/// Targets for every experience, evaluated before any parameter changes.
pub fn batch_targets<T: Scalar>(
    net: &QNetwork<T>,
    batch: &[&Experience<T>],
    gamma: T,
) -> Result<Vec<T>> {
    let mut trace = Trace::default();
    batch
        .iter()
        .map(|e| {
            net.forward_trace(&e.next_state, &mut trace)?;
            Ok(q_target(e.reward, trace.output(), gamma))
        })
        .collect()
}

/// Mean squared error on the taken actions and its gradient, written into `grads`.
///
/// `targets` are constants: no gradient flows through them.
pub fn loss_and_gradients<T: Scalar>(
    net: &QNetwork<T>,
    batch: &[&Experience<T>],
    targets: &[T],
    grads: &mut Gradients<T>,
) -> Result<T> {
    assert_eq!(batch.len(), targets.len(), "one target per experience");
    if batch.is_empty() {
        return Err(Error::Training("empty minibatch".into()));
    }
    grads.zero();
    let scale = T::from_count(batch.len()).recip();
    let mut trace = Trace::default();
    let mut d_out = vec![T::zero(); net.output_dim()];
    let mut loss = T::zero();
    for (e, &target) in batch.iter().zip(targets) {
        net.forward_trace(&e.state, &mut trace)?;
        let predicted = *trace.output().get(e.action).ok_or(Error::Dimension {
            expected: net.output_dim(),
            actual: e.action + 1,
        })?;
        let residual = predicted - target;
        loss += residual * residual;
        d_out.iter_mut().for_each(|d| *d = T::zero());
        d_out[e.action] = T::lit(2.0) * residual * scale;
        net.accumulate_gradients(&trace, &d_out, grads);
    }
    Ok(loss * scale)
}

/// Network, optimizer, and gradient scratch for repeated minibatch updates.
#[derive(Debug, Clone)]
pub struct Learner<T> {
    net: QNetwork<T>,
    optimizer: Adam<T>,
    grads: Gradients<T>,
    gamma: T,
}

impl<T: Scalar> Learner<T> {
    pub fn new(net: QNetwork<T>, learning_rate: T, gamma: T) -> Result<Self> {
        if !(gamma >= T::zero() && gamma < T::one()) {
            return Err(Error::config(format!("discount must lie in [0, 1), got {gamma}")));
        }
        let optimizer = Adam::new(&net, learning_rate);
        let grads = net.zero_gradients();
        Ok(Learner {
            net,
            optimizer,
            grads,
            gamma,
        })
    }

    pub fn network(&self) -> &QNetwork<T> {
        &self.net
    }

    pub fn into_network(self) -> QNetwork<T> {
        self.net
    }

    pub fn optimizer_mut(&mut self) -> &mut Adam<T> {
        &mut self.optimizer
    }

    /// One optimizer step on `batch`; returns the loss before the step.
    pub fn train_minibatch(&mut self, batch: &[&Experience<T>]) -> Result<T> {
        let targets = batch_targets(&self.net, batch, self.gamma)?;
        let loss = loss_and_gradients(&self.net, batch, &targets, &mut self.grads)?;
        if !loss.is_finite() {
            return Err(Error::Training(format!("non-finite loss {loss}")));
        }
        self.optimizer.step(&mut self.net, &self.grads);
        if !self.net.is_finite() {
            return Err(Error::Training("network parameters became non-finite".into()));
        }
        Ok(loss)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn target_examples() {
        assert!((q_target(1.0f64, &[2.0, 1.5], 0.98) - 2.96).abs() < 1e-12);
        assert_eq!(q_target(0.7, &[2.0, 1.5], 0.0), 0.7);
        assert!((q_target(0.0f64, &[-1.0, -2.0], 0.98) + 0.98).abs() < 1e-12);
    }

    fn random_batch(rng: &mut ChaCha8Rng, dim: usize, n: usize) -> Vec<Experience<f64>> {
        (0..n)
            .map(|_| Experience {
                state: (0..dim).map(|_| rng.gen_range(-1.5..1.5)).collect(),
                action: rng.gen_range(0..2),
                reward: rng.gen_range(-2.0..2.0),
                next_state: (0..dim).map(|_| rng.gen_range(-1.5..1.5)).collect(),
            })
            .collect()
    }

    #[test]
    fn zero_residual_leaves_parameters_unchanged() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let net = QNetwork::<f64>::zeros(&[4, 8, 2]).unwrap();
        let batch: Vec<_> = random_batch(&mut rng, 4, 6)
            .into_iter()
            .map(|mut e| {
                e.reward = 0.0;
                e
            })
            .collect();
        let refs: Vec<_> = batch.iter().collect();
        let mut learner = Learner::new(net.clone(), 0.01, 0.98).unwrap();
        let loss = learner.train_minibatch(&refs).unwrap();
        assert_eq!(loss, 0.0);
        assert_eq!(learner.network(), &net);
    }

    #[test]
    fn myopic_update_moves_prediction_toward_reward() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let net = QNetwork::<f64>::glorot(&[4, 8, 2], &mut rng).unwrap();
        let e = random_batch(&mut rng, 4, 1).remove(0);
        let before = (net.forward(&e.state).unwrap()[e.action] - e.reward).abs();
        let mut learner = Learner::new(net, 1e-3, 0.0).unwrap();
        learner.train_minibatch(&[&e]).unwrap();
        let after = (learner.network().forward(&e.state).unwrap()[e.action] - e.reward).abs();
        assert!(after < before);
    }

    #[test]
    fn overfits_a_frozen_batch() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let net = QNetwork::<f64>::glorot(&[4, 16, 16, 2], &mut rng).unwrap();
        let batch = random_batch(&mut rng, 4, 8);
        let refs: Vec<_> = batch.iter().collect();
        let mut learner = Learner::new(net, 1e-3, 0.0).unwrap();
        let mut last = f64::INFINITY;
        for _ in 0..10_000 {
            last = learner.train_minibatch(&refs).unwrap();
            if last < 1e-4 {
                break;
            }
        }
        assert!(last < 1e-4, "loss stalled at {last}");
    }

    #[test]
    fn backprop_matches_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..5 {
            let net = QNetwork::<f64>::glorot(&[4, 8, 2], &mut rng).unwrap();
            let batch = random_batch(&mut rng, 4, 5);
            let refs: Vec<_> = batch.iter().collect();
            let targets = batch_targets(&net, &refs, 0.98).unwrap();
            let mut grads = net.zero_gradients();
            loss_and_gradients(&net, &refs, &targets, &mut grads).unwrap();
            let analytic = grads.flatten();

            let h = 1e-5;
            let mut probe = net.clone();
            let mut scratch = net.zero_gradients();
            for (k, &a) in analytic.iter().enumerate() {
                let original = *probe.parameters_mut().nth(k).unwrap();
                *probe.parameters_mut().nth(k).unwrap() = original + h;
                let up = loss_and_gradients(&probe, &refs, &targets, &mut scratch).unwrap();
                *probe.parameters_mut().nth(k).unwrap() = original - h;
                let down = loss_and_gradients(&probe, &refs, &targets, &mut scratch).unwrap();
                *probe.parameters_mut().nth(k).unwrap() = original;
                let numeric = (up - down) / (2.0 * h);
                let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(1e-4);
                assert!(rel < 1e-5, "parameter {k}: analytic {a}, numeric {numeric}");
            }
        }
    }

    #[test]
    fn non_finite_loss_is_a_training_fault() {
        let net = QNetwork::<f64>::zeros(&[2, 3, 2]).unwrap();
        let e = Experience {
            state: vec![0.0, 0.0],
            action: 1,
            reward: f64::NAN,
            next_state: vec![0.0, 0.0],
        };
        let mut learner = Learner::new(net, 0.01, 0.5).unwrap();
        assert!(matches!(learner.train_minibatch(&[&e]), Err(Error::Training(_))));
    }

    #[test]
    fn rejects_discount_of_one() {
        let net = QNetwork::<f64>::zeros(&[2, 2]).unwrap();
        assert!(Learner::new(net, 0.01, 1.0).is_err());
    }
}
