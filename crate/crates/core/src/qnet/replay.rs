use std::collections::VecDeque;

use rand::seq::index;
use rand::Rng;

/// One transition `(s, a, r, s′)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Experience<T> {
    pub state: Vec<T>,
    pub action: usize,
    pub reward: T,
    pub next_state: Vec<T>,
}

/// Bounded FIFO store of transitions with uniform minibatch sampling.
#[derive(Debug, Clone)]
pub struct ReplayBuffer<T> {
    capacity: usize,
    storage: VecDeque<Experience<T>>,
}

impl<T> ReplayBuffer<T> {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "replay buffer capacity must be positive");
        ReplayBuffer {
            capacity,
            storage: VecDeque::with_capacity(capacity.min(1 << 16)),
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.storage.len()
    }

    pub fn is_empty(&self) -> bool {
        self.storage.is_empty()
    }

    /// Appends `e`, evicting the oldest entry when full.
    pub fn push(&mut self, e: Experience<T>) {
        if self.storage.len() == self.capacity {
            self.storage.pop_front();
        }
        self.storage.push_back(e);
    }

    /// Oldest first.
    pub fn iter(&self) -> impl Iterator<Item = &Experience<T>> {
        self.storage.iter()
    }

    /// `size` distinct entries drawn uniformly, or `None` while the buffer holds fewer.
    pub fn sample<R: Rng + ?Sized>(&self, size: usize, rng: &mut R) -> Option<Vec<&Experience<T>>> {
        if size == 0 || size > self.storage.len() {
            return None;
        }
        Some(
            index::sample(rng, self.storage.len(), size)
                .into_iter()
                .map(|i| &self.storage[i])
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn exp(tag: usize) -> Experience<f64> {
        Experience {
            state: vec![tag as f64],
            action: 0,
            reward: 0.0,
            next_state: vec![tag as f64 + 1.0],
        }
    }

    fn tags(buf: &ReplayBuffer<f64>) -> Vec<usize> {
        buf.iter().map(|e| e.state[0] as usize).collect()
    }

    #[test]
    fn evicts_oldest_first() {
        let mut buf = ReplayBuffer::new(2);
        for t in 0..3 {
            buf.push(exp(t));
        }
        assert_eq!(tags(&buf), vec![1, 2]);

        let mut buf = ReplayBuffer::new(5);
        buf.push(exp(0));
        assert_eq!(buf.len(), 1);
        for t in 1..12 {
            buf.push(exp(t));
        }
        assert_eq!(buf.len(), 5);
    }

    #[test]
    fn full_sample_is_a_permutation() {
        let mut buf = ReplayBuffer::new(50);
        for t in 0..30 {
            buf.push(exp(t));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut got: Vec<usize> = buf
            .sample(30, &mut rng)
            .unwrap()
            .iter()
            .map(|e| e.state[0] as usize)
            .collect();
        got.sort_unstable();
        assert_eq!(got, (0..30).collect::<Vec<_>>());
    }

    #[test]
    fn undersized_buffer_signals_skip() {
        let mut buf = ReplayBuffer::new(10);
        buf.push(exp(0));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!(buf.sample(2, &mut rng).is_none());
    }

    #[test]
    fn single_draws_are_uniform() {
        let n = 1000;
        let draws = 100_000;
        let mut buf = ReplayBuffer::new(n);
        for t in 0..n {
            buf.push(exp(t));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut counts = vec![0usize; n];
        for _ in 0..draws {
            counts[buf.sample(1, &mut rng).unwrap()[0].state[0] as usize] += 1;
        }
        let p = 1.0 / n as f64;
        let expected = draws as f64 * p;
        let sigma = (draws as f64 * p * (1.0 - p)).sqrt();
        assert!(counts.iter().all(|&c| (c as f64 - expected).abs() < 5.0 * sigma));

        // Pearson statistic for n-1 degrees of freedom, within 5 standard deviations.
        let chi2: f64 = counts
            .iter()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        let dof = (n - 1) as f64;
        assert!((chi2 - dof).abs() < 5.0 * (2.0 * dof).sqrt());
    }

    #[test]
    fn batch_has_no_repeats() {
        let mut buf = ReplayBuffer::new(100);
        for t in 0..100 {
            buf.push(exp(t));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let mut got: Vec<usize> = buf
                .sample(32, &mut rng)
                .unwrap()
                .iter()
                .map(|e| e.state[0] as usize)
                .collect();
            got.sort_unstable();
            got.dedup();
            assert_eq!(got.len(), 32);
        }
    }
}
