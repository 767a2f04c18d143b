//! Action selection: ε-greedy over Q-values and the two hand-written baselines.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::ActionSet;
use crate::perception::PerceptionHistory;
use crate::scalar::Scalar;

/// Index of the largest value; ties go to the lower index.
pub fn argmax<T: Scalar>(values: &[T]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolicyDecision<T> {
    /// 0 selects κ₁, 1 selects κ₂.
    pub action: usize,
    pub exploratory: bool,
    pub q_values: Option<[T; 2]>,
}

impl<T: Scalar> PolicyDecision<T> {
    pub fn deterministic(action: usize) -> Self {
        PolicyDecision {
            action,
            exploratory: false,
            q_values: None,
        }
    }
}

/// Uniform random action with probability `epsilon`, otherwise the argmax.
pub fn epsilon_greedy<T: Scalar, R: Rng + ?Sized>(
    q_values: &[T],
    epsilon: f64,
    rng: &mut R,
) -> PolicyDecision<T> {
    assert!(q_values.len() >= 2, "need at least two actions");
    let q_pair = match q_values {
        [a, b] => Some([*a, *b]),
        _ => None,
    };
    if epsilon > 0.0 && rng.gen::<f64>() < epsilon {
        PolicyDecision {
            action: rng.gen_range(0..q_values.len()),
            exploratory: true,
            q_values: q_pair,
        }
    } else {
        PolicyDecision {
            action: argmax(q_values),
            exploratory: false,
            q_values: q_pair,
        }
    }
}

/// Steer toward the window maximum: κ₂ when the newest concentration is the
/// window maximum, κ₁ when it is the minimum, otherwise hold.
pub fn greedy_strategy<T: Scalar>(
    history: &PerceptionHistory<T>,
    actions: &ActionSet<T>,
    current_kappa: T,
) -> T {
    let newest = history.newest().c;
    let (lo, hi) = history
        .concentrations()
        .fold((newest, newest), |(lo, hi), c| (lo.min(c), hi.max(c)));
    if newest == hi {
        actions.kappa2()
    } else if newest == lo {
        actions.kappa1()
    } else {
        current_kappa
    }
}

/// Open-loop alternation: κ₁ for `N_T/2` actions, then κ₂ for `N_T/2`.
pub fn swinging_pattern<T: Scalar>(counter: usize, n_t: usize, actions: &ActionSet<T>) -> Result<T> {
    if n_t == 0 || n_t % 2 != 0 {
        return Err(Error::config(format!(
            "swinging pattern needs an even window, got N_T = {n_t}"
        )));
    }
    Ok(if counter % n_t < n_t / 2 {
        actions.kappa1()
    } else {
        actions.kappa2()
    })
}
