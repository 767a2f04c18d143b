//! Sensed history, network input encoding, action cadence, and reward.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::environment::{FlowField, FlowSample};
use crate::error::{Error, Result};
use crate::geometry::ActionSet;
use crate::scalar::Scalar;

/// Perception window lengths the agent is defined for.
pub const ALLOWED_WINDOWS: [usize; 3] = [2, 4, 8];

pub fn check_window(n_t: usize) -> Result<()> {
    if ALLOWED_WINDOWS.contains(&n_t) {
        Ok(())
    } else {
        Err(Error::config(format!(
            "N_T must be one of 2, 4, 8; got {n_t}"
        )))
    }
}

/// One sensed sample: concentration, current curvature, and the local flow.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerceptionRecord<T> {
    pub c: T,
    pub kappa: T,
    pub flow: FlowSample<T>,
}

/// The last `N_T` records, newest first.
#[derive(Debug, Clone, PartialEq)]
pub struct PerceptionHistory<T> {
    records: VecDeque<PerceptionRecord<T>>,
}

impl<T: Scalar> PerceptionHistory<T> {
    /// A full window padded with `initial`.
    pub fn filled(n_t: usize, initial: PerceptionRecord<T>) -> Self {
        assert!(n_t > 0, "perception window must hold at least one record");
        PerceptionHistory {
            records: std::iter::repeat(initial).take(n_t).collect(),
        }
    }

    /// Builds a history from records given newest first.
    pub fn from_newest_first(records: impl IntoIterator<Item = PerceptionRecord<T>>) -> Self {
        let records: VecDeque<_> = records.into_iter().collect();
        assert!(!records.is_empty(), "perception window must hold at least one record");
        PerceptionHistory { records }
    }

    /// Inserts `record` as the newest entry and drops the oldest.
    pub fn push(&mut self, record: PerceptionRecord<T>) {
        self.records.pop_back();
        self.records.push_front(record);
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn newest(&self) -> &PerceptionRecord<T> {
        &self.records[0]
    }

    pub fn oldest(&self) -> &PerceptionRecord<T> {
        &self.records[self.records.len() - 1]
    }

    /// Records from newest to oldest.
    pub fn iter(&self) -> impl Iterator<Item = &PerceptionRecord<T>> {
        self.records.iter()
    }

    pub fn concentrations(&self) -> impl Iterator<Item = T> + '_ {
        self.records.iter().map(|r| r.c)
    }
}

/// Duration of one sweep at the mean curvature, `2π/(κ̄ v)`.
pub fn average_period<T: Scalar>(kappa_mean: T, v: T) -> T {
    T::TAU() / (kappa_mean * v)
}

/// Number of integration steps in one action interval, `⌊T/(N_T·dt)⌋`.
pub fn action_steps<T: Scalar>(period: T, n_t: usize, dt: T) -> Result<usize> {
    if !(period > T::zero() && dt > T::zero()) {
        return Err(Error::config("period and time step must be positive"));
    }
    let steps = (period / (T::from_count(n_t) * dt)).floor();
    match steps.to_usize() {
        Some(n) if n > 0 => Ok(n),
        _ => Err(Error::config(format!(
            "time step {dt} is too coarse for N_T = {n_t} over a period of {period}"
        ))),
    }
}

/// Action interval `ΔT = ⌊T/(N_T·dt)⌋·dt`.
pub fn action_interval<T: Scalar>(period: T, n_t: usize, dt: T) -> Result<T> {
    Ok(T::from_count(action_steps(period, n_t, dt)?) * dt)
}

/// Which quantities each time slice of the network input carries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum InputLayout<T> {
    /// `(c*, κ*)` per slice.
    FlowBlind,
    /// `(c*, κ*, u_x*, u_y*, ω₀*)` per slice, scaled by the flow amplitude.
    FlowAware { u0: T, k: T },
}

impl<T: Scalar> InputLayout<T> {
    /// Flow-aware layout for a Taylor–Green field with `u0 > 0`.
    pub fn flow_aware(flow: &FlowField<T>) -> Result<Self> {
        match *flow {
            FlowField::TaylorGreen { u0, k } if u0 > T::zero() => {
                Ok(InputLayout::FlowAware { u0, k })
            }
            _ => Err(Error::config(
                "flow-aware inputs need a Taylor-Green flow with u0 > 0",
            )),
        }
    }

    pub fn per_slice(&self) -> usize {
        match self {
            InputLayout::FlowBlind => 2,
            InputLayout::FlowAware { .. } => 5,
        }
    }
}

/// Maps a perception history onto the normalized network input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InputEncoder<T> {
    actions: ActionSet<T>,
    c_k: T,
    layout: InputLayout<T>,
}

impl<T: Scalar> InputEncoder<T> {
    /// `c_k` is the typical concentration gradient used to scale `c*`.
    pub fn new(actions: ActionSet<T>, c_k: T, layout: InputLayout<T>) -> Result<Self> {
        if !(c_k > T::zero() && c_k.is_finite()) {
            return Err(Error::config(format!(
                "normalization gradient must be positive, got {c_k}"
            )));
        }
        Ok(InputEncoder { actions, c_k, layout })
    }

    pub fn layout(&self) -> InputLayout<T> {
        self.layout
    }

    pub fn dim(&self, n_t: usize) -> usize {
        n_t * self.layout.per_slice()
    }

    /// Writes the normalized input vector, slices newest first.
    pub fn encode(&self, history: &PerceptionHistory<T>) -> Vec<T> {
        let n = T::from_count(history.len());
        let mean = history.concentrations().sum::<T>() / n;
        let kappa_mean = self.actions.kappa_mean();
        let c_scale = kappa_mean / self.c_k;
        let kappa_spread = (self.actions.kappa1() - self.actions.kappa2()).abs();
        let two = T::lit(2.0);

        let mut out = Vec::with_capacity(self.dim(history.len()));
        for r in history.iter() {
            out.push((r.c - mean) * c_scale);
            out.push(two * (r.kappa - kappa_mean) / kappa_spread);
            if let InputLayout::FlowAware { u0, k } = self.layout {
                out.push(r.flow.u_x / u0);
                out.push(r.flow.u_y / u0);
                out.push(r.flow.omega0 / (u0 * k));
            }
        }
        out
    }

    /// Reward for reaching concentration `c_new` one interval after `history` was sensed.
    ///
    /// `(c_new − c_oldest) / (N_T·c_k·|1/κ₁ − 1/κ₂|)`
    pub fn reward(&self, c_new: T, history: &PerceptionHistory<T>) -> T {
        reward(c_new, history, &self.actions, self.c_k)
    }
}

/// Reward for reaching `c_new` after `history`; see [`InputEncoder::reward`].
pub fn reward<T: Scalar>(
    c_new: T,
    history: &PerceptionHistory<T>,
    actions: &ActionSet<T>,
    c_k: T,
) -> T {
    let n = T::from_count(history.len());
    let shift = (actions.kappa1().recip() - actions.kappa2().recip()).abs();
    (c_new - history.oldest().c) / (n * c_k * shift)
}
