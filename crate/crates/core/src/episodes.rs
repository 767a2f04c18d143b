//! Episode loop, training schedule, and evaluation cohorts.
//!
//! An episode senses, decides, and then integrates one action interval of
//! `dt` steps, so decisions always land on whole multiples of the interval.
//! The clock is kept as an integer tick count and converted to time as
//! `ticks·dt`.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis;
use crate::environment::{ConcentrationField, FieldKind, FlowField};
use crate::error::{Error, Result};
use crate::geometry::{ActionSet, SwimmerState, Vec2};
use crate::params;
use crate::perception::{
    self, average_period, InputEncoder, InputLayout, PerceptionHistory, PerceptionRecord,
};
use crate::policies::{self, PolicyDecision};
use crate::qnet::{Experience, Learner, QNetwork, ReplayBuffer};
use crate::rng::{stream_rng, Stream, TRAINING_INDEX};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SpawnRegion<T> {
    /// Uniform over the axis-aligned rectangle `[min, max)`.
    Rect { min: Vec2<T>, max: Vec2<T> },
    /// Uniform on the circle of `radius` about `center`.
    Circle { center: Vec2<T>, radius: T },
}

impl<T: Scalar> SpawnRegion<T> {
    /// A circle of radius 20 about a radial source; otherwise one TG cell
    /// `[0, 2π/k)²` in flow, or `[-10, 10)²` without.
    pub fn standard(field: FieldKind, flow: &FlowField<T>) -> Self {
        match (field, flow) {
            (FieldKind::Radial, _) => SpawnRegion::Circle {
                center: Vec2::zero(),
                radius: T::lit(params::RADIAL_SPAWN_RADIUS),
            },
            (FieldKind::Linear, FlowField::TaylorGreen { k, .. }) => SpawnRegion::Rect {
                min: Vec2::zero(),
                max: Vec2::new(T::TAU() / *k, T::TAU() / *k),
            },
            (FieldKind::Linear, FlowField::None) => {
                let h = T::lit(params::LINEAR_SPAWN_HALF_WIDTH);
                SpawnRegion::Rect {
                    min: Vec2::new(-h, -h),
                    max: Vec2::new(h, h),
                }
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec2<T> {
        match *self {
            SpawnRegion::Rect { min, max } => {
                let u = T::lit(rng.gen::<f64>());
                let v = T::lit(rng.gen::<f64>());
                Vec2::new(min.x + (max.x - min.x) * u, min.y + (max.y - min.y) * v)
            }
            SpawnRegion::Circle { center, radius } => {
                let angle = T::lit(rng.gen::<f64>()) * T::TAU();
                center + Vec2::from_angle(angle) * radius
            }
        }
    }
}

/// How densely an episode records its trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Recording {
    /// Start, every decision, and the end point.
    Actions,
    /// Start and every integration step.
    Steps,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpisodeConfig<T> {
    pub n_t: usize,
    pub dt: T,
    pub t_life: T,
    pub field: ConcentrationField<T>,
    pub flow: FlowField<T>,
    pub flow_aware: bool,
    pub actions: ActionSet<T>,
    pub spawn: SpawnRegion<T>,
    /// Gradient used to normalize concentrations and rewards.
    pub norm_gradient: T,
    /// Stop once the swimmer is closer than this to the origin.
    pub source_radius: Option<T>,
    pub recording: Recording,
}

/// Chooses the environment for [`EpisodeConfig::standard`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scenario {
    pub n_t: usize,
    pub field: FieldKind,
    pub taylor_green: bool,
    pub flow_aware: bool,
    pub adaptive_speed: bool,
}

impl Scenario {
    pub fn linear(n_t: usize) -> Self {
        Scenario {
            n_t,
            field: FieldKind::Linear,
            taylor_green: false,
            flow_aware: false,
            adaptive_speed: false,
        }
    }
}

impl<T: Scalar> EpisodeConfig<T> {
    /// Default parameters for `scenario`, with the training lifespan.
    ///
    /// Radial fields spawn on a circle about the source and run until the
    /// swimmer reaches it or the time cap expires.
    pub fn standard(scenario: Scenario) -> Result<Self> {
        let lit = T::lit;
        let actions = if scenario.adaptive_speed {
            ActionSet::adaptive_speed(
                lit(params::KAPPA1),
                lit(params::KAPPA2),
                lit(params::SPEED_KAPPA1),
                lit(params::SPEED_KAPPA2),
            )?
        } else {
            ActionSet::constant_speed(lit(params::KAPPA1), lit(params::KAPPA2), lit(params::SPEED))?
        };
        let flow = if scenario.taylor_green {
            FlowField::taylor_green(lit(params::TG_U0), lit(params::TG_K))?
        } else {
            FlowField::None
        };
        let (field, source_radius, t_life) = match scenario.field {
            FieldKind::Linear => (
                ConcentrationField::linear(lit(params::LINEAR_GRADIENT), lit(params::LINEAR_OFFSET))?,
                None,
                lit(params::T_LIFE_TRAIN),
            ),
            FieldKind::Radial => (
                ConcentrationField::radial(lit(params::RADIAL_GRADIENT), lit(params::RADIAL_OFFSET))?,
                Some(lit(params::SOURCE_RADIUS)),
                lit(params::RADIAL_TIME_CAP),
            ),
        };
        let spawn = SpawnRegion::standard(scenario.field, &flow);
        let config = EpisodeConfig {
            n_t: scenario.n_t,
            dt: lit(params::DT),
            t_life,
            field,
            flow,
            flow_aware: scenario.flow_aware,
            actions,
            spawn,
            norm_gradient: lit(params::LINEAR_GRADIENT),
            source_radius,
            recording: Recording::Actions,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn with_t_life(mut self, t_life: T) -> Self {
        self.t_life = t_life;
        self
    }

    pub fn with_recording(mut self, recording: Recording) -> Self {
        self.recording = recording;
        self
    }

    pub fn validate(&self) -> Result<()> {
        perception::check_window(self.n_t)?;
        if !(self.dt > T::zero() && self.dt.is_finite()) {
            return Err(Error::config(format!("time step must be positive, got {}", self.dt)));
        }
        if self.flow_aware && self.flow.is_none() {
            return Err(Error::config("flow-aware inputs require a Taylor-Green flow"));
        }
        let slowest = self.interval_steps(self.actions.speed_for(self.actions.kappa1()))?
            .max(self.interval_steps(self.actions.speed_for(self.actions.kappa2()))?);
        if !(self.t_life > T::from_count(slowest) * self.dt) {
            return Err(Error::config(format!(
                "lifespan {} must exceed one action interval",
                self.t_life
            )));
        }
        self.encoder()?;
        Ok(())
    }

    pub fn layout(&self) -> Result<InputLayout<T>> {
        if self.flow_aware {
            InputLayout::flow_aware(&self.flow)
        } else {
            Ok(InputLayout::FlowBlind)
        }
    }

    pub fn encoder(&self) -> Result<InputEncoder<T>> {
        InputEncoder::new(self.actions, self.norm_gradient, self.layout()?)
    }

    /// Network input dimension, `2·N_T` or `5·N_T`.
    pub fn input_dim(&self) -> usize {
        self.n_t * if self.flow_aware { 5 } else { 2 }
    }

    /// Integration steps per action interval at swimming speed `speed`.
    pub fn interval_steps(&self, speed: T) -> Result<usize> {
        let period = average_period(self.actions.kappa_mean(), speed);
        perception::action_steps(period, self.n_t, self.dt)
    }

    fn life_ticks(&self) -> u64 {
        (self.t_life / self.dt).round().to_u64().unwrap_or(0)
    }

    fn sense(&self, state: &SwimmerState<T>) -> PerceptionRecord<T> {
        PerceptionRecord {
            c: self.field.at(state.position),
            kappa: state.curvature,
            flow: self.flow.at(state.position),
        }
    }
}

/// Who chooses the curvature.
#[derive(Debug, Clone, Copy)]
pub enum Policy<'a, T> {
    QNet { net: &'a QNetwork<T>, epsilon: f64 },
    Greedy,
    Swinging,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PolicyKind {
    QNet,
    Greedy,
    Swinging,
}

impl<T> Policy<'_, T> {
    pub fn kind(&self) -> PolicyKind {
        match self {
            Policy::QNet { .. } => PolicyKind::QNet,
            Policy::Greedy => PolicyKind::Greedy,
            Policy::Swinging => PolicyKind::Swinging,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample<T> {
    pub time: T,
    pub position: Vec2<T>,
    pub kappa: T,
    pub speed: T,
    pub c: T,
    pub action: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActionRecord<T> {
    /// Integration steps since spawn.
    pub tick: u64,
    pub time: T,
    pub decision: PolicyDecision<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    LifespanEnd,
    ReachedSource,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeResult<T> {
    pub trajectory: Vec<TrajectorySample<T>>,
    pub actions: Vec<ActionRecord<T>>,
    /// Final concentration minus initial concentration.
    pub gain: T,
    /// Curvature center right after each decision.
    pub centerline: Vec<Vec2<T>>,
    pub terminated: Termination,
    /// Number of transitions pushed to the replay buffer.
    pub stored: usize,
}

impl<T: Scalar> EpisodeResult<T> {
    pub fn duration(&self) -> T {
        self.trajectory.last().map(|s| s.time).unwrap_or_else(T::zero)
    }
}

/// Runs one swimmer from a random spawn until its lifespan ends (or it reaches the source).
///
/// Transitions `(s, a, r, s′)` are pushed to `buffer` when one is given and
/// the policy is the Q-network.
pub fn run_episode<T: Scalar, R: Rng + ?Sized>(
    config: &EpisodeConfig<T>,
    policy: Policy<'_, T>,
    mut buffer: Option<&mut ReplayBuffer<T>>,
    spawn_rng: &mut R,
    explore_rng: &mut R,
) -> Result<EpisodeResult<T>> {
    let encoder = config.encoder()?;
    if let Policy::QNet { net, .. } = policy {
        if net.input_dim() != encoder.dim(config.n_t) {
            return Err(Error::Dimension {
                expected: encoder.dim(config.n_t),
                actual: net.input_dim(),
            });
        }
    }
    let actions = &config.actions;
    let dt = config.dt;
    let life_ticks = config.life_ticks();

    let position = config.spawn.sample(spawn_rng);
    let heading = T::lit(spawn_rng.gen::<f64>()) * T::TAU();
    let kappa0 = actions.kappa1();
    let mut state = SwimmerState::new(position, heading, kappa0, actions.speed_for(kappa0));

    let mut history = PerceptionHistory::filled(config.n_t, config.sense(&state));
    let c_start = history.newest().c;
    let mut input = encoder.encode(&history);

    let mut result = EpisodeResult {
        trajectory: Vec::new(),
        actions: Vec::new(),
        gain: T::zero(),
        centerline: Vec::new(),
        terminated: Termination::LifespanEnd,
        stored: 0,
    };
    let sample = |state: &SwimmerState<T>, c: T, action: usize| TrajectorySample {
        time: state.time,
        position: state.position,
        kappa: state.curvature,
        speed: state.speed,
        c,
        action,
    };

    let mut ticks: u64 = 0;
    let mut last_c = c_start;
    for counter in 0usize.. {
        let decision = match policy {
            Policy::QNet { net, epsilon } => {
                let q = net.forward(&input)?;
                policies::epsilon_greedy(&q, epsilon, explore_rng)
            }
            Policy::Greedy => {
                let kappa = policies::greedy_strategy(&history, actions, state.curvature);
                PolicyDecision::deterministic(actions.index_of(kappa).expect("legal curvature"))
            }
            Policy::Swinging => {
                let kappa = policies::swinging_pattern(counter, config.n_t, actions)?;
                PolicyDecision::deterministic(actions.index_of(kappa).expect("legal curvature"))
            }
        };
        state.steer(actions, actions.kappa_for(decision.action));
        result.centerline.push(state.curvature_center());
        result.actions.push(ActionRecord {
            tick: ticks,
            time: state.time,
            decision,
        });
        if counter == 0 || config.recording == Recording::Actions {
            result.trajectory.push(sample(&state, last_c, decision.action));
        }

        let steps = config.interval_steps(state.speed)?;
        let mut completed = 0;
        while completed < steps && ticks < life_ticks {
            let flow = config.flow.at(state.position);
            state = state.step(&flow, dt);
            ticks += 1;
            state.time = T::from_u64(ticks).expect("tick count") * dt;
            completed += 1;
            if !state.is_finite() {
                return Err(Error::Episode {
                    time: state.time.as_f64(),
                    reason: "swimmer state is not finite".into(),
                });
            }
            if config.recording == Recording::Steps {
                let c = config.field.at(state.position);
                result.trajectory.push(sample(&state, c, decision.action));
            }
            if let Some(r) = config.source_radius {
                if state.position.norm() < r {
                    result.terminated = Termination::ReachedSource;
                    break;
                }
            }
        }

        let record = config.sense(&state);
        last_c = record.c;
        if completed == steps {
            let reward = encoder.reward(record.c, &history);
            history.push(record);
            let next = encoder.encode(&history);
            if let (Some(buf), Policy::QNet { .. }) = (buffer.as_deref_mut(), policy) {
                buf.push(Experience {
                    state: std::mem::take(&mut input),
                    action: decision.action,
                    reward,
                    next_state: next.clone(),
                });
                result.stored += 1;
            }
            input = next;
        } else {
            history.push(record);
            input = encoder.encode(&history);
        }

        if result.terminated == Termination::ReachedSource || ticks >= life_ticks {
            break;
        }
    }

    if config.recording == Recording::Actions {
        let action = result.actions.last().map(|a| a.decision.action).unwrap_or(0);
        result.trajectory.push(sample(&state, last_c, action));
    }
    result.gain = last_c - c_start;
    Ok(result)
}

/// Annealing and optimizer settings for [`train_agent`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainingSchedule {
    pub epochs: usize,
    pub epsilon_start: f64,
    pub epsilon_floor: f64,
    /// Multiplicative ε decay per epoch.
    pub epsilon_decay: f64,
    pub learning_rate: f64,
    /// The learning rate is multiplied by this once, at `lr_decay_epoch`.
    pub learning_rate_decay: f64,
    pub lr_decay_epoch: usize,
    pub gamma: f64,
    pub hidden_layers: usize,
    pub hidden_nodes: usize,
    pub buffer_capacity: usize,
    pub batch_size: usize,
    pub updates_per_epoch: usize,
}

impl TrainingSchedule {
    /// Defaults; the flow variant uses wider layers, more epochs, and slower annealing.
    pub fn standard(taylor_green: bool) -> Self {
        let epochs = if taylor_green { params::EPOCHS_FLOW } else { params::EPOCHS };
        TrainingSchedule {
            epochs,
            epsilon_start: params::EPSILON_START,
            epsilon_floor: params::EPSILON_FLOOR,
            epsilon_decay: if taylor_green {
                params::EPSILON_DECAY_FLOW
            } else {
                params::EPSILON_DECAY
            },
            learning_rate: params::LEARNING_RATE,
            learning_rate_decay: params::LEARNING_RATE_DECAY,
            lr_decay_epoch: epochs / 2,
            gamma: params::GAMMA,
            hidden_layers: params::HIDDEN_LAYERS,
            hidden_nodes: if taylor_green {
                params::HIDDEN_NODES_FLOW
            } else {
                params::HIDDEN_NODES
            },
            buffer_capacity: params::BUFFER_CAPACITY,
            batch_size: params::BATCH_SIZE,
            updates_per_epoch: params::UPDATES_PER_EPOCH,
        }
    }

    /// Sets the epoch count and moves the learning-rate step to its midpoint.
    pub fn with_epochs(mut self, epochs: usize) -> Self {
        self.epochs = epochs;
        self.lr_decay_epoch = epochs / 2;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::config("nothing to train: epochs is 0"));
        }
        if !(self.epsilon_start >= self.epsilon_floor
            && self.epsilon_floor >= 0.0
            && self.epsilon_start <= 1.0)
        {
            return Err(Error::config("epsilon must satisfy 0 <= floor <= start <= 1"));
        }
        if !(self.epsilon_decay > 0.0 && self.epsilon_decay < 1.0) {
            return Err(Error::config("epsilon decay must lie in (0, 1)"));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate_decay > 0.0) {
            return Err(Error::config("learning rate and its decay must be positive"));
        }
        if !(0.0..1.0).contains(&self.gamma) {
            return Err(Error::config("discount must lie in [0, 1)"));
        }
        if self.hidden_nodes == 0 || self.batch_size == 0 || self.buffer_capacity < self.batch_size {
            return Err(Error::config(
                "hidden nodes and batch size must be positive and fit in the buffer",
            ));
        }
        Ok(())
    }

    pub fn layer_sizes(&self, input_dim: usize) -> Vec<usize> {
        std::iter::once(input_dim)
            .chain(std::iter::repeat(self.hidden_nodes).take(self.hidden_layers))
            .chain(std::iter::once(2))
            .collect()
    }

    /// ε in effect during `epoch` (zero-based).
    pub fn epsilon_at(&self, epoch: usize) -> f64 {
        let mut eps = self.epsilon_start;
        for _ in 0..epoch {
            eps = (eps * self.epsilon_decay).max(self.epsilon_floor);
        }
        eps
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    pub epoch: usize,
    pub gain: f64,
    /// Mean pre-step loss over the epoch's updates; `None` while the buffer warms up.
    pub mean_loss: Option<f64>,
    /// ε used during the epoch's episode.
    pub epsilon: f64,
}

#[derive(Debug, Clone)]
pub struct TrainingOutcome<T> {
    pub network: QNetwork<T>,
    pub curve: Vec<EpochStats>,
    /// ε after the last epoch's decay.
    pub final_epsilon: f64,
}

pub fn train_agent<T: Scalar>(
    schedule: &TrainingSchedule,
    config: &EpisodeConfig<T>,
    seed: u64,
) -> Result<TrainingOutcome<T>> {
    train_agent_with(schedule, config, seed, |_| {})
}

/// Trains a fresh network, calling `on_epoch` after every epoch.
///
/// Each epoch runs one exploring episode into the replay buffer, then
/// performs the scheduled minibatch updates. Errors carry the epoch index.
pub fn train_agent_with<T: Scalar>(
    schedule: &TrainingSchedule,
    config: &EpisodeConfig<T>,
    seed: u64,
    mut on_epoch: impl FnMut(&EpochStats),
) -> Result<TrainingOutcome<T>> {
    schedule.validate()?;
    config.validate()?;
    if config.source_radius.is_some() {
        return Err(Error::config("training episodes must run to the end of their lifespan"));
    }
    let mut init_rng = stream_rng(seed, Stream::Init, TRAINING_INDEX);
    let mut spawn_rng = stream_rng(seed, Stream::Spawn, TRAINING_INDEX);
    let mut explore_rng = stream_rng(seed, Stream::Exploration, TRAINING_INDEX);
    let mut sample_rng = stream_rng(seed, Stream::Sampling, TRAINING_INDEX);

    let net = QNetwork::glorot(&schedule.layer_sizes(config.input_dim()), &mut init_rng)?;
    let mut learner = Learner::new(net, T::lit(schedule.learning_rate), T::lit(schedule.gamma))?;
    let mut buffer = ReplayBuffer::new(schedule.buffer_capacity);
    let mut epsilon = schedule.epsilon_start;
    let mut curve = Vec::with_capacity(schedule.epochs);

    let at_epoch = |epoch: usize, e: Error| match e {
        Error::Training(msg) => Error::Training(format!("epoch {epoch}: {msg}")),
        Error::Episode { time, reason } => Error::Episode {
            time,
            reason: format!("epoch {epoch}: {reason}"),
        },
        other => other,
    };

    for epoch in 0..schedule.epochs {
        if epoch == schedule.lr_decay_epoch && epoch > 0 {
            let lr = learner.optimizer_mut().learning_rate() * T::lit(schedule.learning_rate_decay);
            learner.optimizer_mut().set_learning_rate(lr);
        }
        let episode = run_episode(
            config,
            Policy::QNet {
                net: learner.network(),
                epsilon,
            },
            Some(&mut buffer),
            &mut spawn_rng,
            &mut explore_rng,
        )
        .map_err(|e| at_epoch(epoch, e))?;

        let mut loss_sum = 0.0;
        let mut updates = 0usize;
        for _ in 0..schedule.updates_per_epoch {
            let Some(batch) = buffer.sample(schedule.batch_size, &mut sample_rng) else {
                break;
            };
            loss_sum += learner
                .train_minibatch(&batch)
                .map_err(|e| at_epoch(epoch, e))?
                .as_f64();
            updates += 1;
        }

        let stats = EpochStats {
            epoch,
            gain: episode.gain.as_f64(),
            mean_loss: (updates > 0).then(|| loss_sum / updates as f64),
            epsilon,
        };
        on_epoch(&stats);
        curve.push(stats);
        epsilon = (epsilon * schedule.epsilon_decay).max(schedule.epsilon_floor);
    }

    Ok(TrainingOutcome {
        network: learner.into_network(),
        curve,
        final_epsilon: epsilon,
    })
}

#[derive(Debug, Clone)]
pub struct CohortResult<T> {
    /// One episode per cell, in cell order.
    pub episodes: Vec<EpisodeResult<T>>,
    pub gains: Vec<T>,
    pub mean: T,
    /// Unbiased sample variance of the gains.
    pub variance: T,
}

/// Runs `n_cells` independent pure-exploitation episodes.
///
/// Cell `i` draws its spawn from stream `(seed, Spawn, i)`, so cohorts run
/// with the same seed start from identical initial conditions whatever the
/// policy.
pub fn evaluate_cohort<T: Scalar>(
    config: &EpisodeConfig<T>,
    policy: Policy<'_, T>,
    n_cells: usize,
    seed: u64,
) -> Result<CohortResult<T>> {
    config.validate()?;
    let policy = match policy {
        Policy::QNet { net, .. } => Policy::QNet { net, epsilon: 0.0 },
        other => other,
    };
    let episodes = (0..n_cells)
        .into_par_iter()
        .map(|cell| {
            let mut spawn = stream_rng(seed, Stream::Spawn, cell as u64);
            let mut explore = stream_rng(seed, Stream::Exploration, cell as u64);
            run_episode(config, policy, None, &mut spawn, &mut explore)
        })
        .collect::<Result<Vec<_>>>()?;
    let gains: Vec<T> = episodes.iter().map(|e| e.gain).collect();
    Ok(CohortResult {
        mean: analysis::mean(&gains),
        variance: analysis::variance(&gains),
        gains,
        episodes,
    })
}
