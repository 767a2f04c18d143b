//! Self-learned chemotaxis of a curvature-steered planar swimmer.
//!
//! The swimmer moves on circular arcs whose curvature it switches between two
//! values. A deep Q-network, trained from experience replay, decides when to
//! switch based on a short history of sensed concentrations. Analytic
//! baselines (greedy and open-loop swinging) and cohort evaluation harnesses
//! for linear and radial fields, with or without a Taylor–Green background
//! flow, are included.
//!
//! Every numeric type is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix it to `f64`, which is what the command-line tool uses.

pub mod analysis;
pub mod environment;
pub mod episodes;
pub mod error;
pub mod geometry;
pub mod params;
pub mod perception;
pub mod policies;
pub mod qnet;
pub mod rng;
pub mod scalar;

pub use environment::{ConcentrationField, FieldKind, FlowField, FlowSample};
pub use episodes::{
    evaluate_cohort, run_episode, train_agent, train_agent_with, CohortResult, EpisodeConfig,
    EpisodeResult, EpochStats, Policy, PolicyKind, Recording, Scenario, SpawnRegion, Termination,
    TrainingOutcome, TrainingSchedule,
};
pub use error::{Error, Result};
pub use geometry::{ActionSet, SwimmerState, Vec2};
pub use perception::{InputEncoder, InputLayout, PerceptionHistory, PerceptionRecord};
pub use policies::PolicyDecision;
pub use qnet::{load_network, save_network, Experience, Learner, QNetwork, ReplayBuffer};
pub use scalar::Scalar;

pub type Point = Vec2<f64>;
pub type Swimmer = SwimmerState<f64>;
pub type Actions = ActionSet<f64>;
pub type Field = ConcentrationField<f64>;
pub type Flow = FlowField<f64>;
pub type History = PerceptionHistory<f64>;
pub type Network = QNetwork<f64>;
pub type Buffer = ReplayBuffer<f64>;
pub type Config = EpisodeConfig<f64>;
pub type Episode = EpisodeResult<f64>;
pub type Cohort = CohortResult<f64>;
