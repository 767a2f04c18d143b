//! Default model and training parameters.

use std::f64::consts::PI;

// Swimmer and environment.
pub const SPEED: f64 = 1.0;
pub const KAPPA1: f64 = 3.0;
pub const KAPPA2: f64 = 5.0;
/// Speed paired with κ₂ under adaptive speed.
pub const SPEED_KAPPA2: f64 = 0.9;
/// Speed paired with κ₁ under adaptive speed.
pub const SPEED_KAPPA1: f64 = 1.1;
pub const DT: f64 = 0.02;
pub const T_LIFE_TRAIN: f64 = 80.0;
pub const T_LIFE_TEST: f64 = 200.0;
pub const T_LIFE_TEST_FLOW: f64 = 400.0;
pub const LINEAR_GRADIENT: f64 = 1.0;
pub const LINEAR_OFFSET: f64 = 20.0;
pub const RADIAL_GRADIENT: f64 = 1.0;
pub const RADIAL_OFFSET: f64 = 100.0;
pub const TG_U0: f64 = 0.1;
pub const TG_K: f64 = PI / 10.0;

// Learning.
pub const LEARNING_RATE: f64 = 0.01;
pub const LEARNING_RATE_DECAY: f64 = 0.1;
pub const GAMMA: f64 = 0.98;
pub const EPSILON_START: f64 = 1.0;
pub const EPSILON_FLOOR: f64 = 0.1;
pub const HIDDEN_LAYERS: usize = 3;
pub const HIDDEN_NODES: usize = 24;
pub const HIDDEN_NODES_FLOW: usize = 36;
pub const EPOCHS: usize = 1600;
pub const EPOCHS_FLOW: usize = 6000;
pub const EPSILON_DECAY: f64 = 0.998;
pub const EPSILON_DECAY_FLOW: f64 = 0.9996;
pub const BUFFER_CAPACITY: usize = 50_000;
pub const BATCH_SIZE: usize = 32;
pub const UPDATES_PER_EPOCH: usize = 64;

// Episode layout.
/// Linear-field spawns are uniform over `[-L, L]²`.
pub const LINEAR_SPAWN_HALF_WIDTH: f64 = 10.0;
/// Radial-field spawns are uniform on a circle of this radius about the source.
pub const RADIAL_SPAWN_RADIUS: f64 = 20.0;
/// Radial episodes end once the swimmer is this close to the source.
pub const SOURCE_RADIUS: f64 = 0.5;
/// Hard time cap for radial episodes.
pub const RADIAL_TIME_CAP: f64 = 1000.0;
