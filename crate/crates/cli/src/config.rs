//! Run configuration: built-in defaults, a flat TOML file, and command-line flags.
//!
//! Precedence is flag > file > default. Every key is optional in the file;
//! unknown keys are rejected.

use std::path::{Path, PathBuf};

use chemotaxis::params;
use chemotaxis::{
    ActionSet, ConcentrationField, EpisodeConfig, FieldKind, FlowField, Recording, SpawnRegion,
    TrainingSchedule,
};
use clap::{Args, ValueEnum};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum PolicyChoice {
    Qnet,
    Greedy,
    Swinging,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum FlowChoice {
    None,
    Tg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum FieldChoice {
    Linear,
    Radial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RecordingChoice {
    Steps,
    Actions,
}

fn parse_window(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n @ (2 | 4 | 8)) => Ok(n),
        _ => Err(format!("N_T must be 2, 4, or 8, got {s}")),
    }
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// TOML configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Directory for all output files (created if missing).
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[arg(long)]
    pub epochs: Option<usize>,
    /// Perception window: 2, 4, or 8 records.
    #[arg(long, value_parser = parse_window)]
    pub n_t: Option<usize>,
    /// Episode lifespan in time units.
    #[arg(long)]
    pub t_life: Option<f64>,
    #[arg(long, value_enum)]
    pub policy: Option<PolicyChoice>,
    #[arg(long, value_enum)]
    pub flow: Option<FlowChoice>,
    /// Feed the sensed flow velocity and vorticity to the network.
    #[arg(long)]
    pub flow_aware: bool,
    /// Pair κ₁ with the faster speed and κ₂ with the slower one.
    #[arg(long)]
    pub adaptive_speed: bool,
    #[arg(long, value_enum)]
    pub field: Option<FieldChoice>,
    /// Number of evaluation cells.
    #[arg(long)]
    pub cells: Option<usize>,
    /// Network weight file(s).
    #[arg(long, num_args = 1..)]
    pub weights: Vec<PathBuf>,
}

/// Contents of a configuration file. Units follow the model: lengths and
/// times are dimensionless, curvatures are inverse lengths.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    pub n_t: Option<usize>,
    pub t_life: Option<f64>,
    pub policy: Option<PolicyChoice>,
    pub flow: Option<FlowChoice>,
    pub flow_aware: Option<bool>,
    pub adaptive_speed: Option<bool>,
    pub field: Option<FieldChoice>,
    pub cells: Option<usize>,
    pub weights: Option<Vec<PathBuf>>,
    pub recording: Option<RecordingChoice>,

    pub speed: Option<f64>,
    pub kappa1: Option<f64>,
    pub kappa2: Option<f64>,
    /// Adaptive speed paired with κ₁.
    pub speed1: Option<f64>,
    /// Adaptive speed paired with κ₂.
    pub speed2: Option<f64>,
    pub dt: Option<f64>,
    pub linear_gradient: Option<f64>,
    pub linear_offset: Option<f64>,
    pub radial_gradient: Option<f64>,
    pub radial_offset: Option<f64>,
    pub tg_u0: Option<f64>,
    pub tg_k: Option<f64>,

    pub epochs: Option<usize>,
    pub learning_rate: Option<f64>,
    pub learning_rate_decay: Option<f64>,
    pub gamma: Option<f64>,
    pub epsilon_start: Option<f64>,
    pub epsilon_floor: Option<f64>,
    pub epsilon_decay: Option<f64>,
    pub hidden_layers: Option<usize>,
    pub hidden_nodes: Option<usize>,
    pub buffer_capacity: Option<usize>,
    pub batch_size: Option<usize>,
    pub updates_per_epoch: Option<usize>,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(format!("invalid configuration: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }
}

/// Fully resolved settings for one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub out_dir: PathBuf,
    pub n_t: usize,
    /// `None` picks the phase default: training, test, flow test, or radial cap.
    pub t_life: Option<f64>,
    /// `None` lets the subcommand choose.
    pub policy: Option<PolicyChoice>,
    pub flow: FlowChoice,
    pub flow_aware: bool,
    pub adaptive_speed: bool,
    pub field: FieldChoice,
    pub cells: usize,
    pub weights: Vec<PathBuf>,
    pub recording: Recording,

    pub speed: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub speed1: f64,
    pub speed2: f64,
    pub dt: f64,
    pub linear_gradient: f64,
    pub linear_offset: f64,
    pub radial_gradient: f64,
    pub radial_offset: f64,
    pub tg_u0: f64,
    pub tg_k: f64,

    pub schedule: TrainingSchedule,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Train,
    Test,
}

impl RunConfig {
    /// Resolves `flags` over the file they name (if any) over the defaults.
    pub fn from_flags(flags: &Overrides) -> Result<Self, CliError> {
        let file = match &flags.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        Self::resolve(&file, flags)
    }

    pub fn resolve(file: &FileConfig, flags: &Overrides) -> Result<Self, CliError> {
        let flow = flags.flow.or(file.flow).unwrap_or(FlowChoice::None);
        let tg = flow == FlowChoice::Tg;
        let base = TrainingSchedule::standard(tg);
        let epochs = flags.epochs.or(file.epochs).unwrap_or(base.epochs);
        let schedule = TrainingSchedule {
            epsilon_start: file.epsilon_start.unwrap_or(base.epsilon_start),
            epsilon_floor: file.epsilon_floor.unwrap_or(base.epsilon_floor),
            epsilon_decay: file.epsilon_decay.unwrap_or(base.epsilon_decay),
            learning_rate: file.learning_rate.unwrap_or(base.learning_rate),
            learning_rate_decay: file.learning_rate_decay.unwrap_or(base.learning_rate_decay),
            gamma: file.gamma.unwrap_or(base.gamma),
            hidden_layers: file.hidden_layers.unwrap_or(base.hidden_layers),
            hidden_nodes: file.hidden_nodes.unwrap_or(base.hidden_nodes),
            buffer_capacity: file.buffer_capacity.unwrap_or(base.buffer_capacity),
            batch_size: file.batch_size.unwrap_or(base.batch_size),
            updates_per_epoch: file.updates_per_epoch.unwrap_or(base.updates_per_epoch),
            ..base
        }
        .with_epochs(epochs);

        let config = RunConfig {
            seed: flags.seed.or(file.seed).unwrap_or(0),
            out_dir: flags
                .out_dir
                .clone()
                .or_else(|| file.out_dir.clone())
                .unwrap_or_else(|| PathBuf::from(".")),
            n_t: flags.n_t.or(file.n_t).unwrap_or(4),
            t_life: flags.t_life.or(file.t_life),
            policy: flags.policy.or(file.policy),
            flow,
            flow_aware: flags.flow_aware || file.flow_aware.unwrap_or(false),
            adaptive_speed: flags.adaptive_speed || file.adaptive_speed.unwrap_or(false),
            field: flags.field.or(file.field).unwrap_or(FieldChoice::Linear),
            cells: flags.cells.or(file.cells).unwrap_or(40),
            weights: if flags.weights.is_empty() {
                file.weights.clone().unwrap_or_default()
            } else {
                flags.weights.clone()
            },
            recording: match file.recording.unwrap_or(RecordingChoice::Steps) {
                RecordingChoice::Steps => Recording::Steps,
                RecordingChoice::Actions => Recording::Actions,
            },
            speed: file.speed.unwrap_or(params::SPEED),
            kappa1: file.kappa1.unwrap_or(params::KAPPA1),
            kappa2: file.kappa2.unwrap_or(params::KAPPA2),
            speed1: file.speed1.unwrap_or(params::SPEED_KAPPA1),
            speed2: file.speed2.unwrap_or(params::SPEED_KAPPA2),
            dt: file.dt.unwrap_or(params::DT),
            linear_gradient: file.linear_gradient.unwrap_or(params::LINEAR_GRADIENT),
            linear_offset: file.linear_offset.unwrap_or(params::LINEAR_OFFSET),
            radial_gradient: file.radial_gradient.unwrap_or(params::RADIAL_GRADIENT),
            radial_offset: file.radial_offset.unwrap_or(params::RADIAL_OFFSET),
            tg_u0: file.tg_u0.unwrap_or(params::TG_U0),
            tg_k: file.tg_k.unwrap_or(params::TG_K),
            schedule,
        };
        config.check()?;
        Ok(config)
    }

    fn check(&self) -> Result<(), CliError> {
        let bad = |key: &str, why: &str| Err(CliError::Config(format!("{key}: {why}")));
        if ![2, 4, 8].contains(&self.n_t) {
            return bad("n_t", &format!("must be 2, 4, or 8, got {}", self.n_t));
        }
        for (key, v) in [
            ("speed", self.speed),
            ("kappa1", self.kappa1),
            ("kappa2", self.kappa2),
            ("speed1", self.speed1),
            ("speed2", self.speed2),
            ("dt", self.dt),
            ("linear_gradient", self.linear_gradient),
            ("radial_gradient", self.radial_gradient),
            ("tg_u0", self.tg_u0),
            ("tg_k", self.tg_k),
            ("learning_rate", self.schedule.learning_rate),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(key, &format!("must be positive, got {v}"));
            }
        }
        if let Some(t) = self.t_life {
            if !(t > 0.0 && t.is_finite()) {
                return bad("t_life", &format!("must be positive, got {t}"));
            }
        }
        if self.kappa1 >= self.kappa2 {
            return bad("kappa1", "must be smaller than kappa2");
        }
        if self.flow_aware && self.flow != FlowChoice::Tg {
            return bad("flow_aware", "requires flow = \"tg\"");
        }
        if self.cells == 0 {
            return bad("cells", "must be at least 1");
        }
        Ok(())
    }

    /// Environment for `phase`, with the phase's default lifespan unless one was set.
    pub fn episode(&self, phase: Phase) -> Result<EpisodeConfig<f64>, CliError> {
        let actions = if self.adaptive_speed {
            ActionSet::adaptive_speed(self.kappa1, self.kappa2, self.speed1, self.speed2)
        } else {
            ActionSet::constant_speed(self.kappa1, self.kappa2, self.speed)
        }?;
        let flow = match self.flow {
            FlowChoice::None => FlowField::None,
            FlowChoice::Tg => FlowField::taylor_green(self.tg_u0, self.tg_k)?,
        };
        let (kind, field, norm_gradient, source_radius) = match self.field {
            FieldChoice::Linear => (
                FieldKind::Linear,
                ConcentrationField::linear(self.linear_gradient, self.linear_offset)?,
                self.linear_gradient,
                None,
            ),
            FieldChoice::Radial => (
                FieldKind::Radial,
                ConcentrationField::radial(self.radial_gradient, self.radial_offset)?,
                self.radial_gradient,
                Some(params::SOURCE_RADIUS),
            ),
        };
        let default_life = match (phase, self.field, self.flow) {
            (_, FieldChoice::Radial, _) => params::RADIAL_TIME_CAP,
            (Phase::Train, ..) => params::T_LIFE_TRAIN,
            (Phase::Test, _, FlowChoice::Tg) => params::T_LIFE_TEST_FLOW,
            (Phase::Test, _, FlowChoice::None) => params::T_LIFE_TEST,
        };
        let config = EpisodeConfig {
            n_t: self.n_t,
            dt: self.dt,
            t_life: self.t_life.unwrap_or(default_life),
            field,
            flow,
            flow_aware: self.flow_aware,
            actions,
            spawn: SpawnRegion::standard(kind, &flow),
            norm_gradient,
            source_radius,
            recording: self.recording,
        };
        config.validate()?;
        Ok(config)
    }
}
