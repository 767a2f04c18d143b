use std::path::Path;

use chemotaxis::{
    evaluate_cohort, load_network, save_network, train_agent_with, CohortResult, EpisodeConfig,
    FlowField, Network, Policy,
};

use crate::config::{Phase, PolicyChoice, RunConfig};
use crate::output;
use crate::CliError;

fn load_weights(path: &Path) -> Result<Network, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read weights {}: {e}", path.display())))?;
    load_network(&text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn check_input_dim(net: &Network, episode: &EpisodeConfig<f64>, path: &Path) -> Result<(), CliError> {
    if net.input_dim() != episode.input_dim() {
        return Err(CliError::Config(format!(
            "{}: network input dimension is {}, but the configuration expects {} \
             (N_T = {}, flow-aware = {})",
            path.display(),
            net.input_dim(),
            episode.input_dim(),
            episode.n_t,
            episode.flow_aware
        )));
    }
    Ok(())
}

pub fn train(cfg: &RunConfig) -> Result<(), CliError> {
    let episode = cfg.episode(Phase::Train)?;
    cfg.schedule.validate()?;
    output::ensure_dir(&cfg.out_dir)?;
    let report_every = (cfg.schedule.epochs / 20).max(1);
    let outcome = train_agent_with(&cfg.schedule, &episode, cfg.seed, |s| {
        if (s.epoch + 1) % report_every == 0 {
            eprintln!(
                "[train] epoch {:>5}  gain {:>9.3}  epsilon {:.4}",
                s.epoch + 1,
                s.gain,
                s.epsilon
            );
        }
    })?;

    let weights = cfg.out_dir.join("weights.json");
    let curve = cfg.out_dir.join("training_curve.csv");
    output::write_text(&weights, &save_network(&outcome.network))?;
    output::write_training_curve(&curve, &outcome.curve)?;

    let tail = &outcome.curve[outcome.curve.len().saturating_sub(100)..];
    let tail_mean = tail.iter().map(|s| s.gain).sum::<f64>() / tail.len() as f64;
    println!(
        "trained {} epochs, layers {:?}; mean gain over the last {} epochs {:.6}; final epsilon {:.6}",
        outcome.curve.len(),
        outcome.network.layer_sizes(),
        tail.len(),
        tail_mean,
        outcome.final_epsilon
    );
    println!("wrote {} and {}", weights.display(), curve.display());
    Ok(())
}

fn run_cohort(cfg: &RunConfig, choice: PolicyChoice) -> Result<CohortResult<f64>, CliError> {
    let episode = cfg.episode(Phase::Test)?;
    let cohort = match choice {
        PolicyChoice::Qnet => {
            let [path] = cfg.weights.as_slice() else {
                return Err(CliError::Config(
                    "the qnet policy needs exactly one --weights file".into(),
                ));
            };
            let net = load_weights(path)?;
            check_input_dim(&net, &episode, path)?;
            evaluate_cohort(&episode, Policy::QNet { net: &net, epsilon: 0.0 }, cfg.cells, cfg.seed)?
        }
        PolicyChoice::Greedy => evaluate_cohort(&episode, Policy::Greedy, cfg.cells, cfg.seed)?,
        PolicyChoice::Swinging => evaluate_cohort(&episode, Policy::Swinging, cfg.cells, cfg.seed)?,
    };
    Ok(cohort)
}

fn write_cohort(cfg: &RunConfig, cohort: &CohortResult<f64>, label: &str) -> Result<(), CliError> {
    output::ensure_dir(&cfg.out_dir)?;
    output::write_cells(&cfg.out_dir, cohort)?;
    let summary = cfg.out_dir.join("summary.csv");
    output::write_summary(&summary, cohort)?;
    let reached = cohort
        .episodes
        .iter()
        .filter(|e| e.terminated == chemotaxis::Termination::ReachedSource)
        .count();
    println!(
        "{label}: {} cells, mean gain {:.6}, variance {:.6}",
        cohort.gains.len(),
        cohort.mean,
        cohort.variance
    );
    if cfg.episode(Phase::Test)?.source_radius.is_some() {
        println!("{reached} of {} cells reached the source", cohort.gains.len());
    }
    println!("wrote {} and per-cell trajectories in {}", summary.display(), cfg.out_dir.display());
    Ok(())
}

pub fn evaluate(cfg: &RunConfig) -> Result<(), CliError> {
    let choice = cfg.policy.unwrap_or(PolicyChoice::Qnet);
    let cohort = run_cohort(cfg, choice)?;
    write_cohort(cfg, &cohort, &format!("{choice:?}").to_lowercase())
}

pub fn baseline(cfg: &RunConfig) -> Result<(), CliError> {
    let choice = cfg.policy.unwrap_or(PolicyChoice::Greedy);
    if choice == PolicyChoice::Qnet {
        return Err(CliError::Config(
            "baseline runs greedy or swinging; use `evaluate` for a network".into(),
        ));
    }
    let cohort = run_cohort(cfg, choice)?;
    write_cohort(cfg, &cohort, &format!("{choice:?}").to_lowercase())
}

/// Runs every network plus both baselines on paired spawns.
///
/// In a Taylor–Green flow, each network is run with whichever input layout
/// (flow-aware or flow-blind) matches its input dimension, so the two kinds
/// of agent can be compared side by side.
pub fn compare(cfg: &RunConfig) -> Result<(), CliError> {
    if cfg.weights.is_empty() {
        return Err(CliError::Config("compare needs at least one --weights file".into()));
    }
    let episode = cfg.episode(Phase::Test)?;
    let mut cohorts = Vec::new();
    for (i, path) in cfg.weights.iter().enumerate() {
        let net = load_weights(path)?;
        let mut config = episode;
        if !matches!(config.flow, FlowField::None) {
            for aware in [false, true] {
                let candidate = EpisodeConfig { flow_aware: aware, ..config };
                if candidate.input_dim() == net.input_dim() {
                    config = candidate;
                }
            }
        }
        check_input_dim(&net, &config, path)?;
        let cohort =
            evaluate_cohort(&config, Policy::QNet { net: &net, epsilon: 0.0 }, cfg.cells, cfg.seed)?;
        let name = if cfg.weights.len() == 1 {
            "qnet".to_owned()
        } else {
            format!("qnet_{}", i + 1)
        };
        cohorts.push((name, cohort));
    }
    cohorts.push((
        "greedy".to_owned(),
        evaluate_cohort(&episode, Policy::Greedy, cfg.cells, cfg.seed)?,
    ));
    cohorts.push((
        "swinging".to_owned(),
        evaluate_cohort(&episode, Policy::Swinging, cfg.cells, cfg.seed)?,
    ));

    let columns: Vec<(String, &CohortResult<f64>)> =
        cohorts.iter().map(|(n, c)| (n.clone(), c)).collect();
    output::ensure_dir(&cfg.out_dir)?;
    let path = cfg.out_dir.join("comparison.csv");
    output::write_comparison(&path, &columns)?;

    print!("{:>8}", "cell");
    for (name, _) in &columns {
        print!(" {name:>14}");
    }
    println!();
    for cell in 0..cfg.cells {
        print!("{cell:>8}");
        for (_, c) in &columns {
            print!(" {:>14.6}", c.gains[cell]);
        }
        println!();
    }
    for (label, pick) in [
        ("mean", (|c: &CohortResult<f64>| c.mean) as fn(&CohortResult<f64>) -> f64),
        ("variance", |c| c.variance),
    ] {
        print!("{label:>8}");
        for (_, c) in &columns {
            print!(" {:>14.6}", pick(c));
        }
        println!();
    }
    for (i, path) in cfg.weights.iter().enumerate() {
        println!("{} = {}", columns[i].0, path.display());
    }
    println!("wrote {}", path.display());
    Ok(())
}
