//! Trains one agent and compares it against the greedy baseline.
//!
//! Usage: `cargo run --release --example compare -- [n_t] [seed] [epochs] [adaptive] [tg] [aware]`

use std::time::Instant;

use chemotaxis::{evaluate_cohort, train_agent, EpisodeConfig, Policy, Scenario, TrainingSchedule};

fn main() -> chemotaxis::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let num = |i: usize, default: u64| args.get(i).map_or(default, |a| a.parse().expect("integer argument"));
    let flag = |name: &str| args.iter().any(|a| a == name);
    let (n_t, seed, epochs) = (num(0, 4) as usize, num(1, 1), num(2, 1600) as usize);
    let taylor_green = flag("tg") || flag("aware");

    let scenario = Scenario {
        taylor_green,
        flow_aware: flag("aware"),
        adaptive_speed: flag("adaptive"),
        ..Scenario::linear(n_t)
    };
    let config = EpisodeConfig::<f64>::standard(scenario)?;
    let schedule = TrainingSchedule::standard(taylor_green).with_epochs(epochs);
    let start = Instant::now();
    let outcome = train_agent(&schedule, &config, seed)?;
    let tail = &outcome.curve[outcome.curve.len().saturating_sub(100)..];
    let tail_gain = tail.iter().map(|s| s.gain).sum::<f64>() / tail.len() as f64;
    println!("trained in {:.1?}; mean gain over last 100 epochs {tail_gain:.3}", start.elapsed());

    let test = config.with_t_life(if taylor_green { 400.0 } else { 200.0 });
    let drl = evaluate_cohort(&test, Policy::QNet { net: &outcome.network, epsilon: 0.0 }, 40, seed)?;
    let greedy = evaluate_cohort(&test, Policy::Greedy, 40, seed)?;
    println!("drl    mean {:8.3} var {:8.3}", drl.mean, drl.variance);
    println!("greedy mean {:8.3} var {:8.3}", greedy.mean, greedy.variance);
    Ok(())
}
