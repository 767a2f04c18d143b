//! CSV writers. Floating-point values carry 17 significant digits.

use std::fs;
use std::path::{Path, PathBuf};

use chemotaxis::{CohortResult, EpisodeResult, EpochStats, Point};

use crate::CliError;

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| io_err(path, e))
}

fn write_rows<I>(path: &Path, header: &[&str], rows: I) -> Result<(), CliError>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::Writer::from_path(path).map_err(|e| io_err(path, e))?;
    w.write_record(header).map_err(|e| io_err(path, e))?;
    for row in rows {
        w.write_record(&row).map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

pub fn write_training_curve(path: &Path, curve: &[EpochStats]) -> Result<(), CliError> {
    write_rows(
        path,
        &["epoch", "gain", "mean_loss", "epsilon"],
        curve.iter().map(|s| {
            vec![
                s.epoch.to_string(),
                num(s.gain),
                s.mean_loss.map(num).unwrap_or_default(),
                num(s.epsilon),
            ]
        }),
    )
}

pub fn write_trajectory(path: &Path, episode: &EpisodeResult<f64>) -> Result<(), CliError> {
    write_rows(
        path,
        &["t", "x", "y", "kappa", "v", "c", "action"],
        episode.trajectory.iter().map(|p| {
            vec![
                num(p.time),
                num(p.position.x),
                num(p.position.y),
                num(p.kappa),
                num(p.speed),
                num(p.c),
                p.action.to_string(),
            ]
        }),
    )
}

pub fn write_centerline(path: &Path, episode: &EpisodeResult<f64>) -> Result<(), CliError> {
    write_rows(
        path,
        &["t", "x", "y"],
        episode
            .actions
            .iter()
            .zip(&episode.centerline)
            .map(|(a, p): (_, &Point)| vec![num(a.time), num(p.x), num(p.y)]),
    )
}

/// `cell,gain` rows followed by `mean` and `variance` footer rows.
pub fn write_summary(path: &Path, cohort: &CohortResult<f64>) -> Result<(), CliError> {
    let rows = cohort
        .gains
        .iter()
        .enumerate()
        .map(|(i, &g)| vec![i.to_string(), num(g)])
        .chain([
            vec!["mean".to_owned(), num(cohort.mean)],
            vec!["variance".to_owned(), num(cohort.variance)],
        ]);
    write_rows(path, &["cell", "gain"], rows)
}

/// Per-cell paired gains, one column per policy, with `mean` and `variance` footers.
pub fn write_comparison(
    path: &Path,
    columns: &[(String, &CohortResult<f64>)],
) -> Result<(), CliError> {
    let header: Vec<&str> = std::iter::once("cell")
        .chain(columns.iter().map(|(name, _)| name.as_str()))
        .collect();
    let cells = columns.first().map_or(0, |(_, c)| c.gains.len());
    let rows = (0..cells)
        .map(|i| {
            std::iter::once(i.to_string())
                .chain(columns.iter().map(|(_, c)| num(c.gains[i])))
                .collect()
        })
        .chain([
            std::iter::once("mean".to_owned())
                .chain(columns.iter().map(|(_, c)| num(c.mean)))
                .collect(),
            std::iter::once("variance".to_owned())
                .chain(columns.iter().map(|(_, c)| num(c.variance)))
                .collect(),
        ]);
    write_rows(path, &header, rows)
}

/// Writes trajectory and centerline files for every cell in `cohort`.
pub fn write_cells(dir: &Path, cohort: &CohortResult<f64>) -> Result<Vec<PathBuf>, CliError> {
    let mut written = Vec::new();
    for (i, episode) in cohort.episodes.iter().enumerate() {
        let traj = dir.join(format!("cell_{i:03}_trajectory.csv"));
        let center = dir.join(format!("cell_{i:03}_centerline.csv"));
        write_trajectory(&traj, episode)?;
        write_centerline(&center, episode)?;
        written.extend([traj, center]);
    }
    Ok(written)
}
