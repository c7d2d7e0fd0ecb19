//! The run, sweep and spectrum commands: configs in, files out.

use crate::config::{ConfigError, ObserverKind, RunConfig, WidthComponent};
use eqwalk::observe::{detect_periods, Period};
use eqwalk::spectrum::{
    dispersion_1d, dispersion_alternate, dispersion_dft, dispersion_grover, dispersion_hadamard2,
    eigenphases, fold, momentum_unitary, phase_set_distance, product_unitary,
    stroboscopic_dispersion_alternate, uniform_axis, Axis, BandGrid,
};
use eqwalk::{FieldPhase, Walk, WalkError, WalkSpec, WalkState, Walker, WidthSeries};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;
use std::fmt;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

/// A failed command and its exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad config, preset or file system trouble: exit 2.
    Config(String),
    /// The numerics gave up (boundary contact, root finding): exit 3.
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) | CliError::Numerical(m) => f.write_str(m),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.0)
    }
}

impl From<WalkError> for CliError {
    fn from(e: WalkError) -> Self {
        match e {
            WalkError::BoundaryContact { .. }
            | WalkError::RootCount { .. }
            | WalkError::Eigen
            | WalkError::Checkerboard => CliError::Numerical(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Config(format!("{}: {e}", path.display()))
}

/// Collects the files of one run and writes them into its directory.
struct Outputs {
    dir: PathBuf,
    files: Vec<String>,
}

impl Outputs {
    fn create(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
        Ok(Outputs {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    fn write(
        &mut self,
        name: &str,
        fill: impl FnOnce(&mut dyn Write) -> std::io::Result<()>,
    ) -> Result<(), CliError> {
        let path = self.dir.join(name);
        let file = fs::File::create(&path).map_err(|e| io_error(&path, e))?;
        let mut out = BufWriter::new(file);
        fill(&mut out)
            .and_then(|_| out.flush())
            .map_err(|e| io_error(&path, e))?;
        self.files.push(name.to_string());
        Ok(())
    }

    fn write_json(&mut self, name: &str, value: &impl Serialize) -> Result<(), CliError> {
        self.write(name, |out| {
            serde_json::to_writer_pretty(&mut *out, value)?;
            writeln!(out)
        })
    }
}

/// Everything needed to re-run a command; written next to its outputs.
#[derive(Debug, Serialize, serde::Deserialize)]
pub struct Manifest {
    pub version: String,
    pub command: String,
    pub config: RunConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec: Option<WalkSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub files: Vec<String>,
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: manifest error: {e}", path.display())))
    }
}

fn finish(
    mut out: Outputs,
    command: &str,
    config: &RunConfig,
    spec: Option<WalkSpec>,
    notes: Vec<String>,
) -> Result<Vec<String>, CliError> {
    let mut config = config.clone();
    config.output = None;
    let mut files = out.files.clone();
    files.push("manifest.json".into());
    let manifest = Manifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        command: command.to_string(),
        config,
        spec,
        notes,
        files: files.clone(),
    };
    out.write_json("manifest.json", &manifest)?;
    Ok(files)
}

#[derive(Serialize)]
struct PeriodEntry {
    series: WidthComponent,
    period: usize,
    score: f64,
}

fn component(widths: &WidthSeries, c: WidthComponent) -> Vec<f64> {
    match c {
        WidthComponent::SigmaX => widths.sigma_x(),
        WidthComponent::SigmaY => widths.sigma_y(),
        WidthComponent::SigmaD => widths.sigma_d(),
        WidthComponent::SigmaA => widths.sigma_a(),
    }
}

fn snapshot(state: &WalkState) -> Vec<u8> {
    let mut buf = Vec::new();
    state
        .write_marginal_csv(&mut buf)
        .expect("writing to memory");
    buf
}

/// Runs one config (no sweep) into `dir`; returns the files written and
/// the notes printed along the way.
pub fn run_one(config: &RunConfig, dir: &Path) -> RunOutcome {
    let resolved = config.resolve()?;
    let spec = resolved.spec;
    let mut notes = resolved.notes;
    let wants = |k: ObserverKind| config.observers.contains(&k);

    let mut walker = Walker::new(&spec)?;
    let mut widths = WidthSeries::default();
    let mut snapshots: Vec<(u64, Vec<u8>)> = Vec::new();
    let mut snapshot_times: Vec<u64> = config
        .snapshot_times
        .iter()
        .copied()
        .filter(|&t| t < spec.steps)
        .collect();
    snapshot_times.sort_unstable();
    snapshot_times.dedup();
    if let Some(&t) = config.snapshot_times.iter().find(|&&t| t > spec.steps) {
        notes.push(format!(
            "snapshot at t = {t} skipped: the run stops at t = {}",
            spec.steps
        ));
    }
    let record = |walker: &Walker,
                  widths: &mut WidthSeries,
                  snapshots: &mut Vec<(u64, Vec<u8>)>| {
        let state = walker.state();
        if wants(ObserverKind::Widths) || wants(ObserverKind::Periods) {
            widths.push(state.time(), eqwalk::observe::widths(state));
        }
        if wants(ObserverKind::Snapshot) && snapshot_times.binary_search(&state.time()).is_ok() {
            snapshots.push((state.time(), snapshot(state)));
        }
    };
    record(&walker, &mut widths, &mut snapshots);
    for _ in 0..spec.steps {
        walker.step()?;
        record(&walker, &mut widths, &mut snapshots);
    }
    let state = walker.into_state();

    let mut out = Outputs::create(dir)?;
    if wants(ObserverKind::Widths) {
        out.write("widths.csv", |w| widths.write_csv(w))?;
    }
    if wants(ObserverKind::Snapshot) {
        for (t, bytes) in &snapshots {
            out.write(&format!("snapshot_t{t}.csv"), |w| w.write_all(bytes))?;
        }
        out.write(&format!("snapshot_t{}.csv", spec.steps), |w| {
            state.write_marginal_csv(w)
        })?;
    }
    if wants(ObserverKind::Amplitudes) {
        out.write(&format!("amplitudes_t{}.csv", spec.steps), |w| {
            state.write_amplitudes_csv(w)
        })?;
    }
    if wants(ObserverKind::Periods) {
        // the t = 0 row is the localized start, not part of the dynamics
        let mut series = widths.clone();
        series.t.remove(0);
        series.widths.remove(0);
        let max_period = config.periods.max_period.unwrap_or(series.len() / 3);
        let mut found = Vec::new();
        let mut skipped = None;
        for &c in &config.periods.series {
            match detect_periods(&component(&series, c), max_period) {
                Ok(ps) => {
                    found.extend(ps.into_iter().map(|Period { period, score }| PeriodEntry {
                        series: c,
                        period,
                        score,
                    }))
                }
                Err(e @ WalkError::SeriesTooShort { .. }) => {
                    skipped = Some(e.to_string());
                    break;
                }
                Err(e) => return Err(e.into()),
            }
        }
        match skipped {
            Some(why) => notes.push(format!("periods.json skipped: {why}")),
            None => out.write_json("periods.json", &found)?,
        }
    }
    let files = finish(out, "run", config, Some(spec), notes.clone())?;
    Ok((files, notes))
}

/// One line per finished run, e.g. `fig2b -> out/fig2b (widths.csv, ...)`.
fn report(label: &str, dir: &Path, files: &[String], notes: &[String]) {
    for note in notes {
        println!("{label}: note: {note}");
    }
    println!("{label} -> {} ({})", dir.display(), files.join(", "));
}

pub fn run(config: &RunConfig, dir: &Path) -> Result<(), CliError> {
    if config.sweep.is_some() {
        return sweep(config, dir, None);
    }
    let (files, notes) = run_one(config, dir)?;
    report(config.name.as_deref().unwrap_or("run"), dir, &files, &notes);
    Ok(())
}

/// Every sweep entry in its own subdirectory, `workers` at a time.
pub fn sweep(config: &RunConfig, dir: &Path, workers: Option<usize>) -> Result<(), CliError> {
    let entries = config.sweep_entries()?;
    for (_, entry) in &entries {
        entry.resolve()?;
    }
    let workers = workers
        .or(config.sweep.as_ref().and_then(|s| s.workers))
        .unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Config(format!("worker pool: {e}")))?;
    let results: Vec<RunOutcome> = pool.install(|| {
        entries
            .par_iter()
            .map(|(label, entry)| run_one(entry, &dir.join(label)))
            .collect()
    });
    let name = config.name.as_deref().unwrap_or("sweep");
    let mut first_error = None;
    for ((label, _), result) in entries.iter().zip(results) {
        match result {
            Ok((files, notes)) => {
                report(&format!("{name}/{label}"), &dir.join(label), &files, &notes)
            }
            Err(e) => {
                eprintln!("{name}/{label}: error: {e}");
                first_error.get_or_insert(e);
            }
        }
    }
    first_error.map_or(Ok(()), Err)
}

#[derive(Serialize)]
struct OracleReport {
    points: usize,
    branches: usize,
    /// What the bands were computed from.
    method: String,
    /// Largest `|closed form - eigenphase|` over the grid; absent when the
    /// bands are the eigenphases themselves.
    max_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dft_fallback_points: Option<usize>,
}

/// The sheets of a walk at one k.
type Bands<'a> = dyn Fn(f64, f64) -> Result<Vec<f64>, WalkError> + Sync + 'a;
type ClosedForm = Box<Bands<'static>>;
/// Files written and notes printed by one run.
type RunOutcome = Result<(Vec<String>, Vec<String>), CliError>;

fn pair((w, m): (f64, f64)) -> Vec<f64> {
    vec![w, m]
}

fn closed_form(walk: &Walk, p: Option<u32>, axis: Axis) -> Option<(String, ClosedForm)> {
    match (walk.clone(), p) {
        (Walk::OneD { theta, alpha, beta }, None) if alpha == 0.0 && beta == 0.0 => Some((
            "1D dispersion cos w = cos(theta) cos(k)".into(),
            Box::new(move |k, _| Ok(pair(dispersion_1d(theta, k)))),
        )),
        (Walk::OneD { theta, alpha, beta }, Some(p)) if alpha == 0.0 && beta == 0.0 => Some((
            format!("1D effective dispersion, p = {p}"),
            Box::new(move |k, _| Ok(pair(eqwalk::spectrum::effective_dispersion_1d(theta, p, k)))),
        )),
        (
            Walk::Alternate2d {
                theta_x,
                theta_y,
                alpha,
                beta,
            },
            p,
        ) if alpha == 0.0 && beta == 0.0 => Some(match p {
            None => (
                "alternate dispersion".into(),
                Box::new(move |kx, ky| Ok(pair(dispersion_alternate(theta_x, theta_y, kx, ky)))),
            ),
            Some(p) => (
                format!(
                    "alternate stroboscopic dispersion, p = {p}, field along {}",
                    match axis {
                        Axis::X => "x",
                        Axis::Y => "y",
                    }
                ),
                Box::new(move |kx, ky| {
                    stroboscopic_dispersion_alternate(theta_x, theta_y, p, kx, ky, axis).map(pair)
                }),
            ),
        }),
        (Walk::Grover2d, None) => Some((
            "Grover sheets".into(),
            Box::new(|kx, ky| Ok(dispersion_grover(kx, ky).to_vec())),
        )),
        (Walk::Hadamard2d, None) => Some((
            "Hadamard sheets".into(),
            Box::new(|kx, ky| {
                let (w1, w2) = dispersion_hadamard2(kx, ky);
                Ok(vec![fold(w1), fold(-w1), fold(w2), fold(-w2)])
            }),
        )),
        (Walk::Dft2d, None) => Some((
            "DFT implicit dispersion roots".into(),
            Box::new(|kx, ky| dispersion_dft(kx, ky).map(|r| r.omega)),
        )),
        _ => None,
    }
}

/// Every k at which root finding fails, not just the first.
fn root_failures(points: &[(f64, f64)], bands_at: &Bands) -> CliError {
    let failures: Vec<String> = points
        .par_iter()
        .filter_map(|&(kx, ky)| match bands_at(kx, ky) {
            Err(WalkError::RootCount { found, .. }) => {
                Some(format!("({kx:.6}, {ky:.6}): {found} roots"))
            }
            _ => None,
        })
        .collect();
    let shown = &failures[..failures.len().min(10)];
    CliError::Numerical(format!(
        "DFT root finding failed at {} k-points: {}{}",
        failures.len(),
        shown.join("; "),
        if failures.len() > shown.len() {
            "; ..."
        } else {
            ""
        }
    ))
}

/// Bands of the walk on a `grid`-point (per axis) k-grid, with an oracle
/// report against the eigenphases of the momentum or product unitary.
pub fn spectrum(config: &RunConfig, dir: &Path) -> Result<(), CliError> {
    let resolved = config.resolve()?;
    let walk = resolved.spec.walk.clone();
    let sc = &config.spectrum;
    if sc.grid < 2 {
        return Err(CliError::Config("spectrum.grid must be at least 2".into()));
    }
    if sc.p == Some(0) {
        return Err(CliError::Config("spectrum.p must be positive".into()));
    }
    let mut notes = resolved.notes;
    if !resolved.spec.field_x.is_zero() || !resolved.spec.field_y.is_zero() {
        notes.push("spectrum ignores [field]; set spectrum.p for a field 2pi/p".into());
    }
    let field = match sc.p {
        Some(p) => FieldPhase::rational(1, p as u64)?,
        None => FieldPhase::ZERO,
    };
    let (fx, fy) = match sc.axis {
        Axis::X => (field, FieldPhase::ZERO),
        Axis::Y => (FieldPhase::ZERO, field),
    };
    if !walk.is_2d() && sc.axis == Axis::Y && sc.p.is_some() {
        return Err(CliError::Config("a 1D walk has no y axis".into()));
    }
    let steps = sc.p.unwrap_or(1) as u64;
    let oracle = |kx: f64, ky: f64| -> Result<Vec<f64>, WalkError> {
        let u = if sc.p.is_some() {
            product_unitary(&walk, &fx, &fy, steps, kx, ky)?
        } else {
            momentum_unitary(&walk, kx, ky)?
        };
        eigenphases(&u)
    };
    let ks = uniform_axis(-PI, PI, sc.grid);
    let points: Vec<(f64, f64)> = if walk.is_2d() {
        ks.iter()
            .flat_map(|&kx| ks.iter().map(move |&ky| (kx, ky)))
            .collect()
    } else {
        ks.iter().map(|&k| (k, 0.0)).collect()
    };
    let closed = closed_form(&walk, sc.p, sc.axis);
    let (method, bands_at): (String, &Bands<'_>) = match &closed {
        Some((name, f)) => (name.clone(), f.as_ref()),
        None => ("eigenphases of the momentum unitary".into(), &oracle),
    };

    let branches = walk.coin_dim();
    let sampled = if walk.is_2d() {
        BandGrid::sample_2d(ks.clone(), ks.clone(), branches, bands_at)
    } else {
        BandGrid::sample_1d(ks.clone(), branches, |k| bands_at(k, 0.0))
    };
    let grid = match sampled {
        Ok(grid) => grid,
        Err(WalkError::RootCount { .. }) => return Err(root_failures(&points, bands_at)),
        Err(e) => return Err(e.into()),
    };

    let max_residual = if closed.is_some() && sc.oracle {
        let worst = points
            .par_iter()
            .enumerate()
            .map(|(i, &(kx, ky))| {
                let w = oracle(kx, ky)?;
                Ok(phase_set_distance(grid.omegas(i), &w))
            })
            .collect::<Result<Vec<f64>, WalkError>>()?
            .into_iter()
            .fold(0.0, f64::max);
        Some(worst)
    } else {
        None
    };
    let dft_fallback_points = match walk {
        Walk::Dft2d if sc.p.is_none() => Some(
            points
                .par_iter()
                .filter(|&&(kx, ky)| dispersion_dft(kx, ky).map(|r| r.fallback).unwrap_or(false))
                .count(),
        ),
        _ => None,
    };

    let mut out = Outputs::create(dir)?;
    out.write("bands.csv", |w| grid.write_csv(w))?;
    if sc.oracle {
        let report = OracleReport {
            points: grid.points(),
            branches,
            method: method.clone(),
            max_residual,
            dft_fallback_points,
        };
        out.write_json("oracle.json", &report)?;
    }
    let label = config.name.as_deref().unwrap_or("spectrum");
    let files = finish(out, "spectrum", config, None, notes.clone())?;
    match max_residual {
        Some(r) => println!("{label}: {method}; max |closed form - eigenphase| = {r:.3e}"),
        None if sc.oracle => println!("{label}: {method} (no closed form to check)"),
        None => println!("{label}: {method}"),
    }
    report(label, dir, &files, &notes);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numerical_failures_exit_with_3() {
        let boundary: CliError = WalkError::BoundaryContact { step: 7 }.into();
        assert_eq!(boundary.exit_code(), 3);
        assert!(boundary.to_string().contains("step 7"));
        let roots: CliError = WalkError::RootCount {
            kx: 0.5,
            ky: -1.0,
            found: 3,
        }
        .into();
        assert_eq!(roots.exit_code(), 3);
        let spec: CliError = WalkError::InvalidSpec("x".into()).into();
        assert_eq!(spec.exit_code(), 2);
    }

    #[test]
    fn root_failures_list_every_k() {
        let points = [(0.0, 0.0), (1.0, 2.0), (3.0, 0.5)];
        let err = root_failures(&points, &|kx, ky| {
            if kx > 0.5 {
                Err(WalkError::RootCount { kx, ky, found: 2 })
            } else {
                Ok(vec![0.0; 4])
            }
        });
        assert_eq!(err.exit_code(), 3);
        let msg = err.to_string();
        assert!(msg.contains("2 k-points"), "{msg}");
        assert!(msg.contains("(1.000000, 2.000000)") && msg.contains("(3.000000, 0.500000)"));
    }
}
