//! The four command-line operations as library functions.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::mpsc::sync_channel;

use crate::error::{Error, Result};
use crate::flow::VelocityField;
use crate::lab::{run_case, CaseId, CaseParams, CaseReport, EnsembleSpec, FieldClass, InequalityCase};
use crate::littlewood_paley::{aniso_block_lp_norms, block_lp_norms, Direction};
use crate::monitor::{prop41_sides, prop51_sides, Monitor, MonitorConfig, MonitorRecord};
use crate::solver::{initial_abc, initial_random_bandlimited, initial_taylor_green, Solver, SolverEvent, StateSnapshot};
use crate::spectral::Grid;

use super::afld::FieldFile;
use super::config::{InitKind, RunConfig};
use super::norm_spec::NormSpec;

/// Snapshots in flight between the stepping loop and the monitor; the
/// solver blocks when the queue is full.
pub const QUEUE_DEPTH: usize = 4;

pub const CSV_NAME: &str = "monitor.csv";
pub const MANIFEST_NAME: &str = "manifest.txt";

/// Field-file name of the snapshot at `step`.
pub fn snapshot_name(step: u64) -> String {
    format!("snap_{step:08}.afld")
}

pub fn initial_velocity(cfg: &RunConfig) -> Result<VelocityField> {
    let grid = Grid::cubic(cfg.n)?;
    let v = match cfg.init {
        InitKind::Zero => VelocityField::zeros(grid),
        InitKind::TaylorGreen => initial_taylor_green(grid)?,
        InitKind::Abc => initial_abc(grid, 1.0, 1.0, 1.0)?,
        InitKind::Random => initial_random_bandlimited(grid, cfg.seed, cfg.band, cfg.slope, cfg.amplitude)?,
    };
    Ok(match cfg.init {
        InitKind::TaylorGreen | InitKind::Abc => v.scale(cfg.amplitude),
        _ => v,
    })
}

#[derive(Debug)]
pub struct RunOutcome {
    pub records: Vec<MonitorRecord>,
    pub events: Vec<SolverEvent>,
    pub snapshots: Vec<PathBuf>,
    /// Set when the run stopped on a non-finite state.
    pub failure: Option<String>,
    pub csv_path: PathBuf,
    pub manifest_path: PathBuf,
}

fn write_snapshot(dir: &Path, s: &StateSnapshot) -> Result<PathBuf> {
    let path = dir.join(snapshot_name(s.step_index));
    FieldFile::Spectral(s.velocity.components().to_vec()).write(&path)?;
    Ok(path)
}

/// Non-finite final record closing a failed run.
fn flagged_record(last: Option<&MonitorRecord>, step: u64, time: f64) -> MonitorRecord {
    let nan = f64::NAN;
    let base = last.cloned();
    MonitorRecord {
        time,
        step_index: step,
        v3_crit: nan,
        blowup_int: nan,
        vert_crit: nan,
        vert_int: nan,
        omega_lr: nan,
        omega_half_l2: nan,
        grad_om_sq: nan,
        grad_om_int: nan,
        d33v3_sq: nan,
        d33v3_int: nan,
        d3v3_sq: nan,
        grad_d3v3_sq: nan,
        grad_d3v3_int: nan,
        d3v3_forcing: nan,
        d3v3_forcing_int: nan,
        bp_max: nan,
        excluded_energy: nan,
        omega0_term: base.as_ref().map_or(nan, |b| b.omega0_term),
        vorticity0_term: base.as_ref().map_or(nan, |b| b.vorticity0_term),
        prop41_lhs: nan,
        prop41_rhs: nan,
        prop51_lhs: nan,
        prop51_rhs: nan,
        finite: false,
    }
}

/// Runs the solver with the monitor attached, writing field snapshots,
/// the monitor CSV and a manifest under `output.dir`.
pub fn cmd_run(config_path: impl AsRef<Path>) -> Result<RunOutcome> {
    let cfg = RunConfig::from_path(config_path)?;
    run_config(&cfg)
}

pub fn run_config(cfg: &RunConfig) -> Result<RunOutcome> {
    let dir = cfg.output_dir.clone();
    std::fs::create_dir_all(&dir)?;
    let v0 = initial_velocity(cfg)?;
    let mut solver = Solver::new(v0.grid(), cfg.solver.clone())?;
    let mut monitor = Monitor::new(cfg.monitor.clone())?;
    let csv_path = dir.join(CSV_NAME);
    let mut csv = BufWriter::new(File::create(&csv_path)?);
    writeln!(csv, "{}", MonitorRecord::csv_header())?;

    let (tx, rx) = sync_channel::<StateSnapshot>(QUEUE_DEPTH);
    let every = cfg.snapshot_every;
    let (run_result, consumer) = std::thread::scope(|scope| {
        let consumer = scope.spawn(|| -> Result<Vec<PathBuf>> {
            let mut written = Vec::new();
            for (i, s) in rx.into_iter().enumerate() {
                let rec = monitor.observe(&s)?;
                writeln!(csv, "{}", rec.csv_row())?;
                if every > 0 && i as u64 % every == 0 {
                    written.push(write_snapshot(&dir, &s)?);
                }
            }
            Ok(written)
        });
        let result = solver.run(v0, |s| {
            tx.send(s.clone()).map_err(|_| Error::Format("monitor stopped before the solver".into()))
        });
        drop(tx);
        (result, consumer.join().expect("monitor thread panicked"))
    });
    let mut snapshots = consumer?;
    let mut records = monitor.into_history();
    let failure = match run_result {
        Ok(last) => {
            if every > 0 && snapshots.last().map(|p| p.file_name()) != Some(Some(snapshot_name(last.step_index).as_ref())) {
                snapshots.push(write_snapshot(&dir, &last)?);
            }
            None
        }
        Err(Error::NonFiniteState { step, time, last_valid_step }) => {
            let rec = flagged_record(records.last(), step, time);
            writeln!(csv, "{}", rec.csv_row())?;
            records.push(rec);
            Some(Error::NonFiniteState { step, time, last_valid_step }.to_string())
        }
        Err(e) => return Err(e),
    };
    csv.flush()?;

    let manifest_path = dir.join(MANIFEST_NAME);
    std::fs::write(&manifest_path, manifest(cfg, &records, solver.events(), &snapshots, failure.as_deref()))?;
    Ok(RunOutcome { records, events: solver.events().to_vec(), snapshots, failure, csv_path, manifest_path })
}

fn manifest(
    cfg: &RunConfig,
    records: &[MonitorRecord],
    events: &[SolverEvent],
    snapshots: &[PathBuf],
    failure: Option<&str>,
) -> String {
    let mut s = String::new();
    writeln!(s, "# anisoflow run manifest").unwrap();
    writeln!(s, "anisoflow.version = {}", env!("CARGO_PKG_VERSION")).unwrap();
    writeln!(s, "csv.version = {}", crate::monitor::CSV_VERSION).unwrap();
    writeln!(s, "seed = {}", cfg.seed).unwrap();
    writeln!(s, "\n[config]").unwrap();
    s.push_str(&cfg.to_text());
    writeln!(s, "\n[result]").unwrap();
    writeln!(s, "status = {}", failure.unwrap_or("ok")).unwrap();
    writeln!(s, "records = {}", records.len()).unwrap();
    if let Some(last) = records.last() {
        writeln!(s, "final.step = {}", last.step_index).unwrap();
        writeln!(s, "final.time = {:.16e}", last.time).unwrap();
    }
    let healthy: Vec<MonitorRecord> = records.iter().filter(|r| r.finite).cloned().collect();
    if !healthy.is_empty() {
        if let Ok(rep) = prop41_sides(&healthy, &cfg.monitor) {
            writeln!(s, "vorticity_estimate.c_star = {:.16e}", rep.c_star).unwrap();
        }
        if let Ok(rep) = prop51_sides(&healthy, &cfg.monitor) {
            writeln!(s, "d3v3_estimate.c_star = {:.16e}", rep.c_star).unwrap();
        }
    }
    writeln!(s, "cfl_warnings = {}", events.len()).unwrap();
    for p in snapshots {
        writeln!(s, "snapshot = {}", p.file_name().map(|n| n.to_string_lossy()).unwrap_or_default()).unwrap();
    }
    s
}

/// Recomputes the monitor series from the snapshot files of a finished run.
pub fn replay_monitor(dir: impl AsRef<Path>, cfg: &MonitorConfig, dt: f64) -> Result<Vec<MonitorRecord>> {
    let mut files: Vec<(u64, PathBuf)> = Vec::new();
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("");
        if let Some(step) = name.strip_prefix("snap_").and_then(|n| n.strip_suffix(".afld")) {
            if let Ok(step) = step.parse::<u64>() {
                files.push((step, path));
            }
        }
    }
    files.sort();
    let mut monitor = Monitor::new(cfg.clone())?;
    for (step, path) in files {
        let comps: [_; 3] = FieldFile::read(&path)?
            .to_spectral()
            .try_into()
            .map_err(|_| Error::Format(format!("{} does not hold three components", path.display())))?;
        let s = StateSnapshot { time: step as f64 * dt, velocity: VelocityField::new(comps)?, step_index: step };
        monitor.observe(&s)?;
    }
    Ok(monitor.into_history())
}

/// Evaluates every spec on the field stored at `field_path`.
pub fn cmd_norms(field_path: impl AsRef<Path>, specs: &[String]) -> Result<Vec<(String, f64)>> {
    let file = FieldFile::read(field_path)?;
    let comps = file.to_spectral();
    specs
        .iter()
        .map(|text| {
            let spec: NormSpec = text.parse()?;
            Ok((text.clone(), spec.eval(&comps, || file.to_real())?))
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecomposeMode {
    Iso,
    H,
    V,
    HV,
}

impl std::str::FromStr for DecomposeMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "iso" => Ok(Self::Iso),
            "h" => Ok(Self::H),
            "v" => Ok(Self::V),
            "hv" => Ok(Self::HV),
            _ => Err(format!("unknown mode `{s}` (expected iso, h, v or hv)")),
        }
    }
}

/// CSV of unweighted block norms `‖Δ a‖_{L^p}` of every component.
pub fn cmd_decompose(field_path: impl AsRef<Path>, mode: DecomposeMode, p: f64) -> Result<String> {
    let comps = FieldFile::read(field_path)?.to_spectral();
    let mut s = String::new();
    let dir = match mode {
        DecomposeMode::Iso => Some(Direction::Iso),
        DecomposeMode::H => Some(Direction::Horizontal),
        DecomposeMode::V => Some(Direction::Vertical),
        DecomposeMode::HV => None,
    };
    match dir {
        Some(d) => {
            writeln!(s, "component,j,lp").unwrap();
            for (c, a) in comps.iter().enumerate() {
                for (j, v) in block_lp_norms(a, d, p)? {
                    writeln!(s, "{c},{j},{v:.16e}").unwrap();
                }
            }
        }
        None => {
            writeln!(s, "component,k,l,lp").unwrap();
            for (c, a) in comps.iter().enumerate() {
                for (k, l, v) in aniso_block_lp_norms(a, p)? {
                    writeln!(s, "{c},{k},{l},{v:.16e}").unwrap();
                }
            }
        }
    }
    Ok(s)
}

/// Runs inequality case `case` with parameter overrides `key=value`.
pub fn cmd_check(
    case: CaseId,
    overrides: &[(String, f64)],
    seed: u64,
    count: usize,
    resolution: usize,
    class: Option<FieldClass>,
) -> Result<CaseReport> {
    let mut params = CaseParams::defaults(case);
    for (k, v) in overrides {
        params.set(k, *v)?;
    }
    let case_def = InequalityCase::with_params(case, params)?;
    let spec = EnsembleSpec::new(seed, count, resolution, class.unwrap_or(case.default_class()));
    run_case(&case_def, &spec)
}
