//! The `simulate`, `compare` and `figure` commands.

use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::ValueEnum;
use dirac2c::{compare_densities, DensityComparison};
use serde::Serialize;

use crate::config::{
    Format, GridConfig, OutputConfig, PacketConfig, PhysicsConfig, PotentialConfig, ResolvedRun, RunConfig, Solver,
    TclConfig, TclMethod, TimeConfig,
};
use crate::error::{CliError, CliResult};
use crate::output::{density_csv, heatmap_csv, heatmap_pgm, metrics_csv, norms_csv, per_time_csv, Emitter, FileEntry};
use crate::run::{simulate, RunDiagnostics, RunOutcome};

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Debug, Clone, Serialize)]
pub struct ResolvedSummary {
    pub dx: f64,
    pub n_snapshots: usize,
    pub t_first: f64,
    pub t_last: f64,
    pub steps_per_snapshot: usize,
    pub dt_effective: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ManifestRun {
    pub label: String,
    pub config: RunConfig,
    pub resolved: ResolvedSummary,
    pub diagnostics: RunDiagnostics,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonSummary {
    pub normalized_l2: f64,
    pub max_abs_diff: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct WallClock {
    pub started_unix_s: f64,
    pub elapsed_s: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub runs: Vec<ManifestRun>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub comparison: Option<ComparisonSummary>,
    /// Density mapped to gray level 255 in the PGM heatmaps.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub heatmap_scale: Option<f64>,
    pub wall_clock: WallClock,
    pub files: Vec<FileEntry>,
}

struct Clock {
    started: SystemTime,
    instant: Instant,
}

impl Clock {
    fn start() -> Self {
        Self {
            started: SystemTime::now(),
            instant: Instant::now(),
        }
    }

    fn stop(&self) -> WallClock {
        WallClock {
            started_unix_s: self.started.duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0),
            elapsed_s: self.instant.elapsed().as_secs_f64(),
        }
    }
}

/// A finished simulation with its resolved inputs.
#[derive(Debug, Clone)]
pub struct CompletedRun {
    pub label: String,
    pub run: ResolvedRun,
    pub outcome: RunOutcome,
}

impl CompletedRun {
    pub fn execute(label: &str, config: &RunConfig) -> CliResult<Self> {
        let run = config.resolve()?;
        let outcome = simulate(&run)?;
        Ok(Self {
            label: label.to_string(),
            run,
            outcome,
        })
    }

    fn manifest_entry(&self) -> ManifestRun {
        let s = &self.run.schedule;
        ManifestRun {
            label: self.label.clone(),
            config: self.run.config.clone(),
            resolved: ResolvedSummary {
                dx: self.run.grid.dx(),
                n_snapshots: s.times.len(),
                t_first: s.times[0],
                t_last: *s.times.last().unwrap_or(&0.0),
                steps_per_snapshot: s.steps_per_snapshot,
                dt_effective: s.dt_effective,
            },
            diagnostics: self.outcome.diagnostics.clone(),
        }
    }

    fn emit_records(&self, em: &mut Emitter, prefix: &str) -> CliResult<()> {
        let r = &self.outcome.record;
        em.emit(&format!("{prefix}density.csv"), density_csv(r).as_bytes())?;
        em.emit(&format!("{prefix}norms.csv"), norms_csv(r).as_bytes())
    }
}

#[derive(Debug, Clone)]
pub struct SimulateReport {
    pub run: CompletedRun,
    pub directory: PathBuf,
    pub files: Vec<FileEntry>,
}

pub fn cmd_simulate(config: &RunConfig, out: Option<&Path>) -> CliResult<SimulateReport> {
    let clock = Clock::start();
    let done = CompletedRun::execute("run", config)?;
    let dir = out.map(Path::to_path_buf).unwrap_or_else(|| config.output.directory.clone());
    let mut em = Emitter::new(&dir)?;
    if config.output.formats.contains(&Format::Csv) {
        done.emit_records(&mut em, "")?;
    }
    let mut scale = None;
    if config.output.formats.contains(&Format::Pgm) {
        let s = done.outcome.record.q_max();
        em.emit("q_density.pgm", &heatmap_pgm(&done.outcome.record, s))?;
        scale = Some(s);
    }
    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command: "simulate".into(),
        runs: vec![done.manifest_entry()],
        comparison: None,
        heatmap_scale: scale,
        wall_clock: clock.stop(),
        files: em.files().to_vec(),
    };
    let files = em.finish(MANIFEST_NAME, &manifest)?;
    Ok(SimulateReport {
        run: done,
        directory: dir,
        files,
    })
}

#[derive(Debug, Clone)]
pub struct CompareReport {
    pub a: CompletedRun,
    pub b: CompletedRun,
    pub metrics: DensityComparison,
    pub files: Vec<FileEntry>,
}

impl CompareReport {
    pub fn summary_line(&self) -> String {
        format!(
            "normalized_l2={} max_abs_diff={} snapshots={} a={} b={}",
            crate::output::fmt_num(self.metrics.normalized_l2),
            crate::output::fmt_num(self.metrics.max_abs_diff),
            self.metrics.per_time.len(),
            self.a.run.config.solver,
            self.b.run.config.solver,
        )
    }
}

/// Runs two configurations and compares their lower densities.
pub fn compare_pair(a: &RunConfig, b: &RunConfig) -> CliResult<(CompletedRun, CompletedRun, DensityComparison)> {
    let a = CompletedRun::execute("a", a)?;
    let b = CompletedRun::execute("b", b)?;
    let metrics = compare_densities(&a.outcome.record, &b.outcome.record)
        .map_err(|e| CliError::Config(format!("runs are not comparable: {e}")))?;
    Ok((a, b, metrics))
}

pub fn cmd_compare(a: &RunConfig, b: &RunConfig, out: Option<&Path>) -> CliResult<CompareReport> {
    let clock = Clock::start();
    let (a, b, metrics) = compare_pair(a, b)?;
    let dir = out.map(Path::to_path_buf).unwrap_or_else(|| a.run.config.output.directory.clone());
    let mut em = Emitter::new(&dir)?;
    a.emit_records(&mut em, "a_")?;
    b.emit_records(&mut em, "b_")?;
    em.emit("metrics.csv", metrics_csv(&metrics).as_bytes())?;
    em.emit("per_time.csv", per_time_csv(&a.outcome.record.times, &metrics).as_bytes())?;
    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command: "compare".into(),
        runs: vec![a.manifest_entry(), b.manifest_entry()],
        comparison: Some(ComparisonSummary {
            normalized_l2: metrics.normalized_l2,
            max_abs_diff: metrics.max_abs_diff,
        }),
        heatmap_scale: None,
        wall_clock: clock.stop(),
        files: em.files().to_vec(),
    };
    let files = em.finish(MANIFEST_NAME, &manifest)?;
    Ok(CompareReport { a, b, metrics, files })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FigureName {
    /// Free packet at rest.
    Fig1,
    /// Moving packet in a static linear potential.
    Fig2,
}

impl FigureName {
    pub fn as_str(self) -> &'static str {
        match self {
            FigureName::Fig1 => "fig1",
            FigureName::Fig2 => "fig2",
        }
    }

    /// The (Dirac, TCL) configuration pair. Both use m = c = e = 1, x0 = 10,
    /// 1024 points on [−30, 30] and 201 snapshots over t ∈ [0, 10].
    pub fn preset_pair(self) -> (RunConfig, RunConfig) {
        let (potential, p0, dirac_solver, dirac_dt, tcl_method) = match self {
            FigureName::Fig1 => (PotentialConfig::Zero, 0.0, Solver::DiracExact, None, TclMethod::Analytic),
            FigureName::Fig2 => (
                PotentialConfig::Linear { a: 0.1 },
                0.2,
                Solver::DiracSplit,
                Some(5e-4),
                TclMethod::Rk4,
            ),
        };
        let base = |solver, dt, method| RunConfig {
            solver,
            grid: GridConfig {
                n_points: 1024,
                x_min: -30.0,
                x_max: 30.0,
            },
            physics: PhysicsConfig { m: 1.0, c: 1.0, e: 1.0 },
            potential: potential.clone(),
            packet: PacketConfig {
                x0: 10.0,
                p0,
                x_center: 0.0,
            },
            time: TimeConfig {
                t_final: 10.0,
                dt,
                n_snapshots: 201,
            },
            output: OutputConfig::default(),
            tcl: TclConfig {
                method,
                ..TclConfig::default()
            },
        };
        let tcl_dt = match tcl_method {
            TclMethod::Analytic => None,
            TclMethod::Rk4 => Some(1e-3),
        };
        (
            base(dirac_solver, dirac_dt, TclMethod::default()),
            base(Solver::Tcl, tcl_dt, tcl_method),
        )
    }
}

#[derive(Debug, Clone)]
pub struct FigureReport {
    pub dirac: CompletedRun,
    pub tcl: CompletedRun,
    pub metrics: DensityComparison,
    pub scale: f64,
    pub files: Vec<FileEntry>,
}

/// Runs a preset pair without writing anything.
pub fn run_figure(name: FigureName) -> CliResult<(CompletedRun, CompletedRun, DensityComparison)> {
    let (d, t) = name.preset_pair();
    let dirac = CompletedRun::execute("dirac", &d)?;
    let tcl = CompletedRun::execute("tcl", &t)?;
    let metrics = compare_densities(&dirac.outcome.record, &tcl.outcome.record)?;
    Ok((dirac, tcl, metrics))
}

pub fn cmd_figure(name: FigureName, out: &Path) -> CliResult<FigureReport> {
    let clock = Clock::start();
    let (dirac, tcl, metrics) = run_figure(name)?;
    let tag = name.as_str();
    let scale = dirac.outcome.record.q_max().max(tcl.outcome.record.q_max());
    let mut em = Emitter::new(out)?;
    for run in [&dirac, &tcl] {
        let r = &run.outcome.record;
        let label = &run.label;
        run.emit_records(&mut em, &format!("{tag}_{label}_"))?;
        em.emit(&format!("{tag}_{label}_heatmap.csv"), heatmap_csv(r).as_bytes())?;
        em.emit(&format!("{tag}_{label}_heatmap.pgm"), &heatmap_pgm(r, scale))?;
    }
    em.emit(&format!("{tag}_metrics.csv"), metrics_csv(&metrics).as_bytes())?;
    em.emit(
        &format!("{tag}_per_time.csv"),
        per_time_csv(&dirac.outcome.record.times, &metrics).as_bytes(),
    )?;
    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command: format!("figure {tag}"),
        runs: vec![dirac.manifest_entry(), tcl.manifest_entry()],
        comparison: Some(ComparisonSummary {
            normalized_l2: metrics.normalized_l2,
            max_abs_diff: metrics.max_abs_diff,
        }),
        heatmap_scale: Some(scale),
        wall_clock: clock.stop(),
        files: em.files().to_vec(),
    };
    let files = em.finish(&format!("{tag}_{MANIFEST_NAME}"), &manifest)?;
    Ok(FigureReport {
        dirac,
        tcl,
        metrics,
        scale,
        files,
    })
}
