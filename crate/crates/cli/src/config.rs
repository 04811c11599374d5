//! JSON run configuration and its resolution into solver inputs.

use std::fs;
use std::path::{Path, PathBuf};

use dirac2c::tcl::{check_tcl_step, GuardPolicy, DEFAULT_CUTOFF_MC};
use dirac2c::{gaussian_packet, make_grid, GridSpec, PhysicsParams, PotentialSpec, UpperField};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Solver {
    DiracExact,
    DiracSplit,
    Tcl,
    Pauli,
    Smallmass,
}

impl std::fmt::Display for Solver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Solver::DiracExact => "dirac-exact",
            Solver::DiracSplit => "dirac-split",
            Solver::Tcl => "tcl",
            Solver::Pauli => "pauli",
            Solver::Smallmass => "smallmass",
        })
    }
}


#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n_points: usize,
    pub x_min: f64,
    pub x_max: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicsConfig {
    pub m: f64,
    pub c: f64,
    #[serde(default = "one")]
    pub e: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum PotentialConfig {
    #[default]
    Zero,
    /// φ(x) = a·x
    Linear { a: f64 },
    /// One value of φ per grid node, one per line; relative paths are taken
    /// from the directory holding the config file.
    Table { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PacketConfig {
    pub x0: f64,
    #[serde(default)]
    pub p0: f64,
    #[serde(default)]
    pub x_center: f64,
}

fn default_snapshots() -> usize {
    200
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    pub t_final: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default = "default_snapshots")]
    pub n_snapshots: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Pgm,
}

fn default_directory() -> PathBuf {
    PathBuf::from("dirac2c-out")
}

fn default_formats() -> Vec<Format> {
    vec![Format::Csv]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_directory")]
    pub directory: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            directory: default_directory(),
            formats: default_formats(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TclMethod {
    #[default]
    Rk4,
    /// Closed-form per-mode solution; free field only.
    Analytic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GuardMode {
    #[default]
    Refuse,
    Warn,
}

fn default_cutoff() -> f64 {
    DEFAULT_CUTOFF_MC
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TclConfig {
    #[serde(default)]
    pub method: TclMethod,
    #[serde(default)]
    pub guard: GuardMode,
    /// Momentum cutoff of the RK4 stepper in units of `mc`.
    #[serde(default = "default_cutoff")]
    pub cutoff_mc: f64,
}

impl Default for TclConfig {
    fn default() -> Self {
        Self {
            method: TclMethod::default(),
            guard: GuardMode::default(),
            cutoff_mc: default_cutoff(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub solver: Solver,
    pub grid: GridConfig,
    pub physics: PhysicsConfig,
    #[serde(default)]
    pub potential: PotentialConfig,
    pub packet: PacketConfig,
    pub time: TimeConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub tcl: TclConfig,
}

/// Snapshot times and the uniform step that lands on each of them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Schedule {
    pub times: Vec<f64>,
    /// Steps between consecutive snapshots (0 for closed-form solvers).
    pub steps_per_snapshot: usize,
    /// Requested `dt` shrunk so an integer number of steps fills each interval.
    pub dt_effective: Option<f64>,
}

impl Schedule {
    fn build(time: &TimeConfig, needs_dt: bool) -> CliResult<Self> {
        let t_final = time.t_final;
        if !(t_final.is_finite() && t_final >= 0.0) {
            return Err(CliError::Config(format!("time.t_final = {t_final} must be finite and ≥ 0")));
        }
        let dt = match time.dt {
            Some(dt) if !(dt.is_finite() && dt > 0.0) => {
                return Err(CliError::Config(format!("time.dt = {dt} must be positive")));
            }
            None if needs_dt && t_final > 0.0 => {
                return Err(CliError::Config("time.dt is required by this solver".into()));
            }
            other => other,
        };
        if t_final == 0.0 {
            return Ok(Self {
                times: vec![0.0],
                steps_per_snapshot: 0,
                dt_effective: dt,
            });
        }
        let n = time.n_snapshots;
        if n < 2 {
            return Err(CliError::Config(format!(
                "time.n_snapshots = {n} must be ≥ 2 when t_final > 0"
            )));
        }
        let intervals = (n - 1) as f64;
        let times = (0..n).map(|k| t_final * k as f64 / intervals).collect();
        let interval = t_final / intervals;
        let (steps, dt_effective) = match (needs_dt, dt) {
            (true, Some(dt)) => {
                let steps = ((interval / dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
                (steps, Some(interval / steps as f64))
            }
            _ => (0, dt),
        };
        Ok(Self {
            times,
            steps_per_snapshot: steps,
            dt_effective,
        })
    }
}

/// A validated configuration with every solver input materialized.
#[derive(Debug, Clone)]
pub struct ResolvedRun {
    pub config: RunConfig,
    pub grid: GridSpec,
    pub params: PhysicsParams,
    pub potential: PotentialSpec,
    pub initial: UpperField,
    pub schedule: Schedule,
}

impl RunConfig {
    /// Whether the solver advances in discrete steps.
    pub fn needs_dt(&self) -> bool {
        match self.solver {
            Solver::DiracSplit | Solver::Pauli => true,
            Solver::Tcl => self.tcl.method == TclMethod::Rk4,
            Solver::DiracExact | Solver::Smallmass => false,
        }
    }

    pub fn from_json(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid config: {e}")))
    }

    /// Reads a config file; relative table paths are rebased on its directory.
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut config = Self::from_json(&text)?;
        if let PotentialConfig::Table { path: table } = &mut config.potential {
            if table.is_relative() {
                if let Some(dir) = path.parent() {
                    *table = dir.join(&*table);
                }
            }
        }
        Ok(config)
    }

    pub fn resolve(&self) -> CliResult<ResolvedRun> {
        let grid = make_grid(self.grid.n_points, self.grid.x_min, self.grid.x_max)?;
        let params = PhysicsParams::new(self.physics.m, self.physics.c, self.physics.e)?;
        let potential = match &self.potential {
            PotentialConfig::Zero => PotentialSpec::Zero,
            PotentialConfig::Linear { a } => {
                if !a.is_finite() {
                    return Err(CliError::Config(format!("potential.a = {a} must be finite")));
                }
                PotentialSpec::Linear { a: *a }
            }
            PotentialConfig::Table { path } => PotentialSpec::Tabulated(read_table(path)?),
        };
        potential.values(&grid)?;

        let free_only = matches!(self.solver, Solver::DiracExact | Solver::Smallmass)
            || (self.solver == Solver::Tcl && self.tcl.method == TclMethod::Analytic);
        if free_only && !potential.is_zero() {
            return Err(CliError::Config(
                "this solver handles the free field only; set potential.kind = \"zero\"".into(),
            ));
        }
        if matches!(self.solver, Solver::Tcl | Solver::Pauli) && params.m <= 0.0 {
            return Err(CliError::Config("this solver requires physics.m > 0".into()));
        }

        let initial = gaussian_packet(&grid, self.packet.x0, self.packet.p0, self.packet.x_center)?;
        let schedule = Schedule::build(&self.time, self.needs_dt())?;

        if self.solver == Solver::Tcl && self.tcl.method == TclMethod::Rk4 {
            if !(self.tcl.cutoff_mc.is_finite() && self.tcl.cutoff_mc > 0.0) {
                return Err(CliError::Config(format!(
                    "tcl.cutoff_mc = {} must be positive",
                    self.tcl.cutoff_mc
                )));
            }
            if let Some(dt) = schedule.dt_effective.filter(|_| schedule.steps_per_snapshot > 0) {
                let k = grid.k_max().min(self.tcl.cutoff_mc * params.m * params.c);
                check_tcl_step(k, dt, &params, self.guard_policy())?;
            }
        }

        Ok(ResolvedRun {
            config: self.clone(),
            grid,
            params,
            potential,
            initial,
            schedule,
        })
    }

    pub fn guard_policy(&self) -> GuardPolicy {
        match self.tcl.guard {
            GuardMode::Refuse => GuardPolicy::Refuse,
            GuardMode::Warn => GuardPolicy::Warn,
        }
    }
}

fn read_table(path: &Path) -> CliResult<Vec<f64>> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    text.lines()
        .map(str::trim)
        .enumerate()
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .map(|(i, l)| {
            l.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| CliError::Config(format!("{}:{}: not a finite number: {l:?}", path.display(), i + 1)))
        })
        .collect()
}
