//! Drives one resolved configuration through its solver, snapshot by snapshot.

use dirac2c::dirac::{propagate_exact_free, StrangStepper};
use dirac2c::field::TAIL_THRESHOLD;
use dirac2c::pauli::PauliStepper;
use dirac2c::smallmass::{from_interaction_picture, propagate_smallmass};
use dirac2c::tcl::{reconstruct_q, tcl_free_solution, TclOperator, TclStepper};
use dirac2c::diagnostics::{clearance_sigmas, MIN_CLEARANCE_SIGMAS};
use dirac2c::{DensityRecord, Error, GridSpec, SpinorField, UpperField};
use serde::Serialize;

use crate::config::{ResolvedRun, Solver, TclMethod};
use crate::error::CliResult;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunDiagnostics {
    /// `max_t |P-norm + Q-norm − initial norm|`
    pub norm_drift: f64,
    /// Largest field amplitude seen in the edge strips.
    pub max_boundary_tail: f64,
    /// First snapshot whose edge amplitude exceeded the initial-packet
    /// threshold; informational, the run guard is the clearance below.
    pub first_tail_excess: Option<f64>,
    /// Smallest packet-to-edge distance over the run, in standard deviations.
    pub min_clearance_sigmas: f64,
    pub final_leakage: f64,
    pub steps_per_snapshot: usize,
    pub total_steps: usize,
    pub dt_effective: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub record: DensityRecord,
    pub diagnostics: RunDiagnostics,
}

struct Recorder {
    record: DensityRecord,
    grid: GridSpec,
    max_tail: f64,
    first_excess: Option<f64>,
    min_clearance: f64,
}

impl Recorder {
    fn push(&mut self, t: f64, upper: &UpperField, lower: &UpperField) -> CliResult<()> {
        let total: Vec<f64> = upper.density().iter().zip(lower.density()).map(|(p, q)| p + q).collect();
        let sigmas = clearance_sigmas(&total, &self.grid)?;
        if sigmas < MIN_CLEARANCE_SIGMAS {
            return Err(Error::InsufficientClearance {
                sigmas,
                required: MIN_CLEARANCE_SIGMAS,
                time: t,
            }
            .into());
        }
        self.min_clearance = self.min_clearance.min(sigmas);
        let tail = upper.boundary_tail().max(lower.boundary_tail());
        if tail > TAIL_THRESHOLD && self.first_excess.is_none() {
            log::info!("edge amplitude {tail:.3e} exceeds {TAIL_THRESHOLD:e} at t = {t}");
            self.first_excess = Some(t);
        }
        self.max_tail = self.max_tail.max(tail);
        self.record.push(t, upper, lower)?;
        Ok(())
    }
}

pub fn simulate(run: &ResolvedRun) -> CliResult<RunOutcome> {
    let grid = &run.grid;
    let params = &run.params;
    let pot = &run.potential;
    let sched = &run.schedule;
    let steps = sched.steps_per_snapshot;
    let record = match run.config.solver {
        Solver::Pauli => DensityRecord::upper_only(grid),
        _ => DensityRecord::new(grid),
    };
    let mut rec = Recorder {
        record,
        grid: grid.clone(),
        max_tail: 0.0,
        first_excess: None,
        min_clearance: f64::INFINITY,
    };
    let zeros = UpperField::zeros(grid);

    match run.config.solver {
        Solver::DiracExact => {
            let psi0 = SpinorField::from_upper(run.initial.clone());
            for &t in &sched.times {
                let s = propagate_exact_free(&psi0, t, params)?;
                rec.push(t, s.upper(), s.lower())?;
            }
        }
        Solver::DiracSplit => {
            let mut up = run.initial.values().to_vec();
            let mut lo = zeros.values().to_vec();
            let stepper = match sched.dt_effective {
                Some(dt) if steps > 0 => Some(StrangStepper::new(grid, dt, pot, params)?),
                _ => None,
            };
            for (k, &t) in sched.times.iter().enumerate() {
                if k > 0 {
                    if let Some(s) = &stepper {
                        s.advance(&mut up, &mut lo, steps);
                    }
                }
                rec.push(t, &UpperField::new(grid, up.clone())?, &UpperField::new(grid, lo.clone())?)?;
            }
        }
        Solver::Tcl if run.config.tcl.method == TclMethod::Analytic => {
            let c0 = run.initial.to_momentum();
            for &t in &sched.times {
                let u = UpperField::to_position(grid, &tcl_free_solution(grid, &c0, t, params)?)?;
                let q = reconstruct_q(&u, t, pot, params)?;
                rec.push(t, &u, &q)?;
            }
        }
        Solver::Tcl => {
            let mut u = run.initial.clone();
            let mut stepper = match sched.dt_effective {
                Some(dt) if steps > 0 => {
                    let op = TclOperator::new(grid, pot, params)?;
                    let cutoff = run.config.tcl.cutoff_mc * params.m * params.c;
                    Some(TclStepper::with_cutoff(op, dt, cutoff, run.config.guard_policy())?)
                }
                _ => None,
            };
            for (k, &t) in sched.times.iter().enumerate() {
                if k > 0 {
                    if let Some(s) = stepper.as_mut() {
                        s.advance(&mut u, sched.times[k - 1], steps)?;
                    }
                }
                let q = reconstruct_q(&u, t, pot, params)?;
                rec.push(t, &u, &q)?;
            }
        }
        Solver::Pauli => {
            let mut u = run.initial.values().to_vec();
            let stepper = match sched.dt_effective {
                Some(dt) if steps > 0 => Some(PauliStepper::new(grid, dt, pot, params)?),
                _ => None,
            };
            for (k, &t) in sched.times.iter().enumerate() {
                if k > 0 {
                    if let Some(s) = &stepper {
                        s.advance(&mut u, steps);
                    }
                }
                rec.push(t, &UpperField::new(grid, u.clone())?, &zeros)?;
            }
        }
        Solver::Smallmass => {
            for &t in &sched.times {
                let ip = propagate_smallmass(&run.initial, t, pot, params)?;
                let lab = from_interaction_picture(&SpinorField::from_upper(ip), t, pot, params)?;
                rec.push(t, lab.upper(), lab.lower())?;
            }
        }
    }

    let record = rec.record;
    let n0 = record.p_norm[0] + record.q_norm[0];
    let norm_drift = record
        .p_norm
        .iter()
        .zip(&record.q_norm)
        .map(|(p, q)| (p + q - n0).abs())
        .fold(0.0, f64::max);
    let last = record.len() - 1;
    let diagnostics = RunDiagnostics {
        norm_drift,
        max_boundary_tail: rec.max_tail,
        first_tail_excess: rec.first_excess,
        min_clearance_sigmas: rec.min_clearance,
        final_leakage: dirac2c::total_leakage(&record, last),
        steps_per_snapshot: steps,
        total_steps: steps * last,
        dt_effective: sched.dt_effective,
    };
    Ok(RunOutcome { record, diagnostics })
}
