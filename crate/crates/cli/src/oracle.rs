//! Verification suites. Each measurement is a plain function so tests can
//! call it at other sizes.

use std::fmt;

use clap::ValueEnum;
use dirac2c::dirac::{propagate_exact_free, propagate_strang, DenseDiracOracle};
use dirac2c::pauli::propagate_pauli;
use dirac2c::smallmass::{propagate_smallmass, SmallMassConfig};
use dirac2c::tcl::{
    apply_tcl_generator, generator_discrepancy_curve, kernel_quadrature_oracle, reconstruct_q, tcl_free_solution,
    GeneratorDiscrepancy, GuardPolicy, TclOperator, TclStepper, QUAD_NODES_PER_UNIT,
};
use dirac2c::{gaussian_packet, make_grid, Complex64, GridSpec, PhysicsParams, PotentialSpec, SpinorField, UpperField};

use crate::error::CliResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    FreeExactness,
    KernelQuadrature,
    SmallmassScaling,
    OrderTests,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionResult {
    pub name: String,
    pub measured: f64,
    pub target: String,
    pub passed: bool,
}

impl CriterionResult {
    pub fn at_most(name: &str, measured: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            target: format!("<= {limit:e}"),
            passed: measured <= limit,
        }
    }

    /// `|measured/center − 1| ≤ rel`
    pub fn near(name: &str, measured: f64, center: f64, rel: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            target: format!("{center} +/- {}%", rel * 100.0),
            passed: (measured / center - 1.0).abs() <= rel,
        }
    }
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: measured={:.6e} target {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.measured,
            self.target
        )
    }
}

pub fn unit() -> PhysicsParams {
    PhysicsParams::new(1.0, 1.0, 1.0).expect("unit parameters")
}

fn grid(n: usize) -> GridSpec {
    make_grid(n, -30.0, 30.0).expect("valid grid")
}

fn packet(g: &GridSpec, p0: f64) -> CliResult<UpperField> {
    Ok(gaussian_packet(g, 10.0, p0, 0.0)?)
}

/// Strang splitting versus the per-mode propagator on a free packet:
/// `(L² error, |norm − 1|)` at `t_final`.
pub fn strang_free_error(n_points: usize, dt: f64, t_final: f64, p0: f64) -> CliResult<(f64, f64)> {
    let g = grid(n_points);
    let psi = SpinorField::from_upper(packet(&g, p0)?);
    let steps = (t_final / dt).round() as usize;
    let split = propagate_strang(&psi, dt, steps, &PotentialSpec::Zero, &unit())?;
    let exact = propagate_exact_free(&psi, dt * steps as f64, &unit())?;
    Ok((split.distance(&exact)?, (split.norm_sq() - 1.0).abs()))
}

/// Per-mode propagator versus the dense eigendecomposition, free field.
pub fn dense_free_error(n_points: usize, t: f64) -> CliResult<f64> {
    let g = grid(n_points);
    let psi = SpinorField::from_upper(packet(&g, 0.2)?);
    let dense = DenseDiracOracle::new(&g, &PotentialSpec::Zero, &unit())?.evolve(&psi, t)?;
    Ok(propagate_exact_free(&psi, t, &unit())?.distance(&dense)?)
}

/// Strang splitting versus the dense oracle in the potential `a·x`.
pub fn strang_dense_error(n_points: usize, a: f64, dts: &[f64], t: f64) -> CliResult<Vec<f64>> {
    let g = grid(n_points);
    let pot = PotentialSpec::Linear { a };
    let psi = SpinorField::from_upper(packet(&g, 0.2)?);
    let exact = DenseDiracOracle::new(&g, &pot, &unit())?.evolve(&psi, t)?;
    dts.iter()
        .map(|&dt| {
            let steps = (t / dt).round() as usize;
            Ok(propagate_strang(&psi, dt, steps, &pot, &unit())?.distance(&exact)?)
        })
        .collect()
}

/// RK4 versus the closed-form free TCL solution, maximized over the
/// integer multiples of `probe_every` up to `t_final`.
pub fn rk4_free_error(n_points: usize, dt: f64, t_final: f64, p0: f64, probe_every: f64) -> CliResult<f64> {
    let g = grid(n_points);
    let u0 = packet(&g, p0)?;
    let c0 = u0.to_momentum();
    let op = TclOperator::new(&g, &PotentialSpec::Zero, &unit())?;
    let mut stepper = TclStepper::new(op, dt, GuardPolicy::Refuse)?;
    let per_probe = (probe_every / dt).round() as usize;
    let probes = (t_final / probe_every).round() as usize;
    let mut u = u0;
    let mut worst = 0.0f64;
    for k in 0..probes {
        stepper.advance(&mut u, (k * per_probe) as f64 * dt, per_probe)?;
        let t = ((k + 1) * per_probe) as f64 * dt;
        let exact = UpperField::to_position(&g, &tcl_free_solution(&g, &c0, t, &unit())?)?;
        worst = worst.max(u.distance(&exact)?);
    }
    Ok(worst)
}

/// Closed-form free generator versus the quadrature kernel, relative to the
/// kernel norm, maximized over `times`.
pub fn kernel_free_error(n_points: usize, times: &[f64]) -> CliResult<f64> {
    let g = grid(n_points);
    let u = packet(&g, 0.2)?;
    let mut worst = 0.0f64;
    for &t in times {
        let n_quad = ((QUAD_NODES_PER_UNIT * t).ceil() as usize).max(2);
        let oracle = kernel_quadrature_oracle(&u, t, &PotentialSpec::Zero, &unit(), n_quad)?;
        let closed = apply_tcl_generator(&u, t, &PotentialSpec::Zero, &unit())?;
        let scale = oracle.kernel.norm().max(f64::MIN_POSITIVE);
        worst = worst.max(closed.distance(&oracle.generator)? / scale);
    }
    Ok(worst)
}

pub fn kernel_linear_curve(n_points: usize, a: f64, times: &[f64]) -> CliResult<Vec<GeneratorDiscrepancy>> {
    let g = grid(n_points);
    let u = packet(&g, 0.2)?;
    Ok(generator_discrepancy_curve(
        &u,
        times,
        &PotentialSpec::Linear { a },
        &unit(),
        QUAD_NODES_PER_UNIT,
    )?)
}

/// `max_t | ‖u‖² + ‖Q‖² − 1 |` for a single TCL plane-wave mode over one
/// period `π/mc²` of the modulation.
pub fn unitarity_defect(p: f64, params: &PhysicsParams, n_times: usize) -> CliResult<f64> {
    // one period of the box holds exactly one wavelength
    let length = 2.0 * std::f64::consts::PI / p.abs();
    let g = make_grid(16, 0.0, length)?;
    let u0 = UpperField::from_fn(&g, |x| Complex64::from_polar(1.0 / length.sqrt(), p * x));
    let c0 = u0.to_momentum();
    let period = std::f64::consts::PI / params.rest_energy();
    let mut worst = 0.0f64;
    for i in 0..=n_times {
        let t = period * i as f64 / n_times as f64;
        let u = UpperField::to_position(&g, &tcl_free_solution(&g, &c0, t, params)?)?;
        let q = reconstruct_q(&u, t, &PotentialSpec::Zero, params)?;
        worst = worst.max((u.norm_sq() + q.norm_sq() - 1.0).abs());
    }
    Ok(worst)
}

/// Interaction-picture phase error over grid modes `|p| ≤ 2`, `t ≤ 10`.
pub fn smallmass_error(m: f64) -> CliResult<f64> {
    let cfg = SmallMassConfig {
        params: PhysicsParams::new(m, 1.0, 1.0)?,
        grid: grid(1024),
        t_max: 10.0,
    };
    Ok(cfg.phase_error(2.0, 200))
}

pub fn smallmass_norm_defect(m: f64) -> CliResult<f64> {
    let g = grid(1024);
    let params = PhysicsParams::new(m, 1.0, 1.0)?;
    let u = packet(&g, 0.5)?;
    let mut worst = 0.0f64;
    for t in [1.0, 5.0, 10.0] {
        let out = propagate_smallmass(&u, t, &PotentialSpec::Zero, &params)?;
        worst = worst.max((out.norm_sq() - u.norm_sq()).abs());
    }
    Ok(worst)
}

pub fn pauli_norm_drift(n_points: usize, a: f64, dt: f64, t: f64) -> CliResult<f64> {
    let g = grid(n_points);
    let u = packet(&g, 0.2)?;
    let steps = (t / dt).round() as usize;
    let out = propagate_pauli(&u, dt, steps, &PotentialSpec::Linear { a }, &unit())?;
    Ok((out.norm_sq() - 1.0).abs())
}

/// Desk-scale versions of the acceptance measurements.
pub fn run_suite(suite: Suite) -> CliResult<Vec<CriterionResult>> {
    let mut out = Vec::new();
    match suite {
        Suite::FreeExactness => {
            let (err, drift) = strang_free_error(256, 1e-3, 10.0, 0.3)?;
            out.push(CriterionResult::at_most("strang-vs-exact-l2", err, 1e-8));
            out.push(CriterionResult::at_most("strang-norm-drift", drift, 1e-10));
            out.push(CriterionResult::at_most("exact-vs-dense", dense_free_error(64, 5.0)?, 1e-10));
            out.push(CriterionResult::at_most(
                "pauli-norm-drift",
                pauli_norm_drift(256, 0.1, 1e-2, 5.0)?,
                1e-10,
            ));
        }
        Suite::KernelQuadrature => {
            out.push(CriterionResult::at_most(
                "free-closed-form-vs-kernel",
                kernel_free_error(128, &[0.5, 1.0, 2.0])?,
                1e-8,
            ));
            let times: Vec<f64> = (1..=8).map(|k| 0.25 * k as f64).collect();
            let curve = kernel_linear_curve(128, 0.1, &times)?;
            for point in &curve {
                println!(
                    "  t={:.2} relative_error={:.3e} quadrature_change={:.3e}",
                    point.t, point.relative_error, point.quadrature_change
                );
            }
            let change = curve.iter().map(|p| p.quadrature_change).fold(0.0, f64::max);
            let disc = curve.iter().map(|p| p.relative_error).fold(0.0, f64::max);
            out.push(CriterionResult::at_most("linear-quadrature-convergence", change, 1e-6));
            out.push(CriterionResult::at_most("linear-generator-discrepancy", disc, 1e-3));
        }
        Suite::SmallmassScaling => {
            let (e1, e2) = (smallmass_error(0.05)?, smallmass_error(0.025)?);
            println!("  E(0.05)={e1:.6e} E(0.025)={e2:.6e}");
            out.push(CriterionResult::near("phase-error-ratio", e1 / e2, 4.0, 0.2));
            out.push(CriterionResult::at_most("norm-preservation", smallmass_norm_defect(0.05)?, 1e-12));
        }
        Suite::OrderTests => {
            let s = strang_dense_error(128, 0.1, &[0.1, 0.05], 2.0)?;
            out.push(CriterionResult::near("strang-order-ratio", s[0] / s[1], 4.0, 0.15));
            let r1 = rk4_free_error(512, 0.025, 5.0, 1.0, 5.0)?;
            let r2 = rk4_free_error(512, 0.0125, 5.0, 1.0, 5.0)?;
            out.push(CriterionResult::near("rk4-order-ratio", r1 / r2, 16.0, 0.25));
            let u1 = unitarity_defect(0.1, &unit(), 2000)?;
            let u2 = unitarity_defect(0.05, &unit(), 2000)?;
            out.push(CriterionResult::near("unitarity-restoration-ratio", u1 / u2, 16.0, 0.25));
        }
    }
    Ok(out)
}
