//! Leading-order time-convolutionless equation for the upper spinor in the
//! weak-relativistic regime, 1D with `A = B = 0`:
//!
//! ```text
//! du/dt = −i[ eφ + (p²/2m)·κ(t) + (e/4m²c²)(φ″ + iφ′p)·χ(t) ] u
//! κ(t) = 1 − e^{2imc²t}
//! χ(t) = 1 − e^{2imc²t}(1 − 2imc²t)
//! ```
//!
//! The upper field lives in the frame with the global phase `e^{−imc²t}`
//! rotated out. Spin-orbit and magnetic terms vanish identically in this
//! reduction.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::UpperField;
use crate::grid::GridSpec;
use crate::physics::{PhysicsParams, PotentialSpec};

/// Upper bound on `dt·2mc²` for explicit stepping.
pub const OSCILLATION_LIMIT: f64 = 0.1;

/// Upper bound on `dt·k_max²/m`, inside the imaginary-axis stability
/// interval of classical RK4 (`2√2`).
pub const KINETIC_STABILITY_LIMIT: f64 = 2.5;

/// Default momentum cutoff of the stepper in units of `mc`. A perturbation
/// entering mode `p` at the minimum of its envelope regrows by up to
/// `e^{p²/2m²c²}`; at `6mc` that bounds roundoff amplification by `e^{18}`.
pub const DEFAULT_CUTOFF_MC: f64 = 6.0;

/// Largest grid accepted by [`kernel_quadrature_oracle`].
pub const KERNEL_ORACLE_MAX_POINTS: usize = 512;

/// Minimum quadrature intervals per unit of `mc²t`.
pub const QUAD_NODES_PER_UNIT: f64 = 200.0;

/// Relative change under node doubling below which the quadrature counts as
/// converged.
pub const QUAD_CONVERGENCE_TOL: f64 = 1e-6;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Time modulation of the two non-potential terms of the generator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TclGeneratorTerms {
    /// Multiplies `−i·p²/2m`.
    pub kinetic_factor: Complex64,
    /// Multiplies `−i·(e/4m²c²)(φ″ + iφ′p)`.
    pub correction_factor: Complex64,
}

impl TclGeneratorTerms {
    pub fn at(t: f64, params: &PhysicsParams) -> Self {
        let omega = 2.0 * params.rest_energy();
        let osc = Complex64::from_polar(1.0, omega * t);
        Self {
            kinetic_factor: c(1.0, 0.0) - osc,
            correction_factor: c(1.0, 0.0) - osc * c(1.0, -omega * t),
        }
    }

    /// Long-time average: `e^{2imc²t}` averages to zero, leaving both factors
    /// equal to one.
    pub fn time_averaged() -> Self {
        Self {
            kinetic_factor: c(1.0, 0.0),
            correction_factor: c(1.0, 0.0),
        }
    }
}

/// The generator with potential data precomputed on a grid.
#[derive(Debug, Clone)]
pub struct TclOperator {
    grid: GridSpec,
    params: PhysicsParams,
    /// e·φ
    energy: Vec<f64>,
    /// e·φ′
    energy_gradient: Vec<f64>,
    /// e·φ″
    energy_laplacian: Vec<f64>,
    momenta: Vec<f64>,
}

impl TclOperator {
    pub fn new(grid: &GridSpec, potential: &PotentialSpec, params: &PhysicsParams) -> Result<Self> {
        params.require_massive()?;
        let e = params.e;
        let scale = |v: Vec<f64>| v.into_iter().map(|x| e * x).collect::<Vec<_>>();
        Ok(Self {
            grid: grid.clone(),
            params: *params,
            energy: scale(potential.values(grid)?),
            energy_gradient: scale(potential.gradient(grid)?),
            energy_laplacian: scale(potential.laplacian(grid)?),
            momenta: grid.momenta(),
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn params(&self) -> &PhysicsParams {
        &self.params
    }

    /// `du/dt` at time `t`.
    pub fn apply(&self, u: &UpperField, t: f64) -> Result<UpperField> {
        self.apply_with(u, &TclGeneratorTerms::at(t, &self.params))
    }

    /// `du/dt` for arbitrary modulation factors.
    pub fn apply_with(&self, u: &UpperField, terms: &TclGeneratorTerms) -> Result<UpperField> {
        if *u.grid() != self.grid {
            return Err(Error::GridMismatch);
        }
        let mut out = vec![c(0.0, 0.0); self.grid.n_points()];
        let mut scratch = Scratch::new(self.grid.n_points());
        self.apply_raw(u.values(), terms, &mut out, &mut scratch);
        UpperField::new(&self.grid, out)
    }

    fn apply_raw(&self, u: &[Complex64], terms: &TclGeneratorTerms, out: &mut [Complex64], s: &mut Scratch) {
        let m = self.params.m;
        let cl = self.params.c;
        s.pu.copy_from_slice(u);
        self.grid.forward_in_place(&mut s.pu);
        s.p2u.copy_from_slice(&s.pu);
        for ((a, b), k) in s.pu.iter_mut().zip(s.p2u.iter_mut()).zip(&self.momenta) {
            *a *= k;
            *b *= k * k;
        }
        self.grid.inverse_in_place(&mut s.pu);
        self.grid.inverse_in_place(&mut s.p2u);

        let kin = terms.kinetic_factor / (2.0 * m);
        let corr = terms.correction_factor / (4.0 * m * m * cl * cl);
        for i in 0..u.len() {
            let correction = self.energy_laplacian[i] * u[i] + I * self.energy_gradient[i] * s.pu[i];
            let bracket = self.energy[i] * u[i] + kin * s.p2u[i] + corr * correction;
            out[i] = -I * bracket;
        }
    }

    /// Pauli generator `−i(eφ + p²/2m)` on `u`.
    pub fn apply_pauli(&self, u: &UpperField) -> Result<UpperField> {
        let p2 = u.apply_p2();
        let values = (0..u.values().len())
            .map(|i| -I * (self.energy[i] * u.values()[i] + p2.values()[i] / (2.0 * self.params.m)))
            .collect();
        UpperField::new(&self.grid, values)
    }

    /// Static correction `−i(e/4m²c²)(φ″ + iφ′p)` on `u`.
    pub fn apply_static_correction(&self, u: &UpperField) -> Result<UpperField> {
        let m = self.params.m;
        let cl = self.params.c;
        let pu = u.apply_p();
        let scale = 1.0 / (4.0 * m * m * cl * cl);
        let values = (0..u.values().len())
            .map(|i| {
                -I * scale * (self.energy_laplacian[i] * u.values()[i] + I * self.energy_gradient[i] * pu.values()[i])
            })
            .collect();
        UpperField::new(&self.grid, values)
    }
}

struct Scratch {
    pu: Vec<Complex64>,
    p2u: Vec<Complex64>,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Self {
            pu: vec![c(0.0, 0.0); n],
            p2u: vec![c(0.0, 0.0); n],
        }
    }
}

pub fn apply_tcl_generator(
    u: &UpperField,
    t: f64,
    potential: &PotentialSpec,
    params: &PhysicsParams,
) -> Result<UpperField> {
    TclOperator::new(u.grid(), potential, params)?.apply(u, t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GuardPolicy {
    Refuse,
    Warn,
}

/// Checks the two step-size conditions of explicit RK4 stepping. `k_max` is
/// the largest momentum the stepper retains.
pub fn check_tcl_step(k_max: f64, dt: f64, params: &PhysicsParams, policy: GuardPolicy) -> Result<()> {
    params.require_massive()?;
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidTime(format!("dt = {dt} must be positive")));
    }
    let ratio = dt * 2.0 * params.rest_energy();
    if ratio > OSCILLATION_LIMIT {
        let err = Error::OscillationUnresolved {
            dt,
            ratio,
            limit: OSCILLATION_LIMIT,
        };
        match policy {
            GuardPolicy::Refuse => return Err(err),
            GuardPolicy::Warn => log::warn!("{err}"),
        }
    }
    let kinetic = dt * k_max.powi(2) / params.m;
    if kinetic > KINETIC_STABILITY_LIMIT {
        let err = Error::KineticUnstable {
            dt,
            ratio: kinetic,
            limit: KINETIC_STABILITY_LIMIT,
        };
        match policy {
            GuardPolicy::Refuse => return Err(err),
            GuardPolicy::Warn => log::warn!("{err}"),
        }
    }
    Ok(())
}

/// Classical fourth-order Runge-Kutta integrator for the TCL equation.
///
/// After every step, modes with `|k|` above the cutoff are zeroed.
pub struct TclStepper {
    op: TclOperator,
    dt: f64,
    cutoff: f64,
    k: [Vec<Complex64>; 4],
    stage: Vec<Complex64>,
    scratch: Scratch,
}

impl TclStepper {
    /// Stepper with the default cutoff `DEFAULT_CUTOFF_MC·mc`.
    pub fn new(op: TclOperator, dt: f64, policy: GuardPolicy) -> Result<Self> {
        let cutoff = DEFAULT_CUTOFF_MC * op.params.m * op.params.c;
        Self::with_cutoff(op, dt, cutoff, policy)
    }

    /// Stepper retaining `|k| ≤ cutoff`; pass `f64::INFINITY` to keep every mode.
    pub fn with_cutoff(op: TclOperator, dt: f64, cutoff: f64, policy: GuardPolicy) -> Result<Self> {
        if cutoff.is_nan() || cutoff <= 0.0 {
            return Err(Error::InvalidParams(format!("momentum cutoff {cutoff} must be positive")));
        }
        check_tcl_step(op.grid.k_max().min(cutoff), dt, &op.params, policy)?;
        let n = op.grid.n_points();
        let zeros = || vec![c(0.0, 0.0); n];
        Ok(Self {
            op,
            dt,
            cutoff,
            k: [zeros(), zeros(), zeros(), zeros()],
            stage: zeros(),
            scratch: Scratch::new(n),
        })
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    fn filter(&mut self, u: &mut [Complex64]) {
        if self.cutoff >= self.op.grid.k_max() {
            return;
        }
        self.op.grid.forward_in_place(u);
        for (a, k) in u.iter_mut().zip(&self.op.momenta) {
            if k.abs() > self.cutoff {
                *a = c(0.0, 0.0);
            }
        }
        self.op.grid.inverse_in_place(u);
    }

    pub fn operator(&self) -> &TclOperator {
        &self.op
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// One RK4 step from `t` to `t + dt`, in place.
    pub fn step(&mut self, u: &mut [Complex64], t: f64) {
        let dt = self.dt;
        let params = self.op.params;
        let half = TclGeneratorTerms::at(t + 0.5 * dt, &params);
        let [k1, k2, k3, k4] = &mut self.k;

        self.op.apply_raw(u, &TclGeneratorTerms::at(t, &params), k1, &mut self.scratch);
        for ((s, a), b) in self.stage.iter_mut().zip(u.iter()).zip(k1.iter()) {
            *s = a + b * (0.5 * dt);
        }
        self.op.apply_raw(&self.stage, &half, k2, &mut self.scratch);
        for ((s, a), b) in self.stage.iter_mut().zip(u.iter()).zip(k2.iter()) {
            *s = a + b * (0.5 * dt);
        }
        self.op.apply_raw(&self.stage, &half, k3, &mut self.scratch);
        for ((s, a), b) in self.stage.iter_mut().zip(u.iter()).zip(k3.iter()) {
            *s = a + b * dt;
        }
        self.op.apply_raw(&self.stage, &TclGeneratorTerms::at(t + dt, &params), k4, &mut self.scratch);
        for i in 0..u.len() {
            u[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (dt / 6.0);
        }
        self.filter(u);
    }

    /// `n_steps` steps starting at `t0`.
    pub fn advance(&mut self, u: &mut UpperField, t0: f64, n_steps: usize) -> Result<()> {
        if *u.grid() != self.op.grid {
            return Err(Error::GridMismatch);
        }
        for s in 0..n_steps {
            self.step(u.values_mut(), t0 + s as f64 * self.dt);
        }
        Ok(())
    }
}

/// A single RK4 step. Refuses step sizes that violate [`check_tcl_step`].
pub fn step_tcl(
    u: &UpperField,
    t: f64,
    dt: f64,
    potential: &PotentialSpec,
    params: &PhysicsParams,
) -> Result<UpperField> {
    let op = TclOperator::new(u.grid(), potential, params)?;
    let mut stepper = TclStepper::new(op, dt, GuardPolicy::Refuse)?;
    let mut out = u.clone();
    stepper.advance(&mut out, t, 1)?;
    Ok(out)
}

/// Per-mode factor `exp[(p²/4m²c²)(e^{2imc²t} − 2imc²t − 1)]` solving the
/// free TCL equation.
pub fn tcl_free_factor(p: f64, t: f64, params: &PhysicsParams) -> Complex64 {
    let mc2 = params.rest_energy();
    let omega_t = 2.0 * mc2 * t;
    let scale = p * p / (4.0 * mc2 * params.m);
    let bracket = Complex64::from_polar(1.0, omega_t) - c(1.0, omega_t);
    (bracket * scale).exp()
}

/// Analytic free evolution of momentum coefficients.
pub fn tcl_free_solution(
    grid: &GridSpec,
    coeffs: &[Complex64],
    t: f64,
    params: &PhysicsParams,
) -> Result<Vec<Complex64>> {
    params.require_massive()?;
    if coeffs.len() != grid.n_points() {
        return Err(Error::LengthMismatch {
            expected: grid.n_points(),
            got: coeffs.len(),
        });
    }
    Ok(coeffs
        .iter()
        .enumerate()
        .map(|(j, a)| a * tcl_free_factor(grid.k(j), t, params))
        .collect())
}

/// Lower spinor reconstructed from the evolved upper field:
///
/// `QΨ = (−i/4m²c³)[(2imc² p − eφ′)(1 − e^{2imc²t}) − 2imc²t·e^{2imc²t}·eφ′] u`.
pub fn reconstruct_q(
    u: &UpperField,
    t: f64,
    potential: &PotentialSpec,
    params: &PhysicsParams,
) -> Result<UpperField> {
    params.require_massive()?;
    let grid = u.grid();
    let mc2 = params.rest_energy();
    let omega_t = 2.0 * mc2 * t;
    let osc = Complex64::from_polar(1.0, omega_t);
    let kappa = c(1.0, 0.0) - osc;
    let secular = c(0.0, omega_t) * osc;
    let grad: Vec<f64> = potential.gradient(grid)?.iter().map(|g| params.e * g).collect();
    let pu = u.apply_p();
    let prefactor = -I / (4.0 * params.m * mc2 * params.c);
    let values = (0..grid.n_points())
        .map(|i| {
            let bracket = (c(0.0, 2.0 * mc2) * pu.values()[i] - grad[i] * u.values()[i]) * kappa
                - secular * grad[i] * u.values()[i];
            prefactor * bracket
        })
        .collect();
    UpperField::new(grid, values)
}

/// Output of [`kernel_quadrature_oracle`].
#[derive(Debug, Clone)]
pub struct KernelOracleResult {
    /// Full generator `G(t)u` in the original, phase-rotated frame.
    pub generator: UpperField,
    /// `G(t)u + ieφu`: the second-order kernel alone.
    pub kernel: UpperField,
    /// Relative change of the kernel between `n_quad` and `2·n_quad`.
    pub relative_change: f64,
    pub n_quad: usize,
}

/// Applies the interaction-picture block `e^{ieφτ} p e^{−ieφτ}` to `v`.
fn conjugated_p(grid: &GridSpec, energy: &[f64], tau: f64, v: &[Complex64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = v
        .iter()
        .zip(energy)
        .map(|(a, e)| a * Complex64::from_polar(1.0, -e * tau))
        .collect();
    grid.forward_in_place(&mut buf);
    for (j, a) in buf.iter_mut().enumerate() {
        *a *= grid.k(j);
    }
    grid.inverse_in_place(&mut buf);
    buf.iter_mut()
        .zip(energy)
        .for_each(|(a, e)| *a *= Complex64::from_polar(1.0, e * tau));
    buf
}

/// `K₂(t)v = −∫₀ᵗ ds [H_I(t)]_{PQ}[H_I(s)]_{QP} v` by composite Simpson
/// quadrature with `n_intervals` (even) panels, where for `U₀(τ) =
/// exp(−i(σ_z mc² + eφ)τ)`:
///
/// `[H_I(τ)]_{PQ} = c e^{2imc²τ} e^{ieφτ} p e^{−ieφτ}`,
/// `[H_I(τ)]_{QP} = c e^{−2imc²τ} e^{ieφτ} p e^{−ieφτ}`.
fn interaction_kernel(
    grid: &GridSpec,
    energy: &[f64],
    params: &PhysicsParams,
    t: f64,
    v: &[Complex64],
    n_intervals: usize,
) -> Vec<Complex64> {
    let n = grid.n_points();
    let mut acc = vec![c(0.0, 0.0); n];
    if t == 0.0 {
        return acc;
    }
    let omega = 2.0 * params.rest_energy();
    let h = t / n_intervals as f64;
    for node in 0..=n_intervals {
        let s = node as f64 * h;
        let weight = if node == 0 || node == n_intervals {
            1.0
        } else if node % 2 == 1 {
            4.0
        } else {
            2.0
        } * h
            / 3.0;
        let lower = conjugated_p(grid, energy, s, v);
        let phase = Complex64::from_polar(params.c * weight, -omega * s);
        for (a, b) in acc.iter_mut().zip(&lower) {
            *a += phase * b;
        }
    }
    let upper = conjugated_p(grid, energy, t, &acc);
    let outer = Complex64::from_polar(-params.c, omega * t);
    upper.iter().map(|a| outer * a).collect()
}

/// Ground truth for the TCL generator from the second-order kernel, mapped
/// back to the original picture with the global phase `e^{−imc²t}` removed:
/// `G(t) = −ieφ + e^{−ieφt} K₂(t) e^{ieφt}`.
///
/// Requires `n_quad ≥ 200·mc²t` panels; the result is computed at `n_quad`
/// and `2·n_quad` and rejected when the two differ by more than
/// [`QUAD_CONVERGENCE_TOL`] relative.
pub fn kernel_quadrature_oracle(
    u: &UpperField,
    t: f64,
    potential: &PotentialSpec,
    params: &PhysicsParams,
    n_quad: usize,
) -> Result<KernelOracleResult> {
    params.require_massive()?;
    let grid = u.grid();
    if grid.n_points() > KERNEL_ORACLE_MAX_POINTS {
        return Err(Error::GridTooLarge {
            n_points: grid.n_points(),
            limit: KERNEL_ORACLE_MAX_POINTS,
        });
    }
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidTime(format!("t = {t} must be ≥ 0")));
    }
    let required = (QUAD_NODES_PER_UNIT * params.rest_energy() * t).ceil() as usize;
    if n_quad < required.max(2) {
        return Err(Error::InvalidParams(format!(
            "n_quad = {n_quad} below the required {} panels",
            required.max(2)
        )));
    }
    let n_quad = n_quad + n_quad % 2;
    let energy: Vec<f64> = potential.values(grid)?.iter().map(|x| params.e * x).collect();
    let into_frame: Vec<Complex64> = u
        .values()
        .iter()
        .zip(&energy)
        .map(|(a, e)| a * Complex64::from_polar(1.0, e * t))
        .collect();
    let back = |k: Vec<Complex64>| -> Vec<Complex64> {
        k.iter()
            .zip(&energy)
            .map(|(a, e)| a * Complex64::from_polar(1.0, -e * t))
            .collect()
    };
    let coarse = back(interaction_kernel(grid, &energy, params, t, &into_frame, n_quad));
    let fine = back(interaction_kernel(grid, &energy, params, t, &into_frame, 2 * n_quad));

    let diff: f64 = coarse.iter().zip(&fine).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
    let scale: f64 = fine.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    let relative_change = if scale > 0.0 { diff / scale } else { diff };
    if relative_change >= QUAD_CONVERGENCE_TOL {
        return Err(Error::QuadratureNotConverged {
            change: relative_change,
            tolerance: QUAD_CONVERGENCE_TOL,
        });
    }
    let generator: Vec<Complex64> = fine
        .iter()
        .zip(u.values())
        .zip(&energy)
        .map(|((k, a), e)| k - I * e * a)
        .collect();
    Ok(KernelOracleResult {
        generator: UpperField::new(grid, generator)?,
        kernel: UpperField::new(grid, fine)?,
        relative_change,
        n_quad,
    })
}

/// One point of the generator-versus-oracle discrepancy curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorDiscrepancy {
    pub t: f64,
    /// `‖G_tcl u − G_oracle u‖ / ‖K₂ u‖` (absolute when the kernel vanishes).
    pub relative_error: f64,
    pub quadrature_change: f64,
}

/// Compares [`apply_tcl_generator`] against [`kernel_quadrature_oracle`] at each `t`.
pub fn generator_discrepancy_curve(
    u: &UpperField,
    times: &[f64],
    potential: &PotentialSpec,
    params: &PhysicsParams,
    n_quad_per_unit: f64,
) -> Result<Vec<GeneratorDiscrepancy>> {
    let op = TclOperator::new(u.grid(), potential, params)?;
    times
        .iter()
        .map(|&t| {
            let n_quad = ((n_quad_per_unit * params.rest_energy() * t).ceil() as usize).max(2);
            let oracle = kernel_quadrature_oracle(u, t, potential, params, n_quad)?;
            let closed = op.apply(u, t)?;
            let diff = closed.distance(&oracle.generator)?;
            let scale = oracle.kernel.norm();
            Ok(GeneratorDiscrepancy {
                t,
                relative_error: if scale > 0.0 { diff / scale } else { diff },
                quadrature_change: oracle.relative_change,
            })
        })
        .collect()
}
