//! Non-relativistic Pauli baseline, `H_eff = eφ + p²/2m` in 1D with `B = 0`.
//! There is no lower component, so the predicted leakage is identically zero.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{UpperField, TAIL_THRESHOLD};
use crate::grid::GridSpec;
use crate::physics::{PhysicsParams, PotentialSpec};

/// Strang splitting with the same layout as the Dirac stepper: half
/// potential phase, spectral kinetic phase, half potential phase.
pub struct PauliStepper {
    grid: GridSpec,
    half_phase: Vec<Complex64>,
    kinetic: Vec<Complex64>,
    dt: f64,
}

impl PauliStepper {
    pub fn new(grid: &GridSpec, dt: f64, potential: &PotentialSpec, params: &PhysicsParams) -> Result<Self> {
        params.require_massive()?;
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidTime(format!("dt = {dt} must be positive")));
        }
        let half_phase = potential
            .values(grid)?
            .iter()
            .map(|x| Complex64::from_polar(1.0, -params.e * x * dt / 2.0))
            .collect();
        let kinetic = grid
            .momenta()
            .iter()
            .map(|k| Complex64::from_polar(1.0, -k * k * dt / (2.0 * params.m)))
            .collect();
        Ok(Self {
            grid: grid.clone(),
            half_phase,
            kinetic,
            dt,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn advance(&self, u: &mut [Complex64], n_steps: usize) {
        for _ in 0..n_steps {
            u.iter_mut().zip(&self.half_phase).for_each(|(a, p)| *a *= p);
            self.grid.forward_in_place(u);
            u.iter_mut().zip(&self.kinetic).for_each(|(a, p)| *a *= p);
            self.grid.inverse_in_place(u);
            u.iter_mut().zip(&self.half_phase).for_each(|(a, p)| *a *= p);
        }
    }

    pub fn step_field(&self, u: &UpperField, n_steps: usize) -> Result<UpperField> {
        if *u.grid() != self.grid {
            return Err(Error::GridMismatch);
        }
        let mut values = u.values().to_vec();
        self.advance(&mut values, n_steps);
        UpperField::new(&self.grid, values)
    }
}

/// One Strang step of the Pauli equation.
pub fn step_pauli(u: &UpperField, dt: f64, potential: &PotentialSpec, params: &PhysicsParams) -> Result<UpperField> {
    propagate_pauli(u, dt, 1, potential, params)
}

/// `n_steps` Strang steps; fails if the result reaches the periodic seam.
pub fn propagate_pauli(
    u: &UpperField,
    dt: f64,
    n_steps: usize,
    potential: &PotentialSpec,
    params: &PhysicsParams,
) -> Result<UpperField> {
    let out = PauliStepper::new(u.grid(), dt, potential, params)?.step_field(u, n_steps)?;
    let tail = out.boundary_tail();
    if tail > TAIL_THRESHOLD {
        return Err(Error::BoundaryContact {
            amplitude: tail,
            threshold: TAIL_THRESHOLD,
            time: dt * n_steps as f64,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::gaussian_packet;
    use crate::grid::make_grid;

    fn unit() -> PhysicsParams {
        PhysicsParams::new(1.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn plane_wave_phase() {
        let g = make_grid(64, -10.0, 10.0).unwrap();
        let k = g.k(4);
        let u = UpperField::from_fn(&g, |x| Complex64::from_polar(1.0, k * x));
        let t = 0.8;
        let out = propagate_pauli(&u, 0.1, 8, &PotentialSpec::Zero, &unit());
        // plane waves fill the grid, so only the raw stepper is meaningful here
        assert!(matches!(out, Err(Error::BoundaryContact { .. })));
        let out = PauliStepper::new(&g, 0.1, &PotentialSpec::Zero, &unit())
            .unwrap()
            .step_field(&u, 8)
            .unwrap();
        let phase = Complex64::from_polar(1.0, -k * k * t / 2.0);
        for (a, b) in out.values().iter().zip(u.values()) {
            assert!((a - phase * b).norm() < 1e-12);
        }
    }

    #[test]
    fn free_spreading() {
        // σ²(t) = σ0² + t²/(4m²σ0²)
        let params = PhysicsParams::new(1.5, 1.0, 1.0).unwrap();
        let g = make_grid(1024, -30.0, 30.0).unwrap();
        let u = gaussian_packet(&g, 10.0, 0.3, -2.0).unwrap();
        let s0 = u.position_variance();
        assert!((s0 - 2.5).abs() < 1e-10);
        let t = 6.0;
        let out = propagate_pauli(&u, 0.01, 600, &PotentialSpec::Zero, &params).unwrap();
        let expected = s0 + t * t / (4.0 * params.m * params.m * s0);
        assert!((out.position_variance() - expected).abs() < 1e-6 * expected);
        assert!((out.mean_momentum() - 0.3).abs() < 1e-10);
        assert!((out.norm_sq() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn ehrenfest_in_linear_potential() {
        let params = unit();
        let g = make_grid(1024, -30.0, 30.0).unwrap();
        let u = gaussian_packet(&g, 10.0, 0.2, 0.0).unwrap();
        let a = 0.1;
        let stepper = PauliStepper::new(&g, 1e-2, &PotentialSpec::Linear { a }, &params).unwrap();
        let mut field = u.clone();
        for step in 1..=5 {
            field = stepper.step_field(&field, 100).unwrap();
            let t = step as f64;
            assert!((field.mean_momentum() - (0.2 - a * t)).abs() < 1e-6);
            assert!((field.norm_sq() - 1.0).abs() < 1e-10);
        }
    }
}
