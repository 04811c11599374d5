//! Propagators for the full two-component 1D Dirac equation
//! `i∂ₜΨ = (c p σ_x + m c² σ_z + eφ)Ψ`.

use nalgebra::{DMatrix, DVector, Matrix2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{SpinorField, UpperField, TAIL_THRESHOLD};
use crate::grid::GridSpec;
use crate::physics::{dense_dirac_hamiltonian, h1d, lambda_of, PhysicsParams, PotentialSpec};

/// Largest grid accepted by the dense oracle.
pub const DENSE_ORACLE_MAX_POINTS: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiracScheme {
    ExactFree,
    StrangSplit,
    DenseOracle,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiracPropagatorConfig {
    pub dt: f64,
    pub scheme: DiracScheme,
}

impl DiracPropagatorConfig {
    pub fn validate(&self, potential: &PotentialSpec) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidTime(format!("dt = {} must be positive", self.dt)));
        }
        if self.scheme == DiracScheme::ExactFree && !potential.is_zero() {
            return Err(Error::PotentialNotZero);
        }
        Ok(())
    }

    /// Advance `state` by `n_steps · dt`.
    pub fn propagate(
        &self,
        state: &SpinorField,
        n_steps: usize,
        potential: &PotentialSpec,
        params: &PhysicsParams,
    ) -> Result<SpinorField> {
        self.validate(potential)?;
        let t = self.dt * n_steps as f64;
        match self.scheme {
            DiracScheme::ExactFree => propagate_exact_free(state, t, params),
            DiracScheme::StrangSplit => propagate_strang(state, self.dt, n_steps, potential, params),
            DiracScheme::DenseOracle => dense_oracle(state, t, potential, params),
        }
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `exp(−i H(p) t) = cos(λt) I − i sin(λt)/λ · H(p)`.
pub fn free_mode_propagator(p: f64, t: f64, params: &PhysicsParams) -> Matrix2<Complex64> {
    let lambda = lambda_of(p, params);
    let (cos, sin_over) = if lambda == 0.0 {
        (1.0, t)
    } else {
        ((lambda * t).cos(), (lambda * t).sin() / lambda)
    };
    let h = h1d(p, params).map(|v| c(0.0, -sin_over * v));
    Matrix2::identity() * c(cos, 0.0) + h
}

fn apply_mode_matrices(state: &SpinorField, mats: &[Matrix2<Complex64>]) -> SpinorField {
    let grid = state.grid();
    let mut up = state.upper().to_momentum();
    let mut lo = state.lower().to_momentum();
    apply_mode_matrices_in_place(&mut up, &mut lo, mats);
    grid.inverse_in_place(&mut up);
    grid.inverse_in_place(&mut lo);
    SpinorField::new(
        UpperField::new(grid, up).expect("grid length"),
        UpperField::new(grid, lo).expect("grid length"),
    )
    .expect("common grid")
}

fn apply_mode_matrices_in_place(
    up: &mut [Complex64],
    lo: &mut [Complex64],
    mats: &[Matrix2<Complex64>],
) {
    for ((a, b), m) in up.iter_mut().zip(lo.iter_mut()).zip(mats) {
        let (x, y) = (*a, *b);
        *a = m[(0, 0)] * x + m[(0, 1)] * y;
        *b = m[(1, 0)] * x + m[(1, 1)] * y;
    }
}

/// Exact free evolution, mode by mode in momentum space.
pub fn propagate_exact_free(state: &SpinorField, t: f64, params: &PhysicsParams) -> Result<SpinorField> {
    params.validate()?;
    let mats: Vec<_> = state
        .grid()
        .momenta()
        .iter()
        .map(|&k| free_mode_propagator(k, t, params))
        .collect();
    Ok(apply_mode_matrices(state, &mats))
}

/// Expectation of the free Hamiltonian, evaluated per momentum mode.
pub fn free_energy_expectation(state: &SpinorField, params: &PhysicsParams) -> f64 {
    let grid = state.grid();
    let up = state.upper().to_momentum();
    let lo = state.lower().to_momentum();
    let mut energy = 0.0;
    let mut norm = 0.0;
    for (j, (a, b)) in up.iter().zip(&lo).enumerate() {
        let h = h1d(grid.k(j), params);
        let ha = h[(0, 0)] * a + h[(0, 1)] * b;
        let hb = h[(1, 0)] * a + h[(1, 1)] * b;
        energy += (a.conj() * ha + b.conj() * hb).re;
        norm += a.norm_sqr() + b.norm_sqr();
    }
    energy / norm
}

/// Second-order symmetric splitting: half potential phase, exact kinetic
/// step per mode, half potential phase.
pub struct StrangStepper {
    grid: GridSpec,
    half_phase: Vec<Complex64>,
    kinetic: Vec<Matrix2<Complex64>>,
    dt: f64,
}

impl StrangStepper {
    pub fn new(grid: &GridSpec, dt: f64, potential: &PotentialSpec, params: &PhysicsParams) -> Result<Self> {
        params.validate()?;
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidTime(format!("dt = {dt} must be positive")));
        }
        let v = potential.values(grid)?;
        let max_energy = v.iter().fold(0.0f64, |m, x| m.max((params.e * x).abs()));
        if dt * max_energy > 1.0 {
            log::warn!("dt*max|eφ| = {:.3} > 1: potential phase poorly resolved", dt * max_energy);
        }
        let half_phase = v
            .iter()
            .map(|x| Complex64::from_polar(1.0, -params.e * x * dt / 2.0))
            .collect();
        let kinetic = grid
            .momenta()
            .iter()
            .map(|&k| free_mode_propagator(k, dt, params))
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

    /// Advance `n_steps` in place on raw component buffers.
    pub fn advance(&self, up: &mut [Complex64], lo: &mut [Complex64], n_steps: usize) {
        for _ in 0..n_steps {
            for ((a, b), ph) in up.iter_mut().zip(lo.iter_mut()).zip(&self.half_phase) {
                *a *= ph;
                *b *= ph;
            }
            self.grid.forward_in_place(up);
            self.grid.forward_in_place(lo);
            apply_mode_matrices_in_place(up, lo, &self.kinetic);
            self.grid.inverse_in_place(up);
            self.grid.inverse_in_place(lo);
            for ((a, b), ph) in up.iter_mut().zip(lo.iter_mut()).zip(&self.half_phase) {
                *a *= ph;
                *b *= ph;
            }
        }
    }

    pub fn step_field(&self, state: &SpinorField, n_steps: usize) -> Result<SpinorField> {
        if *state.grid() != self.grid {
            return Err(Error::GridMismatch);
        }
        let (upper, lower) = state.clone().into_parts();
        let mut up = upper.into_values();
        let mut lo = lower.into_values();
        self.advance(&mut up, &mut lo, n_steps);
        SpinorField::new(UpperField::new(&self.grid, up)?, UpperField::new(&self.grid, lo)?)
    }
}

/// Strang-split propagation for `n_steps` of size `dt`. Fails if the final
/// state has reached the periodic seam.
pub fn propagate_strang(
    state: &SpinorField,
    dt: f64,
    n_steps: usize,
    potential: &PotentialSpec,
    params: &PhysicsParams,
) -> Result<SpinorField> {
    let stepper = StrangStepper::new(state.grid(), dt, potential, params)?;
    let out = stepper.step_field(state, n_steps)?;
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

/// Brute-force reference: eigendecomposition of the assembled `2N × 2N`
/// Hamiltonian, reusable for many evolution times.
pub struct DenseDiracOracle {
    grid: GridSpec,
    energies: DVector<f64>,
    vectors: DMatrix<Complex64>,
    hermiticity_defect: f64,
}

impl DenseDiracOracle {
    pub fn new(grid: &GridSpec, potential: &PotentialSpec, params: &PhysicsParams) -> Result<Self> {
        if grid.n_points() > DENSE_ORACLE_MAX_POINTS {
            return Err(Error::GridTooLarge {
                n_points: grid.n_points(),
                limit: DENSE_ORACLE_MAX_POINTS,
            });
        }
        let h = dense_dirac_hamiltonian(grid, potential, params)?;
        let hermiticity_defect = (&h - h.adjoint()).norm();
        let eig = h
            .try_symmetric_eigen(f64::EPSILON, 0)
            .ok_or(Error::Eigendecomposition)?;
        Ok(Self {
            grid: grid.clone(),
            energies: eig.eigenvalues,
            vectors: eig.eigenvectors,
            hermiticity_defect,
        })
    }

    /// Frobenius norm of `H − H†` for the assembled matrix.
    pub fn hermiticity_defect(&self) -> f64 {
        self.hermiticity_defect
    }

    pub fn energies(&self) -> &DVector<f64> {
        &self.energies
    }

    pub fn evolve(&self, state: &SpinorField, t: f64) -> Result<SpinorField> {
        if *state.grid() != self.grid {
            return Err(Error::GridMismatch);
        }
        let n = self.grid.n_points();
        let mut psi = DVector::zeros(2 * n);
        psi.rows_mut(0, n).copy_from_slice(state.upper().values());
        psi.rows_mut(n, n).copy_from_slice(state.lower().values());
        let mut coeffs = self.vectors.ad_mul(&psi);
        for (a, e) in coeffs.iter_mut().zip(self.energies.iter()) {
            *a *= Complex64::from_polar(1.0, -e * t);
        }
        let out = &self.vectors * coeffs;
        SpinorField::new(
            UpperField::new(&self.grid, out.rows(0, n).iter().copied().collect())?,
            UpperField::new(&self.grid, out.rows(n, n).iter().copied().collect())?,
        )
    }
}

pub fn dense_oracle(
    state: &SpinorField,
    t: f64,
    potential: &PotentialSpec,
    params: &PhysicsParams,
) -> Result<SpinorField> {
    DenseDiracOracle::new(state.grid(), potential, params)?.evolve(state, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::gaussian_packet;
    use crate::grid::make_grid;

    fn unit() -> PhysicsParams {
        PhysicsParams::new(1.0, 1.0, 1.0).unwrap()
    }

    /// `exp(−iHt)` through the eigendecomposition of the 2×2 matrix.
    fn eig_exp(p: f64, t: f64, params: &PhysicsParams) -> Matrix2<Complex64> {
        let h = h1d(p, params);
        let eig = h.symmetric_eigen();
        let mut out = Matrix2::zeros();
        for k in 0..2 {
            let v = eig.eigenvectors.column(k).map(|x| c(x, 0.0));
            let phase = Complex64::from_polar(1.0, -eig.eigenvalues[k] * t);
            out += v * v.transpose() * phase;
        }
        out
    }

    #[test]
    fn identity_at_zero_time() {
        let u = free_mode_propagator(0.7, 0.0, &unit());
        assert!((u - Matrix2::identity()).norm() < 1e-15);
    }

    #[test]
    fn rest_frame_phases() {
        let t = 0.83;
        let u = free_mode_propagator(0.0, t, &unit());
        assert!((u[(0, 0)] - Complex64::from_polar(1.0, -t)).norm() < 1e-15);
        assert!((u[(1, 1)] - Complex64::from_polar(1.0, t)).norm() < 1e-15);
        assert_eq!(u[(0, 1)], c(0.0, 0.0));
    }

    #[test]
    fn half_lower_probability_matches_eigen_oracle() {
        let params = unit();
        let lambda = 2f64.sqrt();
        let t = std::f64::consts::FRAC_PI_2 / lambda;
        let u = free_mode_propagator(1.0, t, &params);
        let oracle = eig_exp(1.0, t, &params);
        assert!((u - oracle).norm() < 1e-13);
        assert!((u[(1, 0)].norm_sqr() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn unitary_with_unit_determinant() {
        let params = PhysicsParams::new(0.3, 2.0, 1.0).unwrap();
        for &(p, t) in &[(0.1, 0.5), (-3.0, 7.0), (10.0, 0.01)] {
            let u = free_mode_propagator(p, t, &params);
            assert!((u.adjoint() * u - Matrix2::identity()).norm() < 1e-13);
            assert!((u.determinant().norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn massless_zero_momentum_is_identity() {
        let params = PhysicsParams::new(0.0, 1.0, 0.0).unwrap();
        let u = free_mode_propagator(0.0, 3.0, &params);
        assert!((u - Matrix2::identity()).norm() < 1e-15);
    }

    #[test]
    fn exact_free_generates_lower_component() {
        let g = make_grid(512, -30.0, 30.0).unwrap();
        let psi = SpinorField::from_upper(gaussian_packet(&g, 10.0, 0.0, 0.0).unwrap());
        let same = propagate_exact_free(&psi, 0.0, &unit()).unwrap();
        assert!(same.distance(&psi).unwrap() < 1e-14);
        let later = propagate_exact_free(&psi, 2.0, &unit()).unwrap();
        assert!(later.lower().norm_sq() > 1e-3);
        assert!((later.norm_sq() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exact_free_leakage_is_mode_sum() {
        let params = unit();
        let g = make_grid(256, -30.0, 30.0).unwrap();
        let u = gaussian_packet(&g, 10.0, 0.3, 0.0).unwrap();
        let coeffs = u.to_momentum();
        let total: f64 = coeffs.iter().map(|v| v.norm_sqr()).sum();
        let psi = SpinorField::from_upper(u);
        for &t in &[0.5, 3.0, 9.0] {
            let out = propagate_exact_free(&psi, t, &params).unwrap();
            let analytic: f64 = coeffs
                .iter()
                .enumerate()
                .map(|(j, v)| {
                    let k = g.k(j);
                    let l = lambda_of(k, &params);
                    v.norm_sqr() / total * (k * k / (l * l)) * (l * t).sin().powi(2)
                })
                .sum();
            assert!((out.lower().norm_sq() - analytic).abs() < 1e-13);
        }
    }

    #[test]
    fn exact_free_conserves_energy() {
        let params = PhysicsParams::new(1.0, 1.0, 1.0).unwrap();
        let g = make_grid(256, -30.0, 30.0).unwrap();
        let psi = SpinorField::from_upper(gaussian_packet(&g, 10.0, 0.4, 2.0).unwrap());
        let e0 = free_energy_expectation(&psi, &params);
        for &t in &[1.0, 5.0, 10.0] {
            let out = propagate_exact_free(&psi, t, &params).unwrap();
            assert!((free_energy_expectation(&out, &params) - e0).abs() < 1e-10);
        }
    }

    #[test]
    fn strang_free_matches_exact() {
        let params = unit();
        let g = make_grid(256, -30.0, 30.0).unwrap();
        let psi = SpinorField::from_upper(gaussian_packet(&g, 10.0, 0.2, 0.0).unwrap());
        let split = propagate_strang(&psi, 1e-2, 300, &PotentialSpec::Zero, &params).unwrap();
        let exact = propagate_exact_free(&psi, 3.0, &params).unwrap();
        assert!(split.distance(&exact).unwrap() < 1e-12);
    }

    #[test]
    fn config_validation() {
        let cfg = DiracPropagatorConfig {
            dt: 0.1,
            scheme: DiracScheme::ExactFree,
        };
        assert_eq!(
            cfg.validate(&PotentialSpec::Linear { a: 0.1 }),
            Err(Error::PotentialNotZero)
        );
        let bad = DiracPropagatorConfig {
            dt: 0.0,
            scheme: DiracScheme::StrangSplit,
        };
        assert!(matches!(bad.validate(&PotentialSpec::Zero), Err(Error::InvalidTime(_))));
    }

    #[test]
    fn strang_detects_boundary_contact() {
        let params = unit();
        let g = make_grid(128, -8.0, 8.0).unwrap();
        let psi = SpinorField::from_upper(gaussian_packet(&g, 1.0, 3.0, 3.0).unwrap());
        let r = propagate_strang(&psi, 1e-2, 400, &PotentialSpec::Zero, &params);
        assert!(matches!(r, Err(Error::BoundaryContact { .. })));
    }

    #[test]
    fn dense_oracle_guards_and_identity() {
        let params = unit();
        let big = make_grid(512, -30.0, 30.0).unwrap();
        let psi = SpinorField::from_upper(gaussian_packet(&big, 10.0, 0.0, 0.0).unwrap());
        assert!(matches!(
            dense_oracle(&psi, 1.0, &PotentialSpec::Zero, &params),
            Err(Error::GridTooLarge { .. })
        ));

        let g = make_grid(32, -15.0, 15.0).unwrap();
        let psi = SpinorField::from_upper(gaussian_packet(&g, 4.0, 0.0, 0.0).unwrap());
        let oracle = DenseDiracOracle::new(&g, &PotentialSpec::Linear { a: 0.1 }, &params).unwrap();
        assert!(oracle.hermiticity_defect() <= 1e-12);
        let same = oracle.evolve(&psi, 0.0).unwrap();
        assert!(same.distance(&psi).unwrap() < 1e-12);
    }

    #[test]
    fn dense_oracle_matches_exact_free() {
        let params = unit();
        let g = make_grid(64, -30.0, 30.0).unwrap();
        let psi = SpinorField::from_upper(gaussian_packet(&g, 10.0, 0.2, 0.0).unwrap());
        let dense = dense_oracle(&psi, 4.0, &PotentialSpec::Zero, &params).unwrap();
        let exact = propagate_exact_free(&psi, 4.0, &params).unwrap();
        assert!(dense.distance(&exact).unwrap() < 1e-10);
        assert!((dense.norm_sq() - 1.0).abs() < 1e-10);
    }
}
