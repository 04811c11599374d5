//! Leading order in the mass for the free field. In the interaction picture
//! of the massless Hamiltonian `c p σ_x` the upper spinor obeys
//! `∂ₜPψ = −2imc²cos²(cpt)Pψ`, solved per mode by a pure phase.

use nalgebra::Matrix2;
use num_complex::Complex64;

use crate::dirac::free_mode_propagator;
use crate::error::{Error, Result};
use crate::field::{SpinorField, UpperField};
use crate::grid::GridSpec;
use crate::physics::{PhysicsParams, PotentialSpec};

/// `sin(x)/x`, with a series branch near zero.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// `exp(−imc²t[1 + sinc(2cpt)])`
pub fn smallmass_phase(p: f64, t: f64, params: &PhysicsParams) -> Complex64 {
    let angle = -params.rest_energy() * t * (1.0 + sinc(2.0 * params.c * p * t));
    Complex64::from_polar(1.0, angle)
}

/// Per-mode phase evolution of the upper spinor in the massless
/// interaction picture.
pub fn propagate_smallmass(
    u: &UpperField,
    t: f64,
    potential: &PotentialSpec,
    params: &PhysicsParams,
) -> Result<UpperField> {
    params.validate()?;
    if !potential.is_zero() {
        return Err(Error::PotentialNotZero);
    }
    if params.m == 0.0 || t == 0.0 {
        return Ok(u.clone());
    }
    Ok(u.map_momentum(|k| smallmass_phase(k, t, params)))
}

/// `U₀(t) = exp(−i c p σ_x t)` for one mode.
pub fn massless_mode_propagator(p: f64, t: f64, params: &PhysicsParams) -> Matrix2<Complex64> {
    let theta = params.c * p * t;
    let (s, co) = theta.sin_cos();
    Matrix2::new(
        Complex64::new(co, 0.0),
        Complex64::new(0.0, -s),
        Complex64::new(0.0, -s),
        Complex64::new(co, 0.0),
    )
}

fn apply_massless(state: &SpinorField, t: f64, params: &PhysicsParams, potential: &PotentialSpec) -> Result<SpinorField> {
    params.validate()?;
    if !potential.is_zero() {
        return Err(Error::PotentialNotZero);
    }
    let grid = state.grid();
    let mut up = state.upper().to_momentum();
    let mut lo = state.lower().to_momentum();
    for (j, (a, b)) in up.iter_mut().zip(lo.iter_mut()).enumerate() {
        let m = massless_mode_propagator(grid.k(j), t, params);
        let (x, y) = (*a, *b);
        *a = m[(0, 0)] * x + m[(0, 1)] * y;
        *b = m[(1, 0)] * x + m[(1, 1)] * y;
    }
    SpinorField::new(UpperField::to_position(grid, &up)?, UpperField::to_position(grid, &lo)?)
}

/// `ψ = U₀†(t)Ψ` with the massless free propagator.
pub fn to_interaction_picture(
    state: &SpinorField,
    t: f64,
    potential: &PotentialSpec,
    params: &PhysicsParams,
) -> Result<SpinorField> {
    apply_massless(state, -t, params, potential)
}

/// `Ψ = U₀(t)ψ`, inverse of [`to_interaction_picture`].
pub fn from_interaction_picture(
    state: &SpinorField,
    t: f64,
    potential: &PotentialSpec,
    params: &PhysicsParams,
) -> Result<SpinorField> {
    apply_massless(state, t, params, potential)
}

/// Upper amplitude of the exact Dirac evolution of `[1, 0]ᵀ` in mode `p`,
/// seen in the massless interaction picture: `[U₀†(t) e^{−iHt}]₀₀`.
pub fn exact_interaction_amplitude(p: f64, t: f64, params: &PhysicsParams) -> Complex64 {
    let m = massless_mode_propagator(p, t, params).adjoint() * free_mode_propagator(p, t, params);
    m[(0, 0)]
}

/// Regime description for a small-mass comparison.
#[derive(Debug, Clone)]
pub struct SmallMassConfig {
    pub params: PhysicsParams,
    pub grid: GridSpec,
    pub t_max: f64,
}

impl SmallMassConfig {
    /// `mc²·t_max`; the leading-order claim is meaningful while this is O(1).
    pub fn mass_parameter(&self) -> f64 {
        self.params.rest_energy() * self.t_max
    }

    /// [`interaction_phase_error`] over grid modes with `|p| ≤ p_max` and
    /// `n_times` uniform times in `(0, t_max]`.
    pub fn phase_error(&self, p_max: f64, n_times: usize) -> f64 {
        let momenta: Vec<f64> = self.grid.momenta().into_iter().filter(|k| k.abs() <= p_max).collect();
        let times: Vec<f64> = (1..=n_times).map(|i| self.t_max * i as f64 / n_times as f64).collect();
        interaction_phase_error(&self.params, &momenta, &times)
    }
}

/// `max |e^{imc²t}·smallmass_phase − exact amplitude|` over the given modes
/// and times. The factor `e^{imc²t}` is the p-independent global phase
/// separating the two conventions.
pub fn interaction_phase_error(params: &PhysicsParams, momenta: &[f64], times: &[f64]) -> f64 {
    let mut worst = 0.0f64;
    for &t in times {
        let global = Complex64::from_polar(1.0, params.rest_energy() * t);
        for &p in momenta {
            let approx = smallmass_phase(p, t, params) * global;
            let exact = exact_interaction_amplitude(p, t, params);
            worst = worst.max((approx - exact).norm());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::gaussian_packet;
    use crate::grid::make_grid;

    fn light() -> PhysicsParams {
        PhysicsParams::new(0.05, 1.0, 1.0).unwrap()
    }

    #[test]
    fn sinc_branches_agree() {
        assert_eq!(sinc(0.0), 1.0);
        let x = 1e-4;
        assert!((sinc(x * 0.999) - (x * 0.999).sin() / (x * 0.999)).abs() < 1e-16);
        assert!((sinc(x) - x.sin() / x).abs() < 1e-16);
    }

    #[test]
    fn phase_limits() {
        let params = light();
        assert_eq!(smallmass_phase(1.3, 0.0, &params), Complex64::new(1.0, 0.0));
        let t = 2.0;
        let z = smallmass_phase(0.0, t, &params);
        assert!((z - Complex64::from_polar(1.0, -2.0 * params.rest_energy() * t)).norm() < 1e-15);
        assert!((smallmass_phase(0.7, t, &params) - smallmass_phase(-0.7, t, &params)).norm() < 1e-15);
        assert!((smallmass_phase(0.7, t, &params).norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn log_derivative() {
        let params = light();
        let (p, t) = (1.0, 0.7);
        let h = 1e-5;
        let d = (smallmass_phase(p, t + h, &params) - smallmass_phase(p, t - h, &params)) / (2.0 * h);
        let log_d = d / smallmass_phase(p, t, &params);
        let expected = Complex64::new(0.0, -2.0 * params.rest_energy() * (params.c * p * t).cos().powi(2));
        assert!((log_d - expected).norm() < 1e-8, "{log_d} vs {expected}");
    }

    #[test]
    fn propagation_is_unitary_and_massless_frozen() {
        let g = make_grid(256, -30.0, 30.0).unwrap();
        let u = gaussian_packet(&g, 10.0, 0.5, 0.0).unwrap();
        let out = propagate_smallmass(&u, 7.0, &PotentialSpec::Zero, &light()).unwrap();
        assert!((out.norm() - u.norm()).abs() < 1e-12);
        assert_eq!(propagate_smallmass(&u, 0.0, &PotentialSpec::Zero, &light()).unwrap(), u);
        let massless = PhysicsParams::new(0.0, 1.0, 1.0).unwrap();
        assert_eq!(propagate_smallmass(&u, 3.0, &PotentialSpec::Zero, &massless).unwrap(), u);
        assert_eq!(
            propagate_smallmass(&u, 1.0, &PotentialSpec::Linear { a: 0.1 }, &light()),
            Err(Error::PotentialNotZero)
        );
    }

    #[test]
    fn interaction_picture_round_trip() {
        let g = make_grid(128, -20.0, 20.0).unwrap();
        let psi = SpinorField::from_upper(gaussian_packet(&g, 10.0, 0.5, 0.0).unwrap());
        let same = to_interaction_picture(&psi, 0.0, &PotentialSpec::Zero, &light()).unwrap();
        assert!(same.distance(&psi).unwrap() < 1e-14);
        let t = 3.3;
        let ip = to_interaction_picture(&psi, t, &PotentialSpec::Zero, &light()).unwrap();
        let back = from_interaction_picture(&ip, t, &PotentialSpec::Zero, &light()).unwrap();
        assert!(back.distance(&psi).unwrap() < 1e-12);
        assert!((ip.norm_sq() - psi.norm_sq()).abs() < 1e-12);
    }

    #[test]
    fn quarter_rotation_moves_to_lower() {
        let params = light();
        let (p, t) = (1.0, std::f64::consts::FRAC_PI_2);
        let m = massless_mode_propagator(p, t, &params).adjoint();
        let v = m * nalgebra::Vector2::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        assert!(v[0].norm() < 1e-15);
        assert!((v[1] - Complex64::new(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn exact_amplitude_tracks_phase_to_second_order() {
        let params = light();
        let err = interaction_phase_error(&params, &[0.0, 0.5, 1.0, 2.0], &[1.0, 5.0, 10.0]);
        // residual is O((mc²t)²)
        assert!(err < 0.5 * (params.rest_energy() * 10.0).powi(2), "{err}");
        let rest = interaction_phase_error(&params, &[0.0], &[1.0, 5.0, 10.0]);
        assert!(rest < 1e-14);
    }
}
