//! Field containers on a [`GridSpec`] and the spectral momentum operator.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::GridSpec;

/// Amplitude above which a field is considered to touch the periodic seam.
pub const TAIL_THRESHOLD: f64 = 1e-8;

/// One complex component on the grid: the upper (P-space) spinor, or the
/// lower one when held inside a [`SpinorField`].
#[derive(Debug, Clone, PartialEq)]
pub struct UpperField {
    values: Vec<Complex64>,
    grid: GridSpec,
}

impl UpperField {
    pub fn new(grid: &GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(Error::LengthMismatch {
                expected: grid.n_points(),
                got: values.len(),
            });
        }
        Ok(Self {
            values,
            grid: grid.clone(),
        })
    }

    pub fn zeros(grid: &GridSpec) -> Self {
        Self {
            values: vec![Complex64::new(0.0, 0.0); grid.n_points()],
            grid: grid.clone(),
        }
    }

    pub fn from_fn(grid: &GridSpec, f: impl Fn(f64) -> Complex64) -> Self {
        let values = (0..grid.n_points()).map(|i| f(grid.x(i))).collect();
        Self {
            values,
            grid: grid.clone(),
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// Discrete L² norm squared, `Σ|u_i|²·dx`.
    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.dx()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Pointwise `|u(x_i)|²`.
    pub fn density(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    /// Unitary transform to momentum coefficients (transform order).
    pub fn to_momentum(&self) -> Vec<Complex64> {
        let mut buf = self.values.clone();
        self.grid.forward_in_place(&mut buf);
        buf
    }

    /// Inverse of [`UpperField::to_momentum`].
    pub fn to_position(grid: &GridSpec, coeffs: &[Complex64]) -> Result<Self> {
        let values = grid.inverse(coeffs)?;
        Ok(Self {
            values,
            grid: grid.clone(),
        })
    }

    /// Applies a diagonal momentum-space multiplier `f(k_j)`.
    pub fn map_momentum(&self, f: impl Fn(f64) -> Complex64) -> Self {
        let mut buf = self.to_momentum();
        for (j, c) in buf.iter_mut().enumerate() {
            *c *= f(self.grid.k(j));
        }
        self.grid.inverse_in_place(&mut buf);
        Self {
            values: buf,
            grid: self.grid.clone(),
        }
    }

    /// Momentum operator `p = −i d/dx` by spectral multiplication.
    pub fn apply_p(&self) -> Self {
        self.map_momentum(|k| Complex64::new(k, 0.0))
    }

    pub fn apply_p2(&self) -> Self {
        self.map_momentum(|k| Complex64::new(k * k, 0.0))
    }

    pub fn scale(&self, a: Complex64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * a).collect(),
            grid: self.grid.clone(),
        }
    }

    /// `self + a·other`
    pub fn axpy(&self, a: Complex64, other: &Self) -> Result<Self> {
        self.check_same_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(u, v)| u + a * v)
            .collect();
        Ok(Self {
            values,
            grid: self.grid.clone(),
        })
    }

    /// Pointwise product with a position-space function sampled at nodes.
    pub fn mul_pointwise(&self, f: &[Complex64]) -> Result<Self> {
        if f.len() != self.values.len() {
            return Err(Error::LengthMismatch {
                expected: self.values.len(),
                got: f.len(),
            });
        }
        Ok(Self {
            values: self.values.iter().zip(f).map(|(u, g)| u * g).collect(),
            grid: self.grid.clone(),
        })
    }

    /// `Σ_i conj(self_i)·other_i·dx`
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.check_same_grid(other)?;
        let s: Complex64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(u, v)| u.conj() * v)
            .sum();
        Ok(s * self.grid.dx())
    }

    /// Discrete L² distance `‖self − other‖`.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        self.check_same_grid(other)?;
        let s: f64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(u, v)| (u - v).norm_sqr())
            .sum();
        Ok((s * self.grid.dx()).sqrt())
    }

    pub fn check_same_grid(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    /// Largest amplitude inside the edge strips at either end of the grid.
    pub fn boundary_tail(&self) -> f64 {
        let w = self.grid.edge_width();
        let n = self.values.len();
        self.values[..w]
            .iter()
            .chain(&self.values[n - w..])
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }

    /// Momentum expectation `Σ k_j |c_j|² / Σ |c_j|²`.
    pub fn mean_momentum(&self) -> f64 {
        let c = self.to_momentum();
        let total: f64 = c.iter().map(|v| v.norm_sqr()).sum();
        let weighted: f64 = c
            .iter()
            .enumerate()
            .map(|(j, v)| self.grid.k(j) * v.norm_sqr())
            .sum();
        weighted / total
    }

    pub fn mean_position(&self) -> f64 {
        let d = self.density();
        let total: f64 = d.iter().sum();
        d.iter()
            .enumerate()
            .map(|(i, w)| self.grid.x(i) * w)
            .sum::<f64>()
            / total
    }

    pub fn position_variance(&self) -> f64 {
        let mean = self.mean_position();
        let d = self.density();
        let total: f64 = d.iter().sum();
        d.iter()
            .enumerate()
            .map(|(i, w)| (self.grid.x(i) - mean).powi(2) * w)
            .sum::<f64>()
            / total
    }
}

/// The two-component 1D Dirac state.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorField {
    upper: UpperField,
    lower: UpperField,
}

impl SpinorField {
    pub fn new(upper: UpperField, lower: UpperField) -> Result<Self> {
        upper.check_same_grid(&lower)?;
        Ok(Self { upper, lower })
    }

    /// State prepared purely in the upper component.
    pub fn from_upper(upper: UpperField) -> Self {
        let lower = UpperField::zeros(upper.grid());
        Self { upper, lower }
    }

    pub fn grid(&self) -> &GridSpec {
        self.upper.grid()
    }

    pub fn upper(&self) -> &UpperField {
        &self.upper
    }

    pub fn lower(&self) -> &UpperField {
        &self.lower
    }

    pub fn into_parts(self) -> (UpperField, UpperField) {
        (self.upper, self.lower)
    }

    pub fn norm_sq(&self) -> f64 {
        self.upper.norm_sq() + self.lower.norm_sq()
    }

    pub fn distance(&self, other: &Self) -> Result<f64> {
        let du = self.upper.distance(&other.upper)?;
        let dl = self.lower.distance(&other.lower)?;
        Ok((du * du + dl * dl).sqrt())
    }

    pub fn boundary_tail(&self) -> f64 {
        self.upper.boundary_tail().max(self.lower.boundary_tail())
    }
}

/// Gaussian packet `(2/(π x0))^{1/4} exp[−(x−x_c)²/x0 + i p0 (x−x_c)]`,
/// renormalized to unit discrete norm.
///
/// `x0` is the width parameter of the exponent (the position variance is
/// `x0/4`). Packets whose tails exceed [`TAIL_THRESHOLD`] in the edge strips
/// of the periodic grid are rejected.
pub fn gaussian_packet(grid: &GridSpec, x0: f64, p0: f64, x_center: f64) -> Result<UpperField> {
    if !(x0.is_finite() && x0 > 0.0) {
        return Err(Error::InvalidPacket(format!("width x0 = {x0} must be positive")));
    }
    if !(p0.is_finite() && x_center.is_finite()) {
        return Err(Error::InvalidPacket("non-finite packet parameters".into()));
    }
    let amp = (2.0 / (PI * x0)).powf(0.25);
    let mut field = UpperField::from_fn(grid, |x| {
        let d = x - x_center;
        Complex64::from_polar(amp * (-d * d / x0).exp(), p0 * d)
    });
    let tail = field.boundary_tail();
    if tail > TAIL_THRESHOLD {
        return Err(Error::InvalidPacket(format!(
            "tail amplitude {tail:.3e} at the grid boundary exceeds {TAIL_THRESHOLD:.0e}"
        )));
    }
    let norm = field.norm();
    field.values_mut().iter_mut().for_each(|v| *v /= norm);
    Ok(field)
}
