//! Uniform periodic 1D grid and the unitary discrete Fourier pair on it.
//!
//! Momentum nodes are stored in transform order: index `j < n/2` carries
//! `2πj/(n·dx)`, index `j ≥ n/2` carries `2π(j−n)/(n·dx)`, so the single
//! Nyquist node is negative.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

pub const MIN_POINTS: usize = 8;

struct Plans {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

#[derive(Clone)]
pub struct GridSpec {
    n_points: usize,
    x_min: f64,
    x_max: f64,
    dx: f64,
    plans: Arc<Plans>,
}

impl fmt::Debug for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GridSpec")
            .field("n_points", &self.n_points)
            .field("x_min", &self.x_min)
            .field("x_max", &self.x_max)
            .field("dx", &self.dx)
            .finish()
    }
}

impl PartialEq for GridSpec {
    fn eq(&self, other: &Self) -> bool {
        self.n_points == other.n_points && self.x_min == other.x_min && self.x_max == other.x_max
    }
}

/// Build a periodic grid of `n_points` nodes `x_i = x_min + i·dx` covering
/// `[x_min, x_max)`.
pub fn make_grid(n_points: usize, x_min: f64, x_max: f64) -> Result<GridSpec> {
    if !(x_min.is_finite() && x_max.is_finite()) {
        return Err(Error::InvalidGrid("grid bounds must be finite".into()));
    }
    if x_max <= x_min {
        return Err(Error::InvalidGrid(format!(
            "non-positive extent: x_min = {x_min}, x_max = {x_max}"
        )));
    }
    if n_points < MIN_POINTS {
        return Err(Error::InvalidGrid(format!(
            "{n_points} points requested, at least {MIN_POINTS} required"
        )));
    }
    let mut planner = FftPlanner::new();
    let plans = Plans {
        forward: planner.plan_fft_forward(n_points),
        inverse: planner.plan_fft_inverse(n_points),
    };
    Ok(GridSpec {
        n_points,
        x_min,
        x_max,
        dx: (x_max - x_min) / n_points as f64,
        plans: Arc::new(plans),
    })
}

impl GridSpec {
    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.x(i)).collect()
    }

    /// Signed mode number of transform index `j`.
    pub fn mode_number(&self, j: usize) -> i64 {
        let n = self.n_points as i64;
        let j = j as i64;
        if j < n / 2 {
            j
        } else {
            j - n
        }
    }

    pub fn k(&self, j: usize) -> f64 {
        2.0 * PI * self.mode_number(j) as f64 / self.length()
    }

    /// Momentum nodes in transform order.
    pub fn momenta(&self) -> Vec<f64> {
        (0..self.n_points).map(|j| self.k(j)).collect()
    }

    /// Magnitude of the Nyquist momentum, the largest on the grid.
    pub fn k_max(&self) -> f64 {
        PI / self.dx
    }

    /// Spacing of the momentum grid.
    pub fn dk(&self) -> f64 {
        2.0 * PI / self.length()
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.n_points {
            return Err(Error::LengthMismatch {
                expected: self.n_points,
                got: len,
            });
        }
        Ok(())
    }

    /// Unitary forward transform `c_j = n^{-1/2} Σ_i u_i e^{-2πi·ij/n}`.
    pub fn forward(&self, values: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_len(values.len())?;
        let mut buf = values.to_vec();
        self.forward_in_place(&mut buf);
        Ok(buf)
    }

    /// Inverse of [`GridSpec::forward`].
    pub fn inverse(&self, coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_len(coeffs.len())?;
        let mut buf = coeffs.to_vec();
        self.inverse_in_place(&mut buf);
        Ok(buf)
    }

    pub(crate) fn forward_in_place(&self, buf: &mut [Complex64]) {
        debug_assert_eq!(buf.len(), self.n_points);
        self.plans.forward.process(buf);
        let scale = 1.0 / (self.n_points as f64).sqrt();
        buf.iter_mut().for_each(|c| *c *= scale);
    }

    pub(crate) fn inverse_in_place(&self, buf: &mut [Complex64]) {
        debug_assert_eq!(buf.len(), self.n_points);
        self.plans.inverse.process(buf);
        let scale = 1.0 / (self.n_points as f64).sqrt();
        buf.iter_mut().for_each(|c| *c *= scale);
    }

    /// Width of the edge strip inspected by the tail-clearance guard.
    pub fn edge_width(&self) -> usize {
        (self.n_points / 32).max(1)
    }
}
