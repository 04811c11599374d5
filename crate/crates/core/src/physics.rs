//! Physical parameters, static potentials and the algebra of the 1D Dirac
//! Hamiltonian `H(p) = c p σ_x + m c² σ_z + eφ`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, Matrix2, Vector2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::GridSpec;

/// Mass, light speed and charge in units with ħ = 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicsParams {
    pub m: f64,
    pub c: f64,
    pub e: f64,
}

impl PhysicsParams {
    pub fn new(m: f64, c: f64, e: f64) -> Result<Self> {
        let p = Self { m, c, e };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.m.is_finite() && self.m >= 0.0) {
            return Err(Error::InvalidParams(format!("mass m = {} must be ≥ 0", self.m)));
        }
        if !(self.c.is_finite() && self.c > 0.0) {
            return Err(Error::InvalidParams(format!("light speed c = {} must be > 0", self.c)));
        }
        if !self.e.is_finite() {
            return Err(Error::InvalidParams("charge must be finite".into()));
        }
        Ok(())
    }

    /// Rest energy `mc²`.
    pub fn rest_energy(&self) -> f64 {
        self.m * self.c * self.c
    }

    pub(crate) fn require_massive(&self) -> Result<()> {
        self.validate()?;
        if self.m <= 0.0 {
            return Err(Error::InvalidParams(
                "this reduction expands in 1/m and needs m > 0".into(),
            ));
        }
        Ok(())
    }
}

/// Static scalar potential φ(x). The potential energy is `e·φ(x)`.
#[derive(Debug, Clone, PartialEq)]
pub enum PotentialSpec {
    Zero,
    /// `φ(x) = a·x`
    Linear { a: f64 },
    /// φ sampled at the grid nodes; derivatives are taken spectrally.
    Tabulated(Vec<f64>),
}

impl PotentialSpec {
    pub fn is_zero(&self) -> bool {
        match self {
            PotentialSpec::Zero => true,
            PotentialSpec::Linear { a } => *a == 0.0,
            PotentialSpec::Tabulated(v) => v.iter().all(|&x| x == 0.0),
        }
    }

    fn table<'a>(&self, values: &'a [f64], grid: &GridSpec) -> Result<&'a [f64]> {
        if values.len() != grid.n_points() {
            return Err(Error::LengthMismatch {
                expected: grid.n_points(),
                got: values.len(),
            });
        }
        Ok(values)
    }

    /// φ at every node.
    pub fn values(&self, grid: &GridSpec) -> Result<Vec<f64>> {
        match self {
            PotentialSpec::Zero => Ok(vec![0.0; grid.n_points()]),
            PotentialSpec::Linear { a } => Ok(grid.positions().iter().map(|x| a * x).collect()),
            PotentialSpec::Tabulated(v) => Ok(self.table(v, grid)?.to_vec()),
        }
    }

    /// φ′ at every node.
    pub fn gradient(&self, grid: &GridSpec) -> Result<Vec<f64>> {
        match self {
            PotentialSpec::Zero => Ok(vec![0.0; grid.n_points()]),
            PotentialSpec::Linear { a } => Ok(vec![*a; grid.n_points()]),
            PotentialSpec::Tabulated(v) => Ok(spectral_derivative(grid, self.table(v, grid)?, 1)),
        }
    }

    /// φ″ at every node.
    pub fn laplacian(&self, grid: &GridSpec) -> Result<Vec<f64>> {
        match self {
            PotentialSpec::Zero | PotentialSpec::Linear { .. } => Ok(vec![0.0; grid.n_points()]),
            PotentialSpec::Tabulated(v) => Ok(spectral_derivative(grid, self.table(v, grid)?, 2)),
        }
    }

    /// Largest `|φ|` over the grid.
    pub fn max_abs(&self, grid: &GridSpec) -> Result<f64> {
        Ok(self.values(grid)?.iter().fold(0.0, |m, v| m.max(v.abs())))
    }
}

/// Spectral derivative of a real periodic table. The Nyquist mode is dropped
/// for odd orders so the result stays real.
fn spectral_derivative(grid: &GridSpec, values: &[f64], order: u32) -> Vec<f64> {
    let n = grid.n_points();
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    grid.forward_in_place(&mut buf);
    for (j, c) in buf.iter_mut().enumerate() {
        if order % 2 == 1 && j == n / 2 {
            *c = Complex64::new(0.0, 0.0);
            continue;
        }
        *c *= Complex64::new(0.0, grid.k(j)).powu(order);
    }
    grid.inverse_in_place(&mut buf);
    buf.iter().map(|c| c.re).collect()
}

/// Free-particle energy `λ = √(p²c² + m²c⁴)`.
pub fn lambda_of(p: f64, params: &PhysicsParams) -> f64 {
    (p * params.c).hypot(params.rest_energy())
}

/// Momentum-space Dirac matrix `c p σ_x + m c² σ_z`.
pub fn h1d(p: f64, params: &PhysicsParams) -> Matrix2<f64> {
    let mc2 = params.rest_energy();
    let cp = params.c * p;
    Matrix2::new(mc2, cp, cp, -mc2)
}

/// Positive- and negative-energy eigenvectors of [`h1d`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeEigenbasis {
    pub u_plus: Vector2<f64>,
    pub u_minus: Vector2<f64>,
    pub lambda: f64,
}

/// Closed-form eigenbasis of [`h1d`]. For `m = p = 0` the Hamiltonian
/// vanishes; the canonical basis with `λ = 0` is returned.
pub fn free_eigenbasis(p: f64, params: &PhysicsParams) -> FreeEigenbasis {
    let lambda = lambda_of(p, params);
    if lambda == 0.0 {
        return FreeEigenbasis {
            u_plus: Vector2::new(1.0, 0.0),
            u_minus: Vector2::new(0.0, 1.0),
            lambda: 0.0,
        };
    }
    let mc2 = params.rest_energy();
    let pc = p * params.c;
    let norm = ((lambda + mc2) / (2.0 * lambda)).sqrt();
    let ratio = pc / (lambda + mc2);
    FreeEigenbasis {
        u_plus: Vector2::new(norm, norm * ratio),
        u_minus: Vector2::new(-norm * ratio, norm),
        lambda,
    }
}

/// Dense momentum operator on the grid, `P = F† diag(k) F`, assembled from
/// the explicit mode sum rather than through the FFT.
pub fn dense_momentum_operator(grid: &GridSpec) -> DMatrix<Complex64> {
    let n = grid.n_points();
    let mut kernel = vec![Complex64::new(0.0, 0.0); n];
    for (d, slot) in kernel.iter_mut().enumerate().take(n / 2 + 1) {
        let mut s = Complex64::new(0.0, 0.0);
        for j in 0..n {
            let phase = 2.0 * PI * (grid.mode_number(j) * d as i64) as f64 / n as f64;
            s += Complex64::from_polar(grid.k(j), phase);
        }
        *slot = s / n as f64;
    }
    kernel[0].im = 0.0;
    kernel[n / 2].im = 0.0;
    for d in 1..n / 2 {
        kernel[n - d] = kernel[d].conj();
    }
    DMatrix::from_fn(n, n, |a, b| kernel[(a + n - b) % n])
}

/// Full `2N × 2N` Dirac Hamiltonian ordered as all upper nodes, then all
/// lower nodes.
pub fn dense_dirac_hamiltonian(
    grid: &GridSpec,
    potential: &PotentialSpec,
    params: &PhysicsParams,
) -> Result<DMatrix<Complex64>> {
    params.validate()?;
    let n = grid.n_points();
    let p = dense_momentum_operator(grid);
    let v = potential.values(grid)?;
    let mc2 = params.rest_energy();
    let mut h = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        let ev = params.e * v[i];
        h[(i, i)] = Complex64::new(mc2 + ev, 0.0);
        h[(n + i, n + i)] = Complex64::new(-mc2 + ev, 0.0);
    }
    h.view_mut((0, n), (n, n)).copy_from(&(&p * Complex64::new(params.c, 0.0)));
    h.view_mut((n, 0), (n, n)).copy_from(&(&p * Complex64::new(params.c, 0.0)));
    Ok(h)
}

/// `h = PHP`, `r = PHQ`, `w = QHP`, `d = QHQ`.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianBlocks {
    pub h: DMatrix<Complex64>,
    pub r: DMatrix<Complex64>,
    pub w: DMatrix<Complex64>,
    pub d: DMatrix<Complex64>,
}

pub fn block_partition(dense: &DMatrix<Complex64>) -> Result<HamiltonianBlocks> {
    let (rows, cols) = dense.shape();
    if rows != cols {
        return Err(Error::ShapeMismatch(format!("{rows}x{cols} matrix is not square")));
    }
    if rows % 2 != 0 {
        return Err(Error::OddDimension(rows));
    }
    let n = rows / 2;
    Ok(HamiltonianBlocks {
        h: dense.view((0, 0), (n, n)).into_owned(),
        r: dense.view((0, n), (n, n)).into_owned(),
        w: dense.view((n, 0), (n, n)).into_owned(),
        d: dense.view((n, n), (n, n)).into_owned(),
    })
}

impl HamiltonianBlocks {
    pub fn reassemble(&self) -> DMatrix<Complex64> {
        let n = self.h.nrows();
        let mut out = DMatrix::zeros(2 * n, 2 * n);
        out.view_mut((0, 0), (n, n)).copy_from(&self.h);
        out.view_mut((0, n), (n, n)).copy_from(&self.r);
        out.view_mut((n, 0), (n, n)).copy_from(&self.w);
        out.view_mut((n, n), (n, n)).copy_from(&self.d);
        out
    }
}
