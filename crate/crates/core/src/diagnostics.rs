//! Density observables, leakage, and record-to-record comparison.

use crate::error::{Error, Result};
use crate::field::{SpinorField, UpperField};
use crate::grid::GridSpec;

/// `|lower(x)|²` of a Dirac state.
pub fn q_density(state: &SpinorField) -> Vec<f64> {
    state.lower().density()
}

/// `|Q(x)|²` for an upper field and its reconstructed lower spinor.
pub fn q_density_of_pair(upper: &UpperField, lower: &UpperField) -> Result<Vec<f64>> {
    upper.check_same_grid(lower)?;
    Ok(lower.density())
}

/// Time series of upper/lower densities on a fixed grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityRecord {
    pub positions: Vec<f64>,
    pub dx: f64,
    pub times: Vec<f64>,
    /// `q_density[time][position]`
    pub q_density: Vec<Vec<f64>>,
    pub p_density: Vec<Vec<f64>>,
    pub p_norm: Vec<f64>,
    pub q_norm: Vec<f64>,
    /// False for one-component models, whose leakage is zero by construction.
    pub lower_component: bool,
}

impl DensityRecord {
    pub fn new(grid: &GridSpec) -> Self {
        Self {
            positions: grid.positions(),
            dx: grid.dx(),
            times: Vec::new(),
            q_density: Vec::new(),
            p_density: Vec::new(),
            p_norm: Vec::new(),
            q_norm: Vec::new(),
            lower_component: true,
        }
    }

    /// Record for a model without a lower component.
    pub fn upper_only(grid: &GridSpec) -> Self {
        Self {
            lower_component: false,
            ..Self::new(grid)
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn push(&mut self, t: f64, upper: &UpperField, lower: &UpperField) -> Result<()> {
        upper.check_same_grid(lower)?;
        if upper.grid().n_points() != self.positions.len() || upper.grid().dx() != self.dx {
            return Err(Error::GridMismatch);
        }
        let p = upper.density();
        let q = lower.density();
        self.p_norm.push(p.iter().sum::<f64>() * self.dx);
        self.q_norm.push(q.iter().sum::<f64>() * self.dx);
        self.p_density.push(p);
        self.q_density.push(q);
        self.times.push(t);
        Ok(())
    }

    pub fn push_spinor(&mut self, t: f64, state: &SpinorField) -> Result<()> {
        self.push(t, state.upper(), state.lower())
    }

    /// Largest value of the stored lower density.
    pub fn q_max(&self) -> f64 {
        self.q_density.iter().flatten().fold(0.0, |m, &v| m.max(v))
    }

    /// `max_t |P-norm + Q-norm − 1|`.
    pub fn norm_partition_defect(&self) -> f64 {
        self.p_norm
            .iter()
            .zip(&self.q_norm)
            .map(|(p, q)| (p + q - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// `1 − ∫|PΨ|²dx` at snapshot `index`; exactly 0 for one-component models.
pub fn total_leakage(record: &DensityRecord, index: usize) -> f64 {
    if record.lower_component {
        1.0 - record.p_norm[index]
    } else {
        0.0
    }
}

/// Metrics of disagreement between two lower-density records.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityComparison {
    /// `‖a − b‖₂ / ‖a‖₂` over the full (t, x) window.
    pub normalized_l2: f64,
    pub max_abs_diff: f64,
    /// `(Σ_x (a − b)²·dx)^{1/2}` per snapshot.
    pub per_time: Vec<f64>,
}

pub fn compare_densities(a: &DensityRecord, b: &DensityRecord) -> Result<DensityComparison> {
    if a.positions != b.positions {
        return Err(Error::ShapeMismatch("records use different grids".into()));
    }
    if a.times != b.times {
        return Err(Error::ShapeMismatch("records use different time stamps".into()));
    }
    let mut diff_sq = 0.0;
    let mut ref_sq = 0.0;
    let mut max_abs_diff = 0.0f64;
    let mut per_time = Vec::with_capacity(a.len());
    for (ra, rb) in a.q_density.iter().zip(&b.q_density) {
        if ra.len() != rb.len() {
            return Err(Error::ShapeMismatch("density rows differ in length".into()));
        }
        let mut row = 0.0;
        for (x, y) in ra.iter().zip(rb) {
            let d = x - y;
            row += d * d;
            ref_sq += x * x;
            max_abs_diff = max_abs_diff.max(d.abs());
        }
        diff_sq += row;
        per_time.push((row * a.dx).sqrt());
    }
    let normalized_l2 = if ref_sq > 0.0 {
        (diff_sq / ref_sq).sqrt()
    } else {
        diff_sq.sqrt()
    };
    Ok(DensityComparison {
        normalized_l2,
        max_abs_diff,
        per_time,
    })
}

/// Smallest distance, in standard deviations, that a packet may keep from
/// either grid edge during a run.
pub const MIN_CLEARANCE_SIGMAS: f64 = 4.0;

/// Distance from the mean of `density` to the nearer edge of the grid, in
/// units of its standard deviation. Infinite when the density vanishes or
/// has no spread.
pub fn clearance_sigmas(density: &[f64], grid: &GridSpec) -> Result<f64> {
    if density.len() != grid.n_points() {
        return Err(Error::LengthMismatch {
            expected: grid.n_points(),
            got: density.len(),
        });
    }
    let xs = grid.positions();
    let total: f64 = density.iter().sum();
    if total <= 0.0 {
        return Ok(f64::INFINITY);
    }
    let mean = xs.iter().zip(density).map(|(x, d)| x * d).sum::<f64>() / total;
    let var = xs.iter().zip(density).map(|(x, d)| (x - mean).powi(2) * d).sum::<f64>() / total;
    let gap = (mean - grid.x_min()).min(grid.x_max() - mean);
    if var <= 0.0 {
        return Ok(if gap > 0.0 { f64::INFINITY } else { 0.0 });
    }
    Ok(gap / var.sqrt())
}

/// `max_i |d(x_i) − d(2x_c − x_i)| / max d`, requiring `x_c` to sit on a node
/// or a midpoint so the mirror map stays on the grid.
pub fn mirror_defect(density: &[f64], grid: &GridSpec, x_center: f64) -> Result<f64> {
    let n = grid.n_points();
    if density.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: density.len(),
        });
    }
    let twice = 2.0 * (x_center - grid.x_min()) / grid.dx();
    let shift = twice.round();
    if (twice - shift).abs() > 1e-9 {
        return Err(Error::ShapeMismatch(format!(
            "x_center = {x_center} is not a node or midpoint of the grid"
        )));
    }
    let shift = shift as i64;
    let peak = density.iter().fold(0.0f64, |m, &v| m.max(v));
    if peak == 0.0 {
        return Ok(0.0);
    }
    let worst = (0..n)
        .map(|i| {
            let j = (shift - i as i64).rem_euclid(n as i64) as usize;
            (density[i] - density[j]).abs()
        })
        .fold(0.0, f64::max);
    Ok(worst / peak)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::gaussian_packet;
    use crate::grid::make_grid;

    fn record(grid: &GridSpec, scale: f64) -> DensityRecord {
        let mut r = DensityRecord::new(grid);
        for step in 0..4 {
            let t = step as f64 * 0.5;
            let u = gaussian_packet(grid, 4.0, 0.1, 0.0).unwrap();
            let q = u.scale(num_complex::Complex64::new(scale.sqrt() * t, 0.0));
            r.push(t, &u, &q).unwrap();
        }
        r
    }

    #[test]
    fn zero_lower_at_start() {
        let g = make_grid(64, -10.0, 10.0).unwrap();
        let psi = SpinorField::from_upper(gaussian_packet(&g, 4.0, 0.0, 0.0).unwrap());
        assert!(q_density(&psi).iter().all(|&v| v == 0.0));
        let mut r = DensityRecord::new(&g);
        r.push_spinor(0.0, &psi).unwrap();
        assert!(total_leakage(&r, 0).abs() < 1e-14);
        assert!((r.q_norm[0]).abs() == 0.0);
    }

    #[test]
    fn upper_only_record_has_no_leakage() {
        let g = make_grid(64, -10.0, 10.0).unwrap();
        let u = gaussian_packet(&g, 4.0, 0.0, 0.0).unwrap().scale(num_complex::Complex64::new(0.5, 0.0));
        let mut r = DensityRecord::upper_only(&g);
        r.push(0.0, &u, &UpperField::zeros(&g)).unwrap();
        assert_eq!(total_leakage(&r, 0), 0.0);
        let mut full = DensityRecord::new(&g);
        full.push(0.0, &u, &UpperField::zeros(&g)).unwrap();
        assert!((total_leakage(&full, 0) - 0.75).abs() < 1e-12);
    }

    #[test]
    fn comparison_metrics() {
        let g = make_grid(64, -10.0, 10.0).unwrap();
        let a = record(&g, 1.0);
        let same = compare_densities(&a, &a).unwrap();
        assert_eq!(same.normalized_l2, 0.0);
        assert_eq!(same.max_abs_diff, 0.0);
        assert!(same.per_time.iter().all(|&v| v == 0.0));
        let b = record(&g, 2.0);
        let m = compare_densities(&a, &b).unwrap();
        assert!((m.normalized_l2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn comparison_shape_checks() {
        let g = make_grid(64, -10.0, 10.0).unwrap();
        let h = make_grid(64, -11.0, 10.0).unwrap();
        let a = record(&g, 1.0);
        let b = record(&h, 1.0);
        assert!(matches!(compare_densities(&a, &b), Err(Error::ShapeMismatch(_))));
        let mut c = record(&g, 1.0);
        c.times[1] = 0.7;
        assert!(matches!(compare_densities(&a, &c), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn pair_requires_grid_match() {
        let g = make_grid(64, -10.0, 10.0).unwrap();
        let h = make_grid(32, -10.0, 10.0).unwrap();
        let r = q_density_of_pair(&UpperField::zeros(&g), &UpperField::zeros(&h));
        assert_eq!(r, Err(Error::GridMismatch));
    }

    #[test]
    fn clearance_of_gaussian() {
        let g = make_grid(1024, -30.0, 30.0).unwrap();
        // density sigma is sqrt(x0)/2
        let u = gaussian_packet(&g, 16.0, 0.0, 6.0).unwrap();
        let s = clearance_sigmas(&u.density(), &g).unwrap();
        assert!((s - 12.0).abs() < 1e-9, "{s}");
        assert_eq!(clearance_sigmas(&vec![0.0; 1024], &g).unwrap(), f64::INFINITY);
        assert!(clearance_sigmas(&[1.0], &g).is_err());
    }

    #[test]
    fn mirror_of_centered_packet() {
        let g = make_grid(128, -10.0, 10.0).unwrap();
        let u = gaussian_packet(&g, 4.0, 0.0, 0.0).unwrap();
        assert!(mirror_defect(&u.density(), &g, 0.0).unwrap() < 1e-14);
        let v = gaussian_packet(&g, 4.0, 0.0, 0.5).unwrap();
        assert!(mirror_defect(&v.density(), &g, 0.0).unwrap() > 0.1);
        assert!(mirror_defect(&v.density(), &g, 0.03).is_err());
    }
}
