use num_complex::Complex64;

use super::grid::Grid;
use crate::error::{Error, Result};

/// Whether a field carries a 3-vector or a scalar per mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Vector,
    Scalar,
}

impl FieldKind {
    pub fn components(self) -> usize {
        match self {
            FieldKind::Vector => 3,
            FieldKind::Scalar => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FieldKind::Vector => "vector",
            FieldKind::Scalar => "scalar",
        }
    }
}

/// Truncated Fourier coefficients of a real, mean-free field on the torus.
///
/// Coefficients are stored component-major: component `c` of mode `i` lives
/// at `data[c * grid.len() + i]`. The field represents
/// `u(x) = Σ_k c_k e^{i k·x}` with `c_{-k} = conj(c_k)` and `c_0 = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    kind: FieldKind,
    data: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: Grid, kind: FieldKind) -> Self {
        Self {
            grid,
            kind,
            data: vec![Complex64::new(0.0, 0.0); grid.len() * kind.components()],
        }
    }

    pub fn zero_vector(grid: Grid) -> Self {
        Self::zeros(grid, FieldKind::Vector)
    }

    pub fn zero_scalar(grid: Grid) -> Self {
        Self::zeros(grid, FieldKind::Scalar)
    }

    /// Vector field made of one conjugate pair `a e^{ik·x} + c.c.`.
    pub fn single_mode(grid: Grid, k: [i64; 3], amplitude: [Complex64; 3]) -> Result<Self> {
        let mut f = Self::zero_vector(grid);
        f.set_pair(k, &amplitude)?;
        Ok(f)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn components(&self) -> usize {
        self.kind.components()
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        let n = self.grid.len();
        &self.data[c * n..(c + 1) * n]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [Complex64] {
        let n = self.grid.len();
        &mut self.data[c * n..(c + 1) * n]
    }

    /// Coefficient of component `c` at lattice mode `k`.
    pub fn get(&self, c: usize, k: [i64; 3]) -> Complex64 {
        self.data[c * self.grid.len() + self.grid.index(k)]
    }

    /// Sets the coefficient at `k` and its conjugate partner at `-k`.
    pub fn set_pair(&mut self, k: [i64; 3], value: &[Complex64]) -> Result<()> {
        if value.len() != self.components() {
            return Err(Error::InvalidParameter(format!(
                "expected {} components, got {}",
                self.components(),
                value.len()
            )));
        }
        if !self.grid.contains(k) {
            return Err(Error::InvalidParameter(format!(
                "mode {k:?} outside truncation radius {}",
                self.grid.n()
            )));
        }
        if k == [0, 0, 0] {
            return Err(Error::InvalidParameter(
                "the zero mode is pinned to zero".into(),
            ));
        }
        let n = self.grid.len();
        let i = self.grid.index(k);
        let j = self.grid.conjugate_index(i);
        for (c, v) in value.iter().enumerate() {
            self.data[c * n + i] = *v;
            self.data[c * n + j] = v.conj();
        }
        Ok(())
    }

    pub fn check_compatible(&self, other: &SpectralField) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(format!(
                "{:?} vs {:?}",
                self.grid, other.grid
            )));
        }
        if self.kind != other.kind {
            return Err(Error::KindMismatch {
                expected: self.kind.name(),
                found: other.kind.name(),
            });
        }
        Ok(())
    }

    pub fn require_vector(&self) -> Result<()> {
        if self.kind != FieldKind::Vector {
            return Err(Error::KindMismatch {
                expected: "vector",
                found: self.kind.name(),
            });
        }
        Ok(())
    }

    /// Largest coefficient modulus over all components.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|c| c.re == 0.0 && c.im == 0.0)
    }

    /// `max_k |k·c_k| / |k|`, divided by `max_k |c_k|`; zero for the zero field.
    pub fn divergence_defect(&self) -> f64 {
        if self.kind != FieldKind::Vector {
            return 0.0;
        }
        let scale = self.max_abs();
        if scale == 0.0 {
            return 0.0;
        }
        let n = self.grid.len();
        let mut worst = 0.0f64;
        for i in 0..n {
            if i == self.grid.zero_index() {
                continue;
            }
            let k = self.grid.wavevector(i);
            let kmag = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt();
            let d = self.data[i] * k[0] + self.data[n + i] * k[1] + self.data[2 * n + i] * k[2];
            worst = worst.max(d.norm() / kmag);
        }
        worst / scale
    }

    /// `max_k |c_{-k} - conj(c_k)|`, divided by `max_k |c_k|`.
    pub fn symmetry_defect(&self) -> f64 {
        let scale = self.max_abs();
        if scale == 0.0 {
            return 0.0;
        }
        let n = self.grid.len();
        let mut worst = 0.0f64;
        for c in 0..self.components() {
            let comp = self.component(c);
            for i in 0..n {
                let j = self.grid.conjugate_index(i);
                worst = worst.max((comp[j] - comp[i].conj()).norm());
            }
        }
        worst / scale
    }

    /// Modulus of the zero-mode coefficient (should be exactly zero).
    pub fn mean_magnitude(&self) -> f64 {
        let z = self.grid.zero_index();
        (0..self.components())
            .map(|c| self.component(c)[z].norm())
            .fold(0.0, f64::max)
    }

    /// Replaces each conjugate pair by its symmetric average and zeroes the mean.
    pub fn enforce_symmetry(&mut self) {
        let n = self.grid.len();
        let z = self.grid.zero_index();
        for c in 0..self.components() {
            let comp = &mut self.data[c * n..(c + 1) * n];
            for i in 0..z {
                let j = n - 1 - i;
                let avg = (comp[i] + comp[j].conj()) * 0.5;
                comp[i] = avg;
                comp[j] = avg.conj();
            }
            comp[z] = Complex64::new(0.0, 0.0);
        }
    }

    pub fn pin_mean(&mut self) {
        let n = self.grid.len();
        let z = self.grid.zero_index();
        for c in 0..self.components() {
            self.data[c * n + z] = Complex64::new(0.0, 0.0);
        }
    }

    /// `self += a * other`.
    pub fn axpy(&mut self, a: f64, other: &SpectralField) -> Result<()> {
        self.check_compatible(other)?;
        for (x, y) in self.data.iter_mut().zip(&other.data) {
            *x += y * a;
        }
        Ok(())
    }

    pub fn scale(&mut self, a: f64) {
        for x in &mut self.data {
            *x *= a;
        }
    }

    pub fn scaled(&self, a: f64) -> SpectralField {
        let mut out = self.clone();
        out.scale(a);
        out
    }

    /// Multiplies every mode by the real factor `f(k, |k|)`.
    pub fn map_multiplier(&self, f: impl Fn([f64; 3], f64) -> f64) -> SpectralField {
        let n = self.grid.len();
        let factors: Vec<f64> = (0..n)
            .map(|i| {
                let k = self.grid.wavevector(i);
                f(k, (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt())
            })
            .collect();
        self.multiply_by_table(&factors)
    }

    /// Multiplies mode `i` of every component by `factors[i]`.
    pub fn multiply_by_table(&self, factors: &[f64]) -> SpectralField {
        let n = self.grid.len();
        let mut out = self.clone();
        for c in 0..self.components() {
            for (x, f) in out.data[c * n..(c + 1) * n].iter_mut().zip(factors) {
                *x *= *f;
            }
        }
        out
    }

    /// Largest componentwise difference to `other`.
    pub fn max_abs_diff(&self, other: &SpectralField) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl std::ops::Add for &SpectralField {
    type Output = SpectralField;

    fn add(self, rhs: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        out.axpy(1.0, rhs).expect("incompatible fields in addition");
        out
    }
}

impl std::ops::Sub for &SpectralField {
    type Output = SpectralField;

    fn sub(self, rhs: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        out.axpy(-1.0, rhs).expect("incompatible fields in subtraction");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn set_pair_imposes_conjugate_symmetry() {
        let g = Grid::periodic(2).unwrap();
        let f = SpectralField::single_mode(g, [1, -1, 2], [c(1.0, 2.0), c(0.0, 0.5), c(-1.0, 0.0)])
            .unwrap();
        assert_eq!(f.get(0, [-1, 1, -2]), c(1.0, -2.0));
        assert_eq!(f.symmetry_defect(), 0.0);
        assert_eq!(f.mean_magnitude(), 0.0);
    }

    #[test]
    fn zero_mode_and_out_of_range_rejected() {
        let g = Grid::periodic(2).unwrap();
        let mut f = SpectralField::zero_vector(g);
        let a = [c(1.0, 0.0); 3];
        assert!(f.set_pair([0, 0, 0], &a).is_err());
        assert!(f.set_pair([3, 0, 0], &a).is_err());
        assert!(f.set_pair([1, 0, 0], &a[..1]).is_err());
    }

    #[test]
    fn enforce_symmetry_repairs_drift() {
        let g = Grid::periodic(2).unwrap();
        let mut f =
            SpectralField::single_mode(g, [1, 0, 0], [c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let i = g.index([1, 0, 0]);
        f.component_mut(1)[i] += c(1e-3, 1e-3);
        f.component_mut(0)[g.zero_index()] = c(0.1, 0.0);
        assert!(f.symmetry_defect() > 1e-4);
        f.enforce_symmetry();
        assert!(f.symmetry_defect() < 1e-16);
        assert_eq!(f.mean_magnitude(), 0.0);
    }

    #[test]
    fn divergence_defect_detects_longitudinal_modes() {
        let g = Grid::periodic(2).unwrap();
        let trans =
            SpectralField::single_mode(g, [1, 0, 0], [c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert_eq!(trans.divergence_defect(), 0.0);
        let longi =
            SpectralField::single_mode(g, [1, 0, 0], [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!((longi.divergence_defect() - 1.0).abs() < 1e-15);
    }
}
