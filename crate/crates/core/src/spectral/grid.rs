use std::f64::consts::PI;

use crate::error::{invalid, Result};

/// Truncated wavenumber lattice on the periodic cube `[0, L)^3`.
///
/// Modes are stored on the cube `|k_j| <= n` of integer lattice indices; the
/// physical wavenumber of index `m` is `m * 2π / L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    length: f64,
    n: usize,
}

impl Grid {
    pub fn new(length: f64, n: usize) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(invalid(format!("domain period must be positive, got {length}")));
        }
        if n < 2 {
            return Err(invalid(format!("truncation radius must be >= 2, got {n}")));
        }
        Ok(Self { length, n })
    }

    /// Grid on the standard `2π` torus, where the lattice is `Z^3`.
    pub fn periodic(n: usize) -> Result<Self> {
        Self::new(2.0 * PI, n)
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of lattice points per axis, `2n + 1`.
    pub fn side(&self) -> usize {
        2 * self.n + 1
    }

    /// Total number of stored modes.
    pub fn len(&self) -> usize {
        let s = self.side();
        s * s * s
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Scale factor `2π / L` between lattice indices and wavenumbers.
    pub fn kappa(&self) -> f64 {
        2.0 * PI / self.length
    }

    /// Flat index of the lattice point `(kx, ky, kz)`. Panics when out of range.
    #[inline]
    pub fn index(&self, k: [i64; 3]) -> usize {
        let n = self.n as i64;
        let s = self.side();
        debug_assert!(k.iter().all(|c| c.abs() <= n), "mode {k:?} outside truncation");
        (((k[0] + n) as usize * s) + (k[1] + n) as usize) * s + (k[2] + n) as usize
    }

    /// Whether `(kx, ky, kz)` lies inside the truncation cube.
    pub fn contains(&self, k: [i64; 3]) -> bool {
        let n = self.n as i64;
        k.iter().all(|c| c.abs() <= n)
    }

    /// Lattice indices of the mode stored at flat index `idx`.
    #[inline]
    pub fn mode(&self, idx: usize) -> [i64; 3] {
        let s = self.side();
        let n = self.n as i64;
        let kz = (idx % s) as i64 - n;
        let ky = ((idx / s) % s) as i64 - n;
        let kx = (idx / (s * s)) as i64 - n;
        [kx, ky, kz]
    }

    /// Flat index of `-k` given the flat index of `k`.
    #[inline]
    pub fn conjugate_index(&self, idx: usize) -> usize {
        self.len() - 1 - idx
    }

    /// Flat index of the zero mode.
    pub fn zero_index(&self) -> usize {
        self.len() / 2
    }

    /// Physical wavevector of the mode at flat index `idx`.
    #[inline]
    pub fn wavevector(&self, idx: usize) -> [f64; 3] {
        let k = self.mode(idx);
        let kappa = self.kappa();
        [k[0] as f64 * kappa, k[1] as f64 * kappa, k[2] as f64 * kappa]
    }

    /// `|k|^2` for every stored mode, in flat order.
    pub fn wavenumber_squared_table(&self) -> Vec<f64> {
        (0..self.len())
            .map(|i| {
                let k = self.wavevector(i);
                k[0] * k[0] + k[1] * k[1] + k[2] * k[2]
            })
            .collect()
    }

    /// Minimum collocation points per axis for a lossless transform.
    pub fn min_resolution(&self) -> usize {
        self.side()
    }

    /// Minimum collocation points per axis for alias-free quadratic products.
    ///
    /// Products of two fields on `|k_j| <= n` reach `|k_j| <= 2n`; with `m`
    /// points those alias to `k - m`, which stays outside the cube only when
    /// `m >= 3n + 1`.
    pub fn min_dealiased_resolution(&self) -> usize {
        3 * self.n + 1
    }

    /// Smallest 7-smooth size at or above [`Grid::min_dealiased_resolution`].
    pub fn dealiased_resolution(&self) -> usize {
        smooth_size(self.min_dealiased_resolution())
    }

    /// Iterator over `(flat index, lattice mode)` pairs.
    pub fn modes(&self) -> impl Iterator<Item = (usize, [i64; 3])> + '_ {
        (0..self.len()).map(move |i| (i, self.mode(i)))
    }
}

/// Smallest integer `>= n` whose only prime factors are 2, 3, 5 and 7.
pub fn smooth_size(n: usize) -> usize {
    let mut m = n.max(1);
    loop {
        let mut r = m;
        for p in [2, 3, 5, 7] {
            while r.is_multiple_of(p) {
                r /= p;
            }
        }
        if r == 1 {
            return m;
        }
        m += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_parameters() {
        assert!(Grid::new(0.0, 4).is_err());
        assert!(Grid::new(-1.0, 4).is_err());
        assert!(Grid::periodic(1).is_err());
        assert!(Grid::periodic(2).is_ok());
    }

    #[test]
    fn index_round_trip_and_conjugates() {
        let g = Grid::periodic(3).unwrap();
        for (i, k) in g.modes() {
            assert_eq!(g.index(k), i);
            let j = g.conjugate_index(i);
            assert_eq!(g.mode(j), [-k[0], -k[1], -k[2]]);
        }
        assert_eq!(g.mode(g.zero_index()), [0, 0, 0]);
    }

    #[test]
    fn wavenumbers_scale_with_period() {
        let g = Grid::new(PI, 2).unwrap();
        let i = g.index([1, 0, -2]);
        let k = g.wavevector(i);
        assert!((k[0] - 2.0).abs() < 1e-15);
        assert!((k[2] + 4.0).abs() < 1e-15);
    }

    #[test]
    fn smooth_sizes() {
        assert_eq!(smooth_size(49), 49);
        assert_eq!(smooth_size(25), 25);
        assert_eq!(smooth_size(13), 14);
        assert_eq!(smooth_size(11), 12);
        assert_eq!(smooth_size(19), 20);
        assert_eq!(Grid::periodic(16).unwrap().dealiased_resolution(), 49);
    }
}
