//! Pruned 3-D transforms between truncated Fourier coefficients and
//! collocation values on an `m^3` grid.
//!
//! The spectral side only carries `|k_j| <= n`, so each pass skips the lines
//! that are known to be zero: the inverse runs `(2n+1)^2` lines along z,
//! `(2n+1)m` lines along y and `m^2` lines along x.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::field::{FieldKind, SpectralField};
use super::grid::Grid;
use crate::error::{Error, Result};

/// Real collocation values of a scalar or vector field.
///
/// Point `(ix, iy, iz)` sits at `x = (ix, iy, iz) * L / m` and is stored at
/// `(iz * m + iy) * m + ix`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalField {
    pub size: usize,
    pub components: Vec<Vec<f64>>,
}

impl PhysicalField {
    pub fn point_count(&self) -> usize {
        self.size * self.size * self.size
    }
}

/// Reusable transform plans and work buffers for one grid and resolution.
///
/// Two real fields are carried through each 3-D pass as the real and
/// imaginary parts of one complex field.
pub struct Transform {
    grid: Grid,
    size: usize,
    fft_forward: Arc<dyn Fft<f64>>,
    fft_inverse: Arc<dyn Fft<f64>>,
    z_lines: Vec<Complex64>,
    y_lines: Vec<Complex64>,
    full: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl std::fmt::Debug for Transform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Transform")
            .field("grid", &self.grid)
            .field("size", &self.size)
            .finish()
    }
}

impl Transform {
    /// Plans transforms with `size` points per axis; `size` must be at least `2n + 1`.
    pub fn new(grid: Grid, size: usize) -> Result<Self> {
        if size < grid.min_resolution() {
            return Err(Error::Resolution {
                size,
                required: grid.min_resolution(),
                reason: "lossless transform",
            });
        }
        let mut planner = FftPlanner::<f64>::new();
        let fft_forward = planner.plan_fft_forward(size);
        let fft_inverse = planner.plan_fft_inverse(size);
        let side = grid.side();
        let scratch_len = fft_forward
            .get_inplace_scratch_len()
            .max(fft_inverse.get_inplace_scratch_len());
        let zero = Complex64::new(0.0, 0.0);
        Ok(Self {
            grid,
            size,
            fft_forward,
            fft_inverse,
            z_lines: vec![zero; side * side * size],
            y_lines: vec![zero; side * size * size],
            full: vec![zero; size * size * size],
            scratch: vec![zero; scratch_len],
        })
    }

    /// Plans transforms at the alias-free resolution for quadratic products.
    pub fn dealiased(grid: Grid) -> Result<Self> {
        Self::new(grid, grid.dealiased_resolution())
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn point_count(&self) -> usize {
        self.size * self.size * self.size
    }

    /// Evaluates one component's series at every collocation point.
    pub fn inverse_component(&mut self, coeffs: &[Complex64], out: &mut [f64]) {
        self.inverse_packed(coeffs, None);
        for (o, c) in out.iter_mut().zip(&self.full) {
            *o = c.re;
        }
    }

    /// Evaluates two series at once.
    pub fn inverse_pair(
        &mut self,
        a: &[Complex64],
        b: &[Complex64],
        out_a: &mut [f64],
        out_b: &mut [f64],
    ) {
        self.inverse_packed(a, Some(b));
        for ((oa, ob), c) in out_a.iter_mut().zip(out_b.iter_mut()).zip(&self.full) {
            *oa = c.re;
            *ob = c.im;
        }
    }

    /// Leaves `a(x) + i b(x)` in `self.full`.
    fn inverse_packed(&mut self, a: &[Complex64], b: Option<&[Complex64]>) {
        let side = self.grid.side();
        let n = self.grid.n();
        let m = self.size;
        let plane = m * m;
        assert_eq!(a.len(), self.grid.len());
        let zero = Complex64::new(0.0, 0.0);

        // z-lines, one per (kx, ky); coefficients are contiguous in kz
        for (line, dst) in self.z_lines.chunks_exact_mut(m).enumerate() {
            let sa = &a[line * side..(line + 1) * side];
            match b {
                Some(b) => {
                    let sb = &b[line * side..(line + 1) * side];
                    let pack = |k: usize| sa[k] + Complex64::new(-sb[k].im, sb[k].re);
                    for k in 0..=n {
                        dst[k] = pack(n + k);
                    }
                    for k in 1..=n {
                        dst[m - k] = pack(n - k);
                    }
                }
                None => {
                    dst[..=n].copy_from_slice(&sa[n..]);
                    for k in 1..=n {
                        dst[m - k] = sa[n - k];
                    }
                }
            }
            dst[n + 1..m - n].fill(zero);
        }
        self.fft_inverse
            .process_with_scratch(&mut self.z_lines, &mut self.scratch);

        // y-lines, one per (kx, iz), stored at (ax * m + iz) * m + iy
        for ax in 0..side {
            let block = &self.z_lines[ax * side * m..(ax + 1) * side * m];
            let dst = &mut self.y_lines[ax * plane..(ax + 1) * plane];
            for (iz, line) in dst.chunks_exact_mut(m).enumerate() {
                scatter_line(n, line, |ay| block[ay * m + iz]);
            }
        }
        self.fft_inverse
            .process_with_scratch(&mut self.y_lines, &mut self.scratch);

        // x-lines over the whole grid
        for iz in 0..m {
            let slab = &mut self.full[iz * plane..(iz + 1) * plane];
            let ys = &self.y_lines;
            for (iy, line) in slab.chunks_exact_mut(m).enumerate() {
                scatter_line(n, line, |ax| ys[ax * plane + iz * m + iy]);
            }
        }
        self.fft_inverse
            .process_with_scratch(&mut self.full, &mut self.scratch);
    }

    /// Projects collocation values onto the stored modes, discarding the mean.
    pub fn forward_component(&mut self, values: &[f64], coeffs: &mut [Complex64]) {
        assert_eq!(values.len(), self.point_count());
        self.forward_with(
            |full| {
                for (f, v) in full.iter_mut().zip(values) {
                    *f = Complex64::new(*v, 0.0);
                }
            },
            coeffs,
            None,
        );
    }

    /// Forward transform of two real fields at once.
    pub fn forward_pair(
        &mut self,
        a: &[f64],
        b: &[f64],
        coeffs_a: &mut [Complex64],
        coeffs_b: &mut [Complex64],
    ) {
        assert_eq!(a.len(), self.point_count());
        assert_eq!(b.len(), self.point_count());
        self.forward_with(
            |full| {
                for ((f, x), y) in full.iter_mut().zip(a).zip(b) {
                    *f = Complex64::new(*x, *y);
                }
            },
            coeffs_a,
            Some(coeffs_b),
        );
    }

    /// Evaluates `a(x) + i b(x)` (or `a(x)` alone) into `out`, which must hold
    /// `size^3` values. The previous contents of `out` are recycled as a
    /// work buffer.
    pub fn inverse_packed_into(
        &mut self,
        a: &[Complex64],
        b: Option<&[Complex64]>,
        out: &mut Vec<Complex64>,
    ) {
        assert_eq!(out.len(), self.point_count());
        self.inverse_packed(a, b);
        std::mem::swap(&mut self.full, out);
    }

    /// Forward transform of packed values `a(x) + i b(x)` written by `fill`
    /// into the `size^3` work buffer. The real part lands in `coeffs_a`, the
    /// imaginary part in `coeffs_b` when given.
    pub fn forward_with(
        &mut self,
        fill: impl FnOnce(&mut [Complex64]),
        coeffs_a: &mut [Complex64],
        coeffs_b: Option<&mut [Complex64]>,
    ) {
        fill(&mut self.full);
        self.forward_packed();
        let norm = 0.5 / self.point_count() as f64;
        let z = self.grid.zero_index();
        match coeffs_b {
            Some(coeffs_b) => {
                self.for_each_mode(|i, zi, zj| {
                    let zj = zj.conj();
                    coeffs_a[i] = (zi + zj) * norm;
                    let d = (zi - zj) * norm;
                    // (zi - zj) / 2i
                    coeffs_b[i] = Complex64::new(d.im, -d.re);
                });
                coeffs_b[z] = Complex64::new(0.0, 0.0);
            }
            None => self.for_each_mode(|i, zi, zj| coeffs_a[i] = (zi + zj.conj()) * norm),
        }
        coeffs_a[z] = Complex64::new(0.0, 0.0);
    }

    /// Calls `sink(i, z_i, z_{-i})` for every cube mode `i` with the
    /// unnormalized transform left by [`Transform::forward_packed`].
    #[inline]
    fn for_each_mode(&self, mut sink: impl FnMut(usize, Complex64, Complex64)) {
        let side = self.grid.side();
        let n = self.grid.n() as i64;
        let m = self.size;
        let lines = side * side;
        let pos: Vec<usize> = (0..side).map(|az| wrap(az as i64 - n, m)).collect();
        for line in 0..lines {
            let here = &self.z_lines[line * m..(line + 1) * m];
            let there = &self.z_lines[(lines - 1 - line) * m..(lines - line) * m];
            for az in 0..side {
                sink(line * side + az, here[pos[az]], there[pos[side - 1 - az]]);
            }
        }
    }

    /// Forward transform of `self.full`, keeping only cube modes in `z_lines`.
    fn forward_packed(&mut self) {
        let side = self.grid.side();
        let n = self.grid.n();
        let m = self.size;
        let plane = m * m;

        self.fft_forward
            .process_with_scratch(&mut self.full, &mut self.scratch);

        // keep kx in the cube: y_lines[(ax * m + iz) * m + iy]
        for iz in 0..m {
            let slab = &self.full[iz * plane..(iz + 1) * plane];
            for ax in 0..side {
                let pos = wrap(ax as i64 - n as i64, m);
                let dst = &mut self.y_lines[ax * plane + iz * m..ax * plane + (iz + 1) * m];
                for (iy, d) in dst.iter_mut().enumerate() {
                    *d = slab[iy * m + pos];
                }
            }
        }
        self.fft_forward
            .process_with_scratch(&mut self.y_lines, &mut self.scratch);

        // keep ky in the cube: z_lines[(ax * side + ay) * m + iz]
        for ax in 0..side {
            let block = &self.y_lines[ax * plane..(ax + 1) * plane];
            for ay in 0..side {
                let pos = wrap(ay as i64 - n as i64, m);
                let dst = &mut self.z_lines[(ax * side + ay) * m..(ax * side + ay + 1) * m];
                for (iz, d) in dst.iter_mut().enumerate() {
                    *d = block[iz * m + pos];
                }
            }
        }
        self.fft_forward
            .process_with_scratch(&mut self.z_lines, &mut self.scratch);
    }

    pub fn to_physical(&mut self, field: &SpectralField) -> Result<PhysicalField> {
        if field.grid() != &self.grid {
            return Err(Error::GridMismatch("transform planned for another grid".into()));
        }
        let points = self.point_count();
        let components = (0..field.components())
            .map(|c| {
                let mut out = vec![0.0; points];
                self.inverse_component(field.component(c), &mut out);
                out
            })
            .collect();
        Ok(PhysicalField {
            size: self.size,
            components,
        })
    }

    pub fn to_spectral(&mut self, values: &PhysicalField) -> Result<SpectralField> {
        if values.size != self.size {
            return Err(Error::Resolution {
                size: values.size,
                required: self.size,
                reason: "physical values sampled at another resolution",
            });
        }
        let kind = match values.components.len() {
            1 => FieldKind::Scalar,
            3 => FieldKind::Vector,
            other => {
                return Err(Error::InvalidParameter(format!(
                    "physical field must have 1 or 3 components, got {other}"
                )))
            }
        };
        let mut field = SpectralField::zeros(self.grid, kind);
        for (c, comp) in values.components.iter().enumerate() {
            self.forward_component(comp, field.component_mut(c));
        }
        Ok(field)
    }
}

/// Writes lattice entries `-n..=n`, read as `value(n + k)`, to their wrapped
/// FFT positions in `dst` and zeroes the rest.
#[inline(always)]
fn scatter_line(n: usize, dst: &mut [Complex64], value: impl Fn(usize) -> Complex64) {
    let m = dst.len();
    for k in 0..=n {
        dst[k] = value(n + k);
    }
    dst[n + 1..m - n].fill(Complex64::new(0.0, 0.0));
    for k in 1..=n {
        dst[m - k] = value(n - k);
    }
}

#[inline]
fn wrap(k: i64, size: usize) -> usize {
    k.rem_euclid(size as i64) as usize
}

/// Collocation values of `field` on a `size^3` grid.
pub fn to_physical(field: &SpectralField, size: usize) -> Result<PhysicalField> {
    Transform::new(*field.grid(), size)?.to_physical(field)
}

/// Truncated, mean-free Fourier coefficients of collocation values.
pub fn to_spectral(values: &PhysicalField, grid: Grid) -> Result<SpectralField> {
    Transform::new(grid, values.size)?.to_spectral(values)
}
