//! Torus lattice, spectral fields, transforms, projections and Sobolev norms.

mod field;
mod grid;
mod transform;

pub use field::{FieldKind, SpectralField};
pub use grid::{smooth_size, Grid};
pub use transform::{to_physical, to_spectral, PhysicalField, Transform};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Result};

/// `‖u‖_{s,2} = (Σ_{k≠0} |k|^{2s} |c_k|^2)^{1/2}`, summing all components.
pub fn sobolev_norm(field: &SpectralField, s: f64) -> f64 {
    sobolev_norm_squared(field, s).sqrt()
}

/// Square of [`sobolev_norm`].
pub fn sobolev_norm_squared(field: &SpectralField, s: f64) -> f64 {
    let grid = field.grid();
    let n = grid.len();
    let zero = grid.zero_index();
    let comps = field.components();
    let data = field.data();
    let mut total = 0.0;
    for i in 0..n {
        if i == zero {
            continue;
        }
        let k = grid.wavevector(i);
        let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        let weight = if s == 0.0 { 1.0 } else { k2.powf(s) };
        let mut amp = 0.0;
        for c in 0..comps {
            amp += data[c * n + i].norm_sqr();
        }
        total += weight * amp;
    }
    total
}

/// Parseval pairing `Σ_k Re(a_k · conj(b_k))`, equal to the collocation
/// average of `a(x)·b(x)`.
pub fn inner_product(a: &SpectralField, b: &SpectralField) -> Result<f64> {
    a.check_compatible(b)?;
    Ok(a.data()
        .iter()
        .zip(b.data())
        .map(|(x, y)| x.re * y.re + x.im * y.im)
        .sum())
}

/// Orthogonal projection onto divergence-free fields, `c_k - k (k·c_k)/|k|^2`.
pub fn leray_project(field: &SpectralField) -> Result<SpectralField> {
    let mut out = field.clone();
    leray_project_in_place(&mut out)?;
    Ok(out)
}

/// In-place form of [`leray_project`].
pub fn leray_project_in_place(field: &mut SpectralField) -> Result<()> {
    field.require_vector()?;
    let grid = *field.grid();
    let n = grid.len();
    let r = grid.n() as i64;
    let kappa = grid.kappa();
    let data = field.data_mut();
    let (x, rest) = data.split_at_mut(n);
    let (y, z) = rest.split_at_mut(n);
    let mut i = 0;
    for kx in -r..=r {
        for ky in -r..=r {
            for kz in -r..=r {
                if (kx, ky, kz) != (0, 0, 0) {
                    let k = [kx as f64 * kappa, ky as f64 * kappa, kz as f64 * kappa];
                    let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
                    let dot = (x[i] * k[0] + y[i] * k[1] + z[i] * k[2]) / k2;
                    x[i] -= dot * k[0];
                    y[i] -= dot * k[1];
                    z[i] -= dot * k[2];
                }
                i += 1;
            }
        }
    }
    Ok(())
}

/// Zeroes every coefficient with some `|k_j|` above `radius`.
pub fn truncate_modes(field: &SpectralField, radius: usize) -> Result<SpectralField> {
    if radius < 1 {
        return Err(invalid("truncation radius must be at least 1"));
    }
    let grid = *field.grid();
    let r = radius as i64;
    let n = grid.len();
    let mut out = field.clone();
    let comps = out.components();
    let data = out.data_mut();
    for (i, k) in grid.modes() {
        if k.iter().any(|c| c.abs() > r) {
            for c in 0..comps {
                data[c * n + i] = Complex64::new(0.0, 0.0);
            }
        }
    }
    Ok(out)
}

/// Deterministic random divergence-free vector field with coefficient
/// moduli scaled by `(1 + |k|)^{-decay}`.
pub fn random_divfree(grid: Grid, seed: u64, decay: f64) -> Result<SpectralField> {
    if !(decay.is_finite() && decay >= 0.0) {
        return Err(invalid(format!("decay must be non-negative, got {decay}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut field = SpectralField::zero_vector(grid);
    let n = grid.len();
    let half = grid.zero_index();
    {
        let data = field.data_mut();
        for i in 0..half {
            let k = grid.wavevector(i);
            let kmag = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt();
            let scale = (1.0 + kmag).powf(-decay);
            let j = n - 1 - i;
            for c in 0..3 {
                let re: f64 = rng.random_range(-1.0..1.0);
                let im: f64 = rng.random_range(-1.0..1.0);
                let v = Complex64::new(re, im) * scale;
                data[c * n + i] = v;
                data[c * n + j] = v.conj();
            }
        }
    }
    let mut out = leray_project(&field)?;
    out.pin_mean();
    Ok(out)
}

/// Spectral divergence `i k·c_k` of a vector field, as a scalar field.
pub fn divergence(field: &SpectralField) -> Result<SpectralField> {
    field.require_vector()?;
    let grid = *field.grid();
    let n = grid.len();
    let mut out = SpectralField::zero_scalar(grid);
    let src = field.data();
    let dst = out.data_mut();
    for (i, d) in dst.iter_mut().enumerate() {
        let k = grid.wavevector(i);
        let dot = src[i] * k[0] + src[n + i] * k[1] + src[2 * n + i] * k[2];
        *d = Complex64::new(-dot.im, dot.re);
    }
    Ok(out)
}

/// Spectral gradient `i k p_k` of a scalar field.
pub fn gradient(field: &SpectralField) -> Result<SpectralField> {
    if field.kind() != FieldKind::Scalar {
        return Err(crate::Error::KindMismatch {
            expected: "scalar",
            found: field.kind().name(),
        });
    }
    let grid = *field.grid();
    let n = grid.len();
    let mut out = SpectralField::zero_vector(grid);
    let src = field.data();
    let dst = out.data_mut();
    for i in 0..n {
        let k = grid.wavevector(i);
        let ip = Complex64::new(-src[i].im, src[i].re);
        dst[i] = ip * k[0];
        dst[n + i] = ip * k[1];
        dst[2 * n + i] = ip * k[2];
    }
    Ok(out)
}
