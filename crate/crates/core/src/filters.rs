//! Fractional Helmholtz filters `α^{2θ}(-Δ)^θ ū + ū = u`, applied as
//! diagonal Fourier multipliers.

use crate::error::{invalid, Result};
use crate::spectral::SpectralField;

/// Length scale and fractional order of one filter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterParams {
    alpha: f64,
    theta: f64,
}

impl FilterParams {
    pub fn new(alpha: f64, theta: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(invalid(format!("alpha must be positive, got {alpha}")));
        }
        if !(0.0..=1.0).contains(&theta) {
            return Err(invalid(format!("theta must lie in [0, 1], got {theta}")));
        }
        Ok(Self { alpha, theta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// `θ = 0` switches the filter off.
    pub fn is_disabled(&self) -> bool {
        self.theta == 0.0
    }

    /// `α^{2θ}`, the weight in front of the fractional Laplacian.
    pub fn weight(&self) -> f64 {
        self.alpha.powf(2.0 * self.theta)
    }
}

/// `1 / (1 + α^{2θ} |k|^{2θ})`, or `1` when the filter is disabled.
pub fn filter_multiplier(k_mag: f64, p: &FilterParams) -> f64 {
    if p.is_disabled() {
        return 1.0;
    }
    1.0 / (1.0 + (p.alpha * k_mag).powf(2.0 * p.theta))
}

pub fn apply_helmholtz_filter(u: &SpectralField, p: &FilterParams) -> SpectralField {
    if p.is_disabled() {
        return u.clone();
    }
    u.map_multiplier(|_, k| filter_multiplier(k, p))
}

/// Recovers `u` from `ū` by multiplying with `1 + α^{2θ}|k|^{2θ}`.
pub fn invert_helmholtz_filter(u_bar: &SpectralField, p: &FilterParams) -> SpectralField {
    if p.is_disabled() {
        return u_bar.clone();
    }
    u_bar.map_multiplier(|_, k| 1.0 + (p.alpha * k).powf(2.0 * p.theta))
}

/// Per-mode multiplier table in the flat order of `grid`.
pub fn multiplier_table(grid: &crate::spectral::Grid, p: &FilterParams) -> Vec<f64> {
    grid.wavenumber_squared_table()
        .into_iter()
        .map(|k2| filter_multiplier(k2.sqrt(), p))
        .collect()
}
