use num_complex::Complex64;

use super::{ModelParams, SimulationState};
use crate::error::{Error, Result};
use crate::filters::multiplier_table;
use crate::spectral::{FieldKind, SpectralField, Transform};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

// Index of the symmetric product w_a w_b among the six stored ones.
const SYM: [[usize; 3]; 3] = [[0, 1, 2], [1, 3, 4], [2, 4, 5]];
const SYM_PAIRS: [(usize, usize); 6] = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];

/// Values of field `f`, stored in the real (even `f`) or imaginary part of
/// `phys[f / 2]`.
#[inline]
fn field_values(phys: &[Vec<Complex64>], f: usize) -> impl Iterator<Item = &f64> {
    let flat: &[f64] = bytemuck::cast_slice(&phys[f / 2]);
    flat[f % 2..].iter().step_by(2)
}

/// Pseudo-spectral evaluator of the filtered flux `Π^N(ṽ_j v̄_i)` and the
/// terms built from it.
///
/// Holds transform plans and work buffers, so one evaluator should be reused
/// across calls. When `θ₁ = θ₂` the two filtered fields coincide and only the
/// six symmetric products are formed.
pub struct NonlinearEvaluator {
    params: ModelParams,
    transform: Transform,
    tilde: Vec<f64>,
    bar: Vec<f64>,
    shared: bool,
    wave: Vec<[f64; 3]>,
    k2: Vec<f64>,
    forcing: Option<SpectralField>,
    coeff: Vec<Vec<Complex64>>,
    phys: Vec<Vec<Complex64>>,
    products: Vec<(usize, usize)>,
    flux: Vec<Vec<Complex64>>,
    max_speed: f64,
}

impl std::fmt::Debug for NonlinearEvaluator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("NonlinearEvaluator")
            .field("grid", &self.params.grid)
            .field("resolution", &self.transform.size())
            .field("shared_filter", &self.shared)
            .finish()
    }
}

impl NonlinearEvaluator {
    /// Evaluator at the smallest fast alias-free resolution.
    pub fn new(params: &ModelParams) -> Result<Self> {
        Self::with_resolution(params, params.grid.dealiased_resolution())
    }

    /// Evaluator with `size` collocation points per axis; `size` must be at
    /// least `3N + 1` so that truncated products are exact convolutions.
    pub fn with_resolution(params: &ModelParams, size: usize) -> Result<Self> {
        let required = params.grid.min_dealiased_resolution();
        if size < required {
            return Err(Error::Resolution {
                size,
                required,
                reason: "alias-free quadratic products",
            });
        }
        Self::build(params, size)
    }

    /// Evaluator on the coarsest lossless grid, `2N + 1` points, where the
    /// products alias back into the retained modes. Only useful as a
    /// negative control.
    pub fn aliased(params: &ModelParams) -> Result<Self> {
        Self::build(params, params.grid.min_resolution())
    }

    fn build(params: &ModelParams, size: usize) -> Result<Self> {
        let grid = params.grid;
        let transform = Transform::new(grid, size)?;
        let tilde = multiplier_table(&grid, &params.advecting_filter());
        let bar = multiplier_table(&grid, &params.advected_filter());
        let shared = params.theta1 == params.theta2;
        let len = grid.len();
        let wave: Vec<[f64; 3]> = (0..len).map(|i| grid.wavevector(i)).collect();
        let k2 = grid.wavenumber_squared_table();
        let forcing = if params.forcing.is_none() {
            None
        } else {
            Some(params.forcing.pattern(&grid)?)
        };
        let (fields, products): (usize, Vec<(usize, usize)>) = if shared {
            (3, SYM_PAIRS.to_vec())
        } else {
            (6, (0..9).map(|s| (s / 3, 3 + s % 3)).collect())
        };
        let points = transform.point_count();
        Ok(Self {
            params: params.clone(),
            transform,
            tilde,
            bar,
            shared,
            wave,
            k2,
            forcing,
            coeff: vec![vec![ZERO; len]; fields],
            phys: vec![vec![ZERO; points]; fields.div_ceil(2)],
            flux: vec![vec![ZERO; len]; products.len()],
            products,
            max_speed: 0.0,
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    /// Collocation points per axis.
    pub fn resolution(&self) -> usize {
        self.transform.size()
    }

    /// `max_x |ṽ(x)|` over the collocation grid from the most recent evaluation.
    pub fn max_advecting_speed(&self) -> f64 {
        self.max_speed
    }

    fn check_input(&self, v: &SpectralField) -> Result<()> {
        v.require_vector()?;
        if v.grid() != &self.params.grid {
            return Err(Error::GridMismatch(
                "field does not live on the model grid".into(),
            ));
        }
        Ok(())
    }

    /// Slot in `self.flux` holding `Π^N(ṽ_j v̄_i)`.
    #[inline]
    fn flux_slot(&self, j: usize, i: usize) -> usize {
        if self.shared {
            SYM[j][i]
        } else {
            3 * j + i
        }
    }

    /// Fills `self.flux` with the truncated products of the filtered fields.
    fn compute_flux(&mut self, v: &SpectralField) -> Result<()> {
        self.check_input(v)?;
        for c in 0..3 {
            let src = v.component(c);
            for ((d, s), m) in self.coeff[c].iter_mut().zip(src).zip(&self.tilde) {
                *d = s * *m;
            }
            if !self.shared {
                for ((d, s), m) in self.coeff[3 + c].iter_mut().zip(src).zip(&self.bar) {
                    *d = s * *m;
                }
            }
        }

        // field f travels in phys[f / 2], real part for even f
        for (slot, out) in self.phys.iter_mut().enumerate() {
            let a = &self.coeff[2 * slot];
            let b = self.coeff.get(2 * slot + 1);
            self.transform.inverse_packed_into(a, b.map(|v| v.as_slice()), out);
        }

        let w01 = &self.phys[0];
        let w2 = &self.phys[1];
        let mut speed2 = 0.0f64;
        for (p, q) in w01.iter().zip(w2) {
            speed2 = speed2.max(p.norm_sqr() + q.re * q.re);
        }
        self.max_speed = speed2.sqrt();

        let products = self.products.len();
        let mut s = 0;
        while s < products {
            let phys = &self.phys;
            let (fa, fb) = self.products[s];
            let second = self.products.get(s + 1).copied();
            let fill = |full: &mut [Complex64]| {
                let (a, b) = (field_values(phys, fa), field_values(phys, fb));
                match second {
                    Some((fc, fd)) => {
                        let (c, d) = (field_values(phys, fc), field_values(phys, fd));
                        for ((((f, a), b), c), d) in full.iter_mut().zip(a).zip(b).zip(c).zip(d) {
                            *f = Complex64::new(a * b, c * d);
                        }
                    }
                    None => {
                        for ((f, a), b) in full.iter_mut().zip(a).zip(b) {
                            *f = Complex64::new(a * b, 0.0);
                        }
                    }
                }
            };
            if second.is_some() {
                let (lo, hi) = self.flux.split_at_mut(s + 1);
                self.transform.forward_with(fill, &mut lo[s], Some(&mut hi[0]));
                s += 2;
            } else {
                self.transform.forward_with(fill, &mut self.flux[s], None);
                s += 1;
            }
        }
        Ok(())
    }

    /// Writes `N_i = i Σ_j k_j Π^N(ṽ_j v̄_i)` into `out`.
    fn assemble_divergence(&self, out: &mut SpectralField) {
        let len = self.k2.len();
        let slots: [[usize; 3]; 3] =
            std::array::from_fn(|j| std::array::from_fn(|i| self.flux_slot(j, i)));
        let data = out.data_mut();
        for i in 0..3 {
            let (q0, q1, q2) = (
                &self.flux[slots[0][i]],
                &self.flux[slots[1][i]],
                &self.flux[slots[2][i]],
            );
            for idx in 0..len {
                let k = self.wave[idx];
                let s = q0[idx] * k[0] + q1[idx] * k[1] + q2[idx] * k[2];
                data[i * len + idx] = Complex64::new(-s.im, s.re);
            }
        }
    }

    /// `p̂ = -Σ_ij k_i k_j Π^N(ṽ_i v̄_j) / |k|²` with `p̂_0 = 0`.
    fn assemble_pressure(&self) -> SpectralField {
        let grid = self.params.grid;
        let len = grid.len();
        let zero = grid.zero_index();
        let mut p = SpectralField::zeros(grid, FieldKind::Scalar);
        let data = p.data_mut();
        for idx in 0..len {
            if idx == zero {
                continue;
            }
            let k = self.wave[idx];
            let mut s = ZERO;
            for i in 0..3 {
                for j in 0..3 {
                    s += self.flux[self.flux_slot(i, j)][idx] * (k[i] * k[j]);
                }
            }
            data[idx] = -s / self.k2[idx];
        }
        p
    }

    /// `Π^N div(ṽ ⊗ v̄)`, with the divergence taken over the advecting index.
    pub fn nonlinear_term(&mut self, v: &SpectralField) -> Result<SpectralField> {
        self.compute_flux(v)?;
        let mut out = SpectralField::zero_vector(self.params.grid);
        self.assemble_divergence(&mut out);
        Ok(out)
    }

    /// Mean-zero pressure balancing the nonlinear term.
    pub fn pressure(&mut self, v: &SpectralField) -> Result<SpectralField> {
        self.compute_flux(v)?;
        Ok(self.assemble_pressure())
    }

    /// Nonlinear term and pressure from a single flux evaluation.
    pub fn nonlinear_and_pressure(
        &mut self,
        v: &SpectralField,
    ) -> Result<(SpectralField, SpectralField)> {
        self.compute_flux(v)?;
        let mut n = SpectralField::zero_vector(self.params.grid);
        self.assemble_divergence(&mut n);
        Ok((n, self.assemble_pressure()))
    }

    /// Writes the non-stiff part `-P Π^N div(ṽ ⊗ v̄) + f(t)` into `out`.
    pub fn explicit_rhs(&mut self, v: &SpectralField, t: f64, out: &mut SpectralField) -> Result<()> {
        self.compute_flux(v)?;
        self.check_input(out)?;
        self.assemble_divergence(out);
        let len = self.k2.len();
        let zero = self.params.grid.zero_index();
        let data = out.data_mut();
        for idx in 0..len {
            if idx == zero {
                continue;
            }
            let k = self.wave[idx];
            let (a, b, c) = (data[idx], data[len + idx], data[2 * len + idx]);
            let dot = (a * k[0] + b * k[1] + c * k[2]) / self.k2[idx];
            data[idx] = dot * k[0] - a;
            data[len + idx] = dot * k[1] - b;
            data[2 * len + idx] = dot * k[2] - c;
        }
        if let Some(f) = &self.forcing {
            let g = self.params.forcing.factor(t);
            out.axpy(g, f)?;
        }
        Ok(())
    }

    /// Full right-hand side `-P Π^N div(ṽ ⊗ v̄) + νΔv + f(t)`.
    pub fn tendency(&mut self, v: &SpectralField, t: f64) -> Result<SpectralField> {
        let mut out = SpectralField::zero_vector(self.params.grid);
        self.explicit_rhs(v, t, &mut out)?;
        self.add_viscous(v, &mut out);
        Ok(out)
    }

    /// Same right-hand side assembled as `-Π^N div(ṽ ⊗ v̄) - ∇p + νΔv + f(t)`.
    pub fn tendency_via_pressure(&mut self, v: &SpectralField, t: f64) -> Result<SpectralField> {
        let (n, p) = self.nonlinear_and_pressure(v)?;
        let grad = crate::spectral::gradient(&p)?;
        let mut out = SpectralField::zero_vector(self.params.grid);
        out.axpy(-1.0, &n)?;
        out.axpy(-1.0, &grad)?;
        self.add_viscous(v, &mut out);
        if let Some(f) = &self.forcing {
            out.axpy(self.params.forcing.factor(t), f)?;
        }
        Ok(out)
    }

    fn add_viscous(&self, v: &SpectralField, out: &mut SpectralField) {
        let len = self.k2.len();
        let nu = self.params.nu;
        let src = v.data();
        let dst = out.data_mut();
        for c in 0..3 {
            for idx in 0..len {
                dst[c * len + idx] -= src[c * len + idx] * (nu * self.k2[idx]);
            }
        }
    }
}

/// `Π^N div(ṽ ⊗ v̄)` on the dealiased grid.
pub fn nonlinear_term(v: &SpectralField, params: &ModelParams) -> Result<SpectralField> {
    NonlinearEvaluator::new(params)?.nonlinear_term(v)
}

/// Pressure recovered from the filtered flux through the Riesz multipliers.
pub fn pressure_field(v: &SpectralField, params: &ModelParams) -> Result<SpectralField> {
    NonlinearEvaluator::new(params)?.pressure(v)
}

/// Right-hand side of the Galerkin system at `state`.
pub fn tendency(state: &SimulationState, params: &ModelParams) -> Result<SpectralField> {
    NonlinearEvaluator::new(params)?.tendency(&state.v, state.t)
}
