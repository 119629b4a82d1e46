//! Energy budget, trilinear cancellation, Gronwall bound and blow-up-time
//! forecast evaluated along a run.

use crate::dynamics::{ModelParams, NonlinearEvaluator, SimulationState};
use crate::error::{invalid, Error, Result};
use crate::filters::multiplier_table;
use crate::spectral::{inner_product, sobolev_norm, SpectralField};

/// One diagnostics row. Norm entries are squared norms.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EnergyRecord {
    pub t: f64,
    /// `‖v̄‖²_{0,2}`
    pub e0: f64,
    /// `α^{2θ₂}‖v̄‖²_{θ₂,2}` (zero when the filter is disabled)
    pub e_theta: f64,
    /// `‖v̄‖²_{1,2}`
    pub d1: f64,
    /// `α^{2θ₂}‖v̄‖²_{1+θ₂,2}` (zero when the filter is disabled)
    pub d1_theta: f64,
    /// `⟨f(t), v̄⟩`
    pub work: f64,
    /// `‖v̄‖²_{1+θ₂,2}`, unweighted
    pub n1theta: f64,
    /// `‖v‖²_{0,2}`
    pub v_l2: f64,
    /// `‖v‖²_{1,2}`
    pub v_h1: f64,
    /// `‖ṽ‖²_{1+2θ₁-θ₂,2}`
    pub vt_gronwall: f64,
    /// `‖f(t)‖²_{-1,2}`
    pub f_hm1: f64,
    /// `‖f(t)‖²_{0,2}`
    pub f_l2: f64,
    /// Running energy-identity defect up to `t`; filled by [`fill_residuals`].
    pub residual: f64,
}

impl EnergyRecord {
    /// Weighted energy `E = e0 + e_theta`.
    pub fn energy(&self) -> f64 {
        self.e0 + self.e_theta
    }

    /// Dissipation `D = d1 + d1_theta`.
    pub fn dissipation(&self) -> f64 {
        self.d1 + self.d1_theta
    }
}

/// Precomputed weights for turning states into [`EnergyRecord`]s.
#[derive(Debug, Clone)]
pub struct EnergyMeter {
    params: ModelParams,
    bar: Vec<f64>,
    k2: Vec<f64>,
    // per-mode weights applied to |c_k|² of v̄ (or v, ṽ, f)
    w_theta: Vec<f64>,
    w_one_theta: Vec<f64>,
    w_gronwall: Vec<f64>,
    forcing: Option<SpectralField>,
    weighted: bool,
    alpha_weight: f64,
}

impl EnergyMeter {
    pub fn new(params: &ModelParams) -> Result<Self> {
        let grid = params.grid;
        let bar_filter = params.advected_filter();
        let tilde = multiplier_table(&grid, &params.advecting_filter());
        let bar = multiplier_table(&grid, &bar_filter);
        let k2 = grid.wavenumber_squared_table();
        let (t1, t2) = (params.theta1, params.theta2);
        let power = |q: f64, s: f64| if q == 0.0 { 0.0 } else { q.powf(s) };
        let w_theta = k2.iter().map(|q| power(*q, t2)).collect();
        let w_one_theta = k2.iter().map(|q| power(*q, 1.0 + t2)).collect();
        let w_gronwall = k2
            .iter()
            .zip(&tilde)
            .zip(&bar)
            .map(|((q, t), b)| power(*q, 1.0 + 2.0 * t1 - t2) * t * t / (b * b))
            .collect();
        let forcing = if params.forcing.is_none() {
            None
        } else {
            Some(params.forcing.pattern(&grid)?)
        };
        Ok(Self {
            params: params.clone(),
            bar,
            k2,
            w_theta,
            w_one_theta,
            w_gronwall,
            forcing,
            weighted: !bar_filter.is_disabled(),
            alpha_weight: bar_filter.weight(),
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn record(&self, state: &SimulationState) -> EnergyRecord {
        let len = self.k2.len();
        let d = state.v.data();
        let mut r = EnergyRecord {
            t: state.t,
            ..EnergyRecord::default()
        };
        let (mut th, mut oth, mut gr) = (0.0, 0.0, 0.0);
        for idx in 0..len {
            let a = d[idx].norm_sqr() + d[len + idx].norm_sqr() + d[2 * len + idx].norm_sqr();
            let b = self.bar[idx];
            let ab = a * b * b;
            r.v_l2 += a;
            r.v_h1 += a * self.k2[idx];
            r.e0 += ab;
            r.d1 += ab * self.k2[idx];
            th += ab * self.w_theta[idx];
            oth += ab * self.w_one_theta[idx];
            // w_gronwall carries t²/b², so ab * w = |ṽ|² |k|^{2(1+2θ₁-θ₂)}
            gr += ab * self.w_gronwall[idx];
        }
        r.n1theta = oth;
        r.vt_gronwall = gr;
        if self.weighted {
            r.e_theta = self.alpha_weight * th;
            r.d1_theta = self.alpha_weight * oth;
        }
        if let Some(f) = &self.forcing {
            let g = self.params.forcing.factor(state.t);
            let fd = f.data();
            let (mut work, mut hm1, mut l2) = (0.0, 0.0, 0.0);
            for idx in 0..len {
                if self.k2[idx] == 0.0 {
                    continue;
                }
                let b = self.bar[idx];
                let mut fv = 0.0;
                let mut ff = 0.0;
                for c in 0..3 {
                    let x = fd[c * len + idx];
                    let y = d[c * len + idx];
                    fv += x.re * y.re + x.im * y.im;
                    ff += x.norm_sqr();
                }
                work += fv * b;
                l2 += ff;
                hm1 += ff / self.k2[idx];
            }
            r.work = g * work;
            r.f_l2 = g * g * l2;
            r.f_hm1 = g * g * hm1;
        }
        r
    }
}

/// Diagnostics row for a single state.
pub fn record_from_state(state: &SimulationState, params: &ModelParams) -> Result<EnergyRecord> {
    Ok(EnergyMeter::new(params)?.record(state))
}

/// `E = ‖v̄‖²_{0,2} + α^{2θ₂}‖v̄‖²_{θ₂,2}`.
pub fn weighted_energy(v: &SpectralField, params: &ModelParams) -> Result<f64> {
    let s = SimulationState::new(0.0, v.clone())?;
    Ok(record_from_state(&s, params)?.energy())
}

/// `|⟨Π^N div(ṽ ⊗ v̄), v̄⟩| / (1 + ‖v‖³_{0,2})` on the dealiased grid.
pub fn trilinear_cancellation_defect(v: &SpectralField, params: &ModelParams) -> Result<f64> {
    let mut ev = NonlinearEvaluator::new(params)?;
    trilinear_defect_with(&mut ev, v)
}

/// [`trilinear_cancellation_defect`] with a caller-chosen evaluator, e.g.
/// [`NonlinearEvaluator::aliased`] for the negative control.
pub fn trilinear_defect_with(ev: &mut NonlinearEvaluator, v: &SpectralField) -> Result<f64> {
    let n = ev.nonlinear_term(v)?;
    let vb = crate::filters::apply_helmholtz_filter(v, &ev.params().advected_filter());
    let pairing = inner_product(&n, &vb)?;
    Ok(pairing.abs() / (1.0 + sobolev_norm(v, 0.0).powi(3)))
}

/// Composite trapezoid of `y` over the abscissae `t`, cumulative.
pub fn cumulative_trapezoid(t: &[f64], y: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(t.len());
    let mut acc = 0.0;
    for i in 0..t.len() {
        if i > 0 {
            acc += 0.5 * (t[i] - t[i - 1]) * (y[i] + y[i - 1]);
        }
        out.push(acc);
    }
    out
}

/// Per-record defect `|E(t) + 2ν∫D - 2∫W - E(0)| / E(0)`; the normalization
/// falls back to 1 when `E(0) = 0`.
pub fn running_residuals(records: &[EnergyRecord], nu: f64) -> Result<Vec<f64>> {
    if records.len() < 2 {
        return Err(Error::InsufficientRecords(format!(
            "energy identity needs at least 2 records, got {}",
            records.len()
        )));
    }
    if records.windows(2).any(|w| !(w[1].t >= w[0].t)) {
        return Err(invalid("records must be ordered in time"));
    }
    let t: Vec<f64> = records.iter().map(|r| r.t).collect();
    let d: Vec<f64> = records.iter().map(|r| r.dissipation()).collect();
    let w: Vec<f64> = records.iter().map(|r| r.work).collect();
    let int_d = cumulative_trapezoid(&t, &d);
    let int_w = cumulative_trapezoid(&t, &w);
    let e0 = records[0].energy();
    let scale = if e0 > 0.0 { e0 } else { 1.0 };
    Ok(records
        .iter()
        .zip(int_d.iter().zip(&int_w))
        .map(|(r, (id, iw))| (r.energy() + 2.0 * nu * id - 2.0 * iw - e0).abs() / scale)
        .collect())
}

/// Maximum of [`running_residuals`].
pub fn energy_identity_residual(records: &[EnergyRecord], nu: f64) -> Result<f64> {
    Ok(running_residuals(records, nu)?.into_iter().fold(0.0, f64::max))
}

/// Stores the running defect in each record's `residual` field.
pub fn fill_residuals(records: &mut [EnergyRecord], nu: f64) -> Result<()> {
    let res = running_residuals(records, nu)?;
    for (r, x) in records.iter_mut().zip(res) {
        r.residual = x;
    }
    Ok(())
}

/// Exponent in `Y' ≤ C Y^γ`, `γ = 2(3+2θ₂+4θ₁)/(1+2θ₂+4θ₁)`.
pub fn gamma_exponent(theta1: f64, theta2: f64) -> f64 {
    2.0 * (3.0 + 2.0 * theta2 + 4.0 * theta1) / (1.0 + 2.0 * theta2 + 4.0 * theta1)
}

/// The value `(3+2θ₂+4θ₁)/(1+2θ₂+4θ₁)` quoted in the covering argument,
/// half of [`gamma_exponent`].
pub fn gamma_exponent_alternate(theta1: f64, theta2: f64) -> f64 {
    0.5 * gamma_exponent(theta1, theta2)
}

/// Strong-solution horizon predicted from `Y' ≤ C Y^γ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlowupForecast {
    pub gamma: f64,
    pub t_star: f64,
    /// Bound on `∫₀^{T*} ‖v̄‖²_{2+θ₂,2} dt`, once attached with
    /// [`BlowupForecast::with_m_bound`].
    pub m_bound: Option<f64>,
    pub c_const: f64,
    /// `Y(0) = 1 + ‖v̄₀‖²_{1+θ₂,2}`
    pub y0: f64,
}

impl BlowupForecast {
    /// Attaches `M(T*) = (1/ν)(‖v̄₀‖²_{1+θ₂,2} + (2/ν)∫₀^{T*}‖f‖²_{0,2} dt + C (2Y(0))^γ)`.
    pub fn with_m_bound(mut self, nu: f64, forcing_l2_integral: f64) -> Result<Self> {
        if !(nu > 0.0) {
            return Err(invalid(format!("viscosity must be positive, got {nu}")));
        }
        if !(forcing_l2_integral >= 0.0) {
            return Err(invalid("forcing integral must be non-negative"));
        }
        let m = ((self.y0 - 1.0)
            + 2.0 / nu * forcing_l2_integral
            + self.c_const * (2.0 * self.y0).powf(self.gamma))
            / nu;
        self.m_bound = Some(m);
        Ok(self)
    }
}

/// `T* = 3 / (8 C) · Y(0)^{-(γ-1)}`.
pub fn predict_blowup_time(y0: f64, c_const: f64, gamma: f64) -> Result<BlowupForecast> {
    if !(y0 >= 1.0) {
        return Err(invalid(format!("Y(0) = 1 + ‖v̄₀‖² must be >= 1, got {y0}")));
    }
    if !(c_const > 0.0 && c_const.is_finite()) {
        return Err(invalid(format!("C must be positive, got {c_const}")));
    }
    if !(gamma > 1.0) {
        return Err(invalid(format!("γ must exceed 1, got {gamma}")));
    }
    Ok(BlowupForecast {
        gamma,
        t_star: 0.375 / c_const * y0.powf(-(gamma - 1.0)),
        m_bound: None,
        c_const,
        y0,
    })
}

/// Forecast for an initial field under `params`, with `M(T*)` attached for
/// the model's (autonomous or modulated) forcing.
pub fn forecast_for(v0: &SpectralField, params: &ModelParams, c_const: f64) -> Result<BlowupForecast> {
    let meter = EnergyMeter::new(params)?;
    let r0 = meter.record(&SimulationState::new(0.0, v0.clone())?);
    let f = predict_blowup_time(
        1.0 + r0.n1theta,
        c_const,
        gamma_exponent(params.theta1, params.theta2),
    )?;
    // ∫₀^{T*} ‖f‖² by trapezoid on a fine uniform grid
    let samples = 257;
    let ts: Vec<f64> = (0..samples).map(|i| f.t_star * i as f64 / (samples - 1) as f64).collect();
    let mut zero = SpectralField::zero_vector(params.grid);
    zero.pin_mean();
    let fl2: Vec<f64> = ts
        .iter()
        .map(|t| {
            let s = SimulationState { t: *t, v: zero.clone(), step_index: 0 };
            meter.record(&s).f_l2
        })
        .collect();
    let integral = *cumulative_trapezoid(&ts, &fl2).last().unwrap_or(&0.0);
    f.with_m_bound(params.nu, integral)
}

/// Outcome of the discrete Gronwall check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GronwallReport {
    /// Whether the inequality holds with the supplied constant.
    pub holds: bool,
    pub c_const: f64,
    /// `sup_t ‖v‖²_{0,2}`
    pub lhs: f64,
    /// Right-hand side at the supplied constant.
    pub rhs: f64,
    /// Smallest constant for which the inequality holds; `None` when no
    /// finite constant works.
    pub c_min: Option<f64>,
}

/// Checks `sup ‖v‖² ≤ (‖v₀‖² + (2C/ν)∫‖f‖²_{-1}) exp((2C/(ν α^{2θ₂}))∫‖ṽ‖²_{1+2θ₁-θ₂})`
/// with time integrals by trapezoid over the records.
pub fn gronwall_h1_bound_check(
    records: &[EnergyRecord],
    params: &ModelParams,
    c_const: f64,
) -> Result<GronwallReport> {
    if records.is_empty() {
        return Err(Error::InsufficientRecords("Gronwall check needs records".into()));
    }
    if !(c_const >= 0.0) {
        return Err(invalid(format!("C must be non-negative, got {c_const}")));
    }
    let t: Vec<f64> = records.iter().map(|r| r.t).collect();
    let fh: Vec<f64> = records.iter().map(|r| r.f_hm1).collect();
    let vt: Vec<f64> = records.iter().map(|r| r.vt_gronwall).collect();
    let int_f = *cumulative_trapezoid(&t, &fh).last().unwrap();
    let int_v = *cumulative_trapezoid(&t, &vt).last().unwrap();
    let nu = params.nu;
    let a = records[0].v_l2;
    let b = 2.0 / nu * int_f;
    let k = 2.0 / (nu * params.advected_filter().weight()) * int_v;
    let lhs = records.iter().map(|r| r.v_l2).fold(0.0, f64::max);
    let rhs_at = |c: f64| (a + c * b) * (c * k).exp();
    let rhs = rhs_at(c_const);
    // slack for the roundoff in sup over a decaying series at t = 0
    let fits = |c: f64| lhs <= rhs_at(c) * (1.0 + 1e-12);

    let c_min = if fits(0.0) {
        Some(0.0)
    } else if b == 0.0 && k == 0.0 {
        None
    } else if b == 0.0 && a > 0.0 {
        Some((lhs / a).ln() / k)
    } else {
        let mut hi = 1.0;
        while !fits(hi) {
            hi *= 2.0;
            if !hi.is_finite() || hi > 1e300 {
                break;
            }
        }
        if fits(hi) {
            let mut lo = 0.0;
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if fits(mid) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            Some(hi)
        } else {
            None
        }
    };
    Ok(GronwallReport {
        holds: fits(c_const),
        c_const,
        lhs,
        rhs,
        c_min,
    })
}
