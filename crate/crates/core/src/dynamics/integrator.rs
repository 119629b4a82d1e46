use num_complex::Complex64;

use super::{ModelParams, NonlinearEvaluator, SimulationState};
use crate::error::{invalid, Error, Result};
use crate::filters::multiplier_table;
use crate::spectral::SpectralField;

/// How the step size is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DtPolicy {
    Fixed(f64),
    /// `dt = safety · min(1/(ν κ² N²), cfl · Δx / max|ṽ|)`, re-evaluated each step.
    Auto { safety: f64, cfl: f64 },
}

impl DtPolicy {
    pub fn auto() -> Self {
        DtPolicy::Auto {
            safety: 0.25,
            cfl: 0.5,
        }
    }

    /// `Fixed(dt)` for `dt > 0`, automatic for `dt == 0`.
    pub fn from_dt(dt: f64) -> Result<Self> {
        if dt == 0.0 {
            Ok(Self::auto())
        } else if dt.is_finite() && dt > 0.0 {
            Ok(DtPolicy::Fixed(dt))
        } else {
            Err(invalid(format!("time step must be positive (or 0 for auto), got {dt}")))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegratorConfig {
    pub dt: DtPolicy,
    /// Observer cadence in steps.
    pub diag_interval: u64,
    /// Stop once `‖v̄‖_{1+θ₂,2}` exceeds this value.
    pub blowup_guard: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            dt: DtPolicy::auto(),
            diag_interval: 10,
            blowup_guard: 1e8,
        }
    }
}

impl IntegratorConfig {
    pub fn fixed(dt: f64) -> Self {
        Self {
            dt: DtPolicy::Fixed(dt),
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        match self.dt {
            DtPolicy::Fixed(dt) if !(dt.is_finite() && dt > 0.0) => {
                return Err(invalid(format!("time step must be positive, got {dt}")))
            }
            DtPolicy::Auto { safety, cfl } if !(safety > 0.0 && cfl > 0.0) => {
                return Err(invalid("auto time step constants must be positive"))
            }
            _ => {}
        }
        if self.diag_interval == 0 {
            return Err(invalid("diag_interval must be at least 1"));
        }
        if !(self.blowup_guard > 0.0) {
            return Err(invalid("blowup_guard must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlowupReason {
    NonFinite,
    GuardExceeded,
}

/// Where and why an integration stopped early.
#[derive(Debug, Clone, PartialEq)]
pub struct BlowupEvent {
    pub reason: BlowupReason,
    /// Last time at which the state was finite and below the guard.
    pub t_last_finite: f64,
    pub step_index: u64,
    /// `‖v̄‖_{1+θ₂,2}` at the offending step (may be infinite or NaN).
    pub norm: f64,
}

#[derive(Debug, Clone)]
pub struct IntegrationOutcome {
    /// Final state, or the last accepted state when a blow-up was detected.
    pub state: SimulationState,
    pub steps: u64,
    pub blowup: Option<BlowupEvent>,
}

/// Integrating-factor RK4 for the Galerkin system.
///
/// The viscous factor `e^{-ν|k|²h}` is applied exactly per mode; the
/// projected nonlinearity and forcing are advanced by classical RK4 in the
/// interaction picture.
#[derive(Debug)]
pub struct Integrator {
    evaluator: NonlinearEvaluator,
    config: IntegratorConfig,
    k2: Vec<f64>,
    guard_weight: Vec<f64>,
    cached_h: f64,
    e_half: Vec<f64>,
    e_full: Vec<f64>,
    k1: SpectralField,
    k2s: SpectralField,
    k3: SpectralField,
    k4: SpectralField,
    work: SpectralField,
}

impl Integrator {
    pub fn new(params: &ModelParams, config: IntegratorConfig) -> Result<Self> {
        config.validate()?;
        Self::with_evaluator(NonlinearEvaluator::new(params)?, config)
    }

    pub fn with_evaluator(evaluator: NonlinearEvaluator, config: IntegratorConfig) -> Result<Self> {
        config.validate()?;
        let params = evaluator.params();
        let grid = params.grid;
        let k2 = grid.wavenumber_squared_table();
        let bar = multiplier_table(&grid, &params.advected_filter());
        let s = 1.0 + params.theta2;
        let guard_weight = k2
            .iter()
            .zip(&bar)
            .map(|(q, b)| if *q == 0.0 { 0.0 } else { q.powf(s) * b * b })
            .collect();
        let zero = SpectralField::zero_vector(grid);
        Ok(Self {
            e_half: vec![1.0; grid.len()],
            e_full: vec![1.0; grid.len()],
            cached_h: f64::NAN,
            k2,
            guard_weight,
            evaluator,
            config,
            k1: zero.clone(),
            k2s: zero.clone(),
            k3: zero.clone(),
            k4: zero.clone(),
            work: zero,
        })
    }

    pub fn params(&self) -> &ModelParams {
        self.evaluator.params()
    }

    pub fn config(&self) -> &IntegratorConfig {
        &self.config
    }

    pub fn evaluator_mut(&mut self) -> &mut NonlinearEvaluator {
        &mut self.evaluator
    }

    /// `‖v̄‖_{1+θ₂,2}`, the quantity watched by the blow-up guard.
    pub fn guard_norm(&self, v: &SpectralField) -> f64 {
        let len = self.k2.len();
        let d = v.data();
        let mut total = 0.0;
        for (idx, w) in self.guard_weight.iter().enumerate() {
            let a = d[idx].norm_sqr() + d[len + idx].norm_sqr() + d[2 * len + idx].norm_sqr();
            total += w * a;
        }
        total.sqrt()
    }

    /// Step size suggested for `v` under the configured policy.
    pub fn suggest_dt(&mut self, v: &SpectralField) -> Result<f64> {
        if let DtPolicy::Fixed(dt) = self.config.dt {
            return Ok(dt);
        }
        let mut scratch = SpectralField::zero_vector(*v.grid());
        self.evaluator.explicit_rhs(v, 0.0, &mut scratch)?;
        Ok(self.auto_dt(self.evaluator.max_advecting_speed()))
    }

    fn auto_dt(&self, speed: f64) -> f64 {
        match self.config.dt {
            DtPolicy::Fixed(dt) => dt,
            DtPolicy::Auto { safety, cfl } => {
                let params = self.evaluator.params();
                let grid = params.grid;
                let kmax = grid.kappa() * grid.n() as f64;
                let viscous = 1.0 / (params.nu * kmax * kmax);
                let dx = grid.length() / self.evaluator.resolution() as f64;
                let advective = if speed > 0.0 { cfl * dx / speed } else { f64::INFINITY };
                safety * viscous.min(advective)
            }
        }
    }

    fn prepare_factors(&mut self, h: f64) {
        if h == self.cached_h {
            return;
        }
        let nu = self.evaluator.params().nu;
        for ((eh, ef), q) in self.e_half.iter_mut().zip(&mut self.e_full).zip(&self.k2) {
            *eh = (-nu * q * 0.5 * h).exp();
            *ef = (-nu * q * h).exp();
        }
        self.cached_h = h;
    }

    /// One IF-RK4 step of size `h`.
    pub fn step(&mut self, state: &SimulationState, h: f64) -> Result<SimulationState> {
        if !(h.is_finite() && h > 0.0) {
            return Err(invalid(format!("time step must be positive, got {h}")));
        }
        self.prepare_factors(h);
        let t = state.t;
        let v = &state.v;

        self.evaluator.explicit_rhs(v, t, &mut self.k1)?;

        let vd = v.data();
        // a = E(h/2)(v + h/2 k1)
        combine(&mut self.work, &self.e_half, &self.e_full, |i, e, _| {
            (vd[i] + self.k1.data()[i] * (0.5 * h)) * e
        });
        self.evaluator.explicit_rhs(&self.work, t + 0.5 * h, &mut self.k2s)?;

        // b = E(h/2) v + h/2 k2
        combine(&mut self.work, &self.e_half, &self.e_full, |i, e, _| {
            vd[i] * e + self.k2s.data()[i] * (0.5 * h)
        });
        self.evaluator.explicit_rhs(&self.work, t + 0.5 * h, &mut self.k3)?;

        // c = E(h) v + h E(h/2) k3
        combine(&mut self.work, &self.e_half, &self.e_full, |i, eh, ef| {
            vd[i] * ef + self.k3.data()[i] * (h * eh)
        });
        self.evaluator.explicit_rhs(&self.work, t + h, &mut self.k4)?;

        let mut next = SpectralField::zero_vector(*v.grid());
        let (k1, k2, k3, k4) = (self.k1.data(), self.k2s.data(), self.k3.data(), self.k4.data());
        combine(&mut next, &self.e_half, &self.e_full, |i, eh, ef| {
            vd[i] * ef + (k1[i] * ef + (k2[i] + k3[i]) * (2.0 * eh) + k4[i]) * (h / 6.0)
        });

        crate::spectral::leray_project_in_place(&mut next)?;
        next.enforce_symmetry();
        if !next.is_finite() {
            return Err(Error::NonFinite { t: t + h });
        }
        Ok(SimulationState {
            t: t + h,
            v: next,
            step_index: state.step_index + 1,
        })
    }

    /// Advances `state0` to `t_end`, calling `observer` at the start, every
    /// `diag_interval` steps and after the final step.
    ///
    /// With a fixed step the last step is shortened to land on `t_end`
    /// exactly. A nonfinite state or a guard violation ends the run with a
    /// [`BlowupEvent`]; the returned state is then the last accepted one.
    pub fn integrate(
        &mut self,
        state0: SimulationState,
        t_end: f64,
        mut observer: impl FnMut(&SimulationState),
    ) -> Result<IntegrationOutcome> {
        if !(t_end >= state0.t) {
            return Err(invalid(format!(
                "t_end = {t_end} precedes the initial time {}",
                state0.t
            )));
        }
        observer(&state0);
        let t0 = state0.t;
        let span = t_end - t0;
        if span == 0.0 {
            return Ok(IntegrationOutcome {
                state: state0,
                steps: 0,
                blowup: None,
            });
        }

        let fixed_steps = match self.config.dt {
            DtPolicy::Fixed(dt) => {
                let ratio = span / dt;
                let near = ratio.round();
                let n = if (ratio - near).abs() <= 1e-9 * ratio.max(1.0) {
                    near
                } else {
                    ratio.ceil()
                };
                Some((n.max(1.0) as u64, dt))
            }
            DtPolicy::Auto { .. } => None,
        };

        let interval = self.config.diag_interval;
        let mut state = state0;
        let mut steps = 0u64;
        loop {
            let (h, last) = match fixed_steps {
                Some((n, dt)) => {
                    let i = steps + 1;
                    if i == n {
                        (t_end - state.t, true)
                    } else {
                        ((t0 + i as f64 * dt) - state.t, false)
                    }
                }
                None => {
                    // the speed from the last stage of the previous step stands in
                    // for the speed at the current state
                    let dt = if steps == 0 {
                        self.suggest_dt(&state.v)?
                    } else {
                        self.auto_dt(self.evaluator.max_advecting_speed())
                    };
                    if state.t + dt >= t_end * (1.0 - 1e-14) - 1e-300 || !(dt > 0.0) {
                        (t_end - state.t, true)
                    } else {
                        (dt, false)
                    }
                }
            };
            let next = match self.step(&state, h) {
                Ok(s) => s,
                Err(Error::NonFinite { .. }) => {
                    return Ok(IntegrationOutcome {
                        blowup: Some(BlowupEvent {
                            reason: BlowupReason::NonFinite,
                            t_last_finite: state.t,
                            step_index: state.step_index + 1,
                            norm: f64::NAN,
                        }),
                        state,
                        steps,
                    })
                }
                Err(e) => return Err(e),
            };
            let norm = self.guard_norm(&next.v);
            if !(norm <= self.config.blowup_guard) {
                return Ok(IntegrationOutcome {
                    blowup: Some(BlowupEvent {
                        reason: BlowupReason::GuardExceeded,
                        t_last_finite: state.t,
                        step_index: next.step_index,
                        norm,
                    }),
                    state,
                    steps,
                });
            }
            steps += 1;
            state = next;
            if last {
                state.t = t_end;
                observer(&state);
                break;
            }
            if steps.is_multiple_of(interval) {
                observer(&state);
            }
        }
        Ok(IntegrationOutcome {
            state,
            steps,
            blowup: None,
        })
    }
}

/// Sets `out[i] = f(i, E(h/2), E(h))` over all three components, with the
/// factors taken at the mode of `i`.
#[inline]
fn combine(out: &mut SpectralField, half: &[f64], full: &[f64], f: impl Fn(usize, f64, f64) -> Complex64) {
    let len = half.len();
    for (c, chunk) in out.data_mut().chunks_exact_mut(len).enumerate() {
        for (i, ((x, eh), ef)) in chunk.iter_mut().zip(half).zip(full).enumerate() {
            *x = f(c * len + i, *eh, *ef);
        }
    }
}

/// One IF-RK4 step with a freshly planned integrator.
pub fn step(state: &SimulationState, params: &ModelParams, dt: f64) -> Result<SimulationState> {
    Integrator::new(params, IntegratorConfig::fixed(dt))?.step(state, dt)
}

/// Integrates to `t_end` with fixed step `dt` and the given observer cadence.
pub fn integrate(
    state0: SimulationState,
    params: &ModelParams,
    t_end: f64,
    dt: f64,
    diag_interval: u64,
    observer: impl FnMut(&SimulationState),
) -> Result<IntegrationOutcome> {
    let config = IntegratorConfig {
        diag_interval,
        ..IntegratorConfig::fixed(dt)
    };
    Integrator::new(params, config)?.integrate(state0, t_end, observer)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{random_divfree, sobolev_norm, Grid};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn decay_setup(n: usize) -> (ModelParams, SimulationState) {
        let p = ModelParams::new(1.0 / 6.0, 1.0 / 6.0, 0.1, 1.0, Grid::periodic(n).unwrap()).unwrap();
        let v = SpectralField::single_mode(p.grid, [1, 0, 0], [c(0.0, 0.0), c(0.5, 0.2), c(-0.1, 0.3)])
            .unwrap();
        (p, SimulationState::new(0.0, v).unwrap())
    }

    #[test]
    fn zero_field_stays_zero() {
        let p = ModelParams::new(0.1, 0.2, 0.1, 0.1, Grid::periodic(4).unwrap()).unwrap();
        let s = SimulationState::new(0.0, SpectralField::zero_vector(p.grid)).unwrap();
        let out = step(&s, &p, 0.01).unwrap();
        assert!(out.v.is_zero());
        assert_eq!(out.step_index, 1);
        assert!((out.t - 0.01).abs() < 1e-16);
    }

    #[test]
    fn rejects_bad_step() {
        let (p, s) = decay_setup(4);
        assert!(step(&s, &p, 0.0).is_err());
        assert!(step(&s, &p, -1.0).is_err());
        assert!(DtPolicy::from_dt(-0.1).is_err());
        assert_eq!(DtPolicy::from_dt(0.0).unwrap(), DtPolicy::auto());
    }

    #[test]
    fn single_mode_decays_exactly() {
        let (p, s) = decay_setup(4);
        let v0 = s.v.clone();
        let out = integrate(s, &p, 0.5, 1e-2, 10, |_| {}).unwrap();
        assert_eq!(out.steps, 50);
        let want = v0.scaled((-0.5f64).exp());
        let err = out.state.v.max_abs_diff(&want) / want.max_abs();
        assert!(err < 1e-12, "{err}");
    }

    #[test]
    fn final_energy_ratio() {
        let (p, s) = decay_setup(8);
        let e0 = sobolev_norm(&s.v, 0.0).powi(2);
        let out = integrate(s, &p, 1.0, 1e-3, 100, |_| {}).unwrap();
        let e1 = sobolev_norm(&out.state.v, 0.0).powi(2);
        assert!(((e1 / e0) / (-2.0f64).exp() - 1.0).abs() < 1e-10);
        assert_eq!(out.state.t, 1.0);
    }

    #[test]
    fn empty_interval_takes_no_steps() {
        let (p, s) = decay_setup(4);
        let mut seen = 0;
        let out = integrate(s.clone(), &p, 0.0, 0.1, 1, |_| seen += 1).unwrap();
        assert_eq!(out.steps, 0);
        assert_eq!(out.state, s);
        assert_eq!(seen, 1);
        assert!(integrate(s, &p, -1.0, 0.1, 1, |_| {}).is_err());
    }

    #[test]
    fn observer_cadence_and_partial_step() {
        let (p, s) = decay_setup(2);
        let mut times = Vec::new();
        let out = integrate(s, &p, 0.95, 0.01, 10, |st| times.push((st.step_index, st.t))).unwrap();
        assert_eq!(out.steps, 95);
        let idx: Vec<u64> = times.iter().map(|x| x.0).collect();
        assert_eq!(idx, vec![0, 10, 20, 30, 40, 50, 60, 70, 80, 90, 95]);
        assert_eq!(times.last().unwrap().1, 0.95);

        let (p, s) = decay_setup(2);
        let out = integrate(s, &p, 0.105, 0.01, 5, |_| {}).unwrap();
        assert_eq!(out.steps, 11);
        assert_eq!(out.state.t, 0.105);
    }

    #[test]
    fn invariants_after_steps() {
        let p = ModelParams::new(0.1, 0.15, 0.2, 0.02, Grid::periodic(6).unwrap()).unwrap();
        let v = random_divfree(p.grid, 8, 1.0).unwrap();
        let mut it = Integrator::new(&p, IntegratorConfig::fixed(5e-3)).unwrap();
        let mut s = SimulationState::new(0.0, v).unwrap();
        for _ in 0..20 {
            s = it.step(&s, 5e-3).unwrap();
            assert!(s.v.divergence_defect() <= 1e-12);
            assert!(s.v.symmetry_defect() <= 1e-13);
            assert_eq!(s.v.mean_magnitude(), 0.0);
        }
    }

    #[test]
    fn fourth_order_self_convergence() {
        let p = ModelParams::new(1.0 / 6.0, 1.0 / 6.0, 0.2, 0.05, Grid::periodic(4).unwrap()).unwrap();
        let v = random_divfree(p.grid, 21, 0.5).unwrap().scaled(3.0);
        let run = |dt: f64| {
            let s = SimulationState::new(0.0, v.clone()).unwrap();
            integrate(s, &p, 0.4, dt, 1000, |_| {}).unwrap().state.v
        };
        let dt = 0.04;
        let reference = run(dt / 16.0);
        let e: Vec<f64> = [dt, dt / 2.0, dt / 4.0]
            .iter()
            .map(|h| run(*h).max_abs_diff(&reference))
            .collect();
        for w in e.windows(2) {
            let ratio = w[0] / w[1];
            assert!(ratio > 8.0 && ratio < 32.0, "ratio {ratio}, errors {e:?}");
        }
    }

    #[test]
    fn guard_stops_run() {
        let (p, s) = decay_setup(4);
        let config = IntegratorConfig {
            blowup_guard: 1e-3,
            ..IntegratorConfig::fixed(0.01)
        };
        let mut it = Integrator::new(&p, config).unwrap();
        let out = it.integrate(s, 1.0, |_| {}).unwrap();
        let ev = out.blowup.unwrap();
        assert_eq!(ev.reason, BlowupReason::GuardExceeded);
        assert_eq!(ev.t_last_finite, 0.0);
        assert_eq!(out.steps, 0);
    }

    #[test]
    fn auto_dt_respects_viscous_limit() {
        let (p, s) = decay_setup(4);
        let mut it = Integrator::new(&p, IntegratorConfig::default()).unwrap();
        let dt = it.suggest_dt(&s.v).unwrap();
        assert!(dt <= 0.25 / 16.0 + 1e-15);
        let out = it.integrate(s, 0.1, |_| {}).unwrap();
        assert_eq!(out.state.t, 0.1);
        assert!(out.steps >= 7);
    }
}
