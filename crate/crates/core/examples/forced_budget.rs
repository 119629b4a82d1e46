//! A forced run at moderate resolution: energy budget, Gronwall constant and
//! the predicted strong-solution horizon.

use std::sync::Arc;

use num_complex::Complex64;
use ns_alpha::diagnostics::{
    fill_residuals, forecast_for, gronwall_h1_bound_check, EnergyMeter,
};
use ns_alpha::dynamics::{
    ForcingMode, ForcingSpec, Integrator, IntegratorConfig, ModelParams, SimulationState,
};
use ns_alpha::spectral::{random_divfree, Grid};

fn main() -> ns_alpha::Result<()> {
    let grid = Grid::periodic(6)?;
    let c = |re: f64| Complex64::new(re, 0.0);
    let forcing = ForcingSpec::modes(vec![ForcingMode { k: [0, 0, 1], amplitude: [c(0.5), c(0.0), c(0.0)] }])?
        .with_modulation(Arc::new(|t: f64| 1.0 + 0.5 * (3.0 * t).sin()));
    let params = ModelParams::new(0.1, 0.2, 0.2, 0.05, grid)?.with_forcing(forcing)?;
    let v0 = random_divfree(grid, 42, 2.0)?;

    let forecast = forecast_for(&v0, &params, 1.0)?;
    println!(
        "gamma = {}, Y(0) = {:.4}, T* = {:.4e}, M(T*) = {:.4e}",
        forecast.gamma, forecast.y0, forecast.t_star, forecast.m_bound.unwrap_or(f64::NAN)
    );

    let meter = EnergyMeter::new(&params)?;
    let mut integ = Integrator::new(&params, IntegratorConfig { diag_interval: 5, ..IntegratorConfig::fixed(2e-3) })?;
    let mut records = Vec::new();
    integ.integrate(SimulationState::new(0.0, v0)?, 2.0, |s| records.push(meter.record(s)))?;
    fill_residuals(&mut records, params.nu)?;
    for r in records.iter().step_by(20) {
        println!(
            "t = {:.3}  E = {:.6e}  D = {:.6e}  W = {:+.6e}  residual {:.2e}",
            r.t, r.energy(), r.dissipation(), r.work, r.residual
        );
    }
    let g = gronwall_h1_bound_check(&records, &params, 1.0)?;
    println!("Gronwall with C = 1 holds: {}; smallest C: {:?}", g.holds, g.c_min);
    Ok(())
}
