//! A single Fourier pair has no self-interaction, so it decays like the heat
//! equation. The integrator reproduces the exponential and the energy
//! identity closes to quadrature accuracy.

use num_complex::Complex64;
use ns_alpha::diagnostics::{energy_identity_residual, EnergyMeter};
use ns_alpha::dynamics::{integrate, ModelParams, SimulationState};
use ns_alpha::spectral::{Grid, SpectralField};

fn main() -> ns_alpha::Result<()> {
    let grid = Grid::periodic(8)?;
    let params = ModelParams::new(1.0 / 6.0, 1.0 / 6.0, 0.1, 1.0, grid)?;
    let a = [Complex64::new(0.0, 0.0), Complex64::new(0.6, 0.2), Complex64::new(0.0, 0.0)];
    let v0 = SpectralField::single_mode(grid, [1, 0, 0], a)?;
    let meter = EnergyMeter::new(&params)?;
    let mut records = Vec::new();
    let out = integrate(SimulationState::new(0.0, v0)?, &params, 1.0, 1e-3, 10, |s| {
        records.push(meter.record(s))
    })?;
    let (first, last) = (records[0], records[records.len() - 1]);
    let ratio = last.e0 / first.e0;
    let exact = (-2.0f64).exp();
    println!("steps: {}, records: {}", out.steps, records.len());
    println!("e0(1)/e0(0) = {ratio:.15}  exact {exact:.15}  rel err {:.2e}", (ratio / exact - 1.0).abs());
    println!("energy identity residual: {:.3e}", energy_identity_residual(&records, params.nu)?);
    Ok(())
}
