//! The dealiased nonlinear term, its energy cancellation, and what goes
//! wrong without dealiasing.

use ns_alpha::diagnostics::{trilinear_cancellation_defect, trilinear_defect_with};
use ns_alpha::dynamics::{ModelParams, NonlinearEvaluator};
use ns_alpha::runner::presets;
use ns_alpha::spectral::{random_divfree, sobolev_norm, Grid};

fn main() -> ns_alpha::Result<()> {
    let grid = Grid::periodic(8)?;
    let v = random_divfree(grid, 11, 0.5)?;
    for p in presets() {
        let params = ModelParams::new(p.theta1_f64(), p.theta2_f64(), 0.1, 1e-2, grid)?;
        let mut ev = NonlinearEvaluator::new(&params)?;
        let n = ev.nonlinear_term(&v)?;
        let pressure = ev.pressure(&v)?;
        let mut aliased = NonlinearEvaluator::aliased(&params)?;
        println!(
            "{:<22} m = {:>2}  ‖N‖ = {:.4e}  ‖p‖ = {:.4e}  defect {:.1e} (aliased grid m = {}: {:.1e})",
            p.name,
            ev.resolution(),
            sobolev_norm(&n, 0.0),
            sobolev_norm(&pressure, 0.0),
            trilinear_cancellation_defect(&v, &params)?,
            aliased.resolution(),
            trilinear_defect_with(&mut aliased, &v)?,
        );
    }
    Ok(())
}
