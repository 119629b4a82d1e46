//! Fractional Helmholtz filters and the norm equivalence they satisfy.

use ns_alpha::filters::{apply_helmholtz_filter, invert_helmholtz_filter, FilterParams};
use ns_alpha::spectral::{random_divfree, sobolev_norm, Grid};

fn main() -> ns_alpha::Result<()> {
    let grid = Grid::periodic(8)?;
    let u = random_divfree(grid, 3, 1.0)?;
    println!("{:>6} {:>5} {:>4} {:>12} {:>12} {:>12}", "alpha", "theta", "s", "lower", "‖ū‖", "upper");
    for alpha in [0.1, 1.0] {
        for theta in [1.0 / 6.0, 0.25, 0.5] {
            let p = FilterParams::new(alpha, theta)?;
            let ubar = apply_helmholtz_filter(&u, &p);
            for s in [-1.0, 0.0, 1.0] {
                let base = sobolev_norm(&u, s);
                let lower = base / (1.0 + p.weight());
                let upper = base / p.weight();
                let mid = sobolev_norm(&ubar, s + 2.0 * theta);
                println!("{alpha:>6} {theta:>5.3} {s:>4} {lower:>12.5e} {mid:>12.5e} {upper:>12.5e}");
            }
            let back = invert_helmholtz_filter(&ubar, &p);
            assert!(back.max_abs_diff(&u) < 1e-12);
        }
    }
    Ok(())
}
