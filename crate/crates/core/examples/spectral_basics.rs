//! Spectral fields on the torus: random divergence-free data, Sobolev norms,
//! Leray projection and a lossless round trip through physical space.

use ns_alpha::spectral::{
    divergence, leray_project, random_divfree, sobolev_norm, to_physical, to_spectral, Grid,
    SpectralField,
};

fn main() -> ns_alpha::Result<()> {
    let grid = Grid::periodic(8)?;
    let v = random_divfree(grid, 7, 2.0)?;
    println!("modes per component: {}", grid.len());
    for s in [-1.0, 0.0, 1.0, 2.0] {
        println!("‖v‖_{{{s},2}} = {:.6e}", sobolev_norm(&v, s));
    }

    // a gradient field is removed entirely by the projector
    let phi = random_divfree(grid, 8, 1.0)?.component(0).to_vec();
    let mut grad = SpectralField::zero_vector(grid);
    for (idx, _) in grid.modes() {
        let k = grid.wavevector(idx);
        for c in 0..3 {
            grad.data_mut()[c * grid.len() + idx] =
                phi[idx] * num_complex::Complex64::new(0.0, k[c]);
        }
    }
    let mixed = {
        let mut m = v.clone();
        m.axpy(1.0, &grad)?;
        m
    };
    println!("max |div| before projection: {:.3e}", divergence(&mixed)?.max_abs());
    let p = leray_project(&mixed)?;
    println!("max |div| after projection:  {:.3e}", divergence(&p)?.max_abs());
    println!("distance from original v:    {:.3e}", p.max_abs_diff(&v));

    let phys = to_physical(&v, grid.min_resolution())?;
    let back = to_spectral(&phys, grid)?;
    println!(
        "round trip on {} points per axis: max error {:.3e}",
        grid.min_resolution(),
        back.max_abs_diff(&v)
    );
    Ok(())
}
