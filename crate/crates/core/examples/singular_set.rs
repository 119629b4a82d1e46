//! Thresholding a norm series into regular and singular times, then covering
//! the singular set: pre-measures and the recovering bound.

use ns_alpha::singularity::{
    detect_regular_set, hausdorff_premeasure, recovering_bound, singular_sum, HausdorffQuery,
    IntervalSet,
};

fn main() -> ns_alpha::Result<()> {
    // synthetic norm series with three sharp excursions
    let spikes = [(0.2, 0.01), (0.5, 0.04), (0.8, 0.002)];
    let series: Vec<(f64, f64)> = (0..=10_000)
        .map(|i| {
            let t = i as f64 * 1e-4;
            let y = spikes
                .iter()
                .map(|(c, w)| if (t - c).abs() < w / 2.0 { 1e9 } else { 0.0 })
                .sum::<f64>();
            (t, 1.0 + y)
        })
        .collect();
    let regular = detect_regular_set(&series, 1e8, 1.0)?;
    let singular = regular.singular_set();
    println!("regular components: {}", regular.len());
    println!("singular pieces:    {:?}", singular.iter().filter(|(a, b)| b > a).collect::<Vec<_>>());
    let a = 0.5;
    println!("Σ (β-α)^a over regular components: {:.4}", singular_sum(&regular, a));
    for eps in [f64::INFINITY, 1.0, 0.1, 0.01, 0.001] {
        let mu = hausdorff_premeasure(&singular, &HausdorffQuery::new(a, eps)?)?;
        println!("μ_(a={a}, eps={eps}) = {mu:.5}");
    }
    for eps in [0.1, 0.01, 0.001] {
        let r = recovering_bound(&regular, a, eps)?;
        println!(
            "eps {eps}: kept {} cover sum {:.4e} tail sum {:.4e} chain {}",
            r.kept, r.cover_sum, r.tail_sum, r.chain_holds
        );
    }

    // the excursions above have positive length, so no small tail can cover
    // them; with a null singular set the chain closes
    let mut comps = Vec::new();
    let mut x = 0.0;
    for n in (1..=20).rev() {
        let len = 0.5f64.powi(n + 1);
        comps.push((x, x + len));
        x += len;
    }
    comps.push((x, 1.0));
    let tail = IntervalSet::new(1.0, comps)?;
    for eps in [0.1, 0.01, 0.001] {
        let r = recovering_bound(&tail, a, eps)?;
        println!(
            "geometric tail, eps {eps}: kept {} cover sum {:.4e} tail sum {:.4e} chain {}",
            r.kept, r.cover_sum, r.tail_sum, r.chain_holds
        );
    }
    Ok(())
}
