//! Regular/singular time sets read off a norm series, covering sums, and
//! exact Hausdorff pre-measures of finite interval unions.
//!
//! A Galerkin solution never truly blows up, so the singular set here is the
//! set of times where the sampled norm reaches a threshold.

use crate::error::{invalid, Error, Result};
use crate::runner::{classify_f64, Regime};

/// Subcritical Hausdorff exponent `(1 - 2θ₂ - 4θ₁)/2`.
pub fn hausdorff_exponent(theta1: f64, theta2: f64) -> Result<f64> {
    let c = classify_f64(theta1, theta2)?;
    match c.regime {
        Regime::Subcritical => Ok(c.exponent_f64()),
        Regime::Critical => Err(Error::Regularization(format!(
            "critical regularization: exponent 0 ({})",
            c.summary()
        ))),
        Regime::Supercritical => Err(Error::Regularization(format!(
            "supercritical regularization: exponent {} is not positive ({})",
            c.exponent,
            c.summary()
        ))),
    }
}

/// Ordered disjoint open subintervals of `(0, T)`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalSet {
    horizon: f64,
    components: Vec<(f64, f64)>,
}

impl IntervalSet {
    pub fn new(horizon: f64, components: Vec<(f64, f64)>) -> Result<Self> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(invalid(format!("horizon must be positive, got {horizon}")));
        }
        let mut prev = 0.0;
        for &(a, b) in &components {
            if !(a >= prev && a < b && b <= horizon) {
                return Err(invalid(format!(
                    "component ({a}, {b}) is not ordered and disjoint inside (0, {horizon})"
                )));
            }
            prev = b;
        }
        Ok(Self { horizon, components })
    }

    pub fn empty(horizon: f64) -> Result<Self> {
        Self::new(horizon, Vec::new())
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn components(&self) -> &[(f64, f64)] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn lengths(&self) -> Vec<f64> {
        self.components.iter().map(|(a, b)| b - a).collect()
    }

    pub fn total_length(&self) -> f64 {
        self.lengths().iter().sum()
    }

    /// Complement in `[0, T]` as closed intervals, degenerate points included.
    pub fn singular_set(&self) -> Vec<(f64, f64)> {
        complement(self.horizon, self.components.iter().copied())
    }

    /// Lebesgue measure of the complement.
    pub fn singular_measure(&self) -> f64 {
        self.singular_set().iter().map(|(a, b)| b - a).sum()
    }
}

fn complement(horizon: f64, open: impl Iterator<Item = (f64, f64)>) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut left = 0.0;
    for (a, b) in open {
        out.push((left, a));
        left = b;
    }
    out.push((left, horizon));
    out
}

/// Maximal open intervals on which the linearly interpolated series stays
/// strictly below `threshold`. Non-finite samples count as exceedances.
pub fn detect_regular_set(samples: &[(f64, f64)], threshold: f64, horizon: f64) -> Result<IntervalSet> {
    if samples.is_empty() {
        return Err(Error::InsufficientRecords("norm series is empty".into()));
    }
    if !(threshold > 0.0) {
        return Err(invalid(format!("threshold must be positive, got {threshold}")));
    }
    if samples.windows(2).any(|w| !(w[1].0 >= w[0].0)) {
        return Err(invalid("samples must be sorted in time"));
    }
    let tol = 1e-9 * horizon.abs().max(1.0);
    let (first, last) = (samples[0].0, samples[samples.len() - 1].0);
    if first > tol || last < horizon - tol {
        return Err(invalid(format!(
            "samples span [{first}, {last}] but must cover [0, {horizon}]"
        )));
    }
    let below = |y: f64| y < threshold;
    // linear crossing time inside a segment; jumps to/from non-finite values
    // happen at the non-finite end
    let crossing = |(t0, y0): (f64, f64), (t1, y1): (f64, f64)| {
        if !y0.is_finite() {
            return t0;
        }
        if !y1.is_finite() {
            return t1;
        }
        t0 + (threshold - y0) / (y1 - y0) * (t1 - t0)
    };
    let mut raw = Vec::new();
    let mut start = below(samples[0].1).then_some(samples[0].0);
    for w in samples.windows(2) {
        let (p, q) = (w[0], w[1]);
        match (below(p.1), below(q.1)) {
            (true, false) => {
                if let Some(s) = start.take() {
                    raw.push((s, crossing(p, q)));
                }
            }
            (false, true) => start = Some(crossing(p, q)),
            _ => {}
        }
    }
    if let Some(s) = start {
        raw.push((s, last));
    }
    let components = raw
        .into_iter()
        .map(|(a, b)| (a.max(0.0), b.min(horizon)))
        .filter(|(a, b)| a < b)
        .collect();
    IntervalSet::new(horizon, components)
}

/// `Σᵢ (βᵢ - αᵢ)^a`.
pub fn singular_sum(intervals: &IntervalSet, a: f64) -> f64 {
    intervals.lengths().iter().map(|l| l.powf(a)).sum()
}

/// Dimension exponent and maximal diameter of the admissible covers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HausdorffQuery {
    pub a: f64,
    /// `f64::INFINITY` for unconstrained covers.
    pub eps: f64,
}

impl HausdorffQuery {
    pub fn new(a: f64, eps: f64) -> Result<Self> {
        if !(a > 0.0 && a <= 1.0) {
            return Err(invalid(format!("exponent must lie in (0, 1], got {a}")));
        }
        if !(eps > 0.0) {
            return Err(invalid(format!("eps must be positive, got {eps}")));
        }
        Ok(Self { a, eps })
    }

    pub fn unbounded(a: f64) -> Result<Self> {
        Self::new(a, f64::INFINITY)
    }

    /// Cheapest cover of one connected interval of length `len` by pieces of
    /// diameter at most `eps`: as many full pieces as fit, then the remainder.
    pub fn block_cost(&self, len: f64) -> f64 {
        if len <= 0.0 {
            return 0.0;
        }
        if len <= self.eps {
            return len.powf(self.a);
        }
        let mut full = (len / self.eps).floor();
        let mut rest = len - full * self.eps;
        if rest < 0.0 {
            full -= 1.0;
            rest += self.eps;
        }
        let tail = if rest > 0.0 { rest.powf(self.a) } else { 0.0 };
        full * self.eps.powf(self.a) + tail
    }
}

fn validate_closed(set: &[(f64, f64)]) -> Result<()> {
    for (i, &(a, b)) in set.iter().enumerate() {
        if !(a.is_finite() && b.is_finite() && a <= b) {
            return Err(invalid(format!("[{a}, {b}] is not a closed interval")));
        }
        if i > 0 && !(a >= set[i - 1].1) {
            return Err(invalid("intervals must be sorted and disjoint"));
        }
    }
    Ok(())
}

/// `μ_{a,ε}(S) = inf Σⱼ (diam Bⱼ)^a` over finite covers by intervals of
/// diameter at most `ε`, for `S` a sorted union of disjoint closed intervals.
///
/// An optimal cover merges runs of consecutive intervals into blocks and
/// tiles each block; dynamic programming over the run boundaries is exact.
pub fn hausdorff_premeasure(set: &[(f64, f64)], q: &HausdorffQuery) -> Result<f64> {
    validate_closed(set)?;
    // points cost nothing: they fit in covers of arbitrarily small diameter
    let parts: Vec<(f64, f64)> = set.iter().copied().filter(|(a, b)| b > a).collect();
    let n = parts.len();
    let mut best = vec![0.0; n + 1];
    for j in 1..=n {
        let end = parts[j - 1].1;
        let mut m = f64::INFINITY;
        for i in (1..=j).rev() {
            let c = best[i - 1] + q.block_cost(end - parts[i - 1].0);
            if c < m {
                m = c;
            }
        }
        best[j] = m;
    }
    Ok(best[n])
}

/// Quantities of the covering argument for one `ε`.
#[derive(Debug, Clone, PartialEq)]
pub struct RecoveringReport {
    pub a: f64,
    pub eps: f64,
    /// Number of largest components kept as the finite part.
    pub kept: usize,
    /// Closed intervals `Bⱼ` left after removing the kept components.
    pub cover: Vec<(f64, f64)>,
    /// `Σⱼ (diam Bⱼ)^a`
    pub cover_sum: f64,
    /// `Σⱼ (Σ_{i ∈ Iⱼ} (βᵢ - αᵢ))^a`
    pub grouped_sum: f64,
    /// `Σ_{dropped} (βᵢ - αᵢ)^a`
    pub tail_sum: f64,
    /// `Σ_{dropped} (βᵢ - αᵢ)`
    pub tail_length: f64,
    /// `cover_sum ≤ grouped_sum ≤ tail_sum ≤ ε` up to roundoff.
    pub chain_holds: bool,
    /// `ε` exceeds the total component length, so nothing needs covering.
    pub vacuous: bool,
}

impl RecoveringReport {
    pub fn bound(&self) -> f64 {
        self.cover_sum
    }
}

/// Keeps the fewest largest components whose complement (the tail) has both
/// total length and `a`-sum at most `ε`, then covers the complement of the
/// kept components by its connected pieces.
pub fn recovering_bound(regular: &IntervalSet, a: f64, eps: f64) -> Result<RecoveringReport> {
    HausdorffQuery::new(a, eps)?;
    let lengths = regular.lengths();
    let total: f64 = lengths.iter().sum();
    if eps > total {
        return Ok(RecoveringReport {
            a,
            eps,
            kept: 0,
            cover: Vec::new(),
            cover_sum: 0.0,
            grouped_sum: 0.0,
            tail_sum: 0.0,
            tail_length: 0.0,
            chain_holds: true,
            vacuous: true,
        });
    }
    let mut order: Vec<usize> = (0..lengths.len()).collect();
    // stable: ties keep time order
    order.sort_by(|&i, &j| lengths[j].total_cmp(&lengths[i]));
    // suffix sums over the size-sorted order
    let n = order.len();
    let mut suffix_len = vec![0.0; n + 1];
    let mut suffix_pow = vec![0.0; n + 1];
    for r in (0..n).rev() {
        let l = lengths[order[r]];
        suffix_len[r] = suffix_len[r + 1] + l;
        suffix_pow[r] = suffix_pow[r + 1] + l.powf(a);
    }
    let kept = (0..=n)
        .find(|&r| suffix_len[r] <= eps && suffix_pow[r] <= eps)
        .unwrap_or(n);
    let mut keep = vec![false; n];
    for &i in &order[..kept] {
        keep[i] = true;
    }
    let comps = regular.components();
    let cover = complement(
        regular.horizon(),
        comps.iter().zip(&keep).filter(|(_, k)| **k).map(|(c, _)| *c),
    );
    let cover_sum: f64 = cover.iter().map(|(x, y)| (y - x).powf(a)).sum();
    let grouped_sum: f64 = cover
        .iter()
        .map(|(x, y)| {
            comps
                .iter()
                .zip(&keep)
                .filter(|((p, q), k)| !**k && *p >= *x && *q <= *y)
                .map(|((p, q), _)| q - p)
                .sum::<f64>()
                .powf(a)
        })
        .sum();
    let (tail_sum, tail_length) = (suffix_pow[kept], suffix_len[kept]);
    let slack = |x: f64| x * (1.0 + 1e-12) + 1e-300;
    let chain_holds =
        cover_sum <= slack(grouped_sum) && grouped_sum <= slack(tail_sum) && tail_sum <= slack(eps);
    Ok(RecoveringReport {
        a,
        eps,
        kept,
        cover,
        cover_sum,
        grouped_sum,
        tail_sum,
        tail_length,
        chain_holds,
        vacuous: false,
    })
}
