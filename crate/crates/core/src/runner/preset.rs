use std::fmt;

use num_rational::Rational64;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{invalid, Error, Result};

/// Named point of the `(θ₁, θ₂)` plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelPreset {
    pub name: &'static str,
    pub theta1: Rational64,
    pub theta2: Rational64,
    /// Closed form of the subcritical exponent along the preset's family.
    pub exponent_formula: &'static str,
}

impl ModelPreset {
    pub fn theta1_f64(&self) -> f64 {
        to_f64(self.theta1)
    }

    pub fn theta2_f64(&self) -> f64 {
        to_f64(self.theta2)
    }
}

fn r(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

/// All presets on the critical line, plus the family labels.
pub fn presets() -> [ModelPreset; 3] {
    [
        ModelPreset {
            name: "bardina",
            theta1: r(1, 6),
            theta2: r(1, 6),
            exponent_formula: "(1-6*theta1)/2",
        },
        ModelPreset {
            name: "leray_alpha",
            theta1: r(1, 4),
            theta2: r(0, 1),
            exponent_formula: "(1-4*theta1)/2",
        },
        ModelPreset {
            name: "modified_leray_alpha",
            theta1: r(0, 1),
            theta2: r(1, 2),
            exponent_formula: "(1-2*theta2)/2",
        },
    ]
}

pub fn preset(name: &str) -> Result<ModelPreset> {
    presets()
        .into_iter()
        .find(|p| p.name == name)
        .ok_or_else(|| {
            let known: Vec<_> = presets().iter().map(|p| p.name).collect();
            Error::Config(format!(
                "unknown preset '{name}' (known: {}, or give theta1/theta2 for a custom model)",
                known.join(", ")
            ))
        })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Critical,
    Subcritical,
    Supercritical,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Critical => "critical",
            Regime::Subcritical => "subcritical",
            Regime::Supercritical => "supercritical",
        })
    }
}

/// Position of `(θ₁, θ₂)` relative to the line `2θ₁ + θ₂ = 1/2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub theta1: Rational64,
    pub theta2: Rational64,
    pub regime: Regime,
    /// Critical and `0 ≤ θ₁ < 1/4`, `0 < θ₂ ≤ 1/2`, the global
    /// well-posedness hypotheses.
    pub admissible: bool,
    /// The critical corner `θ₁ = 1/4`, `θ₂ = 0`.
    pub boundary_case: bool,
    /// `(1 - 2θ₂ - 4θ₁)/2`; positive exactly in the subcritical regime.
    pub exponent: Rational64,
}

impl Classification {
    pub fn summary(&self) -> String {
        let base = format!(
            "theta1 = {}, theta2 = {}: {}",
            self.theta1, self.theta2, self.regime
        );
        match self.regime {
            Regime::Critical if self.boundary_case => format!(
                "{base}, outside the global well-posedness hypotheses (theta1 < 1/4, theta2 > 0)"
            ),
            Regime::Critical if self.admissible => format!("{base}, admissible"),
            Regime::Critical => format!("{base}, outside the global well-posedness hypotheses"),
            Regime::Subcritical => {
                format!("{base}, Hausdorff exponent {}", self.exponent)
            }
            Regime::Supercritical => format!("{base}, 2*theta1 + theta2 > 1/2"),
        }
    }

    pub fn exponent_f64(&self) -> f64 {
        to_f64(self.exponent)
    }
}

pub fn to_f64(x: Rational64) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

/// Exact classification of rational exponents.
pub fn classify_regularization(theta1: Rational64, theta2: Rational64) -> Result<Classification> {
    let unit = Rational64::zero()..=Rational64::one();
    if !unit.contains(&theta1) || !unit.contains(&theta2) {
        return Err(invalid(format!(
            "theta values must lie in [0, 1], got ({theta1}, {theta2})"
        )));
    }
    let half = r(1, 2);
    let quarter = r(1, 4);
    let s = theta1 * 2 + theta2;
    let regime = if s == half {
        Regime::Critical
    } else if s < half {
        Regime::Subcritical
    } else {
        Regime::Supercritical
    };
    let critical = regime == Regime::Critical;
    Ok(Classification {
        theta1,
        theta2,
        regime,
        admissible: critical && theta1 < quarter && theta2.is_positive() && theta2 <= half,
        boundary_case: critical && theta1 == quarter && theta2.is_zero(),
        exponent: (Rational64::one() - theta2 * 2 - theta1 * 4) / 2,
    })
}

/// Snaps a float to the nearest short continued-fraction convergent.
pub fn rational_from_f64(x: f64) -> Result<Rational64> {
    if !x.is_finite() {
        return Err(invalid(format!("expected a finite number, got {x}")));
    }
    Rational64::approximate_float(x)
        .ok_or_else(|| invalid(format!("cannot represent {x} as a rational")))
}

/// Classification of float exponents after rational snapping.
pub fn classify_f64(theta1: f64, theta2: f64) -> Result<Classification> {
    classify_regularization(rational_from_f64(theta1)?, rational_from_f64(theta2)?)
}

/// Parses `"1/6"`, `"0.25"` or `"0"`. Decimal input is read exactly.
pub fn parse_rational(s: &str) -> Result<Rational64> {
    let s = s.trim();
    let bad = || Error::Parse(format!("'{s}' is not a rational number"));
    if let Some((n, d)) = s.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| bad())?;
        let d: i64 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(r(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.len() > 15 || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = int.starts_with('-');
        let int_part: i64 = match int.trim_start_matches(['-', '+']) {
            "" => 0,
            digits => digits.parse().map_err(|_| bad())?,
        };
        let den = 10i64.pow(frac.len() as u32);
        let frac_part: i64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
        let v = r(int_part * den + frac_part, den);
        return Ok(if neg { -v } else { v });
    }
    s.parse::<i64>().map(Rational64::from_integer).map_err(|_| bad())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_sit_on_the_critical_line() {
        for p in presets() {
            let c = classify_regularization(p.theta1, p.theta2).unwrap();
            assert_eq!(c.regime, Regime::Critical, "{}", p.name);
            assert!(c.exponent.is_zero());
        }
        assert!(classify_regularization(r(1, 6), r(1, 6)).unwrap().admissible);
        let leray = classify_regularization(r(1, 4), r(0, 1)).unwrap();
        assert!(leray.boundary_case && !leray.admissible);
        assert!(leray.summary().contains("outside"));
        assert!(preset("nope").is_err());
    }

    #[test]
    fn regimes() {
        let c = classify_regularization(r(0, 1), r(0, 1)).unwrap();
        assert_eq!(c.regime, Regime::Subcritical);
        assert_eq!(c.exponent, r(1, 2));
        assert_eq!(classify_regularization(r(1, 4), r(1, 4)).unwrap().regime, Regime::Supercritical);
        assert!(classify_regularization(r(5, 4), r(0, 1)).is_err());
        assert!(classify_regularization(r(0, 1), r(-1, 4)).is_err());
    }

    #[test]
    fn float_snapping() {
        let c = classify_f64(1.0 / 6.0, 1.0 / 6.0).unwrap();
        assert_eq!((c.theta1, c.regime), (r(1, 6), Regime::Critical));
        assert_eq!(classify_f64(0.1, 0.2).unwrap().exponent, r(1, 10));
    }

    #[test]
    fn parsing() {
        assert_eq!(parse_rational("1/6").unwrap(), r(1, 6));
        assert_eq!(parse_rational("0.25").unwrap(), r(1, 4));
        assert_eq!(parse_rational(" 0 ").unwrap(), r(0, 1));
        assert_eq!(parse_rational("-.5").unwrap(), r(-1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }
}
