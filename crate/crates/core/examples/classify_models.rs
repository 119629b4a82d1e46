//! Critical presets, exact classification and the subcritical exponents.

use ns_alpha::diagnostics::gamma_exponent;
use ns_alpha::runner::{classify_regularization, parse_rational, presets};

fn main() -> ns_alpha::Result<()> {
    for p in presets() {
        let c = classify_regularization(p.theta1, p.theta2)?;
        println!(
            "{:<22} {}  gamma = {}",
            p.name,
            c.summary(),
            gamma_exponent(p.theta1_f64(), p.theta2_f64())
        );
    }
    for (a, b) in [("0", "0"), ("1/12", "1/12"), ("1/8", "0"), ("1/4", "1/4")] {
        let c = classify_regularization(parse_rational(a)?, parse_rational(b)?)?;
        println!("{}", c.summary());
    }
    Ok(())
}
