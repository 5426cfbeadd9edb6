//! Weights of the two-term (semi-iterative) acceleration.

use crate::error::{invalid, Result};

fn check_mu(mu: f64) -> Result<()> {
    if !(0.0..1.0).contains(&mu) {
        return Err(invalid(format!("mu must lie in [0, 1), got {mu}")));
    }
    Ok(())
}

/// Next Chebyshev weight `1 / (1 − ω μ²/4)`; the sequence starts at `ω = 1`.
pub fn chebyshev_omega(omega_prev: f64, mu: f64) -> Result<f64> {
    check_mu(mu)?;
    if !(omega_prev >= 1.0) || !omega_prev.is_finite() {
        return Err(invalid(format!("previous weight must be a finite value >= 1, got {omega_prev}")));
    }
    let denom = 1.0 - omega_prev * mu * mu / 4.0;
    if denom <= 0.0 {
        return Err(invalid(format!("weight {omega_prev} is outside the recurrence's domain")));
    }
    Ok(1.0 / denom)
}

/// Fixed weight of the second-order Richardson method, `2 / (1 + √(1 − μ²))`.
/// It is also the limit of the Chebyshev sequence.
pub fn richardson_omega(mu: f64) -> Result<f64> {
    check_mu(mu)?;
    Ok(2.0 / (1.0 + (1.0 - mu * mu).sqrt()))
}

/// The first `count` Chebyshev weights `ω¹, ω², …`.
pub fn chebyshev_sequence(mu: f64, count: usize) -> Result<Vec<f64>> {
    check_mu(mu)?;
    let mut out = Vec::with_capacity(count);
    let mut omega = 1.0;
    for _ in 0..count {
        out.push(omega);
        omega = chebyshev_omega(omega, mu)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recurrence_values() {
        assert_eq!(chebyshev_omega(1.0, 0.0).unwrap(), 1.0);
        let w2 = chebyshev_omega(1.0, 0.8).unwrap();
        assert!((w2 - 1.0 / 0.84).abs() < 1e-15);
        assert!((w2 - 1.190_476_190_476).abs() < 1e-12);
        let w3 = chebyshev_omega(w2, 0.8).unwrap();
        assert!((w3 - 1.235_294_117_647).abs() < 1e-12);
    }

    #[test]
    fn limit_is_richardson_weight() {
        // fixed point of ω = 1/(1 − ω μ²/4) with μ = 0.8: 0.16ω² − ω + 1 = 0, root 1.25
        assert!((richardson_omega(0.8).unwrap() - 1.25).abs() < 1e-15);
        let seq = chebyshev_sequence(0.8, 60).unwrap();
        assert!(seq.windows(2).all(|w| w[0] <= w[1]));
        assert!((seq[59] - 1.25).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(chebyshev_omega(1.0, 1.0).is_err());
        assert!(chebyshev_omega(1.0, -0.1).is_err());
        assert!(chebyshev_omega(0.5, 0.5).is_err());
        assert!(chebyshev_omega(100.0, 0.9).is_err());
        assert!(richardson_omega(1.0).is_err());
    }
}
