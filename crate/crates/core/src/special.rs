//! Small numeric helpers shared across modules.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use statrs::distribution::{ContinuousCDF, Normal};

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    Normal::standard().cdf(x)
}

/// `ln C(n, k)`.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    statrs::function::factorial::ln_binomial(n, k)
}

/// Natural log of an arbitrary-size integer (`-inf` at zero).
pub fn ln_big(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().map(f64::ln).unwrap_or(f64::INFINITY);
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().unwrap_or(f64::MAX);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

pub fn log2_big(x: &BigUint) -> f64 {
    ln_big(x) / std::f64::consts::LN_2
}

/// Evenly spaced grid with `count ≥ 2` points including both ends.
pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(count >= 2);
    let step = (hi - lo) / (count - 1) as f64;
    (0..count)
        .map(|i| if i == count - 1 { hi } else { lo + step * i as f64 })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_cdf_reference_values() {
        assert!((normal_cdf(0.0) - 0.5).abs() < 1e-15);
        assert!((normal_cdf(-0.2) - 0.420_740_290_560_897).abs() < 1e-12);
    }

    #[test]
    fn big_logs() {
        assert!((log2_big(&BigUint::from(13u32)) - 13f64.log2()).abs() < 1e-15);
        let big = BigUint::from(3u32).pow(2000);
        assert!((ln_big(&big) - 2000.0 * 3f64.ln()).abs() < 1e-9);
        assert_eq!(ln_big(&BigUint::zero()), f64::NEG_INFINITY);
    }
}
