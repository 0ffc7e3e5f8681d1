//! Shared fixtures for the benchmarks.

use entconc::simplex::ProbVector;
use entconc::ParamSet;

/// A skewed distribution on `k` categories with geometric weights.
pub fn geometric(k: usize, ratio: f64) -> ProbVector {
    let w: Vec<f64> = (0..k).map(|i| ratio.powi(i as i32)).collect();
    ProbVector::from_weights(&w).expect("positive weights")
}

pub fn repeated_geometric(k: usize, n: usize) -> ParamSet {
    ParamSet::repeated(geometric(k, 0.7), n).expect("nonempty")
}
