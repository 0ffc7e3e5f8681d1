//! Distributions on a finite alphabet and the log-likelihood statistics built
//! on them.
//!
//! All internal arithmetic is in natural logarithms. The `0 · log 0 = 0`
//! convention is applied by skipping zero entries, so `log 0` is never
//! evaluated.

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance on `Σ p_k = 1` for members of the simplex.
pub const SIMPLEX_TOL: f64 = 1e-12;

/// Unit in which entropies and log-likelihoods are reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LogBase {
    Natural,
    Bits,
}

impl LogBase {
    /// Converts a value expressed in nats into this base.
    pub fn from_nats(self, nats: f64) -> f64 {
        match self {
            LogBase::Natural => nats,
            LogBase::Bits => nats / std::f64::consts::LN_2,
        }
    }

    /// Converts a value expressed in this base into nats.
    pub fn to_nats(self, value: f64) -> f64 {
        match self {
            LogBase::Natural => value,
            LogBase::Bits => value * std::f64::consts::LN_2,
        }
    }
}

/// A point of the probability simplex on `K ≥ 2` categories.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbVector {
    probs: Vec<f64>,
}

impl ProbVector {
    /// Validates and wraps `probs`. Inputs off the simplex are rejected, never
    /// renormalized.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.len() < 2 {
            return Err(Error::InvalidDistribution(format!(
                "need at least 2 categories, got {}",
                probs.len()
            )));
        }
        if let Some((k, &v)) = probs
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0 || **v > 1.0)
        {
            return Err(Error::InvalidDistribution(format!(
                "entry {k} = {v} outside [0, 1]"
            )));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::InvalidDistribution(format!(
                "entries sum to {sum}, not 1"
            )));
        }
        Ok(ProbVector { probs })
    }

    /// Normalizes nonnegative weights onto the simplex.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(Error::InvalidDistribution(
                "weights must be finite, nonnegative and not all zero".into(),
            ));
        }
        ProbVector::new(weights.iter().map(|w| w / total).collect())
    }

    pub fn uniform(k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidDistribution(format!(
                "need at least 2 categories, got {k}"
            )));
        }
        Ok(ProbVector {
            probs: vec![1.0 / k as f64; k],
        })
    }

    /// Appends empty categories until the alphabet has `k` symbols.
    pub fn padded(&self, k: usize) -> ProbVector {
        let mut probs = self.probs.clone();
        if probs.len() < k {
            probs.resize(k, 0.0);
        }
        ProbVector { probs }
    }

    pub fn k(&self) -> usize {
        self.probs.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.probs
    }

    pub fn get(&self, k: usize) -> f64 {
        self.probs[k]
    }

    pub fn is_interior(&self) -> bool {
        self.probs.iter().all(|&p| p > 0.0)
    }

    pub fn support_size(&self) -> usize {
        self.probs.iter().filter(|&&p| p > 0.0).count()
    }

    /// `Σ p_k log p_k` in nats.
    pub fn negentropy(&self) -> f64 {
        self.probs
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|&p| p * p.ln())
            .sum()
    }

    /// `Σ p_k (log p_k)²`, the second moment of the log-likelihood.
    pub fn second_log_moment(&self) -> f64 {
        self.probs
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|&p| {
                let l = p.ln();
                p * l * l
            })
            .sum()
    }

    /// Value of the centered log-likelihood `Y` for each category.
    /// Zero-probability categories get `-inf`; they are never drawn.
    pub fn centered_values(&self) -> Vec<f64> {
        centered_against(&self.probs, &self.probs)
    }
}

/// `log q_c − Σ_j p_j log q_j` for every category `c` with `p_c > 0`, written
/// as `Σ_j p_j (log q_c − log q_j)` so that it is exactly 0 wherever `q` is
/// flat on the support of `p`. Categories with `p_c = 0` get `-inf`.
pub fn centered_against(p: &[f64], q: &[f64]) -> Vec<f64> {
    let logs: Vec<f64> = q.iter().map(|&x| x.ln()).collect();
    p.iter()
        .zip(&logs)
        .map(|(&pc, &lc)| {
            if pc > 0.0 {
                p.iter()
                    .zip(&logs)
                    .filter(|(&pj, _)| pj > 0.0)
                    .map(|(&pj, &lj)| pj * (lc - lj))
                    .sum()
            } else {
                f64::NEG_INFINITY
            }
        })
        .collect()
}

/// A point of the box `[0,1]^K` without the sum constraint (the relaxed
/// domain of the Lagrangian problems).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxPoint(Vec<f64>);

impl BoxPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.iter().any(|c| !(0.0..=1.0).contains(c)) {
            return Err(Error::InvalidInput("box point coordinate outside [0, 1]".into()));
        }
        Ok(BoxPoint(coords))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

/// One categorical draw in one-hot form, stored as its active index
/// (0-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OneHotSample {
    pub index: usize,
}

/// The heterogeneous parameter sequence `p_1, …, p_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamSet {
    members: Vec<ProbVector>,
}

impl ParamSet {
    pub fn new(members: Vec<ProbVector>) -> Result<Self> {
        let Some(first) = members.first() else {
            return Err(Error::InvalidInput("parameter set must be nonempty".into()));
        };
        let k = first.k();
        if members.iter().any(|m| m.k() != k) {
            return Err(Error::InvalidInput(
                "all parameter vectors must share one alphabet size".into(),
            ));
        }
        Ok(ParamSet { members })
    }

    pub fn repeated(p: ProbVector, n: usize) -> Result<Self> {
        ParamSet::new(vec![p; n])
    }

    pub fn n(&self) -> usize {
        self.members.len()
    }

    pub fn k(&self) -> usize {
        self.members[0].k()
    }

    pub fn members(&self) -> &[ProbVector] {
        &self.members
    }

    pub fn all_interior(&self) -> bool {
        self.members.iter().all(ProbVector::is_interior)
    }

    /// `Σ_i Σ_k p_ik (log p_ik)²`.
    pub fn total_second_log_moment(&self) -> f64 {
        self.members.iter().map(ProbVector::second_log_moment).sum()
    }
}

/// Log-likelihood of one draw together with its expectation and the centered
/// difference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogLikStats {
    pub loglik: f64,
    pub negentropy: f64,
    pub centered: f64,
}

/// Entropy `-Σ p_k log p_k` in the requested base.
pub fn entropy(p: &ProbVector, base: LogBase) -> f64 {
    base.from_nats(-p.negentropy())
}

/// Variance of the log-likelihood `L(z) = log p_Z`.
pub fn loglik_variance(p: &ProbVector) -> f64 {
    let mean = p.negentropy();
    (p.second_log_moment() - mean * mean).max(0.0)
}

pub fn centered_loglik(z: OneHotSample, p: &ProbVector) -> Result<LogLikStats> {
    let prob = *p
        .as_slice()
        .get(z.index)
        .ok_or_else(|| Error::InvalidInput(format!("category {} out of range", z.index)))?;
    if prob == 0.0 {
        return Err(Error::ImpossibleSample { category: z.index });
    }
    let loglik = prob.ln();
    let negentropy = p.negentropy();
    Ok(LogLikStats {
        loglik,
        negentropy,
        centered: loglik - negentropy,
    })
}

/// `(1/n) Σ_i Y_i` for paired samples and parameters.
pub fn mean_centered_loglik(samples: &[OneHotSample], params: &ParamSet) -> Result<f64> {
    if samples.len() != params.n() {
        return Err(Error::LengthMismatch {
            left: samples.len(),
            right: params.n(),
        });
    }
    let mut total = 0.0;
    for (z, p) in samples.iter().zip(params.members()) {
        total += centered_loglik(*z, p)?.centered;
    }
    Ok(total / params.n() as f64)
}

/// Vose alias table: O(1) categorical draws from a single uniform.
#[derive(Debug, Clone)]
pub struct AliasTable {
    threshold: Vec<f64>,
    alias: Vec<u32>,
}

impl AliasTable {
    pub fn new(p: &ProbVector) -> Self {
        let k = p.k();
        let scale = k as f64;
        let mut scaled: Vec<f64> = p.as_slice().iter().map(|&x| x * scale).collect();
        let mut threshold = vec![0.0; k];
        let mut alias: Vec<u32> = (0..k as u32).collect();

        // Zero-probability columns are emptied first so that roundoff leftovers
        // at the end can only involve categories with positive mass.
        let mut small: Vec<usize> = Vec::with_capacity(k);
        let mut large: Vec<usize> = Vec::with_capacity(k);
        for (i, &s) in scaled.iter().enumerate().rev() {
            if s < 1.0 && s > 0.0 {
                small.push(i);
            } else if s >= 1.0 {
                large.push(i);
            }
        }
        for i in (0..k).rev() {
            if scaled[i] == 0.0 {
                small.push(i);
            }
        }

        while let (Some(&s), Some(&l)) = (small.last(), large.last()) {
            small.pop();
            threshold[s] = scaled[s];
            alias[s] = l as u32;
            scaled[l] -= 1.0 - scaled[s];
            if scaled[l] < 1.0 {
                large.pop();
                small.push(l);
            }
        }
        for i in large.into_iter().chain(small) {
            if p.get(i) > 0.0 {
                threshold[i] = 1.0;
            } else {
                // Only reachable if every positive column was already full.
                let donor = (0..k).find(|&j| p.get(j) > 0.0).unwrap_or(0);
                threshold[i] = 0.0;
                alias[i] = donor as u32;
            }
        }
        AliasTable { threshold, alias }
    }

    /// Per-column acceptance thresholds and aliases.
    pub fn parts(&self) -> (&[f64], &[u32]) {
        (&self.threshold, &self.alias)
    }

    #[inline]
    pub fn draw_from_uniform(&self, u: f64) -> usize {
        let k = self.threshold.len();
        let x = u * k as f64;
        let col = (x as usize).min(k - 1);
        let frac = x - col as f64;
        if frac < self.threshold[col] {
            col
        } else {
            self.alias[col] as usize
        }
    }

    #[inline]
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.draw_from_uniform(rng.random::<f64>())
    }
}

/// Draws one category from `p`.
pub fn sample<R: Rng + ?Sized>(p: &ProbVector, stream: &mut R) -> OneHotSample {
    OneHotSample {
        index: AliasTable::new(p).draw(stream),
    }
}

/// Uniform draw from the simplex via normalized exponentials.
pub fn random_simplex<R: Rng + ?Sized>(k: usize, rng: &mut R) -> ProbVector {
    loop {
        let w: Vec<f64> = (0..k).map(|_| Exp1.sample(rng)).collect();
        if let Ok(p) = ProbVector::from_weights(&w) {
            return p;
        }
    }
}

/// Adversarial draw that concentrates mass near the boundary of the simplex:
/// sparse Dirichlet draws, exact zeros on random faces, and near-vertices.
pub fn boundary_heavy<R: Rng + ?Sized>(k: usize, rng: &mut R) -> ProbVector {
    loop {
        let w: Vec<f64> = match rng.random_range(0..4u8) {
            0 => {
                let gamma = Gamma::new(0.05, 1.0).expect("valid gamma");
                (0..k).map(|_| gamma.sample(rng)).collect()
            }
            1 => {
                let keep = rng.random_range(1..=k);
                let mut w: Vec<f64> = (0..k)
                    .map(|i| if i < keep { Exp1.sample(rng) } else { 0.0 })
                    .collect();
                shuffle(&mut w, rng);
                w
            }
            2 => {
                let vertex = rng.random_range(0..k);
                let eta = 10f64.powf(-rng.random_range(2.0..12.0));
                (0..k)
                    .map(|i| {
                        if i == vertex {
                            1.0
                        } else {
                            eta * rng.random::<f64>()
                        }
                    })
                    .collect()
            }
            _ => {
                // One heavy coordinate plus many tiny, equal ones.
                let heavy = rng.random_range(0.3..1.0);
                let mut w = vec![(1.0 - heavy) / (k - 1) as f64; k];
                w[rng.random_range(0..k)] = heavy;
                w
            }
        };
        if let Ok(p) = ProbVector::from_weights(&w) {
            return p;
        }
    }
}

fn shuffle<T, R: Rng + ?Sized>(v: &mut [T], rng: &mut R) {
    for i in (1..v.len()).rev() {
        let j = rng.random_range(0..=i);
        v.swap(i, j);
    }
}
