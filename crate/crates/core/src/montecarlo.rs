//! Monte Carlo estimates of the tails of the mean centered log-likelihood,
//! the two-point construction whose tail does not vanish when
//! `(log K)²/n` stays bounded away from zero, and the grouped (misspecified)
//! model.
//!
//! Replicate `r` always draws from substream `(seed, r)` and visits members
//! in index order. Replicates are processed in fixed-size blocks whose
//! integer exceedance counts are summed, so results do not depend on the
//! number of worker threads.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{
    compare_bounds, left_tail_uniform, main_bound, padded_k, right_tail_uniform, BoundReport,
    Side, TailQuery,
};
use crate::error::{Error, Result};
use crate::mgf::mgf_upper;
use crate::rng::{substream, with_workers};
use crate::simplex::{
    boundary_heavy, centered_against, random_simplex, AliasTable, ParamSet, ProbVector,
};
use crate::special::{ln_binomial, normal_cdf};

/// Berry–Esseen constant used by [`berry_esseen_floor`] unless overridden.
pub const DEFAULT_C_BE: f64 = 0.4748;

const BLOCK: u64 = 4096;
const PARAM_SALT: u64 = 0x9e37_79b9_7f4a_7c15;

/// Replicate count, thresholds, seed and thread count of a simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimSettings {
    pub replicates: u64,
    pub epsilons: Vec<f64>,
    pub seed: u64,
    pub workers: usize,
}

impl SimSettings {
    pub fn validate(&self) -> Result<()> {
        if self.replicates < 1 {
            return Err(Error::InvalidInput("replicates must be at least 1".into()));
        }
        if self.epsilons.is_empty() {
            return Err(Error::InvalidInput("at least one epsilon is required".into()));
        }
        if let Some(e) = self.epsilons.iter().find(|e| !(**e > 0.0) || !e.is_finite()) {
            return Err(Error::InvalidInput(format!("epsilon must be positive, got {e}")));
        }
        if self.workers < 1 {
            return Err(Error::InvalidInput("workers must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub params: ParamSet,
    pub settings: SimSettings,
}

/// Named parameter-sequence generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ParamGenerator {
    Uniform,
    Counterexample,
    RandomSimplex,
    BoundaryHeavy,
}

impl ParamGenerator {
    pub fn as_str(self) -> &'static str {
        match self {
            ParamGenerator::Uniform => "uniform",
            ParamGenerator::Counterexample => "counterexample",
            ParamGenerator::RandomSimplex => "random-simplex",
            ParamGenerator::BoundaryHeavy => "boundary-heavy",
        }
    }
}

impl std::str::FromStr for ParamGenerator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(ParamGenerator::Uniform),
            "counterexample" => Ok(ParamGenerator::Counterexample),
            "random-simplex" | "random" => Ok(ParamGenerator::RandomSimplex),
            "boundary-heavy" | "boundary" => Ok(ParamGenerator::BoundaryHeavy),
            other => Err(Error::InvalidInput(format!("unknown generator '{other}'"))),
        }
    }
}

/// Builds `n` members on `K` categories. Random generators draw member `i`
/// from its own substream, separate from the replicate streams.
pub fn generate_params(gen: ParamGenerator, k: usize, n: usize, seed: u64) -> Result<ParamSet> {
    if n < 1 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    match gen {
        ParamGenerator::Uniform => ParamSet::repeated(ProbVector::uniform(k)?, n),
        ParamGenerator::Counterexample => counterexample_params(k, n),
        ParamGenerator::RandomSimplex | ParamGenerator::BoundaryHeavy => {
            if k < 2 {
                return Err(Error::InvalidInput("K must be at least 2".into()));
            }
            let members = (0..n)
                .map(|i| {
                    let mut rng = substream(seed ^ PARAM_SALT, i as u64);
                    if gen == ParamGenerator::RandomSimplex {
                        random_simplex(k, &mut rng)
                    } else {
                        boundary_heavy(k, &mut rng)
                    }
                })
                .collect();
            ParamSet::new(members)
        }
    }
}

/// Empirical tail frequencies at one threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailEstimate {
    pub epsilon: f64,
    pub replicates: u64,
    pub count_left: u64,
    pub count_right: u64,
    pub freq_left: f64,
    pub freq_right: f64,
    pub freq_two_sided: f64,
    /// 3σ halfwidth of the two-sided frequency.
    pub ci_halfwidth: f64,
    pub bound_rows: Vec<BoundReport>,
}

/// `3 √(f(1 − f)/R)`, or `3/R` when `f ∈ {0, 1}`.
pub fn ci_halfwidth(freq: f64, replicates: u64) -> f64 {
    let r = replicates as f64;
    if freq <= 0.0 || freq >= 1.0 {
        3.0 / r
    } else {
        3.0 * (freq * (1.0 - freq) / r).sqrt()
    }
}

/// A bound flagged valid that the empirical frequency exceeds by more than
/// three CI halfwidths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub epsilon: f64,
    pub family: crate::bounds::BoundFamily,
    pub side: Side,
    pub freq: f64,
    pub bound: f64,
    pub slack: f64,
}

impl TailEstimate {
    fn from_counts(epsilon: f64, replicates: u64, left: u64, right: u64) -> Self {
        let r = replicates as f64;
        let freq_two_sided = (left + right) as f64 / r;
        TailEstimate {
            epsilon,
            replicates,
            count_left: left,
            count_right: right,
            freq_left: left as f64 / r,
            freq_right: right as f64 / r,
            freq_two_sided,
            ci_halfwidth: ci_halfwidth(freq_two_sided, replicates),
            bound_rows: Vec::new(),
        }
    }

    pub fn freq(&self, side: Side) -> f64 {
        match side {
            Side::Left => self.freq_left,
            Side::Right => self.freq_right,
            Side::TwoSided => self.freq_two_sided,
        }
    }

    pub fn ci_halfwidth_for(&self, side: Side) -> f64 {
        ci_halfwidth(self.freq(side), self.replicates)
    }

    /// Valid, applicable bounds exceeded by `freq − 3·ci_halfwidth`.
    pub fn violations(&self) -> Vec<Violation> {
        self.bound_rows
            .iter()
            .filter(|b| b.valid && b.is_applicable())
            .filter_map(|b| {
                let freq = self.freq(b.side);
                let slack = 3.0 * self.ci_halfwidth_for(b.side);
                (freq > b.value + slack).then_some(Violation {
                    epsilon: self.epsilon,
                    family: b.family,
                    side: b.side,
                    freq,
                    bound: b.value,
                    slack,
                })
            })
            .collect()
    }
}

/// Flattened per-member alias tables with the statistic's value on each
/// branch of each column.
struct Engine {
    k: usize,
    n: usize,
    threshold: Vec<f64>,
    keep_value: Vec<f64>,
    alias_value: Vec<f64>,
}

impl Engine {
    /// `values[i][c]` is the contribution of member `i` drawing category `c`.
    fn new(members: &[ProbVector], values: &[Vec<f64>]) -> Self {
        let k = members[0].k();
        let n = members.len();
        let mut threshold = Vec::with_capacity(n * k);
        let mut keep_value = Vec::with_capacity(n * k);
        let mut alias_value = Vec::with_capacity(n * k);
        for (p, vals) in members.iter().zip(values) {
            let table = AliasTable::new(p);
            let (thr, alias) = table.parts();
            for col in 0..k {
                threshold.push(thr[col]);
                keep_value.push(if thr[col] > 0.0 { vals[col] } else { 0.0 });
                let a = alias[col] as usize;
                alias_value.push(if thr[col] < 1.0 { vals[a] } else { 0.0 });
            }
        }
        Engine {
            k,
            n,
            threshold,
            keep_value,
            alias_value,
        }
    }

    #[inline]
    fn replicate_mean(&self, seed: u64, r: u64) -> f64 {
        use rand::Rng;
        let mut rng = substream(seed, r);
        let kf = self.k as f64;
        let mut sum = 0.0;
        for i in 0..self.n {
            let u: f64 = rng.random();
            let x = u * kf;
            let col = (x as usize).min(self.k - 1);
            let frac = x - col as f64;
            let idx = i * self.k + col;
            sum += if frac < self.threshold[idx] {
                self.keep_value[idx]
            } else {
                self.alias_value[idx]
            };
        }
        sum / self.n as f64
    }

    fn run(&self, settings: &SimSettings) -> Result<Vec<TailEstimate>> {
        settings.validate()?;
        let eps = &settings.epsilons;
        let blocks = settings.replicates.div_ceil(BLOCK);
        let counts = with_workers(settings.workers, || {
            (0..blocks)
                .into_par_iter()
                .map(|b| {
                    let mut c = vec![(0u64, 0u64); eps.len()];
                    let end = ((b + 1) * BLOCK).min(settings.replicates);
                    for r in b * BLOCK..end {
                        let mean = self.replicate_mean(settings.seed, r);
                        for (slot, &e) in c.iter_mut().zip(eps) {
                            if mean >= e {
                                slot.1 += 1;
                            } else if mean <= -e {
                                slot.0 += 1;
                            }
                        }
                    }
                    c
                })
                .reduce(
                    || vec![(0u64, 0u64); eps.len()],
                    |mut a, b| {
                        for (x, y) in a.iter_mut().zip(b) {
                            x.0 += y.0;
                            x.1 += y.1;
                        }
                        a
                    },
                )
        })?;
        Ok(eps
            .iter()
            .zip(counts)
            .map(|(&e, (l, r))| TailEstimate::from_counts(e, settings.replicates, l, r))
            .collect())
    }
}

/// Replicate means `0..count` of the experiment (for inspection and tests).
pub fn simulate_means(config: &ExperimentConfig, count: u64) -> Vec<f64> {
    let engine = correctly_specified_engine(&config.params);
    (0..count)
        .map(|r| engine.replicate_mean(config.settings.seed, r))
        .collect()
}

fn correctly_specified_engine(params: &ParamSet) -> Engine {
    let values: Vec<Vec<f64>> = params.members().iter().map(|p| p.centered_values()).collect();
    Engine::new(params.members(), &values)
}

/// Empirical left, right and two-sided tail frequencies of
/// `(1/n) Σ_i Y_i` with every bound family attached.
pub fn estimate_tail(config: &ExperimentConfig) -> Result<Vec<TailEstimate>> {
    let params = &config.params;
    let engine = correctly_specified_engine(params);
    let mut estimates = engine.run(&config.settings)?;
    for est in &mut estimates {
        let q = TailQuery::natural(params.n() as u64, params.k(), est.epsilon)?;
        est.bound_rows = compare_bounds(&q, Some(params));
    }
    Ok(estimates)
}

/// Every member equals `(1/2, 1/(2(K−1)), …, 1/(2(K−1)))`.
pub fn counterexample_params(k: usize, n: usize) -> Result<ParamSet> {
    if k < 3 {
        return Err(Error::InvalidInput(format!(
            "counterexample needs K >= 3 (log(K-1) vanishes at K = 2), got {k}"
        )));
    }
    let rest = 0.5 / (k - 1) as f64;
    let mut p = vec![rest; k];
    p[0] = 0.5;
    ParamSet::repeated(ProbVector::new(p)?, n)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleReport {
    pub k: usize,
    pub n: u64,
    pub epsilon: f64,
    pub exact_left: f64,
    pub exact_right: f64,
    pub exact_tail: f64,
    pub normal_floor: f64,
    pub c_be: f64,
    /// `(log(K − 1))² / (4n)`.
    pub variance: f64,
}

/// Largest `n` for which the binomial law is summed term by term.
pub const MAX_EXACT_N: u64 = 1_000_000;

/// Exact tails of `(log(K−1)/(2n)) (2B − n)` with `B ~ Binomial(n, 1/2)`.
pub fn counterexample_exact_tail(k: usize, n: u64, epsilon: f64) -> Result<CounterexampleReport> {
    counterexample_exact_tail_with(k, n, epsilon, DEFAULT_C_BE)
}

pub fn counterexample_exact_tail_with(
    k: usize,
    n: u64,
    epsilon: f64,
    c_be: f64,
) -> Result<CounterexampleReport> {
    if k < 3 {
        return Err(Error::InvalidInput(format!("counterexample needs K >= 3, got {k}")));
    }
    if !(1..=MAX_EXACT_N).contains(&n) {
        return Err(Error::Precondition(format!(
            "exact binomial summation needs 1 <= n <= {MAX_EXACT_N}, got {n}"
        )));
    }
    let spread = ((k - 1) as f64).ln();
    let nf = n as f64;
    let ln_half_n = -nf * std::f64::consts::LN_2;
    let mut left = 0.0;
    let mut right = 0.0;
    for b in 0..=n {
        let mean = spread * (2.0 * b as f64 - nf) / (2.0 * nf);
        if mean >= epsilon {
            right += (ln_binomial(n, b) + ln_half_n).exp();
        } else if mean <= -epsilon {
            left += (ln_binomial(n, b) + ln_half_n).exp();
        }
    }
    Ok(CounterexampleReport {
        k,
        n,
        epsilon,
        exact_left: left.min(1.0),
        exact_right: right.min(1.0),
        exact_tail: (left + right).min(1.0),
        normal_floor: berry_esseen_floor(k, n, epsilon, c_be),
        c_be,
        variance: spread * spread / (4.0 * nf),
    })
}

/// `max(0, Φ(−2√n ε / log(K−1)) − c_be/√n)`.
pub fn berry_esseen_floor(k: usize, n: u64, epsilon: f64, c_be: f64) -> f64 {
    let spread = ((k - 1) as f64).ln();
    let sn = (n as f64).sqrt();
    (normal_cdf(-2.0 * sn * epsilon / spread) - c_be / sn).max(0.0)
}

/// Groups of members sharing one misspecified (pooled) parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupedParamSet {
    groups: Vec<Vec<ProbVector>>,
    pooled: Vec<ProbVector>,
}

/// Coordinate means. Computed as `p_1 + Σ_j (p_j − p_1)/n_i` so that a group of
/// identical members pools to exactly that member.
fn pool(members: &[ProbVector]) -> Result<ProbVector> {
    let first = members[0].as_slice();
    let m = members.len() as f64;
    let mut mean = first.to_vec();
    for p in &members[1..] {
        for (acc, (&x, &x0)) in mean.iter_mut().zip(p.as_slice().iter().zip(first)) {
            *acc += (x - x0) / m;
        }
    }
    for v in &mut mean {
        *v = v.max(0.0);
    }
    ProbVector::new(mean)
}

impl GroupedParamSet {
    pub fn new(groups: Vec<Vec<ProbVector>>) -> Result<Self> {
        if groups.is_empty() || groups.iter().any(|g| g.is_empty()) {
            return Err(Error::InvalidInput("every group needs at least one member".into()));
        }
        let k = groups[0][0].k();
        if groups.iter().flatten().any(|p| p.k() != k) {
            return Err(Error::InvalidInput(
                "all members must share one alphabet size".into(),
            ));
        }
        let pooled = groups.iter().map(|g| pool(g)).collect::<Result<Vec<_>>>()?;
        for (g, pbar) in groups.iter().zip(&pooled) {
            for p in g {
                if p.as_slice().iter().zip(pbar.as_slice()).any(|(&a, &b)| a > 0.0 && b == 0.0) {
                    return Err(Error::InvalidDistribution(
                        "pooled probability vanishes where a member has mass".into(),
                    ));
                }
            }
        }
        Ok(GroupedParamSet { groups, pooled })
    }

    pub fn groups(&self) -> &[Vec<ProbVector>] {
        &self.groups
    }

    pub fn pooled(&self) -> &[ProbVector] {
        &self.pooled
    }

    pub fn n(&self) -> usize {
        self.groups.iter().map(Vec::len).sum()
    }

    pub fn k(&self) -> usize {
        self.groups[0][0].k()
    }

    /// All members in group order.
    pub fn flattened(&self) -> ParamSet {
        ParamSet::new(self.groups.iter().flatten().cloned().collect()).expect("validated groups")
    }
}

pub fn pooled_params(g: &GroupedParamSet) -> Vec<ProbVector> {
    g.pooled().to_vec()
}

/// Tails of the misspecified statistic
/// `(1/n) Σ_i Σ_j (log p̄⁽ⁱ⁾_{Z_j} − Σ_k p_jk log p̄⁽ⁱ⁾_k)`, where each `Z_j` is
/// drawn from its own member. Only the parameter-free uniform bounds are
/// attached.
pub fn misspecified_tail(g: &GroupedParamSet, settings: &SimSettings) -> Result<Vec<TailEstimate>> {
    let mut values = Vec::with_capacity(g.n());
    for (members, pbar) in g.groups().iter().zip(g.pooled()) {
        for p in members {
            values.push(centered_against(p.as_slice(), pbar.as_slice()));
        }
    }
    let flat = g.flattened();
    let engine = Engine::new(flat.members(), &values);
    let mut estimates = engine.run(settings)?;
    for est in &mut estimates {
        let q = TailQuery::natural(g.n() as u64, g.k(), est.epsilon)?;
        est.bound_rows = vec![main_bound(&q), right_tail_uniform(&q), left_tail_uniform(&q)];
    }
    Ok(estimates)
}

/// One link-by-link evaluation of
/// `E[e^{λU}] ≤ M_Y(λ, p̄)^{n_i} ≤ exp(n_i λ² (log K)²)`, in log space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupedMgfRow {
    pub group: usize,
    pub lambda: f64,
    pub ln_exact: f64,
    pub ln_pooled: f64,
    pub ln_upper: f64,
    pub first_link: bool,
    pub second_link: bool,
}

impl GroupedMgfRow {
    pub fn holds(&self) -> bool {
        self.first_link && self.second_link
    }
}

fn ln_le(a: f64, b: f64) -> bool {
    a <= b + 1e-12 * b.abs().max(1.0)
}

fn ln_pow_sum(pbar: &ProbVector, weights: &[f64], lambda: f64) -> f64 {
    weights
        .iter()
        .zip(pbar.as_slice())
        .filter(|(&w, _)| w > 0.0)
        .map(|(&w, &q)| w * (lambda * q.ln()).exp())
        .sum::<f64>()
        .ln()
}

/// `log E[e^{λU⁽ⁱ⁾}] = Σ_j log(Σ_k p_jk p̄_k^λ) − λ n_i Σ_k p̄_k log p̄_k`.
pub fn grouped_ln_mgf(members: &[ProbVector], pbar: &ProbVector, lambda: f64) -> f64 {
    let ni = members.len() as f64;
    members
        .iter()
        .map(|p| ln_pow_sum(pbar, p.as_slice(), lambda))
        .sum::<f64>()
        - lambda * ni * pbar.negentropy()
}

/// Largest `K^{n_i}` accepted by [`grouped_ln_mgf_enumerated`].
pub const MAX_ENUMERATION: u128 = 50_000_000;

/// The same expectation by summing over every joint outcome of the group.
pub fn grouped_ln_mgf_enumerated(members: &[ProbVector], pbar: &ProbVector, lambda: f64) -> Result<f64> {
    let k = pbar.k();
    let outcomes = (k as u128).checked_pow(members.len() as u32).unwrap_or(u128::MAX);
    if outcomes > MAX_ENUMERATION {
        return Err(Error::CensusTooLarge {
            types: outcomes,
            limit: MAX_ENUMERATION,
        });
    }
    let center = pbar.negentropy();
    let shift: Vec<f64> = pbar
        .as_slice()
        .iter()
        .map(|&q| if q > 0.0 { lambda * (q.ln() - center) } else { 0.0 })
        .collect();

    fn walk(members: &[ProbVector], shift: &[f64], prob: f64, exponent: f64) -> f64 {
        let Some((p, rest)) = members.split_first() else {
            return prob * exponent.exp();
        };
        p.as_slice()
            .iter()
            .enumerate()
            .filter(|(_, &x)| x > 0.0)
            .map(|(c, &x)| walk(rest, shift, prob * x, exponent + shift[c]))
            .sum()
    }
    Ok(walk(members, &shift, 1.0, 0.0).ln())
}

/// The same expectation from the exact law of the category counts of the
/// group, built one member at a time. The state space has
/// `C(n_i + K − 1, K − 1)` count vectors.
pub fn grouped_ln_mgf_counts(members: &[ProbVector], pbar: &ProbVector, lambda: f64) -> Result<f64> {
    let k = pbar.k();
    if let Some(p) = members.iter().find(|p| p.k() != k) {
        return Err(Error::LengthMismatch { left: p.k(), right: k });
    }
    let states = crate::coding::type_count(members.len(), k).unwrap_or(u128::MAX);
    if states > MAX_ENUMERATION {
        return Err(Error::CensusTooLarge {
            types: states,
            limit: MAX_ENUMERATION,
        });
    }
    let mut law: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
    law.insert(vec![0; k], 1.0);
    for p in members {
        let mut next: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
        for (counts, mass) in &law {
            for (c, &x) in p.as_slice().iter().enumerate().filter(|(_, &x)| x > 0.0) {
                let mut key = counts.clone();
                key[c] += 1;
                *next.entry(key).or_insert(0.0) += mass * x;
            }
        }
        law = next;
    }
    let center = pbar.negentropy();
    let mut total = 0.0;
    for (counts, mass) in &law {
        let mut u = 0.0;
        for (c, &m) in counts.iter().enumerate() {
            if m > 0 {
                let q = pbar.get(c);
                if q <= 0.0 {
                    return Err(Error::ImpossibleSample { category: c });
                }
                u += m as f64 * (q.ln() - center);
            }
        }
        total += mass * (lambda * u).exp();
    }
    Ok(total.ln())
}

/// Evaluates both links of the grouped MGF chain for every group and
/// admissible `λ` (domain of the uniform MGF bound at `max(K, 5)`).
pub fn grouped_mgf_check(g: &GroupedParamSet, lambdas: &[f64]) -> Result<Vec<GroupedMgfRow>> {
    let k_used = padded_k(g.k());
    let mut rows = Vec::new();
    for (idx, (members, pbar)) in g.groups().iter().zip(g.pooled()).enumerate() {
        let ni = members.len() as f64;
        for &lambda in lambdas {
            let upper = mgf_upper(lambda, k_used)?;
            let ln_exact = grouped_ln_mgf(members, pbar, lambda);
            let ln_pooled = ni * crate::mgf::mgf_exact(lambda, pbar)?.value.ln();
            let ln_upper = ni * upper.ln();
            rows.push(GroupedMgfRow {
                group: idx,
                lambda,
                ln_exact,
                ln_pooled,
                ln_upper,
                first_link: ln_le(ln_exact, ln_pooled),
                second_link: ln_le(ln_pooled, ln_upper),
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pv(p: &[f64]) -> ProbVector {
        ProbVector::new(p.to_vec()).unwrap()
    }

    fn settings(replicates: u64, epsilons: &[f64], seed: u64, workers: usize) -> SimSettings {
        SimSettings {
            replicates,
            epsilons: epsilons.to_vec(),
            seed,
            workers,
        }
    }

    #[test]
    fn uniform_params_give_zero_tails() {
        let config = ExperimentConfig {
            params: generate_params(ParamGenerator::Uniform, 6, 30, 1).unwrap(),
            settings: settings(5000, &[1e-9, 0.1], 1, 2),
        };
        assert!(simulate_means(&config, 50).iter().all(|&m| m == 0.0));
        for est in estimate_tail(&config).unwrap() {
            assert_eq!(est.freq_two_sided, 0.0);
            assert_eq!(est.ci_halfwidth, 3.0 / 5000.0);
        }
    }

    #[test]
    fn counterexample_construction() {
        let p = counterexample_params(3, 2).unwrap();
        assert_eq!(p.members()[0].as_slice(), &[0.5, 0.25, 0.25]);
        let p = counterexample_params(17, 1).unwrap();
        assert!(p.members()[0].as_slice()[1..].iter().all(|&x| x == 1.0 / 32.0));
        assert!(counterexample_params(2, 4).is_err());
    }

    #[test]
    fn exact_tail_examples() {
        let r = counterexample_exact_tail(17, 16, 0.3).unwrap();
        assert!((r.exact_tail - 2.0 * 14893.0 / 65536.0).abs() < 1e-14);
        assert!((r.variance - 0.120_113_253_479_550_4).abs() < 1e-14);
        assert!((r.exact_left - r.exact_right).abs() < 1e-15);
        let r = counterexample_exact_tail(17, 16, 16f64.ln() / 2.0 + 1e-9).unwrap();
        assert_eq!(r.exact_tail, 0.0);
    }

    #[test]
    fn rate_witness_values() {
        for (n, k, expected) in [
            (16u64, 56usize, 0.803_619_384_765_625),
            (64, 2982, 0.900_653_246_252_033_1),
            (256, 8_886_112, 0.851_315_059_492_915_1),
        ] {
            assert_eq!(((n as f64).sqrt().exp()).ceil() as usize + 1, k);
            let r = counterexample_exact_tail(k, n, 0.1).unwrap();
            assert!((r.exact_tail - expected).abs() < 1e-12, "n = {n}: {}", r.exact_tail);
        }
    }

    #[test]
    fn berry_esseen_examples() {
        let c = DEFAULT_C_BE;
        assert!((berry_esseen_floor(10, 100, 1e-15, c) - (0.5 - c / 10.0)).abs() < 1e-12);
        let n = 400u64;
        let k = (20f64).exp() as usize + 1;
        let spread = ((k - 1) as f64).ln();
        let eps = 0.1 * spread / 20.0;
        let expected = 0.420_740_290_560_897 - c / 20.0;
        assert!((berry_esseen_floor(k, n, eps, c) - expected).abs() < 1e-9);
        assert_eq!(berry_esseen_floor(5, 1_000_000, 0.5, c), 0.0);
    }

    #[test]
    fn pooling_examples() {
        let g = GroupedParamSet::new(vec![vec![pv(&[0.3, 0.7]); 4]]).unwrap();
        assert_eq!(pooled_params(&g)[0].as_slice(), &[0.3, 0.7]);
        let g = GroupedParamSet::new(vec![vec![pv(&[1.0, 0.0]), pv(&[0.0, 1.0])]]).unwrap();
        assert_eq!(pooled_params(&g)[0].as_slice(), &[0.5, 0.5]);
        let g = GroupedParamSet::new(vec![vec![pv(&[0.6, 0.4]), pv(&[0.2, 0.8]), pv(&[0.4, 0.6])]])
            .unwrap();
        let p = &pooled_params(&g)[0];
        assert!((p.get(0) - 0.4).abs() < 1e-15 && (p.get(1) - 0.6).abs() < 1e-15);
    }

    #[test]
    fn homogeneous_groups_match_estimate_tail() {
        let a = pv(&[0.5, 0.2, 0.1, 0.1, 0.1]);
        let b = pv(&[0.05, 0.05, 0.3, 0.3, 0.3]);
        let g = GroupedParamSet::new(vec![vec![a.clone(); 7], vec![b.clone(); 5]]).unwrap();
        let s = settings(20_000, &[0.05, 0.2, 0.4], 99, 3);
        let mis = misspecified_tail(&g, &s).unwrap();
        let direct = estimate_tail(&ExperimentConfig {
            params: g.flattened(),
            settings: s,
        })
        .unwrap();
        for (m, d) in mis.iter().zip(&direct) {
            assert_eq!(m.count_left, d.count_left);
            assert_eq!(m.count_right, d.count_right);
        }
    }

    #[test]
    fn opposite_vertices_give_zero_statistic() {
        let g = GroupedParamSet::new(vec![vec![pv(&[1.0, 0.0]), pv(&[0.0, 1.0])]]).unwrap();
        let est = misspecified_tail(&g, &settings(2000, &[1e-12], 5, 1)).unwrap();
        assert_eq!(est[0].freq_two_sided, 0.0);
    }

    #[test]
    fn grouped_chain_examples() {
        let homogeneous = GroupedParamSet::new(vec![vec![pv(&[0.4, 0.3, 0.1, 0.1, 0.1]); 3]]).unwrap();
        for row in grouped_mgf_check(&homogeneous, &[-0.005, 0.5, 1.0]).unwrap() {
            assert!(row.holds());
            assert!((row.ln_exact - row.ln_pooled).abs() < 1e-12);
        }
        let g = GroupedParamSet::new(vec![vec![
            pv(&[0.6, 0.4, 0.0, 0.0, 0.0]),
            pv(&[0.2, 0.2, 0.2, 0.2, 0.2]),
        ]])
        .unwrap();
        let rows = grouped_mgf_check(&g, &[0.0, 0.5]).unwrap();
        assert!(rows.iter().all(GroupedMgfRow::holds));
        assert_eq!(rows[0].ln_exact, 0.0);
        assert_eq!(rows[0].ln_pooled, 0.0);
        assert_eq!(rows[0].ln_upper, 0.0);
        let members = &g.groups()[0];
        let enumerated = grouped_ln_mgf_enumerated(members, &g.pooled()[0], 0.5).unwrap();
        assert!((enumerated - rows[1].ln_exact).abs() < 1e-12);
        let counted = grouped_ln_mgf_counts(members, &g.pooled()[0], 0.5).unwrap();
        assert!((counted - rows[1].ln_exact).abs() < 1e-12);
    }

    #[test]
    fn count_law_matches_joint_enumeration() {
        let members = generate_params(ParamGenerator::BoundaryHeavy, 4, 7, 5).unwrap().members().to_vec();
        let g = GroupedParamSet::new(vec![members.clone()]).unwrap();
        let pbar = &g.pooled()[0];
        for lambda in [-0.01, 0.3, 1.5] {
            let a = grouped_ln_mgf_enumerated(&members, pbar, lambda).unwrap();
            let b = grouped_ln_mgf_counts(&members, pbar, lambda).unwrap();
            let c = grouped_ln_mgf(&members, pbar, lambda);
            assert!((a - b).abs() < 1e-12 * a.abs().max(1.0));
            assert!((a - c).abs() < 1e-12 * a.abs().max(1.0));
        }
    }

    #[test]
    fn worker_count_does_not_change_counts() {
        let params = generate_params(ParamGenerator::RandomSimplex, 5, 40, 3).unwrap();
        let run = |w| {
            estimate_tail(&ExperimentConfig {
                params: params.clone(),
                settings: settings(10_000, &[0.1, 0.3], 11, w),
            })
            .unwrap()
        };
        let counts = |v: Vec<TailEstimate>| -> Vec<(u64, u64)> {
            v.iter().map(|e| (e.count_left, e.count_right)).collect()
        };
        let base = counts(run(1));
        for w in [2, 4, 16] {
            assert_eq!(counts(run(w)), base);
        }
    }

    #[test]
    fn settings_validation() {
        assert!(settings(0, &[0.1], 0, 1).validate().is_err());
        assert!(settings(10, &[], 0, 1).validate().is_err());
        assert!(settings(10, &[-0.1], 0, 1).validate().is_err());
        assert!(settings(10, &[0.1], 0, 0).validate().is_err());
    }
}
