//! Fixed-length source coding for i.i.d. blocks: typical sets, essential bit
//! content, an enumerative block code over the typical set, and error
//! exponents.
//!
//! Sequences are grouped by type (occupation vector). All sequences of one
//! type share their probability, so every set considered here is a union of
//! whole types except for the one boundary type of a smallest high-mass set.
//! All entropies and margins in this module are in bits.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{FromPrimitive, One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::padded_k;
use crate::error::{Error, Result};
use crate::montecarlo::ci_halfwidth;
use crate::rng::{substream, with_workers};
use crate::simplex::{entropy, AliasTable, LogBase, ProbVector};
use crate::special::log2_big;

/// Largest number of types a census will enumerate.
pub const MAX_TYPES: u128 = 10_000_000;

/// Absolute slack on the `1 − δ` mass target, absorbing summation roundoff.
pub const MASS_SLACK: f64 = 1e-12;

/// An i.i.d. source emitting blocks of length `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceModel {
    pub p: ProbVector,
    pub n: usize,
}

impl SourceModel {
    pub fn new(p: ProbVector, n: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidInput("block length must be at least 1".into()));
        }
        Ok(SourceModel { p, n })
    }

    pub fn k(&self) -> usize {
        self.p.k()
    }

    /// Entropy in bits.
    pub fn entropy_bits(&self) -> f64 {
        entropy(&self.p, LogBase::Bits)
    }
}

/// `Σ_t log₂ p_{x_t}`; `−∞` for impossible sequences.
pub fn seq_log2prob(x: &[usize], p: &ProbVector) -> f64 {
    x.iter().map(|&c| p.get(c).log2()).sum()
}

/// Which side(s) of the typicality condition to test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TypicalVariant {
    /// `(1/n) log₂(1/P(x)) − H < ε`.
    T1,
    /// `(1/n) log₂(1/P(x)) − H > −ε`.
    T2,
    Both,
}

impl TypicalVariant {
    pub fn as_str(self) -> &'static str {
        match self {
            TypicalVariant::T1 => "T1",
            TypicalVariant::T2 => "T2",
            TypicalVariant::Both => "both",
        }
    }

    fn test(self, log2prob: f64, n: usize, h: f64, epsilon: f64) -> bool {
        let stat = -log2prob / n as f64 - h;
        match self {
            TypicalVariant::T1 => stat < epsilon,
            TypicalVariant::T2 => stat > -epsilon,
            TypicalVariant::Both => stat < epsilon && stat > -epsilon,
        }
    }
}

pub fn is_typical(x: &[usize], p: &ProbVector, epsilon: f64, variant: TypicalVariant) -> Result<bool> {
    if x.is_empty() {
        return Err(Error::InvalidInput("sequence must be nonempty".into()));
    }
    if !(epsilon > 0.0) {
        return Err(Error::InvalidInput(format!("epsilon must be positive, got {epsilon}")));
    }
    let h = entropy(p, LogBase::Bits);
    Ok(variant.test(seq_log2prob(x, p), x.len(), h, epsilon))
}

/// All sequences with one occupation vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypeClass {
    pub counts: Vec<u32>,
    /// `Σ_k c_k log₂ p_k`, the log-probability of each member sequence.
    pub log2prob: f64,
    pub multiplicity: BigUint,
}

impl TypeClass {
    /// Total probability of the class.
    pub fn mass(&self) -> f64 {
        if self.log2prob == f64::NEG_INFINITY {
            return 0.0;
        }
        (log2_big(&self.multiplicity) + self.log2prob).exp2()
    }
}

/// `C(n + K − 1, K − 1)`, or `None` past `u128`.
pub fn type_count(n: usize, k: usize) -> Option<u128> {
    let mut c: u128 = 1;
    for i in 1..k as u128 {
        c = c.checked_mul(n as u128 + i)? / i;
    }
    Some(c)
}

fn factorials(n: usize) -> Vec<BigUint> {
    let mut f = Vec::with_capacity(n + 1);
    f.push(BigUint::one());
    for i in 1..=n {
        let next = &f[i - 1] * BigUint::from(i);
        f.push(next);
    }
    f
}

fn compositions(total: u32, parts: usize, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if parts == 1 {
        prefix.push(total);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for c in 0..=total {
        prefix.push(c);
        compositions(total - c, parts - 1, prefix, out);
        prefix.pop();
    }
}

/// Every type of length-`n` sequences, in lexicographic order of the
/// occupation vectors, with exact multiplicities.
pub fn type_census(model: &SourceModel) -> Result<Vec<TypeClass>> {
    let (n, k) = (model.n, model.k());
    let count = type_count(n, k).unwrap_or(u128::MAX);
    if count > MAX_TYPES {
        return Err(Error::CensusTooLarge {
            types: count,
            limit: MAX_TYPES,
        });
    }
    let fact = factorials(n);
    let log2p: Vec<f64> = model.p.as_slice().iter().map(|&x| x.log2()).collect();
    let chunks: Vec<Vec<TypeClass>> = (0..=n as u32)
        .into_par_iter()
        .map(|c1| {
            let mut tails = Vec::new();
            if k == 1 {
                return Vec::new();
            }
            compositions(n as u32 - c1, k - 1, &mut vec![c1], &mut tails);
            tails
                .into_iter()
                .map(|counts| {
                    let mut denom = BigUint::one();
                    let mut log2prob = 0.0;
                    for (&c, &lp) in counts.iter().zip(&log2p) {
                        denom *= &fact[c as usize];
                        if c > 0 {
                            log2prob += c as f64 * lp;
                        }
                    }
                    TypeClass {
                        multiplicity: &fact[n] / denom,
                        log2prob,
                        counts,
                    }
                })
                .collect()
        })
        .collect();
    Ok(chunks.into_iter().flatten().collect())
}

/// CSV export: `c1..cK,log2prob,multiplicity`.
pub fn census_csv(census: &[TypeClass], k: usize) -> String {
    let mut out = String::new();
    let header: Vec<String> = (1..=k).map(|i| format!("c{i}")).collect();
    out.push_str(&header.join(","));
    out.push_str(",log2prob,multiplicity\n");
    for t in census {
        for c in &t.counts {
            out.push_str(&c.to_string());
            out.push(',');
        }
        out.push_str(&format!("{},{}\n", t.log2prob, t.multiplicity));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypicalSetStats {
    pub variant: TypicalVariant,
    pub epsilon: f64,
    pub n: usize,
    pub size: BigUint,
    pub log2_size: f64,
    pub prob_mass: f64,
    /// `P(Xⁿ ∉ set)`.
    pub complement_mass: f64,
    /// For T1: `log₂|T1| < n(H + ε)`. Always true for other variants.
    pub counting_bound_holds: bool,
}

pub fn typical_set_stats(model: &SourceModel, epsilon: f64, variant: TypicalVariant) -> Result<TypicalSetStats> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidInput(format!("epsilon must be positive, got {epsilon}")));
    }
    let census = type_census(model)?;
    Ok(typical_stats_from_census(model, &census, epsilon, variant))
}

fn typical_stats_from_census(
    model: &SourceModel,
    census: &[TypeClass],
    epsilon: f64,
    variant: TypicalVariant,
) -> TypicalSetStats {
    let h = model.entropy_bits();
    let mut size = BigUint::zero();
    let mut mass = 0.0;
    let mut complement = 0.0;
    for t in census {
        if variant.test(t.log2prob, model.n, h, epsilon) {
            size += &t.multiplicity;
            mass += t.mass();
        } else {
            complement += t.mass();
        }
    }
    let log2_size = log2_big(&size);
    let counting_bound_holds = match variant {
        TypicalVariant::T1 => log2_size < model.n as f64 * (h + epsilon),
        _ => true,
    };
    TypicalSetStats {
        variant,
        epsilon,
        n: model.n,
        size,
        log2_size,
        prob_mass: mass.min(1.0),
        complement_mass: complement.min(1.0),
        counting_bound_holds,
    }
}

/// Size of the smallest set of sequences with probability at least `1 − δ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EssentialBitContent {
    pub delta: f64,
    pub set_size: BigUint,
    /// `log₂ |S_δ|`.
    pub h_delta: f64,
    pub mass: f64,
    /// Mass after removing one least-probable member.
    pub mass_without_last: f64,
}

pub fn essential_bit_content(model: &SourceModel, delta: f64) -> Result<EssentialBitContent> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidInput(format!("delta must lie in (0, 1), got {delta}")));
    }
    let census = type_census(model)?;
    Ok(essential_from_census(&census, delta))
}

fn essential_from_census(census: &[TypeClass], delta: f64) -> EssentialBitContent {
    let mut order: Vec<&TypeClass> = census
        .iter()
        .filter(|t| t.log2prob > f64::NEG_INFINITY)
        .collect();
    order.sort_by(|a, b| b.log2prob.total_cmp(&a.log2prob));
    let target = 1.0 - delta - MASS_SLACK;
    let mut size = BigUint::zero();
    let mut mass = 0.0;
    let mut last_prob = 0.0;
    for t in order {
        let q = t.log2prob.exp2();
        let class_mass = t.mass();
        if mass + class_mass >= target {
            let need = ((target - mass) / q).ceil().max(1.0);
            let need = BigUint::from_f64(need)
                .unwrap_or_else(|| t.multiplicity.clone())
                .min(t.multiplicity.clone());
            mass += need.to_f64().unwrap_or(f64::INFINITY) * q;
            size += need;
            last_prob = q;
            break;
        }
        size += &t.multiplicity;
        mass += class_mass;
        last_prob = q;
    }
    EssentialBitContent {
        delta,
        h_delta: log2_big(&size),
        set_size: size,
        mass: mass.min(1.0),
        mass_without_last: mass - last_prob,
    }
}

/// Block lengths beyond which both refined source coding claims are
/// guaranteed, for `ε` in bits and `K` padded to at least 5.
pub fn source_coding_thresholds(k: usize, delta: f64, epsilon: f64) -> Result<(f64, f64)> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidInput(format!("delta must lie in (0, 1), got {delta}")));
    }
    if !(epsilon > 0.0) {
        return Err(Error::InvalidInput(format!("epsilon must be positive, got {epsilon}")));
    }
    let l2 = (padded_k(k) as f64).log2();
    let l2sq = l2 * l2;
    let n_upper = 4.0 * l2sq * (1.0 / delta).ln() / (epsilon * epsilon);
    let a = 2.0 / (1.0 - delta);
    let n_lower = (2.0 * a.log2() / epsilon).max(16.0 * l2sq * a.ln() / (epsilon * epsilon));
    Ok((n_upper, n_lower))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceCodingRow {
    pub n: usize,
    pub h_delta: f64,
    /// `H_δ / n`.
    pub rate: f64,
    pub upper_applies: bool,
    pub upper_holds: bool,
    /// `H + ε − rate`.
    pub upper_margin: f64,
    pub lower_applies: bool,
    pub lower_holds: bool,
    /// `rate − (H − ε)`.
    pub lower_margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceCodingReport {
    pub delta: f64,
    pub epsilon: f64,
    pub entropy: f64,
    pub n_upper: f64,
    pub n_lower: f64,
    pub rows: Vec<SourceCodingRow>,
}

impl SourceCodingReport {
    /// Every claim whose block-length condition is met holds.
    pub fn claims_hold(&self) -> bool {
        self.rows.iter().all(|r| {
            (!r.upper_applies || r.upper_holds) && (!r.lower_applies || r.lower_holds)
        })
    }
}

pub fn verify_source_coding(
    p: &ProbVector,
    delta: f64,
    epsilon: f64,
    ns: impl IntoIterator<Item = usize>,
) -> Result<SourceCodingReport> {
    let (n_upper, n_lower) = source_coding_thresholds(p.k(), delta, epsilon)?;
    let h = entropy(p, LogBase::Bits);
    let mut rows = Vec::new();
    for n in ns {
        let model = SourceModel::new(p.clone(), n)?;
        let ebc = essential_bit_content(&model, delta)?;
        let rate = ebc.h_delta / n as f64;
        let nf = n as f64;
        rows.push(SourceCodingRow {
            n,
            h_delta: ebc.h_delta,
            rate,
            upper_applies: nf > n_upper,
            upper_holds: rate < h + epsilon,
            upper_margin: h + epsilon - rate,
            lower_applies: nf > n_lower,
            lower_holds: rate > h - epsilon,
            lower_margin: rate - (h - epsilon),
        });
    }
    Ok(SourceCodingReport {
        delta,
        epsilon,
        entropy: h,
        n_upper,
        n_lower,
        rows,
    })
}

/// An `m`-bit codeword, packed most significant bit first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Codeword {
    pub m: usize,
    pub bytes: Vec<u8>,
}

impl Codeword {
    fn from_index(index: &BigUint, m: usize) -> Self {
        let nbytes = m.div_ceil(8);
        let mut bytes = vec![0u8; nbytes];
        if !index.is_zero() {
            // Left-align the m-bit big-endian value in the byte buffer.
            let shifted = (index << (nbytes * 8 - m)).to_bytes_be();
            bytes[nbytes - shifted.len()..].copy_from_slice(&shifted);
        }
        Codeword { m, bytes }
    }

    fn index(&self) -> BigUint {
        BigUint::from_bytes_be(&self.bytes) >> (self.bytes.len() * 8 - self.m)
    }

    /// Bits as a `0`/`1` string.
    pub fn to_bit_string(&self) -> String {
        (0..self.m)
            .map(|i| if self.bytes[i / 8] >> (7 - i % 8) & 1 == 1 { '1' } else { '0' })
            .collect()
    }
}

/// Enumerative code over the one-sided typical set `T1`.
///
/// Typical sequences get index `1 + offset(type) + rank within type`, with
/// types in lexicographic order of their occupation vectors and sequences in
/// lexicographic order within a type. Every atypical sequence is sent to
/// index 0, which decodes to the first typical sequence.
#[derive(Debug, Clone)]
pub struct BlockCode {
    p: ProbVector,
    n: usize,
    epsilon: f64,
    m: usize,
    threshold_log2prob: f64,
    types: Vec<TypeClass>,
    offsets: Vec<BigUint>,
    lookup: HashMap<Vec<u32>, usize>,
    typical_mass: f64,
    typical_size: BigUint,
}

pub fn build_block_code(model: &SourceModel, epsilon: f64) -> Result<BlockCode> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidInput(format!("epsilon must be positive, got {epsilon}")));
    }
    let h = model.entropy_bits();
    let nf = model.n as f64;
    let m = (nf * (h + epsilon)).ceil() as usize;
    let limit = nf * (model.k() as f64).log2();
    if !((m as f64) < limit) {
        return Err(Error::VacuousCode { m, limit });
    }
    let census = type_census(model)?;
    let threshold_log2prob = -nf * (h + epsilon);
    let mut types = Vec::new();
    let mut offsets = Vec::new();
    let mut total = BigUint::zero();
    let mut typical_mass = 0.0;
    for t in census {
        if TypicalVariant::T1.test(t.log2prob, model.n, h, epsilon) {
            offsets.push(total.clone());
            total += &t.multiplicity;
            typical_mass += t.mass();
            types.push(t);
        }
    }
    if types.is_empty() {
        return Err(Error::Infeasible("typical set is empty".into()));
    }
    if total >= BigUint::one() << m {
        return Err(Error::VacuousCode { m, limit });
    }
    let lookup = types
        .iter()
        .enumerate()
        .map(|(i, t)| (t.counts.clone(), i))
        .collect();
    Ok(BlockCode {
        p: model.p.clone(),
        n: model.n,
        epsilon,
        m,
        threshold_log2prob,
        types,
        offsets,
        lookup,
        typical_mass: typical_mass.min(1.0),
        typical_size: total,
    })
}

impl BlockCode {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Per-sequence log₂-probability above which a sequence is typical.
    pub fn threshold_log2prob(&self) -> f64 {
        self.threshold_log2prob
    }

    pub fn typical_size(&self) -> &BigUint {
        &self.typical_size
    }

    pub fn typical_mass(&self) -> f64 {
        self.typical_mass
    }

    /// Exact decoding error `1 − P(T1)`.
    pub fn exact_error(&self) -> f64 {
        (1.0 - self.typical_mass).max(0.0)
    }

    pub fn fallback(&self) -> Codeword {
        Codeword::from_index(&BigUint::zero(), self.m)
    }

    fn counts_of(&self, x: &[usize]) -> Result<Vec<u32>> {
        if x.len() != self.n {
            return Err(Error::LengthMismatch {
                left: x.len(),
                right: self.n,
            });
        }
        let k = self.p.k();
        let mut counts = vec![0u32; k];
        for &c in x {
            if c >= k {
                return Err(Error::InvalidInput(format!("category {c} out of range")));
            }
            counts[c] += 1;
        }
        Ok(counts)
    }

    pub fn is_typical(&self, x: &[usize]) -> Result<bool> {
        let counts = self.counts_of(x)?;
        Ok(self.lookup.contains_key(&counts))
    }

    pub fn encode(&self, x: &[usize]) -> Result<Codeword> {
        let counts = self.counts_of(x)?;
        let Some(&ti) = self.lookup.get(&counts) else {
            return Ok(self.fallback());
        };
        let t = &self.types[ti];
        let index = &self.offsets[ti] + rank_in_type(x, &counts, &t.multiplicity) + 1u32;
        Ok(Codeword::from_index(&index, self.m))
    }

    pub fn decode(&self, word: &Codeword) -> Result<Vec<usize>> {
        if word.m != self.m {
            return Err(Error::LengthMismatch {
                left: word.m,
                right: self.m,
            });
        }
        let index = word.index();
        let index = if index.is_zero() { index } else { index - 1u32 };
        if index >= self.typical_size {
            return Err(Error::InvalidInput("codeword outside the codebook".into()));
        }
        let ti = match self.offsets.binary_search(&index) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        // Empty types never occur, so equal offsets cannot collide.
        let t = &self.types[ti];
        let rank = index - &self.offsets[ti];
        Ok(unrank_in_type(rank, &t.counts, &t.multiplicity, self.n))
    }
}

/// Lexicographic rank of `x` among sequences with occupation `counts`.
fn rank_in_type(x: &[usize], counts: &[u32], multiplicity: &BigUint) -> BigUint {
    let mut rem = counts.to_vec();
    let mut total = multiplicity.clone();
    let mut rank = BigUint::zero();
    let n = x.len();
    for (t, &sym) in x.iter().enumerate() {
        let len = (n - t) as u32;
        for &r in rem.iter().take(sym) {
            if r > 0 {
                rank += &total * r / len;
            }
        }
        total = &total * rem[sym] / len;
        rem[sym] -= 1;
    }
    rank
}

fn unrank_in_type(mut rank: BigUint, counts: &[u32], multiplicity: &BigUint, n: usize) -> Vec<usize> {
    let mut rem = counts.to_vec();
    let mut total = multiplicity.clone();
    let mut x = Vec::with_capacity(n);
    for t in 0..n {
        let len = (n - t) as u32;
        for (c, r) in rem.iter_mut().enumerate() {
            if *r == 0 {
                continue;
            }
            let block = &total * *r / len;
            if rank < block {
                x.push(c);
                total = block;
                *r -= 1;
                break;
            }
            rank -= block;
        }
    }
    x
}

/// Draws one block from the source.
pub fn sample_sequence<R: rand::Rng + ?Sized>(table: &AliasTable, n: usize, rng: &mut R) -> Vec<usize> {
    (0..n).map(|_| table.draw(rng)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundtripReport {
    pub tested: u64,
    pub failures: u64,
    /// Atypical draws skipped while collecting typical samples.
    pub skipped: u64,
}

/// Draws typical sequences (from substreams `(seed, r)`) until `samples` of
/// them have been checked for `φ(f(x)) = x`.
pub fn roundtrip_check(code: &BlockCode, samples: u64, seed: u64) -> Result<RoundtripReport> {
    let table = AliasTable::new(&code.p);
    let mut report = RoundtripReport {
        tested: 0,
        failures: 0,
        skipped: 0,
    };
    let mut r = 0u64;
    while report.tested < samples {
        let mut rng = substream(seed, r);
        r += 1;
        let x = sample_sequence(&table, code.n, &mut rng);
        if !code.is_typical(&x)? {
            report.skipped += 1;
            if report.skipped > 1000 * samples.max(1) {
                return Err(Error::Infeasible("typical sequences are too rare to sample".into()));
            }
            continue;
        }
        report.tested += 1;
        if code.decode(&code.encode(&x)?)? != x {
            report.failures += 1;
        }
    }
    Ok(report)
}

/// Checks `φ(f(x)) = x` on every typical sequence; `K^n` must not exceed
/// `limit`.
pub fn exhaustive_roundtrip(code: &BlockCode, limit: u128) -> Result<RoundtripReport> {
    let k = code.p.k();
    let total = (k as u128).checked_pow(code.n as u32).unwrap_or(u128::MAX);
    if total > limit {
        return Err(Error::CensusTooLarge { types: total, limit });
    }
    let mut report = RoundtripReport {
        tested: 0,
        failures: 0,
        skipped: 0,
    };
    let mut x = vec![0usize; code.n];
    for _ in 0..total {
        if code.is_typical(&x)? {
            report.tested += 1;
            if code.decode(&code.encode(&x)?)? != x {
                report.failures += 1;
            }
        } else {
            report.skipped += 1;
        }
        for d in x.iter_mut().rev() {
            *d += 1;
            if *d < k {
                break;
            }
            *d = 0;
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodeErrorReport {
    pub replicates: u64,
    pub mc_error: f64,
    pub ci_halfwidth: f64,
    pub exact_error: f64,
    /// `exp(−n ε² / (4 (log₂ K)²))`, `K` padded to at least 5.
    pub bound: f64,
    pub mc_agrees: bool,
    pub exact_within_bound: bool,
    pub mc_within_bound: bool,
}

/// Monte Carlo estimate of `P(φ(f(Xⁿ)) ≠ Xⁿ)` next to the exact value.
pub fn code_error(code: &BlockCode, replicates: u64, seed: u64, workers: usize) -> Result<CodeErrorReport> {
    if replicates < 1 {
        return Err(Error::InvalidInput("replicates must be at least 1".into()));
    }
    let table = AliasTable::new(&code.p);
    let errors = with_workers(workers, || {
        (0..replicates)
            .into_par_iter()
            .map(|r| {
                let mut rng = substream(seed, r);
                let x = sample_sequence(&table, code.n, &mut rng);
                let word = code.encode(&x)?;
                Ok(u64::from(code.decode(&word)? != x))
            })
            .try_reduce(|| 0u64, |a, b| Ok(a + b))
    })??;
    let mc_error = errors as f64 / replicates as f64;
    let ci = ci_halfwidth(mc_error, replicates);
    let exact_error = code.exact_error();
    let l2 = (padded_k(code.p.k()) as f64).log2();
    let bound = (-(code.n as f64) * code.epsilon * code.epsilon / (4.0 * l2 * l2)).exp();
    Ok(CodeErrorReport {
        replicates,
        mc_error,
        ci_halfwidth: ci,
        exact_error,
        bound,
        mc_agrees: (mc_error - exact_error).abs() <= ci,
        exact_within_bound: exact_error <= bound,
        mc_within_bound: mc_error <= bound + ci,
    })
}

/// Solution of `inf { D(Q‖P) : H(Q) ≥ H(P) + ε }`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorExponentResult {
    /// Entropy margin in bits.
    pub epsilon: f64,
    pub feasible: bool,
    pub q_opt: Option<ProbVector>,
    /// `D(Q‖P)` in nats; `+∞` when infeasible.
    pub divergence: f64,
    /// `β` of the optimal `Q_β ∝ p^β`.
    pub tilt: Option<f64>,
    /// `H(P) + ε` in bits.
    pub target_entropy: f64,
}

/// `Q_β ∝ p^β` on the support of `p`.
pub fn tilted(p: &ProbVector, beta: f64) -> Vec<f64> {
    let logs: Vec<f64> = p
        .as_slice()
        .iter()
        .map(|&x| if x > 0.0 { beta * x.ln() } else { f64::NEG_INFINITY })
        .collect();
    let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = logs.iter().map(|&l| (l - top).exp()).collect();
    let z: f64 = w.iter().sum();
    w.into_iter().map(|x| x / z).collect()
}

fn entropy_bits_slice(q: &[f64]) -> f64 {
    -q.iter().filter(|&&x| x > 0.0).map(|&x| x * x.log2()).sum::<f64>()
}

/// `D(Q‖P)` in nats; `+∞` if `Q` charges a category where `P` has none.
pub fn kl_divergence(q: &[f64], p: &[f64]) -> f64 {
    let mut d = 0.0;
    for (&a, &b) in q.iter().zip(p) {
        if a > 0.0 {
            if b == 0.0 {
                return f64::INFINITY;
            }
            d += a * (a / b).ln();
        }
    }
    d.max(0.0)
}

pub fn error_exponent(p: &ProbVector, epsilon: f64) -> Result<ErrorExponentResult> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidInput(format!("epsilon must be positive, got {epsilon}")));
    }
    let h = entropy(p, LogBase::Bits);
    let target = h + epsilon;
    let infeasible = ErrorExponentResult {
        epsilon,
        feasible: false,
        q_opt: None,
        divergence: f64::INFINITY,
        tilt: None,
        target_entropy: target,
    };
    let support_max = (p.support_size() as f64).log2();
    if target > support_max {
        return Ok(infeasible);
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if entropy_bits_slice(&tilted(p, mid)) >= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let beta = lo;
    let q = tilted(p, beta);
    let divergence = kl_divergence(&q, p.as_slice());
    Ok(ErrorExponentResult {
        epsilon,
        feasible: true,
        q_opt: Some(ProbVector::new(q)?),
        divergence,
        tilt: Some(beta),
        target_entropy: target,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalBound {
    pub divergence: f64,
    /// `K log(n + 1) / n`.
    pub penalty: f64,
    pub ln_value: f64,
    /// May exceed 1 or overflow to `+∞`; never clamped.
    pub value: f64,
    pub vacuous: bool,
}

/// `exp(−n [D* − K log(n+1)/n])`, exponent arithmetic in nats.
pub fn classical_error_bound(p: &ProbVector, epsilon: f64, n: u64, k: usize) -> Result<ClassicalBound> {
    if n < 1 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    let ex = error_exponent(p, epsilon)?;
    if !ex.feasible {
        return Err(Error::Infeasible(format!(
            "no distribution reaches entropy {} bits",
            ex.target_entropy
        )));
    }
    let nf = n as f64;
    let penalty = k as f64 * (nf + 1.0).ln() / nf;
    let ln_value = -nf * (ex.divergence - penalty);
    Ok(ClassicalBound {
        divergence: ex.divergence,
        penalty,
        ln_value,
        value: ln_value.exp(),
        vacuous: ln_value >= 0.0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentComparison {
    pub n: u64,
    pub k: usize,
    pub divergence: f64,
    pub classical_ln: f64,
    pub classical: f64,
    pub classical_vacuous: bool,
    /// `exp(−n ε² / (4 (log₂ K)²))` with `K` padded to at least 5.
    pub new_bound: f64,
    pub new_vacuous: bool,
}

/// Classical and uniform error bounds on an `(n, K)` grid; `p` is padded
/// with empty categories up to each `K`.
pub fn compare_exponents(p: &ProbVector, epsilon: f64, ns: &[u64], ks: &[usize]) -> Result<Vec<ExponentComparison>> {
    let mut rows = Vec::with_capacity(ns.len() * ks.len());
    for &k in ks {
        if k < p.k() {
            return Err(Error::InvalidInput(format!(
                "K = {k} is smaller than the source alphabet {}",
                p.k()
            )));
        }
        let pk = p.padded(k);
        let ex = error_exponent(&pk, epsilon)?;
        let l2 = (padded_k(k) as f64).log2();
        for &n in ns {
            let nf = n as f64;
            let classical_ln = if ex.feasible {
                -nf * (ex.divergence - k as f64 * (nf + 1.0).ln() / nf)
            } else {
                f64::NEG_INFINITY
            };
            let new_bound = (-nf * epsilon * epsilon / (4.0 * l2 * l2)).exp();
            rows.push(ExponentComparison {
                n,
                k,
                divergence: ex.divergence,
                classical_ln,
                classical: classical_ln.exp(),
                classical_vacuous: classical_ln >= 0.0,
                new_bound,
                new_vacuous: new_bound >= 1.0,
            });
        }
    }
    Ok(rows)
}

/// Independent check of [`error_exponent`] for `K ≤ 4`: a grid of step
/// `step` over the first `K − 2` coordinates, with the last two coordinates
/// optimized exactly on each slice. Returns the smallest divergence found
/// (`+∞` if no grid point is feasible).
pub fn exponent_grid_oracle(p: &ProbVector, epsilon: f64, step: f64) -> Result<f64> {
    let k = p.k();
    if !(2..=4).contains(&k) {
        return Err(Error::Precondition(format!("grid oracle supports 2 <= K <= 4, got {k}")));
    }
    let target = entropy(p, LogBase::Bits) + epsilon;
    // D and H are symmetric, so reorder: the exactly solved slice runs over
    // the largest and smallest probabilities, where H moves fastest along it.
    let mut ps = p.as_slice().to_vec();
    ps.sort_by(|a, b| b.total_cmp(a));
    ps.rotate_left(1);
    let ps = ps.as_slice();
    let steps = (1.0 / step).round() as usize;
    let mut best = f64::INFINITY;
    let mut prefix = vec![0usize; k - 2];
    loop {
        let used: usize = prefix.iter().sum();
        if used <= steps {
            let fixed: Vec<f64> = prefix.iter().map(|&i| i as f64 * step).collect();
            let s = (1.0 - fixed.iter().sum::<f64>()).max(0.0);
            best = best.min(slice_min(&fixed, s, ps, target));
        }
        // Odometer over the prefix grid.
        let mut i = 0;
        loop {
            if i == prefix.len() {
                return Ok(best);
            }
            prefix[i] += 1;
            if prefix[i] <= steps {
                break;
            }
            prefix[i] = 0;
            i += 1;
        }
    }
}

/// Minimum of `D` over `(fixed, t, s − t)` subject to `H ≥ target`.
fn slice_min(fixed: &[f64], s: f64, p: &[f64], target: f64) -> f64 {
    let k = p.len();
    let (pa, pb) = (p[k - 2], p[k - 1]);
    let mut d_fixed = 0.0;
    let mut h_fixed = 0.0;
    for (&q, &pp) in fixed.iter().zip(p) {
        if q > 0.0 {
            if pp == 0.0 {
                return f64::INFINITY;
            }
            d_fixed += q * (q / pp).ln();
            h_fixed -= q * q.log2();
        }
    }
    let term_h = |x: f64| if x > 0.0 { -x * x.log2() } else { 0.0 };
    let h = |t: f64| h_fixed + term_h(t) + term_h(s - t);
    let term_d = |x: f64, pp: f64| {
        if x <= 0.0 {
            0.0
        } else if pp == 0.0 {
            f64::INFINITY
        } else {
            x * (x / pp).ln()
        }
    };
    let d = |t: f64| d_fixed + term_d(t, pa) + term_d(s - t, pb);
    if s <= 0.0 {
        return if h(0.0) >= target { d(0.0) } else { f64::INFINITY };
    }
    let mid = 0.5 * s;
    if h(mid) < target {
        return f64::INFINITY;
    }
    // Unconstrained minimizer of the convex slice divergence.
    let t_star = if pa + pb > 0.0 { s * pa / (pa + pb) } else { mid };
    if h(t_star) >= target {
        return d(t_star);
    }
    // H is concave with its peak at s/2: the constrained optimum is where H
    // crosses the target between t* and s/2.
    let (mut bad, mut good) = (t_star, mid);
    for _ in 0..100 {
        let m = 0.5 * (bad + good);
        if h(m) >= target {
            good = m;
        } else {
            bad = m;
        }
        if (good - bad).abs() < 1e-15 {
            break;
        }
    }
    d(good)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pv(p: &[f64]) -> ProbVector {
        ProbVector::new(p.to_vec()).unwrap()
    }

    fn model(p: &[f64], n: usize) -> SourceModel {
        SourceModel::new(pv(p), n).unwrap()
    }

    #[test]
    fn seq_log2prob_examples() {
        let u = ProbVector::uniform(4).unwrap();
        assert_eq!(seq_log2prob(&[0, 3, 2], &u), -6.0);
        assert_eq!(seq_log2prob(&[0, 1, 2], &pv(&[0.5, 0.25, 0.25])), -5.0);
        assert_eq!(seq_log2prob(&[0, 2], &pv(&[0.5, 0.5, 0.0])), f64::NEG_INFINITY);
    }

    #[test]
    fn typicality_examples() {
        let u = ProbVector::uniform(3).unwrap();
        assert!(is_typical(&[0, 1, 1, 2], &u, 1e-9, TypicalVariant::Both).unwrap());
        let p = pv(&[0.5, 0.25, 0.25]);
        assert!(is_typical(&[0, 0, 0], &p, 0.01, TypicalVariant::T1).unwrap());
        assert!(!is_typical(&[0, 0, 0], &p, 0.5, TypicalVariant::T2).unwrap());
        assert!(is_typical(&[0, 0, 0], &p, 0.51, TypicalVariant::T2).unwrap());
    }

    #[test]
    fn census_examples() {
        let c = type_census(&model(&[0.5, 0.5], 4)).unwrap();
        let mults: Vec<u32> = c.iter().map(|t| t.multiplicity.to_u32().unwrap()).collect();
        assert_eq!(mults, vec![1, 4, 6, 4, 1]);
        let m = model(&[0.4, 0.3, 0.1, 0.1, 0.1], 16);
        let c = type_census(&m).unwrap();
        assert_eq!(c.len(), 4845);
        let total: BigUint = c.iter().map(|t| &t.multiplicity).sum();
        assert_eq!(total, BigUint::from(5u32).pow(16));
        let mass: f64 = c.iter().map(TypeClass::mass).sum();
        assert!((mass - 1.0).abs() < 1e-9);
        assert!(matches!(
            type_census(&model(&[0.5, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0], 200)),
            Err(Error::CensusTooLarge { .. })
        ));
    }

    #[test]
    fn census_csv_shape() {
        let c = type_census(&model(&[0.5, 0.5], 2)).unwrap();
        let csv = census_csv(&c, 2);
        assert_eq!(csv, "c1,c2,log2prob,multiplicity\n0,2,-2,1\n1,1,-2,2\n2,0,-2,1\n");
    }

    #[test]
    fn typical_stats_examples() {
        let s = typical_set_stats(&model(&[0.25; 4], 6), 0.1, TypicalVariant::Both).unwrap();
        assert!((s.log2_size - 12.0).abs() < 1e-12);
        assert!((s.prob_mass - 1.0).abs() < 1e-12);

        let m = model(&[0.5, 0.25, 0.25], 16);
        let s = typical_set_stats(&m, 0.5, TypicalVariant::T1).unwrap();
        assert!(s.counting_bound_holds);
        let bound = (-16.0 * 0.25 / (4.0 * 5f64.log2().powi(2))).exp();
        assert!(s.complement_mass <= bound);

        let s = typical_set_stats(&model(&[0.5, 0.5, 0.0], 5), 100.0, TypicalVariant::T1).unwrap();
        assert_eq!(s.size, BigUint::from(32u32));
        assert!((s.prob_mass - 1.0).abs() < 1e-12);
    }

    #[test]
    fn essential_bit_content_examples() {
        let e = essential_bit_content(&model(&[0.5, 0.5], 4), 0.2).unwrap();
        assert_eq!(e.set_size, BigUint::from(13u32));
        assert!((e.h_delta - 3.700_439_718_141_092).abs() < 1e-12);
        let e = essential_bit_content(&model(&[0.3, 0.7], 6), 1e-9).unwrap();
        assert_eq!(e.set_size, BigUint::from(64u32));
        let e = essential_bit_content(&model(&[0.0, 1.0, 0.0], 7), 0.3).unwrap();
        assert_eq!(e.set_size, BigUint::one());
        assert_eq!(e.h_delta, 0.0);
    }

    #[test]
    fn essential_bit_content_is_minimal_and_monotone() {
        let m = model(&[0.6, 0.25, 0.15], 9);
        let mut prev = f64::INFINITY;
        for delta in [0.01, 0.05, 0.1, 0.3, 0.5, 0.8, 0.95] {
            let e = essential_bit_content(&m, delta).unwrap();
            assert!(e.mass >= 1.0 - delta - MASS_SLACK);
            assert!(e.mass_without_last < 1.0 - delta);
            assert!(e.h_delta <= prev);
            prev = e.h_delta;
        }
    }

    #[test]
    fn threshold_examples() {
        let (up, low) = source_coding_thresholds(5, 0.5, 1.0).unwrap();
        assert!((up - 14.947_996_423_430_414).abs() < 1e-10);
        assert!((low - 119.583_971_387_443_31).abs() < 1e-9);
        let (up, _) = source_coding_thresholds(5, 1.0 - 1e-12, 1.0).unwrap();
        assert!(up > 0.0 && up < 1e-9);
        assert_eq!(
            source_coding_thresholds(2, 0.5, 1.0).unwrap(),
            source_coding_thresholds(5, 0.5, 1.0).unwrap()
        );
    }

    #[test]
    fn source_coding_examples() {
        let u = ProbVector::uniform(5).unwrap();
        let r = verify_source_coding(&u, 0.3, 0.5, 2..6).unwrap();
        assert!(r.rows.iter().all(|row| row.rate <= 5f64.log2() + 1e-12));
        assert!(r.claims_hold());
        let r = verify_source_coding(&pv(&[0.4, 0.3, 0.1, 0.1, 0.1]), 0.9, 1.5, 2..12).unwrap();
        assert!(r.claims_hold());
    }

    #[test]
    fn block_code_gate() {
        assert!(matches!(
            build_block_code(&model(&[0.2; 5], 6), 0.1),
            Err(Error::VacuousCode { .. })
        ));
        let m = model(&[0.4, 0.3, 0.1, 0.1, 0.1], 20);
        assert!((m.entropy_bits() - 2.046_439_344_671_015_6).abs() < 1e-12);
        match build_block_code(&m, 0.4) {
            Err(Error::VacuousCode { m, .. }) => assert_eq!(m, 49),
            other => panic!("expected a vacuous code, got {other:?}"),
        }
    }

    #[test]
    fn small_code_roundtrips_exhaustively() {
        let m = model(&[0.7, 0.2, 0.1], 8);
        let code = build_block_code(&m, 0.2).unwrap();
        let r = exhaustive_roundtrip(&code, 1_000_000).unwrap();
        assert_eq!(r.failures, 0);
        assert_eq!(BigUint::from(r.tested), *code.typical_size());
        let word = code.encode(&[0; 8]).unwrap();
        assert_eq!(word.m, code.m());
        assert_eq!(code.decode(&code.fallback()).unwrap().len(), 8);
    }

    #[test]
    fn codeword_bits_are_msb_first() {
        let w = Codeword::from_index(&BigUint::from(5u32), 11);
        assert_eq!(w.to_bit_string(), "00000000101");
        assert_eq!(w.index(), BigUint::from(5u32));
    }

    #[test]
    fn code_error_matches_exact() {
        let m = model(&[0.7, 0.1, 0.1, 0.05, 0.05], 20);
        let code = build_block_code(&m, 0.3).unwrap();
        assert_eq!(code.m(), 36);
        let r = code_error(&code, 20_000, 4, 2).unwrap();
        assert!(r.mc_agrees, "{r:?}");
        assert!(r.exact_within_bound);
        assert!((r.bound - 0.919_921_412_343_637_4).abs() < 1e-12);
        let degenerate = build_block_code(&model(&[1.0, 0.0, 0.0], 10), 0.5).unwrap();
        assert_eq!(code_error(&degenerate, 500, 1, 1).unwrap().mc_error, 0.0);
    }

    #[test]
    fn exponent_examples() {
        let u = ProbVector::uniform(3).unwrap();
        let r = error_exponent(&u, 0.1).unwrap();
        assert!(!r.feasible && r.divergence == f64::INFINITY);
        let r = error_exponent(&pv(&[1.0, 0.0]), 0.5).unwrap();
        assert_eq!(r.divergence, f64::INFINITY);

        let p = pv(&[0.7, 0.3]);
        assert!((entropy(&p, LogBase::Bits) - 0.881_290_899_230_692_7).abs() < 1e-13);
        let r = error_exponent(&p, 0.05).unwrap();
        let q = r.q_opt.clone().unwrap();
        assert!((entropy(&q, LogBase::Bits) - (0.881_290_899_230_692_7 + 0.05)).abs() < 1e-9);
        let grid = (1..10_000)
            .map(|i| i as f64 * 1e-4)
            .filter(|&t| entropy_bits_slice(&[t, 1.0 - t]) >= r.target_entropy)
            .map(|t| kl_divergence(&[t, 1.0 - t], p.as_slice()))
            .fold(f64::INFINITY, f64::min);
        assert!((grid - r.divergence).abs() < 1e-4);
        assert!(r.divergence <= grid + 1e-12);
    }

    #[test]
    fn classical_bound_examples() {
        let p = pv(&[0.7, 0.3]).padded(5);
        let b = classical_error_bound(&p, 0.05, 100, 5).unwrap();
        assert!((b.penalty - 0.230_756_025_842_062_98).abs() < 1e-12);
        assert!(b.vacuous && b.value > 1.0);
        assert!(matches!(
            classical_error_bound(&ProbVector::uniform(4).unwrap(), 0.1, 10, 4),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn comparison_examples() {
        let p = pv(&[0.6, 0.25, 0.1, 0.05]);
        let rows = compare_exponents(&p, 0.5, &[256], &[256]).unwrap();
        assert!(rows[0].classical_vacuous);
        assert!((rows[0].new_bound - 0.778_800_783_071_404_9).abs() < 1e-12);
        let rows = compare_exponents(&p, 1e-9, &[100], &[4]).unwrap();
        assert!((rows[0].new_bound - 1.0).abs() < 1e-12);
    }

    #[test]
    fn grid_oracle_sees_infeasibility() {
        let p = pv(&[0.5, 0.3, 0.2]);
        assert_eq!(exponent_grid_oracle(&p, 0.2, 1e-3).unwrap(), f64::INFINITY);
        assert!(!error_exponent(&p, 0.2).unwrap().feasible);
    }

    #[test]
    fn grid_oracle_agrees() {
        let p = pv(&[0.5, 0.3, 0.2]);
        for eps in [0.02, 0.05, 0.09] {
            let exact = error_exponent(&p, eps).unwrap().divergence;
            let grid = exponent_grid_oracle(&p, eps, 1e-3).unwrap();
            assert!((grid - exact).abs() < 1e-4, "eps {eps}: {grid} vs {exact}");
            assert!(exact <= grid + 1e-12);
        }
    }
}
