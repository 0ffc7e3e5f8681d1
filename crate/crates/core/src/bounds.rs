//! Closed-form tail bounds for the mean centered log-likelihood, together
//! with the baselines they are compared against.
//!
//! Every bound is assembled as a log-probability and exponentiated last.
//! Values above one are returned as they are: a vacuous bound is still
//! informative in a comparison table.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simplex::{LogBase, ParamSet};

/// Smallest alphabet for which the uniform bounds are stated; smaller
/// alphabets are padded with empty categories.
pub const MIN_UNIFORM_K: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
    TwoSided,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
            Side::TwoSided => "two-sided",
        }
    }
}

/// Sub-Gaussian (quadratic exponent) or sub-exponential (linear exponent)
/// branch of a bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    Quadratic,
    Linear,
    NotApplicable,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Quadratic => "quadratic",
            Regime::Linear => "linear",
            Regime::NotApplicable => "not-applicable",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BoundFamily {
    Main,
    RightUniform,
    LeftUniform,
    FixedRight,
    FixedLeft,
    ChebyshevFixed,
    ChebyshevUniform,
    ChebyshevRough,
    Zhao2020,
    BernsteinK2,
    BitRight,
    BitLeft,
}

impl BoundFamily {
    pub const ALL: [BoundFamily; 12] = [
        BoundFamily::Main,
        BoundFamily::RightUniform,
        BoundFamily::LeftUniform,
        BoundFamily::FixedRight,
        BoundFamily::FixedLeft,
        BoundFamily::ChebyshevFixed,
        BoundFamily::ChebyshevUniform,
        BoundFamily::ChebyshevRough,
        BoundFamily::Zhao2020,
        BoundFamily::BernsteinK2,
        BoundFamily::BitRight,
        BoundFamily::BitLeft,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BoundFamily::Main => "main",
            BoundFamily::RightUniform => "right-uniform",
            BoundFamily::LeftUniform => "left-uniform",
            BoundFamily::FixedRight => "fixed-right",
            BoundFamily::FixedLeft => "fixed-left",
            BoundFamily::ChebyshevFixed => "chebyshev-fixed",
            BoundFamily::ChebyshevUniform => "chebyshev-uniform",
            BoundFamily::ChebyshevRough => "chebyshev-rough",
            BoundFamily::Zhao2020 => "zhao2020",
            BoundFamily::BernsteinK2 => "bernstein-k2",
            BoundFamily::BitRight => "bit-right",
            BoundFamily::BitLeft => "bit-left",
        }
    }

    pub fn side(self) -> Side {
        match self {
            BoundFamily::RightUniform | BoundFamily::FixedRight | BoundFamily::BitRight => {
                Side::Right
            }
            BoundFamily::LeftUniform | BoundFamily::FixedLeft | BoundFamily::BitLeft => Side::Left,
            _ => Side::TwoSided,
        }
    }
}

impl std::str::FromStr for BoundFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BoundFamily::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown bound family '{s}'")))
    }
}

/// An `(n, K, ε, side, base)` tail question.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailQuery {
    pub n: u64,
    pub k: usize,
    pub epsilon: f64,
    pub side: Side,
    pub base: LogBase,
}

impl TailQuery {
    pub fn new(n: u64, k: usize, epsilon: f64, side: Side, base: LogBase) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidInput("n must be at least 1".into()));
        }
        if k < 2 {
            return Err(Error::InvalidInput("K must be at least 2".into()));
        }
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(Error::InvalidInput(format!("epsilon must be positive, got {epsilon}")));
        }
        Ok(TailQuery {
            n,
            k,
            epsilon,
            side,
            base,
        })
    }

    /// Two-sided query in nats.
    pub fn natural(n: u64, k: usize, epsilon: f64) -> Result<Self> {
        TailQuery::new(n, k, epsilon, Side::TwoSided, LogBase::Natural)
    }

    pub fn epsilon_nats(&self) -> f64 {
        self.base.to_nats(self.epsilon)
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k = k;
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }
}

/// Value of one bound family at one query.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub family: BoundFamily,
    pub side: Side,
    pub value: f64,
    pub regime: Regime,
    /// Whether the query meets the bound's stated preconditions.
    pub valid: bool,
    /// Alphabet size the formula was evaluated with (after padding).
    pub k_used: usize,
    /// `max |log p_ik|` of the fixed-parameter left tail.
    pub b_fixed: Option<f64>,
    /// Uniform left-tail scale `b*`.
    pub b_star: Option<f64>,
    pub note: Option<String>,
}

impl BoundReport {
    fn new(family: BoundFamily, value: f64, regime: Regime, valid: bool, k_used: usize) -> Self {
        BoundReport {
            family,
            side: family.side(),
            value,
            regime,
            valid,
            k_used,
            b_fixed: None,
            b_star: None,
            note: None,
        }
    }

    fn not_applicable(family: BoundFamily, k_used: usize, reason: impl Into<String>) -> Self {
        BoundReport {
            note: Some(reason.into()),
            ..BoundReport::new(family, f64::NAN, Regime::NotApplicable, false, k_used)
        }
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn is_applicable(&self) -> bool {
        self.regime != Regime::NotApplicable
    }
}

pub fn padded_k(k: usize) -> usize {
    k.max(MIN_UNIFORM_K)
}

/// The two candidates whose minimum defines `1/b*`:
/// `1/log K` and `(log K + 2/K − 2) / ((1 − 1/K) log K)`.
pub fn bstar_branches(k: usize) -> (f64, f64) {
    let kf = k as f64;
    let lk = kf.ln();
    (1.0 / lk, (lk + 2.0 / kf - 2.0) / ((1.0 - 1.0 / kf) * lk))
}

/// Uniform left-tail scale `b*(K)`, defined for `K ≥ 5`.
pub fn bstar(k: usize) -> Result<f64> {
    if k < MIN_UNIFORM_K {
        return Err(Error::Precondition(format!("b* requires K >= 5, got {k}")));
    }
    let (a, b) = bstar_branches(k);
    Ok(1.0 / a.min(b))
}

/// Crossover `2 (log K)² / b*` between the quadratic and linear left-tail
/// branches, with `K` padded to at least 5.
pub fn quadratic_threshold(k: usize) -> f64 {
    let k = padded_k(k);
    let lk = (k as f64).ln();
    2.0 * lk * lk / bstar(k).expect("padded K")
}

/// `−n ε² / (4 (log K)²)`.
fn quadratic_exponent(n: u64, k: usize, eps_nats: f64) -> f64 {
    let lk = (k as f64).ln();
    -(n as f64) * eps_nats * eps_nats / (4.0 * lk * lk)
}

/// Two-sided bound `2 exp(−n ε² / (4 max{log K, log 5}²))`. Flagged valid
/// only in the quadratic regime of the left tail.
pub fn main_bound(q: &TailQuery) -> BoundReport {
    let k = padded_k(q.k);
    let eps = q.epsilon_nats();
    let threshold = quadratic_threshold(k);
    let quadratic = eps <= threshold;
    let value = (std::f64::consts::LN_2 + quadratic_exponent(q.n, k, eps)).exp();
    let mut report = BoundReport::new(
        BoundFamily::Main,
        value,
        if quadratic { Regime::Quadratic } else { Regime::Linear },
        quadratic,
        k,
    );
    report.b_star = Some(bstar(k).expect("padded K"));
    if !quadratic {
        report.note = Some(format!("epsilon above quadratic threshold {threshold}"));
    }
    report
}

/// Right tail `exp(−n ε² / (4 (log K)²))`, valid for every `ε > 0`.
pub fn right_tail_uniform(q: &TailQuery) -> BoundReport {
    let k = padded_k(q.k);
    let value = quadratic_exponent(q.n, k, q.epsilon_nats()).exp();
    BoundReport::new(BoundFamily::RightUniform, value, Regime::Quadratic, true, k)
}

/// Left tail: quadratic exponent up to `2 (log K)² / b*`, then
/// `exp(−n ε / (2 b*))`.
pub fn left_tail_uniform(q: &TailQuery) -> BoundReport {
    let k = padded_k(q.k);
    let b_star = bstar(k).expect("padded K");
    let eps = q.epsilon_nats();
    let (ln_value, regime) = if eps <= quadratic_threshold(k) {
        (quadratic_exponent(q.n, k, eps), Regime::Quadratic)
    } else {
        (-(q.n as f64) * eps / (2.0 * b_star), Regime::Linear)
    };
    let mut report = BoundReport::new(BoundFamily::LeftUniform, ln_value.exp(), regime, true, k);
    report.b_star = Some(b_star);
    report
}

/// Right tail for known parameters:
/// `exp(−n² ε² / (4 Σ_i Σ_k p_ik (log p_ik)²))`.
pub fn fixed_right_tail(params: &ParamSet, epsilon: f64) -> BoundReport {
    let s = params.total_second_log_moment();
    let n = params.n() as f64;
    if s == 0.0 {
        return BoundReport::new(BoundFamily::FixedRight, 0.0, Regime::Quadratic, true, params.k())
            .with_note("all members degenerate: exact tail probability is 0");
    }
    let value = (-(n * n) * epsilon * epsilon / (4.0 * s)).exp();
    BoundReport::new(BoundFamily::FixedRight, value, Regime::Quadratic, true, params.k())
}

/// Left tail for known interior parameters with `b = max |log p_ik|`.
pub fn fixed_left_tail(params: &ParamSet, epsilon: f64) -> Result<BoundReport> {
    if !params.all_interior() {
        return Err(Error::BoundaryParameter(
            "fixed left-tail bound needs every p_ik > 0 (b is unbounded otherwise)".into(),
        ));
    }
    let b = params
        .members()
        .iter()
        .flat_map(|p| p.as_slice().iter())
        .map(|&p| p.ln().abs())
        .fold(0.0, f64::max);
    let s = params.total_second_log_moment();
    let n = params.n() as f64;
    let threshold = 2.0 * s / (n * b);
    let (ln_value, regime) = if epsilon <= threshold {
        (-(n * n) * epsilon * epsilon / (4.0 * s), Regime::Quadratic)
    } else {
        (-n * epsilon / (2.0 * b), Regime::Linear)
    };
    let mut report = BoundReport::new(BoundFamily::FixedLeft, ln_value.exp(), regime, true, params.k());
    report.b_fixed = Some(b);
    Ok(report)
}

/// Chebyshev bounds: the parameter-specific variance form (when parameters
/// are supplied), the uniform `(log K)² / (n ε²)` form, and the rough
/// `4K / (n ε² e²)` estimate.
pub fn chebyshev_bounds(q: &TailQuery, params: Option<&ParamSet>) -> Vec<BoundReport> {
    let eps = q.epsilon_nats();
    let n = q.n as f64;
    let mut rows = Vec::with_capacity(3);
    match params {
        Some(params) => {
            let total_var: f64 = params
                .members()
                .iter()
                .map(crate::simplex::loglik_variance)
                .sum();
            let pn = params.n() as f64;
            rows.push(BoundReport::new(
                BoundFamily::ChebyshevFixed,
                total_var / (pn * pn * eps * eps),
                Regime::Quadratic,
                true,
                params.k(),
            ));
        }
        None => rows.push(BoundReport::not_applicable(
            BoundFamily::ChebyshevFixed,
            q.k,
            "requires explicit parameters",
        )),
    }
    let k = padded_k(q.k);
    let lk = (k as f64).ln();
    rows.push(BoundReport::new(
        BoundFamily::ChebyshevUniform,
        lk * lk / (n * eps * eps),
        Regime::Quadratic,
        true,
        k,
    ));
    let e2 = std::f64::consts::E * std::f64::consts::E;
    rows.push(BoundReport::new(
        BoundFamily::ChebyshevRough,
        4.0 * q.k as f64 / (n * eps * eps * e2),
        Regime::Quadratic,
        true,
        q.k,
    ));
    rows
}

/// Earlier uniform Bernstein-type baseline `2K exp(−n ε² / (2K (K + ε)))`.
pub fn zhao2020_bound(q: &TailQuery) -> BoundReport {
    let k = q.k as f64;
    let eps = q.epsilon_nats();
    let ln_value = (2.0 * k).ln() - q.n as f64 * eps * eps / (2.0 * k * (k + eps));
    BoundReport::new(BoundFamily::Zhao2020, ln_value.exp(), Regime::Quadratic, true, q.k)
}

/// Bernstein bound for binary variables with bounded logits
/// `|log(p_i1 / (1 − p_i1))| ≤ M`.
pub fn bernstein_k2_bound(params: &ParamSet, epsilon: f64) -> Result<BoundReport> {
    if params.k() != 2 {
        return Err(Error::InvalidInput(format!(
            "Bernstein baseline is for K = 2, got K = {}",
            params.k()
        )));
    }
    let mut m: f64 = 0.0;
    let mut total_var = 0.0;
    for p in params.members() {
        let p1 = p.get(0);
        if p1 <= 0.0 || p1 >= 1.0 {
            return Err(Error::BoundaryParameter(format!(
                "p_i1 = {p1} makes the logit bound M infinite"
            )));
        }
        let logit = (p1 / (1.0 - p1)).ln();
        m = m.max(logit.abs());
        total_var += p1 * (1.0 - p1) * logit * logit;
    }
    let mut report =
        BoundReport::new(BoundFamily::BernsteinK2, 0.0, Regime::Quadratic, true, 2);
    report.b_fixed = Some(m);
    if m == 0.0 {
        return Ok(report.with_note("all logits are zero: exact tail probability is 0"));
    }
    let n = params.n() as f64;
    let ln_value =
        std::f64::consts::LN_2 - (n * n * epsilon * epsilon / 2.0) / (total_var + m * n * epsilon / 3.0);
    report.value = ln_value.exp();
    Ok(report)
}

/// Both one-sided bounds restated for log base 2: `exp(−n ε² / (4 (log₂ K)²))`
/// with `ε` in bits. The left side is valid only in the quadratic regime.
pub fn bit_bounds(q: &TailQuery) -> Vec<BoundReport> {
    let k = padded_k(q.k);
    let eps_bits = match q.base {
        LogBase::Bits => q.epsilon,
        LogBase::Natural => LogBase::Bits.from_nats(q.epsilon),
    };
    let l2 = (k as f64).log2();
    let value = (-(q.n as f64) * eps_bits * eps_bits / (4.0 * l2 * l2)).exp();
    let right = BoundReport::new(BoundFamily::BitRight, value, Regime::Quadratic, true, k);
    let quadratic = LogBase::Bits.to_nats(eps_bits) <= quadratic_threshold(k);
    let mut left = BoundReport::new(
        BoundFamily::BitLeft,
        value,
        if quadratic { Regime::Quadratic } else { Regime::Linear },
        quadratic,
        k,
    );
    left.b_star = Some(bstar(k).expect("padded K"));
    vec![right, left]
}

/// One row per bound family; families that do not apply to the query carry
/// [`Regime::NotApplicable`] and a reason.
pub fn compare_bounds(q: &TailQuery, params: Option<&ParamSet>) -> Vec<BoundReport> {
    let eps = q.epsilon_nats();
    let mut rows = vec![main_bound(q), right_tail_uniform(q), left_tail_uniform(q)];

    let params = match params {
        Some(p) if p.n() as u64 != q.n || p.k() != q.k => {
            let reason = format!(
                "parameter set has n = {}, K = {}; query has n = {}, K = {}",
                p.n(),
                p.k(),
                q.n,
                q.k
            );
            rows.push(BoundReport::not_applicable(BoundFamily::FixedRight, q.k, reason.clone()));
            rows.push(BoundReport::not_applicable(BoundFamily::FixedLeft, q.k, reason));
            None
        }
        Some(p) => {
            rows.push(fixed_right_tail(p, eps));
            rows.push(fixed_left_tail(p, eps).unwrap_or_else(|e| {
                BoundReport::not_applicable(BoundFamily::FixedLeft, q.k, e.to_string())
            }));
            Some(p)
        }
        None => {
            rows.push(BoundReport::not_applicable(
                BoundFamily::FixedRight,
                q.k,
                "requires explicit parameters",
            ));
            rows.push(BoundReport::not_applicable(
                BoundFamily::FixedLeft,
                q.k,
                "requires explicit parameters",
            ));
            None
        }
    };

    rows.extend(chebyshev_bounds(q, params));
    rows.push(zhao2020_bound(q));

    rows.push(match params {
        Some(p) if p.k() == 2 => bernstein_k2_bound(p, eps).unwrap_or_else(|e| {
            BoundReport::not_applicable(BoundFamily::BernsteinK2, 2, e.to_string())
        }),
        Some(_) => BoundReport::not_applicable(BoundFamily::BernsteinK2, q.k, "requires K = 2"),
        None => BoundReport::not_applicable(
            BoundFamily::BernsteinK2,
            q.k,
            "requires explicit interior K = 2 parameters",
        ),
    });

    if q.base == LogBase::Bits {
        rows.extend(bit_bounds(q));
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplex::ProbVector;

    fn q(n: u64, k: usize, eps: f64) -> TailQuery {
        TailQuery::natural(n, k, eps).unwrap()
    }

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(f64::MIN_POSITIVE)
    }

    fn repeated(p: &[f64], n: usize) -> ParamSet {
        ParamSet::repeated(ProbVector::new(p.to_vec()).unwrap(), n).unwrap()
    }

    #[test]
    fn family_names_roundtrip() {
        for f in BoundFamily::ALL {
            assert_eq!(f.as_str().parse::<BoundFamily>().unwrap(), f);
        }
        assert!("nope".parse::<BoundFamily>().is_err());
    }

    #[test]
    fn query_validation() {
        assert!(TailQuery::natural(0, 5, 0.1).is_err());
        assert!(TailQuery::natural(10, 1, 0.1).is_err());
        assert!(TailQuery::natural(10, 5, 0.0).is_err());
    }

    #[test]
    fn main_bound_examples() {
        // Reference values: independent mpmath evaluation of the closed form.
        let r = main_bound(&q(100, 5, 0.5));
        assert!(close(r.value, 0.179_118_138_343_929_38, 1e-12));
        assert!(!r.valid);
        assert_eq!(main_bound(&q(100, 2, 0.5)).value, r.value);
        assert_eq!(main_bound(&q(100, 2, 0.5)).k_used, 5);
        assert!((main_bound(&q(100, 7, 1e-9)).value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn right_tail_examples() {
        assert!(close(right_tail_uniform(&q(1000, 8, 0.3)).value, 0.005_497_716_512_423_237, 1e-12));
        assert!(close(
            right_tail_uniform(&q(100, 5, 0.5)).value,
            main_bound(&q(100, 5, 0.5)).value / 2.0,
            1e-14
        ));
        assert!((right_tail_uniform(&q(10, 9, 1e-12)).value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bstar_examples() {
        assert!(close(bstar(20).unwrap(), 20f64.ln(), 1e-14));
        let (a, b) = bstar_branches(20);
        assert!(a < b);
        assert!(close(bstar(5).unwrap(), 136.423_212_117_882_94, 1e-10));
        let (a, b) = bstar_branches(5);
        assert!(b < a);
        for k in [1000usize, 10_000, 1_000_000] {
            assert!(close(bstar(k).unwrap(), (k as f64).ln(), 1e-14));
        }
        assert!(bstar(4).is_err());
    }

    #[test]
    fn left_tail_examples() {
        assert!(close(quadratic_threshold(5), 0.037_974_335_214_185_86, 1e-10));
        let quad = left_tail_uniform(&q(10_000, 5, 0.02));
        assert_eq!(quad.regime, Regime::Quadratic);
        assert!(close(quad.value, 0.679_731_711_276_837_5, 1e-12));
        let lin = left_tail_uniform(&q(10_000, 5, 0.1));
        assert_eq!(lin.regime, Regime::Linear);
        assert!(close(lin.value, 0.025_602_495_791_627_605, 1e-12));
    }

    #[test]
    fn left_tail_branches_meet_at_threshold() {
        for k in [5usize, 6, 8, 20, 100, 5000] {
            for n in [1u64, 10, 1000] {
                let t = quadratic_threshold(k);
                let b = bstar(k).unwrap();
                let lk = (k as f64).ln();
                let quad = -(n as f64) * t * t / (4.0 * lk * lk);
                let lin = -(n as f64) * t / (2.0 * b);
                assert!((quad - lin).abs() <= 1e-12 * quad.abs().max(1.0));
                let at = left_tail_uniform(&q(n, k, t)).value;
                let above = left_tail_uniform(&q(n, k, t * (1.0 + 1e-15))).value;
                assert!((at - above).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn fixed_right_examples() {
        let uniform = ParamSet::repeated(ProbVector::uniform(6).unwrap(), 40).unwrap();
        let a = fixed_right_tail(&uniform, 0.3).value;
        let b = right_tail_uniform(&q(40, 6, 0.3)).value;
        assert!(close(a, b, 1e-12));

        let r = fixed_right_tail(&repeated(&[0.75, 0.25], 1), 0.5);
        assert!(close(r.value, 0.891_185_811_229_481, 1e-12));

        let degenerate = repeated(&[0.0, 1.0, 0.0], 5);
        assert_eq!(fixed_right_tail(&degenerate, 0.1).value, 0.0);
    }

    #[test]
    fn fixed_left_examples() {
        let r = fixed_left_tail(&repeated(&[0.75, 0.25], 10), 0.1).unwrap();
        assert!(close(r.b_fixed.unwrap(), 4f64.ln(), 1e-15));
        assert!(matches!(
            fixed_left_tail(&repeated(&[0.5, 0.5, 0.0], 3), 0.1),
            Err(Error::BoundaryParameter(_))
        ));
        let k = 7usize;
        let lk = (k as f64).ln();
        let uniform = ParamSet::repeated(ProbVector::uniform(k).unwrap(), 50).unwrap();
        let r = fixed_left_tail(&uniform, 2.0 * lk * 0.999).unwrap();
        assert_eq!(r.regime, Regime::Quadratic);
        assert!(close(r.b_fixed.unwrap(), lk, 1e-14));
        let eps = 2.0 * lk * 0.999;
        assert!(close(r.value, (-50.0 * eps * eps / (4.0 * lk * lk)).exp(), 1e-12));
        assert_eq!(fixed_left_tail(&uniform, 2.0 * lk * 1.001).unwrap().regime, Regime::Linear);
    }

    #[test]
    fn chebyshev_examples() {
        let rows = chebyshev_bounds(&q(100, 5, 0.5), None);
        assert!(!rows[0].is_applicable());
        assert!(close(rows[1].value, 0.103_611_615_759_209_4, 1e-12));
        assert!(close(rows[2].value, 0.108_268_226_589_290_15, 1e-12));
        let degenerate = repeated(&[1.0, 0.0, 0.0, 0.0, 0.0], 100);
        let rows = chebyshev_bounds(&q(100, 5, 0.5), Some(&degenerate));
        assert_eq!(rows[0].value, 0.0);
    }

    #[test]
    fn zhao_examples() {
        assert!(close(zhao2020_bound(&q(100, 5, 0.5)).value, 6.347_364_189_402_818_5, 1e-12));
        assert!(close(zhao2020_bound(&q(1000, 2, 0.5)).value, 5.555_177_545_985_608e-11, 1e-10));
        assert!((zhao2020_bound(&q(10, 6, 1e-12)).value - 12.0).abs() < 1e-9);
    }

    #[test]
    fn bernstein_examples() {
        let r = bernstein_k2_bound(&repeated(&[0.5, 0.5], 10), 0.2).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.b_fixed, Some(0.0));

        let params = repeated(&[0.75, 0.25], 100);
        let r = bernstein_k2_bound(&params, 0.2).unwrap();
        let m = 3f64.ln();
        assert!(close(r.b_fixed.unwrap(), m, 1e-15));
        let var = 0.75 * 0.25 * m * m;
        assert!(close(var, 0.226_302_930_152_359_1, 1e-14));
        let expected = 2.0 * (-(1e4 * 0.04 / 2.0) / (100.0 * var + m * 100.0 * 0.2 / 3.0)).exp();
        assert!(close(r.value, expected, 1e-12));

        assert!(matches!(
            bernstein_k2_bound(&repeated(&[1.0, 0.0], 4), 0.2),
            Err(Error::BoundaryParameter(_))
        ));
    }

    #[test]
    fn bit_examples() {
        let qb = TailQuery::new(100, 5, 0.5 / std::f64::consts::LN_2, Side::Right, LogBase::Bits).unwrap();
        let rows = bit_bounds(&qb);
        assert!(close(rows[0].value, right_tail_uniform(&q(100, 5, 0.5)).value, 1e-12));
        let qb = TailQuery::new(400, 8, 0.25, Side::Right, LogBase::Bits).unwrap();
        assert!(close(bit_bounds(&qb)[0].value, 0.499_351_788_599_276_2, 1e-12));
        let qb = TailQuery::new(3, 8, 1e-12, Side::Right, LogBase::Bits).unwrap();
        assert!((bit_bounds(&qb)[0].value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn comparison_table() {
        let rows = compare_bounds(&q(100, 5, 0.5), None);
        let get = |f: BoundFamily| rows.iter().find(|r| r.family == f).unwrap().clone();
        assert!(get(BoundFamily::Main).value < 1.0);
        assert!(get(BoundFamily::Zhao2020).value > 1.0);
        assert!(!get(BoundFamily::FixedRight).is_applicable());

        let rows = compare_bounds(&q(10, 2, 0.5), None);
        let bern = rows.iter().find(|r| r.family == BoundFamily::BernsteinK2).unwrap();
        assert_eq!(bern.regime, Regime::NotApplicable);
        assert!(bern.note.is_some());

        let params = repeated(&[0.75, 0.25], 10);
        let rows = compare_bounds(&q(10, 2, 0.5), Some(&params));
        for f in [BoundFamily::FixedRight, BoundFamily::FixedLeft, BoundFamily::ChebyshevFixed, BoundFamily::BernsteinK2] {
            assert!(rows.iter().find(|r| r.family == f).unwrap().is_applicable(), "{f:?}");
        }
    }

    #[test]
    fn bounds_are_monotone_on_grids() {
        let params = repeated(&[0.6, 0.2, 0.1, 0.05, 0.05], 1);
        for k in [2usize, 5, 8, 40] {
            let mut prev_n: Option<Vec<f64>> = None;
            for n in [1u64, 5, 20, 100, 1000] {
                let eps_grid: Vec<f64> = (1..60).map(|i| i as f64 * 0.05).collect();
                let mut prev_eps: Option<(Vec<f64>, Vec<Regime>)> = None;
                let mut col = Vec::new();
                for &eps in &eps_grid {
                    let qq = q(n, k, eps);
                    let rows: Vec<BoundReport> = [
                        main_bound(&qq),
                        right_tail_uniform(&qq),
                        left_tail_uniform(&qq),
                        zhao2020_bound(&qq),
                    ]
                    .into_iter()
                    .chain(chebyshev_bounds(&qq, None).into_iter().skip(1))
                    .collect();
                    let vals: Vec<f64> = rows.iter().map(|r| r.value).collect();
                    let regimes: Vec<Regime> = rows.iter().map(|r| r.regime).collect();
                    if let Some((pv, pr)) = &prev_eps {
                        for i in 0..vals.len() {
                            if pr[i] == regimes[i] {
                                assert!(vals[i] <= pv[i] * (1.0 + 1e-12));
                            }
                        }
                    }
                    col.push(vals.clone());
                    prev_eps = Some((vals, regimes));
                }
                let flat: Vec<f64> = col.concat();
                if let Some(prev) = &prev_n {
                    for (a, b) in flat.iter().zip(prev) {
                        assert!(a <= &(b * (1.0 + 1e-12)));
                    }
                }
                prev_n = Some(flat);
            }
        }
        let _ = params;
    }

    #[test]
    fn main_is_twice_the_one_sided_bound() {
        for k in [2usize, 3, 5, 9, 64] {
            let qq = q(5000, k, quadratic_threshold(k) * 0.5);
            let main = main_bound(&qq);
            assert!(main.valid);
            let right = right_tail_uniform(&qq.with_k(padded_k(k)));
            assert!(close(main.value, 2.0 * right.value, 1e-14));
        }
    }

    #[test]
    fn bit_and_natural_bases_agree() {
        for k in [5usize, 8, 33] {
            for eps_bits in [0.01, 0.2, 1.0, 3.0] {
                let qb = TailQuery::new(250, k, eps_bits, Side::Right, LogBase::Bits).unwrap();
                let qn = q(250, k, eps_bits * std::f64::consts::LN_2);
                assert!((bit_bounds(&qb)[0].value - right_tail_uniform(&qn).value).abs() < 1e-12);
            }
        }
    }
}
