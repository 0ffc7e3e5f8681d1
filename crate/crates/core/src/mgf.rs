//! Moment generating function of the centered log-likelihood and the two
//! simplex maximizations behind the uniform MGF bound.
//!
//! Both maximizations (`Σ p (log p)²` and `F(λ, ·)`) are separable, so the
//! brute-force oracle combines multistart projected gradient ascent with a
//! sweep over two-level points (m coordinates at `a`, the rest at `b`).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{bstar, bstar_branches, MIN_UNIFORM_K};
use crate::error::{Error, Result};
use crate::rng::substream;
use crate::simplex::{random_simplex, ProbVector};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MgfPoint {
    pub lambda: f64,
    pub value: f64,
}

/// `p^{λ+1}` with `0^{λ+1} = 0` for `λ > −1`.
#[inline]
fn pow_lambda1(p: f64, lambda: f64) -> f64 {
    if p == 0.0 {
        0.0
    } else {
        ((lambda + 1.0) * p.ln()).exp()
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda > -1.0) || !lambda.is_finite() {
        return Err(Error::Domain(format!("lambda must exceed -1, got {lambda}")));
    }
    Ok(())
}

/// `E[exp(λY)] = (Σ_k p_k^{λ+1}) · exp(−λ Σ_k p_k log p_k)`.
pub fn mgf_exact(lambda: f64, p: &ProbVector) -> Result<MgfPoint> {
    check_lambda(lambda)?;
    if lambda == 0.0 {
        return Ok(MgfPoint { lambda, value: 1.0 });
    }
    let s: f64 = p.as_slice().iter().map(|&x| pow_lambda1(x, lambda)).sum();
    let value = (s.ln() - lambda * p.negentropy()).exp();
    Ok(MgfPoint { lambda, value })
}

/// `F(λ, p) = Σ_k p_k^{λ+1} − 1 − λ Σ_k p_k log p_k`, an upper bound on the
/// log-MGF.
pub fn f_objective(lambda: f64, p: &ProbVector) -> Result<f64> {
    check_lambda(lambda)?;
    let s: f64 = p.as_slice().iter().map(|&x| pow_lambda1(x, lambda)).sum();
    Ok(s - 1.0 - lambda * p.negentropy())
}

/// `exp(−λ log K) − 1 + λ log K`, the maximum of `F(λ, ·)` over the simplex.
pub fn f_closed_form(lambda: f64, k: usize) -> f64 {
    let lk = (k as f64).ln();
    (-lambda * lk).exp_m1() + lambda * lk
}

/// Smallest `λ` for which the maximum of `F(λ, ·)` sits at the uniform point:
/// `(2 − 2/K − log K) / ((1 − 1/K) log K)`.
pub fn f_lemma_threshold(k: usize) -> f64 {
    -bstar_branches(k).1
}

/// Admissible tilts for the uniform MGF bound: `λ ≥ lower` and `λ > −1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaDomain {
    /// `−1/b*(K)`.
    pub lower: f64,
    pub upper: f64,
}

impl LambdaDomain {
    pub fn contains(&self, lambda: f64) -> bool {
        lambda >= self.lower && lambda > -1.0 && lambda <= self.upper
    }
}

pub fn lambda_domain(k: usize) -> Result<LambdaDomain> {
    Ok(LambdaDomain {
        lower: -1.0 / bstar(k)?,
        upper: f64::INFINITY,
    })
}

/// `exp(λ² (log K)²)`, valid on [`lambda_domain`].
pub fn mgf_upper(lambda: f64, k: usize) -> Result<f64> {
    let domain = lambda_domain(k)?;
    if !domain.contains(lambda) {
        return Err(Error::Domain(format!(
            "lambda {lambda} below the admissible limit {} for K = {k}",
            domain.lower
        )));
    }
    let lk = (k as f64).ln();
    Ok((lambda * lambda * lk * lk).exp())
}

/// Outcome of checking `M_Y(λ, p) ≤ exp(λ² (log K)²)` and the chain
/// `log M_Y ≤ F(λ, p) ≤ exp(−λ log K) − 1 + λ log K` over many points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominationReport {
    pub k: usize,
    pub checked: u64,
    /// Cases with `M_Y > mgf_upper · (1 + 1e-12)`.
    pub violations: u64,
    /// Largest `log M_Y − log mgf_upper` seen.
    pub max_log_ratio: f64,
    /// Cases where either link of the chain fails by more than
    /// `1e-12 · max(|rhs|, 1)`.
    pub chain_violations: u64,
}

/// Checks the uniform MGF bound for every `(p, λ)` pair. Every `λ` must lie in
/// [`lambda_domain`]`(K)`.
pub fn domination_sweep(k: usize, dists: &[ProbVector], lambdas: &[f64]) -> Result<DominationReport> {
    let lk = (k as f64).ln();
    let uppers = lambdas
        .iter()
        .map(|&l| mgf_upper(l, k))
        .collect::<Result<Vec<f64>>>()?;
    let mut report = DominationReport {
        k,
        checked: 0,
        violations: 0,
        max_log_ratio: f64::NEG_INFINITY,
        chain_violations: 0,
    };
    for p in dists {
        if p.k() != k {
            return Err(Error::LengthMismatch {
                left: p.k(),
                right: k,
            });
        }
        for (&lambda, &upper) in lambdas.iter().zip(&uppers) {
            let m = mgf_exact(lambda, p)?.value;
            report.checked += 1;
            if m > upper * (1.0 + 1e-12) {
                report.violations += 1;
            }
            report.max_log_ratio = report.max_log_ratio.max(m.ln() - lambda * lambda * lk * lk);
            let f = f_objective(lambda, p)?;
            let closed = f_closed_form(lambda, k);
            // Absolute slack near zero, where ln M and F lose all relative
            // precision to cancellation.
            let le = |a: f64, b: f64| a <= b + 1e-12 * b.abs().max(1.0);
            if !le(m.ln(), f) || !le(f, closed) {
                report.chain_violations += 1;
            }
        }
    }
    Ok(report)
}

/// Which maximization a trace describes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Objective {
    /// `Σ_k p_k (log p_k)²`.
    Variance,
    /// `F(λ, p)`.
    FAtLambda(f64),
    /// The scalar function `g(λ)` whose nonnegativity places the maximum of
    /// `F` at the uniform point.
    AppendixG,
}

impl Objective {
    pub fn as_str(&self) -> &'static str {
        match self {
            Objective::Variance => "variance",
            Objective::FAtLambda(_) => "F-at-lambda",
            Objective::AppendixG => "appendix-g",
        }
    }

    /// Per-coordinate term `φ(p)`; the objective is `Σ φ(p_k) + offset`.
    #[inline]
    fn phi(&self, p: f64) -> f64 {
        match *self {
            Objective::Variance => {
                if p == 0.0 {
                    0.0
                } else {
                    let l = p.ln();
                    p * l * l
                }
            }
            Objective::FAtLambda(lambda) => {
                if p == 0.0 {
                    0.0
                } else {
                    pow_lambda1(p, lambda) - lambda * p * p.ln()
                }
            }
            Objective::AppendixG => unreachable!("g is not a simplex objective"),
        }
    }

    #[inline]
    fn dphi(&self, p: f64) -> f64 {
        let p = p.max(GRADIENT_FLOOR);
        let l = p.ln();
        match *self {
            Objective::Variance => l * l + 2.0 * l,
            Objective::FAtLambda(lambda) => (lambda + 1.0) * (lambda * l).exp() - lambda * (l + 1.0),
            Objective::AppendixG => unreachable!("g is not a simplex objective"),
        }
    }

    fn offset(&self) -> f64 {
        match self {
            Objective::FAtLambda(_) => -1.0,
            _ => 0.0,
        }
    }

    fn value(&self, p: &[f64]) -> f64 {
        p.iter().map(|&x| self.phi(x)).sum::<f64>() + self.offset()
    }
}

const GRADIENT_FLOOR: f64 = 1e-12;

/// Budget and tolerances of the brute-force simplex search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub starts: usize,
    pub max_iter: usize,
    /// Stop once the projected-gradient step per unit step size drops below
    /// this value.
    pub grad_tol: f64,
    /// Grid resolution of the two-level sweep before golden-section refinement.
    pub sweep_grid: usize,
    pub seed: u64,
    /// Largest `K` accepted by the dense search.
    pub max_k: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            starts: 50,
            max_iter: 20_000,
            grad_tol: 1e-10,
            sweep_grid: 512,
            seed: 0x5eed,
            max_k: 64,
        }
    }
}

/// A scalar stationary point of the per-coordinate Lagrangian term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StationaryPoint {
    pub p: f64,
    pub second_derivative: f64,
    pub in_unit_interval: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationTrace {
    pub objective: Objective,
    pub k: usize,
    /// Lagrange multiplier `ν` of the sum constraint (when one is used).
    pub multiplier: Option<f64>,
    pub stationary_points: Vec<StationaryPoint>,
    /// Where the second derivative of the scalar term changes sign.
    pub inflection: Option<f64>,
    pub maximizer: Vec<f64>,
    /// Closed-form maximum when the lemma covers `K`, otherwise the numeric
    /// maximum.
    pub max_value: f64,
    pub oracle_value: f64,
    pub gap: f64,
    pub lemma_applies: bool,
}

/// Euclidean projection onto the probability simplex (sort-based).
pub fn project_to_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (j, &uj) in u.iter().enumerate() {
        cumulative += uj;
        let t = (cumulative - 1.0) / (j + 1) as f64;
        if uj - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

fn ascend(objective: &Objective, start: Vec<f64>, cfg: &SearchConfig) -> (f64, Vec<f64>) {
    let mut p = start;
    let mut f = objective.value(&p);
    let mut step = 1e-2;
    let mut grad = vec![0.0; p.len()];
    let mut trial = vec![0.0; p.len()];
    for _ in 0..cfg.max_iter {
        for (g, &x) in grad.iter_mut().zip(&p) {
            *g = objective.dphi(x);
        }
        loop {
            for ((t, &x), &g) in trial.iter_mut().zip(&p).zip(&grad) {
                *t = x + step * g;
            }
            let cand = project_to_simplex(&trial);
            let fc = objective.value(&cand);
            if fc > f {
                let moved = cand
                    .iter()
                    .zip(&p)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                p = cand;
                f = fc;
                let converged = moved / step < cfg.grad_tol;
                step = (step * 2.0).min(1e3);
                if converged {
                    return (f, p);
                }
                break;
            }
            step *= 0.5;
            if step < 1e-18 {
                return (f, p);
            }
        }
    }
    (f, p)
}

fn golden_max(h: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let mut f1 = h(x1);
    let mut f2 = h(x2);
    for _ in 0..200 {
        if hi - lo < 1e-15 {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = h(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = h(x1);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Best two-level point: `m` coordinates equal to `a`, `K − m` equal to
/// `(1 − m a)/(K − m)`.
fn two_level_sweep(objective: &Objective, k: usize, grid: usize) -> (f64, Vec<f64>) {
    let kf = k as f64;
    let mut best_value = objective.value(&vec![1.0 / kf; k]);
    let mut best = vec![1.0 / kf; k];
    for m in 1..k {
        let mf = m as f64;
        let rest = kf - mf;
        let h = |a: f64| {
            let b = ((1.0 - mf * a) / rest).max(0.0);
            mf * objective.phi(a) + rest * objective.phi(b) + objective.offset()
        };
        let hi = 1.0 / mf;
        let mut best_i = 0;
        let mut best_h = f64::NEG_INFINITY;
        for i in 0..=grid {
            let a = hi * i as f64 / grid as f64;
            let v = h(a);
            if v > best_h {
                best_h = v;
                best_i = i;
            }
        }
        let lo_a = hi * best_i.saturating_sub(1) as f64 / grid as f64;
        let hi_a = hi * (best_i + 1).min(grid) as f64 / grid as f64;
        let (a, v) = golden_max(h, lo_a, hi_a);
        let (a, v) = if v >= best_h {
            (a, v)
        } else {
            (hi * best_i as f64 / grid as f64, best_h)
        };
        if v > best_value {
            best_value = v;
            let b = ((1.0 - mf * a) / rest).max(0.0);
            best = (0..k).map(|i| if i < m { a } else { b }).collect();
        }
    }
    (best_value, best)
}

/// Multistart ascent plus the two-level sweep; the largest value wins, ties
/// going to the lowest start index (the sweep counts as the last start).
fn simplex_oracle(objective: Objective, k: usize, cfg: &SearchConfig) -> (f64, Vec<f64>) {
    let mut runs: Vec<(f64, Vec<f64>)> = (0..cfg.starts)
        .into_par_iter()
        .map(|s| {
            let mut rng = substream(cfg.seed, s as u64);
            let start = random_simplex(k, &mut rng).as_slice().to_vec();
            ascend(&objective, start, cfg)
        })
        .collect();
    runs.push(two_level_sweep(&objective, k, cfg.sweep_grid));
    let mut best = runs.swap_remove(0);
    for run in runs {
        if run.0 > best.0 {
            best = run;
        }
    }
    best
}

/// Numerical maximum of `Σ p_k (log p_k)²` over the simplex. For `K ≥ 5` the
/// closed form `(log K)²` is attached; below that only the numeric optimum is
/// reported.
pub fn variance_max_oracle(k: usize, cfg: &SearchConfig) -> Result<OptimizationTrace> {
    if k < 2 || k > cfg.max_k {
        return Err(Error::Precondition(format!(
            "variance oracle needs 2 <= K <= {}, got {k}",
            cfg.max_k
        )));
    }
    let (oracle_value, maximizer) = simplex_oracle(Objective::Variance, k, cfg);
    let lemma_applies = k >= MIN_UNIFORM_K;
    let lk = (k as f64).ln();
    let max_value = if lemma_applies { lk * lk } else { oracle_value };
    Ok(OptimizationTrace {
        objective: Objective::Variance,
        k,
        multiplier: None,
        stationary_points: Vec::new(),
        inflection: None,
        maximizer,
        max_value,
        oracle_value,
        gap: (max_value - oracle_value).abs(),
        lemma_applies,
    })
}

/// Numerical maximum of `F(λ, ·)` compared with its closed form.
pub fn f_max_oracle(lambda: f64, k: usize, cfg: &SearchConfig) -> Result<OptimizationTrace> {
    check_lambda(lambda)?;
    if k < MIN_UNIFORM_K || k > cfg.max_k {
        return Err(Error::Precondition(format!(
            "F oracle needs 5 <= K <= {}, got {k}",
            cfg.max_k
        )));
    }
    let threshold = f_lemma_threshold(k);
    if lambda < threshold {
        return Err(Error::Precondition(format!(
            "lambda {lambda} below the threshold {threshold} where the maximum is claimed"
        )));
    }
    let objective = Objective::FAtLambda(lambda);
    let (oracle_value, maximizer) = simplex_oracle(objective, k, cfg);
    let max_value = f_closed_form(lambda, k);
    Ok(OptimizationTrace {
        objective,
        k,
        multiplier: None,
        stationary_points: Vec::new(),
        inflection: None,
        maximizer,
        max_value,
        oracle_value,
        gap: (max_value - oracle_value).abs(),
        lemma_applies: true,
    })
}

/// Largest value of a scalar function on `[0, 1]`: endpoints, the supplied
/// interior candidates, and a dense grid.
fn scalar_max(h: impl Fn(f64) -> f64, candidates: &[f64]) -> (f64, f64) {
    let mut best = (0.0, h(0.0));
    let mut consider = |x: f64| {
        if (0.0..=1.0).contains(&x) {
            let v = h(x);
            if v > best.1 {
                best = (x, v);
            }
        }
    };
    consider(1.0);
    for &c in candidates {
        consider(c);
    }
    const GRID: usize = 100_000;
    for i in 1..GRID {
        consider(i as f64 / GRID as f64);
    }
    best
}

/// Sign-change point of `f''` for the `F` Lagrangian:
/// `(1/(λ+1))^{1/λ}`, tending to `e^{−1}` as `λ → 0`.
pub fn f_inflection(lambda: f64) -> f64 {
    if lambda.abs() < 1e-12 {
        return (-1.0f64).exp();
    }
    (-(lambda.ln_1p()) / lambda).exp()
}

/// Multiplier, scalar stationary points and dual value of the Lagrangian
/// relaxation used to prove each maximization. `oracle_value` is the dual
/// value `Σ_k max_p h(p) − (constant)` found by scalar search.
pub fn lagrangian_stationary(k: usize, objective: Objective) -> Result<OptimizationTrace> {
    if k < 2 {
        return Err(Error::InvalidInput("K must be at least 2".into()));
    }
    let kf = k as f64;
    let lk = kf.ln();
    let inv_k = 1.0 / kf;
    match objective {
        Objective::Variance => {
            let nu = -lk * lk + 2.0 * lk;
            let h = |p: f64| {
                if p == 0.0 {
                    0.0
                } else {
                    let l = p.ln();
                    p * l * l + nu * p
                }
            };
            let h2 = |p: f64| 2.0 * (p.ln() + 1.0) / p;
            let points: Vec<StationaryPoint> = [inv_k, (lk - 2.0).exp()]
                .into_iter()
                .map(|p| StationaryPoint {
                    p,
                    second_derivative: h2(p),
                    in_unit_interval: (0.0..=1.0).contains(&p),
                })
                .collect();
            let candidates: Vec<f64> = points.iter().map(|s| s.p).collect();
            let (argmax, hmax) = scalar_max(h, &candidates);
            let dual = kf * hmax - nu;
            let lemma_applies = k >= MIN_UNIFORM_K;
            let max_value = lk * lk;
            Ok(OptimizationTrace {
                objective,
                k,
                multiplier: Some(nu),
                stationary_points: points,
                inflection: Some((-1.0f64).exp()),
                maximizer: vec![argmax; k],
                max_value,
                oracle_value: dual,
                gap: (max_value - dual).abs(),
                lemma_applies,
            })
        }
        Objective::FAtLambda(lambda) => {
            check_lambda(lambda)?;
            let nu = -(lambda + 1.0) * (-lambda * lk).exp() + lambda * (1.0 - lk);
            let f = |p: f64| {
                if p == 0.0 {
                    0.0
                } else {
                    pow_lambda1(p, lambda) - lambda * p * p.ln() + nu * p
                }
            };
            let f2 = |p: f64| lambda / p * ((lambda + 1.0) * (lambda * p.ln()).exp() - 1.0);
            let inflection = f_inflection(lambda);
            let points = vec![StationaryPoint {
                p: inv_k,
                second_derivative: f2(inv_k),
                in_unit_interval: true,
            }];
            let (argmax, fmax) = scalar_max(f, &[inv_k]);
            let dual = kf * fmax - 1.0 - nu;
            let lemma_applies = k >= MIN_UNIFORM_K && lambda >= f_lemma_threshold(k);
            let max_value = f_closed_form(lambda, k);
            Ok(OptimizationTrace {
                objective,
                k,
                multiplier: Some(nu),
                stationary_points: points,
                inflection: Some(inflection),
                maximizer: vec![argmax; k],
                max_value,
                oracle_value: dual,
                gap: (max_value - dual).abs(),
                lemma_applies,
            })
        }
        Objective::AppendixG => Err(Error::InvalidInput(
            "the appendix function has no Lagrangian; use appendix_g_check".into(),
        )),
    }
}

/// `g(λ) = (λ − λ/K + 1) e^{−λ log K} + λ (1/K + log K − 1) − 1`.
pub fn appendix_g(lambda: f64, k: usize) -> f64 {
    let kf = k as f64;
    let lk = kf.ln();
    (lambda - lambda / kf + 1.0) * (-lambda * lk).exp() + lambda * (1.0 / kf + lk - 1.0) - 1.0
}

/// Analytic `g''(λ) = −L e^{−λL} [2(1 − 1/K) − (λ(1 − 1/K) + 1) L]`, `L = log K`.
pub fn appendix_g_second(lambda: f64, k: usize) -> f64 {
    let kf = k as f64;
    let lk = kf.ln();
    let c = 1.0 - 1.0 / kf;
    -lk * (-lambda * lk).exp() * (2.0 * c - (lambda * c + 1.0) * lk)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AppendixReport {
    pub k: usize,
    pub threshold: f64,
    pub grid_points: usize,
    pub grid_min: f64,
    pub grid_argmin: f64,
    pub g_at_zero: f64,
    /// Five-point central difference of `g` at 0.
    pub dg_at_zero: f64,
    pub d2g_below: f64,
    pub d2g_above: f64,
    /// Finite-difference `g''` at the threshold.
    pub d2g_at_threshold: f64,
    pub nonnegative: bool,
    pub flat_at_zero: bool,
    pub sign_flip: bool,
}

impl AppendixReport {
    pub fn passed(&self) -> bool {
        self.nonnegative && self.flat_at_zero && self.sign_flip
    }
}

/// Checks the scalar facts that place the maximum of `F` at the uniform
/// point: `g ≥ 0` above the threshold, `g(0) = g'(0) = 0`, and the sign change
/// of `g''` at the threshold.
pub fn appendix_g_check(k: usize, grid_points: usize, upper: f64) -> Result<AppendixReport> {
    if k < MIN_UNIFORM_K {
        return Err(Error::Precondition(format!("appendix check needs K >= 5, got {k}")));
    }
    if grid_points < 2 {
        return Err(Error::InvalidInput("grid needs at least 2 points".into()));
    }
    let threshold = f_lemma_threshold(k);
    let grid = crate::special::linspace(threshold, upper, grid_points);
    let (grid_argmin, grid_min) = grid
        .iter()
        .map(|&l| (l, appendix_g(l, k)))
        .fold((f64::NAN, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });

    let g_at_zero = appendix_g(0.0, k);
    let h = 1e-4;
    let g = |l: f64| appendix_g(l, k);
    let dg_at_zero = (g(-2.0 * h) - 8.0 * g(-h) + 8.0 * g(h) - g(2.0 * h)) / (12.0 * h);

    let offset = 1e-3 * threshold.abs().max(1e-3);
    let d2g_below = appendix_g_second(threshold - offset, k);
    let d2g_above = appendix_g_second(threshold + offset, k);
    let hh = 1e-4;
    let d2g_at_threshold = (g(threshold + hh) - 2.0 * g(threshold) + g(threshold - hh)) / (hh * hh);

    Ok(AppendixReport {
        k,
        threshold,
        grid_points,
        grid_min,
        grid_argmin,
        g_at_zero,
        dg_at_zero,
        d2g_below,
        d2g_above,
        d2g_at_threshold,
        nonnegative: grid_min >= -1e-12,
        flat_at_zero: g_at_zero == 0.0 && dg_at_zero.abs() <= 1e-9,
        sign_flip: d2g_below < 0.0 && d2g_above > 0.0,
    })
}

/// `max_{p ∈ [0,1]} p (log p)²`, attained at `e^{−2}`.
pub fn plogsq_scalar_max() -> (f64, f64) {
    let x = (-2.0f64).exp();
    (x, 4.0 * x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pv(p: &[f64]) -> ProbVector {
        ProbVector::new(p.to_vec()).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn mgf_examples() {
        for k in [2usize, 5, 13] {
            let u = ProbVector::uniform(k).unwrap();
            for lambda in [-0.9, -0.2, 0.5, 3.0] {
                assert!(close(mgf_exact(lambda, &u).unwrap().value, 1.0, 1e-13));
            }
        }
        assert_eq!(mgf_exact(0.0, &pv(&[0.3, 0.7])).unwrap().value, 1.0);
        let p = pv(&[0.75, 0.25]);
        assert!(close(mgf_exact(1.0, &p).unwrap().value, 1.096_728_344_127_077, 1e-13));
        assert!(matches!(mgf_exact(-1.0, &p), Err(Error::Domain(_))));
    }

    #[test]
    fn f_examples() {
        let u = ProbVector::uniform(7).unwrap();
        for lambda in [-0.5, 0.3, 2.0] {
            assert!(close(f_objective(lambda, &u).unwrap(), f_closed_form(lambda, 7), 1e-13));
        }
        assert_eq!(f_objective(0.0, &pv(&[0.1, 0.9])).unwrap(), 0.0);
        assert!(close(f_objective(1.0, &pv(&[0.75, 0.25])).unwrap(), 0.187_335_144_618_808_4, 1e-13));
        assert!(f_objective(-1.5, &u).is_err());
    }

    #[test]
    fn domain_examples() {
        assert!(close(lambda_domain(20).unwrap().lower, -0.333_808_200_695_334_1, 1e-13));
        assert!(close(lambda_domain(5).unwrap().lower, -0.007_330_130_880_776_379, 1e-13));
        for k in 5..300 {
            assert!(lambda_domain(k).unwrap().lower > -1.0);
        }
    }

    #[test]
    fn upper_examples() {
        assert_eq!(mgf_upper(0.0, 5).unwrap(), 1.0);
        assert!(close(mgf_upper(1.0, 5).unwrap(), 13.333_643_050_722_57, 1e-10));
        assert!(close(mgf_upper(-0.005, 5).unwrap(), 1.000_064_759_356_646, 1e-13));
        assert!(matches!(mgf_upper(-0.01, 5), Err(Error::Domain(_))));
    }

    #[test]
    fn closed_form_examples() {
        assert!(close(f_closed_form(1.0, 5), 0.809_437_912_434_100_4, 1e-13));
        assert!(close(f_closed_form(-0.005, 5), 3.246_565_725_988_172e-5, 1e-17));
        assert_eq!(f_closed_form(0.0, 9), 0.0);
    }

    #[test]
    fn projection_lands_on_simplex() {
        let p = project_to_simplex(&[0.9, -0.3, 0.8, 0.1]);
        assert!(close(p.iter().sum::<f64>(), 1.0, 1e-14));
        assert!(p.iter().all(|&x| x >= 0.0));
        let q = project_to_simplex(&[0.2, 0.3, 0.5]);
        assert!(q.iter().zip([0.2, 0.3, 0.5]).all(|(a, b)| close(*a, b, 1e-15)));
    }

    #[test]
    fn variance_oracle_small_cases() {
        let cfg = SearchConfig::default();
        let t = variance_max_oracle(5, &cfg).unwrap();
        assert!(t.lemma_applies);
        assert!(t.gap <= 1e-6, "{t:?}");
        assert!(close(t.max_value, 2.590_290_393_980_234_6, 1e-12));
        assert!(t.maximizer.iter().all(|&x| close(x, 0.2, 1e-4)));

        let t = variance_max_oracle(16, &cfg).unwrap();
        assert!(close(t.oracle_value, 7.687_248_222_691_223, 1e-6));

        let t = variance_max_oracle(2, &cfg).unwrap();
        assert!(!t.lemma_applies);
        assert!(t.max_value > 2f64.ln().powi(2) + 1e-3);
        assert_eq!(t.gap, 0.0);
    }

    #[test]
    fn f_oracle_cases() {
        let cfg = SearchConfig::default();
        let t = f_max_oracle(0.0, 5, &cfg).unwrap();
        assert!(close(t.oracle_value, 0.0, 1e-12));
        let t = f_max_oracle(1.0, 5, &cfg).unwrap();
        assert!(t.gap <= 1e-6, "{t:?}");
        let t = f_max_oracle(-0.005, 5, &cfg).unwrap();
        assert!(t.gap <= 1e-6, "{t:?}");
        assert!(matches!(f_max_oracle(-0.02, 5, &cfg), Err(Error::Precondition(_))));
    }

    #[test]
    fn variance_lagrangian() {
        let t = lagrangian_stationary(5, Objective::Variance).unwrap();
        assert!(close(t.multiplier.unwrap(), 0.628_585_430_887_965_8, 1e-13));
        let pts = &t.stationary_points;
        assert!(close(pts[0].p, 0.2, 1e-15));
        assert!(close(pts[1].p, 0.676_676_416_183_063_5, 1e-13));
        assert!(pts[0].second_derivative < 0.0);
        assert!(pts[1].second_derivative > 0.0);
        assert!(t.gap < 1e-12, "{t:?}");
        for k in 3..40 {
            let t = lagrangian_stationary(k, Objective::Variance).unwrap();
            assert!(t.stationary_points[0].second_derivative < 0.0);
            assert!(t.stationary_points[1].second_derivative > 0.0);
            if k >= 5 {
                assert!(t.gap < 1e-10, "K = {k}: {t:?}");
            }
        }
    }

    #[test]
    fn f_lagrangian() {
        for lambda in [-1e-6, 1e-6] {
            let t = lagrangian_stationary(5, Objective::FAtLambda(lambda)).unwrap();
            assert!(close(t.inflection.unwrap(), (-1.0f64).exp(), 1e-6));
        }
        for k in [5usize, 16, 64] {
            for lambda in [f_lemma_threshold(k) * 0.99, 0.1, 1.0, 2.0] {
                let t = lagrangian_stationary(k, Objective::FAtLambda(lambda)).unwrap();
                assert!(t.lemma_applies);
                assert!(t.gap < 1e-10, "K = {k}, lambda = {lambda}: {t:?}");
            }
        }
    }

    #[test]
    fn appendix_examples() {
        assert_eq!(appendix_g(0.0, 5), 0.0);
        assert!(close(appendix_g(1.0, 5), 0.169_437_912_434_100_4, 1e-13));
        let t = f_lemma_threshold(5);
        assert!(close(t, -0.007_330_130_880_776_379, 1e-13));
        assert!(appendix_g_second(t, 5).abs() < 1e-12);
        let r = appendix_g_check(5, 2000, 10.0).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!(r.d2g_at_threshold.abs() < 1e-6);
    }

    #[test]
    fn plogsq_examples() {
        let (x, v) = plogsq_scalar_max();
        assert!(close(x, 0.135_335_283_236_612_7, 1e-15));
        assert!(close(v, 0.541_341_132_946_450_9, 1e-15));
        let h = |p: f64| if p == 0.0 { 0.0 } else { p * p.ln().powi(2) };
        let (gx, gv) = (0..=1_000_000)
            .map(|i| i as f64 * 1e-6)
            .map(|p| (p, h(p)))
            .fold((0.0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
        assert!(close(gx, x, 1e-6) && close(gv, v, 1e-6));
        assert_eq!(h(0.0), 0.0);
        assert_eq!(h(1.0), 0.0);
    }

    #[test]
    fn sweep_on_uniform_and_vertex() {
        let dists = vec![ProbVector::uniform(6).unwrap(), pv(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0])];
        let r = domination_sweep(6, &dists, &[lambda_domain(6).unwrap().lower, 0.5, 2.0]).unwrap();
        assert_eq!(r.checked, 6);
        assert_eq!(r.violations, 0);
        assert_eq!(r.chain_violations, 0);
        assert!(domination_sweep(6, &dists, &[-0.9]).is_err());
    }

    #[test]
    fn boundary_continuity() {
        for lambda in [-0.5, 0.3, 1.5] {
            let at_zero = mgf_exact(lambda, &pv(&[0.0, 0.4, 0.6])).unwrap().value;
            let mut prev_err = f64::INFINITY;
            for eps in [1e-3, 1e-6, 1e-9] {
                let v = mgf_exact(lambda, &pv(&[eps, 0.4, 0.6 - eps])).unwrap().value;
                let err = (v - at_zero).abs();
                assert!(err < prev_err);
                prev_err = err;
            }
            assert!(prev_err < 1e-3);
        }
    }
}
