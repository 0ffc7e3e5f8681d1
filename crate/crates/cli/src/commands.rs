//! One function per subcommand. Each fills in its defaults on the argument
//! set, so the manifest echoes the values actually used.

use entconc::bounds::{bstar, compare_bounds, padded_k, BoundReport, Side, TailQuery};
use entconc::coding::{
    build_block_code, census_csv, code_error, compare_exponents, error_exponent, essential_bit_content,
    source_coding_thresholds, type_census, typical_set_stats, SourceModel, TypicalVariant,
};
use entconc::mgf::{
    appendix_g_check, domination_sweep, f_max_oracle, lagrangian_stationary, lambda_domain,
    variance_max_oracle, Objective, SearchConfig,
};
use entconc::montecarlo::{
    counterexample_exact_tail, estimate_tail, generate_params, grouped_mgf_check, misspecified_tail,
    ExperimentConfig, GroupedParamSet, ParamGenerator, SimSettings, TailEstimate,
};
use entconc::rng::{substream, with_workers};
use entconc::simplex::{boundary_heavy, random_simplex};
use entconc::special::linspace;
use entconc::{LogBase, ParamSet, ProbVector};

use crate::config::{BaseArg, RunArgs};
use crate::output::{CurvePoint, Row};
use crate::CliError;

/// Gaps above this fail the oracle comparisons.
pub const ORACLE_TOL: f64 = 1e-6;
/// Maximizer coordinates must lie this close to `1/K`.
pub const MAXIMIZER_TOL: f64 = 1e-4;

#[derive(Debug, Default)]
pub struct CommandOutput {
    pub rows: Vec<Row>,
    pub curves: Vec<CurvePoint>,
    pub census: Option<String>,
    /// Checked claims that did not hold.
    pub failures: Vec<String>,
    /// Parts of the request that could not be carried out.
    pub infeasible: Vec<String>,
}

impl CommandOutput {
    fn curve(&mut self, x: f64, series: impl Into<String>, value: f64) {
        self.curves.push(CurvePoint {
            x,
            series: series.into(),
            value,
        });
    }
}

pub fn dispatch(command: &str, args: &mut RunArgs) -> Result<CommandOutput, CliError> {
    match command {
        "bounds" => bounds(args),
        "mc-tail" => mc_tail(args),
        "mgf-verify" => mgf_verify(args),
        "oracle" => oracle(args),
        "counterexample" => counterexample(args),
        "misspecified" => misspecified(args),
        "coding" => coding(args),
        "exponent" => exponent(args),
        other => Err(CliError::Parse(format!("unknown command '{other}'"))),
    }
}

fn require<T: Clone>(v: &[T], key: &str) -> Result<Vec<T>, CliError> {
    if v.is_empty() {
        Err(CliError::Parse(format!("--{key} is required")))
    } else {
        Ok(v.to_vec())
    }
}

fn single<T: Copy>(v: &[T], key: &str) -> Result<T, CliError> {
    match v {
        [x] => Ok(*x),
        [] => Err(CliError::Parse(format!("--{key} is required"))),
        _ => Err(CliError::Parse(format!("--{key} takes a single value here"))),
    }
}

fn epsilons(args: &RunArgs) -> Result<Vec<f64>, CliError> {
    let eps = require(&args.eps, "eps")?;
    if let Some(e) = eps.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
        return Err(CliError::Parse(format!("epsilon must be positive and finite, got {e}")));
    }
    Ok(eps)
}

fn generator(name: &str) -> Result<ParamGenerator, CliError> {
    name.parse().map_err(|e: entconc::Error| CliError::Parse(e.to_string()))
}

fn nat_only(args: &RunArgs, command: &str) -> Result<(), CliError> {
    match args.base {
        Some(BaseArg::Bit) => Err(CliError::Parse(format!("{command} works in nats; drop --base bit"))),
        _ => Ok(()),
    }
}

fn explicit_p(args: &RunArgs) -> Result<Option<ProbVector>, CliError> {
    if args.p.is_empty() {
        Ok(None)
    } else {
        Ok(Some(ProbVector::new(args.p.clone())?))
    }
}

/// Alphabet size from `--K`, checked against `--p` when both are given.
fn alphabet(args: &RunArgs, p: Option<&ProbVector>) -> Result<usize, CliError> {
    match (args.k.as_slice(), p) {
        ([], Some(p)) => Ok(p.k()),
        (_, Some(p)) => {
            let k = single(&args.k, "K")?;
            if k != p.k() {
                return Err(CliError::Parse(format!("--K {k} does not match --p of length {}", p.k())));
            }
            Ok(k)
        }
        (_, None) => single(&args.k, "K"),
    }
}

/// `p` from `--p`, or one draw of the generator.
fn source_distribution(args: &mut RunArgs) -> Result<ProbVector, CliError> {
    if let Some(p) = explicit_p(args)? {
        return Ok(p);
    }
    let k = single(&args.k, "K").map_err(|_| CliError::Parse("give --p, or --K with --gen".into()))?;
    let gen = generator(&single_gen(args, "random")?)?;
    let seed = *args.seed.get_or_insert(0);
    Ok(generate_params(gen, k, 1, seed)?.members()[0].clone())
}

fn single_gen(args: &mut RunArgs, default: &str) -> Result<String, CliError> {
    if args.gen.is_empty() {
        args.gen.push(default.to_string());
    }
    match args.gen.as_slice() {
        [g] => Ok(g.clone()),
        _ => Err(CliError::Parse("--gen takes a single value here".into())),
    }
}

fn bound_row(command: &'static str, metric: String, b: &BoundReport) -> Row {
    let mut row = Row::new(command, metric, b.value).valid(b.valid).regime(b.regime.as_str());
    if !b.is_applicable() {
        row.value = None;
    }
    row
}

fn bounds(args: &mut RunArgs) -> Result<CommandOutput, CliError> {
    let ks = require(&args.k, "K")?;
    let ns = require(&args.n, "n")?;
    let eps = epsilons(args)?;
    let base = match *args.base.get_or_insert(BaseArg::Nat) {
        BaseArg::Nat => LogBase::Natural,
        BaseArg::Bit => LogBase::Bits,
    };
    let p = explicit_p(args)?;
    let grid = ks.len() > 1 || ns.len() > 1;
    let mut out = CommandOutput::default();
    for &k in &ks {
        for &n in &ns {
            let params = match &p {
                Some(p) => Some(ParamSet::repeated(p.clone(), n as usize)?),
                None => None,
            };
            for &e in &eps {
                let q = TailQuery::new(n, k, e, Side::TwoSided, base)?;
                for b in compare_bounds(&q, params.as_ref()) {
                    let name = b.family.as_str();
                    out.rows.push(bound_row("bounds", name.into(), &b).k(k).n(n).eps(e));
                    if b.is_applicable() {
                        let series = if grid { format!("{name};K={k};n={n}") } else { name.to_string() };
                        out.curve(e, series, b.value);
                    }
                }
            }
        }
    }
    Ok(out)
}

fn sim_settings(args: &mut RunArgs, eps: Vec<f64>) -> SimSettings {
    SimSettings {
        replicates: *args.reps.get_or_insert(100_000),
        epsilons: eps,
        seed: *args.seed.get_or_insert(0),
        workers: *args.workers.get_or_insert(1),
    }
}

/// Frequency rows, bound rows and violations of one tail estimate.
fn tail_rows(command: &'static str, k: usize, n: u64, est: &TailEstimate, out: &mut CommandOutput) {
    let e = est.epsilon;
    for (side, name) in [(Side::Left, "freq-left"), (Side::Right, "freq-right"), (Side::TwoSided, "freq-two-sided")] {
        let f = est.freq(side);
        let h = est.ci_halfwidth_for(side);
        out.rows.push(Row::new(command, name, f).k(k).n(n).eps(e).ci((f - h).max(0.0), (f + h).min(1.0)));
        out.curve(e, format!("empirical-{}", side.as_str()), f);
    }
    for b in &est.bound_rows {
        let name = b.family.as_str();
        out.rows.push(bound_row(command, format!("bound:{name}"), b).k(k).n(n).eps(e));
        if b.valid && b.is_applicable() {
            out.curve(e, format!("bound:{name}"), b.value);
        }
    }
    for v in est.violations() {
        out.failures.push(format!(
            "eps = {}: {} {} frequency {} exceeds bound {} + {}",
            v.epsilon,
            v.family.as_str(),
            v.side.as_str(),
            v.freq,
            v.bound,
            v.slack
        ));
    }
}

fn mc_tail(args: &mut RunArgs) -> Result<CommandOutput, CliError> {
    nat_only(args, "mc-tail")?;
    let eps = epsilons(args)?;
    let p = explicit_p(args)?;
    let k = alphabet(args, p.as_ref())?;
    let n = single(&args.n, "n")?;
    let settings = sim_settings(args, eps);
    let (params, gen) = match p {
        Some(p) => {
            args.gen.clear();
            (ParamSet::repeated(p, n as usize)?, None)
        }
        None => {
            let gen = generator(&single_gen(args, "random")?)?;
            args.gen = vec![gen.as_str().to_string()];
            (generate_params(gen, k, n as usize, settings.seed)?, Some(gen))
        }
    };
    let config = ExperimentConfig { params, settings };
    let mut out = CommandOutput::default();
    for est in estimate_tail(&config)? {
        tail_rows("mc-tail", k, n, &est, &mut out);
        if gen == Some(ParamGenerator::Counterexample) {
            let exact = counterexample_exact_tail(k, n, est.epsilon)?;
            let diff = (est.freq_two_sided - exact.exact_tail).abs();
            let agrees = diff <= est.ci_halfwidth;
            out.rows.push(
                Row::new("mc-tail", "exact-two-sided", exact.exact_tail)
                    .k(k)
                    .n(n)
                    .eps(est.epsilon)
                    .valid(agrees),
            );
            out.curve(est.epsilon, "exact-two-sided", exact.exact_tail);
            if !agrees {
                out.failures.push(format!(
                    "eps = {}: empirical {} differs from exact {} by more than {}",
                    est.epsilon, est.freq_two_sided, exact.exact_tail, est.ci_halfwidth
                ));
            }
        }
    }
    Ok(out)
}

/// The distributions checked by `mgf-verify`: `reps` uniform draws from the
/// simplex, then `max(reps/10, 1)` boundary-heavy draws.
pub fn verification_distributions(k: usize, reps: u64, seed: u64) -> Vec<ProbVector> {
    let heavy = (reps / 10).max(1);
    (0..reps)
        .map(|i| random_simplex(k, &mut substream(seed, i)))
        .chain((0..heavy).map(|i| boundary_heavy(k, &mut substream(seed, reps + i))))
        .collect()
}

fn mgf_verify(args: &mut RunArgs) -> Result<CommandOutput, CliError> {
    let ks = require(&args.k, "K")?;
    let reps = *args.reps.get_or_insert(1000);
    let seed = *args.seed.get_or_insert(0);
    if reps < 1 {
        return Err(CliError::Parse("--reps must be at least 1".into()));
    }
    let mut out = CommandOutput::default();
    for &k in &ks {
        let domain = lambda_domain(k)?;
        let lambdas = if args.lambda.is_empty() {
            linspace(domain.lower, domain.upper.min(2.0), 50)
        } else {
            args.lambda.clone()
        };
        let dists = verification_distributions(k, reps, seed);
        let (mut checked, mut violations, mut chain) = (0u64, 0u64, 0u64);
        let mut worst = f64::NEG_INFINITY;
        for &l in &lambdas {
            let r = domination_sweep(k, &dists, &[l])?;
            checked += r.checked;
            violations += r.violations;
            chain += r.chain_violations;
            worst = worst.max(r.max_log_ratio);
            out.curve(l, format!("max-log-ratio;K={k}"), r.max_log_ratio);
        }
        out.rows.push(Row::new("mgf-verify", "checked", checked as f64).k(k));
        out.rows.push(Row::new("mgf-verify", "violations", violations as f64).k(k).valid(violations == 0));
        out.rows.push(Row::new("mgf-verify", "max-log-ratio", worst).k(k).valid(violations == 0));
        out.rows.push(Row::new("mgf-verify", "chain-violations", chain as f64).k(k).valid(chain == 0));
        if violations > 0 {
            out.failures.push(format!("K = {k}: {violations} MGF values exceed the uniform bound"));
        }
        if chain > 0 {
            out.failures.push(format!("K = {k}: {chain} failures of log M <= F <= closed form"));
        }
    }
    Ok(out)
}

fn oracle(args: &mut RunArgs) -> Result<CommandOutput, CliError> {
    if args.k.is_empty() {
        args.k = vec![5, 6, 8, 16, 32, 64];
    }
    let ks = args.k.clone();
    let cfg = SearchConfig {
        seed: *args.seed.get_or_insert(SearchConfig::default().seed),
        ..SearchConfig::default()
    };
    let workers = *args.workers.get_or_insert(1);
    let lambdas_arg = args.lambda.clone();
    with_workers(workers, move || -> Result<CommandOutput, CliError> {
        let mut out = CommandOutput::default();
        for &k in &ks {
            oracle_one(k, &cfg, &lambdas_arg, &mut out)?;
        }
        Ok(out)
    })?
}

fn oracle_one(k: usize, cfg: &SearchConfig, lambdas_arg: &[f64], out: &mut CommandOutput) -> Result<(), CliError> {
    let c = "oracle";
    let t = variance_max_oracle(k, cfg)?;
    let dev = t.maximizer.iter().map(|&x| (x - 1.0 / k as f64).abs()).fold(0.0, f64::max);
    let gap_ok = !t.lemma_applies || t.gap <= ORACLE_TOL;
    let dev_ok = !t.lemma_applies || dev <= MAXIMIZER_TOL;
    out.rows.push(Row::new(c, "variance-max", t.max_value).k(k).valid(t.lemma_applies));
    out.rows.push(Row::new(c, "variance-oracle", t.oracle_value).k(k));
    out.rows.push(Row::new(c, "variance-gap", t.gap).k(k).valid(gap_ok));
    out.rows.push(Row::new(c, "variance-maximizer-deviation", dev).k(k).valid(dev_ok));
    if !gap_ok || !dev_ok {
        out.failures.push(format!("K = {k}: variance oracle gap {} / maximizer deviation {dev}", t.gap));
    }
    let lag = lagrangian_stationary(k, Objective::Variance)?;
    out.rows.push(Row::new(c, "variance-multiplier", lag.multiplier.unwrap_or(f64::NAN)).k(k));
    out.rows.push(Row::new(c, "variance-dual-gap", lag.gap).k(k));
    if k < 5 {
        return Ok(());
    }
    let lambdas = if lambdas_arg.is_empty() {
        vec![-0.99 / bstar(k)?, -0.001, 0.1, 0.5, 1.0, 2.0]
    } else {
        lambdas_arg.to_vec()
    };
    for l in lambdas {
        let t = f_max_oracle(l, k, cfg)?;
        let ok = t.gap <= ORACLE_TOL;
        out.rows.push(Row::new(c, format!("F-max;lambda={l}"), t.max_value).k(k));
        out.rows.push(Row::new(c, format!("F-oracle;lambda={l}"), t.oracle_value).k(k));
        out.rows.push(Row::new(c, format!("F-gap;lambda={l}"), t.gap).k(k).valid(ok));
        out.curve(l, format!("F-gap;K={k}"), t.gap);
        if !ok {
            out.failures.push(format!("K = {k}, lambda = {l}: F oracle gap {}", t.gap));
        }
        let lag = lagrangian_stationary(k, Objective::FAtLambda(l))?;
        out.rows.push(Row::new(c, format!("F-dual-gap;lambda={l}"), lag.gap).k(k));
    }
    let a = appendix_g_check(k, 10_000, 10.0)?;
    out.rows.push(Row::new(c, "appendix-grid-min", a.grid_min).k(k).valid(a.nonnegative));
    out.rows.push(Row::new(c, "appendix-slope-at-zero", a.dg_at_zero).k(k).valid(a.flat_at_zero));
    out.rows.push(Row::new(c, "appendix-curvature-below", a.d2g_below).k(k).valid(a.sign_flip));
    out.rows.push(Row::new(c, "appendix-curvature-above", a.d2g_above).k(k).valid(a.sign_flip));
    if !a.passed() {
        out.failures.push(format!("K = {k}: scalar appendix check failed"));
    }
    Ok(())
}

/// `⌈e^{√n}⌉ + 1`, the alphabet size at which `(log(K−1))²/n ≈ 1`.
pub fn critical_k(n: u64) -> Result<usize, CliError> {
    let root = (n as f64).sqrt();
    if root > 40.0 {
        return Err(CliError::Feasibility(format!("critical K for n = {n} does not fit in memory-sized integers")));
    }
    Ok(root.exp().ceil() as usize + 1)
}

fn counterexample(args: &mut RunArgs) -> Result<CommandOutput, CliError> {
    nat_only(args, "counterexample")?;
    let ns = require(&args.n, "n")?;
    let eps = epsilons(args)?;
    let explicit_k = args.k.clone();
    let mut out = CommandOutput::default();
    for &n in &ns {
        let ks = if explicit_k.is_empty() { vec![critical_k(n)?] } else { explicit_k.clone() };
        for &k in &ks {
            for &e in &eps {
                let r = counterexample_exact_tail(k, n, e)?;
                let c = "counterexample";
                out.rows.push(Row::new(c, "exact-left", r.exact_left).k(k).n(n).eps(e));
                out.rows.push(Row::new(c, "exact-right", r.exact_right).k(k).n(n).eps(e));
                out.rows.push(Row::new(c, "exact-two-sided", r.exact_tail).k(k).n(n).eps(e));
                out.rows.push(Row::new(c, "berry-esseen-floor", r.normal_floor).k(k).n(n).eps(e));
                out.rows.push(Row::new(c, "variance", r.variance).k(k).n(n).eps(e));
                let tag = if explicit_k.is_empty() { format!("eps={e}") } else { format!("K={k};eps={e}") };
                out.curve(n as f64, format!("exact-two-sided;{tag}"), r.exact_tail);
                out.curve(n as f64, format!("berry-esseen-floor;{tag}"), r.normal_floor);
            }
        }
    }
    Ok(out)
}

fn misspecified(args: &mut RunArgs) -> Result<CommandOutput, CliError> {
    nat_only(args, "misspecified")?;
    let eps = epsilons(args)?;
    let k = single(&args.k, "K")?;
    if args.groups.is_empty() {
        args.groups = vec![100, 100];
    }
    if args.gen.is_empty() {
        args.gen = vec!["random".into()];
    }
    let sizes = args.groups.clone();
    let gens = if args.gen.len() == 1 {
        vec![generator(&args.gen[0])?; sizes.len()]
    } else if args.gen.len() == sizes.len() {
        args.gen.iter().map(|g| generator(g)).collect::<Result<Vec<_>, _>>()?
    } else {
        return Err(CliError::Parse("--gen needs one value or one per group".into()));
    };
    args.gen = gens.iter().map(|g| g.as_str().to_string()).collect();
    let settings = sim_settings(args, eps);
    let groups = sizes
        .iter()
        .zip(&gens)
        .enumerate()
        .map(|(i, (&size, &gen))| {
            Ok(generate_params(gen, k, size, settings.seed.wrapping_add(i as u64 + 1))?.members().to_vec())
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let g = GroupedParamSet::new(groups)?;
    let n = g.n() as u64;
    let lambdas = if args.lambda.is_empty() {
        let d = lambda_domain(padded_k(k))?;
        linspace(d.lower, 2.0, 9)
    } else {
        args.lambda.clone()
    };
    let mut out = CommandOutput::default();
    for est in misspecified_tail(&g, &settings)? {
        tail_rows("misspecified", k, n, &est, &mut out);
    }
    let c = "misspecified";
    for r in grouped_mgf_check(&g, &lambdas)? {
        let tag = format!("group={};lambda={}", r.group, r.lambda);
        let size = sizes[r.group] as u64;
        out.rows.push(Row::new(c, format!("ln-mgf-exact;{tag}"), r.ln_exact).k(k).n(size));
        out.rows.push(Row::new(c, format!("ln-mgf-pooled;{tag}"), r.ln_pooled).k(k).n(size).valid(r.first_link));
        out.rows.push(Row::new(c, format!("ln-mgf-upper;{tag}"), r.ln_upper).k(k).n(size).valid(r.second_link));
        if !r.holds() {
            out.failures.push(format!("MGF chain fails for {tag}"));
        }
    }
    Ok(out)
}

fn coding(args: &mut RunArgs) -> Result<CommandOutput, CliError> {
    let eps = epsilons(args)?;
    let p = source_distribution(args)?;
    let k = p.k();
    let n = single(&args.n, "n")?;
    let delta = *args.delta.get_or_insert(0.1);
    let reps = *args.reps.get_or_insert(10_000);
    let seed = *args.seed.get_or_insert(0);
    let workers = *args.workers.get_or_insert(1);
    let model = SourceModel::new(p, n as usize)?;
    let c = "coding";
    let mut out = CommandOutput::default();
    out.rows.push(Row::new(c, "entropy-bits", model.entropy_bits()).k(k).n(n));
    let census = type_census(&model)?;
    if args.census.is_some() {
        out.census = Some(census_csv(&census, k));
    }
    let ebc = essential_bit_content(&model, delta)?;
    out.rows.push(Row::new(c, "h-delta", ebc.h_delta).k(k).n(n));
    out.rows.push(Row::new(c, "h-delta-rate", ebc.h_delta / n as f64).k(k).n(n));
    out.rows.push(Row::new(c, "s-delta-mass", ebc.mass).k(k).n(n).valid(ebc.mass >= 1.0 - delta - 1e-12));
    for &e in &eps {
        for variant in [TypicalVariant::T1, TypicalVariant::T2, TypicalVariant::Both] {
            let s = typical_set_stats(&model, e, variant)?;
            let v = variant.as_str();
            out.rows.push(Row::new(c, format!("{v}-log2-size"), s.log2_size).k(k).n(n).eps(e).valid(s.counting_bound_holds));
            out.rows.push(Row::new(c, format!("{v}-mass"), s.prob_mass).k(k).n(n).eps(e));
            out.rows.push(Row::new(c, format!("{v}-complement-mass"), s.complement_mass).k(k).n(n).eps(e));
            out.curve(e, format!("{v}-mass"), s.prob_mass);
            if !s.counting_bound_holds {
                out.failures.push(format!("eps = {e}: log2 |{v}| = {} breaks the counting bound", s.log2_size));
            }
        }
        let (n_upper, n_lower) = source_coding_thresholds(k, delta, e)?;
        out.rows.push(Row::new(c, "n-threshold-upper", n_upper).k(k).n(n).eps(e));
        out.rows.push(Row::new(c, "n-threshold-lower", n_lower).k(k).n(n).eps(e));
        match build_block_code(&model, e) {
            Ok(code) => {
                let r = code_error(&code, reps, seed, workers)?;
                out.rows.push(Row::new(c, "code-m", code.m() as f64).k(k).n(n).eps(e).valid(true));
                out.rows.push(Row::new(c, "code-exact-error", r.exact_error).k(k).n(n).eps(e).valid(r.exact_within_bound));
                out.rows.push(
                    Row::new(c, "code-mc-error", r.mc_error)
                        .k(k)
                        .n(n)
                        .eps(e)
                        .ci((r.mc_error - r.ci_halfwidth).max(0.0), (r.mc_error + r.ci_halfwidth).min(1.0))
                        .valid(r.mc_agrees),
                );
                out.rows.push(Row::new(c, "code-error-bound", r.bound).k(k).n(n).eps(e));
                out.curve(e, "code-exact-error", r.exact_error);
                out.curve(e, "code-error-bound", r.bound);
                if !r.exact_within_bound {
                    out.failures.push(format!("eps = {e}: exact code error {} exceeds {}", r.exact_error, r.bound));
                }
            }
            Err(err) if err.is_feasibility() => {
                let mut row = Row::new(c, "code-m", f64::NAN).k(k).n(n).eps(e).valid(false);
                row.value = None;
                out.rows.push(row);
                out.infeasible.push(format!("eps = {e}: {err}"));
            }
            Err(err) => return Err(err.into()),
        }
    }
    Ok(out)
}

fn exponent(args: &mut RunArgs) -> Result<CommandOutput, CliError> {
    let eps = epsilons(args)?;
    let p = source_distribution(args)?;
    if args.n.is_empty() {
        args.n = vec![100];
    }
    let ns = args.n.clone();
    let ks = if args.k.is_empty() { vec![p.k()] } else { args.k.clone() };
    let c = "exponent";
    let mut out = CommandOutput::default();
    for &e in &eps {
        let ex = error_exponent(&p, e)?;
        out.rows.push(Row::new(c, "divergence", ex.divergence).k(p.k()).eps(e).valid(ex.feasible));
        out.rows.push(Row::new(c, "tilt", ex.tilt.unwrap_or(f64::NAN)).k(p.k()).eps(e));
        for r in compare_exponents(&p, e, &ns, &ks)? {
            let (k, n) = (r.k, r.n);
            if ex.feasible {
                out.rows.push(Row::new(c, "classical-ln-bound", r.classical_ln).k(k).n(n).eps(e));
                out.rows.push(Row::new(c, "classical-bound", r.classical).k(k).n(n).eps(e).valid(!r.classical_vacuous));
                out.curve(n as f64, format!("classical;K={k};eps={e}"), r.classical);
            }
            out.rows.push(Row::new(c, "uniform-bound", r.new_bound).k(k).n(n).eps(e).valid(!r.new_vacuous));
            out.curve(n as f64, format!("uniform;K={k};eps={e}"), r.new_bound);
        }
    }
    Ok(out)
}
