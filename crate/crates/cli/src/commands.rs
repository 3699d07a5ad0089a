use dimcurse::convex::{
    complexity_lower_con, error_lower_bound_con_empirical, find_t0, g_min, s_of_t,
    volume_upper_bound, T0Report,
};
use dimcurse::monotone::{build_pair, complexity_lower_mon, error_lower_bound_mon};
use dimcurse::oracles::{BuiltinOracle, ConstantOracle, ThresholdOracle};
use dimcurse::quadrature::{monte_carlo, staircase_monotone, staircase_rate};
use dimcurse::{run_algorithm, Point, RandomStream, SampleSet};
use serde::Serialize;

use crate::{
    check_eps, config_err, make_algorithm, render, to_csv, to_json, Class, ExperimentConfig,
    Format, Report, Result,
};

/// Outcome of a command: the report, and a gate message if an internal
/// consistency check failed (the report is still emitted).
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: Report,
    pub gate_failure: Option<String>,
}

impl From<Report> for Outcome {
    fn from(report: Report) -> Self {
        Self {
            report,
            gate_failure: None,
        }
    }
}

#[derive(Serialize)]
struct GapRow {
    d: usize,
    n: usize,
    ell: usize,
    exact_gap: f64,
    guaranteed_gap: f64,
    error_lower_bound: f64,
}

#[derive(Serialize)]
struct MonotoneReport {
    class: Class,
    algorithm: String,
    d: usize,
    budget: usize,
    n: usize,
    output: f64,
    /// Certified worst-case error lower bound for this algorithm.
    lower_bound: f64,
    gap_exact: bool,
    gap_std_error: Option<f64>,
    /// `½(1 − n 2^-d)` at the number of values actually used.
    theorem_bound: f64,
    /// The same formula at the full budget.
    theorem_bound_at_budget: f64,
    pair: serde_json::Value,
    transcript: serde_json::Value,
}

#[derive(Serialize)]
struct ConvexRow {
    d: usize,
    n: usize,
    lower_bound: f64,
    std_error: f64,
    ci_low: f64,
    ci_high: f64,
    theorem_bound: f64,
}

#[derive(Serialize)]
struct ConvexReport {
    class: Class,
    algorithm: String,
    d: usize,
    budget: usize,
    n: usize,
    output: f64,
    /// `½ INT(f⁺)` estimated by Monte Carlo.
    lower_bound: f64,
    std_error: f64,
    ci_low: f64,
    ci_high: f64,
    mc_samples: usize,
    seed: u64,
    t0: f64,
    /// `½(1 − volume_upper_bound(n, d, t₀))`.
    theorem_bound: f64,
    transcript: serde_json::Value,
}

/// Runs the configured algorithm against the class's probe function,
/// builds the fooling pair and reports the error lower bound next to the
/// closed-form bound.
pub fn cmd_adversary(cfg: &ExperimentConfig, format: Format) -> Result<Outcome> {
    cfg.validate()?;
    let mut alg = make_algorithm(cfg)?;
    match cfg.class {
        Class::Monotone => {
            let run = run_algorithm(alg.as_mut(), &ThresholdOracle::new(cfg.d), cfg.budget)?;
            let points: Vec<Point> = run.transcript.points().cloned().collect();
            let pair = build_pair(&points, cfg.d)?;
            let n = pair.n();
            let theorem: f64 = error_lower_bound_mon(n, cfg.d);
            let certified = pair.error_lower_bound();
            let below_cube = cfg.d >= usize::BITS as usize || n < (1usize << cfg.d);
            // with the sampling fallback, allow three standard errors
            let slack = 1.5 * pair.gap_std_error.unwrap_or(0.0) + 1e-12;
            let gate_failure = (below_cube && certified + slack < theorem).then(|| {
                format!("certified bound {certified} is below the theorem bound {theorem} (n = {n}, d = {})", cfg.d)
            });
            let report = match format {
                Format::Csv => render(
                    "adversary",
                    format,
                    &[GapRow {
                        d: cfg.d,
                        n,
                        ell: pair.ell(),
                        exact_gap: pair.exact_gap,
                        guaranteed_gap: pair.guaranteed_gap,
                        error_lower_bound: certified,
                    }],
                )?,
                Format::Json => Report {
                    name: "adversary",
                    format,
                    body: to_json(&MonotoneReport {
                        class: cfg.class,
                        algorithm: cfg.algorithm.clone(),
                        d: cfg.d,
                        budget: cfg.budget,
                        n,
                        output: run.output,
                        lower_bound: certified,
                        gap_exact: pair.gap_is_exact(),
                        gap_std_error: pair.gap_std_error,
                        theorem_bound: theorem,
                        theorem_bound_at_budget: error_lower_bound_mon(cfg.budget, cfg.d),
                        pair: serde_json::from_str(&pair.to_json()?)?,
                        transcript: serde_json::from_str(&run.transcript.to_json()?)?,
                    })?,
                },
            };
            Ok(Outcome {
                report,
                gate_failure,
            })
        }
        Class::Convex => {
            let run = run_algorithm(alg.as_mut(), &ConstantOracle::zero(cfg.d), cfg.budget)?;
            let set = SampleSet::new(cfg.d, run.transcript.points().cloned().collect())?;
            let stream = RandomStream::new(cfg.seed).substream("adversary");
            let b = error_lower_bound_con_empirical(&set, cfg.mc_samples, &stream)?;
            let t0 = find_t0()?.t0;
            let n = set.n();
            let theorem = 0.5 * (1.0 - volume_upper_bound(n, cfg.d, t0));
            let gate_failure = (b.ci_high < theorem).then(|| {
                format!("statistical bound {} (upper 3se limit {}) is below the theorem bound {theorem}", b.bound, b.ci_high)
            });
            let report = match format {
                Format::Csv => render(
                    "adversary",
                    format,
                    &[ConvexRow {
                        d: cfg.d,
                        n,
                        lower_bound: b.bound,
                        std_error: b.std_error,
                        ci_low: b.ci_low,
                        ci_high: b.ci_high,
                        theorem_bound: theorem,
                    }],
                )?,
                Format::Json => Report {
                    name: "adversary",
                    format,
                    body: to_json(&ConvexReport {
                        class: cfg.class,
                        algorithm: cfg.algorithm.clone(),
                        d: cfg.d,
                        budget: cfg.budget,
                        n,
                        output: run.output,
                        lower_bound: b.bound,
                        std_error: b.std_error,
                        ci_low: b.ci_low,
                        ci_high: b.ci_high,
                        mc_samples: cfg.mc_samples,
                        seed: cfg.seed,
                        t0,
                        theorem_bound: theorem,
                        transcript: serde_json::from_str(&run.transcript.to_json()?)?,
                    })?,
                },
            };
            Ok(Outcome {
                report,
                gate_failure,
            })
        }
    }
}

/// Accuracy for the bound table: a number, or the computed `ε₀`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum EpsSpec {
    Value(f64),
    Eps0,
}

impl std::str::FromStr for EpsSpec {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s.eq_ignore_ascii_case("eps0") {
            return Ok(EpsSpec::Eps0);
        }
        s.parse::<f64>()
            .map(EpsSpec::Value)
            .map_err(|e| format!("'{s}': {e}"))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundsConfig {
    pub class: Class,
    pub eps: EpsSpec,
    pub dmin: usize,
    pub dmax: usize,
    /// Flag rows whose bound exceeds this many function values.
    pub budget: Option<usize>,
}

#[derive(Serialize)]
struct BoundRow {
    d: usize,
    eps: f64,
    /// Minimal number of function values, as an exact integer.
    bound: String,
    formula: &'static str,
    provenance: &'static str,
    exceeds_budget: Option<bool>,
}

/// Information-complexity lower bounds per dimension.
pub fn cmd_bounds(cfg: &BoundsConfig, format: Format) -> Result<Report> {
    if cfg.dmin == 0 || cfg.dmin > cfg.dmax {
        return Err(config_err(format!(
            "need 1 ≤ d ≤ dmax, got {}..{}",
            cfg.dmin, cfg.dmax
        )));
    }
    let eps = match (cfg.eps, cfg.class) {
        (EpsSpec::Value(e), _) => e,
        (EpsSpec::Eps0, Class::Convex) => find_t0()?.eps0,
        (EpsSpec::Eps0, Class::Monotone) => {
            return Err(config_err("eps0 is only defined for the convex class"))
        }
    };
    check_eps(eps)?;
    let eps0 = match cfg.class {
        Class::Convex => Some(find_t0()?.eps0),
        Class::Monotone => None,
    };
    let rows = (cfg.dmin..=cfg.dmax)
        .map(|d| {
            let (bound, formula, provenance) = match eps0 {
                None => (
                    complexity_lower_mon(eps, d)?,
                    "ceil(2^d*(1-2*eps))",
                    "monotone-class-theorem",
                ),
                Some(e0) => (
                    complexity_lower_con(eps, d, e0)?,
                    "ceil((11/10)^d*(1-eps/eps0)/(d+1))",
                    "convex-class-theorem",
                ),
            };
            let exceeds_budget = cfg.budget.map(|b| bound > num_bigint::BigUint::from(b));
            Ok(BoundRow {
                d,
                eps,
                bound: bound.to_string(),
                formula,
                provenance,
                exceeds_budget,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    render("bounds", format, &rows)
}

#[derive(Serialize)]
struct GscanRow {
    t: f64,
    s: f64,
    alpha_star: f64,
    g_min: f64,
    bound_10_over_11_margin: f64,
}

/// `t_i = tmin + i·step` up to `tmax` (inclusive, up to rounding).
pub fn t_grid(tmin: f64, tmax: f64, step: f64) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&tmin)
        || !(0.0..=1.0).contains(&tmax)
        || tmin > tmax
        || step.is_nan()
        || step <= 0.0
    {
        return Err(config_err(format!(
            "need 0 ≤ tmin ≤ tmax ≤ 1 and step > 0 (got {tmin}, {tmax}, {step})"
        )));
    }
    let count = ((tmax - tmin) / step + 1e-9).floor() as usize;
    Ok((0..=count)
        .map(|i| (tmin + i as f64 * step).min(tmax))
        .collect())
}

/// Chernoff minimisation per `t`.
pub fn cmd_gscan(ts: &[f64], format: Format) -> Result<Report> {
    let rows = ts
        .iter()
        .map(|&t| {
            if !(0.0..=1.0).contains(&t) {
                return Err(config_err(format!("t must lie in [0, 1], got {t}")));
            }
            let r = g_min(s_of_t(t))?;
            Ok(GscanRow {
                t,
                s: r.s,
                alpha_star: r.alpha_star,
                g_min: r.g_min,
                bound_10_over_11_margin: r.margin(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    render("gscan", format, &rows)
}

pub fn cmd_t0(format: Format) -> Result<Report> {
    let r: T0Report = find_t0()?;
    let body = match format {
        Format::Json => to_json(&r)?,
        Format::Csv => to_csv(&[r])?,
    };
    Ok(Report {
        name: "t0",
        format,
        body,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum QuadMethod {
    Staircase,
    Mc,
    Both,
    /// Staircase over a doubling grid sequence, with the log–log slope.
    Rate,
}

#[derive(Debug, Clone, Serialize)]
pub struct QuadConfig {
    pub method: QuadMethod,
    /// `None` runs every built-in integrand.
    pub oracle: Option<String>,
    pub d: usize,
    pub m: usize,
    pub n: usize,
    pub seed: u64,
}

#[derive(Serialize)]
struct QuadRow {
    d: usize,
    method: &'static str,
    n: usize,
    estimate: Option<f64>,
    certified_error_or_rmse: Option<f64>,
    true_value_if_known: Option<f64>,
    oracle: &'static str,
}

/// Largest doubling sequence `4, 8, …` with `(m+1)^d ≤ 10^5`.
pub fn rate_grid(d: usize) -> Vec<usize> {
    let mut ms = Vec::new();
    let mut m = 4usize;
    while (m + 1).checked_pow(d as u32).is_some_and(|n| n <= 100_000) {
        ms.push(m);
        m *= 2;
    }
    ms
}

pub fn cmd_quad(cfg: &QuadConfig, format: Format) -> Result<Report> {
    if cfg.d == 0 || cfg.m == 0 || cfg.n == 0 {
        return Err(config_err("quad needs d, m and n all ≥ 1"));
    }
    let oracles: Vec<BuiltinOracle> = match cfg.oracle.as_deref() {
        None | Some("all") => BuiltinOracle::ALL.to_vec(),
        Some(name) => vec![BuiltinOracle::parse(name).ok_or_else(|| {
            config_err(format!(
                "unknown oracle '{name}' (known: threshold, product, affine, all)"
            ))
        })?],
    };
    let mut rows = Vec::new();
    for b in oracles {
        let oracle = b.oracle(cfg.d);
        let truth = Some(b.integral(cfg.d));
        if matches!(cfg.method, QuadMethod::Staircase | QuadMethod::Both) {
            let e = staircase_monotone(oracle.as_ref(), cfg.m)?;
            rows.push(QuadRow {
                d: cfg.d,
                oracle: b.name(),
                method: "staircase",
                n: e.samples_used,
                estimate: Some(e.estimate),
                certified_error_or_rmse: Some(e.certified_error),
                true_value_if_known: truth,
            });
        }
        if matches!(cfg.method, QuadMethod::Mc | QuadMethod::Both) {
            let stream = RandomStream::new(cfg.seed).substream(b.name());
            let e = monte_carlo(oracle.as_ref(), cfg.n, &stream)?;
            rows.push(QuadRow {
                d: cfg.d,
                oracle: b.name(),
                method: "mc",
                n: e.n,
                estimate: Some(e.estimate),
                certified_error_or_rmse: Some(e.guaranteed_rmse),
                true_value_if_known: truth,
            });
        }
        if cfg.method == QuadMethod::Rate {
            let ms = rate_grid(cfg.d);
            if ms.len() < 2 {
                return Err(config_err(format!(
                    "d = {} is too large for a rate study",
                    cfg.d
                )));
            }
            let fit = staircase_rate(oracle.as_ref(), &ms)?;
            for p in &fit.points {
                rows.push(QuadRow {
                    d: cfg.d,
                    oracle: b.name(),
                    method: "staircase",
                    n: p.n,
                    estimate: None,
                    certified_error_or_rmse: Some(p.certified_error),
                    true_value_if_known: truth,
                });
            }
            // the fitted exponent of n, next to the exponent -1/d
            rows.push(QuadRow {
                d: cfg.d,
                oracle: b.name(),
                method: "rate-slope",
                n: fit.points.len(),
                estimate: Some(fit.slope),
                certified_error_or_rmse: None,
                true_value_if_known: Some(-1.0 / cfg.d as f64),
            });
        }
    }
    render("quad", format, &rows)
}
