//! Fast self-check run by `dimcurse verify`: the same properties the test
//! suites exercise, at sizes that finish in seconds.

use dimcurse::convex::{elekes_cover_check, find_t0, fplus_con_value, g_min, SampleSet};
use dimcurse::monotone::{build_pair, complexity_lower_mon, error_lower_bound_mon};
use dimcurse::oracles::{BuiltinOracle, ProductOracle, ThresholdOracle};
use dimcurse::quadrature::{
    app_to_int, lp_distance, monte_carlo, pc_approximate, staircase_monotone, Norm,
};
use dimcurse::{run_algorithm, Point, RandomStream};
use rand::Rng;
use serde::Serialize;

use crate::commands::Outcome;
use crate::{make_algorithm, render, Class, ExperimentConfig, Format, Result, ALGORITHMS};

#[derive(Debug, Clone, Serialize)]
pub struct CheckRow {
    pub check: &'static str,
    pub passed: bool,
    pub detail: String,
}

type Check = fn(u64) -> Result<(bool, String)>;

const CHECKS: [(&str, Check); 9] = [
    ("monotone-complexity-formula", complexity_formula),
    ("centre-query-gap", centre_gap),
    ("adversary-consistency-gate", consistency_gate),
    ("chernoff-t0", chernoff_t0),
    ("fplus-1d-analytic", fplus_1d),
    ("elekes-cover", elekes),
    ("mc-worker-invariance", mc_invariance),
    ("staircase-bracket", staircase_bracket),
    ("approximation-reduction", reduction),
];

pub fn run_checks(seed: u64) -> Result<Vec<CheckRow>> {
    CHECKS
        .iter()
        .map(|(name, f)| {
            let (passed, detail) = f(seed)?;
            Ok(CheckRow {
                check: name,
                passed,
                detail,
            })
        })
        .collect()
}

pub fn cmd_verify(seed: u64, format: Format) -> Result<Outcome> {
    let rows = run_checks(seed)?;
    let failed: Vec<&str> = rows.iter().filter(|r| !r.passed).map(|r| r.check).collect();
    Ok(Outcome {
        report: render("verify", format, &rows)?,
        gate_failure: (!failed.is_empty()).then(|| format!("failed checks: {}", failed.join(", "))),
    })
}

fn complexity_formula(_: u64) -> Result<(bool, String)> {
    let ok = (1..=30).all(|d| {
        complexity_lower_mon(0.25, d).is_ok_and(|b| b == num_bigint::BigUint::from(1u64) << (d - 1))
    });
    Ok((ok, "ceil(2^d/2) = 2^(d-1) for d = 1..30".into()))
}

fn centre_gap(_: u64) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for d in 1..=20 {
        let pair = build_pair(&[Point::splat(d, 0.5)?], d)?;
        worst = worst.max((pair.exact_gap - (1.0 - 0.5f64.powi(d as i32))).abs());
    }
    Ok((
        worst == 0.0,
        format!("max deviation from 1 - 2^-d: {worst:e}"),
    ))
}

/// Every registered algorithm, several budgets below `2^d`: the certified
/// bound never falls below `½(1 − n 2^-d)`.
fn consistency_gate(seed: u64) -> Result<(bool, String)> {
    let mut runs = 0;
    let mut worst = f64::INFINITY;
    for d in 2..=6usize {
        for budget in [0, 1, 3, (1 << d) / 2, (1 << d) - 1] {
            for alg in ALGORITHMS.iter().filter(|a| **a != "fixed") {
                let cfg = ExperimentConfig {
                    class: Class::Monotone,
                    d,
                    budget,
                    eps: None,
                    seed,
                    mc_samples: 1,
                    out: None,
                    algorithm: alg.to_string(),
                    points: Vec::new(),
                };
                let run = run_algorithm(
                    make_algorithm(&cfg)?.as_mut(),
                    &ThresholdOracle::new(d),
                    budget,
                )?;
                let pts: Vec<Point> = run.transcript.points().cloned().collect();
                let pair = build_pair(&pts, d)?;
                let slack = 1.5 * pair.gap_std_error.unwrap_or(0.0);
                worst = worst.min(
                    pair.error_lower_bound() + slack - error_lower_bound_mon::<f64>(pts.len(), d),
                );
                runs += 1;
            }
        }
    }
    Ok((
        worst >= -1e-12,
        format!("{runs} runs, min margin over the theorem bound {worst:.3e}"),
    ))
}

fn chernoff_t0(_: u64) -> Result<(bool, String)> {
    let r = g_min(0.25f64)?;
    let t = find_t0()?;
    let ok = r.certified && t.t0 > 0.0 && t.eps0 == t.t0 / 2.0;
    Ok((
        ok,
        format!(
            "g_min(1/4) = {:.9}, t0 = {}, eps0 = {}",
            r.g_min, t.t0, t.eps0
        ),
    ))
}

fn fplus_1d(seed: u64) -> Result<(bool, String)> {
    let mut rng = RandomStream::new(seed).substream("verify-fplus").rng();
    let mut worst = 0.0f64;
    for k in 1..=5 {
        let pts: Vec<f64> = (0..k).map(|_| rng.random::<f64>() * 0.98 + 0.01).collect();
        let set = SampleSet::new(
            1,
            pts.iter()
                .map(|&p| Point::new(vec![p]))
                .collect::<dimcurse::Result<_>>()?,
        )?;
        let lo = pts.iter().cloned().fold(1.0, f64::min);
        let hi = pts.iter().cloned().fold(0.0, f64::max);
        for _ in 0..100 {
            let x = rng.random::<f64>();
            let analytic = 0.0f64.max((lo - x) / lo).max((x - hi) / (1.0 - hi));
            worst = worst.max((fplus_con_value(&Point::new(vec![x])?, &set)? - analytic).abs());
        }
    }
    Ok((
        worst <= 1e-8,
        format!("max |LP - analytic| = {worst:.2e} over 500 points"),
    ))
}

fn elekes(seed: u64) -> Result<(bool, String)> {
    let stream = RandomStream::new(seed).substream("verify-elekes");
    let mut failures = 0;
    for d in 1..=5 {
        let set = SampleSet::cube_vertices(d)?;
        failures +=
            (!elekes_cover_check(&set, 2_000, &stream.indexed("d", d as u64))?.passed()) as usize;
    }
    Ok((
        failures == 0,
        format!("{failures} of 5 full vertex sets with uncovered hull points"),
    ))
}

fn mc_invariance(seed: u64) -> Result<(bool, String)> {
    let oracle = ProductOracle::<f64>::new(3);
    let stream = RandomStream::new(seed);
    let single = rayon_pool(1).install(|| monte_carlo(&oracle, 50_000, &stream))?;
    let many = rayon_pool(4).install(|| monte_carlo(&oracle, 50_000, &stream))?;
    Ok((
        single == many,
        format!("estimate {} with 1 and 4 workers", single.estimate),
    ))
}

fn rayon_pool(threads: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool")
}

fn staircase_bracket(_: u64) -> Result<(bool, String)> {
    let mut ok = true;
    for d in 1..=4 {
        let b = staircase_monotone(&ProductOracle::<f64>::new(d), 6)?;
        let truth = 0.5f64.powi(d as i32);
        ok &= b.lower_sum <= truth
            && truth <= b.upper_sum
            && (b.estimate - truth).abs() <= b.certified_error;
    }
    Ok((
        ok,
        "L <= INT <= U for the product integrand, d = 1..4".into(),
    ))
}

fn reduction(_: u64) -> Result<(bool, String)> {
    let mut worst = f64::INFINITY;
    for b in BuiltinOracle::ALL {
        let f = b.oracle(1);
        for m in [1, 3, 8] {
            let app = pc_approximate(f.as_ref(), m)?;
            let l1 = lp_distance(f.as_ref(), &app, Norm::P(1.0), 64 * m)?;
            worst = worst.min(l1 - (b.integral(1) - app_to_int(&app)).abs());
        }
    }
    Ok((
        worst >= -1e-12,
        format!("min (L1 error - integration error) = {worst:.2e}"),
    ))
}
