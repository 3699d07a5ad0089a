//! Upper-bound side: simple quadratures that do achieve the known rates,
//! and the reduction from `L_p` approximation to integration.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mc::block_mean;
use crate::problem::{EvalOracle, Point};
use crate::rng::RandomStream;
use crate::scalar::Scalar;

/// Largest grid the lattice routines will evaluate.
pub const MAX_GRID_POINTS: usize = 50_000_000;

/// Comparable pairs sampled when looking for monotonicity violations.
pub const MONOTONE_PROBES: usize = 100;

const PROBE_SEED: u64 = 0x7374_6169_7263_6173;

fn grid_size(base: usize, d: usize) -> Result<usize> {
    base.checked_pow(d as u32)
        .filter(|&n| n <= MAX_GRID_POINTS)
        .ok_or_else(|| {
            Error::InvalidArgument(format!(
                "{base}^{d} grid points exceed the limit of {MAX_GRID_POINTS}"
            ))
        })
}

/// Mixed-radix decomposition of `flat` (axis 0 fastest).
fn unflatten(mut flat: usize, base: usize, d: usize, out: &mut [usize]) {
    for slot in out.iter_mut().take(d) {
        *slot = flat % base;
        flat /= base;
    }
}

fn lattice_point<S: Scalar>(idx: &[usize], m: usize) -> Result<Point<S>> {
    let m = S::from_usize_exact(m);
    Point::new(
        idx.iter()
            .map(|&i| S::from_usize_exact(i) / m.clone())
            .collect(),
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct BracketEstimate<S = f64> {
    /// Mean of the integrand over lower cell corners.
    pub lower_sum: S,
    /// Mean over upper cell corners.
    pub upper_sum: S,
    pub estimate: S,
    /// `min((U − L)/2, d/(2m))`.
    pub certified_error: S,
    pub samples_used: usize,
    /// `false` if a monotonicity violation was found; then the bracket is
    /// only a heuristic.
    pub certified: bool,
}

/// Staircase bracketing on the shared `(m+1)^d` lattice. For monotone `f`,
/// `L ≤ INT(f) ≤ U`.
pub fn staircase_monotone<S, O>(oracle: &O, m: usize) -> Result<BracketEstimate<S>>
where
    S: Scalar,
    O: EvalOracle<S> + ?Sized,
{
    let d = oracle.dim();
    if m == 0 || d == 0 {
        return Err(Error::InvalidArgument(
            "staircase needs m ≥ 1 and d ≥ 1".into(),
        ));
    }
    let total = grid_size(m + 1, d)?;
    let cells = S::from_usize_exact(grid_size(m, d)?);
    let mut idx = vec![0usize; d];
    let mut lower = S::zero();
    let mut upper = S::zero();
    for flat in 0..total {
        unflatten(flat, m + 1, d, &mut idx);
        let in_lower = idx.iter().all(|&i| i < m);
        let in_upper = idx.iter().all(|&i| i >= 1);
        if !(in_lower || in_upper) {
            continue;
        }
        let v = oracle.eval(&lattice_point(&idx, m)?);
        if in_lower {
            lower = lower + v.clone();
        }
        if in_upper {
            upper = upper + v;
        }
    }
    let lower_sum = lower / cells.clone();
    let upper_sum = upper / cells;
    let cap = S::from_usize_exact(d) / S::from_usize_exact(2 * m);
    let half_width = (upper_sum.clone() - lower_sum.clone()) * S::half();
    let monotone = lower_sum <= upper_sum && find_monotone_violation(oracle)?.is_none();
    Ok(BracketEstimate {
        estimate: (lower_sum.clone() + upper_sum.clone()) * S::half(),
        certified_error: S::min_of(half_width, cap),
        lower_sum,
        upper_sum,
        samples_used: total,
        certified: monotone,
    })
}

/// Samples [`MONOTONE_PROBES`] comparable pairs `x ≤ y` and returns the
/// first with `f(x) > f(y)`.
pub fn find_monotone_violation<S, O>(oracle: &O) -> Result<Option<(Point<S>, Point<S>)>>
where
    S: Scalar,
    O: EvalOracle<S> + ?Sized,
{
    let d = oracle.dim();
    let mut rng = RandomStream::new(PROBE_SEED)
        .substream("monotone-probe")
        .rng();
    for _ in 0..MONOTONE_PROBES {
        let x: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
        let y: Vec<f64> = x
            .iter()
            .map(|&a| a + rng.random::<f64>() * (1.0 - a))
            .collect();
        let (px, py) = (Point::<S>::from_f64s(&x)?, Point::<S>::from_f64s(&y)?);
        if oracle.eval(&px) > oracle.eval(&py) {
            return Ok(Some((px, py)));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloEstimate {
    pub estimate: f64,
    /// `n^{-1/2}`: the root-mean-square error bound for any integrand with
    /// values in `[0, 1]`.
    pub guaranteed_rmse: f64,
    pub std_error: f64,
    pub n: usize,
}

/// Plain Monte Carlo with `n` uniform samples.
pub fn monte_carlo<O>(oracle: &O, n: usize, stream: &RandomStream) -> Result<MonteCarloEstimate>
where
    O: EvalOracle<f64> + Sync + ?Sized,
{
    if n == 0 {
        return Err(Error::InvalidArgument("Monte Carlo needs n ≥ 1".into()));
    }
    let d = oracle.dim();
    let est = block_mean(n, stream, "monte-carlo", |rng| {
        let x = Point::new((0..d).map(|_| rng.random::<f64>()).collect())?;
        Ok(oracle.eval(&x))
    })?;
    Ok(MonteCarloEstimate {
        estimate: est.estimate,
        guaranteed_rmse: 1.0 / (n as f64).sqrt(),
        std_error: est.std_error,
        n,
    })
}

/// Step function on the `m^d` grid; axis 0 varies fastest in `values`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseConstantApprox<S = f64> {
    pub m: usize,
    pub d: usize,
    pub values: Vec<S>,
}

impl<S: Scalar> PiecewiseConstantApprox<S> {
    fn cell_of(&self, c: &S) -> usize {
        let scaled = c.clone() * S::from_usize_exact(self.m);
        let mut k = (scaled.to_f64_lossy().floor().max(0.0) as usize).min(self.m - 1);
        while k > 0 && S::from_usize_exact(k) > scaled {
            k -= 1;
        }
        while k + 1 < self.m && S::from_usize_exact(k + 1) <= scaled {
            k += 1;
        }
        k
    }

    /// Cells are `[i/m, (i+1)/m)`, with the last one closed.
    pub fn eval(&self, x: &Point<S>) -> S {
        let mut flat = 0;
        let mut stride = 1;
        for c in x.coords() {
            flat += self.cell_of(c) * stride;
            stride *= self.m;
        }
        self.values[flat].clone()
    }
}

impl<S: Scalar> EvalOracle<S> for PiecewiseConstantApprox<S> {
    fn dim(&self) -> usize {
        self.d
    }
    fn eval(&self, x: &Point<S>) -> S {
        PiecewiseConstantApprox::eval(self, x)
    }
    fn class(&self) -> crate::problem::FunctionClass {
        crate::problem::FunctionClass::Unrestricted
    }
}

/// Cell value = integrand at the cell's lower corner.
pub fn pc_approximate<S, O>(oracle: &O, m: usize) -> Result<PiecewiseConstantApprox<S>>
where
    S: Scalar,
    O: EvalOracle<S> + ?Sized,
{
    let d = oracle.dim();
    if m == 0 || d == 0 {
        return Err(Error::InvalidArgument(
            "approximation needs m ≥ 1 and d ≥ 1".into(),
        ));
    }
    let cells = grid_size(m, d)?;
    let mut idx = vec![0; d];
    let values = (0..cells)
        .map(|flat| {
            unflatten(flat, m, d, &mut idx);
            Ok(oracle.eval(&lattice_point(&idx, m)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PiecewiseConstantApprox { m, d, values })
}

/// Integral of the step function: the mean of its cell values.
pub fn app_to_int<S: Scalar>(approx: &PiecewiseConstantApprox<S>) -> S {
    if approx.values.is_empty() {
        return S::zero();
    }
    let sum = approx.values.iter().cloned().fold(S::zero(), |a, b| a + b);
    sum / S::from_usize_exact(approx.values.len())
}

/// Exponent of an `L_p` norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Norm {
    P(f64),
    Inf,
}

/// Midpoints of the `k^d` grid, in flat order.
fn midpoints(k: usize, d: usize) -> Result<impl Iterator<Item = Result<Point<f64>>>> {
    let total = grid_size(k, d)?;
    Ok((0..total).map(move |flat| {
        let mut idx = vec![0; d];
        unflatten(flat, k, d, &mut idx);
        Point::new(idx.iter().map(|&i| (i as f64 + 0.5) / k as f64).collect())
    }))
}

/// Midpoint-rule integral on the `k^d` grid.
pub fn midpoint_integral<O>(oracle: &O, k: usize) -> Result<f64>
where
    O: EvalOracle<f64> + ?Sized,
{
    let mut sum = 0.0;
    let mut count = 0usize;
    for x in midpoints(k, oracle.dim())? {
        sum += oracle.eval(&x?);
        count += 1;
    }
    Ok(sum / count as f64)
}

/// `‖f − g‖_p` by the midpoint rule on the `k^d` grid. The rule is an
/// equal-weight probability measure, so the discrete norms obey the same
/// ordering `|∫(f − g)| ≤ ‖f − g‖_1 ≤ ‖f − g‖_p` as the exact ones.
pub fn lp_distance<F, G>(f: &F, g: &G, norm: Norm, k: usize) -> Result<f64>
where
    F: EvalOracle<f64> + ?Sized,
    G: EvalOracle<f64> + ?Sized,
{
    if f.dim() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: g.dim(),
        });
    }
    let mut acc = 0.0f64;
    let mut count = 0usize;
    for x in midpoints(k, f.dim())? {
        let x = x?;
        let diff = (f.eval(&x) - g.eval(&x)).abs();
        match norm {
            Norm::Inf => acc = acc.max(diff),
            Norm::P(p) => acc += diff.powf(p),
        }
        count += 1;
    }
    Ok(match norm {
        Norm::Inf => acc,
        Norm::P(p) => (acc / count as f64).powf(1.0 / p),
    })
}

/// One point of a convergence study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatePoint {
    pub m: usize,
    pub n: usize,
    pub certified_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub points: Vec<RatePoint>,
    /// Least-squares slope of `ln(error)` against `ln(n)`.
    pub slope: f64,
}

/// Staircase certified error for each `m`, with the fitted log–log slope.
pub fn staircase_rate<O>(oracle: &O, ms: &[usize]) -> Result<RateFit>
where
    O: EvalOracle<f64> + ?Sized,
{
    let points = ms
        .iter()
        .map(|&m| {
            let b = staircase_monotone(oracle, m)?;
            Ok(RatePoint {
                m,
                n: b.samples_used,
                certified_error: b.certified_error,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if points.len() < 2
        || points
            .iter()
            .any(|p| p.certified_error.is_nan() || p.certified_error <= 0.0)
    {
        return Err(Error::InvalidArgument(
            "rate fit needs two or more positive errors".into(),
        ));
    }
    let xs: Vec<f64> = points.iter().map(|p| (p.n as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.certified_error.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(RateFit {
        points,
        slope: sxy / sxx,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::{AffineOracle, ConstantOracle, FnOracle, ProductOracle, ThresholdOracle};
    use crate::problem::FunctionClass;
    use crate::scalar::ratio;
    use num_rational::BigRational;

    #[test]
    fn staircase_identity() {
        let b = staircase_monotone(&AffineOracle::<f64>::new(1), 2).unwrap();
        assert_eq!(
            (b.lower_sum, b.upper_sum, b.estimate, b.certified_error),
            (0.25, 0.75, 0.5, 0.25)
        );
        assert_eq!(b.samples_used, 3);
        assert!(b.certified);
    }

    #[test]
    fn staircase_constant_and_threshold() {
        let b = staircase_monotone(&ConstantOracle::new(3, 0.3), 4).unwrap();
        assert_eq!(b.lower_sum, b.upper_sum);
        assert_eq!(b.certified_error, 0.0);

        let b = staircase_monotone(&ThresholdOracle::<BigRational>::new(2), 4).unwrap();
        assert!(b.lower_sum <= ratio(1, 2) && ratio(1, 2) <= b.upper_sum);
        assert!(b.certified_error <= ratio(2, 8));
    }

    #[test]
    fn staircase_flags_non_monotone() {
        let dec = FnOracle::new(2, FunctionClass::Unrestricted, |x: &Point<f64>| {
            1.0 - x.coords()[0]
        });
        assert!(!staircase_monotone(&dec, 4).unwrap().certified);
        assert!(staircase_monotone(&ProductOracle::<f64>::new(2), 0).is_err());
    }

    #[test]
    fn mc_constant_and_errors() {
        let s = RandomStream::new(9);
        let e = monte_carlo(&ConstantOracle::new(4, 0.7), 5000, &s).unwrap();
        assert_eq!(e.estimate, 0.7);
        assert!((e.guaranteed_rmse - 1.0 / 5000f64.sqrt()).abs() < 1e-15);
        assert!(monte_carlo(&ConstantOracle::new(4, 0.7), 0, &s).is_err());
    }

    #[test]
    fn pc_examples() {
        let c = ConstantOracle::new(2, 0.4);
        let a = pc_approximate(&c, 3).unwrap();
        assert!((app_to_int(&a) - 0.4f64).abs() < 1e-15);
        assert!(a.values.iter().all(|v| *v == 0.4));
        assert_eq!(lp_distance(&c, &a, Norm::P(2.0), 12).unwrap(), 0.0);

        let th = ThresholdOracle::<f64>::new(1);
        let a = pc_approximate(&th, 2).unwrap();
        assert_eq!(a.values, vec![0.0, 1.0]);
        assert_eq!(lp_distance(&th, &a, Norm::P(1.0), 64).unwrap(), 0.0);
        assert_eq!(a.eval(&Point::new(vec![1.0]).unwrap()), 1.0);

        let id = AffineOracle::<f64>::new(1);
        let a = pc_approximate(&id, 4).unwrap();
        assert_eq!(app_to_int(&a), 0.375);
        let l1 = lp_distance(&id, &a, Norm::P(1.0), 64).unwrap();
        assert!((l1 - 0.125).abs() < 1e-12);
        assert!((0.5 - app_to_int(&a)).abs() <= l1 + 1e-12);
        assert!(l1 <= lp_distance(&id, &a, Norm::P(2.0), 64).unwrap());
        assert!(
            (lp_distance(&id, &a, Norm::Inf, 64).unwrap() - (0.25 - 1.0 / 128.0)).abs() < 1e-12
        );

        let zero = PiecewiseConstantApprox {
            m: 2,
            d: 1,
            values: vec![0.0, 0.0],
        };
        assert_eq!(app_to_int(&zero), 0.0);
    }

    #[test]
    fn exact_cell_lookup() {
        let a = pc_approximate(&AffineOracle::<BigRational>::new(1), 3).unwrap();
        assert_eq!(a.eval(&Point::new(vec![ratio(1, 3)]).unwrap()), ratio(1, 3));
        assert_eq!(
            a.eval(&Point::new(vec![ratio(332, 1000)]).unwrap()),
            ratio(0, 1)
        );
        assert_eq!(a.eval(&Point::new(vec![ratio(2, 3)]).unwrap()), ratio(2, 3));
    }

    #[test]
    fn rate_fit_shape() {
        let fit = staircase_rate(&ThresholdOracle::<f64>::new(2), &[2, 4, 8, 16, 32]).unwrap();
        assert!((fit.slope + 0.5).abs() < 0.1);
        assert!(staircase_rate(&ConstantOracle::new(2, 0.5), &[2, 4]).is_err());
    }
}
