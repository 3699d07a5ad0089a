//! Fooling functions for convex integrands.
//!
//! The probe is `f⁻ = 0`. If an algorithm sampled `x_1, ..., x_n` on it, the
//! largest convex `[0,1]`-valued function vanishing there, `f⁺`, produces the
//! same transcript. Its graph is the lower boundary of
//! `C = conv(P × {0} ∪ [0,1]^d × {1})`, so `INT(f⁺) = 1 − vol(C)`.
//!
//! A point `(x, t)` lies in `C` iff `x − Σ λ_j x_j ∈ [0, 1 − Σ λ_j]^d` for
//! some `λ ≥ 0` with `Σ λ_j ≤ 1`, which gives
//!
//! ```text
//! f⁺(x) = 1 − max { Σ λ_j : λ ≥ 0, Σ λ_j ≤ 1,
//!                   Σ λ_j x_{j,i} ≤ x_i,  Σ λ_j (1 − x_{j,i}) ≤ 1 − x_i }
//! ```
//!
//! a linear program with `2d + 1` constraints and `n` variables.

pub mod chernoff;

use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::LinearProgram;
use crate::mc::{block_mean, McEstimate};
use crate::monotone::{ceil_nonneg, exact_eps};
use crate::problem::Point;
use crate::rng::RandomStream;
use crate::scalar::{Real, Scalar};

pub use chernoff::{
    cap_volume_mc, find_t0, g_min, g_value, g_value_closed_form, s_of_t, ChernoffResult, T0Report,
    CERT_LEVEL,
};

/// The points an algorithm sampled while the integrand was `f⁻ = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet<S = f64> {
    d: usize,
    points: Vec<Point<S>>,
}

impl<S: Scalar> SampleSet<S> {
    pub fn new(d: usize, points: Vec<Point<S>>) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidArgument(
                "dimension must be at least 1".into(),
            ));
        }
        if let Some(p) = points.iter().find(|p| p.dim() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: p.dim(),
            });
        }
        Ok(Self { d, points })
    }

    pub fn empty(d: usize) -> Result<Self> {
        Self::new(d, Vec::new())
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[Point<S>] {
        &self.points
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// All `2^d` vertices of the cube, in binary counting order.
    pub fn cube_vertices(d: usize) -> Result<Self> {
        let pts = (0..1usize << d)
            .map(|mask| {
                Point::new(
                    (0..d)
                        .map(|i| {
                            if mask >> i & 1 == 1 {
                                S::one()
                            } else {
                                S::zero()
                            }
                        })
                        .collect(),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(d, pts)
    }
}

/// The linear program whose optimum is `1 − f⁺(x)`.
pub fn fplus_lp<S: Scalar>(x: &Point<S>, samples: &SampleSet<S>) -> LinearProgram<S> {
    let n = samples.n();
    let d = samples.d();
    let mut rows = Vec::with_capacity(2 * d + 1);
    let mut rhs = Vec::with_capacity(2 * d + 1);
    rows.push(vec![S::one(); n]);
    rhs.push(S::one());
    for i in 0..d {
        rows.push(
            samples
                .points
                .iter()
                .map(|p| p.coords()[i].clone())
                .collect(),
        );
        rhs.push(x.coords()[i].clone());
        rows.push(
            samples
                .points
                .iter()
                .map(|p| S::one() - p.coords()[i].clone())
                .collect(),
        );
        rhs.push(S::one() - x.coords()[i].clone());
    }
    LinearProgram::new(vec![S::one(); n], rows, rhs)
}

/// `f⁺(x)`, the height of the lower boundary of the closed hull `C` above `x`.
pub fn fplus_con_value<S: Scalar>(x: &Point<S>, samples: &SampleSet<S>) -> Result<S> {
    if x.dim() != samples.d() {
        return Err(Error::DimensionMismatch {
            expected: samples.d(),
            got: x.dim(),
        });
    }
    if samples.is_empty() {
        return Ok(S::one());
    }
    let sol = fplus_lp(x, samples).solve()?;
    let v = S::one() - sol.objective;
    Ok(S::min_of(S::max_of(v, S::zero()), S::one()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FplusIntegral {
    pub mc: McEstimate,
    /// `1 − INT(f⁺)`.
    pub hull_volume: f64,
}

/// Monte Carlo estimate of `INT(f⁺)` over `samples` uniform points.
pub fn integral_fplus(
    set: &SampleSet<f64>,
    samples: usize,
    stream: &RandomStream,
) -> Result<FplusIntegral> {
    if samples == 0 {
        return Err(Error::InvalidArgument(
            "need at least one Monte Carlo sample".into(),
        ));
    }
    let d = set.d();
    let mc = block_mean(samples, stream, "fplus", |rng| {
        let x = Point::new((0..d).map(|_| rng.random::<f64>()).collect())?;
        fplus_con_value(&x, set)
    })?;
    Ok(FplusIntegral {
        mc,
        hull_volume: 1.0 - mc.estimate,
    })
}

/// Statistical error lower bound `½ INT(f⁺)` for any algorithm whose
/// transcript on `f⁻ = 0` is `set`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvexLowerBound {
    pub bound: f64,
    pub std_error: f64,
    /// `bound ± 3·std_error`
    pub ci_low: f64,
    pub ci_high: f64,
}

pub fn error_lower_bound_con_empirical(
    set: &SampleSet<f64>,
    samples: usize,
    stream: &RandomStream,
) -> Result<ConvexLowerBound> {
    let int = integral_fplus(set, samples, stream)?;
    let bound = 0.5 * int.mc.estimate;
    let se = 0.5 * int.mc.std_error;
    Ok(ConvexLowerBound {
        bound,
        std_error: se,
        ci_low: bound - 3.0 * se,
        ci_high: bound + 3.0 * se,
    })
}

/// Exact `vol(C)` for `d ∈ {1, 2}`.
///
/// The slice of `C` at height `t` is `(1−t)K + tQ` with `K = conv(P)`, and
/// for the unit square the mixed area is half the sum of the two axis widths
/// of `K`. Integrating over `t` gives `w/2 + 1/2` for `d = 1` and
/// `area(K)/3 + (w_x + w_y)/6 + 1/3` for `d = 2`.
pub fn hull_volume_small_d<S: Scalar>(set: &SampleSet<S>) -> Result<S> {
    if set.is_empty() {
        return Ok(S::zero());
    }
    let width = |i: usize| {
        let (lo, hi) = set
            .points
            .iter()
            .fold((S::one(), S::zero()), |(lo, hi), p| {
                (
                    S::min_of(lo, p.coords()[i].clone()),
                    S::max_of(hi, p.coords()[i].clone()),
                )
            });
        hi - lo
    };
    let three = S::from_usize_exact(3);
    let six = S::from_usize_exact(6);
    match set.d() {
        1 => Ok((width(0) + S::one()) * S::half()),
        2 => {
            let pts: Vec<(S, S)> = set
                .points
                .iter()
                .map(|p| (p.coords()[0].clone(), p.coords()[1].clone()))
                .collect();
            let area = polygon_area(&convex_hull_2d(pts));
            Ok(area / three.clone() + (width(0) + width(1)) / six + S::one() / three)
        }
        d => Err(Error::InvalidArgument(format!(
            "exact hull volume is only available for d ≤ 2, got {d}"
        ))),
    }
}

fn cross<S: Scalar>(o: &(S, S), a: &(S, S), b: &(S, S)) -> S {
    (a.0.clone() - o.0.clone()) * (b.1.clone() - o.1.clone())
        - (a.1.clone() - o.1.clone()) * (b.0.clone() - o.0.clone())
}

// Andrew's monotone chain; counter-clockwise, collinear points dropped.
fn convex_hull_2d<S: Scalar>(mut pts: Vec<(S, S)>) -> Vec<(S, S)> {
    pts.sort_by(|a, b| a.partial_cmp(b).expect("finite coordinates"));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<(S, S)> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &(S, S)>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for p in iter {
            while hull.len() >= start + 2
                && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], p) <= S::zero()
            {
                hull.pop();
            }
            hull.push(p.clone());
        }
        hull.pop();
    }
    hull
}

fn polygon_area<S: Scalar>(poly: &[(S, S)]) -> S {
    if poly.len() < 3 {
        return S::zero();
    }
    let twice = (0..poly.len()).fold(S::zero(), |acc, i| {
        let (a, b) = (&poly[i], &poly[(i + 1) % poly.len()]);
        acc + a.0.clone() * b.1.clone() - b.0.clone() * a.1.clone()
    });
    twice.abs() * S::half()
}

/// Writes `x` as a convex combination of at most `d + 1` cube vertices.
///
/// Coordinates are ranked in descending order (ties by index); vertex `k`
/// is the indicator of the top `k` ranks and carries weight
/// `x_(k) − x_(k+1)` with `x_(0) = 1`, `x_(d+1) = 0`. Zero weights are
/// dropped.
pub fn caratheodory_cube_decomposition<S: Scalar>(x: &Point<S>) -> Result<Vec<(Point<S>, S)>> {
    let d = x.dim();
    let c = x.coords();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| c[b].partial_cmp(&c[a]).expect("finite").then(a.cmp(&b)));
    let level = |k: usize| -> S {
        match k {
            0 => S::one(),
            k if k > d => S::zero(),
            k => c[order[k - 1]].clone(),
        }
    };
    let mut out = Vec::with_capacity(d + 1);
    let mut vertex = vec![S::zero(); d];
    for k in 0..=d {
        if k > 0 {
            vertex[order[k - 1]] = S::one();
        }
        let w = level(k) - level(k + 1);
        if w > S::zero() {
            out.push((Point::new(vertex.clone())?, w));
        }
    }
    Ok(out)
}

/// Replaces each sample by the vertices of its decomposition, deduplicated
/// in first-seen order. The hull can only grow, so `f⁺` can only drop.
pub fn vertexize<S: Scalar>(set: &SampleSet<S>) -> Result<SampleSet<S>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for p in set.points() {
        for (v, _) in caratheodory_cube_decomposition(p)? {
            let key: Vec<bool> = v.coords().iter().map(|c| c.is_one()).collect();
            if seen.insert(key) {
                out.push(v);
            }
        }
    }
    SampleSet::new(set.d(), out)
}

fn is_vertex<S: Scalar>(v: &Point<S>) -> bool {
    v.coords().iter().all(|c| c.is_zero() || c.is_one())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ball<F> {
    pub center: Vec<F>,
    pub radius: F,
}

impl<F: Real> Ball<F> {
    pub fn contains(&self, y: &[F], slack: F) -> bool {
        let dist_sq = self
            .center
            .iter()
            .zip(y)
            .fold(F::zero(), |a, (c, v)| a + (*v - *c) * (*v - *c));
        dist_sq <= self.radius * self.radius + slack
    }
}

/// The ball with diameter from `v` to the cube centre: centre `(w₀ + v)/2`,
/// radius `‖w₀ − v‖/2 = √d/4`.
pub fn elekes_ball<F: Real>(v: &Point<F>) -> Result<Ball<F>> {
    if !is_vertex(v) {
        return Err(Error::InvalidArgument(
            "elekes_ball needs a cube vertex".into(),
        ));
    }
    let half = F::from_f64(0.5).expect("literal");
    let center: Vec<F> = v.coords().iter().map(|&c| half * (half + c)).collect();
    let radius = half
        * v.coords()
            .iter()
            .fold(F::zero(), |a, &c| a + (half - c) * (half - c))
            .sqrt();
    Ok(Ball { center, radius })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverCheck {
    pub trials: usize,
    /// First sampled hull point outside every ball, if any.
    pub violation: Option<Vec<f64>>,
}

impl CoverCheck {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

/// Samples `trials` convex combinations of `set` (a random non-empty subset
/// with exponential, i.e. flat-Dirichlet, weights) and checks each lies in
/// `∪_{v ∈ set} B_v`.
pub fn elekes_cover_check(
    set: &SampleSet<f64>,
    trials: usize,
    stream: &RandomStream,
) -> Result<CoverCheck> {
    if set.is_empty() {
        return Err(Error::InvalidArgument(
            "cover check needs at least one vertex".into(),
        ));
    }
    if !set.points().iter().all(is_vertex) {
        return Err(Error::InvalidArgument(
            "cover check needs cube vertices".into(),
        ));
    }
    let balls = set
        .points()
        .iter()
        .map(elekes_ball)
        .collect::<Result<Vec<_>>>()?;
    let d = set.d();
    let n = set.n();
    let mut rng = stream.substream("elekes").rng();
    for _ in 0..trials {
        let mut weights: Vec<f64> = (0..n)
            .map(|_| {
                if rng.random_bool(0.5) {
                    -(1.0 - rng.random::<f64>()).ln()
                } else {
                    0.0
                }
            })
            .collect();
        if weights.iter().all(|w| *w == 0.0) {
            weights[rng.random_range(0..n)] = 1.0;
        }
        let total: f64 = weights.iter().sum();
        let mut y = vec![0.0; d];
        for (w, p) in weights.iter().zip(set.points()) {
            for (yi, ci) in y.iter_mut().zip(p.coords()) {
                *yi += w / total * ci;
            }
        }
        if !balls.iter().any(|b| b.contains(&y, 1e-12)) {
            return Ok(CoverCheck {
                trials,
                violation: Some(y),
            });
        }
    }
    Ok(CoverCheck {
        trials,
        violation: None,
    })
}

/// `min(1, (1 − t₀) + (d + 1) n t₀ (10/11)^d)`.
pub fn volume_upper_bound<S: Scalar>(n: usize, d: usize, t0: S) -> S {
    let ratio = S::from_usize_exact(10) / S::from_usize_exact(11);
    let decay = (0..d).fold(S::one(), |acc, _| acc * ratio.clone());
    let v =
        (S::one() - t0.clone()) + S::from_usize_exact(d + 1) * S::from_usize_exact(n) * t0 * decay;
    S::min_of(v, S::one())
}

/// `⌈(11/10)^d (1 − ε/ε₀) / (d + 1)⌉` in exact arithmetic; `0` for `ε ≥ ε₀`.
pub fn complexity_lower_con(eps: f64, d: usize, eps0: f64) -> Result<BigUint> {
    let eps = exact_eps(eps)?;
    let eps0 = exact_eps(eps0)?;
    let one = BigRational::from_integer(BigInt::from(1));
    let factor = one - eps / eps0;
    let growth = BigRational::new(
        BigInt::from(11).pow(d as u32),
        BigInt::from(10).pow(d as u32),
    );
    let value = growth * factor / BigRational::from_integer(BigInt::from(d + 1));
    Ok(ceil_nonneg(&value))
}
