//! Fooling functions for monotone integrands.
//!
//! The probe is the threshold function `f*(x) = [Σ x_k ≥ d/2]`. Given the
//! points an algorithm queried, the points where `f*` vanished (`L`) and the
//! points where it was one (`U`) define the extremal monotone functions
//!
//! ```text
//! f⁺(x) = 0 iff x ≤ t for some t ∈ L,   else 1
//! f⁻(x) = 1 iff x ≥ t for some t ∈ U,   else 0
//! ```
//!
//! which agree with `f*` on every queried point. Their integral gap is the
//! complement of a union of anchored boxes minus another such union, and is
//! computed exactly by inclusion–exclusion.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mc::{block_mean, McEstimate};
use crate::problem::Point;
use crate::rng::RandomStream;
use crate::scalar::{Real, Scalar};

/// Largest corner count handled by exact inclusion–exclusion (2^n terms).
pub const EXACT_CORNER_CAP: usize = 20;

/// Samples used when a union has too many corners for the exact method.
pub const FALLBACK_SAMPLES: usize = 1 << 20;

const FALLBACK_SEED: u64 = 0x6d6f_6e6f_746f_6e65;

/// `1` iff `Σ x_k ≥ d/2` (boundary included), else `0`.
pub fn threshold_value<S: Scalar>(x: &Point<S>) -> S {
    let half_d = S::from_usize_exact(x.dim()) * S::half();
    if x.sum() >= half_d {
        S::one()
    } else {
        S::zero()
    }
}

/// Which family of anchored boxes a corner spans.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoxMode {
    /// `[0, t]`
    Lower,
    /// `[t, 1]`
    Upper,
}

/// Volume of a union of anchored boxes. `std_error` is `None` for exact
/// results and carries the Monte Carlo standard error otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxVolume<S> {
    pub value: S,
    pub std_error: Option<f64>,
}

impl<S> BoxVolume<S> {
    pub fn is_exact(&self) -> bool {
        self.std_error.is_none()
    }
}

fn side<S: Scalar>(c: &S, mode: BoxMode) -> S {
    match mode {
        BoxMode::Lower => c.clone(),
        BoxMode::Upper => S::one() - c.clone(),
    }
}

/// Exact volume of `∪_j [0, t_j]` (lower) or `∪_j [t_j, 1]` (upper) by
/// inclusion–exclusion over all non-empty subsets of corners.
///
/// Subsets are visited depth-first in index order, so the floating-point
/// summation order is fixed. A subset whose intersection is empty prunes all
/// of its supersets.
pub fn inclusion_exclusion<S: Scalar>(corners: &[Point<S>], mode: BoxMode) -> Result<S> {
    let Some(first) = corners.first() else {
        return Ok(S::zero());
    };
    let d = first.dim();
    if let Some(bad) = corners.iter().find(|c| c.dim() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: bad.dim(),
        });
    }

    // Intersection of [0,a] and [0,b] is [0, min(a,b)]; of [a,1] and [b,1]
    // is [max(a,b), 1].
    fn combine<S: Scalar>(acc: &[S], c: &Point<S>, mode: BoxMode) -> Vec<S> {
        acc.iter()
            .zip(c.coords())
            .map(|(a, b)| match mode {
                BoxMode::Lower => S::min_of(a.clone(), b.clone()),
                BoxMode::Upper => S::max_of(a.clone(), b.clone()),
            })
            .collect()
    }

    fn visit<S: Scalar>(
        corners: &[Point<S>],
        start: usize,
        acc: &[S],
        size: usize,
        mode: BoxMode,
        total: &mut S,
    ) {
        for j in start..corners.len() {
            let meet = combine(acc, &corners[j], mode);
            let vol = meet.iter().fold(S::one(), |p, c| p * side(c, mode));
            if vol.is_zero() {
                continue;
            }
            if (size + 1) % 2 == 1 {
                *total = total.clone() + vol;
            } else {
                *total = total.clone() - vol;
            }
            visit(corners, j + 1, &meet, size + 1, mode, total);
        }
    }

    let identity = match mode {
        BoxMode::Lower => vec![S::one(); d],
        BoxMode::Upper => vec![S::zero(); d],
    };
    let mut total = S::zero();
    visit(corners, 0, &identity, 0, mode, &mut total);
    Ok(total)
}

/// Monte Carlo estimate of the same union volume.
pub fn union_box_volume_mc<S: Scalar>(
    corners: &[Point<S>],
    mode: BoxMode,
    samples: usize,
    stream: &RandomStream,
) -> Result<McEstimate> {
    let Some(first) = corners.first() else {
        return Ok(McEstimate {
            estimate: 0.0,
            std_error: 0.0,
            samples,
        });
    };
    let d = first.dim();
    let flat: Vec<Vec<f64>> = corners
        .iter()
        .map(|c| c.coords().iter().map(Scalar::to_f64_lossy).collect())
        .collect();
    block_mean(samples, stream, "union-box", |rng| {
        let x: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
        let hit = flat.iter().any(|t| match mode {
            BoxMode::Lower => x.iter().zip(t).all(|(a, b)| a <= b),
            BoxMode::Upper => x.iter().zip(t).all(|(a, b)| a >= b),
        });
        Ok(if hit { 1.0 } else { 0.0 })
    })
}

/// Union volume: exact up to [`EXACT_CORNER_CAP`] corners, Monte Carlo
/// (flagged through `std_error`) beyond.
pub fn union_box_volume<S: Scalar>(corners: &[Point<S>], mode: BoxMode) -> Result<BoxVolume<S>> {
    if corners.len() <= EXACT_CORNER_CAP {
        return Ok(BoxVolume {
            value: inclusion_exclusion(corners, mode)?,
            std_error: None,
        });
    }
    let est = union_box_volume_mc(
        corners,
        mode,
        FALLBACK_SAMPLES,
        &RandomStream::new(FALLBACK_SEED),
    )?;
    Ok(BoxVolume {
        value: S::from_f64_lossy(est.estimate),
        std_error: Some(est.std_error),
    })
}

/// The extremal monotone pair matching a threshold-function transcript.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneFoolingPair<S = f64> {
    pub d: usize,
    /// Queried points where the threshold function is 0.
    pub lower: Vec<Point<S>>,
    /// Queried points where it is 1.
    pub upper: Vec<Point<S>>,
    /// `INT(f⁺) − INT(f⁻)`.
    pub exact_gap: S,
    /// `Some(se)` if `exact_gap` came from the Monte Carlo fallback.
    pub gap_std_error: Option<f64>,
    /// `max(0, 1 − n·2^-d)`.
    pub guaranteed_gap: S,
}

#[derive(Serialize)]
struct PairJson {
    d: usize,
    #[serde(rename = "L")]
    lower: Vec<Vec<f64>>,
    #[serde(rename = "U")]
    upper: Vec<Vec<f64>>,
    exact_gap: f64,
    guaranteed_gap: f64,
}

impl<S: Scalar> MonotoneFoolingPair<S> {
    /// `ℓ`, the number of zero values.
    pub fn ell(&self) -> usize {
        self.lower.len()
    }

    pub fn n(&self) -> usize {
        self.lower.len() + self.upper.len()
    }

    pub fn gap_is_exact(&self) -> bool {
        self.gap_std_error.is_none()
    }

    pub fn f_plus(&self, x: &Point<S>) -> S {
        if self.lower.iter().any(|t| x.le(t)) {
            S::zero()
        } else {
            S::one()
        }
    }

    pub fn f_minus(&self, x: &Point<S>) -> S {
        if self.upper.iter().any(|t| t.le(x)) {
            S::one()
        } else {
            S::zero()
        }
    }

    /// Certified worst-case error of any algorithm producing this transcript.
    pub fn error_lower_bound(&self) -> S {
        self.exact_gap.clone() * S::half()
    }

    /// `{d, L, U, exact_gap, guaranteed_gap}`.
    pub fn to_json(&self) -> Result<String> {
        let flat = |ps: &[Point<S>]| -> Vec<Vec<f64>> {
            ps.iter()
                .map(|p| p.coords().iter().map(Scalar::to_f64_lossy).collect())
                .collect()
        };
        Ok(serde_json::to_string(&PairJson {
            d: self.d,
            lower: flat(&self.lower),
            upper: flat(&self.upper),
            exact_gap: self.exact_gap.to_f64_lossy(),
            guaranteed_gap: self.guaranteed_gap.to_f64_lossy(),
        })?)
    }
}

/// `max(0, 1 − n·2^-d)`.
pub fn guaranteed_gap<S: Scalar>(n: usize, d: usize) -> S {
    let g = S::one() - S::from_usize_exact(n) * S::pow2_neg(d as u32);
    S::max_of(g, S::zero())
}

/// `INT(f⁺) − INT(f⁻) = (1 − vol ∪[0,t], t ∈ L) − vol ∪[t,1], t ∈ U`.
pub fn exact_gap<S: Scalar>(pair: &MonotoneFoolingPair<S>) -> Result<BoxVolume<S>> {
    gap_from_corners(&pair.lower, &pair.upper)
}

fn gap_from_corners<S: Scalar>(lower: &[Point<S>], upper: &[Point<S>]) -> Result<BoxVolume<S>> {
    let lo = union_box_volume(lower, BoxMode::Lower)?;
    let up = union_box_volume(upper, BoxMode::Upper)?;
    let std_error = match (lo.std_error, up.std_error) {
        (None, None) => None,
        (a, b) => Some((a.unwrap_or(0.0).powi(2) + b.unwrap_or(0.0).powi(2)).sqrt()),
    };
    Ok(BoxVolume {
        value: S::one() - lo.value - up.value,
        std_error,
    })
}

/// Splits queried points by the threshold function and computes both gaps.
pub fn build_pair<S: Scalar>(points: &[Point<S>], d: usize) -> Result<MonotoneFoolingPair<S>> {
    if let Some(bad) = points.iter().find(|p| p.dim() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: bad.dim(),
        });
    }
    let (upper, lower): (Vec<_>, Vec<_>) = points
        .iter()
        .cloned()
        .partition(|p| threshold_value(p) == S::one());
    let gap = gap_from_corners(&lower, &upper)?;
    Ok(MonotoneFoolingPair {
        d,
        guaranteed_gap: guaranteed_gap(points.len(), d),
        exact_gap: gap.value,
        gap_std_error: gap.std_error,
        lower,
        upper,
    })
}

/// `max(0, ½(1 − n·2^-d))`.
pub fn error_lower_bound_mon<S: Scalar>(n: usize, d: usize) -> S {
    guaranteed_gap::<S>(n, d) * S::half()
}

/// Ceiling of a non-negative rational; negatives map to zero.
pub(crate) fn ceil_nonneg(r: &BigRational) -> BigUint {
    if !r.is_positive() {
        return BigUint::zero();
    }
    let (q, rem) = r.numer().div_rem(r.denom());
    let q = if rem.is_zero() {
        q
    } else {
        q + BigInt::from(1)
    };
    q.to_biguint().expect("positive")
}

pub(crate) fn exact_eps(eps: f64) -> Result<BigRational> {
    if !eps.is_finite() || eps <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "eps must be positive and finite, got {eps}"
        )));
    }
    Ok(BigRational::from_float(eps).expect("finite"))
}

/// `⌈2^d (1 − 2ε)⌉`, evaluated in exact rational arithmetic; `0` for `ε ≥ ½`.
pub fn complexity_lower_mon(eps: f64, d: usize) -> Result<BigUint> {
    let eps = exact_eps(eps)?;
    let two = BigRational::from_integer(BigInt::from(2));
    let factor = BigRational::from_integer(BigInt::from(1)) - two * eps;
    let scaled = factor * BigRational::from_integer(BigInt::from(1) << d);
    Ok(ceil_nonneg(&scaled))
}

/// Result of maximising `∏ y_j` over `y ∈ [0,1]^d`, `Σ y_j ≤ d/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductMax<F> {
    pub value: F,
    pub maximizer: Vec<F>,
    pub iterations: usize,
}

// Euclidean projection onto {floor ≤ y ≤ 1, Σ y ≤ cap}.
fn project_capped<F: Real>(y: &mut [F], cap: F, floor: F) {
    let clamp = |v: F| v.max(floor).min(F::one());
    let total = |tau: F, y: &[F]| y.iter().fold(F::zero(), |s, &v| s + clamp(v - tau));
    if total(F::zero(), y) <= cap {
        y.iter_mut().for_each(|v| *v = clamp(*v));
        return;
    }
    let mut lo = F::zero();
    let mut hi = y.iter().fold(F::zero(), |m, &v| m.max(v));
    for _ in 0..200 {
        let mid = (lo + hi) / (F::one() + F::one());
        if total(mid, y) > cap {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    y.iter_mut().for_each(|v| *v = clamp(*v - hi));
}

/// Maximises `∏ y_j` subject to `y ∈ [0,1]^d`, `Σ y_j ≤ d/2` by projected
/// gradient ascent on `Σ log y_j` from an unbalanced feasible start.
/// The maximum is `2^-d`, attained at `y ≡ ½`.
pub fn simplex_product_max<F: Real>(d: usize) -> Result<ProductMax<F>> {
    if d == 0 {
        return Err(Error::InvalidArgument(
            "dimension must be at least 1".into(),
        ));
    }
    let lit = |x: f64| F::from_f64(x).expect("literal");
    let cap = F::from_usize(d).expect("d") * lit(0.5);
    let floor = lit(1e-12);
    let step = lit(0.02);
    // 0.3 .. 0.7, summing to d/2
    let mut y: Vec<F> = (0..d)
        .map(|j| {
            if d == 1 {
                lit(0.3)
            } else {
                lit(0.3 + 0.4 * j as f64 / (d - 1) as f64)
            }
        })
        .collect();
    let tol = F::epsilon() * lit(8.0);
    const MAX_ITER: usize = 100_000;
    let mut last_move = F::infinity();
    for it in 1..=MAX_ITER {
        let prev = y.clone();
        for v in y.iter_mut() {
            *v = *v + step / *v;
        }
        project_capped(&mut y, cap, floor);
        last_move = y
            .iter()
            .zip(&prev)
            .fold(F::zero(), |m, (a, b)| m.max((*a - *b).abs()));
        if last_move <= tol {
            let value = y.iter().fold(F::one(), |p, &v| p * v);
            return Ok(ProductMax {
                value,
                maximizer: y,
                iterations: it,
            });
        }
    }
    Err(Error::NonConvergence {
        routine: "simplex_product_max",
        detail: format!(
            "d = {d}, last step {:e}, iterate {:?}",
            last_move.to_f64_lossy(),
            y.iter().map(Scalar::to_f64_lossy).collect::<Vec<_>>()
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;
    use proptest::prelude::*;

    fn p(c: &[f64]) -> Point<f64> {
        Point::new(c.to_vec()).unwrap()
    }

    fn q(c: &[(i64, i64)]) -> Point<BigRational> {
        Point::new(c.iter().map(|&(a, b)| ratio(a, b)).collect()).unwrap()
    }

    #[test]
    fn threshold_cases() {
        assert_eq!(threshold_value(&p(&[0.0; 4])), 0.0);
        assert_eq!(threshold_value(&p(&[1.0; 4])), 1.0);
        assert_eq!(threshold_value(&p(&[0.2, 0.8, 0.5, 0.5])), 1.0);
        assert_eq!(threshold_value(&q(&[(1, 3), (2, 3), (1, 2)])), ratio(1, 1));
        assert_eq!(threshold_value(&q(&[(1, 3), (2, 3), (1, 3)])), ratio(0, 1));
    }

    #[test]
    fn pair_functions() {
        let pair = MonotoneFoolingPair {
            d: 2,
            lower: vec![p(&[0.5, 0.5])],
            upper: vec![p(&[0.6, 0.7])],
            exact_gap: 0.0,
            gap_std_error: None,
            guaranteed_gap: 0.0,
        };
        assert_eq!(pair.f_plus(&p(&[0.5, 0.5])), 0.0);
        assert_eq!(pair.f_plus(&p(&[0.6, 0.4])), 1.0);
        assert_eq!(pair.f_minus(&p(&[0.7, 0.7])), 1.0);
        assert_eq!(pair.f_minus(&p(&[0.7, 0.6])), 0.0);
    }

    #[test]
    fn union_examples() {
        assert_eq!(
            inclusion_exclusion(&[p(&[0.5; 5])], BoxMode::Lower).unwrap(),
            1.0 / 32.0
        );
        let v = inclusion_exclusion(&[p(&[0.9, 0.9])], BoxMode::Upper).unwrap();
        assert!((v - 0.01).abs() < 1e-15);
        let exact = inclusion_exclusion(
            &[q(&[(1, 2), (1, 2)]), q(&[(1, 4), (1, 1)])],
            BoxMode::Lower,
        )
        .unwrap();
        assert_eq!(exact, ratio(3, 8));
        assert_eq!(
            inclusion_exclusion::<f64>(&[], BoxMode::Upper).unwrap(),
            0.0
        );
    }

    #[test]
    fn gap_examples() {
        let pair = build_pair(&[q(&[(1, 2), (2, 5)]), q(&[(3, 5), (7, 10)])], 2).unwrap();
        assert_eq!(pair.ell(), 1);
        assert_eq!(pair.exact_gap, ratio(68, 100));
        assert_eq!(pair.guaranteed_gap, ratio(1, 2));

        let empty = build_pair::<f64>(&[], 3).unwrap();
        assert_eq!(empty.exact_gap, 1.0);
        assert_eq!(empty.guaranteed_gap, 1.0);

        for d in 1..=12 {
            let pair = build_pair(&[Point::splat(d, 0.49).unwrap()], d).unwrap();
            assert_eq!(pair.ell(), 1);
            assert!(pair.exact_gap >= pair.guaranteed_gap);
        }
    }

    #[test]
    fn pair_json_shape() {
        let pair = build_pair(&[p(&[0.5, 0.4]), p(&[0.6, 0.7])], 2).unwrap();
        let v: serde_json::Value = serde_json::from_str(&pair.to_json().unwrap()).unwrap();
        assert_eq!(v["d"], 2);
        assert_eq!(v["L"][0][1], 0.4);
        assert_eq!(v["U"][0][0], 0.6);
        assert!((v["exact_gap"].as_f64().unwrap() - 0.68).abs() < 1e-12);
        assert_eq!(v["guaranteed_gap"], 0.5);
    }

    #[test]
    fn fallback_beyond_cap() {
        let corners: Vec<_> = (0..EXACT_CORNER_CAP + 1)
            .map(|j| p(&[0.1 + 0.03 * j as f64, 0.8 - 0.03 * j as f64]))
            .collect();
        let v = union_box_volume(&corners, BoxMode::Lower).unwrap();
        assert!(!v.is_exact());
        // staircase union area, computed directly
        let mut sorted: Vec<(f64, f64)> = corners
            .iter()
            .map(|c| (c.coords()[0], c.coords()[1]))
            .collect();
        sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut area = 0.0;
        let mut prev_x = 0.0;
        for (i, &(x, _)) in sorted.iter().enumerate() {
            let h = sorted[i..].iter().map(|c| c.1).fold(0.0, f64::max);
            area += (x - prev_x) * h;
            prev_x = x;
        }
        assert!((v.value - area).abs() < 4.0 * v.std_error.unwrap());
    }

    #[test]
    fn bound_formulas() {
        assert_eq!(error_lower_bound_mon::<f64>(0, 7), 0.5);
        assert_eq!(error_lower_bound_mon::<f64>(1024, 10), 0.0);
        assert_eq!(error_lower_bound_mon::<f64>(5000, 10), 0.0);
        assert_eq!(error_lower_bound_mon::<f64>(100, 10), 0.451171875);
        assert_eq!(
            error_lower_bound_mon::<BigRational>(100, 10),
            ratio(231, 512)
        );

        assert_eq!(
            complexity_lower_mon(0.25, 10).unwrap(),
            BigUint::from(512u32)
        );
        assert_eq!(complexity_lower_mon(0.5, 10).unwrap(), BigUint::zero());
        assert_eq!(complexity_lower_mon(0.7, 3).unwrap(), BigUint::zero());
        assert_eq!(
            complexity_lower_mon(1e-300, 10).unwrap(),
            BigUint::from(1024u32)
        );
        assert_eq!(
            complexity_lower_mon(0.49, 10).unwrap(),
            BigUint::from(21u32)
        );
        assert_eq!(
            complexity_lower_mon(0.25, 100).unwrap(),
            BigUint::from(1u32) << 99usize
        );
        assert!(complexity_lower_mon(0.0, 3).is_err());
        assert!(complexity_lower_mon(f64::NAN, 3).is_err());
    }

    #[test]
    fn product_max_small() {
        assert!((simplex_product_max::<f64>(1).unwrap().value - 0.5).abs() < 1e-12);
        assert!((simplex_product_max::<f64>(2).unwrap().value - 0.25).abs() < 1e-12);
        let r = simplex_product_max::<f32>(3).unwrap();
        assert!((r.value - 0.125).abs() < 1e-5);
        assert!(simplex_product_max::<f64>(0).is_err());
    }

    proptest! {
        #[test]
        fn lower_bound_monotone_in_n_and_d(n in 0usize..4000, d in 1usize..12) {
            let b = |n, d| error_lower_bound_mon::<f64>(n, d);
            prop_assert!(b(n + 1, d) <= b(n, d));
            if n < (1usize << d) {
                prop_assert!(b(n, d + 1) >= b(n, d));
            }
        }

        #[test]
        fn pair_agrees_and_bounds_hold(
            d in 1usize..6,
            raw in prop::collection::vec(prop::collection::vec(0.0f64..=1.0, 5), 0..7),
        ) {
            let pts: Vec<Point<f64>> = raw.iter().map(|r| Point::new(r[..d].to_vec()).unwrap()).collect();
            let pair = build_pair(&pts, d).unwrap();
            for t in &pts {
                let v = threshold_value(t);
                prop_assert_eq!(pair.f_plus(t), v);
                prop_assert_eq!(pair.f_minus(t), v);
            }
            prop_assert!(pair.exact_gap >= pair.guaranteed_gap - 1e-12);
            prop_assert!(pair.exact_gap >= -1e-12 && pair.exact_gap <= 1.0 + 1e-12);
        }
    }
}
