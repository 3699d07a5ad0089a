//! Exponential-moment bound on the volume of the cap `E_t`.
//!
//! With `s = (1+t)/4`, `vol(E_t) = P(Σ (X_j − s)² ≤ d s²)` for independent
//! uniform `X_j`, and Markov's inequality applied to
//! `exp(α(d s² − Σ (X_j − s)²))` gives `vol(E_t) ≤ (inf_α g(s, α))^d` with
//!
//! ```text
//! g(s, α) = ∫_0^1 exp(α(2sx − x²)) dx.
//! ```
//!
//! `g(s, ·)` is convex (its second derivative is `∫ (2sx − x²)² e^{…} ≥ 0`)
//! with `g(s, 0) = 1` and slope `s − 1/3` at zero, so the infimum is below
//! one exactly when `s < 1/3`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mc::{block_mean, McEstimate};
use crate::optimize::{bracket_convex, golden_section};
use crate::rng::RandomStream;
use crate::scalar::Real;

/// Per-coordinate level that certifies `vol(E_t) ≤ (10/11)^d`.
pub const CERT_LEVEL: f64 = 10.0 / 11.0;

/// Absolute tolerance of the quadrature behind [`g_value`].
pub const G_QUAD_TOL: f64 = 1e-10;

/// Golden-section tolerance in `α`.
pub const ALPHA_TOL: f64 = 1e-9;

/// Grid spacing of the `t₀` scan and the bisection width that follows it.
pub const T0_GRID_STEP: f64 = 1e-3;
pub const T0_BISECT_TOL: f64 = 1e-6;

const MAX_DEPTH: u32 = 48;
const MIN_DEPTH: u32 = 4;

#[allow(clippy::too_many_arguments)]
fn simpson_step<F, G>(
    f: &G,
    a: F,
    b: F,
    fa: F,
    fm: F,
    fb: F,
    whole: F,
    tol: F,
    depth: u32,
) -> Result<F>
where
    F: Real,
    G: Fn(F) -> F,
{
    let two = F::one() + F::one();
    let six = F::from_f64(6.0).expect("literal");
    let four = two * two;
    let m = (a + b) / two;
    let lm = (a + m) / two;
    let rm = (m + b) / two;
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / six * (fa + four * flm + fm);
    let right = (b - m) / six * (fm + four * frm + fb);
    let delta = left + right - whole;
    let fifteen = F::from_f64(15.0).expect("literal");
    if depth + MIN_DEPTH <= MAX_DEPTH && delta.abs() <= fifteen * tol {
        return Ok(left + right + delta / fifteen);
    }
    if depth == 0 {
        return Err(Error::NonConvergence {
            routine: "adaptive simpson",
            detail: format!(
                "subinterval [{:e}, {:e}] error {:e}",
                a.to_f64().unwrap_or(f64::NAN),
                b.to_f64().unwrap_or(f64::NAN),
                delta.to_f64().unwrap_or(f64::NAN)
            ),
        });
    }
    Ok(
        simpson_step(f, a, m, fa, flm, fm, left, tol / two, depth - 1)?
            + simpson_step(f, m, b, fm, frm, fb, right, tol / two, depth - 1)?,
    )
}

/// Adaptive Simpson quadrature of `f` over `[a, b]`.
pub fn adaptive_simpson<F, G>(f: G, a: F, b: F, tol: F) -> Result<F>
where
    F: Real,
    G: Fn(F) -> F,
{
    let two = F::one() + F::one();
    let m = (a + b) / two;
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let six = F::from_f64(6.0).expect("literal");
    let whole = (b - a) / six * (fa + two * two * fm + fb);
    simpson_step(&f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
}

/// `g(s, α) = ∫_0^1 exp(α(2sx − x²)) dx` by adaptive quadrature.
pub fn g_value<F: Real>(s: F, alpha: F) -> Result<F> {
    if alpha.is_nan() || alpha < F::zero() {
        return Err(Error::InvalidArgument("alpha must be non-negative".into()));
    }
    let two = F::one() + F::one();
    let floor = F::epsilon() * F::from_f64(64.0).expect("literal");
    let tol = F::from_f64(G_QUAD_TOL).expect("literal").max(floor);
    adaptive_simpson(
        |x| (alpha * (two * s * x - x * x)).exp(),
        F::zero(),
        F::one(),
        tol,
    )
}

/// Closed form of `g` through the error function:
/// `e^{αs²} √(π/α)/2 · (erf(√α(1−s)) + erf(√α s))`.
pub fn g_value_closed_form(s: f64, alpha: f64) -> f64 {
    if alpha == 0.0 {
        return 1.0;
    }
    let r = alpha.sqrt();
    (alpha * s * s).exp()
        * (std::f64::consts::PI / alpha).sqrt()
        * 0.5
        * (libm::erf(r * (1.0 - s)) + libm::erf(r * s))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChernoffResult<F = f64> {
    pub s: F,
    pub alpha_star: F,
    pub g_min: F,
    /// `g_min < 10/11`.
    pub certified: bool,
}

impl<F: Real> ChernoffResult<F> {
    /// `10/11 − g_min`; positive when certified.
    pub fn margin(&self) -> F {
        F::from_f64(CERT_LEVEL).expect("literal") - self.g_min
    }
}

/// `inf_{α>0} g(s, α)` by doubling bracket and golden-section search.
pub fn g_min<F: Real>(s: F) -> Result<ChernoffResult<F>> {
    let half = F::from_f64(0.5).expect("literal");
    if !(s > F::zero() && s <= half) {
        return Err(Error::InvalidArgument(format!(
            "s must lie in (0, 1/2], got {}",
            s.to_f64().unwrap_or(f64::NAN)
        )));
    }
    // convex with non-negative slope at zero: the infimum is g(s, 0) = 1
    if s * F::from_f64(3.0).expect("literal") >= F::one() {
        return Ok(ChernoffResult {
            s,
            alpha_star: F::zero(),
            g_min: F::one(),
            certified: false,
        });
    }
    let g = |a: F| g_value(s, a);
    let (lo, hi) = bracket_convex(g, F::one(), F::from_f64(1e8).expect("literal"))?;
    let tol = F::from_f64(ALPHA_TOL)
        .expect("literal")
        .max(F::epsilon().sqrt() * hi);
    let m = golden_section(g, lo, hi, tol)?;
    Ok(ChernoffResult {
        s,
        alpha_star: m.x,
        g_min: m.value,
        certified: m.value < F::from_f64(CERT_LEVEL).expect("literal"),
    })
}

/// `s = (1+t)/4`.
pub fn s_of_t(t: f64) -> f64 {
    (1.0 + t) / 4.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct T0Report {
    pub s: f64,
    pub alpha_star: f64,
    pub g_min: f64,
    pub certified: bool,
    pub t0: f64,
    pub eps0: f64,
}

/// Largest `t₀` such that `g_min((1+t)/4) < 10/11` on a `10⁻³` grid of
/// `[0, t₀]`, refined by bisection to `10⁻⁶`. Returns `ε₀ = t₀/2` along with
/// the Chernoff data at `t₀`.
pub fn find_t0() -> Result<T0Report> {
    let certified_at = |t: f64| g_min(s_of_t(t)).map(|r| r.certified);
    if !certified_at(0.0)? {
        return Err(Error::Inconsistent("g_min(1/4) is not below 10/11".into()));
    }
    let steps = (1.0 / T0_GRID_STEP).round() as usize;
    let mut good = 0.0;
    let mut bad = None;
    for i in 1..steps {
        let t = i as f64 * T0_GRID_STEP;
        if certified_at(t)? {
            good = t;
        } else {
            bad = Some(t);
            break;
        }
    }
    let mut lo = good;
    let mut hi = bad.unwrap_or(1.0);
    while hi - lo > T0_BISECT_TOL {
        let mid = 0.5 * (lo + hi);
        if certified_at(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let at = g_min(s_of_t(lo))?;
    if !at.certified {
        return Err(Error::Inconsistent(format!(
            "certification lost at t0 = {lo}"
        )));
    }
    Ok(T0Report {
        s: at.s,
        alpha_star: at.alpha_star,
        g_min: at.g_min,
        certified: at.certified,
        t0: lo,
        eps0: lo / 2.0,
    })
}

/// Monte Carlo estimate of `vol(E_t) = P(Σ (X_j − s)² ≤ d s²)`.
pub fn cap_volume_mc(
    t: f64,
    d: usize,
    samples: usize,
    stream: &RandomStream,
) -> Result<McEstimate> {
    if !(0.0..=1.0).contains(&t) || d == 0 || samples == 0 {
        return Err(Error::InvalidArgument(format!(
            "cap volume needs t in [0,1], d ≥ 1, samples ≥ 1 (t = {t}, d = {d})"
        )));
    }
    let s = s_of_t(t);
    let radius_sq = d as f64 * s * s;
    block_mean(samples, stream, "cap", |rng| {
        let dist: f64 = (0..d).map(|_| (rng.random::<f64>() - s).powi(2)).sum();
        Ok(if dist <= radius_sq { 1.0 } else { 0.0 })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g_at_zero_alpha() {
        for s in [0.1, 0.25, 0.5] {
            assert!((g_value(s, 0.0f64).unwrap() - 1.0).abs() < 1e-14);
        }
        assert!(g_value(0.25, -1.0f64).is_err());
    }

    #[test]
    fn g_slope_at_zero() {
        // d/dα g(s, 0) = ∫ (2sx − x²) dx = s − 1/3
        for s in [0.2, 0.25, 0.4] {
            let h = 1e-5;
            let fd = (g_value(s, h).unwrap() - g_value(s, 0.0f64).unwrap()) / h;
            assert!((fd - (s - 1.0 / 3.0)).abs() < 1e-5, "s = {s}: {fd}");
        }
    }

    #[test]
    fn quadrature_matches_closed_form() {
        for i in 0..=40 {
            let alpha = i as f64 * 0.5;
            let q = g_value(0.25, alpha).unwrap();
            let c = g_value_closed_form(0.25, alpha);
            assert!((q - c).abs() < 1e-8, "alpha = {alpha}");
        }
    }

    #[test]
    fn quarter_is_certified() {
        let r = g_min(0.25f64).unwrap();
        assert!(r.certified);
        assert!(r.alpha_star > 0.0);
        assert!(r.g_min <= g_value(0.25, 1.0).unwrap());
        assert!(r.margin() > 0.0);
        let r32 = g_min(0.25f32).unwrap();
        assert!((r32.g_min as f64 - r.g_min).abs() < 1e-4);
    }

    #[test]
    fn one_third_is_not() {
        let r = g_min(1.0f64 / 3.0).unwrap();
        assert!(!r.certified);
        assert!((r.g_min - 1.0).abs() < 1e-8);
        let r = g_min(0.5f64).unwrap();
        assert_eq!((r.g_min, r.alpha_star), (1.0, 0.0));
        let below = g_min(0.33f64).unwrap();
        assert!(below.g_min < 1.0 && below.alpha_star > 0.0);
        assert!(g_min(0.0f64).is_err());
        assert!(g_min(0.6f64).is_err());
    }

    #[test]
    fn cap_edge_cases() {
        let s = RandomStream::new(3);
        assert_eq!(cap_volume_mc(1.0, 7, 2000, &s).unwrap().estimate, 1.0);
        let e = cap_volume_mc(0.0, 1, 20_000, &s).unwrap();
        assert!((e.estimate - 0.5).abs() < 3.0 * e.std_error + 1e-12);
        assert!(cap_volume_mc(1.5, 2, 10, &s).is_err());
    }
}
