//! One-dimensional minimisation of convex functions on `[0, ∞)`.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// `(argmin, min, evaluations)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum<F> {
    pub x: F,
    pub value: F,
    pub evals: usize,
}

/// Golden-section search on `[a, b]` until the bracket is narrower than
/// `tol`. Assumes `f` is unimodal there.
pub fn golden_section<F, G>(mut f: G, mut a: F, mut b: F, tol: F) -> Result<Minimum<F>>
where
    F: Real,
    G: FnMut(F) -> Result<F>,
{
    let inv_phi = F::from_f64(0.618_033_988_749_894_8).expect("literal");
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    let mut evals = 2;
    while (b - a).abs() > tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2)?;
        }
        evals += 1;
        if evals > 10_000 {
            return Err(Error::NonConvergence {
                routine: "golden_section",
                detail: format!(
                    "bracket [{:e}, {:e}] did not shrink below {:e}",
                    a.to_f64().unwrap_or(f64::NAN),
                    b.to_f64().unwrap_or(f64::NAN),
                    tol.to_f64().unwrap_or(f64::NAN)
                ),
            });
        }
    }
    let (x, value) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    Ok(Minimum { x, value, evals })
}

/// Brackets the minimiser of a convex `f` on `[0, ∞)` by doubling from
/// `start`: once `f(2x) ≥ f(x)` the minimiser lies in `[x/2, 2x]` (or
/// `[0, 2x]` if no doubling happened).
pub fn bracket_convex<F, G>(mut f: G, start: F, limit: F) -> Result<(F, F)>
where
    F: Real,
    G: FnMut(F) -> Result<F>,
{
    let two = F::one() + F::one();
    let mut lo = F::zero();
    let mut x = start;
    let mut fx = f(x)?;
    loop {
        let next = x * two;
        if next > limit {
            return Err(Error::NonConvergence {
                routine: "bracket_convex",
                detail: format!("still decreasing at {:e}", x.to_f64().unwrap_or(f64::NAN)),
            });
        }
        let fn_ = f(next)?;
        if fn_ >= fx {
            return Ok((lo, next));
        }
        lo = x;
        x = next;
        fx = fn_;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic() {
        let f = |x: f64| Ok((x - 3.7).powi(2));
        let (a, b) = bracket_convex(f, 1.0, 1e9).unwrap();
        assert!(a <= 3.7 && 3.7 <= b);
        let m = golden_section(f, a, b, 1e-10).unwrap();
        assert!((m.x - 3.7).abs() < 1e-9);
        assert!(m.value < 1e-17);
    }

    #[test]
    fn minimiser_at_zero() {
        let f = |x: f64| Ok(x + 2.0);
        let (a, b) = bracket_convex(f, 1.0, 1e9).unwrap();
        assert_eq!((a, b), (0.0, 2.0));
        let m = golden_section(f, a, b, 1e-9).unwrap();
        assert!(m.x < 1e-9 && m.x > 0.0);
    }

    #[test]
    fn unbounded_descent_fails() {
        assert!(bracket_convex(|x: f64| Ok(-x), 1.0, 1e6).is_err());
    }
}
