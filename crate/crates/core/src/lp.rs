//! Dense tableau simplex for small inequality-form programs
//!
//! ```text
//! maximise  c·x   subject to  A x ≤ b,  x_j ≥ 0 where flagged
//! ```
//!
//! with `b ≥ 0`, so the slack basis is feasible and no phase one is needed.
//! Pivoting follows Bland's rule (lowest-index entering column, lowest-index
//! leaving basic variable among ratio ties), which cannot cycle. Generic over
//! [`Scalar`]; with `BigRational` the solve is exact.

use crate::error::{Error, LpFailure, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram<S = f64> {
    pub objective: Vec<S>,
    pub rows: Vec<Vec<S>>,
    pub rhs: Vec<S>,
    /// `true` for `x_j ≥ 0`, `false` for a free variable.
    pub nonneg: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution<S = f64> {
    pub x: Vec<S>,
    pub objective: S,
    pub pivots: usize,
}

impl<S: Scalar> LinearProgram<S> {
    /// All variables non-negative.
    pub fn new(objective: Vec<S>, rows: Vec<Vec<S>>, rhs: Vec<S>) -> Self {
        let nonneg = vec![true; objective.len()];
        Self {
            objective,
            rows,
            rhs,
            nonneg,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.rows.len()
    }

    fn fail(&self, reason: LpFailure) -> Error {
        Error::Lp {
            reason,
            instance: self.describe(),
        }
    }

    /// Human-readable dump of the instance, attached to solver errors.
    pub fn describe(&self) -> String {
        let v = |xs: &[S]| -> Vec<f64> { xs.iter().map(Scalar::to_f64_lossy).collect() };
        let rows: Vec<String> = self
            .rows
            .iter()
            .zip(&self.rhs)
            .map(|(r, b)| format!("{:?} <= {}", v(r), b.to_f64_lossy()))
            .collect();
        format!(
            "max {:?}·x s.t. [{}], nonneg {:?}",
            v(&self.objective),
            rows.join("; "),
            self.nonneg
        )
    }

    pub fn solve(&self) -> Result<LpSolution<S>> {
        let n = self.num_vars();
        let m = self.num_constraints();
        if self.rhs.len() != m || self.nonneg.len() != n || self.rows.iter().any(|r| r.len() != n) {
            return Err(self.fail(LpFailure::Malformed));
        }
        let tol = S::tolerance();
        if self.rhs.iter().any(|b| *b < -tol.clone()) {
            return Err(self.fail(LpFailure::NegativeRhs));
        }

        // Free variables are split as x = x⁺ − x⁻; `columns[k]` is the
        // original index and sign of tableau column k.
        let mut columns: Vec<(usize, bool)> = (0..n).map(|j| (j, true)).collect();
        columns.extend((0..n).filter(|&j| !self.nonneg[j]).map(|j| (j, false)));
        let nv = columns.len();
        let width = nv + m + 1;

        let signed = |v: &S, pos: bool| if pos { v.clone() } else { -v.clone() };
        let mut tab: Vec<Vec<S>> = (0..m)
            .map(|i| {
                let mut row: Vec<S> = columns
                    .iter()
                    .map(|&(j, pos)| signed(&self.rows[i][j], pos))
                    .collect();
                row.extend((0..m).map(|k| if k == i { S::one() } else { S::zero() }));
                row.push(S::max_of(self.rhs[i].clone(), S::zero()));
                row
            })
            .collect();
        let mut obj: Vec<S> = columns
            .iter()
            .map(|&(j, pos)| -signed(&self.objective[j], pos))
            .collect();
        obj.extend(std::iter::repeat_n(S::zero(), m + 1));
        let mut basis: Vec<usize> = (nv..nv + m).collect();

        let max_pivots = 100 * (nv + m) + 1000;
        let mut pivots = 0;
        while let Some(enter) = (0..nv + m).find(|&j| obj[j] < -tol.clone()) {
            let mut leave: Option<(usize, S)> = None;
            for (i, row) in tab.iter().enumerate() {
                if row[enter] <= tol {
                    continue;
                }
                let ratio = row[width - 1].clone() / row[enter].clone();
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((bi, best)) => {
                        if ratio < best || (ratio == best && basis[i] < basis[bi]) {
                            Some((i, ratio))
                        } else {
                            Some((bi, best))
                        }
                    }
                };
            }
            let Some((r, _)) = leave else {
                return Err(self.fail(LpFailure::Unbounded));
            };
            pivots += 1;
            if pivots > max_pivots {
                return Err(self.fail(LpFailure::IterationLimit));
            }

            let p = tab[r][enter].clone();
            for v in tab[r].iter_mut() {
                *v = v.clone() / p.clone();
            }
            let pivot_row = tab[r].clone();
            for (i, row) in tab.iter_mut().enumerate() {
                if i == r || row[enter].is_zero() {
                    continue;
                }
                let f = row[enter].clone();
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v = v.clone() - f.clone() * pv.clone();
                }
            }
            if !obj[enter].is_zero() {
                let f = obj[enter].clone();
                for (v, pv) in obj.iter_mut().zip(&pivot_row) {
                    *v = v.clone() - f.clone() * pv.clone();
                }
            }
            basis[r] = enter;
        }

        let mut x = vec![S::zero(); n];
        for (i, &b) in basis.iter().enumerate() {
            if b < nv {
                let (j, pos) = columns[b];
                x[j] = x[j].clone() + signed(&tab[i][width - 1], pos);
            }
        }
        Ok(LpSolution {
            x,
            objective: obj[width - 1].clone(),
            pivots,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;
    use num_rational::BigRational;

    fn r(a: i64) -> BigRational {
        ratio(a, 1)
    }

    #[test]
    fn textbook_instance() {
        // max 3x + 5y, x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18  →  (2, 6), 36
        let lp = LinearProgram::new(
            vec![r(3), r(5)],
            vec![vec![r(1), r(0)], vec![r(0), r(2)], vec![r(3), r(2)]],
            vec![r(4), r(12), r(18)],
        );
        let s = lp.solve().unwrap();
        assert_eq!(s.objective, r(36));
        assert_eq!(s.x, vec![r(2), r(6)]);

        let lpf = LinearProgram::new(
            vec![3.0f64, 5.0],
            vec![vec![1.0, 0.0], vec![0.0, 2.0], vec![3.0, 2.0]],
            vec![4.0, 12.0, 18.0],
        );
        assert!((lpf.solve().unwrap().objective - 36.0).abs() < 1e-12);
    }

    #[test]
    fn free_variable() {
        // max -x with x ≥ -3 written as -x ≤ 3, x free  →  x = -3
        let mut lp = LinearProgram::new(vec![-1.0f64], vec![vec![-1.0]], vec![3.0]);
        lp.nonneg = vec![false];
        let s = lp.solve().unwrap();
        assert!((s.x[0] + 3.0).abs() < 1e-12);
        assert!((s.objective - 3.0).abs() < 1e-12);
    }

    #[test]
    fn failures_carry_instance() {
        let lp = LinearProgram::new(vec![1.0], vec![vec![-1.0]], vec![1.0]);
        match lp.solve() {
            Err(Error::Lp { reason, instance }) => {
                assert_eq!(reason, LpFailure::Unbounded);
                assert!(instance.contains("max [1.0]"));
            }
            other => panic!("{other:?}"),
        }
        let lp = LinearProgram::new(vec![1.0], vec![vec![1.0]], vec![-1.0]);
        assert!(matches!(
            lp.solve(),
            Err(Error::Lp {
                reason: LpFailure::NegativeRhs,
                ..
            })
        ));
        let lp = LinearProgram::new(vec![1.0], vec![vec![1.0, 2.0]], vec![1.0]);
        assert!(matches!(
            lp.solve(),
            Err(Error::Lp {
                reason: LpFailure::Malformed,
                ..
            })
        ));
    }

    #[test]
    fn degenerate_does_not_cycle() {
        // Beale's cycling example (cycles under Dantzig's rule)
        let lp = LinearProgram::new(
            vec![ratio(3, 4), r(-150), ratio(1, 50), r(-6)],
            vec![
                vec![ratio(1, 4), r(-60), ratio(-1, 25), r(9)],
                vec![ratio(1, 2), r(-90), ratio(-1, 50), r(3)],
                vec![r(0), r(0), r(1), r(0)],
            ],
            vec![r(0), r(0), r(1)],
        );
        let s = lp.solve().unwrap();
        assert_eq!(s.objective, ratio(1, 20));
    }

    #[test]
    fn empty_program() {
        let lp: LinearProgram<f64> = LinearProgram::new(vec![], vec![vec![]], vec![1.0]);
        let s = lp.solve().unwrap();
        assert_eq!(s.objective, 0.0);
        assert!(s.x.is_empty());
    }
}
