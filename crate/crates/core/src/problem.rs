//! Points of the unit cube, function-value oracles, adaptive algorithms and
//! the transcripts they produce.
//!
//! An algorithm only ever sees the values returned for the points it asked
//! about. [`run_algorithm`] is the single place where the two meet, so any
//! two oracles that agree on a run's query points drive the algorithm
//! through the same transcript and output.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A point of `[0,1]^d`. Coordinates are validated on construction,
/// endpoints included.
#[derive(Debug, Clone, PartialEq)]
pub struct Point<S = f64> {
    coords: Vec<S>,
}

impl<S: Scalar> Point<S> {
    pub fn new(coords: Vec<S>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidArgument(
                "a point needs at least one coordinate".into(),
            ));
        }
        let zero = S::zero();
        let one = S::one();
        for (index, c) in coords.iter().enumerate() {
            if !(*c >= zero && *c <= one) {
                return Err(Error::Domain {
                    index,
                    value: c.to_f64_lossy(),
                });
            }
        }
        Ok(Self { coords })
    }

    /// Builds a point from `f64` coordinates converted into `S`.
    pub fn from_f64s(coords: &[f64]) -> Result<Self> {
        for (index, c) in coords.iter().enumerate() {
            if !c.is_finite() {
                return Err(Error::Domain { index, value: *c });
            }
        }
        Self::new(coords.iter().map(|c| S::from_f64_lossy(*c)).collect())
    }

    /// `(v, v, ..., v)` in dimension `d`.
    pub fn splat(d: usize, v: S) -> Result<Self> {
        Self::new(vec![v; d])
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[S] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<S> {
        self.coords
    }

    pub fn sum(&self) -> S {
        self.coords.iter().cloned().fold(S::zero(), |a, b| a + b)
    }

    /// Componentwise `self <= other`.
    pub fn le(&self, other: &Self) -> bool {
        self.coords.iter().zip(&other.coords).all(|(a, b)| a <= b)
    }

    pub fn to_f64(&self) -> Point<f64> {
        Point {
            coords: self
                .coords
                .iter()
                .map(|c| c.to_f64_lossy().clamp(0.0, 1.0))
                .collect(),
        }
    }
}

/// The function class an oracle claims membership of.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FunctionClass {
    Monotone,
    Convex,
    Unrestricted,
}

/// A `[0,1]`-valued function on the unit cube, evaluated pointwise.
pub trait EvalOracle<S: Scalar = f64> {
    fn dim(&self) -> usize;
    fn eval(&self, x: &Point<S>) -> S;
    fn class(&self) -> FunctionClass;
}

impl<S: Scalar, O: EvalOracle<S> + ?Sized> EvalOracle<S> for &O {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn eval(&self, x: &Point<S>) -> S {
        (**self).eval(x)
    }
    fn class(&self) -> FunctionClass {
        (**self).class()
    }
}

/// Ordered `(point, value)` records of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Transcript<S = f64> {
    records: Vec<(Point<S>, S)>,
}

impl<S: Scalar> Default for Transcript<S> {
    fn default() -> Self {
        Self {
            records: Vec::new(),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct RecordJson {
    point: Vec<f64>,
    value: f64,
}

impl<S: Scalar> Transcript<S> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, point: Point<S>, value: S) {
        self.records.push((point, value));
    }

    pub fn n(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> &[(Point<S>, S)] {
        &self.records
    }

    pub fn points(&self) -> impl Iterator<Item = &Point<S>> {
        self.records.iter().map(|(p, _)| p)
    }

    pub fn values(&self) -> impl Iterator<Item = &S> {
        self.records.iter().map(|(_, v)| v)
    }

    pub fn last_value(&self) -> Option<&S> {
        self.records.last().map(|(_, v)| v)
    }

    /// JSON array of `{"point": [...], "value": v}` in query order.
    pub fn to_json(&self) -> Result<String> {
        let rows: Vec<RecordJson> = self
            .records
            .iter()
            .map(|(p, v)| RecordJson {
                point: p.coords().iter().map(Scalar::to_f64_lossy).collect(),
                value: v.to_f64_lossy(),
            })
            .collect();
        Ok(serde_json::to_string(&rows)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let rows: Vec<RecordJson> = serde_json::from_str(text)?;
        let mut t = Self::new();
        for r in rows {
            t.push(Point::from_f64s(&r.point)?, S::from_f64_lossy(r.value));
        }
        Ok(t)
    }
}

/// What an algorithm wants to do next.
#[derive(Debug, Clone, PartialEq)]
pub enum Query<S = f64> {
    /// Evaluate the oracle here. Coordinates are validated by the runner.
    Sample(Vec<S>),
    Finish,
}

/// A (possibly adaptive) quadrature rule `A_n(f) = φ(f(t_1), ..., f(t_n))`.
///
/// `next_query` sees every value computed so far, and nothing else about the
/// integrand.
pub trait AdaptiveCubature<S: Scalar = f64> {
    fn dim(&self) -> usize;
    fn next_query(&mut self, transcript: &Transcript<S>) -> Query<S>;
    fn finalize(&self, transcript: &Transcript<S>) -> S;
}

/// Outcome of [`run_algorithm`].
#[derive(Debug, Clone, PartialEq)]
pub struct Run<S = f64> {
    pub transcript: Transcript<S>,
    pub output: S,
}

/// Drives `alg` against `oracle` for at most `budget` function values.
///
/// Repeated queries of one point are allowed and each one is charged.
pub fn run_algorithm<S, A, O>(alg: &mut A, oracle: &O, budget: usize) -> Result<Run<S>>
where
    S: Scalar,
    A: AdaptiveCubature<S> + ?Sized,
    O: EvalOracle<S> + ?Sized,
{
    if alg.dim() != oracle.dim() {
        return Err(Error::DimensionMismatch {
            expected: oracle.dim(),
            got: alg.dim(),
        });
    }
    let mut transcript = Transcript::new();
    loop {
        match alg.next_query(&transcript) {
            Query::Finish => break,
            Query::Sample(coords) => {
                if transcript.n() >= budget {
                    return Err(Error::BudgetExceeded {
                        budget,
                        attempted: transcript.n() + 1,
                    });
                }
                if coords.len() != oracle.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: oracle.dim(),
                        got: coords.len(),
                    });
                }
                let point = Point::new(coords)?;
                let value = oracle.eval(&point);
                transcript.push(point, value);
            }
        }
    }
    let output = alg.finalize(&transcript);
    Ok(Run { transcript, output })
}

/// Worst-case error of the best zero-query algorithm (the constant ½), for
/// both the monotone and the convex class, in every dimension.
pub fn initial_error<S: Scalar>(_class: FunctionClass) -> S {
    S::half()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::ConstantHalf;
    use crate::oracles::ThresholdOracle;

    /// Queries (0.3, 0.3); if that value is 0 it moves up the diagonal to
    /// (0.9, 0.9), otherwise down to (0.1, 0.1).
    struct TwoStep;

    impl AdaptiveCubature for TwoStep {
        fn dim(&self) -> usize {
            2
        }
        fn next_query(&mut self, t: &Transcript) -> Query {
            match t.n() {
                0 => Query::Sample(vec![0.3, 0.3]),
                1 if *t.last_value().unwrap() == 0.0 => Query::Sample(vec![0.9, 0.9]),
                1 => Query::Sample(vec![0.1, 0.1]),
                _ => Query::Finish,
            }
        }
        fn finalize(&self, t: &Transcript) -> f64 {
            t.values().sum::<f64>() / t.n().max(1) as f64
        }
    }

    struct Fixed(Vec<Vec<f64>>);

    impl AdaptiveCubature for Fixed {
        fn dim(&self) -> usize {
            self.0.first().map_or(2, Vec::len)
        }
        fn next_query(&mut self, t: &Transcript) -> Query {
            self.0
                .get(t.n())
                .cloned()
                .map_or(Query::Finish, Query::Sample)
        }
        fn finalize(&self, _: &Transcript) -> f64 {
            0.0
        }
    }

    #[test]
    fn zero_budget_constant() {
        let run: Run =
            run_algorithm(&mut ConstantHalf::new(3), &ThresholdOracle::new(3), 0).unwrap();
        assert!(run.transcript.is_empty());
        assert_eq!(run.output, 0.5);
    }

    #[test]
    fn single_query_on_threshold() {
        let mut alg = Fixed(vec![vec![0.5, 0.5]]);
        let run = run_algorithm(&mut alg, &ThresholdOracle::new(2), 1).unwrap();
        assert_eq!(
            run.transcript.records(),
            &[(Point::new(vec![0.5, 0.5]).unwrap(), 1.0)]
        );
    }

    #[test]
    fn adaptive_follows_values() {
        let run = run_algorithm(&mut TwoStep, &ThresholdOracle::new(2), 5).unwrap();
        let vals: Vec<f64> = run.transcript.values().copied().collect();
        assert_eq!(vals, vec![0.0, 1.0]);
        assert_eq!(run.transcript.records()[1].0.coords(), &[0.9, 0.9]);
    }

    #[test]
    fn domain_and_budget_errors() {
        let mut alg = Fixed(vec![vec![0.5, 1.2]]);
        assert!(matches!(
            run_algorithm(&mut alg, &ThresholdOracle::new(2), 3),
            Err(Error::Domain { index: 1, .. })
        ));
        let mut alg = Fixed(vec![vec![0.5, 0.5], vec![0.5, 0.5]]);
        assert!(matches!(
            run_algorithm(&mut alg, &ThresholdOracle::new(2), 1),
            Err(Error::BudgetExceeded {
                budget: 1,
                attempted: 2
            })
        ));
        // repeated points are charged individually
        let mut alg = Fixed(vec![vec![0.5, 0.5], vec![0.5, 0.5]]);
        assert_eq!(
            run_algorithm(&mut alg, &ThresholdOracle::new(2), 2)
                .unwrap()
                .transcript
                .n(),
            2
        );
        let mut alg = Fixed(vec![vec![0.5, 0.5, 0.5]]);
        assert!(matches!(
            run_algorithm(&mut alg, &ThresholdOracle::new(2), 3),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn endpoints_are_inside() {
        assert!(Point::<f64>::new(vec![0.0, 1.0]).is_ok());
        assert!(Point::<f64>::new(vec![-0.0, 1.0 + 1e-16]).is_ok());
        assert!(Point::<f64>::new(vec![f64::NAN]).is_err());
        assert!(Point::<f64>::new(vec![]).is_err());
    }

    #[test]
    fn initial_error_is_half() {
        for class in [FunctionClass::Monotone, FunctionClass::Convex] {
            assert_eq!(initial_error::<f64>(class), 0.5);
            assert_eq!(
                initial_error::<num_rational::BigRational>(class),
                crate::ratio(1, 2)
            );
        }
    }

    #[test]
    fn transcript_json_keeps_order() {
        let run = run_algorithm(&mut TwoStep, &ThresholdOracle::new(2), 5).unwrap();
        let json = run.transcript.to_json().unwrap();
        assert_eq!(
            json,
            r#"[{"point":[0.3,0.3],"value":0.0},{"point":[0.9,0.9],"value":1.0}]"#
        );
        assert_eq!(Transcript::<f64>::from_json(&json).unwrap(), run.transcript);
    }
}
