//! A few concrete cubature rules to run adversaries against.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::problem::{AdaptiveCubature, Query, Transcript};
use crate::rng::RandomStream;
use crate::scalar::Scalar;

fn mean<S: Scalar>(t: &Transcript<S>) -> S {
    if t.is_empty() {
        return S::half();
    }
    let sum = t.values().cloned().fold(S::zero(), |a, b| a + b);
    sum / S::from_usize_exact(t.n())
}

/// `A_0 = ½`; never samples.
#[derive(Debug, Clone)]
pub struct ConstantHalf {
    d: usize,
}

impl ConstantHalf {
    pub fn new(d: usize) -> Self {
        Self { d }
    }
}

impl<S: Scalar> AdaptiveCubature<S> for ConstantHalf {
    fn dim(&self) -> usize {
        self.d
    }
    fn next_query(&mut self, _: &Transcript<S>) -> Query<S> {
        Query::Finish
    }
    fn finalize(&self, _: &Transcript<S>) -> S {
        S::half()
    }
}

/// Cell midpoints of the largest `k^d` lattice fitting the budget, averaged.
#[derive(Debug, Clone)]
pub struct LatticeMean {
    d: usize,
    k: usize,
}

impl LatticeMean {
    pub fn new(d: usize, budget: usize) -> Self {
        let mut k = 0usize;
        while (k + 1).checked_pow(d as u32).is_some_and(|p| p <= budget) {
            k += 1;
        }
        Self { d, k }
    }

    pub fn points(&self) -> usize {
        self.k.pow(self.d as u32)
    }
}

impl AdaptiveCubature<f64> for LatticeMean {
    fn dim(&self) -> usize {
        self.d
    }
    fn next_query(&mut self, t: &Transcript<f64>) -> Query<f64> {
        if t.n() >= self.points() {
            return Query::Finish;
        }
        let mut idx = t.n();
        let coords = (0..self.d)
            .map(|_| {
                let i = idx % self.k;
                idx /= self.k;
                (i as f64 + 0.5) / self.k as f64
            })
            .collect();
        Query::Sample(coords)
    }
    fn finalize(&self, t: &Transcript<f64>) -> f64 {
        mean(t)
    }
}

/// Plain Monte Carlo with a fixed seed: `budget` uniform points, averaged.
#[derive(Debug, Clone)]
pub struct RandomMean {
    d: usize,
    budget: usize,
    rng: ChaCha8Rng,
}

impl RandomMean {
    pub fn new(d: usize, budget: usize, stream: &RandomStream) -> Self {
        Self {
            d,
            budget,
            rng: stream.substream("random-mean").rng(),
        }
    }
}

impl AdaptiveCubature<f64> for RandomMean {
    fn dim(&self) -> usize {
        self.d
    }
    fn next_query(&mut self, t: &Transcript<f64>) -> Query<f64> {
        if t.n() >= self.budget {
            return Query::Finish;
        }
        Query::Sample((0..self.d).map(|_| self.rng.random::<f64>()).collect())
    }
    fn finalize(&self, t: &Transcript<f64>) -> f64 {
        mean(t)
    }
}

/// Adaptive: bisects along the main diagonal for the level `c` where the
/// integrand jumps, then returns `1 − c` (exact for the threshold function).
#[derive(Debug, Clone)]
pub struct DiagonalBisection {
    d: usize,
    budget: usize,
    lo: f64,
    hi: f64,
}

impl DiagonalBisection {
    pub fn new(d: usize, budget: usize) -> Self {
        Self {
            d,
            budget,
            lo: 0.0,
            hi: 1.0,
        }
    }
}

impl AdaptiveCubature<f64> for DiagonalBisection {
    fn dim(&self) -> usize {
        self.d
    }
    fn next_query(&mut self, t: &Transcript<f64>) -> Query<f64> {
        if let Some((p, v)) = t.records().last() {
            let c = p.coords()[0];
            if *v >= 0.5 {
                self.hi = c;
            } else {
                self.lo = c;
            }
        }
        if t.n() >= self.budget {
            return Query::Finish;
        }
        Query::Sample(vec![0.5 * (self.lo + self.hi); self.d])
    }
    fn finalize(&self, t: &Transcript<f64>) -> f64 {
        if t.is_empty() {
            return 0.5;
        }
        1.0 - 0.5 * (self.lo + self.hi)
    }
}
