//! Built-in integrands with known integrals.

use std::marker::PhantomData;

use crate::monotone::threshold_value;
use crate::problem::{EvalOracle, FunctionClass, Point};
use crate::scalar::Scalar;

/// `1` if the coordinate sum is at least `d/2`, else `0`.
///
/// Its integral is exactly ½ by the symmetry `x ↦ 1 − x`.
#[derive(Debug, Clone, Copy)]
pub struct ThresholdOracle<S = f64> {
    d: usize,
    _s: PhantomData<S>,
}

impl<S> ThresholdOracle<S> {
    pub fn new(d: usize) -> Self {
        Self { d, _s: PhantomData }
    }
}

impl<S: Scalar> EvalOracle<S> for ThresholdOracle<S> {
    fn dim(&self) -> usize {
        self.d
    }
    fn eval(&self, x: &Point<S>) -> S {
        threshold_value(x)
    }
    fn class(&self) -> FunctionClass {
        FunctionClass::Monotone
    }
}

/// `∏ x_k`, monotone with integral `2^-d`.
#[derive(Debug, Clone, Copy)]
pub struct ProductOracle<S = f64> {
    d: usize,
    _s: PhantomData<S>,
}

impl<S> ProductOracle<S> {
    pub fn new(d: usize) -> Self {
        Self { d, _s: PhantomData }
    }
}

impl<S: Scalar> EvalOracle<S> for ProductOracle<S> {
    fn dim(&self) -> usize {
        self.d
    }
    fn eval(&self, x: &Point<S>) -> S {
        x.coords().iter().cloned().fold(S::one(), |a, b| a * b)
    }
    fn class(&self) -> FunctionClass {
        FunctionClass::Monotone
    }
}

/// The coordinate mean `(x_1 + ... + x_d)/d`. Affine, so both convex and
/// monotone; integral ½.
#[derive(Debug, Clone, Copy)]
pub struct AffineOracle<S = f64> {
    d: usize,
    _s: PhantomData<S>,
}

impl<S> AffineOracle<S> {
    pub fn new(d: usize) -> Self {
        Self { d, _s: PhantomData }
    }
}

impl<S: Scalar> EvalOracle<S> for AffineOracle<S> {
    fn dim(&self) -> usize {
        self.d
    }
    fn eval(&self, x: &Point<S>) -> S {
        x.sum() / S::from_usize_exact(self.d)
    }
    fn class(&self) -> FunctionClass {
        FunctionClass::Convex
    }
}

#[derive(Debug, Clone)]
pub struct ConstantOracle<S = f64> {
    d: usize,
    value: S,
}

impl<S: Scalar> ConstantOracle<S> {
    pub fn new(d: usize, value: S) -> Self {
        Self { d, value }
    }

    /// The convex adversary's probe `f⁻ = 0`.
    pub fn zero(d: usize) -> Self {
        Self::new(d, S::zero())
    }
}

impl<S: Scalar> EvalOracle<S> for ConstantOracle<S> {
    fn dim(&self) -> usize {
        self.d
    }
    fn eval(&self, _: &Point<S>) -> S {
        self.value.clone()
    }
    fn class(&self) -> FunctionClass {
        FunctionClass::Convex
    }
}

/// Wraps a closure as an oracle.
pub struct FnOracle<F> {
    d: usize,
    class: FunctionClass,
    f: F,
}

impl<F> FnOracle<F> {
    pub fn new(d: usize, class: FunctionClass, f: F) -> Self {
        Self { d, class, f }
    }
}

impl<S: Scalar, F: Fn(&Point<S>) -> S> EvalOracle<S> for FnOracle<F> {
    fn dim(&self) -> usize {
        self.d
    }
    fn eval(&self, x: &Point<S>) -> S {
        (self.f)(x)
    }
    fn class(&self) -> FunctionClass {
        self.class
    }
}

/// Which built-in integrand, for configuration and reporting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuiltinOracle {
    Threshold,
    Product,
    Affine,
}

impl BuiltinOracle {
    pub const ALL: [BuiltinOracle; 3] = [Self::Threshold, Self::Product, Self::Affine];

    pub fn name(self) -> &'static str {
        match self {
            Self::Threshold => "threshold",
            Self::Product => "product",
            Self::Affine => "affine",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|o| o.name() == name)
    }

    pub fn integral(self, d: usize) -> f64 {
        match self {
            Self::Threshold | Self::Affine => 0.5,
            Self::Product => 0.5f64.powi(d as i32),
        }
    }

    pub fn is_monotone(self) -> bool {
        true
    }

    pub fn oracle(self, d: usize) -> Box<dyn EvalOracle<f64> + Send + Sync> {
        match self {
            Self::Threshold => Box::new(ThresholdOracle::new(d)),
            Self::Product => Box::new(ProductOracle::new(d)),
            Self::Affine => Box::new(AffineOracle::new(d)),
        }
    }
}
