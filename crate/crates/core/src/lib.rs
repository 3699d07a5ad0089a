//! Executable curse-of-dimensionality arguments for integrating monotone and
//! convex functions on `[0,1]^d` from function values.
//!
//! * [`monotone`]: threshold adversary, extremal fooling pair, exact gaps by
//!   inclusion–exclusion, and the `2^d (1 − 2ε)` complexity bound.
//! * [`convex`]: the largest convex function vanishing on a sample set
//!   (via [`lp`]), hull-volume estimates, Carathéodory and Elekes steps, and
//!   the Chernoff certification behind the `(11/10)^d` bound.
//! * [`quadrature`]: staircase bracketing, Monte Carlo, and the
//!   approximation-to-integration reduction.
//!
//! The exact-capable routines are generic over [`Scalar`]; the aliases below
//! fix the common instantiations.

pub mod algorithms;
pub mod convex;
pub mod error;
pub mod lp;
pub mod mc;
pub mod monotone;
pub mod optimize;
pub mod oracles;
pub mod problem;
pub mod quadrature;
pub mod rng;
pub mod scalar;

pub use error::{Error, LpFailure, Result};
pub use mc::McEstimate;
pub use problem::{
    initial_error, run_algorithm, AdaptiveCubature, EvalOracle, FunctionClass, Query, Run,
};
pub use rng::RandomStream;
pub use scalar::{ratio, Real, Scalar};

pub use num_rational::BigRational;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub type Point = problem::Point<f64>;
pub type Transcript = problem::Transcript<f64>;
pub type SampleSet = convex::SampleSet<f64>;
pub type MonotoneFoolingPair = monotone::MonotoneFoolingPair<f64>;
pub type LinearProgram = lp::LinearProgram<f64>;

pub type Point32 = problem::Point<f32>;

pub type ExactPoint = problem::Point<BigRational>;
pub type ExactTranscript = problem::Transcript<BigRational>;
pub type ExactSampleSet = convex::SampleSet<BigRational>;
pub type ExactFoolingPair = monotone::MonotoneFoolingPair<BigRational>;
pub type ExactLinearProgram = lp::LinearProgram<BigRational>;
