//! Block-structured Monte Carlo means.
//!
//! Samples are split into fixed-size blocks; block `b` draws from the
//! substream `indexed(label, b)`. Blocks are evaluated in parallel and their
//! partial sums reduced in block order, so the estimate depends only on the
//! seed and never on the worker count.

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::rng::RandomStream;

pub const BLOCK_SIZE: usize = 1024;

/// A Monte Carlo mean with its (sample) standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: usize,
}

impl McEstimate {
    /// `estimate ± k·std_error`.
    pub fn interval(&self, k: f64) -> (f64, f64) {
        (
            self.estimate - k * self.std_error,
            self.estimate + k * self.std_error,
        )
    }
}

#[derive(Clone, Copy, Default)]
struct Partial {
    count: f64,
    mean: f64,
    m2: f64,
}

impl Partial {
    fn push(&mut self, x: f64) {
        self.count += 1.0;
        let delta = x - self.mean;
        self.mean += delta / self.count;
        self.m2 += delta * (x - self.mean);
    }

    // Chan et al. pairwise merge
    fn merge(self, other: Partial) -> Partial {
        if other.count == 0.0 {
            return self;
        }
        if self.count == 0.0 {
            return other;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        Partial {
            count,
            mean: self.mean + delta * other.count / count,
            m2: self.m2 + other.m2 + delta * delta * self.count * other.count / count,
        }
    }
}

pub fn block_mean<F>(
    samples: usize,
    stream: &RandomStream,
    label: &str,
    draw: F,
) -> Result<McEstimate>
where
    F: Fn(&mut ChaCha8Rng) -> Result<f64> + Sync,
{
    let blocks = samples.div_ceil(BLOCK_SIZE);
    let partials = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = stream.indexed(label, b as u64).rng();
            let len = BLOCK_SIZE.min(samples - b * BLOCK_SIZE);
            let mut p = Partial::default();
            for _ in 0..len {
                p.push(draw(&mut rng)?);
            }
            Ok(p)
        })
        .collect::<Result<Vec<_>>>()?;

    let total = partials
        .into_iter()
        .fold(Partial::default(), Partial::merge);
    if samples == 0 {
        return Ok(McEstimate {
            estimate: f64::NAN,
            std_error: f64::INFINITY,
            samples,
        });
    }
    let var = if samples > 1 {
        total.m2 / (total.count - 1.0)
    } else {
        0.0
    };
    Ok(McEstimate {
        estimate: total.mean,
        std_error: (var.max(0.0) / total.count).sqrt(),
        samples,
    })
}
