//! Gaussian time arithmetic.
//!
//! Tour times are sums of independent Gaussian travel and visit times, so
//! they stay Gaussian with summed means and variances. The soft objective
//! term needs `E[(X - t)^+]` for Gaussian `X`, which has the closed form
//!
//! ```text
//! E[(X - t)^+] = sigma * pdf(a) + (mu - t) * cdf(a),   a = (mu - t) / sigma
//! ```
//!
//! degrading to `max(mu - t, 0)` at `sigma = 0`. The normal pdf/cdf go
//! through `libm`'s erfc, accurate to well below 1e-12, so local search can
//! rely on smooth, precise penalty differences.
//!
//! [`monte_carlo_overtime`] is the independent sampling oracle for the
//! closed form: ChaCha8 uniforms, `StandardNormal` (ziggurat) draws,
//! reproducible for a fixed seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::model::TimeDist;

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
const FRAC_1_SQRT_2: f64 = core::f64::consts::FRAC_1_SQRT_2;

/// Standard normal density.
pub fn normal_pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * libm::exp(-0.5 * x * x)
}

/// Standard normal cumulative distribution, via erfc for tail accuracy.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// Sum of two independent Gaussian times: means add, variances add.
pub fn dist_sum(a: TimeDist, b: TimeDist) -> TimeDist {
    TimeDist::new(
        a.mean + b.mean,
        libm::sqrt(a.std * a.std + b.std * b.std),
    )
}

/// Expected overtime `E[(X - threshold)^+]` for `X ~ N(d.mean, d.std^2)`.
///
/// Non-increasing in the threshold, non-decreasing in the mean and the std,
/// and never below the Jensen bound `max(mean - threshold, 0)`.
pub fn expected_overtime(d: TimeDist, threshold: f64) -> f64 {
    let gap = d.mean - threshold;
    if d.std == 0.0 {
        return gap.max(0.0);
    }
    let alpha = gap / d.std;
    (d.std * normal_pdf(alpha) + gap * normal_cdf(alpha)).max(0.0)
}

/// `samples` was zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ZeroSamples;

impl core::fmt::Display for ZeroSamples {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "monte_carlo_overtime requires at least one sample")
    }
}

/// Empirical mean of `(x - threshold)^+` over seeded Gaussian draws.
/// Deterministic for a fixed seed.
pub fn monte_carlo_overtime(
    d: TimeDist,
    threshold: f64,
    samples: u64,
    seed: u64,
) -> Result<f64, ZeroSamples> {
    if samples == 0 {
        return Err(ZeroSamples);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut acc = 0.0;
    for _ in 0..samples {
        let z: f64 = StandardNormal.sample(&mut rng);
        let over = d.mean + d.std * z - threshold;
        if over > 0.0 {
            acc += over;
        }
    }
    Ok(acc / samples as f64)
}
