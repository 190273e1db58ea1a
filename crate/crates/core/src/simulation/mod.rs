//! Monte Carlo harness over Rayleigh fading.
//!
//! Each user's raw gain is `|g|²` with `g ~ CN(0, var)`, i.e. exponential
//! with mean `var`, drawn by inverse CDF as `-var·ln U`. The two draws are
//! sorted so that `h1 >= h2`.

pub mod csv;
pub mod rng;
mod sweep;

use rand::Rng;
use rand_distr::Open01;
use serde::Serialize;

use crate::error::{ModelError, Result};
use crate::model::ChannelPair;

pub use sweep::{
    fig4_experiment, fig4_for_channels, sweep_rate, sweep_snr, trial_totals, Fig4Record, RateCase,
    SweepRecord, TrialTotals, DEFAULT_TRIALS,
};

/// Variances of the two users' complex Gaussian channel coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelDistribution {
    var1: f64,
    var2: f64,
}

impl ChannelDistribution {
    pub fn new(var1: f64, var2: f64) -> Result<Self> {
        for v in [var1, var2] {
            if !(v.is_finite() && v > 0.0) {
                return Err(ModelError::InvalidVariance(v));
            }
        }
        Ok(Self { var1, var2 })
    }

    /// Both users with variance `var`.
    pub fn iid(var: f64) -> Result<Self> {
        Self::new(var, var)
    }

    pub fn var1(&self) -> f64 {
        self.var1
    }

    pub fn var2(&self) -> f64 {
        self.var2
    }
}

/// One ordered pair of gains drawn from `rng`.
pub fn draw_ordered_channels<R: Rng + ?Sized>(
    dist: &ChannelDistribution,
    rng: &mut R,
) -> ChannelPair {
    let u1: f64 = rng.sample(Open01);
    let u2: f64 = rng.sample(Open01);
    let g1 = -dist.var1 * u1.ln();
    let g2 = -dist.var2 * u2.ln();
    ChannelPair::new(g1.max(g2), g1.min(g2)).expect("open-interval uniforms give positive gains")
}

/// One ordered pair of gains from a fresh generator seeded with `seed`.
pub fn sample_ordered_channels(dist: &ChannelDistribution, seed: u64) -> ChannelPair {
    draw_ordered_channels(dist, &mut rng::substream(seed, 0, 0))
}
