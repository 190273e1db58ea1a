//! User 1's reduced objective when user 2 plays hybrid NOMA, its analytic
//! derivatives, and the polynomial `phi` that certifies `f'' >= 0`.
//!
//! With `s = sqrt(x·h2 + 1)` and `q = 1 + x·h1`,
//!
//! ```text
//! f(x) = x + e^{3R/2}·s / (h2·q) - e^{R/2}·s / h2,    0 <= x <= (e^R - 1)/h1
//! phi(x) = 4·h2·q³·s³·e^{-R/2}·f''(x)
//! ```
//!
//! `phi` is a cubic in `x` with `phi' >= 0` and `phi(0) >= 0` whenever
//! `h1 >= h2`, which makes `f` convex on its whole domain.

use crate::closed_form::{oma_power, y_star, BRANCH_TOL};
use crate::error::{ModelError, Result};
use crate::model::{ChannelPair, RateTarget};

/// `f`, `f'`, `f''` and `phi` for one `(h1, h2, R)`.
#[derive(Debug, Clone, Copy)]
pub struct ReducedObjective {
    ch: ChannelPair,
    rate: RateTarget,
    e_r: f64,
    e_half: f64,
    e_three_half: f64,
    x_max: f64,
}

impl ReducedObjective {
    pub fn new(ch: ChannelPair, rate: RateTarget) -> Self {
        let r = rate.nats();
        Self {
            ch,
            rate,
            e_r: r.exp(),
            e_half: (0.5 * r).exp(),
            e_three_half: (1.5 * r).exp(),
            x_max: oma_power(ch.h1(), rate),
        }
    }

    pub fn channels(&self) -> ChannelPair {
        self.ch
    }

    pub fn rate(&self) -> RateTarget {
        self.rate
    }

    /// Right end of the domain, user 1's OMA power `(e^R - 1)/h1`.
    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    fn check(&self, x: f64) -> Result<()> {
        if x >= 0.0 && x <= self.x_max * (1.0 + BRANCH_TOL) {
            Ok(())
        } else {
            Err(ModelError::OutOfDomain {
                what: "x",
                value: x,
                domain: format!("0 <= x <= {}", self.x_max),
            })
        }
    }

    /// `f(x) = x + y*(x)`: user 1's total power.
    pub fn value(&self, x: f64) -> Result<f64> {
        self.check(x)?;
        let y = y_star(x, &self.ch, self.rate).ok_or(ModelError::OutOfDomain {
            what: "x",
            value: x,
            domain: "1 + x*h1 <= e^R, x >= 0".to_string(),
        })?;
        Ok(x + y)
    }

    pub fn first_derivative(&self, x: f64) -> Result<f64> {
        self.check(x)?;
        let (h1, h2) = (self.ch.h1(), self.ch.h2());
        let s = (x * h2 + 1.0).sqrt();
        let q = 1.0 + x * h1;
        Ok(1.0 + 0.5 * self.e_three_half / (s * q)
            - self.e_three_half * h1 / h2 * s / (q * q)
            - 0.5 * self.e_half / s)
    }

    pub fn second_derivative(&self, x: f64) -> Result<f64> {
        self.check(x)?;
        let (h1, h2) = (self.ch.h1(), self.ch.h2());
        let s = (x * h2 + 1.0).sqrt();
        let s3 = s * s * s;
        let q = 1.0 + x * h1;
        let e3 = self.e_three_half;
        Ok(
            -0.25 * e3 * h2 / (s3 * q) - 0.5 * e3 * h1 / (s * q * q) - 0.5 * e3 * h1 / (s * q * q)
                + 2.0 * e3 * h1 * h1 / h2 * s / (q * q * q)
                + 0.25 * self.e_half * h2 / s3,
        )
    }

    /// `phi(x)` from its defining product with `f''(x)`.
    pub fn phi(&self, x: f64) -> Result<f64> {
        let fpp = self.second_derivative(x)?;
        let (h1, h2) = (self.ch.h1(), self.ch.h2());
        let q = 1.0 + x * h1;
        let s3 = (x * h2 + 1.0).powf(1.5);
        Ok(4.0 * h2 * q * q * q * s3 / self.e_half * fpp)
    }

    /// `phi(x)` from its expansion as a cubic polynomial in `x`.
    pub fn phi_expanded(&self, x: f64) -> Result<f64> {
        self.check(x)?;
        let (h1, h2, e_r) = (self.ch.h1(), self.ch.h2(), self.e_r);
        let cubic = h1.powi(3) * h2 * h2;
        let quadratic = 3.0 * h1 * h1 * h2 * h2 * (e_r + 1.0);
        let linear = 12.0 * e_r * h1 * h1 * h2 - 6.0 * e_r * h1 * h2 * h2 + 3.0 * h1 * h2 * h2;
        let constant = 8.0 * e_r * h1 * h1 - 4.0 * e_r * h1 * h2 - e_r * h2 * h2 + h2 * h2;
        Ok(((cubic * x + quadratic) * x + linear) * x + constant)
    }

    pub fn phi_derivative(&self, x: f64) -> Result<f64> {
        self.check(x)?;
        let (h1, h2, e_r) = (self.ch.h1(), self.ch.h2(), self.e_r);
        let q = 1.0 + x * h1;
        Ok(-6.0 * e_r * h1 * h2 * h2
            + 6.0 * e_r * h1 * h1 * h2 * h2 * x
            + 12.0 * e_r * h1 * h1 * h2
            + 3.0 * h1 * h2 * h2 * q * q)
    }

    /// `phi(0)` in the grouped form whose every bracket is non-negative for
    /// `h1 >= h2`.
    pub fn phi_at_zero(&self) -> f64 {
        let (h1, h2, e_r) = (self.ch.h1(), self.ch.h2(), self.e_r);
        (e_r * h1 * h1 - e_r * h2 * h2)
            + (4.0 * e_r * h1 * h1 - 4.0 * e_r * h1 * h2)
            + 3.0 * e_r * h1 * h1
            + h2 * h2
    }

    /// `count` evenly spaced points covering `[0, x_max]`, both ends included.
    pub fn grid(&self, count: usize) -> Vec<f64> {
        assert!(count >= 2, "grid needs at least two points");
        let step = self.x_max / (count - 1) as f64;
        (0..count)
            .map(|i| {
                if i + 1 == count {
                    self.x_max
                } else {
                    i as f64 * step
                }
            })
            .collect()
    }
}

pub fn f_value(x: f64, ch: &ChannelPair, rate: RateTarget) -> Result<f64> {
    ReducedObjective::new(*ch, rate).value(x)
}

pub fn f_prime(x: f64, ch: &ChannelPair, rate: RateTarget) -> Result<f64> {
    ReducedObjective::new(*ch, rate).first_derivative(x)
}

pub fn f_double_prime(x: f64, ch: &ChannelPair, rate: RateTarget) -> Result<f64> {
    ReducedObjective::new(*ch, rate).second_derivative(x)
}

pub fn phi_value(x: f64, ch: &ChannelPair, rate: RateTarget) -> Result<f64> {
    ReducedObjective::new(*ch, rate).phi(x)
}

pub fn phi_prime(x: f64, ch: &ChannelPair, rate: RateTarget) -> Result<f64> {
    ReducedObjective::new(*ch, rate).phi_derivative(x)
}

pub fn phi_at_zero(ch: &ChannelPair, rate: RateTarget) -> f64 {
    ReducedObjective::new(*ch, rate).phi_at_zero()
}
