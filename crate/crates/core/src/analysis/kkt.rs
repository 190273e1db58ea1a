//! KKT certificates for user 1's two reduced problems.
//!
//! * `P4`: user 2 in pure OMA. Minimize `x + y` subject to
//!   `ln(1 + x·h1) + ln(1 + e^{-R}·h2·y) >= R`, `x, y >= 0`.
//! * `P6`: user 2 in hybrid NOMA, `y` eliminated. Minimize `f(x)` subject to
//!   `x·h1 + 1 <= e^R`, `x >= 0`.
//!
//! Both problems are convex, so multipliers satisfying the KKT system with
//! non-negative signs prove a candidate optimal. Each certificate carries the
//! closed-form multipliers for user 1's OMA point together with the values
//! recomputed from the stationarity equations at the candidate.

use serde::Serialize;

use super::convexity::ReducedObjective;
use crate::closed_form::oma_power;
use crate::model::{ChannelPair, RateTarget};

/// Stationarity residual bound.
pub const STATIONARITY_TOL: f64 = 1e-9;
/// Complementary-slackness residual bound.
pub const SLACKNESS_TOL: f64 = 1e-9;
/// Lowest multiplier value still counted as non-negative.
pub const MULTIPLIER_FLOOR: f64 = -1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum KktProblem {
    P4,
    P6,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Multiplier {
    pub name: &'static str,
    /// Closed-form value.
    pub value: f64,
    /// Value solved from the stationarity equations at the candidate.
    pub recomputed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KktCertificate {
    pub problem: KktProblem,
    /// Candidate `(x, y)`; `y` is `y*(x)` for `P6`.
    pub candidate: (f64, f64),
    pub multipliers: Vec<Multiplier>,
    pub stationarity_residual: f64,
    pub comp_slackness_residual: f64,
    /// Constraint violation at the candidate (0 when feasible).
    pub primal_residual: f64,
    pub all_nonnegative: bool,
    /// `P6` only: `e^R·h2² <= e^R·h1·h2 + h1² - h1·h2`, the scalar form of
    /// `lambda4 >= 0`.
    pub optimality_inequality: Option<bool>,
}

impl KktCertificate {
    pub fn multiplier(&self, name: &str) -> Option<&Multiplier> {
        self.multipliers.iter().find(|m| m.name == name)
    }

    /// Largest `|value - recomputed| / max(1, |value|)` over all multipliers.
    pub fn multiplier_mismatch(&self) -> f64 {
        self.multipliers
            .iter()
            .map(|m| (m.value - m.recomputed).abs() / m.value.abs().max(1.0))
            .fold(0.0, f64::max)
    }

    /// Signs and residuals within the default thresholds.
    pub fn is_valid(&self) -> bool {
        self.all_nonnegative
            && self.stationarity_residual <= STATIONARITY_TOL
            && self.comp_slackness_residual <= SLACKNESS_TOL
            && self.optimality_inequality.unwrap_or(true)
    }
}

fn max_abs(values: &[f64]) -> f64 {
    values.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

/// `P4` certificate at user 1's OMA point `x = (e^R - 1)/h1`, `y = 0`.
pub fn kkt_p4(ch: &ChannelPair, rate: RateTarget) -> KktCertificate {
    kkt_p4_at(oma_power(ch.h1(), rate), 0.0, ch, rate)
}

/// `P4` KKT system at an arbitrary candidate, using the multipliers that
/// certify the OMA point: `lambda1 = e^R/h1`, `lambda2 = 0`,
/// `lambda3 = 1 - h2/h1`.
pub fn kkt_p4_at(x: f64, y: f64, ch: &ChannelPair, rate: RateTarget) -> KktCertificate {
    let (h1, h2) = (ch.h1(), ch.h2());
    let slot2_gain = (-rate.nats()).exp() * h2;

    let lambda1 = rate.exp() / h1;
    let lambda2 = 0.0;
    let lambda3 = 1.0 - h2 / h1;

    // x > 0 forces lambda2 = 0; the two stationarity rows then fix lambda1, lambda3.
    let lambda1_re = (1.0 + x * h1) / h1;
    let lambda3_re = 1.0 - lambda1_re * slot2_gain / (1.0 + slot2_gain * y);

    let stationarity = [
        1.0 - lambda1 * h1 / (1.0 + x * h1) - lambda2,
        1.0 - lambda1 * slot2_gain / (1.0 + slot2_gain * y) - lambda3,
    ];
    let shortfall = rate.nats() - (x * h1).ln_1p() - (slot2_gain * y).ln_1p();
    let slackness = [lambda1 * shortfall, lambda2 * x, lambda3 * y];

    let multipliers = vec![
        Multiplier {
            name: "lambda1",
            value: lambda1,
            recomputed: lambda1_re,
        },
        Multiplier {
            name: "lambda2",
            value: lambda2,
            recomputed: 0.0,
        },
        Multiplier {
            name: "lambda3",
            value: lambda3,
            recomputed: lambda3_re,
        },
    ];
    let all_nonnegative = multipliers.iter().all(|m| m.value >= MULTIPLIER_FLOOR);
    KktCertificate {
        problem: KktProblem::P4,
        candidate: (x, y),
        multipliers,
        stationarity_residual: max_abs(&stationarity),
        comp_slackness_residual: max_abs(&slackness),
        primal_residual: shortfall.max(0.0).max(-x).max(-y),
        all_nonnegative,
        optimality_inequality: None,
    }
}

/// Closed-form `lambda4` at user 1's OMA point:
/// `e^{-R/2}/h2 · sqrt((e^R - 1)·h2/h1 + 1) - 1/h1`.
///
/// Evaluated as `sqrt(rho + (1 - rho)·e^{-R})/h2 - 1/h1` with `rho = h2/h1`,
/// the same quantity with the `e^{±R/2}` factors cancelled.
pub fn lambda4_closed_form(ch: &ChannelPair, rate: RateTarget) -> f64 {
    let rho = ch.h2() / ch.h1();
    (rho + (1.0 - rho) * (-rate.nats()).exp()).sqrt() / ch.h2() - ch.h1().recip()
}

/// `e^R·h2² <= e^R·h1·h2 + h1² - h1·h2`, evaluated term by term.
pub fn optimality_inequality(ch: &ChannelPair, rate: RateTarget) -> bool {
    let (h1, h2, e_r) = (ch.h1(), ch.h2(), rate.exp());
    let lhs = e_r * h2 * h2;
    let rhs = e_r * h1 * h2 + h1 * h1 - h1 * h2;
    lhs <= rhs + 1e-12 * rhs.abs()
}

/// `P6` certificate at user 1's OMA point `x = (e^R - 1)/h1`.
pub fn kkt_p6(ch: &ChannelPair, rate: RateTarget) -> KktCertificate {
    kkt_p6_at(oma_power(ch.h1(), rate), ch, rate)
}

/// `P6` KKT system at an arbitrary in-domain `x`, using the multipliers
/// that certify the OMA point: `lambda4` in closed form and `lambda5 = 0`.
///
/// The recomputed multipliers follow from stationarity
/// `f'(x) + lambda4·h1 - lambda5 = 0` and whichever constraints are active
/// at `x`.
pub fn kkt_p6_at(x: f64, ch: &ChannelPair, rate: RateTarget) -> KktCertificate {
    let f = ReducedObjective::new(*ch, rate);
    let h1 = ch.h1();
    let x_max = f.x_max();
    let slope = f.first_derivative(x.clamp(0.0, x_max)).unwrap_or(f64::NAN);
    let y = f
        .value(x.clamp(0.0, x_max))
        .map(|v| v - x)
        .unwrap_or(f64::NAN);

    let lambda4 = lambda4_closed_form(ch, rate);
    let lambda5 = 0.0;

    let at_right = (x - x_max).abs() <= 1e-12 * x_max;
    let (lambda4_re, lambda5_re) = if at_right {
        (-slope / h1, 0.0)
    } else if x == 0.0 {
        (0.0, slope)
    } else {
        (0.0, 0.0)
    };

    // x·h1 + 1 - e^R written as h1·(x - x_max).
    let rate_constraint = h1 * (x - x_max);
    let stationarity = slope + lambda4 * h1 - lambda5;
    let slackness = [lambda4 * rate_constraint, lambda5 * x];

    let multipliers = vec![
        Multiplier {
            name: "lambda4",
            value: lambda4,
            recomputed: lambda4_re,
        },
        Multiplier {
            name: "lambda5",
            value: lambda5,
            recomputed: lambda5_re,
        },
    ];
    let all_nonnegative = multipliers.iter().all(|m| m.value >= MULTIPLIER_FLOOR);
    KktCertificate {
        problem: KktProblem::P6,
        candidate: (x, y),
        multipliers,
        stationarity_residual: stationarity.abs(),
        comp_slackness_residual: max_abs(&slackness),
        primal_residual: rate_constraint.max(0.0).max(-x),
        all_nonnegative,
        optimality_inequality: Some(optimality_inequality(ch, rate)),
    }
}
