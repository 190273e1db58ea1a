//! Closed-form allocations: OMA, conventional hybrid NOMA, user 2's best
//! response to user 1's slot-1 power, and user 1's cheapest slot-2 power for
//! a given slot-1 power.

use serde::Serialize;

use crate::model::{ChannelPair, PowerAllocation, RateTarget};

/// Relative tolerance on the hybrid-branch condition `p11·h2 + 1 <= e^R`.
pub const BRANCH_TOL: f64 = 1e-12;

/// Which regime a user's optimal powers fall in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ModeDecision {
    /// Transmits only in its own legacy slot.
    PureOma,
    /// Also transmits in the other user's slot.
    HybridNoma,
}

/// User 2's power-minimizing response to a fixed slot-1 power `p11`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BestResponse {
    pub p21: f64,
    pub p22: f64,
    pub mode: ModeDecision,
    /// Effective channel factor `1 / (p11·h2 + 1)`.
    pub mu: f64,
    /// Common water level `sqrt(e^R / (h2²·mu))`; `None` on the OMA branch.
    pub water_level: Option<f64>,
}

impl BestResponse {
    pub fn total(&self) -> f64 {
        self.p21 + self.p22
    }
}

/// Power that reaches `rate` alone on gain `h`: `(e^R - 1) / h`.
pub fn oma_power(h: f64, rate: RateTarget) -> f64 {
    rate.exp_m1() / h
}

/// Both users in their own slot only.
pub fn oma_allocation(ch: &ChannelPair, rate: RateTarget) -> PowerAllocation {
    PowerAllocation {
        p11: oma_power(ch.h1(), rate),
        p12: 0.0,
        p21: 0.0,
        p22: oma_power(ch.h2(), rate),
    }
}

/// Conventional hybrid NOMA: user 1 keeps its OMA power, user 2 splits its
/// power over both slots against user 1's interference in slot 1.
pub fn hybrid_noma_allocation(ch: &ChannelPair, rate: RateTarget) -> PowerAllocation {
    let p11 = oma_power(ch.h1(), rate);
    let response = u2_best_response(p11, ch.h2(), rate);
    PowerAllocation {
        p11,
        p12: 0.0,
        p21: response.p21,
        p22: response.p22,
    }
}

/// Minimum-power powers for user 2 given user 1's slot-1 power.
///
/// User 2 water-fills across its interference-degraded slot-1 channel and
/// its clean slot-2 channel as long as `p11·h2 + 1 < e^R`. Otherwise slot 1
/// is not worth using and user 2 falls back to OMA. The two branches meet
/// at the boundary, which is assigned to the OMA branch.
pub fn u2_best_response(p11: f64, h2: f64, rate: RateTarget) -> BestResponse {
    let interference = p11 * h2 + 1.0;
    let mu = interference.recip();
    let e_r = rate.exp();
    if interference < e_r * (1.0 - BRANCH_TOL) {
        let level = (e_r * interference).sqrt();
        BestResponse {
            p21: ((level - interference) / h2).max(0.0),
            p22: ((level - 1.0) / h2).max(0.0),
            mode: ModeDecision::HybridNoma,
            mu,
            water_level: Some(level / h2),
        }
    } else {
        BestResponse {
            p21: 0.0,
            p22: oma_power(h2, rate),
            mode: ModeDecision::PureOma,
            mu,
            water_level: None,
        }
    }
}

/// User 1's slot-2 power that meets `rate` exactly when it uses `x` in slot 1
/// and user 2 plays its hybrid best response to `x`.
///
/// Returns `None` when `1 + x·h1 > e^R` (or `x < 0`): user 1 already exceeds
/// the target in slot 1 and the reduced problem has no feasible point there.
pub fn y_star(x: f64, ch: &ChannelPair, rate: RateTarget) -> Option<f64> {
    let (h1, h2) = (ch.h1(), ch.h2());
    let x_max = oma_power(h1, rate);
    if !(x >= 0.0 && x <= x_max * (1.0 + BRANCH_TOL)) {
        return None;
    }
    // e^R / (1 + x·h1) - 1, zero at x = x_max.
    let deficit = (h1 * (x_max - x)).max(0.0) / (1.0 + x * h1);
    let scale = (0.5 * rate.nats()).exp() * (x * h2 + 1.0).sqrt() / h2;
    Some(scale * deficit)
}
