//! Channels, rate targets, power allocations and the SIC rate equations.
//!
//! Slot `T1` belongs to user 1 and slot `T2` to user 2 in the legacy
//! schedule. Only the legacy user of a slot runs SIC in that slot, so the
//! non-legacy user's signal is always decoded against the legacy user's
//! interference.

use std::ops::Add;

use serde::Serialize;

use crate::error::{ModelError, Result};

/// Default absolute tolerance on rate residuals, in nats.
pub const DEFAULT_FEASIBILITY_TOL: f64 = 1e-9;

/// Noise-normalized power gains of the two users, ordered `h1 >= h2 > 0`.
///
/// The gains are quasi-static: each user sees the same gain in both slots.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelPair {
    h1: f64,
    h2: f64,
}

impl ChannelPair {
    /// Rejects non-positive or non-finite gains and `h2 > h1`. Unordered
    /// pairs are not swapped.
    pub fn new(h1: f64, h2: f64) -> Result<Self> {
        for h in [h1, h2] {
            if !(h.is_finite() && h > 0.0) {
                return Err(ModelError::InvalidGain(h));
            }
        }
        if h2 > h1 {
            return Err(ModelError::Unordered { h1, h2 });
        }
        Ok(Self { h1, h2 })
    }

    pub fn h1(&self) -> f64 {
        self.h1
    }

    pub fn h2(&self) -> f64 {
        self.h2
    }

    /// Both gains multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.h1 * factor, self.h2 * factor)
    }
}

/// Common target rate of both users, in nats per channel use.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct RateTarget(f64);

impl RateTarget {
    pub fn new(nats: f64) -> Result<Self> {
        if nats.is_finite() && nats > 0.0 {
            Ok(Self(nats))
        } else {
            Err(ModelError::InvalidRate(nats))
        }
    }

    pub fn from_bits(bits: f64) -> Result<Self> {
        Self::new(bits * std::f64::consts::LN_2)
    }

    pub fn nats(&self) -> f64 {
        self.0
    }

    /// `e^R`, the SINR-product every user must reach across both slots.
    pub fn exp(&self) -> f64 {
        self.0.exp()
    }

    /// `e^R - 1`, computed without cancellation for small `R`.
    pub fn exp_m1(&self) -> f64 {
        self.0.exp_m1()
    }
}

/// Transmit powers `p_mn` of user `m`'s signal in slot `n`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct PowerAllocation {
    pub p11: f64,
    pub p12: f64,
    pub p21: f64,
    pub p22: f64,
}

impl PowerAllocation {
    pub fn new(p11: f64, p12: f64, p21: f64, p22: f64) -> Result<Self> {
        for p in [p11, p12, p21, p22] {
            if !(p.is_finite() && p >= 0.0) {
                return Err(ModelError::InvalidPower(p));
            }
        }
        Ok(Self { p11, p12, p21, p22 })
    }

    pub fn total(&self) -> f64 {
        total_power(self)
    }
}

impl Add for PowerAllocation {
    type Output = PowerAllocation;

    fn add(self, rhs: Self) -> Self {
        PowerAllocation {
            p11: self.p11 + rhs.p11,
            p12: self.p12 + rhs.p12,
            p21: self.p21 + rhs.p21,
            p22: self.p22 + rhs.p22,
        }
    }
}

/// Achievable rate `r_mn` of user `m` in slot `n`, in nats per channel use.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateBreakdown {
    pub r11: f64,
    pub r21: f64,
    pub r12: f64,
    pub r22: f64,
}

impl RateBreakdown {
    pub fn user1(&self) -> f64 {
        self.r11 + self.r12
    }

    pub fn user2(&self) -> f64 {
        self.r21 + self.r22
    }
}

/// SINR of a signal with power `p` under interference `interference`, both
/// seen through gain `h`: `p·h / (interference·h + 1)`.
///
/// Written as `p / (interference + 1/h)` so that the result is monotone in
/// `h` after rounding.
fn sinr(p: f64, interference: f64, h: f64) -> f64 {
    p / (interference + h.recip())
}

/// Rates with the SIC constraint resolved by the ordering `h1 >= h2`: each
/// non-legacy signal is limited by the weaker user's decoding.
pub fn rates_simplified(alloc: &PowerAllocation, ch: &ChannelPair) -> RateBreakdown {
    let h1 = ch.h1();
    let h2 = ch.h2();
    RateBreakdown {
        r11: (alloc.p11 * h1).ln_1p(),
        r21: sinr(alloc.p21, alloc.p11, h2).ln_1p(),
        r12: sinr(alloc.p12, alloc.p22, h2).ln_1p(),
        r22: (alloc.p22 * h2).ln_1p(),
    }
}

/// Rates with the non-legacy signal rate taken as the minimum over both
/// receivers' decoding conditions. Does not use the ordering of the gains.
pub fn rates_rigorous(alloc: &PowerAllocation, ch: &ChannelPair) -> RateBreakdown {
    let h1 = ch.h1();
    let h2 = ch.h2();
    let both = |p: f64, interference: f64| {
        sinr(p, interference, h1)
            .ln_1p()
            .min(sinr(p, interference, h2).ln_1p())
    };
    RateBreakdown {
        r11: (alloc.p11 * h1).ln_1p(),
        r21: both(alloc.p21, alloc.p11),
        r12: both(alloc.p12, alloc.p22),
        r22: (alloc.p22 * h2).ln_1p(),
    }
}

pub fn total_power(alloc: &PowerAllocation) -> f64 {
    alloc.p11 + alloc.p12 + alloc.p21 + alloc.p22
}

/// Per-user rate surplus `(r_m1 + r_m2) - R` under the rigorous rates.
pub fn rate_residuals(alloc: &PowerAllocation, ch: &ChannelPair, rate: RateTarget) -> [f64; 2] {
    let rates = rates_rigorous(alloc, ch);
    [rates.user1() - rate.nats(), rates.user2() - rate.nats()]
}

/// Whether both users reach `rate` within `tol` nats.
pub fn is_feasible(alloc: &PowerAllocation, ch: &ChannelPair, rate: RateTarget, tol: f64) -> bool {
    rate_residuals(alloc, ch, rate)
        .iter()
        .all(|&surplus| surplus >= -tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{E, LN_2};

    fn hybrid_point() -> PowerAllocation {
        // Closed form at h = (2, 1), R = 1, evaluated to 30 digits.
        PowerAllocation::new(
            0.859_140_914_229_522_6,
            0.0,
            0.388_895_776_684_317_37,
            1.248_036_690_913_84,
        )
        .unwrap()
    }

    #[test]
    fn channel_pair_rejects_bad_input() {
        assert!(matches!(
            ChannelPair::new(1.0, 2.0),
            Err(ModelError::Unordered { .. })
        ));
        assert!(ChannelPair::new(0.0, 0.0).is_err());
        assert!(ChannelPair::new(f64::INFINITY, 1.0).is_err());
        assert!(ChannelPair::new(1.0, -1.0).is_err());
        assert!(ChannelPair::new(f64::NAN, 1.0).is_err());
        assert!(ChannelPair::new(1.0, 1.0).is_ok());
    }

    #[test]
    fn rate_and_power_validation() {
        assert!(RateTarget::new(0.0).is_err());
        assert!(RateTarget::new(f64::NAN).is_err());
        assert_relative_eq!(RateTarget::from_bits(1.0).unwrap().nats(), LN_2);
        assert!(PowerAllocation::new(0.0, -1e-3, 0.0, 0.0).is_err());
        assert!(PowerAllocation::new(0.0, 0.0, f64::NAN, 0.0).is_err());
    }

    #[test]
    fn zero_power_gives_zero_rates() {
        let ch = ChannelPair::new(2.0, 1.0).unwrap();
        let r = rates_simplified(&PowerAllocation::default(), &ch);
        assert_eq!((r.r11, r.r21, r.r12, r.r22), (0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn hybrid_point_rates() {
        let ch = ChannelPair::new(2.0, 1.0).unwrap();
        let r = rates_simplified(&hybrid_point(), &ch);
        assert_relative_eq!(r.r11, 1.0, epsilon = 1e-15);
        assert_relative_eq!(r.r21, 0.189_942_746_520_861_24, epsilon = 1e-14);
        assert_eq!(r.r12, 0.0);
        assert_relative_eq!(r.r22, 0.810_057_253_479_138_8, epsilon = 1e-14);
        assert_relative_eq!(r.user2(), 1.0, epsilon = 1e-14);
        assert_eq!(r, rates_rigorous(&hybrid_point(), &ch));
    }

    #[test]
    fn single_signal_rate() {
        let ch = ChannelPair::new(1.0, 1.0).unwrap();
        let r = rates_simplified(&PowerAllocation::new(1.0, 0.0, 0.0, 0.0).unwrap(), &ch);
        assert_relative_eq!(r.r11, LN_2, epsilon = 1e-15);
        assert_eq!((r.r21, r.r12, r.r22), (0.0, 0.0, 0.0));
    }

    #[test]
    fn rigorous_rate_takes_weaker_branch() {
        let ch = ChannelPair::new(1.0, 1.0).unwrap();
        let r = rates_rigorous(&PowerAllocation::new(0.0, 0.0, 1.0, 0.0).unwrap(), &ch);
        assert_relative_eq!(r.r21, LN_2, epsilon = 1e-15);

        // h1-branch gives ln(1 + 3/4), h2-branch ln(1 + 1/2).
        let ch = ChannelPair::new(3.0, 1.0).unwrap();
        let r = rates_rigorous(&PowerAllocation::new(1.0, 0.0, 1.0, 0.0).unwrap(), &ch);
        assert_relative_eq!(r.r21, 1.5f64.ln(), epsilon = 1e-15);
    }

    #[test]
    fn total_power_examples() {
        assert_eq!(total_power(&PowerAllocation::default()), 0.0);
        assert_relative_eq!(
            total_power(&hybrid_point()),
            2.496_073_381_827_68,
            epsilon = 1e-13
        );
        let oma = PowerAllocation::new((E - 1.0) / 2.0, 0.0, 0.0, E - 1.0).unwrap();
        assert_relative_eq!(total_power(&oma), 2.577_422_742_688_568, epsilon = 1e-13);
    }

    #[test]
    fn feasibility() {
        let ch = ChannelPair::new(2.0, 1.0).unwrap();
        let rate = RateTarget::new(1.0).unwrap();
        assert!(is_feasible(&hybrid_point(), &ch, rate, 1e-9));
        let res = rate_residuals(&hybrid_point(), &ch, rate);
        assert!(res[0].abs() <= 1e-12 && res[1].abs() <= 1e-12, "{res:?}");
        assert!(!is_feasible(&PowerAllocation::default(), &ch, rate, 1e-9));

        let ch = ChannelPair::new(3.7, 0.4).unwrap();
        let oma = PowerAllocation::new(rate.exp_m1() / ch.h1(), 0.0, 0.0, rate.exp_m1() / ch.h2())
            .unwrap();
        assert!(is_feasible(&oma, &ch, rate, 1e-9));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn channel() -> impl Strategy<Value = ChannelPair> {
            (1e-3f64..50.0, 1e-3f64..50.0)
                .prop_map(|(a, b)| ChannelPair::new(a.max(b), a.min(b)).unwrap())
        }

        fn alloc() -> impl Strategy<Value = PowerAllocation> {
            [0.0f64..100.0, 0.0f64..100.0, 0.0f64..100.0, 0.0f64..100.0]
                .prop_map(|[a, b, c, d]| PowerAllocation::new(a, b, c, d).unwrap())
        }

        proptest! {
            #[test]
            fn rigorous_equals_simplified(a in alloc(), ch in channel()) {
                prop_assert_eq!(rates_rigorous(&a, &ch), rates_simplified(&a, &ch));
            }

            #[test]
            fn own_power_monotone(a in alloc(), ch in channel(), bump in 0.0f64..10.0) {
                let base = rates_rigorous(&a, &ch);
                let mut b = a;
                b.p11 += bump;
                prop_assert!(rates_rigorous(&b, &ch).r11 >= base.r11);
                let mut b = a;
                b.p12 += bump;
                prop_assert!(rates_rigorous(&b, &ch).r12 >= base.r12);
                let mut b = a;
                b.p21 += bump;
                prop_assert!(rates_rigorous(&b, &ch).r21 >= base.r21);
                let mut b = a;
                b.p22 += bump;
                prop_assert!(rates_rigorous(&b, &ch).r22 >= base.r22);
            }

            #[test]
            fn total_power_is_additive(a in alloc(), b in alloc()) {
                let lhs = total_power(&(a + b));
                let rhs = total_power(&a) + total_power(&b);
                prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1.0));
            }
        }
    }
}
