//! Minimum-total-power solutions of the two-user problem.
//!
//! User 2's best response is known in closed form, which splits the joint
//! problem by user 2's regime. With user 2 in OMA, user 1's problem (`P4`)
//! is solved by its OMA point. With user 2 in hybrid NOMA, user 1's problem
//! reduces to the convex scalar problem `P6`, solved here by bisection on
//! `f'`. [`solve_p1`] keeps the cheaper of the two. The brute-force oracles
//! in [`oracle`] check the result without using either reduction.

pub mod oracle;

use serde::Serialize;

use crate::analysis::convexity::ReducedObjective;
use crate::analysis::kkt::{kkt_p4, kkt_p6_at, KktCertificate};
use crate::closed_form::{oma_power, u2_best_response, y_star, ModeDecision, BRANCH_TOL};
use crate::model::{total_power, ChannelPair, PowerAllocation, RateTarget};
use crate::numeric::{bisect, golden_section};

pub use oracle::{joint_oracle, p3_exhaustive, p3_objective, GridSpec, OracleResult};

/// Which regime user 2 is in for the sub-problem that produced a solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Branch {
    /// User 2 in pure OMA (`P4`).
    U2Oma,
    /// User 2 in hybrid NOMA (`P6`).
    U2Hybrid,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveResult {
    pub alloc: PowerAllocation,
    pub total: f64,
    pub branch: Branch,
    pub u1_mode: ModeDecision,
    pub certificate: KktCertificate,
}

/// User 1's best slot-1 power with user 2 in hybrid NOMA, plus the powers
/// that go with it.
pub fn solve_p6(ch: &ChannelPair, rate: RateTarget) -> SolveResult {
    let f = ReducedObjective::new(*ch, rate);
    let x_max = f.x_max();
    let x = minimize_reduced(&f);
    let at_right = x_max - x <= BRANCH_TOL * x_max;
    let x = if at_right { x_max } else { x };

    let p12 = y_star(x, ch, rate).expect("minimizer lies in the reduced domain");
    let u2 = u2_best_response(x, ch.h2(), rate);
    let alloc = PowerAllocation {
        p11: x,
        p12,
        p21: u2.p21,
        p22: u2.p22,
    };
    SolveResult {
        total: total_power(&alloc),
        alloc,
        branch: Branch::U2Hybrid,
        u1_mode: if at_right {
            ModeDecision::PureOma
        } else {
            ModeDecision::HybridNoma
        },
        certificate: kkt_p6_at(x, ch, rate),
    }
}

/// Minimizer of the convex reduced objective on `[0, x_max]`.
fn minimize_reduced(f: &ReducedObjective) -> f64 {
    let x_max = f.x_max();
    let slope = |x: f64| f.first_derivative(x).unwrap_or(f64::NAN);
    let (lo_slope, hi_slope) = (slope(0.0), slope(x_max));
    if !(lo_slope.is_finite() && hi_slope.is_finite()) {
        return golden_section(
            |x| f.value(x).unwrap_or(f64::INFINITY),
            0.0,
            x_max,
            1e-13 * x_max,
        );
    }
    if hi_slope <= 0.0 {
        x_max
    } else if lo_slope >= 0.0 {
        0.0
    } else {
        bisect(slope, 0.0, x_max, 1e-14 * x_max)
    }
}

/// User 1's OMA point with user 2 in pure OMA.
pub fn solve_p4(ch: &ChannelPair, rate: RateTarget) -> SolveResult {
    let alloc = PowerAllocation {
        p11: oma_power(ch.h1(), rate),
        p12: 0.0,
        p21: 0.0,
        p22: oma_power(ch.h2(), rate),
    };
    SolveResult {
        total: total_power(&alloc),
        alloc,
        branch: Branch::U2Oma,
        u1_mode: ModeDecision::PureOma,
        certificate: kkt_p4(ch, rate),
    }
}

/// The cheaper of [`solve_p4`] and [`solve_p6`]; near-ties go to `P6`.
pub fn solve_p1(ch: &ChannelPair, rate: RateTarget) -> SolveResult {
    let hybrid = solve_p6(ch, rate);
    let oma = solve_p4(ch, rate);
    if hybrid.total <= oma.total * (1.0 + BRANCH_TOL) {
        hybrid
    } else {
        oma
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_form::hybrid_noma_allocation;
    use crate::model::{is_feasible, rate_residuals};
    use approx::assert_relative_eq;
    use std::f64::consts::E;

    fn ch(h1: f64, h2: f64) -> ChannelPair {
        ChannelPair::new(h1, h2).unwrap()
    }

    fn rate(r: f64) -> RateTarget {
        RateTarget::new(r).unwrap()
    }

    #[test]
    fn p6_reference_point() {
        let s = solve_p6(&ch(2.0, 1.0), rate(1.0));
        assert_eq!(s.alloc.p11, (E - 1.0) / 2.0);
        assert_eq!(s.alloc.p12, 0.0);
        assert_relative_eq!(s.total, 2.496_073_381_827_68, epsilon = 1e-13);
        assert_eq!(s.branch, Branch::U2Hybrid);
        assert_eq!(s.u1_mode, ModeDecision::PureOma);
        assert!(s.certificate.is_valid());
    }

    #[test]
    fn equal_gains_collapse_to_oma() {
        let s = solve_p6(&ch(1.0, 1.0), rate(1.0));
        assert_relative_eq!(s.total, 2.0 * (E - 1.0), epsilon = 1e-14);
        assert_eq!(s.alloc.p21, 0.0);
        assert_eq!(s.alloc.p12, 0.0);
        let s = solve_p4(&ch(1.0, 1.0), rate(1.0));
        assert_relative_eq!(s.total, 2.0 * (E - 1.0), epsilon = 1e-14);
        let s = solve_p1(&ch(1.0, 1.0), rate(1.0));
        assert_relative_eq!(s.total, 2.0 * (E - 1.0), epsilon = 1e-14);
        assert_eq!(s.branch, Branch::U2Hybrid);
    }

    #[test]
    fn p4_reference_point() {
        let s = solve_p4(&ch(2.0, 1.0), rate(1.0));
        assert_relative_eq!(s.total, 2.577_422_742_688_568, epsilon = 1e-13);
        assert!(s.certificate.is_valid());
    }

    #[test]
    fn p1_matches_hybrid_closed_form() {
        let c = ch(2.0, 1.0);
        let s = solve_p1(&c, rate(1.0));
        assert_eq!(s.alloc, hybrid_noma_allocation(&c, rate(1.0)));
        assert!(is_feasible(&s.alloc, &c, rate(1.0), 1e-8));
        let res = rate_residuals(&s.alloc, &c, rate(1.0));
        assert!(res.iter().all(|r| r.abs() <= 1e-12));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn instance() -> impl Strategy<Value = (ChannelPair, RateTarget)> {
            (1e-2f64..20.0, 1e-2f64..20.0, 0.01f64..4.0).prop_map(|(a, b, r)| {
                (
                    ChannelPair::new(a.max(b), a.min(b)).unwrap(),
                    RateTarget::new(r).unwrap(),
                )
            })
        }

        proptest! {
            #[test]
            fn p1_feasible_and_tight((c, r) in instance()) {
                let s = solve_p1(&c, r);
                prop_assert!(is_feasible(&s.alloc, &c, r, 1e-8));
                let res = rate_residuals(&s.alloc, &c, r);
                prop_assert!(res.iter().all(|v| v.abs() <= 1e-8), "{:?}", res);
            }

            #[test]
            fn p6_never_worse_than_p4((c, r) in instance()) {
                prop_assert!(solve_p6(&c, r).total <= solve_p4(&c, r).total * (1.0 + 1e-12));
            }

            #[test]
            fn p6_minimizer_is_oma_point((c, r) in instance()) {
                let s = solve_p6(&c, r);
                let x_max = oma_power(c.h1(), r);
                prop_assert!((s.alloc.p11 - x_max).abs() <= 1e-9 * x_max.max(1.0));
            }

            #[test]
            fn decisions_scale_invariant((c, r) in instance(), factor in 1e-2f64..1e2) {
                let scaled = c.scaled(factor).unwrap();
                for (a, b) in [
                    (solve_p1(&c, r), solve_p1(&scaled, r)),
                    (solve_p6(&c, r), solve_p6(&scaled, r)),
                    (solve_p4(&c, r), solve_p4(&scaled, r)),
                ] {
                    prop_assert_eq!(a.u1_mode, b.u1_mode);
                    prop_assert_eq!(a.branch, b.branch);
                }
            }
        }
    }
}
