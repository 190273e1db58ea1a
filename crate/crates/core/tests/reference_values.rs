//! Reference values computed independently at 30 significant digits.

#![allow(clippy::excessive_precision)]

use approx::assert_relative_eq;
use hnoma_core::analysis::kkt::lambda4_closed_form;
use hnoma_core::analysis::{f_prime, f_value, phi_at_zero, phi_value};
use hnoma_core::closed_form::{
    hybrid_noma_allocation, oma_allocation, u2_best_response, y_star, ModeDecision,
};
use hnoma_core::model::{rates_rigorous, rates_simplified, total_power};
use hnoma_core::solver::solve_p1;
use hnoma_core::{ChannelPair, RateTarget};

const E: f64 = std::f64::consts::E;

fn setup() -> (ChannelPair, RateTarget) {
    (
        ChannelPair::new(2.0, 1.0).unwrap(),
        RateTarget::new(1.0).unwrap(),
    )
}

#[test]
fn hybrid_point() {
    let (ch, r) = setup();
    let a = hybrid_noma_allocation(&ch, r);
    assert_relative_eq!(a.p11, 0.859_140_914_229_522_618, max_relative = 1e-14);
    assert_eq!(a.p12, 0.0);
    assert_relative_eq!(a.p21, 0.388_895_776_684_317_367, max_relative = 1e-13);
    assert_relative_eq!(a.p22, 1.248_036_690_913_839_99, max_relative = 1e-14);
    assert_relative_eq!(total_power(&a), 2.496_073_381_827_68, max_relative = 1e-14);
    assert_relative_eq!(
        total_power(&oma_allocation(&ch, r)),
        2.577_422_742_688_567_85,
        max_relative = 1e-14
    );
    assert_relative_eq!(
        solve_p1(&ch, r).total,
        2.496_073_381_827_68,
        max_relative = 1e-14
    );
}

#[test]
fn hybrid_rate_split() {
    let (ch, r) = setup();
    let a = hybrid_noma_allocation(&ch, r);
    let rates = rates_simplified(&a, &ch);
    assert_relative_eq!(rates.r21, 0.189_942_746_520_861_238, max_relative = 1e-12);
    assert_relative_eq!(rates.r22, 0.810_057_253_479_138_762, max_relative = 1e-13);
    assert_relative_eq!(rates.user1(), 1.0, max_relative = 1e-14);
    assert_relative_eq!(rates.user2(), 1.0, max_relative = 1e-14);
    assert_eq!(rates, rates_rigorous(&a, &ch));
}

#[test]
fn reduced_objective() {
    let (ch, r) = setup();
    assert_relative_eq!(
        y_star(0.0, &ch, r).unwrap(),
        2.832_967_799_637_936_68,
        max_relative = 1e-14
    );
    assert_relative_eq!(
        y_star(0.7, &ch, r).unwrap(),
        0.285_083_645_868_452_701,
        max_relative = 1e-13
    );
    assert_relative_eq!(
        f_value(0.7, &ch, r).unwrap(),
        0.985_083_645_868_452_701,
        max_relative = 1e-14
    );
    let b = (E - 1.0) / 2.0;
    assert_relative_eq!(
        f_prime(b, &ch, r).unwrap(),
        -0.654_012_963_172_563_724,
        max_relative = 1e-12
    );
    assert_relative_eq!(
        lambda4_closed_form(&ch, r),
        0.327_006_481_586_281_862,
        max_relative = 1e-14
    );
}

#[test]
fn equal_gains() {
    let ch = ChannelPair::new(1.0, 1.0).unwrap();
    let r = RateTarget::new(1.0).unwrap();
    assert_relative_eq!(phi_at_zero(&ch, r), 3.0 * E + 1.0, max_relative = 1e-14);
    assert_relative_eq!(
        phi_value(0.0, &ch, r).unwrap(),
        3.0 * E + 1.0,
        max_relative = 1e-13
    );
    assert_relative_eq!(
        total_power(&oma_allocation(&ch, r)),
        2.0 * (E - 1.0),
        max_relative = 1e-15
    );

    let br = u2_best_response(0.0, 1.0, r);
    assert_eq!(br.mode, ModeDecision::HybridNoma);
    assert_relative_eq!(br.p21, E.sqrt() - 1.0, max_relative = 1e-15);
    assert_relative_eq!(br.p22, E.sqrt() - 1.0, max_relative = 1e-15);
}
