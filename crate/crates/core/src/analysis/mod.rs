//! Executable versions of the optimality argument: the convexity chain for
//! user 1's reduced objective, the rate-constraint Hessian, and KKT
//! certificates for user 1's OMA point.

pub mod convexity;
pub mod hessian;
pub mod kkt;

pub use convexity::{
    f_double_prime, f_prime, f_value, phi_at_zero, phi_prime, phi_value, ReducedObjective,
};
pub use hessian::{hessian_f2, search_non_psd_witness, HessianSample, NonPsdWitness};
pub use kkt::{kkt_p4, kkt_p4_at, kkt_p6, kkt_p6_at, KktCertificate, KktProblem, Multiplier};
