//! Curvature of user 1's rate constraint when user 2 plays hybrid NOMA.
//!
//! In the shifted variable `z = x + 1/h2` the constraint reads
//! `log(h1) + f2(z, y) >= R` with
//!
//! ```text
//! f2(z, y) = ln(z - a) + ln(1 + c·y·z^{-1/2}),   a = 1/h2 - 1/h1,   c = e^{-R/2}·sqrt(h2)
//! ```
//!
//! [`hessian_f2`] reports the closed-form matrix as it is usually printed
//! next to a finite-difference Hessian built from `f2` values alone. Only the
//! `(z, z)` entry of the printed matrix is a second derivative; the other
//! three are first derivatives. The finite-difference matrix is the one whose
//! eigenvalues are reported.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{ModelError, Result};
use crate::model::{ChannelPair, RateTarget};
use crate::numeric::{fd_hessian, sym_eigenvalues, symmetrize};

/// Smallest eigenvalue at or above which a symmetric matrix counts as PSD.
pub const PSD_TOL: f64 = -1e-9;

/// Relative tolerance used when comparing printed entries with finite differences.
pub const ENTRY_REL_TOL: f64 = 1e-4;

const FD_REL_STEP: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HessianSample {
    pub z: f64,
    pub y: f64,
    /// Closed-form matrix in the printed layout.
    pub printed: [[f64; 2]; 2],
    /// Finite-difference Hessian of `f2`.
    pub finite_difference: [[f64; 2]; 2],
    /// Eigenvalues of the symmetrized finite-difference Hessian.
    pub min_eigenvalue_symmetrized: f64,
    pub max_eigenvalue_symmetrized: f64,
    /// Which printed entries agree with the finite-difference Hessian.
    pub printed_matches: [[bool; 2]; 2],
}

impl HessianSample {
    pub fn is_psd(&self) -> bool {
        self.min_eigenvalue_symmetrized >= PSD_TOL
    }
}

#[derive(Debug, Clone, Copy)]
struct ConstraintCurvature {
    a: f64,
    c: f64,
}

impl ConstraintCurvature {
    fn new(ch: &ChannelPair, rate: RateTarget) -> Self {
        Self {
            a: ch.h2().recip() - ch.h1().recip(),
            c: (-0.5 * rate.nats()).exp() * ch.h2().sqrt(),
        }
    }

    fn value(&self, z: f64, y: f64) -> f64 {
        (z - self.a).ln() + (self.c * y / z.sqrt()).ln_1p()
    }

    fn printed(&self, z: f64, y: f64) -> [[f64; 2]; 2] {
        let (a, c) = (self.a, self.c);
        let w = 1.0 + c * y / z.sqrt();
        let zz = -(z - a).powi(-2) + 0.75 * c * y * z.powf(-2.5) / w
            - 0.25 * c * c * y * y * z.powi(-3) / (w * w);
        let zy = (z - a).recip() - 0.5 * c * y * z.powf(-1.5) / w;
        let yz = c / z.sqrt() / w;
        [[zz, zy], [yz, yz]]
    }
}

/// Value of `f2(z, y)`; `z` must exceed `a = 1/h2 - 1/h1`.
pub fn f2_value(z: f64, y: f64, ch: &ChannelPair, rate: RateTarget) -> Result<f64> {
    let curv = ConstraintCurvature::new(ch, rate);
    check_domain(z, y, curv.a)?;
    Ok(curv.value(z, y))
}

fn check_domain(z: f64, y: f64, a: f64) -> Result<()> {
    if !(z > a && z.is_finite()) {
        return Err(ModelError::OutOfDomain {
            what: "z",
            value: z,
            domain: format!("z > {a}"),
        });
    }
    if !(y >= 0.0 && y.is_finite()) {
        return Err(ModelError::InvalidPower(y));
    }
    Ok(())
}

fn entries_agree(printed: f64, fd: f64) -> bool {
    (printed - fd).abs() <= ENTRY_REL_TOL * printed.abs().max(fd.abs()) + 1e-10
}

pub fn hessian_f2(z: f64, y: f64, ch: &ChannelPair, rate: RateTarget) -> Result<HessianSample> {
    let curv = ConstraintCurvature::new(ch, rate);
    check_domain(z, y, curv.a)?;
    // Stay inside z > a and keep the step near eps^(1/4) of the local scale.
    let hz = FD_REL_STEP * z.abs().max(1.0).min(z - curv.a);
    let hy = FD_REL_STEP * y.max(1.0);
    let fd = fd_hessian(|u, v| curv.value(u, v), z, y, hz, hy);
    let printed = curv.printed(z, y);
    let (min_eig, max_eig) = sym_eigenvalues(&symmetrize(&fd));
    let mut printed_matches = [[false; 2]; 2];
    for (i, row) in printed_matches.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = entries_agree(printed[i][j], fd[i][j]);
        }
    }
    Ok(HessianSample {
        z,
        y,
        printed,
        finite_difference: fd,
        min_eigenvalue_symmetrized: min_eig,
        max_eigenvalue_symmetrized: max_eig,
        printed_matches,
    })
}

/// A point where the constraint Hessian fails to be PSD.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NonPsdWitness {
    pub channels: ChannelPair,
    pub rate: RateTarget,
    pub sample: HessianSample,
    /// Zero-based index of the random draw that produced the witness.
    pub draw: usize,
}

/// Random search for `(h, R, z, y)` with `y > 0` whose symmetrized
/// finite-difference Hessian has smallest eigenvalue `<= threshold`.
///
/// Gains are ordered unit exponentials, `R ~ U(0.05, 4)`, and `z - a`, `y`
/// are log-uniform over `[1e-2, 1e2]` and `[1e-2, 1e3]`.
pub fn search_non_psd_witness(
    seed: u64,
    max_draws: usize,
    threshold: f64,
) -> Option<NonPsdWitness> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for draw in 0..max_draws {
        let g1 = -rng.random::<f64>().max(f64::MIN_POSITIVE).ln();
        let g2 = -rng.random::<f64>().max(f64::MIN_POSITIVE).ln();
        let Ok(ch) = ChannelPair::new(g1.max(g2), g1.min(g2)) else {
            continue;
        };
        let rate = RateTarget::new(rng.random_range(0.05..4.0)).expect("positive rate");
        let a = ch.h2().recip() - ch.h1().recip();
        let z = a + 10f64.powf(rng.random_range(-2.0..2.0));
        let y = 10f64.powf(rng.random_range(-2.0..3.0));
        let Ok(sample) = hessian_f2(z, y, &ch, rate) else {
            continue;
        };
        if sample.min_eigenvalue_symmetrized <= threshold {
            return Some(NonPsdWitness {
                channels: ch,
                rate,
                sample,
                draw,
            });
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ch(h1: f64, h2: f64) -> ChannelPair {
        ChannelPair::new(h1, h2).unwrap()
    }

    fn rate(r: f64) -> RateTarget {
        RateTarget::new(r).unwrap()
    }

    #[test]
    fn zero_y_is_never_psd() {
        // At y = 0 the value is ln(z - a), but the y-derivatives of the second
        // term survive: d2/dzdy = -c/(2 z^{3/2}), d2/dy2 = -c^2/z.
        let c = ch(2.0, 1.0);
        let a = 0.5;
        let k = (-0.5f64).exp();
        for z in [0.6, 1.0, 4.0] {
            let s = hessian_f2(z, 0.0, &c, rate(1.0)).unwrap();
            let fd = s.finite_difference;
            assert_relative_eq!(fd[0][0], -1.0 / (z - a) / (z - a), max_relative = 1e-5);
            assert_relative_eq!(fd[0][1], -0.5 * k * z.powf(-1.5), max_relative = 1e-5);
            assert_relative_eq!(fd[1][1], -k * k / z, max_relative = 1e-5);
            assert!(!s.is_psd());
        }
    }

    #[test]
    fn printed_zz_entry_matches_fd() {
        let points = [
            (2.0, 1.0, 1.0, 1.5, 0.8),
            (3.0, 0.4, 2.5, 4.0, 12.0),
            (1.1, 1.0, 0.3, 0.2, 0.05),
        ];
        for (h1, h2, r, dz, y) in points {
            let c = ch(h1, h2);
            let z = (1.0 / h2 - 1.0 / h1) + dz;
            let s = hessian_f2(z, y, &c, rate(r)).unwrap();
            assert_relative_eq!(
                s.printed[0][0],
                s.finite_difference[0][0],
                max_relative = 1e-4
            );
            assert!(s.printed_matches[0][0]);
            // The remaining printed entries are first derivatives of f2.
            assert!(!s.printed_matches[0][1]);
            assert!(!s.printed_matches[1][0]);
            assert!(!s.printed_matches[1][1]);
        }
    }

    #[test]
    fn printed_off_diagonal_entries_are_gradients() {
        let c = ch(2.5, 0.7);
        let r = rate(1.7);
        let (z, y) = (2.0, 3.0);
        let s = hessian_f2(z, y, &c, r).unwrap();
        let h = 1e-6;
        let dz =
            (f2_value(z + h, y, &c, r).unwrap() - f2_value(z - h, y, &c, r).unwrap()) / (2.0 * h);
        let dy =
            (f2_value(z, y + h, &c, r).unwrap() - f2_value(z, y - h, &c, r).unwrap()) / (2.0 * h);
        assert_relative_eq!(s.printed[0][1], dz, max_relative = 1e-7);
        assert_relative_eq!(s.printed[1][0], dy, max_relative = 1e-7);
        assert_relative_eq!(s.printed[1][1], dy, max_relative = 1e-7);
    }

    #[test]
    fn domain_is_enforced() {
        let c = ch(2.0, 1.0);
        assert!(hessian_f2(0.5, 1.0, &c, rate(1.0)).is_err());
        assert!(hessian_f2(0.4, 1.0, &c, rate(1.0)).is_err());
        assert!(hessian_f2(1.0, -1.0, &c, rate(1.0)).is_err());
    }

    // Pinned from the first hit of `search_non_psd_witness(2024, 10_000, -1e-6)`.
    #[test]
    fn pinned_non_psd_witness() {
        let w = search_non_psd_witness(2024, 10_000, -1e-6).expect("witness");
        assert!(w.sample.y > 0.0);
        assert!(w.sample.min_eigenvalue_symmetrized <= -1e-6);
        let again = hessian_f2(w.sample.z, w.sample.y, &w.channels, w.rate).unwrap();
        assert_eq!(again, w.sample);
    }
}
