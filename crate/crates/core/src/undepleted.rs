//! Triply concurrent down-conversion with undepleted, equal, real pumps.
//!
//! With `tau = xi t` the signal operators evolve as a Bogoliubov map with
//! coefficients
//!
//! ```text
//! A = cosh 2tau + 2 cosh tau     B = sinh 2tau - 2 sinh tau
//! C = cosh 2tau - cosh tau       D = sinh tau + sinh 2tau
//! ```
//!
//! (each multiplied by 1/3), and every mode and every pair is statistically
//! identical. The coefficients grow like `exp(2 tau)` and stay finite in
//! double precision up to `tau` of about 354; the moments are quadratic in
//! them, grow like `exp(4 tau)` and overflow past `tau` of about 177.
//! Differences such as the VLF value lose relative precision long before
//! that through cancellation.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::criteria::{epr_one_mode, epr_two_mode, vlf_triplet, Combo, Sign};
use crate::error::{check_non_negative, Result};
use crate::gaussian::MomentTable;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UndepletedPoint {
    pub tau: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl UndepletedPoint {
    /// `A^2 - B^2 + 2(C^2 - D^2)`, equal to 9 for a commutator-preserving map.
    pub fn identity_norm(&self) -> f64 {
        let Self { a, b, c, d, .. } = *self;
        a * a - b * b + 2.0 * (c * c - d * d)
    }

    /// `2(AC - BD) + C^2 - D^2`, zero for a commutator-preserving map.
    pub fn identity_cross(&self) -> f64 {
        let Self { a, b, c, d, .. } = *self;
        2.0 * (a * c - b * d) + c * c - d * d
    }

    /// Magnitude of the individual terms, for scaled comparisons.
    pub fn scale(&self) -> f64 {
        let Self { a, b, c, d, .. } = *self;
        a * a + b * b + 2.0 * (c * c + d * d)
    }
}

pub fn abcd(tau: f64) -> Result<UndepletedPoint> {
    check_non_negative("tau", tau)?;
    let (c1, s1) = (tau.cosh(), tau.sinh());
    let (c2, s2) = ((2.0 * tau).cosh(), (2.0 * tau).sinh());
    Ok(UndepletedPoint { tau, a: c2 + 2.0 * c1, b: s2 - 2.0 * s1, c: c2 - c1, d: s1 + s2 })
}

/// Quadrature moments of the three signal modes at `tau`, from vacuum inputs.
pub fn moment_table(tau: f64) -> Result<MomentTable> {
    let UndepletedPoint { a, b, c, d, .. } = abcd(tau)?;
    let vx = ((a + b).powi(2) + 2.0 * (c + d).powi(2)) / 9.0;
    let vy = ((a - b).powi(2) + 2.0 * (c - d).powi(2)) / 9.0;
    let cx = (c + d) * (c + d + 2.0 * a + 2.0 * b) / 9.0;
    let cy = (c - d) * (c - d + 2.0 * a - 2.0 * b) / 9.0;
    let block = |diag: f64, off: f64| DMatrix::from_fn(3, 3, |i, j| if i == j { diag } else { off });
    MomentTable::from_blocks(block(vx, cx), block(vy, cy), DMatrix::zeros(3, 3))
}

/// Closed-form VLF value (all three are equal).
pub fn v3_closed(tau: f64) -> Result<f64> {
    let UndepletedPoint { a, b, c, d, .. } = abcd(tau)?;
    Ok((5.0 * (a * a + b * b) + 8.0 * b * (d - 2.0 * c) + 2.0 * a * (4.0 * c - 8.0 * d - b)
        + 14.0 * (c * c + d * d)
        - 20.0 * c * d)
        / 9.0)
}

/// VLF value obtained by expanding [`moment_table`] through the criteria.
pub fn v3_from_moments(tau: f64) -> Result<f64> {
    Ok(vlf_triplet(&moment_table(tau)?)?.v12)
}

/// `(one-mode product, two-mode product)` with the `+` combinations: mode 1
/// inferred from `Q_2 + Q_3`, and `Q_2 + Q_3` inferred from mode 1.
pub fn epr_curves(tau: f64) -> Result<(f64, f64)> {
    let t = moment_table(tau)?;
    let combo = Combo::new(1, 2, Sign::Plus);
    Ok((epr_one_mode(&t, combo, 0)?.product, epr_two_mode(&t, 0, combo)?.product))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::full_report;
    use crate::gaussian::Quadrature;

    #[test]
    fn initial_point() {
        let p = abcd(0.0).unwrap();
        assert_eq!((p.a, p.b, p.c, p.d), (3.0, 0.0, 0.0, 0.0));
        assert!(abcd(-0.5).is_err());
    }

    #[test]
    fn a_at_one() {
        let p = abcd(1.0).unwrap();
        assert!((p.a - (2f64.cosh() + 2.0 * 1f64.cosh())).abs() < 1e-14);
        assert!((p.a - 6.848_357_0).abs() < 1e-6);
    }

    #[test]
    fn starts_in_vacuum() {
        let t = moment_table(0.0).unwrap();
        assert_eq!(t, MomentTable::vacuum(3).unwrap());
        assert_eq!(v3_closed(0.0).unwrap(), 5.0);
        assert_eq!(epr_curves(0.0).unwrap(), (4.0, 1.0));
    }

    #[test]
    fn symmetric_and_physical() {
        for i in 1..60 {
            let tau = i as f64 * 0.05;
            let t = moment_table(tau).unwrap();
            let report = full_report(&t).unwrap();
            assert!(report.permutation_symmetric, "tau {tau}");
            let (vx, vy) = (t.get(Quadrature::X, 0, 0), t.get(Quadrature::Y, 0, 0));
            assert!(vx * vy >= 1.0 - 1e-9);
        }
    }

    #[test]
    fn epr_factor_four_and_violation() {
        for i in 1..40 {
            let tau = i as f64 * 0.05;
            let (one, two) = epr_curves(tau).unwrap();
            assert!((one - 4.0 * two).abs() < 1e-10 * one.max(1.0), "tau {tau}: {one} {two}");
            assert!(one < 4.0 && two < 1.0);
        }
    }

    #[test]
    fn finite_up_to_documented_bound() {
        let p = abcd(350.0).unwrap();
        assert!([p.a, p.b, p.c, p.d].iter().all(|v| v.is_finite()));
        let t = moment_table(175.0).unwrap();
        assert!(t.vxx().iter().all(|v| v.is_finite()));
    }

    #[test]
    fn v3_falls_monotonically() {
        let mut prev = v3_from_moments(0.0).unwrap();
        for i in 1..=60 {
            let v = v3_from_moments(i as f64 * 0.05).unwrap();
            assert!(v < prev);
            prev = v;
        }
        assert!(prev < 0.01);
    }
}
