//! Output quadrature spectra of a single degenerate OPO from linearized
//! fluctuation theory, below and above the oscillation threshold.
//!
//! `omega` is in the same rate units as the dampings (no factor of 2π). The
//! amplified quadrature is `X` and the squeezed one is `Y`.

use serde::{Deserialize, Serialize};

use crate::error::{check_non_negative, check_positive, Error, Result};
use crate::gaussian::Quadrature;

/// Relative distance to threshold inside which the linearized results are
/// flagged as unreliable.
pub const THRESHOLD_WARNING_BAND: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Below,
    Above,
}

impl Branch {
    pub fn name(self) -> &'static str {
        match self {
            Branch::Below => "below",
            Branch::Above => "above",
        }
    }

    /// Branch matching a pump-to-threshold ratio (`Above` for ratio > 1).
    pub fn for_ratio(ratio: f64) -> Self {
        if ratio > 1.0 {
            Branch::Above
        } else {
            Branch::Below
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OpoParams {
    pub gamma_a: f64,
    pub gamma_b: f64,
    pub kappa: f64,
    pub epsilon: f64,
}

impl OpoParams {
    /// Dampings and nonlinearity must be positive; the pump may be zero.
    pub fn new(gamma_a: f64, gamma_b: f64, kappa: f64, epsilon: f64) -> Result<Self> {
        check_positive("gamma_a", gamma_a)?;
        check_positive("gamma_b", gamma_b)?;
        check_positive("kappa", kappa)?;
        check_non_negative("epsilon", epsilon)?;
        Ok(Self { gamma_a, gamma_b, kappa, epsilon })
    }

    /// Same cavity with the pump set to `ratio` times the critical value.
    pub fn at_pump_ratio(&self, ratio: f64) -> Result<Self> {
        Self::new(self.gamma_a, self.gamma_b, self.kappa, ratio * critical_pump(self))
    }

    pub fn pump_ratio(&self) -> f64 {
        self.epsilon / critical_pump(self)
    }

    pub fn near_threshold(&self) -> bool {
        (self.pump_ratio() - 1.0).abs() < THRESHOLD_WARNING_BAND
    }
}

/// One frequency point of a quadrature spectrum pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumPoint {
    pub omega: f64,
    pub s_x: f64,
    pub s_y: f64,
    /// Pump lies inside the threshold warning band.
    pub near_threshold: bool,
}

impl SpectrumPoint {
    pub fn flat(omega: f64, s_x: f64, s_y: f64) -> Self {
        Self { omega, s_x, s_y, near_threshold: false }
    }

    /// `(S_X, S_Y)` after rotating the output so that its squeezed quadrature
    /// lies on `axis`.
    pub fn oriented(&self, axis: Quadrature) -> (f64, f64) {
        match axis {
            Quadrature::Y => (self.s_x, self.s_y),
            Quadrature::X => (self.s_y, self.s_x),
        }
    }
}

/// Critical pump amplitude `gamma_a gamma_b / kappa`.
pub fn critical_pump(p: &OpoParams) -> f64 {
    p.gamma_a * p.gamma_b / p.kappa
}

pub fn spectrum(p: &OpoParams, omega: f64, branch: Branch) -> Result<SpectrumPoint> {
    let ratio = p.pump_ratio();
    let consistent = match branch {
        Branch::Below => ratio <= 1.0,
        Branch::Above => ratio >= 1.0,
    };
    if !consistent {
        return Err(Error::BranchMismatch { branch: branch.name(), ratio });
    }
    if !omega.is_finite() {
        return Err(Error::InvalidParameter { name: "omega", value: omega, reason: "must be finite" });
    }
    let (ga, gb, ke) = (p.gamma_a, p.gamma_b, p.kappa * p.epsilon);
    let w2 = omega * omega;
    let (s_x, s_y) = match branch {
        Branch::Below => {
            let num = 4.0 * ga * gb * ke;
            let dx = (ga * gb - ke).powi(2) + gb * gb * w2;
            let dy = (ga * gb + ke).powi(2) + gb * gb * w2;
            (1.0 + num / dx, 1.0 - num / dy)
        }
        Branch::Above => {
            let num = 4.0 * ga * ga * (gb * gb + w2);
            let dx = (2.0 * ga * gb - 2.0 * ke + w2).powi(2) + gb * gb * w2;
            let dy = (w2 - 2.0 * ke).powi(2) + (2.0 * ga + gb).powi(2) * w2;
            (1.0 + num / dx, 1.0 - num / dy)
        }
    };
    Ok(SpectrumPoint { omega, s_x, s_y, near_threshold: p.near_threshold() })
}

/// Spectrum over a frequency grid, keeping the grid order.
pub fn spectrum_grid(p: &OpoParams, omegas: &[f64], branch: Branch) -> Result<Vec<SpectrumPoint>> {
    omegas.iter().map(|&w| spectrum(p, w, branch)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig_params(ratio: f64) -> OpoParams {
        OpoParams::new(1.0, 1.0, 1e-2, 0.0).unwrap().at_pump_ratio(ratio).unwrap()
    }

    #[test]
    fn critical_pump_values() {
        assert!((critical_pump(&fig_params(0.0)) - 100.0).abs() < 1e-12);
        let p = OpoParams::new(2.0, 3.0, 6.0, 0.0).unwrap();
        assert_eq!(critical_pump(&p), 1.0);
        let q = OpoParams::new(2.0, 3.0, 12.0, 0.0).unwrap();
        assert_eq!(critical_pump(&q), 0.5);
    }

    #[test]
    fn invalid_params() {
        assert!(OpoParams::new(0.0, 1.0, 1.0, 1.0).is_err());
        assert!(OpoParams::new(1.0, 1.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn unpumped_is_vacuum() {
        let s = spectrum(&fig_params(0.0), 0.7, Branch::Below).unwrap();
        assert_eq!((s.s_x, s.s_y), (1.0, 1.0));
    }

    #[test]
    fn half_threshold_line_center() {
        let s = spectrum(&fig_params(0.5), 0.0, Branch::Below).unwrap();
        assert!((s.s_x - 9.0).abs() < 1e-12);
        assert!((s.s_y - 1.0 / 9.0).abs() < 1e-12);
        assert!((s.s_x * s.s_y - 1.0).abs() < 1e-12);
    }

    #[test]
    fn branch_mismatch() {
        assert!(matches!(spectrum(&fig_params(0.5), 0.0, Branch::Above), Err(Error::BranchMismatch { .. })));
        assert!(matches!(spectrum(&fig_params(1.5), 0.0, Branch::Below), Err(Error::BranchMismatch { .. })));
        assert!(spectrum(&fig_params(1.0), 0.3, Branch::Below).is_ok());
        assert!(spectrum(&fig_params(1.0), 0.3, Branch::Above).is_ok());
    }

    #[test]
    fn warning_band() {
        assert!(spectrum(&fig_params(1.01), 0.0, Branch::Above).unwrap().near_threshold);
        assert!(!spectrum(&fig_params(1.05), 0.0, Branch::Above).unwrap().near_threshold);
    }

    #[test]
    fn above_asymptote_is_vacuum() {
        let s = spectrum(&fig_params(1.8), 1e7, Branch::Above).unwrap();
        assert!((s.s_x - 1.0).abs() < 1e-9 && (s.s_y - 1.0).abs() < 1e-9);
    }

    #[test]
    fn even_positive_and_squeezed_on_grids() {
        for ratio in [0.05, 0.3, 0.7, 0.97] {
            let p = fig_params(ratio);
            for i in 0..400 {
                let w = i as f64 * 0.01;
                let a = spectrum(&p, w, Branch::Below).unwrap();
                let b = spectrum(&p, -w, Branch::Below).unwrap();
                assert_eq!((a.s_x, a.s_y), (b.s_x, b.s_y));
                assert!(a.s_y > 0.0 && a.s_y < 1.0 && a.s_x > 1.0);
            }
        }
        for ratio in [1.03, 1.5, 3.0, 10.0] {
            let p = fig_params(ratio);
            for i in 0..400 {
                let w = i as f64 * 0.01;
                let a = spectrum(&p, w, Branch::Above).unwrap();
                let b = spectrum(&p, -w, Branch::Above).unwrap();
                assert_eq!((a.s_x, a.s_y), (b.s_x, b.s_y));
                assert!(a.s_y > 0.0, "ratio {ratio} w {w}: {}", a.s_y);
            }
        }
    }
}
