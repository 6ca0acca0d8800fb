//! Triply concurrent down-conversion inside a pumped cavity: steady states,
//! zero-frequency closed forms and linearized output spectra.
//!
//! The cavity equations are the free positive-P equations with damping `-κ`
//! on the signals, `-γ` on the pumps and a real injection `ε` on each pump.
//! Fluctuations `δz` about the steady state, ordered as
//! `[α1..3, α1+..3, β1..3, β1+..3]`, obey `dδz = A δz dt + B dW` with
//! `B Bᵀ = D`. The normally ordered intracavity spectrum is
//!
//! ```text
//! S(ω) = (A + iω)^-1 D (Aᵀ - iω)^-1
//! ```
//!
//! and an output quadrature spectrum is `1 + 2κ S_q(ω)`, with vacuum = 1.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::criteria::{epr_one_mode, epr_two_mode, Combo, Sign};
use crate::error::{check_non_negative, check_positive, Error, Result};
use crate::gaussian::{MomentTable, SpectralMomentTable};
use crate::opo::{Branch, THRESHOLD_WARNING_BAND};
use crate::positivep::PUMP_PAIRS;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavityParams {
    pub gamma: f64,
    pub kappa: f64,
    pub chi: f64,
    pub epsilon: f64,
}

impl CavityParams {
    /// Dampings and nonlinearity must be positive; the pump may be zero.
    pub fn new(gamma: f64, kappa: f64, chi: f64, epsilon: f64) -> Result<Self> {
        check_positive("gamma", gamma)?;
        check_positive("kappa", kappa)?;
        check_positive("chi", chi)?;
        check_non_negative("epsilon", epsilon)?;
        Ok(Self { gamma, kappa, chi, epsilon })
    }

    /// Same cavity pumped at `ratio` times threshold.
    pub fn at_pump_ratio(&self, ratio: f64) -> Result<Self> {
        Self::new(self.gamma, self.kappa, self.chi, ratio * threshold(self))
    }

    pub fn pump_ratio(&self) -> f64 {
        self.epsilon / threshold(self)
    }

    pub fn near_threshold(&self) -> bool {
        (self.pump_ratio() - 1.0).abs() < THRESHOLD_WARNING_BAND
    }
}

/// Oscillation threshold `γκ / 2χ`.
pub fn threshold(p: &CavityParams) -> f64 {
    p.gamma * p.kappa / (2.0 * p.chi)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteadyState {
    pub beta_ss: f64,
    pub alpha_ss: f64,
    pub branch: Branch,
}

/// Steady state with the positive signal root above threshold.
pub fn steady_state(p: &CavityParams) -> SteadyState {
    steady_state_signed(p, 1.0)
}

/// Steady state with signal amplitude `sign * |α|`. The three signals share
/// the sign.
pub fn steady_state_signed(p: &CavityParams, sign: f64) -> SteadyState {
    let th = threshold(p);
    if p.epsilon <= th {
        SteadyState { beta_ss: p.epsilon / p.gamma, alpha_ss: 0.0, branch: Branch::Below }
    } else {
        SteadyState {
            beta_ss: p.kappa / (2.0 * p.chi),
            alpha_ss: sign.signum() * ((p.epsilon - th) / p.chi).sqrt(),
            branch: Branch::Above,
        }
    }
}

/// Printed zero-frequency value of every `S_ij`, on the branch set by `ε`.
pub fn zero_freq_closed_form(p: &CavityParams) -> f64 {
    let branch = Branch::for_ratio(p.pump_ratio());
    zero_freq_branch(p, branch)
}

/// One branch of the zero-frequency closed form, evaluated regardless of
/// which side of threshold `ε` lies on.
pub fn zero_freq_branch(p: &CavityParams, branch: Branch) -> f64 {
    let kg = p.kappa * p.gamma;
    let ce = p.chi * p.epsilon;
    match branch {
        Branch::Below => {
            let num = 8.0 * kg * ce * (4.0 * kg * kg + 10.0 * kg * ce + 7.0 * ce * ce);
            5.0 - num / ((kg + ce).powi(2) * (kg + 2.0 * ce).powi(2))
        }
        Branch::Above => {
            let num = kg * kg * (3.0 * kg * kg + 6.0 * kg * ce + 19.0 * ce * ce);
            5.0 - num / (4.0 * ce * ce * (kg + ce).powi(2))
        }
    }
}

const N: usize = 12;

fn a_idx(j: usize) -> usize {
    j
}
fn ap_idx(j: usize) -> usize {
    3 + j
}
fn b_idx(k: usize) -> usize {
    6 + k
}
fn bp_idx(k: usize) -> usize {
    9 + k
}

/// Drift and diffusion matrices of the fluctuations about `ss`.
pub fn linearization(p: &CavityParams, ss: &SteadyState) -> (DMatrix<f64>, DMatrix<f64>) {
    let (a, b, chi) = (ss.alpha_ss, ss.beta_ss, p.chi);
    let mut drift = DMatrix::zeros(N, N);
    let mut diff = DMatrix::zeros(N, N);
    for j in 0..3 {
        drift[(a_idx(j), a_idx(j))] = -p.kappa;
        drift[(ap_idx(j), ap_idx(j))] = -p.kappa;
        drift[(b_idx(j), b_idx(j))] = -p.gamma;
        drift[(bp_idx(j), bp_idx(j))] = -p.gamma;
    }
    for (k, &(i, j)) in PUMP_PAIRS.iter().enumerate() {
        for (m, n) in [(i, j), (j, i)] {
            // d alpha_m += chi beta_k alpha_n+
            drift[(a_idx(m), ap_idx(n))] += chi * b;
            drift[(a_idx(m), b_idx(k))] += chi * a;
            drift[(ap_idx(m), a_idx(n))] += chi * b;
            drift[(ap_idx(m), bp_idx(k))] += chi * a;
            // d beta_k -= chi alpha_i alpha_j
            drift[(b_idx(k), a_idx(m))] -= chi * a;
            drift[(bp_idx(k), ap_idx(m))] -= chi * a;
        }
        diff[(a_idx(i), a_idx(j))] = chi * b;
        diff[(a_idx(j), a_idx(i))] = chi * b;
        diff[(ap_idx(i), ap_idx(j))] = chi * b;
        diff[(ap_idx(j), ap_idx(i))] = chi * b;
    }
    (drift, diff)
}

/// Output quadrature spectra of the three signal modes at `omega`.
pub fn spectrum_matrix(p: &CavityParams, omega: f64) -> Result<SpectralMomentTable> {
    spectrum_matrix_at(p, &steady_state(p), omega)
}

/// As [`spectrum_matrix`], linearized about a given steady state.
pub fn spectrum_matrix_at(p: &CavityParams, ss: &SteadyState, omega: f64) -> Result<SpectralMomentTable> {
    if !omega.is_finite() {
        return Err(Error::InvalidParameter { name: "omega", value: omega, reason: "must be finite" });
    }
    let (drift, diff) = linearization(p, ss);
    let iw = C64::new(0.0, omega);
    let drift_c = drift.map(|v| C64::new(v, 0.0));
    let left = (&drift_c + DMatrix::identity(N, N) * iw)
        .try_inverse()
        .ok_or(Error::SingularDrift { omega })?;
    let right = (drift_c.transpose() - DMatrix::identity(N, N) * iw)
        .try_inverse()
        .ok_or(Error::SingularDrift { omega })?;
    let s = &left * diff.map(|v| C64::new(v, 0.0)) * &right;
    if s.iter().any(|z| !z.is_finite()) {
        return Err(Error::SingularDrift { omega });
    }

    // X_j = α_j + α_j+, Y_j = -i(α_j - α_j+)
    let minus_i = C64::new(0.0, -1.0);
    let mut t = DMatrix::<C64>::zeros(6, N);
    for j in 0..3 {
        t[(j, a_idx(j))] = C64::new(1.0, 0.0);
        t[(j, ap_idx(j))] = C64::new(1.0, 0.0);
        t[(3 + j, a_idx(j))] = minus_i;
        t[(3 + j, ap_idx(j))] = -minus_i;
    }
    let sq = &t * s * t.transpose();
    let out = |r: usize, c: usize| {
        let sym = 0.5 * (sq[(r, c)] + sq[(c, r)]).re;
        let vac = if r == c { 1.0 } else { 0.0 };
        vac + 2.0 * p.kappa * sym
    };
    let vxx = DMatrix::from_fn(3, 3, &out);
    let vyy = DMatrix::from_fn(3, 3, |i, j| out(3 + i, 3 + j));
    let vxy = DMatrix::from_fn(3, 3, |i, j| out(i, 3 + j));
    Ok(SpectralMomentTable { omega, table: MomentTable::from_blocks(vxx, vyy, vxy)? })
}

/// `(one-mode, two-mode)` EPR products at `omega`, with mode 1 against
/// `Q_2 + Q_3`. Below threshold the first is four times the second; above
/// threshold the ratio drifts away from 4.
pub fn epr_spectra(p: &CavityParams, omega: f64) -> Result<(f64, f64)> {
    let t = spectrum_matrix(p, omega)?.table;
    let combo = Combo::new(1, 2, Sign::Plus);
    Ok((epr_one_mode(&t, combo, 0)?.product, epr_two_mode(&t, 0, combo)?.product))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::{full_report, vlf_triplet};

    fn fig7(ratio: f64) -> CavityParams {
        CavityParams::new(10.0, 1.0, 1e-2, 0.0).unwrap().at_pump_ratio(ratio).unwrap()
    }

    #[test]
    fn thresholds() {
        assert!((threshold(&fig7(1.0)) - 500.0).abs() < 1e-9);
        let p = CavityParams::new(1.0, 10.0, 1e-2, 1.0).unwrap();
        assert!((threshold(&p) - 500.0).abs() < 1e-9);
        let q = CavityParams { chi: 2e-2, ..p };
        assert!((threshold(&q) - 250.0).abs() < 1e-9);
        assert!(CavityParams::new(0.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn steady_states() {
        let below = steady_state(&fig7(0.5));
        assert_eq!(below.alpha_ss, 0.0);
        assert!((below.beta_ss - 25.0).abs() < 1e-12);
        let above = steady_state(&fig7(2.0));
        assert_eq!(above.branch, Branch::Above);
        assert!((above.beta_ss - 50.0).abs() < 1e-12);
        assert!((above.alpha_ss - 50_000f64.sqrt()).abs() < 1e-9);
        let at = steady_state(&fig7(1.0));
        assert!((at.beta_ss - 50.0).abs() < 1e-12);
    }

    #[test]
    fn closed_form_limits() {
        assert_eq!(zero_freq_closed_form(&fig7(0.0)), 5.0);
        let far = zero_freq_closed_form(&fig7(1e6));
        assert!((far - 5.0).abs() < 1e-4);
        for b in [Branch::Below, Branch::Above] {
            assert!((zero_freq_branch(&fig7(1.0), b) - 2.0 / 9.0).abs() < 1e-12);
        }
    }

    #[test]
    fn spectrum_matches_closed_form_at_zero() {
        for ratio in [0.1, 0.5, 0.9, 1.1, 1.5, 3.0] {
            let p = fig7(ratio);
            let t = spectrum_matrix(&p, 0.0).unwrap().table;
            let v = vlf_triplet(&t).unwrap();
            let expect = zero_freq_closed_form(&p);
            for s in v.values() {
                assert!((s - expect).abs() < 1e-8, "ratio {ratio}: {s} vs {expect}");
            }
            assert!(!t.has_xy_correlations(1e-9));
        }
    }

    #[test]
    fn sign_flip_invariance() {
        let p = fig7(1.7);
        for w in [0.0, 0.3, 2.0] {
            let a = spectrum_matrix_at(&p, &steady_state_signed(&p, 1.0), w).unwrap().table;
            let b = spectrum_matrix_at(&p, &steady_state_signed(&p, -1.0), w).unwrap().table;
            let (ra, rb) = (full_report(&a).unwrap(), full_report(&b).unwrap());
            assert!((ra.v12 - rb.v12).abs() < 1e-10);
            assert!((ra.worst_epr_two_mode() - rb.worst_epr_two_mode()).abs() < 1e-10);
        }
    }

    #[test]
    fn even_and_symmetric() {
        for ratio in [0.6, 1.4] {
            let p = fig7(ratio);
            for w in [0.2, 1.0, 5.0] {
                let a = spectrum_matrix(&p, w).unwrap().table;
                let b = spectrum_matrix(&p, -w).unwrap().table;
                assert!((a.vxx() - b.vxx()).amax() < 1e-10);
                assert!(full_report(&a).unwrap().permutation_symmetric);
            }
        }
    }

    #[test]
    fn epr_vacuum_and_factor_four() {
        let (one, two) = epr_spectra(&fig7(0.0), 1.0).unwrap();
        assert!((one - 4.0).abs() < 1e-12 && (two - 1.0).abs() < 1e-12);
        // exact below threshold only; pump fluctuations break it above
        for ratio in [0.2, 0.5, 0.9] {
            for w in [0.0, 0.7, 3.0] {
                let (one, two) = epr_spectra(&fig7(ratio), w).unwrap();
                assert!((one - 4.0 * two).abs() < 1e-9, "{ratio} {w}: {one} {two}");
            }
        }
    }
}
