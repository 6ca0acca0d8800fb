//! Three squeezed inputs mixed on two beamsplitters.
//!
//! The first splitter (reflectivity `mu`) mixes inputs 1 and 2; the second
//! (reflectivity `nu`) mixes the second port of the first with input 3:
//!
//! ```text
//! b1 = sqrt(1-mu) a1 + sqrt(mu) a2
//! b2 = sqrt(mu(1-nu)) a1 - sqrt((1-mu)(1-nu)) a2 + sqrt(nu) a3
//! b3 = sqrt(mu nu) a1 - sqrt(nu(1-mu)) a2 - sqrt(1-nu) a3
//! ```
//!
//! With `mu = 2/3`, `nu = 1/2`, input 1 squeezed in `Y` and inputs 2, 3
//! squeezed in `X` (all with parameter `r`), the three outputs are symmetric
//! and the witnesses have simple closed forms, collected in
//! [`closed_form_suite`] for cross-checking the propagation path.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{MomentTable, Quadrature, SpectralMomentTable, SqueezerSpec};
use crate::numeric::bisect;
use crate::opo::{self, Branch, OpoParams, SpectrumPoint};

/// Input squeezing axes used by the symmetric network.
pub const AOKI_AXES: [Quadrature; 3] = [Quadrature::Y, Quadrature::X, Quadrature::X];

fn check_reflectivity(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name, value, reason: "reflectivity must lie in [0, 1]" })
    }
}

pub fn build_matrix(mu: f64, nu: f64) -> Result<DMatrix<f64>> {
    check_reflectivity("mu", mu)?;
    check_reflectivity("nu", nu)?;
    let (m, n) = (mu, nu);
    Ok(DMatrix::from_row_slice(
        3,
        3,
        &[
            (1.0 - m).sqrt(),
            m.sqrt(),
            0.0,
            (m * (1.0 - n)).sqrt(),
            -((1.0 - m) * (1.0 - n)).sqrt(),
            n.sqrt(),
            (m * n).sqrt(),
            -(n * (1.0 - m)).sqrt(),
            -(1.0 - n).sqrt(),
        ],
    ))
}

/// The first splitter alone: output 1 and its complementary port.
pub fn bs1_matrix(mu: f64) -> Result<DMatrix<f64>> {
    check_reflectivity("mu", mu)?;
    Ok(DMatrix::from_row_slice(2, 2, &[(1.0 - mu).sqrt(), mu.sqrt(), mu.sqrt(), -(1.0 - mu).sqrt()]))
}

#[derive(Debug, Clone, PartialEq)]
pub struct AokiNetwork {
    mu: f64,
    nu: f64,
    matrix: DMatrix<f64>,
}

impl AokiNetwork {
    pub fn new(mu: f64, nu: f64) -> Result<Self> {
        Ok(Self { mu, nu, matrix: build_matrix(mu, nu)? })
    }

    /// `mu = 2/3`, `nu = 1/2`.
    pub fn symmetric() -> Self {
        Self::new(2.0 / 3.0, 0.5).expect("valid reflectivities")
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InputTriple {
    pub specs: [SqueezerSpec; 3],
}

impl InputTriple {
    pub fn new(specs: [SqueezerSpec; 3]) -> Self {
        Self { specs }
    }

    /// Equal squeezing `r` on the default axes (Y, X, X).
    pub fn aoki(r: f64) -> Result<Self> {
        Self::with_axes(r, AOKI_AXES)
    }

    pub fn with_axes(r: f64, axes: [Quadrature; 3]) -> Result<Self> {
        Ok(Self {
            specs: [SqueezerSpec::new(r, axes[0])?, SqueezerSpec::new(r, axes[1])?, SqueezerSpec::new(r, axes[2])?],
        })
    }

    pub fn table(&self) -> MomentTable {
        MomentTable::product(&self.specs.map(MomentTable::squeezed)).expect("three modes")
    }
}

pub fn propagate_static(inputs: &InputTriple, net: &AokiNetwork) -> Result<MomentTable> {
    inputs.table().linear_transform(&net.matrix)
}

/// Duan value between the two output ports of the first splitter, fed by the
/// first two inputs.
pub fn duan_bs1(inputs: &InputTriple, mu: f64) -> Result<f64> {
    let pair = MomentTable::product(&[
        MomentTable::squeezed(inputs.specs[0]),
        MomentTable::squeezed(inputs.specs[1]),
    ])?;
    let out = pair.linear_transform(&bs1_matrix(mu)?)?;
    crate::criteria::duan_pair(&out, 0, 1)
}

fn diag3(a: f64, b: f64, c: f64) -> DMatrix<f64> {
    DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(&[a, b, c]))
}

/// Propagates three frequency-resolved `(S_X, S_Y)` input spectra through the
/// network, frequency by frequency. All three must share the same grid.
pub fn propagate_spectral(inputs: [&[SpectrumPoint]; 3], net: &AokiNetwork) -> Result<Vec<SpectralMomentTable>> {
    let n = inputs[0].len();
    if inputs.iter().any(|s| s.len() != n) {
        return Err(Error::GridMismatch);
    }
    for (idx, first) in inputs[0].iter().enumerate() {
        let w = first.omega;
        if inputs[1][idx].omega != w || inputs[2][idx].omega != w {
            return Err(Error::GridMismatch);
        }
    }
    (0..n)
        .into_par_iter()
        .map(|idx| {
            let [a, b, c] = [inputs[0][idx], inputs[1][idx], inputs[2][idx]];
            let table = MomentTable::from_blocks(
                diag3(a.s_x, b.s_x, c.s_x),
                diag3(a.s_y, b.s_y, c.s_y),
                DMatrix::zeros(3, 3),
            )?
            .linear_transform(&net.matrix)?;
            Ok(SpectralMomentTable { omega: a.omega, table })
        })
        .collect()
}

/// Three identical OPOs feeding the network. Each OPO output is rotated so
/// that its squeezed quadrature lies on the requested axis.
pub fn opo_pipeline(
    params: &OpoParams,
    branch: Branch,
    net: &AokiNetwork,
    omegas: &[f64],
    axes: [Quadrature; 3],
) -> Result<Vec<SpectralMomentTable>> {
    let raw = opo::spectrum_grid(params, omegas, branch)?;
    let oriented = |axis: Quadrature| -> Vec<SpectrumPoint> {
        raw.iter()
            .map(|p| {
                let (sx, sy) = p.oriented(axis);
                SpectrumPoint { s_x: sx, s_y: sy, ..*p }
            })
            .collect()
    };
    let [a, b, c] = axes.map(oriented);
    propagate_spectral([&a, &b, &c], net)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosedForms {
    pub vlf: f64,
    pub epr_one: f64,
    pub epr_two: f64,
    pub duan_bs1: f64,
}

/// Reference values of the symmetric network (`mu = 2/3`, `nu = 1/2`).
pub fn closed_form_suite(r: f64) -> Result<ClosedForms> {
    SqueezerSpec::new(r, Quadrature::X)?;
    let c2 = (2.0 * r).cosh();
    Ok(ClosedForms {
        vlf: 5.0 * (-r).exp(),
        epr_one: 36.0 / (5.0 + 4.0 * c2),
        epr_two: 9.0 / (5.0 + 4.0 * c2),
        duan_bs1: duan_bs1_closed(2.0 / 3.0, r),
    })
}

/// `4 [cosh r - 2 sqrt(mu (1 - mu)) sinh r]`.
pub fn duan_bs1_closed(mu: f64, r: f64) -> f64 {
    4.0 * (r.cosh() - 2.0 * (mu * (1.0 - mu)).sqrt() * r.sinh())
}

/// Squeezing that minimizes the first-splitter Duan value at `mu = 2/3`.
pub fn duan_optimal_r() -> f64 {
    let c = 2.0 * 2f64.sqrt() / 3.0;
    0.5 * ((1.0 + c) / (1.0 - c)).ln()
}

/// Squeezing above which the first-splitter Duan value returns above 4.
pub fn duan_bs1_recrossing(mu: f64) -> Option<f64> {
    let lo = duan_optimal_r();
    bisect(|r| duan_bs1_closed(mu, r) - 4.0, lo, 50.0, 1e-12)
}

/// Squeezing at which `5 exp(-r)` drops below 4.
pub fn vlf_onset() -> f64 {
    (5.0f64 / 4.0).ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::{full_report, vlf_triplet};

    #[test]
    fn matrix_rows() {
        let m = build_matrix(1.0, 0.37).unwrap();
        assert_eq!((m[(0, 0)], m[(0, 1)], m[(0, 2)]), (0.0, 1.0, 0.0));
        let m = build_matrix(2.0 / 3.0, 0.5).unwrap();
        assert!((m[(0, 0)] - (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!((m[(0, 1)] - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(m[(0, 2)], 0.0);
    }

    #[test]
    fn reflectivity_range() {
        assert!(build_matrix(1.1, 0.5).is_err());
        assert!(build_matrix(0.5, -0.1).is_err());
        assert!(bs1_matrix(f64::NAN).is_err());
    }

    #[test]
    fn orthogonal_for_all_reflectivities() {
        for i in 0..=20 {
            for j in 0..=20 {
                let m = build_matrix(i as f64 / 20.0, j as f64 / 20.0).unwrap();
                let e = (&m * m.transpose() - DMatrix::<f64>::identity(3, 3)).amax();
                assert!(e < 1e-12);
            }
        }
    }

    #[test]
    fn unsqueezed_inputs_give_vacuum() {
        let out = propagate_static(&InputTriple::aoki(0.0).unwrap(), &AokiNetwork::symmetric()).unwrap();
        assert!((out.vxx() - DMatrix::<f64>::identity(3, 3)).amax() < 1e-15);
        assert!((out.vyy() - DMatrix::<f64>::identity(3, 3)).amax() < 1e-15);
    }

    #[test]
    fn symmetric_network_at_r_one() {
        let out = propagate_static(&InputTriple::aoki(1.0).unwrap(), &AokiNetwork::symmetric()).unwrap();
        let t = vlf_triplet(&out).unwrap();
        for v in t.values() {
            assert!((v - 5.0 * (-1.0f64).exp()).abs() < 1e-12);
        }
        let report = full_report(&out).unwrap();
        assert!(report.permutation_symmetric);
        assert!(report.tripartite_confirmed.vlf);
        assert!(report.tripartite_confirmed.epr_two_mode);
        assert!(report.tripartite_confirmed.epr_one_mode);
    }

    #[test]
    fn closed_forms_at_zero() {
        let c = closed_form_suite(0.0).unwrap();
        assert_eq!((c.vlf, c.epr_one, c.epr_two, c.duan_bs1), (5.0, 4.0, 1.0, 4.0));
        assert!(closed_form_suite(-1.0).is_err());
    }

    #[test]
    fn duan_optimum_value() {
        assert!((duan_optimal_r() - 1.7627471740390859).abs() < 1e-12);
        let x = duan_bs1_recrossing(2.0 / 3.0).unwrap();
        assert!(x > 3.0 && x < 4.0, "{x}");
    }

    #[test]
    fn spectral_grid_mismatch() {
        let a = [SpectrumPoint::flat(0.0, 1.0, 1.0)];
        let b = [SpectrumPoint::flat(0.1, 1.0, 1.0)];
        let net = AokiNetwork::symmetric();
        assert_eq!(propagate_spectral([&a, &a, &b], &net), Err(Error::GridMismatch));
        assert_eq!(propagate_spectral([&a, &a, &[]], &net), Err(Error::GridMismatch));
    }

    #[test]
    fn flat_spectra_give_five() {
        let flat: Vec<_> = (0..5).map(|i| SpectrumPoint::flat(i as f64, 1.0, 1.0)).collect();
        let out = propagate_spectral([&flat, &flat, &flat], &AokiNetwork::symmetric()).unwrap();
        for p in out {
            for v in vlf_triplet(&p.table).unwrap().values() {
                assert!((v - 5.0).abs() < 1e-12);
            }
        }
    }
}
