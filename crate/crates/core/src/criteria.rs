//! Tripartite entanglement witnesses on three-mode moment tables.
//!
//! * van Loock–Furusawa combinations `V_jk = V(X_j - X_k) + V(Y_1 + Y_2 + Y_3)`,
//!   bound 4; two violations certify genuine tripartite entanglement.
//! * Duan sum `V(X_i - X_j) + V(Y_i + Y_j)`, bound 4 (bipartite).
//! * Two-mode inference: `V_inf(X_i) V_inf(Y_i)` with each quadrature of mode
//!   `i` inferred linearly from `Q_j ± Q_k`, bound 1.
//! * One-mode inference: `V_inf(X_j ± X_k) V_inf(Y_j ± Y_k)` inferred from
//!   mode `i`, bound 4.
//!
//! Inferred variances use the optimal linear gain, so they are conditional
//! variances of the Gaussian moments. Values are compared against the bounds
//! unrounded.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{MomentTable, Quadrature};

pub const VLF_BOUND: f64 = 4.0;
pub const DUAN_BOUND: f64 = 4.0;
pub const EPR_TWO_MODE_BOUND: f64 = 1.0;
pub const EPR_ONE_MODE_BOUND: f64 = 4.0;

/// Relative size below which a conditioning variance counts as zero.
const DEGENERACY_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];

    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// The combined quadrature `Q_j ± Q_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Combo {
    pub j: usize,
    pub k: usize,
    pub sign: Sign,
}

impl Combo {
    pub fn new(j: usize, k: usize, sign: Sign) -> Self {
        Self { j, k, sign }
    }

    fn coeffs(&self, n: usize) -> Vec<f64> {
        let mut c = vec![0.0; n];
        c[self.j] += 1.0;
        c[self.k] += self.sign.factor();
        c
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VlfTriplet {
    pub v12: f64,
    pub v13: f64,
    pub v23: f64,
}

impl VlfTriplet {
    pub fn values(&self) -> [f64; 3] {
        [self.v12, self.v13, self.v23]
    }

    pub fn violations(&self) -> usize {
        self.values().iter().filter(|v| **v < VLF_BOUND).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InferenceGain {
    pub a_min: f64,
    pub variance_at_min: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EprProduct {
    pub vinf_x: f64,
    pub vinf_y: f64,
    pub product: f64,
}

fn unit(n: usize, i: usize) -> Vec<f64> {
    let mut c = vec![0.0; n];
    c[i] = 1.0;
    c
}

fn check_index(t: &MomentTable, i: usize) -> Result<()> {
    if i >= t.n_modes() {
        return Err(Error::ModeOutOfRange { index: i, n_modes: t.n_modes() });
    }
    Ok(())
}

fn check_three(t: &MomentTable) -> Result<()> {
    if t.n_modes() != 3 {
        return Err(Error::DimensionMismatch { expected: 3, found: t.n_modes() });
    }
    Ok(())
}

fn check_triple(t: &MomentTable, i: usize, combo: &Combo) -> Result<()> {
    check_three(t)?;
    for idx in [i, combo.j, combo.k] {
        check_index(t, idx)?;
    }
    if i == combo.j || i == combo.k || combo.j == combo.k {
        return Err(Error::RepeatedMode);
    }
    Ok(())
}

fn check_conditioning(denominator: f64, scale: f64) -> Result<()> {
    if !(denominator > DEGENERACY_TOL * scale.max(1.0)) {
        return Err(Error::DegenerateInference(denominator));
    }
    Ok(())
}

pub fn vlf_triplet(t: &MomentTable) -> Result<VlfTriplet> {
    check_three(t)?;
    let ysum = t.variance(Quadrature::Y, &[1.0, 1.0, 1.0]);
    let diff = |a: usize, b: usize| {
        let mut c = [0.0; 3];
        c[a] = 1.0;
        c[b] = -1.0;
        t.variance(Quadrature::X, &c)
    };
    Ok(VlfTriplet { v12: diff(0, 1) + ysum, v13: diff(0, 2) + ysum, v23: diff(1, 2) + ysum })
}

pub fn duan_pair(t: &MomentTable, i: usize, j: usize) -> Result<f64> {
    check_index(t, i)?;
    check_index(t, j)?;
    if i == j {
        return Err(Error::RepeatedMode);
    }
    let n = t.n_modes();
    let mut minus = vec![0.0; n];
    minus[i] = 1.0;
    minus[j] = -1.0;
    let mut plus = vec![0.0; n];
    plus[i] = 1.0;
    plus[j] = 1.0;
    Ok(t.variance(Quadrature::X, &minus) + t.variance(Quadrature::Y, &plus))
}

/// `V(Q_i - a (Q_j ± Q_k))` for an arbitrary gain `a`.
pub fn inferred_variance_estimate(
    t: &MomentTable,
    quad: Quadrature,
    i: usize,
    combo: Combo,
    a: f64,
) -> Result<f64> {
    check_triple(t, i, &combo)?;
    let mut c: Vec<f64> = combo.coeffs(3).into_iter().map(|v| -a * v).collect();
    c[i] += 1.0;
    Ok(t.variance(quad, &c))
}

/// Gain minimizing [`inferred_variance_estimate`]:
/// `a_min = V(Q_i, Q_j ± Q_k) / V(Q_j ± Q_k)`.
pub fn optimal_gain(t: &MomentTable, quad: Quadrature, i: usize, combo: Combo) -> Result<InferenceGain> {
    check_triple(t, i, &combo)?;
    let c = combo.coeffs(3);
    let e = unit(3, i);
    let denom = t.variance(quad, &c);
    check_conditioning(denom, t.get(quad, combo.j, combo.j) + t.get(quad, combo.k, combo.k))?;
    let cov = t.covariance(quad, &e, &c);
    Ok(InferenceGain { a_min: cov / denom, variance_at_min: t.get(quad, i, i) - cov * cov / denom })
}

pub fn epr_two_mode(t: &MomentTable, i: usize, combo: Combo) -> Result<EprProduct> {
    let vinf_x = optimal_gain(t, Quadrature::X, i, combo)?.variance_at_min;
    let vinf_y = optimal_gain(t, Quadrature::Y, i, combo)?.variance_at_min;
    Ok(EprProduct { vinf_x, vinf_y, product: vinf_x * vinf_y })
}

/// `V(Q_j ± Q_k) - [V(Q_i, Q_j) ± V(Q_i, Q_k)]^2 / V(Q_i)`.
pub fn one_mode_inferred_variance(t: &MomentTable, quad: Quadrature, combo: Combo, i: usize) -> Result<f64> {
    check_triple(t, i, &combo)?;
    let vi = t.get(quad, i, i);
    check_conditioning(vi, vi)?;
    let num = t.get(quad, i, combo.j) + combo.sign.factor() * t.get(quad, i, combo.k);
    Ok(t.variance(quad, &combo.coeffs(3)) - num * num / vi)
}

/// Same quantity written as `V(Q_j ± Q_k) - [V(Q_i, Q_j ± Q_k)]^2 / V(Q_i)`.
pub fn one_mode_inferred_variance_combined(
    t: &MomentTable,
    quad: Quadrature,
    combo: Combo,
    i: usize,
) -> Result<f64> {
    check_triple(t, i, &combo)?;
    let vi = t.get(quad, i, i);
    check_conditioning(vi, vi)?;
    let c = combo.coeffs(3);
    let cov = t.covariance(quad, &unit(3, i), &c);
    Ok(t.variance(quad, &c) - cov * cov / vi)
}

pub fn epr_one_mode(t: &MomentTable, combo: Combo, i: usize) -> Result<EprProduct> {
    let vinf_x = one_mode_inferred_variance(t, Quadrature::X, combo, i)?;
    let vinf_y = one_mode_inferred_variance(t, Quadrature::Y, combo, i)?;
    Ok(EprProduct { vinf_x, vinf_y, product: vinf_x * vinf_y })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DuanEntry {
    pub modes: (usize, usize),
    pub value: f64,
    pub violated: bool,
}

/// One EPR product with the sign that minimized it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EprEntry {
    /// Mode whose quadratures are inferred (two-mode) or used to infer (one-mode).
    pub single: usize,
    pub pair: (usize, usize),
    pub sign: Sign,
    pub vinf_x: f64,
    pub vinf_y: f64,
    pub product: f64,
    pub violated: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripartiteVerdict {
    /// At least two van Loock–Furusawa values below 4.
    pub vlf: bool,
    /// All three two-mode inference products below 1.
    pub epr_two_mode: bool,
    /// All three one-mode inference products below 4.
    pub epr_one_mode: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub v12: f64,
    pub v13: f64,
    pub v23: f64,
    pub vlf_violated: [bool; 3],
    pub duan: Vec<DuanEntry>,
    pub epr_two_mode: Vec<EprEntry>,
    pub epr_one_mode: Vec<EprEntry>,
    pub tripartite_confirmed: TripartiteVerdict,
    /// All VLF values agree, and so do the EPR products of each family.
    pub permutation_symmetric: bool,
    /// The table carried nonzero `V(X_i, Y_j)` entries.
    pub xy_correlations_present: bool,
}

impl CriterionReport {
    pub fn vlf(&self) -> VlfTriplet {
        VlfTriplet { v12: self.v12, v13: self.v13, v23: self.v23 }
    }

    /// Largest (least favourable) two-mode inference product.
    pub fn worst_epr_two_mode(&self) -> f64 {
        self.epr_two_mode.iter().map(|e| e.product).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn worst_epr_one_mode(&self) -> f64 {
        self.epr_one_mode.iter().map(|e| e.product).fold(f64::NEG_INFINITY, f64::max)
    }
}

const TRIPLES: [(usize, usize, usize); 3] = [(0, 1, 2), (1, 0, 2), (2, 0, 1)];

fn best_sign<F>(eval: F) -> Result<(Sign, EprProduct)>
where
    F: Fn(Sign) -> Result<EprProduct>,
{
    let mut best: Option<(Sign, EprProduct)> = None;
    let mut last_err = None;
    for sign in Sign::BOTH {
        match eval(sign) {
            Ok(p) => {
                if best.as_ref().is_none_or(|(_, b)| p.product < b.product) {
                    best = Some((sign, p));
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    match (best, last_err) {
        (Some(b), _) => Ok(b),
        (None, Some(e)) => Err(e),
        (None, None) => unreachable!(),
    }
}

fn all_close(values: &[f64]) -> bool {
    let scale = values.iter().fold(1.0_f64, |s, v| s.max(v.abs()));
    values.windows(2).all(|w| (w[0] - w[1]).abs() <= 1e-9 * scale)
}

/// Evaluates every criterion over all index choices; EPR entries keep the
/// better of the two signs.
pub fn full_report(t: &MomentTable) -> Result<CriterionReport> {
    let vlf = vlf_triplet(t)?;
    let duan = [(0, 1), (0, 2), (1, 2)]
        .into_iter()
        .map(|(i, j)| {
            let value = duan_pair(t, i, j)?;
            Ok(DuanEntry { modes: (i, j), value, violated: value < DUAN_BOUND })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut epr_two = Vec::with_capacity(3);
    let mut epr_one = Vec::with_capacity(3);
    for (i, j, k) in TRIPLES {
        let (sign, p) = best_sign(|s| epr_two_mode(t, i, Combo::new(j, k, s)))?;
        epr_two.push(EprEntry {
            single: i,
            pair: (j, k),
            sign,
            vinf_x: p.vinf_x,
            vinf_y: p.vinf_y,
            product: p.product,
            violated: p.product < EPR_TWO_MODE_BOUND,
        });
        let (sign, p) = best_sign(|s| epr_one_mode(t, Combo::new(j, k, s), i))?;
        epr_one.push(EprEntry {
            single: i,
            pair: (j, k),
            sign,
            vinf_x: p.vinf_x,
            vinf_y: p.vinf_y,
            product: p.product,
            violated: p.product < EPR_ONE_MODE_BOUND,
        });
    }

    let two: Vec<f64> = epr_two.iter().map(|e| e.product).collect();
    let one: Vec<f64> = epr_one.iter().map(|e| e.product).collect();
    let verdict = TripartiteVerdict {
        vlf: vlf.violations() >= 2,
        epr_two_mode: epr_two.iter().all(|e| e.violated),
        epr_one_mode: epr_one.iter().all(|e| e.violated),
    };
    Ok(CriterionReport {
        v12: vlf.v12,
        v13: vlf.v13,
        v23: vlf.v23,
        vlf_violated: vlf.values().map(|v| v < VLF_BOUND),
        duan,
        epr_two_mode: epr_two,
        epr_one_mode: epr_one,
        tripartite_confirmed: verdict,
        permutation_symmetric: all_close(&vlf.values()) && all_close(&two) && all_close(&one),
        xy_correlations_present: t.has_xy_correlations(1e-12),
    })
}
