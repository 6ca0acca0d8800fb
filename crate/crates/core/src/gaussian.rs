//! Quadrature conventions and second-moment tables.
//!
//! Quadratures are `X = a + a†` and `Y = -i(a - a†)`, so the vacuum has unit
//! variance in both and the uncertainty relation reads `V(X) V(Y) >= 1`.
//!
//! Squeezing convention: a squeezer with parameter `r` gives the squeezed
//! quadrature variance `exp(-r)` and the conjugate one `exp(+r)`. Note the
//! exponent is `r`, not `2r`; every closed form in [`crate::beamsplitter`]
//! (`5 exp(-r)`, `4 exp(-r)`, ...) is written against this convention.
//!
//! Means are taken to be zero everywhere. Only central second moments enter
//! the witnesses, so displacements are not represented.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which quadrature of a mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Quadrature {
    X,
    Y,
}

impl Quadrature {
    pub fn conjugate(self) -> Self {
        match self {
            Quadrature::X => Quadrature::Y,
            Quadrature::Y => Quadrature::X,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModeLabel {
    pub index: usize,
    pub name: Option<String>,
}

impl ModeLabel {
    pub fn new(index: usize) -> Self {
        Self { index, name: None }
    }
}

/// A single-mode minimum-uncertainty squeezer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezerSpec {
    r: f64,
    axis: Quadrature,
}

impl SqueezerSpec {
    pub fn new(r: f64, axis: Quadrature) -> Result<Self> {
        if !(r.is_finite() && r >= 0.0) {
            return Err(Error::InvalidSqueezing(r));
        }
        Ok(Self { r, axis })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// The quadrature carrying the reduced variance.
    pub fn axis(&self) -> Quadrature {
        self.axis
    }
}

/// Symmetric store of quadrature variances and covariances for `n` modes.
///
/// `vxx[(i, j)] = V(X_i, X_j)`, `vyy[(i, j)] = V(Y_i, Y_j)` and
/// `vxy[(i, j)] = V(X_i, Y_j)` (symmetrized). The `vxy` block is zero for every
/// state built in this crate but is carried through transforms and criteria.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentTable {
    labels: Vec<ModeLabel>,
    vxx: DMatrix<f64>,
    vyy: DMatrix<f64>,
    vxy: DMatrix<f64>,
}

/// A moment table evaluated at one spectral frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralMomentTable {
    pub omega: f64,
    pub table: MomentTable,
}

const SYMMETRY_TOL: f64 = 1e-9;

impl MomentTable {
    /// Vacuum on `n` modes: unit variances, no correlations.
    pub fn vacuum(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::NoModes);
        }
        Ok(Self {
            labels: (0..n).map(ModeLabel::new).collect(),
            vxx: DMatrix::identity(n, n),
            vyy: DMatrix::identity(n, n),
            vxy: DMatrix::zeros(n, n),
        })
    }

    /// Single-mode squeezed vacuum, `exp(-r)` on the squeezed axis.
    pub fn squeezed(spec: SqueezerSpec) -> Self {
        let (low, high) = ((-spec.r).exp(), spec.r.exp());
        let (vx, vy) = match spec.axis {
            Quadrature::X => (low, high),
            Quadrature::Y => (high, low),
        };
        Self {
            labels: vec![ModeLabel::new(0)],
            vxx: DMatrix::from_element(1, 1, vx),
            vyy: DMatrix::from_element(1, 1, vy),
            vxy: DMatrix::zeros(1, 1),
        }
    }

    /// Builds a table from raw blocks. Blocks must be square, of equal size,
    /// finite, symmetric (up to rounding, after which they are symmetrized)
    /// and have non-negative diagonals.
    pub fn from_blocks(vxx: DMatrix<f64>, vyy: DMatrix<f64>, vxy: DMatrix<f64>) -> Result<Self> {
        let n = vxx.nrows();
        if n == 0 {
            return Err(Error::NoModes);
        }
        for m in [&vxx, &vyy, &vxy] {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::DimensionMismatch { expected: n, found: m.nrows().max(m.ncols()) });
            }
            if m.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidTable("non-finite entry".into()));
            }
        }
        let vxx = symmetrized(vxx, "vxx")?;
        let vyy = symmetrized(vyy, "vyy")?;
        for i in 0..n {
            if vxx[(i, i)] < 0.0 || vyy[(i, i)] < 0.0 {
                return Err(Error::InvalidTable(format!("negative variance on mode {i}")));
            }
        }
        Ok(Self { labels: (0..n).map(ModeLabel::new).collect(), vxx, vyy, vxy })
    }

    /// Uncorrelated joint table of independent modes, in the given order.
    pub fn product(tables: &[MomentTable]) -> Result<Self> {
        let n: usize = tables.iter().map(|t| t.n_modes()).sum();
        if n == 0 {
            return Err(Error::NoModes);
        }
        let mut vxx = DMatrix::zeros(n, n);
        let mut vyy = DMatrix::zeros(n, n);
        let mut vxy = DMatrix::zeros(n, n);
        let mut offset = 0;
        for t in tables {
            let k = t.n_modes();
            vxx.view_mut((offset, offset), (k, k)).copy_from(&t.vxx);
            vyy.view_mut((offset, offset), (k, k)).copy_from(&t.vyy);
            vxy.view_mut((offset, offset), (k, k)).copy_from(&t.vxy);
            offset += k;
        }
        Ok(Self { labels: (0..n).map(ModeLabel::new).collect(), vxx, vyy, vxy })
    }

    pub fn with_names<S: Into<String>>(mut self, names: impl IntoIterator<Item = S>) -> Self {
        for (label, name) in self.labels.iter_mut().zip(names) {
            label.name = Some(name.into());
        }
        self
    }

    pub fn n_modes(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[ModeLabel] {
        &self.labels
    }

    pub fn block(&self, quad: Quadrature) -> &DMatrix<f64> {
        match quad {
            Quadrature::X => &self.vxx,
            Quadrature::Y => &self.vyy,
        }
    }

    pub fn vxx(&self) -> &DMatrix<f64> {
        &self.vxx
    }

    pub fn vyy(&self) -> &DMatrix<f64> {
        &self.vyy
    }

    pub fn vxy(&self) -> &DMatrix<f64> {
        &self.vxy
    }

    pub fn get(&self, quad: Quadrature, i: usize, j: usize) -> f64 {
        self.block(quad)[(i, j)]
    }

    /// Variance of `sum_i c_i Q_i`.
    pub fn variance(&self, quad: Quadrature, coeffs: &[f64]) -> f64 {
        self.covariance(quad, coeffs, coeffs)
    }

    /// Covariance of `sum_i a_i Q_i` and `sum_j b_j Q_j`.
    pub fn covariance(&self, quad: Quadrature, a: &[f64], b: &[f64]) -> f64 {
        let m = self.block(quad);
        let mut acc = 0.0;
        for (i, ai) in a.iter().enumerate() {
            if *ai == 0.0 {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                acc += ai * m[(i, j)] * bj;
            }
        }
        acc
    }

    /// True when any `V(X_i, Y_j)` exceeds `tol` in magnitude.
    pub fn has_xy_correlations(&self, tol: f64) -> bool {
        self.vxy.iter().any(|v| v.abs() > tol)
    }

    /// Propagates the moments through a real passive mode-mixing matrix
    /// (`b = m a`), applied identically to both quadratures.
    pub fn linear_transform(&self, m: &DMatrix<f64>) -> Result<Self> {
        let n = self.n_modes();
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: m.nrows().max(m.ncols()) });
        }
        let mt = m.transpose();
        let sym = |v: DMatrix<f64>| (&v + v.transpose()) * 0.5;
        Ok(Self {
            labels: self.labels.clone(),
            vxx: sym(m * &self.vxx * &mt),
            vyy: sym(m * &self.vyy * &mt),
            vxy: m * &self.vxy * &mt,
        })
    }
}

fn symmetrized(m: DMatrix<f64>, name: &str) -> Result<DMatrix<f64>> {
    let scale = m.iter().fold(1.0_f64, |s, v| s.max(v.abs()));
    let t = m.transpose();
    if (&m - &t).iter().any(|d| d.abs() > SYMMETRY_TOL * scale) {
        return Err(Error::InvalidTable(format!("{name} is not symmetric")));
    }
    Ok((m + t) * 0.5)
}

pub fn vacuum(n: usize) -> Result<MomentTable> {
    MomentTable::vacuum(n)
}

pub fn squeezed(spec: SqueezerSpec) -> MomentTable {
    MomentTable::squeezed(spec)
}

pub fn linear_transform(t: &MomentTable, m: &DMatrix<f64>) -> Result<MomentTable> {
    t.linear_transform(m)
}
