//! Python bindings for the moment tables, witnesses and model runners.

use nalgebra::DMatrix;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyAny;

use cvtri::beamsplitter::{self, AokiNetwork, InputTriple};
use cvtri::criteria::{self, Combo, Sign};
use cvtri::intracavity::{self, CavityParams};
use cvtri::opo::{self, Branch, OpoParams};
use cvtri::positivep::{self, SimConfig};
use cvtri::{undepleted, Error, MomentTable, Quadrature, SqueezerSpec};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::SingularDrift { .. } | Error::AllDiverged(_) | Error::DegenerateInference(_) => {
            PyRuntimeError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn quadrature(axis: &str) -> PyResult<Quadrature> {
    match axis {
        "X" | "x" => Ok(Quadrature::X),
        "Y" | "y" => Ok(Quadrature::Y),
        _ => Err(PyValueError::new_err(format!("axis must be 'X' or 'Y', got {axis:?}"))),
    }
}

fn sign(s: &str) -> PyResult<Sign> {
    match s {
        "+" => Ok(Sign::Plus),
        "-" => Ok(Sign::Minus),
        _ => Err(PyValueError::new_err(format!("sign must be '+' or '-', got {s:?}"))),
    }
}

fn matrix(rows: Vec<Vec<f64>>) -> PyResult<DMatrix<f64>> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != m) {
        return Err(PyValueError::new_err("ragged matrix"));
    }
    Ok(DMatrix::from_fn(n, m, |i, j| rows[i][j]))
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

/// Serializes through JSON into plain Python dicts and lists.
fn to_python<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

/// Symmetrized quadrature moments of a set of modes (vacuum variance 1).
#[pyclass(name = "MomentTable", module = "pycvtri", skip_from_py_object)]
#[derive(Clone)]
pub struct PyMomentTable {
    inner: MomentTable,
}

#[pymethods]
impl PyMomentTable {
    #[new]
    #[pyo3(signature = (vxx, vyy, vxy=None))]
    fn new(vxx: Vec<Vec<f64>>, vyy: Vec<Vec<f64>>, vxy: Option<Vec<Vec<f64>>>) -> PyResult<Self> {
        let vxx = matrix(vxx)?;
        let n = vxx.nrows();
        let vxy = match vxy {
            Some(m) => matrix(m)?,
            None => DMatrix::zeros(n, n),
        };
        let inner = MomentTable::from_blocks(vxx, matrix(vyy)?, vxy).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn vacuum(n: usize) -> PyResult<Self> {
        Ok(Self { inner: MomentTable::vacuum(n).map_err(to_py)? })
    }

    /// Single mode squeezed by `r` on `axis` (variance `exp(-r)`).
    #[staticmethod]
    fn squeezed(r: f64, axis: &str) -> PyResult<Self> {
        let spec = SqueezerSpec::new(r, quadrature(axis)?).map_err(to_py)?;
        Ok(Self { inner: MomentTable::squeezed(spec) })
    }

    #[getter]
    fn n_modes(&self) -> usize {
        self.inner.n_modes()
    }

    fn vxx(&self) -> Vec<Vec<f64>> {
        rows(self.inner.vxx())
    }

    fn vyy(&self) -> Vec<Vec<f64>> {
        rows(self.inner.vyy())
    }

    fn vxy(&self) -> Vec<Vec<f64>> {
        rows(self.inner.vxy())
    }

    /// Variance of `sum_i c_i Q_i`.
    fn variance(&self, axis: &str, coeffs: Vec<f64>) -> PyResult<f64> {
        if coeffs.len() != self.inner.n_modes() {
            return Err(PyValueError::new_err("one coefficient per mode"));
        }
        Ok(self.inner.variance(quadrature(axis)?, &coeffs))
    }

    /// Mode transformation `a -> M a` with a real matrix.
    fn linear_transform(&self, m: Vec<Vec<f64>>) -> PyResult<Self> {
        Ok(Self { inner: self.inner.linear_transform(&matrix(m)?).map_err(to_py)? })
    }

    /// Block-diagonal product of several tables.
    #[staticmethod]
    fn product(tables: Vec<PyRef<'_, PyMomentTable>>) -> PyResult<Self> {
        let parts: Vec<MomentTable> = tables.iter().map(|t| t.inner.clone()).collect();
        Ok(Self { inner: MomentTable::product(&parts).map_err(to_py)? })
    }

    fn __repr__(&self) -> String {
        format!("MomentTable(n_modes={})", self.inner.n_modes())
    }
}

/// The two-splitter network with reflectivities `mu`, `nu`.
#[pyclass(name = "AokiNetwork", module = "pycvtri", skip_from_py_object)]
#[derive(Clone)]
pub struct PyAokiNetwork {
    inner: AokiNetwork,
}

#[pymethods]
impl PyAokiNetwork {
    #[new]
    #[pyo3(signature = (mu=2.0/3.0, nu=0.5))]
    fn new(mu: f64, nu: f64) -> PyResult<Self> {
        Ok(Self { inner: AokiNetwork::new(mu, nu).map_err(to_py)? })
    }

    #[getter]
    fn mu(&self) -> f64 {
        self.inner.mu()
    }

    #[getter]
    fn nu(&self) -> f64 {
        self.inner.nu()
    }

    fn matrix(&self) -> Vec<Vec<f64>> {
        rows(self.inner.matrix())
    }

    /// Output moments for three inputs squeezed by `r` on the axes (Y, X, X).
    fn propagate(&self, r: f64) -> PyResult<PyMomentTable> {
        let inputs = InputTriple::aoki(r).map_err(to_py)?;
        let inner = beamsplitter::propagate_static(&inputs, &self.inner).map_err(to_py)?;
        Ok(PyMomentTable { inner })
    }

    fn __repr__(&self) -> String {
        format!("AokiNetwork(mu={}, nu={})", self.inner.mu(), self.inner.nu())
    }
}

#[pyfunction]
fn vlf_triplet(table: PyRef<'_, PyMomentTable>) -> PyResult<(f64, f64, f64)> {
    let v = criteria::vlf_triplet(&table.inner).map_err(to_py)?;
    Ok((v.v12, v.v13, v.v23))
}

#[pyfunction]
fn duan_pair(table: PyRef<'_, PyMomentTable>, i: usize, j: usize) -> PyResult<f64> {
    criteria::duan_pair(&table.inner, i, j).map_err(to_py)
}

/// Product of the variances of mode `i` inferred from `Q_j ± Q_k`.
#[pyfunction]
#[pyo3(signature = (table, i, j, k, sign="+"))]
fn epr_two_mode(table: PyRef<'_, PyMomentTable>, i: usize, j: usize, k: usize, sign: &str) -> PyResult<f64> {
    let combo = Combo::new(j, k, self::sign(sign)?);
    Ok(criteria::epr_two_mode(&table.inner, i, combo).map_err(to_py)?.product)
}

/// Product of the variances of `Q_j ± Q_k` inferred from mode `i`.
#[pyfunction]
#[pyo3(signature = (table, i, j, k, sign="+"))]
fn epr_one_mode(table: PyRef<'_, PyMomentTable>, i: usize, j: usize, k: usize, sign: &str) -> PyResult<f64> {
    let combo = Combo::new(j, k, self::sign(sign)?);
    Ok(criteria::epr_one_mode(&table.inner, combo, i).map_err(to_py)?.product)
}

/// Every witness over every index choice, as a dict.
#[pyfunction]
fn full_report<'py>(py: Python<'py>, table: PyRef<'_, PyMomentTable>) -> PyResult<Bound<'py, PyAny>> {
    to_python(py, &criteria::full_report(&table.inner).map_err(to_py)?)
}

#[pyfunction]
fn closed_form_suite<'py>(py: Python<'py>, r: f64) -> PyResult<Bound<'py, PyAny>> {
    to_python(py, &beamsplitter::closed_form_suite(r).map_err(to_py)?)
}

/// `(S_X, S_Y)` of one OPO at `omega`, branch chosen by the pump ratio.
#[pyfunction]
fn opo_spectrum(gamma_a: f64, gamma_b: f64, kappa: f64, pump_ratio: f64, omega: f64) -> PyResult<(f64, f64)> {
    let p = OpoParams::new(gamma_a, gamma_b, kappa, 0.0).and_then(|p| p.at_pump_ratio(pump_ratio)).map_err(to_py)?;
    let s = opo::spectrum(&p, omega, Branch::for_ratio(pump_ratio)).map_err(to_py)?;
    Ok((s.s_x, s.s_y))
}

#[pyfunction]
fn undepleted_table(tau: f64) -> PyResult<PyMomentTable> {
    Ok(PyMomentTable { inner: undepleted::moment_table(tau).map_err(to_py)? })
}

#[pyfunction]
fn undepleted_v3(tau: f64) -> PyResult<f64> {
    undepleted::v3_closed(tau).map_err(to_py)
}

fn cavity(gamma: f64, kappa: f64, chi: f64, pump_ratio: f64) -> PyResult<CavityParams> {
    CavityParams::new(gamma, kappa, chi, 0.0).and_then(|p| p.at_pump_ratio(pump_ratio)).map_err(to_py)
}

/// Output spectral moments of the pumped cavity at `omega`.
#[pyfunction]
fn intracavity_spectrum(gamma: f64, kappa: f64, chi: f64, pump_ratio: f64, omega: f64) -> PyResult<PyMomentTable> {
    let p = cavity(gamma, kappa, chi, pump_ratio)?;
    Ok(PyMomentTable { inner: intracavity::spectrum_matrix(&p, omega).map_err(to_py)?.table })
}

#[pyfunction]
fn intracavity_zero_freq(gamma: f64, kappa: f64, chi: f64, pump_ratio: f64) -> PyResult<f64> {
    Ok(intracavity::zero_freq_closed_form(&cavity(gamma, kappa, chi, pump_ratio)?))
}

/// Positive-P ensemble; returns a dict with the time series and divergence
/// counts.
#[pyfunction]
#[pyo3(signature = (n_traj, zeta_max, *, chi=1e-2, beta0=1e3, alpha0=0.0, dt=1e-4, seed=0, batch_count=32, output_intervals=25))]
#[allow(clippy::too_many_arguments)]
fn run_positive_p<'py>(
    py: Python<'py>,
    n_traj: usize,
    zeta_max: f64,
    chi: f64,
    beta0: f64,
    alpha0: f64,
    dt: f64,
    seed: u64,
    batch_count: usize,
    output_intervals: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let cfg = SimConfig {
        chi,
        beta0,
        alpha0,
        n_traj,
        dt,
        zeta_max,
        seed,
        batch_count,
        output_intervals,
        ..SimConfig::default()
    };
    let res = py.detach(|| positivep::run_ensemble(&cfg)).map_err(to_py)?;
    to_python(py, &res)
}

#[pymodule]
pub fn pycvtri(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMomentTable>()?;
    m.add_class::<PyAokiNetwork>()?;
    m.add_function(wrap_pyfunction!(vlf_triplet, m)?)?;
    m.add_function(wrap_pyfunction!(duan_pair, m)?)?;
    m.add_function(wrap_pyfunction!(epr_two_mode, m)?)?;
    m.add_function(wrap_pyfunction!(epr_one_mode, m)?)?;
    m.add_function(wrap_pyfunction!(full_report, m)?)?;
    m.add_function(wrap_pyfunction!(closed_form_suite, m)?)?;
    m.add_function(wrap_pyfunction!(opo_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(undepleted_table, m)?)?;
    m.add_function(wrap_pyfunction!(undepleted_v3, m)?)?;
    m.add_function(wrap_pyfunction!(intracavity_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(intracavity_zero_freq, m)?)?;
    m.add_function(wrap_pyfunction!(run_positive_p, m)?)?;
    m.add("VLF_BOUND", criteria::VLF_BOUND)?;
    m.add("EPR_TWO_MODE_BOUND", criteria::EPR_TWO_MODE_BOUND)?;
    m.add("EPR_ONE_MODE_BOUND", criteria::EPR_ONE_MODE_BOUND)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
