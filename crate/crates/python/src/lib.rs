//! Python bindings: curves, SRVFs, reparametrisations, distances and the
//! counterexample report. Arrays cross the boundary as nested lists.

use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;
use srvf::counterexample::{parse_rational, DEFAULT_K_PRIME_LIST, DEFAULT_N_LIST};
use srvf::{DpOptions, Partition, SrvfError};

fn to_py(e: SrvfError) -> PyErr {
    match e {
        SrvfError::Io { .. } => PyOSError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn knots_or_uniform(knots: Option<Vec<f64>>, n_cells: usize) -> PyResult<Partition> {
    match knots {
        Some(k) => Partition::new(k).map_err(to_py),
        None if n_cells == 0 => Err(PyValueError::new_err("need at least one cell")),
        None => Ok(Partition::uniform(n_cells)),
    }
}

fn flatten(rows: &[Vec<f64>]) -> PyResult<(usize, Vec<f64>)> {
    let dim = rows.first().map_or(0, Vec::len);
    if dim == 0 {
        return Err(PyValueError::new_err("rows must be non-empty"));
    }
    if let Some(i) = rows.iter().position(|r| r.len() != dim) {
        return Err(PyValueError::new_err(format!(
            "row {i} has {} coordinates, expected {dim}",
            rows[i].len()
        )));
    }
    Ok((dim, rows.concat()))
}

fn rows(flat: &[f64], dim: usize) -> Vec<Vec<f64>> {
    flat.chunks(dim).map(<[f64]>::to_vec).collect()
}

fn dp_options(window: usize, axis_moves: bool) -> PyResult<DpOptions> {
    if window == 0 {
        return Err(PyValueError::new_err("window must be ≥ 1"));
    }
    Ok(DpOptions::new(window, axis_moves))
}

/// Piecewise-linear curve in ℝᵈ starting at the origin.
#[pyclass(name = "Curve", module = "srvf", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyCurve(srvf::SampledCurve);

#[pymethods]
impl PyCurve {
    /// `samples` has one row per knot; knots default to the uniform grid.
    /// The curve is translated to start at the origin.
    #[new]
    #[pyo3(signature = (samples, knots=None))]
    fn new(samples: Vec<Vec<f64>>, knots: Option<Vec<f64>>) -> PyResult<Self> {
        let (dim, flat) = flatten(&samples)?;
        let knots = knots_or_uniform(knots, samples.len().saturating_sub(1))?;
        srvf::SampledCurve::anchored(dim, knots, flat)
            .map(Self)
            .map_err(to_py)
    }

    #[staticmethod]
    fn read(path: std::path::PathBuf) -> PyResult<Self> {
        srvf::io::read_curve(&path).map(Self).map_err(to_py)
    }

    /// Writes CSV, or JSON when the path ends in `.json`.
    fn write(&self, path: std::path::PathBuf) -> PyResult<()> {
        srvf::io::write_curve(&path, &self.0).map_err(to_py)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    #[getter]
    fn knots(&self) -> Vec<f64> {
        self.0.knots().breakpoints().to_vec()
    }

    #[getter]
    fn samples(&self) -> Vec<Vec<f64>> {
        rows(self.0.samples(), self.0.dim())
    }

    fn __call__(&self, t: f64) -> Vec<f64> {
        self.0.eval(t)
    }

    fn __len__(&self) -> usize {
        self.0.n_cells() + 1
    }

    fn __repr__(&self) -> String {
        format!("Curve(dim={}, cells={})", self.0.dim(), self.0.n_cells())
    }

    fn srvt(&self) -> PySrvf {
        PySrvf(srvf::srvt(&self.0))
    }

    /// Length of the curve, equal to the squared L² norm of its SRVF.
    fn ac_norm(&self) -> f64 {
        srvf::ac_norm(&self.0)
    }

    /// `c ∘ γ`.
    fn compose(&self, gamma: &PyReparam) -> Self {
        Self(srvf::compose(&self.0, &gamma.0))
    }

    /// Constant-speed representative and the map `γ` with `c = c̄ ∘ γ`.
    fn constant_speed(&self) -> (Self, PyReparam) {
        let (c, g) = srvf::constant_speed(&self.0);
        (Self(c), PyReparam(g))
    }
}

/// Piecewise-constant square root velocity function.
#[pyclass(name = "Srvf", module = "srvf", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PySrvf(srvf::Srvf);

#[pymethods]
impl PySrvf {
    /// `cells` has one row per cell; knots default to the uniform grid.
    #[new]
    #[pyo3(signature = (cells, knots=None))]
    fn new(cells: Vec<Vec<f64>>, knots: Option<Vec<f64>>) -> PyResult<Self> {
        let (dim, flat) = flatten(&cells)?;
        let knots = knots_or_uniform(knots, cells.len())?;
        srvf::Srvf::new(dim, knots, flat).map(Self).map_err(to_py)
    }

    #[staticmethod]
    fn read(path: std::path::PathBuf) -> PyResult<Self> {
        srvf::io::read_srvf(&path).map(Self).map_err(to_py)
    }

    fn write(&self, path: std::path::PathBuf) -> PyResult<()> {
        srvf::io::write_srvf(&path, &self.0).map_err(to_py)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    #[getter]
    fn knots(&self) -> Vec<f64> {
        self.0.knots().breakpoints().to_vec()
    }

    #[getter]
    fn cells(&self) -> Vec<Vec<f64>> {
        rows(self.0.values(), self.0.dim())
    }

    fn __call__(&self, t: f64) -> Vec<f64> {
        self.0.eval(t).to_vec()
    }

    fn __repr__(&self) -> String {
        format!("Srvf(dim={}, cells={})", self.0.dim(), self.0.n_cells())
    }

    fn norm(&self) -> f64 {
        self.0.norm()
    }

    fn inverse(&self) -> PyCurve {
        PyCurve(srvf::srvt_inverse(&self.0))
    }

    /// `(q ∘ γ) √γ'`.
    fn act(&self, gamma: &PyReparam) -> Self {
        Self(srvf::srvf_action(&self.0, &gamma.0))
    }
}

/// Weakly increasing piecewise-linear map of `[0, 1]` onto itself.
#[pyclass(name = "Reparam", module = "srvf", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyReparam(srvf::Reparametrisation);

#[pymethods]
impl PyReparam {
    #[new]
    #[pyo3(signature = (values, knots=None))]
    fn new(values: Vec<f64>, knots: Option<Vec<f64>>) -> PyResult<Self> {
        let knots = knots_or_uniform(knots, values.len().saturating_sub(1))?;
        srvf::Reparametrisation::new(knots, values)
            .map(Self)
            .map_err(to_py)
    }

    #[staticmethod]
    fn identity() -> Self {
        Self(srvf::Reparametrisation::identity())
    }

    #[getter]
    fn knots(&self) -> Vec<f64> {
        self.0.knots().breakpoints().to_vec()
    }

    #[getter]
    fn values(&self) -> Vec<f64> {
        self.0.values().to_vec()
    }

    fn __call__(&self, t: f64) -> f64 {
        self.0.eval(t)
    }

    fn __repr__(&self) -> String {
        format!(
            "Reparam(cells={}, strict={})",
            self.0.n_cells(),
            self.0.is_strict()
        )
    }

    fn is_strict(&self) -> bool {
        self.0.is_strict()
    }

    /// Inverse of a strictly increasing map.
    fn inverse(&self) -> PyResult<Self> {
        self.0.inverse().map(Self).map_err(to_py)
    }

    /// `self ∘ other`.
    fn compose(&self, other: &PyReparam) -> Self {
        Self(srvf::compose_reparams(&self.0, &other.0))
    }
}

/// Optimal DP path and the pair of reparametrisations it induces.
#[pyclass(name = "Alignment", module = "srvf", frozen, skip_from_py_object)]
pub struct PyAlignment(srvf::AlignmentResult);

#[pymethods]
impl PyAlignment {
    #[getter]
    fn beta(&self) -> PyReparam {
        PyReparam(self.0.beta.clone())
    }

    #[getter]
    fn gamma(&self) -> PyReparam {
        PyReparam(self.0.gamma.clone())
    }

    #[getter]
    fn matching_value(&self) -> f64 {
        self.0.matching_value
    }

    #[getter]
    fn quotient_distance(&self) -> f64 {
        self.0.quotient_distance
    }

    #[getter]
    fn path(&self) -> Vec<(usize, usize)> {
        self.0.path.clone()
    }

    fn __repr__(&self) -> String {
        format!(
            "Alignment(quotient_distance={}, path_len={})",
            self.0.quotient_distance,
            self.0.path.len()
        )
    }
}

/// `‖R(b) - R(c)‖`.
#[pyfunction]
fn dist_param(b: &PyCurve, c: &PyCurve) -> PyResult<f64> {
    srvf::dist_param(&b.0, &c.0).map_err(to_py)
}

/// Orbit distance by DP alignment. With `grid_n` the lattice is the uniform
/// `grid_n × grid_n` grid, otherwise the common refinement of both curves.
#[pyfunction]
#[pyo3(signature = (b, c, grid_n=None, window=4, axis_moves=true))]
fn quotient_distance(
    py: Python<'_>,
    b: &PyCurve,
    c: &PyCurve,
    grid_n: Option<usize>,
    window: usize,
    axis_moves: bool,
) -> PyResult<(f64, PyAlignment)> {
    let opts = dp_options(window, axis_moves)?;
    let (d, a) = py
        .detach(|| match grid_n {
            Some(n) => srvf::quotient_distance_on_grid(&b.0, &c.0, n, &opts),
            None => srvf::quotient_distance(&b.0, &c.0, &opts),
        })
        .map_err(to_py)?;
    Ok((d, PyAlignment(a)))
}

#[pyfunction]
#[pyo3(signature = (p, q, window=4, axis_moves=true))]
fn dp_align(
    py: Python<'_>,
    p: &PySrvf,
    q: &PySrvf,
    window: usize,
    axis_moves: bool,
) -> PyResult<PyAlignment> {
    let opts = dp_options(window, axis_moves)?;
    py.detach(|| srvf::dp_align(&p.0, &q.0, &opts))
        .map(PyAlignment)
        .map_err(to_py)
}

/// `∫ ⟨p∘β, q∘γ⟩ √β' √γ' dt`.
#[pyfunction]
fn matching_functional(p: &PySrvf, q: &PySrvf, beta: &PyReparam, gamma: &PyReparam) -> f64 {
    srvf::matching_functional(&p.0, &q.0, &beta.0, &gamma.0)
}

/// Point `s ∈ [0, 1]` on the straight SRVF line from `b` to `c`.
#[pyfunction]
fn geodesic(b: &PyCurve, c: &PyCurve, s: f64) -> PyResult<PyCurve> {
    srvf::geodesic(&b.0, &c.0, s).map(PyCurve).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (b, c, tol=None))]
fn is_equivalent(b: &PyCurve, c: &PyCurve, tol: Option<f64>) -> PyResult<bool> {
    srvf::is_equivalent(&b.0, &c.0, tol).map_err(to_py)
}

/// Symmetric matrix of orbit distances, as a list of rows.
#[pyfunction]
#[pyo3(signature = (curves, window=4, axis_moves=true))]
fn distance_matrix(
    py: Python<'_>,
    curves: Vec<PyRef<'_, PyCurve>>,
    window: usize,
    axis_moves: bool,
) -> PyResult<Vec<Vec<f64>>> {
    let opts = dp_options(window, axis_moves)?;
    let shapes: Vec<srvf::ShapeRecord> = curves
        .iter()
        .enumerate()
        .map(|(i, c)| srvf::ShapeRecord::new(i.to_string(), &c.0))
        .collect();
    let m = py
        .detach(|| srvf::distance_matrix(&shapes, &opts))
        .map_err(to_py)?;
    Ok((0..m.len())
        .map(|i| (0..m.len()).map(|j| m.get(i, j)).collect())
        .collect())
}

/// `‖(R(c + εh) - R(c)) / ε‖` for each `ε`.
#[pyfunction]
fn probe_nondifferentiability(c: &PyCurve, h: &PyCurve, eps: Vec<f64>) -> PyResult<Vec<f64>> {
    srvf::probe_nondifferentiability(&c.0, &h.0, &eps).map_err(to_py)
}

/// The non-attainment counterexample as a dict (the same content as the CLI's
/// JSON report). `epsilon` is `"p/q"` or a decimal string.
#[pyfunction]
#[pyo3(signature = (level=10, epsilon="1/10", grid=2048, n_list=None, k_prime_list=None, window=4))]
fn counterexample_report<'py>(
    py: Python<'py>,
    level: u32,
    epsilon: &str,
    grid: usize,
    n_list: Option<Vec<usize>>,
    k_prime_list: Option<Vec<u32>>,
    window: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let epsilon = parse_rational(epsilon).map_err(to_py)?;
    let cfg = srvf::CounterexampleConfig {
        cantor_level: level,
        epsilon,
        grid_n: grid,
        fatten_delta: None,
    };
    let opts = dp_options(window, true)?;
    let n_list = n_list.unwrap_or_else(|| DEFAULT_N_LIST.to_vec());
    let k_list = k_prime_list.unwrap_or_else(|| DEFAULT_K_PRIME_LIST.to_vec());
    let report = py
        .detach(|| srvf::counterexample_report(&cfg, &n_list, &k_list, &opts))
        .map_err(to_py)?;
    let json = srvf::io::report_to_json(&report);
    py.import("json")?.call_method1("loads", (json,))
}

#[pymodule]
#[pyo3(name = "srvf")]
fn srvf_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCurve>()?;
    m.add_class::<PySrvf>()?;
    m.add_class::<PyReparam>()?;
    m.add_class::<PyAlignment>()?;
    m.add_function(wrap_pyfunction!(dist_param, m)?)?;
    m.add_function(wrap_pyfunction!(quotient_distance, m)?)?;
    m.add_function(wrap_pyfunction!(dp_align, m)?)?;
    m.add_function(wrap_pyfunction!(matching_functional, m)?)?;
    m.add_function(wrap_pyfunction!(geodesic, m)?)?;
    m.add_function(wrap_pyfunction!(is_equivalent, m)?)?;
    m.add_function(wrap_pyfunction!(distance_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(probe_nondifferentiability, m)?)?;
    m.add_function(wrap_pyfunction!(counterexample_report, m)?)?;
    Ok(())
}
