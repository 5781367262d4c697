//! Python bindings: sets and certificates, systems, progressions, measures,
//! uniformity norms and recurrence. Structured results come back as dicts
//! built from the same JSON the CLI prints.

use finsum::dynamics::{DynamicalSystem, Observable, OpenRegion, StatePoint};
use finsum::measures::{check_marginal_domination, orbit_cloud, sigma_cloud};
use finsum::pipeline::{run_pipeline, PipelineParams};
use finsum::progressions::{
    distance_to_arithmetic, extract_sumset, find_progression, rotation_progression, verify_progression,
    verify_sumset_inclusion, SearchParams,
};
use finsum::recurrence::{check_recurrence_average, counterexample_demo, graph_cloud, ExponentVector};
use finsum::sets::{find_configuration, verify_certificate, ConfigurationSearch, FolnerWindow, Generator, NaturalSet, SumsetCertificate};
use finsum::uniformity::{gowers_norm, seminorm_trajectory, vdc_inequality, CyclicFunction, TrajectoryObservable, DEFAULT_OPS_BUDGET};
use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

create_exception!(pyfinsum, FinsumError, PyException);
create_exception!(pyfinsum, BudgetExhausted, FinsumError);

fn err(e: finsum::Error) -> PyErr {
    if e.is_exhaustion() {
        BudgetExhausted::new_err(e.to_string())
    } else {
        FinsumError::new_err(e.to_string())
    }
}

fn to_py<'py>(py: Python<'py>, v: &impl Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(v).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

/// Subset of `{1, ..., horizon}` from a generator spec such as `odds` or `bernoulli:0.5:7`.
#[pyclass(name = "NaturalSet", module = "pyfinsum", frozen)]
struct PyNaturalSet {
    inner: NaturalSet,
}

#[pymethods]
impl PyNaturalSet {
    #[new]
    fn new(spec: &str, horizon: u64) -> PyResult<Self> {
        let inner = NaturalSet::generate(Generator::parse(spec).map_err(err)?, horizon).map_err(err)?;
        Ok(PyNaturalSet { inner })
    }

    #[staticmethod]
    fn from_elements(elements: Vec<u64>, horizon: u64) -> PyResult<Self> {
        Ok(PyNaturalSet { inner: NaturalSet::from_elements(&elements, horizon).map_err(err)? })
    }

    #[getter]
    fn horizon(&self) -> u64 {
        self.inner.horizon()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __contains__(&self, n: u64) -> PyResult<bool> {
        self.inner.contains(n).map_err(err)
    }

    fn elements(&self) -> Vec<u64> {
        self.inner.elements().collect()
    }

    /// Densities of `A` on the windows `[1, n]`, as floats.
    fn initial_densities(&self, lengths: Vec<u64>) -> PyResult<Vec<f64>> {
        let windows = lengths.iter().map(|&n| FolnerWindow::initial(n)).collect::<Result<Vec<_>, _>>().map_err(err)?;
        let ratios = self.inner.density_along(&windows).map_err(err)?;
        Ok(ratios.iter().map(|r| *r.numer() as f64 / *r.denom() as f64).collect())
    }

    fn upper_banach_density(&self, lengths: Vec<u64>) -> PyResult<f64> {
        let r = self.inner.upper_banach_density_estimate(&lengths).map_err(err)?;
        Ok(*r.numer() as f64 / *r.denom() as f64)
    }

    fn __repr__(&self) -> String {
        format!("NaturalSet({}, horizon={})", self.inner.descriptor().generator, self.inner.horizon())
    }
}

/// Exhaustive check that `t + sum(F)` lies in the set for all nonempty `F` in `B`, `|F| <= k`.
#[pyfunction]
fn verify<'py>(py: Python<'py>, set: &PyNaturalSet, t: u64, b: Vec<u64>, k: usize) -> PyResult<Bound<'py, PyAny>> {
    let cert = SumsetCertificate { t, b, k, horizon: set.inner.horizon(), set_descriptor: set.inner.descriptor().clone() };
    to_py(py, &verify_certificate(&set.inner, &cert).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (set, k=2, size=6, tmax=64, node_limit=1_000_000))]
fn find_sumset<'py>(py: Python<'py>, set: &PyNaturalSet, k: usize, size: usize, tmax: u64, node_limit: u64) -> PyResult<Bound<'py, PyAny>> {
    let cert = find_configuration(&set.inner, &ConfigurationSearch { k, tmax, size, node_limit }).map_err(err)?;
    to_py(py, &cert)
}

/// Full construction from the set to a verified certificate.
#[pyfunction]
#[pyo3(signature = (set, k=2, size=6, tmax=64, tol=1.0/64.0, budget=100_000))]
fn pipeline<'py>(py: Python<'py>, set: &PyNaturalSet, k: usize, size: usize, tmax: u64, tol: f64, budget: u64) -> PyResult<Bound<'py, PyAny>> {
    let params = PipelineParams { k, size, tmax, tol, witness_budget: budget, scan_budget: budget, ..PipelineParams::default() };
    to_py(py, &run_pipeline(&set.inner, &params).map_err(err)?)
}

/// Circle, torus or skew-product system.
#[pyclass(name = "System", module = "pyfinsum", frozen)]
struct PySystem {
    inner: DynamicalSystem,
}

#[pymethods]
impl PySystem {
    #[staticmethod]
    fn circle(alpha: f64) -> PyResult<Self> {
        Ok(PySystem { inner: DynamicalSystem::circle_rotation(alpha).map_err(err)? })
    }

    #[staticmethod]
    fn torus(alphas: Vec<f64>) -> PyResult<Self> {
        Ok(PySystem { inner: DynamicalSystem::torus_rotation(&alphas).map_err(err)? })
    }

    #[staticmethod]
    fn skew(alpha: f64) -> PyResult<Self> {
        Ok(PySystem { inner: DynamicalSystem::skew_product(alpha).map_err(err)? })
    }

    #[getter]
    fn dim(&self) -> Option<usize> {
        self.inner.dim()
    }

    fn apply(&self, x: Vec<f64>, n: i64) -> PyResult<Vec<f64>> {
        let y = self.inner.apply(&StatePoint::torus(&x), n).map_err(err)?;
        Ok(y.coords().map_err(err)?.to_vec())
    }

    fn distance(&self, x: Vec<f64>, y: Vec<f64>) -> PyResult<f64> {
        self.inner.distance(&StatePoint::torus(&x), &StatePoint::torus(&y)).map_err(err)
    }

    fn __repr__(&self) -> String {
        serde_json::to_string(&self.inner).unwrap_or_default()
    }
}

fn points(p: &[StatePoint]) -> Vec<Vec<f64>> {
    p.iter().map(|x| x.coords().map(<[f64]>::to_vec).unwrap_or_default()).collect()
}

/// Nested search for an Erdős progression starting at `a`; on rotations with
/// `beta` given, the exact progression `a + j beta` instead.
#[pyfunction]
#[pyo3(signature = (system, a, k, tol=1e-3, beta=None, witnesses=5, budget=1_000_000))]
fn progression<'py>(
    py: Python<'py>,
    system: &PySystem,
    a: Vec<f64>,
    k: usize,
    tol: f64,
    beta: Option<f64>,
    witnesses: usize,
    budget: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let sys = &system.inner;
    let a = StatePoint::torus(&a);
    let (prog, min) = match beta {
        Some(beta) => (rotation_progression(sys, &a, beta, k, witnesses, tol, budget).map_err(err)?, witnesses),
        None => {
            let params = SearchParams { tol, witness_budget: budget, ..SearchParams::default() };
            (find_progression(sys, &a, k, &params).map_err(err)?.progression, params.min_witnesses)
        }
    };
    let check = verify_progression(sys, &prog, tol, min);
    let out = serde_json::json!({
        "points": points(&prog.points),
        "witnesses": prog.witnesses,
        "deviations": prog.deviations,
        "check": check,
        "distance_to_arithmetic": distance_to_arithmetic(&prog.points).ok(),
    });
    to_py(py, &out)
}

/// Generators from the rotation progression `(a, a + beta, ...)` for arcs of `radius` around its points.
#[pyfunction]
#[pyo3(signature = (alpha, a, beta, k, m, radius))]
fn extract_rotation<'py>(py: Python<'py>, alpha: f64, a: f64, beta: f64, k: usize, m: usize, radius: f64) -> PyResult<Bound<'py, PyAny>> {
    let sys = DynamicalSystem::circle_rotation(alpha).map_err(err)?;
    let x0 = StatePoint::torus(&[a]);
    let prog = rotation_progression(&sys, &x0, beta, k, 50, 1e-3, 10_000_000).map_err(err)?;
    let regions = (1..=k)
        .map(|j| OpenRegion::ball(StatePoint::torus(&[a + j as f64 * beta]), radius))
        .collect::<Result<Vec<_>, _>>()
        .map_err(err)?;
    let ex = extract_sumset(&sys, &prog, &regions, m, 10_000_000).map_err(err)?;
    let inclusion = verify_sumset_inclusion(&sys, &x0, &ex.generators, &regions, k).map_err(err)?;
    to_py(py, &serde_json::json!({ "generators": ex.generators, "inclusion": inclusion }))
}

/// Marginal domination of the progressive cloud by the orbit cloud of `a`.
#[pyfunction]
#[pyo3(signature = (system, a, k, n, resolution=32, seed=0))]
fn marginal_domination<'py>(py: Python<'py>, system: &PySystem, a: Vec<f64>, k: usize, n: u64, resolution: usize, seed: u64) -> PyResult<Bound<'py, PyAny>> {
    let a = StatePoint::torus(&a);
    let w = FolnerWindow::initial(n).map_err(err)?;
    let sigma = sigma_cloud(&system.inner, &a, k, &w, seed).map_err(err)?;
    let mu = orbit_cloud(&system.inner, &a, &w).map_err(err)?;
    to_py(py, &check_marginal_domination(&sigma, &mu, resolution).map_err(err)?)
}

/// Cyclic `U^s` norm of a function on `Z/NZ`.
#[pyfunction]
fn gowers(values: Vec<Complex64>, s: usize) -> PyResult<f64> {
    gowers_norm(&CyclicFunction::new(values).map_err(err)?, s).map_err(err)
}

/// Truncated `U^s` seminorm of `f(T^n a)`; `observable` as in the CLI, e.g. `char:0,1`.
#[pyfunction]
#[pyo3(signature = (system, a, observable, s, n, h=None, budget=DEFAULT_OPS_BUDGET))]
fn seminorm(system: &PySystem, a: Vec<f64>, observable: &str, s: usize, n: usize, h: Option<usize>, budget: f64) -> PyResult<f64> {
    let obs = Observable::parse(observable).map_err(err)?;
    let traj = TrajectoryObservable::new(system.inner.clone(), StatePoint::torus(&a), obs, n, h).map_err(err)?;
    Ok(seminorm_trajectory(&traj, s, budget).map_err(err)?.norm)
}

#[pyfunction]
fn vdc<'py>(py: Python<'py>, vectors: Vec<Vec<Complex64>>, b: Vec<Complex64>) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &vdc_inequality(&vectors, &b).map_err(err)?)
}

/// Recurrence average for arcs `[(center, radius), ...]` on the graph cloud of `v`.
#[pyfunction]
#[pyo3(signature = (alpha, u, v, arcs, window=10_000, count=4000, seed=0))]
fn recurrence<'py>(
    py: Python<'py>,
    alpha: f64,
    u: Vec<u64>,
    v: Vec<u64>,
    arcs: Vec<(f64, f64)>,
    window: u64,
    count: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let sys = DynamicalSystem::circle_rotation(alpha).map_err(err)?;
    let u = ExponentVector::new(u).map_err(err)?;
    let v = ExponentVector::new(v).map_err(err)?;
    let regions = arcs
        .iter()
        .map(|&(c, r)| OpenRegion::ball(StatePoint::torus(&[c]), r))
        .collect::<Result<Vec<_>, _>>()
        .map_err(err)?;
    let nu = graph_cloud(&sys, v.entries(), count, seed).map_err(err)?;
    let w = FolnerWindow::initial(window).map_err(err)?;
    to_py(py, &check_recurrence_average(&nu, &u, &v, &regions, &w).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (alpha, window=100, delta=1e-4, u=vec![2, 1], count=2000, seed=0))]
fn counterexample<'py>(py: Python<'py>, alpha: f64, window: u64, delta: f64, u: Vec<u64>, count: usize, seed: u64) -> PyResult<Bound<'py, PyAny>> {
    let u = ExponentVector::new(u).map_err(err)?;
    to_py(py, &counterexample_demo(alpha, window, delta, &u, count, seed).map_err(err)?)
}

#[pymodule]
fn pyfinsum(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("FinsumError", m.py().get_type::<FinsumError>())?;
    m.add("BudgetExhausted", m.py().get_type::<BudgetExhausted>())?;
    m.add("GOLDEN", finsum::numeric::GOLDEN)?;
    m.add("SCHEMA_VERSION", finsum::SCHEMA_VERSION)?;
    m.add_class::<PyNaturalSet>()?;
    m.add_class::<PySystem>()?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(find_sumset, m)?)?;
    m.add_function(wrap_pyfunction!(pipeline, m)?)?;
    m.add_function(wrap_pyfunction!(progression, m)?)?;
    m.add_function(wrap_pyfunction!(extract_rotation, m)?)?;
    m.add_function(wrap_pyfunction!(marginal_domination, m)?)?;
    m.add_function(wrap_pyfunction!(gowers, m)?)?;
    m.add_function(wrap_pyfunction!(seminorm, m)?)?;
    m.add_function(wrap_pyfunction!(vdc, m)?)?;
    m.add_function(wrap_pyfunction!(recurrence, m)?)?;
    m.add_function(wrap_pyfunction!(counterexample, m)?)?;
    Ok(())
}
