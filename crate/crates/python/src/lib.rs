//! Python bindings for `lndkit`. Reports come back as JSON strings, in the
//! same shape the command-line tool prints under `"result"`.

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

use lndkit::cone::Cone;
use lndkit::lattice::LatticeVector;
use lndkit::selftest::{self, SelftestOptions};
use lndkit::toric_lnd::{enumerate_roots, is_maximal, toric_isotropy_report, DemazureRoot, ToricOptions};
use lndkit::trinomial::{is_rigid, Trinomial, TrinomialData};
use lndkit::Error;

create_exception!(
    lndkit,
    Refused,
    PyException,
    "The input is valid but the analysis does not apply to it."
);

fn to_py(e: Error) -> PyErr {
    if e.is_refusal() {
        let witness = match &e {
            Error::Refused { witness: Some(w), .. } => serde_json::to_string(w).ok(),
            _ => None,
        };
        Refused::new_err((e.to_string(), witness))
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn to_json<T: Serialize>(value: &T) -> PyResult<String> {
    serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn cone_from(rays: Vec<Vec<i64>>) -> PyResult<Cone> {
    let rank = rays.first().map_or(0, Vec::len);
    let gens = rays.iter().map(|r| LatticeVector::from_i64s(r)).collect();
    Cone::new(rank, gens).map_err(to_py)
}

fn trinomial_data(l1: Vec<u32>, l2: Vec<u32>, l0: Option<Vec<u32>>) -> PyResult<TrinomialData> {
    TrinomialData::new(l0.unwrap_or_default(), l1, l2).map_err(to_py)
}

/// Demazure roots within `bound`, as `(ray_index, root)` pairs.
#[pyfunction]
#[pyo3(signature = (rays, bound = 10))]
fn cone_roots(rays: Vec<Vec<i64>>, bound: i64) -> PyResult<Vec<(usize, Vec<i64>)>> {
    let cone = cone_from(rays)?;
    enumerate_roots(&cone, bound)
        .map_err(to_py)?
        .into_iter()
        .map(|e| Ok((e.ray(), e.e().to_i64s().map_err(to_py)?)))
        .collect()
}

#[pyfunction]
fn cone_maximal(rays: Vec<Vec<i64>>, root: Vec<i64>) -> PyResult<String> {
    let cone = cone_from(rays)?;
    let e = DemazureRoot::new(&cone, LatticeVector::from_i64s(&root)).map_err(to_py)?;
    to_json(&is_maximal(&cone, &e).map_err(to_py)?)
}

#[pyfunction]
#[pyo3(signature = (rays, root, hilbert_bound = 32))]
fn cone_isotropy(rays: Vec<Vec<i64>>, root: Vec<i64>, hilbert_bound: i64) -> PyResult<String> {
    let cone = cone_from(rays)?;
    let e = DemazureRoot::new(&cone, LatticeVector::from_i64s(&root)).map_err(to_py)?;
    let opts = ToricOptions {
        hilbert_bound: hilbert_bound.into(),
    };
    to_json(&toric_isotropy_report(&cone, &e, &opts).map_err(to_py)?)
}

#[pyfunction]
#[pyo3(signature = (l1, l2, l0 = None))]
fn trinomial_rigid(l1: Vec<u32>, l2: Vec<u32>, l0: Option<Vec<u32>>) -> PyResult<String> {
    to_json(&is_rigid(&trinomial_data(l1, l2, l0)?))
}

#[pyfunction]
#[pyo3(signature = (l1, l2, l0 = None))]
fn trinomial_classify(l1: Vec<u32>, l2: Vec<u32>, l0: Option<Vec<u32>>) -> PyResult<String> {
    let t = Trinomial::new(&trinomial_data(l1, l2, l0)?).map_err(to_py)?;
    to_json(&t.classify())
}

/// Labels of the irreducible normal-form derivations.
#[pyfunction]
fn trinomial_lnds(l1: Vec<u32>, l2: Vec<u32>) -> PyResult<Vec<String>> {
    let t = Trinomial::new(&trinomial_data(l1, l2, None)?).map_err(to_py)?;
    Ok(t.lnds().map_err(to_py)?.into_iter().map(|d| d.label).collect())
}

#[pyfunction]
#[pyo3(signature = (seed = None))]
fn run_selftest(seed: Option<u64>) -> PyResult<String> {
    let opts = SelftestOptions {
        seed: seed.unwrap_or_else(lndkit::sampling::seed_from_env),
        inject_fault: false,
    };
    to_json(&selftest::run(&opts))
}

/// Runs the command-line tool in process; returns `(exit_code, stdout, stderr)`.
#[pyfunction]
fn run(args: Vec<String>) -> (i32, String, String) {
    let out = lndkit::cli::run(std::iter::once("lndkit".to_string()).chain(args));
    (out.code, out.stdout, out.stderr)
}

#[pymodule]
#[pyo3(name = "lndkit")]
fn lndkit_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("Refused", m.py().get_type::<Refused>())?;
    m.add_function(wrap_pyfunction!(cone_roots, m)?)?;
    m.add_function(wrap_pyfunction!(cone_maximal, m)?)?;
    m.add_function(wrap_pyfunction!(cone_isotropy, m)?)?;
    m.add_function(wrap_pyfunction!(trinomial_rigid, m)?)?;
    m.add_function(wrap_pyfunction!(trinomial_classify, m)?)?;
    m.add_function(wrap_pyfunction!(trinomial_lnds, m)?)?;
    m.add_function(wrap_pyfunction!(run_selftest, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
