//! Python access to the chart pipeline. Documents cross the boundary as the
//! same JSON the CLI writes, so `json.loads` is all the Python side needs.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use syntomic_core::chart::{self, Axis, ComputeRequest, FieldSpec, Format, ObjectKind};
use syntomic_core::verify::{run_suite, Suite};
use syntomic_core::Error;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Invalid(_) | Error::NotPrime(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

/// Compute a chart document and return it as JSON text.
#[pyfunction]
#[pyo3(signature = (kind, p, n, ideal=None, window=None, yrange=None, field=None, axis=None, exclude_a01=false))]
#[allow(clippy::too_many_arguments)]
fn compute(
    kind: &str,
    p: u32,
    n: usize,
    ideal: Option<String>,
    window: Option<(i64, i64)>,
    yrange: Option<(i64, i64)>,
    field: Option<&str>,
    axis: Option<&str>,
    exclude_a01: bool,
) -> PyResult<String> {
    let mut req = ComputeRequest::new(ObjectKind::parse(kind).map_err(py_err)?, p, n);
    req.ideal = ideal;
    req.window = window;
    req.yrange = yrange;
    req.field = field.map(FieldSpec::parse).transpose().map_err(py_err)?;
    req.axis = axis.map(Axis::parse).transpose().map_err(py_err)?;
    req.exclude_a01 = exclude_a01;
    let doc = chart::compute(&req).map_err(py_err)?;
    Ok(chart::export_json(&doc))
}

/// Render a JSON chart document as "svg" or "tikz".
#[pyfunction]
#[pyo3(signature = (document, format="svg"))]
fn render(document: &str, format: &str) -> PyResult<String> {
    let doc = chart::parse_json(document).map_err(py_err)?;
    chart::render(&doc, Format::parse(format).map_err(py_err)?, None).map_err(py_err)
}

/// Run a verification suite; returns (name, passed, detail) per check.
#[pyfunction]
#[pyo3(signature = (suite="all", fixtures="figures"))]
fn verify(suite: &str, fixtures: &str) -> PyResult<Vec<(String, bool, String)>> {
    let suite = Suite::parse(suite).map_err(py_err)?;
    Ok(run_suite(suite, std::path::Path::new(fixtures))
        .into_iter()
        .map(|r| (format!("{}: {}", r.suite, r.name), r.passed, r.detail))
        .collect())
}

#[pymodule]
fn kn_syntomic(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(compute, m)?)?;
    m.add_function(wrap_pyfunction!(render, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
