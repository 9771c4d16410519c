//! Python bindings: norms of sampled fields, inequality checks and solver
//! runs. Fields cross the boundary as flat row-major sample lists
//! (`x3` fastest) plus a shape triple.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use anisoflow::io::{cmd_check, cmd_run, NormSpec};
use anisoflow::lab::{CaseId, FieldClass};
use anisoflow::monitor::MonitorConfig;
use anisoflow::spectral::{forward_transform, Grid, RealField};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn field(samples: Vec<f64>, shape: (usize, usize, usize)) -> anisoflow::Result<RealField> {
    RealField::new(Grid::new(shape.0, shape.1, shape.2)?, samples)
}

fn eval_norm(samples: Vec<f64>, shape: (usize, usize, usize), spec: &str) -> anisoflow::Result<f64> {
    let spec: NormSpec = spec.parse()?;
    spec.eval_scalar(&forward_transform(&field(samples, shape)?))
}

/// Norm of a real scalar field given by its grid samples, e.g.
/// `norm(samples, (16, 16, 16), "B(0.5,2,2)")`.
#[pyfunction]
fn norm(samples: Vec<f64>, shape: (usize, usize, usize), spec: &str) -> PyResult<f64> {
    eval_norm(samples, shape, spec).map_err(value_err)
}

/// `1/r - 1/2`.
#[pyfunction]
fn alpha(r: f64) -> f64 {
    anisoflow::spectral::alpha(r)
}

/// Raises `ValueError` naming the violated interval when `(p, r, theta)`
/// is outside the admissible range.
#[pyfunction]
fn check_parameters(p: f64, r: f64, theta: f64) -> PyResult<()> {
    MonitorConfig::new(p, r, theta, [0.0, 0.0, 1.0], 1).map(|_| ()).map_err(value_err)
}

/// Runs inequality case `case` (`"a"` to `"k"`); returns a dict with
/// `passed`, `growth`, `max_ratio` (one entry per resolution) and `summary`.
#[pyfunction]
#[pyo3(signature = (case, seed=0, count=50, resolution=32, class_name=None, params=None))]
fn check<'py>(
    py: Python<'py>,
    case: &str,
    seed: u64,
    count: usize,
    resolution: usize,
    class_name: Option<&str>,
    params: Option<Vec<(String, f64)>>,
) -> PyResult<Bound<'py, PyDict>> {
    let id: CaseId = case.parse().map_err(value_err)?;
    let class = class_name.map(|c| c.parse::<FieldClass>()).transpose().map_err(value_err)?;
    let report = cmd_check(id, &params.unwrap_or_default(), seed, count, resolution, class).map_err(value_err)?;
    let out = PyDict::new(py);
    out.set_item("passed", report.passed)?;
    out.set_item("growth", report.growth)?;
    out.set_item("max_ratio", report.results.iter().map(|r| r.max_ratio).collect::<Vec<_>>())?;
    out.set_item("summary", report.summary())?;
    Ok(out)
}

/// Runs a configuration file; returns the monitor CSV path.
#[pyfunction]
fn run(config: &str) -> PyResult<String> {
    let out = cmd_run(config).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    if let Some(f) = out.failure {
        return Err(PyRuntimeError::new_err(f));
    }
    Ok(out.csv_path.display().to_string())
}

#[pymodule]
fn anisoflow_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(norm, m)?)?;
    m.add_function(wrap_pyfunction!(alpha, m)?)?;
    m.add_function(wrap_pyfunction!(check_parameters, m)?)?;
    m.add_function(wrap_pyfunction!(check, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sine_l2_through_the_binding_path() {
        let g = Grid::cubic(8).unwrap();
        let s = RealField::from_fn(g, |x| x[0].sin()).into_samples();
        let v = eval_norm(s, (8, 8, 8), "L2").unwrap();
        assert!((v - 2.0 * std::f64::consts::PI.powf(1.5)).abs() < 1e-12 * v);
        assert!(eval_norm(vec![0.0; 7], (8, 8, 8), "L2").is_err());
        assert!(eval_norm(vec![0.0; 512], (8, 8, 8), "Q(1)").is_err());
    }
}
