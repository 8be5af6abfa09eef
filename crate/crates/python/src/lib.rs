//! Python bindings: layouts, parameters, analytic distributions, Monte
//! Carlo sampling, sweeps and live sessions.

use std::path::PathBuf;

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use scansim::capacity;
use scansim::experiment::{predict_phrase, resolve_layout, to_csv};
use scansim::layout::{min_scans, GridLayout, ScanMode};
use scansim::montecarlo::{self, histogram};
use scansim::pmf::{analyze as analyze_chain, Pmf, WordAnalysis};
use scansim::session::{LiveSession, SessionConfig};
use scansim::{run_sweep, split_phrase, ExperimentSpec, ParamSet};
use serde::Serialize;

create_exception!(pyscansim, ScansimError, PyValueError);

fn err(e: scansim::Error) -> PyErr {
    ScansimError::new_err(e.to_string())
}

/// Converts any serializable value to plain Python objects.
fn to_py<T: Serialize>(py: Python<'_>, value: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| ScansimError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

fn parse_mode(mode: &str) -> PyResult<ScanMode> {
    match mode {
        "slow" => Ok(ScanMode::Slow),
        "fast" => Ok(ScanMode::Fast),
        other => Err(ScansimError::new_err(format!("mode must be 'slow' or 'fast', got {other:?}"))),
    }
}

#[pyclass(name = "Layout", module = "pyscansim", frozen)]
struct PyLayout {
    inner: GridLayout,
}

#[pymethods]
impl PyLayout {
    /// Built-in layout name, fixture name under `fixtures`, or file path.
    #[new]
    #[pyo3(signature = (name = "grid_2x2", fixtures = None))]
    fn new(name: &str, fixtures: Option<PathBuf>) -> PyResult<Self> {
        Ok(Self { inner: resolve_layout(name, fixtures.as_deref()).map_err(err)? })
    }

    #[staticmethod]
    fn from_toml(text: &str) -> PyResult<Self> {
        Ok(Self { inner: GridLayout::from_toml_str(text).map_err(err)? })
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name().to_string()
    }

    #[getter]
    fn rows(&self) -> Vec<String> {
        self.inner.rows().iter().map(|r| r.iter().collect()).collect()
    }

    #[getter]
    fn delete(&self) -> char {
        self.inner.delete_symbol()
    }

    /// 1-based (row, column) of a symbol.
    fn locate(&self, symbol: char) -> PyResult<(usize, usize)> {
        self.inner.locate(symbol).map_err(err)
    }

    #[pyo3(signature = (word, mode = "slow", k_delta = 1))]
    fn min_scans(&self, word: &str, mode: &str, k_delta: u32) -> PyResult<u64> {
        min_scans(word, &self.inner, parse_mode(mode)?, k_delta).map_err(err)
    }

    fn split_phrase(&self, phrase: &str) -> PyResult<Vec<String>> {
        split_phrase(phrase, &self.inner).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Layout({:?}, rows={})", self.inner.name(), self.inner.row_count())
    }
}

/// Model parameters. Times are in seconds, `lam` in events per second.
#[pyclass(name = "Params", module = "pyscansim")]
struct PyParams {
    inner: ParamSet,
}

#[pymethods]
impl PyParams {
    #[new]
    #[pyo3(signature = (
        delta = 0.0, sigma = 0.1, f = 0.0, lam = 0.0, t_scan = 1.0, t_fast = None,
        undo_window = 2, error_limit = 2, kappa = 10.0, sigma_fraction = None
    ))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        delta: f64,
        sigma: f64,
        f: f64,
        lam: f64,
        t_scan: f64,
        t_fast: Option<f64>,
        undo_window: usize,
        error_limit: usize,
        kappa: f64,
        sigma_fraction: Option<f64>,
    ) -> PyResult<Self> {
        let inner = ParamSet {
            delta,
            sigma,
            sigma_fraction,
            f,
            lambda: lam,
            t_scan,
            t_fast,
            undo_window,
            error_limit,
            kappa,
            mixture: None,
        };
        inner.noise_params().map_err(err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn delta(&self) -> f64 {
        self.inner.delta
    }

    #[getter]
    fn sigma(&self) -> f64 {
        self.inner.sigma_effective()
    }

    #[getter]
    fn f(&self) -> f64 {
        self.inner.f
    }

    #[getter]
    fn lam(&self) -> f64 {
        self.inner.lambda
    }

    #[getter]
    fn t_scan(&self) -> f64 {
        self.inner.t_scan
    }

    fn to_dict(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &self.inner)
    }

    fn __repr__(&self) -> String {
        let p = &self.inner;
        format!("Params(delta={}, sigma={}, f={}, lam={}, t_scan={})", p.delta, p.sigma_effective(), p.f, p.lambda, p.t_scan)
    }
}

#[pyclass(name = "WordAnalysis", module = "pyscansim", frozen)]
struct PyWordAnalysis {
    inner: WordAnalysis,
}

#[pymethods]
impl PyWordAnalysis {
    #[getter]
    fn scans(&self) -> Vec<f64> {
        self.inner.scans.probs().to_vec()
    }

    #[getter]
    fn time_units(&self) -> Vec<f64> {
        self.inner.time_units.probs().to_vec()
    }

    #[getter]
    fn clicks(&self) -> Vec<f64> {
        self.inner.clicks.probs().to_vec()
    }

    #[getter]
    fn errors(&self) -> Vec<f64> {
        self.inner.errors.probs().to_vec()
    }

    #[getter]
    fn unit_delay(&self) -> f64 {
        self.inner.unit_delay
    }

    #[getter]
    fn p_correct(&self) -> f64 {
        self.inner.outcome.p_correct
    }

    #[getter]
    fn p_error(&self) -> f64 {
        self.inner.outcome.p_error
    }

    #[getter]
    fn p_failure(&self) -> f64 {
        self.inner.outcome.p_failure
    }

    fn wpm(&self) -> PyResult<f64> {
        self.inner.wpm().map_err(err)
    }

    /// Mean and standard deviation of one of the four distributions.
    fn moments(&self, quantity: &str) -> PyResult<(f64, f64)> {
        let p = match quantity {
            "scans" => &self.inner.scans,
            "time_units" => &self.inner.time_units,
            "clicks" => &self.inner.clicks,
            "errors" => &self.inner.errors,
            other => return Err(ScansimError::new_err(format!("unknown quantity {other:?}"))),
        };
        Ok((p.mean(), p.std()))
    }
}

/// Exact distributions of one word.
#[pyfunction]
#[pyo3(signature = (word, layout, params, mode = "slow"))]
fn analyze(py: Python<'_>, word: &str, layout: &PyLayout, params: &PyParams, mode: &str) -> PyResult<PyWordAnalysis> {
    let mode = parse_mode(mode)?;
    let (layout, params) = (&layout.inner, &params.inner);
    let inner = py.detach(|| params.build_chain(word, layout, mode).map(|c| analyze_chain(&c))).map_err(err)?;
    Ok(PyWordAnalysis { inner })
}

/// One seeded Monte Carlo run with its event log.
#[pyfunction]
#[pyo3(signature = (word, layout, params, mode = "slow", seed = 0))]
fn simulate(
    py: Python<'_>,
    word: &str,
    layout: &PyLayout,
    params: &PyParams,
    mode: &str,
    seed: u64,
) -> PyResult<Py<PyAny>> {
    let config = params.inner.mc_config(parse_mode(mode)?).map_err(err)?;
    let log = montecarlo::run_word(word, &layout.inner, &config, seed).map_err(err)?;
    to_py(py, &log)
}

/// Histograms of scans, time units, clicks and errors plus outcome counts.
#[pyfunction]
#[pyo3(signature = (word, layout, params, runs, mode = "slow", seed = 0))]
fn sample(
    py: Python<'_>,
    word: &str,
    layout: &PyLayout,
    params: &PyParams,
    runs: usize,
    mode: &str,
    seed: u64,
) -> PyResult<Py<PyAny>> {
    let config = params.inner.mc_config(parse_mode(mode)?).map_err(err)?;
    let layout = &layout.inner;
    let runs = py.detach(|| montecarlo::sample_word_runs(word, layout, &config, seed, runs)).map_err(err)?;
    let count = |t| runs.iter().filter(|r| r.0 == t).count();
    let value = serde_json::json!({
        "scans": histogram(runs.iter().map(|r| r.1.scans)),
        "time_units": histogram(runs.iter().map(|r| r.1.time_units)),
        "clicks": histogram(runs.iter().map(|r| r.1.clicks)),
        "errors": histogram(runs.iter().map(|r| r.1.errors)),
        "correct": count(scansim::chain::Terminal::Correct),
        "error": count(scansim::chain::Terminal::Error),
        "failure": count(scansim::chain::Terminal::Failure),
    });
    to_py(py, &value)
}

/// Binomial z-score comparison of a histogram against a distribution.
#[pyfunction]
fn compare(py: Python<'_>, histogram: Vec<u64>, pmf: Vec<f64>) -> PyResult<Py<PyAny>> {
    let pmf = Pmf::new(pmf).map_err(err)?;
    to_py(py, &montecarlo::compare(&histogram, &pmf).map_err(err)?)
}

/// Expected wpm, clicks and errors per character for a phrase.
#[pyfunction]
#[pyo3(signature = (phrase, layout, params, mode = "slow"))]
fn predict(py: Python<'_>, phrase: &str, layout: &PyLayout, params: &PyParams, mode: &str) -> PyResult<Py<PyAny>> {
    let mode = parse_mode(mode)?;
    let words = split_phrase(phrase, &layout.inner).map_err(err)?;
    let (layout, params) = (&layout.inner, &params.inner);
    let p = py.detach(|| predict_phrase(&words, layout, params, mode)).map_err(err)?;
    to_py(py, &p)
}

/// Runs an experiment spec given as TOML text and returns CSV.
#[pyfunction]
#[pyo3(signature = (spec, fixtures = None))]
fn sweep(py: Python<'_>, spec: &str, fixtures: Option<PathBuf>) -> PyResult<String> {
    let spec = ExperimentSpec::from_toml_str(spec).map_err(err)?;
    let layout = resolve_layout(&spec.layout, fixtures.as_deref()).map_err(err)?;
    py.detach(|| run_sweep(&spec, &layout).and_then(|rows| to_csv(&spec, &rows))).map_err(err)
}

/// (beta, rate) maximizing the single-button information rate.
#[pyfunction]
fn optimize_beta(d: f64, g: f64) -> PyResult<(f64, f64)> {
    capacity::optimize_beta(d, g).map_err(err)
}

#[pyfunction]
fn noisy_factor(f: f64) -> PyResult<f64> {
    capacity::noisy_factor(f).map_err(err)
}

/// A live scanning session driven by client timestamps in milliseconds.
#[pyclass(name = "Session", module = "pyscansim")]
struct PySession {
    inner: LiveSession,
}

#[pymethods]
impl PySession {
    #[new]
    #[pyo3(signature = (phrase = "a_", layout = None, params = None, mode = "slow", seed = 0, montecarlo = false))]
    fn new(
        phrase: &str,
        layout: Option<&PyLayout>,
        params: Option<&PyParams>,
        mode: &str,
        seed: u64,
        montecarlo: bool,
    ) -> PyResult<Self> {
        let layout = layout.map_or_else(GridLayout::grid_2x2, |l| l.inner.clone());
        let config = SessionConfig {
            layout: layout.name().to_string(),
            phrase: phrase.to_string(),
            mode: parse_mode(mode)?,
            params: params.map(|p| p.inner.clone()).unwrap_or_default(),
            engine: if montecarlo { scansim::experiment::Engine::Montecarlo } else { Default::default() },
            seed,
        };
        Ok(Self { inner: LiveSession::new(config, layout).map_err(err)? })
    }

    fn click(&mut self, py: Python<'_>, t_ms: f64) -> PyResult<Py<PyAny>> {
        to_py(py, &self.inner.click(t_ms).map_err(err)?)
    }

    fn advance(&mut self, py: Python<'_>, t_ms: f64) -> PyResult<Py<PyAny>> {
        to_py(py, &self.inner.advance(t_ms).map_err(err)?)
    }

    fn schedule(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &self.inner.schedule())
    }

    fn cursor(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &self.inner.cursor())
    }

    fn stats(&mut self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &self.inner.stats().map_err(err)?)
    }

    fn log(&self) -> String {
        self.inner.to_ndjson()
    }

    #[getter]
    fn finished(&self) -> bool {
        self.inner.is_finished()
    }

    #[getter]
    fn selections(&self) -> String {
        self.inner.selections()
    }
}

#[pymodule]
fn pyscansim(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("ScansimError", m.py().get_type::<ScansimError>())?;
    m.add_class::<PyLayout>()?;
    m.add_class::<PyParams>()?;
    m.add_class::<PyWordAnalysis>()?;
    m.add_class::<PySession>()?;
    m.add_function(wrap_pyfunction!(analyze, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(sample, m)?)?;
    m.add_function(wrap_pyfunction!(compare, m)?)?;
    m.add_function(wrap_pyfunction!(predict, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(optimize_beta, m)?)?;
    m.add_function(wrap_pyfunction!(noisy_factor, m)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_parse() {
        assert_eq!(parse_mode("slow").unwrap(), ScanMode::Slow);
        assert_eq!(parse_mode("fast").unwrap(), ScanMode::Fast);
    }
}
