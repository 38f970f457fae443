//! Python bindings: charts, rendering and authoring sessions.

use orcha_core::config::Config;
use orcha_core::graph::size_at;
use orcha_core::model::{self, ChartSpec};
use orcha_core::render;
use orcha_core::session::{EditOp, Session as CoreSession};
use orcha_core::synth;
use pyo3::create_exception;
use pyo3::exceptions::{PyKeyError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyString};

create_exception!(pyorcha, ChartError, PyValueError);
create_exception!(pyorcha, EditRejected, PyValueError);

fn chart_error(e: impl std::fmt::Display) -> PyErr {
    ChartError::new_err(e.to_string())
}

fn parse_config(config: Option<&str>, seed: Option<u64>) -> PyResult<Config> {
    let mut c = match config {
        Some(text) => Config::from_json(text).map_err(chart_error)?,
        None => Config::default(),
    };
    if let Some(seed) = seed {
        c.style.seed = seed;
    }
    c.validate().map_err(chart_error)?;
    Ok(c)
}

/// Accepts either a JSON string or a dict.
fn json_text(obj: &Bound<'_, PyAny>) -> PyResult<String> {
    if let Ok(s) = obj.cast::<PyString>() {
        return Ok(s.to_str()?.to_owned());
    }
    let json = obj.py().import("json")?;
    json.call_method1("dumps", (obj,))?.extract()
}

fn to_py_json<'py>(py: Python<'py>, value: &impl serde::Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(chart_error)?;
    py.import("json")?.call_method1("loads", (text,))
}

/// A parsed chart: streams, links and labels.
#[pyclass(module = "pyorcha", from_py_object)]
#[derive(Clone)]
struct Chart {
    spec: ChartSpec,
}

#[pymethods]
impl Chart {
    #[staticmethod]
    #[pyo3(signature = (streams, links=None, labels=None))]
    fn from_csv(streams: &str, links: Option<&str>, labels: Option<&str>) -> PyResult<Self> {
        let spec = ChartSpec::from_csv(streams, links, labels).map_err(chart_error)?;
        Ok(Chart { spec })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let spec = serde_json::from_str(text).map_err(chart_error)?;
        Ok(Chart { spec })
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.spec).map_err(chart_error)
    }

    /// `(streams, links, labels)` CSV texts.
    fn to_csv(&self) -> (String, String, String) {
        let csv = self.spec.to_csv();
        (csv.streams, csv.links, csv.labels)
    }

    /// Violation messages; empty when the chart is valid.
    #[pyo3(signature = (step=1.0))]
    fn validate(&self, step: f64) -> Vec<String> {
        match model::validate_for_step(&self.spec, step) {
            Ok(()) => Vec::new(),
            Err(v) => v.iter().map(ToString::to_string).collect(),
        }
    }

    #[getter]
    fn stream_ids(&self) -> Vec<String> {
        self.spec.streams.iter().map(|s| s.id.clone()).collect()
    }

    #[getter]
    fn counts(&self) -> (usize, usize, usize) {
        (self.spec.streams.len(), self.spec.links.len(), self.spec.labels.len())
    }

    #[pyo3(signature = (stream, t, default_size=5.0))]
    fn size_at(&self, stream: &str, t: f64, default_size: f64) -> PyResult<Option<f64>> {
        let s = self
            .spec
            .stream(stream)
            .ok_or_else(|| PyKeyError::new_err(stream.to_owned()))?;
        Ok(size_at(s, t, default_size))
    }

    /// Lays out and renders; returns the SVG text.
    #[pyo3(signature = (config=None, seed=None))]
    fn render_svg(&self, py: Python<'_>, config: Option<&str>, seed: Option<u64>) -> PyResult<String> {
        let c = parse_config(config, seed)?;
        let spec = self.spec.clone();
        py.detach(move || render::render(&spec, &c))
            .map(|r| r.svg.xml)
            .map_err(chart_error)
    }

    /// Like `render_svg`, returning a dict with `svg`, `nodes`, `edges` and `ticks`.
    #[pyo3(signature = (config=None, seed=None))]
    fn render<'py>(&self, py: Python<'py>, config: Option<&str>, seed: Option<u64>) -> PyResult<Bound<'py, PyDict>> {
        let c = parse_config(config, seed)?;
        let spec = self.spec.clone();
        let r = py.detach(move || render::render(&spec, &c)).map_err(chart_error)?;
        let d = PyDict::new(py);
        d.set_item("svg", r.svg.xml)?;
        d.set_item("nodes", r.stats.nodes)?;
        d.set_item("edges", r.stats.edges)?;
        d.set_item("ticks", r.stats.ticks)?;
        Ok(d)
    }

    fn __len__(&self) -> usize {
        self.spec.streams.len()
    }

    fn __repr__(&self) -> String {
        let (s, l, b) = self.counts();
        format!("Chart(streams={s}, links={l}, labels={b})")
    }
}

/// An editing session with a linear revision log.
#[pyclass(module = "pyorcha")]
struct Session {
    inner: CoreSession,
}

#[pymethods]
impl Session {
    #[new]
    #[pyo3(signature = (chart=None, config=None, seed=None))]
    fn new(chart: Option<Chart>, config: Option<&str>, seed: Option<u64>) -> PyResult<Self> {
        let c = parse_config(config, seed)?;
        let spec = chart.map(|c| c.spec).unwrap_or_default();
        let inner = CoreSession::new(spec, c).map_err(|r| EditRejected::new_err(r.message))?;
        Ok(Session { inner })
    }

    /// Applies an edit op given as a dict or JSON text; returns the new revision.
    fn apply(&mut self, py: Python<'_>, op: &Bound<'_, PyAny>) -> PyResult<u64> {
        let op: EditOp = serde_json::from_str(&json_text(op)?).map_err(chart_error)?;
        let inner = &mut self.inner;
        py.detach(|| inner.apply_edit(&op))
            .map(|o| o.revision)
            .map_err(|r| EditRejected::new_err(r.message))
    }

    /// Lays the current chart out from scratch; returns the tick count.
    fn relayout(&mut self, py: Python<'_>) -> usize {
        let inner = &mut self.inner;
        py.detach(|| inner.relayout_full())
    }

    #[getter]
    fn revision(&self) -> u64 {
        self.inner.revision()
    }

    #[getter]
    fn chart(&self) -> Chart {
        Chart {
            spec: self.inner.spec().clone(),
        }
    }

    #[pyo3(signature = (rev=None))]
    fn svg(&self, rev: Option<u64>) -> PyResult<String> {
        match rev {
            None => Ok(self.inner.svg().xml),
            Some(r) => self
                .inner
                .svg_at(r)
                .map(|d| d.xml)
                .ok_or_else(|| PyKeyError::new_err(format!("no revision {r}"))),
        }
    }

    /// Node positions of the current revision as a dict.
    fn layout<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py_json(py, &self.inner.layout())
    }
}

/// A small random valid chart.
#[pyfunction]
fn random_chart(seed: u64) -> Chart {
    Chart {
        spec: synth::random_spec(seed),
    }
}

/// A chart with 44 streams, 61 links and 369 labels.
#[pyfunction]
fn large_chart(seed: u64) -> Chart {
    Chart {
        spec: synth::large_spec(seed),
    }
}

#[pymodule]
fn pyorcha(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Chart>()?;
    m.add_class::<Session>()?;
    m.add_function(wrap_pyfunction!(random_chart, m)?)?;
    m.add_function(wrap_pyfunction!(large_chart, m)?)?;
    m.add("ChartError", m.py().get_type::<ChartError>())?;
    m.add("EditRejected", m.py().get_type::<EditRejected>())?;
    Ok(())
}
