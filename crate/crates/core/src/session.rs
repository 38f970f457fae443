//! Authoring sessions: atomic edit operations with incremental relayout and a
//! linear revision log.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::Config;
use crate::graph::{build_graph, BuildError, LayoutGraph, Node};
use crate::layout::{incremental_relayout, Simulation, SimulationState};
use crate::model::{
    self, ChartSpec, LabelDef, LabelType, LinkDef, SizePoint, StreamDef, Table, Violation,
};
use crate::render;
use crate::svg::SvgDocument;

/// Colors handed to streams created without one.
const PALETTE: [&str; 8] = [
    "#D77733", "#3366AA", "#884499", "#55AA55", "#CC4444", "#DDAA22", "#44AAAA", "#AA6688",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntityKind {
    Stream,
    Link,
    Label,
}

/// One change to a chart.
///
/// Links and labels are addressed by their 1-based row number, streams by id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op")]
pub enum EditOp {
    AddStream {
        #[serde(default)]
        id: Option<String>,
        t0: f64,
        t1: f64,
        #[serde(default)]
        color: Option<String>,
        #[serde(default)]
        parent: Option<String>,
    },
    /// A missing endpoint creates a new stream covering the link's time span.
    AddLink {
        #[serde(default)]
        from: Option<String>,
        t0: f64,
        #[serde(default)]
        to: Option<String>,
        #[serde(default)]
        t1: Option<f64>,
        #[serde(default)]
        merge: bool,
        #[serde(default)]
        color: Option<String>,
    },
    SetSizeAt {
        stream: String,
        t: f64,
        size: f64,
    },
    AddLabel {
        stream: String,
        t: f64,
        text: String,
        #[serde(rename = "type", default = "default_label_type")]
        kind: LabelType,
        #[serde(default = "default_label_size")]
        size: f64,
    },
    DeleteEntity {
        kind: EntityKind,
        id: String,
    },
    ReplaceCsv {
        table: Table,
        text: String,
    },
}

fn default_label_type() -> LabelType {
    LabelType::In
}

fn default_label_size() -> f64 {
    1.0
}

/// A refused edit. The session is left untouched.
#[derive(Debug, Clone, PartialEq, Error, Serialize)]
#[error("{message}")]
pub struct Rejection {
    pub message: String,
    pub violations: Vec<Violation>,
}

impl Rejection {
    fn message(message: impl Into<String>) -> Self {
        Rejection {
            message: message.into(),
            violations: Vec::new(),
        }
    }

    fn from_violations(violations: Vec<Violation>) -> Self {
        let message = violations
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join("; ");
        Rejection {
            message,
            violations,
        }
    }
}

impl From<BuildError> for Rejection {
    fn from(e: BuildError) -> Self {
        match e {
            BuildError::Invalid(v) => Rejection::from_violations(v),
            other => Rejection::message(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EditOutcome {
    pub revision: u64,
    pub ticks: usize,
}

/// Node positions of one revision, as served to clients.
#[derive(Debug, Clone, Serialize)]
pub struct LayoutView<'a> {
    pub revision: u64,
    pub width: f64,
    pub height: f64,
    pub nodes: Vec<NodeView<'a>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct NodeView<'a> {
    #[serde(flatten)]
    pub node: &'a Node,
    pub y: f64,
}

#[derive(Debug, Clone)]
struct Snapshot {
    spec: ChartSpec,
    graph: LayoutGraph,
    state: SimulationState,
}

#[derive(Debug, Clone)]
pub struct Session {
    config: Config,
    /// Entry `r` holds revision `r`; the last entry is current.
    log: Vec<Snapshot>,
}

impl Session {
    /// Opens a session at revision 0 with a full layout of `spec`.
    pub fn new(spec: ChartSpec, config: Config) -> Result<Self, Rejection> {
        let (graph, state, _) = render::layout(&spec, &config)?;
        Ok(Session {
            config,
            log: vec![Snapshot { spec, graph, state }],
        })
    }

    fn current(&self) -> &Snapshot {
        self.log.last().expect("log is never empty")
    }

    pub fn revision(&self) -> u64 {
        (self.log.len() - 1) as u64
    }

    pub fn spec(&self) -> &ChartSpec {
        &self.current().spec
    }

    pub fn graph(&self) -> &LayoutGraph {
        &self.current().graph
    }

    pub fn state(&self) -> &SimulationState {
        &self.current().state
    }

    pub fn config(&self) -> &Config {
        &self.config
    }

    pub fn spec_at(&self, revision: u64) -> Option<&ChartSpec> {
        self.log.get(revision as usize).map(|s| &s.spec)
    }

    pub fn layout(&self) -> LayoutView<'_> {
        let cur = self.current();
        LayoutView {
            revision: self.revision(),
            width: self.config.canvas.width,
            height: self.config.canvas.height,
            nodes: cur
                .graph
                .nodes
                .iter()
                .map(|node| NodeView {
                    node,
                    y: cur.state.y[node.id.0],
                })
                .collect(),
        }
    }

    pub fn svg(&self) -> SvgDocument {
        let cur = self.current();
        render::draw(&cur.spec, &cur.graph, &cur.state, &self.config)
    }

    pub fn svg_at(&self, revision: u64) -> Option<SvgDocument> {
        let snap = self.log.get(revision as usize)?;
        Some(render::draw(&snap.spec, &snap.graph, &snap.state, &self.config))
    }

    /// Applies `op` or leaves the session exactly as it was.
    pub fn apply_edit(&mut self, op: &EditOp) -> Result<EditOutcome, Rejection> {
        let cur = self.current();
        let spec = apply_op(&cur.spec, op, self.config.graph.step)?;
        let graph = build_graph(&spec, &self.config.graph, self.config.canvas)?;
        let force = &self.config.force;
        let mut state =
            incremental_relayout(&cur.state, &cur.graph, &graph, force, self.config.canvas);
        let run = Simulation::new(&graph, force, self.config.canvas)
            .run(&mut state, force.relayout_max_ticks);
        self.log.push(Snapshot { spec, graph, state });
        Ok(EditOutcome {
            revision: self.revision(),
            ticks: run.ticks,
        })
    }

    /// Discards the warm-started layout and lays out the current spec from
    /// scratch, exactly as a batch render would. The revision is unchanged.
    pub fn relayout_full(&mut self) -> usize {
        let spec = self.current().spec.clone();
        let (graph, state, run) =
            render::layout(&spec, &self.config).expect("current spec is valid");
        *self.log.last_mut().expect("log is never empty") = Snapshot { spec, graph, state };
        run.ticks
    }
}

fn next_stream_id(spec: &ChartSpec) -> String {
    (1..)
        .map(|n| format!("S{n}"))
        .find(|id| spec.stream(id).is_none())
        .expect("unbounded id range")
}

fn pick_color(spec: &ChartSpec, color: &Option<String>) -> String {
    color
        .clone()
        .unwrap_or_else(|| PALETTE[spec.streams.len() % PALETTE.len()].to_string())
}

fn non_empty(s: &Option<String>) -> Option<String> {
    s.as_deref()
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
}

fn row_index(id: &str, len: usize, what: &str) -> Result<usize, Rejection> {
    match id.trim().parse::<usize>() {
        Ok(row) if (1..=len).contains(&row) => Ok(row - 1),
        _ => Err(Rejection::message(format!("no {what} at row `{id}`"))),
    }
}

/// Removes a stream, its nested descendants, and every link and label that
/// refers to any of them.
fn delete_stream(spec: &mut ChartSpec, id: &str) -> Result<(), Rejection> {
    if spec.stream(id).is_none() {
        return Err(Rejection::message(format!("stream `{id}` does not exist")));
    }
    let mut doomed = vec![id.to_string()];
    let mut i = 0;
    while i < doomed.len() {
        let parent = doomed[i].clone();
        doomed.extend(
            spec.streams
                .iter()
                .filter(|s| s.parent.as_deref() == Some(parent.as_str()))
                .map(|s| s.id.clone())
                .filter(|c| !doomed.contains(c))
                .collect::<Vec<_>>(),
        );
        i += 1;
    }
    let gone = |s: &str| doomed.iter().any(|d| d == s);
    spec.streams.retain(|s| !gone(&s.id));
    spec.links.retain(|l| !gone(&l.from) && !gone(&l.to));
    spec.labels.retain(|l| !gone(&l.stream));
    Ok(())
}

/// The spec that results from `op`, validated for `step`.
pub fn apply_op(spec: &ChartSpec, op: &EditOp, step: f64) -> Result<ChartSpec, Rejection> {
    let mut next = spec.clone();
    match op {
        EditOp::AddStream {
            id,
            t0,
            t1,
            color,
            parent,
        } => {
            let id = non_empty(id).unwrap_or_else(|| next_stream_id(spec));
            next.streams.push(StreamDef {
                id,
                t0: *t0,
                t1: *t1,
                color: pick_color(spec, color),
                sizes: Vec::new(),
                parent: non_empty(parent),
            });
        }
        EditOp::AddLink {
            from,
            t0,
            to,
            t1,
            merge,
            color,
        } => {
            let end = t1.unwrap_or(t0 + step);
            let (from, to) = match (non_empty(from), non_empty(to)) {
                (None, None) => {
                    return Err(Rejection::message("a link needs at least one existing endpoint"))
                }
                (Some(f), Some(t)) => (f, t),
                (f, t) => {
                    let id = next_stream_id(spec);
                    next.streams.push(StreamDef {
                        id: id.clone(),
                        t0: t0.min(end),
                        t1: t0.max(end),
                        color: pick_color(spec, color),
                        sizes: Vec::new(),
                        parent: None,
                    });
                    (f.unwrap_or_else(|| id.clone()), t.unwrap_or(id))
                }
            };
            next.links.push(LinkDef {
                from,
                t0: *t0,
                to,
                t1: *t1,
                merge: *merge,
            });
        }
        EditOp::SetSizeAt { stream, t, size } => {
            let Some(s) = next.streams.iter_mut().find(|s| &s.id == stream) else {
                return Err(Rejection::message(format!("stream `{stream}` does not exist")));
            };
            let tol = step * 1e-9;
            match s.sizes.iter_mut().find(|p| (p.t - t).abs() <= tol) {
                Some(p) => p.size = *size,
                None => {
                    s.sizes.push(SizePoint { t: *t, size: *size });
                    s.sizes.sort_by(|a, b| a.t.total_cmp(&b.t));
                }
            }
        }
        EditOp::AddLabel {
            stream,
            t,
            text,
            kind,
            size,
        } => {
            if text.trim().is_empty() {
                return Err(Rejection::message("label text must not be empty"));
            }
            next.labels.push(LabelDef {
                stream: stream.clone(),
                t: *t,
                text: text.clone(),
                kind: *kind,
                size: *size,
            });
        }
        EditOp::DeleteEntity { kind, id } => match kind {
            EntityKind::Stream => delete_stream(&mut next, id)?,
            EntityKind::Link => {
                let i = row_index(id, next.links.len(), "link")?;
                next.links.remove(i);
            }
            EntityKind::Label => {
                let i = row_index(id, next.labels.len(), "label")?;
                next.labels.remove(i);
            }
        },
        EditOp::ReplaceCsv { table, text } => {
            let parsed = match table {
                Table::Streams => model::parse_streams(text).map(|v| next.streams = v),
                Table::Links => model::parse_links(text).map(|v| next.links = v),
                Table::Labels => model::parse_labels(text).map(|v| next.labels = v),
            };
            parsed.map_err(|e| match e {
                model::Error::Invalid(v) => Rejection::from_violations(v),
                other => Rejection::message(other.to_string()),
            })?;
        }
    }
    model::validate_for_step(&next, step).map_err(Rejection::from_violations)?;
    Ok(next)
}

/// File names of the three tables inside a dataset directory.
pub fn table_path(dir: &Path, table: Table) -> PathBuf {
    dir.join(format!("{table}.csv"))
}

#[derive(Debug, Error)]
pub enum DataError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error(transparent)]
    Model(#[from] model::Error),
}

fn io_error(path: &Path) -> impl FnOnce(io::Error) -> DataError + '_ {
    move |source| DataError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Loads a dataset directory. Missing tables count as empty.
pub fn load_dir(dir: &Path) -> Result<ChartSpec, DataError> {
    let read = |table| -> Result<Option<String>, DataError> {
        let path = table_path(dir, table);
        match fs::read_to_string(&path) {
            Ok(text) => Ok(Some(text)),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(io_error(&path)(e)),
        }
    };
    let streams = read(Table::Streams)?.unwrap_or_default();
    let links = read(Table::Links)?;
    let labels = read(Table::Labels)?;
    Ok(ChartSpec::from_csv(
        &streams,
        links.as_deref(),
        labels.as_deref(),
    )?)
}

/// Writes `bytes` to `path` through a temporary sibling and a rename, so a
/// failed write never leaves a partial file behind.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "path has no file name"))?;
    let tmp = dir.join(format!(".{}.{}.tmp", name.to_string_lossy(), std::process::id()));
    let result = fs::write(&tmp, bytes).and_then(|()| fs::rename(&tmp, path));
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}

/// Saves the three tables of `spec` into `dir`.
pub fn save_dir(dir: &Path, spec: &ChartSpec) -> Result<(), DataError> {
    fs::create_dir_all(dir).map_err(io_error(dir))?;
    let csv = spec.to_csv();
    for (table, text) in [
        (Table::Streams, &csv.streams),
        (Table::Links, &csv.links),
        (Table::Labels, &csv.labels),
    ] {
        let path = table_path(dir, table);
        write_atomic(&path, text.as_bytes()).map_err(io_error(&path))?;
    }
    Ok(())
}
