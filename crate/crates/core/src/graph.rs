//! Nested layout graph built from a [`ChartSpec`].
//!
//! Every stream becomes a chain of nodes, one per timepoint of a global time
//! grid anchored at the chart start (`t_min + k * step`), plus exact nodes at
//! stream endpoints. A stream additionally gets nodes at the endpoints of all
//! streams nested inside it, so a nested node always finds its container at
//! the same time.
//!
//! Labels become short horizontal chains (a center plus `k` wings per side)
//! and links become chains with intermediate nodes at every grid step they
//! span. Inside labels, on-top labels and link anchors are nested in stream
//! nodes; the layout keeps nested nodes within their container.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{self, ChartSpec, LabelDef, LabelType, LinkDef, StreamDef, Violation};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Canvas {
    pub width: f64,
    pub height: f64,
}

impl Default for Canvas {
    fn default() -> Self {
        Canvas {
            width: 1200.0,
            height: 800.0,
        }
    }
}

/// Parameters for turning a spec into a layout graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "camelCase")]
pub struct GraphParams {
    /// Discretization step in chart time units.
    pub step: f64,
    /// Stream thickness (in size units) at stream endpoints.
    pub default_size: f64,
    /// Pixels per size unit.
    pub size_scale: f64,
    /// Horizontal margin between the canvas edge and the time range, px.
    pub margin: f64,
    /// Font size of a 1 em label, px.
    pub base_font_px: f64,
    /// Average glyph advance as a fraction of the font size, used for chain length.
    pub glyph_width_em: f64,
    /// Padding around label text inside its box, em.
    pub label_padding_em: f64,
    /// Link anchor size as a fraction of the target stream size.
    pub anchor_fraction: f64,
    /// Smallest anchor size and the minimum gap kept to the target outline, px.
    pub anchor_min_px: f64,
    /// Default link ribbon width, px.
    pub link_width: f64,
}

impl Default for GraphParams {
    fn default() -> Self {
        GraphParams {
            step: 1.0,
            default_size: 5.0,
            size_scale: 8.0,
            margin: 60.0,
            base_font_px: 16.0,
            glyph_width_em: 0.6,
            label_padding_em: 0.4,
            anchor_fraction: 0.3,
            anchor_min_px: 2.0,
            link_width: 4.0,
        }
    }
}

impl GraphParams {
    /// Height of a label box for a label of `size_em`.
    pub fn label_box_height(&self, size_em: f64) -> f64 {
        size_em * self.base_font_px * (1.0 + 2.0 * self.label_padding_em)
    }

    /// Estimated rendered text width used to size label chains.
    pub fn estimated_text_width(&self, text: &str, size_em: f64) -> f64 {
        text.chars().count() as f64 * self.glyph_width_em * size_em * self.base_font_px
    }

    /// Number of wing nodes on each side of a label center.
    pub fn wing_count(&self, text: &str, size_em: f64, px_per_step: f64) -> usize {
        let half = self.estimated_text_width(text, size_em) / 2.0;
        if half <= 0.0 || px_per_step <= 0.0 {
            return 0;
        }
        (half / px_per_step).ceil() as usize
    }
}

/// Linear map from chart time to canvas x.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeScale {
    pub t_min: f64,
    pub t_max: f64,
    pub x_left: f64,
    pub px_per_unit: f64,
}

impl TimeScale {
    pub fn new(range: Option<(f64, f64)>, canvas: Canvas, margin: f64) -> Self {
        let (t_min, t_max) = range.unwrap_or((0.0, 0.0));
        let span = t_max - t_min;
        if span > 0.0 {
            TimeScale {
                t_min,
                t_max,
                x_left: margin,
                px_per_unit: (canvas.width - 2.0 * margin).max(1.0) / span,
            }
        } else {
            TimeScale {
                t_min,
                t_max,
                x_left: canvas.width / 2.0,
                px_per_unit: 0.0,
            }
        }
    }

    pub fn to_px(&self, t: f64) -> f64 {
        self.x_left + (t - self.t_min) * self.px_per_unit
    }

    pub fn to_time(&self, x: f64) -> f64 {
        if self.px_per_unit == 0.0 {
            self.t_min
        } else {
            self.t_min + (x - self.x_left) / self.px_per_unit
        }
    }
}

/// Thickness of a stream at time `t`, in size units.
///
/// Piecewise linear through `(t0, default)`, every explicit size entry and
/// `(t1, default)`. An explicit entry at an endpoint replaces the default
/// there. Returns `None` when `t` lies outside the stream interval.
pub fn size_at(stream: &StreamDef, t: f64, default_size: f64) -> Option<f64> {
    if !stream.contains_time(t) {
        return None;
    }
    let mut knots: Vec<(f64, f64)> = Vec::with_capacity(stream.sizes.len() + 2);
    if stream.sizes.first().is_none_or(|p| p.t > stream.t0) {
        knots.push((stream.t0, default_size));
    }
    knots.extend(stream.sizes.iter().map(|p| (p.t, p.size)));
    if stream.sizes.last().is_none_or(|p| p.t < stream.t1) {
        knots.push((stream.t1, default_size));
    }
    if let Some(&(_, v)) = knots.iter().find(|(kt, _)| *kt == t) {
        return Some(v);
    }
    knots
        .windows(2)
        .find(|w| w[0].0 <= t && t <= w[1].0)
        .map(|w| {
            let ((ta, va), (tb, vb)) = (w[0], w[1]);
            if tb == ta {
                va
            } else {
                va + (vb - va) * (t - ta) / (tb - ta)
            }
        })
        .or(Some(default_size))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodeId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NodeKind {
    Stream,
    LabelCenter,
    LabelWing,
    LinkIntermediate,
    LinkAnchor,
}

/// Index of the spec entity a node was created for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "index", rename_all = "lowercase")]
pub enum Owner {
    Stream(usize),
    Label(usize),
    Link(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    pub kind: NodeKind,
    pub owner: Owner,
    /// Identity of the owning entity that survives edits to other entities.
    pub key: String,
    pub t: f64,
    pub x: f64,
    /// Vertical extent, px.
    pub size: f64,
    pub parent: Option<NodeId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeClass {
    Stream,
    Label,
    Link,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub src: NodeId,
    pub dst: NodeId,
    pub class: EdgeClass,
    /// The edge ties an outside label to its stream and keeps them apart
    /// instead of aligned.
    pub attach: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelChain {
    pub label: usize,
    pub center: NodeId,
    /// Chain nodes ordered by time.
    pub nodes: Vec<NodeId>,
    /// Stream node the label refers to.
    pub stream_node: NodeId,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkChain {
    pub link: usize,
    /// From the source stream node to the destination (anchor or stream node).
    pub nodes: Vec<NodeId>,
    pub anchor: Option<NodeId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayoutGraph {
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
    pub children: Vec<Vec<NodeId>>,
    /// Node chain of every stream, indexed like `ChartSpec::streams`.
    pub stream_nodes: Vec<Vec<NodeId>>,
    pub label_chains: Vec<LabelChain>,
    pub link_chains: Vec<LinkChain>,
    pub scale: TimeScale,
    pub step: f64,
}

#[derive(Debug, Error)]
pub enum BuildError {
    #[error("discretization step must be positive, got {0}")]
    InvalidStep(f64),
    #[error("invalid chart: {} violation(s)", .0.len())]
    Invalid(Vec<Violation>),
}

impl BuildError {
    pub fn violations(&self) -> &[Violation] {
        match self {
            BuildError::Invalid(v) => v,
            BuildError::InvalidStep(_) => &[],
        }
    }
}

/// Stable identity strings for spec entities.
pub fn stream_key(stream: &StreamDef) -> String {
    format!("s:{}", stream.id)
}

fn label_base_key(label: &LabelDef) -> String {
    format!("l:{}:{}:{}:{}", label.stream, label.t, label.kind.as_str(), label.text)
}

fn link_base_key(link: &LinkDef) -> String {
    format!("k:{}:{}:{}:{:?}:{}", link.from, link.t0, link.to, link.t1, link.merge)
}

fn disambiguate(keys: impl Iterator<Item = String>) -> Vec<String> {
    let mut seen: HashMap<String, usize> = HashMap::new();
    keys.map(|k| {
        let n = seen.entry(k.clone()).or_insert(0);
        *n += 1;
        format!("{k}#{n}")
    })
    .collect()
}

impl LayoutGraph {
    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.0]
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Stream node of stream `stream` at exactly time `t`.
    pub fn stream_node_at(&self, stream: usize, t: f64) -> Option<NodeId> {
        self.stream_nodes
            .get(stream)?
            .iter()
            .copied()
            .find(|&n| self.nodes[n.0].t == t)
    }

    pub fn depth(&self, id: NodeId) -> usize {
        let mut depth = 0;
        let mut current = self.nodes[id.0].parent;
        while let Some(p) = current {
            depth += 1;
            current = self.nodes[p.0].parent;
        }
        depth
    }

    /// Whether `ancestor` contains `node`, directly or transitively.
    pub fn is_ancestor(&self, ancestor: NodeId, node: NodeId) -> bool {
        let mut current = self.nodes[node.0].parent;
        while let Some(p) = current {
            if p == ancestor {
                return true;
            }
            current = self.nodes[p.0].parent;
        }
        false
    }

    /// Node ids ordered so every parent precedes its children.
    pub fn nesting_order(&self) -> Vec<NodeId> {
        let mut order: Vec<NodeId> = Vec::with_capacity(self.nodes.len());
        let mut queue: VecDeque<NodeId> = self
            .nodes
            .iter()
            .filter(|n| n.parent.is_none())
            .map(|n| n.id)
            .collect();
        while let Some(id) = queue.pop_front() {
            order.push(id);
            queue.extend(self.children[id.0].iter().copied());
        }
        order
    }

    /// Sorted distinct node times.
    pub fn times(&self) -> Vec<f64> {
        let mut times: Vec<f64> = self.nodes.iter().map(|n| n.t).collect();
        times.sort_by(f64::total_cmp);
        times.dedup();
        times
    }
}

/// Snaps times that lie within rounding noise of a grid point onto it.
struct Grid {
    origin: f64,
    step: f64,
}

impl Grid {
    fn eps(&self) -> f64 {
        self.step * 1e-9
    }

    fn canonical(&self, t: f64) -> f64 {
        let k = ((t - self.origin) / self.step).round();
        let g = self.origin + k * self.step;
        if (t - g).abs() <= self.eps() {
            g
        } else {
            t
        }
    }

    /// Grid points in `[t0, t1]`.
    fn points(&self, t0: f64, t1: f64) -> Vec<f64> {
        let first = ((t0 - self.origin) / self.step - 1e-9).ceil() as i64;
        let last = ((t1 - self.origin) / self.step + 1e-9).floor() as i64;
        (first..=last)
            .map(|k| self.origin + k as f64 * self.step)
            .collect()
    }
}

fn sorted_unique(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// Builds the nested layout graph of a validated spec.
pub fn build_graph(
    spec: &ChartSpec,
    params: &GraphParams,
    canvas: Canvas,
) -> Result<LayoutGraph, BuildError> {
    let step = params.step;
    if !(step > 0.0 && step.is_finite()) {
        return Err(BuildError::InvalidStep(step));
    }
    model::validate_for_step(spec, step).map_err(BuildError::Invalid)?;

    let range = spec.time_range();
    let scale = TimeScale::new(range, canvas, params.margin);
    let grid = Grid {
        origin: scale.t_min,
        step,
    };
    let mut b = Builder {
        graph: LayoutGraph {
            nodes: Vec::new(),
            edges: Vec::new(),
            children: Vec::new(),
            stream_nodes: vec![Vec::new(); spec.streams.len()],
            label_chains: Vec::new(),
            link_chains: Vec::new(),
            scale,
            step,
        },
    };

    // node times per stream, including endpoints of nested streams
    let index_of: HashMap<&str, usize> = spec
        .streams
        .iter()
        .enumerate()
        .map(|(i, s)| (s.id.as_str(), i))
        .collect();
    let mut times: Vec<Vec<f64>> = spec
        .streams
        .iter()
        .map(|s| {
            let mut t = grid.points(s.t0, s.t1);
            t.push(grid.canonical(s.t0));
            t.push(grid.canonical(s.t1));
            t
        })
        .collect();
    for s in &spec.streams {
        let mut ancestor = s.parent.as_deref();
        while let Some(pid) = ancestor {
            let pi = index_of[pid];
            times[pi].push(grid.canonical(s.t0));
            times[pi].push(grid.canonical(s.t1));
            ancestor = spec.streams[pi].parent.as_deref();
        }
    }
    let times: Vec<Vec<f64>> = times.into_iter().map(sorted_unique).collect();

    // parents first so nested nodes can find and fit their container
    let mut order: Vec<usize> = (0..spec.streams.len()).collect();
    order.sort_by_key(|&i| spec.depth(&spec.streams[i].id));
    for &si in &order {
        let s = &spec.streams[si];
        let parent = s.parent.as_deref().map(|p| index_of[p]);
        let key = stream_key(s);
        let mut prev: Option<NodeId> = None;
        for &t in &times[si] {
            let mut size = size_at(s, t.clamp(s.t0, s.t1), params.default_size)
                .unwrap_or(params.default_size)
                * params.size_scale;
            let parent_node = parent.map(|pi| {
                b.graph
                    .stream_node_at(pi, t)
                    .expect("ancestor streams carry nodes at nested endpoints")
            });
            if let Some(p) = parent_node {
                size = size.min(b.graph.nodes[p.0].size);
            }
            let id = b.add_node(NodeKind::Stream, Owner::Stream(si), key.clone(), t, size, parent_node);
            b.graph.stream_nodes[si].push(id);
            if let Some(prev) = prev {
                b.add_edge(prev, id, EdgeClass::Stream, false);
            }
            prev = Some(id);
        }
    }

    let label_keys = disambiguate(spec.labels.iter().map(label_base_key));
    for (li, label) in spec.labels.iter().enumerate() {
        build_label_chain(&mut b.graph, spec, li, label, &label_keys[li], params);
    }

    let link_keys = disambiguate(spec.links.iter().map(link_base_key));
    for (ki, link) in spec.links.iter().enumerate() {
        expand_link(&mut b.graph, spec, ki, link, &link_keys[ki], params, &grid)?;
    }

    Ok(b.graph)
}

struct Builder {
    graph: LayoutGraph,
}

impl Builder {
    fn add_node(
        &mut self,
        kind: NodeKind,
        owner: Owner,
        key: String,
        t: f64,
        size: f64,
        parent: Option<NodeId>,
    ) -> NodeId {
        add_node(&mut self.graph, kind, owner, key, t, size, parent)
    }

    fn add_edge(&mut self, src: NodeId, dst: NodeId, class: EdgeClass, attach: bool) {
        self.graph.edges.push(Edge {
            src,
            dst,
            class,
            attach,
        });
    }
}

fn add_node(
    graph: &mut LayoutGraph,
    kind: NodeKind,
    owner: Owner,
    key: String,
    t: f64,
    size: f64,
    parent: Option<NodeId>,
) -> NodeId {
    let id = NodeId(graph.nodes.len());
    graph.nodes.push(Node {
        id,
        kind,
        owner,
        key,
        t,
        x: graph.scale.to_px(t),
        size,
        parent,
    });
    graph.children.push(Vec::new());
    if let Some(p) = parent {
        graph.children[p.0].push(id);
    }
    id
}

/// Index of the node in `chain` whose time is closest to `t`; ties go to the earlier node.
fn nearest_index(graph: &LayoutGraph, chain: &[NodeId], t: f64) -> usize {
    let mut best = 0;
    for (i, n) in chain.iter().enumerate() {
        if (graph.nodes[n.0].t - t).abs() < (graph.nodes[chain[best].0].t - t).abs() {
            best = i;
        }
    }
    best
}

/// Adds the node chain of one label.
///
/// Inside and on-top labels reuse the time slots of their stream's nodes and
/// nest in them; wings are clipped at the stream ends. Outside labels are free,
/// spaced one step apart, clipped to the chart range, and tied to the stream
/// node by an extra label edge.
pub fn build_label_chain(
    graph: &mut LayoutGraph,
    spec: &ChartSpec,
    label_index: usize,
    label: &LabelDef,
    key: &str,
    params: &GraphParams,
) -> LabelChain {
    let si = spec
        .stream_index(&label.stream)
        .expect("validated label references a stream");
    let chain = graph.stream_nodes[si].clone();
    let center_slot = nearest_index(graph, &chain, label.t);
    let stream_node = chain[center_slot];
    let center_t = graph.nodes[stream_node.0].t;
    let px_per_step = graph.step * graph.scale.px_per_unit;
    let k = params.wing_count(&label.text, label.size, px_per_step) as isize;
    let box_height = params.label_box_height(label.size);
    let owner = Owner::Label(label_index);

    let mut slots: Vec<(f64, Option<NodeId>, bool)> = Vec::new();
    match label.kind {
        LabelType::In | LabelType::On => {
            for offset in -k..=k {
                let slot = center_slot as isize + offset;
                if slot < 0 || slot >= chain.len() as isize {
                    continue;
                }
                let host = chain[slot as usize];
                slots.push((graph.nodes[host.0].t, Some(host), offset == 0));
            }
        }
        LabelType::Out => {
            let (lo, hi) = (graph.scale.t_min, graph.scale.t_max);
            let eps = graph.step * 1e-9;
            for offset in -k..=k {
                let t = if offset == 0 {
                    center_t
                } else {
                    center_t + offset as f64 * graph.step
                };
                if t < lo - eps || t > hi + eps {
                    continue;
                }
                slots.push((t, None, offset == 0));
            }
        }
    }

    let mut nodes = Vec::with_capacity(slots.len());
    let mut center = None;
    for (t, host, is_center) in slots {
        let size = match host {
            Some(h) => box_height.min(graph.nodes[h.0].size),
            None => box_height,
        };
        let kind = if is_center {
            NodeKind::LabelCenter
        } else {
            NodeKind::LabelWing
        };
        let id = add_node(graph, kind, owner, key.to_string(), t, size, host);
        if is_center {
            center = Some(id);
        }
        nodes.push(id);
    }
    for w in nodes.windows(2) {
        graph.edges.push(Edge {
            src: w[0],
            dst: w[1],
            class: EdgeClass::Label,
            attach: false,
        });
    }
    let center = center.expect("the center slot always exists");
    if label.kind == LabelType::Out {
        graph.edges.push(Edge {
            src: center,
            dst: stream_node,
            class: EdgeClass::Label,
            attach: true,
        });
    }
    let chain = LabelChain {
        label: label_index,
        center,
        nodes,
        stream_node,
    };
    graph.label_chains.push(chain.clone());
    chain
}

fn expand_link(
    graph: &mut LayoutGraph,
    spec: &ChartSpec,
    link_index: usize,
    link: &LinkDef,
    key: &str,
    params: &GraphParams,
    grid: &Grid,
) -> Result<LinkChain, BuildError> {
    let from = spec.stream_index(&link.from).expect("validated link source");
    let to = spec.stream_index(&link.to).expect("validated link target");
    let from_chain = graph.stream_nodes[from].clone();
    let to_chain = graph.stream_nodes[to].clone();
    let src = from_chain[nearest_index(graph, &from_chain, link.t0)];
    let src_t = graph.nodes[src.0].t;

    let end = grid.canonical(link.effective_end(graph.step));
    let mut dst = to_chain[nearest_index(graph, &to_chain, end)];
    if graph.nodes[dst.0].t <= src_t {
        dst = match to_chain.iter().copied().find(|n| graph.nodes[n.0].t > src_t) {
            Some(n) => n,
            None => {
                return Err(BuildError::Invalid(vec![Violation {
                    kind: model::ViolationKind::LinkDirection,
                    table: model::Table::Links,
                    row: link_index + 1,
                    message: format!(
                        "link `{}`->`{}`: target has no timepoint after {src_t}",
                        link.from, link.to
                    ),
                }]))
            }
        };
    }
    let dst_t = graph.nodes[dst.0].t;
    let owner = Owner::Link(link_index);
    let ribbon = params.link_width.min(graph.nodes[src.0].size);

    let mut nodes = vec![src];
    let mut i = 1;
    loop {
        let t = grid.canonical(src_t + i as f64 * graph.step);
        if t >= dst_t - grid.eps() {
            break;
        }
        let id = add_node(graph, NodeKind::LinkIntermediate, owner, key.to_string(), t, ribbon, None);
        nodes.push(id);
        i += 1;
    }

    let anchor = if link.merge {
        nodes.push(dst);
        None
    } else {
        let target = graph.nodes[dst.0].size;
        let lo = params.anchor_min_px;
        let size = if target - lo >= lo {
            (params.anchor_fraction * target).clamp(lo, target - lo)
        } else {
            target / 2.0
        };
        let id = add_node(graph, NodeKind::LinkAnchor, owner, key.to_string(), dst_t, size, Some(dst));
        nodes.push(id);
        Some(id)
    };
    for w in nodes.windows(2) {
        graph.edges.push(Edge {
            src: w[0],
            dst: w[1],
            class: EdgeClass::Link,
            attach: false,
        });
    }
    let chain = LinkChain {
        link: link_index,
        nodes,
        anchor,
    };
    graph.link_chains.push(chain.clone());
    Ok(chain)
}

/// True iff the stream and link edges admit a topological order.
pub fn check_acyclic(graph: &LayoutGraph) -> bool {
    let n = graph.nodes.len();
    let mut indegree = vec![0usize; n];
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
    for e in &graph.edges {
        if e.class == EdgeClass::Label {
            continue;
        }
        if e.src.0 >= n || e.dst.0 >= n {
            return false;
        }
        out[e.src.0].push(e.dst.0);
        indegree[e.dst.0] += 1;
    }
    let mut queue: VecDeque<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
    let mut visited = 0;
    while let Some(i) = queue.pop_front() {
        visited += 1;
        for &j in &out[i] {
            indegree[j] -= 1;
            if indegree[j] == 0 {
                queue.push_back(j);
            }
        }
    }
    visited == n
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SizePoint;

    fn stream(id: &str, t0: f64, t1: f64, sizes: Vec<(f64, f64)>) -> StreamDef {
        StreamDef {
            id: id.into(),
            t0,
            t1,
            color: "red".into(),
            sizes: sizes.into_iter().map(|(t, size)| SizePoint { t, size }).collect(),
            parent: None,
        }
    }

    #[test]
    fn size_interpolates_between_default_and_knots() {
        let b = stream("B", 3.0, 9.0, vec![(5.0, 10.0)]);
        assert_eq!(size_at(&b, 5.0, 5.0), Some(10.0));
        assert_eq!(size_at(&b, 3.0, 5.0), Some(5.0));
        assert_eq!(size_at(&b, 9.0, 5.0), Some(5.0));
        assert!((size_at(&b, 4.0, 5.0).unwrap() - 7.5).abs() < 1e-12);
        assert_eq!(size_at(&b, 2.9, 5.0), None);
        assert_eq!(size_at(&b, 9.5, 5.0), None);
    }

    #[test]
    fn size_without_entries_is_constant() {
        let a = stream("A", 2.0, 6.0, vec![]);
        for t in [2.0, 3.3, 6.0] {
            assert_eq!(size_at(&a, t, 5.0), Some(5.0));
        }
        let dot = stream("D", 4.0, 4.0, vec![]);
        assert_eq!(size_at(&dot, 4.0, 5.0), Some(5.0));
    }

    #[test]
    fn explicit_endpoint_size_overrides_default() {
        let s = stream("S", 0.0, 4.0, vec![(0.0, 8.0)]);
        assert_eq!(size_at(&s, 0.0, 5.0), Some(8.0));
        assert_eq!(size_at(&s, 2.0, 5.0), Some(6.5));
    }

    #[test]
    fn grid_points_are_inclusive() {
        let g = Grid { origin: 2.0, step: 1.0 };
        assert_eq!(g.points(3.0, 9.0), vec![3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0]);
        assert_eq!(g.points(3.5, 4.5), vec![4.0]);
        let g = Grid { origin: 0.0, step: 0.1 };
        assert_eq!(g.points(0.0, 0.3).len(), 4);
    }

    #[test]
    fn single_point_stream_has_one_node() {
        let spec = ChartSpec {
            streams: vec![stream("X", 4.0, 4.0, vec![])],
            ..Default::default()
        };
        let g = build_graph(&spec, &GraphParams::default(), Canvas::default()).unwrap();
        assert_eq!(g.stream_nodes[0].len(), 1);
        assert!(g.edges.is_empty());
    }

    #[test]
    fn off_grid_endpoint_gets_a_node() {
        let spec = ChartSpec {
            streams: vec![stream("A", 0.0, 10.0, vec![]), stream("B", 1.0, 3.5, vec![])],
            ..Default::default()
        };
        let g = build_graph(&spec, &GraphParams::default(), Canvas::default()).unwrap();
        let ts: Vec<f64> = g.stream_nodes[1].iter().map(|&n| g.node(n).t).collect();
        assert_eq!(ts, vec![1.0, 2.0, 3.0, 3.5]);
    }

    #[test]
    fn parents_get_nodes_at_nested_endpoints() {
        let mut child = stream("C", 1.5, 3.5, vec![]);
        child.parent = Some("P".into());
        let spec = ChartSpec {
            streams: vec![stream("P", 0.0, 6.0, vec![]), child],
            ..Default::default()
        };
        let params = GraphParams {
            step: 2.0,
            ..Default::default()
        };
        let g = build_graph(&spec, &params, Canvas::default()).unwrap();
        for &n in &g.stream_nodes[1] {
            let node = g.node(n);
            let parent = g.node(node.parent.unwrap());
            assert_eq!(parent.t, node.t);
            assert_eq!(parent.owner, Owner::Stream(0));
        }
    }

    #[test]
    fn wing_count_formula() {
        let p = GraphParams::default();
        // 12 chars * 0.6 * 3em * 16px = 345.6 px, half is 172.8, over 50 px steps
        assert!((p.estimated_text_width("inside label", 3.0) - 345.6).abs() < 1e-9);
        assert_eq!(p.wing_count("inside label", 3.0, 50.0), 4);
        assert_eq!(p.wing_count("", 3.0, 50.0), 0);
    }

    #[test]
    fn injected_back_edge_is_cyclic() {
        let spec = ChartSpec {
            streams: vec![stream("A", 0.0, 3.0, vec![])],
            ..Default::default()
        };
        let mut g = build_graph(&spec, &GraphParams::default(), Canvas::default()).unwrap();
        assert!(check_acyclic(&g));
        let (first, last) = (g.stream_nodes[0][0], *g.stream_nodes[0].last().unwrap());
        g.edges.push(Edge {
            src: last,
            dst: first,
            class: EdgeClass::Link,
            attach: false,
        });
        assert!(!check_acyclic(&g));
    }

    #[test]
    fn empty_graph_is_acyclic() {
        let g = build_graph(&ChartSpec::default(), &GraphParams::default(), Canvas::default()).unwrap();
        assert!(g.is_empty());
        assert!(check_acyclic(&g));
    }

    #[test]
    fn rejects_bad_step() {
        let err = build_graph(
            &ChartSpec::default(),
            &GraphParams {
                step: 0.0,
                ..Default::default()
            },
            Canvas::default(),
        )
        .unwrap_err();
        assert!(matches!(err, BuildError::InvalidStep(_)));
    }
}
