//! Constrained force simulation over node y-positions.
//!
//! Node x-positions are a fixed function of time and never touched here. Each
//! tick accumulates gravity, pairwise repulsion between nearby nodes and
//! per-class springs along edges, integrates velocities with decay, and then
//! projects every node back into the canvas and every nested node back into
//! its container.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Canvas, EdgeClass, LayoutGraph, NodeId, NodeKind, Owner};

/// Spring stiffness per edge class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Stiffness {
    pub stream: f64,
    pub label: f64,
    pub link: f64,
}

impl Default for Stiffness {
    fn default() -> Self {
        Stiffness {
            stream: 1.0,
            label: 0.5,
            link: 0.1,
        }
    }
}

impl Stiffness {
    pub fn of(&self, class: EdgeClass) -> f64 {
        match class {
            EdgeClass::Stream => self.stream,
            EdgeClass::Label => self.label,
            EdgeClass::Link => self.link,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "camelCase")]
pub struct ForceParams {
    pub gravity_strength: f64,
    pub repulsion_strength: f64,
    /// Node pairs whose vertical gap exceeds this do not repel, px.
    pub repulsion_cutoff: f64,
    /// Softening added to the gap before the inverse square, px.
    pub repulsion_min_distance: f64,
    pub spring_stiffness: Stiffness,
    /// Gap kept between an outside label and its stream, px.
    pub spring_rest_length: f64,
    /// Fraction of velocity lost per tick.
    pub velocity_decay: f64,
    pub alpha_start: f64,
    /// Per-tick multiplicative decay: `alpha *= 1 - alpha_decay`.
    pub alpha_decay: f64,
    pub alpha_min: f64,
    pub max_ticks: usize,
    pub padding: f64,
    /// Temperature a relayout restarts from after an edit.
    pub reheat_alpha: f64,
    /// Tick budget of a relayout after an edit.
    pub relayout_max_ticks: usize,
}

impl Default for ForceParams {
    fn default() -> Self {
        ForceParams {
            gravity_strength: 0.05,
            repulsion_strength: 30.0 * 30.0,
            repulsion_cutoff: 150.0,
            repulsion_min_distance: 10.0,
            spring_stiffness: Stiffness::default(),
            spring_rest_length: 20.0,
            velocity_decay: 0.6,
            alpha_start: 1.0,
            alpha_decay: 1.0 - 0.001f64.powf(1.0 / 300.0),
            alpha_min: 0.001,
            max_ticks: 300,
            padding: 10.0,
            reheat_alpha: 0.3,
            relayout_max_ticks: 120,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid force parameters: {0}")]
pub struct ParamError(pub String);

impl ForceParams {
    pub fn validate(&self) -> Result<(), ParamError> {
        let strengths = [
            ("gravityStrength", self.gravity_strength),
            ("repulsionStrength", self.repulsion_strength),
            ("repulsionCutoff", self.repulsion_cutoff),
            ("repulsionMinDistance", self.repulsion_min_distance),
            ("springStiffness.stream", self.spring_stiffness.stream),
            ("springStiffness.label", self.spring_stiffness.label),
            ("springStiffness.link", self.spring_stiffness.link),
            ("springRestLength", self.spring_rest_length),
            ("padding", self.padding),
        ];
        for (name, v) in strengths {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(ParamError(format!("{name} must be a finite value >= 0, got {v}")));
            }
        }
        if !(self.velocity_decay > 0.0 && self.velocity_decay < 1.0) {
            return Err(ParamError(format!(
                "velocityDecay must lie in (0, 1), got {}",
                self.velocity_decay
            )));
        }
        if !(self.alpha_min < self.alpha_start) {
            return Err(ParamError("alphaMin must be below alphaStart".into()));
        }
        if !(self.alpha_decay >= 0.0 && self.alpha_decay < 1.0) {
            return Err(ParamError(format!("alphaDecay must lie in [0, 1), got {}", self.alpha_decay)));
        }
        Ok(())
    }
}

/// Mutable simulation state: one y-position and velocity per node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationState {
    pub y: Vec<f64>,
    pub vy: Vec<f64>,
    pub alpha: f64,
    pub tick_count: usize,
    pub seed: u64,
}

impl SimulationState {
    pub fn kinetic_energy(&self) -> f64 {
        self.vy.iter().map(|v| 0.5 * v * v).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunStats {
    pub ticks: usize,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Direction (+1 or -1) in which node `a` is pushed away from a coincident node `b`.
fn tie_break(seed: u64, a: NodeId, b: NodeId) -> f64 {
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    let h = splitmix64(seed ^ splitmix64((lo.0 as u64) << 32 | hi.0 as u64));
    let lo_sign = if h & 1 == 0 { 1.0 } else { -1.0 };
    if a == lo {
        lo_sign
    } else {
        -lo_sign
    }
}

/// Per-graph lookup tables reused across ticks.
struct Prepared {
    order: Vec<NodeId>,
    /// Nodes grouped by timepoint, timepoints ascending.
    buckets: Vec<Vec<usize>>,
    /// Repulsion only acts between nodes of the same group: the owner of the
    /// container they are nested in, or none for top-level nodes.
    group: Vec<Option<Owner>>,
    degree: Vec<usize>,
    max_size: f64,
}

impl Prepared {
    fn new(graph: &LayoutGraph) -> Self {
        let times = graph.times();
        let mut buckets = vec![Vec::new(); times.len()];
        for node in &graph.nodes {
            let b = times
                .binary_search_by(|t| t.total_cmp(&node.t))
                .expect("node time is one of the graph times");
            buckets[b].push(node.id.0);
        }
        let group = graph
            .nodes
            .iter()
            .map(|n| n.parent.map(|p| graph.node(p).owner))
            .collect();
        let mut degree = vec![0; graph.nodes.len()];
        for e in &graph.edges {
            degree[e.src.0] += 1;
            degree[e.dst.0] += 1;
        }
        let max_size = graph.nodes.iter().map(|n| n.size).fold(0.0, f64::max);
        Prepared {
            order: graph.nesting_order(),
            buckets,
            group,
            degree,
            max_size,
        }
    }
}

/// Top-level nodes are stacked per timepoint in declaration order: the stream
/// a node belongs to decides, then streams before labels before links.
fn stacking_key(graph: &LayoutGraph, id: NodeId) -> (usize, u8, usize) {
    let node = graph.node(id);
    let stream_of = |n: NodeId| match graph.node(n).owner {
        Owner::Stream(s) => s,
        _ => usize::MAX,
    };
    match node.owner {
        Owner::Stream(s) => (s, 0, id.0),
        Owner::Label(l) => {
            let chain = graph.label_chains.iter().find(|c| c.label == l);
            (chain.map_or(usize::MAX, |c| stream_of(c.stream_node)), 1, id.0)
        }
        Owner::Link(k) => {
            let chain = graph.link_chains.iter().find(|c| c.link == k);
            (chain.map_or(usize::MAX, |c| stream_of(c.nodes[0])), 2, id.0)
        }
    }
}

/// Initial positions: per timepoint, top-level nodes stacked top to bottom in
/// declaration order and centered on the canvas; nested nodes at their
/// container's center.
pub fn init_positions(
    graph: &LayoutGraph,
    params: &ForceParams,
    canvas: Canvas,
    seed: u64,
) -> SimulationState {
    let n = graph.nodes.len();
    let mut y = vec![canvas.height / 2.0; n];
    let prepared = Prepared::new(graph);
    for bucket in &prepared.buckets {
        let mut top: Vec<NodeId> = bucket
            .iter()
            .map(|&i| NodeId(i))
            .filter(|&id| graph.node(id).parent.is_none())
            .collect();
        top.sort_by_key(|&id| stacking_key(graph, id));
        let total: f64 = top.iter().map(|&id| graph.node(id).size).sum::<f64>()
            + params.padding * top.len().saturating_sub(1) as f64;
        let mut cursor = canvas.height / 2.0 - total / 2.0;
        for id in top {
            let size = graph.node(id).size;
            y[id.0] = cursor + size / 2.0;
            cursor += size + params.padding;
        }
    }
    for &id in &prepared.order {
        if let Some(p) = graph.node(id).parent {
            y[id.0] = y[p.0];
        }
    }
    let mut state = SimulationState {
        y,
        vy: vec![0.0; n],
        alpha: params.alpha_start,
        tick_count: 0,
        seed,
    };
    project(graph, &prepared.order, params, canvas, &mut state);
    state
}

/// Clamps nodes into the canvas and nested nodes into their containers,
/// parents first. Velocity is zeroed on nodes that were moved.
fn project(
    graph: &LayoutGraph,
    order: &[NodeId],
    params: &ForceParams,
    canvas: Canvas,
    state: &mut SimulationState,
) {
    for &id in order {
        let node = graph.node(id);
        let half = node.size / 2.0;
        let (lo, hi) = match node.parent {
            None => (half + params.padding, canvas.height - half - params.padding),
            Some(p) => {
                let py = state.y[p.0];
                let phalf = graph.node(p).size / 2.0;
                (py - phalf + half, py + phalf - half)
            }
        };
        let y = state.y[id.0];
        let clamped = if lo > hi {
            (lo + hi) / 2.0
        } else {
            y.clamp(lo, hi)
        };
        if clamped != y {
            state.y[id.0] = clamped;
            state.vy[id.0] = 0.0;
        }
    }
}

/// A force simulation bound to one graph.
pub struct Simulation<'g> {
    graph: &'g LayoutGraph,
    params: ForceParams,
    canvas: Canvas,
    prepared: Prepared,
    force: Vec<f64>,
}

impl<'g> Simulation<'g> {
    pub fn new(graph: &'g LayoutGraph, params: &ForceParams, canvas: Canvas) -> Self {
        Simulation {
            graph,
            params: params.clone(),
            canvas,
            prepared: Prepared::new(graph),
            force: vec![0.0; graph.nodes.len()],
        }
    }

    pub fn tick(&mut self, state: &mut SimulationState) {
        let graph = self.graph;
        let p = self.params.clone();
        let alpha = state.alpha;
        let n = graph.nodes.len();
        self.force.iter_mut().for_each(|f| *f = 0.0);
        let force = &mut self.force;

        // gravity: toward the canvas middle, or the container's center when nested
        if p.gravity_strength > 0.0 {
            let mid = self.canvas.height / 2.0;
            for node in &graph.nodes {
                let target = node.parent.map_or(mid, |pid| state.y[pid.0]);
                force[node.id.0] += (target - state.y[node.id.0]) * p.gravity_strength * alpha;
            }
        }

        if p.repulsion_strength > 0.0 {
            self.accumulate_repulsion(state);
        }
        let force = &mut self.force;

        for e in &graph.edges {
            let k = p.spring_stiffness.of(e.class);
            if k == 0.0 {
                continue;
            }
            let (a, b) = (e.src.0, e.dst.0);
            let diff = if e.attach {
                let rest = (graph.nodes[a].size + graph.nodes[b].size) / 2.0 + p.spring_rest_length;
                let cur = state.y[a] - state.y[b];
                let side = if cur > 0.0 { 1.0 } else { -1.0 };
                -(cur - side * rest)
            } else {
                state.y[b] - state.y[a]
            };
            let wa = 0.5 / self.prepared.degree[a] as f64;
            let wb = 0.5 / self.prepared.degree[b] as f64;
            force[a] += k * diff * wa * alpha;
            force[b] -= k * diff * wb * alpha;
        }

        // semi-implicit Euler; nested nodes also follow their container
        let retain = 1.0 - p.velocity_decay;
        let old_y = state.y.clone();
        for i in 0..n {
            state.vy[i] = (state.vy[i] + force[i]) * retain;
            state.y[i] += state.vy[i];
        }
        for &id in &self.prepared.order {
            if let Some(parent) = graph.node(id).parent {
                state.y[id.0] += state.y[parent.0] - old_y[parent.0];
            }
        }

        project(graph, &self.prepared.order, &p, self.canvas, state);
        state.alpha *= 1.0 - p.alpha_decay;
        state.tick_count += 1;
    }

    fn accumulate_repulsion(&mut self, state: &SimulationState) {
        let graph = self.graph;
        let p = &self.params;
        let reach = p.repulsion_cutoff + self.prepared.max_size;
        let alpha = state.alpha;
        let sorted: Vec<Vec<usize>> = self
            .prepared
            .buckets
            .iter()
            .map(|b| {
                let mut b = b.clone();
                b.sort_by(|&i, &j| state.y[i].total_cmp(&state.y[j]).then(i.cmp(&j)));
                b
            })
            .collect();
        let force = &mut self.force;
        let mut pair = |i: usize, j: usize| {
            let (ni, nj) = (&graph.nodes[i], &graph.nodes[j]);
            if ni.owner == nj.owner || self.prepared.group[i] != self.prepared.group[j] {
                return;
            }
            let dy = state.y[i] - state.y[j];
            let gap = dy.abs() - (ni.size + nj.size) / 2.0;
            if gap > p.repulsion_cutoff {
                return;
            }
            let dx = ni.x - nj.x;
            let soft = gap.max(0.0) + p.repulsion_min_distance;
            let magnitude = p.repulsion_strength / (soft * soft + dx * dx) * alpha;
            let dir = if dy > 0.0 {
                1.0
            } else if dy < 0.0 {
                -1.0
            } else if dx == 0.0 {
                tie_break(state.seed, ni.id, nj.id)
            } else {
                return;
            };
            force[i] += dir * magnitude;
            force[j] -= dir * magnitude;
        };
        for b in 0..sorted.len() {
            let here = &sorted[b];
            for a in 0..here.len() {
                let i = here[a];
                for &j in &here[a + 1..] {
                    if state.y[j] - state.y[i] > reach {
                        break;
                    }
                    pair(i, j);
                }
            }
            if let Some(next) = sorted.get(b + 1) {
                for &i in here {
                    let lo = state.y[i] - reach;
                    let start = next.partition_point(|&j| state.y[j] < lo);
                    for &j in &next[start..] {
                        if state.y[j] > state.y[i] + reach {
                            break;
                        }
                        pair(i, j);
                    }
                }
            }
        }
    }

    /// Ticks until alpha falls to `alpha_min` or `max_ticks` is reached.
    pub fn run(&mut self, state: &mut SimulationState, max_ticks: usize) -> RunStats {
        let start = state.tick_count;
        if self.graph.is_empty() {
            return RunStats { ticks: 0 };
        }
        while state.alpha > self.params.alpha_min && state.tick_count - start < max_ticks {
            self.tick(state);
        }
        RunStats {
            ticks: state.tick_count - start,
        }
    }
}

/// Advances the simulation by one tick.
pub fn tick(state: &mut SimulationState, graph: &LayoutGraph, params: &ForceParams, canvas: Canvas) {
    Simulation::new(graph, params, canvas).tick(state);
}

/// Runs the simulation to completion from `state`.
pub fn run(
    state: &mut SimulationState,
    graph: &LayoutGraph,
    params: &ForceParams,
    canvas: Canvas,
) -> RunStats {
    Simulation::new(graph, params, canvas).run(state, params.max_ticks)
}

/// Warm start for an edited graph.
///
/// Nodes that survive the edit (same owner key, kind and time) keep their y.
/// New nodes start at the nearest surviving node of their own chain, else at
/// their container's position, else at their fresh stacking position.
/// The returned state is reheated to `reheat_alpha`.
pub fn incremental_relayout(
    old_state: &SimulationState,
    old_graph: &LayoutGraph,
    new_graph: &LayoutGraph,
    params: &ForceParams,
    canvas: Canvas,
) -> SimulationState {
    let tolerance = new_graph.step.min(old_graph.step) * 1e-9;
    let mut survivors: HashMap<(&str, NodeKind), Vec<(f64, usize)>> = HashMap::new();
    for node in &old_graph.nodes {
        survivors
            .entry((node.key.as_str(), node.kind))
            .or_default()
            .push((node.t, node.id.0));
    }
    let n = new_graph.nodes.len();
    let mut y: Vec<Option<f64>> = vec![None; n];
    let mut vy = vec![0.0; n];
    for node in &new_graph.nodes {
        if let Some(candidates) = survivors.get(&(node.key.as_str(), node.kind)) {
            if let Some(&(_, old)) = candidates.iter().find(|(t, _)| (t - node.t).abs() <= tolerance) {
                y[node.id.0] = Some(old_state.y[old]);
                vy[node.id.0] = 0.0;
            }
        }
    }

    let mut chains: Vec<&[NodeId]> = Vec::new();
    chains.extend(new_graph.stream_nodes.iter().map(Vec::as_slice));
    chains.extend(new_graph.label_chains.iter().map(|c| c.nodes.as_slice()));
    chains.extend(new_graph.link_chains.iter().map(|c| c.nodes.as_slice()));
    let mut seeded: Vec<Option<f64>> = y.clone();
    for chain in chains {
        for (pos, id) in chain.iter().enumerate() {
            if y[id.0].is_some() || seeded[id.0].is_some() {
                continue;
            }
            let nearest = chain
                .iter()
                .enumerate()
                .filter_map(|(q, other)| y[other.0].map(|v| (pos.abs_diff(q), q, v)))
                .min_by_key(|&(d, q, _)| (d, q));
            if let Some((_, _, v)) = nearest {
                seeded[id.0] = Some(v);
            }
        }
    }

    let fresh = init_positions(new_graph, params, canvas, old_state.seed);
    let mut positions = vec![0.0; n];
    for id in new_graph.nesting_order() {
        let node = new_graph.node(id);
        positions[id.0] = match seeded[id.0] {
            Some(v) => v,
            None => match node.parent {
                Some(p) => positions[p.0],
                None => fresh.y[id.0],
            },
        };
    }
    SimulationState {
        y: positions,
        vy,
        alpha: params.reheat_alpha,
        tick_count: 0,
        seed: old_state.seed,
    }
}

/// A broken layout constraint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ConstraintViolation {
    OutsideCanvas { node: NodeId, top: f64, bottom: f64 },
    OutsideParent { node: NodeId, parent: NodeId, excess: f64 },
}

/// Checks the boundary and containment constraints of a layout.
pub fn check_constraints(
    graph: &LayoutGraph,
    state: &SimulationState,
    params: &ForceParams,
    canvas: Canvas,
    tolerance: f64,
) -> Vec<ConstraintViolation> {
    let mut out = Vec::new();
    for node in &graph.nodes {
        let y = state.y[node.id.0];
        let (top, bottom) = (y - node.size / 2.0, y + node.size / 2.0);
        if top < params.padding - tolerance || bottom > canvas.height - params.padding + tolerance {
            out.push(ConstraintViolation::OutsideCanvas {
                node: node.id,
                top,
                bottom,
            });
        }
        if let Some(p) = node.parent {
            let py = state.y[p.0];
            let phalf = graph.node(p).size / 2.0;
            let excess = (py - phalf - top).max(bottom - (py + phalf));
            if excess > tolerance {
                out.push(ConstraintViolation::OutsideParent {
                    node: node.id,
                    parent: p,
                    excess,
                });
            }
        }
    }
    out
}

/// Sum of squared vertical steps along a stream's node chain.
pub fn wiggle_energy(graph: &LayoutGraph, state: &SimulationState, stream: usize) -> f64 {
    graph.stream_nodes[stream]
        .windows(2)
        .map(|w| {
            let d = state.y[w[1].0] - state.y[w[0].0];
            d * d
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_graph, GraphParams};
    use crate::model::{ChartSpec, StreamDef};

    fn stream(id: &str, t0: f64, t1: f64) -> StreamDef {
        StreamDef {
            id: id.into(),
            t0,
            t1,
            color: "red".into(),
            sizes: vec![],
            parent: None,
        }
    }

    fn graph_of(streams: Vec<StreamDef>) -> LayoutGraph {
        let spec = ChartSpec {
            streams,
            ..Default::default()
        };
        build_graph(&spec, &GraphParams::default(), Canvas::default()).unwrap()
    }

    fn zero_forces() -> ForceParams {
        ForceParams {
            gravity_strength: 0.0,
            repulsion_strength: 0.0,
            spring_stiffness: Stiffness {
                stream: 0.0,
                label: 0.0,
                link: 0.0,
            },
            ..Default::default()
        }
    }

    #[test]
    fn default_params_are_valid() {
        ForceParams::default().validate().unwrap();
        let p = ForceParams::default();
        let after = p.alpha_start * (1.0 - p.alpha_decay).powi(300);
        assert!((after - 0.001).abs() < 1e-9);
    }

    #[test]
    fn invalid_params_rejected() {
        let mut p = ForceParams::default();
        p.velocity_decay = 1.0;
        assert!(p.validate().is_err());
        let mut p = ForceParams::default();
        p.gravity_strength = -1.0;
        assert!(p.validate().is_err());
        let mut p = ForceParams::default();
        p.alpha_min = 2.0;
        assert!(p.validate().is_err());
    }

    #[test]
    fn single_stream_starts_centered() {
        let g = graph_of(vec![stream("A", 0.0, 4.0)]);
        let s = init_positions(&g, &ForceParams::default(), Canvas::default(), 1);
        assert!(s.y.iter().all(|&y| y == 400.0));
    }

    #[test]
    fn identical_streams_start_symmetric() {
        let g = graph_of(vec![stream("A", 0.0, 4.0), stream("B", 0.0, 4.0)]);
        let s = init_positions(&g, &ForceParams::default(), Canvas::default(), 1);
        for (&a, &b) in g.stream_nodes[0].iter().zip(&g.stream_nodes[1]) {
            assert!(s.y[a.0] < s.y[b.0]);
            assert!((400.0 - s.y[a.0] - (s.y[b.0] - 400.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn coincident_nodes_separate() {
        let g = graph_of(vec![stream("A", 0.0, 0.0), stream("B", 0.0, 0.0)]);
        let params = ForceParams {
            gravity_strength: 0.0,
            ..Default::default()
        };
        let mut s = init_positions(&g, &params, Canvas::default(), 7);
        s.y = vec![400.0, 400.0];
        tick(&mut s, &g, &params, Canvas::default());
        assert!((s.y[0] - s.y[1]).abs() > 0.0);
    }

    #[test]
    fn tie_break_is_antisymmetric() {
        for seed in 0..20 {
            let (a, b) = (NodeId(3), NodeId(9));
            assert_eq!(tie_break(seed, a, b), -tie_break(seed, b, a));
        }
    }

    #[test]
    fn zero_forces_leave_positions() {
        let g = graph_of(vec![stream("A", 0.0, 4.0), stream("B", 1.0, 3.0)]);
        let params = zero_forces();
        let mut s = init_positions(&g, &params, Canvas::default(), 1);
        let before = s.y.clone();
        for _ in 0..10 {
            tick(&mut s, &g, &params, Canvas::default());
        }
        assert_eq!(s.y, before);
    }

    #[test]
    fn damping_never_adds_energy() {
        let g = graph_of(vec![stream("A", 0.0, 4.0), stream("B", 1.0, 3.0)]);
        let params = zero_forces();
        let mut s = init_positions(&g, &params, Canvas::default(), 1);
        s.vy = (0..s.vy.len()).map(|i| (i as f64 - 3.0) * 2.0).collect();
        let mut energy = s.kinetic_energy();
        for _ in 0..20 {
            tick(&mut s, &g, &params, Canvas::default());
            let e = s.kinetic_energy();
            assert!(e <= energy);
            energy = e;
        }
    }

    #[test]
    fn child_is_pulled_into_parent() {
        let mut child = stream("C", 1.0, 3.0);
        child.parent = Some("P".into());
        let g = graph_of(vec![stream("P", 0.0, 4.0), child]);
        let params = ForceParams::default();
        let mut s = init_positions(&g, &params, Canvas::default(), 1);
        for &c in &g.stream_nodes[1] {
            s.y[c.0] = 50.0;
        }
        tick(&mut s, &g, &params, Canvas::default());
        assert!(check_constraints(&g, &s, &params, Canvas::default(), 1e-6).is_empty());
    }

    #[test]
    fn empty_graph_terminates_immediately() {
        let g = graph_of(vec![]);
        let mut s = init_positions(&g, &ForceParams::default(), Canvas::default(), 1);
        let stats = run(&mut s, &g, &ForceParams::default(), Canvas::default());
        assert_eq!(stats.ticks, 0);
    }

    #[test]
    fn noop_relayout_keeps_positions() {
        let g = graph_of(vec![stream("A", 0.0, 4.0), stream("B", 1.0, 3.0)]);
        let params = ForceParams::default();
        let mut s = init_positions(&g, &params, Canvas::default(), 1);
        run(&mut s, &g, &params, Canvas::default());
        let warm = incremental_relayout(&s, &g, &g, &params, Canvas::default());
        assert_eq!(warm.y, s.y);
        assert_eq!(warm.alpha, params.reheat_alpha);
    }
}
