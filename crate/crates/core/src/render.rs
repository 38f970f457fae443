//! The single CSV-to-SVG pipeline shared by the CLI and the service.

use serde::Serialize;

use crate::config::Config;
use crate::geometry::build_scene;
use crate::graph::{build_graph, BuildError, LayoutGraph};
use crate::layout::{init_positions, RunStats, Simulation, SimulationState};
use crate::model::ChartSpec;
use crate::svg::{emit_svg, SvgDocument};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RenderStats {
    pub nodes: usize,
    pub edges: usize,
    pub ticks: usize,
}

#[derive(Debug, Clone)]
pub struct Rendered {
    pub svg: SvgDocument,
    pub graph: LayoutGraph,
    pub state: SimulationState,
    pub stats: RenderStats,
}

/// Builds the graph and runs a full layout from fresh initial positions.
pub fn layout(
    spec: &ChartSpec,
    config: &Config,
) -> Result<(LayoutGraph, SimulationState, RunStats), BuildError> {
    let graph = build_graph(spec, &config.graph, config.canvas)?;
    let mut state = init_positions(&graph, &config.force, config.canvas, config.seed());
    let stats = Simulation::new(&graph, &config.force, config.canvas)
        .run(&mut state, config.force.max_ticks);
    Ok((graph, state, stats))
}

/// Emits the SVG of an already laid-out chart.
pub fn draw(
    spec: &ChartSpec,
    graph: &LayoutGraph,
    state: &SimulationState,
    config: &Config,
) -> SvgDocument {
    let scene = build_scene(
        spec,
        graph,
        state,
        config.canvas,
        &config.graph,
        &config.scene,
        &config.style,
    );
    emit_svg(&scene, &config.style)
}

pub fn render(spec: &ChartSpec, config: &Config) -> Result<Rendered, BuildError> {
    let (graph, state, run) = layout(spec, config)?;
    let svg = draw(spec, &graph, &state, config);
    let stats = RenderStats {
        nodes: graph.nodes.len(),
        edges: graph.edges.len(),
        ticks: run.ticks,
    };
    Ok(Rendered {
        svg,
        graph,
        state,
        stats,
    })
}
