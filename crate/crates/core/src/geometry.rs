//! Renderable shapes from a laid-out graph: stream outlines, link ribbons,
//! label boxes, connectors and text baselines.

use serde::{Deserialize, Serialize};

use crate::color::{nested_shade, Rgb};
use crate::graph::{Canvas, GraphParams, LayoutGraph, NodeId};
use crate::layout::SimulationState;
use crate::metrics;
use crate::model::{ChartSpec, LabelType};
use crate::style::{axis_blocks, AxisBlock, Lane, StyleParams};

/// Circle quadrant approximation constant for cubic arcs.
const KAPPA: f64 = 0.552_284_749_830_793_4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Segment {
    Line(Point),
    Cubic(Point, Point, Point),
}

impl Segment {
    pub fn end(&self) -> Point {
        match *self {
            Segment::Line(p) | Segment::Cubic(_, _, p) => p,
        }
    }
}

/// A path of lines and cubic Beziers, optionally closed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Path {
    pub start: Point,
    pub segments: Vec<Segment>,
    pub closed: bool,
}

fn cubic_at(p0: Point, c1: Point, c2: Point, p1: Point, t: f64) -> Point {
    let u = 1.0 - t;
    let (a, b, c, d) = (u * u * u, 3.0 * u * u * t, 3.0 * u * t * t, t * t * t);
    Point::new(
        a * p0.x + b * c1.x + c * c2.x + d * p1.x,
        a * p0.y + b * c1.y + c * c2.y + d * p1.y,
    )
}

/// Derivative of a cubic Bezier with respect to its parameter.
pub fn cubic_derivative(p0: Point, c1: Point, c2: Point, p1: Point, t: f64) -> Point {
    let u = 1.0 - t;
    let (a, b, c) = (3.0 * u * u, 6.0 * u * t, 3.0 * t * t);
    Point::new(
        a * (c1.x - p0.x) + b * (c2.x - c1.x) + c * (p1.x - c2.x),
        a * (c1.y - p0.y) + b * (c2.y - c1.y) + c * (p1.y - c2.y),
    )
}

impl Path {
    pub fn new(start: Point) -> Self {
        Path {
            start,
            segments: Vec::new(),
            closed: false,
        }
    }

    pub fn line_to(&mut self, p: Point) {
        self.segments.push(Segment::Line(p));
    }

    pub fn cubic_to(&mut self, c1: Point, c2: Point, p: Point) {
        self.segments.push(Segment::Cubic(c1, c2, p));
    }

    pub fn close(&mut self) {
        self.closed = true;
    }

    pub fn end(&self) -> Point {
        self.segments.last().map_or(self.start, Segment::end)
    }

    /// Points along the path, `per_segment` per segment plus the start point.
    /// A closed path also samples its closing line.
    pub fn sample(&self, per_segment: usize) -> Vec<Point> {
        let per_segment = per_segment.max(1);
        let mut out = vec![self.start];
        let mut cur = self.start;
        let mut segments = self.segments.clone();
        if self.closed && cur != self.end() {
            segments.push(Segment::Line(self.start));
        }
        for seg in &segments {
            for i in 1..=per_segment {
                let t = i as f64 / per_segment as f64;
                out.push(match *seg {
                    Segment::Line(p) => Point::new(cur.x + (p.x - cur.x) * t, cur.y + (p.y - cur.y) * t),
                    Segment::Cubic(c1, c2, p) => cubic_at(cur, c1, c2, p, t),
                });
            }
            cur = seg.end();
        }
        out
    }
}

/// Control points of the curve between two consecutive nodes.
///
/// Both controls sit at the horizontal midpoint, level with their endpoint, so
/// the curve leaves and enters horizontally and consecutive segments join with
/// matching tangents.
pub fn bezier_segment(p0: Point, p1: Point) -> (Point, Point) {
    let half = (p1.x - p0.x) / 2.0;
    (Point::new(p0.x + half, p0.y), Point::new(p1.x - half, p1.y))
}

/// One node of a band: center position and vertical extent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandNode {
    pub x: f64,
    pub y: f64,
    pub size: f64,
}

/// Appends Bezier segments through `points` to `path`.
fn curve_through(path: &mut Path, points: &[Point]) {
    for w in points.windows(2) {
        let (c1, c2) = bezier_segment(w[0], w[1]);
        path.cubic_to(c1, c2, w[1]);
    }
}

/// Closed outline of a band through the top and bottom extremes of its nodes.
///
/// A single node becomes a capsule `cap_width` wide.
pub fn stream_outline(nodes: &[BandNode], cap_width: f64) -> Path {
    match nodes {
        [] => Path::new(Point::new(0.0, 0.0)),
        [only] => capsule(only.x, only.y, cap_width, only.size),
        _ => {
            let top: Vec<Point> = nodes.iter().map(|n| Point::new(n.x, n.y - n.size / 2.0)).collect();
            let bottom: Vec<Point> = nodes
                .iter()
                .rev()
                .map(|n| Point::new(n.x, n.y + n.size / 2.0))
                .collect();
            let mut path = Path::new(top[0]);
            curve_through(&mut path, &top);
            path.line_to(bottom[0]);
            curve_through(&mut path, &bottom);
            path.close();
            path
        }
    }
}

/// A horizontal capsule (or ellipse, when narrower than tall) centered at `(x, y)`.
pub fn capsule(x: f64, y: f64, width: f64, height: f64) -> Path {
    let ry = height / 2.0;
    let rx = ry.min(width / 2.0);
    let (left, right) = (x - width / 2.0, x + width / 2.0);
    let (top, bottom) = (y - ry, y + ry);
    let (kx, ky) = (rx * KAPPA, ry * KAPPA);
    let mut p = Path::new(Point::new(left + rx, top));
    if right - rx > left + rx {
        p.line_to(Point::new(right - rx, top));
    }
    p.cubic_to(Point::new(right - rx + kx, top), Point::new(right, y - ky), Point::new(right, y));
    p.cubic_to(
        Point::new(right, y + ky),
        Point::new(right - rx + kx, bottom),
        Point::new(right - rx, bottom),
    );
    if right - rx > left + rx {
        p.line_to(Point::new(left + rx, bottom));
    }
    p.cubic_to(Point::new(left + rx - kx, bottom), Point::new(left, y + ky), Point::new(left, y));
    p.cubic_to(Point::new(left, y - ky), Point::new(left + rx - kx, top), Point::new(left + rx, top));
    p.close();
    p
}

/// Arc-length lookup over a sampled path.
struct ArcTable {
    points: Vec<Point>,
    lengths: Vec<f64>,
}

impl ArcTable {
    fn new(path: &Path, per_segment: usize) -> Self {
        let points = path.sample(per_segment);
        let mut lengths = Vec::with_capacity(points.len());
        let mut acc = 0.0;
        lengths.push(0.0);
        for w in points.windows(2) {
            acc += w[0].distance(w[1]);
            lengths.push(acc);
        }
        ArcTable { points, lengths }
    }

    fn total(&self) -> f64 {
        *self.lengths.last().unwrap_or(&0.0)
    }

    /// Point and tangent angle (degrees) at arc length `s`; extrapolates past either end.
    fn at(&self, s: f64) -> (Point, f64) {
        let n = self.points.len();
        if n < 2 {
            return (self.points.first().copied().unwrap_or(Point::new(0.0, 0.0)), 0.0);
        }
        let i = self.lengths.partition_point(|&l| l < s).clamp(1, n - 1);
        let (a, b) = (self.points[i - 1], self.points[i]);
        let seg = self.lengths[i] - self.lengths[i - 1];
        let f = if seg > 0.0 {
            (s - self.lengths[i - 1]) / seg
        } else {
            0.0
        };
        let p = Point::new(a.x + (b.x - a.x) * f, a.y + (b.y - a.y) * f);
        (p, (b.y - a.y).atan2(b.x - a.x).to_degrees())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LabelShape {
    #[default]
    Ellipse,
    Rect,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "camelCase")]
pub struct SceneParams {
    pub label_shape: LabelShape,
    /// Samples per Bezier segment for arc length and nearest-point queries.
    pub arc_samples: usize,
    /// Height of the time axis strip below the chart, px.
    pub axis_height: f64,
}

impl Default for SceneParams {
    fn default() -> Self {
        SceneParams {
            label_shape: LabelShape::Ellipse,
            arc_samples: 32,
            axis_height: 28.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StreamPath {
    pub stream: usize,
    pub id: String,
    pub outline: Path,
    pub depth: u32,
    pub fill: Rgb,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelBox {
    pub center: Point,
    pub width: f64,
    pub height: f64,
    pub shape: LabelShape,
    pub fill: Rgb,
    pub stroke: Rgb,
}

impl LabelBox {
    /// Point where the ray from the center toward `target` leaves the box.
    pub fn boundary_toward(&self, target: Point) -> Point {
        let (dx, dy) = (target.x - self.center.x, target.y - self.center.y);
        if dx == 0.0 && dy == 0.0 {
            return self.center;
        }
        let (hw, hh) = (self.width / 2.0, self.height / 2.0);
        let t = match self.shape {
            LabelShape::Ellipse => 1.0 / ((dx / hw).powi(2) + (dy / hh).powi(2)).sqrt(),
            LabelShape::Rect => {
                let tx = if dx != 0.0 { hw / dx.abs() } else { f64::INFINITY };
                let ty = if dy != 0.0 { hh / dy.abs() } else { f64::INFINITY };
                tx.min(ty)
            }
        };
        Point::new(self.center.x + dx * t, self.center.y + dy * t)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Connector {
    pub from: Point,
    pub to: Point,
    pub color: Rgb,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Glyph {
    pub ch: char,
    pub x: f64,
    pub y: f64,
    pub angle: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelGeometry {
    pub label: usize,
    pub kind: LabelType,
    /// Text as displayed (uppercase).
    pub text: String,
    pub font_px: f64,
    pub label_box: Option<LabelBox>,
    pub connector: Option<Connector>,
    pub baseline: Option<Path>,
    pub glyphs: Vec<Glyph>,
}

impl LabelGeometry {
    pub fn is_empty(&self) -> bool {
        self.text.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkAnchor {
    pub outline: Path,
    pub color: Rgb,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkGeometry {
    pub link: usize,
    pub ribbon: Option<Path>,
    pub color: Rgb,
    pub merge: bool,
    pub anchor: Option<LinkAnchor>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneModel {
    pub width: f64,
    pub height: f64,
    /// Height of the chart area; the axis strip lies below it.
    pub chart_height: f64,
    pub background: Vec<AxisBlock>,
    /// Outer streams first.
    pub streams: Vec<StreamPath>,
    pub links: Vec<LinkGeometry>,
    pub labels: Vec<LabelGeometry>,
    pub axis: Vec<AxisBlock>,
}

fn position(graph: &LayoutGraph, state: &SimulationState, id: NodeId) -> Point {
    Point::new(graph.node(id).x, state.y[id.0])
}

fn band(graph: &LayoutGraph, state: &SimulationState, ids: &[NodeId]) -> Vec<BandNode> {
    ids.iter()
        .map(|&id| BandNode {
            x: graph.node(id).x,
            y: state.y[id.0],
            size: graph.node(id).size,
        })
        .collect()
}

fn nearest_on(points: &[Point], target: Point) -> Point {
    points
        .iter()
        .copied()
        .min_by(|a, b| a.distance(target).total_cmp(&b.distance(target)))
        .unwrap_or(target)
}

fn step_px(graph: &LayoutGraph) -> f64 {
    graph.step * graph.scale.px_per_unit
}

/// Geometry of one label.
#[allow(clippy::too_many_arguments)]
pub fn label_geometry(
    spec: &ChartSpec,
    graph: &LayoutGraph,
    state: &SimulationState,
    chain_index: usize,
    outline: &Path,
    stream_color: Rgb,
    depth: u32,
    graph_params: &GraphParams,
    params: &SceneParams,
) -> LabelGeometry {
    let chain = &graph.label_chains[chain_index];
    let def = &spec.labels[chain.label];
    let font_px = def.size * graph_params.base_font_px;
    let text = def.text.to_uppercase();
    let mut geometry = LabelGeometry {
        label: chain.label,
        kind: def.kind,
        text: text.clone(),
        font_px,
        label_box: None,
        connector: None,
        baseline: None,
        glyphs: Vec::new(),
    };
    if text.is_empty() {
        return geometry;
    }
    let points: Vec<Point> = chain.nodes.iter().map(|&n| position(graph, state, n)).collect();
    let text_w = metrics::text_width(&text, font_px);
    let pad = graph_params.label_padding_em * font_px;

    match def.kind {
        LabelType::In | LabelType::Out => {
            let n = points.len() as f64;
            let center = Point::new(
                points.iter().map(|p| p.x).sum::<f64>() / n,
                points.iter().map(|p| p.y).sum::<f64>() / n,
            );
            let (mut width, mut height) = (text_w + 2.0 * pad, font_px + 2.0 * pad);
            if params.label_shape == LabelShape::Ellipse {
                width *= std::f64::consts::SQRT_2;
                height *= std::f64::consts::SQRT_2;
            }
            let (h, s, _) = stream_color.to_hsl();
            let fill = match def.kind {
                LabelType::In => nested_shade(stream_color, depth + 1),
                _ => Rgb::from_hsl(h, s, 92.0),
            };
            let label_box = LabelBox {
                center,
                width,
                height,
                shape: params.label_shape,
                fill,
                stroke: Rgb::BLACK,
            };
            if def.kind == LabelType::Out {
                let samples = outline.sample(params.arc_samples);
                let attach = nearest_on(&samples, center);
                geometry.connector = Some(Connector {
                    from: label_box.boundary_toward(attach),
                    to: attach,
                    color: stream_color,
                });
            }
            geometry.label_box = Some(label_box);
        }
        LabelType::On => {
            let baseline = if points.len() < 2 {
                let c = points[0];
                let mut p = Path::new(Point::new(c.x - text_w / 2.0, c.y));
                p.line_to(Point::new(c.x + text_w / 2.0, c.y));
                p
            } else {
                let mut p = Path::new(points[0]);
                curve_through(&mut p, &points);
                p
            };
            let table = ArcTable::new(&baseline, params.arc_samples);
            let mut s = (table.total() - text_w) / 2.0;
            for ch in text.chars() {
                let adv = metrics::advance_em(ch) * font_px;
                let (p, angle) = table.at(s + adv / 2.0);
                geometry.glyphs.push(Glyph {
                    ch,
                    x: p.x,
                    y: p.y,
                    angle,
                });
                s += adv;
            }
            geometry.baseline = Some(baseline);
        }
    }
    geometry
}

/// Ribbon and anchor of one link, colored as its source stream.
pub fn link_path(
    spec: &ChartSpec,
    graph: &LayoutGraph,
    state: &SimulationState,
    chain_index: usize,
    graph_params: &GraphParams,
) -> LinkGeometry {
    let chain = &graph.link_chains[chain_index];
    let def = &spec.links[chain.link];
    let color = spec
        .stream(&def.from)
        .and_then(|s| Rgb::parse(&s.color).ok())
        .unwrap_or(Rgb::BLACK);
    let ribbon = if chain.nodes.len() < 2 {
        None
    } else {
        let source_size = graph.node(chain.nodes[0]).size;
        let width = graph_params.link_width.min(source_size);
        let mut nodes = band(graph, state, &chain.nodes);
        let last = nodes.len() - 1;
        for (i, n) in nodes.iter_mut().enumerate() {
            n.size = if i == last && def.merge { n.size } else { width };
        }
        Some(stream_outline(&nodes, width))
    };
    let anchor = chain.anchor.map(|a| {
        let node = graph.node(a);
        let width = (0.4 * step_px(graph)).max(node.size);
        LinkAnchor {
            outline: capsule(node.x, state.y[a.0], width, node.size),
            color,
        }
    });
    LinkGeometry {
        link: chain.link,
        ribbon,
        color,
        merge: def.merge,
        anchor,
    }
}

/// Assembles the full scene in paint order.
pub fn build_scene(
    spec: &ChartSpec,
    graph: &LayoutGraph,
    state: &SimulationState,
    canvas: Canvas,
    graph_params: &GraphParams,
    params: &SceneParams,
    style: &StyleParams,
) -> SceneModel {
    let cap = step_px(graph).max(graph_params.default_size * graph_params.size_scale);
    let mut streams: Vec<StreamPath> = spec
        .streams
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let depth = spec.depth(&s.id);
            let base = Rgb::parse(&s.color).unwrap_or(Rgb::BLACK);
            StreamPath {
                stream: i,
                id: s.id.clone(),
                outline: stream_outline(&band(graph, state, &graph.stream_nodes[i]), cap),
                depth,
                fill: nested_shade(base, depth),
            }
        })
        .collect();

    let labels = (0..graph.label_chains.len())
        .map(|ci| {
            let def = &spec.labels[graph.label_chains[ci].label];
            let si = spec.stream_index(&def.stream).expect("validated label stream");
            let sp = &streams[si];
            label_geometry(spec, graph, state, ci, &sp.outline, sp.fill, sp.depth, graph_params, params)
        })
        .collect();

    let links = (0..graph.link_chains.len())
        .map(|ci| link_path(spec, graph, state, ci, graph_params))
        .collect();

    // stable: declaration order within a depth
    streams.sort_by_key(|s| s.depth);

    let range = (graph.scale.t_min, graph.scale.t_max);
    let chart_height = canvas.height;
    let background = if spec.streams.is_empty() {
        Vec::new()
    } else {
        axis_blocks(range, &style.background, Lane::Background, &graph.scale, 0.0, chart_height)
    };
    let axis = if spec.streams.is_empty() {
        Vec::new()
    } else {
        axis_blocks(range, &style.axis, Lane::Axis, &graph.scale, chart_height, params.axis_height)
    };
    SceneModel {
        width: canvas.width,
        height: chart_height + params.axis_height,
        chart_height,
        background,
        streams,
        links,
        labels,
        axis,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn straight_segment() {
        let (c1, c2) = bezier_segment(Point::new(0.0, 0.0), Point::new(10.0, 0.0));
        assert_eq!(c1, Point::new(5.0, 0.0));
        assert_eq!(c2, Point::new(5.0, 0.0));
    }

    #[test]
    fn diagonal_segment() {
        let (c1, c2) = bezier_segment(Point::new(0.0, 0.0), Point::new(10.0, 10.0));
        assert_eq!(c1, Point::new(5.0, 0.0));
        assert_eq!(c2, Point::new(5.0, 10.0));
    }

    #[test]
    fn endpoint_tangents_are_horizontal() {
        for (a, b) in [((0.0, 3.0), (7.0, -2.0)), ((1.0, 1.0), (2.0, 100.0)), ((-5.0, 0.0), (5.0, 0.0))] {
            let (p0, p1) = (Point::new(a.0, a.1), Point::new(b.0, b.1));
            let (c1, c2) = bezier_segment(p0, p1);
            assert_eq!(cubic_derivative(p0, c1, c2, p1, 0.0).y, 0.0);
            assert_eq!(cubic_derivative(p0, c1, c2, p1, 1.0).y, 0.0);
        }
    }

    #[test]
    fn constant_band_is_rectangular() {
        let nodes: Vec<BandNode> = (0..4)
            .map(|i| BandNode {
                x: i as f64 * 10.0,
                y: 50.0,
                size: 5.0,
            })
            .collect();
        let path = stream_outline(&nodes, 10.0);
        assert!(path.closed);
        for p in path.sample(8).into_iter().filter(|p| p.x > 0.0 && p.x < 30.0) {
            assert!((p.y - 47.5).abs() < 1e-12 || (p.y - 52.5).abs() < 1e-12, "{p:?}");
        }
    }

    #[test]
    fn single_node_capsule() {
        let path = stream_outline(&[BandNode { x: 10.0, y: 20.0, size: 6.0 }], 30.0);
        let pts = path.sample(16);
        let top = pts.iter().map(|p| p.y).fold(f64::INFINITY, f64::min);
        let bottom = pts.iter().map(|p| p.y).fold(f64::NEG_INFINITY, f64::max);
        let left = pts.iter().map(|p| p.x).fold(f64::INFINITY, f64::min);
        let right = pts.iter().map(|p| p.x).fold(f64::NEG_INFINITY, f64::max);
        assert!((bottom - top - 6.0).abs() < 1e-9);
        assert!((right - left - 30.0).abs() < 1e-9);
    }

    #[test]
    fn ellipse_boundary() {
        let b = LabelBox {
            center: Point::new(0.0, 0.0),
            width: 20.0,
            height: 10.0,
            shape: LabelShape::Ellipse,
            fill: Rgb::WHITE,
            stroke: Rgb::BLACK,
        };
        assert_eq!(b.boundary_toward(Point::new(100.0, 0.0)), Point::new(10.0, 0.0));
        assert_eq!(b.boundary_toward(Point::new(0.0, -30.0)), Point::new(0.0, -5.0));
        let rect = LabelBox {
            shape: LabelShape::Rect,
            ..b
        };
        assert_eq!(rect.boundary_toward(Point::new(100.0, 100.0)), Point::new(5.0, 5.0));
    }

    #[test]
    fn arc_table_walks_a_line() {
        let mut p = Path::new(Point::new(0.0, 0.0));
        p.line_to(Point::new(10.0, 0.0));
        let table = ArcTable::new(&p, 4);
        assert!((table.total() - 10.0).abs() < 1e-12);
        let (pt, angle) = table.at(2.5);
        assert!((pt.x - 2.5).abs() < 1e-12);
        assert_eq!(angle, 0.0);
    }
}
