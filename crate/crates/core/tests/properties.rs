use orcha_core::color::{nested_shade, Rgb};
use orcha_core::config::Config;
use orcha_core::geometry::{bezier_segment, cubic_derivative, Point};
use orcha_core::graph::{build_graph, check_acyclic, EdgeClass, NodeKind};
use orcha_core::layout::{check_constraints, init_positions, Simulation};
use orcha_core::model::{validate_for_step, ChartSpec, LabelType};
use orcha_core::session::{apply_op, EditOp, EntityKind};
use orcha_core::synth::random_spec;
use proptest::prelude::*;

fn config() -> Config {
    Config::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn csv_round_trip(seed in any::<u64>(), text in "[A-Za-z,\"][A-Za-z ,\"]{0,10}[A-Za-z,\"]") {
        let mut spec = random_spec(seed);
        if let Some(label) = spec.labels.first_mut() {
            label.text = text;
        }
        let csv = spec.to_csv();
        let back = ChartSpec::from_csv(&csv.streams, Some(&csv.links), Some(&csv.labels)).unwrap();
        prop_assert_eq!(back, spec);
    }

    #[test]
    fn generated_specs_validate(seed in any::<u64>()) {
        prop_assert!(validate_for_step(&random_spec(seed), 1.0).is_ok());
    }

    #[test]
    fn structural_edges_advance_time(seed in any::<u64>()) {
        let spec = random_spec(seed);
        let c = config();
        let g = build_graph(&spec, &c.graph, c.canvas).unwrap();
        prop_assert!(check_acyclic(&g));
        for e in g.edges.iter().filter(|e| matches!(e.class, EdgeClass::Stream | EdgeClass::Link)) {
            prop_assert!(g.node(e.src).t < g.node(e.dst).t);
        }
    }

    #[test]
    fn stream_extents_are_exact(seed in any::<u64>()) {
        let spec = random_spec(seed);
        let c = config();
        let g = build_graph(&spec, &c.graph, c.canvas).unwrap();
        for (i, s) in spec.streams.iter().enumerate() {
            let nodes = &g.stream_nodes[i];
            prop_assert_eq!(g.node(nodes[0]).t, s.t0);
            prop_assert_eq!(g.node(*nodes.last().unwrap()).t, s.t1);
            for w in nodes.windows(2) {
                let dt = g.node(w[1]).t - g.node(w[0]).t;
                prop_assert!(dt > 0.0 && dt <= c.graph.step + 1e-9);
            }
            if let Some(parent) = &s.parent {
                let p = spec.stream_index(parent).unwrap();
                for &n in nodes {
                    let host = g.node(n).parent.unwrap();
                    prop_assert!(g.stream_nodes[p].contains(&host));
                }
            }
        }
    }

    #[test]
    fn label_chains_are_symmetric_unless_clipped(seed in any::<u64>()) {
        let spec = random_spec(seed);
        let c = config();
        let g = build_graph(&spec, &c.graph, c.canvas).unwrap();
        let (t_min, t_max) = spec.time_range().unwrap();
        for chain in &g.label_chains {
            let label = &spec.labels[chain.label];
            let stream = spec.stream(&label.stream).unwrap();
            let first = g.node(chain.nodes[0]).t;
            let last = g.node(*chain.nodes.last().unwrap()).t;
            let step = c.graph.step;
            let clipped = match label.kind {
                LabelType::Out => first - step < t_min - 1e-9 || last + step > t_max + 1e-9,
                _ => first <= stream.t0 || last >= stream.t1,
            };
            let pos = chain.nodes.iter().position(|&n| n == chain.center).unwrap();
            let (left, right) = (pos, chain.nodes.len() - pos - 1);
            prop_assert!(left == right || clipped, "left {} right {}", left, right);
            for &n in &chain.nodes {
                let kind = g.node(n).kind;
                prop_assert!(kind == NodeKind::LabelCenter || kind == NodeKind::LabelWing);
            }
        }
    }

    #[test]
    fn layout_respects_constraints(seed in any::<u64>()) {
        let spec = random_spec(seed);
        let c = config();
        let g = build_graph(&spec, &c.graph, c.canvas).unwrap();
        let xs: Vec<u64> = g.nodes.iter().map(|n| n.x.to_bits()).collect();
        let mut state = init_positions(&g, &c.force, c.canvas, 42);
        let stats = Simulation::new(&g, &c.force, c.canvas).run(&mut state, c.force.max_ticks);
        prop_assert!(stats.ticks <= c.force.max_ticks);
        let after: Vec<u64> = g.nodes.iter().map(|n| n.x.to_bits()).collect();
        prop_assert_eq!(xs, after);
        prop_assert!(state.y.iter().all(|y| y.is_finite()));
        let broken = check_constraints(&g, &state, &c.force, c.canvas, 1e-6);
        prop_assert!(broken.is_empty(), "{:?}", broken);
    }

    #[test]
    fn layout_is_deterministic(seed in 0u64..1000) {
        let spec = random_spec(seed);
        let c = config();
        let g = build_graph(&spec, &c.graph, c.canvas).unwrap();
        let run = || {
            let mut s = init_positions(&g, &c.force, c.canvas, seed);
            Simulation::new(&g, &c.force, c.canvas).run(&mut s, 100);
            s.y.iter().map(|y| y.to_bits()).collect::<Vec<_>>()
        };
        prop_assert_eq!(run(), run());
    }

    #[test]
    fn bezier_tangents_are_horizontal(x0 in -500.0..500.0f64, dx in 0.1..300.0f64, y0 in -500.0..500.0f64, y1 in -500.0..500.0f64) {
        let (p0, p1) = (Point::new(x0, y0), Point::new(x0 + dx, y1));
        let (c1, c2) = bezier_segment(p0, p1);
        prop_assert_eq!(cubic_derivative(p0, c1, c2, p1, 0.0).y, 0.0);
        prop_assert_eq!(cubic_derivative(p0, c1, c2, p1, 1.0).y, 0.0);
    }

    #[test]
    fn shading_keeps_hue_and_saturation(r in 0u8.., g in 0u8.., b in 0u8.., depth in 1u32..6) {
        let base = Rgb::from_rgb8(r, g, b);
        let (h0, s0, l0) = base.to_hsl();
        let shaded = nested_shade(base, depth);
        let (h1, s1, l1) = shaded.to_hsl();
        let want = (l0 + if depth % 2 == 1 { 12.0 } else { -12.0 }).clamp(0.0, 100.0);
        prop_assert!((l1 - want).abs() < 1e-6);
        if s0 > 1e-9 && l1 > 1e-6 && l1 < 100.0 - 1e-6 {
            prop_assert!((s1 - s0).abs() < 1e-6);
            let dh = (h1 - h0).abs();
            prop_assert!(dh.min(360.0 - dh) < 1e-6);
        }
    }

    #[test]
    fn edits_are_atomic(seed in any::<u64>(), which in 0usize..6, t in -5.0..30.0f64, size in -2.0..12.0f64) {
        let spec = random_spec(seed);
        let first = spec.streams[0].id.clone();
        let op = match which {
            0 => EditOp::AddStream { id: None, t0: t, t1: t + size, color: None, parent: None },
            1 => EditOp::SetSizeAt { stream: first.clone(), t, size },
            2 => EditOp::AddLabel { stream: first.clone(), t, text: "x".into(), kind: LabelType::On, size: size / 4.0 },
            3 => EditOp::AddLink { from: Some(first.clone()), t0: t, to: None, t1: None, merge: false, color: None },
            4 => EditOp::DeleteEntity { kind: EntityKind::Stream, id: first.clone() },
            _ => EditOp::DeleteEntity { kind: EntityKind::Label, id: format!("{}", size as i64) },
        };
        let before = spec.to_csv();
        match apply_op(&spec, &op, 1.0) {
            Ok(next) => prop_assert!(validate_for_step(&next, 1.0).is_ok()),
            Err(_) => {}
        }
        prop_assert_eq!(spec.to_csv(), before);
    }
}
