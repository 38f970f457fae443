//! Seeded generators of valid charts, for tests and benchmarks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{ChartSpec, LabelDef, LabelType, LinkDef, SizePoint, StreamDef};

const COLORS: [&str; 12] = [
    "#D73", "blue", "purple", "#2A9D8F", "#E9C46A", "#F4A261", "#E76F51", "teal", "olive",
    "#8E44AD", "crimson", "#3D5A80",
];

const WORDS: [&str; 16] = [
    "salon", "manifesto", "gallery", "school", "circle", "journal", "studio", "movement",
    "exile", "loft", "scene", "club", "press", "academy", "zine", "collective",
];

#[derive(Debug, Clone, PartialEq)]
pub struct SynthParams {
    pub streams: usize,
    pub links: usize,
    pub labels: usize,
    pub t_start: f64,
    pub t_end: f64,
    /// Chance that a stream is nested in an earlier one.
    pub nest_probability: f64,
    /// Largest nesting depth of generated streams.
    pub max_depth: u32,
    /// Largest explicit stream size, in size units.
    pub max_size: f64,
    /// Chance that a top-level stream ends half a step off the grid.
    pub off_grid_probability: f64,
    pub label_size: (f64, f64),
    pub max_words: usize,
}

impl SynthParams {
    /// The scale of a large hand-painted chart: 44 streams, 61 links and
    /// 369 labels over a century.
    pub fn large() -> Self {
        SynthParams {
            streams: 44,
            links: 61,
            labels: 369,
            t_start: 1900.0,
            t_end: 2010.0,
            nest_probability: 0.3,
            max_depth: 2,
            max_size: 8.0,
            off_grid_probability: 0.0,
            label_size: (0.6, 1.2),
            max_words: 2,
        }
    }
}

fn depth_of(streams: &[StreamDef], i: usize) -> u32 {
    let mut depth = 0;
    let mut cur = streams[i].parent.as_deref();
    while let Some(p) = cur {
        depth += 1;
        cur = streams.iter().find(|s| s.id == p).and_then(|s| s.parent.as_deref());
    }
    depth
}

fn gen_stream(rng: &mut ChaCha8Rng, p: &SynthParams, streams: &[StreamDef]) -> StreamDef {
    let id = format!("S{}", streams.len() + 1);
    let color = COLORS.choose(rng).expect("non-empty").to_string();
    let hosts: Vec<usize> = (0..streams.len())
        .filter(|&i| streams[i].t1 - streams[i].t0 >= 2.0 && depth_of(streams, i) < p.max_depth)
        .collect();
    let nested = !hosts.is_empty() && rng.gen_bool(p.nest_probability);
    let (t0, t1, parent) = if nested {
        let host = &streams[*hosts.choose(rng).expect("non-empty")];
        let last = host.t1.floor();
        let t0 = rng.gen_range(host.t0.ceil() as i64..last as i64) as f64;
        let t1 = rng.gen_range(t0 as i64 + 1..=last as i64) as f64;
        (t0, t1.min(host.t1), Some(host.id.clone()))
    } else {
        let t0 = rng.gen_range(p.t_start as i64..p.t_end as i64 - 1) as f64;
        let mut t1 = rng.gen_range(t0 as i64 + 1..=p.t_end as i64) as f64;
        if t1 < p.t_end && rng.gen_bool(p.off_grid_probability) {
            t1 += 0.5;
        }
        (t0, t1, None)
    };
    let mut sizes = Vec::new();
    if rng.gen_bool(0.4) {
        let mut times: Vec<i64> = (t0.ceil() as i64..=t1.floor() as i64).collect();
        times.shuffle(rng);
        let count = rng.gen_range(1..=2).min(times.len());
        let mut picked = times[..count].to_vec();
        picked.sort_unstable();
        sizes = picked
            .into_iter()
            .map(|t| SizePoint {
                t: t as f64,
                size: rng.gen_range(1..=p.max_size as i64) as f64,
            })
            .collect();
    }
    StreamDef {
        id,
        t0,
        t1,
        color,
        sizes,
        parent,
    }
}

fn gen_link(rng: &mut ChaCha8Rng, streams: &[StreamDef]) -> Option<LinkDef> {
    let from = streams.choose(rng)?;
    let t0 = rng.gen_range(from.t0.ceil() as i64..=from.t1.floor() as i64) as f64;
    let t1 = rng.gen_bool(0.5).then(|| t0 + rng.gen_range(1..=4) as f64);
    let end = t1.unwrap_or(t0 + 1.0);
    let targets: Vec<&StreamDef> = streams
        .iter()
        .filter(|s| s.id != from.id && s.contains_time(end))
        .collect();
    let to = targets.choose(rng)?;
    Some(LinkDef {
        from: from.id.clone(),
        t0,
        to: to.id.clone(),
        t1,
        merge: rng.gen_bool(0.3),
    })
}

fn gen_label(rng: &mut ChaCha8Rng, p: &SynthParams, streams: &[StreamDef]) -> LabelDef {
    let stream = streams.choose(rng).expect("at least one stream");
    let t = rng.gen_range(stream.t0.ceil() as i64..=stream.t1.floor() as i64) as f64;
    let words = rng.gen_range(1..=p.max_words);
    let text = (0..words)
        .map(|_| *WORDS.choose(rng).expect("non-empty"))
        .collect::<Vec<_>>()
        .join(" ");
    let kind = *[LabelType::In, LabelType::Out, LabelType::On]
        .choose(rng)
        .expect("non-empty");
    let size = (rng.gen_range(p.label_size.0..=p.label_size.1) * 10.0).round() / 10.0;
    LabelDef {
        stream: stream.id.clone(),
        t,
        text,
        kind,
        size,
    }
}

/// A chart valid for step 1 with exactly the requested counts, as long as
/// the time span leaves room for `links` links.
pub fn generate(seed: u64, p: &SynthParams) -> ChartSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut streams: Vec<StreamDef> = Vec::with_capacity(p.streams);
    while streams.len() < p.streams {
        let s = gen_stream(&mut rng, p, &streams);
        streams.push(s);
    }
    let mut links = Vec::with_capacity(p.links);
    let mut attempts = 0;
    while links.len() < p.links && attempts < 100 * (p.links + 1) {
        attempts += 1;
        if let Some(l) = gen_link(&mut rng, &streams) {
            links.push(l);
        }
    }
    let labels = if streams.is_empty() {
        Vec::new()
    } else {
        (0..p.labels).map(|_| gen_label(&mut rng, p, &streams)).collect()
    };
    ChartSpec {
        streams,
        links,
        labels,
    }
}

/// A small chart whose shape varies with the seed.
pub fn random_spec(seed: u64) -> ChartSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5EED);
    let span = rng.gen_range(6..=24) as f64;
    let params = SynthParams {
        streams: rng.gen_range(1..=8),
        links: rng.gen_range(0..=6),
        labels: rng.gen_range(0..=8),
        t_start: 0.0,
        t_end: span,
        nest_probability: 0.35,
        max_depth: 3,
        max_size: 10.0,
        off_grid_probability: 0.2,
        label_size: (0.6, 2.0),
        max_words: 3,
    };
    generate(seed, &params)
}

/// The large-scale chart used for performance checks.
pub fn large_spec(seed: u64) -> ChartSpec {
    generate(seed, &SynthParams::large())
}
