//! Hand-drawn style: time blocks and the SVG filter chain applied to shapes.
//!
//! Every filled element gets a grayscale fractal-noise texture multiplied into
//! its fill, a blurred inner shadow along its bottom-left edges and a blurred
//! drop shadow offset toward the bottom left. Filters use standard SVG
//! primitives only.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::color::Rgb;
use crate::graph::TimeScale;
use crate::svg::num;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "camelCase")]
pub struct NoiseParams {
    pub base_frequency: f64,
    pub octaves: u32,
    /// 0 keeps the flat fill, 1 multiplies by the raw noise.
    pub contrast: f64,
}

impl Default for NoiseParams {
    fn default() -> Self {
        NoiseParams {
            base_frequency: 0.02,
            octaves: 4,
            contrast: 0.35,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ShadowParams {
    pub dx: f64,
    pub dy: f64,
    pub blur: f64,
}

impl Default for ShadowParams {
    fn default() -> Self {
        ShadowParams {
            dx: -3.0,
            dy: 3.0,
            blur: 2.0,
        }
    }
}

/// Block tiling of one lane: block length in time units and the two
/// alternating colors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockParams {
    pub step: f64,
    pub colors: [Rgb; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "camelCase")]
pub struct StyleParams {
    pub noise: NoiseParams,
    pub outline_width: f64,
    pub shadow: ShadowParams,
    pub axis: BlockParams,
    pub background: BlockParams,
    pub seed: u64,
    /// With effects off no filters are emitted; geometry is unchanged.
    pub effects: bool,
}

impl Default for StyleParams {
    fn default() -> Self {
        StyleParams {
            noise: NoiseParams::default(),
            outline_width: 2.5,
            shadow: ShadowParams::default(),
            axis: BlockParams {
                step: 1.0,
                colors: [Rgb::from_rgb8(0xD9, 0x3A, 0x2B), Rgb::from_rgb8(0xF2, 0xB7, 0x05)],
            },
            background: BlockParams {
                step: 1.0,
                colors: [Rgb::from_rgb8(0xF5, 0xF0, 0xE6), Rgb::from_rgb8(0xEB, 0xE3, 0xD3)],
            },
            seed: 42,
            effects: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid style: {0}")]
pub struct StyleError(pub String);

impl StyleParams {
    pub fn validate(&self) -> Result<(), StyleError> {
        let err = |m: String| Err(StyleError(m));
        if !(self.shadow.dx < 0.0 && self.shadow.dy > 0.0) {
            return err(format!(
                "shadow must point down-left (dx < 0, dy > 0), got ({}, {})",
                self.shadow.dx, self.shadow.dy
            ));
        }
        if self.shadow.blur < 0.0 || self.outline_width < 0.0 {
            return err("shadow blur and outline width must be >= 0".into());
        }
        if !(0.0..=1.0).contains(&self.noise.contrast) {
            return err(format!("noise contrast must lie in [0, 1], got {}", self.noise.contrast));
        }
        if self.noise.octaves == 0 || self.noise.base_frequency < 0.0 {
            return err("noise needs at least one octave and a non-negative frequency".into());
        }
        if !(self.axis.step > 0.0 && self.background.step > 0.0) {
            return err("block steps must be positive".into());
        }
        let axis_min = self.axis.colors.iter().map(|c| c.saturation()).fold(f64::INFINITY, f64::min);
        let background_max = self
            .background
            .colors
            .iter()
            .map(|c| c.saturation())
            .fold(f64::NEG_INFINITY, f64::max);
        if axis_min < background_max {
            return err(format!(
                "axis colors must be at least as saturated as background colors ({axis_min:.1}% < {background_max:.1}%)"
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Lane {
    /// Strip below the chart.
    Axis,
    /// Full-height blocks behind everything.
    Background,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisBlock {
    pub t0: f64,
    pub t1: f64,
    pub x: f64,
    pub y: f64,
    pub width: f64,
    pub height: f64,
    pub color: Rgb,
    pub lane: Lane,
}

/// Alternating blocks tiling `range` from its start, the last block clipped
/// to the range end. The first block takes `colors[0]`.
pub fn axis_blocks(
    range: (f64, f64),
    blocks: &BlockParams,
    lane: Lane,
    scale: &TimeScale,
    y: f64,
    height: f64,
) -> Vec<AxisBlock> {
    let (start, end) = range;
    let span = (end - start).max(0.0);
    let count = ((span / blocks.step) - 1e-9).ceil().max(1.0) as usize;
    (0..count)
        .map(|i| {
            let t0 = start + i as f64 * blocks.step;
            let t1 = (start + (i + 1) as f64 * blocks.step).min(end).max(t0);
            let (x0, x1) = (scale.to_px(t0), scale.to_px(t1));
            AxisBlock {
                t0,
                t1,
                x: x0,
                y,
                width: x1 - x0,
                height,
                color: blocks.colors[i % 2],
                lane,
            }
        })
        .collect()
}

/// Element classes that each get their own filter.
pub const FILTER_CLASSES: [&str; 3] = ["stream", "link", "label"];

pub fn filter_id(class: &str) -> String {
    format!("orcha-{class}")
}

/// `<filter>` definitions for every element class. Empty with effects off.
pub fn filter_defs(style: &StyleParams) -> String {
    let mut out = String::new();
    if !style.effects {
        return out;
    }
    let c = style.noise.contrast;
    let w = num(c / 3.0);
    let offset = num(1.0 - c);
    let matrix = format!(
        "{w} {w} {w} 0 {offset} {w} {w} {w} 0 {offset} {w} {w} {w} 0 {offset} 0 0 0 0 1"
    );
    let (dx, dy, blur) = (style.shadow.dx, style.shadow.dy, style.shadow.blur);
    for (i, class) in FILTER_CLASSES.iter().enumerate() {
        let seed = (style.seed.wrapping_add(i as u64)) % 1_000_000;
        let _ = write!(
            out,
            concat!(
                "<filter id=\"{id}\" x=\"-20%\" y=\"-20%\" width=\"140%\" height=\"140%\" color-interpolation-filters=\"sRGB\">",
                "<feTurbulence type=\"fractalNoise\" baseFrequency=\"{freq}\" numOctaves=\"{oct}\" seed=\"{seed}\" result=\"noise\"/>",
                "<feColorMatrix in=\"noise\" type=\"matrix\" values=\"{matrix}\" result=\"grain\"/>",
                "<feBlend in=\"SourceGraphic\" in2=\"grain\" mode=\"multiply\" result=\"blend\"/>",
                "<feComposite in=\"blend\" in2=\"SourceAlpha\" operator=\"in\" result=\"textured\"/>",
                "<feOffset in=\"SourceAlpha\" dx=\"{ndx}\" dy=\"{ndy}\" result=\"shifted\"/>",
                "<feComposite in=\"SourceAlpha\" in2=\"shifted\" operator=\"out\" result=\"rim\"/>",
                "<feGaussianBlur in=\"rim\" stdDeviation=\"{blur}\" result=\"rimBlur\"/>",
                "<feComposite in=\"rimBlur\" in2=\"SourceAlpha\" operator=\"in\" result=\"innerMask\"/>",
                "<feFlood flood-color=\"#000000\" flood-opacity=\"0.55\" result=\"ink\"/>",
                "<feComposite in=\"ink\" in2=\"innerMask\" operator=\"in\" result=\"innerShadow\"/>",
                "<feOffset in=\"SourceAlpha\" dx=\"{dx}\" dy=\"{dy}\" result=\"drop\"/>",
                "<feGaussianBlur in=\"drop\" stdDeviation=\"{blur}\" result=\"dropBlur\"/>",
                "<feFlood flood-color=\"#000000\" flood-opacity=\"0.5\" result=\"dropInk\"/>",
                "<feComposite in=\"dropInk\" in2=\"dropBlur\" operator=\"in\" result=\"outerShadow\"/>",
                "<feMerge><feMergeNode in=\"outerShadow\"/><feMergeNode in=\"textured\"/><feMergeNode in=\"innerShadow\"/></feMerge>",
                "</filter>"
            ),
            id = filter_id(class),
            freq = num(style.noise.base_frequency),
            oct = style.noise.octaves,
            seed = seed,
            matrix = matrix,
            ndx = num(-dx),
            ndy = num(-dy),
            dx = num(dx),
            dy = num(dy),
            blur = num(blur),
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_scale() -> TimeScale {
        TimeScale {
            t_min: 2.0,
            t_max: 9.0,
            x_left: 0.0,
            px_per_unit: 10.0,
        }
    }

    fn blocks(step: f64) -> BlockParams {
        BlockParams {
            step,
            ..StyleParams::default().axis
        }
    }

    #[test]
    fn tiles_alternate_from_first_color() {
        let b = blocks(1.0);
        let tiles = axis_blocks((2.0, 9.0), &b, Lane::Axis, &unit_scale(), 0.0, 10.0);
        assert_eq!(tiles.len(), 7);
        for (i, t) in tiles.iter().enumerate() {
            assert_eq!(t.color, b.colors[i % 2]);
            assert_eq!(t.t0, 2.0 + i as f64);
        }
        assert_eq!(tiles[6].t1, 9.0);
    }

    #[test]
    fn coarse_step_gives_one_block() {
        let tiles = axis_blocks((2.0, 9.0), &blocks(10.0), Lane::Background, &unit_scale(), 0.0, 10.0);
        assert_eq!(tiles.len(), 1);
        assert_eq!((tiles[0].t0, tiles[0].t1), (2.0, 9.0));
        assert_eq!(tiles[0].width, 70.0);
    }

    #[test]
    fn partial_last_block_is_clipped() {
        let tiles = axis_blocks((0.0, 2.5), &blocks(1.0), Lane::Axis, &unit_scale(), 0.0, 10.0);
        assert_eq!(tiles.len(), 3);
        assert_eq!(tiles[2].t1, 2.5);
    }

    #[test]
    fn default_style_is_valid() {
        StyleParams::default().validate().unwrap();
    }

    #[test]
    fn axis_must_be_more_saturated() {
        let mut style = StyleParams::default();
        std::mem::swap(&mut style.axis.colors, &mut style.background.colors);
        assert!(style.validate().is_err());
    }

    #[test]
    fn shadow_must_point_down_left() {
        let mut style = StyleParams::default();
        style.shadow.dx = 3.0;
        assert!(style.validate().is_err());
    }

    #[test]
    fn filters_are_deterministic() {
        let style = StyleParams::default();
        assert_eq!(filter_defs(&style), filter_defs(&style));
        assert_eq!(filter_defs(&style).matches("<filter ").count(), 3);
    }

    #[test]
    fn zero_contrast_is_neutral_multiply() {
        let mut style = StyleParams::default();
        style.noise.contrast = 0.0;
        let defs = filter_defs(&style);
        assert!(defs.contains("values=\"0.00 0.00 0.00 0 1.00 0.00 0.00 0.00 0 1.00 0.00 0.00 0.00 0 1.00 0 0 0 0 1\""), "{defs}");
    }

    #[test]
    fn effects_off_emits_nothing() {
        let style = StyleParams {
            effects: false,
            ..Default::default()
        };
        assert!(filter_defs(&style).is_empty());
    }

    #[test]
    fn style_json_shape() {
        let json = r##"{"noise":{"baseFrequency":0.05,"octaves":2,"contrast":0.5},"outlineWidth":3,
            "shadow":{"dx":-2,"dy":2,"blur":1},"axis":{"step":10,"colors":["#D73","red"]},
            "background":{"step":5,"colors":["#EEE","#DDD"]},"seed":7}"##;
        let style: StyleParams = serde_json::from_str(json).unwrap();
        assert_eq!(style.noise.octaves, 2);
        assert_eq!(style.axis.colors[0].to_hex(), "#DD7733");
        assert_eq!(style.seed, 7);
        assert!(style.effects);
    }
}
