//! SVG serialization of a [`SceneModel`].
//!
//! Every number is written with two decimals, so output bytes depend only on
//! the scene and the style parameters.

use std::fmt::Write as _;

use crate::color::Rgb;
use crate::geometry::{LabelShape, Path, SceneModel, Segment};
use crate::model::LabelType;
use crate::style::{filter_defs, filter_id, AxisBlock, StyleParams};

const FONT_FAMILY: &str = "Helvetica, Arial, sans-serif";

/// Fixed two-decimal number, without a negative sign on zero.
pub fn num(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".to_string()
    } else {
        s
    }
}

/// SVG path data for `path`.
pub fn path_data(path: &Path) -> String {
    let mut d = format!("M{} {}", num(path.start.x), num(path.start.y));
    for seg in &path.segments {
        match seg {
            Segment::Line(p) => {
                let _ = write!(d, " L{} {}", num(p.x), num(p.y));
            }
            Segment::Cubic(c1, c2, p) => {
                let _ = write!(
                    d,
                    " C{} {} {} {} {} {}",
                    num(c1.x),
                    num(c1.y),
                    num(c2.x),
                    num(c2.y),
                    num(p.x),
                    num(p.y)
                );
            }
        }
    }
    if path.closed {
        d.push_str(" Z");
    }
    d
}

pub fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

/// A serialized chart.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SvgDocument {
    pub xml: String,
    pub width: String,
    pub height: String,
}

fn filter_attr(style: &StyleParams, class: &str) -> String {
    if style.effects {
        format!(" filter=\"url(#{})\"", filter_id(class))
    } else {
        String::new()
    }
}

fn write_blocks(out: &mut String, blocks: &[AxisBlock], class: &str) {
    for b in blocks {
        let _ = write!(
            out,
            "<rect class=\"{class}\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"/>",
            num(b.x),
            num(b.y),
            num(b.width),
            num(b.height),
            b.color
        );
    }
}

fn baseline_id(label: usize) -> String {
    format!("orcha-baseline-{label}")
}

fn text_color() -> Rgb {
    Rgb::BLACK
}

/// Writes the scene as an SVG 1.1 document: background blocks, streams,
/// links, labels, then the axis strip.
pub fn emit_svg(scene: &SceneModel, style: &StyleParams) -> SvgDocument {
    let (width, height) = (num(scene.width), num(scene.height));
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" xmlns:xlink=\"http://www.w3.org/1999/xlink\" version=\"1.1\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">"
    );

    out.push_str("<defs>");
    out.push_str(&filter_defs(style));
    for label in &scene.labels {
        if let Some(baseline) = &label.baseline {
            let _ = write!(
                out,
                "<path id=\"{}\" d=\"{}\"/>",
                baseline_id(label.label),
                path_data(baseline)
            );
        }
    }
    out.push_str("</defs>\n");

    out.push_str("<g id=\"background\">");
    write_blocks(&mut out, &scene.background, "bg-block");
    out.push_str("</g>\n");

    let outline = num(style.outline_width);
    out.push_str("<g id=\"streams\">");
    for s in &scene.streams {
        let _ = write!(
            out,
            "<path class=\"stream\" data-stream=\"{}\" data-depth=\"{}\" d=\"{}\" fill=\"{}\" stroke=\"#000000\" stroke-width=\"{outline}\" stroke-linejoin=\"round\"{}/>",
            escape(&s.id),
            s.depth,
            path_data(&s.outline),
            s.fill,
            filter_attr(style, "stream")
        );
    }
    out.push_str("</g>\n");

    let link_outline = num(style.outline_width / 2.0);
    out.push_str("<g id=\"links\">");
    for l in &scene.links {
        if let Some(ribbon) = &l.ribbon {
            let _ = write!(
                out,
                "<path class=\"link\" data-link=\"{}\" data-merge=\"{}\" d=\"{}\" fill=\"{}\" stroke=\"#000000\" stroke-width=\"{link_outline}\"{}/>",
                l.link,
                l.merge,
                path_data(ribbon),
                l.color,
                filter_attr(style, "link")
            );
        }
        if let Some(anchor) = &l.anchor {
            let _ = write!(
                out,
                "<path class=\"link-anchor\" data-link=\"{}\" d=\"{}\" fill=\"{}\" stroke=\"#000000\" stroke-width=\"{link_outline}\"{}/>",
                l.link,
                path_data(&anchor.outline),
                anchor.color,
                filter_attr(style, "link")
            );
        }
    }
    out.push_str("</g>\n");

    out.push_str("<g id=\"labels\">");
    for label in &scene.labels {
        if label.is_empty() {
            continue;
        }
        let _ = write!(
            out,
            "<g class=\"label label-{}\" data-label=\"{}\">",
            label.kind.as_str(),
            label.label
        );
        if let Some(c) = &label.connector {
            let _ = write!(
                out,
                "<line class=\"label-connector\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"{outline}\" stroke-linecap=\"round\"/>",
                num(c.from.x),
                num(c.from.y),
                num(c.to.x),
                num(c.to.y),
                c.color
            );
        }
        if let Some(b) = &label.label_box {
            let common = format!(
                "fill=\"{}\" stroke=\"{}\" stroke-width=\"{link_outline}\"{}",
                b.fill,
                b.stroke,
                filter_attr(style, "label")
            );
            match b.shape {
                LabelShape::Ellipse => {
                    let _ = write!(
                        out,
                        "<ellipse class=\"label-box\" cx=\"{}\" cy=\"{}\" rx=\"{}\" ry=\"{}\" {common}/>",
                        num(b.center.x),
                        num(b.center.y),
                        num(b.width / 2.0),
                        num(b.height / 2.0)
                    );
                }
                LabelShape::Rect => {
                    let _ = write!(
                        out,
                        "<rect class=\"label-box\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" {common}/>",
                        num(b.center.x - b.width / 2.0),
                        num(b.center.y - b.height / 2.0),
                        num(b.width),
                        num(b.height)
                    );
                }
            }
            let _ = write!(
                out,
                "<text x=\"{}\" y=\"{}\" font-family=\"{FONT_FAMILY}\" font-size=\"{}\" text-anchor=\"middle\" dominant-baseline=\"central\" fill=\"{}\">{}</text>",
                num(b.center.x),
                num(b.center.y),
                num(label.font_px),
                text_color(),
                escape(&label.text)
            );
        } else if label.kind == LabelType::On && label.baseline.is_some() {
            let _ = write!(
                out,
                "<text font-family=\"{FONT_FAMILY}\" font-size=\"{}\" dominant-baseline=\"central\" fill=\"{}\"><textPath xlink:href=\"#{}\" startOffset=\"50%\" text-anchor=\"middle\">{}</textPath></text>",
                num(label.font_px),
                text_color(),
                baseline_id(label.label),
                escape(&label.text)
            );
        }
        out.push_str("</g>");
    }
    out.push_str("</g>\n");

    out.push_str("<g id=\"axis\">");
    write_blocks(&mut out, &scene.axis, "axis-block");
    for b in &scene.axis {
        let _ = write!(
            out,
            "<text class=\"axis-label\" x=\"{}\" y=\"{}\" font-family=\"{FONT_FAMILY}\" font-size=\"{}\" text-anchor=\"start\" dominant-baseline=\"central\" fill=\"#000000\">{}</text>",
            num(b.x + 3.0),
            num(b.y + b.height / 2.0),
            num((b.height * 0.45).min(14.0)),
            escape(&format!("{}", b.t0))
        );
    }
    out.push_str("</g>\n");
    out.push_str("</svg>\n");

    SvgDocument {
        xml: out,
        width,
        height,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;

    #[test]
    fn numbers_have_two_decimals() {
        assert_eq!(num(1.0), "1.00");
        assert_eq!(num(2.345), "2.35");
        assert_eq!(num(-0.001), "0.00");
        assert_eq!(num(-1.5), "-1.50");
    }

    #[test]
    fn path_data_format() {
        let mut p = Path::new(Point::new(0.0, 1.0));
        p.cubic_to(Point::new(1.0, 1.0), Point::new(1.0, 2.0), Point::new(2.0, 2.0));
        p.line_to(Point::new(2.0, 3.0));
        p.close();
        assert_eq!(
            path_data(&p),
            "M0.00 1.00 C1.00 1.00 1.00 2.00 2.00 2.00 L2.00 3.00 Z"
        );
    }

    #[test]
    fn escapes_markup() {
        assert_eq!(escape("A & <B> \"c\""), "A &amp; &lt;B&gt; &quot;c&quot;");
    }
}
