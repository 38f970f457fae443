//! Bundled glyph advance widths for label text.
//!
//! Widths are Helvetica advances in 1/1000 em for printable ASCII. Anything
//! else uses the width of `N`. Geometry only depends on this table, never on
//! the fonts installed where the chart is rendered.

const FIRST: u32 = 0x20;

#[rustfmt::skip]
const ADVANCES: [u16; 95] = [
    // space ! " # $ % & ' ( ) * + , - . /
    278, 278, 355, 556, 556, 889, 667, 191, 333, 333, 389, 584, 278, 333, 278, 278,
    // 0-9
    556, 556, 556, 556, 556, 556, 556, 556, 556, 556,
    // : ; < = > ? @
    278, 278, 584, 584, 584, 556, 1015,
    // A-Z
    667, 667, 722, 722, 667, 611, 778, 722, 278, 500, 667, 556, 833,
    722, 778, 667, 778, 722, 667, 611, 722, 667, 944, 667, 667, 611,
    // [ \ ] ^ _ `
    278, 278, 278, 469, 556, 333,
    // a-z
    556, 556, 500, 556, 556, 278, 556, 556, 222, 222, 500, 222, 833,
    556, 556, 556, 556, 333, 500, 278, 556, 500, 722, 500, 500, 500,
    // { | } ~
    334, 260, 334, 584,
];

const FALLBACK: u16 = 722;

/// Advance of one glyph, in em.
pub fn advance_em(c: char) -> f64 {
    let code = c as u32;
    let units = if (FIRST..FIRST + ADVANCES.len() as u32).contains(&code) {
        ADVANCES[(code - FIRST) as usize]
    } else {
        FALLBACK
    };
    f64::from(units) / 1000.0
}

/// Width of `text` set at `font_px`.
pub fn text_width(text: &str, font_px: f64) -> f64 {
    text.chars().map(advance_em).sum::<f64>() * font_px
}
