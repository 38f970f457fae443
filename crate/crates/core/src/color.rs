//! sRGB colors, CSS color tokens and HSL shading for nested streams.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unrecognized color `{0}` (expected #rgb, #rrggbb or a CSS color name)")]
pub struct ColorError(pub String);

/// An sRGB color with channels in `[0, 1]`.
///
/// Channels are kept as `f64` so HSL manipulation does not drift; quantization
/// to 8 bits only happens when the color is written out.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rgb {
    pub r: f64,
    pub g: f64,
    pub b: f64,
}

/// Lightness step applied per nesting level, in HSL percentage points.
pub const NEST_LIGHTNESS_STEP: f64 = 12.0;

impl Rgb {
    pub const BLACK: Rgb = Rgb { r: 0.0, g: 0.0, b: 0.0 };
    pub const WHITE: Rgb = Rgb { r: 1.0, g: 1.0, b: 1.0 };

    pub fn from_rgb8(r: u8, g: u8, b: u8) -> Self {
        Rgb {
            r: f64::from(r) / 255.0,
            g: f64::from(g) / 255.0,
            b: f64::from(b) / 255.0,
        }
    }

    /// Parses a color cell: `#rgb` / `#rrggbb` hex or a CSS named color.
    /// Shorthand hex expands per CSS, so `#D73` is `#DD7733`.
    pub fn parse(token: &str) -> Result<Self, ColorError> {
        let token = token.trim();
        let err = || ColorError(token.to_string());
        if let Some(hex) = token.strip_prefix('#') {
            if !hex.chars().all(|c| c.is_ascii_hexdigit()) {
                return Err(err());
            }
            let digits: Vec<u8> = hex
                .chars()
                .map(|c| c.to_digit(16).unwrap() as u8)
                .collect();
            return match digits.as_slice() {
                [r, g, b] => Ok(Rgb::from_rgb8(r * 17, g * 17, b * 17)),
                [r1, r0, g1, g0, b1, b0] => {
                    Ok(Rgb::from_rgb8(r1 * 16 + r0, g1 * 16 + g0, b1 * 16 + b0))
                }
                _ => Err(err()),
            };
        }
        if token.is_empty() || !token.chars().all(|c| c.is_ascii_alphabetic()) {
            return Err(err());
        }
        let named = csscolorparser::parse(&token.to_ascii_lowercase()).map_err(|_| err())?;
        let [r, g, b, _] = named.to_rgba8();
        Ok(Rgb::from_rgb8(r, g, b))
    }

    pub fn to_rgb8(self) -> [u8; 3] {
        let q = |c: f64| (c.clamp(0.0, 1.0) * 255.0).round() as u8;
        [q(self.r), q(self.g), q(self.b)]
    }

    /// Uppercase `#RRGGBB`.
    pub fn to_hex(self) -> String {
        let [r, g, b] = self.to_rgb8();
        format!("#{r:02X}{g:02X}{b:02X}")
    }

    /// Returns `(hue in degrees [0, 360), saturation %, lightness %)`.
    pub fn to_hsl(self) -> (f64, f64, f64) {
        let max = self.r.max(self.g).max(self.b);
        let min = self.r.min(self.g).min(self.b);
        let l = (max + min) / 2.0;
        let delta = max - min;
        if delta == 0.0 {
            return (0.0, 0.0, l * 100.0);
        }
        let s = delta / (1.0 - (2.0 * l - 1.0).abs());
        let h = if max == self.r {
            60.0 * ((self.g - self.b) / delta).rem_euclid(6.0)
        } else if max == self.g {
            60.0 * ((self.b - self.r) / delta + 2.0)
        } else {
            60.0 * ((self.r - self.g) / delta + 4.0)
        };
        (h.rem_euclid(360.0), s * 100.0, l * 100.0)
    }

    pub fn from_hsl(h: f64, s: f64, l: f64) -> Self {
        let s = (s / 100.0).clamp(0.0, 1.0);
        let l = (l / 100.0).clamp(0.0, 1.0);
        let c = (1.0 - (2.0 * l - 1.0).abs()) * s;
        let hp = h.rem_euclid(360.0) / 60.0;
        let x = c * (1.0 - (hp.rem_euclid(2.0) - 1.0).abs());
        let (r, g, b) = match hp as u32 {
            0 => (c, x, 0.0),
            1 => (x, c, 0.0),
            2 => (0.0, c, x),
            3 => (0.0, x, c),
            4 => (x, 0.0, c),
            _ => (c, 0.0, x),
        };
        let m = l - c / 2.0;
        Rgb {
            r: r + m,
            g: g + m,
            b: b + m,
        }
    }

    pub fn saturation(self) -> f64 {
        self.to_hsl().1
    }
}

impl fmt::Display for Rgb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl Serialize for Rgb {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for Rgb {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let token = String::deserialize(deserializer)?;
        Rgb::parse(&token).map_err(serde::de::Error::custom)
    }
}

/// Shade of `color` for a stream nested `depth` levels deep.
///
/// Depth 0 is the color itself. Odd depths are 12 lightness points lighter and
/// even depths 12 points darker, so adjacent nesting levels always differ.
/// Hue and saturation are kept.
pub fn nested_shade(color: Rgb, depth: u32) -> Rgb {
    if depth == 0 {
        return color;
    }
    let (h, s, l) = color.to_hsl();
    let shift = if depth % 2 == 1 {
        NEST_LIGHTNESS_STEP
    } else {
        -NEST_LIGHTNESS_STEP
    };
    Rgb::from_hsl(h, s, (l + shift).clamp(0.0, 100.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shorthand_hex_expands() {
        assert_eq!(Rgb::parse("#D73").unwrap().to_hex(), "#DD7733");
        assert_eq!(Rgb::parse("#dd7733").unwrap().to_hex(), "#DD7733");
    }

    #[test]
    fn named_colors_resolve() {
        assert_eq!(Rgb::parse("blue").unwrap().to_hex(), "#0000FF");
        assert_eq!(Rgb::parse("purple").unwrap().to_hex(), "#800080");
        assert_eq!(Rgb::parse("RebeccaPurple").unwrap().to_hex(), "#663399");
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["", "#12", "#12345", "#GGG", "notacolor", "rgb(1,2,3)"] {
            assert!(Rgb::parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn depth_zero_is_identity() {
        let c = Rgb::parse("#DD7733").unwrap();
        assert_eq!(nested_shade(c, 0), c);
        assert_eq!(nested_shade(c, 0).to_hex(), "#DD7733");
    }

    #[test]
    fn hsl_round_trip() {
        for hex in ["#DD7733", "#0000FF", "#800080", "#123456", "#FFFFFF", "#000000"] {
            let c = Rgb::parse(hex).unwrap();
            let (h, s, l) = c.to_hsl();
            assert_eq!(Rgb::from_hsl(h, s, l).to_hex(), hex);
        }
    }

    #[test]
    fn shading_alternates_direction() {
        let c = Rgb::parse("#DD7733").unwrap();
        let (_, _, l0) = c.to_hsl();
        let (_, _, l1) = nested_shade(c, 1).to_hsl();
        let (_, _, l2) = nested_shade(c, 2).to_hsl();
        assert!((l1 - (l0 + 12.0)).abs() < 1e-9);
        assert!((l2 - (l0 - 12.0)).abs() < 1e-9);
    }
}
