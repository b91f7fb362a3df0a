//! Embedded 5×7 bitmap font, scaled with nearest-neighbour sampling.
//!
//! Shipping the atlas inside the crate keeps rendered labels identical on
//! every machine.

use crate::error::{Error, Result};

const ATLAS_W: u32 = 5;
const ATLAS_H: u32 = 7;

/// Rows top to bottom; bit 4 is the leftmost column.
pub fn atlas_entry(c: char) -> Option<[u8; 7]> {
    let rows = match c {
        '0' => [0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E],
        '1' => [0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E],
        '2' => [0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F],
        '3' => [0x1F, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0E],
        '4' => [0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02],
        '5' => [0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E],
        '6' => [0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E],
        '7' => [0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08],
        '8' => [0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E],
        '9' => [0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C],
        'A' => [0x0E, 0x11, 0x11, 0x11, 0x1F, 0x11, 0x11],
        'B' => [0x1E, 0x11, 0x11, 0x1E, 0x11, 0x11, 0x1E],
        'C' => [0x0E, 0x11, 0x10, 0x10, 0x10, 0x11, 0x0E],
        'D' => [0x1C, 0x12, 0x11, 0x11, 0x11, 0x12, 0x1C],
        'E' => [0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x1F],
        'F' => [0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x10],
        'G' => [0x0E, 0x11, 0x10, 0x17, 0x11, 0x11, 0x0F],
        'H' => [0x11, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11],
        'I' => [0x0E, 0x04, 0x04, 0x04, 0x04, 0x04, 0x0E],
        'J' => [0x07, 0x02, 0x02, 0x02, 0x02, 0x12, 0x0C],
        'K' => [0x11, 0x12, 0x14, 0x18, 0x14, 0x12, 0x11],
        'L' => [0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x1F],
        'M' => [0x11, 0x1B, 0x15, 0x15, 0x11, 0x11, 0x11],
        'N' => [0x11, 0x11, 0x19, 0x15, 0x13, 0x11, 0x11],
        'O' => [0x0E, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E],
        'P' => [0x1E, 0x11, 0x11, 0x1E, 0x10, 0x10, 0x10],
        'Q' => [0x0E, 0x11, 0x11, 0x11, 0x15, 0x12, 0x0D],
        'R' => [0x1E, 0x11, 0x11, 0x1E, 0x14, 0x12, 0x11],
        'S' => [0x0F, 0x10, 0x10, 0x0E, 0x01, 0x01, 0x1E],
        'T' => [0x1F, 0x04, 0x04, 0x04, 0x04, 0x04, 0x04],
        'U' => [0x11, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E],
        'V' => [0x11, 0x11, 0x11, 0x11, 0x11, 0x0A, 0x04],
        'W' => [0x11, 0x11, 0x11, 0x15, 0x15, 0x15, 0x0A],
        'X' => [0x11, 0x11, 0x0A, 0x04, 0x0A, 0x11, 0x11],
        'Y' => [0x11, 0x11, 0x11, 0x0A, 0x04, 0x04, 0x04],
        'Z' => [0x1F, 0x01, 0x02, 0x04, 0x08, 0x10, 0x1F],
        _ => return None,
    };
    Some(rows)
}

/// A glyph scaled to a font size; `bits` is row-major, `true` = ink.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlyphRaster {
    pub width: u32,
    pub height: u32,
    pub bits: Vec<bool>,
}

/// Glyph cell size for a font size: height equals the font size.
pub fn glyph_size(font_size: u32) -> (u32, u32) {
    (((font_size * ATLAS_W + ATLAS_H / 2) / ATLAS_H).max(1), font_size)
}

/// Horizontal gap between glyphs.
pub fn glyph_gap(font_size: u32) -> u32 {
    (font_size / ATLAS_H).max(1)
}

pub fn glyph(c: char, font_size: u32) -> Result<GlyphRaster> {
    let rows = atlas_entry(c).ok_or(Error::FontUnavailable(c))?;
    let (width, height) = glyph_size(font_size);
    let mut bits = Vec::with_capacity((width * height) as usize);
    for y in 0..height {
        let sy = (y * ATLAS_H / height) as usize;
        for x in 0..width {
            let sx = x * ATLAS_W / width;
            bits.push(rows[sy] >> (ATLAS_W - 1 - sx) & 1 == 1);
        }
    }
    Ok(GlyphRaster { width, height, bits })
}

/// Width of a laid-out string.
pub fn text_width(text: &str, font_size: u32) -> u32 {
    let n = text.chars().count() as u32;
    if n == 0 {
        return 0;
    }
    let (w, _) = glyph_size(font_size);
    n * w + (n - 1) * glyph_gap(font_size)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn native_size_reproduces_atlas() {
        let g = glyph('A', 7).unwrap();
        assert_eq!((g.width, g.height), (5, 7));
        let rows = atlas_entry('A').unwrap();
        for (y, row) in rows.iter().enumerate() {
            for x in 0..5 {
                assert_eq!(g.bits[y * 5 + x], row >> (4 - x) & 1 == 1);
            }
        }
    }

    #[test]
    fn every_glyph_has_ink_and_fits_cell() {
        for c in ('0'..='9').chain('A'..='Z') {
            let rows = atlas_entry(c).unwrap();
            assert!(rows.iter().all(|r| *r < 32), "{c}");
            assert!(rows.iter().any(|r| *r != 0), "{c}");
            for fs in [4, 8, 12, 16, 24] {
                let g = glyph(c, fs).unwrap();
                assert_eq!(g.bits.len() as u32, g.width * g.height);
                assert!(g.bits.iter().any(|b| *b));
            }
        }
    }

    #[test]
    fn unknown_glyph() {
        assert!(matches!(glyph('?', 12), Err(Error::FontUnavailable('?'))));
    }

    #[test]
    fn layout_widths() {
        assert_eq!(glyph_size(12), (9, 12));
        assert_eq!(text_width("1", 12), 9);
        assert_eq!(text_width("REF", 12), 29);
        assert_eq!(text_width("", 12), 0);
    }
}
