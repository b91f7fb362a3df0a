use image::{Rgb, RgbImage};

use super::font;
use super::style::{LabelPosition, MarkerStyle, Shape};
use crate::error::{Error, Result};

const OUTLINE: Rgb<u8> = Rgb([0, 0, 0]);
/// Pixels between the marker edge and the nearest label row.
pub const LABEL_GAP: i64 = 2;

/// Inclusive pixel rectangle; may extend past the image.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rect {
    pub x0: i64,
    pub y0: i64,
    pub x1: i64,
    pub y1: i64,
}

impl Rect {
    pub fn contains(&self, x: i64, y: i64) -> bool {
        (self.x0..=self.x1).contains(&x) && (self.y0..=self.y1).contains(&y)
    }

    pub fn union(&self, o: &Rect) -> Rect {
        Rect {
            x0: self.x0.min(o.x0),
            y0: self.y0.min(o.y0),
            x1: self.x1.max(o.x1),
            y1: self.y1.max(o.y1),
        }
    }
}

fn center(x: f64, y: f64) -> (i64, i64) {
    (x.round() as i64, y.round() as i64)
}

fn label_origin(cx: i64, cy: i64, text: &str, style: &MarkerStyle) -> (i64, i64) {
    let width = i64::from(font::text_width(text, style.font_size));
    let height = i64::from(style.font_size);
    let r = i64::from(style.radius);
    let x0 = cx - width / 2;
    let y0 = match style.label_position {
        LabelPosition::Above => cy - r - LABEL_GAP - height,
        LabelPosition::Below => cy + r + LABEL_GAP + 1,
    };
    (x0, y0)
}

/// Region a marker and its label can touch.
pub fn marker_bounds(x: f64, y: f64, text: &str, style: &MarkerStyle) -> Rect {
    let (cx, cy) = center(x, y);
    let r = i64::from(style.radius);
    let shape = Rect { x0: cx - r, y0: cy - r, x1: cx + r, y1: cy + r };
    if text.is_empty() {
        return shape;
    }
    let (lx, ly) = label_origin(cx, cy, text, style);
    let label = Rect {
        x0: lx,
        y0: ly,
        x1: lx + i64::from(font::text_width(text, style.font_size)) - 1,
        y1: ly + i64::from(style.font_size) - 1,
    };
    shape.union(&label)
}

fn inside(shape: Shape, dx: i64, dy: i64, r: i64) -> bool {
    match shape {
        Shape::Circle => dx * dx + dy * dy <= r * r,
        Shape::Square => dx.abs() <= r && dy.abs() <= r,
    }
}

fn put(img: &mut RgbImage, x: i64, y: i64, c: Rgb<u8>) {
    if x >= 0 && y >= 0 && x < i64::from(img.width()) && y < i64::from(img.height()) {
        img.put_pixel(x as u32, y as u32, c);
    }
}

/// Draws one marker with hard edges; parts falling off the image are clipped.
pub fn draw_marker(img: &mut RgbImage, x: f64, y: f64, text: &str, style: &MarkerStyle) -> Result<()> {
    let (w, h) = img.dimensions();
    if !(x >= 0.0 && y >= 0.0 && x < f64::from(w) && y < f64::from(h)) {
        return Err(Error::PointOutOfBounds {
            image: String::new(),
            x,
            y,
            width: w,
            height: h,
        });
    }
    // Validate every glyph before touching pixels.
    let glyphs = text
        .chars()
        .map(|c| font::glyph(c, style.font_size))
        .collect::<Result<Vec<_>>>()?;

    let (cx, cy) = center(x, y);
    let r = i64::from(style.radius);
    let inner = r - i64::from(style.outline_width);
    let fill = Rgb(style.fill_color);
    for dy in -r..=r {
        for dx in -r..=r {
            if !inside(style.shape, dx, dy, r) {
                continue;
            }
            let rim = style.outline_width > 0 && !inside(style.shape, dx, dy, inner);
            put(img, cx + dx, cy + dy, if rim { OUTLINE } else { fill });
        }
    }

    let (mut gx, gy) = label_origin(cx, cy, text, style);
    let ink = Rgb(style.label_color);
    let gap = i64::from(font::glyph_gap(style.font_size));
    for g in &glyphs {
        for row in 0..g.height {
            for col in 0..g.width {
                if g.bits[(row * g.width + col) as usize] {
                    put(img, gx + i64::from(col), gy + i64::from(row), ink);
                }
            }
        }
        gx += i64::from(g.width) + gap;
    }
    Ok(())
}
