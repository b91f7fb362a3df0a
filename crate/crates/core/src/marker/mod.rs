//! Marker styles and deterministic rasterisation of visual prompts.
//!
//! Rendering is hard-edged (no anti-aliasing) and uses an embedded bitmap
//! font, so identical inputs give identical pixel buffers on any platform.

pub mod font;
mod raster;
mod style;

use image::RgbImage;

pub use raster::{draw_marker, marker_bounds, Rect, LABEL_GAP};
pub use style::{
    canonical_style_set, default_style, LabelPosition, LabelScheme, MarkerStyle, Shape, StyleSet,
    BLUE, DEFAULT_FONT_SIZE, DEFAULT_RADIUS, LARGE_RADIUS, RED, SMALL_FONT_SIZE,
};

use crate::error::{Error, Result};
use crate::model::TaskItem;
use crate::store::ImageStore;

/// Text drawn next to each point of `item`, in point order.
///
/// Candidates are numbered in order of appearance; the reference point of a
/// correspondence item gets the scheme's reference text.
pub fn point_texts(item: &TaskItem, scheme: LabelScheme) -> Vec<String> {
    let mut k = 0;
    item.points
        .iter()
        .map(|p| {
            if p.is_reference {
                scheme.reference_text().to_string()
            } else {
                k += 1;
                scheme.candidate_text(k - 1)
            }
        })
        .collect()
}

/// `(choice label, displayed text)` for every candidate, in point order.
pub fn display_labels(item: &TaskItem, scheme: LabelScheme) -> Vec<(String, String)> {
    item.points
        .iter()
        .zip(point_texts(item, scheme))
        .filter(|(p, _)| !p.is_reference)
        .map(|(p, t)| (p.label.clone(), t))
        .collect()
}

/// Draws every point of `item` onto copies of its clean images.
pub fn render_item(item: &TaskItem, style: &MarkerStyle, store: &dyn ImageStore) -> Result<Vec<RgbImage>> {
    let mut images = item
        .images
        .iter()
        .map(|p| store.load(p))
        .collect::<Result<Vec<_>>>()?;
    let texts = point_texts(item, style.label_scheme);
    for (p, text) in item.points.iter().zip(&texts) {
        let img = images.get_mut(p.image_index).ok_or_else(|| {
            Error::ConfigInvalid(format!("item {}: point refers to missing image {}", item.id, p.image_index))
        })?;
        draw_marker(img, p.x, p.y, text, style).map_err(|e| match e {
            Error::PointOutOfBounds { x, y, width, height, .. } => Error::PointOutOfBounds {
                image: item.images[p.image_index].clone(),
                x,
                y,
                width,
                height,
            },
            other => other,
        })?;
    }
    Ok(images)
}

/// PNG encoding of a rendered image.
pub fn encode_png(img: &RgbImage) -> Result<Vec<u8>> {
    let mut out = std::io::Cursor::new(Vec::new());
    img.write_to(&mut out, image::ImageFormat::Png)
        .map_err(|e| Error::UndecodableImage(e.to_string()))?;
    Ok(out.into_inner())
}
