//! The compression stage between rendering and inference.

mod dct;
pub mod encoder;
pub mod tables;

use std::collections::BTreeMap;

use image::RgbImage;

pub use crate::model::Compression as CompressionSetting;
pub use encoder::{encode_rgb, subsampling_for, Subsampling};

use crate::error::{Error, Result};

pub fn decode_rgb(bytes: &[u8]) -> Result<RgbImage> {
    image::load_from_memory(bytes)
        .map(|img| img.to_rgb8())
        .map_err(|e| Error::UndecodableImage(e.to_string()))
}

/// Applies one setting to an encoded image.
///
/// Passthrough returns the input untouched without decoding it.
pub fn apply(bytes: &[u8], setting: CompressionSetting) -> Result<Vec<u8>> {
    match setting {
        CompressionSetting::Passthrough => Ok(bytes.to_vec()),
        CompressionSetting::Jpeg(q) => Ok(encode_rgb(&decode_rgb(bytes)?, q)),
    }
}

/// Applies every setting independently to the same images.
pub fn sweep(
    images: &[Vec<u8>],
    settings: &[CompressionSetting],
) -> Result<BTreeMap<CompressionSetting, Vec<Vec<u8>>>> {
    let mut out = BTreeMap::new();
    for &s in settings {
        if out.contains_key(&s) {
            continue;
        }
        let encoded = images.iter().map(|img| apply(img, s)).collect::<Result<Vec<_>>>()?;
        out.insert(s, encoded);
    }
    Ok(out)
}

/// MIME type of the bytes a setting produces, given the source MIME type.
pub fn mime_for(setting: CompressionSetting, source: &'static str) -> &'static str {
    match setting {
        CompressionSetting::Passthrough => source,
        CompressionSetting::Jpeg(_) => "image/jpeg",
    }
}

/// Peak signal-to-noise ratio over all RGB channels, in dB.
pub fn psnr(a: &RgbImage, b: &RgbImage) -> f64 {
    assert_eq!(a.dimensions(), b.dimensions());
    let se: f64 = a
        .as_raw()
        .iter()
        .zip(b.as_raw())
        .map(|(&x, &y)| (f64::from(x) - f64::from(y)).powi(2))
        .sum();
    let mse = se / a.as_raw().len() as f64;
    if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (255.0f64 * 255.0 / mse).log10()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::marker::encode_png;

    fn gradient(w: u32, h: u32) -> RgbImage {
        RgbImage::from_fn(w, h, |x, y| image::Rgb([(x * 255 / w) as u8, (y * 255 / h) as u8, ((x + y) % 256) as u8]))
    }

    #[test]
    fn passthrough_is_identity_on_any_bytes() {
        let junk = b"definitely not an image".to_vec();
        assert_eq!(apply(&junk, CompressionSetting::Passthrough).unwrap(), junk);
    }

    #[test]
    fn jpeg_rejects_garbage() {
        assert!(matches!(apply(b"nope", CompressionSetting::Jpeg(70)), Err(Error::UndecodableImage(_))));
    }

    #[test]
    fn decodes_with_independent_decoder() {
        for (w, h) in [(1, 1), (7, 5), (16, 16), (33, 17), (64, 48)] {
            let img = gradient(w, h);
            for q in [10, 70, 89, 90, 100] {
                let bytes = encode_rgb(&img, q);
                let back = decode_rgb(&bytes).unwrap();
                assert_eq!(back.dimensions(), (w, h));
                if q == 100 && w >= 16 {
                    assert!(psnr(&img, &back) > 30.0, "{w}x{h} q{q}");
                }
            }
        }
    }

    #[test]
    fn sweep_shapes() {
        let png = encode_png(&gradient(32, 32)).unwrap();
        let imgs = vec![png.clone()];
        let one = sweep(&imgs, &[CompressionSetting::Passthrough]).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(one[&CompressionSetting::Passthrough][0], png);
        assert_eq!(sweep(&imgs, &CompressionSetting::standard_levels()).unwrap().len(), 4);
        assert!(sweep(&imgs, &[]).unwrap().is_empty());
    }
}
