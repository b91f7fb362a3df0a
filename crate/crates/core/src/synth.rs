//! Procedural fixtures: photo-like images and small synthetic datasets.
//!
//! Used by tests, examples and offline runs; nothing here touches the network.

use std::path::Path;

use image::{Rgb, RgbImage};

use crate::error::{Error, Result};
use crate::marker::encode_png;
use crate::model::{AnnotatedPoint, EvalDataset, TaskItem, TaskKind};
use crate::rng;
use crate::store::MemStore;

/// A smooth, textured RGB image: gradients, a few soft blobs and mild noise.
pub fn photo_like(width: u32, height: u32, seed: u64) -> RgbImage {
    let blobs: Vec<(f64, f64, f64, [f64; 3])> = (0..5u64)
        .map(|b| {
            let u = |k: u64| rng::unit(seed, "synth.blob", &[b, k]);
            (
                u(0) * f64::from(width),
                u(1) * f64::from(height),
                (0.1 + 0.25 * u(2)) * f64::from(width.max(height)),
                [u(3) * 160.0 - 80.0, u(4) * 160.0 - 80.0, u(5) * 160.0 - 80.0],
            )
        })
        .collect();
    let base = [
        rng::unit(seed, "synth.base", &[0]) * 120.0 + 60.0,
        rng::unit(seed, "synth.base", &[1]) * 120.0 + 60.0,
        rng::unit(seed, "synth.base", &[2]) * 120.0 + 60.0,
    ];
    RgbImage::from_fn(width, height, |x, y| {
        let (fx, fy) = (f64::from(x), f64::from(y));
        let mut px = [0u8; 3];
        for (c, out) in px.iter_mut().enumerate() {
            let mut v = base[c] + 40.0 * (fx / f64::from(width.max(1)) - 0.5) - 30.0 * (fy / f64::from(height.max(1)) - 0.5);
            for (bx, by, r, col) in &blobs {
                let d2 = ((fx - bx).powi(2) + (fy - by).powi(2)) / (r * r);
                v += col[c] * (-d2).exp();
            }
            v += 12.0 * ((fx * 0.21 + c as f64).sin() * (fy * 0.17).cos());
            v += (rng::unit(seed, "synth.noise", &[u64::from(x), u64::from(y), c as u64]) - 0.5) * 6.0;
            *out = v.round().clamp(0.0, 255.0) as u8;
        }
        Rgb(px)
    })
}

/// A mixed relative-depth / correspondence dataset over procedural images.
///
/// Every third item is a four-candidate correspondence item; the rest are
/// two-point depth items. Image paths are `images/<n>.png`.
pub fn synthetic_dataset(name: &str, n_items: usize, image_size: u32, seed: u64) -> (EvalDataset, MemStore) {
    let mut store = MemStore::new();
    let mut items = Vec::with_capacity(n_items);
    let margin = 16.0;
    let span = f64::from(image_size) - 2.0 * margin;
    let coord = |k: &[u64]| (margin + rng::unit(seed, "synth.point", k) * span).floor();
    let mut next_image = 0usize;
    let mut add_image = |store: &mut MemStore| {
        let path = format!("images/{next_image:05}.png");
        store.insert(path.clone(), photo_like(image_size, image_size, seed ^ next_image as u64));
        next_image += 1;
        path
    };
    for i in 0..n_items as u64 {
        let id = format!("{name}-{i:05}");
        let gold_pick = (rng::unit(seed, "synth.gold", &[i]) * 4.0) as usize;
        if i % 3 == 2 {
            let src = add_image(&mut store);
            let dst = add_image(&mut store);
            let labels: Vec<String> = ["A", "B", "C", "D"].iter().map(|s| s.to_string()).collect();
            let mut points = vec![AnnotatedPoint {
                image_index: 0,
                x: coord(&[i, 0]),
                y: coord(&[i, 1]),
                label: "REF".into(),
                is_reference: true,
            }];
            for (k, l) in labels.iter().enumerate() {
                points.push(AnnotatedPoint {
                    image_index: 1,
                    x: coord(&[i, 2 + 2 * k as u64]),
                    y: coord(&[i, 3 + 2 * k as u64]),
                    label: l.clone(),
                    is_reference: false,
                });
            }
            items.push(TaskItem {
                id,
                task_kind: TaskKind::SemanticCorrespondence,
                images: vec![src, dst],
                points,
                gold_label: labels[gold_pick].clone(),
                choice_labels: labels,
            });
        } else {
            let img = add_image(&mut store);
            let labels = vec!["A".to_string(), "B".to_string()];
            let points = labels
                .iter()
                .enumerate()
                .map(|(k, l)| AnnotatedPoint {
                    image_index: 0,
                    x: coord(&[i, 2 * k as u64]),
                    y: coord(&[i, 2 * k as u64 + 1]),
                    label: l.clone(),
                    is_reference: false,
                })
                .collect();
            items.push(TaskItem {
                id,
                task_kind: TaskKind::RelativeDepth,
                images: vec![img],
                points,
                gold_label: labels[gold_pick % 2].clone(),
                choice_labels: labels,
            });
        }
    }
    (EvalDataset { name: name.into(), items }, store)
}

/// Writes a manifest plus PNG images into `dir`; returns the manifest path.
pub fn write_dataset(dir: &Path, dataset: &EvalDataset, store: &MemStore) -> Result<std::path::PathBuf> {
    use crate::store::ImageStore;
    std::fs::create_dir_all(dir.join("images")).map_err(|e| Error::unwritable(dir, e))?;
    for item in &dataset.items {
        for rel in &item.images {
            let path = dir.join(rel);
            let png = encode_png(&store.load(rel)?)?;
            std::fs::write(&path, png).map_err(|e| Error::unwritable(&path, e))?;
        }
    }
    let manifest = dir.join("manifest.json");
    dataset.save(&manifest)?;
    Ok(manifest)
}
