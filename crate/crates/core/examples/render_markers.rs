//! Renders one synthetic item under every canonical marker style.
//!
//! `cargo run --example render_markers -- [out_dir]`

use vpeval::marker::{canonical_style_set, encode_png, render_item};
use vpeval::synth::synthetic_dataset;

fn main() -> vpeval::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "target/example-markers".into());
    std::fs::create_dir_all(&out).expect("create output dir");
    let (dataset, store) = synthetic_dataset("demo", 3, 192, 7);
    let item = &dataset.items[2];
    for style in canonical_style_set().all() {
        for (k, img) in render_item(item, style, &store)?.iter().enumerate() {
            let path = format!("{out}/{}_{k}.png", style.style_id);
            std::fs::write(&path, encode_png(img)?).expect("write png");
        }
        println!("{:<18} shape={:?} radius={} font={}", style.style_id, style.shape, style.radius, style.font_size);
    }
    println!("wrote stimuli for {} to {out}", item.id);
    Ok(())
}
