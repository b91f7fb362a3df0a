//! Compresses a photo-like image at each standard level and reports size and PSNR.

use vpeval::jpeg::{apply, decode_rgb, psnr, subsampling_for};
use vpeval::marker::encode_png;
use vpeval::synth::photo_like;
use vpeval::Compression;

fn main() -> vpeval::Result<()> {
    let img = photo_like(512, 512, 3);
    let png = encode_png(&img)?;
    for level in Compression::standard_levels() {
        let out = apply(&png, level)?;
        match level {
            Compression::Passthrough => println!("{:<12} {:>8} bytes  identical={}", level.suffix(), out.len(), out == png),
            Compression::Jpeg(q) => println!(
                "{:<12} {:>8} bytes  {:?}  PSNR {:.2} dB",
                level.suffix(),
                out.len(),
                subsampling_for(q),
                psnr(&img, &decode_rgb(&out)?)
            ),
        }
    }
    Ok(())
}
