//! Baseline sequential JPEG encoder with a pinned quality convention.
//!
//! * Annex K tables scaled by the conventional linear quality mapping.
//! * 4:2:0 chroma subsampling below quality 90, 4:4:4 from 90 up.
//! * Fixed-point colour conversion and integer DCT, so output bytes depend
//!   only on the pixels and the quality.

use image::RgbImage;

use super::dct::forward_dct;
use super::tables::*;

/// Quality from which chroma is kept at full resolution.
pub const FULL_CHROMA_FROM: u8 = 90;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsampling {
    /// 4:4:4
    None,
    /// 4:2:0
    Half,
}

pub fn subsampling_for(quality: u8) -> Subsampling {
    if quality >= FULL_CHROMA_FROM {
        Subsampling::None
    } else {
        Subsampling::Half
    }
}

struct HuffTable {
    code: [u16; 256],
    size: [u8; 256],
}

impl HuffTable {
    fn new(bits: &[u8; 16], vals: &[u8]) -> Self {
        let mut t = HuffTable { code: [0; 256], size: [0; 256] };
        let mut code: u16 = 0;
        let mut k = 0;
        for (len_minus_1, &count) in bits.iter().enumerate() {
            for _ in 0..count {
                let v = usize::from(vals[k]);
                t.code[v] = code;
                t.size[v] = len_minus_1 as u8 + 1;
                code += 1;
                k += 1;
            }
            code <<= 1;
        }
        t
    }
}

struct BitWriter {
    out: Vec<u8>,
    acc: u32,
    nbits: u32,
}

impl BitWriter {
    fn new(out: Vec<u8>) -> Self {
        BitWriter { out, acc: 0, nbits: 0 }
    }

    fn put(&mut self, code: u32, size: u32) {
        if size == 0 {
            return;
        }
        self.acc = (self.acc << size) | (code & ((1 << size) - 1));
        self.nbits += size;
        while self.nbits >= 8 {
            let byte = (self.acc >> (self.nbits - 8)) as u8;
            self.out.push(byte);
            if byte == 0xFF {
                self.out.push(0x00);
            }
            self.nbits -= 8;
        }
        self.acc &= (1 << self.nbits) - 1;
    }

    fn finish(mut self) -> Vec<u8> {
        if self.nbits > 0 {
            let pad = 8 - self.nbits;
            self.put((1 << pad) - 1, pad);
        }
        self.out
    }
}

fn marker(out: &mut Vec<u8>, code: u8, payload: &[u8]) {
    out.extend_from_slice(&[0xFF, code]);
    out.extend_from_slice(&((payload.len() + 2) as u16).to_be_bytes());
    out.extend_from_slice(payload);
}

fn rgb_to_ycbcr(r: u8, g: u8, b: u8) -> (u8, u8, u8) {
    let (r, g, b) = (i32::from(r), i32::from(g), i32::from(b));
    let y = (19595 * r + 38470 * g + 7471 * b + 32768) >> 16;
    let cb = (-11059 * r - 21709 * g + 32768 * b + (128 << 16) + 32767) >> 16;
    let cr = (32768 * r - 27439 * g - 5329 * b + (128 << 16) + 32767) >> 16;
    (y as u8, cb.clamp(0, 255) as u8, cr.clamp(0, 255) as u8)
}

/// One colour plane padded by edge replication to `width × height`.
struct Plane {
    width: usize,
    data: Vec<u8>,
}

impl Plane {
    fn block(&self, bx: usize, by: usize) -> [i32; 64] {
        let mut b = [0i32; 64];
        for y in 0..8 {
            let row = (by * 8 + y) * self.width + bx * 8;
            for x in 0..8 {
                b[y * 8 + x] = i32::from(self.data[row + x]) - 128;
            }
        }
        b
    }
}

fn quantize(block: &[i32; 64], table: &[u16; 64]) -> [i32; 64] {
    let mut out = [0i32; 64];
    for (k, &nat) in ZIGZAG.iter().enumerate() {
        let q = i32::from(table[nat]) * 8;
        let c = block[nat];
        out[k] = if c < 0 { -((-c + q / 2) / q) } else { (c + q / 2) / q };
    }
    out
}

fn magnitude(v: i32) -> (u32, u32) {
    let a = v.unsigned_abs();
    let size = 32 - a.leading_zeros();
    let mask = if size == 0 { 0 } else { (1u32 << size) - 1 };
    let bits = if v < 0 { (v - 1) as u32 & mask } else { v as u32 };
    (size, bits)
}

fn encode_block(w: &mut BitWriter, coefs: &[i32; 64], prev_dc: &mut i32, dc: &HuffTable, ac: &HuffTable) {
    let diff = coefs[0] - *prev_dc;
    *prev_dc = coefs[0];
    let (size, bits) = magnitude(diff);
    w.put(u32::from(dc.code[size as usize]), u32::from(dc.size[size as usize]));
    w.put(bits, size);

    let mut run = 0;
    for &c in &coefs[1..] {
        if c == 0 {
            run += 1;
            continue;
        }
        while run > 15 {
            w.put(u32::from(ac.code[0xF0]), u32::from(ac.size[0xF0]));
            run -= 16;
        }
        let (size, bits) = magnitude(c);
        let sym = (run << 4) as usize | size as usize;
        w.put(u32::from(ac.code[sym]), u32::from(ac.size[sym]));
        w.put(bits, size);
        run = 0;
    }
    if run > 0 {
        w.put(u32::from(ac.code[0x00]), u32::from(ac.size[0x00]));
    }
}

/// Encodes an RGB image as a baseline JFIF stream at `quality` (clamped to 1..=100).
pub fn encode_rgb(img: &RgbImage, quality: u8) -> Vec<u8> {
    let quality = quality.clamp(1, 100);
    let (width, height) = (img.width() as usize, img.height() as usize);
    let sub = subsampling_for(quality);
    let mcu = if sub == Subsampling::Half { 16 } else { 8 };
    let mcus_x = width.div_ceil(mcu).max(1);
    let mcus_y = height.div_ceil(mcu).max(1);
    let pw = mcus_x * mcu;
    let ph = mcus_y * mcu;

    let mut y_plane = vec![0u8; pw * ph];
    let mut cb_full = vec![0u8; pw * ph];
    let mut cr_full = vec![0u8; pw * ph];
    for py in 0..ph {
        let sy = py.min(height.saturating_sub(1)) as u32;
        for px in 0..pw {
            let sx = px.min(width.saturating_sub(1)) as u32;
            let p = if width == 0 || height == 0 { [0, 0, 0] } else { img.get_pixel(sx, sy).0 };
            let (y, cb, cr) = rgb_to_ycbcr(p[0], p[1], p[2]);
            let k = py * pw + px;
            y_plane[k] = y;
            cb_full[k] = cb;
            cr_full[k] = cr;
        }
    }
    let luma = Plane { width: pw, data: y_plane };
    let (cb, cr) = match sub {
        Subsampling::None => (Plane { width: pw, data: cb_full }, Plane { width: pw, data: cr_full }),
        Subsampling::Half => {
            let (cw, ch) = (pw / 2, ph / 2);
            let down = |src: &[u8]| {
                let mut d = vec![0u8; cw * ch];
                for y in 0..ch {
                    for x in 0..cw {
                        let a = (2 * y) * pw + 2 * x;
                        let s = u32::from(src[a]) + u32::from(src[a + 1]) + u32::from(src[a + pw]) + u32::from(src[a + pw + 1]);
                        d[y * cw + x] = ((s + 2) >> 2) as u8;
                    }
                }
                Plane { width: cw, data: d }
            };
            (down(&cb_full), down(&cr_full))
        }
    };

    let lq = scaled(&LUMA_QUANT, quality);
    let cq = scaled(&CHROMA_QUANT, quality);

    let mut out = Vec::with_capacity(width * height / 2 + 1024);
    out.extend_from_slice(&[0xFF, 0xD8]);
    marker(&mut out, 0xE0, &[b'J', b'F', b'I', b'F', 0, 1, 1, 0, 0, 1, 0, 1, 0, 0]);
    let mut dqt = Vec::with_capacity(130);
    for (id, table) in [(0u8, &lq), (1u8, &cq)] {
        dqt.push(id);
        dqt.extend(ZIGZAG.iter().map(|&n| table[n] as u8));
    }
    marker(&mut out, 0xDB, &dqt);
    let luma_sampling = if sub == Subsampling::Half { 0x22 } else { 0x11 };
    let mut sof = vec![8];
    sof.extend_from_slice(&(height as u16).to_be_bytes());
    sof.extend_from_slice(&(width as u16).to_be_bytes());
    sof.extend_from_slice(&[3, 1, luma_sampling, 0, 2, 0x11, 1, 3, 0x11, 1]);
    marker(&mut out, 0xC0, &sof);
    let mut dht = Vec::new();
    for (class_id, bits, vals) in [
        (0x00u8, &DC_LUMA_BITS, &DC_LUMA_VALS[..]),
        (0x10, &AC_LUMA_BITS, &AC_LUMA_VALS[..]),
        (0x01, &DC_CHROMA_BITS, &DC_CHROMA_VALS[..]),
        (0x11, &AC_CHROMA_BITS, &AC_CHROMA_VALS[..]),
    ] {
        dht.push(class_id);
        dht.extend_from_slice(bits);
        dht.extend_from_slice(vals);
    }
    marker(&mut out, 0xC4, &dht);
    marker(&mut out, 0xDA, &[3, 1, 0x00, 2, 0x11, 3, 0x11, 0, 63, 0]);

    let dc_l = HuffTable::new(&DC_LUMA_BITS, &DC_LUMA_VALS);
    let ac_l = HuffTable::new(&AC_LUMA_BITS, &AC_LUMA_VALS);
    let dc_c = HuffTable::new(&DC_CHROMA_BITS, &DC_CHROMA_VALS);
    let ac_c = HuffTable::new(&AC_CHROMA_BITS, &AC_CHROMA_VALS);

    let mut w = BitWriter::new(out);
    let (mut py, mut pcb, mut pcr) = (0, 0, 0);
    let luma_blocks = mcu / 8;
    for my in 0..mcus_y {
        for mx in 0..mcus_x {
            for by in 0..luma_blocks {
                for bx in 0..luma_blocks {
                    let mut b = luma.block(mx * luma_blocks + bx, my * luma_blocks + by);
                    forward_dct(&mut b);
                    encode_block(&mut w, &quantize(&b, &lq), &mut py, &dc_l, &ac_l);
                }
            }
            for (plane, prev) in [(&cb, &mut pcb), (&cr, &mut pcr)] {
                let mut b = plane.block(mx, my);
                forward_dct(&mut b);
                encode_block(&mut w, &quantize(&b, &cq), prev, &dc_c, &ac_c);
            }
        }
    }
    let mut out = w.finish();
    out.extend_from_slice(&[0xFF, 0xD9]);
    out
}
