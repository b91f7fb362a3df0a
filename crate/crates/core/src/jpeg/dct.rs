//! Integer forward DCT (the "islow" algorithm of the IJG reference code).
//!
//! Output coefficients are scaled up by 8 relative to a true orthonormal
//! 2-D DCT-II; quantisation divides that factor back out. Integer
//! arithmetic makes the transform bit-exact across platforms.

const CONST_BITS: i32 = 13;
const PASS1_BITS: i32 = 2;

const FIX_0_298631336: i32 = 2446;
const FIX_0_390180644: i32 = 3196;
const FIX_0_541196100: i32 = 4433;
const FIX_0_765366865: i32 = 6270;
const FIX_0_899976223: i32 = 7373;
const FIX_1_175875602: i32 = 9633;
const FIX_1_501321110: i32 = 12299;
const FIX_1_847759065: i32 = 15137;
const FIX_1_961570560: i32 = 16069;
const FIX_2_053119869: i32 = 16819;
const FIX_2_562915447: i32 = 20995;
const FIX_3_072711026: i32 = 25172;

#[inline]
fn descale(x: i32, n: i32) -> i32 {
    (x + (1 << (n - 1))) >> n
}

/// Transforms a block of level-shifted samples (range -128..=127) in place.
pub fn forward_dct(block: &mut [i32; 64]) {
    for row in 0..8 {
        let d = &mut block[row * 8..row * 8 + 8];
        let tmp0 = d[0] + d[7];
        let tmp7 = d[0] - d[7];
        let tmp1 = d[1] + d[6];
        let tmp6 = d[1] - d[6];
        let tmp2 = d[2] + d[5];
        let tmp5 = d[2] - d[5];
        let tmp3 = d[3] + d[4];
        let tmp4 = d[3] - d[4];

        let tmp10 = tmp0 + tmp3;
        let tmp13 = tmp0 - tmp3;
        let tmp11 = tmp1 + tmp2;
        let tmp12 = tmp1 - tmp2;

        d[0] = (tmp10 + tmp11) << PASS1_BITS;
        d[4] = (tmp10 - tmp11) << PASS1_BITS;
        let z1 = (tmp12 + tmp13) * FIX_0_541196100;
        d[2] = descale(z1 + tmp13 * FIX_0_765366865, CONST_BITS - PASS1_BITS);
        d[6] = descale(z1 - tmp12 * FIX_1_847759065, CONST_BITS - PASS1_BITS);

        let (o7, o5, o3, o1) = odd_part(tmp4, tmp5, tmp6, tmp7);
        d[7] = descale(o7, CONST_BITS - PASS1_BITS);
        d[5] = descale(o5, CONST_BITS - PASS1_BITS);
        d[3] = descale(o3, CONST_BITS - PASS1_BITS);
        d[1] = descale(o1, CONST_BITS - PASS1_BITS);
    }
    for col in 0..8 {
        let at = |r: usize| r * 8 + col;
        let tmp0 = block[at(0)] + block[at(7)];
        let tmp7 = block[at(0)] - block[at(7)];
        let tmp1 = block[at(1)] + block[at(6)];
        let tmp6 = block[at(1)] - block[at(6)];
        let tmp2 = block[at(2)] + block[at(5)];
        let tmp5 = block[at(2)] - block[at(5)];
        let tmp3 = block[at(3)] + block[at(4)];
        let tmp4 = block[at(3)] - block[at(4)];

        let tmp10 = tmp0 + tmp3;
        let tmp13 = tmp0 - tmp3;
        let tmp11 = tmp1 + tmp2;
        let tmp12 = tmp1 - tmp2;

        block[at(0)] = descale(tmp10 + tmp11, PASS1_BITS);
        block[at(4)] = descale(tmp10 - tmp11, PASS1_BITS);
        let z1 = (tmp12 + tmp13) * FIX_0_541196100;
        block[at(2)] = descale(z1 + tmp13 * FIX_0_765366865, CONST_BITS + PASS1_BITS);
        block[at(6)] = descale(z1 - tmp12 * FIX_1_847759065, CONST_BITS + PASS1_BITS);

        let (o7, o5, o3, o1) = odd_part(tmp4, tmp5, tmp6, tmp7);
        block[at(7)] = descale(o7, CONST_BITS + PASS1_BITS);
        block[at(5)] = descale(o5, CONST_BITS + PASS1_BITS);
        block[at(3)] = descale(o3, CONST_BITS + PASS1_BITS);
        block[at(1)] = descale(o1, CONST_BITS + PASS1_BITS);
    }
}

fn odd_part(tmp4: i32, tmp5: i32, tmp6: i32, tmp7: i32) -> (i32, i32, i32, i32) {
    let z1 = tmp4 + tmp7;
    let z2 = tmp5 + tmp6;
    let z3 = tmp4 + tmp6;
    let z4 = tmp5 + tmp7;
    let z5 = (z3 + z4) * FIX_1_175875602;

    let t4 = tmp4 * FIX_0_298631336;
    let t5 = tmp5 * FIX_2_053119869;
    let t6 = tmp6 * FIX_3_072711026;
    let t7 = tmp7 * FIX_1_501321110;
    let z1 = -z1 * FIX_0_899976223;
    let z2 = -z2 * FIX_2_562915447;
    let z3 = -z3 * FIX_1_961570560 + z5;
    let z4 = -z4 * FIX_0_390180644 + z5;

    (t4 + z1 + z3, t5 + z2 + z4, t6 + z2 + z3, t7 + z1 + z4)
}
