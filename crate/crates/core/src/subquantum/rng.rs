//! Philox4x32-10 counter-based generator (Salmon et al., SC'11).
//!
//! Every draw is a pure function of `(seed, walker, step)`, so walker
//! updates can run in any order on any number of threads.

use std::f64::consts::PI;

const M0: u32 = 0xD251_1F53;
const M1: u32 = 0xCD9E_8D57;
const W0: u32 = 0x9E37_79B9;
const W1: u32 = 0xBB67_AE85;

#[inline]
fn mulhilo(a: u32, b: u32) -> (u32, u32) {
    let p = a as u64 * b as u64;
    ((p >> 32) as u32, p as u32)
}

#[inline]
fn round(c: [u32; 4], k: [u32; 2]) -> [u32; 4] {
    let (hi0, lo0) = mulhilo(M0, c[0]);
    let (hi1, lo1) = mulhilo(M1, c[2]);
    [hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0]
}

/// The raw 10-round Philox4x32 bijection.
pub fn philox4x32_10(counter: [u32; 4], key: [u32; 2]) -> [u32; 4] {
    let mut c = counter;
    let mut k = key;
    for r in 0..10 {
        if r > 0 {
            k = [k[0].wrapping_add(W0), k[1].wrapping_add(W1)];
        }
        c = round(c, k);
    }
    c
}

/// Two 64-bit words for the counter `(walker, step)` under `seed`.
#[inline]
pub fn block(seed: u64, walker: u64, step: u64) -> [u64; 2] {
    let out = philox4x32_10(
        [walker as u32, (walker >> 32) as u32, step as u32, (step >> 32) as u32],
        [seed as u32, (seed >> 32) as u32],
    );
    [(out[0] as u64) | ((out[1] as u64) << 32), (out[2] as u64) | ((out[3] as u64) << 32)]
}

/// Maps the top 52 bits to the open interval `(0, 1)`.
#[inline]
pub fn to_unit(x: u64) -> f64 {
    ((x >> 12) as f64 + 0.5) * (1.0 / (1u64 << 52) as f64)
}

#[inline]
pub fn uniforms(seed: u64, walker: u64, step: u64) -> [f64; 2] {
    let [a, b] = block(seed, walker, step);
    [to_unit(a), to_unit(b)]
}

/// Two independent standard normals by Box–Muller.
#[inline]
pub fn normals(seed: u64, walker: u64, step: u64) -> [f64; 2] {
    let [u1, u2] = uniforms(seed, walker, step);
    let r = (-2.0 * u1.ln()).sqrt();
    let (s, c) = (2.0 * PI * u2).sin_cos();
    [r * c, r * s]
}

#[cfg(test)]
mod tests {
    use super::*;

    // Known-answer vectors from the Random123 distribution.
    #[test]
    fn known_answers() {
        assert_eq!(philox4x32_10([0; 4], [0; 2]), [0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8]);
        assert_eq!(philox4x32_10([u32::MAX; 4], [u32::MAX; 2]), [0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd]);
        assert_eq!(
            philox4x32_10([0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344], [0xa4093822, 0x299f31d0]),
            [0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1]
        );
    }

    #[test]
    fn unit_interval_is_open() {
        assert!(to_unit(0) > 0.0);
        assert!(to_unit(u64::MAX) < 1.0);
    }

    #[test]
    fn normal_moments() {
        let n = 200_000u64;
        let (mut s1, mut s2) = (0.0, 0.0);
        for w in 0..n {
            for z in normals(7, w, 3) {
                s1 += z;
                s2 += z * z;
            }
        }
        let m = s1 / (2 * n) as f64;
        let v = s2 / (2 * n) as f64 - m * m;
        assert!(m.abs() < 5.0 / (2.0 * n as f64).sqrt());
        assert!((v - 1.0).abs() < 0.01);
    }
}
