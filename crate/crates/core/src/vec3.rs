//! Small helpers for complex 3-vectors stored as `[Complex64; 3]`.

use num_complex::Complex64;

pub type CVec3 = [Complex64; 3];

pub const ZERO: CVec3 = [Complex64::new(0.0, 0.0); 3];

/// Bilinear dot product (no conjugation).
#[inline]
pub fn dot(a: &CVec3, b: &CVec3) -> Complex64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Hermitian pairing `a · b̄`.
#[inline]
pub fn dot_conj(a: &CVec3, b: &CVec3) -> Complex64 {
    a[0] * b[0].conj() + a[1] * b[1].conj() + a[2] * b[2].conj()
}

#[inline]
pub fn cross(a: &CVec3, b: &CVec3) -> CVec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub fn scale(s: Complex64, a: &CVec3) -> CVec3 {
    [s * a[0], s * a[1], s * a[2]]
}

#[inline]
pub fn add(a: &CVec3, b: &CVec3) -> CVec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn sub(a: &CVec3, b: &CVec3) -> CVec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn norm_sqr(a: &CVec3) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}

#[inline]
pub fn norm(a: &CVec3) -> f64 {
    norm_sqr(a).sqrt()
}

/// `e₃ × a`.
#[inline]
pub fn e3_cross(a: &CVec3) -> CVec3 {
    [-a[1], a[0], Complex64::new(0.0, 0.0)]
}

#[inline]
pub fn real(a: [f64; 3]) -> CVec3 {
    [a[0].into(), a[1].into(), a[2].into()]
}
