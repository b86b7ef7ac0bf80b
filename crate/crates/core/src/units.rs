//! Boundary unit conversions.

pub const NM: f64 = 1e-9;
pub const GAUSS: f64 = 1e-4;
/// 1 G/Å = 1e-4 T / 1e-10 m.
pub const GAUSS_PER_ANGSTROM: f64 = 1e6;
/// 1 G/nm = 1e-4 T / 1e-9 m.
pub const GAUSS_PER_NM: f64 = 1e5;

/// Conversions divide or multiply by exact powers of ten, so `nm(23.8)` is
/// the double nearest 2.38e-8 rather than `23.8 * 1e-9`.
pub fn nm(x: f64) -> f64 {
    x / 1e9
}

pub fn to_nm(x: f64) -> f64 {
    x * 1e9
}

pub fn gauss(x: f64) -> f64 {
    x / 1e4
}

pub fn to_gauss(x: f64) -> f64 {
    x * 1e4
}
