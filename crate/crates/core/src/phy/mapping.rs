//! Gray-coded constellation mapping and hard demapping.

use super::rates::Modulation;
use crate::numerics::{c, C64};

/// Per-axis amplitude levels indexed by the Gray-coded bit group, before
/// normalization.
fn axis_level(bits: &[u8]) -> f64 {
    match bits.len() {
        1 => {
            if bits[0] == 1 {
                1.0
            } else {
                -1.0
            }
        }
        2 => match (bits[0], bits[1]) {
            (0, 0) => -3.0,
            (0, 1) => -1.0,
            (1, 1) => 1.0,
            _ => 3.0,
        },
        3 => match (bits[0], bits[1], bits[2]) {
            (0, 0, 0) => -7.0,
            (0, 0, 1) => -5.0,
            (0, 1, 1) => -3.0,
            (0, 1, 0) => -1.0,
            (1, 1, 0) => 1.0,
            (1, 1, 1) => 3.0,
            (1, 0, 1) => 5.0,
            _ => 7.0,
        },
        _ => unreachable!("axis groups are 1 to 3 bits"),
    }
}

/// Inverse of [`axis_level`] with nearest-level decisions.
fn axis_bits(x: f64, n: usize, out: &mut Vec<u8>) {
    match n {
        1 => out.push((x >= 0.0) as u8),
        2 => {
            out.push((x >= 0.0) as u8);
            out.push((x.abs() < 2.0) as u8);
        }
        3 => {
            out.push((x >= 0.0) as u8);
            out.push((x.abs() < 4.0) as u8);
            let a = x.abs();
            out.push((a > 2.0 && a < 6.0) as u8);
        }
        _ => unreachable!("axis groups are 1 to 3 bits"),
    }
}

/// Normalization giving unit mean energy.
pub fn scale(m: Modulation) -> f64 {
    match m {
        Modulation::Bpsk => 1.0,
        Modulation::Qpsk => 1.0 / 2f64.sqrt(),
        Modulation::Qam16 => 1.0 / 10f64.sqrt(),
        Modulation::Qam64 => 1.0 / 42f64.sqrt(),
    }
}

/// Maps groups of `bits_per_symbol` bits to constellation points.
pub fn map_bits(bits: &[u8], m: Modulation) -> Vec<C64> {
    let n = m.bits_per_symbol();
    let k = scale(m);
    bits.chunks(n)
        .map(|g| match m {
            Modulation::Bpsk => c(axis_level(g) * k, 0.0),
            _ => c(axis_level(&g[..n / 2]) * k, axis_level(&g[n / 2..]) * k),
        })
        .collect()
}

/// Hard nearest-point demapping.
pub fn demap_hard(symbols: &[C64], m: Modulation) -> Vec<u8> {
    let n = m.bits_per_symbol();
    let k = 1.0 / scale(m);
    let mut out = Vec::with_capacity(symbols.len() * n);
    for z in symbols {
        match m {
            Modulation::Bpsk => axis_bits(z.re, 1, &mut out),
            _ => {
                axis_bits(z.re * k, n / 2, &mut out);
                axis_bits(z.im * k, n / 2, &mut out);
            }
        }
    }
    out
}

/// Snaps each symbol to the nearest constellation point.
pub fn slice(symbols: &[C64], m: Modulation) -> Vec<C64> {
    map_bits(&demap_hard(symbols, m), m)
}
