//! OFDM grid, training sequences and symbol modulation.
//!
//! Time-domain samples are `1/√52 · Σₖ Xₖ e^{j2πkn/64}`, so a symbol whose 52
//! used subcarriers carry unit-energy points has unit mean sample power
//! summed over both antennas.

use std::sync::OnceLock;

use super::coding::Scrambler;
use crate::numerics::{c, plan, CVec2, C64};

pub const N_FFT: usize = 64;
pub const CP_LEN: usize = 16;
pub const SYMBOL_LEN: usize = N_FFT + CP_LEN;
pub const N_USED: usize = 52;
pub const N_DATA: usize = 48;
pub const N_PILOTS: usize = 4;
/// Short training section: ten 16-sample periods.
pub const STS_LEN: usize = 160;
/// Long training section: 32-sample guard plus two 64-sample symbols.
pub const LTS_LEN: usize = 160;
pub const LTS_GUARD: usize = 32;
/// STS + LTS + SIGNAL placeholder.
pub const PREAMBLE_LEN: usize = STS_LEN + LTS_LEN + SYMBOL_LEN;
/// Samples of cyclic prefix skipped before the FFT window, counted back from
/// the nominal symbol start.
pub const TIMING_BACKOFF: usize = 4;

pub const PILOT_SUBCARRIERS: [i32; N_PILOTS] = [-21, -7, 7, 21];
const PILOT_BASE: [f64; N_PILOTS] = [1.0, 1.0, 1.0, -1.0];

/// Used subcarriers in ascending order, DC excluded.
pub const USED_SUBCARRIERS: [i32; N_USED] = {
    let mut out = [0i32; N_USED];
    let mut k = -26;
    let mut idx = 0;
    while k <= 26 {
        if k != 0 {
            out[idx] = k;
            idx += 1;
        }
        k += 1;
    }
    out
};

const fn is_pilot(k: i32) -> bool {
    k == -21 || k == -7 || k == 7 || k == 21
}

/// Positions of the 48 data subcarriers within [`USED_SUBCARRIERS`].
pub const DATA_POS: [usize; N_DATA] = {
    let mut out = [0usize; N_DATA];
    let mut idx = 0;
    let mut p = 0;
    while p < N_USED {
        if !is_pilot(USED_SUBCARRIERS[p]) {
            out[idx] = p;
            idx += 1;
        }
        p += 1;
    }
    out
};

/// Positions of the 4 pilots within [`USED_SUBCARRIERS`].
pub const PILOT_POS: [usize; N_PILOTS] = [5, 19, 32, 46];

/// FFT bin of a signed subcarrier index.
pub fn bin(k: i32) -> usize {
    k.rem_euclid(N_FFT as i32) as usize
}

/// Signed subcarrier index of an FFT bin.
pub fn subcarrier_of_bin(b: usize) -> i32 {
    if b < N_FFT / 2 {
        b as i32
    } else {
        b as i32 - N_FFT as i32
    }
}

/// The OFDM layout: 48 data, 4 pilots and 12 nulls over 64 bins.
#[derive(Clone, Debug, PartialEq)]
pub struct OfdmGrid {
    pub n_fft: usize,
    pub cp_len: usize,
    pub data_subcarriers: Vec<i32>,
    pub pilot_subcarriers: Vec<i32>,
    pub null_subcarriers: Vec<i32>,
}

impl Default for OfdmGrid {
    fn default() -> Self {
        let data = DATA_POS.iter().map(|&p| USED_SUBCARRIERS[p]).collect();
        let nulls = (0..N_FFT)
            .map(subcarrier_of_bin)
            .filter(|k| !USED_SUBCARRIERS.contains(k))
            .collect();
        OfdmGrid {
            n_fft: N_FFT,
            cp_len: CP_LEN,
            data_subcarriers: data,
            pilot_subcarriers: PILOT_SUBCARRIERS.to_vec(),
            null_subcarriers: nulls,
        }
    }
}

/// Short training sequence on the used subcarriers.
pub fn sts_freq() -> [C64; N_USED] {
    let a = (13.0f64 / 6.0).sqrt();
    let mut out = [C64::default(); N_USED];
    let tones: [(i32, f64); 12] = [
        (-24, 1.0),
        (-20, -1.0),
        (-16, 1.0),
        (-12, -1.0),
        (-8, -1.0),
        (-4, 1.0),
        (4, -1.0),
        (8, -1.0),
        (12, 1.0),
        (16, 1.0),
        (20, 1.0),
        (24, 1.0),
    ];
    for (k, s) in tones {
        let p = USED_SUBCARRIERS.iter().position(|&u| u == k).unwrap();
        out[p] = c(s * a, s * a);
    }
    out
}

/// Long training sequence on the used subcarriers (±1).
pub fn lts_freq() -> [C64; N_USED] {
    const L: [i8; N_USED] = [
        1, 1, -1, -1, 1, 1, -1, 1, -1, 1, 1, 1, 1, 1, 1, -1, -1, 1, 1, -1, 1, -1, 1, 1, 1, 1, //
        1, -1, -1, 1, 1, -1, 1, -1, 1, -1, -1, -1, -1, -1, 1, 1, -1, -1, 1, -1, 1, -1, 1, 1, 1, 1,
    ];
    L.map(|v| c(v as f64, 0.0))
}

/// Pilot polarity sequence: the all-ones scrambler output mapped 0→+1, 1→−1.
pub fn pilot_polarity() -> &'static [f64; 127] {
    static P: OnceLock<[f64; 127]> = OnceLock::new();
    P.get_or_init(|| {
        let mut s = Scrambler::new(0x7f);
        std::array::from_fn(|_| if s.next_bit() == 0 { 1.0 } else { -1.0 })
    })
}

/// Pilot values for OFDM symbol `sym` counted from the SIGNAL symbol (0).
pub fn pilot_values(sym: usize) -> [C64; N_PILOTS] {
    let p = pilot_polarity()[sym % 127];
    PILOT_BASE.map(|b| c(b * p, 0.0))
}

/// Scaling from the `1/64` inverse FFT to the unit-power convention.
fn tx_scale() -> f64 {
    N_FFT as f64 / (N_USED as f64).sqrt()
}

/// Scaling applied to raw forward-FFT outputs at the receiver.
pub fn rx_scale() -> f64 {
    (N_USED as f64).sqrt() / N_FFT as f64
}

/// One 64-sample period (no prefix) per antenna for a precoded spectrum.
pub fn ofdm_body(spectrum: &[C64; N_USED], precoders: &[CVec2]) -> [Vec<C64>; 2] {
    let p = plan(N_FFT).expect("64 is a power of two");
    std::array::from_fn(|a| {
        let mut buf = vec![C64::default(); N_FFT];
        for (pos, &k) in USED_SUBCARRIERS.iter().enumerate() {
            buf[bin(k)] = precoders[pos].0[a] * spectrum[pos];
        }
        p.inverse(&mut buf).expect("length matches plan");
        let s = tx_scale();
        buf.iter_mut().for_each(|z| *z *= s);
        buf
    })
}

/// Appends `body` to `out` with a cyclic prefix of `cp` samples.
fn push_with_prefix(out: &mut Vec<C64>, body: &[C64], cp: usize) {
    out.extend_from_slice(&body[body.len() - cp..]);
    out.extend_from_slice(body);
}

/// STS + LTS + SIGNAL placeholder, precoded per subcarrier.
pub fn preamble(precoders: &[CVec2]) -> [Vec<C64>; 2] {
    let sts = ofdm_body(&sts_freq(), precoders);
    let lts = ofdm_body(&lts_freq(), precoders);
    let sf = ofdm_body(&signal_placeholder(), precoders);
    std::array::from_fn(|a| {
        let mut out = Vec::with_capacity(PREAMBLE_LEN);
        out.extend((0..STS_LEN).map(|n| sts[a][n % N_FFT]));
        push_with_prefix(&mut out, &lts[a], LTS_GUARD);
        out.extend_from_slice(&lts[a]);
        push_with_prefix(&mut out, &sf[a], CP_LEN);
        out
    })
}

/// Fixed BPSK pattern occupying the SIGNAL symbol; never parsed.
pub fn signal_placeholder() -> [C64; N_USED] {
    let mut s = Scrambler::new(0x7f);
    let mut out = [C64::default(); N_USED];
    for &p in DATA_POS.iter() {
        out[p] = c(if s.next_bit() == 1 { 1.0 } else { -1.0 }, 0.0);
    }
    for (i, &p) in PILOT_POS.iter().enumerate() {
        out[p] = pilot_values(0)[i];
    }
    out
}

/// Full 80-sample data symbol `sym` (0-based, after SIGNAL) per antenna.
pub fn data_symbol(data: &[C64], sym: usize, precoders: &[CVec2]) -> [Vec<C64>; 2] {
    let mut spec = [C64::default(); N_USED];
    for (d, &p) in DATA_POS.iter().enumerate() {
        spec[p] = data[d];
    }
    for (i, &p) in PILOT_POS.iter().enumerate() {
        spec[p] = pilot_values(sym + 1)[i];
    }
    let body = ofdm_body(&spec, precoders);
    std::array::from_fn(|a| {
        let mut out = Vec::with_capacity(SYMBOL_LEN);
        push_with_prefix(&mut out, &body[a], CP_LEN);
        out
    })
}

/// Forward FFT of the 64-sample window at `start`, with CFO `cfo_norm`
/// (cycles per sample) removed, returning the 52 used subcarriers.
pub fn demod_window(x: &[C64], start: usize, cfo_norm: f64) -> [C64; N_USED] {
    let p = plan(N_FFT).expect("64 is a power of two");
    let mut buf: Vec<C64> = (0..N_FFT)
        .map(|n| {
            let idx = start + n;
            let z = x.get(idx).copied().unwrap_or_default();
            if cfo_norm == 0.0 {
                z
            } else {
                z * C64::from_polar(1.0, -2.0 * std::f64::consts::PI * cfo_norm * idx as f64)
            }
        })
        .collect();
    p.forward(&mut buf).expect("length matches plan");
    let s = rx_scale();
    std::array::from_fn(|pos| buf[bin(USED_SUBCARRIERS[pos])] * s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e1() -> Vec<CVec2> {
        vec![CVec2::e1(); N_USED]
    }

    #[test]
    fn grid_counts() {
        let g = OfdmGrid::default();
        assert_eq!(g.data_subcarriers.len(), 48);
        assert_eq!(g.pilot_subcarriers.len(), 4);
        assert_eq!(g.null_subcarriers.len(), 12);
        for (i, &p) in PILOT_POS.iter().enumerate() {
            assert_eq!(USED_SUBCARRIERS[p], PILOT_SUBCARRIERS[i]);
        }
        // 16 samples at 50 ns.
        assert_eq!(g.cp_len as f64 * 50.0, 800.0);
    }

    #[test]
    fn polarity_prefix() {
        let p = pilot_polarity();
        assert_eq!(&p[..8], &[1.0, 1.0, 1.0, 1.0, -1.0, -1.0, -1.0, 1.0]);
    }

    #[test]
    fn sts_has_period_16_and_unit_power() {
        let pre = preamble(&e1());
        let x = &pre[0];
        for n in 0..STS_LEN - 16 {
            assert!((x[n] - x[n + 16]).norm() < 1e-12);
        }
        let p = x[..STS_LEN].iter().map(|z| z.norm_sqr()).sum::<f64>() / STS_LEN as f64;
        assert!((p - 1.0).abs() < 1e-12);
        assert!(pre[1].iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn demod_inverts_modulation() {
        let pre = preamble(&e1());
        let got = demod_window(&pre[0], STS_LEN + LTS_GUARD, 0.0);
        for (g, w) in got.iter().zip(lts_freq().iter()) {
            assert!((g - w).norm() < 1e-12);
        }
    }
}
