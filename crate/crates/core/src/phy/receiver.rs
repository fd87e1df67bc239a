//! Receiver back end: LS channel estimation, zero-forcing equalization with
//! pilot phase tracking, and demodulation of a synchronized frame.

use serde::{Deserialize, Serialize};

use super::frame::decode_payload;
use super::ofdm::{
    demod_window, lts_freq, pilot_values, DATA_POS, LTS_GUARD, N_DATA, N_FFT, N_USED, PILOT_POS, PREAMBLE_LEN,
    STS_LEN, SYMBOL_LEN, CP_LEN, TIMING_BACKOFF,
};
use super::rates::RateParams;
use super::PhyError;
use crate::metrics::{training_estimates, TrainingEstimates};
use crate::numerics::{CVec2, C64};

/// Receiver options.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RxConfig {
    /// Per-symbol common phase error correction from the pilots.
    pub pilot_cpe: bool,
}

impl Default for RxConfig {
    fn default() -> Self {
        RxConfig { pilot_cpe: true }
    }
}

/// Least-squares channel estimate over `M = received.len()` symbols.
pub fn ls_estimate(received: &[[C64; N_USED]], known: &[C64; N_USED]) -> Vec<C64> {
    training_estimates(received, known)
        .expect("fixed-width rows with nonzero reference")
        .h
}

/// Divides each used subcarrier by `h`, after removing the per-symbol common
/// phase error measured on the pilots when `pilot_cpe` is set. `first_sym`
/// is the pilot-polarity index of the first row.
pub fn zf_equalize(
    symbols: &[[C64; N_USED]],
    h: &[C64],
    first_sym: usize,
    pilot_cpe: bool,
) -> Result<Vec<[C64; N_USED]>, PhyError> {
    if h.len() != N_USED {
        return Err(PhyError::BadLength {
            expected: N_USED,
            got: h.len(),
        });
    }
    let hmax = h.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if h.iter().any(|z| z.norm() <= 1e-12 * hmax) || hmax == 0.0 {
        return Err(PhyError::SingularChannel);
    }
    Ok(symbols
        .iter()
        .enumerate()
        .map(|(n, row)| {
            let rot = if pilot_cpe {
                let pv = pilot_values(first_sym + n);
                let acc: C64 = PILOT_POS
                    .iter()
                    .zip(pv.iter())
                    .map(|(&p, &ref_)| row[p] * (h[p] * ref_).conj())
                    .sum();
                if acc.norm() > 0.0 {
                    (acc / acc.norm()).conj()
                } else {
                    C64::new(1.0, 0.0)
                }
            } else {
                C64::new(1.0, 0.0)
            };
            std::array::from_fn(|s| row[s] * rot / h[s])
        })
        .collect())
}

/// How the per-antenna FFT outputs are reduced to one stream.
#[derive(Clone, Copy, Debug)]
pub enum Combiner<'a> {
    /// Single stream input, used as is.
    Single,
    /// Per-used-subcarrier decoder `u`, applied as `uᴴ y`.
    Decoder(&'a [CVec2]),
}

/// Demodulated frame.
#[derive(Clone, Debug, PartialEq)]
pub struct RxFrame {
    /// Estimates from the two LTS symbols of the preamble.
    pub estimates: TrainingEstimates,
    /// Zero-forced data-subcarrier points, `n_data_symbols × 48`.
    pub data: Vec<C64>,
}

impl RxFrame {
    pub fn data_rows(&self) -> Vec<&[C64]> {
        self.data.chunks(N_DATA).collect()
    }
}

fn combined_window(streams: &[&[C64]], start: usize, cfo_norm: f64, combiner: Combiner<'_>) -> [C64; N_USED] {
    match combiner {
        Combiner::Single => demod_window(streams[0], start, cfo_norm),
        Combiner::Decoder(u) => {
            let y0 = demod_window(streams[0], start, cfo_norm);
            let y1 = demod_window(streams[1], start, cfo_norm);
            std::array::from_fn(|s| u[s].dot(&CVec2::new(y0[s], y1[s])))
        }
    }
}

/// FFT window start of data symbol `sym` for a frame starting at
/// `frame_start`.
pub fn data_window(frame_start: usize, sym: usize) -> usize {
    (frame_start + PREAMBLE_LEN + sym * SYMBOL_LEN + CP_LEN).saturating_sub(TIMING_BACKOFF)
}

/// Estimates the preamble channel and equalizes `n_symbols` data symbols.
pub fn receive_frame(
    streams: &[&[C64]],
    frame_start: usize,
    cfo_norm: f64,
    n_symbols: usize,
    combiner: Combiner<'_>,
    cfg: &RxConfig,
) -> Result<RxFrame, PhyError> {
    if let Combiner::Decoder(u) = combiner {
        if u.len() != N_USED || streams.len() < 2 {
            return Err(PhyError::BadLength {
                expected: N_USED,
                got: u.len(),
            });
        }
    }
    let lts0 = (frame_start + STS_LEN + LTS_GUARD).saturating_sub(TIMING_BACKOFF);
    let lts = [
        combined_window(streams, lts0, cfo_norm, combiner),
        combined_window(streams, lts0 + N_FFT, cfo_norm, combiner),
    ];
    let estimates = training_estimates(&lts, &lts_freq()).map_err(|_| PhyError::SingularChannel)?;
    let rows: Vec<[C64; N_USED]> = (0..n_symbols)
        .map(|s| combined_window(streams, data_window(frame_start, s), cfo_norm, combiner))
        .collect();
    let eq = zf_equalize(&rows, &estimates.h, 1, cfg.pilot_cpe)?;
    let data = eq.iter().flat_map(|row| DATA_POS.iter().map(move |&p| row[p])).collect();
    Ok(RxFrame { estimates, data })
}

/// Decodes the payload bits of a demodulated frame.
pub fn decode_frame(frame: &RxFrame, rate: &RateParams) -> Result<Vec<u8>, PhyError> {
    decode_payload(&frame.data, rate)
}
