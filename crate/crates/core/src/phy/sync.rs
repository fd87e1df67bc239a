//! Frame detection, timing and carrier-frequency-offset estimation.
//!
//! A delay-and-correlate metric at the 16-sample STS period finds a
//! plateau; the LTS cross-correlation then refines timing and the LTS
//! lag-64 autocorrelation refines the CFO. All metrics are summed over the
//! supplied receive streams.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::ofdm::{lts_freq, ofdm_body, LTS_GUARD, N_FFT, N_USED, STS_LEN};
use crate::numerics::{CVec2, C64};

/// Sample rate of the baseband.
pub const SAMPLE_RATE_HZ: f64 = 20e6;
const STS_PERIOD: usize = 16;

/// Detector tuning.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyncConfig {
    /// Correlation window of the delay-and-correlate metric.
    pub window: usize,
    /// Normalized metric level defining the plateau.
    pub threshold: f64,
    /// Consecutive samples above threshold required to declare a frame.
    pub plateau_len: usize,
}

impl Default for SyncConfig {
    fn default() -> Self {
        SyncConfig {
            window: 48,
            threshold: 0.45,
            plateau_len: 48,
        }
    }
}

/// Outcome of [`detect_and_sync`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyncResult {
    /// Index of the first STS sample.
    pub frame_start: usize,
    pub cfo_hz: f64,
    pub detected: bool,
}

impl SyncResult {
    pub fn not_detected() -> Self {
        SyncResult {
            frame_start: 0,
            cfo_hz: 0.0,
            detected: false,
        }
    }

    /// CFO in cycles per sample.
    pub fn cfo_norm(&self) -> f64 {
        self.cfo_hz / SAMPLE_RATE_HZ
    }
}

/// Time-domain reference LTS period (64 samples, single antenna).
fn lts_time() -> Vec<C64> {
    let [a, _] = ofdm_body(&lts_freq(), &[CVec2::e1(); N_USED]);
    a
}

fn rotate(z: C64, cfo_norm: f64, idx: usize) -> C64 {
    z * C64::from_polar(1.0, -2.0 * PI * cfo_norm * idx as f64)
}

/// First index where the delay-and-correlate metric stays above threshold
/// for the plateau length, plus the accumulated correlation over it.
fn find_plateau(streams: &[&[C64]], cfg: &SyncConfig) -> Option<(usize, C64)> {
    let len = streams.iter().map(|s| s.len()).min()?;
    let w = cfg.window;
    if len < w + STS_PERIOD + cfg.plateau_len {
        return None;
    }
    let term_p = |n: usize| -> C64 { streams.iter().map(|s| s[n].conj() * s[n + STS_PERIOD]).sum() };
    let term_r = |n: usize| -> f64 { streams.iter().map(|s| s[n + STS_PERIOD].norm_sqr()).sum() };
    let mut p: C64 = (0..w).map(term_p).sum();
    let mut r: f64 = (0..w).map(term_r).sum();
    let peak_energy = streams
        .iter()
        .flat_map(|s| s.iter())
        .map(|z| z.norm_sqr())
        .fold(0.0, f64::max);
    let floor = 1e-12 * peak_energy * w as f64;
    let mut run = 0usize;
    let mut acc = C64::default();
    let last = len - w - STS_PERIOD;
    for n in 0..=last {
        let m = if r > floor { p.norm() / r } else { 0.0 };
        if m >= cfg.threshold {
            run += 1;
            acc += p;
            if run >= cfg.plateau_len {
                return Some((n + 1 - run, acc));
            }
        } else {
            run = 0;
            acc = C64::default();
        }
        if n < last {
            p += term_p(n + w) - term_p(n);
            r += term_r(n + w) - term_r(n);
            // Guard against drift of the running sum.
            if r < 0.0 {
                r = 0.0;
            }
        }
    }
    None
}

/// Detects the first frame in `streams` and estimates its start and CFO.
pub fn detect_and_sync(streams: &[&[C64]], cfg: &SyncConfig) -> SyncResult {
    let Some((n0, p)) = find_plateau(streams, cfg) else {
        return SyncResult::not_detected();
    };
    let coarse = p.arg() / (2.0 * PI * STS_PERIOD as f64);
    let len = streams.iter().map(|s| s.len()).min().unwrap_or(0);
    let reference = lts_time();
    let nominal = STS_LEN + LTS_GUARD;
    let lo = n0 + 100;
    let hi = (n0 + 300).min(len.saturating_sub(2 * N_FFT));
    if lo >= hi {
        return SyncResult::not_detected();
    }
    let corr = |t: usize| -> f64 {
        streams
            .iter()
            .map(|s| {
                let c: C64 = (0..N_FFT).map(|m| reference[m].conj() * rotate(s[t + m], coarse, t + m)).sum();
                c.norm_sqr()
            })
            .sum()
    };
    let mut best = (lo, f64::NEG_INFINITY);
    let mut prev: Vec<f64> = Vec::with_capacity(hi - lo + N_FFT);
    for t in lo..hi + N_FFT {
        prev.push(corr(t));
    }
    for t in lo..hi {
        let v = prev[t - lo] + prev[t - lo + N_FFT];
        if v > best.1 {
            best = (t, v);
        }
    }
    let t = best.0;
    if t < nominal {
        return SyncResult::not_detected();
    }
    let q: C64 = streams
        .iter()
        .map(|s| {
            (0..N_FFT)
                .map(|m| rotate(s[t + m], coarse, t + m).conj() * rotate(s[t + m + N_FFT], coarse, t + m + N_FFT))
                .sum::<C64>()
        })
        .sum();
    let fine = q.arg() / (2.0 * PI * N_FFT as f64);
    SyncResult {
        frame_start: t - nominal,
        cfo_hz: (coarse + fine) * SAMPLE_RATE_HZ,
        detected: true,
    }
}

/// Applies a carrier frequency offset of `cfo_hz` to a stream.
pub fn apply_cfo(x: &mut [C64], cfo_hz: f64) {
    let f = cfo_hz / SAMPLE_RATE_HZ;
    for (n, z) in x.iter_mut().enumerate() {
        *z *= C64::from_polar(1.0, 2.0 * PI * f * n as f64);
    }
}
