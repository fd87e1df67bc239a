//! The three-user frequency-selective interference network.
//!
//! Link `[i][j]` carries transmitter `j` to receiver `i`. Each link is a
//! 2×2 MIMO FIR filter plus an integer sample delay. Taps are drawn from a
//! Rayleigh tapped-delay-line model whose expected energy
//! `E Σₙ ‖H[n]‖²_F` is one.

use std::fs;
use std::io;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{c, plan, CMat2, NumericsError, C64};

/// Number of users (transmitter/receiver pairs).
pub const N_USERS: usize = 3;
/// Antennas per node.
pub const N_ANT: usize = 2;
/// Baseband sample period at 20 Msample/s.
pub const SAMPLE_PERIOD_NS: f64 = 50.0;

const FILE_FORMAT_TAG: &str = "iawlan-channels";
const FILE_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ChannelError {
    #[error("stream length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("invalid channel configuration: {0}")]
    InvalidConfig(String),
    #[error("channel file parse error: {0}")]
    ParseError(String),
    #[error("channel file I/O error: {0}")]
    IoError(#[from] io::Error),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Two sample streams, one per antenna.
pub type AntennaStreams = [Vec<C64>; N_ANT];

/// Matrix impulse response of one MIMO link.
#[derive(Clone, Debug, PartialEq)]
pub struct MimoFir {
    pub taps: Vec<CMat2>,
}

impl MimoFir {
    pub fn single(h: CMat2) -> Self {
        MimoFir { taps: vec![h] }
    }

    /// `Σₙ ‖H[n]‖²_F`.
    pub fn energy(&self) -> f64 {
        self.taps.iter().map(CMat2::norm_fro_sqr).sum()
    }

    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taps.is_empty()
    }

    pub fn scaled(&self, s: C64) -> Self {
        MimoFir {
            taps: self.taps.iter().map(|t| t.scale(s)).collect(),
        }
    }
}

/// The nine pairwise links plus their delays.
#[derive(Clone, Debug, PartialEq)]
pub struct InterferenceChannelRealization {
    /// `links[i][j]`: receiver `i`, transmitter `j`.
    pub links: [[MimoFir; N_USERS]; N_USERS],
    /// Per-link delay in samples.
    pub delays_samples: [[usize; N_USERS]; N_USERS],
}

impl InterferenceChannelRealization {
    /// Builds a network with the same FIR on every link and zero delays.
    pub fn uniform(link: MimoFir) -> Self {
        InterferenceChannelRealization {
            links: std::array::from_fn(|_| std::array::from_fn(|_| link.clone())),
            delays_samples: [[0; N_USERS]; N_USERS],
        }
    }

    pub fn max_taps(&self) -> usize {
        self.links.iter().flatten().map(MimoFir::len).max().unwrap_or(0)
    }

    /// Per-subcarrier responses for every link: `out[i][j][k]`.
    pub fn freq_responses(&self, n_fft: usize) -> Result<ChannelSpectra, NumericsError> {
        let mut out: ChannelSpectra = Default::default();
        for i in 0..N_USERS {
            for j in 0..N_USERS {
                out[i][j] = freq_response(&self.links[i][j], n_fft)?;
            }
        }
        Ok(out)
    }
}

/// Per-link per-subcarrier 2×2 responses, indexed `[rx][tx][bin]`.
pub type ChannelSpectra = [[Vec<CMat2>; N_USERS]; N_USERS];

/// Power-delay profile of the synthetic channel model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PowerDelayProfile {
    /// `p_k ∝ exp(−k·T_s / τ)`.
    Exponential { rms_delay_spread_ns: f64 },
    Uniform,
    SingleTap,
}

impl PowerDelayProfile {
    /// Tap powers summing to one.
    pub fn tap_powers(&self, n_taps: usize) -> Vec<f64> {
        let raw: Vec<f64> = match *self {
            PowerDelayProfile::SingleTap => vec![1.0],
            PowerDelayProfile::Uniform => vec![1.0; n_taps.max(1)],
            PowerDelayProfile::Exponential { rms_delay_spread_ns } => (0..n_taps.max(1))
                .map(|k| (-(k as f64) * SAMPLE_PERIOD_NS / rms_delay_spread_ns).exp())
                .collect(),
        };
        let total: f64 = raw.iter().sum();
        raw.into_iter().map(|p| p / total).collect()
    }
}

/// Synthetic channel generator settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelGenConfig {
    pub n_taps: usize,
    pub power_delay_profile: PowerDelayProfile,
    pub seed: u64,
}

impl Default for ChannelGenConfig {
    fn default() -> Self {
        ChannelGenConfig {
            n_taps: 8,
            power_delay_profile: PowerDelayProfile::Exponential {
                rms_delay_spread_ns: 50.0,
            },
            seed: 0,
        }
    }
}

impl ChannelGenConfig {
    pub fn validate(&self) -> Result<(), ChannelError> {
        if self.n_taps == 0 || self.n_taps > 64 {
            return Err(ChannelError::InvalidConfig(format!(
                "n_taps must be in 1..=64, got {}",
                self.n_taps
            )));
        }
        if let PowerDelayProfile::Exponential { rms_delay_spread_ns } = self.power_delay_profile {
            if !(rms_delay_spread_ns > 0.0 && rms_delay_spread_ns.is_finite()) {
                return Err(ChannelError::InvalidConfig(
                    "rms_delay_spread_ns must be positive".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn tap_powers(&self) -> Vec<f64> {
        self.power_delay_profile.tap_powers(self.n_taps)
    }
}

/// Receiver noise, transmitter noise and channel aging.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImpairmentConfig {
    /// Desired-link per-receive-antenna SNR in dB; `inf` disables AWGN.
    pub awgn_snr_db: f64,
    /// Transmitter noise power relative to the transmit signal in dB;
    /// `-inf` disables it.
    pub tx_evm_db: f64,
    /// Gauss–Markov tap correlation per feedback interval.
    pub aging_rho: f64,
}

impl Default for ImpairmentConfig {
    fn default() -> Self {
        ImpairmentConfig {
            awgn_snr_db: 30.0,
            tx_evm_db: -26.0,
            aging_rho: 1.0,
        }
    }
}

impl ImpairmentConfig {
    pub fn noiseless() -> Self {
        ImpairmentConfig {
            awgn_snr_db: f64::INFINITY,
            tx_evm_db: f64::NEG_INFINITY,
            aging_rho: 1.0,
        }
    }

    pub fn tx_noise_enabled(&self) -> bool {
        self.tx_evm_db.is_finite()
    }

    pub fn awgn_enabled(&self) -> bool {
        self.awgn_snr_db.is_finite()
    }

    pub fn validate(&self) -> Result<(), ChannelError> {
        if self.awgn_snr_db.is_nan() || self.awgn_snr_db == f64::NEG_INFINITY {
            return Err(ChannelError::InvalidConfig(
                "awgn_snr_db must be a number or inf".into(),
            ));
        }
        if self.tx_evm_db.is_nan() || self.tx_evm_db > 0.0 {
            return Err(ChannelError::InvalidConfig(
                "tx_evm_db must be <= 0 or -inf".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.aging_rho) {
            return Err(ChannelError::InvalidConfig(
                "aging_rho must lie in [0, 1]".into(),
            ));
        }
        Ok(())
    }
}

/// Draws a circularly-symmetric complex Gaussian with variance `var`.
pub fn complex_gaussian<R: rand::Rng>(rng: &mut R, var: f64) -> C64 {
    let s = (0.5 * var).sqrt();
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    c(re * s, im * s)
}

fn random_fir<R: rand::Rng>(rng: &mut R, powers: &[f64]) -> MimoFir {
    // Four entries share each tap's power so the link energy is one.
    let taps = powers
        .iter()
        .map(|&p| {
            let v = p / 4.0;
            CMat2::new(
                complex_gaussian(rng, v),
                complex_gaussian(rng, v),
                complex_gaussian(rng, v),
                complex_gaussian(rng, v),
            )
        })
        .collect();
    MimoFir { taps }
}

/// Draws nine independent links with zero delays.
pub fn generate_network(cfg: &ChannelGenConfig, rng_seed: u64) -> InterferenceChannelRealization {
    let powers = cfg.tap_powers();
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    InterferenceChannelRealization {
        links: std::array::from_fn(|_| std::array::from_fn(|_| random_fir(&mut rng, &powers))),
        delays_samples: [[0; N_USERS]; N_USERS],
    }
}

/// Entry-wise `n_fft`-point FFT of the zero-padded taps.
pub fn freq_response(ch: &MimoFir, n_fft: usize) -> Result<Vec<CMat2>, NumericsError> {
    if ch.taps.len() > n_fft {
        return Err(NumericsError::BadLength {
            expected: n_fft,
            got: ch.taps.len(),
        });
    }
    let p = plan(n_fft)?;
    let mut out = vec![CMat2::ZERO; n_fft];
    let mut buf = vec![C64::default(); n_fft];
    for r in 0..N_ANT {
        for t in 0..N_ANT {
            buf.iter_mut().for_each(|z| *z = C64::default());
            for (n, tap) in ch.taps.iter().enumerate() {
                buf[n] = tap.0[r][t];
            }
            p.forward(&mut buf)?;
            for (k, z) in buf.iter().enumerate() {
                out[k].0[r][t] = *z;
            }
        }
    }
    Ok(out)
}

/// Gauss–Markov aging: each tap becomes `ρ·old + √(1−ρ²)·innovation`, with
/// the innovation drawn from `tap_powers` (one power per tap index, summing
/// to the link's expected energy).
pub fn age_channel(
    realization: &InterferenceChannelRealization,
    rho: f64,
    tap_powers: &[f64],
    rng_seed: u64,
) -> InterferenceChannelRealization {
    if rho >= 1.0 {
        return realization.clone();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let keep = rho.max(0.0);
    let fresh = (1.0 - keep * keep).sqrt();
    let mut out = realization.clone();
    for link in out.links.iter_mut().flatten() {
        for (n, tap) in link.taps.iter_mut().enumerate() {
            let v = tap_powers.get(n).copied().unwrap_or(0.0) / 4.0;
            for z in tap.0.iter_mut().flatten() {
                *z = *z * keep + complex_gaussian(&mut rng, v) * fresh;
            }
        }
    }
    out
}

/// Average per-tap power of a realization, normalized to sum to one. Used
/// as the aging innovation profile for channels loaded from file.
pub fn empirical_tap_powers(realization: &InterferenceChannelRealization) -> Vec<f64> {
    let n = realization.max_taps();
    let mut p = vec![0.0; n];
    for link in realization.links.iter().flatten() {
        for (k, tap) in link.taps.iter().enumerate() {
            p[k] += tap.norm_fro_sqr();
        }
    }
    let total: f64 = p.iter().sum();
    if total > 0.0 {
        p.iter_mut().for_each(|x| *x /= total);
    }
    p
}

/// Mean power of the active span of a stream (first to last nonzero sample).
fn active_span(x: &[C64]) -> Option<(usize, usize, f64)> {
    let first = x.iter().position(|z| z.norm_sqr() > 0.0)?;
    let last = x.iter().rposition(|z| z.norm_sqr() > 0.0)?;
    let p = x[first..=last].iter().map(|z| z.norm_sqr()).sum::<f64>() / (last - first + 1) as f64;
    Some((first, last, p))
}

/// Adds white transmitter noise to each antenna stream over its active span,
/// at `tx_evm_db` relative to that stream's mean power. Silent antennas stay
/// silent.
pub fn add_tx_noise<R: rand::Rng>(streams: &mut AntennaStreams, tx_evm_db: f64, rng: &mut R) {
    if !tx_evm_db.is_finite() {
        return;
    }
    let rel = 10f64.powf(tx_evm_db / 10.0);
    for s in streams.iter_mut() {
        if let Some((a, b, p)) = active_span(s) {
            let var = rel * p;
            for z in &mut s[a..=b] {
                *z += complex_gaussian(rng, var);
            }
        }
    }
}

/// Convolves `x` through `fir` with an extra `delay` and accumulates into
/// `out`. Output samples past the end of `out` are dropped.
pub fn accumulate_link(fir: &MimoFir, delay: usize, x: &AntennaStreams, out: &mut AntennaStreams) {
    let len = out[0].len();
    for (n, tap) in fir.taps.iter().enumerate() {
        let shift = delay + n;
        if shift >= len {
            break;
        }
        for r in 0..N_ANT {
            let dst = &mut out[r][shift..];
            for t in 0..N_ANT {
                let h = tap.0[r][t];
                if h == C64::default() {
                    continue;
                }
                for (d, s) in dst.iter_mut().zip(x[t].iter()) {
                    *d += h * s;
                }
            }
        }
    }
}

/// Per-receive-antenna AWGN variance giving `snr_db` on the desired link of
/// receiver `rx` for unit total transmit power spread over two antennas.
pub fn awgn_variance(realization: &InterferenceChannelRealization, rx: usize, snr_db: f64) -> f64 {
    if !snr_db.is_finite() {
        return 0.0;
    }
    let rx_power = realization.links[rx][rx].energy() / (N_ANT * N_ANT) as f64;
    rx_power / 10f64.powf(snr_db / 10.0)
}

/// Adds complex white Gaussian noise of variance `var` to every sample.
pub fn add_awgn<R: rand::Rng>(streams: &mut AntennaStreams, var: f64, rng: &mut R) {
    if var <= 0.0 {
        return;
    }
    for s in streams.iter_mut() {
        for z in s.iter_mut() {
            *z += complex_gaussian(rng, var);
        }
    }
}

fn zeros(len: usize) -> AntennaStreams {
    [vec![C64::default(); len], vec![C64::default(); len]]
}

/// Superposes all three users at every receiver: transmitter noise, then
/// delayed convolution, then receiver AWGN. Output streams have the input
/// length.
pub fn propagate(
    tx_signals: &[AntennaStreams; N_USERS],
    realization: &InterferenceChannelRealization,
    impairments: &ImpairmentConfig,
    rng_seed: u64,
) -> Result<[AntennaStreams; N_USERS], ChannelError> {
    let len = tx_signals[0][0].len();
    for s in tx_signals.iter().flatten() {
        if s.len() != len {
            return Err(ChannelError::LengthMismatch {
                expected: len,
                got: s.len(),
            });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut tx = tx_signals.clone();
    for s in tx.iter_mut() {
        add_tx_noise(s, impairments.tx_evm_db, &mut rng);
    }
    let mut rx: [AntennaStreams; N_USERS] = std::array::from_fn(|_| zeros(len));
    for (i, out) in rx.iter_mut().enumerate() {
        for (j, x) in tx.iter().enumerate() {
            accumulate_link(&realization.links[i][j], realization.delays_samples[i][j], x, out);
        }
        let var = awgn_variance(realization, i, impairments.awgn_snr_db);
        add_awgn(out, var, &mut rng);
    }
    Ok(rx)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChannelFile {
    format: String,
    version: u32,
    n_taps: usize,
    realizations: Vec<RealizationRecord>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RealizationRecord {
    delays: [[usize; N_USERS]; N_USERS],
    /// `links[i][j][r][t]` is the tap list of entry `(r, t)`.
    links: [[[[Vec<[f64; 2]>; N_ANT]; N_ANT]; N_USERS]; N_USERS],
}

fn to_record(r: &InterferenceChannelRealization) -> RealizationRecord {
    RealizationRecord {
        delays: r.delays_samples,
        links: std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                std::array::from_fn(|rr| {
                    std::array::from_fn(|t| {
                        r.links[i][j]
                            .taps
                            .iter()
                            .map(|m| [m.0[rr][t].re, m.0[rr][t].im])
                            .collect()
                    })
                })
            })
        }),
    }
}

fn from_record(rec: RealizationRecord, idx: usize) -> Result<InterferenceChannelRealization, ChannelError> {
    let mut links: [[MimoFir; N_USERS]; N_USERS] =
        std::array::from_fn(|_| std::array::from_fn(|_| MimoFir { taps: vec![] }));
    for i in 0..N_USERS {
        for j in 0..N_USERS {
            let entries = &rec.links[i][j];
            let t_len = entries[0][0].len();
            if t_len == 0 || entries.iter().flatten().any(|e| e.len() != t_len) {
                return Err(ChannelError::ParseError(format!(
                    "realization {idx}, link [{i}][{j}]: tap lists must be non-empty and equal length"
                )));
            }
            let taps = (0..t_len)
                .map(|n| {
                    let mut m = CMat2::ZERO;
                    for r in 0..N_ANT {
                        for t in 0..N_ANT {
                            let [re, im] = entries[r][t][n];
                            m.0[r][t] = c(re, im);
                        }
                    }
                    m
                })
                .collect();
            links[i][j] = MimoFir { taps };
        }
    }
    Ok(InterferenceChannelRealization {
        links,
        delays_samples: rec.delays,
    })
}

/// Serializes realizations to the channel file text format.
pub fn channels_to_string(realizations: &[InterferenceChannelRealization]) -> String {
    let file = ChannelFile {
        format: FILE_FORMAT_TAG.into(),
        version: FILE_VERSION,
        n_taps: realizations.iter().map(|r| r.max_taps()).max().unwrap_or(0),
        realizations: realizations.iter().map(to_record).collect(),
    };
    serde_json::to_string(&file).expect("channel records always serialize")
}

/// Parses the channel file text format.
pub fn channels_from_str(text: &str) -> Result<Vec<InterferenceChannelRealization>, ChannelError> {
    let file: ChannelFile =
        serde_json::from_str(text).map_err(|e| ChannelError::ParseError(e.to_string()))?;
    if file.format != FILE_FORMAT_TAG {
        return Err(ChannelError::ParseError(format!(
            "unexpected format tag {:?}",
            file.format
        )));
    }
    if file.version != FILE_VERSION {
        return Err(ChannelError::ParseError(format!(
            "unsupported version {}",
            file.version
        )));
    }
    let out = file
        .realizations
        .into_iter()
        .enumerate()
        .map(|(k, r)| from_record(r, k))
        .collect::<Result<Vec<_>, _>>()?;
    if out.iter().any(|r| r.max_taps() > file.n_taps) {
        return Err(ChannelError::ParseError("tap list longer than n_taps".into()));
    }
    Ok(out)
}

pub fn save_channels(
    realizations: &[InterferenceChannelRealization],
    path: &Path,
) -> Result<(), ChannelError> {
    fs::write(path, channels_to_string(realizations))?;
    Ok(())
}

pub fn load_channels(path: &Path) -> Result<Vec<InterferenceChannelRealization>, ChannelError> {
    channels_from_str(&fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn passthrough_network() -> InterferenceChannelRealization {
        let mut r = InterferenceChannelRealization::uniform(MimoFir::single(CMat2::ZERO));
        for i in 0..N_USERS {
            r.links[i][i] = MimoFir::single(CMat2::identity());
        }
        r
    }

    fn random_streams(seed: u64, len: usize) -> [AntennaStreams; N_USERS] {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        std::array::from_fn(|_| {
            std::array::from_fn(|_| (0..len).map(|_| complex_gaussian(&mut rng, 1.0)).collect())
        })
    }

    #[test]
    fn single_tap_profile() {
        let cfg = ChannelGenConfig {
            n_taps: 1,
            power_delay_profile: PowerDelayProfile::SingleTap,
            seed: 0,
        };
        let r = generate_network(&cfg, 3);
        assert!(r.links.iter().flatten().all(|l| l.len() == 1));
    }

    #[test]
    fn generation_is_deterministic() {
        let cfg = ChannelGenConfig::default();
        assert_eq!(generate_network(&cfg, 42), generate_network(&cfg, 42));
        assert_ne!(generate_network(&cfg, 42), generate_network(&cfg, 43));
    }

    #[test]
    fn exponential_profile_statistics() {
        let cfg = ChannelGenConfig::default();
        let want = cfg.tap_powers();
        let draws = 10_000 / 9 + 1;
        let mut energy = 0.0;
        let mut per_tap = vec![0.0; cfg.n_taps];
        let mut count = 0usize;
        for s in 0..draws as u64 {
            for link in generate_network(&cfg, s).links.iter().flatten() {
                energy += link.energy();
                for (k, t) in link.taps.iter().enumerate() {
                    per_tap[k] += t.norm_fro_sqr();
                }
                count += 1;
            }
        }
        let mean = energy / count as f64;
        assert!((mean - 1.0).abs() < 0.02, "mean link energy {mean}");
        // Only taps carrying meaningful power have a stable ratio.
        for k in 0..3 {
            let ratio = (per_tap[k] / count as f64) / want[k];
            assert!((ratio - 1.0).abs() < 0.05, "tap {k} ratio {ratio}");
        }
    }

    #[test]
    fn freq_response_closed_forms() {
        let h0 = CMat2::new(c(1.0, 2.0), c(0.5, 0.0), c(0.0, -1.0), c(3.0, 0.0));
        let flat = freq_response(&MimoFir::single(h0), 64).unwrap();
        assert!(flat.iter().all(|h| *h == h0));
        let two = MimoFir {
            taps: vec![CMat2::identity(), CMat2::identity()],
        };
        let resp = freq_response(&two, 64).unwrap();
        for (k, h) in resp.iter().enumerate() {
            let g = c(1.0, 0.0) + C64::from_polar(1.0, -2.0 * PI * k as f64 / 64.0);
            assert!((*h - CMat2::identity().scale(g)).norm() < 1e-12);
        }
        assert!(freq_response(&MimoFir { taps: vec![h0; 65] }, 64).is_err());
    }

    #[test]
    fn freq_response_matches_naive_dft() {
        let fir = &generate_network(&ChannelGenConfig::default(), 1).links[0][1];
        let resp = freq_response(fir, 64).unwrap();
        for (k, h) in resp.iter().enumerate() {
            let mut want = CMat2::ZERO;
            for (n, t) in fir.taps.iter().enumerate() {
                want = want + t.scale(C64::from_polar(1.0, -2.0 * PI * (k * n) as f64 / 64.0));
            }
            assert!((*h - want).norm() < 1e-12);
        }
    }

    #[test]
    fn passthrough_propagation() {
        let x = random_streams(1, 200);
        let y = propagate(&x, &passthrough_network(), &ImpairmentConfig::noiseless(), 0).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn delay_shifts_component() {
        let mut net = passthrough_network();
        net.delays_samples[0][0] = 5;
        let x = random_streams(2, 300);
        let y = propagate(&x, &net, &ImpairmentConfig::noiseless(), 0).unwrap();
        let best = (0..20)
            .max_by(|&a, &b| {
                let corr = |lag: usize| -> f64 {
                    (0..250).map(|n| y[0][0][n + lag] * x[0][0][n].conj()).sum::<C64>().norm()
                };
                corr(a).total_cmp(&corr(b))
            })
            .unwrap();
        assert_eq!(best, 5);
    }

    #[test]
    fn length_mismatch_rejected() {
        let mut x = random_streams(3, 50);
        x[1][0].pop();
        assert!(matches!(
            propagate(&x, &passthrough_network(), &ImpairmentConfig::noiseless(), 0),
            Err(ChannelError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn tx_noise_level() {
        let len = 100_000;
        let mut x = random_streams(4, len);
        x[1] = [vec![C64::default(); len], vec![C64::default(); len]];
        x[2] = x[1].clone();
        let imp = ImpairmentConfig {
            awgn_snr_db: f64::INFINITY,
            tx_evm_db: -20.0,
            aging_rho: 1.0,
        };
        let net = passthrough_network();
        let clean = propagate(&x, &net, &ImpairmentConfig::noiseless(), 0).unwrap();
        let noisy = propagate(&x, &net, &imp, 9).unwrap();
        let sig: f64 = clean[0][0].iter().map(|z| z.norm_sqr()).sum();
        let err: f64 = noisy[0][0].iter().zip(&clean[0][0]).map(|(a, b)| (a - b).norm_sqr()).sum();
        let db = 10.0 * (err / sig).log10();
        assert!((db + 20.0).abs() < 0.3, "{db}");
    }

    #[test]
    fn aging_extremes() {
        let cfg = ChannelGenConfig::default();
        let r = generate_network(&cfg, 7);
        assert_eq!(age_channel(&r, 1.0, &cfg.tap_powers(), 1), r);
        let corr = |rho: f64| -> f64 {
            let mut num = C64::default();
            let mut den = 0.0;
            for s in 0..200u64 {
                let a = generate_network(&cfg, s);
                let b = age_channel(&a, rho, &cfg.tap_powers(), 1000 + s);
                for (la, lb) in a.links.iter().flatten().zip(b.links.iter().flatten()) {
                    for (ta, tb) in la.taps.iter().zip(&lb.taps) {
                        for (za, zb) in ta.0.iter().flatten().zip(tb.0.iter().flatten()) {
                            num += zb * za.conj();
                            den += za.norm_sqr();
                        }
                    }
                }
            }
            num.re / den
        };
        assert!(corr(0.0).abs() < 0.05);
        assert!((corr(0.7) - 0.7).abs() < 0.02);
    }

    #[test]
    fn file_round_trip_and_truncation() {
        let mut r = generate_network(&ChannelGenConfig::default(), 11);
        r.delays_samples[1][2] = 7;
        let text = channels_to_string(&[r.clone(), generate_network(&ChannelGenConfig::default(), 12)]);
        let back = channels_from_str(&text).unwrap();
        assert_eq!(back[0], r);
        assert!(matches!(
            channels_from_str(&text[..text.len() / 2]),
            Err(ChannelError::ParseError(_))
        ));
    }
}
