//! Trial orchestration: the training stage, the five data-transmission
//! schemes, asynchrony emulation, parameter sweeps and aggregation.
//!
//! Every random draw comes from a seed derived from `(master seed, trial
//! index, stream tag)`, so the channel of a trial is identical across
//! schemes and across sweep values.

use std::path::PathBuf;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::align::{
    build_prefft_decoder, det_beamformers, ia_smooth_sets, max_sinr, used_channels,
    AlignError, IaSolution, MaxSinrConfig, PreFftDecoder, SubcarrierChannels,
};
use crate::channel::{
    accumulate_link, add_awgn, add_tx_noise, age_channel, awgn_variance, empirical_tap_powers, generate_network,
    load_channels, AntennaStreams, ChannelError, ChannelGenConfig, ImpairmentConfig, InterferenceChannelRealization,
    N_ANT, N_USERS,
};
use crate::metrics::{self, db, srnr_aggregate_db, TrainingEstimates};
use crate::numerics::{CMat2, CVec2, C64};
use crate::phy::ofdm::{demod_window, lts_freq, N_DATA, N_USED, STS_LEN, SYMBOL_LEN, CP_LEN, TIMING_BACKOFF};
use crate::phy::receiver::data_window;
use crate::phy::{
    assemble_data_frame, assemble_training_frame, decode_payload, detect_and_sync, receive_frame, Combiner, PhyFrame,
    RateParams, RxConfig, SyncConfig, PAYLOAD_BITS, RATES_MBPS,
};

/// Silent samples leading every transmission.
pub const LEAD_SAMPLES: usize = 160;
/// Timing errors beyond this many samples count as synchronization failures.
pub const SYNC_TOLERANCE: i64 = 8;

const TAG_CHANNEL: u64 = 0x01;
const TAG_TRAINING: u64 = 0x02;
const TAG_AGING: u64 = 0x03;
const TAG_BITS: u64 = 0x04;
const TAG_DATA: u64 = 0x05;
const TAG_MAXSINR: u64 = 0x06;
const TAG_DELAYS: u64 = 0x07;

/// splitmix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives an independent stream seed from `(master, index, tag)`.
pub fn derive_seed(master: u64, index: u64, tag: u64) -> u64 {
    mix(mix(mix(master) ^ index) ^ tag)
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid configuration: field `{field}`: {message}")]
    Config { field: String, message: String },
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error("no results to aggregate")]
    EmptyInput,
    #[error("stream length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
}

fn config_err(field: &str, message: impl Into<String>) -> ExperimentError {
    ExperimentError::Config {
        field: field.into(),
        message: message.into(),
    }
}

/// Transmission scheme.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Scheme {
    #[serde(rename = "IA")]
    Ia,
    #[serde(rename = "PerfectIA")]
    PerfectIa,
    #[serde(rename = "MaxSINR")]
    MaxSinr,
    #[serde(rename = "DET_TDMA")]
    DetTdma,
    #[serde(rename = "SISO_TDMA")]
    SisoTdma,
    /// IA evaluated on asynchronously combined interference-free captures.
    #[serde(rename = "IA_ASYNC")]
    IaAsync,
}

impl Scheme {
    pub const CONFIGURABLE: [Scheme; 5] = [
        Scheme::Ia,
        Scheme::PerfectIa,
        Scheme::MaxSinr,
        Scheme::DetTdma,
        Scheme::SisoTdma,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Ia => "IA",
            Scheme::PerfectIa => "PerfectIA",
            Scheme::MaxSinr => "MaxSINR",
            Scheme::DetTdma => "DET_TDMA",
            Scheme::SisoTdma => "SISO_TDMA",
            Scheme::IaAsync => "IA_ASYNC",
        }
    }

    pub fn from_name(s: &str) -> Option<Scheme> {
        [Scheme::IaAsync].iter().chain(Scheme::CONFIGURABLE.iter()).copied().find(|x| x.name() == s)
    }

    /// Whether the three users share the medium in time.
    pub fn time_shared(self) -> bool {
        matches!(self, Scheme::DetTdma | Scheme::SisoTdma)
    }
}

/// Which decoders to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecodeModes {
    PreFft,
    PostFft,
    Both,
}

impl DecodeModes {
    pub fn pre(self) -> bool {
        matches!(self, DecodeModes::PreFft | DecodeModes::Both)
    }

    pub fn post(self) -> bool {
        matches!(self, DecodeModes::PostFft | DecodeModes::Both)
    }
}

/// A single decoding path.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecodeMode {
    PreFft,
    PostFft,
}

impl DecodeMode {
    pub fn name(self) -> &'static str {
        match self {
            DecodeMode::PreFft => "pre_fft",
            DecodeMode::PostFft => "post_fft",
        }
    }
}

/// Inter-user delay emulation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum AsyncConfig {
    Off,
    /// Interfering delays drawn uniformly from `0..=max_delay` per trial.
    Random { max_delay: usize },
    /// Fixed delays `[rx][tx]`; the diagonal is ignored.
    Fixed { delays: [[usize; N_USERS]; N_USERS] },
}

impl AsyncConfig {
    pub fn enabled(&self) -> bool {
        !matches!(self, AsyncConfig::Off)
    }

    fn max_delay(&self) -> usize {
        match self {
            AsyncConfig::Off => 0,
            AsyncConfig::Random { max_delay } => *max_delay,
            AsyncConfig::Fixed { delays } => delays.iter().flatten().copied().max().unwrap_or(0),
        }
    }
}

/// MaxSINR settings; `sigma2` defaults to the mean training noise estimate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MaxSinrSettings {
    pub max_iters: usize,
    pub tol: f64,
    pub sigma2: Option<f64>,
}

impl Default for MaxSinrSettings {
    fn default() -> Self {
        MaxSinrSettings {
            max_iters: 100,
            tol: 1e-6,
            sigma2: None,
        }
    }
}

/// Complete description of an experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n_trials: usize,
    pub seed: u64,
    /// Optional channel file; realizations are used cyclically.
    pub channel_file: Option<PathBuf>,
    pub m_training: usize,
    pub decoder_len: usize,
    pub decode_mode: DecodeModes,
    pub rates: Vec<u32>,
    pub schemes: Vec<Scheme>,
    pub ber_target: f64,
    /// Rate whose EVM is summarized.
    pub evm_rate: u32,
    /// Feedback delay in aging intervals; the channel ages by `ρ^delay`.
    pub feedback_delay: u32,
    /// Design beamformers on the true instead of the estimated channels.
    pub genie_csi: bool,
    pub scrambler_seed: u8,
    pub channel: ChannelGenConfig,
    pub impairments: ImpairmentConfig,
    #[serde(rename = "async")]
    pub asynchrony: AsyncConfig,
    pub maxsinr: MaxSinrSettings,
    pub rx: RxConfig,
    pub sync: SyncConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            n_trials: 10,
            seed: 1,
            channel_file: None,
            m_training: 30,
            decoder_len: 30,
            decode_mode: DecodeModes::Both,
            rates: RATES_MBPS.to_vec(),
            schemes: Scheme::CONFIGURABLE.to_vec(),
            ber_target: 1e-4,
            evm_rate: 24,
            feedback_delay: 1,
            genie_csi: false,
            scrambler_seed: crate::phy::DEFAULT_SCRAMBLER_SEED,
            channel: ChannelGenConfig::default(),
            impairments: ImpairmentConfig::default(),
            asynchrony: AsyncConfig::Off,
            maxsinr: MaxSinrSettings::default(),
            rx: RxConfig::default(),
            sync: SyncConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.n_trials == 0 {
            return Err(config_err("n_trials", "must be at least 1"));
        }
        if self.m_training == 0 {
            return Err(config_err("m_training", "must be at least 1"));
        }
        if !(1..=64).contains(&self.decoder_len) {
            return Err(config_err("decoder_len", "must lie in 1..=64"));
        }
        if self.rates.is_empty() {
            return Err(config_err("rates", "must not be empty"));
        }
        for r in &self.rates {
            if RateParams::from_mbps(*r).is_none() {
                return Err(config_err("rates", format!("unsupported rate {r}")));
            }
        }
        if self.schemes.is_empty() && !self.asynchrony.enabled() {
            return Err(config_err("schemes", "must not be empty"));
        }
        if self.schemes.contains(&Scheme::IaAsync) {
            return Err(config_err("schemes", "IA_ASYNC is produced by the async setting"));
        }
        if !(self.ber_target >= 0.0 && self.ber_target <= 1.0) {
            return Err(config_err("ber_target", "must lie in [0, 1]"));
        }
        if RateParams::from_mbps(self.evm_rate).is_none() {
            return Err(config_err("evm_rate", "unsupported rate"));
        }
        if self.maxsinr.max_iters == 0 || !(self.maxsinr.tol > 0.0 && self.maxsinr.tol < 1.0) {
            return Err(config_err("maxsinr", "max_iters >= 1 and 0 < tol < 1 required"));
        }
        if let Some(s) = self.maxsinr.sigma2 {
            if !(s >= 0.0) {
                return Err(config_err("maxsinr.sigma2", "must be >= 0"));
            }
        }
        if self.sync.window == 0 || self.sync.plateau_len == 0 || !(self.sync.threshold > 0.0) {
            return Err(config_err("sync", "window, plateau_len and threshold must be positive"));
        }
        if self.asynchrony.max_delay() >= SYMBOL_LEN {
            return Err(config_err("async", "delays must be below one OFDM symbol (80 samples)"));
        }
        self.channel.validate().map_err(|e| config_err("channel", e.to_string()))?;
        self.impairments.validate().map_err(|e| config_err("impairments", e.to_string()))?;
        Ok(())
    }
}

/// Metrics of one user, scheme, rate and decoding path.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeMetrics {
    pub evm_db: f64,
    #[serde(skip)]
    pub evm_per_subcarrier_db: Vec<f64>,
    pub ber: f64,
    pub srnr_db: f64,
    pub leakage: f64,
    pub detected: bool,
    pub sync_ok: bool,
    pub timing_error: Option<i64>,
}

impl ModeMetrics {
    fn failed(detected: bool, timing_error: Option<i64>) -> Self {
        ModeMetrics {
            evm_db: f64::INFINITY,
            evm_per_subcarrier_db: Vec::new(),
            ber: 0.5,
            srnr_db: f64::NAN,
            leakage: f64::NAN,
            detected,
            sync_ok: false,
            timing_error,
        }
    }

    /// Element-wise mean, used to merge the two SISO receive antennas.
    fn average(a: &ModeMetrics, b: &ModeMetrics) -> ModeMetrics {
        let lin = |x: f64| 10f64.powf(x / 10.0);
        ModeMetrics {
            evm_db: db(0.5 * (lin(a.evm_db) + lin(b.evm_db))),
            evm_per_subcarrier_db: a
                .evm_per_subcarrier_db
                .iter()
                .zip(&b.evm_per_subcarrier_db)
                .map(|(x, y)| db(0.5 * (lin(*x) + lin(*y))))
                .collect(),
            ber: 0.5 * (a.ber + b.ber),
            srnr_db: 0.5 * (a.srnr_db + b.srnr_db),
            leakage: 0.5 * (a.leakage + b.leakage),
            detected: a.detected && b.detected,
            sync_ok: a.sync_ok && b.sync_ok,
            timing_error: a.timing_error,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateResult {
    pub rate_mbps: u32,
    pub pre_fft: Option<ModeMetrics>,
    pub post_fft: Option<ModeMetrics>,
}

impl RateResult {
    pub fn mode(&self, m: DecodeMode) -> Option<&ModeMetrics> {
        match m {
            DecodeMode::PreFft => self.pre_fft.as_ref(),
            DecodeMode::PostFft => self.post_fft.as_ref(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UserResult {
    pub user: usize,
    pub rates: Vec<RateResult>,
}

impl UserResult {
    pub fn at_rate(&self, rate: u32) -> Option<&RateResult> {
        self.rates.iter().find(|r| r.rate_mbps == rate)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchemeResult {
    pub scheme: Scheme,
    pub users: Vec<UserResult>,
}

/// One link's training estimates for a receive/transmit antenna pair.
#[derive(Clone, Debug, PartialEq)]
pub struct LinkTraining {
    pub rx: usize,
    pub tx: usize,
    pub rx_ant: usize,
    pub tx_ant: usize,
    pub estimates: TrainingEstimates,
}

/// Everything measured for one channel realization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub trial: usize,
    /// Set when the trial was skipped, with the reason.
    pub skipped: Option<String>,
    /// Desired-link training SRNR per user (dB).
    pub training_srnr_db: Vec<f64>,
    /// Mean training noise estimate over all links (MaxSINR default σ²).
    pub training_noise: f64,
    /// Inter-user delays applied by the asynchrony emulation.
    pub delays: Option<[[usize; N_USERS]; N_USERS]>,
    pub schemes: Vec<SchemeResult>,
    #[serde(skip)]
    pub training: Vec<LinkTraining>,
}

impl TrialResult {
    pub fn scheme(&self, s: Scheme) -> Option<&SchemeResult> {
        self.schemes.iter().find(|r| r.scheme == s)
    }

    /// Metric for `(scheme, user, rate, mode)` if present.
    pub fn metrics(&self, s: Scheme, user: usize, rate: u32, mode: DecodeMode) -> Option<&ModeMetrics> {
        self.scheme(s)?.users.get(user)?.at_rate(rate)?.mode(mode)
    }
}

/// Channel source of an experiment.
#[derive(Clone, Debug)]
enum ChannelSource {
    Synthetic,
    File(Arc<Vec<InterferenceChannelRealization>>),
}

/// A validated experiment ready to run trials.
#[derive(Clone, Debug)]
pub struct Experiment {
    pub cfg: ExperimentConfig,
    source: ChannelSource,
}

/// Pads a frame with leading silence and a tail.
fn pad(frame: &[Vec<C64>; 2], lead: usize, total: usize) -> AntennaStreams {
    std::array::from_fn(|a| {
        let mut v = vec![C64::default(); total];
        v[lead..lead + frame[a].len()].copy_from_slice(&frame[a]);
        v
    })
}

/// Delays each capture by its `delays[j]` and sums them; output length is
/// the common input length.
pub fn emulate_async(captures: &[&AntennaStreams], delays: &[usize]) -> Result<AntennaStreams, ExperimentError> {
    let len = captures.first().map(|c| c[0].len()).unwrap_or(0);
    for c in captures {
        for s in c.iter() {
            if s.len() != len {
                return Err(ExperimentError::LengthMismatch { expected: len, got: s.len() });
            }
        }
    }
    if delays.len() != captures.len() {
        return Err(ExperimentError::LengthMismatch {
            expected: captures.len(),
            got: delays.len(),
        });
    }
    let mut out: AntennaStreams = std::array::from_fn(|_| vec![C64::default(); len]);
    for (c, &d) in captures.iter().zip(delays) {
        for a in 0..N_ANT {
            for n in d..len {
                out[a][n] += c[a][n - d];
            }
        }
    }
    Ok(out)
}

fn random_bits(seed: u64) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..PAYLOAD_BITS).map(|_| rng.random_range(0..2u8)).collect()
}

/// Per-antenna decoders of one user across used subcarriers.
struct UserDesign {
    precoders: Vec<CVec2>,
    decoders: Vec<CVec2>,
    prefft: Option<PreFftDecoder>,
}

/// Post-FFT measured interference power: symbol-averaged `Σₖ |uₖᴴ yₖ|²`
/// over the data windows of a frame starting at `start`.
fn measured_leakage_post(streams: &AntennaStreams, u: &[CVec2], start: usize, n_syms: usize) -> f64 {
    let mut acc = 0.0;
    for s in 0..n_syms {
        let w = data_window(start, s);
        let y0 = demod_window(&streams[0], w, 0.0);
        let y1 = demod_window(&streams[1], w, 0.0);
        acc += (0..N_USED).map(|k| u[k].dot(&CVec2::new(y0[k], y1[k])).norm_sqr()).sum::<f64>();
    }
    acc / n_syms.max(1) as f64
}

/// Pre-FFT measured interference power over the payload span, scaled to
/// the same per-subcarrier sum as [`measured_leakage_post`].
fn measured_leakage_pre(z: &[C64], start: usize, n_syms: usize) -> f64 {
    let lo = (start + crate::phy::ofdm::PREAMBLE_LEN).min(z.len());
    let hi = (lo + n_syms * SYMBOL_LEN).min(z.len());
    if hi <= lo {
        return 0.0;
    }
    N_USED as f64 * z[lo..hi].iter().map(|x| x.norm_sqr()).sum::<f64>() / (hi - lo) as f64
}

/// Analytic leakage `Σ_{j≠i} Σₖ |uₖᴴ H_ij[k] v_j[k]|²` on the given channels.
fn analytic_leakage(channels: &[SubcarrierChannels], i: usize, u: &[CVec2], v: &[Vec<CVec2>]) -> f64 {
    let mut total = 0.0;
    for j in 0..N_USERS {
        if j == i {
            continue;
        }
        let h: Vec<CMat2> = channels.iter().map(|c| c[i][j]).collect();
        total += metrics::interference_leakage(u, &[(&h, &v[j])]);
    }
    total
}

impl Experiment {
    /// Validates the configuration and loads the channel file if any.
    pub fn new(cfg: ExperimentConfig) -> Result<Self, ExperimentError> {
        cfg.validate()?;
        let source = match &cfg.channel_file {
            Some(p) => {
                let r = load_channels(p)?;
                if r.is_empty() {
                    return Err(config_err("channel_file", "file holds no realizations"));
                }
                ChannelSource::File(Arc::new(r))
            }
            None => ChannelSource::Synthetic,
        };
        Ok(Experiment { cfg, source })
    }

    /// The true channel of trial `t` (before aging), with zero delays.
    pub fn realization(&self, t: usize) -> InterferenceChannelRealization {
        let mut r = match &self.source {
            ChannelSource::Synthetic => generate_network(
                &self.cfg.channel,
                derive_seed(self.cfg.seed, t as u64, TAG_CHANNEL ^ self.cfg.channel.seed.rotate_left(8)),
            ),
            ChannelSource::File(v) => v[t % v.len()].clone(),
        };
        r.delays_samples = [[0; N_USERS]; N_USERS];
        r
    }

    fn tap_powers(&self, r: &InterferenceChannelRealization) -> Vec<f64> {
        match self.source {
            ChannelSource::Synthetic => self.cfg.channel.tap_powers(),
            ChannelSource::File(_) => empirical_tap_powers(r),
        }
    }

    fn tail(&self, r: &InterferenceChannelRealization) -> usize {
        self.cfg.asynchrony.max_delay() + r.max_taps() + 2 * SYMBOL_LEN
    }

    /// Sends `txs` (user, streams) over `real` and returns the captures at
    /// receivers `rxs`. Noise is added only when `noisy`.
    fn transmit(
        &self,
        txs: &[(usize, &AntennaStreams)],
        rxs: &[usize],
        real: &InterferenceChannelRealization,
        noisy: bool,
        seed: u64,
    ) -> Vec<AntennaStreams> {
        let imp = &self.cfg.impairments;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let len = txs[0].1[0].len();
        let sent: Vec<(usize, AntennaStreams)> = txs
            .iter()
            .map(|(j, x)| {
                let mut s = (*x).clone();
                if noisy {
                    add_tx_noise(&mut s, imp.tx_evm_db, &mut rng);
                }
                (*j, s)
            })
            .collect();
        rxs.iter()
            .map(|&i| {
                let mut out: AntennaStreams = std::array::from_fn(|_| vec![C64::default(); len]);
                for (j, x) in &sent {
                    accumulate_link(&real.links[i][*j], real.delays_samples[i][*j], x, &mut out);
                }
                if noisy {
                    add_awgn(&mut out, awgn_variance(real, i, imp.awgn_snr_db), &mut rng);
                }
                out
            })
            .collect()
    }

    /// Sequential training of all six transmit antennas with known timing.
    /// Returns the estimated used-subcarrier channels and per-link estimates.
    pub fn training_stage(
        &self,
        real: &InterferenceChannelRealization,
        trial: usize,
    ) -> (Vec<SubcarrierChannels>, Vec<LinkTraining>) {
        let m = self.cfg.m_training;
        let tail = real.max_taps() + SYMBOL_LEN;
        let mut est: Vec<SubcarrierChannels> = vec![[[CMat2::ZERO; N_USERS]; N_USERS]; N_USED];
        let mut links = Vec::with_capacity(36);
        let known = lts_freq();
        for j in 0..N_USERS {
            for a in 0..N_ANT {
                let frame = assemble_training_frame(m, a).expect("m >= 1");
                let total = LEAD_SAMPLES + frame[0].len() + tail;
                let tx = pad(&frame, LEAD_SAMPLES, total);
                let seed = derive_seed(self.cfg.seed, trial as u64, TAG_TRAINING ^ ((j * N_ANT + a) as u64) << 8);
                let caps = self.transmit(&[(j, &tx)], &[0, 1, 2], real, true, seed);
                for (i, cap) in caps.iter().enumerate() {
                    for (r, stream) in cap.iter().enumerate() {
                        let rows: Vec<[C64; N_USED]> = (0..m)
                            .map(|s| {
                                let w = LEAD_SAMPLES + STS_LEN + s * SYMBOL_LEN + CP_LEN - TIMING_BACKOFF;
                                demod_window(stream, w, 0.0)
                            })
                            .collect();
                        let e = metrics::training_estimates(&rows, &known).expect("fixed layout");
                        for (k, h) in e.h.iter().enumerate() {
                            est[k][i][j].0[r][a] = *h;
                        }
                        links.push(LinkTraining {
                            rx: i,
                            tx: j,
                            rx_ant: r,
                            tx_ant: a,
                            estimates: e,
                        });
                    }
                }
            }
        }
        (est, links)
    }

    fn delays_for(&self, trial: usize) -> Option<[[usize; N_USERS]; N_USERS]> {
        let mut d = match &self.cfg.asynchrony {
            AsyncConfig::Off => return None,
            AsyncConfig::Fixed { delays } => *delays,
            AsyncConfig::Random { max_delay } => {
                let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(self.cfg.seed, trial as u64, TAG_DELAYS));
                std::array::from_fn(|_| std::array::from_fn(|_| rng.random_range(0..=*max_delay)))
            }
        };
        for (i, row) in d.iter_mut().enumerate() {
            row[i] = 0;
        }
        Some(d)
    }

    /// Runs the whole two-stage methodology for trial `t`.
    pub fn run_trial(&self, t: usize) -> TrialResult {
        let cfg = &self.cfg;
        let truth = self.realization(t);
        let (est, training) = self.training_stage(&truth, t);
        let training_noise =
            training.iter().flat_map(|l| l.estimates.noise.iter()).sum::<f64>() / (training.len() * N_USED) as f64;
        let training_srnr_db = (0..N_USERS)
            .map(|i| {
                let v: Vec<f64> = training
                    .iter()
                    .filter(|l| l.rx == i && l.tx == i)
                    .map(|l| srnr_aggregate_db(&l.estimates))
                    .collect();
                v.iter().sum::<f64>() / v.len() as f64
            })
            .collect();
        let rho = cfg.impairments.aging_rho.powi(cfg.feedback_delay as i32);
        let aged = age_channel(&truth, rho, &self.tap_powers(&truth), derive_seed(cfg.seed, t as u64, TAG_AGING));
        let true_used = used_channels(&aged.freq_responses(64).expect("taps fit the FFT"));
        let design = if cfg.genie_csi { true_used.clone() } else { est };
        let delays = self.delays_for(t);
        let mut result = TrialResult {
            trial: t,
            skipped: None,
            training_srnr_db,
            training_noise,
            delays,
            schemes: Vec::new(),
            training,
        };
        match self.data_stage(t, &aged, &design, &true_used, training_noise, delays) {
            Ok(s) => result.schemes = s,
            Err(e) => result.skipped = Some(e.to_string()),
        }
        result
    }

    fn data_stage(
        &self,
        t: usize,
        real: &InterferenceChannelRealization,
        design: &[SubcarrierChannels],
        truth: &[SubcarrierChannels],
        training_noise: f64,
        delays: Option<[[usize; N_USERS]; N_USERS]>,
    ) -> Result<Vec<SchemeResult>, AlignError> {
        let cfg = &self.cfg;
        let want = |s: Scheme| cfg.schemes.contains(&s);
        let need_ia = want(Scheme::Ia) || want(Scheme::PerfectIa) || delays.is_some();
        let ia: Option<IaSolution> = if need_ia {
            Some(ia_smooth_sets(design)?[0].clone())
        } else {
            None
        };
        let ia_users = ia.as_ref().map(|s| self.user_designs(s)).transpose()?;
        let ms_users = if want(Scheme::MaxSinr) {
            let ms_cfg = MaxSinrConfig {
                max_iters: cfg.maxsinr.max_iters,
                tol: cfg.maxsinr.tol,
                sigma2: cfg.maxsinr.sigma2.unwrap_or(training_noise),
            };
            let sol = max_sinr(design, &ms_cfg, derive_seed(cfg.seed, t as u64, TAG_MAXSINR));
            Some(self.user_designs(&sol)?)
        } else {
            None
        };
        let det = if want(Scheme::DetTdma) {
            let mut v = Vec::with_capacity(N_USERS);
            for i in 0..N_USERS {
                let h: Vec<CMat2> = design.iter().map(|c| c[i][i]).collect();
                let b = det_beamformers(&h).map_err(|source| AlignError::Numerics { subcarrier: 0, source })?;
                v.push(UserDesign {
                    precoders: b.iter().map(|x| x.v).collect(),
                    decoders: b.iter().map(|x| x.u).collect(),
                    prefft: None,
                });
            }
            Some(v)
        } else {
            None
        };

        let mut out: Vec<SchemeResult> = Vec::new();
        let mut push = |scheme: Scheme, user: usize, rr: RateResult| {
            if let Some(s) = out.iter_mut().find(|s| s.scheme == scheme) {
                if let Some(u) = s.users.iter_mut().find(|u| u.user == user) {
                    u.rates.push(rr);
                    return;
                }
                s.users.push(UserResult { user, rates: vec![rr] });
                return;
            }
            out.push(SchemeResult {
                scheme,
                users: vec![UserResult { user, rates: vec![rr] }],
            });
        };

        let tail = self.tail(real);
        for (ri, &rate_mbps) in cfg.rates.iter().enumerate() {
            let rate = RateParams::from_mbps(rate_mbps).expect("validated");
            let bits: Vec<Vec<u8>> = (0..N_USERS)
                .map(|i| random_bits(derive_seed(cfg.seed, t as u64, TAG_BITS ^ ((i as u64) << 8) ^ ((rate_mbps as u64) << 16))))
                .collect();
            let noise_seed = |scheme: u64, k: u64| {
                derive_seed(cfg.seed, t as u64, TAG_DATA ^ (scheme << 8) ^ ((ri as u64) << 16) ^ (k << 24))
            };

            let frames_for = |users: &[UserDesign]| -> Vec<PhyFrame> {
                (0..N_USERS)
                    .map(|i| assemble_data_frame(&bits[i], &rate, &users[i].precoders, cfg.scrambler_seed).expect("52 precoders"))
                    .collect()
            };
            let padded = |frames: &[PhyFrame]| -> Vec<AntennaStreams> {
                frames
                    .iter()
                    .map(|f| pad(&f.antenna_streams, LEAD_SAMPLES, LEAD_SAMPLES + f.len() + tail))
                    .collect()
            };

            // Simultaneous IA and MaxSINR.
            for (scheme, tag, users) in [(Scheme::Ia, 1u64, &ia_users), (Scheme::MaxSinr, 3, &ms_users)] {
                if !want(scheme) {
                    continue;
                }
                let users = users.as_ref().expect("designed above");
                let frames = frames_for(users);
                let tx = padded(&frames);
                let txs: Vec<(usize, &AntennaStreams)> = tx.iter().enumerate().collect();
                let caps = self.transmit(&txs, &[0, 1, 2], real, true, noise_seed(tag, 0));
                let v_all: Vec<Vec<CVec2>> = users.iter().map(|u| u.precoders.clone()).collect();
                for i in 0..N_USERS {
                    let (pre, post) = self.decode_both(&frames[i], &caps[i], &users[i]);
                    let pre = pre.map(|mut m| {
                        let resp = users[i].prefft.as_ref().expect("pre decoder").used_response();
                        m.leakage = analytic_leakage(truth, i, &resp, &v_all);
                        m
                    });
                    let post = post.map(|mut m| {
                        m.leakage = analytic_leakage(truth, i, &users[i].decoders, &v_all);
                        m
                    });
                    push(scheme, i, RateResult { rate_mbps, pre_fft: pre, post_fft: post });
                }
            }

            // Perfect IA captures, also the raw material of the async emulation.
            if want(Scheme::PerfectIa) || delays.is_some() {
                let users = ia_users.as_ref().expect("designed above");
                let frames = frames_for(users);
                let tx = padded(&frames);
                let noisy: Vec<Vec<AntennaStreams>> = (0..N_USERS)
                    .map(|j| self.transmit(&[(j, &tx[j])], &[0, 1, 2], real, true, noise_seed(2, j as u64)))
                    .collect();
                let clean: Vec<Vec<AntennaStreams>> = (0..N_USERS)
                    .map(|j| self.transmit(&[(j, &tx[j])], &[0, 1, 2], real, false, 0))
                    .collect();
                if want(Scheme::PerfectIa) {
                    for i in 0..N_USERS {
                        let interferers: Vec<&AntennaStreams> = (0..N_USERS).filter(|&j| j != i).map(|j| &clean[j][i]).collect();
                        let (pre, post) = self.decode_both(&frames[i], &noisy[i][i], &users[i]);
                        let n_syms = frames[i].n_data_symbols;
                        let pre = pre.map(|mut m| {
                            let dec = users[i].prefft.as_ref().expect("pre decoder");
                            m.leakage = interferers
                                .iter()
                                .map(|c| measured_leakage_pre(&dec.apply([&c[0], &c[1]]), LEAD_SAMPLES, n_syms))
                                .sum();
                            m
                        });
                        let post = post.map(|mut m| {
                            m.leakage = interferers
                                .iter()
                                .map(|c| measured_leakage_post(c, &users[i].decoders, LEAD_SAMPLES, n_syms))
                                .sum();
                            m
                        });
                        push(Scheme::PerfectIa, i, RateResult { rate_mbps, pre_fft: pre, post_fft: post });
                    }
                }
                if let Some(d) = delays {
                    for i in 0..N_USERS {
                        let caps: Vec<&AntennaStreams> = (0..N_USERS).map(|j| &noisy[j][i]).collect();
                        let combined = emulate_async(&caps, &d[i]).expect("equal lengths");
                        let (pre, post) = self.decode_both(&frames[i], &combined, &users[i]);
                        let n_syms = frames[i].n_data_symbols;
                        let interf: Vec<&AntennaStreams> = (0..N_USERS).filter(|&j| j != i).map(|j| &clean[j][i]).collect();
                        let id: Vec<usize> = (0..N_USERS).filter(|&j| j != i).map(|j| d[i][j]).collect();
                        let interf_sum = emulate_async(&interf, &id).expect("equal lengths");
                        let pre = pre.map(|mut m| {
                            let dec = users[i].prefft.as_ref().expect("pre decoder");
                            m.leakage = measured_leakage_pre(&dec.apply([&interf_sum[0], &interf_sum[1]]), LEAD_SAMPLES, n_syms);
                            m
                        });
                        let post = post.map(|mut m| {
                            m.leakage = measured_leakage_post(&interf_sum, &users[i].decoders, LEAD_SAMPLES, n_syms);
                            m
                        });
                        push(Scheme::IaAsync, i, RateResult { rate_mbps, pre_fft: pre, post_fft: post });
                    }
                }
            }

            if let Some(users) = det.as_ref() {
                let frames = frames_for(users);
                let tx = padded(&frames);
                for i in 0..N_USERS {
                    let cap = &self.transmit(&[(i, &tx[i])], &[i], real, true, noise_seed(4, i as u64))[0];
                    let streams = [cap[0].as_slice(), cap[1].as_slice()];
                    let mut m = self.evaluate(&frames[i], &streams, Combiner::Decoder(&users[i].decoders));
                    m.leakage = 0.0;
                    push(Scheme::DetTdma, i, RateResult { rate_mbps, pre_fft: None, post_fft: Some(m) });
                }
            }

            if want(Scheme::SisoTdma) {
                let e1 = vec![CVec2::e1(); N_USED];
                for i in 0..N_USERS {
                    let frame = assemble_data_frame(&bits[i], &rate, &e1, cfg.scrambler_seed).expect("52 precoders");
                    let tx = pad(&frame.antenna_streams, LEAD_SAMPLES, LEAD_SAMPLES + frame.len() + tail);
                    let cap = &self.transmit(&[(i, &tx)], &[i], real, true, noise_seed(5, i as u64))[0];
                    let a = self.evaluate(&frame, &[cap[0].as_slice()], Combiner::Single);
                    let b = self.evaluate(&frame, &[cap[1].as_slice()], Combiner::Single);
                    let mut m = ModeMetrics::average(&a, &b);
                    m.leakage = 0.0;
                    push(Scheme::SisoTdma, i, RateResult { rate_mbps, pre_fft: None, post_fft: Some(m) });
                }
            }
        }
        out.sort_by_key(|s| s.scheme);
        for s in out.iter_mut() {
            s.users.sort_by_key(|u| u.user);
        }
        Ok(out)
    }

    fn user_designs(&self, sol: &IaSolution) -> Result<Vec<UserDesign>, AlignError> {
        let pre = if self.cfg.decode_mode.pre() {
            Some(build_prefft_decoder(sol, self.cfg.decoder_len)?)
        } else {
            None
        };
        Ok((0..N_USERS)
            .map(|i| UserDesign {
                precoders: sol.user_precoders(i),
                decoders: sol.user_decoders(i),
                prefft: pre.as_ref().map(|p| p[i].clone()),
            })
            .collect())
    }

    /// Pre- and post-FFT decoding of one capture, per the configured modes.
    fn decode_both(
        &self,
        frame: &PhyFrame,
        cap: &AntennaStreams,
        user: &UserDesign,
    ) -> (Option<ModeMetrics>, Option<ModeMetrics>) {
        let pre = user.prefft.as_ref().filter(|_| self.cfg.decode_mode.pre()).map(|dec| {
            let z = dec.apply([&cap[0], &cap[1]]);
            self.evaluate(frame, &[z.as_slice()], Combiner::Single)
        });
        let post = self.cfg.decode_mode.post().then(|| {
            self.evaluate(frame, &[cap[0].as_slice(), cap[1].as_slice()], Combiner::Decoder(&user.decoders))
        });
        (pre, post)
    }

    /// Synchronizes, equalizes and decodes one frame.
    fn evaluate(&self, frame: &PhyFrame, streams: &[&[C64]], combiner: Combiner<'_>) -> ModeMetrics {
        let sync = detect_and_sync(streams, &self.cfg.sync);
        if !sync.detected {
            return ModeMetrics::failed(false, None);
        }
        let te = sync.frame_start as i64 - LEAD_SAMPLES as i64;
        let rx = match receive_frame(streams, sync.frame_start, sync.cfo_norm(), frame.n_data_symbols, combiner, &self.cfg.rx) {
            Ok(r) => r,
            Err(_) => return ModeMetrics::failed(true, Some(te)),
        };
        let eq_rows: Vec<&[C64]> = rx.data.chunks(N_DATA).collect();
        let ref_rows: Vec<&[C64]> = frame.data_symbols.chunks(N_DATA).collect();
        let evm = metrics::evm(&eq_rows, &ref_rows).expect("matching layout");
        let bits = decode_payload(&rx.data, &frame.rate).expect("matching layout");
        ModeMetrics {
            evm_db: evm.aggregate_db(),
            evm_per_subcarrier_db: evm.per_subcarrier_db(),
            ber: metrics::ber(&bits, &frame.source_bits).expect("equal lengths"),
            srnr_db: srnr_aggregate_db(&rx.estimates),
            leakage: 0.0,
            detected: true,
            sync_ok: te.abs() <= SYNC_TOLERANCE,
            timing_error: Some(te),
        }
    }

    /// Runs every trial (in parallel) in trial order.
    pub fn run_all(&self) -> Vec<TrialResult> {
        (0..self.cfg.n_trials).into_par_iter().map(|t| self.run_trial(t)).collect()
    }
}

/// Convenience wrapper: validates `cfg` and runs trial `trial_index`.
pub fn run_trial(cfg: &ExperimentConfig, trial_index: usize) -> Result<TrialResult, ExperimentError> {
    Ok(Experiment::new(cfg.clone())?.run_trial(trial_index))
}

// ---------------------------------------------------------------------------
// Statistics and aggregation.

/// Linear-interpolated percentile (`q` in `[0, 1]`) of finite-or-infinite
/// values; NaNs are dropped.
pub fn percentile(values: &[f64], q: f64) -> f64 {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| !x.is_nan()).collect();
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let pos = q.clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi || v[lo] == v[hi] {
        return v[lo];
    }
    v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
}

pub fn median(values: &[f64]) -> f64 {
    percentile(values, 0.5)
}

/// Empirical CDF as `(value, probability)` steps.
pub fn ecdf(values: &[f64]) -> Vec<(f64, f64)> {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| !x.is_nan()).collect();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(v.len());
    for (k, x) in v.iter().enumerate() {
        let p = (k + 1) as f64 / n;
        match out.last_mut() {
            Some(last) if last.0 == *x => last.1 = p,
            _ => out.push((*x, p)),
        }
    }
    out
}

/// Histogram density over finite values: `(bin_center, density)`.
pub fn histogram_pdf(values: &[f64], bin_width: f64) -> Vec<(f64, f64)> {
    let v: Vec<f64> = values.iter().copied().filter(|x| x.is_finite()).collect();
    if v.is_empty() {
        return Vec::new();
    }
    let lo = (v.iter().copied().fold(f64::INFINITY, f64::min) / bin_width).floor() as i64;
    let hi = (v.iter().copied().fold(f64::NEG_INFINITY, f64::max) / bin_width).floor() as i64;
    let mut counts = vec![0usize; (hi - lo + 1) as usize];
    for x in &v {
        counts[((x / bin_width).floor() as i64 - lo) as usize] += 1;
    }
    let n = v.len() as f64;
    counts
        .iter()
        .enumerate()
        .map(|(k, &c)| ((lo + k as i64) as f64 * bin_width + 0.5 * bin_width, c as f64 / (n * bin_width)))
        .collect()
}

/// Values of one metric across (trial, user) for a scheme, rate and mode.
pub fn collect_metric(
    results: &[TrialResult],
    scheme: Scheme,
    rate: u32,
    mode: DecodeMode,
    f: impl Fn(&ModeMetrics) -> f64,
) -> Vec<f64> {
    results
        .iter()
        .filter(|r| r.skipped.is_none())
        .flat_map(|r| (0..N_USERS).filter_map(move |u| r.metrics(scheme, u, rate, mode)))
        .map(f)
        .collect()
}

/// Per-(trial, user) `EVM_pre − EVM_post` in dB.
pub fn degradations(results: &[TrialResult], scheme: Scheme, rate: u32) -> Vec<f64> {
    results
        .iter()
        .filter(|r| r.skipped.is_none())
        .flat_map(|r| {
            (0..N_USERS).filter_map(move |u| {
                let pre = r.metrics(scheme, u, rate, DecodeMode::PreFft)?;
                let post = r.metrics(scheme, u, rate, DecodeMode::PostFft)?;
                Some(pre.evm_db - post.evm_db)
            })
        })
        .collect()
}

/// Sum-rate of one trial for a scheme and mode; skipped trials give 0.
pub fn trial_sum_rate(r: &TrialResult, scheme: Scheme, mode: DecodeMode, ber_target: f64) -> f64 {
    let Some(s) = r.scheme(scheme) else { return 0.0 };
    let table: Vec<(Vec<f64>, Vec<u32>)> = s
        .users
        .iter()
        .map(|u| {
            let (b, rt): (Vec<f64>, Vec<u32>) =
                u.rates.iter().filter_map(|rr| rr.mode(mode).map(|m| (m.ber, rr.rate_mbps))).unzip();
            (b, rt)
        })
        .collect();
    let share = if scheme.time_shared() { N_USERS as f64 } else { 1.0 };
    table.iter().map(|(b, rt)| metrics::best_rate(b, rt, ber_target) / share).sum()
}

/// Mean sum-rate over trials.
pub fn mean_sum_rate(results: &[TrialResult], scheme: Scheme, mode: DecodeMode, ber_target: f64) -> f64 {
    if results.is_empty() {
        return 0.0;
    }
    results.iter().map(|r| trial_sum_rate(r, scheme, mode, ber_target)).sum::<f64>() / results.len() as f64
}

/// Fraction of (trial, user) frames that failed synchronization.
pub fn sync_failure_rate(results: &[TrialResult], scheme: Scheme, rate: u32, mode: DecodeMode) -> f64 {
    let v = collect_metric(results, scheme, rate, mode, |m| if m.sync_ok { 0.0 } else { 1.0 });
    if v.is_empty() {
        f64::NAN
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    }
}

/// Per scheme/mode summary statistics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchemeSummary {
    pub scheme: Scheme,
    pub mode: DecodeMode,
    pub median_evm_db: f64,
    pub median_ber: f64,
    pub median_srnr_db: f64,
    pub median_leakage: f64,
    pub mean_sum_rate_mbps: f64,
    pub sync_failure_rate: f64,
    /// EVM CDF at the summary rate.
    pub evm_cdf: Vec<(f64, f64)>,
    /// EVM histogram density with 0.5 dB bins.
    pub evm_pdf: Vec<(f64, f64)>,
}

/// Aggregate view of a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub n_trials: usize,
    pub n_skipped: usize,
    pub skipped_reasons: Vec<String>,
    pub evm_rate: u32,
    pub ber_target: f64,
    pub schemes: Vec<SchemeSummary>,
}

/// Schemes and modes present in a result set, in canonical order.
pub fn present_scheme_modes(results: &[TrialResult]) -> Vec<(Scheme, DecodeMode)> {
    let mut out: Vec<(Scheme, DecodeMode)> = Vec::new();
    for r in results {
        for s in &r.schemes {
            for u in &s.users {
                for rr in &u.rates {
                    for (m, present) in [(DecodeMode::PreFft, rr.pre_fft.is_some()), (DecodeMode::PostFft, rr.post_fft.is_some())] {
                        if present && !out.contains(&(s.scheme, m)) {
                            out.push((s.scheme, m));
                        }
                    }
                }
            }
        }
    }
    out.sort_by_key(|(s, m)| (*s, *m == DecodeMode::PostFft));
    out
}

/// CDFs, histogram PDFs, medians and mean sum-rates per scheme and mode.
pub fn aggregate(results: &[TrialResult], evm_rate: u32, ber_target: f64) -> Result<Summary, ExperimentError> {
    if results.is_empty() {
        return Err(ExperimentError::EmptyInput);
    }
    let schemes = present_scheme_modes(results)
        .into_iter()
        .map(|(s, m)| {
            let evm = collect_metric(results, s, evm_rate, m, |x| x.evm_db);
            SchemeSummary {
                scheme: s,
                mode: m,
                median_evm_db: median(&evm),
                median_ber: median(&collect_metric(results, s, evm_rate, m, |x| x.ber)),
                median_srnr_db: median(&collect_metric(results, s, evm_rate, m, |x| x.srnr_db)),
                median_leakage: median(&collect_metric(results, s, evm_rate, m, |x| x.leakage)),
                mean_sum_rate_mbps: mean_sum_rate(results, s, m, ber_target),
                sync_failure_rate: sync_failure_rate(results, s, evm_rate, m),
                evm_cdf: ecdf(&evm),
                evm_pdf: histogram_pdf(&evm, 0.5),
            }
        })
        .collect();
    Ok(Summary {
        n_trials: results.len(),
        n_skipped: results.iter().filter(|r| r.skipped.is_some()).count(),
        skipped_reasons: results.iter().filter_map(|r| r.skipped.clone()).collect(),
        evm_rate,
        ber_target,
        schemes,
    })
}

// ---------------------------------------------------------------------------
// Sweeps.

/// Parameter swept by [`sweep`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    /// Training symbols.
    M,
    /// Pre-FFT decoder length.
    L,
    /// Aging correlation per feedback interval.
    Rho,
    /// Receiver SNR in dB.
    Snr,
    /// Feedback delay in aging intervals.
    Feedback,
}

impl SweepAxis {
    pub fn parse(s: &str) -> Option<SweepAxis> {
        match s.to_ascii_lowercase().as_str() {
            "m" => Some(SweepAxis::M),
            "l" => Some(SweepAxis::L),
            "rho" => Some(SweepAxis::Rho),
            "snr" => Some(SweepAxis::Snr),
            "feedback" => Some(SweepAxis::Feedback),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::M => "M",
            SweepAxis::L => "L",
            SweepAxis::Rho => "rho",
            SweepAxis::Snr => "snr",
            SweepAxis::Feedback => "feedback",
        }
    }

    /// Copy of `cfg` with the axis set to `value`.
    pub fn apply(self, cfg: &ExperimentConfig, value: f64) -> Result<ExperimentConfig, ExperimentError> {
        let mut c = cfg.clone();
        let as_count = |field: &str| -> Result<usize, ExperimentError> {
            if value >= 0.0 && value.fract() == 0.0 {
                Ok(value as usize)
            } else {
                Err(config_err(field, format!("sweep value {value} is not a non-negative integer")))
            }
        };
        match self {
            SweepAxis::M => c.m_training = as_count("m_training")?,
            SweepAxis::L => c.decoder_len = as_count("decoder_len")?,
            SweepAxis::Rho => c.impairments.aging_rho = value,
            SweepAxis::Snr => c.impairments.awgn_snr_db = value,
            SweepAxis::Feedback => c.feedback_delay = as_count("feedback_delay")? as u32,
        }
        c.validate()?;
        Ok(c)
    }
}

/// One row of the combined sweep table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub axis_value: f64,
    pub scheme: String,
    pub mode: String,
    pub metric: String,
    pub median: f64,
    pub p10: f64,
    pub p90: f64,
}

/// Results of a sweep: per-value trial results plus the combined table.
#[derive(Clone, Debug)]
pub struct SweepOutput {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    pub results: Vec<Vec<TrialResult>>,
    pub rows: Vec<SweepRow>,
}

fn stat_row(axis_value: f64, scheme: Scheme, mode: DecodeMode, metric: &str, v: &[f64]) -> SweepRow {
    SweepRow {
        axis_value,
        scheme: scheme.name().into(),
        mode: mode.name().into(),
        metric: metric.into(),
        median: median(v),
        p10: percentile(v, 0.1),
        p90: percentile(v, 0.9),
    }
}

/// Sweep rows for one axis value.
pub fn sweep_rows(axis_value: f64, results: &[TrialResult], cfg: &ExperimentConfig) -> Vec<SweepRow> {
    let rate = cfg.evm_rate;
    let mut rows = Vec::new();
    for (s, m) in present_scheme_modes(results) {
        rows.push(stat_row(axis_value, s, m, "evm_db", &collect_metric(results, s, rate, m, |x| x.evm_db)));
        rows.push(stat_row(axis_value, s, m, "ber", &collect_metric(results, s, rate, m, |x| x.ber)));
        rows.push(stat_row(axis_value, s, m, "srnr_db", &collect_metric(results, s, rate, m, |x| x.srnr_db)));
        rows.push(stat_row(axis_value, s, m, "leakage", &collect_metric(results, s, rate, m, |x| x.leakage)));
        let sr: Vec<f64> = results.iter().map(|r| trial_sum_rate(r, s, m, cfg.ber_target)).collect();
        rows.push(stat_row(axis_value, s, m, "sum_rate_mbps", &sr));
        let fail = collect_metric(results, s, rate, m, |x| if x.sync_ok { 0.0 } else { 1.0 });
        let mean = if fail.is_empty() { f64::NAN } else { fail.iter().sum::<f64>() / fail.len() as f64 };
        rows.push(SweepRow {
            axis_value,
            scheme: s.name().into(),
            mode: m.name().into(),
            metric: "sync_failure_rate".into(),
            median: mean,
            p10: mean,
            p90: mean,
        });
        if m == DecodeMode::PreFft {
            rows.push(stat_row(axis_value, s, m, "degradation_db", &degradations(results, s, rate)));
        }
    }
    rows
}

/// Paired-seed sweep over `values` of `axis`.
pub fn sweep(cfg: &ExperimentConfig, axis: SweepAxis, values: &[f64]) -> Result<SweepOutput, ExperimentError> {
    if values.is_empty() {
        return Err(config_err("values", "must not be empty"));
    }
    let mut results = Vec::with_capacity(values.len());
    let mut rows = Vec::new();
    for &v in values {
        let c = axis.apply(cfg, v)?;
        let exp = Experiment::new(c.clone())?;
        let r = exp.run_all();
        rows.extend(sweep_rows(v, &r, &c));
        results.push(r);
    }
    Ok(SweepOutput {
        axis,
        values: values.to_vec(),
        results,
        rows,
    })
}
