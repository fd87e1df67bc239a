//! Beamformer design for the three-user 2×2 interference channel.
//!
//! * closed-form zero-forcing interference alignment (two solutions per
//!   subcarrier), and selection of the two spectrally smooth solution sets;
//! * truncated time-domain ("pre-FFT") decoders built from a solution set;
//! * the MaxSINR alternating optimization;
//! * dominant-eigenmode (DET) beamformers for single-user transmission.
//!
//! All per-subcarrier inputs and outputs cover the 52 used subcarriers in
//! ascending order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::{complex_gaussian, ChannelSpectra, N_USERS};
use crate::numerics::{
    dominant_singular_pair, eig2x2, gen_eig_max, hermitian_eig2, ifft, CMat2, CVec2, NumericsError, C64,
    DEGENERACY_TOL,
};
use crate::phy::ofdm::{bin, N_FFT, USED_SUBCARRIERS};

/// Condition number above which a channel matrix counts as singular.
pub const MAX_CONDITION: f64 = 1e12;

/// One vector per user.
pub type UserVecs = [CVec2; N_USERS];
/// The nine 2×2 channels of one subcarrier, `[rx][tx]`.
pub type SubcarrierChannels = [[CMat2; N_USERS]; N_USERS];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlignError {
    #[error("channel H[{rx}][{tx}] is singular at subcarrier {subcarrier}")]
    SingularChannel { subcarrier: i32, rx: usize, tx: usize },
    #[error("subcarrier {subcarrier}: {source}")]
    Numerics {
        subcarrier: i32,
        #[source]
        source: NumericsError,
    },
    #[error("bad length: expected {expected}, got {got}")]
    BadLength { expected: usize, got: usize },
}

/// Per-subcarrier precoders and decoders for all users.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IaSolution {
    /// Signed subcarrier indices, ascending.
    pub subcarriers: Vec<i32>,
    pub precoders: Vec<UserVecs>,
    pub decoders: Vec<UserVecs>,
    pub branch_id: u8,
}

impl IaSolution {
    pub fn len(&self) -> usize {
        self.subcarriers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subcarriers.is_empty()
    }

    /// Precoders of user `i` across subcarriers.
    pub fn user_precoders(&self, i: usize) -> Vec<CVec2> {
        self.precoders.iter().map(|p| p[i]).collect()
    }

    /// Decoders of user `i` across subcarriers.
    pub fn user_decoders(&self, i: usize) -> Vec<CVec2> {
        self.decoders.iter().map(|d| d[i]).collect()
    }

    /// `max |u_iᴴ H_ij v_j|` over interfering pairs and subcarriers.
    pub fn zero_forcing_residual(&self, channels: &[SubcarrierChannels]) -> f64 {
        let mut worst: f64 = 0.0;
        for (k, h) in channels.iter().enumerate() {
            for i in 0..N_USERS {
                for j in 0..N_USERS {
                    if i != j {
                        let r = h[i][j].sandwich(&self.decoders[k][i], &self.precoders[k][j]).norm();
                        worst = worst.max(r);
                    }
                }
            }
        }
        worst
    }

    /// Mean chordal distance between consecutive precoders of user 1.
    pub fn smoothness(&self) -> f64 {
        smoothness_score(&self.user_precoders(0))
    }
}

/// Mean chordal distance between consecutive unit vectors.
pub fn smoothness_score(v: &[CVec2]) -> f64 {
    if v.len() < 2 {
        return 0.0;
    }
    v.windows(2).map(|w| w[0].chordal_distance(&w[1])).sum::<f64>() / (v.len() - 1) as f64
}

/// Extracts the 52 used-subcarrier channel sets from full 64-bin spectra.
pub fn used_channels(spectra: &ChannelSpectra) -> Vec<SubcarrierChannels> {
    USED_SUBCARRIERS
        .iter()
        .map(|&k| std::array::from_fn(|i| std::array::from_fn(|j| spectra[i][j][bin(k)])))
        .collect()
}

/// Precoders and decoders for one subcarrier and one branch.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Beamformers {
    pub precoders: UserVecs,
    pub decoders: UserVecs,
}

fn inv(h: &CMat2, subcarrier: i32, rx: usize, tx: usize) -> Result<CMat2, AlignError> {
    if !(h.condition_number() < MAX_CONDITION) {
        return Err(AlignError::SingularChannel { subcarrier, rx, tx });
    }
    h.inverse().map_err(|_| AlignError::SingularChannel { subcarrier, rx, tx })
}

/// Unit vector orthogonal to the span of the received interference
/// directions, taken as the least eigenvector of `Σ q qᴴ`.
fn null_direction(q: &[CVec2], subcarrier: i32) -> Result<CVec2, AlignError> {
    let gram = q.iter().fold(CMat2::ZERO, |acc, v| acc + CMat2::outer(v, v));
    match hermitian_eig2(&gram) {
        Some((_, vecs)) => Ok(vecs[0]),
        None => Err(AlignError::Numerics {
            subcarrier,
            source: NumericsError::DegenerateEigenbasis,
        }),
    }
}

/// Decoders nulling all interference for given precoders.
fn ia_decoders(h: &SubcarrierChannels, v: &UserVecs, subcarrier: i32) -> Result<UserVecs, AlignError> {
    let mut out = [CVec2::ZERO; N_USERS];
    for (i, slot) in out.iter_mut().enumerate() {
        let q: Vec<CVec2> = (0..N_USERS).filter(|&j| j != i).map(|j| h[i][j].mul_vec(&v[j])).collect();
        *slot = null_direction(&q, subcarrier)?;
    }
    Ok(out)
}

/// Both closed-form solutions for one subcarrier, starting the procedure at
/// user 1. Branches follow the eigenvalue order of `E`.
pub fn ia_subcarrier(h: &SubcarrierChannels, subcarrier: i32) -> Result<[Beamformers; 2], AlignError> {
    let i20 = inv(&h[2][0], subcarrier, 2, 0)?;
    let i01 = inv(&h[0][1], subcarrier, 0, 1)?;
    let i12 = inv(&h[1][2], subcarrier, 1, 2)?;
    let i21 = inv(&h[2][1], subcarrier, 2, 1)?;
    for (i, row) in h.iter().enumerate() {
        for (j, m) in row.iter().enumerate() {
            inv(m, subcarrier, i, j)?;
        }
    }
    let e = i20 * h[2][1] * i01 * h[0][2] * i12 * h[1][0];
    let pairs = eig2x2(&e).map_err(|source| AlignError::Numerics { subcarrier, source })?;
    let build = |v1: CVec2| -> Result<Beamformers, AlignError> {
        let unit = |x: CVec2| {
            x.canonical_unit().ok_or(AlignError::Numerics {
                subcarrier,
                source: NumericsError::Singular,
            })
        };
        let v2 = unit((i21 * h[2][0]).mul_vec(&v1))?;
        let v3 = unit((i12 * h[1][0]).mul_vec(&v1))?;
        let precoders = [v1, v2, v3];
        let decoders = ia_decoders(h, &precoders, subcarrier)?;
        Ok(Beamformers { precoders, decoders })
    };
    Ok([build(pairs[0].vector)?, build(pairs[1].vector)?])
}

/// Closed-form solutions with the procedure started at user `start`
/// (0-based), obtained by cyclically relabeling the users.
pub fn ia_subcarrier_from(
    h: &SubcarrierChannels,
    subcarrier: i32,
    start: usize,
) -> Result<[Beamformers; 2], AlignError> {
    let p = |a: usize| (a + start) % N_USERS;
    let relabeled: SubcarrierChannels = std::array::from_fn(|i| std::array::from_fn(|j| h[p(i)][p(j)]));
    let sols = ia_subcarrier(&relabeled, subcarrier)?;
    Ok(sols.map(|b| {
        let mut out = b;
        for a in 0..N_USERS {
            out.precoders[p(a)] = b.precoders[a];
            out.decoders[p(a)] = b.decoders[a];
        }
        out
    }))
}

/// Per-subcarrier closed-form solutions, one [`IaSolution`] per raw branch
/// label.
pub fn ia_closed_form(channels: &[SubcarrierChannels]) -> Result<[IaSolution; 2], AlignError> {
    let raw = ia_all_subcarriers(channels)?;
    Ok([0u8, 1].map(|b| assemble(&raw, &vec![b; raw.len()], b)))
}

fn ia_all_subcarriers(channels: &[SubcarrierChannels]) -> Result<Vec<[Beamformers; 2]>, AlignError> {
    if channels.len() != USED_SUBCARRIERS.len() {
        return Err(AlignError::BadLength {
            expected: USED_SUBCARRIERS.len(),
            got: channels.len(),
        });
    }
    channels
        .iter()
        .zip(USED_SUBCARRIERS)
        .map(|(h, k)| ia_subcarrier(h, k))
        .collect()
}

/// Builds a solution picking branch `choice[k]` at subcarrier `k`.
pub fn assemble(raw: &[[Beamformers; 2]], choice: &[u8], branch_id: u8) -> IaSolution {
    let picks: Vec<Beamformers> = raw.iter().zip(choice).map(|(b, &c)| b[c as usize]).collect();
    let mut decoders: Vec<UserVecs> = picks.iter().map(|b| b.decoders).collect();
    // Decoders are defined up to a phase per subcarrier; continuous phases
    // give compact pre-FFT impulse responses.
    for i in 0..N_USERS {
        let user: Vec<CVec2> = decoders.iter().map(|d| d[i]).collect();
        for (d, u) in decoders.iter_mut().zip(phase_continuous(&user)) {
            d[i] = u;
        }
    }
    IaSolution {
        subcarriers: USED_SUBCARRIERS.to_vec(),
        precoders: picks.iter().map(|b| b.precoders).collect(),
        decoders,
        branch_id,
    }
}

/// Greedy continuity matching of the per-subcarrier branch pairs. Set 0
/// starts from branch 0 at the lowest subcarrier; at each step the pairing
/// minimizing the summed chordal distance of consecutive `v₁` is kept.
/// Returns the branch choice of set 0 per subcarrier.
pub fn smooth_assignment(raw: &[[Beamformers; 2]]) -> Vec<u8> {
    let mut choice = Vec::with_capacity(raw.len());
    if raw.is_empty() {
        return choice;
    }
    choice.push(0u8);
    for k in 1..raw.len() {
        let c0 = choice[k - 1] as usize;
        let prev = [raw[k - 1][c0].precoders[0], raw[k - 1][1 - c0].precoders[0]];
        let cur = [raw[k][0].precoders[0], raw[k][1].precoders[0]];
        let keep = prev[0].chordal_distance(&cur[0]) + prev[1].chordal_distance(&cur[1]);
        let swap = prev[0].chordal_distance(&cur[1]) + prev[1].chordal_distance(&cur[0]);
        choice.push(if swap < keep { 1 } else { 0 });
    }
    choice
}

/// The two smooth solution sets over all used subcarriers.
pub fn select_smooth_sets(raw: &[[Beamformers; 2]]) -> [IaSolution; 2] {
    let c0 = smooth_assignment(raw);
    let c1: Vec<u8> = c0.iter().map(|c| 1 - c).collect();
    [assemble(raw, &c0, 0), assemble(raw, &c1, 1)]
}

/// Closed-form IA followed by smooth-set selection.
pub fn ia_smooth_sets(channels: &[SubcarrierChannels]) -> Result<[IaSolution; 2], AlignError> {
    Ok(select_smooth_sets(&ia_all_subcarriers(channels)?))
}

/// Raw per-subcarrier branch pairs (for diagnostics and perturbation tests).
pub fn ia_branch_pairs(channels: &[SubcarrierChannels]) -> Result<Vec<[Beamformers; 2]>, AlignError> {
    ia_all_subcarriers(channels)
}

/// Time-domain 2-input/1-output decoding filter of one user.
///
/// The output is `z[n] = Σ_{l<L} taps[l]ᴴ r[n + offset + l]`, i.e. the
/// conjugate-reversed impulse response, placed so the output stays on the
/// input time base.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PreFftDecoder {
    pub taps: Vec<CVec2>,
    pub len: usize,
    /// Signed lag of the first retained tap.
    pub alignment_offset: i64,
    /// Fraction of the untruncated impulse-response energy retained.
    pub captured_energy: f64,
}

impl PreFftDecoder {
    /// Filters a two-antenna stream.
    pub fn apply(&self, streams: [&[C64]; 2]) -> Vec<C64> {
        let n_out = streams[0].len().min(streams[1].len());
        let mut out = vec![C64::default(); n_out];
        for (l, tap) in self.taps.iter().enumerate() {
            let lag = self.alignment_offset + l as i64;
            let (c0, c1) = (tap.0[0].conj(), tap.0[1].conj());
            let (dst_lo, src_lo) = if lag >= 0 { (0usize, lag as usize) } else { ((-lag) as usize, 0usize) };
            if dst_lo >= n_out || src_lo >= n_out {
                continue;
            }
            let count = (n_out - dst_lo).min(n_out - src_lo);
            let (s0, s1) = (&streams[0][src_lo..src_lo + count], &streams[1][src_lo..src_lo + count]);
            for ((d, a), b) in out[dst_lo..dst_lo + count].iter_mut().zip(s0).zip(s1) {
                *d += c0 * a + c1 * b;
            }
        }
        out
    }

    /// Effective frequency response `Û[k] = Σ_l taps[l] e^{−j2πk(offset+l)/64}`
    /// at every FFT bin.
    pub fn frequency_response(&self) -> Vec<CVec2> {
        (0..N_FFT)
            .map(|k| {
                self.taps.iter().enumerate().fold(CVec2::ZERO, |acc, (l, t)| {
                    let lag = self.alignment_offset + l as i64;
                    let ph = -2.0 * std::f64::consts::PI * (k as f64) * lag as f64 / N_FFT as f64;
                    acc + t.scale(C64::from_polar(1.0, ph))
                })
            })
            .collect()
    }

    /// Frequency response on the used subcarriers.
    pub fn used_response(&self) -> Vec<CVec2> {
        let full = self.frequency_response();
        USED_SUBCARRIERS.iter().map(|&k| full[bin(k)]).collect()
    }
}

/// Decoder spectrum over all 64 bins, with null bins filled by linear
/// interpolation around the circular spectrum.
pub fn fill_decoder_spectrum(used: &[CVec2]) -> Vec<CVec2> {
    let mut full: Vec<Option<CVec2>> = vec![None; N_FFT];
    for (&k, u) in USED_SUBCARRIERS.iter().zip(used) {
        full[bin(k)] = Some(*u);
    }
    let known: Vec<usize> = (0..N_FFT).filter(|&b| full[b].is_some()).collect();
    let mut out = vec![CVec2::ZERO; N_FFT];
    for b in 0..N_FFT {
        if let Some(u) = full[b] {
            out[b] = u;
            continue;
        }
        let prev = *known.iter().rev().find(|&&x| x < b).unwrap_or(known.last().unwrap());
        let next = *known.iter().find(|&&x| x > b).unwrap_or(&known[0]);
        let gap = (next + N_FFT - prev) % N_FFT;
        let t = ((b + N_FFT - prev) % N_FFT) as f64 / gap as f64;
        let (a, c) = (full[prev].unwrap(), full[next].unwrap());
        out[b] = a.scale_re(1.0 - t) + c.scale_re(t);
    }
    out
}

/// Rotates each decoder by a unit scalar so adjacent subcarriers are phase
/// aligned. Post-FFT decoding is blind to these scalars, but a continuous
/// spectrum has a compact impulse response.
pub fn phase_continuous(used: &[CVec2]) -> Vec<CVec2> {
    let mut out: Vec<CVec2> = Vec::with_capacity(used.len());
    for u in used {
        let next = match out.last() {
            Some(prev) => {
                let d = prev.dot(u);
                if d.norm() > DEGENERACY_TOL {
                    u.scale(d.conj() / d.norm())
                } else {
                    *u
                }
            }
            None => *u,
        };
        out.push(next);
    }
    out
}

fn spectrum_taps(spec: &[CVec2]) -> Vec<CVec2> {
    let per_ant: [Vec<C64>; 2] = std::array::from_fn(|a| {
        let x: Vec<C64> = spec.iter().map(|u| u.0[a]).collect();
        ifft(&x, N_FFT).expect("64-point IFFT")
    });
    (0..N_FFT).map(|m| CVec2::new(per_ant[0][m], per_ant[1][m])).collect()
}

/// Circular start of the `l`-tap window holding the most energy. Among
/// (near) ties the window centred closest to the strongest tap wins, which
/// keeps a full-length window centred on the response.
fn best_window(taps: &[CVec2], l: usize) -> usize {
    let energy: Vec<f64> = taps.iter().map(CVec2::norm_sqr).collect();
    let peak = (0..N_FFT).max_by(|&a, &b| energy[a].total_cmp(&energy[b]).then(b.cmp(&a))).unwrap_or(0);
    let window_energy = |s: usize| -> f64 { (0..l).map(|i| energy[(s + i) % N_FFT]).sum() };
    let best = (0..N_FFT).map(window_energy).fold(f64::NEG_INFINITY, f64::max);
    let centre_dist = |s: usize| -> usize {
        let centre = (s + (l - 1) / 2) % N_FFT;
        let d = (centre + N_FFT - peak) % N_FFT;
        d.min(N_FFT - d)
    };
    (0..N_FFT)
        .filter(|&s| window_energy(s) >= best * (1.0 - 1e-9))
        .min_by_key(|&s| (centre_dist(s), s))
        .unwrap_or(0)
}

/// Truncated time-domain decoder from a per-subcarrier decoder spectrum.
pub fn build_prefft_decoder_user(used: &[CVec2], l: usize) -> Result<PreFftDecoder, AlignError> {
    if l == 0 || l > N_FFT {
        return Err(AlignError::BadLength { expected: N_FFT, got: l });
    }
    if used.len() != USED_SUBCARRIERS.len() {
        return Err(AlignError::BadLength {
            expected: USED_SUBCARRIERS.len(),
            got: used.len(),
        });
    }
    let spec = fill_decoder_spectrum(&phase_continuous(used));
    let taps = spectrum_taps(&spec);
    let s0 = best_window(&taps, l);
    let captured: f64 = (0..l).map(|i| taps[(s0 + i) % N_FFT].norm_sqr()).sum();
    let total: f64 = taps.iter().map(CVec2::norm_sqr).sum();
    let offset = if s0 < N_FFT / 2 { s0 as i64 } else { s0 as i64 - N_FFT as i64 };
    Ok(PreFftDecoder {
        taps: (0..l).map(|i| taps[(s0 + i) % N_FFT]).collect(),
        len: l,
        alignment_offset: offset,
        captured_energy: if total > 0.0 { captured / total } else { 1.0 },
    })
}

/// Pre-FFT decoders for all users of a solution.
pub fn build_prefft_decoder(solution: &IaSolution, l: usize) -> Result<[PreFftDecoder; N_USERS], AlignError> {
    let mut out = Vec::with_capacity(N_USERS);
    for i in 0..N_USERS {
        out.push(build_prefft_decoder_user(&solution.user_decoders(i), l)?);
    }
    Ok(out.try_into().expect("three users"))
}

/// MaxSINR iteration settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaxSinrConfig {
    pub max_iters: usize,
    pub tol: f64,
    pub sigma2: f64,
}

impl Default for MaxSinrConfig {
    fn default() -> Self {
        MaxSinrConfig {
            max_iters: 100,
            tol: 1e-6,
            sigma2: 1e-3,
        }
    }
}

fn ridge(b: CMat2) -> CMat2 {
    let eps = 1e-12 * b.norm().max(1.0);
    b + CMat2::identity().scale(C64::new(eps, 0.0))
}

fn pencil_max(a: &CMat2, b: &CMat2, fallback: CVec2) -> CVec2 {
    match gen_eig_max(a, b) {
        Ok((_, v)) => v,
        Err(NumericsError::NotPositiveDefinite) => gen_eig_max(a, &ridge(*b)).map(|(_, v)| v).unwrap_or(fallback),
        Err(_) => fallback,
    }
}

/// Interference-plus-noise covariance at receiver `i`.
fn rx_covariance(h: &SubcarrierChannels, v: &UserVecs, i: usize, sigma2: f64) -> CMat2 {
    (0..N_USERS).filter(|&j| j != i).fold(CMat2::identity().scale(C64::new(sigma2, 0.0)), |acc, j| {
        let q = h[i][j].mul_vec(&v[j]);
        acc + CMat2::outer(&q, &q)
    })
}

/// MaxSINR decoder of user `i` for fixed precoders.
pub fn maxsinr_decoder_update(h: &SubcarrierChannels, v: &UserVecs, i: usize, sigma2: f64, previous: CVec2) -> CVec2 {
    let s = h[i][i].mul_vec(&v[i]);
    pencil_max(&CMat2::outer(&s, &s), &rx_covariance(h, v, i, sigma2), previous)
}

/// MaxSINR precoder of user `i` on the reversed network for fixed decoders.
pub fn maxsinr_precoder_update(h: &SubcarrierChannels, u: &UserVecs, i: usize, sigma2: f64, previous: CVec2) -> CVec2 {
    let s = h[i][i].adjoint_mul_vec(&u[i]);
    let b = (0..N_USERS).filter(|&j| j != i).fold(CMat2::identity().scale(C64::new(sigma2, 0.0)), |acc, j| {
        let q = h[j][i].adjoint_mul_vec(&u[j]);
        acc + CMat2::outer(&q, &q)
    });
    pencil_max(&CMat2::outer(&s, &s), &b, previous)
}

/// Post-decoding SINR of user `i`.
pub fn sinr(h: &SubcarrierChannels, u: &UserVecs, v: &UserVecs, i: usize, sigma2: f64) -> f64 {
    let sig = h[i][i].sandwich(&u[i], &v[i]).norm_sqr();
    let interf: f64 = (0..N_USERS)
        .filter(|&j| j != i)
        .map(|j| h[i][j].sandwich(&u[i], &v[j]).norm_sqr())
        .sum();
    sig / (interf + sigma2 * u[i].norm_sqr())
}

fn random_unit<R: rand::Rng>(rng: &mut R) -> CVec2 {
    loop {
        let v = CVec2::new(complex_gaussian(rng, 1.0), complex_gaussian(rng, 1.0));
        if let Some(u) = v.canonical_unit() {
            return u;
        }
    }
}

/// MaxSINR on one subcarrier from a seeded random start.
pub fn max_sinr_subcarrier(h: &SubcarrierChannels, cfg: &MaxSinrConfig, rng_seed: u64) -> Beamformers {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut v: UserVecs = std::array::from_fn(|_| random_unit(&mut rng));
    let mut u: UserVecs = [CVec2::e1(); N_USERS];
    for _ in 0..cfg.max_iters.max(1) {
        for i in 0..N_USERS {
            u[i] = maxsinr_decoder_update(h, &v, i, cfg.sigma2, u[i]);
        }
        let mut change: f64 = 0.0;
        let mut next = v;
        for i in 0..N_USERS {
            next[i] = maxsinr_precoder_update(h, &u, i, cfg.sigma2, v[i]);
            change = change.max(next[i].chordal_distance(&v[i]));
        }
        v = next;
        if change < cfg.tol {
            break;
        }
    }
    for i in 0..N_USERS {
        u[i] = maxsinr_decoder_update(h, &v, i, cfg.sigma2, u[i]);
    }
    Beamformers { precoders: v, decoders: u }
}

/// MaxSINR over all used subcarriers; each subcarrier runs independently
/// with a seed derived from `rng_seed` and its position.
pub fn max_sinr(channels: &[SubcarrierChannels], cfg: &MaxSinrConfig, rng_seed: u64) -> IaSolution {
    let picks: Vec<Beamformers> = channels
        .iter()
        .enumerate()
        .map(|(k, h)| max_sinr_subcarrier(h, cfg, crate::experiment::derive_seed(rng_seed, k as u64, 0x5151)))
        .collect();
    IaSolution {
        subcarriers: USED_SUBCARRIERS[..channels.len()].to_vec(),
        precoders: picks.iter().map(|b| b.precoders).collect(),
        decoders: picks.iter().map(|b| b.decoders).collect(),
        branch_id: 0,
    }
}

/// Dominant-eigenmode beamformer of one link.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetBeamformer {
    /// Equivalent scalar gain `uᴴHv`.
    pub gain: f64,
    pub v: CVec2,
    pub u: CVec2,
}

/// Per-subcarrier dominant singular pairs of a single link.
pub fn det_beamformers(h: &[CMat2]) -> Result<Vec<DetBeamformer>, NumericsError> {
    h.iter()
        .map(|m| dominant_singular_pair(m).map(|(gain, v, u)| DetBeamformer { gain, v, u }))
        .collect()
}
