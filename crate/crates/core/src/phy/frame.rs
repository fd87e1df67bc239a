//! Payload coding and frame assembly.

use super::coding::{conv_encode, deinterleave, depuncture, descramble, interleave, puncture, viterbi_decode, Scrambler};
use super::mapping::{demap_hard, map_bits};
use super::ofdm::{data_symbol, ofdm_body, lts_freq, preamble, sts_freq, N_DATA, N_FFT, N_USED, PREAMBLE_LEN, STS_LEN, SYMBOL_LEN, CP_LEN};
use super::rates::RateParams;
use super::{PhyError, PAYLOAD_BITS, SERVICE_BITS, TAIL_BITS};
use crate::numerics::{CVec2, C64};

/// Scrambles, encodes, punctures, interleaves and maps a 10000-bit payload.
/// Returns the `N·48` data-subcarrier symbols and `N`.
pub fn encode_payload(bits: &[u8], rate: &RateParams, scrambler_seed: u8) -> Result<(Vec<C64>, usize), PhyError> {
    if bits.len() != PAYLOAD_BITS {
        return Err(PhyError::BadLength {
            expected: PAYLOAD_BITS,
            got: bits.len(),
        });
    }
    let n_sym = rate.n_symbols(PAYLOAD_BITS);
    let total = n_sym * rate.data_bits_per_symbol;
    let mut data = vec![0u8; total];
    data[SERVICE_BITS..SERVICE_BITS + PAYLOAD_BITS].copy_from_slice(bits);
    Scrambler::new(scrambler_seed).apply(&mut data);
    // Tail bits return the encoder to the zero state.
    let tail = SERVICE_BITS + PAYLOAD_BITS;
    data[tail..tail + TAIL_BITS].iter_mut().for_each(|b| *b = 0);
    let coded = puncture(&conv_encode(&data), rate.code_rate);
    debug_assert_eq!(coded.len(), n_sym * rate.coded_bits_per_symbol);
    let inter = interleave(&coded, rate);
    Ok((map_bits(&inter, rate.modulation), n_sym))
}

/// Hard demaps, deinterleaves, depunctures, Viterbi-decodes and descrambles
/// `N·48` equalized symbols back to the 10000 payload bits.
pub fn decode_payload(symbols: &[C64], rate: &RateParams) -> Result<Vec<u8>, PhyError> {
    let n_sym = rate.n_symbols(PAYLOAD_BITS);
    if symbols.len() != n_sym * N_DATA {
        return Err(PhyError::BadLength {
            expected: n_sym * N_DATA,
            got: symbols.len(),
        });
    }
    let hard = demap_hard(symbols, rate.modulation);
    let coded = deinterleave(&hard, rate);
    let n_inputs = n_sym * rate.data_bits_per_symbol;
    let mut bits = viterbi_decode(&depuncture(&coded, rate.code_rate, n_inputs));
    descramble(&mut bits);
    Ok(bits[SERVICE_BITS..SERVICE_BITS + PAYLOAD_BITS].to_vec())
}

/// A sampled data frame on two transmit antennas.
#[derive(Clone, Debug, PartialEq)]
pub struct PhyFrame {
    pub source_bits: Vec<u8>,
    pub rate: RateParams,
    pub antenna_streams: [Vec<C64>; 2],
    pub n_data_symbols: usize,
    /// Transmitted data-subcarrier points, `n_data_symbols × 48`.
    pub data_symbols: Vec<C64>,
}

impl PhyFrame {
    pub fn len(&self) -> usize {
        self.antenna_streams[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Builds a data frame whose every subcarrier (preamble included) is
/// beamformed through `precoders` (one per used subcarrier, ascending).
pub fn assemble_data_frame(
    bits: &[u8],
    rate: &RateParams,
    precoders: &[CVec2],
    scrambler_seed: u8,
) -> Result<PhyFrame, PhyError> {
    if precoders.len() != N_USED {
        return Err(PhyError::MissingPrecoder {
            expected: N_USED,
            got: precoders.len(),
        });
    }
    let (data_symbols, n_sym) = encode_payload(bits, rate, scrambler_seed)?;
    let mut streams = preamble(precoders);
    for s in streams.iter_mut() {
        s.reserve(n_sym * SYMBOL_LEN);
    }
    for (sym, chunk) in data_symbols.chunks(N_DATA).enumerate() {
        let body = data_symbol(chunk, sym, precoders);
        for (s, b) in streams.iter_mut().zip(body) {
            s.extend(b);
        }
    }
    debug_assert_eq!(streams[0].len(), PREAMBLE_LEN + n_sym * SYMBOL_LEN);
    Ok(PhyFrame {
        source_bits: bits.to_vec(),
        rate: *rate,
        antenna_streams: streams,
        n_data_symbols: n_sym,
        data_symbols,
    })
}

/// STS followed by `m` prefixed LTS symbols on antenna `antenna_index`,
/// zeros on the other antenna.
pub fn assemble_training_frame(m: usize, antenna_index: usize) -> Result<[Vec<C64>; 2], PhyError> {
    if m == 0 {
        return Err(PhyError::BadLength { expected: 1, got: 0 });
    }
    if antenna_index > 1 {
        return Err(PhyError::BadLength {
            expected: 1,
            got: antenna_index,
        });
    }
    let sel = vec![CVec2::basis(antenna_index); N_USED];
    let sts = ofdm_body(&sts_freq(), &sel);
    let lts = ofdm_body(&lts_freq(), &sel);
    Ok(std::array::from_fn(|a| {
        let mut out = Vec::with_capacity(training_frame_len(m));
        out.extend((0..STS_LEN).map(|n| sts[a][n % N_FFT]));
        for _ in 0..m {
            out.extend_from_slice(&lts[a][N_FFT - CP_LEN..]);
            out.extend_from_slice(&lts[a]);
        }
        out
    }))
}

/// Sample length of an `m`-symbol training frame.
pub fn training_frame_len(m: usize) -> usize {
    STS_LEN + m * SYMBOL_LEN
}
