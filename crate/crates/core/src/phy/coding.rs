//! Bit pipeline: scrambler, K=7 convolutional code with puncturing,
//! hard-decision Viterbi decoder and the per-symbol block interleaver.
//!
//! Bits are carried as `u8` values 0/1.

use super::rates::{CodeRate, RateParams};

/// Generator polynomials in octal 133 and 171, with bit 6 as the current
/// input and bit 0 as the oldest register.
const G0: u8 = 0o133;
const G1: u8 = 0o171;
const N_STATES: usize = 64;

/// Marker for a depunctured (erased) coded bit.
pub const ERASED: u8 = 2;

/// The x⁷+x⁴+1 frame-synchronous scrambler.
#[derive(Clone, Copy, Debug)]
pub struct Scrambler {
    state: u8,
}

impl Scrambler {
    /// Creates a scrambler with the given 7-bit initial state.
    pub fn new(seed: u8) -> Self {
        Scrambler { state: seed & 0x7f }
    }

    /// Next bit of the scrambling sequence.
    #[inline]
    pub fn next_bit(&mut self) -> u8 {
        let fb = ((self.state >> 6) ^ (self.state >> 3)) & 1;
        self.state = ((self.state << 1) | fb) & 0x7f;
        fb
    }

    /// XORs the sequence into `bits` in place.
    pub fn apply(&mut self, bits: &mut [u8]) {
        for b in bits {
            *b ^= self.next_bit();
        }
    }
}

/// Descrambles a bit stream whose first seven bits were zero before
/// scrambling (the SERVICE field), recovering the state from them.
pub fn descramble(bits: &mut [u8]) {
    if bits.len() < 7 {
        return;
    }
    let state = bits[..7].iter().fold(0u8, |s, &b| (s << 1) | (b & 1));
    bits[..7].iter_mut().for_each(|b| *b = 0);
    Scrambler::new(state).apply(&mut bits[7..]);
}

#[inline]
fn parity(x: u8) -> u8 {
    (x.count_ones() & 1) as u8
}

/// Rate-1/2 mother-code output `A₀ B₀ A₁ B₁ …`, starting from the zero
/// state.
pub fn conv_encode(bits: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(2 * bits.len());
    let mut state = 0u8;
    for &b in bits {
        let w = ((b & 1) << 6) | state;
        out.push(parity(w & G0));
        out.push(parity(w & G1));
        state = w >> 1;
    }
    out
}

/// Drops mother-code bits according to the puncturing pattern.
pub fn puncture(coded: &[u8], rate: CodeRate) -> Vec<u8> {
    let pat = rate.puncture_pattern();
    coded
        .iter()
        .zip(pat.iter().cycle())
        .filter(|(_, &keep)| keep)
        .map(|(&b, _)| b)
        .collect()
}

/// Re-inserts [`ERASED`] markers where bits were punctured. `n_inputs` is the
/// number of information bits the mother code carried.
pub fn depuncture(received: &[u8], rate: CodeRate, n_inputs: usize) -> Vec<u8> {
    let pat = rate.puncture_pattern();
    let mut out = Vec::with_capacity(2 * n_inputs);
    let mut src = received.iter();
    for keep in pat.iter().cycle().take(2 * n_inputs) {
        if *keep {
            out.push(src.next().copied().unwrap_or(ERASED));
        } else {
            out.push(ERASED);
        }
    }
    out
}

/// Hard-decision Viterbi decoder over the full block, with traceback from
/// the best final state. Erased bits contribute no branch metric.
pub fn viterbi_decode(coded: &[u8]) -> Vec<u8> {
    let steps = coded.len() / 2;
    // Expected output pair for every 7-bit window.
    let mut out_tab = [[0u8; 2]; 128];
    for (w, o) in out_tab.iter_mut().enumerate() {
        *o = [parity(w as u8 & G0), parity(w as u8 & G1)];
    }
    let mut metric = [u32::MAX / 2; N_STATES];
    metric[0] = 0;
    let mut decisions = Vec::with_capacity(steps);
    let mut next = [0u32; N_STATES];
    for t in 0..steps {
        let (ra, rb) = (coded[2 * t], coded[2 * t + 1]);
        let branch = |w: usize| -> u32 {
            let [ea, eb] = out_tab[w];
            (ra != ERASED && ra != ea) as u32 + (rb != ERASED && rb != eb) as u32
        };
        let mut dec = 0u64;
        for (ns, slot) in next.iter_mut().enumerate() {
            let b = ns >> 5;
            let p0 = (ns << 1) & 0x3f;
            let p1 = p0 | 1;
            let m0 = metric[p0] + branch((b << 6) | p0);
            let m1 = metric[p1] + branch((b << 6) | p1);
            if m1 < m0 {
                *slot = m1;
                dec |= 1 << ns;
            } else {
                *slot = m0;
            }
        }
        metric = next;
        decisions.push(dec);
    }
    let mut state = (0..N_STATES).min_by_key(|&s| metric[s]).unwrap_or(0);
    let mut bits = vec![0u8; steps];
    for t in (0..steps).rev() {
        bits[t] = (state >> 5) as u8;
        let x = ((decisions[t] >> state) & 1) as usize;
        state = ((state << 1) & 0x3f) | x;
    }
    bits
}

/// Interleaver permutation for one OFDM symbol: `perm[k]` is the output
/// position of input bit `k`.
pub fn interleaver_permutation(ncbps: usize, nbpsc: usize) -> Vec<usize> {
    let s = (nbpsc / 2).max(1);
    (0..ncbps)
        .map(|k| {
            let i = (ncbps / 16) * (k % 16) + k / 16;
            s * (i / s) + (i + ncbps - (16 * i / ncbps)) % s
        })
        .collect()
}

/// Interleaves every `NCBPS`-bit block.
pub fn interleave(bits: &[u8], rate: &RateParams) -> Vec<u8> {
    let n = rate.coded_bits_per_symbol;
    let perm = interleaver_permutation(n, rate.bits_per_subcarrier());
    let mut out = vec![0u8; bits.len()];
    for (blk_in, blk_out) in bits.chunks(n).zip(out.chunks_mut(n)) {
        for (k, &b) in blk_in.iter().enumerate() {
            blk_out[perm[k]] = b;
        }
    }
    out
}

/// Inverse of [`interleave`].
pub fn deinterleave(bits: &[u8], rate: &RateParams) -> Vec<u8> {
    let n = rate.coded_bits_per_symbol;
    let perm = interleaver_permutation(n, rate.bits_per_subcarrier());
    let mut out = vec![0u8; bits.len()];
    for (blk_in, blk_out) in bits.chunks(n).zip(out.chunks_mut(n)) {
        for (k, o) in blk_out.iter_mut().enumerate() {
            *o = blk_in[perm[k]];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phy::rates::RATE_TABLE;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn scrambler_all_ones_sequence() {
        // Published 127-bit sequence for the all-ones initial state.
        let want: String = "00001110 11110010 11001001 00000010 00100110 00101110 10110110 \
                            00001100 11010100 11100111 10110100 00101010 11111010 01010001 \
                            10111000 1111111"
            .split_whitespace()
            .collect();
        let mut s = Scrambler::new(0x7f);
        let got: String = (0..127).map(|_| char::from(b'0' + s.next_bit())).collect();
        assert_eq!(got, want);
        // Period 127.
        assert_eq!(s.state, 0x7f);
    }

    #[test]
    fn scrambler_zero_state_is_transparent() {
        let mut bits = vec![1, 0, 1, 1, 0];
        Scrambler::new(0).apply(&mut bits);
        assert_eq!(bits, vec![1, 0, 1, 1, 0]);
    }

    #[test]
    fn descramble_recovers_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut data = vec![0u8; 16];
        data.extend((0..500).map(|_| rng.random_range(0..2u8)));
        let orig = data.clone();
        Scrambler::new(0x5d).apply(&mut data);
        descramble(&mut data);
        assert_eq!(data, orig);
    }

    #[test]
    fn impulse_response() {
        let mut bits = vec![1u8];
        bits.extend([0u8; 6]);
        let out = conv_encode(&bits);
        let a: Vec<u8> = out.iter().step_by(2).copied().collect();
        let b: Vec<u8> = out.iter().skip(1).step_by(2).copied().collect();
        assert_eq!(a, vec![1, 0, 1, 1, 0, 1, 1]);
        assert_eq!(b, vec![1, 1, 1, 1, 0, 0, 1]);
    }

    #[test]
    fn viterbi_roundtrip_all_code_rates() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for rate in [CodeRate::Half, CodeRate::TwoThirds, CodeRate::ThreeQuarters] {
            let mut bits: Vec<u8> = (0..600).map(|_| rng.random_range(0..2u8)).collect();
            bits.extend([0u8; 6]);
            let tx = puncture(&conv_encode(&bits), rate);
            let rx = depuncture(&tx, rate, bits.len());
            assert_eq!(viterbi_decode(&rx), bits);
        }
    }

    #[test]
    fn viterbi_corrects_sparse_errors() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let bits: Vec<u8> = (0..400).map(|_| rng.random_range(0..2u8)).collect();
        let mut coded = conv_encode(&bits);
        for k in (10..coded.len()).step_by(40) {
            coded[k] ^= 1;
        }
        assert_eq!(viterbi_decode(&coded), bits);
    }

    #[test]
    fn interleaver_is_a_permutation() {
        for r in RATE_TABLE {
            let perm = interleaver_permutation(r.coded_bits_per_symbol, r.bits_per_subcarrier());
            let mut seen = perm.clone();
            seen.sort_unstable();
            assert_eq!(seen, (0..r.coded_bits_per_symbol).collect::<Vec<_>>());
            let bits: Vec<u8> = (0..2 * r.coded_bits_per_symbol).map(|k| (k * 7 % 3 == 0) as u8).collect();
            assert_eq!(deinterleave(&interleave(&bits, &r), &r), bits);
        }
    }

    #[test]
    fn bpsk_interleaver_first_entries() {
        // For NCBPS = 48 the permutation is j = 3·(k mod 16) + ⌊k/16⌋.
        let perm = interleaver_permutation(48, 1);
        assert_eq!(&perm[..4], &[0, 3, 6, 9]);
        assert_eq!(perm[16], 1);
    }
}
