//! The eight 802.11a rate modes.

use serde::{Deserialize, Serialize};

/// Constellation used on the data subcarriers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Modulation {
    Bpsk,
    Qpsk,
    Qam16,
    Qam64,
}

impl Modulation {
    /// Coded bits per constellation point.
    pub fn bits_per_symbol(self) -> usize {
        match self {
            Modulation::Bpsk => 1,
            Modulation::Qpsk => 2,
            Modulation::Qam16 => 4,
            Modulation::Qam64 => 6,
        }
    }
}

/// Convolutional code rate after puncturing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CodeRate {
    Half,
    TwoThirds,
    ThreeQuarters,
}

impl CodeRate {
    /// `(numerator, denominator)`.
    pub fn ratio(self) -> (usize, usize) {
        match self {
            CodeRate::Half => (1, 2),
            CodeRate::TwoThirds => (2, 3),
            CodeRate::ThreeQuarters => (3, 4),
        }
    }

    /// Keep-mask over the mother-code output `A₀ B₀ A₁ B₁ …`.
    pub fn puncture_pattern(self) -> &'static [bool] {
        match self {
            CodeRate::Half => &[true, true],
            CodeRate::TwoThirds => &[true, true, true, false],
            CodeRate::ThreeQuarters => &[true, true, true, false, false, true],
        }
    }
}

/// One row of the rate table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RateParams {
    pub rate_mbps: u32,
    pub modulation: Modulation,
    pub code_rate: CodeRate,
    /// NCBPS.
    pub coded_bits_per_symbol: usize,
    /// NDBPS.
    pub data_bits_per_symbol: usize,
}

const fn row(rate_mbps: u32, modulation: Modulation, code_rate: CodeRate, ncbps: usize, ndbps: usize) -> RateParams {
    RateParams {
        rate_mbps,
        modulation,
        code_rate,
        coded_bits_per_symbol: ncbps,
        data_bits_per_symbol: ndbps,
    }
}

/// All eight modes in increasing rate order.
pub const RATE_TABLE: [RateParams; 8] = [
    row(6, Modulation::Bpsk, CodeRate::Half, 48, 24),
    row(9, Modulation::Bpsk, CodeRate::ThreeQuarters, 48, 36),
    row(12, Modulation::Qpsk, CodeRate::Half, 96, 48),
    row(18, Modulation::Qpsk, CodeRate::ThreeQuarters, 96, 72),
    row(24, Modulation::Qam16, CodeRate::Half, 192, 96),
    row(36, Modulation::Qam16, CodeRate::ThreeQuarters, 192, 144),
    row(48, Modulation::Qam64, CodeRate::TwoThirds, 288, 192),
    row(54, Modulation::Qam64, CodeRate::ThreeQuarters, 288, 216),
];

/// All supported rates in Mbit/s.
pub const RATES_MBPS: [u32; 8] = [6, 9, 12, 18, 24, 36, 48, 54];

impl RateParams {
    /// Looks up a rate by its Mbit/s value.
    pub fn from_mbps(rate_mbps: u32) -> Option<RateParams> {
        RATE_TABLE.iter().copied().find(|r| r.rate_mbps == rate_mbps)
    }

    pub fn bits_per_subcarrier(&self) -> usize {
        self.modulation.bits_per_symbol()
    }

    /// Number of OFDM data symbols for a payload of `payload_bits`
    /// (16 SERVICE + payload + 6 tail bits, padded up).
    pub fn n_symbols(&self, payload_bits: usize) -> usize {
        (super::SERVICE_BITS + payload_bits + super::TAIL_BITS).div_ceil(self.data_bits_per_symbol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_is_consistent() {
        for r in RATE_TABLE {
            let (num, den) = r.code_rate.ratio();
            assert_eq!(r.coded_bits_per_symbol, 48 * r.bits_per_subcarrier());
            assert_eq!(r.data_bits_per_symbol * den, r.coded_bits_per_symbol * num);
            // Rate in Mbit/s is NDBPS per 4 µs symbol.
            assert_eq!(r.data_bits_per_symbol as u32, r.rate_mbps * 4);
            let kept = r.code_rate.puncture_pattern().iter().filter(|&&k| k).count();
            let inputs = r.code_rate.puncture_pattern().len() / 2;
            assert_eq!(inputs * den, kept * num);
        }
    }

    #[test]
    fn symbol_count_for_1250_bytes() {
        let r24 = RateParams::from_mbps(24).unwrap();
        assert_eq!(r24.n_symbols(10_000), 105);
        assert!(RateParams::from_mbps(7).is_none());
    }
}
