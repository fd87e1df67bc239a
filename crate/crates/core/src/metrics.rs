//! Link quality estimators: training-based channel/noise estimates, EVM,
//! SRNR, interference leakage, BER and BER-constrained sum-rate.
//!
//! Training and data quantities are laid out as rows of OFDM symbols, each
//! row holding one value per subcarrier.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{CMat2, CVec2, C64};
use crate::phy::rates::RATES_MBPS;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("bad length: expected {expected}, got {got}")]
    BadLength { expected: usize, got: usize },
    #[error("reference power is zero")]
    ZeroReference,
}

/// `10·log10(x)`.
pub fn db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Per-subcarrier training estimates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainingEstimates {
    /// Channel `h_s = Σₙ z_{s,n} / (M z̊_s)`.
    pub h: Vec<C64>,
    /// Signal power `S_s = |Σₙ z_{s,n} / M|²`.
    pub signal: Vec<f64>,
    /// Residual noise `N_s = Σₙ |z_{s,n} − h_s z̊_s|² / M`.
    pub noise: Vec<f64>,
    /// Noise referred to the symbol, `N_s / |h_s|²`.
    pub sigma2: Vec<f64>,
}

impl TrainingEstimates {
    pub fn n_subcarriers(&self) -> usize {
        self.h.len()
    }
}

fn check_rows<R: AsRef<[C64]>>(rows: &[R], width: usize) -> Result<(), MetricsError> {
    if rows.is_empty() {
        return Err(MetricsError::BadLength { expected: 1, got: 0 });
    }
    for r in rows {
        if r.as_ref().len() != width {
            return Err(MetricsError::BadLength {
                expected: width,
                got: r.as_ref().len(),
            });
        }
    }
    Ok(())
}

/// Table I estimators from `M = received.len()` training symbols.
pub fn training_estimates<R: AsRef<[C64]>>(
    received: &[R],
    known: &[C64],
) -> Result<TrainingEstimates, MetricsError> {
    check_rows(received, known.len())?;
    if known.iter().any(|z| z.norm_sqr() == 0.0) {
        return Err(MetricsError::ZeroReference);
    }
    let m = received.len() as f64;
    let n_sc = known.len();
    let mut est = TrainingEstimates {
        h: Vec::with_capacity(n_sc),
        signal: Vec::with_capacity(n_sc),
        noise: Vec::with_capacity(n_sc),
        sigma2: Vec::with_capacity(n_sc),
    };
    for (s, &zr) in known.iter().enumerate() {
        let sum: C64 = received.iter().map(|r| r.as_ref()[s]).sum();
        let h = sum / (zr * m);
        let noise = received.iter().map(|r| (r.as_ref()[s] - h * zr).norm_sqr()).sum::<f64>() / m;
        let h2 = h.norm_sqr();
        est.h.push(h);
        est.signal.push((sum / m).norm_sqr());
        est.noise.push(noise);
        est.sigma2.push(if h2 > 0.0 { noise / h2 } else { f64::INFINITY });
    }
    Ok(est)
}

/// Per-subcarrier and aggregate EVM, linear.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvmResult {
    pub per_subcarrier: Vec<f64>,
    /// Total error power over total reference power.
    pub aggregate: f64,
}

impl EvmResult {
    pub fn aggregate_db(&self) -> f64 {
        db(self.aggregate)
    }

    pub fn per_subcarrier_db(&self) -> Vec<f64> {
        self.per_subcarrier.iter().map(|&e| db(e)).collect()
    }
}

/// `EVM_s = Σₙ |z̄ − z̊|² / Σₙ |z̊|²` per subcarrier, plus the aggregate.
pub fn evm<R: AsRef<[C64]>, Q: AsRef<[C64]>>(equalized: &[R], reference: &[Q]) -> Result<EvmResult, MetricsError> {
    if equalized.len() != reference.len() || equalized.is_empty() {
        return Err(MetricsError::BadLength {
            expected: reference.len(),
            got: equalized.len(),
        });
    }
    let width = reference[0].as_ref().len();
    check_rows(equalized, width)?;
    check_rows(reference, width)?;
    let mut err = vec![0.0; width];
    let mut refp = vec![0.0; width];
    for (e, r) in equalized.iter().zip(reference) {
        for s in 0..width {
            let zr = r.as_ref()[s];
            err[s] += (e.as_ref()[s] - zr).norm_sqr();
            refp[s] += zr.norm_sqr();
        }
    }
    let total_ref: f64 = refp.iter().sum();
    if total_ref == 0.0 {
        return Err(MetricsError::ZeroReference);
    }
    Ok(EvmResult {
        per_subcarrier: err.iter().zip(&refp).map(|(e, r)| if *r > 0.0 { e / r } else { f64::NAN }).collect(),
        aggregate: err.iter().sum::<f64>() / total_ref,
    })
}

/// Per-subcarrier `S_s/N_s` in dB; `+∞` where the noise estimate is zero.
pub fn srnr(est: &TrainingEstimates) -> Vec<f64> {
    est.signal
        .iter()
        .zip(&est.noise)
        .map(|(&s, &n)| if n > 0.0 { db(s / n) } else { f64::INFINITY })
        .collect()
}

/// Mean of the per-subcarrier SRNR values in dB.
pub fn srnr_aggregate_db(est: &TrainingEstimates) -> f64 {
    let v = srnr(est);
    v.iter().sum::<f64>() / v.len() as f64
}

/// Frequency-form leakage `Σ_{j≠i} Σₖ |uₖᴴ H_ij[k] v_j[k]|²` at receiver `i`,
/// given the decoders and each interferer's responses and precoders.
pub fn interference_leakage(decoders: &[CVec2], interferers: &[(&[CMat2], &[CVec2])]) -> f64 {
    interferers
        .iter()
        .map(|(h, v)| {
            decoders
                .iter()
                .zip(h.iter())
                .zip(v.iter())
                .map(|((u, hk), vk)| hk.sandwich(u, vk).norm_sqr())
                .sum::<f64>()
        })
        .sum()
}

/// Time-form leakage from equivalent interference impulse responses, scaled
/// by `n_fft` so it agrees with the frequency form summed over all bins.
pub fn interference_leakage_time(equivalent_taps: &[&[C64]], n_fft: usize) -> f64 {
    n_fft as f64
        * equivalent_taps
            .iter()
            .flat_map(|t| t.iter())
            .map(|z| z.norm_sqr())
            .sum::<f64>()
}

/// Fraction of differing bits.
pub fn ber(decoded: &[u8], reference: &[u8]) -> Result<f64, MetricsError> {
    if decoded.len() != reference.len() || reference.is_empty() {
        return Err(MetricsError::BadLength {
            expected: reference.len(),
            got: decoded.len(),
        });
    }
    let errs = decoded.iter().zip(reference).filter(|(a, b)| (*a & 1) != (*b & 1)).count();
    Ok(errs as f64 / reference.len() as f64)
}

/// Highest rate (Mbit/s) whose BER meets the target, or 0. `bers` is
/// indexed like `rates`.
pub fn best_rate(bers: &[f64], rates: &[u32], ber_target: f64) -> f64 {
    bers.iter()
        .zip(rates)
        .filter(|(b, _)| **b <= ber_target)
        .map(|(_, &r)| r as f64)
        .fold(0.0, f64::max)
}

/// Sum over users of the best rate meeting `ber_target`; time-shared
/// schemes get a third of each user's rate.
pub fn achievable_sum_rate(per_user_bers: &[Vec<f64>], rates: &[u32], ber_target: f64, time_shared: bool) -> f64 {
    let share = if time_shared { per_user_bers.len().max(1) as f64 } else { 1.0 };
    per_user_bers.iter().map(|b| best_rate(b, rates, ber_target) / share).sum()
}

/// Convenience for BER tables covering every rate.
pub fn achievable_sum_rate_all(per_user_bers: &[Vec<f64>], ber_target: f64, time_shared: bool) -> f64 {
    achievable_sum_rate(per_user_bers, &RATES_MBPS, ber_target, time_shared)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::complex_gaussian;
    use crate::numerics::c;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn noiseless_training() {
        let known = vec![c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 1.0)];
        let h = c(0.3, -0.7);
        let rows: Vec<Vec<C64>> = (0..5).map(|_| known.iter().map(|z| z * h).collect()).collect();
        let e = training_estimates(&rows, &known).unwrap();
        for s in 0..3 {
            assert!((e.h[s] - h).norm() < 1e-15);
            assert!(e.noise[s] < 1e-30);
        }
        assert_eq!(srnr(&e)[0], f64::INFINITY);
    }

    #[test]
    fn constant_sequence() {
        let known = vec![c(1.0, 0.0)];
        let rows = vec![vec![c(2.0, 1.0)]; 4];
        let e = training_estimates(&rows, &known).unwrap();
        assert_eq!(e.h[0], c(2.0, 1.0));
        assert_eq!(e.noise[0], 0.0);
    }

    #[test]
    fn injected_noise_recovered() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let known = vec![c(1.0, 0.0), c(-1.0, 0.0)];
        let p = 0.05;
        let rows: Vec<Vec<C64>> = (0..1000)
            .map(|_| known.iter().map(|z| z * 0.8 + complex_gaussian(&mut rng, p)).collect())
            .collect();
        let e = training_estimates(&rows, &known).unwrap();
        for n in &e.noise {
            assert!((n / p - 1.0).abs() < 0.1);
        }
    }

    #[test]
    fn srnr_examples() {
        let e = TrainingEstimates {
            h: vec![c(10.0, 0.0)],
            signal: vec![100.0],
            noise: vec![1.0],
            sigma2: vec![0.01],
        };
        assert!((srnr(&e)[0] - 20.0).abs() < 1e-12);
    }

    #[test]
    fn evm_examples() {
        let r = vec![vec![c(1.0, 0.0), c(0.0, -1.0)]; 3];
        assert_eq!(evm(&r, &r).unwrap().aggregate, 0.0);
        let twice: Vec<Vec<C64>> = r.iter().map(|row| row.iter().map(|z| z * 2.0).collect()).collect();
        assert!((evm(&twice, &r).unwrap().aggregate - 1.0).abs() < 1e-15);
        let zero = vec![vec![C64::default(); 2]; 3];
        assert_eq!(evm(&r, &zero), Err(MetricsError::ZeroReference));
    }

    #[test]
    fn evm_white_error() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let r: Vec<Vec<C64>> = (0..10_000).map(|_| vec![complex_gaussian(&mut rng, 1.0)]).collect();
        let e: Vec<Vec<C64>> = r.iter().map(|z| vec![z[0] + complex_gaussian(&mut rng, 0.01)]).collect();
        assert!((evm(&e, &r).unwrap().aggregate_db() + 20.0).abs() < 0.3);
    }

    #[test]
    fn evm_rotation_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let r: Vec<Vec<C64>> = (0..50).map(|_| vec![complex_gaussian(&mut rng, 1.0); 4]).collect();
        let e: Vec<Vec<C64>> = r.iter().map(|row| row.iter().map(|z| z + complex_gaussian(&mut rng, 0.1)).collect()).collect();
        let rot = C64::from_polar(1.0, 1.1);
        let rr: Vec<Vec<C64>> = r.iter().map(|row| row.iter().map(|z| z * rot).collect()).collect();
        let er: Vec<Vec<C64>> = e.iter().map(|row| row.iter().map(|z| z * rot).collect()).collect();
        let a = evm(&e, &r).unwrap().aggregate;
        let b = evm(&er, &rr).unwrap().aggregate;
        assert!((a - b).abs() < 1e-12 * a);
    }

    #[test]
    fn ber_examples() {
        let a = vec![0u8, 1, 1, 0];
        assert_eq!(ber(&a, &a).unwrap(), 0.0);
        let inv: Vec<u8> = a.iter().map(|b| 1 - b).collect();
        assert_eq!(ber(&inv, &a).unwrap(), 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let x: Vec<u8> = (0..10_000).map(|_| rng.random_range(0..2)).collect();
        let y: Vec<u8> = (0..10_000).map(|_| rng.random_range(0..2)).collect();
        assert!((ber(&x, &y).unwrap() - 0.5).abs() < 0.02);
        assert!(ber(&x, &y[..5]).is_err());
    }

    #[test]
    fn sum_rate_examples() {
        let pass = vec![vec![0.0; 8]; 3];
        assert_eq!(achievable_sum_rate_all(&pass, 1e-4, false), 162.0);
        assert_eq!(achievable_sum_rate_all(&pass, 1e-4, true), 54.0);
        let fail = vec![vec![0.5; 8]; 3];
        assert_eq!(achievable_sum_rate_all(&fail, 1e-4, false), 0.0);
    }

    #[test]
    fn leakage_zero_precoders() {
        let h = vec![CMat2::identity(); 4];
        let u = vec![CVec2::e1(); 4];
        let v = vec![CVec2::ZERO; 4];
        assert_eq!(interference_leakage(&u, &[(&h, &v), (&h, &v)]), 0.0);
    }
}
