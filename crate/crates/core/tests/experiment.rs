//! Orchestration behaviour of the experiment layer.

use iawlan::channel::{ImpairmentConfig, PowerDelayProfile, AntennaStreams};
use iawlan::experiment::{
    aggregate, ecdf, emulate_async, median, AsyncConfig, DecodeMode, DecodeModes, Experiment, ExperimentConfig, Scheme,
    SweepAxis,
};
use iawlan::numerics::C64;
use iawlan::phy::RATES_MBPS;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn small(n_trials: usize) -> ExperimentConfig {
    ExperimentConfig {
        n_trials,
        rates: vec![6, 24],
        ..ExperimentConfig::default()
    }
}

#[test]
fn noiseless_flat_channels_decode_error_free_with_post_fft_ia() {
    let mut cfg = ExperimentConfig {
        n_trials: 2,
        schemes: vec![Scheme::Ia],
        decode_mode: DecodeModes::PostFft,
        impairments: ImpairmentConfig::noiseless(),
        ..ExperimentConfig::default()
    };
    cfg.channel.n_taps = 1;
    cfg.channel.power_delay_profile = PowerDelayProfile::SingleTap;
    let exp = Experiment::new(cfg).unwrap();
    for r in exp.run_all() {
        assert!(r.skipped.is_none());
        for u in 0..3 {
            for rate in RATES_MBPS {
                let m = r.metrics(Scheme::Ia, u, rate, DecodeMode::PostFft).unwrap();
                assert_eq!(m.ber, 0.0, "trial {} user {u} rate {rate}", r.trial);
            }
        }
    }
}

#[test]
fn same_seed_and_index_give_identical_trials() {
    let exp = Experiment::new(small(3)).unwrap();
    let a = exp.run_trial(2);
    let b = Experiment::new(small(3)).unwrap().run_trial(2);
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    let other = exp.run_trial(1);
    assert_ne!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&other).unwrap());
}

#[test]
fn every_configured_scheme_is_present() {
    let exp = Experiment::new(small(1)).unwrap();
    let r = exp.run_trial(0);
    for s in Scheme::CONFIGURABLE {
        let sr = r.scheme(s).unwrap_or_else(|| panic!("{s:?} missing"));
        assert_eq!(sr.users.len(), 3);
    }
    assert!(r.scheme(Scheme::IaAsync).is_none());
}

#[test]
fn sweep_values_share_channel_realizations() {
    let base = small(4);
    for (axis, values) in [
        (SweepAxis::L, vec![1.0, 30.0, 64.0]),
        (SweepAxis::M, vec![2.0, 100.0]),
        (SweepAxis::Snr, vec![10.0, 30.0]),
    ] {
        let exps: Vec<Experiment> = values
            .iter()
            .map(|v| Experiment::new(axis.apply(&base, *v).unwrap()).unwrap())
            .collect();
        for t in 0..4 {
            let r0 = exps[0].realization(t);
            for e in &exps[1..] {
                assert_eq!(e.realization(t), r0, "{axis:?} trial {t}");
            }
        }
    }
}

#[test]
fn vacuous_ber_target_gives_full_rate_ceiling() {
    let mut cfg = small(2);
    cfg.rates = RATES_MBPS.to_vec();
    cfg.decode_mode = DecodeModes::PostFft;
    let results = Experiment::new(cfg).unwrap().run_all();
    let s = aggregate(&results, 24, 1.0).unwrap();
    for row in &s.schemes {
        let ceiling = if row.scheme.time_shared() { 54.0 } else { 3.0 * 54.0 };
        assert_eq!(row.mean_sum_rate_mbps, ceiling, "{:?}", row.scheme);
    }
}

#[test]
fn aggregate_cdfs_are_monotone_and_end_at_one() {
    let results = Experiment::new(small(3)).unwrap().run_all();
    let s = aggregate(&results, 24, 1e-4).unwrap();
    assert!(!s.schemes.is_empty());
    for row in &s.schemes {
        let cdf = &row.evm_cdf;
        assert!(cdf.windows(2).all(|w| w[0].0 <= w[1].0 && w[0].1 <= w[1].1));
        assert_eq!(cdf.last().unwrap().1, 1.0);
        let area: f64 = row.evm_pdf.iter().map(|(_, d)| d * 0.5).sum();
        assert!((area - 1.0).abs() < 1e-9 || row.evm_pdf.is_empty());
    }
    assert!(aggregate(&[], 24, 1e-4).is_err());
    assert_eq!(ecdf(&[3.0]), vec![(3.0, 1.0)]);
}

#[test]
fn combined_capture_noise_is_three_times_single() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let len = 60_000;
    let caps: Vec<AntennaStreams> = (0..3)
        .map(|_| {
            let mut s: AntennaStreams = [vec![C64::default(); len], vec![C64::default(); len]];
            iawlan::channel::add_awgn(&mut s, 1.0, &mut rng);
            s
        })
        .collect();
    let refs: Vec<&AntennaStreams> = caps.iter().collect();
    let sum = emulate_async(&refs, &[0, 17, 40]).unwrap();
    let p = |s: &AntennaStreams, lo: usize| s[0][lo..].iter().map(|z| z.norm_sqr()).sum::<f64>() / (len - lo) as f64;
    let gain_db = 10.0 * (p(&sum, 40) / p(&caps[0], 40)).log10();
    assert!((gain_db - 4.77).abs() <= 0.2, "{gain_db}");
    assert!(emulate_async(&refs, &[0, 1]).is_err());
}

#[test]
fn delayed_interferer_hurts_post_fft_but_not_pre_fft_leakage() {
    let leak = |delay: usize| {
        let mut d = [[0usize; 3]; 3];
        d[0][1] = delay;
        let cfg = ExperimentConfig {
            n_trials: 6,
            rates: vec![6],
            schemes: vec![],
            decoder_len: 64,
            asynchrony: AsyncConfig::Fixed { delays: d },
            ..ExperimentConfig::default()
        };
        let results = Experiment::new(cfg).unwrap().run_all();
        let get = |m| {
            median(
                &results
                    .iter()
                    .map(|r| r.metrics(Scheme::IaAsync, 0, 6, m).unwrap().leakage)
                    .collect::<Vec<_>>(),
            )
        };
        (get(DecodeMode::PreFft), get(DecodeMode::PostFft))
    };
    let (pre0, post0) = leak(0);
    let (pre40, post40) = leak(40);
    assert!(post40 > post0, "post {post0} -> {post40}");
    assert!((pre40 - pre0).abs() <= 0.05 * pre0, "pre {pre0} -> {pre40}");
}
