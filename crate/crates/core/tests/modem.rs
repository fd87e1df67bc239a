//! End-to-end modem checks: frame assembly, a MIMO channel, detection,
//! equalization and decoding.

use iawlan::channel::{accumulate_link, add_awgn, complex_gaussian, AntennaStreams, MimoFir};
use iawlan::metrics::ber;
use iawlan::numerics::{CMat2, CVec2, C64};
use iawlan::phy::ofdm::N_USED;
use iawlan::phy::{
    assemble_data_frame, decode_payload, detect_and_sync, receive_frame, Combiner, PhyFrame, RxConfig, SyncConfig,
    PAYLOAD_BITS, RATE_TABLE,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const LEAD: usize = 160;

fn random_bits(rng: &mut ChaCha8Rng) -> Vec<u8> {
    (0..PAYLOAD_BITS).map(|_| rng.random_range(0..2u8)).collect()
}

fn multipath(rng: &mut ChaCha8Rng, n_taps: usize) -> MimoFir {
    let taps = (0..n_taps)
        .map(|k| {
            let p = (-(k as f64) / 2.0).exp();
            CMat2::new(
                complex_gaussian(rng, p),
                complex_gaussian(rng, p),
                complex_gaussian(rng, p),
                complex_gaussian(rng, p),
            )
        })
        .collect();
    MimoFir { taps }
}

/// Transmits `frame` over `fir` after `LEAD` silent samples, with optional
/// AWGN of variance `noise_var` per receive sample.
fn over_the_air(frame: &PhyFrame, fir: &MimoFir, noise_var: f64, rng: &mut ChaCha8Rng) -> AntennaStreams {
    let len = LEAD + frame.len() + 200;
    let tx: AntennaStreams = std::array::from_fn(|a| {
        let mut s = vec![C64::default(); len];
        s[LEAD..LEAD + frame.len()].copy_from_slice(&frame.antenna_streams[a]);
        s
    });
    let mut rx: AntennaStreams = [vec![C64::default(); len], vec![C64::default(); len]];
    accumulate_link(fir, 0, &tx, &mut rx);
    if noise_var > 0.0 {
        add_awgn(&mut rx, noise_var, rng);
    }
    rx
}

/// Decodes with the matched combiner `u_k = H_k v_k` and returns (BER, timing error).
fn decode(frame: &PhyFrame, fir: &MimoFir, rx: &AntennaStreams, precoders: &[CVec2]) -> (f64, i64) {
    let h = iawlan::channel::freq_response(fir, 64).unwrap();
    let u: Vec<CVec2> = iawlan::phy::ofdm::USED_SUBCARRIERS
        .iter()
        .zip(precoders)
        .map(|(&k, v)| h[iawlan::phy::ofdm::bin(k)].mul_vec(v).normalized().unwrap())
        .collect();
    let streams = [rx[0].as_slice(), rx[1].as_slice()];
    let sync = detect_and_sync(&streams, &SyncConfig::default());
    assert!(sync.detected, "frame not detected");
    let te = sync.frame_start as i64 - LEAD as i64;
    let r = receive_frame(
        &streams,
        sync.frame_start,
        sync.cfo_norm(),
        frame.n_data_symbols,
        Combiner::Decoder(&u),
        &RxConfig::default(),
    )
    .unwrap();
    let bits = decode_payload(&r.data, &frame.rate).unwrap();
    (ber(&bits, &frame.source_bits).unwrap(), te)
}

/// Unit precoders with a two-tap spectral shape, so the precoded channel
/// stays inside the cyclic prefix.
fn smooth_precoders(rng: &mut ChaCha8Rng) -> Vec<CVec2> {
    let a = CVec2::new(complex_gaussian(rng, 1.0), complex_gaussian(rng, 1.0));
    let b = CVec2::new(complex_gaussian(rng, 1.0), complex_gaussian(rng, 1.0));
    iawlan::phy::ofdm::USED_SUBCARRIERS
        .iter()
        .map(|&k| {
            let w = C64::from_polar(1.0, -2.0 * std::f64::consts::PI * k as f64 / 64.0);
            (a + b.scale(w)).normalized().unwrap()
        })
        .collect()
}

#[test]
fn noiseless_loopback_is_error_free_over_ideal_and_multipath_channels() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for rate in RATE_TABLE {
        for n_taps in [1usize, 4, 16] {
            let fir = if n_taps == 1 { MimoFir::single(CMat2::identity()) } else { multipath(&mut rng, n_taps) };
            let v = smooth_precoders(&mut rng);
            let frame = assemble_data_frame(&random_bits(&mut rng), &rate, &v, 0x5d).unwrap();
            let rx = over_the_air(&frame, &fir, 0.0, &mut rng);
            let (b, te) = decode(&frame, &fir, &rx, &v);
            assert_eq!(b, 0.0, "rate {} taps {n_taps} timing {te}", rate.rate_mbps);
        }
    }
}

#[test]
fn timing_error_within_two_samples_at_high_snr() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let rate = RATE_TABLE[0];
    let trials = 200;
    let mut good = 0;
    for _ in 0..trials {
        let fir = multipath(&mut rng, 8);
        let v = vec![CVec2::e1(); N_USED];
        let frame = assemble_data_frame(&random_bits(&mut rng), &rate, &v, 0x5d).unwrap();
        // 15 dB below the mean received power per antenna.
        let p_rx = fir.energy() / 4.0;
        let rx = over_the_air(&frame, &fir, p_rx / 10f64.powf(1.5), &mut rng);
        let (_, te) = decode(&frame, &fir, &rx, &v);
        if te.abs() <= 2 {
            good += 1;
        }
    }
    assert!(good as f64 >= 0.95 * trials as f64, "{good}/{trials}");
}
