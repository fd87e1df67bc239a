//! Bit-exact checks against vectors produced by `fixtures/gen_fixtures.py`,
//! an independent implementation of the 802.11a coding chain.

use std::path::PathBuf;

use iawlan::channel::{empirical_tap_powers, freq_response, load_channels, N_USERS};
use iawlan::phy::coding::{conv_encode, interleaver_permutation, puncture, viterbi_decode, Scrambler};
use iawlan::phy::mapping::map_bits;
use iawlan::phy::rates::{CodeRate, Modulation};
use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn load(name: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(fixture(name)).unwrap()).unwrap()
}

fn bits(v: &Value) -> Vec<u8> {
    v.as_array().unwrap().iter().map(|b| b.as_u64().unwrap() as u8).collect()
}

#[test]
fn scrambler_matches_reference_sequences() {
    let v = load("phy_vectors.json");
    let mut s = Scrambler::new(0x7f);
    let got: Vec<u8> = (0..127).map(|_| s.next_bit()).collect();
    assert_eq!(got, bits(&v["scrambler"]["all_ones_sequence"]));

    let seed = v["scrambler"]["seed"].as_u64().unwrap() as u8;
    let want = bits(&v["scrambler"]["sequence"]);
    let mut s = Scrambler::new(seed);
    let got: Vec<u8> = (0..want.len()).map(|_| s.next_bit()).collect();
    assert_eq!(got, want);
    assert_eq!(&want[..127], &want[127..254], "period 127");
}

#[test]
fn encoder_and_puncturing_match_reference() {
    let v = load("phy_vectors.json");
    let input = bits(&v["encoder"]["input"]);
    let mother = conv_encode(&input);
    for (name, rate) in [("1/2", CodeRate::Half), ("2/3", CodeRate::TwoThirds), ("3/4", CodeRate::ThreeQuarters)] {
        assert_eq!(puncture(&mother, rate), bits(&v["encoder"]["punctured"][name]), "rate {name}");
    }
    assert_eq!(viterbi_decode(&mother), input);
}

#[test]
fn interleaver_matches_reference() {
    let v = load("phy_vectors.json");
    for (ncbps, nbpsc) in [(48, 1), (96, 2), (192, 4), (288, 6)] {
        let want: Vec<usize> = v["interleaver"][format!("{ncbps}_{nbpsc}")]
            .as_array()
            .unwrap()
            .iter()
            .map(|x| x.as_u64().unwrap() as usize)
            .collect();
        assert_eq!(interleaver_permutation(ncbps, nbpsc), want, "NCBPS {ncbps}");
    }
}

#[test]
fn constellations_match_reference() {
    let v = load("phy_vectors.json");
    for (n, m) in [(1, Modulation::Bpsk), (2, Modulation::Qpsk), (4, Modulation::Qam16), (6, Modulation::Qam64)] {
        for p in v["constellations"][n.to_string()].as_array().unwrap() {
            let z = map_bits(&bits(&p["bits"]), m)[0];
            assert!((z.re - p["re"].as_f64().unwrap()).abs() < 1e-12);
            assert!((z.im - p["im"].as_f64().unwrap()).abs() < 1e-12);
        }
    }
}

#[test]
fn channel_file_energies_and_response() {
    let exp = load("channel_small_expected.json");
    let reals = load_channels(&fixture("channel_small.json")).unwrap();
    assert_eq!(reals.len(), 1);
    let r = &reals[0];
    for i in 0..N_USERS {
        for j in 0..N_USERS {
            let e = exp["energies"][i][j].as_f64().unwrap();
            assert!((r.links[i][j].energy() - e).abs() < 1e-12 * e.max(1.0));
            assert_eq!(r.delays_samples[i][j] as u64, exp["delays"][i][j].as_u64().unwrap());
            let h = freq_response(&r.links[i][j], 64).unwrap()[7];
            for rr in 0..2 {
                for t in 0..2 {
                    let want = &exp["response_bin7"][i][j][rr][t];
                    assert!((h.0[rr][t].re - want[0].as_f64().unwrap()).abs() < 1e-12);
                    assert!((h.0[rr][t].im - want[1].as_f64().unwrap()).abs() < 1e-12);
                }
            }
        }
    }
    let total: f64 = empirical_tap_powers(r).iter().sum();
    assert!((total - 1.0).abs() < 1e-12);
}
