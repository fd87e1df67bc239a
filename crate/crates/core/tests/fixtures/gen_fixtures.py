"""Regenerates the golden vectors used by the phy and channel tests.

Written independently of the Rust code, straight from the 802.11a
definitions. Run from this directory: python3 gen_fixtures.py
"""

import json
import random

import numpy as np


def scrambler_sequence(seed, n):
    state = [(seed >> (6 - k)) & 1 for k in range(7)]  # x1 .. x7, MSB first
    out = []
    for _ in range(n):
        fb = state[3] ^ state[6]  # x^4 xor x^7
        out.append(fb)
        state = [fb] + state[:6]
    return out


# The 127-bit sequence printed in the standard for the all-ones state.
ALL_ONES_REFERENCE = (
    "00001110" "11110010" "11001001" "00000010" "00100110" "00101110"
    "10110110" "00001100" "11010100" "11100111" "10110100" "00101010"
    "11111010" "01010001" "10111000" "1111111"
)
assert "".join(map(str, scrambler_sequence(0x7F, 127))) == ALL_ONES_REFERENCE


def conv_encode(bits):
    g0, g1 = 0o133, 0o171
    reg = [0] * 6
    out = []
    for b in bits:
        taps = [b] + reg  # current bit followed by the six delays
        a = sum(t for t, k in zip(taps, range(7)) if (g0 >> (6 - k)) & 1) % 2
        bb = sum(t for t, k in zip(taps, range(7)) if (g1 >> (6 - k)) & 1) % 2
        out += [a, bb]
        reg = [b] + reg[:5]
    return out


PATTERNS = {
    "1/2": [1, 1],
    "2/3": [1, 1, 1, 0],
    "3/4": [1, 1, 1, 0, 0, 1],
}


def puncture(coded, pattern):
    return [b for k, b in enumerate(coded) if pattern[k % len(pattern)]]


def interleaver(ncbps, nbpsc):
    s = max(nbpsc // 2, 1)
    perm = []
    for k in range(ncbps):
        i = (ncbps // 16) * (k % 16) + k // 16
        j = s * (i // s) + (i + ncbps - (16 * i) // ncbps) % s
        perm.append(j)
    assert sorted(perm) == list(range(ncbps))
    return perm


GRAY = {
    1: {(0,): -1, (1,): 1},
    2: {(0, 0): -3, (0, 1): -1, (1, 1): 1, (1, 0): 3},
    3: {(0, 0, 0): -7, (0, 0, 1): -5, (0, 1, 1): -3, (0, 1, 0): -1,
        (1, 1, 0): 1, (1, 1, 1): 3, (1, 0, 1): 5, (1, 0, 0): 7},
}
KMOD = {1: 1.0, 2: 1 / np.sqrt(2), 4: 1 / np.sqrt(10), 6: 1 / np.sqrt(42)}


def constellation(nbpsc):
    pts = []
    for v in range(2 ** nbpsc):
        bits = tuple((v >> (nbpsc - 1 - k)) & 1 for k in range(nbpsc))
        if nbpsc == 1:
            z = complex(GRAY[1][bits], 0)
        else:
            h = nbpsc // 2
            z = complex(GRAY[h][bits[:h]], GRAY[h][bits[h:]])
        z *= KMOD[nbpsc]
        pts.append({"bits": list(bits), "re": z.real, "im": z.imag})
    return pts


def phy_fixture():
    rng = random.Random(2024)
    info = [rng.randint(0, 1) for _ in range(96)] + [0] * 6
    mother = conv_encode(info)
    return {
        "scrambler": {
            "seed": 0x5D,
            "sequence": scrambler_sequence(0x5D, 254),
            "all_ones_sequence": scrambler_sequence(0x7F, 127),
        },
        "encoder": {
            "input": info,
            "punctured": {name: puncture(mother, p) for name, p in PATTERNS.items()},
        },
        "interleaver": {
            f"{ncbps}_{nbpsc}": interleaver(ncbps, nbpsc)
            for ncbps, nbpsc in [(48, 1), (96, 2), (192, 4), (288, 6)]
        },
        "constellations": {str(n): constellation(n) for n in (1, 2, 4, 6)},
    }


def channel_fixture():
    rng = np.random.default_rng(7)
    links = []
    energies = []
    responses = []
    for i in range(3):
        row, erow, rrow = [], [], []
        for j in range(3):
            n_taps = 2 if i == j else 3
            taps = (rng.standard_normal((n_taps, 2, 2)) + 1j * rng.standard_normal((n_taps, 2, 2))) / 2
            row.append([[[[float(taps[n, r, t].real), float(taps[n, r, t].imag)] for n in range(n_taps)]
                         for t in range(2)] for r in range(2)])
            erow.append(float(np.sum(np.abs(taps) ** 2)))
            # H[k] = sum_n h[n] exp(-2 pi i k n / 64) at subcarrier +7 (bin 7).
            h7 = np.fft.fft(taps, n=64, axis=0)[7]
            rrow.append([[[float(h7[r, t].real), float(h7[r, t].imag)] for t in range(2)] for r in range(2)])
        links.append(row)
        energies.append(erow)
        responses.append(rrow)
    delays = [[0, 3, 5], [2, 0, 1], [4, 6, 0]]
    file = {
        "format": "iawlan-channels",
        "version": 1,
        "n_taps": 3,
        "realizations": [{"delays": delays, "links": links}],
    }
    return file, {"energies": energies, "response_bin7": responses, "delays": delays}


if __name__ == "__main__":
    with open("phy_vectors.json", "w") as f:
        json.dump(phy_fixture(), f)
    chan, expected = channel_fixture()
    with open("channel_small.json", "w") as f:
        json.dump(chan, f)
    with open("channel_small_expected.json", "w") as f:
        json.dump(expected, f)
