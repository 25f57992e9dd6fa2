#!/usr/bin/env python3
"""Reference p-values for the five SP 800-22 tests used by the battery.

Written directly from the NIST SP 800-22 rev1a test descriptions with scipy's
special functions. It shares no code with the C++ implementation and is only
used to freeze tests/fixtures/sp800_22_reference.tsv:

    python3 tests/oracle/sp800_22_reference.py > tests/fixtures/sp800_22_reference.tsv
"""

import math
import random

from scipy.special import erfc, gammaincc
from scipy.stats import norm

BLOCK_M = 16


def monobit(bits):
    n = len(bits)
    if n < 100:
        return None
    s = sum(2 * b - 1 for b in bits)
    return erfc(abs(s) / math.sqrt(n) / math.sqrt(2))


def block_frequency(bits, m=BLOCK_M):
    n = len(bits)
    if n < 100:
        return None
    blocks = n // m
    chi = 0.0
    for i in range(blocks):
        pi = sum(bits[i * m:(i + 1) * m]) / m
        chi += (pi - 0.5) ** 2
    chi *= 4 * m
    return gammaincc(blocks / 2, chi / 2)


def runs(bits):
    n = len(bits)
    if n < 100:
        return None
    pi = sum(bits) / n
    if abs(pi - 0.5) >= 2 / math.sqrt(n):
        return None
    v = 1 + sum(1 for k in range(n - 1) if bits[k] != bits[k + 1])
    num = abs(v - 2 * n * pi * (1 - pi))
    den = 2 * math.sqrt(2 * n) * pi * (1 - pi)
    return erfc(num / den)


LONGEST_RUN_TABLES = [
    # (min n, M, category lower edge, category upper edge, probabilities)
    (750000, 10000, 10, 16, [0.0882, 0.2092, 0.2483, 0.1933, 0.1208, 0.0675, 0.0727]),
    (6272, 128, 4, 9, [0.1174, 0.2430, 0.2493, 0.1752, 0.1027, 0.1124]),
    (128, 8, 1, 4, [0.2148, 0.3672, 0.2305, 0.1875]),
]


def longest_run(bits):
    n = len(bits)
    if n < 128:
        return None
    for min_n, m, lo, hi, probs in LONGEST_RUN_TABLES:
        if n >= min_n:
            break
    blocks = n // m
    counts = [0] * len(probs)
    for i in range(blocks):
        block = bits[i * m:(i + 1) * m]
        longest = run = 0
        for b in block:
            run = run + 1 if b else 0
            longest = max(longest, run)
        cat = min(max(longest, lo), hi) - lo
        counts[cat] += 1
    chi = sum((counts[i] - blocks * probs[i]) ** 2 / (blocks * probs[i])
              for i in range(len(probs)))
    return gammaincc((len(probs) - 1) / 2, chi / 2)


def cumulative_sums(bits):
    n = len(bits)
    if n < 100:
        return None
    s = 0
    z = 0
    for b in bits:
        s += 2 * b - 1
        z = max(z, abs(s))
    sq = math.sqrt(n)
    total1 = 0.0
    k = int((-n / z + 1) / 4)
    while k <= int((n / z - 1) / 4):
        total1 += norm.cdf((4 * k + 1) * z / sq) - norm.cdf((4 * k - 1) * z / sq)
        k += 1
    total2 = 0.0
    k = int((-n / z - 3) / 4)
    while k <= int((n / z - 1) / 4):
        total2 += norm.cdf((4 * k + 3) * z / sq) - norm.cdf((4 * k + 1) * z / sq)
        k += 1
    return 1.0 - total1 + total2


# Published worked examples (SP 800-22 rev1a, sections 2.1.8 and 2.4.8).
PI_100 = ("11001001000011111101101010100010001000010110100011"
          "00001000110100110001001100011001100010100010111000")
LONGEST_128 = ("11001100000101010110110001001100111000000000001001"
               "00110101010001000100111101011010000000110101111100"
               "1100111001101101100010110010")


def bits_of(s):
    return [int(c) for c in s]


def byte_bits(data):
    return [(byte >> (7 - i)) & 1 for byte in data for i in range(8)]


def fixtures():
    rng = random.Random(20201019)
    out = [("nist_pi_100", bits_of(PI_100)),
           ("nist_longest_run_128", bits_of(LONGEST_128)),
           ("alternating_128", [i % 2 for i in range(128)]),
           ("zeros_128", [0] * 128),
           ("ones_128", [1] * 128)]
    for nbytes in (13, 16, 16, 20, 24, 32, 32, 48, 64, 64, 96, 128):
        data = bytes(rng.getrandbits(8) for _ in range(nbytes))
        out.append((f"uniform_{nbytes * 8}_{len(out)}", byte_bits(data)))
    for bias, nbits in ((0.42, 256), (0.38, 512), (0.45, 1024), (0.30, 200)):
        out.append((f"biased_{int(bias * 100)}_{nbits}",
                    [1 if rng.random() < bias else 0 for _ in range(nbits)]))
    out.append(("blocky_256", ([1] * 8 + [0] * 8) * 16))
    out.append(("long_7000", [rng.getrandbits(1) for _ in range(7000)]))
    return out


def fmt(p):
    return "skip" if p is None else f"{p:.12f}"


def main():
    print("# name\tbits\tmonobit\tblock_frequency\truns\tlongest_run\tcumulative_sums")
    for name, bits in fixtures():
        row = [name, "".join(map(str, bits))]
        row += [fmt(f(bits)) for f in (monobit, block_frequency, runs,
                                       longest_run, cumulative_sums)]
        print("\t".join(row))


if __name__ == "__main__":
    main()
