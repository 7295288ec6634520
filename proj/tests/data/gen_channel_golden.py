"""Regenerates channel_golden.csv with 50-digit arithmetic (mpmath)."""
import csv
import random
import sys

import mpmath as mp

mp.mp.dps = 50


def los_params(h):
    d0 = max(mp.mpf(18), mp.mpf("-432.94") + mp.mpf("294.05") * mp.log10(h))
    p1 = mp.mpf("-0.95") + mp.mpf("233.98") * mp.log10(h)
    return d0, p1


def p_los(d, h):
    r = mp.sqrt(max(mp.mpf(0), d * d - h * h))
    d0, p1 = los_params(h)
    if r <= d0:
        return mp.mpf(1)
    p = d0 / r + mp.exp(-r / p1 + d0 / p1)
    return min(mp.mpf(1), max(mp.mpf(0), p))


def losses(d, h, fc):
    los = mp.mpf("30.9") + mp.log10(d) * (mp.mpf("22.5") - mp.mpf("0.5") * mp.log10(h)) + 20 * mp.log10(fc)
    nlos = max(los, mp.mpf("32.4") + (mp.mpf("43.2") - mp.mpf("7.6") * mp.log10(h)) * mp.log10(d) + 20 * mp.log10(fc))
    p = p_los(d, h)
    return los, nlos, (1 - p) * nlos + p * los, p


def main(path):
    rng = random.Random(20240611)
    cases = [(100.0, 100.0, 2.0, 1.0), (100.0 * 2 ** 0.5, 100.0, 2.0, 1.0), (150.0, 150.0, 2.0, 1.0),
             (20.0, 20.0, 2.0, 1.0), (1000.0, 20.0, 2.0, 1.0), (1500.0, 150.0, 2.0, 0.5)]
    while len(cases) < 50:
        h = round(rng.uniform(20.0, 150.0), 3)
        horiz = round(rng.choice([rng.uniform(0.0, 200.0), rng.uniform(0.0, 1400.0)]), 3)
        d = float(mp.nstr(mp.sqrt(mp.mpf(horiz) ** 2 + mp.mpf(h) ** 2), 17))
        fc = rng.choice([2.0, 2.0, 2.4, 3.5, 0.9])
        fading = round(rng.choice([1.0, rng.expovariate(1.0)]), 6)
        cases.append((d, h, fc, fading))
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["d3d", "h", "fc_ghz", "fading", "d0", "p_los", "los_db", "nlos_db", "expected_db", "gain"])
        for d, h, fc, fading in cases:
            md, mh, mfc, mH = mp.mpf(repr(d)), mp.mpf(repr(h)), mp.mpf(repr(fc)), mp.mpf(repr(fading))
            los, nlos, exp_db, p = losses(md, mh, mfc)
            gain = mH / mp.power(10, exp_db / 10)
            d0, _ = los_params(mh)
            w.writerow([repr(d), repr(h), repr(fc), repr(fading)] +
                       [mp.nstr(v, 20) for v in (d0, p, los, nlos, exp_db, gain)])


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "channel_golden.csv")
