#!/usr/bin/env python3
"""Golden fixtures for the Bowring and Biasi correlations.

This is a second transcription of both correlations, written independently
of the C++ module and of data/correlation_coefficients.dat. It must stay that
way: do not import or parse the coefficients file here.

    python3 scripts/correlation_oracle.py
"""
import math
import random


def bowring(p_mpa, g, d, length, dh_sub, h_fg):
    pr = 0.145 * p_mpa
    n = 2.0 - 0.5 * pr
    if pr <= 1.0:
        f1 = (pr ** 18.942 * math.exp(20.89 * (1.0 - pr)) + 0.917) / 1.917
        f1_over_f2 = (pr ** 1.316 * math.exp(2.444 * (1.0 - pr)) + 0.309) / 1.309
        f3 = (pr ** 17.023 * math.exp(16.658 * (1.0 - pr)) + 0.667) / 1.667
    else:
        f1 = pr ** -0.368 * math.exp(0.648 * (1.0 - pr))
        f1_over_f2 = pr ** -0.448 * math.exp(0.245 * (1.0 - pr))
        f3 = pr ** 0.219
    f2 = f1 / f1_over_f2
    f4 = f3 * pr ** 1.649
    a = 2.317 * (h_fg * d * g / 4.0) * f1 / (1.0 + 0.0143 * f2 * math.sqrt(d) * g)
    b = d * g / 4.0
    c = 0.077 * f3 * d * g / (1.0 + 0.347 * f4 * (g / 1356.0) ** n)
    return (a + b * dh_sub) / (c + length)


def biasi(d_m, g_si, p_pa, x):
    d = d_m * 100.0          # cm
    g = g_si / 10.0          # g/cm2/s
    p = p_pa / 1.0e5         # bar
    n = 0.4 if d >= 1.0 else 0.6
    fp = 0.7249 + 0.099 * p * math.exp(-0.032 * p)
    hp = -1.159 + 0.149 * p * math.exp(-0.019 * p) + 8.99 * p / (10.0 + p * p)
    q_low = 1883.0 / (d ** n * g ** (1.0 / 6.0)) * (fp / g ** (1.0 / 6.0) - x)
    q_high = 3780.0 * hp / (d ** n * g ** 0.6) * (1.0 - x)
    if g < 30.0:
        branch, q = "high", q_high
    elif q_low >= q_high:
        branch, q = "low", q_low
    else:
        branch, q = "high", q_high
    return q * 1.0e4, branch


def main():
    rng = random.Random(20250101)
    with open("data/fixtures/bowring_golden.csv", "w") as f:
        f.write("# pressure[Pa],mass_flux[kg/m2/s],diameter[m],length[m],dh_sub[J/kg],h_fg[J/kg],chf_raw[W/m2]\n")
        rows = [(10.0e6, 3000.0, 0.01, 2.0, 2.0e5, 1317.4e3),
                (6.895e6, 1356.0, 0.008, 1.0, 1.0e5, 1505.0e3),
                (1.0e6, 500.0, 0.0125, 0.5, 3.0e5, 2014.6e3),
                (17.0e6, 8000.0, 0.006, 3.0, 5.0e4, 622.0e3)]
        for _ in range(24):
            p = rng.uniform(0.43, 18.0) * 1e6
            g = rng.uniform(335.0, 9561.9)
            d = rng.uniform(0.00544, 0.0283)
            length = rng.uniform(0.15, 3.7)
            dh = rng.uniform(0.0, 6.0e5)
            hfg = rng.uniform(5.0e5, 2.1e6)
            rows.append((p, g, d, length, dh, hfg))
        for p, g, d, length, dh, hfg in rows:
            q = bowring(p / 1e6, g, d, length, dh, hfg)
            f.write(f"{p!r},{g!r},{d!r},{length!r},{dh!r},{hfg!r},{q!r}\n")

    with open("data/fixtures/biasi_golden.csv", "w") as f:
        f.write("# diameter[m],mass_flux[kg/m2/s],pressure[Pa],quality[-],chf_raw[W/m2],branch\n")
        rows = [(0.01, 3000.0, 7.0e6, 0.1), (0.008, 200.0, 5.0e6, 0.3),
                (0.015, 2000.0, 10.0e6, 0.8), (0.012, 4000.0, 12.0e6, -0.2),
                (0.02, 1000.0, 3.0e6, 0.6), (0.006, 500.0, 14.0e6, 0.9)]
        for _ in range(24):
            d = rng.uniform(0.00544, 0.0283)
            g = rng.uniform(150.0, 9561.9)
            p = rng.uniform(0.43, 18.0) * 1e6
            x = rng.uniform(-0.5, 0.95)
            rows.append((d, g, p, x))
        for d, g, p, x in rows:
            q, branch = biasi(d, g, p, x)
            f.write(f"{d!r},{g!r},{p!r},{x!r},{q!r},{branch}\n")


if __name__ == "__main__":
    main()
