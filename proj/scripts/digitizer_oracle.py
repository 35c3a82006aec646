#!/usr/bin/env python3
"""Golden fixtures for PCHIP interpolation and profile resampling.

Interpolation uses scipy.interpolate.PchipInterpolator as the reference
implementation. The outlier filter is re-implemented here with numpy from the
written policy (moving median, MAD / local-spread scale, worst-first removal).

    python3 scripts/digitizer_oracle.py
"""
import numpy as np
from scipy.interpolate import PchipInterpolator


def filter_outliers(z, q, k=3.5, half_window=2, spread_half_window=4, max_fraction=0.2):
    order = np.lexsort((q, z))
    z, q = z[order], q[order]
    uz = []
    uq = []
    for zi, qi in zip(z, q):
        if uz and uz[-1][0] == zi:
            uq[-1].append(qi)
        else:
            uz.append([zi])
            uq.append([qi])
    z = np.array([u[0] for u in uz])
    q = np.array([np.mean(v) for v in uq])
    budget = int(np.floor(max_fraction * len(z)))
    removed = 0
    while removed < budget:
        n = len(z)
        base = np.array([np.median(q[max(0, i - half_window):min(n, i + half_window + 1)]) for i in range(n)])
        r = np.abs(q - base)
        mad = 1.4826 * np.median(r)
        dq = np.abs(np.diff(q))
        ratio = np.empty(n)
        for i in range(n):
            lo, hi = max(0, i - spread_half_window), min(n - 1, i + spread_half_window)
            ratio[i] = r[i] / max(mad, np.median(dq[lo:hi]), 1e-300)
        worst = int(np.argmax(ratio))
        if not ratio[worst] > k:
            break
        z = np.delete(z, worst)
        q = np.delete(q, worst)
        removed += 1
    return z, q


def resample(z, q, length, n):
    f = PchipInterpolator(z, q)
    nodes = np.linspace(0.0, length, n)
    y = f(np.clip(nodes, z[0], z[-1]))
    h = length / (n - 1)
    w = np.full(n, h)
    w[0] = w[-1] = h / 2
    return y / (np.dot(w, y) / length)


def main():
    nodes = np.array([0.0, 1.0, 2.0, 3.0])
    vals = nodes ** 2
    f = PchipInterpolator(nodes, vals)
    with open("data/fixtures/pchip_golden.csv", "w") as out:
        out.write("# nodes (0,0),(1,1),(2,4),(3,9); query,value\n")
        for qz in [0.25, 0.5, 1.5, 2.5, 2.9]:
            out.write(f"{qz!r},{float(f(qz))!r}\n")

    rng = np.random.default_rng(7)
    length = 1.8
    z = np.sort(rng.uniform(0.0, length, 60))
    z[0], z[-1] = 0.0, length
    q = 0.6 + 2.4 * np.exp(-((z - 0.3 * length) / 0.12) ** 2) + rng.normal(0.0, 0.02, z.size)
    q[25] += 1.5  # spurious click
    with open("data/fixtures/spike_raw.csv", "w") as out:
        out.write("# z[m],q_norm[-]; length 1.8 m, one spurious click\n")
        for zi, qi in zip(z, q):
            out.write(f"{float(zi)!r},{float(qi)!r}\n")
    fz, fq = filter_outliers(z, q)
    y = resample(fz, fq, length, 40)
    with open("data/fixtures/spike_resampled_golden.csv", "w") as out:
        out.write(f"# filtered points kept: {fz.size}; 40-node wall_power\n")
        for v in y:
            out.write(f"{float(v)!r}\n")


if __name__ == "__main__":
    main()
