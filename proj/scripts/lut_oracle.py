#!/usr/bin/env python3
"""Reference values for the lookup-table tests.

cell_mean: trilinear value at the centre of the first cell of
data/fixtures/lut_synthetic.txt, i.e. the mean of its eight corners.
two_step_factor: shape factor at z = 2 m for a flux of 2 on [0, 1) and 1 on
[1, 2], C = 1 /m, integrated from z = 0, by adaptive quadrature.

    python3 scripts/lut_oracle.py
"""
import mpmath as mp
from pathlib import Path

mp.mp.dps = 30
here = Path(__file__).resolve().parent.parent / "data" / "fixtures"

rows = {}
for line in (here / "lut_synthetic.txt").read_text().splitlines():
    tok = line.split()
    if not tok or tok[0] in ("#", "format", "axis", "unit"):
        continue
    rows[(float(tok[0]), float(tok[1]))] = [float(v) for v in tok[2:]]
corners = [rows[(p, g)][k] for p in (1000, 7000) for g in (500, 2000) for k in (0, 1)]
cell_mean = mp.mpf(sum(corners)) / 8 * 1000  # W/m2

c, z = mp.mpf(1), mp.mpf(2)
q = lambda s: 2 if s < 1 else 1
num = mp.quad(lambda s: q(s) * mp.exp(-c * (z - s)), [0, 1, 2])
two_step = c * num / (q(z) * (1 - mp.exp(-c * z)))

with open(here / "lut_oracle.csv", "w") as f:
    f.write("# name,value\n")
    f.write(f"cell_mean,{mp.nstr(cell_mean, 17)}\n")
    f.write(f"two_step_factor,{mp.nstr(two_step, 17)}\n")
