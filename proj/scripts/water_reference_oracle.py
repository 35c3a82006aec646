#!/usr/bin/env python3
"""Reference fixtures for the water property tests.

Uses the IAPWS-95 formulation (python iapws), which is independent of the
IF97 formulation the bundled tables are generated from.

    python3 scripts/water_reference_oracle.py
"""
import warnings

from iapws import IAPWS95

warnings.simplefilter("ignore")

pressures = [0.43 + (18.0 - 0.43) * k / 35 for k in range(36)] + [1.0, 10.0]

with open("data/fixtures/water_saturation_reference.csv", "w") as f:
    f.write("# IAPWS-95 saturation reference; pressure[Pa],t_sat[C],h_f[J/kg],h_fg[J/kg]\n")
    for p in pressures:
        liq = IAPWS95(P=p, x=0.0)
        vap = IAPWS95(P=p, x=1.0)
        hf = liq.h * 1e3
        f.write(f"{p * 1e6:.6f},{liq.T - 273.15:.10g},{hf:.10g},{vap.h * 1e3 - hf:.10g}\n")

points = [(0.5, 20.0), (0.5, 120.0), (1.0, 50.0), (1.0, 170.0), (2.0, 200.0),
          (3.0, 150.0), (5.0, 250.0), (7.0, 280.0), (10.0, 250.0), (10.0, 300.0),
          (12.0, 100.0), (14.0, 320.0), (15.0, 330.0), (16.0, 340.0), (18.0, 350.0),
          (0.43, 140.0), (4.3, 37.0), (8.8, 222.0)]
with open("data/fixtures/water_subcooled_reference.csv", "w") as f:
    f.write("# IAPWS-95 compressed-liquid reference; pressure[Pa],temperature[C],h[J/kg]\n")
    for p, t in points:
        st = IAPWS95(P=p, T=t + 273.15)
        f.write(f"{p * 1e6:.6f},{t:g},{st.h * 1e3:.10g}\n")
