#!/usr/bin/env python3
"""Generate the bundled water property tables from IAPWS-IF97.

Requires the `iapws` package (pip install iapws). Run from the repo root:

    python3 scripts/gen_water_tables.py

Writes data/water_saturation.dat and data/water_subcooled.dat.
"""
import math
import warnings

from iapws import IAPWS97
from iapws.iapws97 import _Region1, _TSat_P

warnings.simplefilter("ignore")


def saturation_table(path):
    n = 399  # 0.10 .. 20.00 MPa step 0.05
    with open(path, "w") as f:
        f.write("# chfkit water saturation table\n")
        f.write("# generator: scripts/gen_water_tables.py (IAPWS-IF97 via python iapws)\n")
        f.write("format water-saturation 1\n")
        f.write("columns pressure[Pa] t_sat[C] h_f[J/kg] h_fg[J/kg]\n")
        for i in range(n):
            p = round(0.1 + 0.05 * i, 4)
            liq = IAPWS97(P=p, x=0.0)
            vap = IAPWS97(P=p, x=1.0)
            hf = liq.h * 1e3
            hfg = vap.h * 1e3 - hf
            f.write(f"{p * 1e6:.1f} {liq.T - 273.15:.10g} {hf:.10g} {hfg:.10g}\n")


def subcooled_table(path):
    pressures = [0.1] + [0.5 * k for k in range(1, 41)]
    temps = [5.0 * k for k in range(0, 75)]
    with open(path, "w") as f:
        f.write("# chfkit subcooled liquid enthalpy table h(P, T) [J/kg]\n")
        f.write("# generator: scripts/gen_water_tables.py (IAPWS-IF97 region 1 via python iapws)\n")
        f.write("# rows extend 20 C past the saturation temperature of the next pressure row\n")
        f.write("# (metastable liquid, used only as interpolation support); 'nan' beyond\n")
        f.write("format water-subcooled 1\n")
        f.write("temperature[C] " + " ".join(f"{t:g}" for t in temps) + "\n")
        for j, p in enumerate(pressures):
            p_next = pressures[min(j + 1, len(pressures) - 1)]
            t_end = min(370.0, _TSat_P(p_next) - 273.15 + 20.0)
            vals = []
            for t in temps:
                if t <= t_end + 5.0:
                    vals.append(f"{_Region1(t + 273.15, p)['h'] * 1e3:.10g}")
                else:
                    vals.append("nan")
            f.write(f"{p * 1e6:.1f} " + " ".join(vals) + "\n")


if __name__ == "__main__":
    saturation_table("data/water_saturation.dat")
    subcooled_table("data/water_subcooled.dat")
