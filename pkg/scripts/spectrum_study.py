"""Excitation spectra and trajectories for coincident-zero designs.

Writes the residual-excitation curve over a detuning band and the trap
trajectory for one, two and three coincident spectral zeros, and prints
the measured log-log flatness order next to the expected 2N.
"""

import math
import sys
from pathlib import Path

import numpy as np

from statransport.designer import TransportSpec, build_trajectory
from statransport.evaluator import excitation_curve, flatness_order

TF = 2.5 * math.pi   # 1.25 trap periods
D = 1.0


def main(outdir: Path) -> None:
    outdir.mkdir(parents=True, exist_ok=True)
    omegas = np.linspace(0.8, 1.2, 401)
    for n in (1, 2, 3):
        p = build_trajectory(TransportSpec(d=D, t_f=TF, freqs=(1.0,) * n))
        curve = excitation_curve(p, omegas)
        curve.to_csv(outdir / f"spectrum_n{n}.csv")
        print(f"N = {n}: flatness order {flatness_order(p, 1.0):.4f} (expect {2 * n})")

        t, x, _, _ = p.sample(1001)
        np.savetxt(outdir / f"trajectory_n{n}.csv",
                   np.column_stack([t, x]), delimiter=",",
                   header="t,x0", comments="")
        print(f"       max |x0/d| = {float(np.max(np.abs(x))) / D:.4f}")
    print(f"wrote curves and trajectories to {outdir}/")


if __name__ == "__main__":
    main(Path(sys.argv[1]) if len(sys.argv) > 1 else Path("out"))
