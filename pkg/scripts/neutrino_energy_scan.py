"""Scan flavor-evolution landmark radii against neutrino energy.

Prints, per energy, the density-crossing radius (where the potential
matches the vacuum splitting) and the instability radius (where it
matches the full precession norm), both in km from the solar center.
"""

import argparse

import numpy as np

from qdsim.errors import NoCrossingError
from qdsim.models.neutrino import NeutrinoConfig, instability_locator, msw_resonance


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--energies", type=float, nargs="+",
                    default=list(np.geomspace(0.002, 0.05, 9)),
                    help="neutrino energies in GeV")
    ap.add_argument("--v-scale", type=float, default=8.019782651241507e-05,
                    help="central potential in neV")
    args = ap.parse_args()

    print(f"{'E [GeV]':>10} {'L_crossing [km]':>16} {'L_onset [km]':>14}")
    for e in args.energies:
        cfg = NeutrinoConfig(energy_gev=e, mode="msw", v_scale=args.v_scale)
        row = [f"{e:10.4f}"]
        try:
            row.append(f"{msw_resonance(cfg):16.0f}")
        except NoCrossingError:
            row.append(f"{'-':>16}")
        try:
            row.append(f"{instability_locator(cfg):14.0f}")
        except NoCrossingError:
            row.append(f"{'-':>14}")
        print(" ".join(row))


if __name__ == "__main__":
    main()
