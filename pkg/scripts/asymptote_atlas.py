"""Monte-Carlo atlas of qubit flow classes and their contraction rates.

Draws random (omega, g) pairs, classifies the flow, and summarizes the
spectral contraction rate x = |Re sqrt((g - i omega)^2)| per class. The
mean asymptote norm is printed as a checksum: every non-oscillatory flow
collapses onto a pure state, so it should read exactly 1.
"""

import argparse
from collections import defaultdict

import numpy as np

from qdsim.qubit import CaseClass, QubitGeneratorParams, asymptote, classify


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--draws", type=int, default=2000)
    ap.add_argument("--scale", type=float, default=2.0,
                    help="rate components drawn uniformly in [-scale, scale]")
    ap.add_argument("--orthogonal", action="store_true",
                    help="project g onto the plane normal to omega; generic "
                         "draws are tilted almost surely, this exposes the "
                         "remaining classes")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    rates = defaultdict(list)
    norms = defaultdict(list)
    counts = defaultdict(int)
    xi0 = np.zeros(3)
    for _ in range(args.draws):
        w = rng.uniform(-args.scale, args.scale, 3)
        g = rng.uniform(-args.scale, args.scale, 3)
        if args.orthogonal:
            g = g - (g @ w) / (w @ w) * w
        params = QubitGeneratorParams(w, g)
        case = classify(params)
        counts[case] += 1
        rates[case].append(abs(np.sqrt(params.alpha_squared).real))
        tail = asymptote(params, xi0)
        if tail is not None:
            norms[case].append(float(np.linalg.norm(tail)))

    total = sum(counts.values())
    print(f"{'class':<18} {'count':>6} {'share':>7} {'rate min':>10} "
          f"{'median':>8} {'max':>8} {'mean |n_inf|':>13}")
    for case in CaseClass:
        n = counts[case]
        if n == 0:
            print(f"{case.value:<18} {n:>6} {0.0:>7.1%}")
            continue
        arr = np.array(rates[case])
        row = (f"{case.value:<18} {n:>6} {n / total:>7.1%} {arr.min():>10.4f} "
               f"{np.median(arr):>8.4f} {arr.max():>8.4f}")
        if norms[case]:
            row += f" {np.mean(norms[case]):>13.9f}"
        print(row)


if __name__ == "__main__":
    main()
