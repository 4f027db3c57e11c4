"""Tabulate the L1 mollification distance against its closed-form bound.

For each shipped density and a grid of kernel scales t, prints the measured
||f * phi_t - f||_1, the bound 2 sqrt(2) t, their ratio, and (for the
Gaussian) the exact distance for cross-checking the quadrature.
"""

import argparse
import math
import sys

from margauss.gauss import convolve_l1, gaussian_tv_exact, shipped_density


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--ts", type=float, nargs="+", default=[0.02, 0.05, 0.1, 0.2, 0.5])
    args = parser.parse_args(argv)

    print(f"{'density':<10} {'t':>6} {'lhs':>10} {'bound':>10} {'ratio':>7} {'exact':>10}")
    for name in ("uniform", "laplace", "gaussian"):
        dens = shipped_density(name)
        for t in args.ts:
            lhs = convolve_l1(dens, t).distance
            bound = 2.0 * math.sqrt(2.0) * t
            exact = ""
            if name == "gaussian":
                exact = f"{gaussian_tv_exact(1.0, math.sqrt(1 + t * t), 1):10.6f}"
            print(f"{name:<10} {t:6.3f} {lhs:10.6f} {bound:10.6f} {lhs / bound:7.4f} {exact}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
