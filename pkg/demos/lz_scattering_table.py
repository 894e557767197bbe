"""Tabulate the two-level scattering coefficients against direct integration.

The crossing reduces, in the right variables, to the constant-coupling
system -i u' = [[s, eta],[eta, -s]] u. Its transition amplitude has the
closed form |a(eta)|^2 = e^(-pi eta^2); here the system is also integrated
across a finite horizon and both answers are printed side by side.
"""

import math

from crosswave import numeric_scattering, scattering_coeffs

ETAS = (0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 2.0)
HORIZON = 200.0
DS = 5e-4


def main():
    print(f"horizon S={HORIZON:g}, step ds={DS:g}")
    print(f"{'eta':>6} {'|a|^2 closed':>14} {'|M11|^2 numeric':>16} "
          f"{'abs err':>10} {'unitarity':>10}")
    for eta in ETAS:
        coeffs = scattering_coeffs(eta)
        a_sq = abs(coeffs.a_coeff) ** 2
        b_sq = abs(coeffs.b_coeff) ** 2
        matrix = numeric_scattering(eta, HORIZON, DS)
        numeric = abs(matrix[0, 0]) ** 2
        print(f"{eta:6.2f} {a_sq:14.9f} {numeric:16.9f} "
              f"{abs(numeric - a_sq):10.2e} {abs(a_sq + b_sq - 1.0):10.1e}")
    print()
    print("closed form check at eta=1:", math.exp(-math.pi))


if __name__ == "__main__":
    main()
