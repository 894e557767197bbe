"""Walk one run through its three descriptions of the solution.

Away from the crossing the packet is a modulated envelope riding the upper
band (outer description); within |t| < t_eps the envelope freezes and each
ray behaves as a driven two-level system (inner description); the hand-off
between the two happens at the matching time, where the envelope supplies
the inner data. This script prints the approximation error of each regime
on its own window for a single epsilon.
"""

import math

import numpy as np

from crosswave import NumericsConfig, derive_scales, run_experiment

EPSILON = 3e-3


def main():
    params = derive_scales(EPSILON, 1.0, 0.05, 2.0, 0.5, 0.1, 1.0)
    num = NumericsConfig(n_points=4096, x_min=-2.0, x_max=2.0,
                         dt=EPSILON / 5.0, ode_dt=1e-4)
    bundle = run_experiment(params, num)
    report = bundle.report

    print(f"epsilon={EPSILON:g}: outer window [-T, -t_eps] = "
          f"[-{params.T:g}, -{params.t_eps:.4f}], inner window "
          f"|s| <= {params.s_eps:.3f}")
    print()
    print("outer regime: packet = envelope x band eigenvector")
    print(f"{'t':>10} {'L2 error':>12} {'eps H1 error':>13}")
    for t, l2, h1 in bundle.outer_series:
        print(f"{t:10.4f} {l2:12.3e} {h1:13.3e}")
    print()
    print("inner regime: per-ray two-level family (rescaled variables)")
    print(f"{'s':>10} {'t = s sqrt(eps)':>16} {'L2 error':>12}")
    for s, err in report.inner_errors:
        print(f"{s:10.4f} {s * math.sqrt(EPSILON):16.5f} {err:12.3e}")
    print()
    slope = np.polyfit([s for s, _ in report.inner_errors],
                       [e for _, e in report.inner_errors], 1)[0]
    print(f"the inner error grows mildly across the window "
          f"(slope {slope:.3f} per unit s); both regimes shrink as "
          f"epsilon -> 0 (see convergence_sweep.py)")
    print(f"transferred fraction {report.p_measured:.4f} vs closed form "
          f"{report.p_theory:.4f}")


if __name__ == "__main__":
    main()
