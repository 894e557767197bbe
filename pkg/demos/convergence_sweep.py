"""Check that both approximation errors shrink as epsilon -> 0.

Runs the matched-physics sweep used by the acceptance gate and fits the
log-log slopes of the outer error (at the matching time) and the inner
error (sup over the crossing window). Pass a comma-separated epsilon list
to try other sweeps; two-decade spans give cleaner fits but cost more.
"""

import sys

import numpy as np

from crosswave import convergence_sweep, derive_scales

DEFAULT_SWEEP = (1e-2, 3e-3, 1e-3)


def main(argv):
    sweep = (tuple(float(v) for v in argv[0].split(","))
             if argv else DEFAULT_SWEEP)
    params = derive_scales(min(sweep), 1.0, 0.05, 2.0, 0.5, 0.1, 1.0)
    print(f"sweep: {', '.join('%g' % e for e in sweep)}  "
          f"(c=1, xi0=2, kappa=0.05, gamma=0.1)")
    outer, inner = convergence_sweep(params, sweep)

    print()
    print(f"{'epsilon':>10} {'outer error':>12} {'inner sup error':>16}")
    for (eps, oe), (_, ie) in zip(outer, inner):
        print(f"{eps:10.4g} {oe:12.4e} {ie:16.4e}")

    for name, pairs, floor in (("outer", outer, params.gamma / 2.0),
                               ("inner", inner, params.gamma / 4.0)):
        slope = np.polyfit(np.log([e for e, _ in pairs]),
                           np.log([v for _, v in pairs]), 1)[0]
        print(f"{name} slope {slope:+.3f}  (acceptance floor {floor:+.3f})")


if __name__ == "__main__":
    main(sys.argv[1:])
