"""Summation formula defects for a few reference functions.

Prints the theta identity, a Gaussian defect series on the equality surface
and a step-function defect series in the regime where the formula holds.
"""

import numpy as np

from psflab import ParamPoint, classify_psf
from psflab.psf import perturbed_gaussian_pair, psf_defect_series, step_pair, theta_sides
from psflab.stepfn import StepSpec


def main():
    for t in (0.5, 1.0, 2.0):
        a, b = theta_sides(t, 16)
        print(f"theta t={t}: {a:.15f} vs {b:.15f}  diff={abs(a - b):.1e}")

    eq = ParamPoint.parse("2,2,1,1")
    print(f"\n{eq}: {classify_psf(eq).tag.value}")
    pair = perturbed_gaussian_pair(1.0, lam=0.3, shift=0.25)
    print(psf_defect_series(pair, eq, [4, 16, 64, 256]).to_csv())

    holds = ParamPoint.parse("2,2,2,2")
    k = np.arange(1025)
    spec = StepSpec((k + 1.0) ** -2.75, 1.0 + k ** 0.5)
    series = psf_defect_series(step_pair(spec), holds, [16, 32, 64, 128, 256])
    print(f"{holds}: {classify_psf(holds).tag.value}")
    for n, _, _, _, d in series.rows:
        print(f"  N={n:4d}  defect={d:+.3e}")


if __name__ == "__main__":
    main()
