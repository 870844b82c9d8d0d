"""General-weight verdicts for power weights, and a random sign search."""

import numpy as np

from psflab import ParamPoint, classify_psf
from psflab.signsearch import SignSearchProblem, khintchine_constant, search_signs
from psflab.weights import convergence_margin, power_weight_pair, verdict


def main():
    N_list = [2 ** e for e in range(4, 10)]
    for text in ("2,2,2,2", "inf,inf,2,2", "3,3/2,3,3", "2,2,3/4,3/4", "4,4,7/8,7/8"):
        pt = ParamPoint.parse(text)
        margin, B = convergence_margin(pt)
        rep = verdict(power_weight_pair(pt), pt.p, pt.q, N_list)
        slopes = ", ".join(f"{s:.3f}" for s in rep.slopes)
        print(f"{text:14s} {classify_psf(pt).tag.value:12s} margin={margin:+.2f} "
              f"-> {rep.verdict.value:14s} slopes [{slopes}]")

    c = 1.0 / np.sqrt(np.arange(1, 65))
    prob = SignSearchProblem(c, np.ones(64), 4, trials=64, seed=1)
    res = search_signs(prob)
    print(f"\nq=4 sign search: objective/L2 baseline = {res.ratio:.4f} "
          f"(Khintchine constant {khintchine_constant(4):.4f})")


if __name__ == "__main__":
    main()
