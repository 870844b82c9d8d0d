"""Norms of the divergence family on the equality surface.

The weighted norms of ``F_N`` stay flat in ``N`` while the integer sums grow,
which is how the formula fails there without a coupled truncation.
"""

import math

from psflab import ParamPoint, default_kernel
from psflab.counterexamples import absolute_mass, mainth3_family, mainth3_params
from psflab.norms import F_norm, WeightSpec, fourier_norm, sbp_bound_2


def main():
    point = ParamPoint.parse("2,2,1,1")
    params = mainth3_params(point)
    print(f"{point}: A={params.A} B={params.B}")
    kernel = default_kernel()
    print(f"{'N':>6} {'|F|x|^a|_p':>12} {'|Fhat (1+|xi|)^b|_q':>20} {'bound2':>10} {'mass':>8}")
    for e in range(6, 11):
        N = 2 ** e
        spec = mainth3_family(point, N)
        f = F_norm(spec, kernel, WeightSpec.power(1), 2, rtol=1e-7).value
        g = fourier_norm(spec, kernel, WeightSpec.shifted(1), 2).value
        b = sbp_bound_2(spec, 1, 2)
        print(f"{N:6d} {f:12.6f} {g:20.6f} {b:10.4f} {absolute_mass(spec):8.4f}"
              f"   loglogN^(1/2)={math.sqrt(math.log(math.log(N))):.4f}")


if __name__ == "__main__":
    main()
