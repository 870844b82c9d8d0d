"""The acceptance suite: fourteen numbered checks with fixed tolerances.

Each check returns a :class:`CriterionResult` holding a pass flag, a few
scalar metrics and one or more CSV tables.  Tables contain no timings, so two
runs with the same seed produce byte-identical CSV bodies whatever the number
of worker threads.
"""

from __future__ import annotations

import csv
import io
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from .bump import PHI_ZERO, default_kernel
from .counterexamples import mainth3_family
from .norms import (
    WeightSpec,
    F_norm,
    fourier_norm,
    hardy_littlewood_bound,
    sbp_bound_1,
    sbp_bound_2,
    sbp_bound_3,
    torus_norm,
)
from .psf import (
    dirichlet_tail_bound,
    perturbed_gaussian_pair,
    psf_defect_series,
    step_pair,
    theta_sides,
    weighted_sum_Q,
)
from .quadrature import gauss_legendre_panels
from .regime import (
    ParamPoint,
    PsfTag,
    classify_abs,
    classify_abs_two_sided,
    classify_psf,
    conjugate,
    format_ext,
    seeded_points,
    to_float,
)
from .signsearch import (
    SignSearchProblem,
    expectation_ratio,
    khintchine_objective,
    random_signs,
    search_signs,
)
from .stepfn import StepSpec, integer_values, spike_defects
from .weights import Verdict, convergence_margin, power_weight_pair, verdict

SUITES = ("primary",)


# -- plumbing ------------------------------------------------------------------------


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    metrics: dict = field(default_factory=dict)
    tables: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        shown = ", ".join(f"{k}={_fmt(v)}" for k, v in self.metrics.items())
        return f"[{flag}] {self.number:2d} {self.title}: {shown}"


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def csv_text(header: Sequence[str], rows) -> str:
    """Locale-independent CSV; floats use ``repr`` so values round-trip."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


@dataclass(frozen=True)
class RunContext:
    seed: int = 0
    threads: int = 1

    def rng(self, *key: int) -> np.random.Generator:
        return np.random.default_rng(np.random.SeedSequence([self.seed, *key]))

    def map(self, fn: Callable, items: Sequence) -> list:
        """Ordered map; results do not depend on the thread count."""
        items = list(items)
        if self.threads <= 1 or len(items) < 2:
            return [fn(x) for x in items]
        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            return list(pool.map(fn, items))


def spread_about_center(values) -> float:
    """Largest relative distance of ``values`` from their geometric mean."""
    v = np.asarray(values, dtype=float)
    center = math.exp(float(np.mean(np.log(v))))
    return float(np.max(np.abs(v / center - 1.0)))


def loglog_slope(x, y) -> float:
    return float(np.polyfit(np.log(np.asarray(x, float)), np.log(np.asarray(y, float)), 1)[0])


# -- 1: theta identity -----------------------------------------------------------------


def theta_identity(ctx: RunContext) -> CriterionResult:
    t0 = time.perf_counter()
    rows = []
    for t in (0.5, 1.0, 2.0):
        a, b = theta_sides(t, 16)
        rows.append((t, a, b, abs(a - b)))
    secs = time.perf_counter() - t0
    worst = max(r[3] for r in rows)
    return CriterionResult(1, "theta identity", worst <= 1e-10 and secs < 1.0,
                           {"max_abs_diff": worst, "seconds": secs},
                           {"theta": csv_text(("t", "lhs", "rhs", "abs_diff"), rows)})


# -- 2: regime table ---------------------------------------------------------------------

P, H, H11, CE, F, I = ("Holds", "HoldsEquality11", "ConditionalEquality", "Fails", "Inadmissible",
                       None)
AC, MD, IN = "AbsolutelyConverges", "MayDiverge", "Inadmissible"

# (point, psf tag, gamma, one-sided abs, two-sided abs); checked by hand
REGIME_TABLE = (
    ("inf,inf,2,2", "Holds", None, AC, AC),
    ("1,1,2,1/2", "HoldsEquality11", None, AC, AC),
    ("2,2,1,1", "ConditionalEquality", "1/1", MD, MD),
    ("2,2,3/4,3/4", "Fails", None, MD, MD),
    ("1,2,1,1", "ConditionalEquality", "1/1", MD, MD),
    ("2,2,2,2", "Holds", None, AC, AC),
    ("1,1,1,1", "HoldsEquality11", None, AC, AC),
    ("2,4,2,2", "Holds", None, AC, AC),
    ("2,4,1,1", "ConditionalEquality", "1/1", MD, MD),
    ("2,2,2,2/3", "ConditionalEquality", "3/1", MD, MD),
    ("1,inf,1,2", "Holds", None, AC, AC),
    ("1,inf,1/4,5/4", "Holds", None, MD, MD),
    ("inf,1,1/2,1/2", "Inadmissible", None, IN, IN),
    ("2,2,1/2,1", "Inadmissible", None, IN, IN),
    ("1,1,1/2,1", "Fails", None, MD, MD),
    ("1,1,3,1", "Holds", None, AC, AC),
    ("1,1,1/2,3", "Holds", None, AC, AC),
    ("3,3/2,1,1", "ConditionalEquality", "1/1", MD, MD),
    ("4,4,1,1", "ConditionalEquality", "1/1", MD, MD),
    ("4,2,2,1", "Holds", None, AC, AC),
    ("2,1,1,1/4", "Fails", None, MD, MD),
    ("inf,2,3/2,1", "Holds", None, AC, MD),
    ("3/2,3,2,1", "Holds", None, AC, AC),
    ("2,1,3/2,1/2", "ConditionalEquality", "2/1", MD, MD),
)
del P, H, H11, CE, F, I


def regime_table(ctx: RunContext) -> CriterionResult:
    rows, mismatches = [], 0
    for text, tag, gamma, one, two in REGIME_TABLE:
        pt = ParamPoint.parse(text)
        v = classify_psf(pt)
        got = (v.tag.value, None if v.gamma is None else format_ext(v.gamma),
               classify_abs(pt).value, classify_abs_two_sided(pt).value)
        ok = got == (tag, gamma, one, two)
        mismatches += not ok
        rows.append((str(pt), *[g if g is not None else "" for g in got], int(ok)))
    n_eq = sum(1 for r in REGIME_TABLE if r[1] in ("HoldsEquality11", "ConditionalEquality"))
    return CriterionResult(2, "regime classifier table", mismatches == 0,
                           {"points": len(REGIME_TABLE), "equality_points": n_eq,
                            "mismatches": mismatches},
                           {"regime": csv_text(("point", "psf", "gamma", "abs", "abs_two_sided",
                                                "match"), rows)})


# -- 3: bump consistency -----------------------------------------------------------------


def bump_consistency(ctx: RunContext) -> CriterionResult:
    k = default_kernel()
    x, w = gauss_legendre_panels(0.0, k.xmax, int(8 * k.xmax), order=16)
    phi = k.phi(x)
    xi = np.linspace(-2.0, 2.0, 161)
    # phi is even: phihat(xi) = 2 int_0^inf phi(x) cos(2 pi x xi) dx
    numeric = 2.0 * (np.cos(2 * np.pi * np.outer(xi, x)) @ (w * phi))
    err = float(np.max(np.abs(numeric - k.phihat(xi))))
    phi0 = float(k.phi(0.0))
    plateau = bool(np.all(k.phihat(np.linspace(-0.5, 0.5, 101)) == 1.0))
    support = bool(np.all(k.phihat(np.concatenate([np.linspace(1, 3, 101),
                                                   -np.linspace(1, 3, 101)])) == 0.0))
    ok = err <= 1e-8 and abs(phi0 - PHI_ZERO) <= 1e-10 and plateau and support
    rows = [(a, b, c) for a, b, c in zip(xi, numeric, k.phihat(xi))]
    return CriterionResult(3, "bump self-consistency", ok,
                           {"max_transform_err": err, "phi0_err": abs(phi0 - PHI_ZERO),
                            "plateau_exact": plateau, "support_exact": support},
                           {"bump": csv_text(("xi", "quadrature", "phihat"), rows)})


# -- 4: step-function bounds -------------------------------------------------------------

SUITE_EXPONENTS = ("1", "3/2", "2", "3", "4")
MAX_SCALE_EXPONENT = 3.9


@dataclass(frozen=True)
class BoundCase:
    index: int
    spec: StepSpec
    B: float
    p: object
    q: object
    alpha: float
    beta: float
    nu: float


def random_bound_case(rng: np.random.Generator, index: int, n_max: int = 128) -> BoundCase:
    """Scales ``1 + k^B`` with ``B`` in ``[1/4, 3.9]``, uniform coefficients in ``[-1, 1]``."""
    N = int(rng.integers(4, n_max + 1))
    B = float(rng.uniform(0.25, MAX_SCALE_EXPONENT))
    c = rng.uniform(-1.0, 1.0, N + 1)
    k = np.arange(N + 1, dtype=float)
    p, q = (Fraction(s) for s in rng.choice(SUITE_EXPONENTS, 2))
    alpha = float(rng.uniform(0.0, 2.0))
    beta = float(rng.uniform(0.0, 2.0))
    inv_qp = float(1 - 1 / q)
    nu = inv_qp + 0.5 + float(rng.uniform(0.0, 1.0))
    return BoundCase(index, StepSpec(c, 1.0 + k ** B), B, p, q, alpha, beta, nu)


def bound_ratios(case: BoundCase) -> tuple:
    k = default_kernel()
    s = case.spec
    m1 = F_norm(s, k, WeightSpec.shifted(case.alpha), case.p, rtol=1e-7)
    m2 = fourier_norm(s, k, WeightSpec.shifted(case.beta), case.q, "F", rtol=1e-8)
    qp = conjugate(case.q)
    m3 = fourier_norm(s, k, WeightSpec.shifted(-case.nu), qp, "G", rtol=1e-8)
    b1 = sbp_bound_1(s, case.alpha, case.p)
    b2 = sbp_bound_2(s, case.beta, case.q)
    b3 = sbp_bound_3(s, case.nu, case.q)
    return (m1.value, b1, m2.value, b2, m3.value, b3)


BOUND_CASES = 200
BOUND_STABILITY = 0.20


def step_bounds(ctx: RunContext, cases: int = BOUND_CASES) -> CriterionResult:
    t0 = time.perf_counter()
    specs = [random_bound_case(ctx.rng(4, i), i) for i in range(cases)]
    vals = ctx.map(bound_ratios, specs)
    r = np.array([[v[0] / v[1], v[2] / v[3], v[4] / v[5]] for v in vals])
    half = cases // 2
    C = r.max(axis=0)
    Ca, Cb = r[:half].max(axis=0), r[half:].max(axis=0)
    spread = [spread_about_center([a, b]) for a, b in zip(Ca, Cb)]
    secs = time.perf_counter() - t0
    ok = all(s <= BOUND_STABILITY for s in spread) and secs < 300
    rows = [(c.index, c.spec.N, c.B, format_ext(c.p), format_ext(c.q), c.alpha, c.beta, c.nu, *v)
            for c, v in zip(specs, vals)]
    metrics = {f"C{i + 1}": float(C[i]) for i in range(3)}
    metrics.update({f"spread{i + 1}": spread[i] for i in range(3)})
    metrics["seconds"] = secs
    header = ("index", "N", "B", "p", "q", "alpha", "beta", "nu",
              "F_norm", "bound1", "Fhat_norm", "bound2", "Ghat_norm", "bound3")
    return CriterionResult(4, "step-function bound suite", ok, metrics,
                           {"bounds": csv_text(header, rows)})


# -- 5: spike bound ----------------------------------------------------------------------

EQUALITY_POINT = "2,2,1,1"


def spike_bound(ctx: RunContext, N: int = 2 ** 10, M: int = 6) -> CriterionResult:
    k = default_kernel()
    spec = mainth3_family(ParamPoint.parse(EQUALITY_POINT), N)
    sd = spike_defects(spec, k, M)
    n, vals = integer_values(spec, k)
    mass = PHI_ZERO * math.fsum((spec.c * spec.delta).tolist())
    total = math.fsum(vals.tolist())
    window = math.fsum(vals[(n >= 0) & (n <= N)].tolist())
    ratio = total / mass
    ok = sd.holds and 0.98 <= ratio <= 1.02
    rows = list(zip(sd.n, sd.defect, sd.bound))
    return CriterionResult(5, "spike bound and mass", ok,
                           {"spikes_hold": sd.holds,
                            "max_defect_over_bound": float(np.max(sd.defect / sd.bound)),
                            "mass_ratio": ratio, "mass_ratio_0_to_N": window / mass},
                           {"spikes": csv_text(("n", "defect", "bound"), rows)})


# -- 6: uniform boundedness of Q_N -------------------------------------------------------

Q_FUNCTIONS = 20
Q_N_LIST = tuple(2 ** e for e in range(4, 12))


def _unit_function(args):
    """Signed step function with ``|c_k| ~ (k+1)^-a`` and ``Delta_k = 1 + k^B``.

    ``a > (3B + 2)/2`` keeps the Fourier-side weighted norm finite without
    the truncation, so the function is a typical element of the space rather
    than a cut-off of one whose weighted sums are still growing.
    """
    rng_seed, index = args
    rng = np.random.default_rng(rng_seed)
    n = int(rng.integers(128, 513))
    B = float(rng.uniform(0.25, 1.0))
    a = (3.0 * B + 2.0) / 2.0 + float(rng.uniform(0.1, 0.5))
    kk = np.arange(n + 1, dtype=float)
    c = rng.choice([-1.0, 1.0], n + 1) * rng.uniform(0.5, 1.5, n + 1) * (kk + 1.0) ** (-a)
    spec = StepSpec(c, 1.0 + kk ** B)
    kernel = default_kernel()
    norm = (F_norm(spec, kernel, WeightSpec.power(1), 2, rtol=1e-7).value
            + fourier_norm(spec, kernel, WeightSpec.power(1), 2, "F", rtol=1e-8).value)
    grid, vals = integer_values(spec, kernel)
    table = dict(zip(grid.tolist(), (vals / norm).tolist()))
    f = lambda x: np.array([table.get(int(v), 0.0) for v in np.asarray(x)])
    Q = [weighted_sum_Q(f, lambda k: k, 1, N) for N in Q_N_LIST]
    return index, n, B, norm, Q


def q_boundedness(ctx: RunContext) -> CriterionResult:
    seeds = [np.random.SeedSequence([ctx.seed, 6, i]) for i in range(Q_FUNCTIONS)]
    res = ctx.map(_unit_function, list(zip(seeds, range(Q_FUNCTIONS))))
    Q = np.abs(np.array([r[4] for r in res]))
    worst = Q.max(axis=0)
    slope = loglog_slope(Q_N_LIST, worst)
    ok = slope < 0.05 and bool(np.all(np.isfinite(worst)))
    rows = [(r[0], r[1], r[2], r[3], *r[4]) for r in res]
    header = ("index", "spec_N", "B", "norm", *[f"Q_{N}" for N in Q_N_LIST])
    return CriterionResult(6, "Q_N uniform boundedness", ok,
                           {"max_abs_Q": float(worst.max()), "slope": slope},
                           {"qn": csv_text(header, rows)})


# -- 7: defects in the Holds regime ------------------------------------------------------

HOLDS_POINT = "2,2,2,2"
DEFECT_N_LIST = (16, 32, 64, 128, 256)


def _holds_pair(args):
    seed, index = args
    rng = np.random.default_rng(seed)
    n = 1024
    a = float(rng.uniform(2.5, 3.0))
    B = float(rng.uniform(0.25, 0.75))
    kk = np.arange(n + 1, dtype=float)
    c = rng.uniform(0.5, 1.5, n + 1) * (kk + 1.0) ** (-a)
    spec = StepSpec(c, 1.0 + kk ** B)
    series = psf_defect_series(step_pair(spec), ParamPoint.parse(HOLDS_POINT), DEFECT_N_LIST,
                               seed=index, family="step")
    return index, a, B, [abs(d) for d in series.defects()]


def holds_defects(ctx: RunContext, pairs: int = 5) -> CriterionResult:
    seeds = [np.random.SeedSequence([ctx.seed, 7, i]) for i in range(pairs)]
    res = ctx.map(_holds_pair, list(zip(seeds, range(pairs))))
    ok = True
    rows = []
    for index, a, B, d in res:
        ups = int(np.sum(np.diff(d) > 0))
        good = ups <= 1 and d[-1] < 0.1 * d[0]
        ok &= good
        rows.append((index, a, B, *d, ups, int(good)))
    header = ("index", "decay", "B", *[f"defect_{N}" for N in DEFECT_N_LIST], "increases", "ok")
    worst = max(r[3 + len(DEFECT_N_LIST) - 1] / r[3] for r in rows)
    return CriterionResult(7, "Holds-regime defect decay", bool(ok),
                           {"worst_final_over_initial": worst},
                           {"defects": csv_text(header, rows)})


# -- 8: equality-regime coupling ---------------------------------------------------------

GAUSSIAN_PERTURBATIONS = ((1.0, 0.5, 0.0), (0.7, -0.3, 0.25), (1.5, 1.0, 0.4), (0.5, 0.2, 1.3))


def equality_coupling(ctx: RunContext) -> CriterionResult:
    pt = ParamPoint.parse(EQUALITY_POINT)
    rows, finals = [], []
    for t, lam, shift in GAUSSIAN_PERTURBATIONS:
        pair = perturbed_gaussian_pair(t, lam, shift)
        s = psf_defect_series(pair, pt, DEFECT_N_LIST, family=pair.name)
        finals.append(abs(s.rows[-1][4]))
        rows += [(pair.name, *r) for r in s.rows]
    worst = max(finals)
    return CriterionResult(8, "equality-regime coupling", worst < 1e-6,
                           {"max_final_defect": worst},
                           {"coupling": csv_text(("pair", "N", "M", "P_N_f", "P_M_fhat", "defect"),
                                                 rows)})


# -- 9: Dirichlet tail -------------------------------------------------------------------

DIRICHLET_CASES = ((1, 2), (2, 1))
DIRICHLET_M = (8, 32, 128)
DIRICHLET_STABILITY = 0.30


def dirichlet_tail(ctx: RunContext) -> CriterionResult:
    rows, ok = [], True
    metrics = {}
    for beta, qp in DIRICHLET_CASES:
        ratios, slopes = [], []
        for M in DIRICHLET_M:
            a = dirichlet_tail_bound(M, 2 * M, beta, qp)
            b = dirichlet_tail_bound(M, 4 * M, beta, qp)
            ratios += [a.ratio, b.ratio]
            slope = math.log(b.left / a.left) / math.log(2.0)
            slopes.append(slope)
            rows += [(beta, qp, M, 2 * M, a.left, a.right), (beta, qp, M, 4 * M, b.left, b.right)]
        spread = spread_about_center(ratios)
        target = -beta + 1.0 / qp
        slope_err = max(abs(s - target) for s in slopes)
        ok &= spread <= DIRICHLET_STABILITY and slope_err <= 0.15
        tag = f"b{beta}q{qp}"
        metrics.update({f"C_{tag}": max(ratios), f"spread_{tag}": spread,
                        f"slope_err_{tag}": slope_err})
    return CriterionResult(9, "Dirichlet tail estimate", bool(ok), metrics,
                           {"dirichlet": csv_text(("beta", "qprime", "M", "N", "left", "right"),
                                                  rows)})


# -- 10: Khintchine suite ----------------------------------------------------------------


def khintchine_suite(ctx: RunContext) -> CriterionResult:
    rng = ctx.rng(10)
    rows = []
    # q = 2: the objective does not depend on the signs
    c = rng.normal(size=17)
    w = rng.uniform(0.1, 1.0, 17)
    prob2 = SignSearchProblem(c, w, 2, trials=16, seed=ctx.seed)
    vals = [khintchine_objective(s, prob2) for s in random_signs(17, 16, ctx.seed)]
    inv_spread = (max(vals) - min(vals)) / max(vals)
    rows.append(("q2_invariance", 2, inv_spread))
    # q = 4, N = 16: Monte Carlo against the exhaustive optimum
    prob4 = SignSearchProblem(c, w, 4, trials=256, seed=ctx.seed)
    mc = search_signs(prob4)
    ex = search_signs(prob4, exhaustive=True)
    gap = mc.objective / ex.objective - 1.0
    rows.append(("mc_over_exhaustive", 4, mc.objective / ex.objective))
    # expectation against the Khintchine constant
    exp_ok = True
    for q in (3, 4, 6):
        cq = rng.normal(size=64)
        r = expectation_ratio(SignSearchProblem(cq, np.ones(64), q, seed=ctx.seed), draws=64)
        rows.append(("expectation_ratio", q, r))
        exp_ok &= r <= 1.10
    ok = inv_spread <= 1e-12 and gap <= 0.05 and exp_ok
    return CriterionResult(10, "Khintchine suite", bool(ok),
                           {"q2_spread": inv_spread, "mc_gap": gap,
                            "max_expectation_ratio": max(r[2] for r in rows[2:])},
                           {"khintchine": csv_text(("check", "q", "value"), rows)})


# -- 11: Hardy-Littlewood ----------------------------------------------------------------

HL_BAND = 8.0


def hardy_littlewood(ctx: RunContext, sequences: int = 100) -> CriterionResult:
    rows = []
    for i in range(sequences):
        rng = ctx.rng(11, i)
        n = int(rng.integers(2, 257))
        c = np.sort(rng.uniform(0.0, 1.0, n) ** float(rng.uniform(0.5, 4.0)))[::-1]
        for q in ("3/2", "2", "3"):
            qf = to_float(Fraction(q))
            r = torus_norm(c, qf).value ** qf / hardy_littlewood_bound(c, qf, "tail") ** qf
            rows.append((i, n, q, r))
    r = np.array([row[3] for row in rows])
    ok = bool(np.all((r >= 1 / HL_BAND) & (r <= HL_BAND)))
    return CriterionResult(11, "Hardy-Littlewood band", ok,
                           {"C": HL_BAND, "min_ratio": float(r.min()), "max_ratio": float(r.max())},
                           {"hardy_littlewood": csv_text(("index", "n", "q", "ratio"), rows)})


# -- 12: counterexample norm flatness ----------------------------------------------------

FAMILY_N_LIST = tuple(2 ** e for e in range(6, 13))


def _family_norms(N: int):
    k = default_kernel()
    pt = ParamPoint.parse(EQUALITY_POINT)
    spec = mainth3_family(pt, N)
    f = F_norm(spec, k, WeightSpec.power(float(pt.alpha)), pt.p, rtol=1e-8).value
    g = fourier_norm(spec, k, WeightSpec.shifted(float(pt.beta)), pt.q, "F", rtol=1e-9).value
    return N, f, g, sbp_bound_2(spec, float(pt.beta), pt.q)


def family_flatness(ctx: RunContext, C2: Optional[float] = None) -> CriterionResult:
    """``C2`` is the global constant of the second bound from the step-function suite."""
    res = ctx.map(_family_norms, FAMILY_N_LIST)
    q = to_float(ParamPoint.parse(EQUALITY_POINT).q)
    N = np.array([r[0] for r in res], dtype=float)
    f = np.array([r[1] for r in res])
    g = np.array([r[2] for r in res])
    b2 = np.array([r[3] for r in res])
    ll = np.log(np.log(N)) ** (1.0 / q)
    slope = loglog_slope(N, f)
    # the majorant constant: C2 times the worst bound-to-loglog ratio over the sweep
    if C2 is None:
        C2 = float(np.max(g / b2))
    majorant = C2 * float(np.max(b2 / ll)) * ll
    ok = slope < 0.05 and bool(np.all(g <= majorant)) and loglog_slope(N, g / ll) < 0.05
    rows = list(zip(N.astype(int), f, g, b2, majorant))
    return CriterionResult(12, "counterexample norm flatness", ok,
                           {"f_norm_slope": slope, "fourier_over_loglog_slope":
                            loglog_slope(N, g / ll), "max_fourier_over_majorant":
                            float(np.max(g / majorant))},
                           {"family": csv_text(("N", "f_norm", "fhat_norm", "bound2", "majorant"),
                                               rows)})


# -- 13: weights checker -----------------------------------------------------------------

WEIGHT_N_LIST = tuple(2 ** e for e in range(4, 11))
WEIGHT_POINTS = 10
# decay margin and scale growth needed for slopes over 2^4..2^10 to separate
# bounded from growing sequences
WEIGHT_MIN_MARGIN = 1.0
WEIGHT_MIN_GROWTH = 0.5
WEIGHT_MIN_SCALE = 0.5


def resolvable_bounded(pt: ParamPoint) -> bool:
    margin, B = convergence_margin(pt)
    return margin >= WEIGHT_MIN_MARGIN and B >= WEIGHT_MIN_SCALE


def resolvable_growing(pt: ParamPoint) -> bool:
    return convergence_margin(pt)[0] <= -WEIGHT_MIN_GROWTH


def _weight_verdict(pt: ParamPoint):
    r = verdict(power_weight_pair(pt), pt.p, pt.q, WEIGHT_N_LIST)
    return pt, r


def weights_consistency(ctx: RunContext) -> CriterionResult:
    t0 = time.perf_counter()
    pts = (seeded_points(PsfTag.HOLDS, WEIGHT_POINTS, ctx.seed, resolvable_bounded)
           + seeded_points(PsfTag.FAILS, WEIGHT_POINTS, ctx.seed, resolvable_growing))
    res = ctx.map(_weight_verdict, pts)
    want = {PsfTag.HOLDS: Verdict.LIKELY_BOUNDED, PsfTag.FAILS: Verdict.GROWING}
    rows, agree = [], 0
    for pt, r in res:
        tag = classify_psf(pt).tag
        ok = r.verdict is want[tag]
        agree += ok
        rows.append((str(pt), tag.value, r.verdict.value,
                     *[s if math.isfinite(s) else "inf" for s in r.slopes], int(ok)))
    secs = time.perf_counter() - t0
    return CriterionResult(13, "weights checker consistency", agree == len(pts) and secs < 300,
                           {"agree": agree, "points": len(pts), "seconds": secs},
                           {"weights": csv_text(("point", "regime", "verdict", "slope1", "slope2",
                                                 "slope3", "slope4", "agree"), rows)})


# -- 14: determinism ---------------------------------------------------------------------


def determinism(first: Sequence[CriterionResult], second: Sequence[CriterionResult],
                threads: tuple[int, int]) -> CriterionResult:
    """Compare the CSV bodies of two runs of criteria 1-13."""
    a = {(r.number, name): body for r in first for name, body in r.tables.items()}
    b = {(r.number, name): body for r in second for name, body in r.tables.items()}
    differ = sorted(f"{n}:{name}" for (n, name) in set(a) | set(b) if a.get((n, name)) != b.get((n, name)))
    rows = [(f"{n}:{name}", int(a.get((n, name)) == b.get((n, name)))) for n, name in sorted(a)]
    return CriterionResult(14, "determinism across thread counts", not differ,
                           {"tables": len(a), "differing": len(differ),
                            "threads": f"{threads[0]}/{threads[1]}"},
                           {"determinism": csv_text(("table", "identical"), rows)})


CRITERIA: dict[int, Callable[[RunContext], CriterionResult]] = {
    1: theta_identity,
    2: regime_table,
    3: bump_consistency,
    4: step_bounds,
    5: spike_bound,
    6: q_boundedness,
    7: holds_defects,
    8: equality_coupling,
    9: dirichlet_tail,
    10: khintchine_suite,
    11: hardy_littlewood,
    12: family_flatness,
    13: weights_consistency,
}


def run_criterion(number: int, ctx: RunContext, previous: Optional[dict] = None) -> CriterionResult:
    t0 = time.perf_counter()
    if number == 12 and previous and 4 in previous:
        res = family_flatness(ctx, previous[4].metrics["C2"])
    else:
        res = CRITERIA[number](ctx)
    res.seconds = time.perf_counter() - t0
    return res


def run_suite(numbers: Optional[Sequence[int]] = None, seed: int = 0, threads: int = 1,
              second_threads: int = 4, report: Optional[Callable[[CriterionResult], None]] = None
              ) -> list[CriterionResult]:
    """Run the checks in order; criterion 14 reruns the others with ``second_threads``."""
    numbers = sorted(set(numbers or range(1, 15)))
    ctx = RunContext(seed, threads)
    done: dict[int, CriterionResult] = {}
    for n in numbers:
        if n == 14:
            continue
        done[n] = run_criterion(n, ctx, done)
        if report:
            report(done[n])
    if 14 in numbers:
        for n in CRITERIA:
            if n not in done:
                done[n] = run_criterion(n, ctx, done)
                if report:
                    report(done[n])
        base = [done[n] for n in sorted(done)]
        ctx2 = RunContext(seed, second_threads)
        again: dict[int, CriterionResult] = {}
        for r in base:
            again[r.number] = run_criterion(r.number, ctx2, again)
        t0 = time.perf_counter()
        res = determinism(base, [again[n] for n in sorted(again)], (threads, second_threads))
        res.seconds = time.perf_counter() - t0
        done[14] = res
        if report:
            report(res)
    return [done[n] for n in sorted(done)]
