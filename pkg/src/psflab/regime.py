"""Exact classification of weighted-norm parameter points.

A point ``(p, q, alpha, beta)`` describes the space of functions with
``||f |x|^alpha||_p + ||fhat |xi|^beta||_q < inf``.  Everything here is done
in :class:`fractions.Fraction` arithmetic so that the boundary surface
``(alpha - 1/p')(beta - 1/q') = 1/(pq)`` is decided without tolerances.

Infinite exponents are represented by the singleton :data:`INF`, never by a
float.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Union

import numpy as np


class _Infinity:
    """Tag for an infinite Lebesgue exponent."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __str__(self):
        return "inf"

    def __reduce__(self):
        return (_Infinity, ())

    def __float__(self):
        return math.inf


INF = _Infinity()

ExtRational = Union[Fraction, _Infinity]


def as_fraction(value) -> Fraction:
    """Convert ints, strings like ``"3/4"`` and floats (via repr) to Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not exponents")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"{value!r} is not a finite rational")
        return Fraction(repr(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as a rational")


def as_ext(value) -> ExtRational:
    """Like :func:`as_fraction` but also accepts ``INF``, ``"inf"`` and ``math.inf``."""
    if value is INF:
        return INF
    if isinstance(value, str) and value.strip().lower() in ("inf", "infinity", "oo"):
        return INF
    if isinstance(value, float) and value == math.inf:
        return INF
    return as_fraction(value)


def is_inf(e) -> bool:
    return e is INF


def reciprocal(e: ExtRational) -> Fraction:
    """``1/e`` with the convention ``1/inf = 0``."""
    if e is INF:
        return Fraction(0)
    if e == 0:
        raise ZeroDivisionError("exponent 0")
    return 1 / e


def conjugate(e) -> ExtRational:
    """Hoelder conjugate: ``1/e + 1/e' = 1`` with ``1' = inf`` and ``inf' = 1``."""
    e = as_ext(e)
    if e is INF:
        return Fraction(1)
    if e < 1:
        raise ValueError(f"Hoelder exponent must be >= 1, got {e}")
    if e == 1:
        return INF
    return e / (e - 1)


def to_float(e) -> float:
    """Float view of an extended rational (``INF -> math.inf``)."""
    e = as_ext(e)
    return math.inf if e is INF else float(e)


def format_ext(e) -> str:
    """Serialize as ``"num/den"`` or ``"inf"``."""
    if e is INF:
        return "inf"
    e = as_fraction(e)
    return f"{e.numerator}/{e.denominator}"


@dataclass(frozen=True)
class ParamPoint:
    p: ExtRational
    q: ExtRational
    alpha: Fraction
    beta: Fraction

    def __post_init__(self):
        object.__setattr__(self, "p", as_ext(self.p))
        object.__setattr__(self, "q", as_ext(self.q))
        object.__setattr__(self, "alpha", as_fraction(self.alpha))
        object.__setattr__(self, "beta", as_fraction(self.beta))
        for name in ("p", "q"):
            e = getattr(self, name)
            if e is not INF and e < 1:
                raise ValueError(f"{name} must be >= 1, got {e}")

    @classmethod
    def parse(cls, text: str) -> "ParamPoint":
        """Parse ``"p,q,alpha,beta"``, e.g. ``"2,2,1,1"`` or ``"inf,2,3/2,1"``."""
        parts = [s for s in text.replace(" ", "").split(",")]
        if len(parts) != 4:
            raise ValueError(f"expected p,q,alpha,beta; got {text!r}")
        return cls(*parts)

    @property
    def alpha_excess(self) -> Fraction:
        """``alpha - 1/p'``."""
        return self.alpha - reciprocal(conjugate(self.p))

    @property
    def beta_excess(self) -> Fraction:
        """``beta - 1/q'``."""
        return self.beta - reciprocal(conjugate(self.q))

    @property
    def admissible(self) -> bool:
        return self.alpha_excess > 0 and self.beta_excess > 0

    @property
    def product(self) -> Fraction:
        return self.alpha_excess * self.beta_excess

    def swapped(self) -> "ParamPoint":
        return ParamPoint(self.q, self.p, self.beta, self.alpha)

    def as_dict(self) -> dict:
        return {
            "p": format_ext(self.p),
            "q": format_ext(self.q),
            "alpha": format_ext(self.alpha),
            "beta": format_ext(self.beta),
        }

    def __str__(self):
        return ",".join(format_ext(v) for v in (self.p, self.q, self.alpha, self.beta))


class Relation(enum.Enum):
    BELOW = "Below"
    EQUAL = "Equal"
    ABOVE = "Above"


def _relation(lhs: Fraction, rhs: Fraction) -> Relation:
    if lhs < rhs:
        return Relation.BELOW
    if lhs > rhs:
        return Relation.ABOVE
    return Relation.EQUAL


@dataclass(frozen=True)
class ProductPosition:
    lhs: Fraction
    threshold_psf: Fraction
    threshold_abs: Fraction
    relation_psf: Relation
    relation_abs: Relation


def product_position(point: ParamPoint) -> ProductPosition:
    inv_p = reciprocal(point.p)
    inv_q = reciprocal(point.q)
    lhs = point.product
    t_psf = inv_p * inv_q
    t_abs = max(t_psf, inv_p / 2)
    return ProductPosition(lhs, t_psf, t_abs, _relation(lhs, t_psf), _relation(lhs, t_abs))


class PsfTag(enum.Enum):
    HOLDS = "Holds"
    HOLDS_EQUALITY_11 = "HoldsEquality11"
    CONDITIONAL_EQUALITY = "ConditionalEquality"
    FAILS = "Fails"
    INADMISSIBLE = "Inadmissible"


class AbsTag(enum.Enum):
    ABSOLUTELY_CONVERGES = "AbsolutelyConverges"
    MAY_DIVERGE = "MayDiverge"
    INADMISSIBLE = "Inadmissible"


@dataclass(frozen=True)
class PsfVerdict:
    tag: PsfTag
    gamma: Optional[Fraction] = None

    def __post_init__(self):
        if self.tag is PsfTag.CONDITIONAL_EQUALITY:
            if self.gamma is None or self.gamma <= 0:
                raise ValueError("ConditionalEquality needs gamma > 0")
        elif self.gamma is not None:
            raise ValueError(f"{self.tag.value} carries no gamma")

    def as_dict(self) -> dict:
        out = {"tag": self.tag.value}
        if self.gamma is not None:
            out["gamma"] = format_ext(self.gamma)
            out["gamma_source"] = "derived-from-proof"
        return out


def _is_11(point: ParamPoint) -> bool:
    return point.p == 1 and point.q == 1


def _gamma(point: ParamPoint) -> Fraction:
    return point.alpha_excess / reciprocal(point.p)


def classify_psf(point: ParamPoint) -> PsfVerdict:
    """Regime of the Poisson summation formula for the whole space at ``point``."""
    if not point.admissible:
        return PsfVerdict(PsfTag.INADMISSIBLE)
    rel = product_position(point).relation_psf
    if rel is Relation.ABOVE:
        return PsfVerdict(PsfTag.HOLDS)
    if rel is Relation.BELOW:
        return PsfVerdict(PsfTag.FAILS)
    if _is_11(point):
        return PsfVerdict(PsfTag.HOLDS_EQUALITY_11)
    return PsfVerdict(PsfTag.CONDITIONAL_EQUALITY, _gamma(point))


def gamma_exponent(point: ParamPoint) -> Fraction:
    """Exponent with ``P_N(f) - P_{N^gamma}(fhat) -> 0`` on the equality surface.

    Taken from the coupling ``M = ceil(N^((1/p)/(alpha - 1/p')))`` used to
    prove convergence there; only the existence of such an exponent is
    asserted by the theorem itself.
    """
    verdict = classify_psf(point)
    if verdict.tag is not PsfTag.CONDITIONAL_EQUALITY:
        raise ValueError(
            f"gamma is only defined on the conditional-equality surface; "
            f"{point} is {verdict.tag.value}"
        )
    gamma = _gamma(point)
    # the two expressions for the coupling exponent agree on this surface
    assert gamma == reciprocal(point.q) / point.beta_excess
    return gamma


def classify_abs(point: ParamPoint) -> AbsTag:
    """Whether ``sum_n |f(n)| < inf`` for every ``f`` in the space."""
    if not point.admissible:
        return AbsTag.INADMISSIBLE
    pos = product_position(point)
    if pos.relation_abs is Relation.ABOVE:
        return AbsTag.ABSOLUTELY_CONVERGES
    if _is_11(point) and pos.lhs == 1:
        return AbsTag.ABSOLUTELY_CONVERGES
    return AbsTag.MAY_DIVERGE


def classify_abs_two_sided(point: ParamPoint) -> AbsTag:
    """Whether both ``sum |f(n)|`` and ``sum |fhat(n)|`` are finite for every ``f``."""
    if not point.admissible:
        return AbsTag.INADMISSIBLE
    inv_p = reciprocal(point.p)
    inv_q = reciprocal(point.q)
    if _is_11(point):
        ok = point.alpha * point.beta >= 1
    else:
        ok = point.product > max(inv_p * inv_q, inv_p / 2, inv_q / 2)
    return AbsTag.ABSOLUTELY_CONVERGES if ok else AbsTag.MAY_DIVERGE


SAMPLE_EXPONENTS = ("1", "3/2", "2", "3", "4", "inf")


def seeded_points(tag: PsfTag, count: int, seed: int,
                  accept: Optional[Callable[[ParamPoint], bool]] = None,
                  grid: int = 8, max_weight: Fraction = Fraction(5)) -> list[ParamPoint]:
    """``count`` distinct reproducible points of regime ``tag``.

    ``p`` and ``q`` are drawn from :data:`SAMPLE_EXPONENTS`, the weight
    exponents from the multiples of ``1/grid`` up to ``max_weight``; points
    rejected by ``accept`` are skipped.
    """
    rng = np.random.default_rng(seed)
    top = int(max_weight * grid)
    out: list[ParamPoint] = []
    seen = set()
    for _ in range(100_000):
        if len(out) == count:
            return out
        p, q = rng.choice(SAMPLE_EXPONENTS, 2)
        a, b = rng.integers(1, top + 1, 2)
        pt = ParamPoint(str(p), str(q), Fraction(int(a), grid), Fraction(int(b), grid))
        if classify_psf(pt).tag is not tag or str(pt) in seen:
            continue
        if accept is None or accept(pt):
            seen.add(str(pt))
            out.append(pt)
    raise RuntimeError(f"found only {len(out)} of {count} points")
