"""The basis polytope of a vector matroid.

A tuple of reciprocal exponents ``theta`` lies in the polytope iff it sits in
the unit cube, on the hyperplane ``sum(theta) == k``, and satisfies
``sum(theta[i] for i in S) <= rank(S)`` for every flat ``S``.  Testing flats
is enough: closing a set adds non-negative terms to the left side and leaves
the right side alone.

All comparisons are exact.  Sums are taken in integers after clearing the
common denominator of ``theta``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Sequence, Union

import numpy as np

from .errors import DimensionError, DomainError
from .exact_linalg import ExactMatrix, determinant, format_rational, to_rational
from .matroid import VectorMatroid, indices_of, popcount

__all__ = [
    "ExponentTuple",
    "RankViolation",
    "HyperplaneViolation",
    "BoxViolation",
    "MembershipVerdict",
    "membership",
    "margin",
    "vertices",
    "bl_constant",
    "basis_substitution",
    "indicator",
]


@dataclass(frozen=True)
class ExponentTuple:
    """Reciprocal Lebesgue exponents ``theta_i = 1/p_i``.

    ``lorentz_q`` optionally carries the secondary Lorentz indices; ``inf``
    (a float) is allowed there.  They do not enter membership.
    """

    theta: tuple[Fraction, ...]
    lorentz_q: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "theta", tuple(to_rational(t) for t in self.theta))
        if self.lorentz_q is not None:
            q = tuple(self.lorentz_q)
            if len(q) != len(self.theta):
                raise DimensionError("lorentz_q must have one entry per exponent")
            for x in q:
                if not x > 0:
                    raise ValueError("Lorentz indices must be positive")
            object.__setattr__(self, "lorentz_q", q)

    def __len__(self):
        return len(self.theta)

    def to_json(self) -> list[str]:
        return [format_rational(t) for t in self.theta]


ThetaLike = Union[ExponentTuple, Sequence]


def _as_theta(theta: ThetaLike) -> tuple[Fraction, ...]:
    if isinstance(theta, ExponentTuple):
        return theta.theta
    return tuple(to_rational(t) for t in theta)


def indicator(mask: int, m: int) -> ExponentTuple:
    """The 0/1 tuple of a subset."""
    return ExponentTuple(tuple(Fraction((mask >> i) & 1) for i in range(m)))


@dataclass(frozen=True)
class RankViolation:
    subset: int
    rank: int
    theta_sum: Fraction

    def to_json(self) -> dict:
        return {
            "kind": "rank",
            "subset": indices_of(self.subset),
            "rank": self.rank,
            "theta_sum": format_rational(self.theta_sum),
        }


@dataclass(frozen=True)
class HyperplaneViolation:
    total: Fraction
    k: int

    def to_json(self) -> dict:
        return {"kind": "hyperplane", "sum": format_rational(self.total), "k": self.k}


@dataclass(frozen=True)
class BoxViolation:
    index: int
    value: Fraction

    def to_json(self) -> dict:
        return {"kind": "box", "index": self.index, "value": format_rational(self.value)}


Violation = Union[RankViolation, HyperplaneViolation, BoxViolation]


@dataclass(frozen=True)
class MembershipVerdict:
    member: bool
    margin: Fraction | None = None
    violation: Violation | None = None

    def __bool__(self):
        return self.member

    def to_json(self) -> dict:
        if self.member:
            return {"member": True, "margin": format_rational(self.margin)}
        return {"member": False, "violation": self.violation.to_json()}


def _flat_sums(M: VectorMatroid, theta: tuple[Fraction, ...]) -> tuple[np.ndarray, np.ndarray, int]:
    """Exact flat sums scaled by the common denominator ``D``.

    Returns ``(sums, ranks * D, D)`` aligned with ``M.flat_table()``.
    """
    ranks, inc = M.flat_table()
    denom = lcm(*(t.denominator for t in theta))
    scaled = [t.numerator * (denom // t.denominator) for t in theta]
    bound = max(abs(x) for x in scaled) * M.m + max(M.k, 1) * denom
    if bound < 2**62:
        sums = inc @ np.array(scaled, dtype=np.int64)
        caps = ranks * denom
    else:
        sums = inc.astype(object) @ np.array(scaled, dtype=object)
        caps = ranks.astype(object) * denom
    return sums, caps, denom


def _check_length(M: VectorMatroid, theta: tuple) -> None:
    if len(theta) != M.m:
        raise DimensionError(f"theta has length {len(theta)} but the matroid has {M.m} elements")


def membership(M: VectorMatroid, theta: ThetaLike) -> MembershipVerdict:
    """Decide whether ``theta`` lies in the basis polytope of ``M``.

    Constraints are checked in a fixed order (box, hyperplane, then flats
    in :meth:`VectorMatroid.flats_with_rank` order) and the first violated
    one is returned as the certificate.  Members carry their margin.
    """
    th = _as_theta(theta)
    _check_length(M, th)
    for i, t in enumerate(th):
        if t < 0 or t > 1:
            return MembershipVerdict(False, violation=BoxViolation(i, t))
    total = sum(th, Fraction(0))
    if total != M.k:
        return MembershipVerdict(False, violation=HyperplaneViolation(total, M.k))
    sums, caps, denom = _flat_sums(M, th)
    bad = np.nonzero(sums > caps)[0]
    if len(bad):
        row = int(bad[0])
        mask, rk = M.flats_with_rank()[row]
        return MembershipVerdict(
            False, violation=RankViolation(mask, rk, Fraction(int(sums[row]), denom))
        )
    return MembershipVerdict(True, margin=_margin_on_hyperplane(M, th, sums, caps, denom))


def _margin_on_hyperplane(M, th, sums, caps, denom) -> Fraction:
    flats = M.flats_with_rank()
    slack = caps - sums
    proper = np.array([0 < mask < M.ground for mask, _ in flats], dtype=bool)
    best = min(min(th), min(1 - t for t in th))
    if proper.any():
        best = min(best, Fraction(int(slack[proper].min()), denom))
    return best


def margin(M: VectorMatroid, theta: ThetaLike) -> Fraction:
    """Exact distance-like slack of ``theta`` inside the hyperplane slice.

    Minimum over proper nonempty flats of ``rank(S) - sum_S theta``, and over
    the box constraints.  Positive means relative interior, zero means
    boundary, negative means outside.  Only defined on ``sum(theta) == k``.
    """
    th = _as_theta(theta)
    _check_length(M, th)
    total = sum(th, Fraction(0))
    if total != M.k:
        raise DomainError(f"margin is defined only on the hyperplane sum = {M.k}; got sum {total}")
    sums, caps, denom = _flat_sums(M, th)
    return _margin_on_hyperplane(M, th, sums, caps, denom)


def vertices(M: VectorMatroid) -> list[ExponentTuple]:
    """Indicator tuples of all bases, in basis enumeration order."""
    return [indicator(b, M.m) for b in M.enumerate_bases()]


def _basis_matrix(M: VectorMatroid, mask: int) -> ExactMatrix:
    return ExactMatrix.from_rows([M.vectors[i] for i in indices_of(mask)], cols=M.k)


def bl_constant(M: VectorMatroid, ell: int) -> Fraction:
    """``max |det B|^(-ell)`` over the bases ``B`` of ``M``."""
    if ell < 1:
        raise ValueError("ell must be a positive integer")
    best = None
    for b in M.enumerate_bases():
        c = abs(determinant(_basis_matrix(M, b))) ** -ell
        if best is None or c > best:
            best = c
    return best


def basis_substitution(M: VectorMatroid, basis: int, ell: int) -> tuple[ExactMatrix, Fraction]:
    """Change-of-variables matrix of a basis and its bound coefficient.

    The matrix has the basis vectors as rows (ground-set order).  Replacing
    ``x`` by ``y = B x`` on ``R^(k*ell)`` has Jacobian ``|det B|^ell``, so the
    form is bounded by ``|det B|^(-ell)`` times the matching norms.
    """
    if ell < 1:
        raise ValueError("ell must be a positive integer")
    if popcount(basis) != M.k or M.rank_of(basis) != M.k:
        raise DomainError(f"subset {indices_of(basis)} is not a basis of Q^{M.k}")
    mat = _basis_matrix(M, basis)
    return mat, abs(determinant(mat)) ** -ell
