"""The Cauchy-kernel matroid family and checks of its structural lemmas.

For ``n >= 1`` the family has ``m = 4n + 2`` vectors in ``Q^(2n+1)``, in this
fixed order (1-based as usual for ``e_j``; code indices are 0-based)::

    f_(2j-1) = e_j                      j = 1 .. 2n+1
    f_(2j)   = e_j - e_(j+1)            j = 1 .. 2n
    f_(4n+2) = e_1 - e_2 + ... + e_(2n+1)

so ground index ``2j - 2`` holds ``e_j``, ``2j - 1`` holds ``e_j - e_(j+1)``
and the last index holds the alternating vector.  Block ``b`` (0-based) is
the four indices ``4b .. 4b+3``.

Every check here returns exact slacks or counts.  Falsified statements
raise :class:`~blform.errors.PropertyViolation` carrying the witness.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, floor
from typing import Iterable, Sequence

import numpy as np

from .errors import DegenerateError, DimensionError, DomainError, PropertyViolation
from .exact_linalg import ExactMatrix, determinant, format_rational, to_rational
from .matroid import VectorMatroid, indices_of, mask_of
from .polytope import ExponentTuple, MembershipVerdict, margin, membership

__all__ = [
    "DEFAULT_MAX_N",
    "HALF",
    "TENTH",
    "DIRECTIONS",
    "FamilyInstance",
    "PDeltaPoint",
    "IntervalSet",
    "InclusionReport",
    "build_family",
    "family_vectors",
    "is_p_delta",
    "sample_p_delta",
    "p_delta_vertices",
    "verify_p_delta_inclusion",
    "verify_interval_bound",
    "e_intervals",
    "find_dependent_triple",
    "decompose_spanned",
    "verify_full_set",
    "verify_all_base_dets",
    "induction_neighborhood",
    "family_report",
]

DEFAULT_MAX_N = 5
HALF = Fraction(1, 2)
TENTH = Fraction(1, 10)

# orthogonal to each other and to (1, 1, 1, 1)
DIRECTIONS = ((1, 1, -1, -1), (1, -1, 1, -1), (1, -1, -1, 1))


def family_vectors(n: int) -> list[list[int]]:
    k = 2 * n + 1

    def e(j):
        return [int(i == j - 1) for i in range(k)]

    vecs: list[list[int]] = [None] * (4 * n + 2)
    for j in range(1, 2 * n + 2):
        vecs[2 * j - 2] = e(j)
    for j in range(1, 2 * n + 1):
        vecs[2 * j - 1] = [a - b for a, b in zip(e(j), e(j + 1))]
    vecs[4 * n + 1] = [(-1) ** i for i in range(k)]
    return vecs


@dataclass(frozen=True)
class FamilyInstance:
    n: int
    matroid: VectorMatroid = field(repr=False)

    @property
    def k(self) -> int:
        return 2 * self.n + 1

    @property
    def m(self) -> int:
        return 4 * self.n + 2

    @property
    def ell(self) -> int:
        return 2

    @property
    def alt_index(self) -> int:
        return self.m - 1

    @property
    def alt_bit(self) -> int:
        return 1 << self.alt_index

    @staticmethod
    def e_index(j: int) -> int:
        """Ground index of ``e_j`` (``j`` is 1-based)."""
        return 2 * j - 2

    def block(self, b: int) -> range:
        if not 0 <= b < self.n:
            raise DomainError(f"block {b} out of range 0..{self.n - 1}")
        return range(4 * b, 4 * b + 4)


def build_family(n: int, max_n: int = DEFAULT_MAX_N) -> FamilyInstance:
    """Instantiate the family for ``n`` (capped at ``max_n``; pass a larger cap to override)."""
    if n < 1:
        raise DomainError("the family needs n >= 1 (n = 0 has no kernel factors)")
    if n > max_n:
        raise DomainError(f"n = {n} exceeds the cap {max_n}; raise max_n to override")
    inst = FamilyInstance(n, VectorMatroid(family_vectors(n), dimension=2 * n + 1))
    if inst.matroid.rank != inst.k:
        raise PropertyViolation("family ground set is not of full rank")
    return inst


def _n_from_length(m: int) -> int:
    if m < 6 or (m - 2) % 4:
        raise DimensionError(f"length {m} is not of the form 4n + 2 with n >= 1")
    return (m - 2) // 4


def is_p_delta(theta: Sequence, delta) -> bool:
    """Block sums 2, final pair sum 1, every coordinate within ``delta`` of 1/2."""
    th = [to_rational(t) for t in theta]
    n = _n_from_length(len(th))
    delta = to_rational(delta)
    if any(abs(t - HALF) > delta for t in th):
        return False
    if any(sum(th[4 * j : 4 * j + 4]) != 2 for j in range(n)):
        return False
    return th[4 * n] + th[4 * n + 1] == 1


@dataclass(frozen=True)
class PDeltaPoint:
    """A validated point of ``P_delta``; construction fails otherwise."""

    theta: tuple[Fraction, ...]
    delta: Fraction

    def __post_init__(self):
        th = tuple(to_rational(t) for t in self.theta)
        d = to_rational(self.delta)
        object.__setattr__(self, "theta", th)
        object.__setattr__(self, "delta", d)
        if d < 0:
            raise DomainError("delta must be non-negative")
        if not is_p_delta(th, d):
            raise DomainError(f"point is not in P_delta for delta = {format_rational(d)}")

    @property
    def n(self) -> int:
        return (len(self.theta) - 2) // 4

    def exponents(self) -> ExponentTuple:
        return ExponentTuple(self.theta)


def _check_delta(delta) -> Fraction:
    delta = to_rational(delta)
    if delta < 0:
        raise DomainError("delta must be non-negative")
    if delta > HALF:
        raise DomainError("delta must not exceed 1/2")
    return delta


def sample_p_delta(
    inst: FamilyInstance, delta, count: int, seed: int, denominator: int = 1000
) -> list[PDeltaPoint]:
    """Seeded exact samples of ``P_delta`` on the grid ``(1/denominator) Z``.

    Each 4-block draws three free coordinates on the grid inside the box and
    sets the fourth from the block sum, rejecting draws that leave the box.
    The final pair draws one coordinate.  Sample ``i`` uses its own stream
    seeded by ``(seed, i)``, so any prefix of a run is reproducible alone.
    """
    delta = _check_delta(delta)
    lo = ceil((HALF - delta) * denominator)
    hi = floor((HALF + delta) * denominator)
    if lo > hi:
        raise DomainError(f"no grid point of denominator {denominator} within {delta} of 1/2")
    D = denominator
    out = []
    for i in range(count):
        rng = np.random.default_rng([seed, i])
        nums: list[int] = []
        for _ in range(inst.n):
            while True:
                free = [int(x) for x in rng.integers(lo, hi + 1, size=3)]
                last = 2 * D - sum(free)
                if lo <= last <= hi:
                    break
            nums.extend(free + [last])
        a = int(rng.integers(lo, hi + 1))
        nums.extend([a, D - a])
        out.append(PDeltaPoint(tuple(Fraction(x, D) for x in nums), delta))
    return out


def p_delta_vertices(inst: FamilyInstance, delta) -> list[PDeltaPoint]:
    """The ``2 * 6^n`` extreme points of ``P_delta``.

    A block slice has vertices with two coordinates at ``1/2 + delta`` and two
    at ``1/2 - delta``; the pair slice has two vertices.  ``P_delta`` is the
    product of these slices, so it lies in a convex set iff its vertices do.
    """
    delta = _check_delta(delta)
    up, dn = HALF + delta, HALF - delta
    block_pts = [tuple(HALF + delta * u for u in d) for d in DIRECTIONS]
    block_pts += [tuple(HALF - delta * u for u in d) for d in DIRECTIONS]
    pair_pts = [(up, dn), (dn, up)]
    combos: list[tuple] = [()]
    for _ in range(inst.n):
        combos = [c + b for c in combos for b in block_pts]
    return [PDeltaPoint(c + p, delta) for c in combos for p in pair_pts]


@dataclass
class InclusionReport:
    delta: Fraction
    samples: int
    passed: int
    failed: int
    violations: list = field(default_factory=list)
    min_margin: Fraction | None = None

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def to_json(self) -> dict:
        return {
            "delta": format_rational(self.delta),
            "samples": self.samples,
            "violations": self.failed,
            "min_margin": None if self.min_margin is None else format_rational(self.min_margin),
            "certificates": [{"sample": i, **v.to_json()} for i, v in self.violations],
        }


def verify_p_delta_inclusion(
    inst: FamilyInstance, delta, samples: Iterable[PDeltaPoint]
) -> InclusionReport:
    """Run membership on each point and tally the outcome."""
    delta = _check_delta(delta)
    report = InclusionReport(delta, 0, 0, 0)
    for i, pt in enumerate(samples):
        if len(pt.theta) != inst.m or not is_p_delta(pt.theta, delta):
            raise DomainError(f"sample {i} is not a point of P_delta for this instance")
        verdict: MembershipVerdict = membership(inst.matroid, pt.theta)
        report.samples += 1
        if verdict.member:
            report.passed += 1
            if report.min_margin is None or verdict.margin < report.min_margin:
                report.min_margin = verdict.margin
        else:
            report.failed += 1
            report.violations.append((i, verdict.violation))
    return report


@dataclass(frozen=True)
class IntervalSet:
    """Contiguous run ``f_start .. f_end`` of the ordered ground set (0-based, inclusive)."""

    start: int
    end: int

    def __post_init__(self):
        if self.start < 0 or self.start > self.end:
            raise DomainError(f"bad interval [{self.start}, {self.end}]")

    @classmethod
    def from_e(cls, s: int, t: int) -> "IntervalSet":
        """The interval ``[e_s, e_t]`` (1-based coordinate indices)."""
        return cls(2 * s - 2, 2 * t - 2)

    @property
    def mask(self) -> int:
        return mask_of(range(self.start, self.end + 1))

    @property
    def is_e_interval(self) -> bool:
        return self.start % 2 == 0 and self.end % 2 == 0

    @property
    def e_range(self) -> tuple[int, int]:
        return self.start // 2 + 1, self.end // 2 + 1

    def to_json(self) -> list[int]:
        return [self.start, self.end]


def e_intervals(inst: FamilyInstance) -> list[IntervalSet]:
    """Every interval ``[e_s, e_t]`` with ``s <= t``."""
    k = inst.k
    return [IntervalSet.from_e(s, t) for s in range(1, k + 1) for t in range(s, k + 1)]


def verify_interval_bound(
    inst: FamilyInstance, point: PDeltaPoint, interval: IntervalSet
) -> tuple[bool, Fraction]:
    """Exact slack of ``rank(S) >= 1/2 - 3 delta + sum_S theta`` for ``S = [e_s, e_t]``."""
    if len(point.theta) != inst.m:
        raise DimensionError("point does not match the instance size")
    if not interval.is_e_interval or interval.end > inst.e_index(inst.k):
        raise DomainError(f"{interval} is not of the form [e_s, e_t]")
    rk = inst.matroid.rank_of(interval.mask)
    total = sum(point.theta[interval.start : interval.end + 1], Fraction(0))
    slack = rk - (HALF - 3 * point.delta + total)
    return slack >= 0, slack


def _check_spanned_without_alt(inst: FamilyInstance, mask: int) -> None:
    if mask & inst.alt_bit:
        raise DomainError("subset must exclude the alternating vector")
    if inst.matroid.closure_of(mask) & ~inst.alt_bit != mask:
        raise DomainError("subset is not closed (relative to the family minus the alternating vector)")


def _triple_mask(j: int) -> int:
    base = 2 * j - 2
    return 0b111 << base


def _first_triple(inst: FamilyInstance, mask: int) -> int | None:
    for j in range(1, inst.k):
        t = _triple_mask(j)
        if mask & t == t:
            return j
    return None


def find_dependent_triple(inst: FamilyInstance, mask: int) -> int | None:
    """Smallest ``j`` with ``{e_j, e_j - e_(j+1), e_(j+1)}`` inside a dependent closed set.

    ``mask`` must avoid the alternating vector and be closed in the family
    without it.  Returns None for independent sets; a dependent set with no
    such triple raises :class:`PropertyViolation`.
    """
    _check_spanned_without_alt(inst, mask)
    if inst.matroid.is_independent(mask):
        return None
    j = _first_triple(inst, mask)
    if j is None:
        raise PropertyViolation("dependent closed set without a triple", witness=indices_of(mask))
    return j


def decompose_spanned(inst: FamilyInstance, mask: int) -> tuple[int, list[IntervalSet]]:
    """Split a closed set into maximal ``[e_s, e_t]`` intervals plus an independent rest.

    Repeatedly takes the first triple of the remainder and widens it to the
    largest interval still inside the remainder.  Before returning, checks
    that the pieces are disjoint, cover the set, that the rest is
    independent, and that ranks add up.
    """
    _check_spanned_without_alt(inst, mask)
    M = inst.matroid
    rest = mask
    pieces: list[IntervalSet] = []
    while not M.is_independent(rest):
        j = _first_triple(inst, rest)
        if j is None:
            raise PropertyViolation("dependent remainder without a triple", witness=indices_of(rest))
        s, t = j, j + 1
        while s > 1 and (rest >> (2 * s - 3)) & 1 and (rest >> (2 * s - 4)) & 1:
            s -= 1
        while t < inst.k and (rest >> (2 * t - 1)) & 1 and (rest >> (2 * t)) & 1:
            t += 1
        piece = IntervalSet.from_e(s, t)
        pieces.append(piece)
        rest &= ~piece.mask
    pieces.sort(key=lambda p: p.start)

    union = rest
    for p in pieces:
        if union & p.mask:
            raise PropertyViolation("pieces overlap", witness=indices_of(mask))
        union |= p.mask
    if union != mask:
        raise PropertyViolation("pieces do not cover the set", witness=indices_of(mask))
    total = M.rank_of(rest) + sum(M.rank_of(p.mask) for p in pieces)
    if total != M.rank_of(mask):
        raise PropertyViolation(
            f"rank additivity fails: pieces sum to {total}, set has rank {M.rank_of(mask)}",
            witness=indices_of(mask),
        )
    return rest, pieces


def verify_full_set(inst: FamilyInstance) -> int:
    """Check the full-set proposition over every flat; returns how many flats met its hypotheses.

    Hypotheses: ``S`` is a flat holding the alternating vector ``a``, ``a``
    lies in the span of ``S' = S - {a}``, and ``S'`` is a union of intervals
    ``[e_s, e_t]``.  Conclusion checked: ``S`` is the whole ground set.
    """
    M = inst.matroid
    alt = inst.alt_bit
    hits = 0
    for flat in M.enumerate_flats():
        if not flat & alt:
            continue
        rest = flat & ~alt
        if M.rank_of(rest) != M.rank_of(flat):
            continue
        s0, _ = decompose_spanned(inst, rest)
        if s0:
            continue
        hits += 1
        if flat != M.ground:
            raise PropertyViolation("full-set proposition fails", witness=indices_of(flat))
    return hits


def verify_all_base_dets(inst: FamilyInstance) -> tuple[int, bool]:
    """Number of bases and whether every basis matrix has ``|det| = 1``."""
    M = inst.matroid
    count = 0
    all_unit = True
    for b in M.enumerate_bases():
        mat = ExactMatrix.from_rows([M.vectors[i] for i in indices_of(b)], cols=M.k)
        count += 1
        if abs(determinant(mat)) != 1:
            all_unit = False
    return count, all_unit


def induction_neighborhood(
    inst: FamilyInstance, block: int, point: PDeltaPoint, delta=TENTH
) -> tuple[Fraction, list[PDeltaPoint]]:
    """Step ``tau`` and the six points ``theta +- tau u`` on one block.

    ``tau = min(delta - |theta_i - 1/2|)`` over the block's coordinates; the
    points come in the order ``+u1, -u1, +u2, -u2, +u3, -u3``.  They share
    the block sum with ``theta`` and their convex hull is a neighbourhood of
    ``theta`` inside the block slice.
    """
    delta = _check_delta(delta)
    if len(point.theta) != inst.m:
        raise DimensionError("point does not match the instance size")
    idx = inst.block(block)
    if not is_p_delta(point.theta, delta):
        raise DomainError(f"point is not in P_delta for delta = {format_rational(delta)}")
    tau = min(delta - abs(point.theta[i] - HALF) for i in idx)
    if tau <= 0:
        raise DegenerateError(f"theta touches the box boundary on block {block}: tau = 0")
    out = []
    for u in DIRECTIONS:
        for sign in (1, -1):
            th = list(point.theta)
            for i, ui in zip(idx, u):
                th[i] += sign * tau * ui
            try:
                out.append(PDeltaPoint(tuple(th), delta))
            except DomainError as exc:
                raise PropertyViolation("six-point step left P_delta", witness=th) from exc
    return tau, out


def center_point(inst: FamilyInstance) -> PDeltaPoint:
    return PDeltaPoint((HALF,) * inst.m, Fraction(0))


def family_report(
    n: int,
    delta=TENTH,
    samples: int = 1000,
    seed: int = 0,
    seg_samples: int = 100,
    max_n: int = DEFAULT_MAX_N,
    vertex_check_max_n: int = 3,
) -> dict:
    """Run every family check for one ``n`` and collect a JSON-ready report.

    ``report["ok"]`` is False only when a statement that is claimed for the
    given ``delta`` fails; inclusion of ``P_delta`` is only claimed for
    ``delta <= 1/10``.
    """
    delta = _check_delta(delta)
    inst = build_family(n, max_n=max_n)
    M = inst.matroid
    nbases, all_unit = verify_all_base_dets(inst)
    claimed = delta <= TENTH

    pts = sample_p_delta(inst, delta, samples, seed)
    incl = verify_p_delta_inclusion(inst, delta, pts)

    seg_pts = pts[:seg_samples] if seg_samples <= len(pts) else sample_p_delta(inst, delta, seg_samples, seed)
    intervals = e_intervals(inst)
    seg_min = None
    seg_fail = 0
    for pt in seg_pts:
        for iv in intervals:
            ok, slack = verify_interval_bound(inst, pt, iv)
            seg_fail += not ok
            if seg_min is None or slack < seg_min:
                seg_min = slack

    half = (HALF,) * inst.m
    interior = margin(M, half)

    structure_checked = 0
    for flat in M.enumerate_flats():
        if flat & inst.alt_bit:
            continue
        find_dependent_triple(inst, flat)
        decompose_spanned(inst, flat)
        structure_checked += 1
    full_set_hits = verify_full_set(inst)

    center = PDeltaPoint(half, TENTH)
    six_ok = True
    taus = []
    for b in range(n):
        tau, six = induction_neighborhood(inst, b, center)
        taus.append(tau)
        six_ok &= verify_p_delta_inclusion(inst, TENTH, six).ok

    report = {
        "n": n,
        "k": inst.k,
        "m": inst.m,
        "bases": nbases,
        "all_unit_det": all_unit,
        "flats": len(M.enumerate_flats()),
        "interior_margin": format_rational(interior),
        "p_delta": incl.to_json(),
        "seg_est_min_slack": format_rational(seg_min),
        "seg_est_failures": seg_fail,
        "structure_flats_checked": structure_checked,
        "full_set_hypothesis_hits": full_set_hits,
        "induction": {"taus": [format_rational(t) for t in taus], "six_points_inside": six_ok},
    }
    ok = all_unit and interior > 0 and six_ok and ((incl.ok and seg_fail == 0) or not claimed)
    if n <= vertex_check_max_n:
        vert = verify_p_delta_inclusion(inst, delta, p_delta_vertices(inst, delta))
        report["p_delta_vertices"] = {"count": vert.samples, "violations": vert.failed}
        ok = ok and (vert.ok or not claimed)
    report["ok"] = ok
    return report
