"""Matroids of finite families of rational vectors.

Subsets of the ground set are plain ``int`` bitmasks: bit ``i`` selects the
``i``-th vector (0-based).  Helpers :func:`mask_of` and :func:`indices_of`
convert to and from index lists.
"""

from __future__ import annotations

import threading
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionError, RankDeficientError
from .exact_linalg import IntegerEchelon, format_rational, primitive_integer_vector, to_rational

__all__ = ["VectorMatroid", "mask_of", "indices_of", "popcount"]


def mask_of(indices: Iterable[int]) -> int:
    mask = 0
    for i in indices:
        if i < 0:
            raise ValueError(f"negative index {i}")
        mask |= 1 << i
    return mask


def indices_of(mask: int) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def _direction_key(residual: list[int]) -> tuple[int, ...]:
    # residual is already primitive; fix the sign so parallel vectors collide
    for x in residual:
        if x:
            return tuple(residual) if x > 0 else tuple(-y for y in residual)
    return tuple(residual)


class VectorMatroid:
    """The matroid on ``m`` vectors of ``Q^k`` given by linear independence.

    Parameters
    ----------
    vectors : sequence of sequences
        Ground vectors; entries may be ints, Fractions or rational strings.
    dimension : int, optional
        Ambient dimension ``k``.  Inferred from the vectors when omitted.

    Rank queries are memoized per bitmask.  The cache and the lazily built
    flat/basis lists are guarded by a lock, so one matroid can be shared by
    threads.
    """

    def __init__(self, vectors: Sequence[Sequence], dimension: int | None = None):
        vecs = tuple(tuple(to_rational(x) for x in v) for v in vectors)
        if not vecs:
            raise DimensionError("a matroid needs at least one ground vector")
        k = len(vecs[0]) if dimension is None else int(dimension)
        for i, v in enumerate(vecs):
            if len(v) != k:
                raise DimensionError(f"vector {i} has length {len(v)}, expected {k}")
        self.vectors = vecs
        self.k = k
        self.m = len(vecs)
        self.ground = (1 << self.m) - 1
        self._ints = [primitive_integer_vector(v) for v in vecs]
        self._lock = threading.Lock()
        self._rank_cache: dict[int, int] = {0: 0}
        self._flats: list[tuple[int, int]] | None = None
        self._flat_table: tuple[np.ndarray, np.ndarray] | None = None
        self._bases: list[int] | None = None
        self.rank = self.rank_of(self.ground)

    def __repr__(self):
        return f"VectorMatroid(k={self.k}, m={self.m}, rank={self.rank})"

    def _check_mask(self, mask: int) -> int:
        if mask < 0 or mask & ~self.ground:
            raise DimensionError(f"subset mask {mask:#x} has bits outside the ground set of size {self.m}")
        return mask

    def _echelon(self, mask: int) -> IntegerEchelon:
        ech = IntegerEchelon(self.k)
        for i in indices_of(mask):
            ech.add(self._ints[i])
        return ech

    def rank_of(self, mask: int) -> int:
        """Dimension of the span of the selected vectors."""
        self._check_mask(mask)
        r = self._rank_cache.get(mask)
        if r is None:
            r = self._echelon(mask).rank
            with self._lock:
                self._rank_cache[mask] = r
        return r

    def closure_of(self, mask: int) -> int:
        """All ground vectors lying in the linear span of the selection."""
        self._check_mask(mask)
        ech = self._echelon(mask)
        out = mask
        for j in range(self.m):
            if not (mask >> j) & 1 and not any(ech.reduce(self._ints[j])):
                out |= 1 << j
        return out

    def is_independent(self, mask: int) -> bool:
        return self.rank_of(mask) == popcount(mask)

    def is_flat(self, mask: int) -> bool:
        return self.closure_of(mask) == mask

    def enumerate_bases(self) -> list[int]:
        """All ``k``-subsets of full rank, in lexicographic order of indices.

        Raises :class:`RankDeficientError` when the vectors do not span
        ``Q^k``.  Loops never occur in a basis.
        """
        if self.rank < self.k:
            raise RankDeficientError(
                f"ground set has rank {self.rank} < {self.k}: no bases of the ambient space exist"
            )
        if self._bases is not None:
            return list(self._bases)
        k, m = self.k, self.m
        out: list[int] = []

        def grow(start: int, mask: int, size: int, ech: IntegerEchelon):
            if size == k:
                out.append(mask)
                return
            for j in range(start, m - (k - size) + 1):
                nxt = ech.copy()
                if nxt.add(self._ints[j]):
                    grow(j + 1, mask | (1 << j), size + 1, nxt)

        grow(0, 0, 0, IntegerEchelon(self.k))
        with self._lock:
            self._bases = out
        return list(out)

    def flats_with_rank(self) -> list[tuple[int, int]]:
        """Every flat with its rank, sorted by rank then by index list.

        Walks the lattice of flats upward: the flats covering ``F`` are
        ``F`` plus one parallel class of the residuals of ``M \\ F`` modulo
        ``span(F)``.
        """
        if self._flats is not None:
            return list(self._flats)
        bottom = self.closure_of(0)
        level = {bottom: IntegerEchelon(self.k)}
        seen: dict[int, int] = {bottom: 0}
        r = 0
        while level:
            nxt: dict[int, IntegerEchelon] = {}
            for flat, ech in level.items():
                classes: dict[tuple[int, ...], list] = {}
                for j in range(self.m):
                    if (flat >> j) & 1:
                        continue
                    res = ech.reduce(self._ints[j])
                    key = _direction_key(res)
                    entry = classes.get(key)
                    if entry is None:
                        classes[key] = [1 << j, res]
                    else:
                        entry[0] |= 1 << j
                for bits, res in classes.values():
                    child = flat | bits
                    if child in seen or child in nxt:
                        continue
                    child_ech = ech.copy()
                    child_ech.add(res)
                    nxt[child] = child_ech
            r += 1
            for child in nxt:
                seen[child] = r
            level = nxt
        flats = sorted(seen.items(), key=lambda item: (item[1], indices_of(item[0])))
        with self._lock:
            self._flats = flats
            for mask, rk in flats:
                self._rank_cache.setdefault(mask, rk)
        return list(flats)

    def enumerate_flats(self) -> list[int]:
        """All sets equal to their own closure, each once (see :meth:`flats_with_rank`)."""
        return [mask for mask, _ in self.flats_with_rank()]

    def flat_table(self) -> tuple[np.ndarray, np.ndarray]:
        """Flat ranks and the 0/1 flat-by-element incidence matrix.

        Rows follow :meth:`flats_with_rank`; both arrays are int64.
        """
        if self._flat_table is None:
            flats = self.flats_with_rank()
            ranks = np.array([rk for _, rk in flats], dtype=np.int64)
            inc = np.zeros((len(flats), self.m), dtype=np.int64)
            for row, (mask, _) in enumerate(flats):
                inc[row, indices_of(mask)] = 1
            with self._lock:
                self._flat_table = (ranks, inc)
        return self._flat_table

    def to_json(self) -> dict:
        return {
            "dimension": self.k,
            "vectors": [[format_rational(x) for x in v] for v in self.vectors],
        }

    @classmethod
    def from_json(cls, data: dict) -> "VectorMatroid":
        return cls(data["vectors"], dimension=data.get("dimension"))

    def vector(self, i: int) -> tuple[Fraction, ...]:
        return self.vectors[i]
