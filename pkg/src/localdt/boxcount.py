"""Brute-force enumeration of 3-dimensional partitions with one leg.

A 3-dimensional partition with an infinite leg of profile ``lam`` along the
first axis is stored as its sequence of cross-sections
``slices[0] ⊇ slices[1] ⊇ ... ⊇ lam``, truncated just before the first
slice equal to ``lam``.  Every later slice equals ``lam``.  The renormalized
volume is the number of boxes outside the leg, ``sum(|slice| - |lam|)``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator

from .algebra import QSeries, macmahon_neg
from .partitions import Partition, SkewDiagram, skew_rank


@dataclass(frozen=True)
class PlanePartition:
    profile: Partition
    slices: tuple[Partition, ...]

    def __post_init__(self) -> None:
        chain = self.slices + (self.profile,)
        for outer, inner in zip(chain, chain[1:]):
            if not outer.contains(inner):
                raise ValueError(f"slices are not nested: {outer} does not contain {inner}")
        if self.slices and self.slices[-1] == self.profile:
            raise ValueError("the last stored slice must differ from the profile")

    @property
    def volume(self) -> int:
        return sum(s.size - self.profile.size for s in self.slices)

    @property
    def boxes(self) -> frozenset[tuple[int, int, int]]:
        """Boxes outside the infinite leg, as (leg coordinate, row, column)."""
        out = set()
        for k, sl in enumerate(self.slices):
            for i, j in sl.cells():
                if not (i < len(self.profile) and j < self.profile[i]):
                    out.add((k, i, j))
        return frozenset(out)


def _between(inner: Partition, outer: Partition | None, budget: int) -> Iterator[Partition]:
    """Partitions nu with inner ⊆ nu ⊆ outer and |nu| - |inner| <= budget.

    ``outer=None`` means no upper bound.
    """

    def row_bound(seq: Partition, i: int) -> int:
        return seq[i] if i < len(seq) else 0

    def rec(i: int, prev: int, left: int, acc: list[int]) -> Iterator[Partition]:
        lo = row_bound(inner, i)
        hi = min(prev, lo + left)
        if outer is not None:
            hi = min(hi, row_bound(outer, i))
        for part in range(hi, lo - 1, -1):
            if part == 0:
                yield Partition(acc)
            else:
                yield from rec(i + 1, part, left - (part - lo), acc + [part])

    start = row_bound(inner, 0) + budget
    yield from rec(0, start, budget, [])


def enumerate_partitions(lam: Partition, vmax: int) -> list[PlanePartition]:
    """Every 3-dimensional partition with leg ``lam`` and volume at most ``vmax``, once each."""
    if vmax < 0:
        raise ValueError("vmax must be nonnegative")
    lam = Partition(lam)
    out: list[PlanePartition] = []

    def rec(prefix: tuple[Partition, ...], bound: Partition | None, budget: int) -> None:
        out.append(PlanePartition(lam, prefix))
        for nu in _between(lam, bound, budget):
            if nu == lam:
                continue
            rec(prefix + (nu,), nu, budget - (nu.size - lam.size))

    rec((), None, vmax)
    return out


@lru_cache(maxsize=None)
def volume_counts(lam: Partition, vmax: int) -> tuple[int, ...]:
    counts = Counter(p.volume for p in enumerate_partitions(Partition(lam), vmax))
    return tuple(counts.get(v, 0) for v in range(vmax + 1))


def cy_vertex(lam: Partition, vmax: int, reduced: bool = False) -> QSeries:
    """sum over partitions of (-q)^volume, optionally divided by M(-q)."""
    counts = volume_counts(Partition(lam), vmax)
    series = QSeries.from_dict({v: Fraction((-1) ** v * c) for v, c in enumerate(counts) if c}, vmax)
    if reduced:
        return series / macmahon_neg(vmax)
    return series


def ord_van(pi: PlanePartition) -> int:
    """Sum of skew ranks of consecutive slices, including the step down to the profile."""
    chain = pi.slices + (pi.profile,)
    return sum(skew_rank(SkewDiagram(outer, inner)) for outer, inner in zip(chain, chain[1:]))
