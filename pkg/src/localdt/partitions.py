"""Partition combinatorics.

Cells are 0-based pairs ``(i, j)``: ``i`` is the row index and ``j`` the
column index, so the row ``i`` of ``(5, 3)`` has ``parts[i]`` cells.  Moving
down a column is the ``t1`` direction and moving along a row is the ``t2``
direction; the arm of a cell counts cells to its right and the leg counts
cells below it.  In the three-dimensional pictures of :mod:`localdt.boxcount`
a partition is a cross-section perpendicular to the leg.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import factorial, prod
from typing import Iterable, Iterator

from .algebra import RatFunc, T1, T2, ZERO


class Partition(tuple):
    """Weakly decreasing tuple of positive integers."""

    def __new__(cls, parts: Iterable[int] = ()):
        parts = tuple(sorted((int(p) for p in parts), reverse=True))
        if parts and parts[-1] <= 0:
            raise ValueError(f"partition parts must be positive, got {parts}")
        return super().__new__(cls, parts)

    @property
    def size(self) -> int:
        return sum(self)

    @property
    def length(self) -> int:
        return len(self)

    def conjugate(self) -> "Partition":
        if not self:
            return self
        return Partition(sum(1 for p in self if p > j) for j in range(self[0]))

    def cells(self) -> Iterator[tuple[int, int]]:
        for i, row in enumerate(self):
            for j in range(row):
                yield i, j

    def multiplicity(self, k: int) -> int:
        return sum(1 for p in self if p == k)

    def multiplicities(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for p in self:
            out[p] = out.get(p, 0) + 1
        return out

    def add_part(self, k: int) -> "Partition":
        return Partition(self + (k,))

    def remove_part(self, k: int) -> "Partition":
        parts = list(self)
        parts.remove(k)
        return Partition(parts)

    def contains(self, other: "Partition") -> bool:
        return len(other) <= len(self) and all(o <= s for o, s in zip(other, self))

    def __repr__(self) -> str:
        return "(" + ",".join(map(str, self)) + ")"

    def to_list(self) -> list[int]:
        return list(self)


EMPTY = Partition()


def parse_partition(text: str) -> Partition:
    """Read ``"2,1"`` (empty string is the empty partition)."""
    text = text.strip().strip("()[]")
    if not text:
        return EMPTY
    return Partition(int(x) for x in text.split(","))


@lru_cache(maxsize=None)
def gen_partitions(d: int) -> tuple[Partition, ...]:
    """All partitions of ``d`` in reverse lexicographic order."""
    if d < 0:
        raise ValueError("d must be non-negative")

    def rec(n: int, cap: int) -> Iterator[tuple[int, ...]]:
        if n == 0:
            yield ()
            return
        for first in range(min(n, cap), 0, -1):
            for rest in rec(n - first, first):
                yield (first,) + rest

    return tuple(Partition(p) for p in rec(d, d))


def zee(mu: Partition) -> int:
    """Order of the centralizer: prod(mu_i) * |Aut(mu)|."""
    return prod(mu) * prod(factorial(m) for m in mu.multiplicities().values())


@dataclass(frozen=True)
class CellData:
    cell: tuple[int, int]
    arm: int
    leg: int

    @property
    def hook(self) -> int:
        return self.arm + self.leg + 1


def hooks_arms_legs(lam: Partition) -> list[CellData]:
    conj = lam.conjugate()
    return [CellData((i, j), lam[i] - j - 1, conj[j] - i - 1) for i, j in lam.cells()]


def hook_product(lam: Partition) -> int:
    return prod(c.hook for c in hooks_arms_legs(lam))


def dimension(lam: Partition) -> int:
    """Number of standard tableaux, by the hook length formula."""
    return factorial(lam.size) // hook_product(lam)


def content_sum(lam: Partition) -> RatFunc:
    """Sum over cells of i*t1 + j*t2."""
    a = sum(i for i, _ in lam.cells())
    b = sum(j for _, j in lam.cells())
    return T1 * a + T2 * b if lam else ZERO


def n_of_mu(mu: Partition) -> int:
    """sum_i (i - 1) mu_i with rows numbered from 1."""
    return sum(i * p for i, p in enumerate(mu))


# ---------------------------------------------------------------------------
# skew diagrams and rim hooks


@dataclass(frozen=True)
class SkewDiagram:
    outer: Partition
    inner: Partition

    def __post_init__(self) -> None:
        if not self.outer.contains(self.inner):
            raise ValueError(f"{self.inner} is not contained in {self.outer}")

    def cells(self) -> set[tuple[int, int]]:
        inner = self.inner
        return {(i, j) for i, j in self.outer.cells()
                if not (i < len(inner) and j < inner[i])}

    def content_counts(self) -> dict[int, int]:
        counts: dict[int, int] = {}
        for i, j in self.cells():
            counts[j - i] = counts.get(j - i, 0) + 1
        return counts


def _components(cells: set[tuple[int, int]]) -> int:
    seen: set[tuple[int, int]] = set()
    count = 0
    for start in cells:
        if start in seen:
            continue
        count += 1
        stack = [start]
        seen.add(start)
        while stack:
            i, j = stack.pop()
            for nb in ((i + 1, j), (i - 1, j), (i, j + 1), (i, j - 1)):
                if nb in cells and nb not in seen:
                    seen.add(nb)
                    stack.append(nb)
    return count


def is_rim_hook(cells: set[tuple[int, int]]) -> bool:
    contents = [j - i for i, j in cells]
    return bool(cells) and len(set(contents)) == len(contents) and _components(cells) == 1


def skew_rank_peeling(skew: SkewDiagram) -> int:
    """Rank by stripping the outer rim layer and counting its rim hooks."""
    outer, inner = skew.outer, skew.inner
    rank = 0
    while outer != inner:
        layer = SkewDiagram(outer, inner).cells()
        shell = {(i, j) for i, j in layer
                 if not (i + 1 < len(outer) and j + 1 < outer[i + 1])}
        rank += _components(shell)
        rows = [sum(1 for j in range(outer[i]) if (i, j) not in shell) for i in range(len(outer))]
        outer = Partition(r for r in rows if r > 0)
    return rank


def skew_rank_contents(skew: SkewDiagram) -> int:
    """Rank as half the sum of squared jumps of the content histogram."""
    counts = skew.content_counts()
    if not counts:
        return 0
    lo, hi = min(counts) - 1, max(counts) + 1
    total = sum((counts.get(k, 0) - counts.get(k + 1, 0)) ** 2 for k in range(lo, hi))
    if total % 2:
        raise AssertionError(f"odd jump total for {skew}")
    return total // 2


def skew_rank(skew: SkewDiagram) -> int:
    a = skew_rank_peeling(skew)
    b = skew_rank_contents(skew)
    if a != b:
        raise AssertionError(f"rank mismatch on {skew}: peeling {a}, contents {b}")
    return a


# ---------------------------------------------------------------------------
# symmetric group characters


def _beta(lam: tuple[int, ...], n: int) -> tuple[int, ...]:
    lam = tuple(lam) + (0,) * (n - len(lam))
    return tuple(lam[i] + n - 1 - i for i in range(n))


@lru_cache(maxsize=None)
def _mn(lam: tuple[int, ...], mu: tuple[int, ...]) -> int:
    if not mu:
        return 1 if not lam else 0
    k, rest = mu[0], mu[1:]
    n = len(lam)
    beta = _beta(lam, n)
    bset = set(beta)
    total = 0
    for b in beta:
        if b - k >= 0 and (b - k) not in bset:
            height = sum(1 for c in beta if b - k < c < b)
            new = sorted((c if c != b else b - k for c in beta), reverse=True)
            parts = tuple(p for p in (new[i] - (n - 1 - i) for i in range(n)) if p > 0)
            total += (-1) ** height * _mn(parts, rest)
    return total


def character(lam: Partition, mu: Partition) -> int:
    """chi^lam evaluated on the class of cycle type mu (Murnaghan-Nakayama)."""
    if lam.size != mu.size:
        raise ValueError(f"size mismatch: |{lam}| != |{mu}|")
    return _mn(tuple(lam), tuple(mu))
