"""Set partitions of {0..r-1} as restricted growth strings.

A partition into s unordered blocks is the same thing as a surjection
{0..r-1} -> {0..s-1} modulo relabelling the target.  The lexicographically
smallest surjection in a class is a restricted growth string (RGS): it starts
with 0 and each entry is at most one more than the maximum before it.  Blocks
are therefore numbered by their smallest element.

Seen as a map of products Y^s -> Y^r, an RGS ``g`` sends (y_0..y_{s-1}) to
(y_{g[0]}, ..., y_{g[r-1]}); it is a diagonal embedding.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Iterator, Sequence


def _canonical(labels: Sequence[int]) -> tuple[int, ...]:
    seen: dict[int, int] = {}
    return tuple(seen.setdefault(x, len(seen)) for x in labels)


@dataclass(frozen=True, order=True)
class PartitionMap:
    rgs: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.rgs:
            raise ValueError("empty partition")
        if _canonical(self.rgs) != tuple(self.rgs):
            raise ValueError(f"{self.rgs} is not a restricted growth string")

    @classmethod
    def from_labels(cls, labels: Sequence[int]) -> PartitionMap:
        """Canonical representative of any labelling of the blocks."""
        return cls(_canonical(labels))

    @classmethod
    def from_blocks(cls, blocks: Sequence[Sequence[int]], r: int | None = None) -> PartitionMap:
        """Build from a list of blocks of 0-based indices covering 0..r-1."""
        r = sum(len(b) for b in blocks) if r is None else r
        labels = [-1] * r
        for j, block in enumerate(blocks):
            for i in block:
                if labels[i] != -1:
                    raise ValueError(f"index {i} appears twice")
                labels[i] = j
        if -1 in labels or any(not b for b in blocks):
            raise ValueError("blocks must be non-empty and cover every index")
        return cls.from_labels(labels)

    @classmethod
    def identity(cls, r: int) -> PartitionMap:
        return cls(tuple(range(r)))

    @property
    def r(self) -> int:
        return len(self.rgs)

    @property
    def s(self) -> int:
        return max(self.rgs) + 1

    def blocks(self) -> list[tuple[int, ...]]:
        out: list[list[int]] = [[] for _ in range(self.s)]
        for i, j in enumerate(self.rgs):
            out[j].append(i)
        return [tuple(b) for b in out]

    def __str__(self) -> str:
        return "".join(map(str, self.rgs)) if self.s <= 10 else repr(self.rgs)


@lru_cache(maxsize=None)
def stirling2(m: int, j: int) -> int:
    """Number of partitions of m points into j blocks (standard recurrence)."""
    if m == j:
        return 1
    if j <= 0 or j > m:
        return 0
    return j * stirling2(m - 1, j) + stirling2(m - 1, j - 1)


def _rgs_iter(r: int, s: int) -> Iterator[tuple[int, ...]]:
    def rec(prefix: list[int], top: int) -> Iterator[tuple[int, ...]]:
        left = r - len(prefix)
        if left == 0:
            if top + 1 == s:
                yield tuple(prefix)
            return
        # need enough room to open the remaining blocks
        for v in range(min(top + 2, s)):
            new_top = max(top, v)
            if s - 1 - new_top > left - 1:
                continue
            prefix.append(v)
            yield from rec(prefix, new_top)
            prefix.pop()

    yield from rec([0], 0)


def enumerate_partitions(r: int, s: int) -> list[PartitionMap]:
    """All partitions of r points into s blocks, in lexicographic RGS order."""
    if not 1 <= s <= r:
        raise ValueError(f"need 1 <= s <= r, got r={r}, s={s}")
    return [PartitionMap(g) for g in _rgs_iter(r, s)]


def compose(a: PartitionMap, b: PartitionMap) -> PartitionMap:
    """First degenerate by ``a`` (r -> s), then merge a's blocks by ``b`` (s -> t)."""
    if b.r != a.s:
        raise ValueError(f"cannot compose: {a} has {a.s} blocks, {b} acts on {b.r} points")
    return PartitionMap.from_labels([b.rgs[j] for j in a.rgs])


def pull_tuple(a: PartitionMap, t: Sequence) -> tuple:
    """Block sums: the j-th entry is the sum of t_i over the block j."""
    if len(t) != a.r:
        raise ValueError(f"tuple of length {len(t)} does not match {a}")
    out = [0] * a.s
    for i, j in enumerate(a.rgs):
        out[j] = out[j] + t[i]
    return tuple(out)


def isolated(a: PartitionMap) -> set[int]:
    """Indices that form a block on their own."""
    counts = [0] * a.s
    for j in a.rgs:
        counts[j] += 1
    return {i for i, j in enumerate(a.rgs) if counts[j] == 1}


def surjections(m: int, j: int) -> int:
    return factorial(j) * stirling2(m, j) if j >= 0 else 0


def identity_sum(m: int) -> Fraction:
    """sum_{j=1}^m (-1)^j (j-1)! S(m, j); zero for every m >= 2."""
    if m < 1:
        raise ValueError("m must be >= 1")
    return Fraction(sum((-1) ** j * factorial(j - 1) * stirling2(m, j) for j in range(1, m + 1)))


def count_with_isolated(r: int, s: int, index: int = 0) -> int:
    """Number of partitions of r points into s blocks in which ``index`` is a singleton."""
    if not 2 <= s < r:
        raise ValueError(f"need 2 <= s < r, got r={r}, s={s}")
    return sum(1 for p in enumerate_partitions(r, s) if index in isolated(p))
