"""Pairings of endpoint labels and their segment cycles.

Endpoint labels are ``1..2n``; legs are odd, heads even. A pairing is a
fixed-point-free involution stored as an image array. The segment cycles
of a state pairing ``J`` are the classes of labels under the group
generated by ``HL∘J`` and ``HL``, i.e. the connected components of the
graph whose edges are ``{a, J(a)}`` and ``{a, HL(a)}``.
"""

from __future__ import annotations

import re
from typing import Iterable, Iterator, Sequence

__all__ = [
    "Pairing",
    "UnionFind",
    "head_leg_pairing",
    "orbit",
    "segment_cycles",
    "cycle_count",
    "decorated_circle",
    "parse_cycles",
    "all_pairings",
]


class UnionFind:
    def __init__(self, items: Iterable):
        self.parent = {x: x for x in items}
        self.rank = {x: 0 for x in self.parent}

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x, y) -> bool:
        x, y = self.find(x), self.find(y)
        if x == y:
            return False
        if self.rank[x] < self.rank[y]:
            x, y = y, x
        elif self.rank[x] == self.rank[y]:
            self.rank[x] += 1
        self.parent[y] = x
        return True

    def classes(self) -> list[frozenset]:
        groups: dict = {}
        for x in self.parent:
            groups.setdefault(self.find(x), set()).add(x)
        return [frozenset(g) for g in groups.values()]


class Pairing:
    """A fixed-point-free involution on ``{1, ..., 2n}``.

    ``image[a - 1]`` is ``J(a)``.
    """

    __slots__ = ("image",)

    def __init__(self, image: Sequence[int]):
        image = tuple(int(x) for x in image)
        size = len(image)
        if size % 2:
            raise ValueError("a pairing acts on an even number of labels")
        for a, b in enumerate(image, start=1):
            if not 1 <= b <= size:
                raise ValueError(f"label {b} out of range 1..{size}")
            if b == a:
                raise ValueError(f"pairing fixes {a}")
            if image[b - 1] != a:
                raise ValueError(f"pairing is not an involution at {a}")
        self.image = image

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, int]], size: int | None = None) -> "Pairing":
        pairs = list(pairs)
        size = 2 * len(pairs) if size is None else size
        image = [0] * size
        for a, b in pairs:
            if not (1 <= a <= size and 1 <= b <= size):
                raise ValueError(f"pair ({a} {b}) out of range 1..{size}")
            if image[a - 1] or image[b - 1]:
                raise ValueError(f"label repeated in pair ({a} {b})")
            image[a - 1] = b
            image[b - 1] = a
        if 0 in image:
            raise ValueError("pairs do not cover every label")
        return cls(image)

    @property
    def size(self) -> int:
        return len(self.image)

    @property
    def n(self) -> int:
        return len(self.image) // 2

    def __call__(self, a: int) -> int:
        if not 1 <= a <= len(self.image):
            raise ValueError(f"label {a} out of range 1..{len(self.image)}")
        return self.image[a - 1]

    def pairs(self) -> list[tuple[int, int]]:
        return [(a, b) for a, b in enumerate(self.image, start=1) if a < b]

    def __eq__(self, other):
        return isinstance(other, Pairing) and self.image == other.image

    def __hash__(self):
        return hash(self.image)

    def __repr__(self):
        return f"Pairing({self})"

    def __str__(self):
        return "".join(f"({a} {b})" for a, b in self.pairs())


def head_leg_pairing(n: int) -> Pairing:
    """``(1 2)(3 4)...(2n-1 2n)``."""
    if n <= 0:
        raise ValueError("the head-leg pairing needs at least one component")
    image = []
    for i in range(1, n + 1):
        image += [2 * i, 2 * i - 1]
    return Pairing(image)


def _check_sizes(J: Pairing, HL: Pairing):
    if J.size != HL.size:
        raise ValueError(f"pairing sizes differ: {J.size} vs {HL.size}")


def orbit(a: int, J: Pairing, HL: Pairing) -> frozenset[int]:
    """Orbit of ``a`` under iteration of ``x -> HL(J(x))``."""
    _check_sizes(J, HL)
    if not 1 <= a <= J.size:
        raise ValueError(f"label {a} out of range 1..{J.size}")
    seen = {a}
    x = HL(J(a))
    while x != a:
        seen.add(x)
        x = HL(J(x))
    return frozenset(seen)


def segment_cycles(J: Pairing, HL: Pairing) -> list[frozenset[int]]:
    """Partition of the labels into segment cycles, ordered by least element."""
    _check_sizes(J, HL)
    uf = UnionFind(range(1, J.size + 1))
    for a in range(1, J.size + 1):
        uf.union(a, J(a))
        uf.union(a, HL(a))
    return sorted(uf.classes(), key=min)


def cycle_count(J: Pairing, HL: Pairing) -> int:
    return len(segment_cycles(J, HL))


def decorated_circle(a: int, J: Pairing, HL: Pairing) -> list[int]:
    """Labels of the segment cycle of ``a`` in circle order.

    The order is ``a, J(a), HL(J(a)), J(HL(J(a))), ...``, ending at ``HL(a)``;
    consecutive labels alternate between a ``J`` arc and an ``HL`` arc.
    """
    _check_sizes(J, HL)
    out = [a]
    x, use_j = a, True
    while True:
        x = J(x) if use_j else HL(x)
        use_j = not use_j
        if x == a:
            return out
        out.append(x)


_CYCLE_RE = re.compile(r"\(\s*(\d+)\s+(\d+)\s*\)")


def parse_cycles(text: str, size: int | None = None) -> Pairing:
    """Parse cycle notation such as ``"(1 3)(2 4)"``."""
    stripped = text.strip()
    pairs = [(int(a), int(b)) for a, b in _CYCLE_RE.findall(stripped)]
    if _CYCLE_RE.sub("", stripped).strip():
        raise ValueError(f"malformed cycle notation: {text!r}")
    if not pairs:
        raise ValueError("empty cycle notation")
    return Pairing.from_pairs(pairs, size)


def all_pairings(n: int) -> Iterator[Pairing]:
    """Every fixed-point-free involution on ``{1..2n}`` ((2n-1)!! of them)."""

    def rec(remaining: list[int]) -> Iterator[list[tuple[int, int]]]:
        if not remaining:
            yield []
            return
        a = remaining[0]
        for i in range(1, len(remaining)):
            b = remaining[i]
            rest = remaining[1:i] + remaining[i + 1:]
            for tail in rec(rest):
                yield [(a, b)] + tail

    for pairs in rec(list(range(1, 2 * n + 1))):
        yield Pairing.from_pairs(pairs)
