"""Diagram constructors and Reidemeister moves.

These are used to build test corpora: braid-based linkoids (open strands,
optionally with some positions closed up) and random sequences of Ω1, Ω2
and Ω3 moves that must leave the Jones polynomial unchanged.
"""

from __future__ import annotations

import random
from typing import Sequence

from .diagram import (
    DiagramError,
    LinkoidDiagram,
    _build,
    _slot_is_in,
    _wiring_of,
    check_planar,
    faces,
)

__all__ = [
    "braid_linkoid",
    "random_braid_word",
    "random_pure_braid_word",
    "add_kink",
    "add_bigon",
    "triangle_moves",
    "apply_triangle_move",
    "random_move",
    "scramble",
]


def _place(nbr, signs, c, ccw, over):
    """Attach crossing ``c`` given its four ends in counterclockwise order.

    ``ccw[k] = (neighbour, strand, incoming)``; ``neighbour`` is the end at
    the other side of that arc (or ``None`` to fill in later), ``strand``
    names which of the two strands passes there and ``incoming`` is its
    direction. ``over`` names the strand on top. Returns the slot index of
    each position.
    """
    start = next(k for k, (_, strand, inc) in enumerate(ccw) if strand != over and inc)
    slot_of = {}
    for s in range(4):
        slot_of[(start + s) % 4] = s
    over_in = next(k for k, (_, strand, inc) in enumerate(ccw) if strand == over and inc)
    sign = 1 if slot_of[over_in] == 3 else -1
    signs[c] = sign
    for k, (other, _, _) in enumerate(ccw):
        if other is not None:
            end = 4 * c + slot_of[k]
            nbr[end] = other
            nbr[other] = end
    return slot_of


def braid_linkoid(word: Sequence[int], n_strands: int, closed: Sequence[int] = ()) -> LinkoidDiagram:
    """Diagram of a braid read bottom to top, strands oriented upward.

    Generator ``i`` (1-based) crosses positions ``i`` and ``i+1`` with the
    strand coming from the left on top (a positive crossing); ``-i`` puts it
    underneath. Positions listed in ``closed`` are joined top to bottom by
    arcs on the right; every other strand keeps a leg at the bottom and a
    head at the top. The closed positions must be a union of permutation
    cycles.
    """
    perm = list(range(n_strands))
    for g in word:
        i = abs(g) - 1
        if not 0 <= i < n_strands - 1 or g == 0:
            raise ValueError(f"generator {g} out of range for {n_strands} strands")
        perm[i], perm[i + 1] = perm[i + 1], perm[i]
    closed = set(closed)
    top_of = {start: pos for pos, start in enumerate(perm)}
    for k in closed:
        if top_of[k] not in closed:
            raise ValueError("closed positions must be a union of cycles of the braid permutation")
    open_starts = [k for k in range(n_strands) if k not in closed]
    label_of = {k: j for j, k in enumerate(open_starts)}

    nbr: dict[int, int] = {}
    signs: dict[int, int] = {}
    first_at: dict[int, int] = {}  # closed position -> end attached to its bottom arc

    def attach(dangling, end):
        if isinstance(dangling, tuple):
            first_at[dangling[1]] = end
        else:
            nbr[dangling] = end
            nbr[end] = dangling

    # dangling end at each position: a leg, an out-slot, or a bottom marker
    current = {k: (-(2 * label_of[k] + 1) if k in label_of else ("bottom", k))
               for k in range(n_strands)}
    for c, g in enumerate(word):
        i = abs(g) - 1
        # ccw from south-east: SE (right in), NE (left out), NW (right out), SW (left in)
        ccw = [(None, "R", True), (None, "L", False), (None, "R", False), (None, "L", True)]
        slot = _place(nbr, signs, c, ccw, "L" if g > 0 else "R")
        attach(current[i + 1], 4 * c + slot[0])
        attach(current[i], 4 * c + slot[3])
        current[i] = 4 * c + slot[2]
        current[i + 1] = 4 * c + slot[1]
    free = 0
    for pos in range(n_strands):
        end = current[pos]
        if perm[pos] in label_of:
            attach(end, -(2 * label_of[perm[pos]] + 2))
        elif isinstance(end, tuple):
            free += 1
        else:
            attach(end, first_at[pos])
    D = _build(nbr, signs, free)
    check_planar(D)
    return D


def random_braid_word(rng: random.Random, n_strands: int, length: int) -> list[int]:
    return [rng.choice((1, -1)) * rng.randint(1, n_strands - 1) for _ in range(length)]


def random_pure_braid_word(rng: random.Random, n_strands: int, max_length: int) -> list[int]:
    """A braid word of at most ``max_length`` letters whose permutation is trivial."""
    while True:
        length = rng.randint(0, max_length)
        word = random_braid_word(rng, n_strands, length) if n_strands > 1 else []
        perm = list(range(n_strands))
        for g in word:
            i = abs(g) - 1
            perm[i], perm[i + 1] = perm[i + 1], perm[i]
        if perm == list(range(n_strands)):
            return word


# -- moves -------------------------------------------------------------------

def _edge_ends(nbr, signs, u):
    """Return ``(tail, head)`` of the arc through end ``u`` in its orientation."""
    v = nbr[u]
    if _is_out(u, signs):
        return u, v
    return v, u


def _is_out(e, signs):
    if e < 0:
        return (-e) % 2 == 1  # a leg starts an arc
    return not _slot_is_in(e & 3, signs[e >> 2])


def _new_id(signs):
    return max(signs, default=-1) + 1


def add_kink(D: LinkoidDiagram, end: int, curl: int = 1, over_first: bool = True) -> LinkoidDiagram:
    """Insert an Ω1 curl on the arc whose departure end is ``end``.

    ``curl`` picks the side the loop bulges to; ``over_first`` whether the
    strand passes over on its first visit to the new crossing.
    """
    nbr, signs, free = _wiring_of(D)
    tail, head = _edge_ends(nbr, signs, end)
    c = _new_id(signs)
    del nbr[tail], nbr[head]
    first = "P" if over_first else "Q"
    if curl > 0:
        ccw = [(None, "P", False), (None, "Q", True), (tail, "P", True), (head, "Q", False)]
    else:
        ccw = [(None, "P", False), (head, "Q", False), (tail, "P", True), (None, "Q", True)]
    slot = _place(nbr, signs, c, ccw, first)
    e_out = 4 * c + slot[0]
    e_in = 4 * c + (slot[1] if curl > 0 else slot[3])
    nbr[e_out] = e_in
    nbr[e_in] = e_out
    out = _build(nbr, signs, free)
    check_planar(out)
    return out


def add_bigon(D: LinkoidDiagram, dart1: int, dart2: int, first_over: bool = True) -> LinkoidDiagram:
    """Push the arc of ``dart2`` across the arc of ``dart1`` (an Ω2 move).

    Both darts must be departure ends on the boundary of one common face,
    which lies to their right. Raises ``DiagramError`` for an illegal choice.
    """
    nbr, signs, free = _wiring_of(D)
    v1, v2 = nbr[dart1], nbr[dart2]
    if {dart1, v1} == {dart2, v2}:
        raise DiagramError("both darts run along the same arc")
    x = _new_id(signs)
    y = x + 1
    for u, v in ((dart1, v1), (dart2, v2)):
        del nbr[u], nbr[v]
    fwd1 = _is_out(dart1, signs)
    fwd2 = _is_out(dart2, signs)
    over = "S1" if first_over else "S2"
    # positions ccw E, N, W, S in travel direction of the darts
    x_ccw = [(None, "S1", not fwd1), (None, "S2", fwd2), (dart1, "S1", fwd1), (v2, "S2", not fwd2)]
    y_ccw = [(v1, "S1", not fwd1), (None, "S2", not fwd2), (None, "S1", fwd1), (dart2, "S2", fwd2)]
    sx = _place(nbr, signs, x, x_ccw, over)
    sy = _place(nbr, signs, y, y_ccw, over)
    for a, b in ((4 * x + sx[0], 4 * y + sy[2]), (4 * y + sy[1], 4 * x + sx[1])):
        nbr[a] = b
        nbr[b] = a
    out = _build(nbr, signs, free)
    check_planar(out)
    return out


def triangle_moves(D: LinkoidDiagram) -> list[tuple[int, int, int]]:
    """Triangular faces on which an Ω3 move is legal, as departure-end triples."""
    nbr = D._wiring.nbr
    found = []
    for face in faces(D):
        if len(face) != 3 or any(u < 0 for u in face):
            continue
        xs = {u >> 2 for u in face}
        if len(xs) != 3:
            continue
        # strand along dart u: over at both ends?
        kinds = []
        for u in face:
            v = nbr[u]
            if v < 0:
                break
            kinds.append(((u & 3) % 2, (v & 3) % 2))
        else:
            if (1, 1) in kinds and (0, 0) in kinds:
                found.append(tuple(face))
    return found


def apply_triangle_move(D: LinkoidDiagram, face: tuple[int, int, int]) -> LinkoidDiagram:
    """Slide one strand of a triangular face across the opposite crossing."""
    nbr, signs, free = _wiring_of(D)
    old = dict(nbr)
    # face darts: x.p -> y.q, y.(q+1) -> z.r, z.(r+1) -> x.(p-1)
    d1, d2, d3 = face
    if nbr[d1] >> 2 != d2 >> 2:
        d1, d2, d3 = _rotate_to_chain(face, nbr)
    x, p = d1 >> 2, d1 & 3
    y, q = nbr[d1] >> 2, nbr[d1] & 3
    z, r = nbr[d2] >> 2, nbr[d2] & 3

    def S(c, s):
        return 4 * c + (s & 3)

    xa, xa2 = S(x, p), S(x, p + 2)
    xc, xc2 = S(x, p - 1), S(x, p + 1)
    ya, ya2 = S(y, q), S(y, q + 2)
    yb, yb2 = S(y, q + 1), S(y, q + 3)
    zb, zb2 = S(z, r), S(z, r + 2)
    zc, zc2 = S(z, r + 1), S(z, r + 3)
    tri = {x, y, z}
    for e in (xa2, xc2, ya2, yb2, zb2, zc2):
        if old[e] >= 0 and old[e] >> 2 in tri:
            raise DiagramError("triangle is not isolated enough for an Ω3 move")
    new = {}
    for a, b in ((xa2, ya2), (yb2, zb2), (zc2, xc2)):
        new[a] = b
        new[b] = a
    for a, src in ((xa, ya2), (ya, xa2), (yb, zb2), (zb, yb2), (zc, xc2), (xc, zc2)):
        f = old[src]
        new[a] = f
        new[f] = a
    for e in (xa, xa2, xc, xc2, ya, ya2, yb, yb2, zb, zb2, zc, zc2):
        nbr.pop(e, None)
    nbr.update(new)
    out = _build(nbr, signs, free)
    check_planar(out)
    return out


def _rotate_to_chain(face, nbr):
    for k in range(3):
        d = face[k:] + face[:k]
        if nbr[d[0]] >> 2 == d[1] >> 2:
            return d
    raise DiagramError("face darts do not form a triangle")


def random_move(D: LinkoidDiagram, rng: random.Random) -> LinkoidDiagram:
    """Apply one randomly chosen legal Reidemeister move (in either direction)."""
    nbr = D._wiring.nbr
    kinds = ["kink", "bigon", "triangle"]
    rng.shuffle(kinds)
    for kind in kinds:
        if kind == "kink" and nbr:
            end = rng.choice(sorted(nbr))
            return add_kink(D, end, rng.choice((1, -1)), rng.random() < 0.5)
        if kind == "bigon":
            options = []
            for face in faces(D):
                for i in range(len(face)):
                    for j in range(len(face)):
                        if i != j:
                            options.append((face[i], face[j]))
            rng.shuffle(options)
            for d1, d2 in options[:10]:
                try:
                    return add_bigon(D, d1, d2, rng.random() < 0.5)
                except DiagramError:
                    continue
        if kind == "triangle":
            tri = triangle_moves(D)
            rng.shuffle(tri)
            for face in tri:
                try:
                    return apply_triangle_move(D, face)
                except DiagramError:
                    continue
    return D


def scramble(D: LinkoidDiagram, rng: random.Random, moves: int) -> LinkoidDiagram:
    for _ in range(moves):
        D = random_move(D, rng)
    return D
