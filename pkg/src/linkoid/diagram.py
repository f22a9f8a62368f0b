"""Linkoid diagrams: data model, validation, states, simplification, I/O.

A diagram is stored as an extended PD code. Every arc (edge) has a label;
each crossing is a quadruple of arc labels listed counterclockwise starting
at the incoming under-arc, together with its sign. Open components are arc
sequences from leg to head, closed components cyclic arc sequences.

Internally the diagram is "wired": every arc-end is an integer. The end
sitting in slot ``s`` of crossing ``c`` is ``4*c + s``; the endpoint with
label ``L`` is ``-L``. ``nbr[end]`` is the other end of the same arc.

Slot directions follow from the sign: slot 0 is under-in, slot 2 under-out,
and the over strand runs from slot 3 to slot 1 on a positive crossing and
from slot 1 to slot 3 on a negative one.

Smoothings: the A-smoothing joins slots (0,1) and (2,3), the B-smoothing
joins (0,3) and (1,2).
"""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Hashable, Iterable, Iterator

from .segcycle import Pairing, UnionFind, head_leg_pairing

__all__ = [
    "DiagramError",
    "CapExceeded",
    "LinkoidDiagram",
    "StateResolution",
    "DEFAULT_STATE_CAP",
    "trivial_linkoid",
    "writhe",
    "resolve",
    "enumerate_states",
    "simplify",
    "mirror",
    "switch_crossing",
    "smooth_crossing",
    "faces",
    "check_planar",
    "walk_code",
    "signature",
    "parse_diagram",
    "format_diagram",
    "diagram_to_json",
    "diagram_from_json",
]

DEFAULT_STATE_CAP = 26


class DiagramError(ValueError):
    """Malformed or inconsistent diagram input."""


class CapExceeded(RuntimeError):
    """A computation would exceed the configured crossing cap."""

    def __init__(self, message: str, crossings: int):
        super().__init__(message)
        self.crossings = crossings


def _slot_is_in(s: int, sign: int) -> bool:
    return s == 0 or (s == 3 and sign > 0) or (s == 1 and sign < 0)


def _out_of(in_slot: int) -> int:
    return (in_slot + 2) & 3


@dataclass(frozen=True)
class _Wiring:
    nbr: dict[int, int]
    tail: dict[Hashable, int]
    head: dict[Hashable, int]
    free_loops: int


@dataclass(frozen=True)
class LinkoidDiagram:
    """A linkoid diagram on the sphere, possibly with closed components.

    ``labels[j]`` is the ``(leg, head)`` label pair of open component ``j``;
    by default component ``j`` (0-based) carries ``(2j+1, 2j+2)``.
    """

    open_components: tuple[tuple[Hashable, ...], ...] = ()
    closed_components: tuple[tuple[Hashable, ...], ...] = ()
    crossings: tuple[tuple[Hashable, Hashable, Hashable, Hashable], ...] = ()
    signs: tuple[int, ...] = ()
    labels: tuple[tuple[int, int], ...] | None = field(default=None)

    def __post_init__(self):
        conv = lambda xs: tuple(tuple(x) for x in xs)  # noqa: E731
        object.__setattr__(self, "open_components", conv(self.open_components))
        object.__setattr__(self, "closed_components", conv(self.closed_components))
        object.__setattr__(self, "crossings", conv(self.crossings))
        object.__setattr__(self, "signs", tuple(int(s) for s in self.signs))
        if self.labels is None:
            labels = tuple((2 * j + 1, 2 * j + 2) for j in range(len(self.open_components)))
        else:
            labels = tuple((int(a), int(b)) for a, b in self.labels)
        object.__setattr__(self, "labels", labels)
        self._validate_labels()
        # force wiring construction so malformed input fails here
        self._wiring  # noqa: B018

    # -- basic facts ------------------------------------------------------
    @property
    def n_open(self) -> int:
        return len(self.open_components)

    @property
    def n_closed(self) -> int:
        return len(self.closed_components)

    @property
    def n_components(self) -> int:
        return self.n_open + self.n_closed

    @property
    def n_crossings(self) -> int:
        return len(self.crossings)

    @property
    def is_link(self) -> bool:
        return self.n_open == 0

    @property
    def free_loops(self) -> int:
        return self._wiring.free_loops

    @property
    def has_standard_labels(self) -> bool:
        return all(lab == (2 * j + 1, 2 * j + 2) for j, lab in enumerate(self.labels))

    def head_leg(self) -> Pairing:
        return head_leg_pairing(self.n_open)

    def edges(self) -> list[Hashable]:
        return [e for comp in self.open_components + self.closed_components for e in comp]

    def __str__(self):
        return format_diagram(self)

    # -- validation -------------------------------------------------------
    def _validate_labels(self):
        n = len(self.open_components)
        if len(self.labels) != n:
            raise DiagramError(f"{len(self.labels)} label pairs for {n} open components")
        seen = sorted(x for pair in self.labels for x in pair)
        if seen != list(range(1, 2 * n + 1)):
            raise DiagramError(f"endpoint labels must be exactly 1..{2 * n}, got {seen}")
        for leg, hd in self.labels:
            if leg % 2 != 1 or hd % 2 != 0:
                raise DiagramError(f"leg labels must be odd and head labels even: ({leg}, {hd})")

    @cached_property
    def _wiring(self) -> _Wiring:
        if len(self.signs) != len(self.crossings):
            raise DiagramError("one sign per crossing is required")
        ins: dict[Hashable, list[int]] = {}
        outs: dict[Hashable, list[int]] = {}
        for c, (quad, sign) in enumerate(zip(self.crossings, self.signs)):
            if len(quad) != 4:
                raise DiagramError(f"crossing {c + 1} has {len(quad)} arc-ends, expected 4")
            if sign not in (1, -1):
                raise DiagramError(f"crossing {c + 1} has sign {sign}, expected +1 or -1")
            for s, e in enumerate(quad):
                (ins if _slot_is_in(s, sign) else outs).setdefault(e, []).append(4 * c + s)

        all_edges = self.edges()
        if len(set(all_edges)) != len(all_edges):
            dup = sorted({str(e) for e in all_edges if all_edges.count(e) > 1})
            raise DiagramError(f"arc labels used by more than one component position: {dup}")
        known = set(all_edges)
        stray = [e for e in itertools.chain(ins, outs) if e not in known]
        if stray:
            raise DiagramError(f"crossings reference unknown arcs: {sorted(map(str, stray))}")

        tail: dict[Hashable, int] = {}
        head: dict[Hashable, int] = {}

        def take(table, e, want, where):
            got = table.get(e, [])
            if len(got) != want:
                raise DiagramError(
                    f"arc {e!r} meets crossings {len(got)} time(s) as {where}, expected {want} "
                    "(inconsistent valence)")
            return got[0] if got else None

        for comp, (leg, hd) in zip(self.open_components, self.labels):
            if not comp:
                raise DiagramError("open component with no arcs")
            m = len(comp) - 1
            for i, e in enumerate(comp):
                t = take(outs, e, 0 if i == 0 else 1, "outgoing")
                h = take(ins, e, 0 if i == m else 1, "incoming")
                tail[e] = -leg if i == 0 else t
                head[e] = -hd if i == m else h
        free_loops = 0
        for comp in self.closed_components:
            if not comp:
                raise DiagramError("closed component with no arcs")
            if len(comp) == 1 and comp[0] not in ins and comp[0] not in outs:
                free_loops += 1
                continue
            for e in comp:
                tail[e] = take(outs, e, 1, "outgoing")
                head[e] = take(ins, e, 1, "incoming")

        def check_step(a, b):
            h, t = head[a], tail[b]
            if h < 0 or t < 0 or (h >> 2) != (t >> 2) or t != (h & ~3) | _out_of(h & 3):
                raise DiagramError(
                    f"orientation mismatch between consecutive arcs {a!r} and {b!r}")

        for comp in self.open_components:
            for a, b in zip(comp, comp[1:]):
                check_step(a, b)
        for comp in self.closed_components:
            if len(comp) == 1 and comp[0] not in tail:
                continue
            for a, b in zip(comp, comp[1:] + comp[:1]):
                check_step(a, b)

        nbr = {}
        for e in tail:
            nbr[tail[e]] = head[e]
            nbr[head[e]] = tail[e]
        return _Wiring(nbr=nbr, tail=tail, head=head, free_loops=free_loops)

    @cached_property
    def _flat(self) -> tuple[list[int], int, int]:
        """Neighbour table over 0-based ends: slots first, then endpoint labels."""
        N = len(self.crossings)
        nbr = self._wiring.nbr
        size = 4 * N + 2 * self.n_open
        flat = [0] * size

        def idx(e):
            return e if e >= 0 else 4 * N - e - 1

        for e, f in nbr.items():
            flat[idx(e)] = idx(f)
        return flat, N, self.n_open


@dataclass(frozen=True)
class StateResolution:
    circ: int
    pairing: Pairing
    sigma: int
    smoothing: tuple[str, ...] = ()


def trivial_linkoid(n: int) -> LinkoidDiagram:
    """``n`` disjoint crossingless open arcs."""
    return LinkoidDiagram(open_components=[(f"a{j + 1}",) for j in range(n)])


def writhe(D: LinkoidDiagram) -> int:
    return sum(D.signs)


# -- states -------------------------------------------------------------------

def _normalize_smoothing(smoothing, n: int) -> list[bool]:
    if isinstance(smoothing, str):
        smoothing = list(smoothing)
    out = []
    for x in smoothing:
        if x in ("A", "a", True, 1):
            out.append(True)
        elif x in ("B", "b", False, 0, -1):
            out.append(False)
        else:
            raise ValueError(f"smoothing choice must be 'A' or 'B', got {x!r}")
    if len(out) != n:
        raise ValueError(f"smoothing has {len(out)} choices for {n} crossings")
    return out


def _resolve_flat(flat, N, n, is_a, free_loops):
    visited = bytearray(4 * N)
    image = [0] * (2 * n)
    base = 4 * N
    for lab in range(1, 2 * n + 1):
        if image[lab - 1]:
            continue
        cur = flat[base + lab - 1]
        while cur < base:
            visited[cur] = 1
            c4 = cur & ~3
            s = cur & 3
            p = c4 | (s ^ 1 if is_a[cur >> 2] else 3 - s)
            visited[p] = 1
            cur = flat[p]
        other = cur - base + 1
        image[lab - 1] = other
        image[other - 1] = lab
    loops = free_loops
    for u in range(base):
        if visited[u]:
            continue
        loops += 1
        cur = u
        while True:
            visited[cur] = 1
            s = cur & 3
            p = (cur & ~3) | (s ^ 1 if is_a[cur >> 2] else 3 - s)
            visited[p] = 1
            cur = flat[p]
            if cur == u:
                break
    return loops, image


def resolve(D: LinkoidDiagram, smoothing) -> StateResolution:
    """Smooth every crossing and trace the resulting crossingless diagram."""
    is_a = _normalize_smoothing(smoothing, D.n_crossings)
    flat, N, n = D._flat
    circ, image = _resolve_flat(flat, N, n, is_a, D.free_loops)
    sigma = 2 * sum(is_a) - N
    return StateResolution(circ=circ, pairing=Pairing(image), sigma=sigma,
                           smoothing=tuple("A" if a else "B" for a in is_a))


def enumerate_states(D: LinkoidDiagram, cap: int = DEFAULT_STATE_CAP) -> Iterator[StateResolution]:
    """All ``2**c`` resolutions, A-heavy states first."""
    N = D.n_crossings
    if N > cap:
        raise CapExceeded(
            f"{N} crossings exceed the state-enumeration cap of {cap}; simplify the diagram first",
            N)
    flat, _, n = D._flat
    free = D.free_loops
    for combo in itertools.product((True, False), repeat=N):
        circ, image = _resolve_flat(flat, N, n, combo, free)
        yield StateResolution(circ=circ, pairing=Pairing(image), sigma=2 * sum(combo) - N,
                              smoothing=tuple("A" if a else "B" for a in combo))


# -- rewiring -----------------------------------------------------------------

def _straight_through(crossings: Iterable[int]) -> dict[int, int]:
    through = {}
    for c in crossings:
        for s in range(4):
            through[4 * c + s] = 4 * c + ((s + 2) & 3)
    return through


def _virtualize(nbr: dict[int, int], through: dict[int, int], free_loops: int):
    """Delete the ends in ``through``, routing paths through ``through[end]``.

    Returns the new neighbour map and the updated count of crossingless loops.
    """
    new = {}
    visited = set()
    for e, f in nbr.items():
        if e in through:
            continue
        cur = f
        while cur in through:
            visited.add(cur)
            t = through[cur]
            visited.add(t)
            cur = nbr[t]
        new[e] = cur
    for u in through:
        if u in visited:
            continue
        cur = u
        while True:
            visited.add(cur)
            t = through[cur]
            visited.add(t)
            cur = nbr[t]
            if cur == u:
                break
        free_loops += 1
    return new, free_loops


def _build(nbr: dict[int, int], signs: dict[int, int], free_loops: int = 0) -> LinkoidDiagram:
    """Assemble a diagram from a wiring; crossings renumbered by first traversal."""
    new_index: dict[int, int] = {}
    slot_edge: dict[int, int] = {}
    counter = itertools.count(1)

    def walk(start: int, closed: bool) -> tuple[list[int], int]:
        edges = []
        cur = start
        while True:
            e = next(counter)
            edges.append(e)
            if cur >= 0:
                slot_edge[cur] = e
            nxt = nbr[cur]
            if nxt < 0:
                if closed or (-nxt) % 2:
                    raise DiagramError("orientation mismatch: arc runs into a leg")
                return edges, -nxt
            slot_edge[nxt] = e
            c, s = nxt >> 2, nxt & 3
            if not _slot_is_in(s, signs[c]):
                raise DiagramError(f"orientation mismatch at crossing {c}")
            new_index.setdefault(c, len(new_index))
            cur = 4 * c + _out_of(s)
            if closed and cur == start:
                return edges, 0

    open_comps, labels = [], []
    legs = sorted(-e for e in nbr if e < 0 and (-e) % 2)
    for leg in legs:
        edges, hd = walk(-leg, False)
        open_comps.append(edges)
        labels.append((leg, hd))
    closed_comps = []
    for c in sorted(signs):
        outs = (2, 1 if signs[c] > 0 else 3)
        for s in outs:
            if 4 * c + s not in slot_edge:
                new_index.setdefault(c, len(new_index))
                edges, _ = walk(4 * c + s, True)
                closed_comps.append(edges)
    for _ in range(free_loops):
        closed_comps.append([next(counter)])
    order = sorted(new_index, key=new_index.get)
    crossings = [tuple(slot_edge[4 * c + s] for s in range(4)) for c in order]
    return LinkoidDiagram(open_components=open_comps, closed_components=closed_comps,
                          crossings=crossings, signs=[signs[c] for c in order], labels=labels)


def _wiring_of(D: LinkoidDiagram) -> tuple[dict[int, int], dict[int, int], int]:
    return dict(D._wiring.nbr), dict(enumerate(D.signs)), D.free_loops


# -- local operations ---------------------------------------------------------

def _switched_quad(quad, sign):
    a, b, c, d = quad
    return (d, a, b, c) if sign > 0 else (b, c, d, a)


def switch_crossing(D: LinkoidDiagram, i: int) -> LinkoidDiagram:
    """Exchange over and under at crossing ``i`` (0-based)."""
    if not 0 <= i < D.n_crossings:
        raise IndexError(f"crossing index {i} out of range 0..{D.n_crossings - 1}")
    crossings = list(D.crossings)
    signs = list(D.signs)
    crossings[i] = _switched_quad(crossings[i], signs[i])
    signs[i] = -signs[i]
    return LinkoidDiagram(D.open_components, D.closed_components, crossings, signs, D.labels)


def mirror(D: LinkoidDiagram) -> LinkoidDiagram:
    """Switch every crossing."""
    crossings = [_switched_quad(q, s) for q, s in zip(D.crossings, D.signs)]
    return LinkoidDiagram(D.open_components, D.closed_components, crossings,
                          [-s for s in D.signs], D.labels)


def smooth_crossing(D: LinkoidDiagram, i: int, kind: str = "oriented") -> LinkoidDiagram:
    """Replace crossing ``i`` by its ``"A"``, ``"B"`` or orientation-respecting smoothing.

    Endpoint labels are kept, so a component of the result may run from the
    leg of one original component to the head of another.
    """
    if not 0 <= i < D.n_crossings:
        raise IndexError(f"crossing index {i} out of range 0..{D.n_crossings - 1}")
    sign = D.signs[i]
    if kind == "oriented":
        kind = "A" if sign > 0 else "B"
    if kind == "A":
        pairs = ((0, 1), (2, 3))
    elif kind == "B":
        pairs = ((0, 3), (1, 2))
    else:
        raise ValueError(f"unknown smoothing {kind!r}")
    if kind in ("A", "B") and _needs_orientation_fix(pairs, sign):
        raise DiagramError("this smoothing is incompatible with the strand orientations; "
                           "use the oriented smoothing")
    nbr, signs, free = _wiring_of(D)
    through = {}
    for a, b in pairs:
        through[4 * i + a] = 4 * i + b
        through[4 * i + b] = 4 * i + a
    nbr, free = _virtualize(nbr, through, free)
    del signs[i]
    return _build(nbr, signs, free)


def _needs_orientation_fix(pairs, sign) -> bool:
    # a smoothing keeps orientations iff each joined pair is one in-slot and one out-slot
    return any(_slot_is_in(a, sign) == _slot_is_in(b, sign) for a, b in pairs)


def _kink_twist(s: int, t: int) -> int:
    return 1 if {s, t} in ({0, 1}, {2, 3}) else -1


def simplify(D: LinkoidDiagram) -> tuple[LinkoidDiagram, int]:
    """Remove Ω1 kinks and Ω2 bigons until none are left.

    Returns the reduced diagram and the signed kink tally ``twist`` with
    ``bracket(D) == (-A**3)**twist * bracket(reduced)``. Only patterns whose
    arcs run between crossings are touched, so no move disk contains an
    endpoint.
    """
    nbr, signs, free = _wiring_of(D)
    twist = 0
    changed = True
    while changed:
        changed = False
        for c in sorted(signs):
            if c not in signs:
                continue
            move = _find_kink(nbr, c)
            if move is not None:
                twist += move
                nbr, free = _virtualize(nbr, _straight_through([c]), free)
                del signs[c]
                changed = True
                continue
            other = _find_bigon(nbr, c)
            if other is not None:
                nbr, free = _virtualize(nbr, _straight_through([c, other]), free)
                del signs[c], signs[other]
                changed = True
    if not changed and len(signs) == D.n_crossings:
        return D, 0
    return _build(nbr, signs, free), twist


def _find_kink(nbr, c):
    for s in range(4):
        v = nbr[4 * c + s]
        if v >= 0 and v >> 2 == c and ((v & 3) - s) % 2:
            assert v >= 0 and 4 * c + s >= 0  # both ends are crossing slots
            return _kink_twist(s, v & 3)
    return None


def _find_bigon(nbr, c):
    for i in range(4):
        v = nbr[4 * c + i]
        if v < 0:
            continue
        y, j = v >> 2, v & 3
        if y == c or (i - j) % 2:
            continue
        if nbr[4 * c + ((i + 1) & 3)] == 4 * y + ((j - 1) & 3):
            return y
    return None


# -- faces and planarity ---------------------------------------------------

def faces(D: LinkoidDiagram) -> list[list[int]]:
    """Faces as cycles of departure ends (the face lies right of each arc)."""
    nbr = D._wiring.nbr
    seen = set()
    out = []
    for start in sorted(nbr):
        if start in seen:
            continue
        face = []
        u = start
        while u not in seen:
            seen.add(u)
            face.append(u)
            v = nbr[u]
            u = v if v < 0 else (v & ~3) | ((v + 1) & 3)
        out.append(face)
    return out


def check_planar(D: LinkoidDiagram) -> None:
    """Raise ``DiagramError`` unless Euler's formula holds on the sphere."""
    nbr = D._wiring.nbr
    if not nbr:
        return
    vertices = {e >> 2 if e >= 0 else ("end", e) for e in nbr}
    uf = UnionFind(vertices)
    for e, f in nbr.items():
        uf.union(e >> 2 if e >= 0 else ("end", e), f >> 2 if f >= 0 else ("end", f))
    V = len(vertices)
    E = len(nbr) // 2
    F = len(faces(D))
    C = len(uf.classes())
    # faces are traced per connected piece, so each piece is its own sphere
    if V - E + F != 2 * C:
        raise DiagramError(
            f"diagram is not planar-realizable on the sphere (V-E+F={V - E + F}, components={C})")


# -- codes and signatures ----------------------------------------------------

def _component_passages(D: LinkoidDiagram):
    w = D._wiring
    opens = []
    for comp in D.open_components:
        opens.append([w.head[e] for e in comp[:-1]])
    closed = []
    for comp in D.closed_components:
        if len(comp) == 1 and comp[0] not in w.head:
            continue
        closed.append([w.head[e] for e in comp])
    return opens, closed


def _encode(passages, index, signs):
    code = []
    for end in passages:
        c = end >> 2
        if c not in index:
            index[c] = len(index)
        code.append((index[c], (end & 3) % 2, signs[c]))
    return tuple(code)


def walk_code(D: LinkoidDiagram) -> tuple:
    """Signed over/under Gauss code in stored component order.

    Two diagrams with equal codes have identical PD codes up to relabeling.
    """
    opens, closed = _component_passages(D)
    index: dict[int, int] = {}
    return ("L1", D.labels, D.free_loops,
            tuple(_encode(p, index, D.signs) for p in opens),
            tuple(_encode(p, index, D.signs) for p in closed))


def signature(D: LinkoidDiagram, max_permuted: int = 4) -> tuple:
    """Canonical cache key: least code over closed-component order and starts.

    Open components keep their label order. Closed-component orders are
    searched exhaustively when there are at most ``max_permuted`` of them;
    each component's starting point is then chosen greedily, which is exact
    because every component contributes a fixed-length block.
    """
    opens, closed = _component_passages(D)
    index: dict[int, int] = {}
    open_code = tuple(_encode(p, index, D.signs) for p in opens)
    orders = (itertools.permutations(range(len(closed)))
              if len(closed) <= max_permuted else [tuple(range(len(closed)))])
    best = None
    for order in orders:
        idx = dict(index)
        blocks = []
        for k in order:
            p = closed[k]
            best_block, best_idx = None, None
            for r in range(len(p)):
                trial = dict(idx)
                block = _encode(p[r:] + p[:r], trial, D.signs)
                if best_block is None or block < best_block:
                    best_block, best_idx = block, trial
            blocks.append(best_block)
            idx = best_idx
        cand = tuple(blocks)
        if best is None or cand < best:
            best = cand
    return ("L1", D.labels, D.free_loops, open_code, best or ())


# -- text and JSON formats ---------------------------------------------------

_HEADER = "linkoid v1"


def _passage_tokens(D: LinkoidDiagram, comp, closed: bool) -> list[str]:
    w = D._wiring
    tokens = []
    steps = comp if closed else comp[:-1]
    for i, e in enumerate(comp):
        tokens.append(str(e))
        if i < len(steps):
            h = w.head[e]
            tokens.append(f"X{(h >> 2) + 1}.{'u' if (h & 3) == 0 else 'o'}")
    return tokens


def format_diagram(D: LinkoidDiagram) -> str:
    lines = [_HEADER]
    standard = D.has_standard_labels
    for j, comp in enumerate(D.open_components):
        lab = "" if standard else f" ({D.labels[j][0]} {D.labels[j][1]})"
        lines.append(f"open {j + 1}{lab}: " + " ".join(_passage_tokens(D, comp, False)))
    for j, comp in enumerate(D.closed_components):
        free = len(comp) == 1 and comp[0] not in D._wiring.head
        toks = [str(comp[0])] if free else _passage_tokens(D, comp, True)
        lines.append(f"closed {j + 1}: " + " ".join(toks))
    for c, (quad, sign) in enumerate(zip(D.crossings, D.signs)):
        lines.append(f"crossing X{c + 1}: ({' '.join(map(str, quad))}) {sign:+d}")
    return "\n".join(lines) + "\n"


def _label_token(tok: str):
    return int(tok) if re.fullmatch(r"-?\d+", tok) else tok


_OPEN_RE = re.compile(r"^open\s+(\d+)\s*(?:\(\s*(\d+)\s+(\d+)\s*\))?\s*:\s*(.*)$")
_CLOSED_RE = re.compile(r"^closed\s+(\d+)\s*:\s*(.*)$")
_CROSS_RE = re.compile(r"^crossing\s+(\S+)\s*:\s*\(([^)]*)\)\s*([+-]?\d+)?\s*$")


def _assemble(open_walks, closed_walks, records, labels) -> LinkoidDiagram:
    """Build a diagram from walks like ``[a0, 'X1.u', a1]`` and crossing records."""
    names = list(records)
    name_index = {nm: i for i, nm in enumerate(names)}
    passages: dict[str, dict[str, tuple]] = {nm: {} for nm in names}

    def parse_walk(walk, closed):
        if not walk:
            raise DiagramError("empty component walk")
        edges, steps = [], []
        expect_edge = True
        for tok in walk:
            tok = str(tok)
            m = re.fullmatch(r"(.+)\.([uo])", tok)
            if expect_edge:
                if m:
                    raise DiagramError(f"expected an arc label, got passage {tok!r}")
                edges.append(_label_token(tok))
            else:
                if not m:
                    raise DiagramError(f"expected a crossing passage like X1.u, got {tok!r}")
                steps.append((m.group(1), m.group(2)))
            expect_edge = not expect_edge
        if closed:
            if len(steps) not in (len(edges), 0) or (not steps and len(edges) != 1):
                raise DiagramError("a closed walk must alternate arcs and passages, ending on a passage")
        elif len(steps) != len(edges) - 1:
            raise DiagramError("an open walk must start and end with an arc")
        for k, (nm, kind) in enumerate(steps):
            if nm not in passages:
                raise DiagramError(f"passage through undeclared crossing {nm!r}")
            if kind in passages[nm]:
                raise DiagramError(f"crossing {nm!r} passed twice as {'under' if kind == 'u' else 'over'}")
            prev, nxt = edges[k], edges[(k + 1) % len(edges)]
            passages[nm][kind] = (prev, nxt)
        return edges

    opens = [parse_walk(w, False) for w in open_walks]
    closeds = [parse_walk(w, True) for w in closed_walks]

    crossings, signs = [], []
    for nm in names:
        quad, given = records[nm]
        quad = tuple(_label_token(str(x)) for x in quad)
        if len(quad) != 4:
            raise DiagramError(f"crossing {nm} lists {len(quad)} arc-ends, expected 4")
        p = passages[nm]
        if set(p) != {"u", "o"}:
            raise DiagramError(f"crossing {nm} must be passed once under and once over")
        u_in, u_out = p["u"]
        if quad[0] != u_in or quad[2] != u_out:
            raise DiagramError(
                f"orientation mismatch at crossing {nm}: under-strand {u_in}->{u_out} "
                f"does not occupy slots 0 and 2 of {quad}")
        o_in, o_out = p["o"]
        pos = quad[3] == o_in and quad[1] == o_out
        neg = quad[1] == o_in and quad[3] == o_out
        if not (pos or neg):
            raise DiagramError(f"orientation mismatch at crossing {nm}: over-strand "
                               f"{o_in}->{o_out} does not occupy slots 1 and 3 of {quad}")
        if pos and neg:
            if given is None:
                raise DiagramError(f"crossing {nm} needs an explicit sign")
            sign = given
        else:
            sign = 1 if pos else -1
            if given is not None and given != sign:
                raise DiagramError(f"crossing {nm}: declared sign {given:+d} contradicts "
                                   f"strand orientations (computed {sign:+d})")
        crossings.append(quad)
        signs.append(sign)
    del name_index
    D = LinkoidDiagram(open_components=opens, closed_components=closeds,
                       crossings=crossings, signs=signs, labels=labels)
    check_planar(D)
    return D


def parse_diagram(code: str) -> LinkoidDiagram:
    """Parse the text format (or its JSON equivalent) into a validated diagram."""
    stripped = code.lstrip()
    if stripped.startswith("{"):
        try:
            return diagram_from_json(json.loads(code))
        except json.JSONDecodeError as exc:
            raise DiagramError(f"malformed JSON: {exc}") from None
    lines = [ln.split("#", 1)[0].strip() for ln in code.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines or lines[0] != _HEADER:
        raise DiagramError(f"missing header line {_HEADER!r}")
    opens: dict[int, tuple] = {}
    closeds: dict[int, list] = {}
    records: dict[str, tuple] = {}
    for ln in lines[1:]:
        if m := _OPEN_RE.match(ln):
            j = int(m.group(1))
            lab = (int(m.group(2)), int(m.group(3))) if m.group(2) else None
            if j in opens:
                raise DiagramError(f"open component {j} declared twice")
            opens[j] = (m.group(4).split(), lab)
        elif m := _CLOSED_RE.match(ln):
            j = int(m.group(1))
            if j in closeds:
                raise DiagramError(f"closed component {j} declared twice")
            closeds[j] = m.group(2).split()
        elif m := _CROSS_RE.match(ln):
            nm = m.group(1)
            if nm in records:
                raise DiagramError(f"crossing {nm} declared twice")
            records[nm] = (m.group(2).split(), int(m.group(3)) if m.group(3) else None)
        else:
            raise DiagramError(f"unrecognized line: {ln!r}")
    if sorted(opens) != list(range(1, len(opens) + 1)):
        raise DiagramError("open components must be numbered 1..n")
    if sorted(closeds) != list(range(1, len(closeds) + 1)):
        raise DiagramError("closed components must be numbered 1..m")
    walks = [opens[j][0] for j in sorted(opens)]
    labs = [opens[j][1] for j in sorted(opens)]
    labels = None
    if any(lab is not None for lab in labs):
        labels = [lab if lab is not None else (2 * j + 1, 2 * j + 2) for j, lab in enumerate(labs)]
    return _assemble(walks, [closeds[j] for j in sorted(closeds)], records, labels)


def diagram_to_json(D: LinkoidDiagram) -> dict:
    opens = []
    for j, comp in enumerate(D.open_components):
        opens.append({"walk": _passage_tokens(D, comp, False), "labels": list(D.labels[j])})
    closeds = []
    for comp in D.closed_components:
        free = len(comp) == 1 and comp[0] not in D._wiring.head
        closeds.append({"walk": [str(comp[0])] if free else _passage_tokens(D, comp, True)})
    crossings = [{"name": f"X{c + 1}", "arcs": [str(x) for x in q], "sign": s}
                 for c, (q, s) in enumerate(zip(D.crossings, D.signs))]
    return {"format": "linkoid", "version": 1, "open": opens, "closed": closeds,
            "crossings": crossings}


def diagram_from_json(obj: dict) -> LinkoidDiagram:
    if obj.get("format") != "linkoid" or obj.get("version") != 1:
        raise DiagramError("JSON diagram must have format 'linkoid' and version 1")
    try:
        records = {}
        for rec in obj.get("crossings", []):
            if rec["name"] in records:
                raise DiagramError(f"crossing {rec['name']} declared twice")
            records[rec["name"]] = (rec["arcs"], rec.get("sign"))
        opens = obj.get("open", [])
        labels = [tuple(o["labels"]) for o in opens] if all("labels" in o for o in opens) else None
        return _assemble([o["walk"] for o in opens], [c["walk"] for c in obj.get("closed", [])],
                         records, labels)
    except (KeyError, TypeError) as exc:
        raise DiagramError(f"malformed JSON diagram: {exc!r}") from None
