"""Kauffman bracket and Jones polynomial of linkoid diagrams.

Two evaluation routes are provided.

``states``
    Sum over all ``2**c`` smoothings of ``A**sigma * d**(circ - 1 + cyc)``,
    where ``cyc`` counts segment cycles of the state pairing against the
    head-leg pairing. Simple, and the reference implementation.

``contract``
    Join every head to its matching leg (this turns each segment cycle into
    one ordinary loop) and evaluate the ordinary bracket of the resulting
    closed diagram one crossing at a time. Partial results are merged by the
    way the already-processed crossings connect the remaining ones, so the
    work grows with the width of the diagram rather than with ``2**c``.

Both routes first strip Ω1 kinks and Ω2 bigons.
"""

from __future__ import annotations

import threading
from collections import OrderedDict
from dataclasses import dataclass

from .diagram import (
    DEFAULT_STATE_CAP,
    DiagramError,
    LinkoidDiagram,
    _build,
    _virtualize,
    _wiring_of,
    check_planar,
    enumerate_states,
    faces,
    signature,
    simplify,
    smooth_crossing,
    switch_crossing,
    writhe,
)
from .poly import LaurentPoly, d_power, writhe_normalize
from .segcycle import cycle_count

__all__ = [
    "BracketResult",
    "BracketCache",
    "bracket",
    "evaluate",
    "jones",
    "bracket_states",
    "bracket_contract",
    "close_linkoid",
    "skein_check",
    "default_cache",
]

#: diagrams with at most this many crossings (after simplification) are summed state by state
ENUM_THRESHOLD = 6


@dataclass(frozen=True)
class BracketResult:
    bracket: LaurentPoly
    writhe: int
    jones_A: LaurentPoly
    states_evaluated: int
    cache_hit: bool


class BracketCache:
    """Thread-safe LRU map from canonical signature to bracket."""

    def __init__(self, maxsize: int = 100_000):
        self.maxsize = maxsize
        self._data: OrderedDict = OrderedDict()
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0

    def get(self, key):
        with self._lock:
            if key in self._data:
                self._data.move_to_end(key)
                self.hits += 1
                return self._data[key]
            self.misses += 1
            return None

    def put(self, key, value):
        with self._lock:
            self._data[key] = value
            self._data.move_to_end(key)
            while len(self._data) > self.maxsize:
                self._data.popitem(last=False)

    def clear(self):
        with self._lock:
            self._data.clear()
            self.hits = self.misses = 0

    def __len__(self):
        return len(self._data)


default_cache = BracketCache()


# -- state sum -----------------------------------------------------------------

def bracket_states(D: LinkoidDiagram, cap: int = DEFAULT_STATE_CAP) -> tuple[LaurentPoly, int]:
    """State-sum bracket of ``D`` as given (no simplification)."""
    terms: dict[int, int] = {}
    HL = D.head_leg() if D.n_open else None
    count = 0
    for st in enumerate_states(D, cap):
        cyc = cycle_count(st.pairing, HL) if HL is not None else 0
        for k, c in d_power(st.circ - 1 + cyc).items():
            terms[k + st.sigma] = terms.get(k + st.sigma, 0) + c
        count += 1
    return LaurentPoly(terms), count


# -- contraction ---------------------------------------------------------------

def _abstract_closure(D: LinkoidDiagram):
    """Wiring of the closed diagram where head ``2i`` is joined to leg ``2i-1``."""
    nbr, signs, free = _wiring_of(D)
    through = {}
    for i in range(1, D.n_open + 1):
        through[-(2 * i - 1)] = -(2 * i)
        through[-(2 * i)] = -(2 * i - 1)
    if through:
        nbr, free = _virtualize(nbr, through, free)
    return nbr, sorted(signs), free


def _greedy_order(nbr, crossings):
    remaining = set(crossings)
    done: set[int] = set()
    order = []
    while remaining:
        best, best_score = None, -1
        for c in sorted(remaining):
            score = sum(1 for s in range(4) if (nbr[4 * c + s] >> 2) in done
                        or nbr[4 * c + s] >> 2 == c)
            if score > best_score:
                best, best_score = c, score
        order.append(best)
        done.add(best)
        remaining.discard(best)
    return order


def _add_into(target: dict, key, poly: dict):
    cur = target.get(key)
    if cur is None:
        target[key] = dict(poly)
        return
    for k, c in poly.items():
        v = cur.get(k, 0) + c
        if v:
            cur[k] = v
        else:
            cur.pop(k, None)


_SMOOTHINGS = (((0, 1), (2, 3), 1), ((0, 3), (1, 2), -1))


def _contract(nbr: dict[int, int], crossings: list[int], free_loops: int) -> tuple[dict, int]:
    """Ordinary bracket (as an exponent dict) of a closed crossing wiring."""
    if not crossings:
        return dict(d_power(free_loops - 1).terms), 1
    order = _greedy_order(nbr, crossings)
    processed: set[int] = set()
    if free_loops:
        start = (((), True), dict(d_power(free_loops - 1).terms))
    else:
        start = (((), False), {0: 1})
    states = {start[0]: start[1]}
    work = 0
    for c in order:
        slots = [4 * c + s for s in range(4)]
        new_states: dict = {}
        for (key, seen), poly in states.items():
            m = {}
            for a, b in key:
                m[a] = b
                m[b] = a
            outer = {}
            for u in slots:
                v = nbr[u]
                outer[u] = m[u] if (v >> 2) in processed else v
            for p1, p2, sigma in _SMOOTHINGS:
                work += 1
                partner = {4 * c + p1[0]: 4 * c + p1[1], 4 * c + p1[1]: 4 * c + p1[0],
                           4 * c + p2[0]: 4 * c + p2[1], 4 * c + p2[1]: 4 * c + p2[0]}
                visited = set()
                new_pairs = []
                for u in slots:
                    if u in visited or (outer[u] >> 2) == c:
                        continue
                    # walk inward from the far end of u's outer connection
                    visited.add(u)
                    cur = partner[u]
                    visited.add(cur)
                    while (outer[cur] >> 2) == c:
                        nxt = outer[cur]
                        visited.add(nxt)
                        cur = partner[nxt]
                        visited.add(cur)
                    a, b = outer[u], outer[cur]
                    new_pairs.append((a, b) if a < b else (b, a))
                loops = 0
                for u in slots:
                    if u in visited:
                        continue
                    loops += 1
                    cur = u
                    while True:
                        visited.add(cur)
                        p = partner[cur]
                        visited.add(p)
                        cur = outer[p]
                        if cur == u:
                            break
                rest = [pr for pr in key if (pr[0] >> 2) != c and (pr[1] >> 2) != c]
                new_key = tuple(sorted(rest + new_pairs))
                out = {k + sigma: v for k, v in poly.items()}
                now_seen = seen
                for _ in range(loops):
                    if now_seen:
                        nxt_poly = {}
                        for k, v in out.items():
                            nxt_poly[k + 2] = nxt_poly.get(k + 2, 0) - v
                            nxt_poly[k - 2] = nxt_poly.get(k - 2, 0) - v
                        out = {k: v for k, v in nxt_poly.items() if v}
                    else:
                        now_seen = True
                _add_into(new_states, (new_key, now_seen), out)
        processed.add(c)
        states = new_states
    result: dict[int, int] = {}
    for (key, seen), poly in states.items():
        assert not key and seen
        for k, v in poly.items():
            result[k] = result.get(k, 0) + v
    return result, work


def bracket_contract(D: LinkoidDiagram) -> tuple[LaurentPoly, int]:
    """Bracket of ``D`` as given, via the abstract closure and contraction."""
    nbr, crossings, free = _abstract_closure(D)
    terms, work = _contract(nbr, crossings, free)
    return LaurentPoly(terms), work


# -- public entry points ------------------------------------------------------

def _twist_factor(twist: int) -> LaurentPoly:
    # (-A^3)^twist
    return writhe_normalize(LaurentPoly({0: 1}), -twist)


def evaluate(D: LinkoidDiagram, method: str = "auto", cache: BracketCache | None = None,
             cap: int = DEFAULT_STATE_CAP) -> tuple[LaurentPoly, int, bool]:
    """Return ``(bracket, states_evaluated, cache_hit)``.

    ``method`` is ``"auto"``, ``"states"`` or ``"contract"``. The state route
    refuses diagrams with more than ``cap`` crossings after simplification.
    The contraction route counts one unit of work per partial state and
    smoothing.
    """
    if D.n_components == 0:
        raise DiagramError("empty collection: the diagram has no components")
    if method not in ("auto", "states", "contract"):
        raise ValueError(f"unknown bracket method {method!r}")
    key = None
    if cache is not None:
        key = signature(D)
        hit = cache.get(key)
        if hit is not None:
            return hit, 0, True
    reduced, twist = simplify(D)
    if method == "states" or (method == "auto" and reduced.n_crossings <= ENUM_THRESHOLD):
        core, work = bracket_states(reduced, cap)
    else:
        core, work = bracket_contract(reduced)
    result = core * _twist_factor(twist) if twist else core
    if cache is not None:
        cache.put(key, result)
    return result, work, False


def bracket(D: LinkoidDiagram, method: str = "auto", cache: BracketCache | None = None,
            cap: int = DEFAULT_STATE_CAP) -> LaurentPoly:
    """Segment-cycle Kauffman bracket of ``D`` with exact integer coefficients."""
    return evaluate(D, method, cache, cap)[0]


def jones(D: LinkoidDiagram, method: str = "auto", cache: BracketCache | None = None,
          cap: int = DEFAULT_STATE_CAP) -> BracketResult:
    """Writhe-normalized bracket ``(-A**3)**(-w) * <D>``, in the variable ``A``."""
    br, work, hit = evaluate(D, method, cache, cap)
    w = writhe(D)
    return BracketResult(bracket=br, writhe=w, jones_A=writhe_normalize(br, w),
                         states_evaluated=work, cache_hit=hit)


# -- closure and skein ---------------------------------------------------------

def close_linkoid(D: LinkoidDiagram) -> LinkoidDiagram:
    """Join each head to its own leg by an arc crossing nothing.

    Raises ``DiagramError`` when some component's endpoints do not share a
    face, or when the closing arcs inside one face would have to cross.
    """
    ends_face = {}
    position = {}
    for fi, face in enumerate(faces(D)):
        for pos, u in enumerate(face):
            if u < 0:
                ends_face[-u] = fi
                position[-u] = pos
    chords_by_face: dict[int, list] = {}
    for leg, hd in D.labels:
        if ends_face[leg] != ends_face[hd]:
            raise DiagramError(
                f"not a valid crossing-free closure: endpoints {leg} and {hd} lie in different faces")
        a, b = sorted((position[leg], position[hd]))
        chords_by_face.setdefault(ends_face[leg], []).append((a, b))
    for chords in chords_by_face.values():
        for i, (a, b) in enumerate(chords):
            for c, d in chords[i + 1:]:
                if (a < c < b) != (a < d < b):
                    raise DiagramError(
                        "not a valid crossing-free closure: closing arcs would cross")
    nbr, signs, free = _wiring_of(D)
    through = {}
    for leg, hd in D.labels:
        through[-leg] = -hd
        through[-hd] = -leg
    nbr, free = _virtualize(nbr, through, free)
    out = _build(nbr, signs, free)
    check_planar(out)
    return out


def skein_check(D: LinkoidDiagram, site: int, method: str = "auto") -> tuple[LaurentPoly, LaurentPoly]:
    """Both sides of ``t^-1 V(L+) - t V(L-) = (t^1/2 - t^-1/2) V(L0)`` at one crossing.

    ``L+``/``L-`` are ``D`` with crossing ``site`` made positive/negative and
    ``L0`` its oriented smoothing with endpoint labels kept. Polynomials are
    in ``A`` (``t = A**-4``).
    """
    if D.signs[site] > 0:
        plus, minus = D, switch_crossing(D, site)
    else:
        plus, minus = switch_crossing(D, site), D
    zero = smooth_crossing(D, site, "oriented")
    vp = jones(plus, method).jones_A
    vm = jones(minus, method).jones_A
    v0 = jones(zero, method).jones_A
    lhs = vp.shift(4) - vm.shift(-4)
    rhs = (LaurentPoly({-2: 1, 2: -1})) * v0
    return lhs, rhs

