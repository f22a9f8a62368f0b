"""Golden checks runnable without the test suite (``linkoid selftest``)."""

from __future__ import annotations

from .bracket import jones
from .diagram import parse_diagram, trivial_linkoid
from .fixtures import read_fixture
from .poly import D, LaurentPoly, d_power, from_t, TExponent
from .projection import Projector, interpolate_closure, parse_curves

BORROMEAN_T = {-3: -1, -2: 3, -1: -2, 0: 4, 1: -2, 2: 3, 3: -1}


def _checks():
    hopf = jones(parse_diagram(read_fixture("hopf_linkoid.pd")))
    yield ("cut Hopf link bracket", hopf.bracket == LaurentPoly({4: -1, -4: -1}))
    yield ("cut Hopf link jones", hopf.jones_A == LaurentPoly({10: -1, 2: -1}))
    yield ("trivial linkoids give d^(n-1)",
           all(jones(trivial_linkoid(n)).jones_A == d_power(n - 1) for n in range(1, 7)))
    closed = interpolate_closure(parse_curves(read_fixture("borromean_open.txt")), 1.0)
    outcome = Projector(closed).project([0.0, 0.0, 1.0])
    want = from_t({TExponent(4 * k): c for k, c in BORROMEAN_T.items()})
    yield ("closed Borromean rings from one projection",
           outcome.ok and jones(outcome.diagram).jones_A == want)
    yield ("loop value", D == LaurentPoly({2: -1, -2: -1}))


def run_selftest(stream) -> bool:
    ok = True
    for name, passed in _checks():
        ok &= bool(passed)
        stream.write(f"{'PASS' if passed else 'FAIL'}  {name}\n")
    return ok
