"""Acceptance criteria 1-10 at their stated tolerances.

Each test records a one-line verdict that is printed in the terminal
summary, then asserts it.
"""

import random
import time
from fractions import Fraction

import numpy as np
import pytest

from linkoid.bracket import bracket, bracket_contract, bracket_states, close_linkoid, jones
from linkoid.diagram import DiagramError, faces, parse_diagram, simplify, trivial_linkoid
from linkoid.fixtures import read_fixture
from linkoid.moves import (
    add_bigon,
    add_kink,
    apply_triangle_move,
    braid_linkoid,
    random_pure_braid_word,
    scramble,
    triangle_moves,
)
from linkoid.poly import LaurentPoly, TExponent, d_power, from_t, to_t
from linkoid.projection import interpolate_closure, parse_curves, project
from linkoid.segcycle import all_pairings, cycle_count, head_leg_pairing, segment_cycles
from linkoid.sphere import SamplerConfig, default_workers, directions, estimate_jones

from conftest import random_mixed_diagram
from oracles import orbit_classes

BORROMEAN = parse_curves(read_fixture("borromean_open.txt"))


def _row(terms):
    return {Fraction(k): v for k, v in terms.items()}


# [PAPER] sphere-averaged Jones polynomials of the open Borromean family, keyed by t exponent
REFERENCE_ROWS = {
    0.0: _row({-3: -0.26, -2: 1.49, "-3/2": 1.84, -1: 0.16, "-1/2": -0.38,
               0: 0.72, "1/2": 0.67, 1: -0.18, "3/2": -0.22, 2: 0.22, 3: -0.07}),
    0.22: _row({-3: -0.59, -2: 2.15, "-3/2": 1.83, -1: -0.81, "-1/2": -1.02,
                0: 1.39, "1/2": 1.59, 1: -0.21, "3/2": -0.53, 2: -0.27, 3: -0.08}),
    0.44: _row({-3: -0.92, -2: 2.83, "-3/2": 1.67, -1: -1.86, "-1/2": -1.53,
                0: 2.27, "1/2": 2.39, 1: -0.45, "3/2": -0.85, 2: 0.53, 3: -0.16}),
    0.67: _row({-3: -0.98, -2: 2.95, "-3/2": 1.45, -1: -2.04, "-1/2": -1.4,
                0: 2.60, "1/2": 2.22, 1: -0.68, "3/2": -0.78, 2: 0.86, 3: -0.27}),
    0.68: _row({-3: -0.98, -2: 2.94, "-3/2": 1.43, -1: -2.02, "-1/2": -1.39,
                0: 2.60, "1/2": 2.19, 1: -0.68, "3/2": -0.77, 2: 0.88, 3: -0.28}),
    0.70: _row({-3: -0.98, -2: 2.96, "-3/2": 1.38, -1: -2.04, "-1/2": -1.34,
                0: 2.66, "1/2": 2.11, 1: -0.74, "3/2": -0.75, 2: 0.96, 3: -0.31}),
    0.89: _row({-3: -0.99, -2: 2.98, "-3/2": 0.18, -1: -2.06, "-1/2": -0.17,
                0: 3.86, "1/2": 0.35, 1: -1.9, "3/2": -0.15, 2: 2.74, 3: -0.9}),
}
# [PAPER] closed Borromean rings
BORROMEAN_JONES = from_t({TExponent(4 * k): c for k, c in
                          {-3: -1, -2: 3, -1: -2, 0: 4, 1: -2, 2: 3, 3: -1}.items()})
ACCEPTANCE_SAMPLES = 50_000


def _best_time(fn, repeat=20):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def _row_deviation(mean: LaurentPoly, row: dict) -> tuple[float, str]:
    """Largest coefficient gap between ``mean`` and ``row``, unlisted exponents compared to 0."""
    coeffs = {e.value: float(c) for e, c in to_t(mean).items()}
    worst, where = 0.0, ""
    for e in set(coeffs) | set(row):
        gap = abs(coeffs.get(e, 0.0) - row.get(e, 0.0))
        if gap > worst:
            worst, where = gap, f"t^{e}"
    return worst, where


def test_criterion_01_hopf_type_linkoid(criterion):
    D = parse_diagram(read_fixture("hopf_linkoid.pd"))
    res = jones(D)
    exact = (res.bracket == LaurentPoly({4: -1, -4: -1})
             and res.jones_A == LaurentPoly({10: -1, 2: -1}))
    elapsed = _best_time(lambda: jones(D))
    ok = exact and elapsed < 1e-3
    criterion(1, ok, f"bracket {res.bracket}, jones {res.jones_A}, {elapsed * 1e3:.3f} ms")
    assert ok


def test_criterion_02_trivial_linkoids(criterion):
    diagrams = [trivial_linkoid(n) for n in range(1, 7)]
    exact = all(bracket(D) == jones(D).jones_A == d_power(n - 1)
                for n, D in enumerate(diagrams, start=1))
    elapsed = max(_best_time(lambda D=D: jones(D)) for D in diagrams)
    ok = exact and elapsed < 1e-3
    criterion(2, ok, f"d^(n-1) for n=1..6 exact={exact}, slowest {elapsed * 1e3:.3f} ms")
    assert ok


def test_criterion_03_closure_of_pure_braid_linkoids(criterion):
    rng = random.Random(2024)
    t0 = time.perf_counter()
    mismatches = 0
    sizes = []
    for _ in range(100):
        n = rng.randint(2, 4)
        word = []
        while not word:
            word = random_pure_braid_word(rng, n, 10)
        D = braid_linkoid(word, n)
        sizes.append(D.n_crossings)
        assert 0 < D.n_crossings <= 10 and D.n_components <= 4
        C = close_linkoid(D)
        assert C.is_link and C.n_crossings == D.n_crossings
        mismatches += jones(D).jones_A != jones(C).jones_A
    elapsed = time.perf_counter() - t0
    ok = mismatches == 0 and elapsed < 10
    criterion(3, ok, f"100 closures with {min(sizes)}-{max(sizes)} crossings, "
                     f"{mismatches} mismatches, {elapsed:.2f} s")
    assert ok


def _bigons(D, rng):
    options = [(f[i], f[j]) for f in faces(D) for i in range(len(f)) for j in range(len(f)) if i != j]
    rng.shuffle(options)
    for d1, d2 in options:
        try:
            return add_bigon(D, d1, d2, rng.random() < 0.5)
        except DiagramError:
            continue
    return None


def test_criterion_04_move_invariance(criterion):
    rng = random.Random(404)
    t0 = time.perf_counter()
    failures, counts = [], {"O1": 0, "O2": 0, "O3": 0, "chain": 0, "reverse": 0}
    for k in range(200):
        D = random_mixed_diagram(rng, 4, 6)
        br, jo = bracket(D), jones(D).jones_A
        if D._wiring.nbr:
            K = add_kink(D, rng.choice(sorted(D._wiring.nbr)), rng.choice((1, -1)), rng.random() < 0.5)
            counts["O1"] += 1
            if jones(K).jones_A != jo:
                failures.append((k, "O1"))
            R, twist = simplify(K)
            counts["reverse"] += 1
            w = twist
            factor = LaurentPoly({3 * w: -1 if w % 2 else 1})
            if bracket(K) != factor * bracket(R):
                failures.append((k, "O1 reverse"))
        B = _bigons(D, rng)
        if B is not None:
            counts["O2"] += 1
            if bracket(B) != br or jones(B).jones_A != jo:
                failures.append((k, "O2"))
            for face in triangle_moves(B):
                try:
                    T = apply_triangle_move(B, face)
                except DiagramError:
                    continue
                counts["O3"] += 1
                if bracket(T) != br or jones(T).jones_A != jo:
                    failures.append((k, "O3"))
                break
        S = scramble(D, rng, 3)
        counts["chain"] += 1
        if jones(S).jones_A != jo:
            failures.append((k, "chain"))
    elapsed = time.perf_counter() - t0
    ok = not failures and counts["O3"] > 0 and elapsed < 30
    criterion(4, ok, f"moves tried {counts}, {len(failures)} failures, {elapsed:.2f} s")
    assert ok, failures[:5]


def test_criterion_05_enumeration_vs_contraction(criterion):
    rng = random.Random(55)
    t0 = time.perf_counter()
    corpus = []
    while len(corpus) < 100:
        D = random_mixed_diagram(rng, 4, 10)
        if D.n_crossings <= 10:
            corpus.append(D)
    mismatches = sum(bracket_states(D)[0] != bracket_contract(D)[0] for D in corpus)
    elapsed = time.perf_counter() - t0
    largest = max(D.n_crossings for D in corpus)
    ok = mismatches == 0 and elapsed < 30
    criterion(5, ok, f"100 diagrams up to {largest} crossings, {mismatches} mismatches, {elapsed:.2f} s")
    assert ok


def test_criterion_06_closed_borromean(criterion):
    closed = interpolate_closure(BORROMEAN, 1.0)
    t0 = time.perf_counter()
    est = estimate_jones(closed, SamplerConfig(sample_count=1000))
    elapsed = time.perf_counter() - t0
    single = project(closed, np.array([0.0, 0.0, 1.0]))
    small = estimate_jones(closed, SamplerConfig(mode="uniform", sample_count=7, seed=11))
    exact = (est.mean.isclose(BORROMEAN_JONES, 0.0)
             and small.mean.isclose(BORROMEAN_JONES, 0.0)
             and jones(single.diagram).jones_A == BORROMEAN_JONES)
    zero_var = all(v == 0.0 for v in est.stderr.values())
    ok = exact and zero_var and elapsed < 30
    criterion(6, ok, f"exact={exact}, zero variance={zero_var}, N=1000 in {elapsed:.2f} s")
    assert ok


@pytest.fixture(scope="module")
def borromean_rows():
    cfg = SamplerConfig(mode="fibonacci", sample_count=ACCEPTANCE_SAMPLES, workers=default_workers())
    return {s: estimate_jones(interpolate_closure(BORROMEAN, s), cfg) for s in REFERENCE_ROWS}


@pytest.mark.slow
def test_criterion_07_open_borromean(borromean_rows, criterion):
    est = borromean_rows[0.0]
    gap, where = _row_deviation(est.mean, REFERENCE_ROWS[0.0])
    ok = gap <= 0.05 and est.cache_hit_rate >= 0.95
    criterion(7, ok, f"w(0) max gap {gap:.3f} at {where} (tol 0.05), "
                     f"cache hit rate {est.cache_hit_rate:.3f}, {est.wall_time:.0f} s")
    assert est.cache_hit_rate >= 0.95
    assert gap <= 0.05, f"w(0) differs from the table by {gap:.3f} at {where}"


@pytest.mark.slow
def test_criterion_08_intermediate_rows(borromean_rows, criterion):
    gaps = {s: _row_deviation(borromean_rows[s].mean, REFERENCE_ROWS[s]) for s in REFERENCE_ROWS if s > 0}
    worst = max(gaps, key=lambda s: gaps[s][0])
    hit = min(borromean_rows[s].cache_hit_rate for s in gaps)
    summary = ", ".join(f"w({s:g}) {g:.2f}" for s, (g, _) in gaps.items())
    ok = all(g <= 0.1 for g, _ in gaps.values()) and hit >= 0.95
    criterion(8, ok, f"max gaps {summary} (tol 0.1); worst at {gaps[worst][1]}; min hit rate {hit:.3f}")
    assert hit >= 0.95
    assert ok, f"w({worst:g}) differs from the table by {gaps[worst][0]:.3f} at {gaps[worst][1]}"


@pytest.mark.slow
def test_criterion_09_stderr_convergence(criterion):
    # the stderr of one run is itself noisy for rarely seen diagram types,
    # so each N pools a fixed family of seeds (root mean square of stderr)
    sizes, seeds = (1000, 4000, 16000), range(5)
    t0 = time.perf_counter()
    runs = {n: [estimate_jones(BORROMEAN, SamplerConfig(mode="uniform", sample_count=n, seed=s))
                for s in seeds] for n in sizes}
    elapsed = time.perf_counter() - t0
    exps = sorted(set.intersection(*[{e for e, v in est.stderr.items() if v > 0}
                                     for ests in runs.values() for est in ests]))
    slopes = {}
    for e in exps:
        pooled = [np.sqrt(np.mean([est.stderr[e] ** 2 for est in runs[n]])) for n in sizes]
        slopes[e] = float(np.polyfit(np.log(sizes), np.log(pooled), 1)[0])
    bad = {e: s for e, s in slopes.items() if not -0.6 <= s <= -0.4}
    ok = bool(slopes) and not bad and elapsed < 300
    lo, hi = min(slopes.values()), max(slopes.values())
    criterion(9, ok, f"{len(slopes)} coefficients over {len(seeds)} seeds, "
                     f"slopes in [{lo:.3f}, {hi:.3f}], {elapsed:.0f} s")
    assert ok, bad


def test_criterion_10_segment_cycles(criterion):
    t0 = time.perf_counter()
    checked, failures = 0, 0
    for n in range(1, 6):
        HL = head_leg_pairing(n)
        failures += cycle_count(HL, HL) != n
        for J in all_pairings(n):
            classes = segment_cycles(J, HL)
            brute = orbit_classes({a: J(a) for a in range(1, 2 * n + 1)},
                                  {a: HL(a) for a in range(1, 2 * n + 1)})
            failures += not (1 <= len(classes) <= n) or set(classes) != set(brute)
            checked += 1
    elapsed = time.perf_counter() - t0
    ok = failures == 0 and elapsed < 5
    criterion(10, ok, f"{checked} involutions for n<=5, {failures} failures, {elapsed:.2f} s")
    assert ok


def test_fibonacci_lattice_size():
    assert len(directions(SamplerConfig(sample_count=ACCEPTANCE_SAMPLES))) == ACCEPTANCE_SAMPLES
