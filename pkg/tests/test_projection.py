import json
import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from linkoid.bracket import jones
from linkoid.diagram import signature
from linkoid.fixtures import read_fixture
from linkoid.projection import (
    Curve,
    CurveSet,
    Projector,
    interpolate_closure,
    parse_curves,
    plane_basis,
    project,
)

from oracles import gauss_linking_number

unit_vectors = st.tuples(*[st.floats(-1, 1)] * 3).filter(
    lambda v: 0.1 < math.sqrt(sum(x * x for x in v))).map(lambda v: np.array(v) / np.linalg.norm(v))

BORROMEAN = parse_curves(read_fixture("borromean_open.txt"))


def rotation(rng):
    q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    return q if np.linalg.det(q) > 0 else -q


def square(center, normal_axis, size=1.0):
    c = np.asarray(center, float)
    a, b = [k for k in range(3) if k != normal_axis]
    pts = []
    for da, db in ((-1, -1), (1, -1), (1, 1), (-1, 1)):
        p = c.copy()
        p[a] += da * size
        p[b] += db * size
        pts.append(tuple(p))
    return pts


@given(unit_vectors)
def test_plane_basis_is_right_handed(xi):
    e1, e2 = plane_basis(xi)
    assert np.allclose([e1 @ e1, e2 @ e2, e1 @ e2, e1 @ xi], [1, 1, 0, 0], atol=1e-12)
    assert np.allclose(np.cross(e1, e2), xi, atol=1e-12)


@pytest.mark.parametrize("xi", [(0, 0, 1), (0.3, -0.2, 0.9), (0.1, 0.5, -0.8)])
def test_skew_segments_give_one_crossing(xi):
    xi = np.array(xi) / np.linalg.norm(xi)
    lower = ((-1, 0, 0), (1, 0, 0))
    upper = ((0, -1, 1), (0, 1, 1))
    res = Projector(CurveSet.from_points([lower, upper])).passages(xi)
    assert res[0] == "ok"
    _, comps, signs = res
    # [DERIVED] the strand with larger depth along xi is over; the sign is
    # the orientation of (over, under) seen from +xi
    depth_lower, depth_upper = 0.0, float(np.dot((0, 0, 1), xi))
    upper_is_over = depth_upper > depth_lower
    assert comps == [[(0, not upper_is_over)], [(0, upper_is_over)]]
    over, under = (np.array((0, 2, 0)), np.array((2, 0, 0)))
    if not upper_is_over:
        over, under = under, over
    assert signs == [int(np.sign(np.cross(over, under) @ xi))]


def test_disjoint_projection_is_trivial():
    C = CurveSet.from_points([((0, 0, 0), (1, 0, 0)), ((0, 1, 0), (1, 1, 0))])
    out = project(C, (0, 0, 1))
    assert out.ok and out.diagram.n_crossings == 0 and out.diagram.n_open == 2


def test_overlapping_segments_are_degenerate():
    C = CurveSet.from_points([((0, 0, 0), (1, 0, 0)), ((0.5, 0, 1), (1.5, 0, 1))])
    assert project(C, (0, 0, 1)).degenerate == "near-parallel"
    assert project(C, (0, 1, 0)).ok


def test_endpoint_on_strand():
    C = CurveSet.from_points([((0, 0, 0), (1, 0, 0)), ((0.5, 0, 1), (0.5, 1, 1))])
    assert project(C, (0, 0, 1)).degenerate == "endpoint-on-strand"


def test_triple_point():
    C = CurveSet.from_points([
        ((-1, 0, 0), (1, 0, 0)),
        ((0, -1, 1), (0, 1, 1)),
        ((-1, -1, 2), (1, 1, 2)),
    ])
    assert project(C, (0, 0, 1)).degenerate == "triple-point"


def test_intersecting_segments_warn_and_tie():
    with pytest.warns(UserWarning, match="intersect"):
        C = CurveSet.from_points([((-1, 0, 0), (1, 0, 0)), ((0, -1, 0), (0, 1, 0))])
        P = Projector(C)
    assert P.project(np.array((0, 0, 1.0))).degenerate == "depth-tie"


def test_projection_rejects_bad_direction():
    with pytest.raises(ValueError):
        project(BORROMEAN, (0, 0, 2))


def test_curve_validation():
    with pytest.raises(ValueError):
        Curve(((0, 0, 0),))
    with pytest.raises(ValueError):
        Curve(((0, 0, 0), (1, 0, 0)), closed=True)
    with pytest.raises(ValueError):
        Curve(((0, 0, 0), (1, 0, float("nan"))))
    with pytest.raises(ValueError):
        Curve(((0, 0), (1, 0)))
    with pytest.raises(ValueError):
        Projector(CurveSet.from_points([((0, 0, 0), (0, 0, 0))]))


@pytest.mark.parametrize("offset, expected", [((1.0, 0, 0), 1), ((5.0, 0, 0), 0)])
def test_inter_component_writhe_is_linking_number(offset, expected):
    a = square((0, 0, 0), 2)
    b = square(offset, 1)
    lk = gauss_linking_number(a, b)
    # [DERIVED] numerical Gauss integral
    assert abs(abs(lk) - expected) < 0.02
    P = Projector(CurveSet.from_points([a, b], closed=True))
    rng = np.random.default_rng(0)
    for _ in range(20):
        xi = rng.normal(size=3)
        xi /= np.linalg.norm(xi)
        res = P.passages(xi)
        if res[0] != "ok":
            continue
        _, comps, signs = res
        shared = {k for k, _ in comps[0]} & {k for k, _ in comps[1]}
        assert sum(signs[k] for k in shared) / 2 == pytest.approx(lk, abs=0.02)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_rotation_equivariance(seed):
    rng = np.random.default_rng(seed)
    R = rotation(rng)
    xi = rng.normal(size=3)
    xi /= np.linalg.norm(xi)
    base = project(BORROMEAN, xi)
    turned = project(BORROMEAN.transformed(R), R @ xi)
    assert base.ok and turned.ok
    assert signature(base.diagram) == signature(turned.diagram)


def test_antipodal_direction_has_same_jones():
    rng = np.random.default_rng(7)
    for _ in range(15):
        xi = rng.normal(size=3)
        xi /= np.linalg.norm(xi)
        a, b = project(BORROMEAN, xi), project(BORROMEAN, -xi)
        if a.ok and b.ok:
            assert jones(a.diagram).jones_A == jones(b.diagram).jones_A


def test_interpolate_closure():
    C = CurveSet.from_points([((0, 0, 0), (2, 0, 0), (2, 2, 0))])
    half = interpolate_closure(C, 0.5)
    assert half.components[0].points[-1] == (1.0, 1.0, 0.0)
    assert not half.components[0].closed
    start = interpolate_closure(C, 0.0)
    assert start.components[0].points[-1] == (2.0, 2.0, 0.0)
    full = interpolate_closure(C, 1.0)
    assert full.components[0].closed
    assert full.components[0].points == C.components[0].points
    with pytest.raises(ValueError):
        interpolate_closure(C, 1.5)
    with pytest.raises(ValueError):
        interpolate_closure(full, 0.5)


def test_borromean_loader():
    assert [len(c.points) for c in BORROMEAN.components] == [16, 9, 8]
    assert BORROMEAN.n_open == 3
    assert BORROMEAN.components[2].points[0] == (6.0, 0.0, 0.5)


def test_curve_text_formats():
    C = parse_curves("loop_closed = [[0,0,0],[1,0,0],[0,1,0]]\nA = [[0,0,1],[1,1,1]]")
    assert [c.closed for c in C.components] == [True, False]
    again = parse_curves(json.dumps(C.to_json()))
    assert again == C
    for bad in ("", "{not json", "X = [[0,0,0],[1,1", '{"components": [{"points": 3}]}'):
        with pytest.raises(ValueError):
            parse_curves(bad)


def test_zero_length_edges_dropped():
    C = CurveSet.from_points([((-1, 0, 0), (-1, 0, 0), (1, 0, 0)), ((0, -1, 1), (0, 1, 1))])
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        out = project(C, (0, 0, 1))
    assert out.diagram.n_crossings == 1
