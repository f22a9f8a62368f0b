"""Projection of 3D polygonal curves to linkoid diagrams.

Curves are recentred on their bounding box and scaled to unit box diagonal
before projecting, so the tolerance ``eps`` is scale-free. For a direction
``xi`` the plane basis ``(e1, e2)`` satisfies ``e1 x e2 = xi``: the diagram is
what an observer at ``+xi`` sees, and the strand with the larger coordinate
along ``xi`` is on top.
"""

from __future__ import annotations

import ast
import json
import re
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .diagram import LinkoidDiagram, _build

__all__ = [
    "Curve",
    "CurveSet",
    "ProjectionOutcome",
    "Projector",
    "DEFAULT_EPS",
    "DEGENERATE_REASONS",
    "project",
    "interpolate_closure",
    "load_curves",
    "parse_curves",
    "plane_basis",
]

DEFAULT_EPS = 1e-9
DEGENERATE_REASONS = ("near-parallel", "triple-point", "endpoint-on-strand",
                      "vertex-coincidence", "depth-tie")


@dataclass(frozen=True)
class Curve:
    points: tuple[tuple[float, float, float], ...]
    closed: bool = False

    def __post_init__(self):
        pts = tuple(tuple(float(x) for x in p) for p in self.points)
        for p in pts:
            if len(p) != 3:
                raise ValueError(f"curve point {p} is not 3-dimensional")
            if not all(np.isfinite(p)):
                raise ValueError(f"curve point {p} is not finite")
        object.__setattr__(self, "points", pts)
        need = 3 if self.closed else 2
        if len(pts) < need:
            kind = "closed" if self.closed else "open"
            raise ValueError(f"an {kind} curve needs at least {need} points, got {len(pts)}")

    def array(self) -> np.ndarray:
        return np.asarray(self.points, dtype=float)


@dataclass(frozen=True)
class CurveSet:
    components: tuple[Curve, ...]

    def __post_init__(self):
        comps = tuple(c if isinstance(c, Curve) else Curve(*c) for c in self.components)
        if not comps:
            raise ValueError("a curve set needs at least one component")
        object.__setattr__(self, "components", comps)

    @classmethod
    def from_points(cls, lists: Sequence[Sequence[Sequence[float]]], closed=False) -> "CurveSet":
        flags = [closed] * len(lists) if isinstance(closed, bool) else list(closed)
        return cls(tuple(Curve(tuple(map(tuple, pts)), f) for pts, f in zip(lists, flags)))

    @property
    def n_open(self) -> int:
        return sum(not c.closed for c in self.components)

    def to_json(self) -> dict:
        return {"components": [{"points": [list(p) for p in c.points], "closed": c.closed}
                               for c in self.components]}

    def transformed(self, matrix) -> "CurveSet":
        m = np.asarray(matrix, dtype=float)
        return CurveSet(tuple(Curve(tuple(map(tuple, c.array() @ m.T)), c.closed)
                              for c in self.components))


@dataclass(frozen=True)
class ProjectionOutcome:
    diagram: LinkoidDiagram | None = None
    degenerate: str | None = None
    where: tuple = ()

    @property
    def ok(self) -> bool:
        return self.diagram is not None


def plane_basis(xi) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal ``(e1, e2)`` spanning the plane normal to ``xi`` with ``e1 x e2 = xi``."""
    xi = np.asarray(xi, dtype=float)
    helper = np.zeros(3)
    helper[int(np.argmin(np.abs(xi)))] = 1.0
    e1 = np.cross(xi, helper)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(xi, e1)
    return e1, e2


class Projector:
    """Precomputed segment geometry of a curve set, projected on demand."""

    def __init__(self, curves: CurveSet, eps: float = DEFAULT_EPS):
        if eps <= 0:
            raise ValueError("eps must be positive")
        self.curves = curves
        self.eps = eps
        arrays = [c.array() for c in curves.components]
        allpts = np.vstack(arrays)
        lo, hi = allpts.min(axis=0), allpts.max(axis=0)
        center = (lo + hi) / 2
        diag = float(np.linalg.norm(hi - lo)) or 1.0
        verts, seg_a, seg_b, seg_comp, seg_pos = [], [], [], [], []
        self.open_flags = []
        self.is_endpoint = []
        for k, (arr, curve) in enumerate(zip(arrays, curves.components)):
            pts = (arr - center) / diag
            # drop zero-length edges
            keep = [0] + [i for i in range(1, len(pts))
                          if np.linalg.norm(pts[i] - pts[i - 1]) > 0.0]
            pts = pts[keep]
            if curve.closed and len(pts) > 1 and np.linalg.norm(pts[-1] - pts[0]) == 0.0:
                pts = pts[:-1]
            if len(pts) < (3 if curve.closed else 2):
                raise ValueError(f"component {k + 1} collapses to too few distinct points")
            base = len(verts)
            verts.extend(pts)
            m = len(pts)
            nseg = m if curve.closed else m - 1
            for i in range(nseg):
                seg_a.append(base + i)
                seg_b.append(base + (i + 1) % m)
                seg_comp.append(k)
                seg_pos.append(i)
            self.open_flags.append(not curve.closed)
            ends = [False] * m
            if not curve.closed:
                ends[0] = ends[-1] = True
            self.is_endpoint.extend(ends)
        self.verts = np.asarray(verts)
        self.seg_a = np.asarray(seg_a)
        self.seg_b = np.asarray(seg_b)
        self.seg_comp = np.asarray(seg_comp)
        self.seg_pos = np.asarray(seg_pos)
        S = len(seg_a)
        adjacent = np.zeros((S, S), dtype=bool)
        for i in range(S):
            for j in range(S):
                if i != j and {seg_a[i], seg_b[i]} & {seg_a[j], seg_b[j]}:
                    adjacent[i, j] = True
        iu, ju = np.triu_indices(S, k=1)
        mask = ~adjacent[iu, ju]
        self.pi, self.pj = iu[mask], ju[mask]
        self.ai, self.aj = iu[~mask], ju[~mask]
        self._check_simple()

    def _check_simple(self):
        # segments of a component should not meet in 3-space; only warn
        P = self.verts
        a, b = P[self.seg_a], P[self.seg_b]
        for i, j in zip(self.pi, self.pj):
            d1, d2 = b[i] - a[i], b[j] - a[j]
            n = np.cross(d1, d2)
            nn = np.linalg.norm(n)
            if nn < 1e-15:
                continue
            if abs(np.dot(a[j] - a[i], n)) / nn < self.eps:
                w = a[j] - a[i]
                t = np.dot(np.cross(w, d2), n) / nn**2
                u = np.dot(np.cross(w, d1), n) / nn**2
                if 0 <= t <= 1 and 0 <= u <= 1:
                    warnings.warn(f"segments {i} and {j} intersect in 3-space", stacklevel=3)

    # -- core ------------------------------------------------------------
    def passages(self, xi):
        """Per-component crossing passages, or a degenerate triple.

        Returns ``("ok", comps, signs)`` where ``comps[k]`` lists
        ``(crossing, is_over)`` along component ``k``, or
        ``("degenerate", reason, where)``.
        """
        eps = self.eps
        xi = np.asarray(xi, dtype=float)
        e1, e2 = plane_basis(xi)
        P = self.verts
        X, Y, Z = P @ e1, P @ e2, P @ xi
        sa, sb = self.seg_a, self.seg_b
        rx, ry = X[sb] - X[sa], Y[sb] - Y[sa]
        rl = np.hypot(rx, ry)
        short = np.nonzero(rl < eps)[0]
        if len(short):
            return ("degenerate", "vertex-coincidence", (int(short[0]),))
        # adjacent segments: only a fold-back onto each other is degenerate
        ai, aj = self.ai, self.aj
        if len(ai):
            cr = rx[ai] * ry[aj] - ry[ai] * rx[aj]
            dt = rx[ai] * rx[aj] + ry[ai] * ry[aj]
            fold = (np.abs(cr) <= eps * rl[ai] * rl[aj]) & (dt < 0)
            if fold.any():
                k = int(np.argmax(fold))
                return ("degenerate", "near-parallel", (int(ai[k]), int(aj[k])))
        i, j = self.pi, self.pj
        ax, ay = X[sa[i]], Y[sa[i]]
        cx, cy = X[sa[j]], Y[sa[j]]
        r1x, r1y, r2x, r2y = rx[i], ry[i], rx[j], ry[j]
        l1, l2 = rl[i], rl[j]
        qx, qy = cx - ax, cy - ay
        denom = r1x * r2y - r1y * r2x
        parallel = np.abs(denom) <= eps * l1 * l2
        if parallel.any():
            k_idx = np.nonzero(parallel)[0]
            off = np.abs(qx[k_idx] * r1y[k_idx] - qy[k_idx] * r1x[k_idx]) / l1[k_idx]
            tc = (qx[k_idx] * r1x[k_idx] + qy[k_idx] * r1y[k_idx]) / l1[k_idx] ** 2
            td = tc + (r2x[k_idx] * r1x[k_idx] + r2y[k_idx] * r1y[k_idx]) / l1[k_idx] ** 2
            tol = eps / l1[k_idx]
            overlap = (off < eps) & (np.maximum(tc, td) >= -tol) & (np.minimum(tc, td) <= 1 + tol)
            if overlap.any():
                k = k_idx[int(np.argmax(overlap))]
                return ("degenerate", "near-parallel", (int(i[k]), int(j[k])))
        with np.errstate(divide="ignore", invalid="ignore"):
            t = (qx * r2y - qy * r2x) / denom
            u = (qx * r1y - qy * r1x) / denom
        t = np.where(parallel, -10.0, t)
        u = np.where(parallel, -10.0, u)
        tt, tu = eps / l1, eps / l2
        window = (t > -tt) & (t < 1 + tt) & (u > -tu) & (u < 1 + tu)
        near_t0, near_t1 = np.abs(t) < tt, np.abs(t - 1) < tt
        near_u0, near_u1 = np.abs(u) < tu, np.abs(u - 1) < tu
        near = window & (near_t0 | near_t1 | near_u0 | near_u1)
        if near.any():
            k = int(np.argmax(near))
            vert = (sa[i[k]] if near_t0[k] else sb[i[k]] if near_t1[k]
                    else sa[j[k]] if near_u0[k] else sb[j[k]])
            reason = "endpoint-on-strand" if self.is_endpoint[vert] else "vertex-coincidence"
            return ("degenerate", reason, (int(i[k]), int(j[k])))
        hit = np.nonzero(window)[0]
        if not len(hit):
            return ("ok", [[] for _ in self.open_flags], [])
        t, u = t[hit], u[hit]
        si, sj = i[hit], j[hit]
        zi = Z[sa[si]] + t * (Z[sb[si]] - Z[sa[si]])
        zj = Z[sa[sj]] + u * (Z[sb[sj]] - Z[sa[sj]])
        tie = np.abs(zi - zj) < eps
        if tie.any():
            k = int(np.argmax(tie))
            return ("degenerate", "depth-tie", (int(si[k]), int(sj[k])))
        px = X[sa[si]] + t * rx[si]
        py = Y[sa[si]] + t * ry[si]
        if len(hit) > 1:
            dx = px[:, None] - px[None, :]
            dy = py[:, None] - py[None, :]
            close = np.hypot(dx, dy) < eps
            np.fill_diagonal(close, False)
            if close.any():
                a, b = np.argwhere(close)[0]
                return ("degenerate", "triple-point", (int(a), int(b)))
        i_over = zi > zj
        ox = np.where(i_over, rx[si], rx[sj])
        oy = np.where(i_over, ry[si], ry[sj])
        ux = np.where(i_over, rx[sj], rx[si])
        uy = np.where(i_over, ry[sj], ry[si])
        signs = np.where(ox * uy - oy * ux > 0, 1, -1)
        entries = [[] for _ in self.open_flags]
        comp, pos = self.seg_comp, self.seg_pos
        for k in range(len(hit)):
            entries[comp[si[k]]].append((pos[si[k]], t[k], k, bool(i_over[k])))
            entries[comp[sj[k]]].append((pos[sj[k]], u[k], k, not bool(i_over[k])))
        comps = []
        for lst in entries:
            lst.sort()
            comps.append([(k, over) for _, _, k, over in lst])
        return ("ok", comps, [int(s) for s in signs])

    def walk_key(self, comps, signs) -> tuple:
        """Signed Gauss code in curve order; equal keys mean identical diagrams."""
        index: dict[int, int] = {}
        code = []
        for lst in comps:
            row = []
            for k, over in lst:
                if k not in index:
                    index[k] = len(index)
                row.append((index[k], over, signs[k]))
            code.append(tuple(row))
        return tuple(code)

    def build(self, comps, signs) -> LinkoidDiagram:
        nbr: dict[int, int] = {}
        sign_map = {k: s for k, s in enumerate(signs)}
        free = 0
        label = 0
        for lst, is_open in zip(comps, self.open_flags):
            if not lst:
                if is_open:
                    label += 1
                    nbr[-(2 * label - 1)] = -(2 * label)
                    nbr[-(2 * label)] = -(2 * label - 1)
                else:
                    free += 1
                continue
            ends = []
            for k, over in lst:
                s = sign_map[k]
                if not over:
                    ends.append((4 * k, 4 * k + 2))
                elif s > 0:
                    ends.append((4 * k + 3, 4 * k + 1))
                else:
                    ends.append((4 * k + 1, 4 * k + 3))
            if is_open:
                label += 1
                chain = [-(2 * label - 1)]
                for e_in, e_out in ends:
                    chain += [e_in, e_out]
                chain.append(-(2 * label))
            else:
                chain = []
                for e_in, e_out in ends:
                    chain += [e_in, e_out]
                chain = chain[1:] + chain[:1]
            for a, b in zip(chain[0::2], chain[1::2]):
                nbr[a] = b
                nbr[b] = a
        return _build(nbr, sign_map, free)

    def project(self, xi) -> ProjectionOutcome:
        xi = np.asarray(xi, dtype=float)
        if xi.shape != (3,) or abs(np.linalg.norm(xi) - 1.0) > 1e-9:
            raise ValueError("projection direction must be a unit 3-vector")
        res = self.passages(xi)
        if res[0] == "degenerate":
            return ProjectionOutcome(degenerate=res[1], where=res[2])
        return ProjectionOutcome(diagram=self.build(res[1], res[2]))


def project(curves: CurveSet, xi, eps: float = DEFAULT_EPS) -> ProjectionOutcome:
    """Diagram of ``curves`` seen from direction ``xi`` (or a degenerate outcome)."""
    return Projector(curves, eps).project(xi)


def interpolate_closure(curves: CurveSet, s: float) -> CurveSet:
    """Move every open component's free end toward its start by the fraction ``s``.

    A point ``last + s*(first - last)`` is appended; at ``s == 1`` the
    component is closed instead.
    """
    if not 0 <= s <= 1:
        raise ValueError(f"s must lie in [0, 1], got {s}")
    out = []
    for c in curves.components:
        if c.closed:
            raise ValueError("interpolate_closure needs every component to be open")
        first, last = np.asarray(c.points[0]), np.asarray(c.points[-1])
        if s == 1:
            out.append(Curve(c.points, True))
        else:
            out.append(Curve(c.points + (tuple(last + s * (first - last)),), False))
    return CurveSet(tuple(out))


# -- loading ------------------------------------------------------------------

_ASSIGN_RE = re.compile(r"([A-Za-z_]\w*)\s*=\s*(\[)")


def parse_curves(text: str) -> CurveSet:
    """Read curves from JSON or from ``NAME = [[x,y,z], ...]`` assignments.

    In the assignment style every list is an open curve; a name ending in
    ``_closed`` marks a closed one.
    """
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            obj = json.loads(stripped)
            return CurveSet(tuple(Curve(tuple(map(tuple, c["points"])), bool(c.get("closed", False)))
                                  for c in obj["components"]))
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise ValueError(f"malformed curve JSON: {exc}") from None
    comps = []
    pos = 0
    while (m := _ASSIGN_RE.search(stripped, pos)) is not None:
        start = m.start(2)
        depth = 0
        for k in range(start, len(stripped)):
            ch = stripped[k]
            depth += ch == "["
            depth -= ch == "]"
            if depth == 0:
                break
        else:
            raise ValueError(f"unbalanced brackets in curve {m.group(1)!r}")
        try:
            pts = ast.literal_eval(stripped[start:k + 1])
        except (ValueError, SyntaxError) as exc:
            raise ValueError(f"cannot read points of curve {m.group(1)!r}: {exc}") from None
        comps.append(Curve(tuple(map(tuple, pts)), m.group(1).endswith("_closed")))
        pos = k + 1
    if not comps:
        raise ValueError("no curves found")
    return CurveSet(tuple(comps))


def load_curves(path) -> CurveSet:
    return parse_curves(Path(path).read_text())
