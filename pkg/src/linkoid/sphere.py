"""Sphere-averaged bracket and Jones polynomials of curve collections.

Directions are drawn from a Fibonacci lattice (deterministic) or uniformly
at random (normalized Gaussian vectors). Each direction is projected, the
projected diagram's polynomial is looked up in a two-level cache (plain
Gauss code, then the canonical signature of the diagram after removing
Ω1/Ω2 kinks and bigons) and the per-type counts are kept in a census. The mean is the census-weighted average computed with exact
rational arithmetic and rounded once at the end, so it does not depend on
summation order or on how the work was split between processes.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
import multiprocessing as mp

import numpy as np

from .bracket import BracketCache, evaluate
from .diagram import signature, simplify, writhe
from .poly import LaurentPoly, writhe_normalize
from .projection import DEFAULT_EPS, CurveSet, Projector, interpolate_closure

__all__ = [
    "SamplerConfig",
    "SphereEstimate",
    "DegenerateDirection",
    "MODES",
    "directions",
    "estimate_jones",
    "estimate_bracket",
    "sweep",
]

GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))

#: ``latlong`` is a midpoint grid uniform in polar and azimuthal angle. It
#: over-weights the poles, so it is not an estimator of the sphere average;
#: it exists to compare against tables produced with that parametrization.
MODES = ("fibonacci", "uniform", "latlong")


class DegenerateDirection(RuntimeError):
    """Every jittered redraw of some direction was irregular."""


@dataclass(frozen=True)
class SamplerConfig:
    mode: str = "fibonacci"
    sample_count: int = 50_000
    seed: int = 0
    eps: float = DEFAULT_EPS
    max_redraws: int = 20
    workers: int = 1

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {', '.join(MODES)}, got {self.mode!r}")
        if self.sample_count < 1:
            raise ValueError("sample_count must be at least 1")
        if self.max_redraws < 1:
            raise ValueError("max_redraws must be at least 1")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")


@dataclass
class SphereEstimate:
    """Result of a sphere average.

    ``type_census`` maps a canonical diagram signature to
    ``(count, polynomial, representative direction)``.
    """

    mean: LaurentPoly
    stderr: dict[int, float]
    samples_used: int
    degenerate_count: int
    type_census: dict = field(repr=False)
    cache_hit_rate: float = 0.0
    wall_time: float = 0.0

    @property
    def n_types(self) -> int:
        return len(self.type_census)


def directions(cfg: SamplerConfig) -> np.ndarray:
    """Unit directions for ``cfg``, one per row.

    The ``latlong`` grid has ``m x 2m`` points with ``m = round(sqrt(N/2))``,
    so its size only approximates ``sample_count``.
    """
    n = cfg.sample_count
    if cfg.mode == "latlong":
        m = max(1, round(math.sqrt(n / 2)))
        theta = (np.arange(m) + 0.5) / m * math.pi
        phi = (np.arange(2 * m) + 0.5) / (2 * m) * 2 * math.pi
        T, P = np.meshgrid(theta, phi, indexing="ij")
        T, P = T.ravel(), P.ravel()
        return np.column_stack([np.sin(T) * np.cos(P), np.sin(T) * np.sin(P), np.cos(T)])
    if cfg.mode == "fibonacci":
        i = np.arange(n, dtype=float)
        z = 1.0 - (2.0 * i + 1.0) / n
        r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
        phi = i * GOLDEN_ANGLE
        return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])
    rng = np.random.default_rng(cfg.seed)
    v = rng.normal(size=(n, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def _jitter(xi: np.ndarray, counter: int, attempt: int, eps: float) -> np.ndarray:
    """Rotate ``xi`` by a small angle about an axis set by the sample counter.

    The angle starts at ``10*eps`` and grows fourfold per attempt (capped at
    0.01 rad), so a redraw leaves the degenerate set quickly without moving
    far on the sphere. The axis also turns with each attempt, so repeated
    redraws do not all tilt along one great circle.
    """
    helper = np.zeros(3)
    helper[int(np.argmin(np.abs(xi)))] = 1.0
    u = np.cross(xi, helper)
    u /= np.linalg.norm(u)
    w = np.cross(xi, u)
    theta = counter * GOLDEN_ANGLE + attempt * (math.pi / 2 + 0.3)
    axis = math.cos(theta) * u + math.sin(theta) * w
    angle = min(10.0 * eps * 4.0**attempt, 1e-2)
    # Rodrigues rotation; axis is perpendicular to xi
    out = xi * math.cos(angle) + np.cross(axis, xi) * math.sin(angle)
    return out / np.linalg.norm(out)


def _census_chunk(curves: CurveSet, dirs: np.ndarray, offset: int, cfg: SamplerConfig,
                  normalized: bool):
    """Project a block of directions; returns ``(census, degenerate, lookups, misses)``.

    Diagram types are keyed by the canonical signature of the Ω1/Ω2-reduced
    diagram (plus the kink tally for the bracket). A lookup misses when its
    type has not been seen before and its polynomial has to be computed; a
    new Gauss code of a known type is a hit.
    """
    proj = Projector(curves, cfg.eps)
    by_key: dict = {}
    by_sig: dict = {}
    census: dict = {}
    degenerate = 0
    misses = 0
    cache = BracketCache(maxsize=1 << 20)
    for n, xi in enumerate(dirs):
        counter = offset + n
        res = proj.passages(xi)
        attempt = 0
        while res[0] == "degenerate":
            degenerate += 1
            if attempt >= cfg.max_redraws:
                raise DegenerateDirection(
                    f"direction #{counter} stayed irregular after {cfg.max_redraws} redraws "
                    f"(last reason: {res[1]})")
            xi = _jitter(dirs[n], counter, attempt, cfg.eps)
            attempt += 1
            res = proj.passages(xi)
        _, comps, signs = res
        key = proj.walk_key(comps, signs)
        entry = by_key.get(key)
        if entry is None:
            reduced, twist = simplify(proj.build(comps, signs))
            # the Jones polynomial does not see the removed kinks; the bracket does
            sig = signature(reduced) if normalized else (signature(reduced), twist)
            entry = by_sig.get(sig)
            if entry is None:
                misses += 1
                br = evaluate(reduced, cache=cache)[0]
                if normalized:
                    poly = writhe_normalize(br, writhe(reduced))
                else:
                    poly = br.shift(3 * twist)
                    poly = -poly if twist % 2 else poly
                entry = (sig, poly)
                by_sig[sig] = entry
            by_key[key] = entry
            if entry[0] not in census:
                census[entry[0]] = [0, entry[1], tuple(float(x) for x in xi)]
        census[entry[0]][0] += 1
    return census, degenerate, len(dirs), misses


def _merge(parts):
    census: dict = {}
    degenerate = lookups = misses = 0
    for c, d, look, miss in parts:
        degenerate += d
        lookups += look
        misses += miss
        for sig, (count, poly, rep) in c.items():
            if sig in census:
                census[sig][0] += count
            else:
                census[sig] = [count, poly, rep]
    return census, degenerate, lookups, misses


def _summarize(census: dict, n: int) -> tuple[LaurentPoly, dict[int, float]]:
    exps = sorted({e for _, poly, _ in census.values() for e in poly.exponents()})
    mean_terms, stderr = {}, {}
    for e in exps:
        s1 = sum(count * Fraction(poly[e]) for count, poly, _ in census.values())
        s2 = sum(count * Fraction(poly[e]) ** 2 for count, poly, _ in census.values())
        mu = s1 / n
        mean_terms[e] = float(mu)
        if n > 1:
            var = (s2 - n * mu * mu) / (n - 1)
            stderr[e] = math.sqrt(float(var) / n)
        else:
            stderr[e] = 0.0
    return LaurentPoly(mean_terms), stderr


def _estimate(curves: CurveSet, cfg: SamplerConfig, normalized: bool) -> SphereEstimate:
    start = time.perf_counter()
    dirs = directions(cfg)
    workers = min(cfg.workers, len(dirs))
    if workers == 1:
        parts = [_census_chunk(curves, dirs, 0, cfg, normalized)]
    else:
        bounds = np.linspace(0, len(dirs), workers + 1).astype(int)
        ctx = mp.get_context("fork") if "fork" in mp.get_all_start_methods() else None
        with ProcessPoolExecutor(max_workers=workers, mp_context=ctx) as pool:
            futures = [pool.submit(_census_chunk, curves, dirs[a:b], int(a), cfg, normalized)
                       for a, b in zip(bounds[:-1], bounds[1:])]
            parts = [f.result() for f in futures]
    census, degenerate, lookups, misses = _merge(parts)
    sigs = sorted(census, key=repr)
    census = {s: tuple(census[s]) for s in sigs}
    mean, stderr = _summarize(census, len(dirs))
    return SphereEstimate(mean=mean, stderr=stderr, samples_used=len(dirs),
                          degenerate_count=degenerate, type_census=census,
                          cache_hit_rate=1.0 - misses / lookups if lookups else 0.0,
                          wall_time=time.perf_counter() - start)


def estimate_jones(curves: CurveSet, cfg: SamplerConfig | None = None) -> SphereEstimate:
    """Average of the per-direction Jones polynomial (in ``A``) over the sphere."""
    return _estimate(curves, cfg or SamplerConfig(), normalized=True)


def estimate_bracket(curves: CurveSet, cfg: SamplerConfig | None = None) -> SphereEstimate:
    """Average of the per-direction bracket over the sphere."""
    return _estimate(curves, cfg or SamplerConfig(), normalized=False)


def sweep(curves: CurveSet, s_values, cfg: SamplerConfig | None = None) -> list[tuple[float, SphereEstimate]]:
    """``estimate_jones`` along the closing family ``interpolate_closure(curves, s)``."""
    cfg = cfg or SamplerConfig()
    return [(float(s), estimate_jones(interpolate_closure(curves, float(s)), cfg)) for s in s_values]


def default_workers() -> int:
    return max(1, len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else os.cpu_count() or 1)

