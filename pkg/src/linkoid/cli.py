"""Command-line interface: ``linkoid <subcommand> ...``.

Exit codes: 0 success, 2 bad input, 3 crossing cap exceeded, 4 degenerate
projection under ``--strict``.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .bracket import BracketCache, jones
from .diagram import CapExceeded, DiagramError, diagram_to_json, format_diagram, parse_diagram
from .poly import TExponent, format_poly, poly_to_json, to_t
from .projection import DEFAULT_EPS, Projector, interpolate_closure, load_curves
from .sphere import DegenerateDirection, SamplerConfig, _jitter, estimate_bracket, estimate_jones

EXIT_OK, EXIT_INPUT, EXIT_CAP, EXIT_DEGENERATE = 0, 2, 3, 4

MODE_ALIASES = {"fib": "fibonacci", "fibonacci": "fibonacci", "uniform": "uniform",
                "random": "uniform", "latlong": "latlong"}


class InputError(Exception):
    pass


class Degenerate(Exception):
    pass


@dataclass
class RunManifest:
    command: list[str]
    inputs: dict[str, str] = field(default_factory=dict)
    config: dict = field(default_factory=dict)
    version: str = __version__
    wall_time: float = 0.0
    outputs: list[str] = field(default_factory=list)

    def add_input(self, path: str):
        self.inputs[path] = hashlib.sha256(Path(path).read_bytes()).hexdigest()

    def to_json(self) -> dict:
        return {"command": self.command, "inputs": self.inputs, "config": self.config,
                "version": self.version, "wall_time": round(self.wall_time, 6),
                "outputs": self.outputs}


def _cache_size() -> int:
    raw = os.environ.get("LINKOID_CACHE_SIZE", "100000")
    try:
        return max(1, int(raw))
    except ValueError:
        raise InputError(f"LINKOID_CACHE_SIZE must be an integer, got {raw!r}") from None


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from None


def _load_curves(path: str, s: float | None):
    _read(path)
    try:
        curves = load_curves(path)
        if s is not None:
            curves = interpolate_closure(curves, s)
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from None
    return curves


def _poly_out(p, var: str, decimals: int = 2):
    return format_poly(p, var, decimals)


def _emit(text: str, out: str | None, manifest: RunManifest):
    if out:
        Path(out).write_text(text)
        manifest.outputs.append(out)
    else:
        sys.stdout.write(text)


# -- subcommands -----------------------------------------------------------

def cmd_jones(args, manifest: RunManifest, normalized: bool = True):
    text = _read(args.diagram)
    manifest.add_input(args.diagram)
    try:
        D = parse_diagram(text)
    except DiagramError as exc:
        raise InputError(f"{args.diagram}: {exc}") from None
    cache = BracketCache(_cache_size())
    try:
        res = jones(D, method=args.method, cache=cache, cap=args.cap)
    except DiagramError as exc:
        raise InputError(f"{args.diagram}: {exc}") from None
    if args.json:
        obj = {"bracket": poly_to_json(res.bracket, "A" if normalized else args.var),
               "writhe": res.writhe}
        if normalized:
            obj["jones"] = poly_to_json(res.jones_A, args.var)
        obj["states_evaluated"] = res.states_evaluated
        obj["cache"] = {"hits": cache.hits, "misses": cache.misses, "size": len(cache)}
        out = json.dumps(obj, indent=2) + "\n"
    elif normalized:
        out = (f"bracket: {_poly_out(res.bracket, 'A')}\nwrithe: {res.writhe}\n"
               f"jones: {_poly_out(res.jones_A, args.var)}\n")
    else:
        out = f"bracket: {_poly_out(res.bracket, args.var)}\nwrithe: {res.writhe}\n"
    _emit(out, args.out, manifest)


def cmd_project(args, manifest: RunManifest):
    curves = _load_curves(args.curves, args.s)
    manifest.add_input(args.curves)
    try:
        xi = np.array([float(x) for x in args.xi.split(",")])
    except ValueError:
        raise InputError(f"--xi must be three comma-separated numbers, got {args.xi!r}") from None
    if xi.shape != (3,) or not np.linalg.norm(xi) > 0:
        raise InputError("--xi must be a nonzero 3-vector")
    xi = xi / np.linalg.norm(xi)
    proj = Projector(curves, args.eps)
    outcome = proj.project(xi)
    attempt = 0
    while not outcome.ok:
        msg = f"degenerate projection ({outcome.degenerate}) at segments {list(outcome.where)}"
        if args.strict:
            raise Degenerate(msg)
        print(f"warning: {msg}; jittering direction", file=sys.stderr)
        if attempt >= args.max_redraws:
            raise Degenerate(msg + " after all redraws")
        xi2 = _jitter(xi, 0, attempt, args.eps)
        attempt += 1
        outcome = proj.project(xi2)
    D = outcome.diagram
    text = (json.dumps(diagram_to_json(D), indent=2) + "\n") if args.format == "json" else format_diagram(D)
    _emit(text, args.out, manifest)


def _sampler(args) -> SamplerConfig:
    return SamplerConfig(mode=MODE_ALIASES[args.mode], sample_count=args.samples, seed=args.seed,
                         eps=args.eps, max_redraws=args.max_redraws, workers=args.threads)


def _estimate_json(est, var: str, census: bool) -> dict:
    if var == "t":
        stderr = {str(e): v for e, v in sorted((TExponent(-k), v) for k, v in est.stderr.items())}
    else:
        stderr = {str(k): v for k, v in sorted(est.stderr.items())}
    obj = {"mean": poly_to_json(est.mean, var), "stderr": stderr,
           "samples_used": est.samples_used, "degenerate_count": est.degenerate_count,
           "n_types": est.n_types, "cache_hit_rate": est.cache_hit_rate}
    if census:
        obj["census"] = [{"count": c, "polynomial": poly_to_json(p, var), "direction": list(d)}
                         for c, p, d in est.type_census.values()]
    return obj


def cmd_sphere(args, manifest: RunManifest, normalized: bool = True):
    curves = _load_curves(args.curves, args.s)
    manifest.add_input(args.curves)
    cfg = _sampler(args)
    est = (estimate_jones if normalized else estimate_bracket)(curves, cfg)
    manifest.config["sample_count_used"] = est.samples_used
    if args.json or args.out:
        text = json.dumps(_estimate_json(est, args.var, args.census), indent=2) + "\n"
    else:
        text = (f"mean: {_poly_out(est.mean, args.var, args.decimals)}\n"
                f"samples: {est.samples_used}  degenerate redraws: {est.degenerate_count}  "
                f"diagram types: {est.n_types}  cache hit rate: {est.cache_hit_rate:.3f}\n")
    _emit(text, args.out, manifest)


def _parse_s_list(raw: str) -> list[float]:
    if not raw.strip():
        return []
    try:
        vals = [float(x) for x in raw.split(",") if x.strip()]
    except ValueError:
        raise InputError(f"--s must be a comma-separated list of numbers, got {raw!r}") from None
    for v in vals:
        if not 0 <= v <= 1:
            raise InputError(f"s values must lie in [0, 1], got {v}")
    return vals


def sweep_csv(rows) -> str:
    """CSV text: column ``s`` then one column per t exponent, ascending."""
    exps = sorted({e for _, est in rows for e in to_t(est.mean)})
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["s"] + [str(e) for e in exps])
    for s, est in rows:
        coeffs = to_t(est.mean)
        w.writerow([f"{s:g}"] + [f"{float(coeffs.get(e, 0.0)):.10g}" for e in exps])
    return buf.getvalue()


def cmd_sweep(args, manifest: RunManifest):
    s_values = _parse_s_list(args.s)
    base = _load_curves(args.curves, None)
    manifest.add_input(args.curves)
    cfg = _sampler(args)
    rows = []
    for s in s_values:
        try:
            curves = interpolate_closure(base, s)
        except ValueError as exc:
            raise InputError(f"{args.curves}: {exc}") from None
        rows.append((s, estimate_jones(curves, cfg)))
        print(f"s={s:g} done", file=sys.stderr)
    _emit(sweep_csv(rows), args.out, manifest)


def cmd_selftest(args, manifest: RunManifest):
    from .selftest import run_selftest

    ok = run_selftest(sys.stdout)
    if not ok:
        raise SystemExit(1)


# -- argument parsing ---------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="linkoid", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"linkoid {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common_out(sp):
        sp.add_argument("--out", help="write the result here instead of stdout")
        sp.add_argument("--manifest", help="run manifest path (default: <out>.manifest.json)")

    for name, help_text in (("jones", "Jones polynomial of a diagram"),
                            ("bracket", "Kauffman bracket of a diagram")):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--diagram", required=True)
        sp.add_argument("--var", choices=("A", "t"), default="A")
        sp.add_argument("--json", action="store_true")
        sp.add_argument("--method", choices=("auto", "states", "contract"), default="auto")
        sp.add_argument("--cap", type=int, default=26, help="crossing cap for state enumeration")
        common_out(sp)

    sp = sub.add_parser("project", help="diagram of a curve set seen from one direction")
    sp.add_argument("--curves", required=True)
    sp.add_argument("--xi", default="0,0,1")
    sp.add_argument("--s", type=float, default=None, help="apply interpolate_closure first")
    sp.add_argument("--strict", action="store_true", help="exit 4 instead of jittering")
    sp.add_argument("--format", choices=("text", "json"), default="text")
    sp.add_argument("--eps", type=float, default=DEFAULT_EPS)
    sp.add_argument("--max-redraws", type=int, default=20)
    common_out(sp)

    def sampler_args(sp):
        sp.add_argument("--curves", required=True)
        sp.add_argument("--samples", type=int, default=50_000)
        sp.add_argument("--mode", choices=sorted(MODE_ALIASES), default="fib")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--eps", type=float, default=DEFAULT_EPS)
        sp.add_argument("--max-redraws", type=int, default=20)
        sp.add_argument("--threads", type=int, default=1, help="worker processes")
        sp.add_argument("--var", choices=("A", "t"), default="t")
        common_out(sp)

    for name in ("sphere-jones", "sphere-bracket"):
        sp = sub.add_parser(name, help=f"sphere average ({name.split('-')[1]})")
        sampler_args(sp)
        sp.add_argument("--s", type=float, default=None, help="apply interpolate_closure first")
        sp.add_argument("--json", action="store_true")
        sp.add_argument("--census", action="store_true", help="include per-type census in JSON")
        sp.add_argument("--decimals", type=int, default=2)

    sp = sub.add_parser("sweep", help="sphere-averaged Jones along the closing family")
    sampler_args(sp)
    sp.add_argument("--s", default="0,0.22,0.44,0.67,0.68,0.70,0.89,1")

    sub.add_parser("selftest", help="run the built-in golden checks")
    return p


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    manifest = RunManifest(command=["linkoid"] + argv,
                           config={k: v for k, v in vars(args).items() if k not in ("out", "manifest")})
    start = time.perf_counter()
    handlers = {
        "jones": lambda: cmd_jones(args, manifest, True),
        "bracket": lambda: cmd_jones(args, manifest, False),
        "project": lambda: cmd_project(args, manifest),
        "sphere-jones": lambda: cmd_sphere(args, manifest, True),
        "sphere-bracket": lambda: cmd_sphere(args, manifest, False),
        "sweep": lambda: cmd_sweep(args, manifest),
        "selftest": lambda: cmd_selftest(args, manifest),
    }
    try:
        if getattr(args, "samples", 1) < 1:
            raise InputError("--samples must be at least 1")
        if getattr(args, "threads", 1) < 1:
            raise InputError("--threads must be at least 1")
        handlers[args.command]()
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except CapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (Degenerate, DegenerateDirection) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    manifest.wall_time = time.perf_counter() - start
    target = getattr(args, "manifest", None) or (args.out + ".manifest.json" if getattr(args, "out", None) else None)
    if target:
        Path(target).write_text(json.dumps(manifest.to_json(), indent=2, default=str) + "\n")
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
