"""Jones polynomials of linkoids and of open curves in 3-space."""

__version__ = "0.1.0"

from .bracket import BracketResult, bracket, close_linkoid, jones, skein_check  # noqa: E402
from .diagram import (  # noqa: E402
    DiagramError,
    LinkoidDiagram,
    enumerate_states,
    format_diagram,
    parse_diagram,
    resolve,
    simplify,
    writhe,
)
from .poly import LaurentPoly, TExponent, d_power, to_t  # noqa: E402
from .projection import CurveSet, interpolate_closure, load_curves, project  # noqa: E402
from .segcycle import Pairing, cycle_count, head_leg_pairing, segment_cycles  # noqa: E402
from .sphere import SamplerConfig, SphereEstimate, estimate_bracket, estimate_jones, sweep  # noqa: E402

__all__ = [
    "BracketResult", "bracket", "close_linkoid", "jones", "skein_check",
    "DiagramError", "LinkoidDiagram", "enumerate_states", "format_diagram", "parse_diagram",
    "resolve", "simplify", "writhe",
    "LaurentPoly", "TExponent", "d_power", "to_t",
    "CurveSet", "interpolate_closure", "load_curves", "project",
    "Pairing", "cycle_count", "head_leg_pairing", "segment_cycles",
    "SamplerConfig", "SphereEstimate", "estimate_bracket", "estimate_jones", "sweep",
]
