"""Sparse Laurent polynomials in the bracket variable ``A``.

Coefficients are either exact (``int``/``Fraction``) or real (``float``).
Mixing the two promotes to real. The Jones variable ``t`` is only a
presentation: ``A = t**(-1/4)`` so ``A**k`` prints as ``t**(-k/4)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping

__all__ = [
    "LaurentPoly",
    "TExponent",
    "D",
    "ONE",
    "ZERO",
    "d_power",
    "writhe_normalize",
    "to_t",
    "from_t",
    "InvalidStateWeight",
]

#: real-mode coefficients smaller than this are dropped after arithmetic
REAL_EPS = 1e-12


class InvalidStateWeight(ValueError):
    pass


def _is_exact(c) -> bool:
    return isinstance(c, Rational) and not isinstance(c, bool)


def _norm_coef(c):
    if isinstance(c, bool):
        raise TypeError("boolean coefficient")
    if isinstance(c, Fraction) and c.denominator == 1:
        return int(c.numerator)
    if _is_exact(c):
        return c if isinstance(c, (int, Fraction)) else Fraction(c)
    return float(c)


def _canon(terms: Mapping[int, object]) -> dict[int, object]:
    out = {}
    for k, c in terms.items():
        c = _norm_coef(c)
        if isinstance(c, float):
            if abs(c) < REAL_EPS:
                continue
        elif c == 0:
            continue
        out[int(k)] = c
    return out


class LaurentPoly:
    """Immutable sparse Laurent polynomial ``sum(c_k * A**k)``.

    >>> d = LaurentPoly({2: -1, -2: -1})
    >>> d * d == LaurentPoly({4: 1, 0: 2, -4: 1})
    True
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[int, object] | None = None):
        self._terms = _canon(terms or {})
        self._hash = None

    # -- construction -------------------------------------------------
    @classmethod
    def monomial(cls, exp: int, coef=1) -> "LaurentPoly":
        return cls({exp: coef})

    @classmethod
    def _raw(cls, terms: dict[int, object]) -> "LaurentPoly":
        # terms must already be canonical
        p = cls.__new__(cls)
        p._terms = terms
        p._hash = None
        return p

    # -- inspection ---------------------------------------------------
    @property
    def terms(self) -> dict[int, object]:
        return dict(self._terms)

    def items(self):
        return sorted(self._terms.items())

    def coefficient(self, exp: int):
        return self._terms.get(exp, 0)

    def __getitem__(self, exp: int):
        return self.coefficient(exp)

    @property
    def is_exact(self) -> bool:
        return all(_is_exact(c) for c in self._terms.values())

    @property
    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def exponents(self) -> list[int]:
        return sorted(self._terms)

    # -- arithmetic ---------------------------------------------------
    @staticmethod
    def _coerce(other) -> "LaurentPoly":
        if isinstance(other, LaurentPoly):
            return other
        if isinstance(other, (int, float, Fraction)) and not isinstance(other, bool):
            return LaurentPoly({0: other})
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for k, c in other._terms.items():
            out[k] = out.get(k, 0) + c
        return LaurentPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly._raw({k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: dict[int, object] = {}
        for k1, c1 in self._terms.items():
            for k2, c2 in other._terms.items():
                k = k1 + k2
                out[k] = out.get(k, 0) + c1 * c2
        return LaurentPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only non-negative integer powers are supported")
        result = ONE
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __truediv__(self, scalar):
        if isinstance(scalar, LaurentPoly):
            raise TypeError("polynomial division is not supported")
        if _is_exact(scalar):
            scalar = Fraction(scalar)
        return LaurentPoly({k: c / scalar for k, c in self._terms.items()})

    def shift(self, k: int) -> "LaurentPoly":
        """Multiply by ``A**k``."""
        return LaurentPoly._raw({e + k: c for e, c in self._terms.items()})

    def mirror(self) -> "LaurentPoly":
        """Substitute ``A -> A**-1``."""
        return LaurentPoly._raw({-e: c for e, c in self._terms.items()})

    def to_real(self) -> "LaurentPoly":
        return LaurentPoly({k: float(c) for k, c in self._terms.items()})

    # -- comparison ---------------------------------------------------
    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple(sorted(self._terms.items())))
        return self._hash

    def isclose(self, other, tol: float = 1e-12) -> bool:
        """Coefficient-wise comparison within ``tol`` (absolute)."""
        other = self._coerce(other)
        keys = set(self._terms) | set(other._terms)
        return all(abs(float(self.coefficient(k)) - float(other.coefficient(k))) <= tol
                   for k in keys)

    # -- evaluation / presentation -----------------------------------
    def __call__(self, a):
        return sum(c * a**k for k, c in self._terms.items())

    def __repr__(self):
        return f"LaurentPoly({dict(sorted(self._terms.items()))!r})"

    def __str__(self):
        return format_poly(self, "A")

    def to_json(self, variable: str = "A") -> dict:
        return poly_to_json(self, variable)


ONE = LaurentPoly({0: 1})
ZERO = LaurentPoly()
#: the loop value d = -A^2 - A^-2
D = LaurentPoly({2: -1, -2: -1})


def d_power(k: int) -> LaurentPoly:
    """``d**k``; ``k`` is the combined exponent ``circ - 1 + cyc`` of a state."""
    if k < 0:
        raise InvalidStateWeight(
            f"invalid state weight: d^{k} (state has no closed loops and no segment cycles)")
    return _d_power_cached(k)


_D_POWERS = [ONE]


def _d_power_cached(k: int) -> LaurentPoly:
    while len(_D_POWERS) <= k:
        _D_POWERS.append(_D_POWERS[-1] * D)
    return _D_POWERS[k]


def writhe_normalize(p: LaurentPoly, w: int) -> LaurentPoly:
    """Return ``(-A**3)**(-w) * p``."""
    sign = -1 if w % 2 else 1
    out = p.shift(-3 * w)
    return out if sign == 1 else -out


@dataclass(frozen=True, order=True)
class TExponent:
    """Exponent of ``t`` stored as a count of quarters."""

    numerator: int

    denominator = 4

    @property
    def value(self) -> Fraction:
        return Fraction(self.numerator, 4)

    def __str__(self):
        v = self.value
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"

    @classmethod
    def parse(cls, text: str) -> "TExponent":
        v = Fraction(text)
        q = v * 4
        if q.denominator != 1:
            raise ValueError(f"t exponent {text!r} is not a multiple of 1/4")
        return cls(int(q))


def to_t(p: LaurentPoly) -> dict[TExponent, object]:
    """Substitute ``A = t**(-1/4)``: ``A**k`` becomes ``t**(-k/4)``."""
    return {TExponent(-k): c for k, c in p.items()}


def from_t(terms: Mapping[TExponent, object]) -> LaurentPoly:
    return LaurentPoly({-e.numerator: c for e, c in terms.items()})


# -- formatting ------------------------------------------------------------

def _fmt_coef(c, decimals: int) -> str:
    if isinstance(c, float):
        s = f"{abs(c):.{decimals}f}"
        return s
    c = abs(c)
    if isinstance(c, Fraction) and c.denominator != 1:
        return f"({c})"
    return str(c)


def _fmt_exp(e: Fraction | int, variable: str) -> str:
    e = Fraction(e)
    if variable == "A":
        return str(e.numerator) if e.denominator == 1 else str(e)
    return "{" + (str(e.numerator) if e.denominator == 1 else f"{e.numerator}/{e.denominator}") + "}"


def format_poly(p: LaurentPoly, variable: str = "A", decimals: int = 2) -> str:
    """Human-readable form.

    ``A`` is printed with descending exponents (``-A^10 - A^2``), ``t`` with
    ascending exponents and braces (``-0.26 t^{-3} + 1.49 t^{-2}``).
    """
    if variable == "A":
        items = [(Fraction(k), c) for k, c in sorted(p.items(), reverse=True)]
    elif variable == "t":
        items = sorted((e.value, c) for e, c in to_t(p).items())
    else:
        raise ValueError(f"unknown variable {variable!r}")
    if isinstance(p, LaurentPoly) and not items:
        return "0"
    parts = []
    for i, (e, c) in enumerate(items):
        neg = float(c) < 0
        coef = _fmt_coef(c, decimals)
        if e == 0:
            body = coef
        else:
            mono = variable if e == 1 else f"{variable}^{_fmt_exp(e, variable)}"
            if not isinstance(c, float) and abs(c) == 1:
                body = mono
            else:
                body = f"{coef} {mono}" if variable == "t" else f"{coef}*{mono}"
        if i == 0:
            parts.append(("-" if neg else "") + body)
        else:
            parts.append(("- " if neg else "+ ") + body)
    return " ".join(parts)


def _coef_json(c):
    if isinstance(c, float):
        return c
    if isinstance(c, int):
        return c
    return str(c)


def poly_to_json(p: LaurentPoly, variable: str = "A") -> dict:
    if variable == "A":
        terms = [{"exp": str(k), "coef": _coef_json(c)} for k, c in p.items()]
    elif variable == "t":
        terms = [{"exp": str(e), "coef": _coef_json(c)}
                 for e, c in sorted(to_t(p).items())]
    else:
        raise ValueError(f"unknown variable {variable!r}")
    return {"variable": variable, "terms": terms}


def poly_from_json(obj: dict) -> LaurentPoly:
    variable = obj.get("variable", "A")
    out = {}
    for term in obj["terms"]:
        c = term["coef"]
        if isinstance(c, str):
            c = Fraction(c)
        if variable == "A":
            e = Fraction(term["exp"])
            if e.denominator != 1:
                raise ValueError(f"non-integer A exponent {term['exp']!r}")
            out[int(e)] = c
        elif variable == "t":
            out[-TExponent.parse(term["exp"]).numerator] = c
        else:
            raise ValueError(f"unknown variable {variable!r}")
    return LaurentPoly(out)


def sum_polys(polys: Iterable[LaurentPoly]) -> LaurentPoly:
    out: dict[int, object] = {}
    for p in polys:
        for k, c in p._terms.items():
            out[k] = out.get(k, 0) + c
    return LaurentPoly(out)
