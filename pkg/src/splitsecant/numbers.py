"""Exact counting functions and integer-valued quadratic quasi-polynomials.

All values are Python ints or ``fractions.Fraction``; nothing here touches
floating point because the floor/ceil identities are the point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache, reduce
from math import comb, factorial, gcd
from typing import Callable, Sequence

DEFAULT_DOMAIN = (0, 400)


def binomial(a: int, b: int) -> int:
    """C(a, b), zero when b < 0 or a < b."""
    if b < 0 or a < b:
        return 0
    return comb(a, b)


def stirling2(n: int, k: int) -> int:
    """Stirling number of the second kind via the alternating sum."""
    if n < 0 or k < 0:
        raise ValueError("Stirling numbers need n, k >= 0")
    total = sum((-1) ** (k - j) * comb(k, j) * j ** n for j in range(k + 1))
    q, r = divmod(total, factorial(k))
    assert r == 0
    return q


def backward_difference(f: Callable[[int], int], i: int, step: int) -> Callable[[int], int]:
    """The i-fold backward difference of f with the given step.

    (nabla^i f)(x) = sum_j (-1)^j C(i, j) f(x - j*step).
    """
    if i < 0:
        raise ValueError("difference order must be >= 0")
    if step < 1:
        raise ValueError("step must be >= 1")
    if i == 0:
        return f

    def diff(x: int) -> int:
        return sum((-1) ** j * comb(i, j) * f(x - j * step) for j in range(i + 1))

    return diff


def difference_at(f: Callable[[int], int], i: int, step: int, x: int) -> int:
    """Shorthand for backward_difference(f, i, step)(x)."""
    return backward_difference(f, i, step)(x)


# function specs --------------------------------------------------------------


class FunctionSpec:
    """An integer-valued function of one integer variable."""

    def __call__(self, x: int) -> int:
        raise NotImplementedError

    @property
    def text(self) -> str:
        raise NotImplementedError

    def class_polynomials(self, step: int) -> list[tuple[Fraction, ...]] | None:
        """Coefficients (constant term first) of the polynomial agreeing with
        the function on each residue class mod step, or None if there is no
        such polynomial of degree <= 2."""
        raise NotImplementedError

    def __str__(self) -> str:
        return self.text


@dataclass(frozen=True)
class Constant(FunctionSpec):
    value: int

    def __post_init__(self) -> None:
        if int(self.value) != self.value or self.value < 0:
            raise ValueError(f"constant must be a nonnegative integer, got {self.value}")
        object.__setattr__(self, "value", int(self.value))

    def __call__(self, x: int) -> int:
        return self.value

    @property
    def text(self) -> str:
        return f"const:{self.value}"

    def class_polynomials(self, step: int) -> list[tuple[Fraction, ...]]:
        return [(Fraction(self.value),)] * step


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class Piecewise(FunctionSpec):
    """x -> a2[r] x^2 + a1[r] x + a0[r] with r = x mod modulus.

    The coefficients are stored per residue class; the common case of shared
    a2 and a1 is built by ``Piecewise.quadratic``.  Construction checks that
    every value on the validity range is a nonnegative integer.
    """

    modulus: int
    coeffs: tuple[tuple[Fraction, Fraction, Fraction], ...]
    name: str | None = None
    domain: tuple[int, int] = DEFAULT_DOMAIN
    _num: tuple[tuple[int, int, int], ...] = field(init=False, repr=False, compare=False)
    _den: int = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.modulus < 1:
            raise ValueError("modulus must be >= 1")
        coeffs = tuple(tuple(_frac(c) for c in row) for row in self.coeffs)
        if len(coeffs) != self.modulus or any(len(row) != 3 for row in coeffs):
            raise ValueError("need one (a2, a1, a0) triple per residue class")
        object.__setattr__(self, "coeffs", coeffs)
        den = reduce(lambda a, b: a * b // gcd(a, b), (c.denominator for row in coeffs for c in row), 1)
        num = tuple(tuple(int(c * den) for c in row) for row in coeffs)
        object.__setattr__(self, "_den", den)
        object.__setattr__(self, "_num", num)
        lo, hi = self.domain
        for x in range(lo, hi + 1):
            val, rem = self._raw(x)
            if rem or val < 0:
                shown = Fraction(val * self._den + rem, self._den)
                raise ValueError(f"function value at {x} is {shown}, not a nonnegative integer")

    @classmethod
    def quadratic(cls, modulus: int, a2, a1, a0: Sequence, name: str | None = None,
                  domain: tuple[int, int] = DEFAULT_DOMAIN) -> "Piecewise":
        if len(a0) != modulus:
            raise ValueError(f"a0 needs {modulus} entries, got {len(a0)}")
        return cls(modulus, tuple((_frac(a2), _frac(a1), _frac(c)) for c in a0), name, domain)

    def _raw(self, x: int) -> tuple[int, int]:
        a2, a1, a0 = self._num[x % self.modulus]
        return divmod(a2 * x * x + a1 * x + a0, self._den)

    def __call__(self, x: int) -> int:
        lo, hi = self.domain
        if not lo <= x <= hi:
            raise ValueError(f"{self.text} is only validated on [{lo}, {hi}], asked at {x}")
        return self._raw(x)[0]

    @property
    def text(self) -> str:
        if self.name is not None:
            return f"builtin:{self.name}"
        a2s = {row[0] for row in self.coeffs}
        a1s = {row[1] for row in self.coeffs}
        a2 = _fmt(a2s.pop()) if len(a2s) == 1 else ",".join(_fmt(r[0]) for r in self.coeffs)
        a1 = _fmt(a1s.pop()) if len(a1s) == 1 else ",".join(_fmt(r[1]) for r in self.coeffs)
        a0 = ",".join(_fmt(r[2]) for r in self.coeffs)
        return f"pw:m={self.modulus}:a2={a2}:a1={a1}:a0={a0}"

    def class_polynomials(self, step: int) -> list[tuple[Fraction, ...]] | None:
        g = gcd(self.modulus, step)
        for r in range(self.modulus):
            if self.coeffs[r] != self.coeffs[r % g]:
                return None
        return [tuple(reversed(self.coeffs[r % g])) for r in range(step)]


def _fmt(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def eval_function(spec: FunctionSpec, x: int) -> int:
    return spec(x)


def leading_coefficient(poly: Sequence[Fraction], degree: int) -> Fraction:
    """Coefficient of x**degree (constant term first)."""
    return Fraction(poly[degree]) if degree < len(poly) else Fraction(0)


def poly_degree(poly: Sequence[Fraction]) -> int:
    """Degree of a coefficient list; -1 for the zero polynomial."""
    for k in range(len(poly) - 1, -1, -1):
        if poly[k] != 0:
            return k
    return -1


# builtins --------------------------------------------------------------------

F = Fraction

# table of a(d) for d mod 27, used by the lower/upper functions
A_TABLE = (0, -10, 4, -12, -4, 1, 3, 2, -2, -9, 8, -5, 6, -13, -8,
           -6, -7, -11, 9, -1, 13, -3, 5, 10, 12, 11, 7)


def _s1() -> Piecewise:
    a0 = {0: 0, 4: 0, 2: F(2, 9), 5: F(2, 9), 8: F(2, 9), 1: F(2, 3), 3: F(2, 3), 6: F(1, 3), 7: F(1, 3)}
    return Piecewise.quadratic(9, F(1, 18), F(5, 18), [a0[r] for r in range(9)], name="s1")


def _s2pp() -> Piecewise:
    a0 = {0: 0, 1: F(5, 9), 4: F(5, 9), 7: F(5, 9), 2: 1, 3: F(1, 3), 8: F(1, 3), 5: F(2, 3), 6: F(2, 3)}
    return Piecewise.quadratic(9, F(1, 18), F(7, 18), [a0[r] for r in range(9)], name="s2pp")


def _s2() -> Piecewise:
    rows = []
    for r in range(18):
        if r % 6 == 0:
            rows.append((F(1, 18), F(1, 3), F(1)))
        elif r % 6 == 3:
            rows.append((F(1, 18), F(1, 3), F(1, 2)))
        else:
            a0 = {1: F(5, 9), 4: F(5, 9), 7: F(5, 9), 2: F(1), 5: F(2, 3), 8: F(1, 3)}[r % 9]
            rows.append((F(1, 18), F(7, 18), a0))
    return Piecewise(18, tuple(rows), name="s2")


def _s1p() -> Piecewise:
    rows = {0: (F(1, 6), F(1)), 1: (F(2, 9), F(-5, 18)), 2: (F(5, 18), F(2, 9)),
            3: (F(1, 6), F(0)), 4: (F(2, 9), F(2, 9)), 5: (F(5, 18), F(2, 9))}
    return Piecewise(6, tuple((F(1, 18),) + rows[r] for r in range(6)), name="s1p")


def _s2p() -> Piecewise:
    rows = {0: (F(1, 3), F(1)), 1: (F(7, 18), F(14, 9)), 2: (F(4, 9), F(8, 9)),
            3: (F(1, 3), F(1, 2)), 4: (F(7, 18), F(5, 9)), 5: (F(4, 9), F(7, 18))}
    return Piecewise(6, tuple((F(1, 18),) + rows[r] for r in range(6)), name="s2p")


def _stilde() -> Piecewise:
    rows = {0: (F(1, 12), F(0)), 1: (F(1, 6), F(-5, 24)), 2: (F(1, 12), F(-1, 3)),
            3: (F(1, 6), F(1, 8)), 4: (F(1, 12), F(0)), 5: (F(1, 6), F(1, 8))}
    return Piecewise(6, tuple((F(1, 24),) + rows[r] for r in range(6)), name="stilde")


def _sunder() -> Piecewise:
    return Piecewise.quadratic(27, F(1, 18), F(17, 54), [F(a, 27) for a in A_TABLE], name="sunder")


def _sover() -> Piecewise:
    return Piecewise.quadratic(27, F(1, 18), F(17, 54), [F(a, 27) + 1 for a in A_TABLE], name="sover")


_BUILTINS: dict[str, Callable[[], Piecewise]] = {
    "s1": _s1, "s2": _s2, "s2pp": _s2pp, "s1p": _s1p, "s2p": _s2p,
    "stilde": _stilde, "sunder": _sunder, "sover": _sover,
}

BUILTIN_NAMES = tuple(_BUILTINS)


@lru_cache(maxsize=None)
def builtin(name: str) -> Piecewise:
    try:
        return _BUILTINS[name]()
    except KeyError:
        raise ValueError(f"unknown builtin function {name!r}; known: {', '.join(_BUILTINS)}") from None


def s1(d: int) -> int:
    return builtin("s1")(d)


def s2(d: int) -> int:
    return builtin("s2")(d)


def s2pp(d: int) -> int:
    return builtin("s2pp")(d)


def s1p(d: int) -> int:
    return builtin("s1p")(d)


def s2p(d: int) -> int:
    return builtin("s2p")(d)


def stilde(d: int) -> int:
    return builtin("stilde")(d)


def sunder(d: int) -> int:
    return builtin("sunder")(d)


def sover(d: int) -> int:
    return builtin("sover")(d)


def split_ratio(n: int, d: int) -> Fraction:
    """C(n+d, d) / (dn+1): the number of points that exactly fills R_d."""
    return Fraction(comb(n + d, d), d * n + 1)


# text syntax -----------------------------------------------------------------


def _parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"not a rational number: {text!r}") from None


def parse_function_spec(text: str) -> FunctionSpec:
    """Parse ``const:<int>``, ``builtin:<name>`` or ``pw:m=..:a2=..:a1=..:a0=..``."""
    text = text.strip()
    kind, _, rest = text.partition(":")
    if kind == "const":
        try:
            value = int(rest)
        except ValueError:
            raise ValueError(f"bad constant in {text!r}") from None
        return Constant(value)
    if kind == "builtin":
        return builtin(rest)
    if kind == "pw":
        fields = {}
        for part in rest.split(":"):
            key, eq, val = part.partition("=")
            if not eq or key not in ("m", "a2", "a1", "a0") or key in fields:
                raise ValueError(f"bad piecewise field {part!r} in {text!r}")
            fields[key] = val
        if set(fields) != {"m", "a2", "a1", "a0"}:
            raise ValueError(f"piecewise spec needs m, a2, a1 and a0: {text!r}")
        try:
            m = int(fields["m"])
        except ValueError:
            raise ValueError(f"bad modulus in {text!r}") from None
        if m < 1:
            raise ValueError("modulus must be >= 1")

        def per_class(key: str) -> list[Fraction]:
            vals = [_parse_rational(v) for v in fields[key].split(",")]
            if len(vals) == 1 and key != "a0":
                return vals * m
            if len(vals) != m:
                raise ValueError(f"{key} needs 1 or {m} entries" if key != "a0" else f"a0 needs {m} entries")
            return vals

        a2, a1, a0 = per_class("a2"), per_class("a1"), per_class("a0")
        return Piecewise(m, tuple(zip(a2, a1, a0)))
    raise ValueError(f"unknown function spec {text!r}; expected const:, builtin: or pw:")
