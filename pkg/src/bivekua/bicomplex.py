"""Arithmetic in the commutative ring B of bicomplex numbers.

A bicomplex number is W = u + j*v with u, v complex over the imaginary
unit i, where i and j commute and both square to -1.  The ring has zero
divisors: exactly the nonzero multiples of the idempotents
P+ = (1 + ij)/2 and P- = (1 - ij)/2.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction


class BicomplexError(Exception):
    pass


class InvalidValueError(BicomplexError):
    """NaN or Inf component fed to a public constructor."""


class ZeroDivisorError(BicomplexError):
    """Attempt to invert a nonzero W with W * conj_j(W) == 0."""


class DivisionByZeroError(BicomplexError):
    """Attempt to invert the zero element."""


def _require_finite(c: complex) -> complex:
    if not (math.isfinite(c.real) and math.isfinite(c.imag)):
        raise InvalidValueError(f"non-finite component: {c!r}")
    return c


def _two_sum(a: float, b: float) -> tuple[float, float]:
    # Knuth's branch-free TwoSum: s + e == a + b exactly.
    s = a + b
    bb = s - a
    e = (a - (s - bb)) + (b - bb)
    return s, e


@dataclass(frozen=True)
class PlanePoint:
    """A point z = x + j*y of the plane C_j."""

    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise InvalidValueError(f"non-finite plane point ({self.x}, {self.y})")

    @property
    def as_complex(self) -> complex:
        """The point as an ordinary complex number x + iy (for C_j algebra)."""
        return complex(self.x, self.y)

    @staticmethod
    def of(c: complex) -> "PlanePoint":
        return PlanePoint(c.real, c.imag)

    def shifted(self, dx: float, dy: float) -> "PlanePoint":
        return PlanePoint(self.x + dx, self.y + dy)

    def dist(self, other: "PlanePoint") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


@dataclass(frozen=True)
class IdempotentPair:
    """Idempotent coordinates (W+, W-) of a bicomplex number.

    The hidden err_* fields hold the exact rounding residue of the two
    additions in W+- = Sc W -+ i Vec W, making the split lossless:
    ``from_idempotent(idempotent_split(W)) == W`` exactly.
    """

    plus: complex
    minus: complex
    err_plus: complex = 0j
    err_minus: complex = 0j


@dataclass(frozen=True)
class Bicomplex:
    """W = sc + j*vec with sc, vec in C_i.  Immutable value type."""

    sc: complex
    vec: complex

    def __post_init__(self) -> None:
        object.__setattr__(self, "sc", _require_finite(complex(self.sc)))
        object.__setattr__(self, "vec", _require_finite(complex(self.vec)))

    # -- ring operations -------------------------------------------------

    def __add__(self, other: "Bicomplex") -> "Bicomplex":
        return Bicomplex(self.sc + other.sc, self.vec + other.vec)

    def __sub__(self, other: "Bicomplex") -> "Bicomplex":
        return Bicomplex(self.sc - other.sc, self.vec - other.vec)

    def __neg__(self) -> "Bicomplex":
        return Bicomplex(-self.sc, -self.vec)

    def __mul__(self, other: "Bicomplex") -> "Bicomplex":
        # j^2 = -1, ij = ji
        return Bicomplex(
            self.sc * other.sc - self.vec * other.vec,
            self.sc * other.vec + self.vec * other.sc,
        )

    def scale(self, c: complex) -> "Bicomplex":
        """Multiplication by a C_i scalar."""
        return Bicomplex(c * self.sc, c * self.vec)

    def conj(self) -> "Bicomplex":
        """Conjugation with respect to j: u + jv -> u - jv."""
        return Bicomplex(self.sc, -self.vec)

    @property
    def is_zero(self) -> bool:
        return self.sc == 0 and self.vec == 0

    def times_conj(self) -> complex:
        """W * conj_j(W) as a C_i number; equals W+ * W-."""
        return self.sc * self.sc + self.vec * self.vec

    @property
    def is_zero_divisor(self) -> bool:
        return not self.is_zero and self.times_conj() == 0

    def inv(self) -> "Bicomplex":
        """W^{-1} = conj_j(W) / (W conj_j(W))."""
        if self.is_zero:
            raise DivisionByZeroError("inverse of zero")
        d = self.times_conj()
        if d == 0:
            raise ZeroDivisorError(f"{self!r} is a zero divisor")
        return Bicomplex(self.sc / d, -self.vec / d)

    def __truediv__(self, other: "Bicomplex") -> "Bicomplex":
        return self * other.inv()

    # -- norm and idempotent coordinates ---------------------------------

    @property
    def norm(self) -> float:
        """|W| = (|W+| + |W-|)/2; sub-multiplicative with constant 2."""
        return 0.5 * (abs(self.sc - 1j * self.vec) + abs(self.sc + 1j * self.vec))

    def __abs__(self) -> float:
        return self.norm

    def idempotent(self) -> tuple[complex, complex]:
        """(W+, W-) = (Sc W - i Vec W, Sc W + i Vec W), without compensation."""
        return self.sc - 1j * self.vec, self.sc + 1j * self.vec

    # -- serialization ----------------------------------------------------

    def to_json(self) -> dict:
        return {
            "sc": [self.sc.real, self.sc.imag],
            "vec": [self.vec.real, self.vec.imag],
        }

    @staticmethod
    def from_json(obj: dict) -> "Bicomplex":
        return Bicomplex(complex(*obj["sc"]), complex(*obj["vec"]))

    def __repr__(self) -> str:
        return f"Bicomplex({self.sc!r}, {self.vec!r})"


ZERO = Bicomplex(0, 0)
ONE = Bicomplex(1, 0)
J = Bicomplex(0, 1)
P_PLUS = Bicomplex(0.5, 0.5j)
P_MINUS = Bicomplex(0.5, -0.5j)


def from_ci(u: complex) -> Bicomplex:
    """Embed a C_i scalar."""
    return Bicomplex(u, 0)


def from_cj(c: complex) -> Bicomplex:
    """Embed a C_j number a + jb given as the complex a + ib."""
    return Bicomplex(c.real, c.imag)


def from_plane(p: PlanePoint) -> Bicomplex:
    return Bicomplex(p.x, p.y)


def idempotent_split(w: Bicomplex) -> IdempotentPair:
    """Unique (W+, W-) with W = P+ W+ + P- W-, plus exact rounding residue."""
    pr, epr = _two_sum(w.sc.real, w.vec.imag)
    pi, epi = _two_sum(w.sc.imag, -w.vec.real)
    mr, emr = _two_sum(w.sc.real, -w.vec.imag)
    mi, emi = _two_sum(w.sc.imag, w.vec.real)
    return IdempotentPair(
        complex(pr, pi), complex(mr, mi), complex(epr, epi), complex(emr, emi)
    )


def _exact_half_sum(a: float, ea: float, b: float, eb: float) -> float:
    # ((a+ea) + (b+eb)) / 2 evaluated exactly; the result is representable
    # because it equals one of the original float components, so fsum (which
    # rounds the true sum once) returns its double and the halving is exact.
    try:
        return math.fsum((a, ea, b, eb)) / 2
    except OverflowError:
        total = Fraction(a) + Fraction(ea) + Fraction(b) + Fraction(eb)
        return float(total / 2)


def from_idempotent(pair: IdempotentPair) -> Bicomplex:
    """Invert idempotent_split exactly."""
    p, m, ep, em = pair.plus, pair.minus, pair.err_plus, pair.err_minus
    sc_re = _exact_half_sum(p.real, ep.real, m.real, em.real)
    sc_im = _exact_half_sum(p.imag, ep.imag, m.imag, em.imag)
    vec_re = _exact_half_sum(m.imag, em.imag, -p.imag, -ep.imag)
    vec_im = _exact_half_sum(p.real, ep.real, -m.real, -em.real)
    return Bicomplex(complex(sc_re, sc_im), complex(vec_re, vec_im))


def bc_exp(w: Bicomplex) -> Bicomplex:
    """E[W] = P+ e^{W+} + P- e^{W-}."""
    p, m = w.idempotent()
    ep, em = cmath.exp(p), cmath.exp(m)
    return Bicomplex(0.5 * (ep + em), 0.5j * (ep - em))


def isclose(a: Bicomplex, b: Bicomplex, tol: float = 1e-12) -> bool:
    """Tolerance scaled by max(1, |a|, |b|)."""
    return (a - b).norm <= tol * max(1.0, a.norm, b.norm)
