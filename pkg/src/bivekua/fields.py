"""Bicomplex-valued fields over the plane.

A Field maps plane points to bicomplex values.  Fields built from
expression pairs carry exact symbolic partial derivatives; fields built
from bare callables fall back to finite differences in the operators that
need derivatives.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Union

from . import expr as ex
from .bicomplex import Bicomplex, PlanePoint

_ZERO = ex.Num(0j)


def _e(op: str, left: ex.Expr, right: ex.Expr) -> ex.Expr:
    return ex.simplify(ex.BinOp(op, left, right))


def _as_expr(v: Union[str, ex.Expr, float, complex], variables) -> ex.Expr:
    if isinstance(v, str):
        return ex.parse(v, variables)
    if isinstance(v, (int, float, complex)):
        return ex.Num(complex(v))
    return v


@dataclass(frozen=True)
class SymBC:
    """A bicomplex-valued symbolic function: sc(vars) + j * vec(vars)."""

    variables: tuple[str, ...]
    sc: ex.Expr
    vec: ex.Expr = _ZERO

    @staticmethod
    def make(sc, vec=0j, variables=("x", "y")) -> "SymBC":
        variables = tuple(variables)
        return SymBC(variables, _as_expr(sc, variables), _as_expr(vec, variables))

    # -- evaluation -------------------------------------------------------

    def compiled(self) -> Callable[..., Bicomplex]:
        cache = self.__dict__.get("_compiled")
        if cache is None:
            fsc = ex.compile_expr(self.sc, self.variables)
            fvec = ex.compile_expr(self.vec, self.variables)
            cache = lambda *a: Bicomplex(fsc(*a), fvec(*a))  # noqa: E731
            object.__setattr__(self, "_compiled", cache)
        return cache

    def __call__(self, *args) -> Bicomplex:
        return self.compiled()(*args)

    # -- algebra (bicomplex ring on expressions) --------------------------

    def _wrap(self, sc: ex.Expr, vec: ex.Expr) -> "SymBC":
        return SymBC(self.variables, ex.simplify(sc), ex.simplify(vec))

    def add(self, other: "SymBC") -> "SymBC":
        return self._wrap(_e("+", self.sc, other.sc), _e("+", self.vec, other.vec))

    def sub(self, other: "SymBC") -> "SymBC":
        return self._wrap(_e("-", self.sc, other.sc), _e("-", self.vec, other.vec))

    def mul(self, other: "SymBC") -> "SymBC":
        sc = _e("-", _e("*", self.sc, other.sc), _e("*", self.vec, other.vec))
        vec = _e("+", _e("*", self.sc, other.vec), _e("*", self.vec, other.sc))
        return self._wrap(sc, vec)

    def neg(self) -> "SymBC":
        return self._wrap(_e("-", _ZERO, self.sc), _e("-", _ZERO, self.vec))

    def conj(self) -> "SymBC":
        return self._wrap(self.sc, _e("-", _ZERO, self.vec))

    def mul_j(self) -> "SymBC":
        return self._wrap(_e("-", _ZERO, self.vec), self.sc)

    def scale(self, c: Union[complex, ex.Expr]) -> "SymBC":
        c = _as_expr(c, self.variables)
        return self._wrap(_e("*", c, self.sc), _e("*", c, self.vec))

    def inv(self) -> "SymBC":
        d = _e("+", _e("*", self.sc, self.sc), _e("*", self.vec, self.vec))
        return self._wrap(_e("/", self.sc, d), _e("-", _ZERO, _e("/", self.vec, d)))

    def div(self, other: "SymBC") -> "SymBC":
        return self.mul(other.inv())

    # -- calculus ----------------------------------------------------------

    def diff(self, var: str) -> "SymBC":
        return self._wrap(ex.diff(self.sc, var), ex.diff(self.vec, var))

    def d_zbar(self) -> "SymBC":
        """(1/2)(d/dx + j d/dy) with respect to (x, y)."""
        return self.diff("x").add(self.diff("y").mul_j()).scale(0.5)

    def d_z(self) -> "SymBC":
        """(1/2)(d/dx - j d/dy) with respect to (x, y)."""
        return self.diff("x").sub(self.diff("y").mul_j()).scale(0.5)

    def rename(self, mapping: dict[str, str], variables) -> "SymBC":
        """Rename variables, e.g. to swap the roles of (x,y) and (xi,eta)."""

        def walk(e: ex.Expr) -> ex.Expr:
            if isinstance(e, ex.Var):
                return ex.Var(mapping.get(e.name, e.name))
            if isinstance(e, ex.BinOp):
                return ex.BinOp(e.op, walk(e.left), walk(e.right))
            if isinstance(e, ex.Pow):
                return ex.Pow(walk(e.base), e.exponent)
            if isinstance(e, ex.Call):
                return ex.Call(e.func, walk(e.arg))
            return e

        return SymBC(tuple(variables), walk(self.sc), walk(self.vec))


class Field:
    """Map PlanePoint -> Bicomplex, optionally with exact partials.

    ``sym`` is set when the field was built from expressions over (x, y);
    then ``dx``/``dy`` are exact symbolic fields, otherwise they are None
    and consumers fall back to finite differences.
    """

    def __init__(
        self,
        func: Callable[[PlanePoint], Bicomplex],
        sym: Optional[SymBC] = None,
        continuity: str = "unknown",
    ):
        self._func = func
        self.sym = sym
        self.continuity = continuity
        self._dx: Optional["Field"] = None
        self._dy: Optional["Field"] = None

    @staticmethod
    def from_sym(sym: SymBC, continuity: str = "smooth") -> "Field":
        fn = sym.compiled()
        return Field(lambda z: fn(z.x, z.y), sym=sym, continuity=continuity)

    @staticmethod
    def from_exprs(sc, vec=0j, continuity: str = "smooth") -> "Field":
        return Field.from_sym(SymBC.make(sc, vec), continuity)

    @staticmethod
    def constant(w: Bicomplex) -> "Field":
        return Field.from_sym(SymBC.make(w.sc, w.vec))

    @staticmethod
    def with_partials(
        func: Callable[[PlanePoint], Bicomplex], dx: "Field", dy: "Field"
    ) -> "Field":
        """A callable field with explicitly supplied exact partials, for
        values defined by integrals whose derivatives are known in closed
        form even though the values themselves are not."""
        out = Field(func)
        out._dx = dx
        out._dy = dy
        return out

    def __call__(self, z: PlanePoint) -> Bicomplex:
        return self._func(z)

    @property
    def has_exact_partials(self) -> bool:
        return self.sym is not None or (
            self._dx is not None and self._dy is not None
        )

    @property
    def dx(self) -> Optional["Field"]:
        if self._dx is None and self.sym is not None:
            self._dx = Field.from_sym(self.sym.diff("x"))
        return self._dx

    @property
    def dy(self) -> Optional["Field"]:
        if self._dy is None and self.sym is not None:
            self._dy = Field.from_sym(self.sym.diff("y"))
        return self._dy

    # combinators keep symbolic form when both operands have one

    def _combine(self, other: "Field", sym_op, func_op) -> "Field":
        if self.sym is not None and other.sym is not None:
            return Field.from_sym(sym_op(self.sym, other.sym))
        return Field(lambda z: func_op(self(z), other(z)))

    def __add__(self, other: "Field") -> "Field":
        return self._combine(other, SymBC.add, lambda a, b: a + b)

    def __sub__(self, other: "Field") -> "Field":
        return self._combine(other, SymBC.sub, lambda a, b: a - b)

    def __mul__(self, other: "Field") -> "Field":
        return self._combine(other, SymBC.mul, lambda a, b: a * b)

    def conj(self) -> "Field":
        if self.sym is not None:
            return Field.from_sym(self.sym.conj())
        return Field(lambda z: self(z).conj())

    def bc_inv(self) -> "Field":
        if self.sym is not None:
            return Field.from_sym(self.sym.inv())
        return Field(lambda z: self(z).inv())

    def scale(self, c: complex) -> "Field":
        if self.sym is not None:
            return Field.from_sym(self.sym.scale(c))
        return Field(lambda z: self(z).scale(c))

    def mul_j(self) -> "Field":
        if self.sym is not None:
            return Field.from_sym(self.sym.mul_j())
        return Field(lambda z: Bicomplex(-self(z).vec, self(z).sc))


KERNEL_VARS = ("xi", "eta", "x", "y")


@dataclass
class Kernel:
    """A two-point symbolic function K(zeta, z) over (xi, eta, x, y)."""

    sym: SymBC

    @staticmethod
    def make(sc, vec=0j) -> "Kernel":
        return Kernel(SymBC.make(sc, vec, KERNEL_VARS))

    def __call__(self, zeta: PlanePoint, z: PlanePoint) -> Bicomplex:
        return self.sym.compiled()(zeta.x, zeta.y, z.x, z.y)

    def swap_arguments(self) -> "Kernel":
        mapping = {"xi": "x", "eta": "y", "x": "xi", "y": "eta"}
        return Kernel(self.sym.rename(mapping, KERNEL_VARS))

    def diff_z(self, var: str) -> "Kernel":
        return Kernel(self.sym.diff(var))

    def field_in_z(self, zeta: PlanePoint) -> Field:
        """Freeze zeta: a symbolic Field of z with exact partials."""
        sym = _substitute(self.sym, {"xi": zeta.x, "eta": zeta.y})
        return Field.from_sym(sym)

    def field_in_zeta(self, z: PlanePoint) -> Field:
        """Freeze z; the result varies in zeta, renamed to (x, y)."""
        sym = _substitute(self.sym, {"x": z.x, "y": z.y})
        renamed = sym.rename({"xi": "x", "eta": "y"}, ("x", "y"))
        return Field.from_sym(renamed)


def _substitute(sym: SymBC, binding: dict[str, float]) -> SymBC:
    def walk(e: ex.Expr) -> ex.Expr:
        if isinstance(e, ex.Var) and e.name in binding:
            return ex.Num(complex(binding[e.name]))
        if isinstance(e, ex.BinOp):
            return ex.BinOp(e.op, walk(e.left), walk(e.right))
        if isinstance(e, ex.Pow):
            return ex.Pow(walk(e.base), e.exponent)
        if isinstance(e, ex.Call):
            return ex.Call(e.func, walk(e.arg))
        return e

    remaining = tuple(v for v in sym.variables if v not in binding)
    return SymBC(remaining, ex.simplify(walk(sym.sc)), ex.simplify(walk(sym.vec)))
