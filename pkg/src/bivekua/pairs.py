"""Generating pairs: characteristic coefficients, derivatives and integrals
in the sense of a pair (F, G), adjoint and successor relations, and the
period-two generating sequence for separable functions f = phi(x) psi(y).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

from . import expr as ex
from .bicomplex import Bicomplex, PlanePoint
from .calculus import Path, RegionGrid, wirtinger
from .fields import Field, SymBC


class PairError(Exception):
    pass


class DegeneratePairError(PairError):
    """Vec(conj_j(F) G) vanished at a sampled point."""


class MissingSequenceError(PairError):
    """Requested index outside the representable sequence window."""


def _dzbar_sym(s: SymBC) -> SymBC:
    return s.d_zbar()


def _dz_sym(s: SymBC) -> SymBC:
    return s.d_z()


@dataclass
class GeneratingPair:
    """A pair (F, G) with Vec(conj_j(F) G) != 0, plus its characteristic
    coefficient fields a, b (for d_zbar) and A, B (for d_z)."""

    F: Field
    G: Field
    a: Field
    b: Field
    A: Field
    B: Field

    def vekua_rhs(self, z: PlanePoint, w: Bicomplex) -> Bicomplex:
        return self.a(z) * w + self.b(z) * w.conj()


def _coefficients_symbolic(F: SymBC, G: SymBC):
    Fc, Gc = F.conj(), G.conj()
    D = F.mul(Gc).sub(Fc.mul(G))
    Dinv = D.inv()
    dzbF, dzbG = _dzbar_sym(F), _dzbar_sym(G)
    dzF, dzG = _dz_sym(F), _dz_sym(G)
    a = Fc.mul(dzbG).sub(Gc.mul(dzbF)).mul(Dinv).neg()
    b = F.mul(dzbG).sub(G.mul(dzbF)).mul(Dinv)
    A = Fc.mul(dzG).sub(Gc.mul(dzF)).mul(Dinv).neg()
    B = F.mul(dzG).sub(G.mul(dzF)).mul(Dinv)
    return tuple(Field.from_sym(s) for s in (a, b, A, B))


def _coefficients_numeric(F: Field, G: Field):
    def build(which: str) -> Field:
        def coef(z: PlanePoint) -> Bicomplex:
            gF = wirtinger(F, z)
            gG = wirtinger(G, z)
            Fv, Gv = gF.value, gG.value
            D = Fv * Gv.conj() - Fv.conj() * Gv
            dF = gF.dzbar if which in "ab" else gF.dz
            dG = gG.dzbar if which in "ab" else gG.dz
            if which in "aA":
                num = -(Fv.conj() * dG - Gv.conj() * dF)
            else:
                num = Fv * dG - Gv * dF
            return num * D.inv()

        return Field(coef)

    return build("a"), build("b"), build("A"), build("B")


def make_pair(
    F: Field, G: Field, region: Optional[RegionGrid] = None, samples: int = 20
) -> GeneratingPair:
    """Validate the pair condition on a sample grid and attach the four
    characteristic coefficient fields (symbolic when F, G are)."""
    if region is not None:
        for p in region.sample_points(samples):
            if abs((F(p).conj() * G(p)).vec) < 1e-14:
                raise DegeneratePairError(f"Vec(conj_j(F) G) = 0 at {p}")
    if F.sym is not None and G.sym is not None:
        a, b, A, B = _coefficients_symbolic(F.sym, G.sym)
    else:
        a, b, A, B = _coefficients_numeric(F, G)
    return GeneratingPair(F, G, a, b, A, B)


def fg_derivative(
    w: Field, pair: GeneratingPair, z: PlanePoint, h: Optional[float] = None
) -> Bicomplex:
    """The derivative in the sense of the pair: d_z W - A W - B conj_j(W)."""
    g = wirtinger(w, z, h)
    return g.dz - pair.A(z) * g.value - pair.B(z) * g.value.conj()


def vekua_residual(
    w: Field, pair: GeneratingPair, z: PlanePoint, h: Optional[float] = None
) -> float:
    g = wirtinger(w, z, h)
    return (g.dzbar - pair.a(z) * g.value - pair.b(z) * g.value.conj()).norm


def adjoint_fields(pair: GeneratingPair) -> tuple[Field, Field]:
    """(F*, G*) = (-2 conj_j(F) / D, 2 conj_j(G) / D), D = F conj_j(G) - conj_j(F) G."""
    F, G = pair.F, pair.G
    if F.sym is not None and G.sym is not None:
        D = F.sym.mul(G.sym.conj()).sub(F.sym.conj().mul(G.sym))
        Dinv = D.inv()
        Fs = F.sym.conj().scale(-2).mul(Dinv)
        Gs = G.sym.conj().scale(2).mul(Dinv)
        return Field.from_sym(Fs), Field.from_sym(Gs)

    def dval(z: PlanePoint) -> Bicomplex:
        Fv, Gv = F(z), G(z)
        return Fv * Gv.conj() - Fv.conj() * Gv

    return (
        Field(lambda z: F(z).conj().scale(-2) * dval(z).inv()),
        Field(lambda z: G(z).conj().scale(2) * dval(z).inv()),
    )


def adjoint_pair(pair: GeneratingPair, region: Optional[RegionGrid] = None) -> GeneratingPair:
    Fs, Gs = adjoint_fields(pair)
    return make_pair(Fs, Gs, region)


def is_successor(
    candidate: GeneratingPair,
    base: GeneratingPair,
    region: RegionGrid,
    tol: float = 1e-8,
    samples: int = 20,
) -> bool:
    """True iff a_candidate = a_base and b_candidate = -B_base on the grid."""
    for p in region.sample_points(samples):
        if (candidate.a(p) - base.a(p)).norm > tol:
            return False
        if (candidate.b(p) + base.B(p)).norm > tol:
            return False
    return True


def star_integral(w: Field, pair: GeneratingPair, path: Path) -> Bicomplex:
    """Sc ∫ G* W dz + j Sc ∫ F* W dz with bicomplex dz = dx + j dy."""
    Fs, Gs = adjoint_fields(pair)
    ig = path.integrate_bc(lambda p: Gs(p) * w(p))
    iff = path.integrate_bc(lambda p: Fs(p) * w(p))
    return Bicomplex(ig.sc, iff.sc)


def fg_integral(w: Field, pair: GeneratingPair, path: Path) -> Bicomplex:
    """F(z1) Sc ∫ G* W dz + G(z1) Sc ∫ F* W dz: the antiderivative in the
    sense of the pair, evaluated at the path endpoint."""
    star = star_integral(w, pair, path)
    z1 = path.end
    return pair.F(z1).scale(star.sc) + pair.G(z1).scale(star.vec)


# ---------------------------------------------------------------------------
# Separable generating sequences


def _expr_of(src, var_check: str) -> ex.Expr:
    e = ex.parse(src, ("x", "y")) if isinstance(src, str) else src
    return e


def separable_pair(phi, psi, m: int) -> GeneratingPair:
    """Pair number m of the period-two sequence generated by f = phi(x) psi(y):
    (f, j/f) for even m and (psi/phi, j phi/psi) for odd m."""
    phi_e = _expr_of(phi, "x")
    psi_e = _expr_of(psi, "y")
    prod = ex.simplify(ex.BinOp("*", phi_e, psi_e))
    if m % 2 == 0:
        F = Field.from_sym(SymBC(("x", "y"), prod, ex.Num(0j)))
        G = Field.from_sym(
            SymBC(("x", "y"), ex.Num(0j), ex.simplify(ex.BinOp("/", ex.Num(1 + 0j), prod)))
        )
    else:
        ratio = ex.simplify(ex.BinOp("/", psi_e, phi_e))
        inv_ratio = ex.simplify(ex.BinOp("/", phi_e, psi_e))
        F = Field.from_sym(SymBC(("x", "y"), ratio, ex.Num(0j)))
        G = Field.from_sym(SymBC(("x", "y"), ex.Num(0j), inv_ratio))
    return make_pair(F, G)


@dataclass
class GeneratingSequence:
    """An indexed family m -> GeneratingPair over a finite window (or the
    whole of the integers for periodic families)."""

    pair_fn: Callable[[int], GeneratingPair]
    lo: float = -math.inf
    hi: float = math.inf

    def pair_at(self, m: int) -> GeneratingPair:
        if not (self.lo <= m <= self.hi):
            raise MissingSequenceError(
                f"index {m} outside sequence window [{self.lo}, {self.hi}]"
            )
        return self.pair_fn(m)

    @staticmethod
    def separable(phi, psi) -> "GeneratingSequence":
        cache: dict[int, GeneratingPair] = {}

        def get(m: int) -> GeneratingPair:
            key = m % 2
            if key not in cache:
                cache[key] = separable_pair(phi, psi, key)
            return cache[key]

        return GeneratingSequence(get)
