"""The Schrödinger bridge: potentials from a particular solution f, Cauchy
kernels built from fundamental solutions of the two-dimensional Schrödinger
equation, reproducing kernels for the associated main Vekua equation, and
Darboux-transformed fundamental solutions, together with the closed-form
reference family for f(z) = x.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

from . import expr as ex
from .bicomplex import Bicomplex, PlanePoint
from .calculus import Path, _partials, tf_transform
from .fields import KERNEL_VARS, Field, Kernel, SymBC
from .pairs import GeneratingPair, adjoint_pair, make_pair
from .powers import KernelFamily, SingularPointError, adjoint_kernel_transfer


class SchroedingerError(Exception):
    pass


_ZERO = ex.Num(0j)


def _e(op: str, left: ex.Expr, right: ex.Expr) -> ex.Expr:
    return ex.simplify(ex.BinOp(op, left, right))


_LOG_RHO = "0.5*log((x - xi)^2 + (y - eta)^2)"


# ---------------------------------------------------------------------------
# Fundamental solutions


@dataclass
class FundamentalSolution:
    """S(zeta, z) = log|z - zeta| + R(zeta, z): a fundamental solution of
    the Schrödinger equation with potential q, singular at the center zeta.

    ``regular`` evaluates R; ``sym`` carries the closed form of the full S
    over (xi, eta, x, y) when available, giving exact partials downstream.
    """

    q: Field
    regular: Callable[[PlanePoint, PlanePoint], complex]
    sym: Optional[Kernel] = None

    def __call__(self, zeta: PlanePoint, z: PlanePoint) -> complex:
        if zeta.dist(z) == 0:
            raise SingularPointError(f"fundamental solution evaluated at {z}")
        if self.sym is not None:
            return self.sym(zeta, z).sc
        return math.log(zeta.dist(z)) + self.regular(zeta, z)

    @staticmethod
    def laplace() -> "FundamentalSolution":
        """log|z - zeta|: the fundamental solution for q = 0."""
        return FundamentalSolution(
            q=Field.constant(Bicomplex(0, 0)),
            regular=lambda zeta, z: 0j,
            sym=Kernel.make(_LOG_RHO),
        )

    @staticmethod
    def from_closed_form(sc: Union[str, ex.Expr], q: Field) -> "FundamentalSolution":
        """Wrap a closed-form S(xi, eta, x, y) for the potential q."""
        sym = Kernel.make(sc)

        def regular(zeta: PlanePoint, z: PlanePoint) -> complex:
            return sym(zeta, z).sc - math.log(zeta.dist(z))

        return FundamentalSolution(q=q, regular=regular, sym=sym)


# ---------------------------------------------------------------------------
# Potentials


def _laplacian(u: Field, z: PlanePoint, h: Optional[float] = None) -> Bicomplex:
    if u.sym is not None and h is None:
        sxx = u.sym.diff("x").diff("x")
        syy = u.sym.diff("y").diff("y")
        return sxx.add(syy)(z.x, z.y)
    if h is None:
        h = 1e-4 * (1 + math.hypot(z.x, z.y))
    center = u(z).scale(4)
    total = (
        u(PlanePoint(z.x + h, z.y))
        + u(PlanePoint(z.x - h, z.y))
        + u(PlanePoint(z.x, z.y + h))
        + u(PlanePoint(z.x, z.y - h))
    )
    return (total - center).scale(1 / h**2)


def potential_from_f(f: Field) -> Field:
    """The potential q = (Laplacian f)/f of the equation solved by f."""
    if f.sym is not None:
        lap = f.sym.diff("x").diff("x").add(f.sym.diff("y").diff("y"))
        return Field.from_sym(lap.mul(f.sym.inv()))
    return Field(lambda z: _laplacian(f, z) * f(z).inv())


def darboux_potential(f: Field) -> Field:
    """The transformed potential q1 = 2((f_x)^2 + (f_y)^2)/f^2 - q."""
    q = potential_from_f(f)
    if f.sym is not None:
        fx, fy = f.sym.diff("x"), f.sym.diff("y")
        grad2 = fx.mul(fx).add(fy.mul(fy))
        lead = grad2.mul(f.sym.mul(f.sym).inv()).scale(2)
        return Field.from_sym(lead) - q

    def val(z: PlanePoint) -> Bicomplex:
        fv, fx, fy = _partials(f, z, None)
        grad2 = fx * fx + fy * fy
        return grad2.scale(2) * (fv * fv).inv() - q(z)

    return Field(val)


def schroedinger_residual(
    u: Field, q: Field, z: PlanePoint, h: Optional[float] = None
) -> float:
    """|Laplacian u - q u| at z, exact when u is symbolic and no step is
    forced, else via the 5-point stencil with step h."""
    return (_laplacian(u, z, h) - q(z) * u(z)).norm


# ---------------------------------------------------------------------------
# Main Vekua problem bundle


@dataclass
class MainVekuaProblem:
    """A nonvanishing solution f of the q-equation together with the derived
    potentials and the generating pairs (f, j/f) and its successor."""

    f: Field
    q: Field
    q1: Field
    pair: GeneratingPair
    successor: GeneratingPair

    @staticmethod
    def from_f(f: Field, region=None) -> "MainVekuaProblem":
        pair = make_pair(f, f.bc_inv().mul_j(), region)
        return MainVekuaProblem(
            f=f,
            q=potential_from_f(f),
            q1=darboux_potential(f),
            pair=pair,
            successor=adjoint_pair(pair),
        )


# ---------------------------------------------------------------------------
# Kernel construction from a fundamental solution


def _missing_coefj(zeta: PlanePoint, z: PlanePoint) -> Bicomplex:
    raise SchroedingerError(
        "coefficient-j evaluator not constructed; complete the family with "
        "successor_kernel_coefj"
    )


def successor_kernel_coef1(S: FundamentalSolution, f: Field) -> KernelFamily:
    """Coefficient-1 Cauchy kernel of the successor equation of the main
    Vekua equation of f: 2(d_z S - (d_z f / f) S), derivatives in z.

    The returned family is partial: only the coefficient-1 slot is filled.
    """
    if S.sym is not None and f.sym is not None:
        s = S.sym.sym.sc
        sx, sy = ex.diff(s, "x"), ex.diff(s, "y")
        fe = f.sym.sc
        ratio_x = _e("/", ex.diff(fe, "x"), fe)
        ratio_y = _e("/", ex.diff(fe, "y"), fe)
        sc = _e("-", sx, _e("*", ratio_x, s))
        vec = _e("-", _e("*", ratio_y, s), sy)
        k = Kernel(SymBC(KERNEL_VARS, sc, vec))
        return KernelFamily(order=-1, coef1=k.__call__, coefj=_missing_coefj, sym1=k)

    def coef1(zeta: PlanePoint, z: PlanePoint) -> Bicomplex:
        if zeta.dist(z) == 0:
            raise SingularPointError(f"kernel evaluated on the diagonal at {z}")
        h = 1e-5 * (1 + math.hypot(z.x, z.y))
        sval = S(zeta, z)
        s_x = (S(zeta, PlanePoint(z.x + h, z.y)) - S(zeta, PlanePoint(z.x - h, z.y))) / (2 * h)
        s_y = (S(zeta, PlanePoint(z.x, z.y + h)) - S(zeta, PlanePoint(z.x, z.y - h))) / (2 * h)
        fv, fx, fy = _partials(f, z, None)
        return Bicomplex(
            s_x - fx.sc / fv.sc * sval, fy.sc / fv.sc * sval - s_y
        )

    return KernelFamily(order=-1, coef1=coef1, coefj=_missing_coefj)


def successor_kernel_coefj(
    k1: KernelFamily, f: Field, zeta0: PlanePoint, side: float = 1.0
) -> KernelFamily:
    """Complete a successor family with the coefficient-j kernel: the
    conjugate-building transform of -Z(1, zeta, z), acting in the center
    variable zeta along a path from the base point zeta0 that detours
    around z.

    The result is anchored: it vanishes at zeta = zeta0.  Any two kernels
    with the same coefficient differ by a regular solution, so the anchored
    evaluator is a Cauchy kernel whenever the coefficient-1 input is.
    """

    def coefj(zeta: PlanePoint, z: PlanePoint) -> Bicomplex:
        if zeta.dist(z) == 0:
            raise SingularPointError(f"kernel evaluated on the diagonal at {z}")
        if zeta.dist(zeta0) == 0:
            return Bicomplex(0, 0)
        path = Path.detour(zeta0, zeta, z, side=side)
        if k1.sym1 is not None:
            base = k1.sym1.field_in_zeta(z).sym
            u1 = Field.from_sym(SymBC(("x", "y"), _e("-", _ZERO, base.sc)))
            u2 = Field.from_sym(SymBC(("x", "y"), _e("-", _ZERO, base.vec)))
        else:
            u1 = Field(lambda p: Bicomplex(-k1.coef1(p, z).sc, 0))
            u2 = Field(lambda p: Bicomplex(-k1.coef1(p, z).vec, 0))
        return Bicomplex(
            tf_transform(f, u1, path), tf_transform(f, u2, path)
        )

    return KernelFamily(
        order=-1, coef1=k1.coef1, coefj=coefj, sym1=k1.sym1, pair=k1.pair
    )


def main_kernels(successor: KernelFamily) -> KernelFamily:
    """Reproducing kernel family of the main Vekua equation from a complete
    successor family, via the argument-swap component recombination (the
    successor equation coincides with the adjoint one)."""
    return adjoint_kernel_transfer(successor)


def darboux_fundamental(
    kj: KernelFamily,
    f: Field,
    z0: Union[PlanePoint, Callable[[PlanePoint], PlanePoint]],
    side: float = 1.0,
) -> FundamentalSolution:
    """Fundamental solution of the Darboux-transformed equation:
    S1(zeta, z) = (1/f(z)) Vec ∫_{z0}^{z} f(tau) Z(j, zeta, tau) dtau.

    z0 may be a fixed point or a map zeta -> z0 (e.g. zeta + 1)."""
    q1 = darboux_potential(f)
    base_of = z0 if callable(z0) else (lambda zeta: z0)

    def value(zeta: PlanePoint, z: PlanePoint) -> complex:
        if zeta.dist(z) == 0:
            raise SingularPointError(f"fundamental solution evaluated at {z}")
        path = Path.detour(base_of(zeta), z, zeta, side=side)

        def one_form(p: PlanePoint, dz: complex) -> complex:
            k = kj.coefj(zeta, p)
            return f(p).sc * (k.sc * dz.imag + k.vec * dz.real)

        return path.integrate(one_form) / f(z).sc

    def regular(zeta: PlanePoint, z: PlanePoint) -> complex:
        return value(zeta, z) - math.log(zeta.dist(z))

    return FundamentalSolution(q=q1, regular=regular)


# ---------------------------------------------------------------------------
# Conjugate construction


def conjugate_pair_build(f: Field, u: Field, path_base: PlanePoint) -> Field:
    """W = u + j T_f(u): a solution of the main Vekua equation of f built
    from a solution u of the q-equation, with the transform integrated from
    path_base.  The returned field carries exact partials:
        (f v)_x = -(u_y f - u f_y),  (f v)_y = u_x f - u f_x.
    """
    cache: dict[tuple[float, float], complex] = {}

    def v_val(z: PlanePoint) -> complex:
        key = (z.x, z.y)
        if key not in cache:
            if z.dist(path_base) == 0:
                cache[key] = 0j
            else:
                cache[key] = tf_transform(f, u, Path.polyline([path_base, z]))
        return cache[key]

    def func(z: PlanePoint) -> Bicomplex:
        return Bicomplex(u(z).sc, v_val(z))

    def grads(z: PlanePoint):
        uv, ux, uy = _partials(u, z, None)
        fv, fx, fy = _partials(f, z, None)
        v = v_val(z)
        gx = ux.sc * fv.sc - uv.sc * fx.sc
        gy = uy.sc * fv.sc - uv.sc * fy.sc
        vx = (-gy - v * fx.sc) / fv.sc
        vy = (gx - v * fy.sc) / fv.sc
        return ux.sc, uy.sc, vx, vy

    dx = Field(lambda z: Bicomplex(grads(z)[0], grads(z)[2]))
    dy = Field(lambda z: Bicomplex(grads(z)[1], grads(z)[3]))
    return Field.with_partials(func, dx, dy)


# ---------------------------------------------------------------------------
# Closed-form reference family for f(z) = x
#
# The scalar coordinate f = x solves the Laplace equation; its successor and
# main-equation kernels, negative powers, and Darboux fundamental solution
# all have closed forms, used as oracles throughout the test suite.

_RHO2 = "(x - xi)^2 + (y - eta)^2"
_L = f"0.5*log({_RHO2})"


def x_problem(region=None) -> MainVekuaProblem:
    return MainVekuaProblem.from_f(Field.from_exprs("x"), region)


def x_successor_family() -> KernelFamily:
    """Closed-form successor kernels for f = x (potential 0 side)."""
    k1 = Kernel.make(
        f"(x - xi)/({_RHO2}) - ({_L})/x",
        f"-(y - eta)/({_RHO2})",
    )
    kj = Kernel.make(
        f"(y - eta)/({_RHO2}) + ((y - eta)/(x*xi))*(({_L}) - 1)",
        f"(x - xi)/({_RHO2}) + ({_L})/xi",
    )
    return KernelFamily.from_kernels(k1, kj, order=-1)


def x_main_family() -> KernelFamily:
    """Closed-form reproducing kernels for the main Vekua equation of f = x."""
    k1 = Kernel.make(
        f"(x - xi)/({_RHO2}) + ({_L})/xi",
        f"-(y - eta)/({_RHO2}) - ((y - eta)/(x*xi))*(({_L}) - 1)",
    )
    kj = Kernel.make(
        f"(y - eta)/({_RHO2})",
        f"(x - xi)/({_RHO2}) - ({_L})/x",
    )
    return KernelFamily.from_kernels(k1, kj, order=-1)


def x_negative_power(n: int) -> KernelFamily:
    """Closed-form negative formal powers of order -n for the main Vekua
    equation of f = x (n >= 2)."""
    if n < 2:
        raise ValueError("closed forms start at order -2")

    def parts(zeta: PlanePoint, z: PlanePoint):
        d = complex(z.x - zeta.x, z.y - zeta.y)
        return d, z.x, zeta.x

    def coef1(zeta: PlanePoint, z: PlanePoint) -> Bicomplex:
        d, x, xi = parts(zeta, z)
        dn = 1 / d**n
        dn1 = 1 / d ** (n - 1)
        if n % 2 == 0:
            return Bicomplex(dn.real, dn.imag + dn1.imag / ((n - 1) * x))
        dn2 = 1 / d ** (n - 2)
        c = -dn1.imag + dn2.imag / ((n - 2) * xi)
        return Bicomplex(
            dn.real - dn1.real / ((n - 1) * xi),
            dn.imag - dn1.imag / ((n - 1) * xi) - c / ((n - 1) * x),
        )

    def coefj(zeta: PlanePoint, z: PlanePoint) -> Bicomplex:
        d, x, xi = parts(zeta, z)
        dn = 1 / d**n
        dn1 = 1 / d ** (n - 1)
        if n % 2 == 1:
            return Bicomplex(-dn.imag, dn.real + dn1.real / ((n - 1) * x))
        if n == 2:
            ell = math.log(abs(d))
            return Bicomplex(
                -dn.imag + dn1.imag / xi,
                dn.real - dn1.real / xi + (dn1.real + ell / xi) / x,
            )
        dn2 = 1 / d ** (n - 2)
        c = dn1.real - dn2.real / ((n - 2) * xi)
        return Bicomplex(
            -dn.imag + dn1.imag / ((n - 1) * xi),
            dn.real - dn1.real / ((n - 1) * xi) + c / ((n - 1) * x),
        )

    return KernelFamily(order=-n, coef1=coef1, coefj=coefj)


def x_darboux_fundamental() -> FundamentalSolution:
    """Closed-form fundamental solution of the q1 = 2/x^2 equation obtained
    from f = x with the path base point zeta + 1."""
    s1 = (
        f"({_L}) + (({_RHO2})/(2*x*xi))*({_L})"
        f" - (({_RHO2}) + 2*(y - eta)^2 - 1)/(4*x*xi)"
    )
    return FundamentalSolution.from_closed_form(s1, Field.from_exprs("2/x^2"))
