"""Formal powers and Cauchy kernels: asymptotics checks, both Cauchy
integral formulas by contour quadrature, the base/adjoint kernel transfer,
the reproducing-kernel certification, and the negative-power algorithm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Callable, Optional

from .bicomplex import Bicomplex, J, PlanePoint, from_cj
from .calculus import Path
from .fields import KERNEL_VARS, Field, Kernel, SymBC
from .pairs import (
    GeneratingPair,
    GeneratingSequence,
    MissingSequenceError,
    adjoint_fields,
    make_pair,
    vekua_residual,
)


class PowersError(Exception):
    pass


class SingularPointError(PowersError):
    """Kernel evaluated at z = zeta, or a probe on the contour."""


KernelEval = Callable[[PlanePoint, PlanePoint], Bicomplex]


@dataclass
class KernelFamily:
    """Formal powers Z^(order)(alpha, zeta, z) of one order, represented by
    the two coefficient evaluators for alpha = 1 and alpha = j.

    sym1/symj carry closed forms over (xi, eta, x, y) when available; they
    provide exact partials to the residual and derivative machinery."""

    order: int
    coef1: KernelEval
    coefj: KernelEval
    sym1: Optional[Kernel] = None
    symj: Optional[Kernel] = None
    pair: Optional[GeneratingPair] = None
    continuous_in_zeta: bool = True

    @staticmethod
    def from_kernels(
        k1: Kernel, kj: Kernel, order: int = -1, pair: Optional[GeneratingPair] = None
    ) -> "KernelFamily":
        return KernelFamily(
            order=order,
            coef1=k1.__call__,
            coefj=kj.__call__,
            sym1=k1,
            symj=kj,
            pair=pair,
        )

    def coef1_field(self, zeta: PlanePoint) -> Field:
        if self.sym1 is not None:
            return self.sym1.field_in_z(zeta)
        return Field(lambda z: self.coef1(zeta, z))

    def coefj_field(self, zeta: PlanePoint) -> Field:
        if self.symj is not None:
            return self.symj.field_in_z(zeta)
        return Field(lambda z: self.coefj(zeta, z))


def kernel_eval(
    k: KernelFamily, alpha: Bicomplex, zeta: PlanePoint, z: PlanePoint
) -> Bicomplex:
    """Sc(alpha) Z(1, zeta, z) + Vec(alpha) Z(j, zeta, z)."""
    if zeta.dist(z) == 0:
        raise SingularPointError(f"kernel evaluated on the diagonal at {z}")
    out = Bicomplex(0, 0)
    if alpha.sc != 0:
        out = out + k.coef1(zeta, z).scale(alpha.sc)
    if alpha.vec != 0:
        out = out + k.coefj(zeta, z).scale(alpha.vec)
    return out


# ---------------------------------------------------------------------------
# Contours


@dataclass
class ContourSpec:
    path: Path
    interior: list[PlanePoint] = dc_field(default_factory=list)
    exterior: list[PlanePoint] = dc_field(default_factory=list)

    @staticmethod
    def circle(
        center: PlanePoint, radius: float, nodes: int = 512
    ) -> "ContourSpec":
        """Circle with default probes: 5 interior points at 0.3-0.7 radii,
        3 exterior points at 1.5-3 radii."""
        interior = []
        for i in range(5):
            r = (0.3 + 0.1 * i) * radius
            th = 2 * math.pi * i / 5 + 0.37
            interior.append(
                PlanePoint(
                    center.x + r * math.cos(th), center.y + r * math.sin(th)
                )
            )
        exterior = []
        for i in range(3):
            r = (1.5 + 0.75 * i) * radius
            th = 2 * math.pi * i / 3 + 0.81
            exterior.append(
                PlanePoint(
                    center.x + r * math.cos(th), center.y + r * math.sin(th)
                )
            )
        return ContourSpec(Path.circle(center, radius, nodes), interior, exterior)


# ---------------------------------------------------------------------------
# Asymptotics


@dataclass
class AsymptoticsReport:
    radii: list[float]
    errors_1: list[float]  # |(z-zeta) Z(1) - 1|, max over probe angles
    errors_j: list[float]
    ratio_dev: list[float]  # | |conj_j(Z)/Z| - 1 | for alpha = 1
    fitted_constant: float  # max |Z - alpha/(z-zeta)| / |log r|
    monotone: bool
    passed: bool


def asymptotics_check(
    k: KernelFamily,
    zeta: PlanePoint,
    radii: list[float],
    final_tol_scale: float = 1e-4,
) -> AsymptoticsReport:
    """Certify the Cauchy-kernel asymptotics at the center zeta:
    (z-zeta) Z(alpha) -> alpha, |conj_j(Z)/Z| -> 1, and log-bounded
    deviation from the analytic kernel."""
    angles = [0.3, 1.7, 2.9, 4.4]
    errors_1, errors_j, ratio_dev = [], [], []
    fitted = 0.0
    for r in radii:
        e1 = ej = rd = 0.0
        for th in angles:
            z = PlanePoint(zeta.x + r * math.cos(th), zeta.y + r * math.sin(th))
            dz = from_cj(complex(z.x - zeta.x, z.y - zeta.y))
            z1 = k.coef1(zeta, z)
            zj = k.coefj(zeta, z)
            e1 = max(e1, (dz * z1 - Bicomplex(1, 0)).norm)
            ej = max(ej, (dz * zj - Bicomplex(0, 1)).norm)
            rd = max(rd, abs((z1.conj() * z1.inv()).norm - 1.0))
            diff1 = (z1 - dz.inv()).norm
            diffj = (zj - J * dz.inv()).norm
            fitted = max(fitted, max(diff1, diffj) / abs(math.log(r)))
        errors_1.append(e1)
        errors_j.append(ej)
        ratio_dev.append(rd)
    seq = [max(a, b) for a, b in zip(errors_1, errors_j)]
    monotone = all(b <= a * (1 + 1e-9) + 1e-15 for a, b in zip(seq, seq[1:]))
    final_ok = seq[-1] <= final_tol_scale * abs(math.log(radii[-1]))
    return AsymptoticsReport(
        list(radii), errors_1, errors_j, ratio_dev, fitted, monotone,
        monotone and final_ok,
    )


# ---------------------------------------------------------------------------
# Cauchy integral formulas


def first_cauchy(
    w: Field, adjoint_kernels: KernelFamily, contour: ContourSpec, z0: PlanePoint
) -> Bicomplex:
    """Vec ∫ W Zhat(1, z0, tau) dtau - j Vec ∫ W Zhat(j, z0, tau) dtau:
    2*pi*W(z0) inside the contour, 0 outside."""
    for p, _ in contour.path.nodes:
        if p.dist(z0) == 0:
            raise SingularPointError("probe lies on the contour")
    i1 = contour.path.integrate_bc(
        lambda tau: w(tau) * adjoint_kernels.coef1(z0, tau)
    )
    ij = contour.path.integrate_bc(
        lambda tau: w(tau) * adjoint_kernels.coefj(z0, tau)
    )
    return Bicomplex(i1.vec, -ij.vec)


def formal_contour_integral(
    k: KernelFamily, w: Field, contour: ContourSpec, z0: PlanePoint
) -> Bicomplex:
    """∫ Z^(n)(j W(tau) dtau, tau, z0): the kernel center runs along the
    contour while the argument stays at z0."""
    acc = Bicomplex(0, 0)
    for tau, dz in contour.path.nodes:
        if tau.dist(z0) == 0:
            raise SingularPointError("probe lies on the contour")
        alpha = J * w(tau) * from_cj(dz)
        acc = acc + kernel_eval(k, alpha, tau, z0)
    return acc


def reproducing_check(
    k: KernelFamily,
    pair: GeneratingPair,
    contours: list[ContourSpec],
    tol: float = 1e-6,
) -> bool:
    """True iff the second Cauchy formula reproduces F and G at interior
    probes (value 2*pi*W) and annihilates them at exterior probes."""
    two_pi = 2 * math.pi
    for contour in contours:
        for w in (pair.F, pair.G):
            for z0 in contour.interior:
                got = formal_contour_integral(k, w, contour, z0)
                if (got - w(z0).scale(two_pi)).norm > tol:
                    return False
            for z0 in contour.exterior:
                if formal_contour_integral(k, w, contour, z0).norm > tol:
                    return False
    return True


# ---------------------------------------------------------------------------
# Base <-> adjoint kernel transfer


def adjoint_kernel_transfer(k: KernelFamily) -> KernelFamily:
    """Swap arguments and recombine components:
    Zhat(1, zeta, z) = -Sc Z(1, z, zeta) + j Sc Z(j, z, zeta)
    Zhat(j, zeta, z) =  Vec Z(1, z, zeta) - j Vec Z(j, z, zeta)
    Applying the transfer twice recovers the original family."""
    if k.sym1 is not None and k.symj is not None:
        s1 = k.sym1.swap_arguments().sym
        sj = k.symj.swap_arguments().sym
        new1 = SymBC(KERNEL_VARS, _neg_expr(s1.sc), sj.sc)
        newj = SymBC(KERNEL_VARS, s1.vec, _neg_expr(sj.vec))
        return KernelFamily(
            order=k.order,
            coef1=Kernel(new1).__call__,
            coefj=Kernel(newj).__call__,
            sym1=Kernel(new1),
            symj=Kernel(newj),
        )

    def coef1(zeta: PlanePoint, z: PlanePoint) -> Bicomplex:
        a = k.coef1(z, zeta)
        b = k.coefj(z, zeta)
        return Bicomplex(-a.sc, b.sc)

    def coefj(zeta: PlanePoint, z: PlanePoint) -> Bicomplex:
        a = k.coef1(z, zeta)
        b = k.coefj(z, zeta)
        return Bicomplex(a.vec, -b.vec)

    return KernelFamily(order=k.order, coef1=coef1, coefj=coefj)


def _neg_expr(e):
    from . import expr as ex

    return ex.simplify(ex.BinOp("-", ex.Num(0j), e))


# ---------------------------------------------------------------------------
# Negative powers (Bers-derivative chain)


def hat_sequence(seq: GeneratingSequence) -> GeneratingSequence:
    """Sequence m -> (j F*_{-m-1}, j G*_{-m-1}) whose members govern the
    derivative chain on the adjoint side."""

    cache: dict[int, GeneratingPair] = {}

    def get(m: int) -> GeneratingPair:
        if m not in cache:
            base = seq.pair_at(-m - 1)
            Fs, Gs = adjoint_fields(base)
            cache[m] = make_pair(Fs.mul_j(), Gs.mul_j())
        return cache[m]

    lo = -seq.hi - 1 if math.isfinite(seq.hi) else -math.inf
    hi = -seq.lo - 1 if math.isfinite(seq.lo) else math.inf
    return GeneratingSequence(get, lo, hi)


def _lift(sym: SymBC) -> SymBC:
    """View a (x, y) symbolic value inside the 4-variable kernel space."""
    return SymBC(KERNEL_VARS, sym.sc, sym.vec)


def _sym_fg_derivative_kernel(kernel: Kernel, pair: GeneratingPair) -> Kernel:
    """d_z K - A K - B conj_j(K), all exact, in the z = (x, y) variables."""
    s = kernel.sym
    dz = s.diff("x").sub(s.diff("y").mul_j()).scale(0.5)
    A = _lift(pair.A.sym)
    B = _lift(pair.B.sym)
    return Kernel(dz.sub(A.mul(s)).sub(B.mul(s.conj())))


def _fd_fg_derivative_eval(
    fn: KernelEval, pair: GeneratingPair, h: float
) -> KernelEval:
    """Finite-difference Bers derivative in z of a kernel evaluator."""

    def out(zeta: PlanePoint, z: PlanePoint) -> Bicomplex:
        fx = (
            fn(zeta, PlanePoint(z.x + h, z.y)) - fn(zeta, PlanePoint(z.x - h, z.y))
        ).scale(1 / (2 * h))
        fy = (
            fn(zeta, PlanePoint(z.x, z.y + h)) - fn(zeta, PlanePoint(z.x, z.y - h))
        ).scale(1 / (2 * h))
        dz = (fx - Bicomplex(-fy.vec, fy.sc)).scale(0.5)
        val = fn(zeta, z)
        return dz - pair.A(z) * val - pair.B(z) * val.conj()

    return out


def negative_powers(
    base_kernel: KernelFamily, adjoint_seq: GeneratingSequence, n: int
) -> KernelFamily:
    """Formal powers of order -n from the order -1 Cauchy kernel.

    The adjoint-side kernel is differentiated n-1 times in the sense of the
    pairs of ``adjoint_seq`` (exact when closed forms are available, nested
    central differences otherwise), scaled by (-1)^(n-1)/(n-1)!, and the
    components are recombined with swapped arguments."""
    if n < 1:
        raise ValueError("order must satisfy n >= 1")
    if n == 1:
        return base_kernel
    if not (adjoint_seq.lo <= 0 and adjoint_seq.hi >= n - 2):
        raise MissingSequenceError(
            f"need pairs 0..{n - 2} of the adjoint sequence"
        )
    hat = adjoint_kernel_transfer(base_kernel)
    scale = (-1) ** (n - 1) / math.factorial(n - 1)

    symbolic = hat.sym1 is not None and all(
        adjoint_seq.pair_at(m).A.sym is not None for m in range(n - 1)
    )
    if symbolic:
        k1, kj = hat.sym1, hat.symj
        for m in range(n - 1):
            pair = adjoint_seq.pair_at(m)
            k1 = _sym_fg_derivative_kernel(k1, pair)
            kj = _sym_fg_derivative_kernel(kj, pair)
        hat1 = Kernel(k1.sym.scale(complex(scale))).__call__
        hatj = Kernel(kj.sym.scale(complex(scale))).__call__
    else:
        f1, fj = hat.coef1, hat.coefj
        for m in range(n - 1):
            pair = adjoint_seq.pair_at(m)
            h = 1e-3 * 2.0 ** (-m)
            f1 = _fd_fg_derivative_eval(f1, pair, h)
            fj = _fd_fg_derivative_eval(fj, pair, h)
        hat1 = lambda zeta, z: f1(zeta, z).scale(scale)  # noqa: E731
        hatj = lambda zeta, z: fj(zeta, z).scale(scale)  # noqa: E731

    sign_n = (-1) ** n

    def coef1(zeta: PlanePoint, z: PlanePoint) -> Bicomplex:
        u = hat1(z, zeta)
        v = hatj(z, zeta)
        return Bicomplex(sign_n * u.sc, -sign_n * v.sc)

    def coefj(zeta: PlanePoint, z: PlanePoint) -> Bicomplex:
        u = hat1(z, zeta)
        v = hatj(z, zeta)
        return Bicomplex(-sign_n * u.vec, sign_n * v.vec)

    return KernelFamily(order=-n, coef1=coef1, coefj=coefj, pair=base_kernel.pair)


# ---------------------------------------------------------------------------
# Residual scan and the stock kernel families


@dataclass
class ResidualReport:
    max_residual_1: float
    max_residual_j: float

    @property
    def max_residual(self) -> float:
        return max(self.max_residual_1, self.max_residual_j)


def power_residual_scan(
    k: KernelFamily,
    pair: GeneratingPair,
    region,
    zeta: PlanePoint,
    samples: int = 10,
    exclusion: float = 0.1,
) -> ResidualReport:
    """Max Vekua residual of both coefficient evaluators over the region,
    punctured around the kernel center."""
    f1 = k.coef1_field(zeta)
    fj = k.coefj_field(zeta)
    r1 = rj = 0.0
    for p in region.sample_points(samples):
        if p.dist(zeta) <= exclusion:
            continue
        r1 = max(r1, vekua_residual(f1, pair, p))
        rj = max(rj, vekua_residual(fj, pair, p))
    return ResidualReport(r1, rj)


_RHO2 = "(x - xi)^2 + (y - eta)^2"


def analytic_kernel() -> KernelFamily:
    """The classical Cauchy kernels 1/(z - zeta) and j/(z - zeta)."""
    k1 = Kernel.make(f"(x - xi)/({_RHO2})", f"-(y - eta)/({_RHO2})")
    kj = Kernel.make(f"(y - eta)/({_RHO2})", f"(x - xi)/({_RHO2})")
    return KernelFamily.from_kernels(k1, kj)


def counterexample_kernel() -> KernelFamily:
    """1/(z - zeta) + xi and j/(z - zeta): solves the analytic equation in z
    but fails the reproducing property (the contour integral gives pi)."""
    k1 = Kernel.make(f"(x - xi)/({_RHO2}) + xi", f"-(y - eta)/({_RHO2})")
    kj = Kernel.make(f"(y - eta)/({_RHO2})", f"(x - xi)/({_RHO2})")
    return KernelFamily.from_kernels(k1, kj)


def reproducing_example_kernel() -> KernelFamily:
    """1/(z - zeta) - xi and j/(z - zeta) + eta: a non-classical kernel that
    reproduces every analytic function.  The two center-dependent corrections
    are chosen so their boundary contributions cancel by Green's theorem:
    for any closed contour the correction part of the reproducing integral is
    a multiple of the enclosed area with opposite signs from the two terms."""
    k1 = Kernel.make(f"(x - xi)/({_RHO2}) - xi", f"-(y - eta)/({_RHO2})")
    kj = Kernel.make(f"(y - eta)/({_RHO2}) + eta", f"(x - xi)/({_RHO2})")
    return KernelFamily.from_kernels(k1, kj)
