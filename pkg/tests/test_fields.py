import math

from bivekua.bicomplex import Bicomplex, PlanePoint, isclose
from bivekua.fields import Field, Kernel, SymBC


def test_symbc_eval():
    f = SymBC.make("x^2 + y", "x*y")
    assert isclose(f(2.0, 3.0), Bicomplex(7, 6))


def test_symbc_mul_matches_bicomplex_mul():
    a = SymBC.make("x", "y")
    b = SymBC.make("y", "2*x")
    prod = a.mul(b)
    z = (1.5, -0.75)
    assert isclose(prod(*z), a(*z) * b(*z))


def test_symbc_inv():
    w = SymBC.make("x + 1", "y")
    winv = w.inv()
    z = (1.2, 0.4)
    assert isclose(w(*z) * winv(*z), Bicomplex(1, 0), tol=1e-12)


def test_symbc_dzbar_of_z_is_zero():
    # z = x + j y is holomorphic: d_zbar z = 0, d_z z = 1
    z = SymBC.make("x", "y")
    assert isclose(z.d_zbar()(0.3, 0.7), Bicomplex(0, 0))
    assert isclose(z.d_z()(0.3, 0.7), Bicomplex(1, 0))


def test_symbc_dzbar_of_conj():
    zbar = SymBC.make("x", "y").conj()
    assert isclose(zbar.d_zbar()(0.3, 0.7), Bicomplex(1, 0))
    assert isclose(zbar.d_z()(0.3, 0.7), Bicomplex(0, 0))


def test_field_partials_match_fd():
    f = Field.from_exprs("exp(x)*cos(y)", "sin(x*y)")
    z = PlanePoint(0.4, -0.3)
    h = 1e-6
    fd_x = (f(PlanePoint(z.x + h, z.y)) - f(PlanePoint(z.x - h, z.y))).scale(
        1 / (2 * h)
    )
    assert (f.dx(z) - fd_x).norm < 1e-8


def test_field_algebra_keeps_symbolic():
    a = Field.from_exprs("x", "y")
    b = Field.from_exprs("1", "0")
    c = (a * b) + a.conj()
    assert c.has_exact_partials
    z = PlanePoint(2.0, 5.0)
    assert isclose(c(z), a(z) * b(z) + a(z).conj())


def test_kernel_swap():
    k = Kernel.make("x - xi", "y - eta")
    zeta, z = PlanePoint(1.0, 2.0), PlanePoint(3.0, 5.0)
    assert isclose(k.swap_arguments()(zeta, z), k(z, zeta))


def test_kernel_freeze():
    k = Kernel.make("(x - xi)^2", "y*eta")
    zeta, z = PlanePoint(1.0, 2.0), PlanePoint(3.0, 5.0)
    fz = k.field_in_z(zeta)
    fzeta = k.field_in_zeta(z)
    assert isclose(fz(z), k(zeta, z))
    assert isclose(fzeta(PlanePoint(zeta.x, zeta.y)), k(zeta, z))
    # exact partial in z
    assert math.isclose(fz.dx(z).sc.real, 2 * (z.x - zeta.x))


def test_kernel_diff_z():
    k = Kernel.make("(x - xi)^3")
    zeta, z = PlanePoint(1.0, 0.0), PlanePoint(2.5, 0.0)
    dk = k.diff_z("x")
    assert math.isclose(dk(zeta, z).sc.real, 3 * (z.x - zeta.x) ** 2)
