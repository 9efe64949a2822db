import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from stekloff.ball import te_eigenvalue
from stekloff.errors import AssemblyError, DomainError
from stekloff.radial import (
    Problem,
    RadialBasis,
    cross_degree_coupling,
    gauss_points,
    s_projection_forms,
    s_projection_solve,
    scalar_lb_solve,
    te_radial_solve,
)

# S-projection reference values: the quotient a(h,h)/h'(1)^2 of the radial
# forms on h = j_n(w r) - j_n(w) r^n, integrated with mpmath at 30 digits
SPROJ_ORACLE = [
    (1, 1.0, 4.85481464389743401544944120059),
    (2, 2.3, 6.37765217403425286872031919664),
    (4, 0.7, 10.9622125561549323103062513896),
]


@pytest.mark.parametrize("l", range(1, 10))
def test_scalar_lb_exact(l):
    for m in (2, 5, 16, 32):
        (lam,) = scalar_lb_solve(l, m).eigenvalues
        assert lam == pytest.approx(-1.0 / (l + 1), abs=1e-13)


def test_scalar_lb_ignores_omega_and_mu():
    a = scalar_lb_solve(4, 12)
    b = scalar_lb_solve(4, 12, omega=7.3, mu=3.0)
    assert a == b and a.problem is Problem.SCALAR_LB


@pytest.mark.parametrize("n", [1, 2, 5, 10])
def test_te_converges_to_analytic(n):
    exact = te_eigenvalue(n, 1.0).eigenvalue
    errs = [abs(te_radial_solve(n, 1.0, m)[0] - exact) for m in (4, 8, 16, 32)]
    assert errs[-1] <= 1e-6
    assert errs[2] <= 1e-10


@given(st.integers(1, 8), st.floats(0.1, 2.5))
def test_te_matches_analytic_off_unit_frequency(n, w):
    assert te_radial_solve(n, w, 20)[0] == pytest.approx(te_eigenvalue(n, w).eigenvalue, rel=1e-9)


@pytest.mark.parametrize("n,w,ref", SPROJ_ORACLE)
def test_s_projection_oracle(n, w, ref):
    (lam,) = s_projection_solve(n, w, 24).eigenvalues
    assert lam == pytest.approx(ref, rel=1e-12)


def test_s_projection_positive_and_growing():
    lams = [s_projection_solve(n, 1.0, 24).eigenvalues[0] for n in range(1, 21)]
    assert min(lams) > 0
    assert np.all(np.diff(lams) > 0)
    assert lams[-1] >= 20 * lams[0] / 2.5  # at least linear growth in n


@pytest.mark.parametrize("n", [1, 3, 7])
def test_s_projection_stable_under_refinement(n):
    vals = [s_projection_solve(n, 1.0, m).eigenvalues for m in (8, 16, 32)]
    assert all(len(v) == 1 for v in vals)
    assert vals[1][0] == pytest.approx(vals[2][0], rel=1e-12)


def _sympy_poloidal_forms(n, h_expr, r):
    """Ball integrals of the zonal poloidal field built from h, by symbolic calculus."""
    th = sp.symbols("theta", positive=True)
    y = sp.legendre(n, sp.cos(th))
    u_r = n * (n + 1) * h_expr / r * y
    u_t = sp.diff(r * h_expr, r) / r * sp.diff(y, th)
    # curl of (u_r, u_theta, 0) is azimuthal
    curl = (sp.diff(r * u_t, r) - sp.diff(u_r, th)) / r
    vol = lambda f: sp.integrate(sp.integrate(f * r**2 * sp.sin(th), (th, 0, sp.pi)), (r, 0, 1))
    curl2 = vol(sp.simplify(curl**2))
    mass = vol(sp.expand(u_r**2 + u_t**2))
    trace = sp.integrate((u_t.subs(r, 1)) ** 2 * sp.sin(th), (th, 0, sp.pi))
    return curl2, mass, trace


@pytest.mark.parametrize("n,k", [(1, 0), (1, 2), (2, 1)])
def test_s_projection_forms_against_symbolic_field(n, k):
    # the diagonal entries of the assembled forms equal the 3-D integrals of the
    # actual vector field divided by the angular factor n(n+1) * 2/(2n+1)
    r, x = sp.symbols("r x", positive=True)
    jac = sp.jacobi(k, 2, 2 * n + 2, x).subs(x, 2 * r - 1)
    h = sp.expand(r**n * (1 - r) * jac)
    curl2, mass, trace = _sympy_poloidal_forms(n, h, r)
    ang = n * (n + 1) * sp.Rational(2, 2 * n + 1)
    curl, m, b = s_projection_forms(n, 1.0, k + 4)
    assert float(curl2 / ang) == pytest.approx(curl[k, k], rel=1e-12)
    assert float(mass / ang) == pytest.approx(m[k, k], rel=1e-12)
    assert float(trace / ang) == pytest.approx(b[k] ** 2, rel=1e-12)


def test_assembled_matrices_symmetric():
    curl, mass, _ = s_projection_forms(3, 1.0, 12)
    assert np.array_equal(curl, curl.T) and np.array_equal(mass, mass.T)


def test_cross_degree_coupling_vanishes():
    worst = max(cross_degree_coupling(a, b) for a in range(1, 12) for b in range(1, 12) if a != b)
    assert worst <= 1e-8
    assert cross_degree_coupling(3, 3) == pytest.approx(1.0)


def test_basis_gram_and_quadrature():
    b = RadialBasis(9, 32, power=9)
    g = b.gram()
    assert np.allclose(g, g.T) and np.linalg.eigvalsh(g).min() > 0
    assert gauss_points(10) == 11
    # quadrature integrates r^(2d) exactly
    r, w = b.quadrature()
    d = b.polynomial_degree + 1
    assert np.sum(w * r ** (2 * d)) == pytest.approx(1 / (2 * d + 1), rel=1e-13)


def test_s_projection_singular_at_exceptional_frequency():
    # lambda = w j_n(w)/j_{n+1}(w) blows up at zeros of j_{n+1}; near such a
    # frequency the reduced form loses definiteness and stays finite only through cancellation
    lam = s_projection_solve(1, 5.7634591968945, 24).eigenvalues[0]
    assert abs(lam) > 1e8


@pytest.mark.parametrize(
    "call",
    [lambda: scalar_lb_solve(0, 4), lambda: scalar_lb_solve(2, 1), lambda: te_radial_solve(1, -1.0, 8),
     lambda: te_radial_solve(1, 1.0, 3), lambda: s_projection_solve(0, 1.0, 8), lambda: RadialBasis(1, 0, 1)],
)
def test_argument_validation(call):
    with pytest.raises(DomainError):
        call()


def test_te_blows_up_at_pole_frequency():
    # at a zero of j_n the boundary quotient b^T A^-1 b vanishes and lambda diverges
    assert abs(te_radial_solve(1, 4.493409457909064, 24)[0]) > 1e8


def test_assembly_error_on_vanishing_boundary_functional(monkeypatch):
    import stekloff.radial as radial

    monkeypatch.setattr(radial.RadialBasis, "boundary", lambda self: (np.zeros(self.size), np.zeros(self.size)))
    with pytest.raises(AssemblyError):
        te_radial_solve(2, 1.0, 8)
