import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import spherical_jn

from stekloff.ball import (
    Family,
    ModeIndex,
    ball_spectrum,
    residual_check,
    scalar_lb_eigenvalue,
    te_eigenvalue,
    tm_eigenvalue,
)
from stekloff.errors import DomainError, PoleError

# mpmath, 40 digits: TE = 1 + w j_n'(w)/j_n(w), TM = -w^2 j_n / (j_n + w j_n')
FROZEN = [
    (1, 1.0, 1.7940189124919499907, -0.55740772465490223051),
    (2, 1.0, 2.8548146438974340154, -0.35028543871933682392),
    (5, 2.5, 5.5028891671293325995, -1.1357670144137046727),
    (10, 1.0, 10.956445880308004393, -0.091270473192159672616),
    (40, 1.0, 40.987950099003416938, -0.024397414303095729831),
    (3, 0.01, 3.9999888888776655251, -0.000025000069444707493669),
]


def _scipy_pair(n, w):
    j = spherical_jn(n, w)
    jd = spherical_jn(n, w, derivative=True)
    return (j + w * jd) / j, -(w**2) * j / (j + w * jd)


@pytest.mark.parametrize("n,w,te,tm", FROZEN)
def test_frozen(n, w, te, tm):
    assert te_eigenvalue(n, w).eigenvalue == pytest.approx(te, rel=1e-12)
    assert tm_eigenvalue(n, w).eigenvalue == pytest.approx(tm, rel=1e-11)


@given(st.integers(1, 40), st.floats(0.05, 3.0))
def test_second_bessel_path(n, w):
    te, tm = _scipy_pair(n, w)
    assert te_eigenvalue(n, w).eigenvalue == pytest.approx(te, rel=1e-10)
    assert tm_eigenvalue(n, w).eigenvalue == pytest.approx(tm, rel=1e-10)


@given(st.integers(1, 30), st.floats(0.05, 3.0))
def test_residual_oracle_accepts_eigenvalue(n, w):
    for fn in (te_eigenvalue, tm_eigenvalue):
        r = fn(n, w)
        assert r.residual <= 1e-9
        assert r.multiplicity == 2 * n + 1


@pytest.mark.parametrize("family", [Family.TE, Family.TM])
def test_residual_oracle_rejects_perturbed(family):
    fn = te_eigenvalue if family is Family.TE else tm_eigenvalue
    lam = fn(2, 1.3).eigenvalue
    assert residual_check(ModeIndex(family, 2), 1.3, lam + 1e-3) > 1e-4


def test_scalar_lb():
    for l in range(1, 10):
        r = scalar_lb_eigenvalue(l, omega=7.3, mu=2.0)
        assert r.eigenvalue == -1.0 / (l + 1)
        assert r.residual <= 1e-9
        assert r.eigenvalue == scalar_lb_eigenvalue(l).eigenvalue
    assert residual_check(ModeIndex(Family.SCALAR_LB, 3), 1.0, -0.25 + 1e-3) > 1e-4


def test_two_families():
    res = ball_spectrum(1.0, 40)
    te = [r.eigenvalue for r in res if r.mode.family is Family.TE]
    tm = [r.eigenvalue for r in sorted(res, key=lambda r: r.mode.degree) if r.mode.family is Family.TM]
    assert len(res) == 80
    assert all(x < 0 for x in tm) and np.all(np.diff(tm) > 0) and abs(tm[-1]) < 0.03
    assert all(x > 0 for x in te) and np.all(np.diff(te) > 0) and te[-1] > 40
    assert [r.eigenvalue for r in res] == sorted(r.eigenvalue for r in res)


def test_reversed_convention():
    a = ball_spectrum(0.8, 6)
    b = ball_spectrum(0.8, 6, convention="reversed")
    assert sorted(-r.eigenvalue for r in a) == [r.eigenvalue for r in b]


def test_small_omega_limits():
    # w -> 0: TE -> n + 1 and TM ~ -w^2/(n+1)
    for n in (1, 4, 9):
        assert te_eigenvalue(n, 1e-4).eigenvalue == pytest.approx(n + 1, rel=1e-7)
        assert tm_eigenvalue(n, 1e-4).eigenvalue == pytest.approx(-1e-8 / (n + 1), rel=1e-6)


def test_te_pole():
    # first zero of j_1
    with pytest.raises(PoleError) as exc:
        te_eigenvalue(1, 4.493409457909064)
    assert exc.value.family is Family.TE and exc.value.degree == 1


@pytest.mark.parametrize("bad", [0, -1, 2.5])
def test_mode_index_validation(bad):
    with pytest.raises(DomainError):
        ModeIndex(Family.TE, bad)


@pytest.mark.parametrize("args", [(0.0, 3), (-1.0, 3), (math.nan, 3), (1.0, 0), (1.0, 2.5)])
def test_spectrum_validation(args):
    with pytest.raises(DomainError):
        ball_spectrum(*args)


def test_unknown_convention():
    with pytest.raises(DomainError):
        ball_spectrum(1.0, 3, convention="other")
