import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from betalaguerre.errors import DomainError
from betalaguerre.special import kummer_1f1, tricomi_psi_negaxis, tricomi_u

mpmath.mp.dps = 40


def ref_1f1(a, b, z):
    return complex(mpmath.hyp1f1(a, b, z))


def ref_u(a, b, z):
    return complex(mpmath.hyperu(a, b, z))


def ref_psi_below(c, alpha, x):
    # limit from below the negative axis, approached at angle -pi + 1e-30
    z = x * mpmath.exp(mpmath.mpc(0, -(mpmath.pi - mpmath.mpf("1e-30"))))
    return complex(mpmath.hyperu(c, -alpha, z))


def rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


@pytest.mark.parametrize("a,b,z", [(0.5, 1.5, 2.0), (-2.3, 0.7, -30.0), (3.0, 2.5, 45.0),
                                   (1.25, -0.5, -4.0), (0.1, 3.3, 150.0), (2.0, 1.0, 0.0)])
def test_1f1_real(a, b, z):
    assert rel(kummer_1f1(a, b, z), ref_1f1(a, b, z)) < 1e-12


def test_1f1_complex_and_array():
    z = np.array([1 + 2j, -3 + 0.5j, 10j])
    out = kummer_1f1(0.7, 1.9, z)
    assert out.shape == (3,)
    for zi, oi in zip(z, out):
        assert rel(oi, ref_1f1(0.7, 1.9, zi)) < 1e-12


def test_1f1_pole():
    with pytest.raises(DomainError):
        kummer_1f1(1.0, -2.0, 1.0)


@given(a=st.floats(-5, 5), b=st.floats(0.05, 6), z=st.floats(-60, 60))
def test_1f1_property(a, b, z):
    ref = ref_1f1(a, b, z)
    scale = max(abs(ref), 1e-8)
    assert abs(kummer_1f1(a, b, z) - ref) <= 1e-9 * scale


@pytest.mark.parametrize("a,b,z", [(0.5, 0.3, 1.0), (2.2, -1.5, 0.2), (1.0, 0.5, 25.0),
                                   (0.7, 1.7, 3 + 4j), (1.5, -0.25, -5 + 0.1j), (0.3, 0.2, 1000j)])
def test_u(a, b, z):
    assert rel(tricomi_u(a, b, z), ref_u(a, b, z)) < 1e-10


def test_u_integer_b():
    with pytest.warns(UserWarning):
        val = tricomi_u(0.5, 2.0, 1.5)
    assert rel(val, ref_u(0.5, 2.0, 1.5)) < 1e-10


def test_u_branch_cut():
    with pytest.raises(DomainError):
        tricomi_u(1.0, 0.5, -2.0)


@pytest.mark.parametrize("c,alpha", [(1.0, 0.5), (0.25, 2.0), (4.0, -0.5), (1.0, 0.0), (4.0, 15.0)])
def test_psi_negaxis(c, alpha):
    for x in (0.05, 0.9, 3.0, 12.0, 40.0):
        assert rel(tricomi_psi_negaxis(c, alpha, x), ref_psi_below(c, alpha, x)) < 1e-10


def test_psi_trivial_cases():
    assert tricomi_psi_negaxis(0.0, 1.3, 2.0) == 1
    with pytest.raises(DomainError):
        tricomi_psi_negaxis(1.0, 0.5, 0.0)


@given(c=st.floats(0.05, 6), alpha=st.floats(-0.95, 8), x=st.floats(0.01, 60))
def test_psi_property(c, alpha, x):
    val = tricomi_psi_negaxis(c, alpha, x)
    assert rel(val, ref_psi_below(c, alpha, x)) < 1e-8
