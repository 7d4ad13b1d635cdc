import math

import numpy as np
import pytest
import scipy.integrate
from hypothesis import given
from hypothesis import strategies as st

from fracinverse.errors import DimensionError, DomainError, ResourceError
from fracinverse.symbol import (
    SymbolCoefficients,
    ToeplitzOperator,
    assemble_dense_toeplitz,
    space_grid,
    symbol_coeffs,
    symbol_coeffs_1d,
    symbol_coeffs_md,
    toeplitz_matvec,
)
from oracles import dense_toeplitz_reference, gamma_quotient_coeffs, coefficient_report

# a_0..a_4 from mpmath Gamma quotients
COEFF_ORACLE = {
    1.5: [1.5737874653547950, -0.67448034229491213, -0.061316394754082921,
          -0.020438798251360974, -0.0096815360138025664],
    1.9: [1.9031656067116294, -0.92718324429540921, -0.015714970242295071,
          -0.0041773971530151455, -0.0017300331643800098],
    1.1: [1.3245198651370374, -0.46999091988733587, -0.082939574097765153,
          -0.033876727448382950, -0.018241314779898511],
}
OMEGAS = sorted(COEFF_ORACLE)


@pytest.mark.parametrize("omega", OMEGAS)
def test_first_coefficients(omega):
    sym = symbol_coeffs_1d(omega, 5)
    np.testing.assert_allclose(sym.coeffs[4:], COEFF_ORACLE[omega], rtol=1e-14)
    np.testing.assert_array_equal(sym.coeffs, sym.coeffs[::-1])


def test_classical_stencil_at_omega_two():
    sym = symbol_coeffs_1d(2.0, 4)
    np.testing.assert_allclose(sym.coeffs, [0, 0, -1, 2, -1, 0, 0], atol=1e-15)


@pytest.mark.parametrize("omega", OMEGAS)
def test_coefficient_properties(omega):
    rep = coefficient_report(omega, 256, symbol_coeffs_1d)
    assert rep["signs"]
    assert rep["recursion_rel"] <= 1e-13
    assert rep["closed_form_rel"] <= 1e-13
    assert rep["sums_positive"] and rep["sums_decreasing"]
    s8, s64, s2048 = rep["sigma"]
    assert s2048 < s64 < s8
    if omega == 1.5:
        assert rep["tail"] < 0.05


@given(st.floats(min_value=1.01, max_value=1.99), st.integers(min_value=2, max_value=300))
def test_recursion_matches_gamma_quotients(omega, n):
    a = symbol_coeffs_1d(omega, n).coeffs[n - 1:]
    ref = gamma_quotient_coeffs(omega, n, dps=20)
    np.testing.assert_allclose(a, ref, rtol=1e-12)


@pytest.mark.parametrize("omega", OMEGAS)
@pytest.mark.parametrize("n", [16, 256, 1024])
def test_fft_route_matches_closed_form(omega, n):
    md = symbol_coeffs_md(omega, (n,)).coeffs
    np.testing.assert_allclose(md, symbol_coeffs_1d(omega, n).coeffs, rtol=0, atol=1e-10)


def test_fft_route_needs_extrapolation():
    plain = symbol_coeffs_md(1.5, (16,), extrapolate=False).coeffs
    err = np.abs(plain - symbol_coeffs_1d(1.5, 16).coeffs).max()
    assert 1e-10 < err < 1e-5


def _dblquad_coeff(omega, l1, l2):
    def g(t2, t1):
        s = 4 * math.sin(t1 / 2) ** 2 + 4 * math.sin(t2 / 2) ** 2
        return s ** (omega / 2) * math.cos(l1 * t1) * math.cos(l2 * t2)
    # even integrand: integrate one quadrant of (-pi, pi)^2
    val, _ = scipy.integrate.dblquad(g, 0, math.pi, 0, math.pi, epsabs=1e-13, epsrel=1e-13)
    return val / math.pi**2


@pytest.mark.parametrize("omega", [1.5])
def test_two_level_coefficients_against_quadrature(omega):
    sym = symbol_coeffs_md(omega, (3, 3))
    for l1, l2 in [(0, 0), (1, 0), (1, 1), (2, 1)]:
        assert sym.at(l1, l2) == pytest.approx(_dblquad_coeff(omega, l1, l2), abs=1e-10)


def test_two_level_coefficients_symmetry_and_signs():
    sym = symbol_coeffs_md(1.9, (4, 4))
    c = sym.coeffs
    np.testing.assert_allclose(c, c[::-1, :], atol=1e-15)
    np.testing.assert_allclose(c, c[:, ::-1], atol=1e-15)
    np.testing.assert_allclose(c, c.T, atol=1e-15)
    assert sym.at(0, 0) > 0
    off = c.copy()
    off[3, 3] = -1.0
    assert np.all(off < 0)


def test_fft_cap_is_enforced():
    with pytest.raises(ResourceError):
        symbol_coeffs_md(1.5, (64, 64), fft_cap=2**20)


@pytest.mark.parametrize("omega", [0.0, -1.0, 2.5])
def test_omega_domain(omega):
    with pytest.raises(DomainError):
        symbol_coeffs_1d(omega, 4)


def test_space_grid_conventions():
    g = space_grid(3)
    assert g.h == pytest.approx(math.pi / 4)
    np.testing.assert_allclose(g.points()[:, 0], [math.pi / 4, math.pi / 2, 3 * math.pi / 4])
    g2 = space_grid((2, 3), box_lo=(0, 0), box_hi=(3, 4))
    assert g2.N == 6
    assert g2.points()[1].tolist() == [1.0, 2.0]  # C order: last index fastest
    with pytest.raises(DomainError):
        space_grid((2, 3))  # unequal widths on the default box


@pytest.mark.parametrize("n", [(1,), (7,), (16,), (3, 5), (4, 4), (2, 3, 2)])
def test_matvec_matches_dense(n, rng):
    # generic, non-symmetric coefficients catch any index flip in the embedding
    sym = SymbolCoefficients(1.5, rng.standard_normal(tuple(2 * k - 1 for k in n)))
    op = ToeplitzOperator(sym)
    ref = dense_toeplitz_reference(sym.coeffs, n)
    np.testing.assert_array_equal(assemble_dense_toeplitz(op), ref)
    X = rng.standard_normal((5, op.N))
    scale = np.abs(ref).sum(axis=1).max() * np.abs(X).max()
    np.testing.assert_allclose(toeplitz_matvec(op, X), X @ ref.T, rtol=0, atol=1e-13 * scale)
    np.testing.assert_allclose(op @ X[0], ref @ X[0], rtol=0, atol=1e-13 * scale)


def test_matvec_on_symbol_2d(rng):
    sym = symbol_coeffs_md(1.1, (6, 5))
    op = ToeplitzOperator(sym)
    x = rng.standard_normal(op.N)
    ref = dense_toeplitz_reference(sym.coeffs, (6, 5))
    np.testing.assert_allclose(op @ x, ref @ x, rtol=0, atol=1e-12 * np.linalg.norm(ref @ x))


def test_matvec_shape_errors():
    op = ToeplitzOperator(symbol_coeffs_1d(1.5, 4))
    with pytest.raises(DimensionError):
        op.matvec(np.ones(5))
    with pytest.raises(DimensionError):
        ToeplitzOperator(symbol_coeffs_1d(1.5, 4), space_grid(5))


@given(st.sampled_from(OMEGAS), st.integers(min_value=1, max_value=40))
def test_toeplitz_is_symmetric_positive_definite(omega, n):
    Bd = assemble_dense_toeplitz(ToeplitzOperator(symbol_coeffs_1d(omega, n)))
    np.testing.assert_array_equal(Bd, Bd.T)
    assert np.linalg.eigvalsh(Bd).min() > 0


def test_dense_cap():
    op = ToeplitzOperator(symbol_coeffs_1d(1.5, 100))
    with pytest.raises(ResourceError):
        assemble_dense_toeplitz(op, dense_cap=50)
