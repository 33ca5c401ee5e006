import cmath
from fractions import Fraction

import numpy as np
import pytest

from multiway import charspec as C
from multiway import exactla as X
from multiway.constructions import build
from multiway.gfcyclo import build_cyclotomy, field_of_order

D1 = [(5, 2), (7, 2), (7, 3), (9, 2), (11, 2), (13, 2), (13, 3), (13, 4)]


def table(s, h):
    return C.build_character_table(build_cyclotomy(field_of_order(s), h))


def test_gauss_periods_s5():
    ct = table(5, 2)
    w = cmath.exp(2j * cmath.pi / 5)
    assert abs(ct.gauss_periods[0] - (w + w ** 4)) < 1e-12
    assert abs(ct.gauss_periods[1] - (w ** 2 + w ** 3)) < 1e-12


def test_prime_field_V_is_fourier():
    ct = table(7, 3)
    F = np.fft.fft(np.eye(7)).conj() / np.sqrt(7)
    assert np.abs(ct.V - F).max() < 1e-12


@pytest.mark.parametrize("s,h", D1 + [(9, 4), (16, 3)])
def test_unitarity_and_period_sum(s, h):
    ct = table(s, h)
    assert ct.unitarity_error < 1e-12
    assert abs(ct.gauss_periods.sum() + 1) < 1e-12


@pytest.mark.parametrize("s,h", D1)
def test_gauss_sum_moduli(s, h):
    g = C.gauss_sum_moduli(table(s, h))
    assert abs(g[0] - 1) < 1e-9 and np.all(np.abs(g[1:] - s) < 1e-9)


def test_gauss_moduli_s7_h3():
    assert np.allclose(C.gauss_sum_moduli(table(7, 3)), [1, 7, 7], atol=1e-9)


def test_delta_examples_s5():
    dg = C.diagonalize_L(table(5, 2))
    assert abs(dg.diagonal[0, 0] - 4) < 1e-9 and abs(dg.diagonal[1, 0]) < 1e-9
    assert np.allclose(np.abs(dg.diagonal[1, 1:]) ** 2, 5)
    assert np.allclose(np.abs(dg.diagonal[0, 1:]) ** 2, 1)


@pytest.mark.parametrize("s,h", D1)
def test_diagonalization_and_identities(s, h):
    ct = table(s, h)
    dg = C.diagonalize_L(ct)
    assert dg.off_diagonal < 1e-9 and dg.mismatch < 1e-9
    assert C.parseval_residual(ct, dg) < 1e-6
    assert C.circulant_residual(ct) < 1e-9
    assert C.partial_fourier_residual(ct) < 1e-9
    assert C.block_fourier_residual(ct) < 1e-9


def test_HHt_pattern():
    s, h = 5, 2
    hh = C.spectrum_HHt(table(s, h))
    assert abs(hh[0, 0] - h * (s - 1) ** 2) < 1e-9 and hh[0, 0].real == pytest.approx(32)
    assert np.allclose(hh[0, 1:], h) and np.allclose(hh[1:], 0)
    Hm = np.kron(np.ones((h, 1)), np.ones((s, s)) - np.eye(s))
    assert abs(hh.sum() - np.trace(Hm @ Hm.T)) < 1e-9


def test_appendix_examples():
    sp, _ = C.appendix_spectrum_d1(field_of_order(5), 2)
    assert sp.as_dict() == {0: 1, 1: 4, Fraction(5, 3): 4, 2: 1}
    sp, _ = C.appendix_spectrum_d1(field_of_order(7), 2)
    assert sp.as_dict() == {0: 1, 2: 6, 3 - Fraction(1, 5): 6, 3: 1}
    sp, _ = C.appendix_spectrum_d1(field_of_order(7), 3)
    assert sp.as_dict() == {0: 1, 2: 2, 2 - Fraction(1, 4): 6, 1: 12}


@pytest.mark.parametrize("s,h", D1)
def test_appendix_dual_path(s, h):
    sp, det = C.appendix_spectrum_d1(field_of_order(s), h)
    assert det["cross_check"]
    assert X.verify_spectrum(X.c_matrix(build("d1", s, h)), sp)


def test_report_is_json_ready():
    import json
    rep = C.appendix_report(field_of_order(5), 2)
    json.dumps(rep)
    assert rep["cross_check"] and max(rep["residuals"].values()) < 1e-9
