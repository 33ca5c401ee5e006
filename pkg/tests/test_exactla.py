from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from multiway import exactla as X
from multiway.constructions import build
from multiway.errors import ModeMismatch
from multiway.exactla import RationalMatrix as R

fracs = st.fractions(min_value=-5, max_value=5, max_denominator=6)


def rmats(rows=(1, 5), cols=(1, 5)):
    return st.integers(*rows).flatmap(lambda r: st.integers(*cols).flatmap(
        lambda c: st.lists(st.lists(fracs, min_size=c, max_size=c), min_size=r, max_size=r)))


def to_sympy(M):
    return sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in row] for row in M.entries()])


def test_lowest_terms_and_json():
    M = R([[2, 4], [6, 8]], 4)
    assert M.den == 2 and M[0, 1] == 1
    back = R.from_json(M.to_json())
    assert back == M and M.to_json()[0][0] == "1/2"


def test_rank_examples():
    K = R.centering(6)
    assert X.exact_rank(K) == 5
    basis = X.kernel_basis(K)
    assert len(basis) == 1 and len(set(basis[0])) == 1
    assert X.exact_rank(R.ones(7)) == 1
    assert X.exact_rank(X.c_matrix(build("d1", 5, 2))) == 9


@settings(max_examples=200, deadline=None)
@given(rmats())
def test_rank_and_kernel_match_sympy(rows):
    M = R.from_rows(rows)
    S = to_sympy(M)
    rk = X.exact_rank(M)
    assert rk == S.rank()
    ker = X.kernel_basis(M)
    assert len(ker) + rk == M.shape[1]
    for vec in ker:
        assert (M @ R.from_rows([[c] for c in vec])).is_zero()


@settings(max_examples=1000, deadline=None)
@given(rmats())
def test_g_inverse_and_projector_identities(rows):
    A = R.from_rows(rows)
    G = X.g_inverse(A)
    assert A @ G @ A == A
    P = X.projector(A)
    assert P @ P == P and P == P.T and P @ A == A


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 5).flatmap(lambda n: st.lists(st.lists(fracs, min_size=n, max_size=n),
                                                     min_size=n, max_size=n)))
def test_inverse_matches_sympy(rows):
    A = R.from_rows(rows)
    S = to_sympy(A)
    if S.det() == 0:
        return
    assert to_sympy(X.inverse(A)) == S.inv()


def test_verify_spectrum_examples():
    K3 = R.centering(3)
    assert X.verify_spectrum(K3, X.Spectrum.exact({0: 1, 1: 2}))
    C = X.c_matrix(build("d1", 5, 2))
    assert X.verify_spectrum(C, X.Spectrum.exact({0: 1, 1: 4, Fraction(5, 3): 4, 2: 1}))
    assert not X.verify_spectrum(C, X.Spectrum.exact({0: 1, 1: 5, Fraction(5, 3): 3, 2: 1}))
    with pytest.raises(ModeMismatch):
        X.verify_spectrum(K3, X.eigenvalues_numeric(K3))


def test_numeric_spectrum_examples():
    sp = X.eigenvalues_numeric(np.diag([1.0, 2.0, 3.0]))
    assert [round(v, 12) for v in sp.values()] == [1, 2, 3]
    sp = X.eigenvalues_numeric(R.centering(10))
    assert sp.multiplicity(0) == 1 and sp.multiplicity(1) == 9


def test_numeric_spectrum_against_characteristic_polynomial():
    rng = np.random.default_rng(7)
    for _ in range(5):
        A = rng.integers(-4, 5, size=(8, 8))
        A = A + A.T
        roots = sorted(float(r) for r in sympy.Poly(sympy.Matrix(A).charpoly().as_expr()).real_roots())
        spec, w, V = X.eigenvalues_numeric(A, vectors=True)
        assert np.allclose(sorted(w), roots, atol=1e-9)
        assert abs(sum(spec.values()) - np.trace(A)) <= 1e-9 * 8


def test_exact_spectrum_returns_none_for_irrational():
    assert X.exact_spectrum(R.from_rows([[2, 1], [1, 1]])) is None


def test_loewner_examples():
    I = R.identity(4)
    Z = R.zeros(4)
    assert X.loewner_geq(I, Z) and not X.loewner_geq(Z, I)
    a = R.from_rows([[1, 1], [1, 1]])
    assert X.loewner_geq(a, R.zeros(2))
    assert not X.loewner_geq(R.from_rows([[0, 1], [1, 0]]), R.zeros(2))


@settings(max_examples=300, deadline=None)
@given(rmats((1, 4), (1, 4)), rmats((1, 4), (1, 4)))
def test_loewner_matches_eigenvalues(a, b):
    A = R.from_rows(a)
    n = A.shape[0]
    B = R.from_rows(b)
    if B.shape[0] != n:
        return
    G = A @ A.T
    H = G - B @ B.T
    psd = X.loewner_geq(H, R.zeros(n))
    w = np.linalg.eigvalsh(H.to_float())
    if w.min() > 1e-9:
        assert psd
    if w.min() < -1e-9:
        assert not psd
    assert X.loewner_geq(G, R.zeros(n))


ALL = ([("d1", s, h) for s, h in [(5, 2), (7, 2), (7, 3), (9, 2), (11, 2), (13, 2), (13, 3), (13, 4)]]
       + [("d2", s, h) for s, h in [(7, 2), (13, 2), (13, 4)]] + [("d3", 7, None), ("d3", 11, None)])


@pytest.mark.parametrize("key", ALL)
def test_closed_form_equals_definitional(key):
    d = build(*key)
    assert X.c_matrix_closedform(d) == X.c_matrix_definitional(d)


def test_projector_path_agrees():
    d = build("d1", 5, 2)
    assert X.c_matrix_projector(d) == X.c_matrix_definitional(d)


def test_closed_form_special_cases():
    s, h = 5, 2
    d = build("d1", s, h)
    r = 2
    from multiway.constructions import cyclotomic_matrices
    from multiway.gfcyclo import build_cyclotomy, field_of_order
    L = R.from_ints(cyclotomic_matrices(build_cyclotomy(field_of_order(s), h)).big)
    Jh, Ks = R.ones(h), R.centering(s)
    want = (R.centering(h * s) * r - (L @ L.T) / s - Jh.kron(Ks) / (s * (s - h))
            + R.ones(h * s) * Fraction(h * r * r, s * s))
    assert X.c_matrix(d) == want
    d3 = build("d3", 7)
    w, r3 = 1, 4
    Cx, Ci = X.c_block(d3, "x2"), X.c_block(d3, "inf")
    want3 = R.centering(14) * r3 - (Cx @ Cx.T) * Fraction(w, 7 + w) - (Ci @ Ci.T) / 7
    assert X.c_matrix(d3) == want3
