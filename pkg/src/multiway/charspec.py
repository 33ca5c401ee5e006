"""Character-sum diagonalization of the cyclotomic matrices.

With ``V[x, y] = omega^tr(xy) / sqrt(s)`` (additive characters, omega a
primitive p-th root of unity) and ``U[i, j] = eta^(ij) / sqrt(h)`` (eta a
primitive h-th root of unity), the unitary ``W = U kron V`` diagonalizes the
hs x hs block-circulant matrix built from ``L_0 .. L_{h-1}``.  Its diagonal,
indexed by ``(i, x)``, is

    s - 1                    at (0, 0),
    0                        at (i != 0, 0),
    eta^(i k) G(chi_i)       for x in coset k,

where ``G(chi_i)`` is the Gauss sum of the multiplicative character of
order dividing h.  The C-matrix of the first construction is a polynomial
in these blocks, which gives its spectrum in closed form; that closed form
is cross-checked against exact elimination.
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import exactla as X
from .constructions import build_d1_star, cyclotomic_matrices, CyclotomicMatrixSet
from .errors import CrossCheckFailed, InvariantViolated, NotDiagonal
from .gfcyclo import Cyclotomy, FiniteField, build_cyclotomy, trace

TOL = 1e-9


def _root(k: int, order: int) -> complex:
    return cmath.exp(2j * cmath.pi * (k % order) / order)


@dataclass(frozen=True, eq=False)
class CharacterTable:
    cyclotomy: Cyclotomy
    U: np.ndarray
    V: np.ndarray
    gauss_periods: np.ndarray   # g_k = sum over coset k of omega^tr(x)
    unitarity_error: float

    @property
    def field(self) -> FiniteField:
        return self.cyclotomy.field

    @property
    def h(self) -> int:
        return self.cyclotomy.h

    @property
    def W(self) -> np.ndarray:
        return np.kron(self.U, self.V)

    def gauss_sums(self) -> np.ndarray:
        """``G(chi_i) = sum_k eta^(-ik) g_k`` for i = 0..h-1 (chi_0 trivial)."""
        h = self.h
        return np.array([sum(_root(-i * k, h) * self.gauss_periods[k] for k in range(h))
                         for i in range(h)])


def build_character_table(cy: Cyclotomy) -> CharacterTable:
    F, h, s, p = cy.field, cy.h, cy.field.s, cy.field.p
    tr = F.traces
    prod = np.array([[F.mul(x, y) for y in F.elements] for x in F.elements])
    V = np.exp(2j * np.pi * tr[prod] / p) / np.sqrt(s)
    U = np.array([[_root(i * j, h) for j in range(h)] for i in range(h)]) / np.sqrt(h)
    g = np.array([sum(cmath.exp(2j * cmath.pi * trace(F, x) / p) for x in cos)
                  for cos in cy.cosets])
    err = max(np.abs(V.conj().T @ V - np.eye(s)).max(), np.abs(U.conj().T @ U - np.eye(h)).max())
    if err > 1e-12:
        raise InvariantViolated(f"character matrices not unitary (error {err:.3g})")
    if abs(g.sum() + 1) > 1e-10:
        raise InvariantViolated("Gauss periods do not sum to -1")
    return CharacterTable(cy, U, V, g, float(err))


@dataclass(frozen=True)
class Diagonalization:
    diagonal: np.ndarray      # (h, s), entry [i, x]
    predicted: np.ndarray     # same layout, from the character formula
    off_diagonal: float
    mismatch: float


def predicted_diagonal(ct: CharacterTable) -> np.ndarray:
    cy, F, h = ct.cyclotomy, ct.field, ct.h
    G = ct.gauss_sums()
    out = np.zeros((h, F.s), dtype=complex)
    out[0, 0] = F.s - 1
    for x in F.nonzero:
        k = cy.coset_of(x)
        for i in range(h):
            out[i, x] = _root(i * k, h) * G[i]
    return out


def _conjugate_diagonal(ct: CharacterTable, M: np.ndarray, tol: float):
    W = ct.W
    D = W.conj().T @ M @ W
    diag = np.diag(D).copy()
    off = float(np.abs(D - np.diag(diag)).max())
    if off > tol * max(1.0, float(np.abs(M).max())):
        raise NotDiagonal(f"off-diagonal residual {off:.3g} above tolerance")
    return diag.reshape(ct.h, ct.field.s), off


def diagonalize_L(ct: CharacterTable, Ls: CyclotomicMatrixSet | None = None,
                  tol: float = TOL) -> Diagonalization:
    Ls = Ls or cyclotomic_matrices(ct.cyclotomy)
    diag, off = _conjugate_diagonal(ct, Ls.big.astype(float), tol)
    pred = predicted_diagonal(ct)
    return Diagonalization(diag, pred, off, float(np.abs(diag - pred).max()))


def block_fourier_residual(ct: CharacterTable, Ls: CyclotomicMatrixSet | None = None) -> float:
    """Max residual of ``V* L_i V = diag(t at 0, g_{i+k} on coset k)``."""
    Ls = Ls or cyclotomic_matrices(ct.cyclotomy)
    cy, F, V = ct.cyclotomy, ct.field, ct.V
    worst = 0.0
    for i, Li in enumerate(Ls.L):
        want = np.zeros(F.s, dtype=complex)
        want[0] = cy.t
        for x in F.nonzero:
            want[x] = ct.gauss_periods[(i + cy.coset_of(x)) % cy.h]
        worst = max(worst, float(np.abs(V.conj().T @ Li @ V - np.diag(want)).max()))
    return worst


def _period_circulant(ct: CharacterTable, k: int) -> np.ndarray:
    """``G_k[i, j] = g_(i - j + k)``."""
    h, g = ct.h, ct.gauss_periods
    return np.array([[g[(i - j + k) % h] for j in range(h)] for i in range(h)])


def circulant_residual(ct: CharacterTable) -> float:
    """Max residual of ``U* G_k U = sum_j g_(k-j) T^j`` with ``T = diag(eta^l)``."""
    h, g = ct.h, ct.gauss_periods
    T = np.diag([_root(l, h) for l in range(h)])
    worst = 0.0
    for k in range(h):
        rhs = sum(g[(k - j) % h] * np.linalg.matrix_power(T, j) for j in range(h))
        worst = max(worst, float(np.abs(ct.U.conj().T @ _period_circulant(ct, k) @ ct.U - rhs).max()))
    return worst


def partial_fourier_residual(ct: CharacterTable, Ls: CyclotomicMatrixSet | None = None) -> float:
    """Max residual of ``(I kron V)* L (I kron V) = sum_k G_k kron E_k``.

    ``E_k`` is diagonal with ``-t`` at 0, 1 on coset k and 0 elsewhere.
    """
    Ls = Ls or cyclotomic_matrices(ct.cyclotomy)
    cy, F, h = ct.cyclotomy, ct.field, ct.h
    IV = np.kron(np.eye(h), ct.V)
    lhs = IV.conj().T @ Ls.big @ IV
    rhs = np.zeros_like(lhs)
    for k in range(h):
        E = np.diag([-cy.t if x == 0 else float(cy.coset_of(x) == k) for x in F.elements])
        rhs += np.kron(_period_circulant(ct, k), E)
    return float(np.abs(lhs - rhs).max())


def gauss_sum_moduli(ct: CharacterTable) -> np.ndarray:
    """``|G(chi_i)|^2``: 1 for the trivial character, s for the others."""
    return np.abs(ct.gauss_sums()) ** 2


def parseval_residual(ct: CharacterTable, diag: Diagonalization) -> float:
    """``sum |delta|^2`` against ``trace(L L') = hs(s-1)``."""
    F, h = ct.field, ct.h
    return float(abs((np.abs(diag.diagonal) ** 2).sum() - h * F.s * (F.s - 1)))


def spectrum_HHt(ct: CharacterTable, tol: float = TOL) -> np.ndarray:
    """Diagonal of ``W* H H' W`` for ``H = 1_h kron (J - I)``; layout ``[i, x]``.

    Expected ``h(s-1)^2`` at (0, 0), ``h`` at (0, x != 0) and 0 elsewhere.
    """
    F, h = ct.field, ct.h
    s = F.s
    Hm = np.kron(np.ones((h, 1)), np.ones((s, s)) - np.eye(s))
    diag, _ = _conjugate_diagonal(ct, Hm @ Hm.T, tol)
    return diag


def appendix_spectrum_d1(field: FiniteField, h: int, check: bool = True):
    """Spectrum of the first construction's C-matrix via character sums.

    Eigenvalue at ``(i, x)`` of
    ``rK - LL'/s + (h r^2/s^2) J - (HH' - ((s-1)^2/s) J) / (s(s-h))``
    with ``r = t``.  Values are rationalized and, with ``check``, confirmed
    against exact elimination (:class:`CrossCheckFailed` otherwise).
    Returns ``(spectrum, details)``.
    """
    cy = build_cyclotomy(field, h)
    ct = build_character_table(cy)
    Ls = cyclotomic_matrices(cy)
    dg = diagonalize_L(ct, Ls)
    hh = spectrum_HHt(ct)
    s, r = field.s, cy.t
    lam = np.empty((h, s))
    for i in range(h):
        for x in range(s):
            origin = i == 0 and x == 0
            val = (0.0 if origin else r) - abs(dg.diagonal[i, x]) ** 2 / s
            if origin:
                val += h * r * r / s ** 2 * h * s
            val -= (hh[i, x].real - ((s - 1) ** 2 / s * h * s if origin else 0.0)) / (s * (s - h))
            lam[i, x] = val
    counts: dict = {}
    for val in lam.ravel():
        f = Fraction(float(val)).limit_denominator(10 ** 6)
        if abs(float(f) - val) > 1e-7:
            raise CrossCheckFailed(f"eigenvalue {val} is not close to a small fraction")
        counts[f] = counts.get(f, 0) + 1
    spec = X.Spectrum.exact(counts)
    details = {
        "diagonal": dg.diagonal,
        "eigen_table": lam,
        "off_diagonal": dg.off_diagonal,
        "mismatch": dg.mismatch,
        "gauss_moduli": gauss_sum_moduli(ct),
        "parseval_residual": parseval_residual(ct, dg),
        "block_fourier_residual": block_fourier_residual(ct, Ls),
        "circulant_residual": circulant_residual(ct),
        "partial_fourier_residual": partial_fourier_residual(ct, Ls),
        "unitarity_error": ct.unitarity_error,
        "HHt_diagonal": hh.real,
        "cross_check": None,
    }
    if check:
        C = X.c_matrix(build_d1_star(field, h))
        ok = X.verify_spectrum(C, spec)
        details["cross_check"] = ok
        if not ok:
            raise CrossCheckFailed("character-sum spectrum disagrees with exact elimination")
    return spec, details


def _cjson(z: complex) -> list:
    return [round(float(z.real), 12) + 0.0, round(float(z.imag), 12) + 0.0]


def appendix_report(field: FiniteField, h: int) -> dict:
    """JSON-ready summary of :func:`appendix_spectrum_d1`."""
    spec, det = appendix_spectrum_d1(field, h)
    s = field.s
    return {
        "s": s,
        "h": h,
        "spectrum": spec.to_json(),
        "cross_check": det["cross_check"],
        "delta": [[_cjson(det["diagonal"][i, x]) for x in range(s)] for i in range(h)],
        "delta_labels": [field.encode(x) for x in range(s)],
        "gauss_sum_moduli": [round(float(v), 12) for v in det["gauss_moduli"]],
        "residuals": {k: float(det[k]) for k in ("off_diagonal", "mismatch", "parseval_residual",
                                                 "block_fourier_residual", "circulant_residual",
                                                 "partial_fourier_residual",
                                                 "unitarity_error")},
    }
