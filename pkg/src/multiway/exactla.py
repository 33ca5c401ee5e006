"""Exact rational matrices, rank/kernel, g-inverses, spectra and C-matrices.

A :class:`RationalMatrix` is an integer numerator array (numpy ``object``
dtype holding Python ints) over one positive common denominator, kept
reduced so that ``gcd(all numerators, den) == 1``.  Products and sums
therefore run on plain integers; ``Fraction`` only appears when single
entries are read out.

Rank, kernels and inverses use fraction-free (Bareiss) elimination.  After
``k`` steps every entry is a ``(k+1)``-minor of the input, so entry size is
bounded by Hadamard's inequality: at most ``n * (log2(n)/2 + B)`` bits for
an ``n x n`` input with ``B``-bit entries.  Every Bareiss division is
checked for exactness.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterable, Sequence
from weakref import WeakKeyDictionary

import numpy as np

from .errors import (ConvergenceFailure, InvariantViolated, ModeMismatch,
                     UnsupportedSetting)

Number = int | Fraction


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, float) and x.is_integer():
        return Fraction(int(x))
    raise TypeError(f"cannot use {x!r} as an exact rational")


def _obj_ints(a) -> np.ndarray:
    out = np.empty(np.shape(a), dtype=object)
    flat = np.asarray(a, dtype=object).ravel()
    out.ravel()[:] = [int(x) for x in flat]
    return out


class RationalMatrix:
    """Dense exact rational matrix.

    >>> A = RationalMatrix.from_rows([[1, Fraction(1, 2)], [0, 3]])
    >>> (A @ A)[0, 1]
    Fraction(2, 1)
    """

    __array_priority__ = 1000

    def __init__(self, num, den: int = 1, _reduced: bool = False):
        num = np.asarray(num, dtype=object)
        if num.ndim != 2:
            raise ValueError("RationalMatrix needs a 2-d array")
        if num.dtype != object or any(not isinstance(x, int) for x in num.flat):
            num = _obj_ints(num)
        den = int(den)
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        if den < 0:
            num, den = -num, -den
        if not _reduced and den != 1:
            g = math.gcd(den, *num.flat) if num.size else den
            if g > 1:
                num = num // g
                den //= g
        self.num = num
        self.den = den

    # constructors
    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "RationalMatrix":
        fr = [[_as_fraction(x) for x in row] for row in rows]
        if not fr:
            return cls(np.empty((0, 0), dtype=object))
        den = reduce(lambda a, b: a * b // math.gcd(a, b), (x.denominator for r in fr for x in r), 1)
        num = np.array([[x.numerator * (den // x.denominator) for x in r] for r in fr], dtype=object)
        return cls(num.reshape(len(fr), -1), den)

    @classmethod
    def from_ints(cls, a) -> "RationalMatrix":
        return cls(_obj_ints(np.atleast_2d(a)), 1, True)

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls.from_ints(np.eye(n, dtype=np.int64))

    @classmethod
    def zeros(cls, r: int, c: int | None = None) -> "RationalMatrix":
        return cls.from_ints(np.zeros((r, r if c is None else c), dtype=np.int64))

    @classmethod
    def ones(cls, r: int, c: int | None = None) -> "RationalMatrix":
        return cls.from_ints(np.ones((r, r if c is None else c), dtype=np.int64))

    @classmethod
    def centering(cls, n: int) -> "RationalMatrix":
        """``I_n - J_n / n``."""
        return cls(_obj_ints(n * np.eye(n, dtype=np.int64) - 1), n)

    # basic protocol
    @property
    def shape(self) -> tuple[int, int]:
        return self.num.shape

    @property
    def T(self) -> "RationalMatrix":
        return RationalMatrix(self.num.T.copy(), self.den, True)

    def __repr__(self):
        return f"RationalMatrix(shape={self.shape}, den={self.den})"

    def __getitem__(self, key):
        if isinstance(key, tuple) and len(key) == 2 and all(
                isinstance(k, (int, np.integer)) for k in key):
            return Fraction(self.num[key], self.den)
        sub = self.num[key]
        if sub.ndim == 1:
            sub = sub.reshape(1, -1) if isinstance(key, tuple) and isinstance(key[0], (int, np.integer)) \
                else sub.reshape(-1, 1)
        return RationalMatrix(sub.copy(), self.den)

    def entries(self) -> list[list[Fraction]]:
        return [[Fraction(x, self.den) for x in row] for row in self.num]

    def to_float(self) -> np.ndarray:
        return np.array([[x / self.den for x in row] for row in self.num], dtype=float).reshape(self.shape)

    def __eq__(self, other):
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        return (self.shape == other.shape and self.den == other.den
                and bool(np.all(self.num == other.num)))

    __hash__ = None

    def _lift(self, other):
        if isinstance(other, RationalMatrix):
            return other
        if isinstance(other, np.ndarray):
            return RationalMatrix.from_ints(other)
        raise TypeError(f"unsupported operand {type(other)}")

    def __add__(self, other):
        o = self._lift(other)
        if o.shape != self.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {o.shape}")
        den = self.den * o.den // math.gcd(self.den, o.den)
        return RationalMatrix(self.num * (den // self.den) + o.num * (den // o.den), den)

    __radd__ = __add__

    def __neg__(self):
        return RationalMatrix(-self.num, self.den, True)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, c):
        c = _as_fraction(c)
        return RationalMatrix(self.num * c.numerator, self.den * c.denominator)

    __rmul__ = __mul__

    def __truediv__(self, c):
        c = _as_fraction(c)
        return self * (1 / c)

    def __matmul__(self, other):
        o = self._lift(other)
        if self.shape[1] != o.shape[0]:
            raise ValueError(f"shape mismatch {self.shape} @ {o.shape}")
        return RationalMatrix(np.dot(self.num, o.num), self.den * o.den)

    def __rmatmul__(self, other):
        return self._lift(other) @ self

    def kron(self, other: "RationalMatrix") -> "RationalMatrix":
        o = self._lift(other)
        return RationalMatrix(np.kron(self.num, o.num), self.den * o.den)

    def trace(self) -> Fraction:
        return Fraction(sum(self.num.diagonal()), self.den)

    def is_symmetric(self) -> bool:
        return self.shape[0] == self.shape[1] and bool(np.all(self.num == self.num.T))

    def is_zero(self) -> bool:
        return not any(self.num.flat)

    def int_rows(self) -> list[list[int]]:
        return [list(r) for r in self.num]

    def to_json(self) -> list[list[str]]:
        return [[_fstr(Fraction(x, self.den)) for x in row] for row in self.num]

    @classmethod
    def from_json(cls, rows) -> "RationalMatrix":
        return cls.from_rows([[Fraction(x) for x in r] for r in rows])


def _fstr(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def as_rational(a) -> RationalMatrix:
    return a if isinstance(a, RationalMatrix) else RationalMatrix.from_ints(np.asarray(a))


def block(rows: Sequence[Sequence[RationalMatrix]]) -> RationalMatrix:
    """Assemble a block matrix."""
    mats = [[as_rational(b) for b in row] for row in rows]
    den = reduce(lambda a, b: a * b // math.gcd(a, b), (b.den for r in mats for b in r), 1)
    num = np.block([[b.num * (den // b.den) for b in r] for r in mats])
    return RationalMatrix(num.astype(object), den)


# -- fraction-free elimination -------------------------------------------

def _exact_div(a: int, b: int) -> int:
    q, rem = divmod(a, b)
    if rem:
        raise InvariantViolated("inexact Bareiss division")
    return q


def _bareiss(rows: list[list[int]]):
    """Row echelon form by Bareiss elimination.

    Returns ``(echelon, pivot_cols, perm)`` where ``echelon[k]`` came from
    original row ``perm[k]`` and the first ``len(pivot_cols)`` rows are the
    nonzero ones.
    """
    a = [list(r) for r in rows]
    n = len(a)
    m = len(a[0]) if n else 0
    perm = list(range(n))
    pivots = []
    prev = 1
    r = 0
    for c in range(m):
        if r == n:
            break
        k = next((i for i in range(r, n) if a[i][c]), None)
        if k is None:
            continue
        if k != r:
            a[r], a[k] = a[k], a[r]
            perm[r], perm[k] = perm[k], perm[r]
        piv_row = a[r]
        piv = piv_row[c]
        for i in range(r + 1, n):
            ai = a[i]
            f = ai[c]
            for j in range(c + 1, m):
                ai[j] = _exact_div(piv * ai[j] - f * piv_row[j], prev)
            ai[c] = 0
            for j in range(c):
                ai[j] = 0
        prev = piv
        pivots.append(c)
        r += 1
    return a, pivots, perm


def exact_rank(M) -> int:
    M = as_rational(M)
    if M.num.size == 0:
        return 0
    return len(_bareiss(M.int_rows())[1])


def kernel_basis(M) -> list[tuple[Fraction, ...]]:
    """A basis of ``{x : M x = 0}`` as tuples of Fractions."""
    M = as_rational(M)
    rows, cols = M.shape
    if rows == 0:
        return [tuple(Fraction(int(i == j)) for i in range(cols)) for j in range(cols)]
    ech, pivots, _ = _bareiss(M.int_rows())
    free = [c for c in range(cols) if c not in set(pivots)]
    basis = []
    for fcol in free:
        x = [Fraction(0)] * cols
        x[fcol] = Fraction(1)
        for k in range(len(pivots) - 1, -1, -1):
            pc = pivots[k]
            row = ech[k]
            acc = sum((row[j] * x[j] for j in range(pc + 1, cols) if row[j]), Fraction(0))
            x[pc] = -acc / row[pc]
        basis.append(tuple(x))
    return basis


def _int_inverse(rows: list[list[int]]) -> tuple[list[list[int]], int]:
    """``(X, D)`` with ``A^{-1} = X / D`` via fraction-free Gauss-Jordan."""
    n = len(rows)
    a = [list(r) + [int(i == j) for j in range(n)] for i, r in enumerate(rows)]
    prev = 1
    for c in range(n):
        k = next((i for i in range(c, n) if a[i][c]), None)
        if k is None:
            raise ZeroDivisionError("singular matrix")
        if k != c:
            a[c], a[k] = a[k], a[c]
        pr = a[c]
        piv = pr[c]
        for i in range(n):
            if i == c:
                continue
            ai = a[i]
            f = ai[c]
            for j in range(2 * n):
                if j != c:
                    ai[j] = _exact_div(piv * ai[j] - f * pr[j], prev)
            ai[c] = 0
        prev = piv
    d = a[0][0]
    if any(a[i][i] != d for i in range(n)):
        raise InvariantViolated("Gauss-Jordan diagonal not constant")
    return [r[n:] for r in a], d


def inverse(M) -> RationalMatrix:
    M = as_rational(M)
    X, d = _int_inverse(M.int_rows())
    return RationalMatrix(np.array(X, dtype=object).reshape(M.shape), d) * M.den


def g_inverse(M) -> RationalMatrix:
    """A generalized inverse G with ``M G M = M``.

    Picks a maximal nonsingular submatrix ``A11`` (pivot rows and columns
    of the echelon form), inverts it and pads with zeros.
    """
    M = as_rational(M)
    r, c = M.shape
    if M.num.size == 0:
        return RationalMatrix.zeros(c, r)
    _, pivots, perm = _bareiss(M.int_rows())
    k = len(pivots)
    G = np.zeros((c, r), dtype=object)
    G[:] = 0
    if k == 0:
        return RationalMatrix(G, 1, True)
    prow = perm[:k]
    sub = [[M.num[i][j] for j in pivots] for i in prow]
    X, d = _int_inverse(sub)
    for a, j in enumerate(pivots):
        for b, i in enumerate(prow):
            G[j, i] = X[a][b] * M.den
    return RationalMatrix(G, d)


def projector(M) -> RationalMatrix:
    """Orthogonal projector onto the column space: ``M (M'M)^- M'``."""
    M = as_rational(M)
    return M @ g_inverse(M.T @ M) @ M.T


# -- spectra -----------------------------------------------------------------

@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues with multiplicities, ascending.

    ``mode`` is ``"exact"`` (Fraction values, multiplicities verified by
    rank) or ``"numeric"`` (floats, clustered at tolerance ``tol``).
    """

    pairs: tuple
    mode: str = "exact"
    tol: float | None = None

    def __post_init__(self):
        pairs = tuple(sorted(((v, int(k)) for v, k in self.pairs), key=lambda p: p[0]))
        object.__setattr__(self, "pairs", pairs)

    @classmethod
    def exact(cls, mapping) -> "Spectrum":
        items = mapping.items() if isinstance(mapping, dict) else mapping
        return cls(tuple((_as_fraction(v), k) for v, k in items), "exact")

    @property
    def dim(self) -> int:
        return sum(k for _, k in self.pairs)

    def values(self) -> list:
        return [v for v, k in self.pairs for _ in range(k)]

    def as_dict(self) -> dict:
        return dict(self.pairs)

    def multiplicity(self, value) -> int:
        if self.mode == "exact":
            return self.as_dict().get(_as_fraction(value), 0)
        return sum(k for v, k in self.pairs if abs(v - float(value)) <= (self.tol or 1e-9) * max(1.0, abs(v)))

    def positive(self) -> "EigenvalueVector":
        from .optimality import EigenvalueVector
        if self.mode == "exact":
            return EigenvalueVector(tuple(v for v in self.values() if v > 0), True)
        thr = 1e-7
        return EigenvalueVector(tuple(float(v) for v in self.values() if v > thr), False)

    def to_json(self) -> list[dict]:
        if self.mode == "exact":
            return [{"value": _fstr(v), "multiplicity": k} for v, k in self.pairs]
        return [{"value": float(v), "multiplicity": k} for v, k in self.pairs]

    def __str__(self):
        body = ", ".join(f"{v}:{k}" for v, k in self.pairs)
        return "{" + body + "}"


def verify_spectrum(M, candidate: Spectrum) -> bool:
    """Sound and complete check of a claimed rational spectrum.

    True iff the multiplicities sum to the dimension and, for every claimed
    ``(value, k)``, ``rank(M - value I) == dim - k``.
    """
    if candidate.mode != "exact":
        raise ModeMismatch("verify_spectrum needs an exact candidate")
    M = as_rational(M)
    n = M.shape[0]
    if candidate.dim != n:
        return False
    I = RationalMatrix.identity(n)
    for val, k in candidate.pairs:
        if exact_rank(M - I * val) != n - k:
            return False
    return True


def eigenvalues_numeric(M, tol: float = 1e-9, vectors: bool = False):
    """Floating spectrum of a symmetric matrix, clustered at ``tol``.

    With ``vectors=True`` returns ``(spectrum, values, eigenvectors)`` with
    unclustered values; every residual ``|Mx - lx|`` is checked against
    ``tol`` scaled by the matrix norm.
    """
    A = M.to_float() if isinstance(M, RationalMatrix) else np.asarray(M, dtype=float)
    if A.shape[0] != A.shape[1] or not np.allclose(A, A.T, atol=0, rtol=0):
        raise ValueError("eigenvalues_numeric needs a symmetric matrix")
    try:
        w, V = np.linalg.eigh(A)
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise ConvergenceFailure(str(exc)) from exc
    scale = max(1.0, float(np.abs(A).max()) if A.size else 1.0)
    n = len(w)
    if abs(w.sum() - np.trace(A)) > tol * max(n, 1) * scale:
        raise ConvergenceFailure("eigenvalue sum does not match trace")
    if vectors:
        res = np.abs(A @ V - V * w).max() if n else 0.0
        if res > tol * scale * max(n, 1):
            raise ConvergenceFailure(f"eigen-residual {res:.3g} above tolerance")
    pairs = []
    for x in w:
        if pairs and abs(x - pairs[-1][2]) <= tol * scale * 10:
            tot, k, last = pairs[-1]
            pairs[-1] = (tot + x, k + 1, x)
        else:
            pairs.append((x, 1, x))
    spec = Spectrum(tuple((tot / k, k) for tot, k, _ in pairs), "numeric", tol)
    return (spec, w, V) if vectors else spec


def exact_spectrum(M, max_denominator: int = 10 ** 6) -> Spectrum | None:
    """The exact spectrum of a symmetric rational matrix, if all eigenvalues are rational.

    Numeric eigenvalues are clustered, rounded to the nearest fraction with
    bounded denominator and then confirmed by :func:`verify_spectrum`.
    Returns None when the confirmation fails (irrational eigenvalues).
    """
    M = as_rational(M)
    spec = eigenvalues_numeric(M, tol=1e-9)
    cand = []
    for v, k in spec.pairs:
        f = Fraction(v).limit_denominator(max_denominator)
        if abs(float(f) - v) > 1e-7 * max(1.0, abs(v)):
            return None
        cand.append((f, k))
    merged: dict = {}
    for f, k in cand:
        merged[f] = merged.get(f, 0) + k
    exact = Spectrum(tuple(merged.items()), "exact")
    return exact if verify_spectrum(M, exact) else None


def loewner_geq(A, B) -> bool:
    """Decide ``A - B >= 0`` (positive semidefinite) exactly.

    Symmetric Bareiss elimination with diagonal pivoting: pick a positive
    diagonal pivot while one exists; a negative diagonal entry refutes
    semidefiniteness, and once all remaining diagonal entries are zero the
    remaining block must vanish.
    """
    D = as_rational(A) - as_rational(B)
    if not D.is_symmetric():
        raise ValueError("loewner_geq needs symmetric matrices")
    a = D.int_rows()
    idx = list(range(len(a)))
    prev = 1
    while idx:
        diag = [(a[i][i], i) for i in idx]
        if any(v < 0 for v, _ in diag):
            return False
        pos = [i for v, i in diag if v > 0]
        if not pos:
            return all(a[i][j] == 0 for i in idx for j in idx)
        k = pos[0]
        piv = a[k][k]
        idx.remove(k)
        for i in idx:
            aik = a[i][k]
            for j in idx:
                a[i][j] = _exact_div(piv * a[i][j] - aik * a[k][j], prev)
        prev = piv
    return True


# -- C-matrices ---------------------------------------------------------------

_setting_cache: "WeakKeyDictionary" = WeakKeyDictionary()


def _nuisance_parts(setting):
    """``(X, G)``: the nuisance design matrix ``[1 | X_B ...]`` and a g-inverse of ``X'X``.

    Depends only on the setting, so it is cached per Setting object.
    """
    hit = _setting_cache.get(setting)
    if hit is None:
        n = setting.n
        cols = [np.ones((n, 1), dtype=np.int64)]
        for k, f in enumerate(setting.factors):
            Xk = np.zeros((n, f.size), dtype=np.int64)
            Xk[np.arange(n), setting.levels[:, k]] = 1
            cols.append(Xk)
        X = np.hstack(cols)
        G = g_inverse(RationalMatrix.from_ints(X.T @ X))
        hit = (X, G)
        _setting_cache[setting] = hit
    return hit


def c_matrix_definitional(d) -> RationalMatrix:
    """``X_V' (I - P) X_V`` with P the projector onto all nuisance columns.

    Expanded as ``R - (X_V' X) G (X' X_V)`` where ``G = (X'X)^-``, which
    equals the projector form for any g-inverse and never builds the
    n x n projector.
    """
    from .designcore import design_matrix, TREATMENT
    X, G = _nuisance_parts(d.setting)
    XV = design_matrix(d, TREATMENT)
    B = RationalMatrix.from_ints(XV.T @ X)
    R = RationalMatrix.from_ints(XV.T @ XV)
    return R - B @ G @ B.T


def c_matrix_projector(d) -> RationalMatrix:
    """The same C-matrix, literally through the n x n projector (slow; for checks)."""
    from .designcore import design_matrix, TREATMENT
    X, _ = _nuisance_parts(d.setting)
    XV = RationalMatrix.from_ints(design_matrix(d, TREATMENT))
    Q = RationalMatrix.identity(d.n) - projector(RationalMatrix.from_ints(X))
    return XV.T @ Q @ XV


def c_zero(d) -> RationalMatrix:
    """``R - r r'/n``: treatment information eliminating only the general mean."""
    from .designcore import replication_vector
    r = replication_vector(d)
    R = RationalMatrix.from_ints(np.diag(r))
    rr = RationalMatrix(_obj_ints(np.outer(r, r)), d.n)
    return R - rr


def c_block(d, name: str) -> RationalMatrix:
    """``N_B - r 1' / s_B`` (v x s_B); its columns sum to zero."""
    from .designcore import replication_vector, treatment_incidence
    N = treatment_incidence(d, name)
    r = replication_vector(d)
    sB = N.shape[1]
    return RationalMatrix(_obj_ints(sB * N - np.outer(r, np.ones(sB, dtype=np.int64))), sB)


def _gram(Cs: Iterable[RationalMatrix]) -> RationalMatrix:
    Cs = list(Cs)
    out = Cs[0] @ Cs[0].T
    for C in Cs[1:]:
        out = out + C @ C.T
    return out


def _sum(Cs: Iterable[RationalMatrix]) -> RationalMatrix:
    Cs = list(Cs)
    out = Cs[0]
    for C in Cs[1:]:
        out = out + C
    return out


def c_matrix_closedform(d) -> RationalMatrix:
    """C-matrix from the near-orthogonal structure of the setting.

    Types 1 and 2 (pairwise ``pI + J``, ``p = -1`` for type 1)::

        C = C0 - (1/s) sum_B C_B C_B' + p/(s u) S S',  u = s + m p,  S = sum_B C_B

    Type 3 (factor E with s+1 levels, the other m-1 pairwise ``I + J``)::

        C = C0 - (1/s) sum_B C_B C_B' + 1/(s u) S~ S~',  u = s + m - 1

    where ``S~`` sums ``C_B`` over the s-level factors only.
    """
    from .designcore import classify_setting
    cls = classify_setting(d.setting)
    names = d.setting.names
    C0 = c_zero(d)
    Cb = {nm: c_block(d, nm) for nm in names}
    s, m = cls.s, cls.m
    if cls.variant in ("type1", "type2"):
        p = -1 if cls.variant == "type1" else cls.p
        u = s + m * p
        S = _sum(Cb.values())
        return C0 - _gram(Cb.values()) * Fraction(1, s) + (S @ S.T) * Fraction(p, s * u)
    if cls.variant == "type3":
        u = s + m - 1
        St = _sum(Cb[nm] for nm in names if nm != cls.special)
        return C0 - _gram(Cb.values()) * Fraction(1, s) + (St @ St.T) * Fraction(1, s * u)
    raise UnsupportedSetting(f"no closed form for this setting ({cls.evidence})")


_c_cache: "WeakKeyDictionary" = WeakKeyDictionary()


def c_matrix(d) -> RationalMatrix:
    """The definitional C-matrix, cached per Design object."""
    hit = _c_cache.get(d)
    if hit is None:
        hit = _c_cache[d] = c_matrix_definitional(d)
    return hit
