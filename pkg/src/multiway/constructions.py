"""Builders for the three cyclotomic multi-way designs.

All three use treatments ``(x, j)`` with ``x`` in GF(s) and ``j`` a coset
index, stored at treatment index ``j*s + x``.  Level index ``x`` of an
s-level factor is the field element ``x`` itself; the extra level of the
``inf`` factor of :func:`build_d3_star` has index ``s``.  Labels (what
files see) are the element codes of :meth:`FiniteField.encode`, the
``inf`` level is labelled ``s`` and treatment ``(x, j)`` is labelled
``j*s + code(x)``.  Units are ordered lexicographically by the codes of
their coordinates.

Each builder checks the incidence identities its design is known to
satisfy and raises :class:`InvariantViolated` if one fails, so a returned
design always carries them.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .designcore import (Design, Factor, Setting, classify_setting,
                         incidence_matrix, replication_vector,
                         treatment_incidence)
from .errors import (BadParameters, BadResidueClass, DisconnectedDesign,
                     InvariantViolated, RepresentativeNotInCoset, TooFewFactors)
from .gfcyclo import (Cyclotomy, FiniteField, build_cyclotomy,
                      build_residue_pairing)


@dataclass(frozen=True, eq=False)
class CyclotomicMatrixSet:
    """``L[i][x, y] = 1`` iff ``y - x`` lies in coset ``i``; ``big`` is the
    hs x hs block matrix whose (i, j) block is ``L[i - j]``."""

    cyclotomy: Cyclotomy
    L: tuple
    big: np.ndarray


def _coset_index(cy: Cyclotomy) -> np.ndarray:
    F = cy.field
    idx = np.full(F.s, -1, dtype=np.int64)
    for i, cos in enumerate(cy.cosets):
        idx[list(cos)] = i
    return idx


def _difference_table(F: FiniteField) -> np.ndarray:
    """``D[x, y] = y - x``."""
    neg = np.array([F.neg(x) for x in F.elements], dtype=np.int64)
    return F.add_table[neg][:, :]


def cyclotomic_matrices(cy: Cyclotomy) -> CyclotomicMatrixSet:
    F, h, s = cy.field, cy.h, cy.field.s
    cos = _coset_index(cy)[_difference_table(F)]
    L = tuple((cos == i).astype(np.int64) for i in range(h))
    for Li in L:
        Li.setflags(write=False)
    big = np.block([[L[(i - j) % h] for j in range(h)] for i in range(h)])
    big.setflags(write=False)
    J, I = np.ones((s, s), dtype=np.int64), np.eye(s, dtype=np.int64)
    if not np.array_equal(sum(L), J - I):
        raise InvariantViolated("cyclotomic matrices do not sum to J - I")
    for Li in L:
        if not (np.all(Li.sum(0) == cy.t) and np.all(Li.sum(1) == cy.t)):
            raise InvariantViolated("cyclotomic matrix with wrong line sums")
    return CyclotomicMatrixSet(cy, L, big)


def _element_labels(F: FiniteField) -> tuple:
    return tuple(F.encode(x) for x in F.elements)


def _treatment_labels(F: FiniteField, h: int) -> tuple:
    return tuple(j * F.s + F.encode(x) for j in range(h) for x in F.elements)


def _check(cond: bool, what: str):
    if not cond:
        raise InvariantViolated(f"construction check failed: {what}")


def build_d1_star(field: FiniteField, h: int, reps=None) -> Design:
    """Dual of the cyclotomic plan with h block factors on units F* x F.

    Factor ``p{i}`` puts unit ``(a, b)`` at level ``a*p_i + b``; the unit
    receives treatment ``(b, i)`` where ``a`` lies in coset ``i``.  The
    representatives default to ``g**i``.
    """
    F, s = field, field.s
    if h < 2:
        raise BadParameters("h >= 2 required")
    cy = build_cyclotomy(F, h)
    t = cy.t
    if t < 2:
        raise DisconnectedDesign("t = (s-1)/h must be >= 2; t = 1 gives a disconnected design")
    reps = [F.exp(i) for i in range(h)] if reps is None else [int(p) for p in reps]
    if len(reps) != h:
        raise BadParameters(f"need {h} representatives, got {len(reps)}")
    for i, p in enumerate(reps):
        if p == 0 or cy.coset_of(p) != i:
            raise RepresentativeNotInCoset(f"representative {p} is not in coset {i}")

    coords = sorted(((a, b) for a in F.nonzero for b in F.elements),
                    key=lambda u: (F.encode(u[0]), F.encode(u[1])))
    levels = np.array([[F.add(F.mul(a, p), b) for p in reps] for a, b in coords],
                      dtype=np.int64)
    alloc = np.array([cy.coset_of(a) * s + b for a, b in coords], dtype=np.int64)
    factors = tuple(Factor(f"p{i}", _element_labels(F)) for i in range(h))
    units = tuple((F.encode(a), F.encode(b)) for a, b in coords)
    d = Design(Setting(units, factors, levels), _treatment_labels(F, h), alloc, "d1",
               {"s": s, "h": h, "t": t, "reps": reps})

    L = cyclotomic_matrices(cy).L
    J, I = np.ones((s, s), dtype=np.int64), np.eye(s, dtype=np.int64)
    for i in range(h):
        for j in range(i + 1, h):
            _check(np.array_equal(incidence_matrix(d, f"p{i}", f"p{j}"), J - I),
                   f"M(p{i}, p{j}) = J - I")
        Ni = np.vstack([L[(i + j) % h] for j in range(h)])
        _check(np.array_equal(treatment_incidence(d, f"p{i}"), Ni), f"N_p{i} stacked form")
    _check(np.all(replication_vector(d) == t), "equireplicate with r = t")
    _check(classify_setting(d.setting).variant == "type1", "setting of type 1")
    return d


def build_d2_star(field: FiniteField, h: int) -> Design:
    """Dual of the closed-coset plan: one block factor per element of C_0.

    Units are ``(a, b, j)`` with ``a`` in ``C_j`` or zero; factor ``alpha``
    puts the unit at level ``a*alpha + b`` and the unit receives treatment
    ``(b, j)``.
    """
    F, s = field, field.s
    if h < 2:
        raise BadParameters("h >= 2 required")
    cy = build_cyclotomy(F, h)
    t = cy.t
    if t < 3:
        raise TooFewFactors(f"m = t \u2265 3 required (t = {t})")
    alphas = cy.cosets[0]
    coords = sorted(((a, b, j) for j in range(h) for b in F.elements for a in cy.closed(j)),
                    key=lambda u: (F.encode(u[0]), F.encode(u[1]), u[2]))
    levels = np.array([[F.add(F.mul(a, al), b) for al in alphas] for a, b, _ in coords],
                      dtype=np.int64)
    alloc = np.array([j * s + b for _, b, j in coords], dtype=np.int64)
    factors = tuple(Factor(f"a{al}", _element_labels(F)) for al in alphas)
    units = tuple((F.encode(a), F.encode(b), j) for a, b, j in coords)
    d = Design(Setting(units, factors, levels), _treatment_labels(F, h), alloc, "d2",
               {"s": s, "h": h, "t": t})

    L = cyclotomic_matrices(cy).L
    J, I = np.ones((s, s), dtype=np.int64), np.eye(s, dtype=np.int64)
    names = d.setting.names
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            _check(np.array_equal(incidence_matrix(d, a, b), (h - 1) * I + J),
                   f"M({a}, {b}) = (h-1)I + J")
        _check(np.array_equal(treatment_incidence(d, a), np.vstack([Lj + I for Lj in L])),
               f"N_{a} stacked form")
    _check(np.all(replication_vector(d) == t + 1), "equireplicate with r = t + 1")
    cls = classify_setting(d.setting)
    _check(cls.variant == "type2" and cls.p == h - 1, "setting of type 2 with p = h - 1")
    return d


def build_d3_star(field: FiniteField) -> Design:
    """The adjusted-orthogonal design for s = 3 mod 4.

    Units ``(a, b, i)`` with ``a`` a square or zero and ``i`` in {0, 1}.
    Factor ``x{xi}`` (xi in W) puts the unit at ``b + a*xi`` when i = 0 and
    ``b - a*f(xi)`` when i = 1; factor ``inf`` at ``a + b`` (i = 0),
    ``b - a`` (i = 1, a != 0) or the extra level (i = 1, a = 0).  The unit
    receives treatment ``(b, i)``.
    """
    F, s = field, field.s
    if s % 4 != 3:
        raise BadResidueClass(f"s \u2261 3 (mod 4) required (s = {s})")
    if s < 7:
        raise BadParameters("s >= 7 required (W is empty for s = 3)")
    cy = build_cyclotomy(F, 2)
    pair = build_residue_pairing(F)
    W, f = pair.W, pair.f
    coords = sorted(((a, b, i) for a in cy.closed(0) for b in F.elements for i in (0, 1)),
                    key=lambda u: (F.encode(u[0]), F.encode(u[1]), u[2]))

    def level(a, b, i, xi):
        if xi is None:
            if i == 0:
                return F.add(a, b)
            return s if a == 0 else F.sub(b, a)
        return F.add(b, F.mul(a, xi)) if i == 0 else F.sub(b, F.mul(a, f[xi]))

    cols = list(W) + [None]
    levels = np.array([[level(a, b, i, xi) for xi in cols] for a, b, i in coords],
                      dtype=np.int64)
    alloc = np.array([i * s + b for _, b, i in coords], dtype=np.int64)
    factors = tuple(Factor(f"x{xi}", _element_labels(F)) for xi in W) + (
        Factor("inf", _element_labels(F) + (s,)),)
    units = tuple((F.encode(a), F.encode(b), i) for a, b, i in coords)
    t = cy.t
    d = Design(Setting(units, factors, levels), _treatment_labels(F, 2), alloc, "d3",
               {"s": s, "h": 2, "t": t, "W": list(W), "m_below_three": len(W) + 1 < 3})

    L0, L1 = cyclotomic_matrices(cy).L
    J, I = np.ones((s, s), dtype=np.int64), np.eye(s, dtype=np.int64)
    ones_col = np.ones((s, 1), dtype=np.int64)
    N_inf = np.block([[L0 + I, 0 * ones_col], [L1, ones_col]])
    for k, xi in enumerate(W):
        a = f"x{xi}"
        _check(np.array_equal(incidence_matrix(d, a, "inf"), np.ones((s, s + 1), dtype=np.int64)),
               f"M({a}, inf) = J")
        for xj in W[k + 1:]:
            _check(np.array_equal(incidence_matrix(d, a, f"x{xj}"), I + J), f"M({a}, x{xj}) = I + J")
        _check(np.array_equal(treatment_incidence(d, a), np.vstack([L0 + I, L0 + I])),
               f"N_{a} stacked form")
    _check(np.array_equal(treatment_incidence(d, "inf"), N_inf), "N_inf block form")
    _check(np.all(replication_vector(d) == t + 1), "equireplicate with r = (s+1)/2")
    _check(classify_setting(d.setting).variant == "type3", "setting of type 3")
    return d


def build(design: str, s: int, h: int | None = None, reps=None) -> Design:
    """Dispatch on ``design`` in {"d1", "d2", "d3"} using the field of order ``s``."""
    from .gfcyclo import field_of_order
    F = field_of_order(s)
    if design == "d1":
        if h is None:
            raise BadParameters("d1 needs h")
        return build_d1_star(F, h, reps)
    if design == "d2":
        if h is None:
            raise BadParameters("d2 needs h")
        return build_d2_star(F, h)
    if design == "d3":
        if h not in (None, 2):
            raise BadParameters("d3 always uses h = 2")
        return build_d3_star(F)
    raise BadParameters(f"unknown design {design!r}")
