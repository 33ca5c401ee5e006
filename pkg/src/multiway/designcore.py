"""Multi-way settings and designs.

A *setting* is a set of units together with the levels that each block
factor takes on each unit.  A *design* adds an allocation of treatments to
units.  Levels and treatments are stored as integer indices into the
factor's (or design's) label tuple, so all incidence algebra is plain
integer numpy.

Two factor names are reserved: ``V`` (the treatment factor) and ``G`` (the
general mean, a one-level factor on every unit).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (EmptyBlock, FormatError, MixedLevelCounts, NotReducible,
                     SameFactor, UnknownFactor, BadParameters)

TREATMENT = "V"
GENERAL = "G"


def _frozen(a, dtype=np.int64):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Factor:
    name: str
    levels: tuple

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(self.levels))
        if len(set(self.levels)) != len(self.levels):
            raise FormatError(f"factor {self.name!r} has repeated level labels")

    @property
    def size(self) -> int:
        return len(self.levels)


@dataclass(frozen=True, eq=False)
class Setting:
    """Units crossed with block factors.

    ``levels[u, k]`` is the index (into ``factors[k].levels``) of the level
    of block factor ``k`` on unit ``u``.
    """

    units: tuple
    factors: tuple[Factor, ...]
    levels: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "units", tuple(self.units))
        object.__setattr__(self, "factors", tuple(self.factors))
        lv = _frozen(self.levels)
        if lv.ndim == 1 and len(self.factors) == 0:
            lv = lv.reshape(len(self.units), 0)
        object.__setattr__(self, "levels", lv)
        n, m = len(self.units), len(self.factors)
        if lv.shape != (n, m):
            raise FormatError(f"levels array has shape {lv.shape}, expected {(n, m)}")
        names = [f.name for f in self.factors]
        if len(set(names)) != m:
            raise FormatError("duplicate factor names")
        for k, fac in enumerate(self.factors):
            if fac.name in (TREATMENT, GENERAL):
                raise FormatError(f"factor name {fac.name!r} is reserved")
            if fac.size < 2:
                raise FormatError(f"block factor {fac.name!r} needs at least 2 levels")
            col = lv[:, k]
            if n and (col.min() < 0 or col.max() >= fac.size):
                raise FormatError(f"level index out of range for {fac.name!r}")
            if len(np.unique(col)) != fac.size:
                raise FormatError(f"some level of {fac.name!r} is never used")

    @property
    def n(self) -> int:
        return len(self.units)

    @property
    def m(self) -> int:
        return len(self.factors)

    @property
    def names(self) -> list[str]:
        return [f.name for f in self.factors]

    def index(self, name: str) -> int:
        for k, f in enumerate(self.factors):
            if f.name == name:
                return k
        raise UnknownFactor(f"no block factor named {name!r}")

    def factor(self, name: str) -> Factor:
        return self.factors[self.index(name)]

    def column(self, name: str) -> np.ndarray:
        return self.levels[:, self.index(name)]


@dataclass(frozen=True, eq=False)
class Design:
    """A setting plus a treatment allocation ``alloc[u]`` (index into ``treatments``)."""

    setting: Setting
    treatments: tuple
    alloc: np.ndarray
    construction: str = "custom"
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "treatments", tuple(self.treatments))
        a = _frozen(self.alloc)
        object.__setattr__(self, "alloc", a)
        if a.shape != (self.setting.n,):
            raise FormatError("allocation length differs from number of units")
        if len(set(self.treatments)) != len(self.treatments):
            raise FormatError("repeated treatment labels")
        if self.setting.n and (a.min() < 0 or a.max() >= len(self.treatments)):
            raise FormatError("treatment index out of range")
        if len(np.unique(a)) != len(self.treatments):
            raise FormatError("some treatment is never allocated")

    @property
    def n(self) -> int:
        return self.setting.n

    @property
    def v(self) -> int:
        return len(self.treatments)

    def with_alloc(self, alloc, construction: str = "custom") -> "Design":
        """Same setting object, new allocation."""
        return Design(self.setting, self.treatments, alloc, construction, dict(self.info))

    def same_table(self, other: "Design") -> bool:
        """True when both designs have identical unit tables, labels included."""
        a, b = self.setting, other.setting
        return (a.units == b.units and a.factors == b.factors
                and np.array_equal(a.levels, b.levels)
                and self.treatments == other.treatments
                and np.array_equal(self.alloc, other.alloc))


# -- design and incidence matrices ---------------------------------------

def _labels_of(d: Design, name: str):
    if name == TREATMENT:
        return d.alloc, d.v
    if name == GENERAL:
        return np.zeros(d.n, dtype=np.int64), 1
    k = d.setting.index(name)
    return d.setting.levels[:, k], d.setting.factors[k].size


def design_matrix(d: Design, name: str) -> np.ndarray:
    """The n x s_A 0/1 matrix with a 1 in row u at the level A takes on u."""
    col, size = _labels_of(d, name)
    X = np.zeros((d.n, size), dtype=np.int64)
    X[np.arange(d.n), col] = 1
    return X


def incidence_matrix(d: Design, a: str, b: str) -> np.ndarray:
    """Counts of units by (level of ``a``, level of ``b``); equals X_a' X_b."""
    if a == b:
        raise SameFactor(f"incidence of {a!r} with itself")
    ca, sa = _labels_of(d, a)
    cb, sb = _labels_of(d, b)
    M = np.zeros((sa, sb), dtype=np.int64)
    np.add.at(M, (ca, cb), 1)
    return M


def treatment_incidence(d: Design, name: str) -> np.ndarray:
    """The v x s_A treatment-versus-factor incidence."""
    return incidence_matrix(d, TREATMENT, name)


def replication_vector(d: Design) -> np.ndarray:
    return np.bincount(d.alloc, minlength=d.v).astype(np.int64)


def is_equireplicate(d: Design) -> bool:
    r = replication_vector(d)
    return bool(np.all(r == r[0]))


# -- setting classification ----------------------------------------------

@dataclass(frozen=True)
class SettingClass:
    """Which near-orthogonal family a setting belongs to.

    ``variant`` is ``"type1"`` (pairwise incidence J - I), ``"type2"``
    (pI + J), ``"type3"`` (one factor ``special`` with s+1 levels crossed
    completely with the rest, the rest pairwise I + J) or ``"other"``.
    """

    variant: str
    s: int | None = None
    m: int | None = None
    p: int | None = None
    special: str | None = None
    evidence: str = ""


def classify_setting(st: Setting) -> SettingClass:
    names = st.names
    m = st.m
    if m < 2:
        return SettingClass("other", m=m, evidence="fewer than two block factors")
    sizes = {f.name: f.size for f in st.factors}
    probe = Design(st, tuple(range(1)), np.zeros(st.n, dtype=np.int64)) if st.n else None
    if probe is None:
        return SettingClass("other", m=m, evidence="no units")

    def M(a, b):
        return incidence_matrix(probe, a, b)

    distinct = sorted(set(sizes.values()))
    if len(distinct) == 1:
        s = distinct[0]
        I, J = np.eye(s, dtype=np.int64), np.ones((s, s), dtype=np.int64)
        pairs = [(a, b) for i, a in enumerate(names) for b in names[i + 1:]]
        mats = [(a, b, M(a, b)) for a, b in pairs]
        if all(np.array_equal(x, J - I) for _, _, x in mats):
            return SettingClass("type1", s=s, m=m, evidence="all pairs J - I")
        p = int(mats[0][2][0, 0]) - 1
        if p >= 1 and all(np.array_equal(x, p * I + J) for _, _, x in mats):
            return SettingClass("type2", s=s, m=m, p=p, evidence=f"all pairs {p}I + J")
        for a, b, x in mats:
            if not (np.array_equal(x, J - I) or np.array_equal(x, p * I + J)):
                return SettingClass("other", s=s, m=m, evidence=f"pair ({a}, {b})")
        return SettingClass("other", s=s, m=m, evidence="mixed J - I and pI + J pairs")
    if len(distinct) == 2 and distinct[1] == distinct[0] + 1:
        s = distinct[0]
        big = [nm for nm in names if sizes[nm] == s + 1]
        if len(big) == 1:
            e = big[0]
            rest = [nm for nm in names if nm != e]
            for b in rest:
                if not np.array_equal(M(b, e), np.ones((s, s + 1), dtype=np.int64)):
                    return SettingClass("other", s=s, m=m, evidence=f"pair ({b}, {e})")
            target = np.eye(s, dtype=np.int64) + 1
            for i, a in enumerate(rest):
                for b in rest[i + 1:]:
                    if not np.array_equal(M(a, b), target):
                        return SettingClass("other", s=s, m=m, evidence=f"pair ({a}, {b})")
            return SettingClass("type3", s=s, m=m, special=e,
                                evidence=f"{e} has s+1 levels, others pairwise I + J")
    return SettingClass("other", m=m, evidence=f"level counts {sorted(sizes.values())}")


# -- total incidence -------------------------------------------------------

def total_incidence(d: Design) -> np.ndarray:
    """Sum of the treatment-versus-factor incidences over all block factors.

    Requires every block factor to have the same number of levels; level
    index k of every factor is identified with column k.
    """
    sizes = {f.size for f in d.setting.factors}
    if len(sizes) != 1:
        raise MixedLevelCounts(f"block factors have level counts {sorted(sizes)}")
    return sum(treatment_incidence(d, nm) for nm in d.setting.names)


def is_totally_binary(d: Design) -> bool:
    H = total_incidence(d)
    return bool(np.all((H == 0) | (H == 1)))


def normalize_total_incidence(d: Design) -> tuple[np.ndarray, np.ndarray]:
    """Row and column permutations taking H onto ``1_h (x) (J_s - I_s)``.

    Each row of H must have exactly one zero and every column must hold the
    zero of exactly v/s rows.  Rows are ordered by (position of the row
    among those sharing its zero column, zero column); within that, by
    treatment index.  Columns keep their order.
    """
    H = total_incidence(d)
    if not np.all((H == 0) | (H == 1)):
        raise NotReducible("total incidence is not binary")
    v, s = H.shape
    zeros = [np.flatnonzero(row == 0) for row in H]
    if any(len(z) != 1 for z in zeros):
        raise NotReducible("some row of the total incidence lacks exactly one zero")
    if v % s:
        raise NotReducible("v is not a multiple of s")
    h = v // s
    groups = [[] for _ in range(s)]
    for i, z in enumerate(zeros):
        groups[int(z[0])].append(i)
    if any(len(g) != h for g in groups):
        raise NotReducible("zero columns are not balanced")
    rows = np.array([groups[c][k] for k in range(h) for c in range(s)], dtype=np.int64)
    cols = np.arange(s, dtype=np.int64)
    return rows, cols


# -- duality with blocked main effect plans --------------------------------

@dataclass(frozen=True, eq=False)
class MainEffectPlan:
    """A blocked main effect plan: runs with factor levels, grouped in blocks."""

    factors: tuple[Factor, ...]
    runs: np.ndarray
    blocks: tuple
    block_of: np.ndarray
    run_ids: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        object.__setattr__(self, "runs", _frozen(self.runs).reshape(-1, len(self.factors)))
        object.__setattr__(self, "blocks", tuple(self.blocks))
        object.__setattr__(self, "block_of", _frozen(self.block_of))
        if not self.run_ids:
            object.__setattr__(self, "run_ids", tuple(range(len(self.runs))))

    @classmethod
    def from_runs(cls, runs: Sequence[Sequence], block_of: Sequence,
                  names: Sequence[str] | None = None, blocks: Sequence | None = None):
        """Build a plan from raw level tuples and block labels."""
        runs = [tuple(r) for r in runs]
        if not runs:
            raise BadParameters("empty plan")
        m = len(runs[0])
        names = list(names) if names is not None else [f"f{k}" for k in range(m)]
        factors, cols = [], []
        for k in range(m):
            labels = sorted({r[k] for r in runs})
            pos = {lab: i for i, lab in enumerate(labels)}
            factors.append(Factor(names[k], tuple(labels)))
            cols.append([pos[r[k]] for r in runs])
        blocks = tuple(sorted(set(block_of))) if blocks is None else tuple(blocks)
        bpos = {b: i for i, b in enumerate(blocks)}
        try:
            idx = [bpos[b] for b in block_of]
        except KeyError as exc:
            raise FormatError(f"run assigned to unknown block {exc}") from None
        return cls(tuple(factors), np.array(cols, dtype=np.int64).T.reshape(len(runs), m),
                   blocks, np.array(idx, dtype=np.int64))


def dual_of_mep(plan: MainEffectPlan, construction: str = "dual") -> Design:
    """Swap roles: plan factors become block factors, blocks become treatments."""
    if len(plan.runs) == 0:
        raise BadParameters("empty plan")
    used = np.bincount(plan.block_of, minlength=len(plan.blocks))
    if np.any(used == 0):
        empty = [plan.blocks[i] for i in np.flatnonzero(used == 0)]
        raise EmptyBlock(f"blocks without runs: {empty}")
    st = Setting(plan.run_ids, plan.factors, plan.runs)
    return Design(st, plan.blocks, plan.block_of, construction)


def plan_of_design(d: Design) -> MainEffectPlan:
    """The inverse of :func:`dual_of_mep`."""
    st = d.setting
    return MainEffectPlan(st.factors, st.levels, d.treatments, d.alloc, st.units)


def bibd_parameters(incidence) -> tuple[int, int, int, int, int] | None:
    """``(v, b, r, k, lambda)`` if the 0/1 matrix (rows = points, columns = blocks) is a BIBD.

    Counts directly: every point in ``r`` blocks, every block of size ``k``
    and every pair of distinct points together in exactly ``lambda`` blocks.
    """
    N = np.asarray(incidence, dtype=np.int64)
    if N.ndim != 2 or N.size == 0 or not np.isin(N, (0, 1)).all():
        return None
    v, b = N.shape
    rs, ks = N.sum(1), N.sum(0)
    if len(set(rs.tolist())) != 1 or len(set(ks.tolist())) != 1:
        return None
    G = N @ N.T
    off = G[~np.eye(v, dtype=bool)]
    if v > 1 and len(set(off.tolist())) != 1:
        return None
    lam = int(off[0]) if v > 1 else 0
    return v, b, int(rs[0]), int(ks[0]), lam
