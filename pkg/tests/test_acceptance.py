"""Acceptance criteria 1-9.

Each check returns ``(ok, detail)``; the tests record one ``PASS``/``FAIL``
line per criterion, echoed in the pytest terminal summary.  Run this file
directly (``python3 tests/test_acceptance.py``) to get the lines alone.

Criteria 7 and 8 are expected to fail: the literal equality for the third
construction does not hold, and one trace inequality has counterexamples.
Both are implemented as stated.
"""
from __future__ import annotations

import functools
import sys
from fractions import Fraction as F
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

import inequality_checks as IC  # noqa: E402
from multiway import charspec, claims, exactla as X, formats, optimality as O  # noqa: E402
from multiway.constructions import build  # noqa: E402
from multiway.designcore import bibd_parameters, replication_vector, treatment_incidence  # noqa: E402
from multiway.gfcyclo import build_cyclotomy, field_of_order  # noqa: E402

D1 = [(5, 2), (7, 2), (7, 3), (9, 2), (11, 2), (13, 2), (13, 3), (13, 4)]
D2 = [(7, 2), (13, 2), (13, 4)]
D3 = [7, 11]
INSTANCES = [("d1", s, h) for s, h in D1] + [("d2", s, h) for s, h in D2] + [("d3", s, None) for s in D3]
SEED, COUNT, TOL = 42, 500, 1e-7

RESULTS: dict[int, str] = {}


def record(n: int, title: str, ok: bool, detail: str) -> str:
    line = f"criterion {n} ({title}): {'PASS' if ok else 'FAIL'} - {detail}"
    RESULTS[n] = line
    print(line)
    return line


@functools.lru_cache(maxsize=None)
def sampled(key: tuple) -> O.OptimalityReport:
    name, cls = {"d1": ("d1", "binary-equireplicate"), "d2": ("d2", "equireplicate"),
                 "d3": ("d3", "equireplicate")}[key[0]]
    return O.verify_m_optimality(build(*key), cls, COUNT, seed=SEED)


CANDIDATES = [("d1", 5, 2), ("d2", 7, 2), ("d3", 7, None)]


def check_1():
    bad = [k for k in INSTANCES
           if X.c_matrix_definitional(build(*k)) != X.c_matrix_closedform(build(*k))]
    return not bad, f"{len(INSTANCES) - len(bad)}/{len(INSTANCES)} instances equal" + (f", mismatches {bad}" if bad else "")


def check_2():
    d = build("d1", 5, 2)
    want = X.Spectrum.exact({0: 1, 1: 4, F(5, 3): 4, 2: 1})
    exact_ok = X.verify_spectrum(X.c_matrix(d), want)
    sp, det = charspec.appendix_spectrum_d1(field_of_order(5), 2)
    char_ok = sp.as_dict() == want.as_dict() and det["off_diagonal"] <= 1e-9
    return exact_ok and char_ok, (f"rank check {exact_ok}, character-sum spectrum {sp.as_dict() == want.as_dict()}, "
                                  f"off-diagonal {det['off_diagonal']:.2e}")


def check_3():
    worst = 0.0
    for s, h in sorted(set(D1 + D2)):
        ct = charspec.build_character_table(build_cyclotomy(field_of_order(s), h))
        g = charspec.gauss_sum_moduli(ct)
        worst = max(worst, float(np.abs(g[1:] - s).max()), abs(float(g[0]) - 1))
    first = charspec.gauss_sum_moduli(charspec.build_character_table(build_cyclotomy(field_of_order(5), 2)))[1]
    return worst <= 1e-9, f"max deviation {worst:.2e}; s=5,h=2 gives {first:.9f}"


def check_4():
    d = build("d3", 7)
    rep = replication_vector(d)
    r_ok = bool(np.all(rep == 4))
    Nx, Ninf = treatment_incidence(d, "x2"), treatment_incidence(d, "inf")
    pars = bibd_parameters(Nx.T), bibd_parameters(Ninf.T)
    bibd_ok = pars == ((7, 14, 8, 4, 4), (8, 14, 7, 4, 3))
    ao_ok = bool(np.array_equal(Nx.T @ Ninf, 4 * np.ones((7, 8), dtype=int)))
    sp_ok = X.verify_spectrum(X.c_matrix(d), X.Spectrum.exact({0: 1, F(24, 7): 7, F(7, 2): 6}))
    ok = r_ok and bibd_ok and ao_ok and sp_ok
    return ok, f"r=4 {r_ok}, BIBD {pars}, N'N = 4J {ao_ok}, spectrum {sp_ok}"


def check_5():
    d = build("d2", 7, 2)
    sp = X.exact_spectrum(X.c_matrix(d))
    counts = sp.as_dict()
    positive = {k: v for k, v in counts.items() if k != 0}
    ok = positive == {F(14, 5): 6, 4: 7} and X.verify_spectrum(X.c_matrix(d), sp)
    flag = claims.spectrum_verdicts(d, sp)["d2_spectrum_multiplicity"]
    ok = ok and flag == claims.MULT
    return ok, f"positive part {{14/5: {positive.get(F(14, 5), 0)}, 4: {positive.get(F(4), 0)}}}, flag {flag}"


def check_6():
    parts, ok = [], True
    for key in CANDIDATES:
        rep = sampled(key)
        wm = sum(v["weak_majorization"] for v in rep.verdicts)
        psi = sum(all(v[f"psi_{c}_delta"] <= TOL for c in "ADE") for v in rep.verdicts)
        good = rep.competitors_tested == COUNT and wm == COUNT and psi == COUNT
        ok = ok and good
        parts.append(f"{key[0]} {wm}/{rep.competitors_tested} majorized, {psi} psi ok, "
                     f"{rep.skipped_disconnected} disconnected skipped")
    return ok, "; ".join(parts)


def gamma_equalities():
    out = {}
    for key in CANDIDATES[1:]:
        d = build(*key)
        cp = O.chain_parameters(d)
        mu = O.eigenvalue_vector(d)
        gamma = O.trace_rank_bound(cp.r, cp.a, cp.rho, cp.n)
        refined = O.trace_refined_bound(cp.r, cp.a, cp.s)
        out[key[0]] = (gamma == mu, refined == mu, gamma, mu)
    return out


def check_7():
    chain_ok, parts = True, []
    for key in CANDIDATES[1:]:
        rep = sampled(key)
        a = sum(v["chain_cd_le_c1"] for v in rep.verdicts)
        b = sum(v["chain_c1_le_c2"] for v in rep.verdicts)
        chain_ok = chain_ok and a == b == COUNT
        parts.append(f"{key[0]} C_d<=C_1 {a}/{COUNT}, C_1<=C_2 {b}/{COUNT}")
    eq = gamma_equalities()
    gamma_ok = all(v[0] for v in eq.values())
    parts.append("gamma = mu: " + ", ".join(f"{k} {v[0]}" for k, v in eq.items()))
    parts.append(f"refined bound = mu(d3) {eq['d3'][1]}")
    return chain_ok and gamma_ok, "; ".join(parts)


def check_8():
    parts, ok = [], True
    for name, case in IC.CASES.items():
        fails, _ = IC.run(case, 1000, seed=0)
        ok = ok and fails == 0
        parts.append(f"{name} {1000 - fails}/1000")
    return ok, ", ".join(parts)


def check_9():
    d = build("d1", 5, 2)
    texts = [formats.dumps(O.verify_m_optimality(d, "binary-equireplicate", COUNT, seed=SEED).to_json())
             for _ in range(2)]
    texts += [formats.dumps(sampled(k).to_json()) for k in CANDIDATES[1:]]
    again = [formats.dumps(O.verify_m_optimality(build(*k), "equireplicate", COUNT, seed=SEED).to_json())
             for k in CANDIDATES[1:]]
    ok = texts[0] == texts[1] and texts[2:] == again
    return ok, f"{len(texts)} reports regenerated, byte-identical {ok}"


TITLES = {1: "C-matrix dual path", 2: "first construction spectrum", 3: "Gauss-sum moduli",
          4: "third construction properties", 5: "second construction spectrum",
          6: "sampled M-optimality", 7: "Loewner chain and gamma", 8: "matrix inequalities",
          9: "determinism"}
CHECKS = {1: check_1, 2: check_2, 3: check_3, 4: check_4, 5: check_5, 6: check_6,
          7: check_7, 8: check_8, 9: check_9}


@pytest.mark.parametrize("n", sorted(CHECKS))
def test_criterion(n):
    ok, detail = CHECKS[n]()
    record(n, TITLES[n], ok, detail)
    assert ok, detail


if __name__ == "__main__":
    for n in sorted(CHECKS):
        record(n, TITLES[n], *CHECKS[n]())
