"""Closed-form spectra claimed for the three constructions, and verdicts against exact computation.

Verdict names describe the property checked.  Each verdict is one of
``PASS``, ``FAIL`` or ``MULTIPLICITY_DISCREPANCY`` (the claimed distinct
values are right but the claimed multiplicities do not add up to v).
"""
from __future__ import annotations

from fractions import Fraction

from . import exactla as X
from .designcore import Design, classify_setting
from .errors import UnsupportedSetting

PASS, FAIL, MULT = "PASS", "FAIL", "MULTIPLICITY_DISCREPANCY"


def d1_spectrum(s: int, h: int) -> X.Spectrum:
    """``r^(h-1) (r - 1/(s-h))^(s-1) (r-1)^((h-1)(s-1)) 0^1`` with r = (s-1)/h."""
    r = Fraction((s - 1) // h)
    return X.Spectrum.exact({0: 1, r: h - 1, r - Fraction(1, s - h): s - 1, r - 1: (h - 1) * (s - 1)})


def d2_spectrum_stated(s: int, h: int) -> X.Spectrum:
    """``r^((h-1)(s-1)) (r - t(t+1)/u)^(s-1) 0^1``, as usually quoted; sums to hs - h + 1."""
    t = (s - 1) // h
    r, u = t + 1, s + (h - 1) * t
    return X.Spectrum.exact({0: 1, r: (h - 1) * (s - 1), r - Fraction(t * (t + 1), u): s - 1})


def d2_spectrum(s: int, h: int) -> X.Spectrum:
    """The computed spectrum: the stated values with r of multiplicity (h-1)s."""
    t = (s - 1) // h
    r, u = t + 1, s + (h - 1) * t
    return X.Spectrum.exact({0: 1, r: (h - 1) * s, r - Fraction(t * (t + 1), u): s - 1})


def d3_spectrum(s: int) -> X.Spectrum:
    """``(rs/(s+w))^(s-1) (r(s-1)/s)^s 0^1`` with r = (s+1)/2, w = (s-3)/4."""
    r, w = Fraction(s + 1, 2), (s - 3) // 4
    return X.Spectrum.exact({0: 1, r * s / (s + w): s - 1, r * (s - 1) / s: s})


def _values(sp: X.Spectrum) -> set:
    return {v for v, _ in sp.pairs}


def spectrum_verdicts(d: Design, spectrum: X.Spectrum | None = None) -> dict:
    """Verdicts of the claims that apply to ``d`` (keyed by construction)."""
    C = X.c_matrix(d)
    out = {}
    try:
        out["closed_form_c_matrix"] = PASS if X.c_matrix_closedform(d) == C else FAIL
    except UnsupportedSetting:
        pass
    s = d.info.get("s")
    if s is None or d.construction not in ("d1", "d2", "d3"):
        return out
    h = d.v // s
    if d.construction == "d1":
        out["d1_spectrum"] = PASS if X.verify_spectrum(C, d1_spectrum(s, h)) else FAIL
    elif d.construction == "d2":
        stated = d2_spectrum_stated(s, h)
        t = (s - 1) // h
        reduced = t + 1 - Fraction(t * (t + 1), s + (h - 1) * t)
        sp = spectrum or X.exact_spectrum(C)
        values_ok = (sp is not None and _values(sp) == _values(stated)
                     and sp.multiplicity(reduced) == s - 1)
        out["d2_spectrum_values"] = PASS if values_ok else FAIL
        if X.verify_spectrum(C, stated):
            out["d2_spectrum_multiplicity"] = PASS
        else:
            out["d2_spectrum_multiplicity"] = MULT if values_ok else FAIL
        out["d2_spectrum_computed"] = PASS if X.verify_spectrum(C, d2_spectrum(s, h)) else FAIL
        cls = classify_setting(d.setting)
        out["d2_setting_type"] = cls.variant
    elif d.construction == "d3":
        out["d3_spectrum"] = PASS if X.verify_spectrum(C, d3_spectrum(s)) else FAIL
    return out
