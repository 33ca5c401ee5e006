"""Command-line front end.

Subcommands: ``construct``, ``spectrum``, ``verify``, ``compare`` and
``appendix``.  Output is canonical JSON (CSV is available for unit tables
only).  Exit status: 0 pass, 1 verification failure, 2 parameter error,
3 internal invariant breach.  On a nonzero exit a JSON object
``{"error": <code>, "message": ...}`` is printed to stderr.

The worker count for competitor evaluation comes from ``MULTIWAY_WORKERS``.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import charspec, claims, exactla as X, formats, optimality as O
from .constructions import build
from .errors import MultiwayError
from .gfcyclo import field_of_order

EXIT = {"parameter": 2, "verification": 1, "internal": 3}


class _Usage(MultiwayError):
    code = "usage"


def _emit(text: str, out: str | None):
    if out:
        formats.write_text(out, text)
    else:
        sys.stdout.write(text)


def _reps(text: str | None, s: int):
    if not text:
        return None
    F = field_of_order(s)
    return [F.decode(int(c)) for c in text.split(",")]


def _design_from_args(args):
    if getattr(args, "design_file", None):
        return formats.load_design(args.design_file)
    if args.design is None or args.s is None:
        raise _Usage("give --design-file, or --design with --s (and --h)")
    return build(args.design, args.s, args.h, _reps(getattr(args, "reps", None), args.s))


def cmd_construct(args) -> int:
    d = build(args.design, args.s, args.h, _reps(args.reps, args.s))
    text = formats.design_to_csv(d) if args.format == "csv" else formats.dumps(formats.design_to_json(d))
    _emit(text, args.out)
    return 0


def spectrum_report(d) -> tuple[dict, bool]:
    C = X.c_matrix(d)
    rank = X.exact_rank(C)
    report = {"construction": d.construction, "v": d.v, "n": d.n, "rank": rank,
              "connected": rank == d.v - 1}
    if rank != d.v - 1:
        report["error"] = {"code": "disconnected_design",
                           "message": f"C-matrix rank {rank} < v - 1 = {d.v - 1}"}
        return report, False
    sp = X.exact_spectrum(C)
    if sp is None:
        report["spectrum_mode"] = "numeric"
        report["spectrum"] = X.eigenvalues_numeric(C).to_json()
    else:
        report["spectrum_mode"] = "exact"
        report["spectrum"] = sp.to_json()
    verdicts = claims.spectrum_verdicts(d, sp)
    if d.construction == "d1" and "s" in d.info:
        h = d.v // d.info["s"]
        csp, _ = charspec.appendix_spectrum_d1(field_of_order(d.info["s"]), h, check=False)
        verdicts["character_sum_spectrum"] = claims.PASS if X.verify_spectrum(C, csp) else claims.FAIL
    report["verdicts"] = verdicts
    ok = all(v != claims.FAIL for v in verdicts.values())
    return report, ok


def cmd_spectrum(args) -> int:
    report, ok = spectrum_report(_design_from_args(args))
    _emit(formats.dumps(report), args.out)
    return 0 if ok else 1


def cmd_verify(args) -> int:
    d = formats.load_design(args.design)
    rep = O.verify_m_optimality(d, args.cls, args.competitors, seed=args.seed, thin=args.thin)
    _emit(formats.dumps(rep.to_json()), args.out)
    return 0 if rep.passed else 1


def cmd_compare(args) -> int:
    a, b = formats.load_design(args.first), formats.load_design(args.second)
    ma, mb = O.eigenvalue_vector(a), O.eigenvalue_vector(b)
    equal = ma.as_float().round(9).tolist() == mb.as_float().round(9).tolist()
    report = {
        "first": {"construction": a.construction, "eigenvalues": ma.to_json(),
                  **{f"psi_{c}": float(O.criterion_value(ma, c)) for c in "ADE"}},
        "second": {"construction": b.construction, "eigenvalues": mb.to_json(),
                   **{f"psi_{c}": float(O.criterion_value(mb, c)) for c in "ADE"}},
        "first_m_better": O.m_better(a, b),
        "second_m_better": O.m_better(b, a),
        "equal_spectra": equal,
        "verdict": "equal spectra" if equal else "different spectra",
    }
    _emit(formats.dumps(report), args.out)
    return 0


def cmd_appendix(args) -> int:
    report = charspec.appendix_report(field_of_order(args.s), args.h)
    _emit(formats.dumps(report), args.out)
    return 0 if report["cross_check"] else 1


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="multiway", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("construct", help="build d1, d2 or d3 and write its design document")
    c.add_argument("--design", required=True, choices=["d1", "d2", "d3"])
    c.add_argument("--s", type=int, required=True)
    c.add_argument("--h", type=int)
    c.add_argument("--reps", help="comma-separated element codes of the coset representatives (d1)")
    c.add_argument("--format", choices=["json", "csv"], default="json")
    c.add_argument("--out")
    c.set_defaults(func=cmd_construct)

    s = sub.add_parser("spectrum", help="exact spectrum plus closed-form verdicts")
    s.add_argument("--design-file")
    s.add_argument("--design", choices=["d1", "d2", "d3"])
    s.add_argument("--s", type=int)
    s.add_argument("--h", type=int)
    s.add_argument("--reps")
    s.add_argument("--out")
    s.set_defaults(func=cmd_spectrum)

    v = sub.add_parser("verify", help="sampled M-optimality check against competitors")
    v.add_argument("--design", required=True, help="design document (JSON)")
    v.add_argument("--class", dest="cls", required=True, choices=list(O.CLASSES))
    v.add_argument("--competitors", type=int, default=500)
    v.add_argument("--seed", type=int, default=42)
    v.add_argument("--thin", type=int, default=5)
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify)

    m = sub.add_parser("compare", help="compare two designs in the same setting")
    m.add_argument("first")
    m.add_argument("second")
    m.add_argument("--out")
    m.set_defaults(func=cmd_compare)

    a = sub.add_parser("appendix", help="character-sum diagonalization report for d1")
    a.add_argument("--s", type=int, required=True)
    a.add_argument("--h", type=int, required=True)
    a.add_argument("--out")
    a.set_defaults(func=cmd_appendix)
    return p


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except MultiwayError as exc:
        sys.stderr.write(json.dumps({"error": exc.code, "message": str(exc)}, ensure_ascii=False) + "\n")
        return EXIT.get(exc.kind, 3)
    except OSError as exc:
        sys.stderr.write(json.dumps({"error": "io_error", "message": str(exc)}) + "\n")
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
