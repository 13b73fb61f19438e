"""Command line front end: build models, run verification suites,
decompose matrices, and emit census/strata/classification reports.

Exit codes: 0 all checks passed, 1 some check failed (witness in the
report), 2 malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from twinbuild import primefield as pf
from twinbuild.buildings import (
    CheckResult,
    check_axioms,
    check_codistance_subword_bound,
    check_common_opposites,
    check_coprojection_agreement,
    check_opposition_witness,
    check_panel_mul_all,
    check_stratification_all,
    import_model,
    schubert_census,
    stratification,
)
from twinbuild.coxeter import (
    CARTAN_A2,
    CARTAN_AFFINE_A1,
    CARTAN_B2,
    CARTAN_G2,
    CoxeterSystem,
)
from twinbuild.reporting import (
    Report,
    census_figure,
    dynkin_dot,
    dynkin_figure,
    strata_dot,
    strata_figure,
    write_census_csv,
    write_dynkin_csv,
    write_strata_csv,
)
from twinbuild.thin import ThinTwinBuilding

NAMED_CARTANS = {
    "a2": CARTAN_A2,
    "b2": CARTAN_B2,
    "g2": CARTAN_G2,
    "affine_a1": CARTAN_AFFINE_A1,
}


class InputError(Exception):
    pass


def _load_gcm_file(path: str):
    doc = json.loads(Path(path).read_text())
    cartan = doc["cartan"] if isinstance(doc, dict) else doc
    if isinstance(doc, dict) and "rank" in doc:
        if len(cartan) != doc["rank"]:
            raise InputError("rank does not match the Cartan matrix")
    return tuple(tuple(int(x) for x in row) for row in cartan)


def _cartan_from_args(args):
    if getattr(args, "gcm", None):
        return _load_gcm_file(args.gcm)
    name = getattr(args, "type", None) or "a2"
    if name not in NAMED_CARTANS:
        raise InputError(f"unknown named type {name!r}")
    return NAMED_CARTANS[name]


def _build_context(args):
    """Returns (kind, payload): kind in {'thin', 'sl', 'kac', 'table'}."""
    model = args.model
    if model == "thin":
        system = CoxeterSystem(_cartan_from_args(args))
        return "thin", ThinTwinBuilding(system, cap=args.cap)
    if model == "sl":
        from twinbuild.slgroups import SpecialLinearTwin

        return "sl", SpecialLinearTwin(args.n, args.p)
    if model == "kac":
        from twinbuild.kacmoody import gcm

        return "kac", (gcm(_cartan_from_args(args)), args.height)
    if model == "table":
        if not args.table:
            raise InputError("--model table needs --table FILE")
        doc = json.loads(Path(args.table).read_text())
        return "table", import_model(doc)
    raise InputError(f"unknown model {model!r}")


# ---------------------------------------------------------------------------
# check suites


def _suite_axioms(kind, payload) -> list[CheckResult]:
    model = payload.building() if kind == "sl" else payload
    return [check_axioms(model)]


def _suite_lemmas(kind, payload) -> list[CheckResult]:
    model = payload.building() if kind == "sl" else payload
    return [
        check_coprojection_agreement(model),
        check_common_opposites(model),
        check_codistance_subword_bound(model),
        check_opposition_witness(model),
    ]


def _suite_strata(kind, payload) -> list[CheckResult]:
    model = payload.building() if kind == "sl" else payload
    return [check_stratification_all(model)]


def _suite_panelmul(kind, payload) -> list[CheckResult]:
    model = payload.building() if kind == "sl" else payload
    return [check_panel_mul_all(model)]


def _suite_coproj(kind, payload) -> list[CheckResult]:
    if kind != "sl":
        return [CheckResult("coproj-formula", True,
                            "skipped: matrix models only", 0, skipped=True)]
    from twinbuild.slgroups import check_coproj_formula, check_rho_membership

    return [check_coproj_formula(payload), check_rho_membership(payload)]


def _suite_rgd(kind, payload) -> list[CheckResult]:
    if kind != "sl":
        return [CheckResult("rgd", True, "skipped: matrix models only", 0,
                            skipped=True)]
    from twinbuild.slgroups import (
        check_lang_map,
        check_ordered_unipotent_products,
        rgd_axiom_check,
    )

    out = rgd_axiom_check(payload)
    out.append(check_ordered_unipotent_products(payload))
    out.append(check_lang_map(payload))
    return out


def _suite_algebra(kind, payload, seed=0) -> list[CheckResult]:
    if kind != "kac":
        return [CheckResult("algebra", True, "skipped: kac models only", 0,
                            skipped=True)]
    from twinbuild.adjoint import integral_form, rank2_rgd_check
    from twinbuild.kacmoody import NotRankTwoFinite, build_algebra

    g, window = payload
    alg = build_algebra(g, window)
    out = [
        alg.check_jacobi(limit=4000, seed=seed),
        alg.check_involution(),
        integral_form(alg).check_divided_power_integrality(),
    ]
    try:
        out.extend(rank2_rgd_check(g, 2))
    except NotRankTwoFinite:
        out.append(CheckResult("rank2-adjoint", True,
                               "skipped: not rank-2 finite type", 0,
                               skipped=True))
    return out


SUITES = {
    "axioms": _suite_axioms,
    "lemmas": _suite_lemmas,
    "coproj": _suite_coproj,
    "panelmul": _suite_panelmul,
    "strata": _suite_strata,
    "rgd": _suite_rgd,
    "algebra": _suite_algebra,
}

DEFAULT_SUITES = {
    "thin": ["axioms", "lemmas", "strata"],
    "table": ["axioms", "lemmas", "strata"],
    "sl": ["axioms", "lemmas", "coproj", "panelmul", "strata", "rgd"],
    "kac": ["algebra"],
}


def cmd_check(args) -> int:
    kind, payload = _build_context(args)
    suites = args.suite.split(",") if args.suite else DEFAULT_SUITES[kind]
    for name in suites:
        if name not in SUITES:
            raise InputError(f"unknown suite {name!r}")
    config = {
        "command": "check",
        "model": args.model,
        "type": getattr(args, "type", None),
        "gcm": getattr(args, "gcm", None),
        "n": getattr(args, "n", None),
        "p": getattr(args, "p", None),
        "cap": getattr(args, "cap", None),
        "height": getattr(args, "height", None),
        "suites": suites,
    }
    report = Report(config, seed=args.seed)
    timings = {}
    for name in suites:
        start = time.perf_counter()
        if name == "algebra":
            results = SUITES[name](kind, payload, seed=args.seed)
        else:
            results = SUITES[name](kind, payload)
        timings[name] = round(time.perf_counter() - start, 3)
        for result in results:
            report.add(result)
    if args.timings:
        report.timings = timings
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    report.write(out_dir / "report.json")
    if kind == "kac":
        from twinbuild.kacmoody import build_algebra

        g, window = payload
        (out_dir / "algebra.json").write_text(
            json.dumps(build_algebra(g, window).as_dict(),
                       sort_keys=True, indent=2) + "\n"
        )
    for check in sorted(report.checks, key=lambda c: c.name):
        status = "SKIP" if check.skipped else ("PASS" if check.passed else "FAIL")
        print(f"{status:4}  {check.name}  [{check.certified}; {check.checked} checked]")
    print(f"report: {out_dir / 'report.json'}")
    return 0 if report.passed else 1


# ---------------------------------------------------------------------------
# decompose


def _read_matrix_doc(args):
    text = (
        sys.stdin.read() if args.input == "-" else Path(args.input).read_text()
    )
    doc = json.loads(text)
    p = int(doc["p"])
    matrix = tuple(tuple(int(x) % p for x in row) for row in doc["matrix"])
    n = len(matrix)
    if any(len(row) != n for row in matrix):
        raise InputError("matrix is not square")
    if pf.det(matrix, p) != 1:
        raise InputError("matrix is not in the special linear group")
    return matrix, n, p


def _mat_json(m):
    return [list(row) for row in m]


def cmd_decompose(args) -> int:
    from twinbuild.slgroups import NotInBigCell, SpecialLinearTwin

    matrix, n, p = _read_matrix_doc(args)
    sl = SpecialLinearTwin(n, p)
    out: dict = {"kind": args.kind, "p": p}
    if args.kind == "bruhat":
        wit = sl.bruhat_decompose(matrix)
        out["w"] = [s + 1 for s in wit.w.word]
        out["witness"] = {"u1": _mat_json(wit.u1), "u2": _mat_json(wit.u2),
                          "w_hat": _mat_json(sl.w_hat(wit.w))}
    elif args.kind == "birkhoff":
        wit = sl.birkhoff_decompose(matrix)
        out["w"] = [s + 1 for s in wit.w.word]
        out["witness"] = {"lower": _mat_json(wit.lower),
                          "upper": _mat_json(wit.upper),
                          "w_hat": _mat_json(sl.w_hat(wit.w))}
    elif args.kind == "ult":
        try:
            u_plus, t, u_minus = sl.ult_factor(matrix)
            out["witness"] = {"u_plus": _mat_json(u_plus), "t": _mat_json(t),
                              "u_minus": _mat_json(u_minus)}
        except NotInBigCell:
            out["result"] = "NotInBigCell"
    else:
        raise InputError(f"unknown decomposition kind {args.kind!r}")
    print(json.dumps(out, sort_keys=True, indent=2))
    return 0


# ---------------------------------------------------------------------------
# report


def cmd_report(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    if args.kind == "dynkin":
        from twinbuild.dynkin import code_hex, enumerate_trees, tree_to_json

        trees = enumerate_trees(args.count)
        doc = {
            "kind": "dynkin",
            "vertices": args.count,
            "classes": len(trees),
            "codes": [code_hex(t) for t in trees],
            "trees": [tree_to_json(t) for t in trees],
        }
        (out_dir / "dynkin.json").write_text(
            json.dumps(doc, sort_keys=True, indent=2) + "\n"
        )
        write_dynkin_csv(trees, out_dir / "dynkin.csv")
        dynkin_figure(trees, out_dir / "dynkin.png",
                      f"{len(trees)} classes on {args.count} vertices")
        written = ["dynkin.json", "dynkin.csv", "dynkin.png"]
        if args.dot:
            (out_dir / "dynkin.dot").write_text(dynkin_dot(trees))
            written.append("dynkin.dot")
    else:
        kind, payload = _build_context(args)
        model = payload.building() if kind == "sl" else payload
        if kind == "kac":
            raise InputError("census/strata reports need a building model")
        base = model.chambers(1)[args.base]
        title = model.describe()
        if args.kind == "census":
            census = schubert_census(model, base)
            doc = {
                "kind": "census",
                "model": title,
                "base": model.chamber_label(base),
                "cells": {
                    repr(w): len(v) for w, v in sorted(
                        census.cells.items(), key=lambda t: (t[0].length, t[0].word)
                    )
                },
                "cocells": {
                    repr(w): len(v) for w, v in sorted(
                        census.cocells.items(), key=lambda t: (t[0].length, t[0].word)
                    )
                },
                "total": census.total(),
            }
            (out_dir / "census.json").write_text(
                json.dumps(doc, sort_keys=True, indent=2) + "\n"
            )
            write_census_csv(census, out_dir / "census.csv")
            census_figure(census, out_dir / "census.png", title)
            written = ["census.json", "census.csv", "census.png"]
        elif args.kind == "strata":
            base_minus = model.chambers(-1)[args.base]
            strat = stratification(model, base_minus)
            doc = {
                "kind": "strata",
                "model": title,
                "base": model.chamber_label(base_minus),
                "sizes": {
                    repr(w): len(v) for w, v in sorted(
                        strat.strata.items(), key=lambda t: (t[0].length, t[0].word)
                    )
                },
                "profile_ok": strat.profile_ok,
                "filters_match": strat.filters_match,
            }
            (out_dir / "strata.json").write_text(
                json.dumps(doc, sort_keys=True, indent=2) + "\n"
            )
            write_strata_csv(strat, out_dir / "strata.csv")
            strata_figure(strat, out_dir / "strata.png", title)
            written = ["strata.json", "strata.csv", "strata.png"]
            if args.dot:
                (out_dir / "strata.dot").write_text(strata_dot(strat))
                written.append("strata.dot")
        else:
            raise InputError(f"unknown report kind {args.kind!r}")
    for name in written:
        print(out_dir / name)
    return 0


# ---------------------------------------------------------------------------
# argument parsing


def _add_model_flags(parser, include_kac=True):
    parser.add_argument("--model", default="thin",
                        choices=["thin", "sl", "kac", "table"]
                        if include_kac else ["thin", "sl", "table"])
    parser.add_argument("--type", default=None,
                        help=f"named Cartan matrix: {', '.join(NAMED_CARTANS)}")
    parser.add_argument("--gcm", default=None,
                        help="JSON file with {'rank': n, 'cartan': [[...]]}")
    parser.add_argument("--n", type=int, default=3, help="SL_n rank")
    parser.add_argument("--p", type=int, default=2, help="prime field order")
    parser.add_argument("--cap", type=int, default=5,
                        help="length cap for thin models")
    parser.add_argument("--height", type=int, default=4,
                        help="height window for kac models")
    parser.add_argument("--table", default=None,
                        help="JSON building export to import")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="twinbuild",
        description="exact twin-building, BN-pair and Kac-Moody toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser("check", help="run verification suites")
    _add_model_flags(p_check)
    p_check.add_argument("--suite", default=None,
                         help=f"comma-separated: {', '.join(SUITES)}")
    p_check.add_argument("--out", default=".", help="report directory")
    p_check.add_argument("--seed", type=int, default=0)
    p_check.add_argument("--timings", action="store_true",
                         help="include wall-clock timings in the report")
    p_check.add_argument("--config", default=None,
                         help="JSON config file; flags override its entries")
    p_check.set_defaults(func=cmd_check)

    p_dec = sub.add_parser("decompose", help="decompose one matrix")
    p_dec.add_argument("--kind", required=True,
                       choices=["bruhat", "birkhoff", "ult"])
    p_dec.add_argument("input", help="JSON file with {'p':..., 'matrix':...}, "
                       "or - for stdin")
    p_dec.set_defaults(func=cmd_decompose)

    p_rep = sub.add_parser("report", help="emit census/strata/dynkin artifacts")
    p_rep.add_argument("kind", choices=["census", "strata", "dynkin"])
    _add_model_flags(p_rep)
    p_rep.add_argument("--count", type=int, default=3,
                       help="vertex count for dynkin enumeration")
    p_rep.add_argument("--base", type=int, default=0,
                       help="index of the base chamber")
    p_rep.add_argument("--out", default=".", help="output directory")
    p_rep.add_argument("--dot", action="store_true", help="also write DOT")
    p_rep.set_defaults(func=cmd_report)
    return parser


def _apply_config_file(args, argv: list[str]) -> None:
    if not getattr(args, "config", None):
        return
    doc = json.loads(Path(args.config).read_text())
    for key, value in doc.items():
        if key in ("command", "func") or not hasattr(args, key):
            raise InputError(f"unknown config key {key!r}")
        # explicit command line flags win over the config file
        if f"--{key.replace('_', '-')}" not in argv:
            setattr(args, key, value)


def main(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "check":
            _apply_config_file(args, list(argv))
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (json.JSONDecodeError, FileNotFoundError, KeyError) as exc:
        print(f"error: malformed input ({exc})", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
