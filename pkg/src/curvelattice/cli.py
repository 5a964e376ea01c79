"""Command-line driver.

Exit codes: 0 success, 1 violations found, 2 input error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction

from . import arith
from .census import (
    VIOLATION,
    CensusParams,
    det_sign_status,
    run_census,
    trichotomy_classify,
    verify_det_sign,
    verify_subgraph_lemma,
)
from .classify import (
    NONE,
    classify_dynkin,
    classify_star_fiber,
    detect_elliptic_subfiber,
    find_negative_definite_subgraph,
)
from .config import (
    ConfigurationError,
    QDivisor,
    format_rational,
    gram_matrix,
    is_rational_tree,
    load_configuration,
    parse_rational,
)
from .linalg import HypothesisError, definiteness, determinant
from .zariski import FORCED_INTO_N, chain_forcing, separated_chains, self_square, zariski_decompose

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_INPUT = 2

log = logging.getLogger(__name__)


class InputError(Exception):
    pass


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, default=_json_default)


def _json_default(v):
    if isinstance(v, Fraction):
        return format_rational(v)
    if isinstance(v, QDivisor):
        return v.to_json()
    if isinstance(v, (tuple, frozenset, set)):
        return list(v)
    raise TypeError(f"cannot serialize {type(v).__name__}")


def _load(path):
    try:
        return load_configuration(path)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from exc
    except (ConfigurationError, ValueError) as exc:
        raise InputError(f"{path}: {exc}") from exc


def _divisor_text(d: QDivisor, order) -> str:
    terms = [f"{format_rational(d[label])} {label}" for label in order if label in d]
    return " + ".join(terms) if terms else "0"


def _input_divisor(cfg, d) -> QDivisor:
    return d if d is not None else QDivisor.reduced(cfg.labels)


# verbs ----------------------------------------------------------------------


def cmd_decompose(args) -> int:
    cfg, d = _load(args.file)
    d = _input_divisor(cfg, d)
    try:
        z = zariski_decompose(cfg, d)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    p_sq = self_square(cfg, z.P)
    neg = [label for label in cfg.labels if label in z.negative_support]
    if args.format == "json":
        print(
            _dump(
                {
                    "input": cfg.to_json(d),
                    "P": z.P.to_json(cfg.labels),
                    "N": z.N.to_json(cfg.labels),
                    "P_squared": format_rational(p_sq),
                    "negative_support": neg,
                }
            )
        )
    else:
        print(f"D = {_divisor_text(d, cfg.labels)}")
        print(f"P = {_divisor_text(z.P, cfg.labels)}")
        print(f"N = {_divisor_text(z.N, cfg.labels)}")
        print(f"P^2 = {format_rational(p_sq)}")
        print("negative support: " + (", ".join(neg) if neg else "(empty)"))
        for label in cfg.labels:
            if label in d:
                print(f"  {label}: p = {format_rational(z.P.get(label))}, n = {format_rational(z.N.get(label))}")
    return EXIT_OK


def cmd_classify(args) -> int:
    cfg, _ = _load(args.file)
    gram = gram_matrix(cfg)
    info = definiteness(gram)
    out = {
        "curves": len(cfg),
        "determinant": determinant(gram),
        "definiteness": info.kind,
        "kernel": [v.to_json(cfg.labels) for v in info.kernel],
        "rational_tree": is_rational_tree(cfg),
    }
    if out["rational_tree"]:
        dyn = classify_dynkin(cfg)
        out["dynkin"] = dyn.describe() if dyn.kind != NONE else None
        star = classify_star_fiber(cfg)
        if star.kind != NONE:
            out["star_fiber"] = {
                "type": star.describe(),
                "primed": star.primed,
                "multiplicities": star.multiplicities.to_json(cfg.labels),
            }
        else:
            out["star_fiber"] = None
        try:
            sub = find_negative_definite_subgraph(cfg)
            out["negative_definite_subgraph"] = list(sub) if sub is not None else None
        except HypothesisError as exc:
            out["negative_definite_subgraph"] = f"skipped: {exc}"
    sub = detect_elliptic_subfiber(cfg)
    out["elliptic_subfiber"] = (
        None
        if sub is None
        else {
            "curves": list(sub.labels),
            "type": sub.fiber_type,
            "multiplicities": sub.multiplicities.to_json(cfg.labels),
        }
    )
    if args.format == "json":
        print(_dump(out))
    else:
        for key, value in out.items():
            if isinstance(value, (dict, list)):
                value = json.dumps(value, default=_json_default)
            elif isinstance(value, Fraction):
                value = format_rational(value)
            print(f"{key}: {value}")
    return EXIT_OK


def _check_trichotomy(cfg, d):
    if not is_rational_tree(cfg):
        raise InputError("trichotomy check needs a rational tree")
    if any(c.self_int > -2 for c in cfg.curves):
        raise InputError("trichotomy check needs every weight <= -2")
    verdict = trichotomy_classify(cfg)
    return verdict.kind == VIOLATION, verdict.to_json(cfg.labels)


def _check_det_sign(cfg, d):
    status, info = det_sign_status(cfg)
    return status == "failed", {"status": status, **info}


def _check_chain_forcing(cfg, d):
    d = _input_divisor(cfg, d)
    if any(c != 1 for c in d.values()):
        raise InputError("chain forcing is stated for a reduced divisor")
    z = zariski_decompose(cfg, d)
    sub = cfg.subconfiguration([label for label in cfg.labels if label in d])
    results = []
    bad = False
    for chain, attachment in separated_chains(sub):
        res = chain_forcing(sub, chain, attachment)
        in_n = all(z.N.get(label) > 0 for label in chain)
        entry = {
            "chain": list(chain),
            "attachment": attachment,
            "verdict": res.verdict,
            "reason": res.reason,
            "in_negative_part": in_n,
        }
        if res.bound_factors:
            entry["bound_factors"] = {label: format_rational(f) for label, f in res.bound_factors}
        if res.verdict == FORCED_INTO_N and not in_n:
            bad = True
        results.append(entry)
    return bad, {"chains": results}


_SUITES = {
    "trichotomy": _check_trichotomy,
    "det-sign": _check_det_sign,
    "chain-forcing": _check_chain_forcing,
}


def cmd_check(args) -> int:
    cfg, d = _load(args.file)
    try:
        violated, report = _SUITES[args.suite](cfg, d)
    except (HypothesisError, ConfigurationError, ValueError) as exc:
        raise InputError(str(exc)) from exc
    report = {"suite": args.suite, "violation": violated, **report}
    if args.format == "json":
        print(_dump(report))
    else:
        for key, value in report.items():
            if isinstance(value, (dict, list)):
                value = json.dumps(value, default=_json_default)
            elif isinstance(value, Fraction):
                value = format_rational(value)
            print(f"{key}: {value}")
    return EXIT_VIOLATION if violated else EXIT_OK


def _weights_arg(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad weight list {text!r}") from exc


def _flatten_weights(groups) -> list[int] | None:
    if groups is None:
        return None
    return [w for group in groups for w in group]


def cmd_census(args) -> int:
    try:
        params = CensusParams(
            max_components=args.max_components,
            min_weight=args.min_weight,
            weight_set=_flatten_weights(args.weights),
            parallel=args.jobs > 1,
            jobs=args.jobs,
            min_components=args.min_components,
        )
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    if args.lemma == "trichotomy":
        report = run_census(params)
        failed = bool(report.violations)
    elif args.lemma == "subgraph":
        try:
            report = verify_subgraph_lemma(params)
        except ValueError as exc:
            raise InputError(str(exc)) from exc
        failed = bool(report.failures)
    else:
        report = verify_det_sign(params)
        failed = bool(report.failures)
    print(_dump(report.to_json()) if args.format == "json" else report.to_text())
    return EXIT_VIOLATION if failed else EXIT_OK


def _context(args) -> arith.SurfaceContext:
    return arith.SurfaceContext(chi=args.chi, q=args.q, pg=args.pg, K_sq=args.k_sq)


def cmd_arith(args) -> int:
    f = args.formula
    if f == "rr":
        out = {"chi": arith.riemann_roch_chi(args.m_sq, args.m_dot_k, _context(args))}
    elif f == "restriction":
        out = {"chi": arith.chi_restriction(args.c_dot_m, args.c_dot_kc)}
    elif f == "noether":
        out = {"b2": arith.noether_picard_bound(_context(args))}
    elif f == "h0":
        out = {"value": arith.remark_h0(args.kd_dot_d, _context(args))}
    elif f == "multiplicity":
        sols = arith.solve_multiplicity(args.k, args.limit)
        out = {"solutions": [{"m1": a, "m2": b, "k": k} for a, b, k in sols]}
        if len(sols) == 1:
            out["canonical_fiber_coefficient"] = arith.canonical_fiber_coefficient(sols[0][:2])
    else:
        horizontal = [tuple(parse_rational(x) for x in h.split(",")) for h in args.horizontal]
        if any(len(h) != 3 for h in horizontal):
            raise InputError("--horizontal takes c,C.F,C.C1")
        fibers = [parse_rational(x) for x in args.fibers]
        rep = arith.hirzebruch_check(args.d, horizontal, fibers)
        out = {
            "case": rep.case,
            "fiber_inequality": rep.fiber_inequality,
            "section_inequality": rep.section_inequality,
            "feasible": rep.feasible,
            "horizontal_sum": rep.horizontal_sum,
            "fiber_sum": rep.fiber_sum,
            "fiber_bound": rep.fiber_bound,
            "K_plus_roundup": {"C1": rep.roundup_class[0], "F": rep.roundup_class[1]},
            "dominates_minus_K": rep.dominates,
        }
    if args.format == "json":
        print(_dump(out))
    else:
        for key, value in out.items():
            if isinstance(value, Fraction):
                value = format_rational(value)
            elif isinstance(value, (dict, list)):
                value = json.dumps(value, default=_json_default)
            print(f"{key}: {value}")
    return EXIT_OK


# parser ---------------------------------------------------------------------


def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="curvelattice", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="verb", required=True)

    def fmt(p):
        p.add_argument("--format", choices=("text", "json"), default="text")

    p = sub.add_parser("decompose", help="Zariski decomposition of the file's divisor")
    p.add_argument("file")
    fmt(p)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("classify", help="Dynkin, star-fibre and elliptic sub-fibre findings")
    p.add_argument("file")
    fmt(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("check", help="run a lemma suite on one configuration")
    p.add_argument("file")
    p.add_argument("--suite", choices=sorted(_SUITES), required=True)
    fmt(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("census", help="enumerate weighted rational trees and check them")
    p.add_argument("--max-components", type=int, default=9)
    p.add_argument("--min-components", type=int, default=1)
    p.add_argument("--min-weight", type=int, default=-5)
    p.add_argument(
        "--weights", type=_weights_arg, nargs="+", default=None, help="explicit weights: --weights -2 -3 or --weights=-2,-3"
    )
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--lemma", choices=("trichotomy", "subgraph", "det-sign"), default="trichotomy")
    fmt(p)
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("arith", help="surface arithmetic formulas")
    p.add_argument(
        "formula", choices=("rr", "restriction", "noether", "h0", "multiplicity", "hirzebruch")
    )
    for flag in ("--chi", "--k-sq", "--m-sq", "--m-dot-k", "--c-dot-m", "--c-dot-kc", "--kd-dot-d"):
        p.add_argument(flag, type=_rational)
    p.add_argument("--q", type=int)
    p.add_argument("--pg", type=int)
    p.add_argument("--k", type=int, help="fix k in the multiplicity search")
    p.add_argument("--limit", type=int, default=arith.SEARCH_LIMIT)
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--horizontal", action="append", default=[], help="c,C.F,C.C1 (repeatable)")
    p.add_argument("--fibers", nargs="*", default=[])
    fmt(p)
    p.set_defaults(func=cmd_arith)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except (InputError, ConfigurationError, HypothesisError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main() -> None:
    sys.exit(run())
