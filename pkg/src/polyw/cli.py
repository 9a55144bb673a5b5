"""Command-line surface over the library.

Exit codes are stable: 0 affirmative, 1 negative with evidence,
2 inconclusive / exhausted / not-applicable, 3 usage or parse error.
POLYW_SEED supplies a default seed for sampling commands.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from typing import Optional

from . import covers, search, stats, whitehead
from .complexes import PolygonalityCertificate, proper_power_certificate
from .constructors import (
    NotApplicableError,
    construct_f2_no_isolated,
    construct_from_tn,
    construct_height_one,
    construct_isolated_b,
    nonpolygonality_follower_obstruction,
)
from .invariants import (
    has_no_isolated_generators,
    height_one_inequality,
    is_simple_height_one,
    isolated_b_sign_condition,
    rho,
    tn_membership,
)
from .words import (
    CyclicWord,
    EmptyWordError,
    RankExceededError,
    WordSyntaxError,
    cyclic_word,
    is_proper_power,
)

EXIT_YES = 0
EXIT_NO = 1
EXIT_INCONCLUSIVE = 2
EXIT_USAGE = 3


@dataclass
class Verdict:
    status: str  # polygonal | not-polygonal | inconclusive | not-applicable | error
    payload: Optional[dict] = None

    EXIT = {
        "polygonal": EXIT_YES,
        "affirmative": EXIT_YES,
        "not-polygonal": EXIT_NO,
        "negative": EXIT_NO,
        "inconclusive": EXIT_INCONCLUSIVE,
        "not-applicable": EXIT_INCONCLUSIVE,
        "error": EXIT_USAGE,
    }

    @property
    def exit_code(self):
        return self.EXIT[self.status]


def _parse(args):
    try:
        return cyclic_word(args.word, args.rank)
    except (WordSyntaxError, RankExceededError, EmptyWordError) as err:
        print("parse error: %s" % err, file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _bounds(args):
    return search.SearchBounds(
        max_disks=args.max_disks,
        max_edges=args.max_edges,
        max_power=args.powers,
        allow_negative_powers=args.allow_negative_powers,
        time_budget=args.time_budget,
        jobs=args.jobs,
    )


def _emit(data, out):
    text = json.dumps(data, indent=2)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _try_constructors(w):
    """The auto strategy ladder; returns a certificate or None."""
    if has_no_isolated_generators(w) and len(w.support()) == w.rank:
        element = rho(w)
        cert = tn_membership(element)
        if cert is not None:
            return construct_from_tn(w, cert)
    if w.rank == 2:
        if isolated_b_sign_condition(w):
            return construct_isolated_b(w)
        if is_simple_height_one(w) and height_one_inequality(w):
            return construct_height_one(w)
    return None


def check_polygonal(w: CyclicWord, strategy="auto", bounds=None) -> Verdict:
    """Decide/certify polygonality; the library-level pipeline behind
    ``polyw check``."""
    bounds = bounds or search.SearchBounds()
    if strategy == "auto":
        if is_proper_power(w):
            cert = proper_power_certificate(w)
            return Verdict("polygonal", cert.to_json_dict())
        evidence = nonpolygonality_follower_obstruction(w)
        if evidence is not None:
            return Verdict(
                "not-polygonal",
                {
                    "evidence": "follower-obstruction",
                    "generator": "ab"[evidence.generator - 1],
                    "kind": evidence.kind,
                    "inverted": sorted("ab"[g - 1] for g in evidence.inversions),
                },
            )
        try:
            cert = _try_constructors(w)
        except NotApplicableError:
            cert = None
        if cert is not None:
            return Verdict("polygonal", cert.to_json_dict())
        outcome = search.decide_polygonal(w, bounds)
        if isinstance(outcome, search.Found):
            return Verdict("polygonal", outcome.certificate.to_json_dict())
        if isinstance(outcome, search.ExhaustedWithin):
            return Verdict(
                "inconclusive",
                {"search": "exhausted", "nodes": outcome.nodes},
            )
        return Verdict("inconclusive", {"search": "timed-out", "nodes": outcome.nodes})
    if strategy == "search":
        outcome = search.decide_polygonal(w, bounds)
        if isinstance(outcome, search.Found):
            return Verdict("polygonal", outcome.certificate.to_json_dict())
        if isinstance(outcome, search.ExhaustedWithin):
            return Verdict("inconclusive", {"search": "exhausted", "nodes": outcome.nodes})
        return Verdict("inconclusive", {"search": "timed-out", "nodes": outcome.nodes})
    builders = {
        "tn": lambda: construct_from_tn(w, _require_tn(w)),
        "f2": lambda: construct_f2_no_isolated(w),
        "isolated-b": lambda: construct_isolated_b(w),
        "height-one": lambda: construct_height_one(w),
    }
    try:
        cert = builders[strategy]()
    except NotApplicableError as err:
        return Verdict("not-applicable", {"reason": str(err)})
    return Verdict("polygonal", cert.to_json_dict())


def _require_tn(w):
    cert = tn_membership(rho(w))
    if cert is None:
        raise NotApplicableError("junction invariant is not in the cycle monoid")
    return cert


def cmd_check(args):
    w = _parse(args)
    verdict = check_polygonal(w, args.strategy, _bounds(args))
    _emit({"word": str(w), "status": verdict.status, "result": verdict.payload},
          args.out)
    return verdict.exit_code


def cmd_rho(args):
    w = _parse(args)
    element = rho(w)
    cert = tn_membership(element)
    data = {
        "word": str(w),
        "rho": ["(%d,%d)" % p for p in element.pairs],
        "member": cert is not None,
    }
    if cert is not None:
        data["tn_certificate"] = {"cycles": [list(c) for c in cert.cycles]}
    _emit(data, args.out)
    return EXIT_YES if cert is not None else EXIT_NO


def cmd_minimize(args):
    w = _parse(args)
    trace = whitehead.minimize(w)
    _emit(
        {
            "start": str(trace.start),
            "final": str(trace.final),
            "length": len(trace.final),
            "moves": [str(m) for m, _w in trace.steps],
            "words": [str(x) for _m, x in trace.steps],
        },
        args.out,
    )
    return EXIT_YES


def cmd_diskbusting(args):
    w = _parse(args)
    try:
        result = whitehead.is_diskbusting(w, cap=args.orbit_cap)
    except whitehead.OrbitCapExceeded as err:
        _emit({"word": str(w), "status": "inconclusive", "reason": str(err)}, args.out)
        return EXIT_INCONCLUSIVE
    _emit({"word": str(w), "diskbusting": result}, args.out)
    return EXIT_YES if result else EXIT_NO


def _load_certificate(path):
    try:
        with open(path) as fh:
            data = json.load(fh)
        if "status" in data and "result" in data:  # `check` output wrapper
            data = data["result"]
        return PolygonalityCertificate.from_json_dict(data)
    except (OSError, ValueError, KeyError, TypeError) as err:
        print("cannot load certificate: %s" % err, file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def cmd_cover(args):
    cert = _load_certificate(args.certificate)
    try:
        report = covers.double_surface_report(cert)
    except ValueError as err:
        print("error: %s" % err, file=sys.stderr)
        return EXIT_USAGE
    _emit(report.to_json_dict(), args.out)
    return EXIT_YES


def cmd_stats(args):
    seed = args.seed
    if seed is None:
        seed = int(os.environ.get("POLYW_SEED", "0"))
    report = stats.run_trials(args.length, args.samples, seed, jobs=args.jobs)
    if args.format == "csv":
        text = report.csv_header() + "\n" + report.to_csv_row()
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(text + "\n")
        else:
            print(text)
    else:
        _emit(report.to_json_dict(), args.out)
    return EXIT_YES


def cmd_render(args):
    cert = _load_certificate(args.certificate)
    if cert.declarative is not None:
        print("declarative certificate has no surface to render", file=sys.stderr)
        return EXIT_USAGE
    if args.cover:
        graph = covers.stallings_complete(covers.graph_of_complex(cert.complex()))
        text = graph.to_dot()
    else:
        text = cert.complex().to_dot()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return EXIT_YES


def _add_word_arg(p):
    p.add_argument("word", help="word text, e.g. 'a (a^2)^b' or 'aabaB'")
    p.add_argument("--rank", type=int, default=None, help="ambient rank (default: inferred)")


def _add_search_args(p):
    p.add_argument("--max-disks", type=int, default=2)
    p.add_argument("--max-edges", type=int, default=0, help="cap on total boundary edges")
    p.add_argument("--powers", type=int, default=2, help="max disk power")
    p.add_argument("--allow-negative-powers", action="store_true")
    p.add_argument("--time-budget", type=float, default=None, help="seconds")
    p.add_argument("--jobs", type=int, default=1)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="polyw",
        description="decide, certify and construct polygonality of words in free groups",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="decide polygonality")
    _add_word_arg(p)
    p.add_argument(
        "--strategy",
        choices=["auto", "tn", "f2", "isolated-b", "height-one", "search"],
        default="auto",
    )
    _add_search_args(p)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("rho", help="junction invariant and cycle-monoid membership")
    _add_word_arg(p)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_rho)

    p = sub.add_parser("minimize", help="Whitehead minimization trace")
    _add_word_arg(p)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_minimize)

    p = sub.add_parser("diskbusting", help="proper-free-factor test")
    _add_word_arg(p)
    p.add_argument("--orbit-cap", type=int, default=whitehead.DEFAULT_ORBIT_CAP)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_diskbusting)

    p = sub.add_parser("cover", help="degree / doubled-surface report of a certificate")
    p.add_argument("certificate", help="certificate JSON path")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_cover)

    p = sub.add_parser("stats", help="random height-one word trials")
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("render", help="DOT export of a certificate's 1-skeleton")
    p.add_argument("certificate")
    p.add_argument("--cover", action="store_true", help="render the completed cover instead")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_render)

    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        # argparse exits 2 on usage errors; remap to the stable code
        if err.code not in (0, None):
            raise SystemExit(EXIT_USAGE)
        raise
    raise SystemExit(args.func(args))


if __name__ == "__main__":
    main()
