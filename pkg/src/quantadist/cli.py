"""Command line front end.

A thin shell over the library: model and certificate loading, distance
computation (fixpoint iteration, trace bounds, the transportation LP,
directed Hausdorff), certificate checking, the law suites, and the
bundled reproductions.  Exit codes: 0 success/accepted, 1
rejected/mismatch/law failure, 2 usage or parse error, 3 budget
refusal.  JSON reports are deterministic (sorted keys, no timing).
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from typing import List, Optional

from .behaviour import (CoalgebraModel, ModelError, certify, kleene_gfp,
                        reachable_states, trace_lower_bound)
from .canon import canon_key
from .distlaw import ALWAYS_LEFT, DistLaw, StateBudgetError, case_study_laws, law_suite
from .galois import BudgetError
from .models import (DistanceInstance, ModelFormatError, certificate_from_json,
                     load_json_file, model_from_json)
from .monadlift import finsubset, hausdorff_directed, kantorovich_lp, subdist
from .quantale import QuantaleError
from .repro import REPRODUCTIONS
from .suites import galois_suite, extension_suite, polyfunctor_suite, quantale_suite

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3


class _CliError(Exception):
    def __init__(self, message, code=EXIT_USAGE):
        super().__init__(message)
        self.code = code


def _parse_set_literal(text: str):
    if not (text.startswith("{") and text.endswith("}")):
        raise _CliError(f"expected a set literal like '{{x0,y0}}', got {text!r}")
    inner = text[1:-1].strip()
    members = [m.strip() for m in inner.split(",") if m.strip()] if inner else []
    return finsubset(members)


def _parse_tvalue(text: str, instance):
    text = text.strip()
    if text.startswith("{"):
        return _parse_set_literal(text)
    if isinstance(instance, DistanceInstance):
        if text in instance.distributions:
            return instance.distributions[text]
        return _parse_dist_literal(text)
    if instance.monad == "powerset":
        return _parse_set_literal(text)
    return _parse_dist_literal(text)


def _parse_dist_literal(text: str):
    weights = {}
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        if ":" not in chunk:
            raise _CliError(f"expected 'state:weight' entries, got {chunk!r}")
        name, w = chunk.rsplit(":", 1)
        weights[name.strip()] = Fraction(w.strip())
    return subdist(weights)


def _parse_pair(text: str, instance):
    if "|" not in text:
        raise _CliError("a pair looks like 'lhs|rhs'")
    left, right = text.split("|", 1)
    return _parse_tvalue(left, instance), _parse_tvalue(right, instance)


def _emit(report: dict, as_json: bool, lines: List[str]):
    if as_json:
        print(json.dumps(report, sort_keys=True, indent=2))
    else:
        for line in lines:
            print(line)


def _cmd_distance(args) -> int:
    instance = model_from_json(load_json_file(args.model))
    pair = _parse_pair(args.pair, instance)
    report = {"command": "distance", "model": args.model, "method": args.method,
              "pair": [canon_key(pair[0]), canon_key(pair[1])]}
    lines = []
    if args.method in ("lp", "hausdorff"):
        if not isinstance(instance, DistanceInstance):
            raise _CliError(f"method {args.method!r} needs a distance-matrix model")
        if args.method == "lp":
            value = kantorovich_lp(instance.graph, pair[0], pair[1])
        else:
            value = hausdorff_directed(instance.graph, pair[0], pair[1])
        q = instance.graph.quantale
        report.update(value=q.value_to_json(value), soundness="exact")
    elif args.method == "kleene":
        if not isinstance(instance, CoalgebraModel):
            raise _CliError("method 'kleene' needs a coalgebra model")
        det = instance.det()
        if args.depth is not None:
            from .distlaw import determinize
            det = determinize(instance.law(), instance.transitions, list(pair),
                              depth=args.depth, max_states=args.max_states)
            if det.frontier:
                raise _CliError(
                    f"the carrier is not successor-closed within depth "
                    f"{args.depth} ({len(det.frontier)} frontier states)")
            states = list(det.memo)
        else:
            states = reachable_states(det, list(pair), max_states=args.max_states)
        result = kleene_gfp(det, states, max_iters=args.max_iters)
        value = result.at(pair[0], pair[1])
        q = instance.quantale
        report.update(value=q.value_to_json(value),
                      soundness="exact" if result.converged
                      else "lower bound (numeric)",
                      iterations=result.iterations,
                      carrier_size=len(result.states))
        lines.append(f"carrier: {len(result.states)} reachable states, "
                     f"{result.iterations} iterations"
                     + ("" if result.converged else " (not stabilized)"))
    elif args.method == "trace":
        if not isinstance(instance, CoalgebraModel):
            raise _CliError("method 'trace' needs a coalgebra model")
        value = trace_lower_bound(instance, pair[0], pair[1], args.max_words)
        q = instance.quantale
        report.update(value=q.value_to_json(value),
                      soundness="lower bound (numeric)",
                      max_words=args.max_words)
    else:
        raise _CliError(f"unknown method {args.method!r}")
    lines.insert(0, f"{report['value']}  [{report['soundness']}]")
    _emit(report, args.json, lines)
    return EXIT_OK


def _cmd_certify(args) -> int:
    instance = model_from_json(load_json_file(args.model))
    if not isinstance(instance, CoalgebraModel):
        raise _CliError("certification needs a coalgebra model")
    cert = certificate_from_json(load_json_file(args.cert), instance)
    verdict = certify(cert, instance)
    report = {
        "command": "certify", "model": args.model, "certificate": args.cert,
        "accepted": verdict.accepted, "support_pairs": verdict.checked,
        "failures": [
            {"lhs": canon_key(l), "rhs": canon_key(r), "reason": why}
            for l, r, why in verdict.failures],
    }
    _emit(report, args.json, [verdict.reason()])
    return EXIT_OK if verdict.accepted else EXIT_MISMATCH


def _cmd_laws(args) -> int:
    if args.scope == "quantale":
        results = quantale_suite(grid=args.grid)
    elif args.scope == "galois":
        results = galois_suite(max_size=3) + extension_suite()
    elif args.scope == "polyfunctor":
        results = polyfunctor_suite()
    elif args.scope == "distlaw":
        results = []
        for name, law in sorted(case_study_laws().items()):
            if args.mutant_g:
                law = DistLaw(law.functor, law.monad, law.quantale,
                              g_variant=ALWAYS_LEFT)
            results.extend(law_suite(law, seed=args.seed))
    else:
        raise _CliError(f"unknown law scope {args.scope!r}")
    report = {
        "command": "laws", "scope": args.scope,
        "results": [{"name": r.name, "passed": r.passed, "detail": r.detail}
                    for r in results],
        "all_passed": all(r.passed for r in results),
    }
    _emit(report, args.json, [r.line() for r in results])
    return EXIT_OK if report["all_passed"] else EXIT_MISMATCH


def _cmd_repro(args) -> int:
    result = REPRODUCTIONS[args.example]()
    report = {
        "command": "repro", "example": args.example,
        "rows": [{"label": r.label, "computed": r.computed,
                  "expected": r.expected, "ok": r.ok} for r in result.rows],
        "matches": result.matches,
    }
    lines = [f"{'ok ' if r.ok else 'BAD'} {r.label}: {r.computed}"
             + ("" if r.ok else f" (expected {r.expected})") for r in result.rows]
    lines.append("all values reproduced" if result.matches
                 else "MISMATCH against the published values")
    _emit(report, args.json, lines)
    return EXIT_OK if result.matches else EXIT_MISMATCH


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quantadist",
        description="Exact quantale-valued behavioural distances and "
                    "up-to certificate checking.")
    sub = parser.add_subparsers(dest="command", required=True)

    dist = sub.add_parser("distance", help="compute a distance or bound")
    dist.add_argument("--model", required=True)
    dist.add_argument("--pair", required=True,
                      help="'lhs|rhs'; sets as {x0,y0}, distributions as "
                           "x:1/2,y:1/2, or names from the model file")
    dist.add_argument("--method", required=True,
                      choices=["kleene", "trace", "lp", "hausdorff"])
    dist.add_argument("--max-words", type=int, default=10,
                      help="trace: explore words of length strictly below this")
    dist.add_argument("--max-iters", type=int, default=1000)
    dist.add_argument("--max-states", type=int, default=100_000)
    dist.add_argument("--depth", type=int, default=None,
                      help="kleene: bound the exploration depth (the carrier "
                           "must close within it)")
    dist.add_argument("--json", action="store_true")
    dist.set_defaults(func=_cmd_distance)

    cert = sub.add_parser("certify", help="check an up-to certificate")
    cert.add_argument("--model", required=True)
    cert.add_argument("--cert", required=True)
    cert.add_argument("--json", action="store_true")
    cert.set_defaults(func=_cmd_certify)

    laws = sub.add_parser("laws", help="run a property suite")
    laws.add_argument("--scope", required=True,
                      choices=["quantale", "galois", "polyfunctor", "distlaw"])
    laws.add_argument("--grid", type=int, default=8)
    laws.add_argument("--seed", type=int, default=0)
    laws.add_argument("--mutant-g", action="store_true",
                      help="distlaw: inject the no-priority mutant prioritizer")
    laws.add_argument("--json", action="store_true")
    laws.set_defaults(func=_cmd_laws)

    rep = sub.add_parser("repro", help="recompute a bundled example")
    rep.add_argument("example", choices=sorted(REPRODUCTIONS))
    rep.add_argument("--json", action="store_true")
    rep.set_defaults(func=_cmd_repro)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    started = time.monotonic()
    try:
        code = args.func(args)
    except (BudgetError, StateBudgetError) as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (_CliError,) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (ModelFormatError, ModelError, QuantaleError, ValueError,
            ZeroDivisionError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(f"elapsed: {time.monotonic() - started:.2f}s", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
