"""Command-line front end.

Subcommands:
  classify    classify one equation and print the report
  corpus      run a corpus file (or the bundled one) against expectations
  invariants  dump the invariant cascade for one equation, no verdict

Exit codes: 0 success (classify: any verdict; corpus: all expectations met),
1 corpus expectation failures, 2 input errors, 3 probe exhaustion.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .backend import backend_name
from .classifier import classify, inspect_invariants
from .corpus import (classification_payload, load_bundled_corpus,
                     load_corpus_file, parse_rational, report_json,
                     report_text, run_corpus, stable_report_text,
                     CorpusFormatError)
from .ode import NormalizeError, normalize_to_cubic
from .parser import ParseError
from .probing import Probe, ProbeExhausted, snap_rational

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_INPUT = 2
EXIT_PROBE = 3


def _add_equation_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--ode", required=True, help="equation, e.g. \"y'' = 6*y^2\"")
    p.add_argument("--param", action="append", default=[], metavar="NAME=RAT",
                   help="bind a parameter to an exact rational (repeatable)")
    p.add_argument("--seed", type=int, default=0, help="probe RNG seed")
    p.add_argument("--box", type=str, default=None, metavar="X0,X1,Y0,Y1",
                   help="sample rectangle (default 0.3,2.7,0.3,2.7)")
    p.add_argument("--tol", type=float, default=1e-6,
                   help="match tolerance for constant comparisons")
    p.add_argument("--json", action="store_true", help="JSON output")


def _parse_params(items: list[str]) -> dict[str, Fraction]:
    out: dict[str, Fraction] = {}
    for item in items:
        if "=" not in item:
            raise ValueError(f"--param expects NAME=VALUE, got {item!r}")
        name, value = item.split("=", 1)
        out[name.strip()] = parse_rational(value)
    return out


def _parse_box(text: str | None):
    if text is None:
        return None
    parts = text.split(",")
    if len(parts) != 4:
        raise ValueError("--box expects four comma-separated numbers")
    return tuple(float(p) for p in parts)


def _probe_from_args(args) -> Probe:
    box = _parse_box(args.box)
    return Probe(seed=args.seed, box=box) if box else Probe(seed=args.seed)


def _print_classification(payload: dict) -> None:
    print(f"verdict: {payload['verdict']}")
    if payload.get("algebra_dim") is not None:
        print(f"algebra dimension: {payload['algebra_dim']}")
    if payload.get("degeneration"):
        print(f"degeneration: {payload['degeneration']}")
    if payload.get("params"):
        rendered = []
        for name, value in payload["params"].items():
            snapped = snap_rational(value, rtol=1e-12)
            rendered.append(f"{name} = {snapped if snapped is not None else f'{value:.12g}'}")
        print("parameters: " + ", ".join(rendered))
    shown = [inv for inv in payload.get("invariants", ())
             if inv.get("value") is not None or inv.get("identically_zero") is not None]
    if shown:
        print("invariants:")
        for inv in shown:
            if inv.get("value") is not None:
                pretty = inv.get("rational") or f"{inv['value']:.12g}"
                print(f"  {inv['name']} = {pretty}")
            else:
                mark = "== 0" if inv["identically_zero"] else "!= 0"
                print(f"  {inv['name']} {mark}")
    if payload.get("model"):
        print(f"model: {payload['model']}")
    if payload.get("generators"):
        gens = "; ".join(f"(xi, eta) = ({xi}, {eta})"
                         for xi, eta in payload["generators"])
        print(f"generators: {gens}")
    for note in payload.get("branch_notes", ()):
        print(f"note: {note}")


def cmd_classify(args) -> int:
    probe = _probe_from_args(args)
    params = _parse_params(args.param)
    ode = normalize_to_cubic(args.ode, params, probe)
    result = classify(ode, probe, args.tol)
    payload = {"equation": args.ode,
               "params": {k: str(v) for k, v in params.items()},
               "seed": args.seed, "backend": backend_name()}
    payload.update(classification_payload(result))
    if args.json:
        print(json.dumps(payload, indent=2))
    else:
        _print_classification(payload)
    return EXIT_OK


def cmd_invariants(args) -> int:
    probe = _probe_from_args(args)
    params = _parse_params(args.param)
    ode = normalize_to_cubic(args.ode, params, probe)
    dump = inspect_invariants(ode, probe)
    if args.json:
        print(json.dumps(dump, indent=2))
        return EXIT_OK
    print(f"route: {dump['route']}")
    limit = args.max_expr_chars
    for entry in dump["entries"]:
        text = entry["expression"]
        if limit and len(text) > limit:
            text = text[:limit] + f"... (+{len(text) - limit} chars)"
        line = f"{entry['name']}: {text}"
        print(line)
        flags = []
        if entry.get("identically_zero") is not None:
            flags.append("== 0" if entry["identically_zero"] else "!= 0")
        if entry.get("value") is not None:
            flags.append(f"value {entry.get('rational') or entry['value']}")
        elif "value" in entry and entry["value"] is None and not entry.get("identically_zero"):
            flags.append("non-constant")
        if flags:
            print(f"    {', '.join(flags)}")
    for note in dump["notes"]:
        print(f"note: {note}")
    return EXIT_OK


def cmd_corpus(args) -> int:
    if args.path is None:
        records = load_bundled_corpus()
    else:
        records = load_corpus_file(args.path)
    report = run_corpus(records, seed=args.seed, base_probe=Probe(seed=args.seed),
                        tol=args.tol)
    if args.stable_json:
        print(stable_report_text(report))
    elif args.json:
        print(report_json(report))
    else:
        print(report_text(report))
    return EXIT_OK if report["summary"]["failed"] == 0 else EXIT_MISMATCH


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="odecubic",
        description="Point classification of second-order ODEs cubic in y'")
    sub = parser.add_subparsers(dest="command", required=True)

    p_classify = sub.add_parser("classify", help="classify one equation")
    _add_equation_flags(p_classify)
    p_classify.set_defaults(func=cmd_classify)

    p_inv = sub.add_parser("invariants",
                           help="dump the invariant cascade, no verdict")
    _add_equation_flags(p_inv)
    p_inv.add_argument("--max-expr-chars", type=int, default=800,
                       help="truncate printed expressions (0 = no limit)")
    p_inv.set_defaults(func=cmd_invariants)

    p_corpus = sub.add_parser("corpus", help="run a corpus file")
    p_corpus.add_argument("path", nargs="?", default=None,
                          help="corpus file (default: bundled corpus)")
    p_corpus.add_argument("--seed", type=int, default=0)
    p_corpus.add_argument("--tol", type=float, default=1e-6)
    p_corpus.add_argument("--json", action="store_true")
    p_corpus.add_argument("--stable-json", action="store_true",
                          help="JSON with timing fields removed "
                               "(byte-identical across equal-seed runs)")
    p_corpus.set_defaults(func=cmd_corpus)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    subject = f" for {getattr(args, 'ode', None)!r}" if getattr(args, "ode", None) else ""
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: parse{subject}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NormalizeError as exc:
        print(f"error: normalize{subject}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (CorpusFormatError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ProbeExhausted as exc:
        print(f"error: probe exhausted{subject}: {exc}", file=sys.stderr)
        return EXIT_PROBE


if __name__ == "__main__":
    sys.exit(main())
