"""Command-line interface.

Exit status: 0 on success, 1 for syntax or validation problems, 2 when the
reasoning itself fails (contradictory sources, size limits, rejection limit).
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from typing import Sequence, TextIO

from ..bext import b_extension_entries, b_extension_entries_defaults, bel_star, check_unreserved
from ..defaults import Extension, m_extension_entries, reiter_extension_entries
from ..errors import EvidentError, ReservedAtomError
from ..montecarlo import McConfig, bel_mc
from ..sources import bel_exact
from .parser import KnowledgeBase, ParseError, parse_formula, parse_kb

EXIT_OK, EXIT_INPUT, EXIT_REASONING = 0, 1, 2


class _UsageError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit with status 2
        raise _UsageError(f"{self.prog}: error: {message}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--kb", required=True, metavar="PATH", help="knowledge-base file")
    common.add_argument("--json", action="store_true", help="emit a JSON report")

    model = argparse.ArgumentParser(add_help=False)
    model.add_argument("--model", choices=("ds", "priority"), default="ds", help="probability model for rules")

    parser = _ArgumentParser(prog="evident", description="Belief and default reasoning over uncertain rules.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)
    sub.add_parser("check", parents=[common], help="parse and validate a knowledge base")
    p = sub.add_parser("bel", parents=[common, model], help="exact belief in a formula")
    p.add_argument("formula")
    p = sub.add_parser("mc-bel", parents=[common], help="Monte-Carlo estimate of belief")
    p.add_argument("formula")
    p.add_argument("--trials", type=int, default=McConfig.trials)
    p.add_argument("--seed", type=int, default=McConfig.seed)
    p.add_argument("--max-rejections", type=int, default=McConfig.max_rejections_per_trial)
    sub.add_parser("extensions", parents=[common], help="Reiter extensions of the defaults")
    sub.add_parser("m-extensions", parents=[common], help="M-extensions of the defaults")
    sub.add_parser(
        "b-extensions",
        parents=[common, model],
        help="B-extensions of the defaults, or of the rules when the KB has no defaults",
    )
    p = sub.add_parser("belstar", parents=[common, model], help="BEL_*, BEL^* and their average")
    p.add_argument("formula")
    return parser


def _query(text: str):
    try:
        f = parse_formula(text)
    except ParseError as e:
        raise ParseError(e.line, e.column, f"in query: {e.message}", e.snippet) from None
    check_unreserved(f)
    return f


def _extensions_report(entries: list[Extension], command: str, model: str) -> dict:
    return {
        "command": command,
        "model": model,
        "query": None,
        "extensions": [
            {"fired": sorted(e.fired), "base": [str(f) for f in e.theory.base]} for e in entries
        ],
    }


def _run(args: argparse.Namespace, kb: KnowledgeBase) -> dict:
    cmd = args.command
    if cmd == "check":
        return {
            "command": cmd,
            "atoms": len(kb.atoms),
            "m": len(kb.rules),
            "defaults": len(kb.default_rules),
            "facts": len(kb.facts),
            "facts_consistent": kb.facts_consistent(),
        }
    if cmd == "bel":
        d = _query(args.formula)
        value = bel_exact(kb.evidence_model(args.model), d)
        return {"command": cmd, "query": args.formula, "model": args.model, "value": value}
    if cmd == "mc-bel":
        d = _query(args.formula)
        try:
            cfg = McConfig(args.trials, args.seed, args.max_rejections)
        except ValueError as e:
            raise _UsageError(str(e)) from None
        est = bel_mc(kb.evidence_model("ds"), d, cfg)
        return {
            "command": cmd,
            "query": args.formula,
            "model": "ds",
            "estimate": est.estimate,
            "ci_low": est.ci_low,
            "ci_high": est.ci_high,
            "successes": est.successes,
            "trials": est.trials,
            "rejected_samples": est.rejected_samples,
            "seed": cfg.seed,
        }
    if cmd == "extensions":
        return _extensions_report(reiter_extension_entries(kb.default_theory()), cmd, "defaults")
    if cmd == "m-extensions":
        return _extensions_report(m_extension_entries(kb.default_theory()), cmd, "defaults")
    if cmd == "b-extensions":
        if kb.default_rules:
            return _extensions_report(b_extension_entries_defaults(kb.default_theory()), cmd, "defaults")
        return _extensions_report(b_extension_entries(kb.evidence_model(args.model)), cmd, args.model)
    if cmd == "belstar":
        d = _query(args.formula)
        r = bel_star(kb.combined_model(args.model), d)
        return {
            "command": cmd,
            "query": args.formula,
            "model": args.model,
            "lower": r.lower,
            "upper": r.upper,
            "average": r.average,
            "per_extension": list(r.per_extension),
        }
    raise AssertionError(cmd)


def _render(report: dict) -> str:
    cmd = report["command"]
    if cmd == "check":
        return (
            f"atoms: {report['atoms']}\nrules (m): {report['m']}\ndefaults: {report['defaults']}\n"
            f"facts: {report['facts']} ({'consistent' if report['facts_consistent'] else 'INCONSISTENT'})"
        )
    if cmd == "bel":
        return f"{report['value']:.9f}"
    if cmd == "mc-bel":
        return (
            f"{report['estimate']:.6f}  95% CI [{report['ci_low']:.6f}, {report['ci_high']:.6f}]  "
            f"({report['successes']}/{report['trials']} trials, {report['rejected_samples']} rejected, "
            f"seed {report['seed']})"
        )
    if cmd == "belstar":
        return (
            f"BEL_*   {report['lower']:.9f}\nBEL^*   {report['upper']:.9f}\n"
            f"BEL_avg {report['average']:.9f}  (unweighted mean over {len(report['per_extension'])} extensions)"
        )
    lines = [f"{len(report['extensions'])} extension(s)"]
    for n, e in enumerate(report["extensions"], 1):
        fired = "{" + ", ".join(map(str, e["fired"])) + "}"
        lines.append(f"E{n}: fired {fired}  base: " + "; ".join(e["base"]))
    return "\n".join(lines)


def run_cli(argv: Sequence[str] | None = None, stdout: TextIO | None = None, stderr: TextIO | None = None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except _UsageError as e:
        print(e, file=stderr)
        return EXIT_INPUT
    except SystemExit as e:  # --help
        return EXIT_OK if not e.code else EXIT_INPUT
    try:
        with open(args.kb, encoding="utf-8") as fh:
            text = fh.read()
    except (OSError, UnicodeDecodeError) as e:
        print(f"evident: cannot read {args.kb}: {e}", file=stderr)
        return EXIT_INPUT
    try:
        kb = parse_kb(text)
    except ParseError as e:
        print(f"{args.kb}:{e}", file=stderr)
        return EXIT_INPUT
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            report = _run(args, kb)
    except ParseError as e:
        print(f"<query>:{e}", file=stderr)
        return EXIT_INPUT
    except (ReservedAtomError, _UsageError, ValueError) as e:
        print(f"evident: {e}", file=stderr)
        return EXIT_INPUT
    except EvidentError as e:
        print(f"evident: {type(e).__name__}: {e}", file=stderr)
        return EXIT_REASONING
    for w in caught:
        print(f"warning: {w.message}", file=stderr)
    if args.json:
        print(json.dumps(report, sort_keys=True), file=stdout)
    else:
        print(_render(report), file=stdout)
    return EXIT_OK


def main() -> None:
    sys.exit(run_cli())
