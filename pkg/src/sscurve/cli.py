"""Batch verification CLI.

    sscurve verify [check ... | all]     run named checks (default: all)
    sscurve list                         print the check catalog
    sscurve report                       run everything, emit JSON

Flags select the working precisions (--padic-precision, --a1-truncation,
--series-order) and the output format.  Exit code 0 means every assertable
check passed, 1 means some failed, 2 is a usage error; recorded-outcome
checks never fail a run.  Reports are deterministic byte for byte.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .checks import CHECKS, CHECKS_BY_NAME, Config, run_checks

REPORT_SCHEMA = {
    "type": "object",
    "required": ["version", "config", "checks"],
    "properties": {
        "version": {"type": "string"},
        "config": {
            "type": "object",
            "required": ["k", "m", "N"],
            "properties": {"k": {"type": "integer"},
                           "m": {"type": "integer"},
                           "N": {"type": "integer"}},
        },
        "checks": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "anchor", "status", "details"],
                "properties": {
                    "name": {"type": "string"},
                    "anchor": {"type": "string", "minLength": 1},
                    "status": {"enum": ["pass", "fail", "recorded-outcome"]},
                },
            },
        },
    },
}


def build_report(names, config, parallel=True):
    results = run_checks(names, config, parallel=parallel)
    return {
        "version": __version__,
        "config": {"k": config.k, "m": config.m, "N": config.order},
        "checks": [r.to_json() for r in results],
    }


def report_to_text(report):
    lines = []
    width = max(len(c["name"]) for c in report["checks"])
    for c in report["checks"]:
        status = {"pass": "PASS", "fail": "FAIL",
                  "recorded-outcome": "RECORDED"}[c["status"]]
        lines.append("%-8s %-*s  %s" % (status, width, c["name"], c["anchor"]))
    counts = {}
    for c in report["checks"]:
        counts[c["status"]] = counts.get(c["status"], 0) + 1
    lines.append("")
    lines.append("config k=%d m=%d N=%d; %d pass, %d fail, %d recorded"
                 % (report["config"]["k"], report["config"]["m"],
                    report["config"]["N"], counts.get("pass", 0),
                    counts.get("fail", 0), counts.get("recorded-outcome", 0)))
    return "\n".join(lines)


def report_to_json(report):
    return json.dumps(report, indent=2, sort_keys=False)


def exit_code(report):
    return 1 if any(c["status"] == "fail" for c in report["checks"]) else 0


def _parser():
    parser = argparse.ArgumentParser(
        prog="sscurve",
        description="Exact verification checks for the supersingular curve at p = 2, "
                    "its level-3 structures, and its formal-group deformations.")
    parser.add_argument("--padic-precision", type=int, default=3, metavar="K",
                        help="work modulo 2^K (default 3)")
    parser.add_argument("--a1-truncation", type=int, default=6, metavar="M",
                        help="truncate the deformation parameter at a1^M (default 6)")
    parser.add_argument("--series-order", type=int, default=9, metavar="N",
                        help="truncate power series at total degree N (default 9)")
    parser.add_argument("--format", choices=["text", "json"], default="text")
    parser.add_argument("--parallel", choices=["on", "off"], default="on")
    sub = parser.add_subparsers(dest="command")
    verify = sub.add_parser("verify", help="run named checks (or all)")
    verify.add_argument("checks", nargs="*", default=["all"])
    sub.add_parser("list", help="print the check catalog")
    report = sub.add_parser("report", help="run every check and emit a report")
    report.add_argument("--format", choices=["text", "json"], default="json",
                        dest="report_format")
    return parser


def main(argv=None):
    parser = _parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help()
        return 2

    if args.command == "list":
        width = max(len(c.name) for c in CHECKS)
        for c in CHECKS:
            kind = "recorded" if c.recorded else "check"
            print("%-*s  [%s]  %s" % (width, c.name, kind, c.anchor))
        return 0

    config = Config(k=args.padic_precision, m=args.a1_truncation,
                    order=args.series_order)
    parallel = args.parallel == "on"

    if args.command == "verify":
        names = args.checks or ["all"]
        if names == ["all"]:
            names = [c.name for c in CHECKS]
        unknown = sorted(set(names) - set(CHECKS_BY_NAME))
        if unknown:
            print("unknown check name(s): %s" % ", ".join(unknown), file=sys.stderr)
            print("run `sscurve list` for the catalog", file=sys.stderr)
            return 2
        report = build_report(names, config, parallel=parallel)
        fmt = args.format
    else:  # report
        names = [c.name for c in CHECKS]
        report = build_report(names, config, parallel=parallel)
        fmt = args.report_format

    if fmt == "json":
        print(report_to_json(report))
    else:
        print(report_to_text(report))
    return exit_code(report)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
