"""Command line interface: run / report / accept / schema."""

import argparse
import json
import os
import sys

from . import acceptance, harness
from .errors import ConfigError, MissingManifest, ParseError, UnipotentLabError


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="unipotent-lab",
        description="Numerical laboratory for unipotent flows on "
                    "SL2(R) x SL2(R) lattice quotients")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment from a JSON config")
    p_run.add_argument("config", help="path to config.json")
    p_run.add_argument("--out", default=None, help="output directory")
    p_run.add_argument("--threads", type=int, default=1)

    p_rep = sub.add_parser("report", help="merge run summaries into report.json")
    p_rep.add_argument("run_dir")

    p_acc = sub.add_parser("accept", help="run the full acceptance matrix")
    p_acc.add_argument("--out", default="runs/acceptance")
    p_acc.add_argument("--threads", type=int, default=1)

    p_sch = sub.add_parser("schema", help="write the CSV column schema")
    p_sch.add_argument("--out", default="SCHEMA.md")

    args = parser.parse_args(argv)

    if args.command == "run":
        try:
            with open(args.config) as f:
                config = harness.ExperimentConfig.from_json(f.read())
            out = harness.run_experiment(config, args.out, threads=args.threads)
        except ConfigError as exc:
            print(json.dumps({"error": "invalid config",
                              "violations": exc.violations}, indent=2))
            return 2
        except UnipotentLabError as exc:
            print(json.dumps({"error": type(exc).__name__, "message": str(exc)}))
            return 1
        print(f"wrote {out}/results.csv, summary.json, manifest.json")
        return 0

    if args.command == "report":
        try:
            report = harness.emit_report(args.run_dir)
        except (MissingManifest, ParseError) as exc:
            print(json.dumps({"error": type(exc).__name__, "message": str(exc)}))
            return 1
        ok = all(v for v in report["pass_matrix"].values() if v is not None)
        print(json.dumps(report["pass_matrix"], indent=2, sort_keys=True))
        return 0 if ok and report["pass_matrix"] else 1

    if args.command == "accept":
        results = acceptance.run_all(threads=args.threads)
        matrix = {}
        for r in results:
            limit = acceptance.TIME_LIMITS[r.cid]
            status = "PASS" if r.passed else "FAIL"
            print(f"[{status}] criterion {r.cid}: {r.name} "
                  f"({r.seconds:.1f}s / limit {limit}s)")
            matrix[f"criterion_{r.cid}"] = {
                "name": r.name, "passed": r.passed, "seconds": r.seconds,
                "time_limit_s": limit, "details": _jsonable(r.details)}
        harness._atomic_write(os.path.join(args.out, "report.json"),
                              json.dumps({"acceptance": matrix}, indent=2,
                                         sort_keys=True, default=str))
        return 0 if all(r.passed for r in results) else 1

    if args.command == "schema":
        harness._atomic_write(args.out, harness.schema_markdown())
        print(f"wrote {args.out}")
        return 0

    return 2  # pragma: no cover


def _jsonable(obj):
    try:
        json.dumps(obj)
        return obj
    except TypeError:
        return str(obj)


if __name__ == "__main__":
    sys.exit(main())
