"""Command-line front door: reports, null simulations, and the service.

Three subcommands:

* ``compute`` reads a taxonomy and study file and writes an agreement
  report (CSV, JSON, or markdown).
* ``simulate`` runs the Monte-Carlo null model and writes a histogram CSV
  plus a summary JSON (or prints the summary when no output is given).
* ``serve`` hosts the annotation service over a study directory.

Exit codes: 0 success, 1 validation or runtime failure, 2 usage error.
Failures never leave a partial output file behind.  The
``CONSENSUS_KIT_THREADS`` environment variable caps simulation
parallelism (0 or unset means one worker per CPU).
"""

from __future__ import annotations

import argparse
import json
import socket
import sys

from . import nullsim
from .metrics import SimilarityKind
from .studyio import (
    REPORT_COLUMNS,
    _atomic_write_text,
    _format_from_path,
    build_report,
    load_dataset,
    load_taxonomy,
    save_report,
)

__all__ = ["main", "build_parser"]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="consensus-kit",
        description="Agreement rates for descriptor-annotated elicitation studies.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    compute = sub.add_parser(
        "compute", help="build an agreement report from a study file"
    )
    compute.add_argument("--dataset", required=True, metavar="PATH", help="study JSON file")
    compute.add_argument(
        "--taxonomy", required=True, metavar="PATH", help="descriptor taxonomy JSON file"
    )
    compute.add_argument("--mode", choices=("hard", "soft", "both"), default="both")
    compute.add_argument(
        "--similarity", choices=tuple(k.value for k in SimilarityKind), default="jaccard"
    )
    compute.add_argument("--out", required=True, metavar="PATH", help="report file to write")
    compute.add_argument(
        "--format",
        choices=("csv", "json", "markdown"),
        default=None,
        help="report format (default: inferred from the --out suffix)",
    )
    compute.set_defaults(func=cmd_compute)

    simulate = sub.add_parser(
        "simulate", help="estimate the null distribution of the soft agreement rate"
    )
    simulate.add_argument("-S", "--subjects", type=int, required=True)
    simulate.add_argument("-d", "--dims", type=int, required=True)
    simulate.add_argument(
        "-p", "--prob", type=float, required=True,
        help="Bernoulli probability of each descriptor being present",
    )
    simulate.add_argument("--iters", type=int, default=1_000_000)
    simulate.add_argument("--bins", type=int, default=100)
    simulate.add_argument("--seed", type=int, default=0)
    simulate.add_argument(
        "--cdf-at", type=float, action="append", default=[], metavar="T",
        help="report the CDF at this threshold (repeatable)",
    )
    simulate.add_argument(
        "--out", metavar="BASE",
        help="write BASE.csv (histogram) and BASE.json (summary); "
        "without it the summary JSON goes to standard output",
    )
    simulate.add_argument(
        "--quiet", action="store_true", help="suppress progress output"
    )
    simulate.set_defaults(func=cmd_simulate)

    serve = sub.add_parser("serve", help="run the annotation-capture service")
    serve.add_argument(
        "--data-dir", required=True, metavar="DIR",
        help="directory with taxonomy.json and study.json",
    )
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument(
        "--ui-dir", default=None, metavar="DIR",
        help="serve this directory (the built browser UI) at /",
    )
    serve.set_defaults(func=cmd_serve)
    return parser


def cmd_compute(args: argparse.Namespace) -> int:
    format = _format_from_path(args.out, args.format)
    taxonomy = load_taxonomy(args.taxonomy)
    dataset = load_dataset(args.dataset, taxonomy)
    report = build_report(dataset, SimilarityKind(args.similarity), mode=args.mode)
    save_report(report, args.out, format)
    for warning in report.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    parts = [f"{len(report.rows)} referents"]
    for column in REPORT_COLUMNS:
        if column in report.summary:
            parts.append(f"mean {column} {report.summary[column].mean:.4f}")
    print(f"wrote {args.out}: " + "; ".join(parts))
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    params = nullsim.NullModelParams(
        subjects=args.subjects,
        dims=args.dims,
        p_one=args.prob,
        iterations=args.iters,
        bins=args.bins,
        seed=args.seed,
    )

    last_decade = [0]

    def progress(done: int, total: int) -> None:
        decade = done * 10 // total
        if decade > last_decade[0]:
            last_decade[0] = decade
            print(f"simulate: {decade * 10}% ({done}/{total})", file=sys.stderr)

    dist = nullsim.simulate(params, progress=None if args.quiet else progress)
    summary_text = json.dumps(nullsim.summarize(dist, cdf_at=args.cdf_at), indent=2) + "\n"
    if args.out:
        _atomic_write_text(args.out + ".csv", nullsim.histogram_csv(dist))
        _atomic_write_text(args.out + ".json", summary_text)
        print(f"wrote {args.out}.csv and {args.out}.json")
    else:
        sys.stdout.write(summary_text)
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import AnnotationStore, create_app

    # fail fast with a clear message instead of a uvicorn traceback
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        probe.bind((args.host, args.port))
    except OSError as exc:
        raise RuntimeError(f"cannot bind {args.host}:{args.port}: {exc}") from None
    finally:
        probe.close()

    store = AnnotationStore(args.data_dir)
    app = create_app(store, ui_dir=args.ui_dir)
    # uvicorn owns the interrupt: SIGINT drains requests, triggers the
    # app's shutdown hook (which compacts the store), then returns
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except KeyboardInterrupt:
        print("interrupted", file=sys.stderr)
        return 130
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
