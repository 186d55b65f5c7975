"""Command-line interface.

Exit codes: 0 success, 1 usage, 2 validation findings or domain errors,
3 I/O problems (missing/corrupt files), 4 internal faults.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .agreement import build_matrix, compute_report
from .canons import freeze, validate
from .dsl import compile_text
from .errors import (
    CorruptFileError,
    ValidationFailedError,
    VersionMismatchError,
    VistaxError,
)
from .model import Schema
from .simulate import ADHOC, GROUNDED, ExperimentConfig, run_experiment
from .storage import (
    RecordStore,
    export_dataset,
    load_schema,
    parse_config_file,
    save_schema,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_IO = 3
EXIT_INTERNAL = 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _load_any_schema(path: str) -> tuple[Schema, object]:
    """DSL sources compile (returning a source map for spans); schema files
    load with hash verification."""
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(path)
    if p.suffix == ".vts":
        lowered = compile_text(p.read_text(encoding="utf-8"))
        if not lowered.ok:
            raise ValidationFailedError(None, message="; ".join(
                d.render() for d in lowered.diagnostics if d.severity == "error"))
        return lowered.schema, lowered
    return load_schema(p), None


def _load_frozen_schema(path: str) -> Schema:
    schema, _ = _load_any_schema(path)
    return schema if schema.frozen else freeze(schema)


def _print_findings(report, lowered, source: str, out):
    for finding in report.findings:
        location = ""
        if lowered is not None:
            span = lowered.span_of(finding.locus)
            if span is not None:
                location = f"{source}:{span.line}:{span.column}: "
        print(f"{location}{finding.render()}", file=out)


def cmd_schema_check(args) -> int:
    path = Path(args.file)
    lowered = compile_text(path.read_text(encoding="utf-8"))
    for diagnostic in lowered.diagnostics:
        print(f"{args.file}:{diagnostic.render()}", file=sys.stderr)
    if not lowered.ok:
        errors = sum(1 for d in lowered.diagnostics if d.severity == "error")
        print(f"{errors} errors, 0 warnings")
        return EXIT_VALIDATION
    report = validate(lowered.schema)
    _print_findings(report, lowered, args.file, sys.stderr)
    print(f"{len(report.errors())} errors, {len(report.warnings())} warnings")
    return EXIT_OK if report.ok else EXIT_VALIDATION


def cmd_schema_freeze(args) -> int:
    schema, lowered = _load_any_schema(args.file)
    try:
        frozen = freeze(schema)
    except ValidationFailedError as exc:
        if exc.report is not None:
            _print_findings(exc.report, lowered, args.file, sys.stderr)
        print(f"freeze failed: {exc.message}", file=sys.stderr)
        return EXIT_VALIDATION
    save_schema(frozen, args.output)
    print(f"frozen {frozen.schema_id} -> {args.output} [{frozen.version_stamp[:16]}]")
    return EXIT_OK


def _parse_assertion(text: str) -> tuple[str, object]:
    if "=" not in text:
        raise UsageError(f"--assert expects prop=value, got {text!r}")
    prop, _, raw = text.partition("=")
    raw = raw.strip()
    try:
        value: object = int(raw)
    except ValueError:
        value = raw
    return prop.strip(), value


def cmd_classify(args) -> int:
    from .resolve import resolve

    schema = _load_frozen_schema(args.schema)
    assertions = dict(_parse_assertion(a) for a in args.assertions or [])
    result = resolve(schema, assertions)
    from .labels import canonical_label
    for node_id in result.path:
        node = schema.nodes[node_id]
        print(f"{canonical_label(schema, node_id)} [{node.concept_id}]")
    print(f"status: {result.status}")
    if result.status == "partial" and result.unsatisfied_frontier:
        print("unsatisfied frontier:")
        for child, constraints in result.unsatisfied_frontier.items():
            wanted = ", ".join(f"{c.property}={c.required_value}" for c in constraints)
            print(f"  {child}: {wanted}")
    return EXIT_OK


def cmd_agree(args) -> int:
    schema = _load_frozen_schema(args.schema) if args.schema else None
    records = []
    for path in args.records:
        store = RecordStore(path)
        records.extend(store.load(schema=schema))
    by_annotator: dict[str, list] = {}
    for record in records:
        by_annotator.setdefault(record.annotator_id, []).append(record)
    matrix = build_matrix([by_annotator[a] for a in sorted(by_annotator)])
    report = compute_report(matrix, schema=schema, hierarchical=args.hierarchical)
    if args.metric == "percent":
        print(f"percent agreement: {report.percent}")
    elif args.metric == "kappa":
        for (a, b), r in sorted(report.cohen.items()):
            shown = "undefined" if r.undefined else f"{r.value:.6f}"
            print(f"cohen kappa {a}/{b}: {shown}")
    elif args.metric == "fleiss":
        shown = "undefined" if report.fleiss is None or report.fleiss.undefined \
            else f"{report.fleiss.value:.6f}"
        print(f"fleiss kappa: {shown}")
    else:
        print(report.render())
    if args.out:
        import json
        Path(args.out).write_text(
            json.dumps(report.as_dict(), indent=2, sort_keys=True) + "\n",
            encoding="utf-8")
    return EXIT_OK


def cmd_simulate(args) -> int:
    values = parse_config_file(args.config)
    missing = {"schema", "items", "annotators", "epsilon", "seed"} - set(values)
    if missing:
        raise UsageError(f"config is missing keys: {sorted(missing)}")
    schema_path = str(Path(args.config).parent / values["schema"]) \
        if not Path(values["schema"]).is_absolute() else values["schema"]
    schema = _load_frozen_schema(schema_path)
    common = dict(items=int(values["items"]), annotators=int(values["annotators"]),
                  seed=int(values["seed"]), schema_ref=values["schema"],
                  pool_size=int(values.get("pool_size", "2")))
    bundle = run_experiment(
        schema,
        ExperimentConfig(condition=ADHOC, epsilon=0.0, **common),
        ExperimentConfig(condition=GROUNDED, epsilon=float(values["epsilon"]), **common),
    )
    print(bundle.render())
    out = args.out or values.get("out")
    if out:
        out_path = Path(out)
        if not out_path.is_absolute():
            out_path = Path(args.config).parent / out_path
        out_path.write_text(bundle.as_json(), encoding="utf-8")
        print(f"report written to {out_path}")
    return EXIT_OK


def cmd_export(args) -> int:
    schema = _load_frozen_schema(args.schema)
    store = RecordStore(args.records)
    records = store.load()
    export_dataset(records, schema, args.output, fmt=args.format)
    print(f"exported {len(records)} records -> {args.output}")
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .server import create_app

    schema_path = args.schema_flag or args.schema_pos
    store_path = args.store_flag or args.store_pos
    if not schema_path or not store_path:
        raise UsageError("serve needs a schema and a record store "
                         "(positional or --schema/--store)")
    schema = _load_frozen_schema(schema_path)
    app = create_app(schema, store_path=store_path, images_dir=args.images)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="vistax", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    schema_cmd = sub.add_parser("schema", help="author-side schema operations")
    schema_sub = schema_cmd.add_subparsers(dest="schema_command", required=True)
    check = schema_sub.add_parser("check", help="parse and validate a schema source")
    check.add_argument("file")
    check.set_defaults(func=cmd_schema_check)
    freeze_cmd = schema_sub.add_parser("freeze", help="validate, freeze and save")
    freeze_cmd.add_argument("file")
    freeze_cmd.add_argument("-o", "--output", required=True)
    freeze_cmd.set_defaults(func=cmd_schema_freeze)

    classify = sub.add_parser("classify", help="resolve assertions against a frozen schema")
    classify.add_argument("schema")
    classify.add_argument("--assert", dest="assertions", action="append",
                          metavar="PROP=VALUE")
    classify.set_defaults(func=cmd_classify)

    agree = sub.add_parser("agree", help="agreement metrics over record files")
    agree.add_argument("records", nargs="+")
    agree.add_argument("--schema")
    agree.add_argument("--metric", choices=["kappa", "percent", "fleiss", "all"],
                       default="all")
    agree.add_argument("--hierarchical", action="store_true")
    agree.add_argument("--out")
    agree.set_defaults(func=cmd_agree)

    simulate = sub.add_parser("simulate", help="run the two-condition experiment")
    simulate.add_argument("config")
    simulate.add_argument("--out")
    simulate.set_defaults(func=cmd_simulate)

    export = sub.add_parser("export", help="write a training manifest")
    export.add_argument("records")
    export.add_argument("schema")
    export.add_argument("-o", "--output", required=True)
    export.add_argument("--format", choices=["csv", "jsonl"], default="csv")
    export.set_defaults(func=cmd_export)

    serve = sub.add_parser("serve", help="start the annotation service")
    # schema and store work both as positionals and as flags
    serve.add_argument("schema_pos", nargs="?", metavar="schema")
    serve.add_argument("store_pos", nargs="?", metavar="store")
    serve.add_argument("--schema", dest="schema_flag")
    serve.add_argument("--store", dest="store_flag")
    serve.add_argument("--port", type=int, default=8750)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--images")
    serve.set_defaults(func=cmd_serve)
    return parser


def cli(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FileNotFoundError, IsADirectoryError, PermissionError,
            CorruptFileError, VersionMismatchError, OSError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except VistaxError as exc:
        print(f"error [{exc.code}]: {exc.message}", file=sys.stderr)
        return EXIT_VALIDATION
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL


def main() -> None:
    sys.exit(cli())


if __name__ == "__main__":
    main()
