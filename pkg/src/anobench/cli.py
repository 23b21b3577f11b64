"""Command-line entry point: ingest, run, audit, report, export-split.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 detector
failure.  Failures print a single machine-readable JSON object to stderr.
Every run logs its effective seeds, and the resolved configuration is echoed
beside the outputs for reproducibility.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import audits, config, engine, rng, splits
from .errors import ConfigError, DataError, DetectorError
from .report import render_report

log = logging.getLogger("anobench")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_DETECTOR = 4


def build_parser() -> argparse.ArgumentParser:
    verbosity = argparse.ArgumentParser(add_help=False)
    verbosity.add_argument("-v", "--verbose", action="count", default=0)
    verbosity.add_argument("-q", "--quiet", action="store_true")

    parser = argparse.ArgumentParser(
        prog="anobench",
        description="Benchmark harness for unsupervised anomaly detection on tabular data",
        parents=[verbosity],
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="configuration file")
        p.add_argument("--out", default="results", help="output directory")
        p.add_argument("--data-dir", default=None, help="base directory for raw data")
        p.add_argument(
            "--set", action="append", default=[], metavar="SECTION.KEY=VALUE",
            dest="overrides", help="override a config value (repeatable)",
        )

    common(sub.add_parser("ingest", parents=[verbosity],
                          help="load a dataset and write its binary cache"))
    common(sub.add_parser("run", parents=[verbosity],
                          help="run configured experiments and render reports"))
    audit_p = sub.add_parser("audit", parents=[verbosity],
                             help="run an evaluation-bias audit")
    common(audit_p)
    audit_p.add_argument(
        "--kind",
        choices=("split-bias", "class-swap", "ratio-manipulation"),
        required=True,
    )
    common(sub.add_parser("export-split", parents=[verbosity],
                          help="export train/test index lists"))
    report_p = sub.add_parser("report", parents=[verbosity],
                              help="re-render reports from stored runs")
    report_p.add_argument("--results", required=True, help="results directory")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING if args.quiet else (
        logging.DEBUG if args.verbose > 0 else logging.INFO
    )
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "ingest":
            return _cmd_ingest(args)
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "audit":
            return _cmd_audit(args)
        if args.command == "export-split":
            return _cmd_export_split(args)
        if args.command == "report":
            return _cmd_report(args)
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, exc)
    except DataError as exc:
        return _fail(EXIT_DATA, exc)
    except DetectorError as exc:
        return _fail(EXIT_DETECTOR, exc)


def _fail(code: int, exc: Exception) -> int:
    payload = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    print(json.dumps(payload), file=sys.stderr)
    return code


def _prepare(args):
    parser = config.read_config(args.config)
    config.apply_overrides(parser, args.overrides)
    data_dir = config.resolve_data_dir(args.data_dir)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return parser, data_dir, out


def _echo_config(parser, out: Path, name="resolved-config.cfg"):
    (out / name).write_text(config.render_resolved(parser), encoding="utf-8")


def _cmd_ingest(args) -> int:
    from .data import save_cache

    parser, data_dir, out = _prepare(args)
    dataset_cfg = config.parse_dataset_config(parser, origin=args.config)
    dataset = dataset_cfg.load(data_dir)
    bin_path, meta_path = save_cache(dataset, out)
    _echo_config(parser, out, f"{dataset.name}.resolved-config.cfg")
    log.info(
        "ingested %s: N=%d D=%d rho=%.4f dropped_rows=%d",
        dataset.name, dataset.n_samples, dataset.n_features,
        dataset.anomaly_ratio, dataset.n_dropped_rows,
    )
    print(json.dumps({
        "dataset": dataset.name,
        "n_samples": dataset.n_samples,
        "n_features": dataset.n_features,
        "anomaly_ratio": dataset.anomaly_ratio,
        "n_dropped_rows": dataset.n_dropped_rows,
        "cache": [str(bin_path), str(meta_path)],
    }))
    return EXIT_OK


def _load_experiments(args):
    parser, data_dir, out = _prepare(args)
    experiments = config.parse_experiment_configs(parser, origin=args.config)
    return parser, data_dir, out, experiments


def _cmd_run(args) -> int:
    parser, data_dir, out, experiments = _load_experiments(args)
    _echo_config(parser, out)
    aggregates = []
    datasets = {}
    for exp in experiments:
        if exp.dataset_ref not in datasets:
            datasets[exp.dataset_ref] = exp.load_dataset(data_dir)
        dataset = datasets[exp.dataset_ref]
        log.info(
            "experiment %s: dataset=%s detector=%s runs=%d seed=%d",
            exp.spec.name, dataset.name, exp.spec.detector,
            exp.spec.n_runs, exp.spec.split.seed,
        )
        aggregate = engine.run_experiment(dataset, exp.spec)
        for run, seed in enumerate(aggregate.seeds):
            log.info("  run %d: detector seed %d", run, seed)
        engine.write_run_reports(aggregate, out)
        aggregates.append(aggregate)
    render_report(aggregates, out)
    for aggregate in aggregates:
        print(json.dumps(aggregate.summary()))
    return EXIT_OK


def _cmd_export_split(args) -> int:
    parser, data_dir, out, experiments = _load_experiments(args)
    _echo_config(parser, out)
    for exp in experiments:
        dataset = exp.load_dataset(data_dir)
        directory = out / "splits" / dataset.name / exp.spec.name
        for run in range(exp.spec.n_runs):
            result, run_spec = engine.split_for_run(dataset, exp.spec, run)
            train_path, test_path = splits.export_split(result, directory, run)
            log.info(
                "exported %s run %d (seed %d): %s %s",
                exp.spec.name, run, run_spec.seed, train_path, test_path,
            )
        print(json.dumps({
            "experiment": exp.spec.name,
            "dataset": dataset.name,
            "runs": exp.spec.n_runs,
            "directory": str(directory),
        }))
    return EXIT_OK


def _cmd_audit(args) -> int:
    parser, data_dir, out, experiments = _load_experiments(args)
    _echo_config(parser, out)
    for exp in experiments:
        dataset = exp.load_dataset(data_dir)
        spec = exp.spec
        if spec.is_external:
            raise ConfigError("audits need a native detector, not score files")
        seed = spec.split.seed
        if args.kind == "split-bias":
            rows = audits.audit_split_bias(
                dataset, spec.detector, spec.detector_params, seed=seed
            )
        elif args.kind == "class-swap":
            rows = audits.audit_class_swap(
                dataset, spec.detector, spec.detector_params, seed=seed,
                threshold_policy=spec.threshold_policy,
            )
        else:
            result, _ = engine.split_for_run(dataset, spec, 0)
            detector = engine.build_detector(spec.detector, spec.detector_params)
            detector.fit(
                dataset.features[result.train_indices],
                seed=rng.derive_seed(seed, rng.LANE_DETECTOR, 0),
            )
            raw = detector.score(dataset.features[result.test_indices])
            scoreset = engine.ScoreSet(
                raw, dataset.labels[result.test_indices], detector_name=spec.detector
            )
            rows = audits.audit_ratio_manipulation(scoreset, seed=seed)
        path = out / f"audit-{args.kind}-{spec.name}.csv"
        _write_rows(path, rows)
        log.info("audit %s for %s -> %s", args.kind, spec.name, path)
        print(json.dumps({"experiment": spec.name, "kind": args.kind,
                          "rows": rows, "file": str(path)}))
    return EXIT_OK


def _write_rows(path: Path, rows: list[dict]) -> None:
    keys = []
    for row in rows:
        for key in row:
            if key not in keys:
                keys.append(key)
    lines = [",".join(keys)]
    for row in rows:
        lines.append(",".join(_cell(row.get(k)) for k in keys))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.10g}"
    return str(value)


def _cmd_report(args) -> int:
    results = Path(args.results)
    if not results.exists():
        raise DataError(f"results directory not found: {results}")
    aggregates = []
    for dataset_dir in sorted(p for p in results.iterdir() if p.is_dir()):
        for detector_dir in sorted(p for p in dataset_dir.iterdir() if p.is_dir()):
            if detector_dir.name in ("plots", "splits"):
                continue
            if not any(detector_dir.glob("run-*.json")):
                continue
            payloads = engine.read_run_reports(
                results, dataset_dir.name, detector_dir.name
            )
            aggregates.append(_aggregate_from_payloads(
                dataset_dir.name, detector_dir.name, payloads
            ))
    if not aggregates:
        raise DataError(f"no stored runs under {results}")
    render_report(aggregates, results)
    print(json.dumps({"datasets": sorted({a.dataset for a in aggregates}),
                      "reports": len(aggregates)}))
    return EXIT_OK


def _aggregate_from_payloads(dataset, detector, payloads) -> engine.RunAggregate:
    from .metrics import MetricsReport, Threshold

    reports = []
    for p in payloads:
        reports.append(MetricsReport(
            precision=p["precision"], recall=p["recall"], f1=p["f1"],
            threshold=Threshold(
                value=p["threshold"], policy=p["threshold_policy"],
                percentile_level=p.get("percentile_level"),
            ),
            positive_class=p["positive_class"],
            confusion=(p["tp"], p["fp"], p["tn"], p["fn"]),
            auroc=p.get("auroc"), aupr=p.get("aupr"),
        ))
    return engine.RunAggregate(
        experiment=payloads[0].get("experiment", f"{dataset}-{detector}"),
        detector=detector, dataset=dataset, reports=reports,
        split_results=[], seeds=[p.get("seed", 0) for p in payloads],
    )
