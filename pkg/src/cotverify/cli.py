"""Command-line surface: score, evaluate, sweep, and gate subcommands.

Every command is deterministic for a given (config, input, backend): repeated
runs produce byte-identical output regardless of the parallelism degree.
Exit codes are a stable contract: 0 success, 2 input error, 3 backend
failure, 4 configuration error.

Configuration precedence per flag: command-line flag, then environment
variable (COTVERIFY_ENDPOINT for --endpoint), then --config file entry.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from typing import Sequence

from .backends import BackendError, HttpBackend, MockBackend, ScriptedBackend
from .evaluation import (
    evaluate,
    gate_for_edit,
    render_summary_table,
    summaries_to_json,
    sweep_rows_to_csv,
    sweep_thresholds,
)
from .records import ParseError, ValidationError, load_records
from .scoring import ALL_VARIANTS, Variant, score_instance

ENDPOINT_ENV = "COTVERIFY_ENDPOINT"

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_BACKEND = 3
EXIT_CONFIG = 4


class ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); config errors are exit 4
        raise ConfigError(message)


@dataclass
class RunConfig:
    command: str
    input: str
    output: str | None
    variant: str
    backend: str
    scripted_table: str | None
    endpoint: str | None
    ads_threshold: float | None
    pds_threshold: float | None
    batch_size: int
    jobs: int
    lenient: bool
    thresholds: list[float] | None


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--input", required=True, help="record file, one instance per line")
    parser.add_argument("--output", default=None, help="output path; stdout when omitted")
    parser.add_argument(
        "--variant",
        default="pds",
        choices=[v.value.replace("_", "-") for v in ALL_VARIANTS] + ["all"],
        help="decision-score variant",
    )
    parser.add_argument("--backend", default="mock", choices=["mock", "scripted", "http"])
    parser.add_argument("--scripted-table", default=None, help="fixture table for the scripted backend")
    parser.add_argument("--endpoint", default=None, help="base URL of the scoring service")
    parser.add_argument("--ads-threshold", type=float, default=None)
    parser.add_argument("--pds-threshold", type=float, default=None)
    parser.add_argument("--batch-size", type=int, default=64)
    parser.add_argument("--jobs", type=int, default=1, help="parallel scoring degree")
    parser.add_argument("--lenient", action="store_true", help="ignore unknown record fields")
    parser.add_argument("--config", default=None, help="JSON config file (lowest precedence)")


def _build_parser() -> _Parser:
    parser = _Parser(prog="cotverify", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, doc in (
        ("score", "write one score report line per instance"),
        ("evaluate", "aggregate metrics for one or all variants"),
        ("sweep", "precision/recall rows over a threshold grid"),
        ("gate", "select low-score instances for re-editing"),
    ):
        p = sub.add_parser(name, help=doc)
        _add_common_flags(p)
        if name == "sweep":
            p.add_argument(
                "--thresholds",
                required=True,
                help="comma-separated threshold grid, e.g. 2.5,3.5,4.5 "
                "(use --thresholds=-0.5,0,0.5 when values are negative)",
            )
    return parser


def _resolve_config(args: argparse.Namespace) -> RunConfig:
    file_cfg: dict = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                file_cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as err:
            raise ConfigError(f"cannot read config file {args.config}: {err}") from err
        if not isinstance(file_cfg, dict):
            raise ConfigError("config file must hold a JSON object")

    endpoint = args.endpoint or os.environ.get(ENDPOINT_ENV) or file_cfg.get("endpoint")
    scripted_table = args.scripted_table or file_cfg.get("scripted_table")

    thresholds = None
    if getattr(args, "thresholds", None) is not None:
        try:
            thresholds = [float(t) for t in args.thresholds.split(",") if t.strip()]
        except ValueError as err:
            raise ConfigError(f"bad --thresholds value: {err}") from err
        if not thresholds:
            raise ConfigError("--thresholds needs at least one value")

    cfg = RunConfig(
        command=args.command,
        input=args.input,
        output=args.output,
        variant=args.variant.replace("-", "_"),
        backend=args.backend,
        scripted_table=scripted_table,
        endpoint=endpoint,
        ads_threshold=args.ads_threshold,
        pds_threshold=args.pds_threshold,
        batch_size=args.batch_size,
        jobs=args.jobs,
        lenient=args.lenient,
        thresholds=thresholds,
    )
    if cfg.backend == "scripted" and not cfg.scripted_table:
        raise ConfigError("the scripted backend needs --scripted-table")
    if cfg.backend == "http" and not cfg.endpoint:
        raise ConfigError(f"the http backend needs --endpoint or {ENDPOINT_ENV}")
    if cfg.jobs < 1:
        raise ConfigError("--jobs must be >= 1")
    if cfg.variant == "all" and cfg.command in ("sweep", "gate"):
        raise ConfigError(f"{cfg.command} needs a single variant, not 'all'")
    return cfg


def _make_backend(cfg: RunConfig):
    if cfg.backend == "mock":
        return MockBackend()
    if cfg.backend == "scripted":
        try:
            return ScriptedBackend.from_json_file(cfg.scripted_table)
        except (OSError, json.JSONDecodeError, KeyError) as err:
            raise ConfigError(f"cannot load scripted table {cfg.scripted_table}: {err}") from err
    return HttpBackend(cfg.endpoint, batch_size=cfg.batch_size)


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _score_reports(cfg: RunConfig, instances, backend, variant, *, all_variants=False):
    if cfg.jobs <= 1 or len(instances) <= 1:
        return [score_instance(i, backend, variant, all_variants=all_variants) for i in instances]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
        return list(
            pool.map(lambda i: score_instance(i, backend, variant, all_variants=all_variants), instances)
        )


def cmd_score(cfg: RunConfig) -> int:
    instances = load_records(cfg.input, lenient=cfg.lenient)
    backend = _make_backend(cfg)
    all_variants = cfg.variant == "all"
    variant = Variant.PDS if all_variants else Variant(cfg.variant)
    reports = _score_reports(cfg, instances, backend, variant, all_variants=all_variants)
    lines = []
    for report in reports:
        lines.append(
            json.dumps(
                {
                    "id": report.instance_id,
                    "n": report.n,
                    "ads": report.ads,
                    "ads_norm": report.ads_norm,
                    "pss": report.pss,
                    "pds": report.pds,
                    "decision_score": report.decision_score,
                    "method": report.method.value,
                    "variant_scores": report.variant_scores,
                    "degenerate": report.degenerate,
                },
                ensure_ascii=False,
            )
        )
    _emit(cfg, "".join(line + "\n" for line in lines))
    return EXIT_OK


def cmd_evaluate(cfg: RunConfig) -> int:
    instances = load_records(cfg.input, lenient=cfg.lenient)
    backend = _make_backend(cfg)
    variants = list(ALL_VARIANTS) if cfg.variant == "all" else [Variant(cfg.variant)]
    summaries = [
        evaluate(
            instances,
            backend,
            variant,
            ads_threshold=cfg.ads_threshold,
            pds_threshold=cfg.pds_threshold,
            jobs=cfg.jobs,
        )
        for variant in variants
    ]
    table = render_summary_table(summaries)
    sys.stdout.write(table + "\n")
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8") as fh:
            fh.write(summaries_to_json(summaries))
            fh.write("\n")
    return EXIT_OK


def cmd_sweep(cfg: RunConfig) -> int:
    instances = load_records(cfg.input, lenient=cfg.lenient)
    backend = _make_backend(cfg)
    rows = sweep_thresholds(instances, backend, Variant(cfg.variant), cfg.thresholds, jobs=cfg.jobs)
    _emit(cfg, sweep_rows_to_csv(rows))
    return EXIT_OK


def cmd_gate(cfg: RunConfig) -> int:
    instances = load_records(cfg.input, lenient=cfg.lenient)
    backend = _make_backend(cfg)
    decisions = gate_for_edit(
        instances,
        backend,
        Variant(cfg.variant),
        ads_threshold=cfg.ads_threshold,
        pds_threshold=cfg.pds_threshold,
        jobs=cfg.jobs,
    )
    lines = [
        json.dumps(
            {"id": d.instance_id, "score": d.score, "selected_for_edit": d.selected_for_edit},
            ensure_ascii=False,
        )
        for d in decisions
    ]
    _emit(cfg, "".join(line + "\n" for line in lines))
    return EXIT_OK


_COMMANDS = {
    "score": cmd_score,
    "evaluate": cmd_evaluate,
    "sweep": cmd_sweep,
    "gate": cmd_gate,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = _resolve_config(args)
        return _COMMANDS[cfg.command](cfg)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except (ParseError, ValidationError) as err:
        print(f"input error: {err}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as err:
        print(f"input error: {err}", file=sys.stderr)
        return EXIT_INPUT
    except BackendError as err:
        print(f"backend error: {err}", file=sys.stderr)
        return EXIT_BACKEND


if __name__ == "__main__":
    raise SystemExit(main())
