"""Command-line interface.

``rationales run`` executes the full pipeline; the stage subcommands run one
stage each against the persisted artifacts of the previous ones, and compose
to the same outputs as ``run``.  Exit codes: 0 success, 1 invalid
configuration, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from .pipeline import (
    STAGES,
    ConfigError,
    PipelineConfig,
    PipelineError,
    run,
    run_gen_pairs,
    run_stage,
)

logger = logging.getLogger(__name__)

_STAGE_COMMANDS = list(STAGES) + ["align-cache"]


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="TOML or JSON config file")
    parser.add_argument("--corpus", help="review corpus JSONL")
    parser.add_argument("--summaries", help="summary-sentence JSONL")
    parser.add_argument("--outdir", help="output directory")
    parser.add_argument("--scorer", choices=["lexical", "remote"])
    parser.add_argument(
        "--endpoint",
        default=os.environ.get("RATIONALES_SCORER_URL"),
        help="remote scorer base URL (env: RATIONALES_SCORER_URL)",
    )
    parser.add_argument("--min-reviews", type=int, dest="min_reviews")
    parser.add_argument("--max-reviews", type=int, dest="max_reviews")
    parser.add_argument(
        "--use-clauses",
        action=argparse.BooleanOptionalAction,
        dest="use_clauses",
        default=None,
    )
    parser.add_argument("--l-max", type=int, dest="l_max")
    parser.add_argument("--l-min", type=int, dest="l_min")
    parser.add_argument("--beta", type=float)
    parser.add_argument("--min-set-size", type=int, dest="min_set_size")
    parser.add_argument("--k", type=int)
    parser.add_argument("--eta", type=int)
    parser.add_argument("--theta", type=int)
    parser.add_argument("--temperature", type=float)
    parser.add_argument("--w-div", type=float, dest="w_div")
    parser.add_argument("--word-limit", type=int, dest="word_limit")
    parser.add_argument(
        "--format", choices=["text", "json", "both"], dest="summary_format"
    )
    parser.add_argument("--embedder", choices=["hash", "remote"])
    parser.add_argument("--seed", type=int)


def _config_from_args(args: argparse.Namespace) -> PipelineConfig:
    overrides = {
        key: getattr(args, key, None)
        for key in PipelineConfig.__dataclass_fields__
    }
    if args.config:
        cfg = PipelineConfig.from_file(args.config, overrides)
    else:
        cfg = PipelineConfig(
            **{k: v for k, v in overrides.items() if v is not None}
        )
    cfg.validate()
    return cfg


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rationales",
        description="Extractive rationale-based opinion summarization",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_parser = sub.add_parser("run", help="execute the full pipeline")
    _add_config_flags(run_parser)

    for stage in _STAGE_COMMANDS:
        stage_parser = sub.add_parser(stage, help=f"run the {stage} stage")
        _add_config_flags(stage_parser)
        if stage == "evaluate":
            stage_parser.add_argument(
                "--pred", help="pipeline output directory to evaluate"
            )

    pairs_parser = sub.add_parser(
        "gen-pairs", help="generate alignment fine-tuning pairs"
    )
    pairs_parser.add_argument("--corpus", required=True)
    pairs_parser.add_argument("--out", required=True)
    pairs_parser.add_argument("--per-label", type=int, default=1, dest="per_label")
    pairs_parser.add_argument("--seed", type=int, default=0)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            run(_config_from_args(args))
        elif args.command == "gen-pairs":
            report = run_gen_pairs(
                args.corpus, args.out, per_label=args.per_label, seed=args.seed
            )
            print(json.dumps(report, indent=2, sort_keys=True))
        else:
            if args.command == "evaluate" and getattr(args, "pred", None):
                args.outdir = args.pred
            cfg = _config_from_args(args)
            run_stage(cfg, args.command)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except PipelineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
