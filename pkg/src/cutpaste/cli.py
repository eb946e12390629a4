"""Command-line front end.

Subcommands: ``validate``, ``stats``, ``extract``, ``synth``, ``eval``.
Every option can also come from a JSON config file (``--config``) whose
keys are RunConfig field names; explicit command-line flags win over the
file, the file wins over defaults.

Exit codes are distinct per failure class:

    0  success
    1  validation failure (corpus, bank, plan or prediction content)
    2  usage error (unknown flags, bad flag combinations, bad config)
    3  a referenced input path does not exist
    4  output could not be written
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields, replace
from typing import List, Optional

from ._version import generator_version
from .baselines import instance_switch, naive_cut_paste
from .compositor import DEFAULT_PAGE_H, DEFAULT_PAGE_W, SynthPage, render, write_dataset
from .corpus import (
    CorpusError,
    canonical_json,
    corpus_stats,
    extract_components,
    format_stats_table,
    load_bank,
    load_corpus,
    load_manifest,
    save_bank,
    validate_corpus,
)
from .layout import (
    DEFAULT_DOWNSCALE_FACTOR,
    DEFAULT_DOWNSCALE_RETRIES,
    DEFAULT_MARGIN_FRAC,
    DEFAULT_MAX_FIT,
    DEFAULT_PLACE_ATTEMPTS,
    LayoutError,
    LayoutParams,
    plan_page,
)
from .metrics import PredictionError, evaluate, format_report_table, load_predictions
from .seeds import page_stream

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_USAGE = 2
EXIT_MISSING_INPUT = 3
EXIT_WRITE = 4

METHODS = ("context", "naive", "switch")


@dataclass
class RunConfig:
    """Everything one invocation needs; the JSON config mirrors this."""

    command: str = ""
    dataset: Optional[str] = None      # corpus dir (validate/stats/extract/eval/switch)
    manifest: Optional[str] = None     # component manifest (extract)
    bank: Optional[str] = None         # component bank dir (synth context/naive)
    predictions: Optional[str] = None  # prediction JSON (eval)
    out: Optional[str] = None          # output dir, or report path for eval
    method: Optional[str] = None       # context | naive | switch
    count: int = 0
    seed: int = 0
    page_width: int = DEFAULT_PAGE_W
    page_height: int = DEFAULT_PAGE_H
    margin_frac: float = DEFAULT_MARGIN_FRAC
    max_fit: float = DEFAULT_MAX_FIT
    place_attempts: int = DEFAULT_PLACE_ATTEMPTS
    downscale_factor: float = DEFAULT_DOWNSCALE_FACTOR
    downscale_retries: int = DEFAULT_DOWNSCALE_RETRIES
    workers: int = 1
    pixel_miou: bool = False

    def layout_params(self) -> LayoutParams:
        return LayoutParams(
            margin_frac=self.margin_frac,
            max_fit=self.max_fit,
            place_attempts=self.place_attempts,
            downscale_factor=self.downscale_factor,
            downscale_retries=self.downscale_retries,
        )


def synthesize(config: RunConfig) -> List[SynthPage]:
    """Generate ``config.count`` pages with the configured method.

    Page ``i`` draws only from the stream keyed by (seed, i), so a longer
    run under the same seed extends a shorter one instead of reshuffling
    it.  The switch method consumes one stream per output pair.
    """
    if config.count < 0:
        raise ValueError("count must be >= 0")
    if config.method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}")

    if config.method == "switch":
        source = load_corpus(config.dataset)
        out: List[SynthPage] = []
        for pair in range((config.count + 1) // 2):
            rng = page_stream(config.seed, pair)
            first, second = instance_switch(rng, source, seed=config.seed)
            out.extend((first, second))
        return out[:config.count]

    bank = load_bank(config.bank)
    params = config.layout_params()

    def build(index: int) -> SynthPage:
        rng = page_stream(config.seed, index)
        if config.method == "context":
            plan = plan_page(rng, config.page_width, config.page_height, bank, params)
            return render(plan, bank, seed=config.seed)
        return naive_cut_paste(rng, bank, config.page_width, config.page_height,
                               seed=config.seed)

    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            # map() yields in submission order, so worker scheduling cannot
            # perturb the dataset
            return list(pool.map(build, range(config.count)))
    return [build(i) for i in range(config.count)]


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _require(path: Optional[str], what: str) -> str:
    if not path:
        raise ValueError(f"--{what} is required")
    if not os.path.exists(path):
        raise FileNotFoundError(f"{what} not found: {path}")
    return path


def _cmd_validate(config: RunConfig) -> int:
    _require(config.dataset, "dataset")
    diags = validate_corpus(config.dataset)
    for d in diags:
        print(d, file=sys.stderr)
    if diags:
        print(f"{len(diags)} problem(s) found", file=sys.stderr)
        return EXIT_VALIDATION
    print("ok")
    return EXIT_OK


def _cmd_stats(config: RunConfig) -> int:
    _require(config.dataset, "dataset")
    pages = load_corpus(config.dataset)
    print(format_stats_table(corpus_stats(pages)))
    return EXIT_OK


def _cmd_extract(config: RunConfig) -> int:
    _require(config.dataset, "dataset")
    _require(config.manifest, "manifest")
    if not config.out:
        raise ValueError("--out is required")
    pages = load_corpus(config.dataset)
    manifest = load_manifest(config.manifest)
    bank = extract_components(pages, manifest)
    save_bank(bank, config.out)
    print(f"extracted {len(bank.patches)} patches -> {config.out}")
    return EXIT_OK


def _cmd_synth(config: RunConfig) -> int:
    if config.method not in METHODS:
        raise ValueError(f"--method is required and must be one of {METHODS}")
    if config.count < 0:
        raise ValueError("--count must be >= 0")
    if not config.out:
        raise ValueError("--out is required")
    if config.method == "switch":
        _require(config.dataset, "dataset")
    else:
        _require(config.bank, "bank")
    pages = synthesize(config)
    write_dataset(pages, config.out, seed=config.seed, method=config.method)
    print(f"wrote {len(pages)} pages -> {config.out}")
    return EXIT_OK


def _cmd_eval(config: RunConfig) -> int:
    _require(config.dataset, "dataset")
    _require(config.predictions, "predictions")
    pages = load_corpus(config.dataset)
    preds = load_predictions(config.predictions, pages)
    report = evaluate(preds, pages, pixel_level_miou=config.pixel_miou)
    print(format_report_table(report))
    doc = canonical_json(report.to_dict())
    if config.out:
        with open(config.out, "w", encoding="utf-8") as fh:
            fh.write(doc)
    else:
        print(doc, end="")
    return EXIT_OK


_COMMANDS = {
    "validate": _cmd_validate,
    "stats": _cmd_stats,
    "extract": _cmd_extract,
    "synth": _cmd_synth,
    "eval": _cmd_eval,
}


def run(config: RunConfig) -> int:
    """Execute one configured command; returns the process exit code."""
    handler = _COMMANDS.get(config.command)
    if handler is None:
        print(f"unknown command {config.command!r}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return handler(config)
    except FileNotFoundError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_MISSING_INPUT
    except json.JSONDecodeError as exc:
        print(f"invalid JSON input: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (CorpusError, PredictionError, LayoutError) as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_VALIDATION
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"write failure: {exc}", file=sys.stderr)
        return EXIT_WRITE


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cutpaste",
        description="Synthesize and score annotated instruction-page datasets.",
    )
    parser.add_argument("--version", action="version", version=generator_version())

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="JSON",
                        help="config file with RunConfig fields; flags override it")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common],
                       help="check a dataset directory against the format rules")
    p.add_argument("--dataset", help="dataset directory")

    p = sub.add_parser("stats", parents=[common],
                       help="per-category instance and image counts")
    p.add_argument("--dataset", help="dataset directory")

    p = sub.add_parser("extract", parents=[common],
                       help="cut manifest crops into a component bank")
    p.add_argument("--dataset", help="dataset directory")
    p.add_argument("--manifest", help="component manifest JSON")
    p.add_argument("--out", help="bank output directory")

    p = sub.add_parser("synth", parents=[common],
                       help="generate an annotated synthetic dataset")
    p.add_argument("--method", choices=METHODS)
    p.add_argument("--count", type=int, help="number of pages")
    p.add_argument("--seed", type=int)
    p.add_argument("--bank", help="component bank directory (context, naive)")
    p.add_argument("--dataset", help="source dataset directory (switch)")
    p.add_argument("--out", help="dataset output directory")
    p.add_argument("--page-width", dest="page_width", type=int)
    p.add_argument("--page-height", dest="page_height", type=int)
    p.add_argument("--margin-frac", dest="margin_frac", type=float)
    p.add_argument("--max-fit", dest="max_fit", type=float)
    p.add_argument("--place-attempts", dest="place_attempts", type=int)
    p.add_argument("--downscale-factor", dest="downscale_factor", type=float)
    p.add_argument("--downscale-retries", dest="downscale_retries", type=int)
    p.add_argument("--workers", type=int, help="thread pool size (default 1)")

    p = sub.add_parser("eval", parents=[common],
                       help="score a prediction file against a dataset")
    p.add_argument("--dataset", help="ground-truth dataset directory")
    p.add_argument("--predictions", help="prediction JSON file")
    p.add_argument("--out", help="write the report JSON here instead of stdout")
    p.add_argument("--pixel-miou", dest="pixel_miou", action="store_const", const=True,
                   help="pixel-level mIoU instead of instance-level")

    return parser


def _merge_config(args: argparse.Namespace) -> RunConfig:
    known = {f.name for f in fields(RunConfig)}
    merged = {}
    config_path = getattr(args, "config", None)
    if config_path:
        if not os.path.exists(config_path):
            raise FileNotFoundError(f"config not found: {config_path}")
        with open(config_path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        if not isinstance(doc, dict):
            raise ValueError("config file must hold a JSON object")
        for key in doc:
            if key not in known:
                raise ValueError(f"config file: unknown field {key!r}")
        merged.update(doc)
    for key, value in vars(args).items():
        if key in known and key != "command" and value is not None:
            merged[key] = value
    merged["command"] = args.command
    return replace(RunConfig(), **merged)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _merge_config(args)
    except FileNotFoundError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_MISSING_INPUT
    except (ValueError, json.JSONDecodeError) as exc:
        parser.error(str(exc))  # exits with the usage code
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
