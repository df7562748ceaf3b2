"""Command-line interface: build, evaluate, disambiguate, inspect.

Exit codes: 0 success, 1 failure (bad input, bad config, IO error),
2 usage error (from argument parsing), 3 abstention from `disambiguate`.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional

import numpy as np

from . import spacefile
from .composition import Composition
from .corpus import (
    PreprocessConfig,
    load_declared_senses,
    load_stoplist,
    read_corpus,
)
from .disambiguation import (
    MODE_CONSTRAINED,
    MODE_UNCONSTRAINED,
    STATUS_OK,
    Disambiguator,
    DisambiguationConfig,
)
from .embeddings import load_embeddings
from .errors import ConfigError, FormatError
from .evaluation import evaluate
from .knowledge import (
    EXPANSION_NONE,
    EXPANSION_RELATED,
    SenseInventory,
    build_concept_space,
    load_knowledge_base,
)
from .report import format_report, render_figures, write_report
from .spacefile import SpaceMeta

logger = logging.getLogger("sensevec")

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_ABSTAINED = 3

_DEFAULTS = {
    "window": 6,
    "def-compose": "sum",
    "concept-compose": "avg",
    "mode": MODE_CONSTRAINED,
    "expand-related": False,
    "workers": 1,
    "figures": True,
}
_PATH_KEYS = ("embeddings", "kb", "corpus", "senses", "stoplist", "space", "report")
_CONFIG_KEYS = set(_DEFAULTS) | set(_PATH_KEYS)


@dataclass(frozen=True)
class RunConfig:
    """Effective options after merging defaults, config file, and flags."""

    embeddings: Optional[Path] = None
    kb: Optional[Path] = None
    corpus: Optional[Path] = None
    senses: Optional[Path] = None
    stoplist: Optional[Path] = None
    space: Optional[Path] = None
    report: Optional[Path] = None
    window: int = 6
    def_compose: Composition = Composition.SUM
    concept_compose: Composition = Composition.AVERAGE
    mode: str = MODE_CONSTRAINED
    expand_related: bool = False
    workers: int = 1
    figures: bool = True

    @property
    def expansion(self) -> str:
        return EXPANSION_RELATED if self.expand_related else EXPANSION_NONE

    def disambiguation(self) -> DisambiguationConfig:
        return DisambiguationConfig(
            window_size=self.window,
            def_compose=self.def_compose,
            concept_compose=self.concept_compose,
            mode=self.mode,
            expansion=self.expansion,
        )

    def echo(self) -> dict[str, str]:
        """Effective configuration, echoed into reports for reproducibility."""
        def show(p):
            return str(p) if p is not None else "-"

        return {
            "window": str(self.window),
            "def-compose": self.def_compose.value,
            "concept-compose": self.concept_compose.value,
            "mode": self.mode,
            "expansion": self.expansion,
            "embeddings": show(self.embeddings),
            "kb": show(self.kb),
            "corpus": show(self.corpus),
            "senses": show(self.senses),
            "stoplist": show(self.stoplist),
            "space": show(self.space),
        }


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH",
                        help="JSON file of option values; flags override it")
    common.add_argument("--embeddings", metavar="PATH",
                        help="pretrained embeddings, word2vec text format")
    common.add_argument("--kb", metavar="PATH", help="knowledge-base file")
    common.add_argument("--stoplist", metavar="PATH",
                        help="stopword list, one token per line")
    common.add_argument("--space", metavar="PATH",
                        help="persisted concept-space file")
    common.add_argument("--window", type=int, metavar="W",
                        help="context tokens kept on each side of the term (default 6)")
    common.add_argument("--def-compose", choices=["sum", "avg", "mul"],
                        help="composition for definitions and context windows (default sum)")
    common.add_argument("--concept-compose", choices=["sum", "avg", "mul"],
                        help="composition across definitions and occurrences (default avg)")
    common.add_argument("--expand-related", action="store_true", default=None,
                        help="also use definitions of parent/child/sibling concepts")
    common.add_argument("--mode", choices=[MODE_CONSTRAINED, MODE_UNCONSTRAINED],
                        help="candidate set source (default constrained)")

    parser = argparse.ArgumentParser(
        prog="sensevec",
        description="Knowledge-based word sense disambiguation from composed "
                    "word embeddings.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_build = sub.add_parser(
        "build", parents=[common],
        help="vectorize a knowledge base and persist the concept space",
    )
    p_build.set_defaults(func=cmd_build)

    p_eval = sub.add_parser(
        "evaluate", parents=[common],
        help="disambiguate a corpus and score it against gold labels",
    )
    p_eval.add_argument("--corpus", metavar="PATH", help="instances with gold cuis")
    p_eval.add_argument("--senses", metavar="PATH",
                        help="declared senses per term (constrained mode)")
    p_eval.add_argument("--report", metavar="PATH",
                        help="write the machine-readable report here")
    p_eval.add_argument("--workers", type=int, metavar="N",
                        help="worker threads for instance processing (default 1)")
    p_eval.add_argument("--no-figures", action="store_const", const=False,
                        dest="figures", default=None,
                        help="skip rendering charts next to the report")
    p_eval.set_defaults(func=cmd_evaluate)

    p_dis = sub.add_parser(
        "disambiguate", parents=[common],
        help="disambiguate one term in one document and print the scores",
    )
    p_dis.add_argument("--senses", metavar="PATH",
                       help="declared senses per term (constrained mode)")
    p_dis.add_argument("--term", required=True, help="the ambiguous term")
    group = p_dis.add_mutually_exclusive_group(required=True)
    group.add_argument("--text", help="document text")
    group.add_argument("--text-file", metavar="PATH",
                       help="read document text from a file, '-' for stdin")
    p_dis.set_defaults(func=cmd_disambiguate)

    p_inspect = sub.add_parser(
        "inspect", parents=[common],
        help="dump a concept vector's build provenance",
    )
    p_inspect.add_argument("--cui", required=True, help="concept identifier")
    p_inspect.set_defaults(func=cmd_inspect)

    return parser


def resolve(args: argparse.Namespace) -> tuple[RunConfig, set[str]]:
    """Merge defaults, the optional config file, and explicit flags.

    Also returns the set of keys the user explicitly provided, so later
    consistency checks can tell a default apart from a choice.
    """
    merged: dict = dict(_DEFAULTS)
    for key in _PATH_KEYS:
        merged.setdefault(key, None)
    provided: set[str] = set()

    ns = vars(args)
    config_path = ns.get("config")
    if config_path is not None:
        merged_from_file = _load_config_file(config_path)
        for key, value in merged_from_file.items():
            merged[key] = value
            provided.add(key)

    for key in _CONFIG_KEYS:
        value = ns.get(key.replace("-", "_"))
        if value is not None:
            merged[key] = value
            provided.add(key)

    def path_or_none(key):
        value = merged[key]
        return Path(value) if value is not None else None

    try:
        cfg = RunConfig(
            embeddings=path_or_none("embeddings"),
            kb=path_or_none("kb"),
            corpus=path_or_none("corpus"),
            senses=path_or_none("senses"),
            stoplist=path_or_none("stoplist"),
            space=path_or_none("space"),
            report=path_or_none("report"),
            window=int(merged["window"]),
            def_compose=Composition.from_name(str(merged["def-compose"])),
            concept_compose=Composition.from_name(str(merged["concept-compose"])),
            mode=str(merged["mode"]),
            expand_related=bool(merged["expand-related"]),
            workers=int(merged["workers"]),
            figures=bool(merged["figures"]),
        )
        cfg.disambiguation()  # validates window/mode/expansion eagerly
    except ValueError as err:
        raise ConfigError(str(err)) from None
    if cfg.workers < 1:
        raise ConfigError("workers must be a positive integer")
    return cfg, provided


def _load_config_file(path) -> dict:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as err:
        raise ConfigError(f"{path}: invalid JSON: {err}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: config must be a JSON object")
    unknown = sorted(set(data) - _CONFIG_KEYS)
    if unknown:
        raise ConfigError(f"{path}: unknown config keys: {unknown}")
    return data


def _require(cfg: RunConfig, key: str, command: str) -> Path:
    value = getattr(cfg, key.replace("-", "_"))
    if value is None:
        raise ConfigError(f"'{command}' requires --{key}")
    return value


def _check_files_exist(*paths: Optional[Path]) -> None:
    for path in paths:
        if path is not None and not Path(path).is_file():
            raise ConfigError(f"no such file: {path}")


def _load_preprocess(cfg: RunConfig) -> PreprocessConfig:
    if cfg.stoplist is None:
        return PreprocessConfig()
    return PreprocessConfig(stoplist=load_stoplist(cfg.stoplist))


def _load_table(cfg: RunConfig, command: str):
    path = _require(cfg, "embeddings", command)
    _check_files_exist(path)
    started = time.perf_counter()
    table = load_embeddings(path)
    logger.info(
        "loaded %d embeddings of dimension %d in %.2fs",
        table.vocab_size, table.dimension, time.perf_counter() - started,
    )
    return table


def _adopt_space_meta(cfg: RunConfig, meta: SpaceMeta, provided: set[str]) -> RunConfig:
    """Fold a loaded space's build parameters into the effective config.

    Explicit flags that contradict the file are configuration errors; unset
    ones silently adopt the file's values so term vectors are composed the
    same way the concept vectors were.
    """
    checks = (
        ("def-compose", cfg.def_compose.value, meta.def_compose),
        ("concept-compose", cfg.concept_compose.value, meta.concept_compose),
        ("expand-related", cfg.expansion, meta.expansion),
    )
    for key, wanted, stored in checks:
        if key in provided and wanted != stored:
            raise ConfigError(
                f"--{key}={wanted} conflicts with the space file "
                f"(built with {stored}); rebuild or drop the flag"
            )
    return replace(
        cfg,
        def_compose=Composition.from_name(meta.def_compose),
        concept_compose=Composition.from_name(meta.concept_compose),
        expand_related=meta.expansion == EXPANSION_RELATED,
    )


def _assemble_engine(cfg: RunConfig, provided: set[str], command: str):
    """Load or build everything a disambiguation run needs."""
    need_kb = cfg.mode == MODE_UNCONSTRAINED or cfg.space is None
    if need_kb and cfg.kb is None:
        raise ConfigError(
            f"'{command}' needs --kb (for the sense inventory in unconstrained "
            f"mode, or to build the concept space when no --space is given)"
        )
    if cfg.mode == MODE_CONSTRAINED and cfg.senses is None:
        raise ConfigError("constrained mode requires --senses")
    _check_files_exist(cfg.kb if need_kb else None, cfg.senses, cfg.stoplist, cfg.space)

    preprocess = _load_preprocess(cfg)
    declared = (
        load_declared_senses(cfg.senses, preprocess) if cfg.senses is not None else None
    )
    table = _load_table(cfg, command)

    kb, inventory = (None, SenseInventory({}))
    if need_kb:
        kb, inventory = load_knowledge_base(cfg.kb, preprocess)

    if cfg.space is not None:
        space, meta = spacefile.load(cfg.space)
        if meta.dimension != table.dimension:
            raise ConfigError(
                f"space dimension {meta.dimension} does not match embedding "
                f"dimension {table.dimension}"
            )
        fingerprint = table.fingerprint()
        if meta.embedding_fingerprint != fingerprint:
            raise ConfigError(
                "space file was built from different embeddings "
                f"(fingerprint {meta.embedding_fingerprint[:12]}… vs {fingerprint[:12]}…)"
            )
        cfg = _adopt_space_meta(cfg, meta, provided)
        logger.info("loaded concept space with %d vectors from %s", len(space), cfg.space)
    else:
        started = time.perf_counter()
        space = build_concept_space(
            kb, table, cfg.def_compose, cfg.concept_compose, cfg.expansion, preprocess
        )
        logger.info(
            "built concept space with %d vectors in %.2fs",
            len(space), time.perf_counter() - started,
        )

    engine = Disambiguator(
        space, table, inventory, cfg.disambiguation(), preprocess, declared
    )
    return cfg, engine


def cmd_build(cfg: RunConfig, provided: set[str], args) -> int:
    out_path = _require(cfg, "space", "build")
    kb_path = _require(cfg, "kb", "build")
    _check_files_exist(kb_path, cfg.stoplist)
    preprocess = _load_preprocess(cfg)
    table = _load_table(cfg, "build")
    kb, _ = load_knowledge_base(kb_path, preprocess)

    started = time.perf_counter()
    space = build_concept_space(
        kb, table, cfg.def_compose, cfg.concept_compose, cfg.expansion, preprocess
    )
    logger.info("built concept space in %.2fs", time.perf_counter() - started)

    meta = SpaceMeta(
        table.dimension,
        cfg.def_compose.value,
        cfg.concept_compose.value,
        cfg.expansion,
        table.fingerprint(),
    )
    spacefile.save(out_path, space, meta)

    excluded = sorted(set(kb) - set(space))
    used = sum(cv.tokens_used for cv in space.values())
    skipped = sum(cv.tokens_skipped for cv in space.values())
    oov_rate = skipped / (used + skipped) if used + skipped else 0.0
    print(f"concepts vectorized  {len(space)}")
    print(f"concepts excluded    {len(excluded)}"
          + (f"  ({', '.join(excluded[:20])})" if excluded else ""))
    print(f"definition tokens    {used} used, {skipped} out-of-vocabulary "
          f"(oov rate {oov_rate:.4f})")
    print(f"space written to     {out_path}")
    return EXIT_OK


def cmd_evaluate(cfg: RunConfig, provided: set[str], args) -> int:
    corpus_path = _require(cfg, "corpus", "evaluate")
    # every referenced input must exist before any pipeline work starts
    _check_files_exist(
        corpus_path, cfg.embeddings, cfg.kb, cfg.senses, cfg.stoplist, cfg.space
    )
    instances = read_corpus(corpus_path)
    if not instances:
        raise ConfigError(f"corpus {corpus_path} holds no instances")
    gold = {inst.instance_id: inst.gold_cui for inst in instances}

    cfg, engine = _assemble_engine(cfg, provided, "evaluate")

    started = time.perf_counter()
    predictions = engine.disambiguate_all(instances, cfg.workers)
    elapsed = time.perf_counter() - started
    logger.info(
        "vectorize-and-disambiguate: %d instances in %.2fs (%.0f/s)",
        len(instances), elapsed, len(instances) / elapsed if elapsed else float("inf"),
    )

    result = evaluate(predictions, gold)
    if cfg.report is not None:
        write_report(cfg.report, result, cfg.echo())
        logger.info("report written to %s", cfg.report)
        if cfg.figures:
            for figure in render_figures(result, cfg.report):
                logger.info("figure written to %s", figure)
    print(format_report(result))
    return EXIT_OK


def cmd_disambiguate(cfg: RunConfig, provided: set[str], args) -> int:
    if args.text is not None:
        text = args.text
    elif args.text_file == "-":
        text = sys.stdin.read()
    else:
        _check_files_exist(Path(args.text_file))
        text = Path(args.text_file).read_text(encoding="utf-8")

    cfg, engine = _assemble_engine(cfg, provided, "disambiguate")
    prediction = engine.disambiguate_text(text, args.term)

    print(f"term       {args.term}")
    print(f"status     {prediction.status}")
    if prediction.status == STATUS_OK:
        print(f"predicted  {prediction.predicted_cui}")
    else:
        print(f"reason     {prediction.abstain_reason}")
    if prediction.scores:
        print()
        print("candidate  distance")
        ranked = sorted(
            prediction.scores.items(),
            key=lambda kv: (kv[1] is None, kv[1] if kv[1] is not None else 0.0, kv[0]),
        )
        width = max(len("candidate"), max(len(c) for c in prediction.scores))
        for cui, distance in ranked:
            shown = f"{distance:.6f}" if distance is not None else "n/a"
            print(f"{cui:<{width}}  {shown}")
    return EXIT_OK if prediction.status == STATUS_OK else EXIT_ABSTAINED


def cmd_inspect(cfg: RunConfig, provided: set[str], args) -> int:
    kb = None
    if cfg.space is not None:
        _check_files_exist(cfg.space)
        space, meta = spacefile.load(cfg.space)
    else:
        kb_path = _require(cfg, "kb", "inspect")
        _check_files_exist(kb_path, cfg.stoplist)
        preprocess = _load_preprocess(cfg)
        table = _load_table(cfg, "inspect")
        kb, _ = load_knowledge_base(kb_path, preprocess)
        space = build_concept_space(
            kb, table, cfg.def_compose, cfg.concept_compose, cfg.expansion, preprocess
        )

    cv = space.get(args.cui)
    if cv is None:
        if kb is not None and args.cui in kb:
            print(f"error: {args.cui} was excluded: no usable definitions",
                  file=sys.stderr)
        else:
            print(f"error: no concept vector for {args.cui}", file=sys.stderr)
        return EXIT_FAILURE

    print(f"cui               {cv.cui}")
    print(f"dimension         {cv.vector.shape[0]}")
    print(f"definitions-used  {cv.definitions_used}")
    print(f"tokens-used       {cv.tokens_used}")
    print(f"tokens-skipped    {cv.tokens_skipped}")
    print(f"l2-norm           {float(np.linalg.norm(cv.vector)):.6g}")
    print(f"vector            {' '.join(f'{v:.6g}' for v in cv.vector)}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO, format="%(levelname)s %(message)s", stream=sys.stderr
    )
    try:
        cfg, provided = resolve(args)
        return args.func(cfg, provided, args)
    except (FormatError, ConfigError, OSError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
