"""Command-line entry point: ``termenrich {acquire,graph,bootstrap,scan,validate}``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Sequence

from . import __version__
from .acquisition import (RNG_ALGORITHM, AcquisitionLink, SizeTooLarge, bootstrap_experiment,
                          run_closure)
from .conceptnet import (GraphFormatError, apply_conflation, build_coord_classes, build_spec_graph,
                         classes_to_dot, classes_to_json, read_conflation, spec_graph_to_dot,
                         spec_graph_to_json)
from .corpus import CorpusError, find_present_terms, iter_patterns, load_corpus, scan
from .metagrammar import ALL_FAMILIES, Family, GrammarError, load_metagrammar, parse_families
from .terms import TermError, load_terms

logger = logging.getLogger("termenrich")

EXIT_OK = 0
EXIT_DATA = 1
EXIT_IO = 2

DATA_ERRORS = (TermError, GrammarError, CorpusError, GraphFormatError, SizeTooLarge, ValueError)


@dataclass
class RunConfig:
    terms: Path | None = None
    corpus: Path | None = None
    grammar: Path | None = None
    conflate: Path | None = None
    links: Path | None = None
    out: Path = Path("out")
    families: frozenset[Family] = ALL_FAMILIES
    min_content_words: int = 0
    split_head_coord: bool = False
    rng_seed: int = 0
    sizes: list[int] = field(default_factory=list)
    trials: int = 1
    workers: int = 1

    def check(self) -> None:
        if not self.families:
            raise ValueError("--families must name at least one family")
        if any(s < 1 for s in self.sizes):
            raise ValueError("--sizes must be positive")
        if self.trials < 1:
            raise ValueError("--trials must be at least 1")
        if self.workers < 1:
            raise ValueError("--workers must be at least 1")

    def prepare_out(self) -> None:
        self.out.mkdir(parents=True, exist_ok=True)
        if not os.access(self.out, os.W_OK):
            raise PermissionError(f"output directory {self.out} is not writable")


def demo_path(name: str) -> Path:
    return Path(str(resources.files("termenrich").joinpath("demo", name)))


def _write(path: Path, text: str) -> None:
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _jsonl(records) -> str:
    return "".join(json.dumps(r, ensure_ascii=False, sort_keys=True) + "\n" for r in records)


def _require(path: Path | None, flag: str) -> Path:
    if path is None:
        raise ValueError(f"{flag} is required")
    if not path.exists():
        raise FileNotFoundError(f"no such file: {path}")
    return path


def _inputs(cfg: RunConfig):
    terms = load_terms(_require(cfg.terms, "--terms"))
    corpus = load_corpus(_require(cfg.corpus, "--corpus"))
    rules = load_metagrammar(cfg.grammar)
    if not terms:
        raise ValueError(f"{cfg.terms} contains no usable terms")
    return terms, corpus, rules


def cmd_acquire(cfg: RunConfig) -> int:
    terms, corpus, rules = _inputs(cfg)
    cfg.prepare_out()
    present = find_present_terms(corpus, terms, rules, cfg.workers)
    result = run_closure(corpus, rules, terms, cfg.families, cfg.min_content_words, cfg.workers)
    by_candidate: dict = {}
    for link in result.links:
        by_candidate.setdefault(link.candidate, []).append(link)
    records = []
    for term in result.candidates:
        status = result.statuses[term]
        records.append({
            "term": term.text,
            "cycle": status.cycle,
            "status": status.kind.value,
            "links": [
                {"source": l.source.text, "family": l.family.value, "rule": l.rule,
                 "sentence": l.sentence_id, "start": l.start, "end": l.end}
                for l in by_candidate.get(term, [])
            ],
        })
    _write(cfg.out / "candidates.jsonl", _jsonl(records))
    _write(cfg.out / "links.jsonl", _jsonl(l.to_dict() for l in result.links))
    summary = {
        "version": __version__,
        "seed_count": len(terms),
        "present_term_count": len(present),
        "candidate_count": len(records),
        "link_count": len(result.links),
        "cycles_run": result.cycles_run,
        "per_cycle_counts": result.per_cycle_counts,
        "families": sorted(f.value for f in cfg.families),
        "rule_count": len(rules),
        "min_content_words": cfg.min_content_words,
    }
    _write(cfg.out / "summary.json", json.dumps(summary, indent=2, sort_keys=True) + "\n")
    logger.info("acquired %d candidates in %d cycles", len(records), result.cycles_run)
    return EXIT_OK


def read_links(path: Path) -> list[AcquisitionLink]:
    links = []
    with path.open(encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            if not raw.strip():
                continue
            try:
                links.append(AcquisitionLink.from_dict(json.loads(raw)))
            except (KeyError, TypeError, ValueError) as exc:
                raise GraphFormatError(f"{path}:{line_no}: bad link record: {exc}") from exc
    return links


def cmd_graph(cfg: RunConfig) -> int:
    links_path = cfg.links if cfg.links is not None else cfg.out / "links.jsonl"
    links = read_links(_require(links_path, "--links"))
    cfg.prepare_out()
    universe = {t.text for l in links for t in (l.source, l.candidate)}
    classes = build_coord_classes(links, universe, cfg.split_head_coord)
    if cfg.conflate is not None:
        classes = apply_conflation(classes, read_conflation(_require(cfg.conflate, "--conflate")))
    graph = build_spec_graph(links, classes)
    _write(cfg.out / "coord_classes.json", classes_to_json(classes, links))
    _write(cfg.out / "coord_classes.dot", classes_to_dot(classes, links))
    _write(cfg.out / "spec_graph.json", spec_graph_to_json(graph))
    _write(cfg.out / "spec_graph.dot", spec_graph_to_dot(graph))
    logger.info("%d coordination classes, %d specialization edges", len(classes), len(graph.edges))
    return EXIT_OK


def cmd_bootstrap(cfg: RunConfig) -> int:
    terms, corpus, rules = _inputs(cfg)
    sizes = cfg.sizes or [len(terms)]
    rows = bootstrap_experiment(corpus, rules, terms, sizes, cfg.trials, cfg.rng_seed,
                                cfg.families, cfg.min_content_words, cfg.workers)
    cfg.prepare_out()
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["size", "trial", "acquired"])
    for row in rows:
        writer.writerow([row.size, row.trial, row.acquired])
    _write(cfg.out / "bootstrap.csv", buf.getvalue())
    meta = {
        "rng": RNG_ALGORITHM,
        "rng_seed": cfg.rng_seed,
        "sizes": list(dict.fromkeys(sizes)),
        "trials": cfg.trials,
        "seed_count": len(terms),
        "families": sorted(f.value for f in cfg.families),
        "version": __version__,
    }
    _write(cfg.out / "bootstrap.json", json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_scan(cfg: RunConfig) -> int:
    terms, corpus, rules = _inputs(cfg)
    patterns = list(iter_patterns(terms, rules, include_base=True))
    records = ({
        "source": m.pattern.source.text,
        "rule": m.pattern.meta_rule,
        "sentence": m.sentence_id,
        "start": m.start,
        "end": m.end,
        "text": m.text,
    } for m in scan(corpus, patterns, cfg.workers))
    sys.stdout.write(_jsonl(records))
    return EXIT_OK


def cmd_validate(cfg: RunConfig) -> int:
    report = {}
    if cfg.grammar is not None or cfg.terms is None and cfg.corpus is None:
        report["rules"] = len(load_metagrammar(cfg.grammar))
    if cfg.terms is not None:
        report["terms"] = len(load_terms(_require(cfg.terms, "--terms")))
    if cfg.corpus is not None:
        corpus = load_corpus(_require(cfg.corpus, "--corpus"))
        report["sentences"] = corpus.sentence_count
        report["tokens"] = corpus.token_count
    if cfg.links is not None:
        report["links"] = len(read_links(_require(cfg.links, "--links")))
    sys.stdout.write(json.dumps(report, sort_keys=True) + "\n")
    return EXIT_OK


COMMANDS = {
    "acquire": cmd_acquire,
    "graph": cmd_graph,
    "bootstrap": cmd_bootstrap,
    "scan": cmd_scan,
    "validate": cmd_validate,
}


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _families(text: str) -> frozenset[Family]:
    try:
        return parse_families(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--terms", type=Path, help="reference term list")
    common.add_argument("--corpus", type=Path, help="lemmatized corpus (.gz accepted)")
    common.add_argument("--grammar", type=Path, help="meta-grammar file (default: bundled)")
    common.add_argument("--conflate", type=Path, help="term pairs to merge before graphing")
    common.add_argument("--links", type=Path, help="links.jsonl (default: OUT/links.jsonl)")
    common.add_argument("--out", type=Path, default=Path("out"), help="output directory")
    common.add_argument("--demo", action="store_true", help="use the bundled demo terms and corpus")
    common.add_argument("--families", type=_families, default=ALL_FAMILIES,
                        help="comma-separated subset of coor,ins,perm")
    common.add_argument("--min-content-words", type=int, default=0)
    common.add_argument("--split-head-coord", action="store_true",
                        help="leave head coordinations out of the coordination classes")
    common.add_argument("--rng-seed", type=int, default=0)
    common.add_argument("--sizes", type=_int_list, default=[])
    common.add_argument("--trials", type=int, default=1)
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="termenrich", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("acquire", parents=[common], help="run acquisition to a fixed point")
    sub.add_parser("graph", parents=[common], help="build coordination classes and spec graph")
    sub.add_parser("bootstrap", parents=[common], help="acquisition volume vs. seed-set size")
    sub.add_parser("scan", parents=[common], help="print raw variant matches as JSON lines")
    sub.add_parser("validate", parents=[common], help="check input file formats")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    terms, corpus = args.terms, args.corpus
    if args.demo:
        terms = terms or demo_path("terms.txt")
        corpus = corpus or demo_path("corpus.txt")
    return RunConfig(
        terms=terms, corpus=corpus, grammar=args.grammar, conflate=args.conflate,
        links=args.links, out=args.out, families=args.families,
        min_content_words=args.min_content_words, split_head_coord=args.split_head_coord,
        rng_seed=args.rng_seed, sizes=args.sizes, trials=args.trials, workers=args.workers,
    )


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        cfg = config_from_args(args)
        cfg.check()
        return COMMANDS[args.command](cfg)
    except OSError as exc:
        print(f"termenrich: {exc}", file=sys.stderr)
        return EXIT_IO
    except DATA_ERRORS as exc:
        print(f"termenrich: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
