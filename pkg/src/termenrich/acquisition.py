"""Candidate extraction from variants, the incremental closure loop and the
bootstrap-size experiment."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Collection, Iterable, Sequence

import numpy as np

from .corpus import Corpus, VariantMatch, iter_patterns, scan
from .metagrammar import ALL_FAMILIES, Family, MetaRule, SlotKind, select_families
from .terms import (CONTENT_CLASSES, MAX_TERM_LENGTH, MIN_TERM_LENGTH, Term, TermKind,
                    TermStatus, WordClass)

logger = logging.getLogger(__name__)

RNG_ALGORITHM = "numpy-PCG64/SeedSequence(rng_seed,spawn_key=(size,trial))"


class SizeTooLarge(ValueError):
    pass


def extract_candidate(match: VariantMatch, min_content_words: int = 0) -> Term | None:
    """Apply the rule's extraction template to ``match``.

    Returns None when the variant is unproductive: a free word in the
    extracted span is not a content word, the head is not nominal, the
    candidate is the source term itself, or it has fewer than
    ``min_content_words`` content words.
    """
    rule = match.pattern.rule
    if rule is None:
        return None
    words: list[tuple[str, WordClass]] = []
    for ref in rule.extraction:
        slot = rule.pattern[ref]
        for tok in match.bound_tokens(ref):
            if slot.kind is SlotKind.WILD and tok.word_class not in CONTENT_CLASSES:
                return None
            words.append((tok.lemma, tok.word_class))
    if not MIN_TERM_LENGTH <= len(words) <= MAX_TERM_LENGTH:
        return None
    head, head_class = words[-1]
    if head_class is WordClass.OTHER:
        head_class = WordClass.NOUN
    if head_class is not WordClass.NOUN:
        return None
    words[-1] = (head, head_class)
    if sum(c in CONTENT_CLASSES for _, c in words) < min_content_words:
        return None
    candidate = Term.from_words(words)
    if candidate == match.pattern.source:
        return None
    return candidate


@dataclass(frozen=True)
class AcquisitionLink:
    """``candidate`` was extracted from a variant of ``source``."""

    source: Term
    candidate: Term
    family: Family
    rule: str
    sentence_id: int
    start: int
    end: int
    cycle: int

    def __post_init__(self) -> None:
        if self.source == self.candidate:
            raise ValueError("a link needs distinct source and candidate")
        if self.cycle < 1:
            raise ValueError("link cycles start at 1")

    @property
    def is_head_coordination(self) -> bool:
        """Coordination whose heads differ, e.g. "surgical exploration and closure"."""
        return self.family is Family.COORDINATION and self.source.head != self.candidate.head

    def sort_key(self) -> tuple:
        return (self.cycle, self.candidate.text, self.source.text, self.sentence_id,
                self.start, self.end, self.rule)

    def to_dict(self) -> dict:
        return {
            "source": self.source.text,
            "candidate": self.candidate.text,
            "family": self.family.value,
            "rule": self.rule,
            "sentence": self.sentence_id,
            "start": self.start,
            "end": self.end,
            "cycle": self.cycle,
        }

    @classmethod
    def from_dict(cls, data: dict) -> AcquisitionLink:
        return cls(
            source=Term.from_text(data["source"]),
            candidate=Term.from_text(data["candidate"]),
            family=Family.parse(data["family"]),
            rule=str(data["rule"]),
            sentence_id=int(data["sentence"]),
            start=int(data["start"]),
            end=int(data["end"]),
            cycle=int(data["cycle"]),
        )


def run_cycle(corpus: Corpus, rules: Sequence[MetaRule], active: Collection[Term],
              known: Collection[Term], cycle: int = 1, min_content_words: int = 0,
              workers: int = 1) -> tuple[set[Term], list[AcquisitionLink]]:
    """Scan variants of the ``active`` terms only.

    Links are kept for every productive extraction, including those whose
    candidate is already known.
    """
    patterns = list(iter_patterns(sorted(active, key=lambda t: t.text), rules))
    if not patterns:
        return set(), []
    new: dict[Term, Term] = {}
    links: list[AcquisitionLink] = []
    for match in scan(corpus, patterns, workers):
        cand = extract_candidate(match, min_content_words)
        if cand is None:
            continue
        rule = match.pattern.rule
        links.append(AcquisitionLink(match.pattern.source, cand, rule.family, rule.name,
                                     match.sentence_id, match.start, match.end, cycle))
        if cand not in known:
            new.setdefault(cand, cand)
    return set(new), links


@dataclass
class AcquisitionResult:
    statuses: dict[Term, TermStatus]
    links: list[AcquisitionLink]
    cycles_run: int
    per_cycle_counts: list[int] = field(default_factory=list)

    @property
    def candidates(self) -> list[Term]:
        """Acquired terms sorted by (cycle, text)."""
        found = [t for t, s in self.statuses.items() if s.kind is TermKind.CANDIDATE]
        return sorted(found, key=lambda t: (self.statuses[t].cycle, t.text))

    def cycle_of(self) -> dict[str, int]:
        return {t.text: self.statuses[t].cycle for t in self.candidates}

    def links_to(self, term: Term) -> list[AcquisitionLink]:
        return [l for l in self.links if l.candidate == term]


def run_closure(corpus: Corpus, rules: Sequence[MetaRule], seeds: Iterable[Term],
                families: Iterable[Family] = ALL_FAMILIES, min_content_words: int = 0,
                workers: int = 1) -> AcquisitionResult:
    """Acquire candidates from the seeds, then from each cycle's new candidates,
    until a cycle yields nothing new."""
    seed_list = sorted(set(seeds), key=lambda t: t.text)
    fams = frozenset(families)
    if not seed_list:
        raise ValueError("run_closure needs at least one seed")
    if not fams:
        raise ValueError("run_closure needs at least one family")
    active_rules = select_families(rules, fams)
    statuses: dict[Term, TermStatus] = {t: TermStatus.reference() for t in seed_list}
    links: list[AcquisitionLink] = []
    per_cycle: list[int] = []
    active: set[Term] = set(seed_list)
    cycle = 0
    while True:
        cycle += 1
        new, cycle_links = run_cycle(corpus, active_rules, active, statuses.keys(), cycle,
                                     min_content_words, workers)
        links.extend(cycle_links)
        per_cycle.append(len(new))
        logger.info("cycle %d: %d new candidates, %d links", cycle, len(new), len(cycle_links))
        if not new:
            break
        for term in new:
            statuses[term] = TermStatus.candidate(cycle)
        active = new
    links.sort(key=AcquisitionLink.sort_key)
    return AcquisitionResult(statuses, links, cycle, per_cycle)


@dataclass(frozen=True)
class BootstrapRow:
    size: int
    trial: int
    acquired: int


def sample_seeds(seeds: Sequence[Term], size: int, trial: int, rng_seed: int) -> list[Term]:
    """Uniform subset of ``size`` seeds, reproducible from (rng_seed, size, trial)."""
    ordered = sorted(set(seeds), key=lambda t: t.text)
    rng = np.random.Generator(np.random.PCG64(
        np.random.SeedSequence(rng_seed, spawn_key=(size, trial))))
    picks = rng.choice(len(ordered), size=size, replace=False)
    return [ordered[i] for i in sorted(picks)]


def bootstrap_experiment(corpus: Corpus, rules: Sequence[MetaRule], full_seeds: Iterable[Term],
                         sizes: Sequence[int], trials: int, rng_seed: int,
                         families: Iterable[Family] = ALL_FAMILIES, min_content_words: int = 0,
                         workers: int = 1) -> list[BootstrapRow]:
    """Acquisition volume for random seed subsets of each size, ``trials`` times each."""
    seeds = sorted(set(full_seeds), key=lambda t: t.text)
    if trials < 1:
        raise ValueError("trials must be at least 1")
    for size in sizes:
        if not 1 <= size <= len(seeds):
            raise SizeTooLarge(f"bootstrap size {size} outside 1..{len(seeds)}")
    fams = frozenset(families)
    cache: dict[frozenset[Term], int] = {}

    def volume(size: int, trial: int) -> BootstrapRow:
        subset = frozenset(sample_seeds(seeds, size, trial, rng_seed))
        if subset not in cache:
            result = run_closure(corpus, rules, subset, fams, min_content_words)
            cache[subset] = len(result.candidates)
        return BootstrapRow(size, trial, cache[subset])

    jobs = [(size, trial) for size in dict.fromkeys(sizes) for trial in range(trials)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda job: volume(*job), jobs))
    else:
        rows = [volume(size, trial) for size, trial in jobs]
    return sorted(rows, key=lambda r: (r.size, r.trial))
