"""Lemmatized corpus loading and multi-pattern variant scanning."""

from __future__ import annotations

import gzip
import logging
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from .metagrammar import FixedLemma, MetaRule, VariantPattern, base_pattern, compile_variant_patterns
from .terms import TermError, Term, WordClass, normalize_lemma

logger = logging.getLogger(__name__)


class CorpusError(ValueError):
    pass


class FormatError(CorpusError):
    def __init__(self, message: str, line_no: int | None = None) -> None:
        prefix = f"line {line_no}: " if line_no is not None else ""
        super().__init__(prefix + message)
        self.line_no = line_no


class EmptyCorpus(CorpusError):
    pass


@dataclass(frozen=True)
class Lexicons:
    """Closed-class word lists used when a token carries no tag."""

    conjunctions: frozenset[str] = frozenset({"and", "or"})
    prepositions: frozenset[str] = frozenset({"of", "for", "in", "on", "with", "by", "to", "from"})
    determiners: frozenset[str] = frozenset({"the", "a", "an", "its", "their"})

    def classify(self, lemma: str) -> WordClass:
        if lemma in self.conjunctions:
            return WordClass.CONJUNCTION
        if lemma in self.prepositions:
            return WordClass.PREPOSITION
        if lemma in self.determiners:
            return WordClass.DETERMINER
        return WordClass.OTHER


DEFAULT_LEXICONS = Lexicons()


@dataclass(frozen=True)
class TokenOcc:
    surface: str
    lemma: str
    word_class: WordClass
    sentence_id: int
    position: int


@dataclass(frozen=True)
class Corpus:
    sentences: tuple[tuple[TokenOcc, ...], ...]
    # lemma -> (sentence_id, position) of every occurrence
    index: dict[str, tuple[tuple[int, int], ...]] = field(compare=False, repr=False)

    @property
    def sentence_count(self) -> int:
        return len(self.sentences)

    @property
    def token_count(self) -> int:
        return sum(len(s) for s in self.sentences)

    @property
    def vocabulary(self) -> frozenset[str]:
        return frozenset(self.index)


def _parse_token(token: str, sentence_id: int, position: int, lexicons: Lexicons,
                 line_no: int) -> TokenOcc:
    parts = token.split("|")
    if len(parts) > 3 or any(not p for p in parts):
        raise FormatError(f"malformed token {token!r}", line_no)
    try:
        surface = parts[0]
        lemma = normalize_lemma(parts[1] if len(parts) > 1 else surface)
        if len(parts) == 3:
            word_class = WordClass.from_tag(parts[2])
        else:
            word_class = lexicons.classify(lemma)
    except TermError as exc:
        raise FormatError(f"token {token!r}: {exc}", line_no) from exc
    return TokenOcc(surface, lemma, word_class, sentence_id, position)


def build_corpus(sentences: Iterable[Sequence[TokenOcc]]) -> Corpus:
    sents = tuple(tuple(s) for s in sentences)
    index: dict[str, list[tuple[int, int]]] = defaultdict(list)
    for sent in sents:
        for tok in sent:
            index[tok.lemma].append((tok.sentence_id, tok.position))
    return Corpus(sents, {k: tuple(v) for k, v in index.items()})


def parse_corpus(lines: Iterable[str], lexicons: Lexicons = DEFAULT_LEXICONS) -> Corpus:
    """Build a corpus from one-sentence-per-line text; blank lines are skipped."""
    sentences = []
    for line_no, raw in enumerate(lines, start=1):
        tokens = raw.split()
        if not tokens:
            continue
        sid = len(sentences)
        sentences.append([_parse_token(tok, sid, pos, lexicons, line_no)
                          for pos, tok in enumerate(tokens)])
    if not sentences:
        raise EmptyCorpus("corpus contains no tokens")
    return build_corpus(sentences)


def load_corpus(path: str | Path, lexicons: Lexicons = DEFAULT_LEXICONS) -> Corpus:
    """Load a corpus file; names ending in ``.gz`` are read through gzip."""
    path = Path(path)
    opener = gzip.open if path.suffix == ".gz" else open
    with opener(path, "rt", encoding="utf-8") as fh:
        corpus = parse_corpus(fh, lexicons)
    logger.info("loaded %s: %d sentences, %d tokens", path, corpus.sentence_count, corpus.token_count)
    return corpus


@dataclass(frozen=True)
class VariantMatch:
    """One occurrence of a pattern.

    ``bindings[i]`` is the half-open token span bound to pattern element ``i``
    (an optional determiner that matched nothing gets an empty span);
    ``tokens`` holds the matched tokens ``start..end``.
    """

    pattern: VariantPattern
    sentence_id: int
    start: int
    end: int
    bindings: tuple[tuple[int, int], ...]
    tokens: tuple[TokenOcc, ...] = field(compare=False, repr=False)

    def bound_tokens(self, element: int) -> tuple[TokenOcc, ...]:
        lo, hi = self.bindings[element]
        return self.tokens[lo - self.start:hi - self.start]

    @property
    def text(self) -> str:
        return " ".join(t.surface for t in self.tokens)


def _accepts(element, token: TokenOcc) -> bool:
    if isinstance(element, FixedLemma):
        return token.lemma == element.lemma
    return element.slot.admits(token.word_class)


def match_at(pattern: VariantPattern, sentence: Sequence[TokenOcc],
             start: int) -> list[tuple[int, tuple[tuple[int, int], ...]]]:
    """All (end, bindings) with which ``pattern`` matches ``sentence`` from ``start``."""
    elements = pattern.elements
    n = len(sentence)
    found: list[tuple[int, tuple[tuple[int, int], ...]]] = []
    spans: list[tuple[int, int]] = []

    def walk(i: int, pos: int) -> None:
        if i == len(elements):
            found.append((pos, tuple(spans)))
            return
        element = elements[i]
        lo, hi = element.bounds
        end = pos
        # consume tokens one by one so a rejected token prunes longer spans too
        for count in range(hi + 1):
            if count:
                if end >= n or not _accepts(element, sentence[end]):
                    break
                end += 1
            if count >= lo:
                spans.append((pos, end))
                walk(i + 1, end)
                spans.pop()

    walk(0, start)
    return found


def _make_matches(pattern: VariantPattern, sentence: Sequence[TokenOcc], start: int,
                  order: int, out: list) -> None:
    for end, spans in match_at(pattern, sentence, start):
        sid = sentence[start].sentence_id
        out.append(((sid, start, order, end, spans),
                    VariantMatch(pattern, sid, start, end, spans, tuple(sentence[start:end]))))


def _scan_sentences(sentences: Sequence[Sequence[TokenOcc]], patterns: Sequence[VariantPattern],
                    buckets: dict[str, list[int]], floating: list[int]) -> list:
    out: list = []
    for sentence in sentences:
        for start, tok in enumerate(sentence):
            candidates = buckets.get(tok.lemma, ())
            if floating:
                candidates = sorted([*candidates, *floating])
            for order in candidates:
                _make_matches(patterns[order], sentence, start, order, out)
    return out


def _chunks(seq: Sequence, n: int) -> list[Sequence]:
    size = -(-len(seq) // n)
    return [seq[i:i + size] for i in range(0, len(seq), size)]


def scan(corpus: Corpus, patterns: Sequence[VariantPattern], workers: int = 1) -> list[VariantMatch]:
    """Every match of every pattern, ordered by (sentence, start, pattern order).

    Patterns are bucketed by their first lemma so each corpus position only
    tries the patterns that can start there; patterns opening with an open
    slot are tried everywhere. Output does not depend on ``workers``.
    """
    if not patterns:
        raise ValueError("scan needs at least one pattern")
    vocab = corpus.index
    buckets: dict[str, list[int]] = defaultdict(list)
    floating: list[int] = []
    for order, pattern in enumerate(patterns):
        # a pattern whose lemmas are not all in the corpus can never match
        if any(isinstance(e, FixedLemma) and e.lemma not in vocab for e in pattern.elements):
            continue
        first = pattern.first_lemma
        if first is None:
            floating.append(order)
        else:
            buckets[first].append(order)

    sentences = corpus.sentences
    if workers <= 1 or len(sentences) < 2:
        keyed = _scan_sentences(sentences, patterns, buckets, floating)
    else:
        parts = _chunks(sentences, workers)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = pool.map(lambda part: _scan_sentences(part, patterns, buckets, floating), parts)
            keyed = [item for chunk in results for item in chunk]
    keyed.sort(key=lambda kv: kv[0])
    return [m for _, m in keyed]


def scan_naive(corpus: Corpus, patterns: Sequence[VariantPattern]) -> list[VariantMatch]:
    """Reference scanner: try every pattern at every position, no index."""
    keyed: list = []
    for sentence in corpus.sentences:
        for start in range(len(sentence)):
            for order, pattern in enumerate(patterns):
                _make_matches(pattern, sentence, start, order, keyed)
    keyed.sort(key=lambda kv: kv[0])
    return [m for _, m in keyed]


def iter_patterns(terms: Iterable[Term], rules: Sequence[MetaRule],
                  include_base: bool = False) -> Iterator[VariantPattern]:
    for term in terms:
        if include_base:
            yield base_pattern(term)
        yield from compile_variant_patterns(term, rules)


def find_present_terms(corpus: Corpus, terms: Iterable[Term], rules: Sequence[MetaRule],
                       workers: int = 1) -> set[str]:
    """Ids of the terms that occur in their base form or as any variant."""
    patterns = list(iter_patterns(terms, rules, include_base=True))
    if not patterns:
        return set()
    return {m.pattern.source.id for m in scan(corpus, patterns, workers)}
