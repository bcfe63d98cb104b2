"""Brute-force reference implementations used only by the tests.

Each oracle works from the definitions rather than from the production code
path it is compared against.
"""

from __future__ import annotations

import itertools
import random
import re
from typing import Iterable, Sequence

from termenrich.acquisition import extract_candidate
from termenrich.corpus import Corpus, TokenOcc, build_corpus
from termenrich.metagrammar import (FixedLemma, MetaRule, SlotKind, VariantPattern,
                                    compile_variant_patterns, select_families)
from termenrich.terms import Term, WordClass

_CLOSED = {
    SlotKind.CONJ: WordClass.CONJUNCTION,
    SlotKind.PREP: WordClass.PREPOSITION,
    SlotKind.OPT_DET: WordClass.DETERMINER,
}


def _element_ok(element, token: TokenOcc) -> bool:
    if isinstance(element, FixedLemma):
        return token.lemma == element.lemma
    slot = element.slot
    if slot.kind is SlotKind.WILD:
        return slot.classes is None or token.word_class in slot.classes
    return token.word_class is _CLOSED[slot.kind]


def _counts(element) -> range:
    if isinstance(element, FixedLemma):
        return range(1, 2)
    slot = element.slot
    if slot.kind is SlotKind.WILD:
        return range(slot.min_count, slot.max_count + 1)
    if slot.kind is SlotKind.OPT_DET:
        return range(0, 2)
    return range(1, 2)


def enumerate_matches(corpus: Corpus, patterns: Sequence[VariantPattern]) -> set[tuple]:
    """Generate-and-test: every split of every span at every position.

    Returns (sentence, start, end, pattern_index, bindings) tuples.
    """
    out = set()
    for order, pattern in enumerate(patterns):
        choices = [_counts(e) for e in pattern.elements]
        for sentence in corpus.sentences:
            for start in range(len(sentence)):
                for counts in itertools.product(*choices):
                    end = start + sum(counts)
                    if end > len(sentence):
                        continue
                    pos = start
                    spans = []
                    ok = True
                    for element, n in zip(pattern.elements, counts):
                        if not all(_element_ok(element, t) for t in sentence[pos:pos + n]):
                            ok = False
                            break
                        spans.append((pos, pos + n))
                        pos += n
                    if ok:
                        out.add((sentence[0].sentence_id, start, end, order, tuple(spans)))
    return out


def template_regex(rule: MetaRule, term: Term) -> re.Pattern:
    """Regex over ``lemma/TAG `` strings built straight from the rule template."""
    parts = []
    for slot in rule.pattern:
        if slot.kind is SlotKind.TERM_WORD:
            parts.append(re.escape(term.lemmas[slot.index]) + r"/\S+ ")
        elif slot.kind is SlotKind.WILD:
            if slot.classes is None:
                tag = r"\S+"
            else:
                tag = "(?:" + "|".join(sorted(c.tag for c in slot.classes)) + ")"
            parts.append(rf"(?:[^/\s]+/{tag} ){{{slot.min_count},{slot.max_count}}}")
        elif slot.kind is SlotKind.CONJ:
            parts.append(r"[^/\s]+/C ")
        elif slot.kind is SlotKind.PREP:
            parts.append(r"[^/\s]+/P ")
        else:
            parts.append(r"(?:[^/\s]+/D )?")
    return re.compile("".join(parts))


def closure_oracle(corpus: Corpus, rules: Sequence[MetaRule], seeds: Iterable[Term],
                   families=None) -> tuple[dict[str, int], int]:
    """Full rescan of every known term at every iteration.

    Returns ({candidate text: cycle}, iterations until a zero-yield pass).
    """
    from termenrich.corpus import scan

    if families is not None:
        rules = select_families(rules, families)
    known: dict[Term, int] = {t: 0 for t in seeds}
    iteration = 0
    while True:
        iteration += 1
        patterns = [p for t in sorted(known, key=lambda t: t.text)
                    for p in compile_variant_patterns(t, rules)]
        new = set()
        if patterns:
            for m in scan(corpus, patterns):
                cand = extract_candidate(m)
                if cand is not None and cand not in known:
                    new.add(cand)
        if not new:
            break
        for cand in new:
            known[cand] = iteration
    return {t.text: c for t, c in known.items() if c > 0}, iteration


def reachable(edges: dict[str, set[str]], start: Iterable[str]) -> set[str]:
    seen = set(start)
    stack = list(seen)
    while stack:
        node = stack.pop()
        for nxt in edges.get(node, ()):
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return seen


def transitive_classes(nodes: Sequence[str], pairs: Iterable[tuple[str, str]]) -> set[frozenset[str]]:
    """Warshall closure of the symmetric relation given by ``pairs``."""
    idx = {n: i for i, n in enumerate(nodes)}
    n = len(nodes)
    reach = [[i == j for j in range(n)] for i in range(n)]
    for a, b in pairs:
        reach[idx[a]][idx[b]] = reach[idx[b]][idx[a]] = True
    for k in range(n):
        for i in range(n):
            if reach[i][k]:
                row_k = reach[k]
                row_i = reach[i]
                for j in range(n):
                    if row_k[j]:
                        row_i[j] = True
    return {frozenset(nodes[j] for j in range(n) if reach[i][j]) for i in range(n)}


# --- random instances -------------------------------------------------------

CONTENT = ["cell", "tumor", "tissue", "rat", "control", "blood", "serum", "normal", "acute", "line"]
CLOSED = [("and", WordClass.CONJUNCTION), ("or", WordClass.CONJUNCTION),
          ("of", WordClass.PREPOSITION), ("for", WordClass.PREPOSITION),
          ("the", WordClass.DETERMINER), ("their", WordClass.PRONOUN)]


def random_corpus(rng: random.Random, max_tokens: int = 500, vocab: int = 8) -> Corpus:
    words = CONTENT[:vocab]
    sentences = []
    budget = rng.randint(20, max_tokens)
    while budget > 0:
        length = min(budget, rng.randint(2, 12))
        budget -= length
        sid = len(sentences)
        sent = []
        for pos in range(length):
            if rng.random() < 0.3:
                lemma, cls = rng.choice(CLOSED)
            else:
                lemma = rng.choice(words)
                cls = rng.choice([WordClass.NOUN, WordClass.NOUN, WordClass.ADJECTIVE, WordClass.OTHER])
            sent.append(TokenOcc(lemma, lemma, cls, sid, pos))
        sentences.append(sent)
    return build_corpus(sentences)


def random_term(rng: random.Random, vocab: int = 8) -> Term:
    words = CONTENT[:vocab]
    length = rng.choice([2, 2, 3])
    lemmas = [rng.choice(words) for _ in range(length)]
    classes = [rng.choice([WordClass.ADJECTIVE, WordClass.NOUN, WordClass.OTHER])
               for _ in range(length - 1)] + [WordClass.NOUN]
    return Term(tuple(lemmas), tuple(classes))


def random_seeds(rng: random.Random, max_seeds: int = 10, vocab: int = 8) -> list[Term]:
    seeds = {}
    for _ in range(rng.randint(1, max_seeds)):
        t = random_term(rng, vocab)
        seeds.setdefault(t, t)
    return list(seeds)
