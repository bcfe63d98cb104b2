"""Lemmas, word classes and multi-word terms shared by every other module."""

from __future__ import annotations

import hashlib
import logging
import unicodedata
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Iterator

logger = logging.getLogger(__name__)

MIN_TERM_LENGTH = 2
MAX_TERM_LENGTH = 3


class TermError(ValueError):
    """Base class for malformed lemmas and terms."""


class EmptyLemma(TermError):
    pass


class BadLemma(TermError):
    pass


class BadArity(TermError):
    pass


class BadHead(TermError):
    pass


class BadToken(TermError):
    pass


class TermFileError(TermError):
    """A reference-list line could not be parsed."""

    def __init__(self, path: str, line_no: int, cause: TermError) -> None:
        super().__init__(f"{path}:{line_no}: {cause}")
        self.path = path
        self.line_no = line_no
        self.cause = cause


class WordClass(Enum):
    NOUN = "N"
    ADJECTIVE = "A"
    VERB = "V"
    PREPOSITION = "P"
    CONJUNCTION = "C"
    DETERMINER = "D"
    PRONOUN = "PRO"
    OTHER = "X"

    @property
    def tag(self) -> str:
        return self.value

    @classmethod
    def from_tag(cls, tag: str) -> WordClass:
        try:
            return cls(tag.upper())
        except ValueError:
            raise BadToken(f"unknown word-class tag {tag!r}") from None


# Classes a candidate word may carry; Other keeps untagged corpora usable.
CONTENT_CLASSES = frozenset({WordClass.NOUN, WordClass.ADJECTIVE, WordClass.OTHER})


def normalize_lemma(raw: str) -> str:
    """Lowercase, trim and NFC-compose ``raw``.

    Diacritics are preserved. Raises :class:`EmptyLemma` when nothing is left
    after trimming and :class:`BadLemma` on internal whitespace or control
    characters.
    """
    text = raw.strip()
    if not text:
        raise EmptyLemma("lemma is empty after trimming")
    # lower() and NFC do not commute for a few code points; iterate to a fixed point.
    for _ in range(4):
        folded = unicodedata.normalize("NFC", text.lower())
        if folded == text:
            break
        text = folded
    for ch in text:
        if ch.isspace() or unicodedata.category(ch) in ("Cc", "Cs"):
            raise BadLemma(f"lemma {raw!r} contains whitespace or control characters")
    return text


def term_id(lemmas: Iterable[str]) -> str:
    """Stable content hash of a lemma sequence."""
    joined = "\x1f".join(lemmas)
    return hashlib.sha1(joined.encode("utf-8")).hexdigest()[:16]


@dataclass(frozen=True)
class Term:
    """An ordered sequence of 2 or 3 lemmas whose last word is a noun.

    Identity (equality, hashing, :attr:`id`) depends on the lemmas only; the
    word classes ride along for matching and rendering.
    """

    lemmas: tuple[str, ...]
    classes: tuple[WordClass, ...] = field(compare=False)

    def __post_init__(self) -> None:
        if len(self.lemmas) != len(self.classes):
            raise TermError("lemmas and classes differ in length")
        if not MIN_TERM_LENGTH <= len(self.lemmas) <= MAX_TERM_LENGTH:
            raise BadArity(f"terms have 2 or 3 words, got {len(self.lemmas)}")
        for lemma in self.lemmas:
            if normalize_lemma(lemma) != lemma:
                raise BadLemma(f"lemma {lemma!r} is not normalized")
        if self.classes[-1] is not WordClass.NOUN:
            raise BadHead(f"head {self.lemmas[-1]!r} must be a noun, got {self.classes[-1].name}")

    @classmethod
    def from_words(cls, words: Iterable[tuple[str, WordClass]]) -> Term:
        pairs = list(words)
        return cls(tuple(w for w, _ in pairs), tuple(c for _, c in pairs))

    @classmethod
    def from_text(cls, text: str) -> Term:
        return parse_term(text)

    @property
    def id(self) -> str:
        return term_id(self.lemmas)

    @property
    def text(self) -> str:
        return " ".join(self.lemmas)

    @property
    def head(self) -> str:
        return self.lemmas[-1]

    @property
    def words(self) -> tuple[tuple[str, WordClass], ...]:
        return tuple(zip(self.lemmas, self.classes))

    def __len__(self) -> int:
        return len(self.lemmas)

    def __str__(self) -> str:
        return self.text


class TermKind(Enum):
    REFERENCE = "reference"
    CANDIDATE = "candidate"


@dataclass(frozen=True)
class TermStatus:
    kind: TermKind
    cycle: int

    def __post_init__(self) -> None:
        if self.cycle < 0:
            raise ValueError("cycle must be non-negative")
        if (self.kind is TermKind.REFERENCE) != (self.cycle == 0):
            raise ValueError("reference terms have cycle 0, candidates cycle >= 1")

    @classmethod
    def reference(cls) -> TermStatus:
        return cls(TermKind.REFERENCE, 0)

    @classmethod
    def candidate(cls, cycle: int) -> TermStatus:
        return cls(TermKind.CANDIDATE, cycle)


def _parse_token(token: str) -> tuple[str, WordClass | None]:
    if "/" in token:
        lemma, tag = token.rsplit("/", 1)
        if not lemma or not tag:
            raise BadToken(f"malformed token {token!r}")
        return normalize_lemma(lemma), WordClass.from_tag(tag)
    return normalize_lemma(token), None


def parse_term(line: str) -> Term:
    """Parse ``lemma`` / ``lemma/TAG`` tokens into a :class:`Term`.

    Untagged head words default to Noun and other untagged words to Other.

    >>> parse_term("serum/N albumin/N").words
    (('serum', <WordClass.NOUN: 'N'>), ('albumin', <WordClass.NOUN: 'N'>))
    """
    tokens = line.split()
    if not MIN_TERM_LENGTH <= len(tokens) <= MAX_TERM_LENGTH:
        raise BadArity(f"terms have 2 or 3 words, got {len(tokens)} in {line!r}")
    parsed = [_parse_token(tok) for tok in tokens]
    words = []
    for i, (lemma, cls) in enumerate(parsed):
        if cls is None:
            cls = WordClass.NOUN if i == len(parsed) - 1 else WordClass.OTHER
        words.append((lemma, cls))
    return Term.from_words(words)


def render_term(term: Term) -> str:
    """Inverse of :func:`parse_term`: every word carries its tag."""
    return " ".join(f"{lemma}/{cls.tag}" for lemma, cls in term.words)


def iter_term_lines(lines: Iterable[str], source: str = "<terms>") -> Iterator[Term]:
    """Yield terms from reference-list lines; 4+ word terms are skipped with a warning."""
    for line_no, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            yield parse_term(line)
        except BadArity as exc:
            if len(line.split()) > MAX_TERM_LENGTH:
                logger.warning("%s:%d: skipping term longer than %d words: %s",
                               source, line_no, MAX_TERM_LENGTH, line)
                continue
            raise TermFileError(source, line_no, exc) from exc
        except TermError as exc:
            raise TermFileError(source, line_no, exc) from exc


def load_terms(path: str | Path) -> list[Term]:
    """Read a reference list, dropping duplicate terms (first occurrence wins)."""
    path = Path(path)
    with path.open(encoding="utf-8") as fh:
        return dedupe_terms(iter_term_lines(fh, str(path)))


def dedupe_terms(terms: Iterable[Term]) -> list[Term]:
    seen: set[Term] = set()
    out = []
    for term in terms:
        if term not in seen:
            seen.add(term)
            out.append(term)
    return out
