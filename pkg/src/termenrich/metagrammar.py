"""Meta-rule DSL, the bundled default meta-grammar and pattern compilation.

A meta-rule describes how the words of a 2- or 3-word term may be laid out in
a variant (coordination, insertion or permutation) and which part of the
variant forms the candidate term. Compiling a rule against a concrete term
substitutes the term's lemmas for its ``T<i>`` slots.

Grammar file syntax, one rule per line::

    rule coor2_arg family=coor arity=2 pattern=T0,W[1-1:*],C,T1 extract=0,1

Pattern elements are ``T0``-``T2`` (term words), ``W[min-max:classes]``
(free words; classes are tag codes such as ``NAX`` or ``*`` for any word),
``C`` (conjunction), ``P`` (preposition) and ``D?`` (optional determiner).
``extract`` lists pattern positions whose bound words form the candidate.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence, Union

from .terms import MAX_TERM_LENGTH, MIN_TERM_LENGTH, Term, WordClass

MAX_WILD = 2
# A pattern never spans more than arity + EXTRA_SPAN tokens.
EXTRA_SPAN = 3


class GrammarError(ValueError):
    def __init__(self, message: str, line_no: int | None = None) -> None:
        prefix = f"line {line_no}: " if line_no is not None else ""
        super().__init__(prefix + message)
        self.line_no = line_no


class ParseError(GrammarError):
    pass


class ValidationError(GrammarError):
    pass


class Family(Enum):
    COORDINATION = "coor"
    INSERTION = "ins"
    PERMUTATION = "perm"

    @classmethod
    def parse(cls, text: str) -> Family:
        text = text.strip().lower()
        for fam in cls:
            if text in (fam.value, fam.name.lower()):
                return fam
        raise ValueError(f"unknown variant family {text!r}")


ALL_FAMILIES = frozenset(Family)


def parse_families(text: str) -> frozenset[Family]:
    """Parse a comma-separated family list such as ``coor,ins``."""
    fams = frozenset(Family.parse(part) for part in text.split(",") if part.strip())
    if not fams:
        raise ValueError("at least one variant family is required")
    return fams


class SlotKind(Enum):
    TERM_WORD = "T"
    WILD = "W"
    CONJ = "C"
    PREP = "P"
    OPT_DET = "D?"


_CLASS_CODES = sorted((c.tag for c in WordClass), key=len, reverse=True)


def _parse_class_set(text: str) -> frozenset[WordClass] | None:
    if text == "*":
        return None
    classes = set()
    pos = 0
    while pos < len(text):
        for code in _CLASS_CODES:
            if text.startswith(code, pos):
                classes.add(WordClass(code))
                pos += len(code)
                break
        else:
            raise ValueError(f"unknown class code at {text[pos:]!r}")
    if not classes:
        raise ValueError("empty class set")
    return frozenset(classes)


def _render_class_set(classes: frozenset[WordClass] | None) -> str:
    if classes is None:
        return "*"
    return "".join(c.tag for c in WordClass if c in classes)


@dataclass(frozen=True)
class SlotSpec:
    """One pattern element. ``classes=None`` on a wild slot admits any word."""

    kind: SlotKind
    index: int | None = None
    classes: frozenset[WordClass] | None = None
    min_count: int = 1
    max_count: int = 1

    @classmethod
    def term_word(cls, index: int) -> SlotSpec:
        return cls(SlotKind.TERM_WORD, index=index)

    @classmethod
    def wild(cls, classes: Iterable[WordClass] | None, min_count: int = 1,
             max_count: int = 1) -> SlotSpec:
        cs = None if classes is None else frozenset(classes)
        return cls(SlotKind.WILD, classes=cs, min_count=min_count, max_count=max_count)

    @property
    def bounds(self) -> tuple[int, int]:
        """(min, max) number of tokens the slot consumes."""
        if self.kind is SlotKind.WILD:
            return self.min_count, self.max_count
        if self.kind is SlotKind.OPT_DET:
            return 0, 1
        return 1, 1

    def admits(self, word_class: WordClass) -> bool:
        """Class test for open slots; term words are matched by lemma instead."""
        if self.kind is SlotKind.WILD:
            return self.classes is None or word_class in self.classes
        if self.kind is SlotKind.CONJ:
            return word_class is WordClass.CONJUNCTION
        if self.kind is SlotKind.PREP:
            return word_class is WordClass.PREPOSITION
        if self.kind is SlotKind.OPT_DET:
            return word_class is WordClass.DETERMINER
        raise TypeError("term-word slots are matched by lemma")

    def render(self) -> str:
        if self.kind is SlotKind.TERM_WORD:
            return f"T{self.index}"
        if self.kind is SlotKind.WILD:
            return f"W[{self.min_count}-{self.max_count}:{_render_class_set(self.classes)}]"
        return self.kind.value


_ELEM_RE = re.compile(r"^(?:T(?P<t>\d)|W\[(?P<lo>\d+)-(?P<hi>\d+):(?P<cls>[^\]]+)\]|(?P<c>C)|(?P<p>P)|(?P<d>D\?))$")


def parse_slot(text: str) -> SlotSpec:
    m = _ELEM_RE.match(text.strip())
    if m is None:
        raise ValueError(f"bad pattern element {text!r}")
    if m["t"] is not None:
        return SlotSpec.term_word(int(m["t"]))
    if m["lo"] is not None:
        return SlotSpec.wild(_parse_class_set(m["cls"]), int(m["lo"]), int(m["hi"]))
    if m["c"]:
        return SlotSpec(SlotKind.CONJ)
    if m["p"]:
        return SlotSpec(SlotKind.PREP)
    return SlotSpec(SlotKind.OPT_DET)


@dataclass(frozen=True)
class MetaRule:
    name: str
    family: Family
    arity: int
    pattern: tuple[SlotSpec, ...]
    extraction: tuple[int, ...]

    @property
    def min_length(self) -> int:
        return sum(s.bounds[0] for s in self.pattern)

    @property
    def max_length(self) -> int:
        return sum(s.bounds[1] for s in self.pattern)

    def validate(self) -> None:
        """Raise :class:`ValidationError` naming the first violated invariant."""
        def fail(msg: str) -> None:
            raise ValidationError(f"rule {self.name}: {msg}")

        if self.arity not in (MIN_TERM_LENGTH, MAX_TERM_LENGTH):
            fail(f"arity must be 2 or 3, got {self.arity}")
        kinds = [s.kind for s in self.pattern]
        indices = [s.index for s in self.pattern if s.kind is SlotKind.TERM_WORD]
        for idx in indices:
            if not 0 <= idx < self.arity:
                fail(f"term word T{idx} out of range for arity {self.arity}")
        missing = set(range(self.arity)) - set(indices)
        if missing:
            fail(f"term words {sorted(missing)} never appear in the pattern")
        for s in self.pattern:
            if s.kind is SlotKind.WILD:
                if not 0 <= s.min_count <= s.max_count:
                    fail(f"wild slot {s.render()} needs 0 <= min <= max")
                if s.max_count > MAX_WILD:
                    fail(f"wild slot {s.render()} exceeds {MAX_WILD} words")
        n_conj = kinds.count(SlotKind.CONJ)
        n_prep = kinds.count(SlotKind.PREP)
        if self.family is Family.COORDINATION and n_conj != 1:
            fail(f"coordination needs exactly one C slot, found {n_conj}")
        if self.family is Family.PERMUTATION and n_prep != 1:
            fail(f"permutation needs exactly one P slot, found {n_prep}")
        if self.family is Family.INSERTION and (n_conj or n_prep):
            fail("insertion patterns take neither C nor P slots")
        if self.max_length > self.arity + EXTRA_SPAN:
            fail(f"pattern may span {self.max_length} tokens, limit is {self.arity + EXTRA_SPAN}")
        if self.min_length < self.arity:
            fail("pattern may span fewer tokens than the term")
        if not self.extraction:
            fail("empty extraction")
        if len(set(self.extraction)) != len(self.extraction):
            fail("extraction repeats a position")
        for ref in self.extraction:
            if not 0 <= ref < len(self.pattern):
                fail(f"extraction position {ref} out of range")
            if self.pattern[ref].kind not in (SlotKind.TERM_WORD, SlotKind.WILD):
                fail(f"extraction position {ref} is not a word slot")
        lo = sum(self.pattern[r].bounds[0] for r in self.extraction)
        hi = sum(self.pattern[r].bounds[1] for r in self.extraction)
        if lo < MIN_TERM_LENGTH or hi > MAX_TERM_LENGTH:
            fail(f"extraction yields {lo}..{hi} words, candidates need 2..3")
        last = self.pattern[self.extraction[-1]]
        if last.kind is SlotKind.WILD and not (
            last.classes is None or last.classes & {WordClass.NOUN, WordClass.OTHER}
        ):
            fail("extraction must end in a noun-compatible slot")

    def render(self) -> str:
        pattern = ",".join(s.render() for s in self.pattern)
        extract = ",".join(str(r) for r in self.extraction)
        return (f"rule {self.name} family={self.family.value} arity={self.arity} "
                f"pattern={pattern} extract={extract}")


def parse_rule(line: str, line_no: int | None = None) -> MetaRule:
    parts = line.split()
    if not parts or parts[0] != "rule" or len(parts) < 2:
        raise ParseError("expected 'rule <name> key=value ...'", line_no)
    name = parts[1]
    fields = {}
    for part in parts[2:]:
        key, sep, value = part.partition("=")
        if not sep or not value:
            raise ParseError(f"expected key=value, got {part!r}", line_no)
        if key in fields:
            raise ParseError(f"duplicate key {key!r}", line_no)
        fields[key] = value
    required = {"family", "arity", "pattern", "extract"}
    if set(fields) != required:
        raise ParseError(f"rule needs exactly the keys {sorted(required)}", line_no)
    try:
        family = Family.parse(fields["family"])
        arity = int(fields["arity"])
        pattern = tuple(parse_slot(e) for e in fields["pattern"].split(","))
        extraction = tuple(int(r) for r in fields["extract"].split(","))
    except ValueError as exc:
        raise ParseError(str(exc), line_no) from exc
    rule = MetaRule(name, family, arity, pattern, extraction)
    try:
        rule.validate()
    except ValidationError as exc:
        raise ValidationError(str(exc), line_no) from None
    return rule


def parse_metagrammar(text: str) -> list[MetaRule]:
    rules: list[MetaRule] = []
    names: set[str] = set()
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        rule = parse_rule(line, line_no)
        if rule.name in names:
            raise ValidationError(f"duplicate rule name {rule.name!r}", line_no)
        names.add(rule.name)
        rules.append(rule)
    return rules


def load_metagrammar(source: str | Path | None = None) -> list[MetaRule]:
    """Load and validate rules from a grammar file; ``None`` loads the bundled default."""
    if source is None:
        text = resources.files("termenrich").joinpath("data/default.grammar").read_text("utf-8")
    else:
        text = Path(source).read_text(encoding="utf-8")
    return parse_metagrammar(text)


def default_metagrammar() -> list[MetaRule]:
    return load_metagrammar(None)


def select_families(rules: Iterable[MetaRule], families: Iterable[Family]) -> list[MetaRule]:
    wanted = frozenset(families)
    return [r for r in rules if r.family in wanted]


@dataclass(frozen=True)
class FixedLemma:
    lemma: str
    word_class: WordClass
    term_index: int

    @property
    def bounds(self) -> tuple[int, int]:
        return 1, 1


@dataclass(frozen=True)
class OpenSlot:
    slot: SlotSpec

    @property
    def bounds(self) -> tuple[int, int]:
        return self.slot.bounds


Element = Union[FixedLemma, OpenSlot]


@dataclass(frozen=True)
class VariantPattern:
    """A meta-rule instantiated on one term; ``rule`` is None for the base form."""

    source: Term
    rule: MetaRule | None
    elements: tuple[Element, ...]

    @property
    def source_term(self) -> str:
        return self.source.id

    @property
    def meta_rule(self) -> str:
        return self.rule.name if self.rule is not None else "base"

    @property
    def min_length(self) -> int:
        return sum(e.bounds[0] for e in self.elements)

    @property
    def max_length(self) -> int:
        return sum(e.bounds[1] for e in self.elements)

    @property
    def first_lemma(self) -> str | None:
        first = self.elements[0]
        return first.lemma if isinstance(first, FixedLemma) else None

    def render(self) -> str:
        return " ".join(e.lemma if isinstance(e, FixedLemma) else e.slot.render()
                        for e in self.elements)


def compile_pattern(term: Term, rule: MetaRule) -> VariantPattern:
    elements: list[Element] = []
    for slot in rule.pattern:
        if slot.kind is SlotKind.TERM_WORD:
            elements.append(FixedLemma(term.lemmas[slot.index], term.classes[slot.index], slot.index))
        else:
            elements.append(OpenSlot(slot))
    return VariantPattern(term, rule, tuple(elements))


def compile_variant_patterns(term: Term, rules: Sequence[MetaRule]) -> list[VariantPattern]:
    """One pattern per rule whose arity equals the term length, in rule order."""
    return [compile_pattern(term, r) for r in rules if r.arity == len(term)]


def base_pattern(term: Term) -> VariantPattern:
    return VariantPattern(
        term, None,
        tuple(FixedLemma(lemma, cls, i) for i, (lemma, cls) in enumerate(term.words)),
    )
