import unicodedata

import pytest
from hypothesis import given, strategies as st

from termenrich.terms import (BadArity, BadHead, BadLemma, BadToken, EmptyLemma, Term, TermFileError,
                              TermKind, TermStatus, WordClass, dedupe_terms, iter_term_lines,
                              load_terms, normalize_lemma, parse_term, render_term, term_id)

ACCENTED = [
    "Hépatite", "éCHOGRAPHIE", "Müller", "Cœur", "Fièvre", "Naïve",
    "Über", "Größe", "Ñandú", "Crème", "Çà", "Pâté", "Forêt", "Île", "Noël", "Zoë", "Façade",
    "Résumé", "Déjà", "Año",
]


def test_normalize_lemma_examples():
    assert normalize_lemma("Serum") == "serum"
    assert normalize_lemma("albumin") == "albumin"
    assert normalize_lemma("  Albumin\t") == "albumin"
    assert normalize_lemma("Hépatite") == "hépatite"


@pytest.mark.parametrize("word", ACCENTED)
def test_normalize_matches_reference_normalizer_on_decomposed_input(word):
    decomposed = unicodedata.normalize("NFD", word)
    expected = unicodedata.normalize("NFC", word.lower())
    assert normalize_lemma(decomposed) == expected
    assert normalize_lemma(word) == expected
    assert unicodedata.is_normalized("NFC", normalize_lemma(decomposed))


@pytest.mark.parametrize("raw", ["", "   ", "\t\n"])
def test_empty_lemma(raw):
    with pytest.raises(EmptyLemma):
        normalize_lemma(raw)


@pytest.mark.parametrize("raw", ["serum albumin", "a\x00b", "x y"])
def test_bad_lemma(raw):
    with pytest.raises(BadLemma):
        normalize_lemma(raw)


lemma_text = st.text(
    alphabet=st.characters(blacklist_categories=("Cc", "Cs", "Zs", "Zl", "Zp")),
    min_size=1, max_size=12,
).filter(lambda s: s.strip() and not any(c.isspace() for c in s))


@given(lemma_text)
def test_normalize_is_idempotent(raw):
    once = normalize_lemma(raw)
    assert normalize_lemma(once) == once
    assert once and not any(c.isspace() for c in once)


def test_parse_term_examples():
    t = parse_term("serum/N albumin/N")
    assert t.words == (("serum", WordClass.NOUN), ("albumin", WordClass.NOUN))
    t = parse_term("viral/A hepatitis/N")
    assert t.words == (("viral", WordClass.ADJECTIVE), ("hepatitis", WordClass.NOUN))


def test_parse_term_untagged_defaults():
    t = parse_term("Blood Cell")
    assert t.words == (("blood", WordClass.OTHER), ("cell", WordClass.NOUN))


@pytest.mark.parametrize("line,error", [
    ("a b c d", BadArity),
    ("albumin", BadArity),
    ("serum/N albumin/A", BadHead),
    ("serum/N albumin/Q", BadToken),
    ("serum/ albumin", BadToken),
    ("/N albumin", BadToken),
])
def test_parse_term_errors(line, error):
    with pytest.raises(error):
        parse_term(line)


def test_term_identity_ignores_classes_and_source():
    a = parse_term("serum/N albumin/N")
    b = parse_term("serum albumin")
    assert a == b and hash(a) == hash(b) and a.id == b.id
    assert a.id == term_id(["serum", "albumin"])
    assert parse_term("albumin serum").id != a.id


def test_term_constructor_guards_invariants():
    with pytest.raises(BadArity):
        Term(("a", "b", "c", "d"), (WordClass.OTHER,) * 3 + (WordClass.NOUN,))
    with pytest.raises(BadHead):
        Term(("a", "b"), (WordClass.NOUN, WordClass.ADJECTIVE))
    with pytest.raises(BadLemma):
        Term(("Serum", "albumin"), (WordClass.NOUN, WordClass.NOUN))


tags = st.sampled_from([c for c in WordClass])
simple_lemma = st.text(alphabet="abcdéøz-", min_size=1, max_size=6)


@given(st.lists(st.tuples(simple_lemma, tags), min_size=1, max_size=2), simple_lemma)
def test_render_parse_round_trip(modifiers, head):
    term = Term.from_words([*modifiers, (head, WordClass.NOUN)])
    assert parse_term(render_term(term)).words == term.words


def test_term_status_invariant():
    assert TermStatus.reference().kind is TermKind.REFERENCE
    assert TermStatus.candidate(3).cycle == 3
    with pytest.raises(ValueError):
        TermStatus(TermKind.CANDIDATE, 0)
    with pytest.raises(ValueError):
        TermStatus(TermKind.REFERENCE, 2)


def test_reference_file_skips_long_terms_and_comments(tmp_path, caplog):
    path = tmp_path / "terms.txt"
    path.write_text("# comment\n\nserum/N albumin/N\nage matched healthy control\n"
                    "Serum albumin\nviral/A hepatitis/N\n", encoding="utf-8")
    terms = load_terms(path)
    assert [t.text for t in terms] == ["serum albumin", "viral hepatitis"]
    assert "skipping term" in caplog.text


def test_reference_file_error_has_line_number():
    with pytest.raises(TermFileError) as err:
        list(iter_term_lines(["serum albumin", "solo"], "list.txt"))
    assert err.value.line_no == 2
    assert "list.txt:2" in str(err.value)


def test_dedupe_keeps_first():
    a, b = parse_term("serum/N albumin/N"), parse_term("serum albumin")
    assert dedupe_terms([a, b])[0].classes == a.classes
