"""Terminology enrichment from term variants in lemmatized corpora."""

from .acquisition import (AcquisitionLink, AcquisitionResult, BootstrapRow, SizeTooLarge,
                          bootstrap_experiment, extract_candidate, run_closure, run_cycle)
from .conceptnet import (CoordClass, SpecGraph, apply_conflation, build_coord_classes,
                         build_spec_graph, export_graph)
from .corpus import (Corpus, EmptyCorpus, FormatError, TokenOcc, VariantMatch, find_present_terms,
                     load_corpus, parse_corpus, scan, scan_naive)
from .metagrammar import (Family, MetaRule, ParseError, SlotSpec, ValidationError, VariantPattern,
                          base_pattern, compile_variant_patterns, default_metagrammar,
                          load_metagrammar, parse_metagrammar)
from .terms import (BadArity, BadHead, BadToken, EmptyLemma, Term, TermKind, TermStatus, WordClass,
                    load_terms, normalize_lemma, parse_term, render_term)

__version__ = "0.1.0"

__all__ = [
    "AcquisitionLink", "AcquisitionResult", "BadArity", "BadHead", "BadToken", "BootstrapRow",
    "CoordClass", "Corpus", "EmptyCorpus", "EmptyLemma", "Family", "FormatError", "MetaRule",
    "ParseError", "SizeTooLarge", "SlotSpec", "SpecGraph", "Term", "TermKind", "TermStatus",
    "TokenOcc", "ValidationError", "VariantMatch", "VariantPattern", "WordClass",
    "apply_conflation", "base_pattern", "bootstrap_experiment", "build_coord_classes",
    "build_spec_graph", "compile_variant_patterns", "default_metagrammar", "export_graph",
    "extract_candidate", "find_present_terms", "load_corpus", "load_metagrammar", "load_terms",
    "normalize_lemma", "parse_corpus", "parse_metagrammar", "parse_term", "render_term",
    "run_closure", "run_cycle", "scan", "scan_naive",
]
