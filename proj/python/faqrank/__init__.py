"""Hybrid lexical + answer-relevance FAQ retrieval (C++ core)."""

from ._faqrank import (  # noqa: F401
    FaqCorpus,
    FaqEntry,
    FaqrankError,
    FusedCandidate,
    FusionParams,
    IoError,
    LexicalIndex,
    OverlapScorer,
    ParseError,
    ProtocolError,
    RelevanceScorer,
    SearchService,
    TransportError,
    ValidationError,
    analyze,
    average_precision,
    fuse,
    fused_score,
    generate_training_pairs,
    kfold_split,
    load_faq_corpus,
    ndcg,
    precision_at_k,
    reciprocal_rank,
    search_relevance,
    split_paraphrase_triples,
    success_at_k,
)

__version__ = "0.1.0"
