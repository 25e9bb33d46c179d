"""Hybrid dense+sparse retrieval with lookup-table query encoding.

The heavy lifting lives in the compiled ``_core`` extension; this package
re-exports its public surface.
"""

from lightretriever._core import (
    ConfigError,
    DenseIndex,
    EmbeddingTable,
    EmptyQueryError,
    Engine,
    FormatError,
    Hit,
    InvalidArgument,
    SearchMode,
    SparseIndex,
    Tokenizer,
    Vocabulary,
    contrastive_loss,
    custom_causal_mask,
    encode_dense_query,
    encode_sparse_query,
    estimate_serving_size,
    evaluate_run,
    flops_regularizer,
    fuse,
    fused_project_max_backward,
    fused_project_max_forward,
    kl_alignment_loss,
    log_saturate,
    ndcg_at_k,
    normalize_scores,
    recall_at_k,
    run_selfcheck,
    sparse_doc_pool_naive,
    truncate_dims,
    truncate_top_terms,
)

__all__ = [
    "ConfigError",
    "DenseIndex",
    "EmbeddingTable",
    "EmptyQueryError",
    "Engine",
    "FormatError",
    "Hit",
    "InvalidArgument",
    "SearchMode",
    "SparseIndex",
    "Tokenizer",
    "Vocabulary",
    "contrastive_loss",
    "custom_causal_mask",
    "encode_dense_query",
    "encode_sparse_query",
    "estimate_serving_size",
    "evaluate_run",
    "flops_regularizer",
    "fuse",
    "fused_project_max_backward",
    "fused_project_max_forward",
    "kl_alignment_loss",
    "log_saturate",
    "ndcg_at_k",
    "normalize_scores",
    "recall_at_k",
    "run_selfcheck",
    "sparse_doc_pool_naive",
    "truncate_dims",
    "truncate_top_terms",
]

__version__ = "0.1.0"
