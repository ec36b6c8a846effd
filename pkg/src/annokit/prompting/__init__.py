"""Few-shot prompting back-end: builder, exemplar selection, API client."""

from .embedder import EncoderEmbedder, HashedBowEmbedder
from .fewshot import (
    DimMismatch,
    EmbedderUnavailable,
    EmptyExamples,
    FewShotExample,
    PoolTooSmall,
    PromptError,
    ZeroVector,
    build_prompt,
    cosine,
    select_random,
    select_similar,
    target_sentence_of,
)
from .llm import (
    ApiConfig,
    ApiError,
    ApiTimeout,
    CompletionClient,
    ContextLengthExceeded,
    PromptConfig,
    parse_tags,
)

__all__ = [
    "FewShotExample",
    "build_prompt",
    "target_sentence_of",
    "select_random",
    "select_similar",
    "cosine",
    "HashedBowEmbedder",
    "EncoderEmbedder",
    "ApiConfig",
    "PromptConfig",
    "CompletionClient",
    "parse_tags",
    "PromptError",
    "EmptyExamples",
    "PoolTooSmall",
    "EmbedderUnavailable",
    "ZeroVector",
    "DimMismatch",
    "ContextLengthExceeded",
    "ApiError",
    "ApiTimeout",
]
