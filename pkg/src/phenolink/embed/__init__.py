"""Node embedding via biased second-order random walks and skip-gram
training with negative sampling, plus edge-feature construction."""

from .alias import AliasTable, sample_alias
from .features import (
    EdgeOperator,
    edge_feature_matrix,
    edge_features,
    read_embeddings,
    write_embeddings,
)
from .skipgram import (
    EmbeddingMatrix,
    SkipGramConfig,
    TrainingError,
    pair_loss_and_gradients,
    softmax_probability_exact,
    train_skipgram,
)
from .walks import (
    TransitionTables,
    WalkConfig,
    WalkCorpus,
    build_transition_tables,
    generate_walks,
)

__all__ = [
    "AliasTable",
    "sample_alias",
    "EdgeOperator",
    "edge_features",
    "edge_feature_matrix",
    "read_embeddings",
    "write_embeddings",
    "EmbeddingMatrix",
    "SkipGramConfig",
    "TrainingError",
    "pair_loss_and_gradients",
    "softmax_probability_exact",
    "train_skipgram",
    "TransitionTables",
    "WalkConfig",
    "WalkCorpus",
    "build_transition_tables",
    "generate_walks",
]
