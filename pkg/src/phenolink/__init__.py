"""Phenotype-gene link prediction toolkit.

Pipeline: annotation ingestion -> undirected association graph -> labeled
pair sampling -> biased-random-walk node embeddings -> edge features ->
supervised classifiers -> imbalance-aware evaluation reports.
"""

__version__ = "0.1.0"


class PhenolinkError(Exception):
    """Base class for errors raised by this package."""
