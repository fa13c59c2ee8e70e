"""Batched HTTP scoring service for the opinion-rationale pipeline.

Exposes six scoring tasks behind a single endpoint: 3-way text-pair
alignment, specificity, sentiment, sentence embeddings, ABSA annotation,
and entailment.  Model checkpoints are configuration, not code; this
package ships deterministic stub models so the protocol is fully testable
offline, and real checkpoints can be mounted behind the same task
signatures.
"""

__version__ = "0.1.0"
