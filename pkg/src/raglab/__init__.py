"""raglab: a desk-scale lab for studying how retrieval affects reasoning depth.

Subpackages:
    fission   -- random layered reasoning trees, erasure cascades, and the
                 closed-form recurrence analysis (fixed points, thresholds).
    bounds    -- information-theoretic calculators for noise impact and
                 fine-tuning/feed-forward filtering limits.
    toy       -- tiny trainable attention nets probing pair-wise vs
                 triple-wise relevance filtering.
    harness   -- QA prompt assembly, endpoint client, exact-match scoring.
"""

__version__ = "0.1.0"
