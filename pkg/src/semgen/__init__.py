"""semgen: synthesized sentence/meaning-representation datasets with
controlled generalization splits, and multi-level scoring of predictions
(exact match, clause F under best variable mapping, polarity, entailment)."""

__version__ = "0.1.0"
