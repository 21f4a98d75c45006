"""Left-corner dependency parsing: transition systems, tabulation, induction."""

__version__ = "0.1.0"
