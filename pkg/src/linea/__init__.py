"""Exact construction, analysis and auditing of supersolvable line arrangements."""

__version__ = "0.1.0"
