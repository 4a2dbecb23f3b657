"""Exact classification of Real line bundles on Real tori and Klein surfaces."""

__version__ = "0.1.0"
