"""Chudnovsky-type algorithms for multiplying k elements of F_{q^n}."""

__version__ = "0.1.0"
