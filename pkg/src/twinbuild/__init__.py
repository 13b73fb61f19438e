"""Exact toolkit for twin buildings, BN-pair groups over prime fields,
Kac-Moody root data and Dynkin tree classification."""

__version__ = "0.1.0"
