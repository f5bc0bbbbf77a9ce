"""Robust stability analysis of networks of uncertain systems."""

from ._netiqc import (
    Network,
    ParseError,
    analyze,
    chain,
    eig_sym,
    mu_upper,
    parse_network,
    project_nsd,
    structure,
)

__all__ = [
    "Network",
    "ParseError",
    "analyze",
    "chain",
    "eig_sym",
    "mu_upper",
    "parse_network",
    "project_nsd",
    "structure",
]
