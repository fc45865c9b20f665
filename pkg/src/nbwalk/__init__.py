"""Simple and non-backtracking random walks on finite non-regular graphs."""

from nbwalk.graph import Graph, Weights, generate, parse_edge_list, validate

__all__ = ["Graph", "Weights", "generate", "parse_edge_list", "validate"]
__version__ = "0.1.0"
