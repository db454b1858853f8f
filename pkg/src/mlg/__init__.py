"""Graphlet concentration estimation on two-layer multiplex graphs."""

from .graph import TwoLayerGraph, Layer, EdgeRef, GraphFormatError, load_graph, save_graph

__all__ = ["TwoLayerGraph", "Layer", "EdgeRef", "GraphFormatError", "load_graph", "save_graph"]
__version__ = "0.1.0"
