"""
Graphs and graph filters
"""
from app.graph.adjacency import Adjacency, normalize, time_graph
from app.graph.carry import carry_graph, carry_signal, load_carry_table
from app.graph.filters import FilterKind, GraphFilter, multilinear_filter, shift_filter

__all__ = [
    "Adjacency",
    "FilterKind",
    "GraphFilter",
    "carry_graph",
    "carry_signal",
    "load_carry_table",
    "multilinear_filter",
    "normalize",
    "shift_filter",
    "time_graph",
]
