"""
Carry graph from spot and forward rates
"""
from typing import Dict, Mapping, Sequence

import numpy as np

from app.core.exceptions import GraphError
from app.core.logging import logger
from app.graph.adjacency import Adjacency
from app.models.market import CarryQuote
from app.utils.yaml_utils import load_yaml


def load_carry_table(path: str) -> Dict[str, CarryQuote]:
    """
    Load a carry rate table

    The document maps a 6-letter pair symbol to ``{spot, forward}``::

        EURUSD: {spot: 1.1050, forward: 1.1120}

    Args:
        path: YAML file path

    Returns:
        Dictionary pair symbol -> quote, in file order
    """
    document = load_yaml(path)
    if not isinstance(document, dict) or not document:
        raise GraphError(f"carry table {path} must be a non-empty mapping of pair -> {{spot, forward}}")
    table = {}
    for symbol, quote in document.items():
        if not isinstance(quote, dict):
            raise GraphError(f"carry table {path}: entry {symbol} must be a mapping with spot and forward")
        table[str(symbol).upper()] = CarryQuote(**quote)
    logger.info(f"Loaded carry table {path} with {len(table)} pairs")
    return table


def carry_signal(quote: CarryQuote) -> float:
    """c = 1 - r_f / r_s on the quoted orientation"""
    return 1.0 - quote.forward / quote.spot


def carry_graph(
    rates: Mapping[str, CarryQuote],
    currencies: Sequence[str],
    rescale: bool = False,
) -> Adjacency:
    """
    Undirected carry graph with edge weights |1 - r_f / r_s|

    Args:
        rates: Pair symbol (e.g. ``EURUSD``) -> spot/forward quote
        currencies: Node order
        rescale: Divide by the largest weight so that max weight is 1

    Returns:
        Symmetric adjacency with zero diagonal; pairs without data have no edge
    """
    index = {currency.upper(): k for k, currency in enumerate(currencies)}
    weights = np.zeros((len(currencies), len(currencies)))
    seen = set()
    for symbol, quote in rates.items():
        symbol = symbol.upper()
        if len(symbol) != 6:
            raise GraphError(f"pair symbol {symbol} must have 6 letters")
        base, counter = symbol[:3], symbol[3:]
        for currency in (base, counter):
            if currency not in index:
                raise GraphError(f"unknown currency symbol {currency} in pair {symbol}")
        if base == counter:
            raise GraphError(f"pair {symbol} quotes a currency against itself")
        if quote.spot <= 0 or quote.forward <= 0:
            raise GraphError(f"pair {symbol}: rates must be positive, got spot={quote.spot}, forward={quote.forward}")
        key = frozenset((base, counter))
        if key in seen:
            raise GraphError(f"pair {symbol} appears twice in the carry table")
        seen.add(key)
        i, j = index[base], index[counter]
        weights[i, j] = weights[j, i] = abs(carry_signal(quote))

    if rescale and weights.max() > 0:
        weights = weights / weights.max()
    logger.debug(f"Carry graph over {len(currencies)} currencies with {len(seen)} quoted pairs")
    return Adjacency(weights, tuple(c.upper() for c in currencies))
