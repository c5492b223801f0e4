# symchain/utils/graphs.py
from typing import Iterable, List, Optional

import networkx as nx
import numpy as np


def rate_graph(q: np.ndarray, nodes: Optional[Iterable[int]] = None, zero: float = 0.0) -> nx.DiGraph:
    """Directed graph of strictly positive off-diagonal rates, optionally restricted to `nodes`."""
    keep = list(range(q.shape[0])) if nodes is None else sorted(int(v) for v in nodes)
    graph = nx.DiGraph()
    graph.add_nodes_from(keep)
    for k in keep:
        for n in keep:
            if k != n and q[k, n] > zero:
                graph.add_edge(k, n)
    return graph


def communicating_classes(q: np.ndarray) -> List[List[int]]:
    classes = [sorted(c) for c in nx.strongly_connected_components(rate_graph(q))]
    return sorted(classes)


def is_irreducible(q: np.ndarray, nodes: Optional[Iterable[int]] = None) -> bool:
    graph = rate_graph(q, nodes)
    if graph.number_of_nodes() == 0:
        return False
    return nx.is_strongly_connected(graph)


def closed_classes(q: np.ndarray) -> List[List[int]]:
    """Communicating classes that no positive rate leaves."""
    graph = rate_graph(q)
    condensed = nx.condensation(graph)
    closed = [
        sorted(condensed.nodes[c]["members"])
        for c in condensed.nodes
        if condensed.out_degree(c) == 0
    ]
    return sorted(closed)
