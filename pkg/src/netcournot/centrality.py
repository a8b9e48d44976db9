"""Market centrality scores used by the benchmark allocation strategies.

Scores are computed on the undirected bipartite graph with unit-length
edges. Nodes are numbered firms first (``0..n_firms-1``) and then markets.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .network import MarketNetwork

MEASURES = ("degree", "betweenness", "closeness")


@dataclass(frozen=True, eq=False)
class CentralityScores:
    measure: str
    values: np.ndarray

    def to_dict(self, net: MarketNetwork) -> dict:
        return {mid: float(v) for mid, v in zip(net.market_ids, self.values)}


def _adjacency(net: MarketNetwork) -> list[list[int]]:
    nf = net.n_firms
    adj = [[nf + m for m in ms] for ms in net.firm_markets]
    adj.extend([f for f in fs] for fs in net.market_firms)
    return adj


def _bfs(adj: list[list[int]], source: int):
    """Distances, shortest-path counts, predecessors and visit order from one source."""
    dist = [-1] * len(adj)
    sigma = [0] * len(adj)
    preds: list[list[int]] = [[] for _ in adj]
    order = []
    dist[source] = 0
    sigma[source] = 1
    queue = deque([source])
    while queue:
        v = queue.popleft()
        order.append(v)
        for w in adj[v]:
            if dist[w] < 0:
                dist[w] = dist[v] + 1
                queue.append(w)
            if dist[w] == dist[v] + 1:
                sigma[w] += sigma[v]
                preds[w].append(v)
    return dist, sigma, preds, order


def degree(net: MarketNetwork) -> CentralityScores:
    return CentralityScores("degree", net.market_degrees().astype(float))


def betweenness(net: MarketNetwork) -> CentralityScores:
    """Sum over unordered firm pairs of the fraction of shortest paths through each market.

    Brandes dependency accumulation from every firm, counting only firm
    targets; every pair is seen from both ends, hence the final halving.
    """
    adj = _adjacency(net)
    nf = net.n_firms
    total = np.zeros(len(adj))
    for s in range(nf):
        _, sigma, preds, order = _bfs(adj, s)
        delta = [0.0] * len(adj)
        for w in reversed(order):
            coeff = ((1.0 if w < nf else 0.0) + delta[w]) / sigma[w]
            for v in preds[w]:
                delta[v] += sigma[v] * coeff
            if w != s:
                total[w] += delta[w]
    return CentralityScores("betweenness", total[nf:] / 2.0)


def closeness(net: MarketNetwork) -> CentralityScores:
    """Harmonic closeness: sum over firms of 1 / dist(market, firm); unreachable firms add 0."""
    adj = _adjacency(net)
    nf = net.n_firms
    values = np.zeros(net.n_markets)
    for m in range(net.n_markets):
        dist, _, _, _ = _bfs(adj, nf + m)
        values[m] = sum(1.0 / d for d in dist[:nf] if d > 0)
    return CentralityScores("closeness", values)


def compute(net: MarketNetwork, measure: str) -> CentralityScores:
    if measure == "degree":
        return degree(net)
    if measure == "betweenness":
        return betweenness(net)
    if measure == "closeness":
        return closeness(net)
    raise ValueError(f"unknown centrality measure {measure!r}; choose from {MEASURES}")
