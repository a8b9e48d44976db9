"""Bipartite firm-market networks and game parameters.

A :class:`MarketNetwork` is the single source of truth for edge indexing:
every per-edge vector in the package (quantities, rows of the influence
matrix, rows of the Jacobian) follows ``net.edges`` order, which is always
lexicographic in ``(firm_index, market_index)``.
"""

from __future__ import annotations

import csv
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .exceptions import NetworkError, ParameterError

EDGE_HEADER = ("firm_id", "market_id")


@dataclass(frozen=True, eq=False)
class MarketNetwork:
    """Immutable bipartite graph of firms and the markets they can supply.

    Build instances with :meth:`from_edges`, :func:`load_network` or
    :func:`generate_synthetic`; the constructor itself does no validation.
    """

    n_firms: int
    n_markets: int
    edges: tuple[tuple[int, int], ...]
    firm_ids: tuple[str, ...]
    market_ids: tuple[str, ...]
    firm_markets: tuple[tuple[int, ...], ...] = field(repr=False)
    market_firms: tuple[tuple[int, ...], ...] = field(repr=False)
    edge_of: dict[tuple[int, int], int] = field(repr=False)

    @classmethod
    def from_edges(
        cls,
        n_firms: int,
        n_markets: int,
        edges: Iterable[tuple[int, int]],
        firm_ids: Sequence[str] | None = None,
        market_ids: Sequence[str] | None = None,
    ) -> "MarketNetwork":
        """Validate an edge list and return the network in canonical order.

        Raises:
            NetworkError: on duplicate pairs, out-of-range indices, isolated
                firms or markets, or id lists of the wrong length.
        """
        edges = [(int(f), int(m)) for f, m in edges]
        if n_firms < 1 or n_markets < 1:
            raise NetworkError("a network needs at least one firm and one market")
        firm_ids = tuple(firm_ids) if firm_ids is not None else tuple(f"f{i}" for i in range(n_firms))
        market_ids = (
            tuple(market_ids) if market_ids is not None else tuple(f"m{k}" for k in range(n_markets))
        )
        if len(firm_ids) != n_firms or len(market_ids) != n_markets:
            raise NetworkError("id lists must match the firm and market counts")

        seen: set[tuple[int, int]] = set()
        for f, m in edges:
            if not (0 <= f < n_firms and 0 <= m < n_markets):
                raise NetworkError(f"edge ({f}, {m}) is out of range for {n_firms} firms, {n_markets} markets")
            if (f, m) in seen:
                raise NetworkError(f"duplicate edge ({firm_ids[f]}, {market_ids[m]})")
            seen.add((f, m))

        edges.sort()
        firm_markets: list[list[int]] = [[] for _ in range(n_firms)]
        market_firms: list[list[int]] = [[] for _ in range(n_markets)]
        for f, m in edges:
            firm_markets[f].append(m)
            market_firms[m].append(f)

        isolated_firms = [firm_ids[i] for i, ms in enumerate(firm_markets) if not ms]
        isolated_markets = [market_ids[k] for k, fs in enumerate(market_firms) if not fs]
        if isolated_firms or isolated_markets:
            raise NetworkError(
                f"isolated nodes: firms {isolated_firms[:5]}, markets {isolated_markets[:5]}"
            )

        return cls(
            n_firms=n_firms,
            n_markets=n_markets,
            edges=tuple(edges),
            firm_ids=firm_ids,
            market_ids=market_ids,
            firm_markets=tuple(tuple(ms) for ms in firm_markets),
            market_firms=tuple(tuple(sorted(fs)) for fs in market_firms),
            edge_of={e: idx for idx, e in enumerate(edges)},
        )

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def edge_firm(self) -> np.ndarray:
        """Firm index of every edge, in edge order."""
        out = np.fromiter((f for f, _ in self.edges), dtype=np.intp, count=self.n_edges)
        out.setflags(write=False)
        return out

    @cached_property
    def edge_market(self) -> np.ndarray:
        """Market index of every edge, in edge order."""
        out = np.fromiter((m for _, m in self.edges), dtype=np.intp, count=self.n_edges)
        out.setflags(write=False)
        return out

    def market_incidence(self) -> np.ndarray:
        """Dense ``|E| x n_markets`` 0/1 matrix; column r flags the edges into market r."""
        inc = np.zeros((self.n_edges, self.n_markets))
        inc[np.arange(self.n_edges), self.edge_market] = 1.0
        return inc

    def firm_degrees(self) -> np.ndarray:
        return np.array([len(ms) for ms in self.firm_markets], dtype=int)

    def market_degrees(self) -> np.ndarray:
        return np.array([len(fs) for fs in self.market_firms], dtype=int)

    def same_structure(self, other: "MarketNetwork") -> bool:
        return (
            self.n_firms == other.n_firms
            and self.n_markets == other.n_markets
            and self.edges == other.edges
            and self.firm_ids == other.firm_ids
            and self.market_ids == other.market_ids
        )

    def index_map(self) -> dict:
        """External id lists, index-aligned; persisted next to CLI outputs."""
        return {"firms": list(self.firm_ids), "markets": list(self.market_ids)}


@dataclass(eq=False)
class GameParams:
    """Demand, cost and policy parameters of the networked Cournot game.

    ``alpha`` is per market; ``beta`` and ``c`` are scalars shared by all
    markets and firms. ``gamma`` is derived and never stored.
    """

    alpha: np.ndarray
    beta: float = 1.0
    c: float = 1.0
    q_t: float = 0.0
    budget: float = 0.0

    def __post_init__(self):
        alpha = np.array(self.alpha, dtype=float).ravel()
        alpha.setflags(write=False)
        self.alpha = alpha
        self.beta = float(self.beta)
        self.c = float(self.c)
        self.q_t = float(self.q_t)
        self.budget = float(self.budget)
        if alpha.size == 0 or not np.all(np.isfinite(alpha)) or np.any(alpha <= 0):
            raise ParameterError("alpha must be a non-empty vector of positive numbers")
        if not self.beta > 0:
            raise ParameterError(f"beta must be positive, got {self.beta}")
        if not self.c > 0:
            raise ParameterError(f"c must be positive, got {self.c}")
        if not self.q_t >= 0:
            raise ParameterError(f"q_t must be nonnegative, got {self.q_t}")
        if not self.budget >= 0:
            raise ParameterError(f"budget must be nonnegative, got {self.budget}")

    @classmethod
    def uniform(cls, n_markets: int, alpha: float = 10.0, **kwargs) -> "GameParams":
        return cls(alpha=np.full(n_markets, float(alpha)), **kwargs)

    @property
    def gamma(self) -> float:
        return 1.0 / (2.0 * (self.c + self.beta))

    @property
    def n_markets(self) -> int:
        return self.alpha.size

    @property
    def symmetric(self) -> bool:
        """True when every market shares the same demand intercept."""
        return bool(np.all(self.alpha == self.alpha[0]))

    @property
    def price_bounds(self) -> np.ndarray:
        """Per-market shock ceiling alpha_k / beta beyond which prices turn negative."""
        return self.alpha / self.beta

    def replace(self, **changes) -> "GameParams":
        values = dict(alpha=self.alpha, beta=self.beta, c=self.c, q_t=self.q_t, budget=self.budget)
        values.update(changes)
        return GameParams(**values)

    def check_network(self, net: MarketNetwork) -> None:
        if self.n_markets != net.n_markets:
            raise ParameterError(
                f"alpha has {self.n_markets} entries but the network has {net.n_markets} markets"
            )


@dataclass(frozen=True)
class NetworkStats:
    n_firms: int
    n_markets: int
    n_edges: int
    firm_degree_hist: dict[int, int]
    market_degree_hist: dict[int, int]

    def to_dict(self) -> dict:
        return {
            "firms": self.n_firms,
            "markets": self.n_markets,
            "edges": self.n_edges,
            "firm_degree_histogram": {str(k): v for k, v in sorted(self.firm_degree_hist.items())},
            "market_degree_histogram": {str(k): v for k, v in sorted(self.market_degree_hist.items())},
        }


def stats(net: MarketNetwork) -> NetworkStats:
    """Node/edge counts and degree histograms (degree -> number of nodes)."""
    return NetworkStats(
        n_firms=net.n_firms,
        n_markets=net.n_markets,
        n_edges=net.n_edges,
        firm_degree_hist=dict(Counter(net.firm_degrees().tolist())),
        market_degree_hist=dict(Counter(net.market_degrees().tolist())),
    )


def load_network(
    edge_file: str | Path,
    expected_counts: tuple[int, int, int] | None = None,
) -> MarketNetwork:
    """Read a ``firm_id,market_id`` edge table.

    String ids become dense indices in order of first appearance. When
    ``expected_counts`` is given as ``(firms, markets, edges)`` the loaded
    network must match it exactly.
    """
    firm_index: dict[str, int] = {}
    market_index: dict[str, int] = {}
    edges: list[tuple[int, int]] = []
    with open(edge_file, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != EDGE_HEADER:
            raise NetworkError(f"{edge_file}: expected header 'firm_id,market_id', got {header!r}")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != 2:
                raise NetworkError(f"{edge_file}:{lineno}: expected 2 columns, got {len(row)}")
            fid, mid = row[0].strip(), row[1].strip()
            f = firm_index.setdefault(fid, len(firm_index))
            m = market_index.setdefault(mid, len(market_index))
            edges.append((f, m))

    if not edges:
        raise NetworkError(f"{edge_file}: no edges")
    net = MarketNetwork.from_edges(
        len(firm_index), len(market_index), edges, firm_ids=list(firm_index), market_ids=list(market_index)
    )
    if expected_counts is not None:
        actual = (net.n_firms, net.n_markets, net.n_edges)
        if tuple(expected_counts) != actual:
            raise NetworkError(f"count mismatch: expected {tuple(expected_counts)}, got {actual}")
    return net


def _first_appearance_order(net: MarketNetwork) -> list[tuple[int, int]]:
    # Row order whose first appearances reproduce the current indices on reload.
    # Scans edges in canonical order, emitting any edge whose firm and market are
    # already introduced or are exactly the next index to introduce.
    pending = list(net.edges)
    out: list[tuple[int, int]] = []
    next_firm = next_market = 0
    while pending:
        remaining = []
        for f, m in pending:
            if f <= next_firm and m <= next_market:
                out.append((f, m))
                next_firm += f == next_firm
                next_market += m == next_market
            else:
                remaining.append((f, m))
        if len(remaining) == len(pending):
            raise NetworkError("network indices cannot be reproduced by first-appearance order")
        pending = remaining
    return out


def write_network(net: MarketNetwork, dest) -> None:
    """Write the edge table so that :func:`load_network` reproduces ``net`` exactly.

    ``dest`` is a path or an open text stream.
    """
    rows = _first_appearance_order(net)
    if hasattr(dest, "write"):
        _write_rows(net, rows, dest)
        return
    with open(dest, "w", newline="", encoding="utf-8") as fh:
        _write_rows(net, rows, fh)


def _write_rows(net: MarketNetwork, rows, fh) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(EDGE_HEADER)
    for f, m in rows:
        writer.writerow((net.firm_ids[f], net.market_ids[m]))


def generate_synthetic(n_firms: int, n_markets: int, n_edges: int, seed: int) -> MarketNetwork:
    """Random bipartite network with exact counts and no isolated node.

    Coverage is placed first: ``max(n_firms, n_markets)`` edges pairing a
    random permutation of firms with a random permutation of markets
    (cyclically on the smaller side), so every node has degree >= 1. The
    remaining edges are drawn uniformly without replacement from the unused
    pairs.
    """
    if n_firms < 1 or n_markets < 1:
        raise NetworkError("need at least one firm and one market")
    if n_edges < max(n_firms, n_markets) or n_edges > n_firms * n_markets:
        raise NetworkError(
            f"infeasible edge count {n_edges} for {n_firms} firms and {n_markets} markets"
        )
    rng = np.random.default_rng(seed)
    firm_perm = rng.permutation(n_firms)
    market_perm = rng.permutation(n_markets)
    cover = max(n_firms, n_markets)
    used = np.zeros(n_firms * n_markets, dtype=bool)
    for i in range(cover):
        used[firm_perm[i % n_firms] * n_markets + market_perm[i % n_markets]] = True

    free = np.flatnonzero(~used)
    extra = rng.choice(free, size=n_edges - cover, replace=False)
    used[extra] = True
    flat = np.flatnonzero(used)
    edges = [(int(x // n_markets), int(x % n_markets)) for x in flat]
    # Number markets in order of discovery along the firm-major scan, so the
    # canonical edge order is also a first-appearance order on reload.
    relabel: dict[int, int] = {}
    for _, m in edges:
        relabel.setdefault(m, len(relabel))
    edges = [(f, relabel[m]) for f, m in edges]
    return MarketNetwork.from_edges(n_firms, n_markets, edges)
