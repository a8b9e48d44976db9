"""Independent oracles and instance builders shared by the test modules.

Nothing here calls into the package's numerical code paths; each oracle
rebuilds what it needs from the raw edge list.
"""

from collections import deque
from fractions import Fraction
from itertools import combinations

import numpy as np

from netcournot.network import GameParams, generate_synthetic


def random_instance(seed, max_firms=8, max_markets=8, density=0.5, symmetric_alpha=False):
    """Seeded random network and parameters for property tests."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, max_firms + 1))
    m = int(rng.integers(1, max_markets + 1))
    e = int(np.clip(round(density * n * m), max(n, m), n * m))
    net = generate_synthetic(n, m, e, seed=seed)
    alpha = np.full(m, rng.uniform(5, 15)) if symmetric_alpha else rng.uniform(5, 15, m)
    params = GameParams(alpha=alpha, beta=rng.uniform(0.5, 2.0), c=rng.uniform(0.5, 2.0))
    return net, params


def coupling(e1, e2, beta, c):
    """Entry of the edge coupling matrix from the raw rule."""
    if e1[0] == e2[0] and e1[1] != e2[1]:
        return 2.0 * c
    if e1[0] != e2[0] and e1[1] == e2[1]:
        return beta
    return 0.0


def naive_system(edges, beta, c):
    gamma = 1.0 / (2.0 * (c + beta))
    n = len(edges)
    return np.array(
        [[(1.0 if i == j else 0.0) + gamma * coupling(edges[i], edges[j], beta, c) for j in range(n)] for i in range(n)]
    )


def naive_equilibrium(edges, alpha, beta, c, eps):
    gamma = 1.0 / (2.0 * (c + beta))
    rhs = np.array([gamma * (alpha[m] - beta * eps[m]) for _, m in edges])
    return np.linalg.solve(naive_system(edges, beta, c), rhs)


def naive_zeta_paper(edges, n_markets, alpha, beta, c):
    """Term-by-term loop evaluation of the published Linear-heuristic coefficient."""
    gamma = 1.0 / (2.0 * (c + beta))
    lam = np.linalg.inv(naive_system(edges, beta, c))
    n = len(edges)
    out = []
    for r in range(n_markets):
        into_r = [x for x in range(n) if edges[x][1] == r]
        first = 0.0
        second = 0.0
        for ij in range(n):
            row_sum = sum(lam[ij][kl] for kl in range(n))
            first += (alpha - gamma * alpha * (beta + 2 * c) * row_sum) * sum(lam[ij][x] for x in into_r)
            inner = 0.0
            for kl in range(n):
                w = coupling(edges[ij], edges[kl], beta, c)
                if w:
                    inner += w * sum(gamma * beta * lam[kl][t] for t in into_r)
            second += gamma * alpha * row_sum * inner
        out.append(-gamma * beta * first - second + alpha)
    return np.array(out)


def _graph(net):
    nf = net.n_firms
    adj = {v: set() for v in range(nf + net.n_markets)}
    for f, m in net.edges:
        adj[f].add(nf + m)
        adj[nf + m].add(f)
    return adj


def brute_betweenness(net):
    """Enumerate every simple path between each firm pair; exact Fractions."""
    adj = _graph(net)
    nf = net.n_firms
    scores = [Fraction(0)] * net.n_markets

    def paths(u, target, seen):
        if u == target:
            yield [u]
            return
        for w in adj[u]:
            if w not in seen:
                for rest in paths(w, target, seen | {w}):
                    yield [u] + rest

    for a, b in combinations(range(nf), 2):
        found = list(paths(a, b, {a}))
        if not found:
            continue
        shortest = min(len(p) for p in found)
        best = [p for p in found if len(p) == shortest]
        for m in range(net.n_markets):
            through = sum(1 for p in best if nf + m in p[1:-1])
            scores[m] += Fraction(through, len(best))
    return scores


def all_pairs_distances(net):
    adj = _graph(net)
    dist = {}
    for s in adj:
        d = {s: 0}
        queue = deque([s])
        while queue:
            v = queue.popleft()
            for w in adj[v]:
                if w not in d:
                    d[w] = d[v] + 1
                    queue.append(w)
        dist[s] = d
    return dist


def brute_closeness(net):
    dist = all_pairs_distances(net)
    nf = net.n_firms
    return [
        sum(Fraction(1, dist[nf + m][f]) for f in range(nf) if f in dist[nf + m])
        for m in range(net.n_markets)
    ]


def line_scan_counts(path):
    """(firms, markets, edges) by scanning the raw edge file."""
    firms, markets, rows = set(), set(), 0
    with open(path, encoding="utf-8") as fh:
        next(fh)
        for line in fh:
            if line.strip():
                f, m = line.rstrip("\n").split(",")
                firms.add(f)
                markets.add(m)
                rows += 1
    return len(firms), len(markets), rows


def allocation_invariants(allocate_fn, params, order, grid):
    """Check feasibility, order respect, monotonicity and saturation of a greedy allocator.

    ``allocate_fn(budget)`` returns the shock vector; every check is recomputed here
    from ``params`` alone.
    """
    bound = params.alpha / params.beta
    caps = np.minimum(params.q_t, bound - 1e-9 * bound)
    totals = []
    for budget in grid:
        eps = np.asarray(allocate_fn(budget))
        assert np.all(eps >= 0) and np.all(eps <= params.q_t) and np.all(eps < bound)
        assert params.c * eps.sum() ** 2 <= budget * (1 + 1e-12)
        totals.append(eps.sum())
        # Every market ahead of the last supplied one is filled to its cap.
        supplied = [p for p, r in enumerate(order) if eps[r] > 0]
        if supplied:
            for p in range(supplied[-1]):
                assert eps[order[p]] == caps[order[p]]
        if budget >= params.c * caps.sum() ** 2:
            np.testing.assert_allclose(eps, caps, rtol=1e-12)
    assert all(t2 >= t1 for t1, t2 in zip(totals, totals[1:]))
