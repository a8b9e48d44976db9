"""Closed-form Nash equilibria of networked Cournot competition with supply shocks.

The equilibrium of the game with government shocks ``eps`` (one entry per
market) solves the linear system

    (I + gamma W) q = gamma (alpha_bar - beta eps_bar)

where ``alpha_bar`` and ``eps_bar`` lift the per-market values onto edges and
``W`` couples edges sharing a firm (weight 2c) or a market (weight beta).
The inverse of ``I + gamma W`` is cached on :class:`EquilibriumModel` so that
repeated solves during a budget sweep are a single matrix product.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from .exceptions import ConvergenceError, ParameterError, SingularSystemError
from .network import GameParams, MarketNetwork

WELFARE_VARIANTS = ("eq7", "components", "with_government")


@dataclass(frozen=True, eq=False)
class InfluenceMatrix:
    """Edge-by-edge strategic coupling, dense and CSR views of the same matrix."""

    dense: np.ndarray
    csr: sparse.csr_matrix = field(repr=False)

    @property
    def size(self) -> int:
        return self.dense.shape[0]


@dataclass(frozen=True, eq=False)
class LeontiefInverse:
    matrix: np.ndarray
    residual_norm: float


def build_influence_matrix(net: MarketNetwork, params: GameParams) -> InfluenceMatrix:
    """W[e1, e2] = 2c for same firm / other market, beta for other firm / same market."""
    rows, cols, vals = [], [], []
    for f, markets in enumerate(net.firm_markets):
        idx = [net.edge_of[(f, m)] for m in markets]
        for a in idx:
            for b in idx:
                if a != b:
                    rows.append(a)
                    cols.append(b)
                    vals.append(2.0 * params.c)
    for m, firms in enumerate(net.market_firms):
        idx = [net.edge_of[(f, m)] for f in firms]
        for a in idx:
            for b in idx:
                if a != b:
                    rows.append(a)
                    cols.append(b)
                    vals.append(params.beta)
    n = net.n_edges
    csr = sparse.csr_matrix((vals, (rows, cols)), shape=(n, n))
    dense = csr.toarray()
    dense.setflags(write=False)
    return InfluenceMatrix(dense=dense, csr=csr)


def leontief_inverse(W: InfluenceMatrix, gamma: float) -> LeontiefInverse:
    """Dense inverse of ``I + gamma W`` with a max-norm residual check.

    Raises:
        SingularSystemError: if the residual ``(I + gamma W) inv - I``
            exceeds ``1e-8 * |E|`` in max-norm.
    """
    n = W.size
    system = np.eye(n) + gamma * W.dense
    limit = 1e-8 * n
    try:
        inv = np.linalg.solve(system, np.eye(n))
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError(f"I + gamma*W is singular: {exc}", float("inf")) from exc
    residual = float(np.max(np.abs(system @ inv - np.eye(n))))
    if not residual <= limit:
        raise SingularSystemError(
            f"Leontief inverse residual {residual:.3e} exceeds {limit:.3e}", residual
        )
    # W is symmetric; average away the O(eps) asymmetry left by LU.
    inv = 0.5 * (inv + inv.T)
    inv.setflags(write=False)
    return LeontiefInverse(matrix=inv, residual_norm=residual)


def validate_shock(params: GameParams, eps: np.ndarray) -> np.ndarray:
    """Check ``0 <= eps_k < alpha_k / beta`` and return eps as a float array."""
    eps = np.asarray(eps, dtype=float)
    if eps.shape[0] != params.n_markets:
        raise ParameterError(f"shock vector has {eps.shape[0]} entries, expected {params.n_markets}")
    if np.any(eps < 0):
        raise ParameterError("shocks must be nonnegative")
    bounds = params.price_bounds if eps.ndim == 1 else params.price_bounds[:, None]
    if np.any(eps >= bounds):
        bad = np.argwhere(eps >= bounds)[0]
        raise ParameterError(f"shock {eps[tuple(bad)]} in market {bad[0]} reaches alpha/beta")
    return eps


@dataclass(frozen=True, eq=False)
class EquilibriumOutcome:
    q_star: np.ndarray
    eps: np.ndarray
    market_supply: np.ndarray
    prices: np.ndarray
    firm_profits: np.ndarray
    consumer_surplus: float
    welfare: dict[str, float]
    warnings: tuple[str, ...] = ()

    @property
    def interior(self) -> bool:
        return bool(np.all(self.q_star > 0))

    def to_dict(self) -> dict:
        return {
            "q_star": self.q_star.tolist(),
            "epsilon": self.eps.tolist(),
            "market_supply": self.market_supply.tolist(),
            "prices": self.prices.tolist(),
            "firm_profits": self.firm_profits.tolist(),
            "consumer_surplus": self.consumer_surplus,
            "welfare": dict(self.welfare),
            "warnings": list(self.warnings),
        }


class EquilibriumModel:
    """A network and parameter set with its influence matrix and Leontief inverse.

    Args:
        net: the market network.
        params: game parameters; ``alpha`` must have one entry per market.
    """

    def __init__(self, net: MarketNetwork, params: GameParams):
        params.check_network(net)
        self.net = net
        self.params = params
        self.W = build_influence_matrix(net, params)
        self.leontief = leontief_inverse(self.W, params.gamma)
        self.alpha_edge = params.alpha[net.edge_market]

    @property
    def gamma(self) -> float:
        return self.params.gamma

    def rhs(self, eps: np.ndarray) -> np.ndarray:
        """gamma * (alpha_bar - beta * eps_bar), column-wise for 2-D eps."""
        eps_edge = eps[self.net.edge_market]
        alpha = self.alpha_edge if eps.ndim == 1 else self.alpha_edge[:, None]
        return self.gamma * (alpha - self.params.beta * eps_edge)

    def quantities(self, eps: np.ndarray | None = None, validate: bool = True) -> np.ndarray:
        """Equilibrium quantity per edge.

        ``eps`` may be a length-``n_markets`` vector or an ``n_markets x K``
        matrix of K shock scenarios (result is then ``|E| x K``). With
        ``validate=False`` negative or oversized shocks are accepted, which
        finite-difference probes at the origin need.
        """
        if eps is None:
            eps = np.zeros(self.net.n_markets)
        eps = validate_shock(self.params, eps) if validate else np.asarray(eps, dtype=float)
        rhs = self.rhs(eps)
        q = self.leontief.matrix @ rhs
        residual = q + self.gamma * (self.W.csr @ q) - rhs
        limit = 1e-9 * float(np.max(self.params.alpha))
        worst = float(np.max(np.abs(residual))) if residual.size else 0.0
        if not worst <= limit:
            raise SingularSystemError(f"equilibrium residual {worst:.3e} exceeds {limit:.3e}", worst)
        return q

    def welfare(self, q: np.ndarray, eps: np.ndarray, variant: str) -> float:
        return social_welfare(self, q, eps, variant)

    def outcome(self, eps: np.ndarray | None = None, validate: bool = True) -> EquilibriumOutcome:
        if eps is None:
            eps = np.zeros(self.net.n_markets)
        eps = np.asarray(eps, dtype=float)
        q = self.quantities(eps, validate=validate)
        return self.outcome_from_quantities(q, eps)

    def outcome_from_quantities(self, q: np.ndarray, eps: np.ndarray) -> EquilibriumOutcome:
        p = self.params
        net = self.net
        supply = np.bincount(net.edge_market, weights=q, minlength=net.n_markets)
        prices = p.alpha - p.beta * (supply + eps)
        firm_supply = np.bincount(net.edge_firm, weights=q, minlength=net.n_firms)
        revenue = np.bincount(net.edge_firm, weights=q * prices[net.edge_market], minlength=net.n_firms)
        profits = revenue - p.c * firm_supply**2
        cs = float(np.sum((p.alpha - prices) ** 2) / (2.0 * p.beta))
        notes = []
        if np.any(q < 0):
            notes.append(
                f"{int(np.sum(q < 0))} edge quantities are negative; the interior equilibrium "
                "assumption does not hold"
            )
        return EquilibriumOutcome(
            q_star=q,
            eps=eps,
            market_supply=supply,
            prices=prices,
            firm_profits=profits,
            consumer_surplus=cs,
            welfare={v: social_welfare(self, q, eps, v) for v in WELFARE_VARIANTS},
            warnings=tuple(notes),
        )


def social_welfare(model: EquilibriumModel, q: np.ndarray, eps: np.ndarray, variant: str) -> float:
    """Social welfare at quantities ``q`` and shocks ``eps``.

    Variants:
        ``eq7``: q.alpha - (beta/2 + c) q.q - q.Wq/2 - (beta eps_bar).q - (beta/2) eps.eps
        ``components``: total firm profit plus consumer surplus
        ``with_government``: sum_e h(q_e) + sum_k h(eps_k) - q.Wq/2 - beta sum_k eps_k Q_k,
            with h_k(x) = alpha_k x - (beta/2 + c) x^2
    """
    p = model.params
    net = model.net
    if variant == "components":
        supply = np.bincount(net.edge_market, weights=q, minlength=net.n_markets)
        prices = p.alpha - p.beta * (supply + eps)
        firm_supply = np.bincount(net.edge_firm, weights=q, minlength=net.n_firms)
        profit = float(q @ prices[net.edge_market] - p.c * firm_supply @ firm_supply)
        return profit + float(np.sum((p.alpha - prices) ** 2) / (2.0 * p.beta))

    quad = p.beta / 2.0 + p.c
    cross = 0.5 * float(q @ (model.W.csr @ q))
    if variant == "eq7":
        return float(
            q @ model.alpha_edge
            - quad * (q @ q)
            - cross
            - p.beta * (eps[net.edge_market] @ q)
            - 0.5 * p.beta * (eps @ eps)
        )
    if variant == "with_government":
        supply = np.bincount(net.edge_market, weights=q, minlength=net.n_markets)
        h_edges = q @ model.alpha_edge - quad * (q @ q)
        h_shocks = eps @ p.alpha - quad * (eps @ eps)
        return float(h_edges + h_shocks - cross - p.beta * (eps @ supply))
    raise ParameterError(f"unknown welfare variant {variant!r}; choose from {WELFARE_VARIANTS}")


def equilibrium(net: MarketNetwork, params: GameParams, eps=None) -> np.ndarray:
    """Per-edge equilibrium quantities (convenience wrapper)."""
    return EquilibriumModel(net, params).quantities(eps)


def outcome(net: MarketNetwork, params: GameParams, eps=None) -> EquilibriumOutcome:
    return EquilibriumModel(net, params).outcome(eps)


def best_response_oracle(
    net: MarketNetwork,
    params: GameParams,
    eps=None,
    tol: float = 1e-12,
    max_iters: int = 100_000,
    schedule: str = "sequential",
) -> np.ndarray:
    """Projected best-response dynamics, independent of W and the Leontief inverse.

    Each update sets
    ``q_ik = max(0, gamma (alpha_k - beta eps_k - 2c sum_{l != k} q_il - beta sum_{j != i} q_jk))``
    using only the adjacency lists. ``schedule="sequential"`` updates edges
    in place one after another (Gauss-Seidel); this converges on every
    instance because ``I + gamma W`` is symmetric positive definite.
    ``schedule="synchronous"`` updates all edges from the previous iterate
    (Jacobi) and diverges when ``gamma W`` has an eigenvalue above 1.

    Raises:
        ConvergenceError: if the max change is still >= ``tol`` after
            ``max_iters`` sweeps.
    """
    if tol <= 0:
        raise ParameterError("tol must be positive")
    if schedule not in ("sequential", "synchronous"):
        raise ParameterError(f"unknown schedule {schedule!r}")
    eps = np.zeros(net.n_markets) if eps is None else np.asarray(eps, dtype=float)
    gamma, beta, c = params.gamma, params.beta, params.c
    alpha = params.alpha
    edges = net.edges
    own = [[net.edge_of[(f, l)] for l in net.firm_markets[f] if l != m] for f, m in edges]
    rivals = [[net.edge_of[(j, m)] for j in net.market_firms[m] if j != f] for f, m in edges]
    base = [alpha[m] - beta * eps[m] for _, m in edges]

    q = [0.0] * len(edges)
    change = float("inf")
    for _ in range(max_iters):
        src = q if schedule == "sequential" else list(q)
        change = 0.0
        for e in range(len(edges)):
            val = base[e] - 2.0 * c * sum(src[x] for x in own[e]) - beta * sum(src[x] for x in rivals[e])
            new = max(0.0, gamma * val)
            change = max(change, abs(new - q[e]))
            q[e] = new
        if change < tol:
            return np.array(q)
        if not np.isfinite(change):
            break
    raise ConvergenceError(f"best-response dynamics did not converge (last change {change:.3e})", change)
