"""Market rankings and greedy budget allocation of government supply.

The allocation loop visits markets in ranked order and gives each one the
largest shock allowed by three caps: the per-market limit ``q_t``, the price
bound ``alpha_r / beta`` (strict), and what remains of the total supply the
budget can pay for, ``sqrt(B / c) - S``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import centrality
from .equilibrium import WELFARE_VARIANTS, EquilibriumModel
from .exceptions import ParameterError
from .network import GameParams, MarketNetwork
from .sensitivity import zeta_gradient, zeta_paper

STRATEGIES = ("Linear", "AscDeg", "DescDeg", "AscBet", "DescBet", "AscCL", "DescCL", "Random")
ZETA_MODES = ("gradient", "paper")

_CENTRALITY_OF = {
    "AscDeg": ("degree", False),
    "DescDeg": ("degree", True),
    "AscBet": ("betweenness", False),
    "DescBet": ("betweenness", True),
    "AscCL": ("closeness", False),
    "DescCL": ("closeness", True),
}

# Strictness margin for eps_k < alpha_k / beta, relative to the bound.
PRICE_MARGIN = 1e-9
# Relative slack on the budget constraint; sqrt/square round trips overshoot B by ~1 ulp.
BUDGET_RTOL = 1e-12


@dataclass(frozen=True)
class Strategy:
    kind: str
    seed: int | None = None
    zeta_mode: str = "gradient"
    variant: str = "with_government"

    def __post_init__(self):
        if self.kind not in STRATEGIES:
            raise ParameterError(f"unknown strategy {self.kind!r}; choose from {STRATEGIES}")
        if self.kind == "Random" and self.seed is None:
            raise ParameterError("the Random strategy needs a seed")
        if self.zeta_mode not in ZETA_MODES:
            raise ParameterError(f"unknown zeta mode {self.zeta_mode!r}")
        if self.variant not in WELFARE_VARIANTS:
            raise ParameterError(f"unknown welfare variant {self.variant!r}")

    def to_dict(self) -> dict:
        out: dict = {"kind": self.kind}
        if self.kind == "Random":
            out["seed"] = self.seed
        if self.kind == "Linear":
            out["zeta_mode"] = self.zeta_mode
            if self.zeta_mode == "gradient":
                out["variant"] = self.variant
        return out


@dataclass(frozen=True, eq=False)
class Allocation:
    eps: np.ndarray
    order_used: tuple[int, ...]
    total_supply: float
    cost: float
    strategy: Strategy | None = field(default=None)

    def to_dict(self) -> dict:
        return {
            "strategy": None if self.strategy is None else self.strategy.to_dict(),
            "epsilon": self.eps.tolist(),
            "total_supply": self.total_supply,
            "cost": self.cost,
            "order_used": list(self.order_used),
        }


def order_by_scores(scores, descending: bool) -> list[int]:
    """Stable ranking; ties always go to the lower market index."""
    scores = np.asarray(scores, dtype=float)
    idx = np.arange(scores.size)
    key = -scores if descending else scores
    return np.lexsort((idx, key)).tolist()


def strategy_scores(
    strategy: Strategy,
    net: MarketNetwork,
    params: GameParams,
    model: EquilibriumModel | None = None,
) -> np.ndarray | None:
    """The score vector a strategy ranks by (None for Random)."""
    if strategy.kind == "Random":
        return None
    if strategy.kind == "Linear":
        model = model if model is not None else EquilibriumModel(net, params)
        if strategy.zeta_mode == "paper":
            return zeta_paper(model)
        return zeta_gradient(model, strategy.variant)
    measure, _ = _CENTRALITY_OF[strategy.kind]
    return centrality.compute(net, measure).values


def rank_markets(
    strategy: Strategy,
    net: MarketNetwork,
    params: GameParams | None = None,
    scores=None,
) -> list[int]:
    """Market visiting order for a strategy.

    ``scores`` overrides the computed signal for score-based strategies.
    Linear and Desc* rank descending, Asc* ascending; Random is a seeded
    uniform permutation.
    """
    if strategy.kind == "Random":
        rng = np.random.default_rng(strategy.seed)
        return rng.permutation(net.n_markets).tolist()
    if scores is None:
        if strategy.kind == "Linear" and params is None:
            raise ParameterError("Linear ranking needs zeta scores or game parameters")
        scores = strategy_scores(strategy, net, params)
    scores = np.asarray(scores, dtype=float)
    if scores.shape != (net.n_markets,):
        raise ParameterError(f"expected {net.n_markets} scores, got shape {scores.shape}")
    descending = strategy.kind == "Linear" or _CENTRALITY_OF[strategy.kind][1]
    return order_by_scores(scores, descending)


def market_caps(params: GameParams) -> np.ndarray:
    """Per-market shock cap min(q_t, alpha_k/beta - margin), ignoring the budget."""
    bounds = params.price_bounds
    return np.minimum(params.q_t, bounds - PRICE_MARGIN * bounds)


def saturation_budget(params: GameParams) -> float:
    """Budget at which every market can reach min(q_t, alpha_k / beta)."""
    return params.c * float(np.sum(np.minimum(params.q_t, params.price_bounds))) ** 2


def allocate(
    net: MarketNetwork,
    params: GameParams,
    ordering,
    budget: float | None = None,
    q_t: float | None = None,
    strategy: Strategy | None = None,
    only_positive: np.ndarray | None = None,
) -> Allocation:
    """Greedy allocation along ``ordering``.

    ``budget`` and ``q_t`` default to the values in ``params``. Passing a
    score vector as ``only_positive`` skips markets whose score is <= 0.
    """
    budget = params.budget if budget is None else float(budget)
    q_t = params.q_t if q_t is None else float(q_t)
    if budget < 0 or q_t < 0:
        raise ParameterError("budget and q_t must be nonnegative")
    ordering = [int(r) for r in ordering]
    if sorted(ordering) != list(range(net.n_markets)):
        raise ParameterError("ordering must be a permutation of the markets")

    c = params.c
    bounds = params.price_bounds
    reach = math.sqrt(budget / c)
    eps = np.zeros(net.n_markets)
    supplied = 0.0
    for r in ordering:
        if not c * supplied**2 < budget:
            break
        if only_positive is not None and only_positive[r] <= 0:
            continue
        bound = bounds[r] - PRICE_MARGIN * bounds[r]
        amount = max(0.0, min(q_t, bound, reach - supplied))
        eps[r] = amount
        supplied += amount
    return Allocation(
        eps=eps,
        order_used=tuple(ordering),
        total_supply=supplied,
        cost=c * supplied**2,
        strategy=strategy,
    )


def check_feasibility(eps, params: GameParams, budget: float | None = None) -> list[str]:
    """Violated constraints of the shock vector (empty list when feasible)."""
    budget = params.budget if budget is None else float(budget)
    eps = np.asarray(eps, dtype=float)
    problems = []
    if eps.shape != (params.n_markets,):
        return [f"shock vector has shape {eps.shape}, expected ({params.n_markets},)"]
    for k in np.flatnonzero(eps < 0):
        problems.append(f"market {k}: shock {eps[k]} < 0")
    for k in np.flatnonzero(eps > params.q_t):
        problems.append(f"market {k}: shock {eps[k]} > q_t {params.q_t}")
    bounds = params.price_bounds
    for k in np.flatnonzero(eps >= bounds):
        problems.append(f"market {k}: shock {eps[k]} >= alpha/beta {bounds[k]}")
    cost = params.c * float(eps.sum()) ** 2
    if cost > budget * (1.0 + BUDGET_RTOL):
        problems.append(f"cost {cost} exceeds budget {budget}")
    return problems


def run_strategy(
    strategy: Strategy,
    model: EquilibriumModel,
    budget: float,
    scores=None,
) -> Allocation:
    """Rank with ``strategy`` and allocate ``budget`` on the model's network."""
    order = rank_markets(strategy, model.net, model.params, scores=scores)
    return allocate(model.net, model.params, order, budget=budget, strategy=strategy)
