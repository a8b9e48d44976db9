"""Budget sweeps comparing allocation strategies.

For every budget on the grid and every strategy the harness ranks the
markets, allocates the budget greedily, solves the shocked equilibrium and
records social welfare. Random is averaged over ``random_trials``
permutations seeded ``seed + trial``. All scenarios of one budget are solved
in a single matrix product against the cached Leontief inverse.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import centrality
from .equilibrium import WELFARE_VARIANTS, EquilibriumModel, social_welfare
from .exceptions import ParameterError
from .policy import (
    _CENTRALITY_OF,
    STRATEGIES,
    ZETA_MODES,
    Allocation,
    Strategy,
    allocate,
    rank_markets,
    saturation_budget,
)
from .sensitivity import zeta_gradient, zeta_paper

log = logging.getLogger(__name__)

CSV_HEADER = ("budget", "strategy", "social_welfare", "linear_minus_strategy")
DEFAULT_BUDGET_POINTS = 50
DEFAULT_RANDOM_TRIALS = 50


def default_budget_grid(params, n_points: int = DEFAULT_BUDGET_POINTS) -> list[float]:
    """``n_points`` evenly spaced budgets from 0 to the saturation budget."""
    if n_points < 1:
        raise ParameterError("need at least one budget point")
    if n_points == 1:
        return [0.0]
    return np.linspace(0.0, saturation_budget(params), n_points).tolist()


@dataclass
class SweepConfig:
    budget_grid: list[float]
    strategies: tuple[str, ...] = STRATEGIES
    random_trials: int = DEFAULT_RANDOM_TRIALS
    variant: str = "with_government"
    zeta_mode: str = "gradient"
    seed: int = 0

    def __post_init__(self):
        grid = [float(b) for b in self.budget_grid]
        if not grid or grid[0] != 0.0:
            raise ParameterError("budget grid must start at 0")
        if any(b2 <= b1 for b1, b2 in zip(grid, grid[1:])):
            raise ParameterError("budget grid must be strictly increasing")
        self.budget_grid = grid
        unknown = [s for s in self.strategies if s not in STRATEGIES]
        if unknown:
            raise ParameterError(f"unknown strategies {unknown}")
        if self.random_trials < 1:
            raise ParameterError("random_trials must be >= 1")
        if self.variant not in WELFARE_VARIANTS:
            raise ParameterError(f"unknown welfare variant {self.variant!r}")
        if self.zeta_mode not in ZETA_MODES:
            raise ParameterError(f"unknown zeta mode {self.zeta_mode!r}")
        # Fixed row order regardless of how the subset was given.
        self.strategies = tuple(s for s in STRATEGIES if s in self.strategies)


@dataclass(frozen=True)
class TrajectoryRow:
    budget: float
    strategy: str
    social_welfare: float
    linear_minus_strategy: float


@dataclass
class TrajectoryTable:
    rows: list[TrajectoryRow]
    allocations: dict[tuple[str, float], Allocation] = field(default_factory=dict, repr=False)

    def welfare(self, strategy: str) -> np.ndarray:
        return np.array([r.social_welfare for r in self.rows if r.strategy == strategy])

    def difference(self, strategy: str) -> np.ndarray:
        return np.array([r.linear_minus_strategy for r in self.rows if r.strategy == strategy])

    def budgets(self) -> np.ndarray:
        seen = dict.fromkeys(r.budget for r in self.rows)
        return np.array(list(seen))

    def write_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_HEADER)
            for r in self.rows:
                writer.writerow(
                    (repr(r.budget), r.strategy, repr(r.social_welfare), repr(r.linear_minus_strategy))
                )


def _ranking_scores(model: EquilibriumModel, config: SweepConfig) -> dict[str, np.ndarray]:
    scores = {}
    if config.zeta_mode == "paper":
        scores["Linear"] = zeta_paper(model)
    else:
        scores["Linear"] = zeta_gradient(model, config.variant)
    measures = {_CENTRALITY_OF[s][0] for s in config.strategies if s in _CENTRALITY_OF}
    cache = {m: centrality.compute(model.net, m).values for m in sorted(measures)}
    for s in config.strategies:
        if s in _CENTRALITY_OF:
            scores[s] = cache[_CENTRALITY_OF[s][0]]
    return scores


def run_sweep(model: EquilibriumModel, config: SweepConfig, keep_allocations: bool = False) -> TrajectoryTable:
    """Welfare trajectory of every configured strategy over the budget grid.

    Linear is always evaluated, since every row reports its difference to it.
    """
    net, params = model.net, model.params
    scores = _ranking_scores(model, config)
    deterministic = [s for s in STRATEGIES if s != "Random" and (s in config.strategies or s == "Linear")]
    strategies = {
        s: Strategy(s, zeta_mode=config.zeta_mode, variant=config.variant) for s in deterministic
    }
    orders = {s: rank_markets(strategies[s], net, params, scores=scores[s]) for s in deterministic}
    random_strats = []
    if "Random" in config.strategies:
        random_strats = [Strategy("Random", seed=config.seed + t) for t in range(config.random_trials)]
    random_orders = [rank_markets(st, net) for st in random_strats]

    rows: list[TrajectoryRow] = []
    kept: dict[tuple[str, float], Allocation] = {}
    for budget in config.budget_grid:
        allocs = [allocate(net, params, orders[s], budget=budget, strategy=strategies[s]) for s in deterministic]
        allocs += [
            allocate(net, params, order, budget=budget, strategy=st)
            for st, order in zip(random_strats, random_orders)
        ]
        eps = np.column_stack([a.eps for a in allocs])
        q = model.quantities(eps)
        sw = [social_welfare(model, q[:, j], eps[:, j], config.variant) for j in range(len(allocs))]

        values = dict(zip(deterministic, sw))
        if random_strats:
            trials = sw[len(deterministic):]
            values["Random"] = float(np.mean(trials))
        linear = values["Linear"]
        for s in config.strategies:
            rows.append(TrajectoryRow(budget, s, values[s], linear - values[s]))
        if keep_allocations:
            for a in allocs:
                name = a.strategy.kind if a.strategy.kind != "Random" else f"Random-seed{a.strategy.seed}"
                kept[(name, budget)] = a
        log.debug("budget %.6g done", budget)
    return TrajectoryTable(rows=rows, allocations=kept)


def dominance_rate(table: TrajectoryTable, strategy: str) -> float:
    """Share of interior budgets (excluding the first and last grid points) where Linear is strictly ahead."""
    diff = table.difference(strategy)
    interior = diff[1:-1]
    if interior.size == 0:
        return float("nan")
    return float(np.mean(interior > 0))
