"""First-order welfare sensitivity of the equilibrium to per-market shocks.

Because equilibrium quantities are affine in the shock vector, the Jacobian
``J = dq*/d eps`` is constant: column r is ``-gamma beta Lambda e_r`` with
``e_r`` flagging the edges into market r. Two per-market coefficient vectors
are built on top of it:

* ``zeta_paper`` evaluates the closed-form coefficient of the Linear
  heuristic exactly as published (symmetric alpha only);
* ``zeta_gradient`` is the exact gradient at zero shock of a chosen welfare
  variant, and is the one checked against finite differences.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import sparse

from .equilibrium import WELFARE_VARIANTS, EquilibriumModel, social_welfare
from .exceptions import ParameterError

DEFAULT_FD_STEP = 1e-4


@dataclass(frozen=True, eq=False)
class SensitivityReport:
    jacobian: np.ndarray
    zeta_paper: np.ndarray | None
    zeta_gradient: np.ndarray
    variant: str

    def to_dict(self, include_jacobian: bool = False) -> dict:
        out = {
            "zeta_paper": None if self.zeta_paper is None else self.zeta_paper.tolist(),
            "zeta_gradient": self.zeta_gradient.tolist(),
            "variant": self.variant,
        }
        if include_jacobian:
            out["jacobian"] = self.jacobian.tolist()
        return out


def jacobian(model: EquilibriumModel) -> np.ndarray:
    """``|E| x n_markets`` matrix of dq*_edge / d eps_r (constant in eps)."""
    p = model.params
    lam = model.leontief.matrix
    net = model.net
    incidence = sparse.csr_matrix(
        (np.ones(net.n_edges), (net.edge_market, np.arange(net.n_edges))),
        shape=(net.n_markets, net.n_edges),
    )
    # Lambda is symmetric, so (incidence @ Lambda)^T == Lambda @ incidence^T.
    return -p.gamma * p.beta * np.asarray((incidence @ lam).T)


def zeta_paper(model: EquilibriumModel, jac: np.ndarray | None = None) -> np.ndarray:
    """Published closed-form Linear-heuristic coefficient, one per market.

    Evaluates, for every market r,

        -gamma beta sum_ij (alpha - gamma alpha (beta + 2c) sum_kl lam[ij,kl]) sum_k lam[ij,kr]
        - sum_ij gamma alpha sum_kl lam[ij,kl] (sum_kl w[ij,kl] sum_t gamma beta lam[kl,tr])
        + alpha

    term by term, signs included. Only defined for a common alpha.
    """
    p = model.params
    if not p.symmetric:
        raise ParameterError("zeta_paper needs a common alpha across markets")
    alpha = float(p.alpha[0])
    g, b = p.gamma, p.beta
    if jac is None:
        jac = jacobian(model)
    lam_cols = jac / (-g * b)  # sum_k lam[ij, kr]
    q0 = g * alpha * model.leontief.matrix.sum(axis=1)
    first = -g * b * ((alpha - (b + 2.0 * p.c) * q0) @ lam_cols)
    second = -(q0 @ (model.W.csr @ (g * b * lam_cols)))
    return first + second + alpha


def zeta_gradient(
    model: EquilibriumModel,
    variant: str = "with_government",
    jac: np.ndarray | None = None,
) -> np.ndarray:
    """Exact d SW / d eps_r at eps = 0 for the given welfare variant.

    All variants share the quantity part ``J^T (alpha_bar - (beta + 2c) q - W q)``;
    the explicit shock terms add ``alpha_r - beta Q_r`` (with_government),
    ``-beta Q_r`` (eq7) or nothing (components).
    """
    if variant not in WELFARE_VARIANTS:
        raise ParameterError(f"unknown welfare variant {variant!r}; choose from {WELFARE_VARIANTS}")
    p = model.params
    net = model.net
    if jac is None:
        jac = jacobian(model)
    q0 = model.quantities()
    grad_q = model.alpha_edge - (p.beta + 2.0 * p.c) * q0 - model.W.csr @ q0
    zeta = jac.T @ grad_q
    supply = np.bincount(net.edge_market, weights=q0, minlength=net.n_markets)
    if variant == "with_government":
        zeta = zeta + p.alpha - p.beta * supply
    elif variant == "eq7":
        zeta = zeta - p.beta * supply
    return zeta


def finite_difference_gradient(
    model: EquilibriumModel,
    variant: str = "with_government",
    step: float = DEFAULT_FD_STEP,
    evaluator: Callable[[np.ndarray], float] | None = None,
) -> np.ndarray:
    """Central differences ``(SW(h e_r) - SW(-h e_r)) / 2h`` for every market.

    ``evaluator`` maps a shock vector to a welfare value; by default it
    re-solves the equilibrium and evaluates ``variant``.
    """
    p = model.params
    if not step > 0:
        raise ParameterError("finite-difference step must be positive")
    if not 2.0 * step < float(np.min(p.price_bounds)):
        raise ParameterError(f"step {step} too large for the price bound {np.min(p.price_bounds)}")
    if evaluator is None:
        if variant not in WELFARE_VARIANTS:
            raise ParameterError(f"unknown welfare variant {variant!r}")

        def evaluator(eps):
            q = model.quantities(eps, validate=False)
            return social_welfare(model, q, eps, variant)

    m = model.net.n_markets
    grad = np.empty(m)
    for r in range(m):
        e = np.zeros(m)
        e[r] = step
        grad[r] = (evaluator(e) - evaluator(-e)) / (2.0 * step)
    return grad


def sensitivity_report(model: EquilibriumModel, variant: str = "with_government") -> SensitivityReport:
    jac = jacobian(model)
    paper = zeta_paper(model, jac) if model.params.symmetric else None
    return SensitivityReport(
        jacobian=jac,
        zeta_paper=paper,
        zeta_gradient=zeta_gradient(model, variant, jac),
        variant=variant,
    )
