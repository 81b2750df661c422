"""Propagator histories for each method on a common grid.

Every method is causal on the grid: the operator at node ``j`` depends only
on ``H`` over ``[t0, t_j]``, so one pass yields the propagator for every
prefix window.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dyson import PropagationResult, dyson_series, oracle_propagator
from .grid import TimeGrid
from .hamiltonians import HamiltonianSpec
from .linalg import Array, expm
from .magnus import omega_density
from .unitarize import normalizer_exact, sigma_density, unitarized_propagator_exact, xi_density

__all__ = ["METHODS", "Orders", "oracle_history", "propagator_history", "exact_unitarized_history", "propagate"]

METHODS = ("dyson", "magnus", "unitarized_exact", "unitarized_series", "oracle")


@dataclass(frozen=True)
class Orders:
    dyson_k: int = 4
    omega_n: int = 2
    bch_order: int = 3
    compose: str = "product"


def oracle_history(H: HamiltonianSpec, grid: TimeGrid, substeps: int = 4) -> Array:
    """Oracle propagator at every node of ``grid``, computed on a ``substeps``-fold finer grid."""
    return oracle_propagator(H, grid.refined(substeps), return_all=True)[::substeps]


def exact_unitarized_history(U_history: Array) -> Array:
    return np.stack([unitarized_propagator_exact(U) for U in U_history])


def _series_history(H: HamiltonianSpec, grid: TimeGrid, orders: Orders) -> Array:
    omega = omega_density(H, grid, orders.omega_n)
    xi = xi_density(omega, orders.bch_order)
    if orders.compose == "sigma":
        sigma = sigma_density(omega, xi, orders.bch_order)
        return expm(-1j * sigma.cumulative())
    return expm(-0.5 * xi.cumulative()) @ expm(-1j * omega.cumulative())


def propagator_history(
    H: HamiltonianSpec,
    grid: TimeGrid,
    method: str,
    orders: Orders = Orders(),
    oracle_substeps: int = 4,
    U_oracle: Array | None = None,
) -> Array:
    """Stack of the method's evolution operator at each grid node.

    This is ``U`` for ``dyson``, ``magnus`` and ``oracle`` and ``P`` for the
    unitarized methods.  A precomputed oracle history may be passed as
    ``U_oracle`` to avoid recomputing it.
    """
    if method == "oracle":
        return oracle_history(H, grid, oracle_substeps) if U_oracle is None else U_oracle
    if method == "dyson":
        return dyson_series(H, grid, orders.dyson_k, return_all=True)
    if method == "magnus":
        return expm(-1j * omega_density(H, grid, orders.omega_n).cumulative())
    if method == "unitarized_exact":
        U = oracle_history(H, grid, oracle_substeps) if U_oracle is None else U_oracle
        return exact_unitarized_history(U)
    if method == "unitarized_series":
        return _series_history(H, grid, orders)
    raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")


def propagate(
    H: HamiltonianSpec,
    grid: TimeGrid,
    method: str,
    orders: Orders = Orders(),
    oracle_substeps: int = 4,
) -> PropagationResult:
    """Propagator over the whole window, bundled with ``N`` and ``P`` where defined."""
    if method == "unitarized_exact":
        U = oracle_history(H, grid, oracle_substeps)[-1]
        N = normalizer_exact(U)
        return PropagationResult(U=U, method=method, N=N, P=N @ U)
    op = propagator_history(H, grid, method, orders, oracle_substeps)[-1]
    if method == "unitarized_series":
        U = expm(-1j * omega_density(H, grid, orders.omega_n).cumulative()[-1])
        return PropagationResult(U=U, method=method, N=op @ np.linalg.inv(U), P=op)
    return PropagationResult(U=op, method=method)
