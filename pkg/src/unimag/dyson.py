"""Time-ordered propagation.

The truncated Dyson series is accumulated with the recursion

    F_0 = I,    F_k(t) = int_{t0}^{t} H(s) F_{k-1}(s) ds,

so that ``U(t) ~ sum_k (-i)^k F_k(t)``.  Each level costs one cumulative
trapezoid pass over the grid instead of a ``k``-fold nested sum.  The inverse
series uses the mirrored recursion ``G_k(t) = int G_{k-1}(s) H(s) ds`` (the
anti-time-ordered exponential of ``+iH``).

:func:`oracle_propagator` is the ground truth the series are checked against:
an ordered product of exact exponentials at cell midpoints.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import TimeGrid, cumulative_integral
from .hamiltonians import HamiltonianSpec
from .linalg import Array, DimensionMismatchError, expm, unitarity_defect

__all__ = [
    "DYSON_MAX_ORDER",
    "INVERSE_MAX_ORDER",
    "PropagationResult",
    "dyson_series",
    "dyson_inverse_series",
    "oracle_propagator",
    "evolve_state",
]

DYSON_MAX_ORDER = 6
INVERSE_MAX_ORDER = 4
DEFAULT_SERIES_STEPS = 512
DEFAULT_ORACLE_STEPS = 2048


@dataclass
class PropagationResult:
    """Propagator bundle for one method over one window.

    ``N`` defaults to the identity and ``P`` to ``U`` for methods that do not
    unitarize.
    """

    U: Array
    method: str
    N: Array | None = None
    P: Array | None = None
    diagnostics: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        self.U = np.asarray(self.U, dtype=np.complex128)
        if self.N is None:
            self.N = np.eye(self.U.shape[0], dtype=np.complex128)
        if self.P is None:
            self.P = self.U

    @property
    def unitarity_defect(self) -> float:
        return unitarity_defect(self.P)


def _check_order(order: int, cap: int, name: str) -> int:
    if int(order) != order or not 0 <= order <= cap:
        raise ValueError(f"{name} order must be an integer in [0, {cap}], got {order}")
    return int(order)


def dyson_series(H: HamiltonianSpec, grid: TimeGrid, order: int, return_all: bool = False) -> Array:
    """Dyson series truncated after the ``order``-th iterated integral.

    With ``return_all`` the partial propagators ``U(t_j, t0)`` at every grid
    node are returned as a ``(steps + 1, dim, dim)`` stack.
    """
    order = _check_order(order, DYSON_MAX_ORDER, "Dyson")
    Hs = H.sample(grid.nodes)
    F = np.broadcast_to(np.eye(H.dim, dtype=np.complex128), Hs.shape)
    U = F.copy()
    for k in range(1, order + 1):
        F = cumulative_integral(Hs @ F, grid)
        U = U + (-1j) ** k * F
    return U if return_all else U[-1]


def dyson_inverse_series(H: HamiltonianSpec, grid: TimeGrid, order: int, return_all: bool = False) -> Array:
    """Truncated series for ``U^{-1}(t, t0)``.

    At second order this is ``I + i int H - (int H)^2 + int dt' int^{t'} dt'' H(t') H(t'')``;
    the recursion continues the same anti-time-ordered pattern up to order 4.
    """
    order = _check_order(order, INVERSE_MAX_ORDER, "inverse Dyson")
    Hs = H.sample(grid.nodes)
    G = np.broadcast_to(np.eye(H.dim, dtype=np.complex128), Hs.shape)
    V = G.copy()
    for k in range(1, order + 1):
        G = cumulative_integral(G @ Hs, grid)
        V = V + (1j) ** k * G
    return V if return_all else V[-1]


def _midpoint_product(H: HamiltonianSpec, grid: TimeGrid, return_all: bool) -> Array:
    steps = expm(-1j * grid.h * H.sample(grid.midpoints))
    acc = np.eye(H.dim, dtype=np.complex128)
    if not return_all:
        for E in steps:
            acc = E @ acc
        return acc
    out = np.empty((grid.steps + 1, H.dim, H.dim), dtype=np.complex128)
    out[0] = acc
    for j, E in enumerate(steps, start=1):
        acc = E @ acc
        out[j] = acc
    return out


def oracle_propagator(
    H: HamiltonianSpec,
    grid: TimeGrid,
    refine: bool = False,
    return_all: bool = False,
) -> Array:
    """Ordered product of ``expm(-i h H(t_mid))`` over the grid cells.

    The latest cell stands leftmost.  The global error is ``O(h^2)`` with an
    even expansion in ``h``, so ``refine=True`` applies one Richardson step
    ``(4 U_{h/2} - U_h) / 3``, which is no longer exactly unitary.
    """
    if not refine:
        return _midpoint_product(H, grid, return_all)
    coarse = _midpoint_product(H, grid, return_all)
    fine = _midpoint_product(H, grid.refined(2), return_all)
    if return_all:
        fine = fine[::2]
    return (4.0 * fine - coarse) / 3.0


def evolve_state(op, psi0, tol: float = 1e-12) -> Array:
    """Apply a propagator to a normalized state vector."""
    op = np.asarray(op, dtype=np.complex128)
    psi0 = np.asarray(psi0, dtype=np.complex128)
    if psi0.ndim != 1 or op.shape[-1] != psi0.shape[0]:
        raise DimensionMismatchError(f"operator {op.shape} cannot act on state {psi0.shape}")
    norm = np.linalg.norm(psi0)
    if abs(norm - 1.0) > tol:
        raise ValueError(f"initial state must be normalized, ||psi0|| = {norm:.15g}")
    return op @ psi0
