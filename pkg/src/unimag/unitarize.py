"""Unitarized propagation ``P = N U`` for possibly non-Hermitian Hamiltonians.

Two independent routes produce ``P``:

exact
    ``N = (sqrt(U U^H))^{-1}`` from a Hermitian eigendecomposition, giving the
    unitary polar factor of ``U``.
series
    Generator densities.  ``Xi`` is the rate of the truncated BCH series of
    ``exp(-i int Omega) exp(+i int Omega^H)`` so that ``N = expm(-1/2 int Xi)``;
    ``Sigma`` is ``i`` times the rate of the BCH series of
    ``exp(-1/2 int Xi) exp(-i int Omega)`` so that ``P = expm(-i int Sigma)``.

Xi and Sigma samples are symmetrized to Hermitian; the largest defect seen
before symmetrization is kept on the density.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import ceil
from typing import Literal

import numpy as np

from .dyson import DEFAULT_ORACLE_STEPS, oracle_propagator
from .grid import TimeGrid
from .hamiltonians import HamiltonianSpec, normality_defect, split
from .linalg import (
    Array,
    SingularMatrixError,
    adjoint,
    expm,
    fro_norm,
    hermitian_part,
    inv,
    sqrtm_pd,
    unitarity_defect,
)
from .magnus import GeneratorDensity, bch_rate, magnus_exponent, omega_density

__all__ = [
    "UNITARIZE_CONDITION_CAP",
    "UnitarizeReport",
    "normalizer_exact",
    "unitarized_propagator_exact",
    "xi_density",
    "normalizer_series",
    "sigma_density",
    "unitarized_propagator_series",
    "series_product",
    "diagnostics",
    "unitarize",
]

UNITARIZE_CONDITION_CAP = 1e6


def normalizer_exact(U, via: Literal["root", "inverse"] = "root", cap: float = UNITARIZE_CONDITION_CAP) -> Array:
    """Hermitian positive-definite normalizer of ``U``.

    ``via="root"`` computes ``inv(sqrt(U U^H))``; ``via="inverse"`` computes
    ``sqrt(U^{-H} U^{-1})``.  The two agree for any invertible ``U``.
    """
    U = np.asarray(U, dtype=np.complex128)
    if via == "root":
        return hermitian_part(inv(sqrtm_pd(U @ adjoint(U)), cap=cap))
    if via == "inverse":
        Ui = inv(U, cap=cap)
        return sqrtm_pd(adjoint(Ui) @ Ui)
    raise ValueError(f"via must be 'root' or 'inverse', got {via!r}")


def unitarized_propagator_exact(U, cap: float = UNITARIZE_CONDITION_CAP) -> Array:
    """``P = N U``, the unitary polar factor of ``U``.

    Refuses ``U`` with condition number above ``cap``: ``N`` grows like the
    inverse of the smallest singular value of ``U``.
    """
    U = np.asarray(U, dtype=np.complex128)
    cond = float(np.linalg.cond(U))
    if not np.isfinite(cond) or cond > cap:
        raise SingularMatrixError(cond, cap)
    return normalizer_exact(U, cap=cap) @ U


def _symmetrized(grid: TimeGrid, raw: Array, kind: str) -> GeneratorDensity:
    defect = float(np.linalg.norm(raw - adjoint(raw), axis=(1, 2)).max())
    return GeneratorDensity(grid, hermitian_part(raw), kind, hermiticity_defect=defect)


def _check_order(order: int) -> None:
    if order not in (1, 2, 3):
        raise ValueError(f"BCH order must be 1, 2 or 3, got {order}")


def xi_density(omega: GeneratorDensity, order: int = 3) -> GeneratorDensity:
    """Density ``Xi`` with ``expm(int Xi) ~ U U^H`` for ``U = expm(-i int Omega)``.

    Leading term ``-i (Omega - Omega^H)``; the second-order term is the
    Hermitian combination ``(1/2) int^t ([Omega(t), Omega^H(t')] + [Omega(t'), Omega^H(t)]) dt'``.
    """
    if omega.kind != "omega":
        raise ValueError(f"xi_density needs an omega density, got {omega.kind!r}")
    _check_order(order)
    W = omega.cumulative()
    S = omega.samples
    raw = bch_rate(-1j * W, -1j * S, 1j * adjoint(W), 1j * adjoint(S), order)
    return _symmetrized(omega.grid, raw, "xi")


def normalizer_series(xi: GeneratorDensity) -> Array:
    """``N = expm(-1/2 int Xi)``; Hermitian positive definite since ``Xi`` is Hermitian."""
    if xi.kind != "xi":
        raise ValueError(f"normalizer_series needs a xi density, got {xi.kind!r}")
    return hermitian_part(expm(-0.5 * magnus_exponent(xi)))


def sigma_density(omega: GeneratorDensity, xi: GeneratorDensity, order: int = 3) -> GeneratorDensity:
    """Density ``Sigma`` of the unitarized propagator ``P = expm(-i int Sigma)``.

    ``-i Sigma = -i Omega - Xi/2 + (i/4) int^t [Xi, Omega] + ...``.  At first
    order the symmetrized result is ``(Omega + Omega^H)/2``.
    """
    if omega.kind != "omega" or xi.kind != "xi":
        raise ValueError("sigma_density needs an omega and a xi density")
    if omega.grid != xi.grid:
        raise ValueError("omega and xi densities live on different grids")
    _check_order(order)
    Z = xi.cumulative()
    W = omega.cumulative()
    rate = bch_rate(-0.5 * Z, -0.5 * xi.samples, -1j * W, -1j * omega.samples, order)
    return _symmetrized(omega.grid, 1j * rate, "sigma")


def unitarized_propagator_series(sigma: GeneratorDensity) -> Array:
    """``P = expm(-i int Sigma)``."""
    if sigma.kind != "sigma":
        raise ValueError(f"unitarized_propagator_series needs a sigma density, got {sigma.kind!r}")
    return expm(-1j * magnus_exponent(sigma))


def series_product(omega: GeneratorDensity, xi: GeneratorDensity) -> Array:
    """``P = expm(-1/2 int Xi) expm(-i int Omega)``, the product form of ``N U``."""
    return normalizer_series(xi) @ expm(-1j * magnus_exponent(omega))


@dataclass
class UnitarizeReport:
    U: Array
    U_prev: Array
    P_exact: Array
    P_series: Array
    N: Array
    N_series: Array
    omega_density: GeneratorDensity
    xi_density: GeneratorDensity
    sigma_density: GeneratorDensity
    compose: str
    diagnostics: dict[str, float] = field(default_factory=dict)

    @property
    def unitarity_defect_exact(self) -> float:
        return unitarity_defect(self.P_exact)

    @property
    def unitarity_defect_series(self) -> float:
        return unitarity_defect(self.P_series)

    @property
    def path_disagreement(self) -> float:
        return fro_norm(self.P_series - self.P_exact)

    @property
    def newschro_residual(self) -> float:
        return self.diagnostics.get("newschro_residual", float("nan"))


def newschro_residual(P: Array, P_prev: Array, Hc: Array, h: float) -> float:
    """Backward-difference residual of ``dP/dt = -i Hc P`` at the end of the window."""
    return fro_norm((P - P_prev) / h + 1j * Hc @ P)


def diagnostics(H: HamiltonianSpec, grid: TimeGrid, report: UnitarizeReport) -> dict[str, float]:
    H1 = H(grid.t1)
    P_prev = unitarized_propagator_exact(report.U_prev)
    return {
        "newschro_residual": newschro_residual(report.P_exact, P_prev, split(H1)[0], grid.h),
        "normality_defect": normality_defect(H1),
        "hermiticity_defect_sigma": report.sigma_density.hermiticity_defect,
        "hermiticity_defect_xi": report.xi_density.hermiticity_defect,
        "path_disagreement": report.path_disagreement,
    }


def unitarize(
    H: HamiltonianSpec,
    grid: TimeGrid,
    omega_order: int = 2,
    bch_order: int = 3,
    compose: Literal["product", "sigma"] = "product",
    oracle_steps: int = DEFAULT_ORACLE_STEPS,
) -> UnitarizeReport:
    """Run both unitarization paths over ``grid`` and collect diagnostics.

    ``U`` comes from :func:`~unimag.dyson.oracle_propagator` on a refinement of
    ``grid`` with at least ``oracle_steps`` cells.  ``compose`` selects whether
    ``P_series`` is the product ``N U`` of the two series exponentials or the
    single exponential of ``Sigma``.
    """
    if compose not in ("product", "sigma"):
        raise ValueError(f"compose must be 'product' or 'sigma', got {compose!r}")
    factor = max(1, ceil(oracle_steps / grid.steps))
    history = oracle_propagator(H, grid.refined(factor), return_all=True)
    U, U_prev = history[-1], history[-1 - factor]

    N = normalizer_exact(U)
    omega = omega_density(H, grid, omega_order)
    xi = xi_density(omega, bch_order)
    sigma = sigma_density(omega, xi, bch_order)
    P_series = series_product(omega, xi) if compose == "product" else unitarized_propagator_series(sigma)
    report = UnitarizeReport(
        U=U,
        U_prev=U_prev,
        P_exact=N @ U,
        P_series=P_series,
        N=N,
        N_series=normalizer_series(xi),
        omega_density=omega,
        xi_density=xi,
        sigma_density=sigma,
        compose=compose,
    )
    report.diagnostics = diagnostics(H, grid, report)
    return report
