"""Magnus generator densities and the truncated BCH combiner.

Generators are stored in density form: a propagator is
``expm(-i * int_{t0}^{t1} Omega(t) dt)``, and ``Omega(t)`` is sampled on the
grid nodes.  For a Hermitian Hamiltonian every truncation of ``Omega`` is
Hermitian, so the exponent is anti-Hermitian and the propagator unitary.

The density up to third order is

    Omega_1(t) = H(t)
    Omega_2(t) = -(i/2) int_{t0}^{t} [H(t), H(t')] dt'
    Omega_3(t) = -(1/6) int_{t0}^{t} dt' int_{t0}^{t'} dt''
                     ([H(t), [H(t'), H(t'')]] + [H(t''), [H(t'), H(t)]])

Rather than nesting quadratures, it is evaluated as ``i`` times the rate of
the standard exponent series ``M`` for ``A = -iH``:

    M_1' = A,   M_2' = (1/2)[A, M_1],   M_3' = (1/2)[A, M_2] + (1/12)[M_1, [M_1, A]]

which needs only prefix integrals ``M_1``, ``M_2`` and costs ``O(steps)``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .grid import TimeGrid, cumulative_integral, integral
from .hamiltonians import HamiltonianSpec
from .linalg import Array, DimensionMismatchError, NumericalError, adjoint, commutator, expm

__all__ = [
    "GeneratorDensity",
    "ConvergenceGuardError",
    "omega_density",
    "magnus_exponent",
    "bch_combine",
    "bch_rate",
]

Kind = Literal["omega", "xi", "sigma"]

OMEGA_MAX_ORDER = 3
BCH_MAX_ORDER = 3
BCH_WARN_NORM = float(np.log(2.0))
BCH_HARD_NORM = float(np.pi)
HERMITIAN_SAMPLE_TOL = 1e-8


class ConvergenceGuardError(NumericalError):
    pass


@dataclass(frozen=True)
class GeneratorDensity:
    """Matrix-valued samples of a generator density on the nodes of ``grid``.

    ``hermiticity_defect`` is the largest ``||S - S^H||_F`` over the samples
    before they were symmetrized (zero for ``omega``, which is never
    symmetrized).
    """

    grid: TimeGrid
    samples: Array
    kind: Kind
    hermiticity_defect: float = 0.0

    def __post_init__(self):
        if self.kind not in ("omega", "xi", "sigma"):
            raise ValueError(f"unknown density kind {self.kind!r}")
        s = self.samples
        if s.ndim != 3 or s.shape[0] != self.grid.steps + 1 or s.shape[1] != s.shape[2]:
            raise ValueError(f"samples of shape {s.shape} do not match a grid with {self.grid.steps + 1} nodes")
        if not np.all(np.isfinite(s)):
            raise ValueError(f"{self.kind} density has non-finite samples")
        if self.kind != "omega":
            defect = np.linalg.norm(s - adjoint(s), axis=(1, 2)).max()
            if defect > HERMITIAN_SAMPLE_TOL:
                raise ValueError(f"{self.kind} density samples are not Hermitian (defect {defect:.3e})")

    @property
    def dim(self) -> int:
        return self.samples.shape[1]

    def cumulative(self) -> Array:
        """``int_{t0}^{t_j}`` of the density at every node."""
        return cumulative_integral(self.samples, self.grid)


def omega_density(H: HamiltonianSpec, grid: TimeGrid, order: int = 2) -> GeneratorDensity:
    """Magnus generator density ``Omega(t)`` truncated at ``order`` (1 to 3)."""
    if order not in (1, 2, 3):
        raise ValueError(f"Magnus order must be 1, 2 or 3, got {order}")
    Hs = H.sample(grid.nodes)
    omega = Hs.copy()
    if order >= 2:
        A = -1j * Hs
        M1 = cumulative_integral(A, grid)
        dM2 = 0.5 * commutator(A, M1)
        omega += 1j * dM2
        if order >= 3:
            M2 = cumulative_integral(dM2, grid)
            dM3 = 0.5 * commutator(A, M2) + commutator(M1, commutator(M1, A)) / 12.0
            omega += 1j * dM3
    return GeneratorDensity(grid, omega, "omega")


def magnus_exponent(density: GeneratorDensity) -> Array:
    """``int_{t0}^{t1}`` of the density (composite trapezoid).

    The associated propagator is ``expm(-1j * magnus_exponent(density))``.
    """
    return integral(density.samples, density.grid)


def _bch_terms(A: Array, B: Array, order: int) -> Array:
    C = A + B
    if order >= 2:
        AB = commutator(A, B)
        C = C + 0.5 * AB
        if order >= 3:
            C = C + (commutator(A, AB) - commutator(B, AB)) / 12.0
    return C


def bch_combine(A, B, order: int = 3) -> Array:
    """Truncated Baker-Campbell-Hausdorff series ``C`` with ``e^A e^B ~ e^C``.

    ``C = A + B + [A,B]/2 + [A,[A,B]]/12 - [B,[A,B]]/12`` cut after terms of
    total degree ``order``.  A warning is issued when ``||A|| + ||B|| > ln 2``
    and :class:`ConvergenceGuardError` is raised above ``pi``.
    """
    A = np.asarray(A, dtype=np.complex128)
    B = np.asarray(B, dtype=np.complex128)
    if A.shape != B.shape:
        raise DimensionMismatchError(f"dimension mismatch: {A.shape} vs {B.shape}")
    if order not in (1, 2, 3):
        raise ValueError(f"BCH order must be 1, 2 or 3, got {order}")
    size = np.linalg.norm(A) + np.linalg.norm(B)
    if size > BCH_HARD_NORM:
        raise ConvergenceGuardError(f"||A|| + ||B|| = {size:.4g} exceeds the BCH guard {BCH_HARD_NORM:.4g}")
    if size > BCH_WARN_NORM:
        warnings.warn(f"||A|| + ||B|| = {size:.4g} > ln 2; BCH series may converge poorly", RuntimeWarning, stacklevel=2)
    return _bch_terms(A, B, order)


def bch_rate(A: Array, dA: Array, B: Array, dB: Array, order: int) -> Array:
    """Time derivative of the truncated BCH series of ``A(t)`` and ``B(t)``.

    All arguments may be stacks over grid nodes.  Integrating the rate from
    ``t0`` (where ``A = B = 0``) reproduces ``bch_combine(A(t), B(t))``, which
    is what turns a product of two exponentials into a generator density.
    """
    C = dA + dB
    if order >= 2:
        AB = commutator(A, B)
        dAB = commutator(dA, B) + commutator(A, dB)
        C = C + 0.5 * dAB
        if order >= 3:
            d_aab = commutator(dA, AB) + commutator(A, dAB)
            d_bab = commutator(dB, AB) + commutator(B, dAB)
            C = C + (d_aab - d_bab) / 12.0
    return C


def propagator_from_density(density: GeneratorDensity) -> Array:
    return expm(-1j * magnus_exponent(density))
