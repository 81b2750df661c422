"""Time-dependent Hamiltonians, the Hermitian / anti-Hermitian split, and the
Hatano-Nelson hopping model.

Conventions: hbar = 1 and ``H = Hc + i J`` with ``Hc`` and ``J`` Hermitian.
Nothing downstream assumes ``[Hc, J] = 0``; the commutator is reported by
:func:`normality_defect` instead.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass
from typing import Union

import numpy as np

from .grid import TimeGrid
from .linalg import Array, adjoint, as_matrix, commutator, fro_norm

__all__ = [
    "HamiltonianSpec",
    "HatanoNelsonSpec",
    "TIME_PROFILES",
    "split",
    "normality_defect",
    "build_hatano_nelson",
    "random_bounded_hamiltonian",
    "hermitian_part_of",
    "constant_hamiltonian",
]

TIME_PROFILES = ("constant", "polynomial", "trigonometric")

Coupling = Union[float, Callable[[float], float]]


@dataclass(frozen=True)
class HamiltonianSpec:
    """A matrix-valued function of time.

    Attributes
    ----------
    dim : int
        Hilbert-space dimension.
    evaluate : callable
        ``t -> (dim, dim)`` complex array.  Must be a pure function of ``t``.
    norm_bound : float
        Upper estimate of ``sup_t ||H(t)||_F`` over the window of interest.
    """

    dim: int
    evaluate: Callable[[float], Array]
    norm_bound: float

    def __call__(self, t: float) -> Array:
        M = as_matrix(self.evaluate(float(t)))
        if M.shape != (self.dim, self.dim):
            raise ValueError(f"H({t}) has shape {M.shape}, expected {(self.dim, self.dim)}")
        return M

    def sample(self, times) -> Array:
        """Stack of ``H(t)`` for each ``t`` in ``times``, shape ``(len(times), dim, dim)``."""
        return np.stack([self(t) for t in np.asarray(times, dtype=float)])

    def validate(self, grid: TimeGrid) -> None:
        """Check finiteness and the norm bound on the grid nodes."""
        norms = np.linalg.norm(self.sample(grid.nodes), axis=(1, 2))
        worst = float(norms.max())
        if worst > self.norm_bound * (1 + 1e-12):
            raise ValueError(f"norm_bound {self.norm_bound:.6g} is below sampled max ||H(t)||_F = {worst:.6g}")


def _sampled_bound(evaluate, times) -> float:
    return float(max(fro_norm(evaluate(float(t))) for t in times))


def constant_hamiltonian(H) -> HamiltonianSpec:
    M = as_matrix(H)
    M.setflags(write=False)
    return HamiltonianSpec(M.shape[0], lambda t: M, fro_norm(M))


def split(H) -> tuple[Array, Array]:
    """Hermitian and anti-Hermitian parts: ``H = Hc + i J``.

    ``Hc = (H + H^H)/2`` and ``J = (H - H^H)/(2i)``, both Hermitian.
    """
    H = np.asarray(H, dtype=np.complex128)
    Hd = adjoint(H)
    Hc = 0.5 * (H + Hd)
    J = -0.5j * (H - Hd)
    return Hc, J


def normality_defect(H) -> float:
    """``||[Hc, J]||_F``; zero exactly when ``H`` commutes with its adjoint."""
    Hc, J = split(H)
    return fro_norm(commutator(Hc, J))


def hermitian_part_of(H: HamiltonianSpec) -> HamiltonianSpec:
    """The ``J -> 0`` reduction of a Hamiltonian: ``t -> Hc(t)``."""
    return HamiltonianSpec(H.dim, lambda t: split(H(t))[0], H.norm_bound)


@dataclass(frozen=True)
class HatanoNelsonSpec:
    """Open chain of ``l`` sites with asymmetric nearest-neighbour hopping.

    ``tau[i]`` is the time-independent symmetric hopping on bond ``(i, i+1)``
    and ``gamma[i]`` the time-dependent asymmetry, given either as a callable
    ``t -> float`` or a constant.
    """

    l: int
    tau: Sequence[float]
    gamma: Sequence[Coupling]


def _as_function(g: Coupling) -> Callable[[float], float]:
    if callable(g):
        return g
    value = float(g)
    return lambda t: value


def build_hatano_nelson(spec: HatanoNelsonSpec, times=None) -> HamiltonianSpec:
    """Single-particle hopping matrix of the Hatano-Nelson chain.

    Entry ``M[i, i+1] = tau_i - gamma_i(t)`` (hop from site ``i+1`` to ``i``)
    and ``M[i+1, i] = tau_i + gamma_i(t)``, all other entries zero.  Sites are
    numbered from 1 in the model and from 0 in the array.

    ``times`` are the sample points used for the norm-bound estimate
    (default: 1025 points on ``[0, 1]``).
    """
    l = int(spec.l)
    if l < 2:
        raise ValueError(f"Hatano-Nelson chain needs l >= 2, got {spec.l}")
    tau = np.asarray(spec.tau, dtype=float)
    if tau.shape != (l - 1,):
        raise ValueError(f"tau must have length l-1 = {l - 1}, got {tau.size}")
    if len(spec.gamma) != l - 1:
        raise ValueError(f"gamma must have length l-1 = {l - 1}, got {len(spec.gamma)}")
    gammas = [_as_function(g) for g in spec.gamma]
    bonds = np.arange(l - 1)

    def evaluate(t: float) -> Array:
        g = np.array([f(t) for f in gammas], dtype=float)
        M = np.zeros((l, l), dtype=np.complex128)
        M[bonds, bonds + 1] = tau - g
        M[bonds + 1, bonds] = tau + g
        return M

    if times is None:
        times = np.linspace(0.0, 1.0, 1025)
    return HamiltonianSpec(l, evaluate, _sampled_bound(evaluate, times))


def random_bounded_hamiltonian(
    dim: int,
    bound: float,
    seed: int,
    time_profile: str = "constant",
    window: tuple[float, float] = (0.0, 1.0),
    hermitian: bool = False,
) -> HamiltonianSpec:
    """Seeded random Hamiltonian ``A``, ``A + t B`` or ``A + sin(t) B``.

    ``A`` and ``B`` are complex Gaussian matrices (Hermitian parts only when
    ``hermitian``) rescaled so that ``||H(t)||_F <= bound`` for every ``t`` in
    ``window`` by the triangle inequality.
    """
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    if not bound > 0:
        raise ValueError(f"bound must be > 0, got {bound}")
    if time_profile not in TIME_PROFILES:
        raise ValueError(f"time_profile must be one of {TIME_PROFILES}, got {time_profile!r}")
    rng = np.random.default_rng(seed)

    def draw() -> Array:
        M = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        if hermitian:
            M = 0.5 * (M + M.conj().T)
        return M / np.linalg.norm(M)

    A, B = draw(), draw()
    lo, hi = float(window[0]), float(window[1])
    if time_profile == "constant":
        A = bound * A
        B = np.zeros_like(A)
        profile = lambda t: 0.0
    elif time_profile == "polynomial":
        A = 0.5 * bound * A
        B = 0.5 * bound * B / max(abs(lo), abs(hi), 1.0)
        profile = lambda t: t
    else:
        A = 0.5 * bound * A
        B = 0.5 * bound * B
        profile = np.sin
    A.setflags(write=False)
    B.setflags(write=False)

    def evaluate(t: float) -> Array:
        return A + profile(t) * B

    return HamiltonianSpec(dim, evaluate, float(bound))
