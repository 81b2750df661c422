"""Magnus, Dyson and unitarized propagators for time-dependent, possibly
non-Hermitian Hamiltonians."""

from .dyson import PropagationResult, dyson_inverse_series, dyson_series, evolve_state, oracle_propagator
from .grid import TimeGrid
from .hamiltonians import (
    HamiltonianSpec,
    HatanoNelsonSpec,
    build_hatano_nelson,
    constant_hamiltonian,
    hermitian_part_of,
    normality_defect,
    random_bounded_hamiltonian,
    split,
)
from .magnus import GeneratorDensity, bch_combine, magnus_exponent, omega_density
from .propagate import METHODS, Orders, propagate
from .unitarize import (
    UnitarizeReport,
    normalizer_exact,
    normalizer_series,
    sigma_density,
    unitarize,
    unitarized_propagator_exact,
    unitarized_propagator_series,
    xi_density,
)

__version__ = "0.1.0"
