"""Heralded squeezed Fock state generation.

Two-mode Gaussian states, the beam-splitter and controlled-Z generation
protocols, and loss and detector-inefficiency models.
"""

from importlib.metadata import PackageNotFoundError, version as _version

try:
    __version__ = _version("artifact")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.1.0"

from .errors import (CapacityError, ConvergenceError, InvalidParametersError,
                     NoSolutionError, NormalizationError,
                     SingularConfigurationError, SqfockError, TruncationError,
                     UnheraldableOutcomeError)
from .numerics import DEFAULT_QUAD, N_CAP, QuadConfig
from .states import SFTarget, TmegParams
from .protocol import (BeamSplitter, ControlledZ, cz_decompose, energy_cost,
                       entangler_to_tmeg, optimal_entangler, solve_inputs)

__all__ = [
    "BeamSplitter", "CapacityError", "ControlledZ", "ConvergenceError",
    "DEFAULT_QUAD", "InvalidParametersError", "N_CAP", "NoSolutionError",
    "NormalizationError", "QuadConfig", "SFTarget", "SingularConfigurationError",
    "SqfockError", "TmegParams", "TruncationError", "UnheraldableOutcomeError",
    "cz_decompose", "energy_cost", "entangler_to_tmeg", "optimal_entangler",
    "solve_inputs", "__version__",
]
