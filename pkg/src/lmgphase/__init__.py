"""Ground-state geometric phase of the Lipkin-Meshkov-Glick model."""

from .biaxial import (BosonCoefficients, SqueezeSolution, biaxial_phase,
                      epsilon_biaxial, hp_coefficients, rotation_angle)
from .errors import (ConfigError, ConvergenceError, DomainError, InsufficientPoints,
                     LMGError, NoRootError, SizeError, StabilityError)
from .model import (BiaxialParams, PhaseResult, RotationFrame, UniaxialParams,
                    validate_biaxial, validate_uniaxial)
from .series import (WeightTable, geometric_phase_series, tanh_sq_from_epsilon,
                     untruncated_mean, weight_table)
from .uniaxial import (DisplacementSolution, epsilon_uniaxial, lambda_roots,
                       select_lambda0, uniaxial_phase)

__version__ = "0.1.0"
