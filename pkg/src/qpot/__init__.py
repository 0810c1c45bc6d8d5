"""Quantum-potential toolkit for polynomial Hamiltonians.

Exact series decomposition of polynomial operators acting on a polar-form
wavefunction into classical and quantum parts (configuration and momentum
representations), dispersion/localisation energetics for analytic
reference states, and causal trajectory integration exhibiting the
representation asymmetry of the quantum force.
"""

from .errors import (CausalityError, IncompatibleError, NodePointError,
                     NonUniformGridError, OperatorParseError, ParseError,
                     PhaseUnwrapFailure, QpotError,
                     QuadratureNotConvergedError, StepTooLargeError)
from .expansion import (CONFIGURATION, MOMENTUM, REPRESENTATIONS,
                        ExpansionTerm, LatticePoint, PolynomialOperator,
                        QhjExpansion, differentiate_terms, evaluate_expansion,
                        expand, km_lattice)
from .airy import airy_pair
from .states import (NATURAL, SampledState, StateField, UnitSystem,
                     airy_state, linear_momentum_state, polynomial_state,
                     qho_state, sampled_state)
from .oracle import operator_quotient, oracle_exact, quotient_derivatives
from .energetics import (EnergyProfile, WignerMomentReport,
                         continuity_residual, decompose_config,
                         decompose_momentum_qho, density_maxima,
                         log_density_curvature, node_mask, profile_for_state,
                         stationarity_residual, wigner_moment_check)
from .dynamics import (DivergenceReport, EffectiveHamiltonian,
                       TrajectoryRecord, hamilton_rhs, integrate,
                       representation_pair, rk4_step, symplectic_break,
                       twin_state)
from .figures import render_figures
from .verify import run_suites

__version__ = "0.1.0"

__all__ = [
    "CONFIGURATION", "MOMENTUM", "REPRESENTATIONS", "NATURAL", "__version__",
    "PolynomialOperator", "ExpansionTerm", "QhjExpansion", "LatticePoint",
    "expand", "km_lattice", "evaluate_expansion", "differentiate_terms",
    "airy_pair", "StateField", "UnitSystem", "SampledState", "airy_state",
    "linear_momentum_state", "qho_state", "sampled_state", "polynomial_state",
    "operator_quotient", "oracle_exact", "quotient_derivatives",
    "EnergyProfile", "WignerMomentReport", "decompose_config",
    "decompose_momentum_qho", "profile_for_state", "density_maxima",
    "node_mask", "log_density_curvature", "stationarity_residual",
    "continuity_residual", "wigner_moment_check", "EffectiveHamiltonian",
    "TrajectoryRecord", "DivergenceReport", "hamilton_rhs", "integrate",
    "rk4_step", "symplectic_break", "representation_pair", "twin_state",
    "render_figures", "run_suites", "QpotError", "ParseError",
    "OperatorParseError", "IncompatibleError", "NodePointError",
    "NonUniformGridError", "PhaseUnwrapFailure", "QuadratureNotConvergedError",
    "StepTooLargeError", "CausalityError",
]
