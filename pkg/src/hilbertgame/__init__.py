"""Hilbert-space representation of two-player quantum games.

Strategies are vectors over the base operators ``(Nc, Fc, Nq, Fq)``; each
player's payoff is a Hermitian form ``H`` on the 16-dim system strategy
space, built from the game's initial state and payoff scale matrices.
"""

from .cmatrix import EigenDecomposition, dagger, eig_hermitian, kron, matmul, partial_trace, trace
from .equilibrium import (
    EquilibriumReport,
    ReducedPayoff,
    SpectrumReport,
    best_response_full,
    best_response_iteration,
    best_response_unitary,
    closed_form_payoff,
    ges_search,
    ne_family_scan,
    reduced_payoff,
    spectrum,
    unitary_best_payoff,
    verify_ne,
)
from .errors import (
    ConvergenceError,
    InvalidDensityError,
    NotHermitianError,
    NumericalConsistencyError,
    RejectedInput,
)
from .game import (
    GameDefinition,
    MixedClassicalStrategy,
    build_payoff_tensor,
    canonical_pd,
    classical_mixture,
    classical_submatrix,
    marginal,
    payoff_density_form,
    payoff_operator_form,
    payoff_state_form,
    product_density,
    product_state,
    pure_density,
)
from .strategy import (
    BASIS_NAMES,
    Euler,
    ThetaPhi,
    base_operator,
    expand,
    inner_product,
    is_unitary,
    reconstruct,
    unitary_general,
    unitary_theta_phi,
)

__version__ = "0.1.0"
