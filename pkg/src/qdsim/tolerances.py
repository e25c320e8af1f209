"""Single numeric-policy record shared by the library and the test suite.

Every tolerance used to accept or reject a state, a map, or a trajectory
lives here, one field per invariant, so tests and library code cannot
drift apart.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    # construction-time validity of states and operators
    hermitian_rel: float = 1e-10       # ||M - M^dag||_F <= rel * max(||M||_F, 1)
    trace_one: float = 1e-10           # |tr(rho) - 1|
    eigenvalue_floor: float = -1e-9    # density eigenvalues may dip this far below 0
    unit_norm: float = 1e-10           # state vectors
    bloch_ball: float = 1e-9           # |n| may exceed 1 by this much

    # linear algebra
    expm_pauli_split: float = 1e-12    # |v.v| below which the series branch is used
    exp_argument_cap: float = 700.0    # reject exponentials beyond exp-overflow range

    # map normalization
    singular_trace: float = 1e-12      # tr(F rho) at or below this is a hard error
    identity_effect: float = 1e-10     # ||F - I|| for the trace-preserving case

    # fixed-step integration drift, checked at sampled states
    ode_trace_drift: float = 1e-8
    ode_norm_drift: float = 1e-8
    ode_hermitian_drift: float = 1e-8

    # closed-form branch selection
    orthogonal_c1: float = 1e-12       # |g.omega| below this counts as orthogonal
    degenerate_c2_rel: float = 1e-10   # |g^2 - omega^2| relative to max(g^2, omega^2)
    pure_state: float = 1e-8           # purity >= 1 - tol counts as pure


TOL = Tolerances()
