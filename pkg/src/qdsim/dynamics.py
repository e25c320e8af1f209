"""Nonlinear master-equation dynamics.

The flow implemented here is, with M = G - iH and W = 2G + sum L_a^dag L_a,

    d/dt rho = M rho + rho M^dag + sum_a L_a rho L_a^dag - rho * tr(rho W)

which conserves tr(rho) and reduces to the standard trace-preserving
Lindblad form whenever W = 0. For L_a = 0 the flow is solved in closed
form by the normalized conjugation rho(t) = K rho0 K^dag / tr(...) with
K = exp((G - iH) t); that propagator doubles as the oracle for the
fixed-step integrator.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import (
    DimensionError,
    DomainError,
    IntegrationDivergedError,
    UnsupportedModeError,
    ValidityError,
)
from .kraus import KrausFamily
from .linalg import as_operator, dagger, frobenius, is_hermitian, matrix_exponential, pauli_dot
from .states import density_matrix, state_vector
from .tolerances import TOL


@dataclass(frozen=True)
class Generator:
    """Triple (H, G, {L_a}): Hermitian drift, Hermitian gain, jump operators."""

    hamiltonian: np.ndarray
    damping: np.ndarray
    lindblads: tuple = ()

    def __init__(self, hamiltonian, damping, lindblads=()) -> None:
        h = as_operator(hamiltonian)
        g = as_operator(damping)
        ls = tuple(as_operator(l) for l in lindblads)
        if not is_hermitian(h):
            raise ValidityError("H is not Hermitian to tolerance")
        if not is_hermitian(g):
            raise ValidityError("G is not Hermitian to tolerance")
        dim = h.shape[0]
        if g.shape != (dim, dim) or any(l.shape != (dim, dim) for l in ls):
            raise DimensionError("generator parts must share one dimension")
        object.__setattr__(self, "hamiltonian", h)
        object.__setattr__(self, "damping", g)
        object.__setattr__(self, "lindblads", ls)
        # cached combinations used in every rhs evaluation
        w = 2.0 * g
        pairs = []
        for l in ls:
            lh = dagger(l)
            w = w + lh @ l
            pairs.append((l, lh))
        object.__setattr__(self, "_m", g - 1j * h)
        object.__setattr__(self, "_mh", dagger(g - 1j * h))
        object.__setattr__(self, "_w", w)
        object.__setattr__(self, "_lpairs", tuple(pairs))

    @classmethod
    def qubit(cls, omega, g, lindblads=()) -> "Generator":
        """H = omega.sigma/2, G = g.sigma/2 for real 3-vectors omega, g."""
        omega = np.asarray(omega, dtype=float)
        g = np.asarray(g, dtype=float)
        return cls(0.5 * pauli_dot(omega), 0.5 * pauli_dot(g), lindblads)

    @property
    def dim(self) -> int:
        return self.hamiltonian.shape[0]


@dataclass(frozen=True)
class TimeParameterizedGenerator:
    """A time -> Generator map with an explicit autonomy flag."""

    at: Callable[[float], Generator]
    time_independent: bool = False

    @classmethod
    def constant(cls, gen: Generator) -> "TimeParameterizedGenerator":
        return cls(at=lambda t: gen, time_independent=True)


def as_time_parameterized(gen) -> TimeParameterizedGenerator:
    if isinstance(gen, TimeParameterizedGenerator):
        return gen
    return TimeParameterizedGenerator.constant(gen)


@dataclass(frozen=True)
class IntegratorConfig:
    t_end: float
    step: float = 1e-3
    renormalize_each_step: bool = False
    sample_stride: int = 1
    # None means the shared TOL.eigenvalue_floor; long damped runs near a
    # pure attractor may need a looser floor to absorb RK4's radial bias
    eigenvalue_floor: Optional[float] = None

    def __post_init__(self) -> None:
        if self.step <= 0.0:
            raise DomainError("integrator step must be positive")
        if self.t_end < 0.0:
            raise DomainError("t_end must be nonnegative")
        if self.sample_stride < 1:
            raise DomainError("sample_stride must be at least 1")


@dataclass(frozen=True)
class Trajectory:
    """Sampled states plus named derived real series."""

    times: np.ndarray
    states: tuple
    derived: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        t = np.asarray(self.times, dtype=float)
        if t.ndim != 1 or len(self.states) != t.shape[0]:
            raise DimensionError("times and states must have equal length")
        if t.shape[0] > 1 and not (np.diff(t) > 0.0).all():
            raise ValidityError("trajectory times must be strictly increasing")
        for name, series in self.derived.items():
            if np.asarray(series).shape[0] != t.shape[0]:
                raise DimensionError(f"derived series {name!r} has wrong length")
        object.__setattr__(self, "times", t)

    def __len__(self) -> int:
        return self.times.shape[0]

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]


def gksl_rhs(gen: Generator, rho: np.ndarray) -> np.ndarray:
    """Right-hand side of the trace-conserving nonlinear master equation."""
    if rho.shape != (gen.dim, gen.dim):
        raise DimensionError("state dimension does not match the generator")
    out = gen._m @ rho + rho @ gen._mh
    for l, lh in gen._lpairs:
        out += l @ rho @ lh
    gain = np.trace(rho @ gen._w).real
    return out - gain * rho


def standard_lindblad_rhs(gen: Generator, rho: np.ndarray) -> np.ndarray:
    """Trace-preserving Lindblad form; the G field is ignored."""
    if rho.shape != (gen.dim, gen.dim):
        raise DimensionError("state dimension does not match the generator")
    h = gen.hamiltonian
    out = -1j * (h @ rho - rho @ h)
    for l, lh in gen._lpairs:
        lhl = lh @ l
        out += l @ rho @ lh - 0.5 * (lhl @ rho + rho @ lhl)
    return out


def state_vector_rhs(gen: Generator, psi: np.ndarray, kappa: float = 0.0) -> np.ndarray:
    """d/dt psi = (-iH + G - <G> + i kappa) psi; norm-preserving for any kappa."""
    if gen.lindblads:
        raise UnsupportedModeError("state-vector form requires empty lindblads")
    gpsi = gen.damping @ psi
    mean_g = np.real(np.conjugate(psi) @ gpsi)
    return (-1j) * (gen.hamiltonian @ psi) + gpsi - mean_g * psi + 1j * kappa * psi


def closed_form_propagate(gen: Generator, rho0: np.ndarray, t: float) -> np.ndarray:
    """rho(t) = K rho0 K^dag / tr(...) with K = exp((G - iH) t); L_a = 0 only."""
    if gen.lindblads:
        raise UnsupportedModeError("closed form requires empty lindblads")
    k = matrix_exponential(gen._m * t)
    return KrausFamily((k,)).apply_normalized(rho0)


def mean_energy(gen: Generator, rho: np.ndarray) -> float:
    """tr(rho H), checked real."""
    val = complex(np.trace(rho @ gen.hamiltonian))
    if abs(val.imag) > 1e-10 * max(1.0, abs(val.real)):
        raise ValidityError(f"mean energy has imaginary part {val.imag:.3e}")
    return val.real


def finite_difference_generator_check(gen: Generator, rho: np.ndarray, dt: float) -> float:
    """Residual of the first-order Kraus family against the master equation.

    Builds K0 = I + dt (G - iH), K_a = sqrt(dt) L_a, applies the normalized
    map, and returns ||(Phi_dt(rho) - rho)/dt - rhs||_F. The caller asserts
    the O(dt) convergence rate.
    """
    if dt <= 0.0:
        raise DomainError("dt must be positive")
    rho = density_matrix(rho)
    eye = np.eye(gen.dim, dtype=complex)
    ops = [eye + dt * gen._m] + [np.sqrt(dt) * l for l in gen.lindblads]
    family = KrausFamily(tuple(ops))
    stepped = family.apply_normalized(rho)
    return frobenius((stepped - rho) / dt - gksl_rhs(gen, rho))


def _check_density_sample(rho: np.ndarray, t: float, renormalized: bool, floor: float) -> None:
    if not np.isfinite(rho).all():
        raise IntegrationDivergedError("state has non-finite entries", t)
    herm = frobenius(rho - dagger(rho))
    if herm > TOL.ode_hermitian_drift * max(1.0, frobenius(rho)):
        raise IntegrationDivergedError(f"hermiticity drift {herm:.3e}", t)
    tr = np.trace(rho).real
    if not renormalized and abs(tr - 1.0) > TOL.ode_trace_drift:
        raise IntegrationDivergedError(f"trace drift {tr - 1.0:.3e}", t)
    w = np.linalg.eigvalsh(0.5 * (rho + dagger(rho)))
    if w.min() < floor:
        raise IntegrationDivergedError(f"eigenvalue {w.min():.3e} below the floor", t)


def evolve(gen, rho0: np.ndarray, cfg: IntegratorConfig) -> Trajectory:
    """Classical fixed-step RK4 on gksl_rhs, sampled every sample_stride steps.

    The generator is queried at the stage times t, t+h/2, t+h. Sampled
    states must satisfy the density-matrix invariants (trace drift bound
    is waived when renormalize_each_step is set); a breach raises with
    the offending time.
    """
    tp = as_time_parameterized(gen)
    rho = density_matrix(rho0)
    floor = cfg.eigenvalue_floor if cfg.eigenvalue_floor is not None else TOL.eigenvalue_floor
    h = cfg.step
    n_steps = int(round(cfg.t_end / h))
    times = [0.0]
    states = [rho.copy()]
    gen_t = tp.at(0.0)
    autonomous = tp.time_independent
    for i in range(n_steps):
        t = i * h
        g_mid = gen_t if autonomous else tp.at(t + 0.5 * h)
        g_end = gen_t if autonomous else tp.at(t + h)
        k1 = gksl_rhs(gen_t, rho)
        k2 = gksl_rhs(g_mid, rho + (0.5 * h) * k1)
        k3 = gksl_rhs(g_mid, rho + (0.5 * h) * k2)
        k4 = gksl_rhs(g_end, rho + h * k3)
        rho = rho + (h / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
        if cfg.renormalize_each_step:
            rho = rho / np.trace(rho).real
        gen_t = g_end
        if (i + 1) % cfg.sample_stride == 0 or i + 1 == n_steps:
            t_now = (i + 1) * h
            _check_density_sample(rho, t_now, cfg.renormalize_each_step, floor)
            times.append(t_now)
            states.append(rho.copy())
    return Trajectory(times=np.asarray(times), states=tuple(states))


def evolve_state_vector(gen, psi0: np.ndarray, cfg: IntegratorConfig,
                        kappa: float = 0.0) -> Trajectory:
    """RK4 on the norm-preserving state-vector form; same sampling rules."""
    tp = as_time_parameterized(gen)
    psi = state_vector(psi0)
    h = cfg.step
    n_steps = int(round(cfg.t_end / h))
    times = [0.0]
    states = [psi.copy()]
    gen_t = tp.at(0.0)
    autonomous = tp.time_independent
    for i in range(n_steps):
        t = i * h
        g_mid = gen_t if autonomous else tp.at(t + 0.5 * h)
        g_end = gen_t if autonomous else tp.at(t + h)
        k1 = state_vector_rhs(gen_t, psi, kappa)
        k2 = state_vector_rhs(g_mid, psi + (0.5 * h) * k1, kappa)
        k3 = state_vector_rhs(g_mid, psi + (0.5 * h) * k2, kappa)
        k4 = state_vector_rhs(g_end, psi + h * k3, kappa)
        psi = psi + (h / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
        if cfg.renormalize_each_step:
            psi = psi / np.linalg.norm(psi)
        gen_t = g_end
        if (i + 1) % cfg.sample_stride == 0 or i + 1 == n_steps:
            t_now = (i + 1) * h
            if not np.isfinite(psi).all():
                raise IntegrationDivergedError("state has non-finite entries", t_now)
            drift = abs(np.linalg.norm(psi) - 1.0)
            if not cfg.renormalize_each_step and drift > TOL.ode_norm_drift:
                raise IntegrationDivergedError(f"norm drift {drift:.3e}", t_now)
            times.append(t_now)
            states.append(psi.copy())
    return Trajectory(times=np.asarray(times), states=tuple(states))


def inverted_morse_profile(q: float, nu: float) -> Callable[[float], float]:
    """Damping-rate magnitude g(t) = q (1 - (1 - e^{-nu t})^2): starts at q,
    decays to zero; crosses any level in (0, q) exactly once for t >= 0."""
    if q == 0.0 or nu <= 0.0:
        raise DomainError("need q != 0 and nu > 0")

    def profile(t: float) -> float:
        u = 1.0 - np.exp(-nu * t)
        return q * (1.0 - u * u)

    return profile


def qubit_rate_generator(omega_vec, g_direction,
                         magnitude: Callable[[float], float]) -> TimeParameterizedGenerator:
    """Constant omega, time-dependent g(t) = magnitude(t) * g_direction."""
    omega_vec = np.asarray(omega_vec, dtype=float)
    g_dir = np.asarray(g_direction, dtype=float)
    h = 0.5 * pauli_dot(omega_vec)
    sig_g = 0.5 * pauli_dot(g_dir)

    def at(t: float) -> Generator:
        return Generator(h, magnitude(t) * sig_g)

    return TimeParameterizedGenerator(at=at, time_independent=False)
