import math

import numpy as np
import pytest

from qdsim.errors import DomainError, NoCrossingError
from qdsim.linalg import pauli_dot
from qdsim.models import neutrino as nu

# prefactor that puts the |g| = |omega| crossing at the published
# instability distance for 10 MeV
V_SCALE_CALIBRATED = 8.019782651241507e-05

MSW_10MEV = nu.NeutrinoConfig(energy_gev=0.01, mode="msw",
                              v_scale=V_SCALE_CALIBRATED)
DAMPING_10MEV = nu.NeutrinoConfig(energy_gev=0.01, mode="damping",
                                  v_scale=V_SCALE_CALIBRATED)


def test_config_validation():
    with pytest.raises(DomainError):
        nu.NeutrinoConfig(energy_gev=0.0)
    with pytest.raises(DomainError):
        nu.NeutrinoConfig(energy_gev=0.01, mode="adiabatic")
    with pytest.raises(DomainError):
        nu.NeutrinoConfig(energy_gev=0.01, v_scale=-1.0)
    with pytest.raises(DomainError):
        nu.NeutrinoConfig(energy_gev=0.01, g_orientation=0.5)


def test_vacuum_scales():
    assert MSW_10MEV.delta_nev == pytest.approx(4e-3)
    w = MSW_10MEV.vacuum_omega()
    assert np.linalg.norm(w) == pytest.approx(4e-3, rel=1e-12)
    assert w[1] == 0.0 and w[0] > 0.0 and w[2] < 0.0
    assert np.linalg.norm(MSW_10MEV.nu2_direction()) == pytest.approx(1.0)


def test_damping_direction_geometry():
    d = DAMPING_10MEV.g_direction()
    assert np.linalg.norm(d) == pytest.approx(1.0)
    # tilted toward nu_2 by the configured angle, so the angle to the
    # vacuum omega is 90 degrees minus the tilt
    what = MSW_10MEV.vacuum_omega()
    what = what / np.linalg.norm(what)
    assert float(d @ what) == pytest.approx(math.sin(DAMPING_10MEV.g_tilt_rad),
                                            abs=1e-12)


def test_potential_profile():
    c = nu.NeutrinoConfig(energy_gev=0.01)  # default prefactor 0.012
    assert nu.neutrino_potential(c, 0.0) == pytest.approx(0.012 * 154.910686)
    for L in (1e4, 1e5, 3e5):
        want = c.v_scale * np.polyval(nu.POLY_COEFFS, L / c.r_s_km)
        assert nu.neutrino_potential(c, L) == pytest.approx(want, rel=1e-12)
    assert nu.neutrino_potential(c, nu.CUTOFF_KM + 1.0) == 0.0
    with pytest.raises(DomainError):
        nu.neutrino_potential(c, -1.0)


def test_generator_assembly():
    gen = nu.neutrino_generator(MSW_10MEV, 0.0)
    want_omega = MSW_10MEV.vacuum_omega() + np.array(
        [0.0, 0.0, nu.neutrino_potential(MSW_10MEV, 0.0)])
    assert np.allclose(gen.hamiltonian,
                       0.5 * MSW_10MEV.eps * pauli_dot(want_omega), atol=1e-15)
    assert np.allclose(gen.damping, 0.0)

    gen_d = nu.neutrino_generator(DAMPING_10MEV, 1e5)
    v = nu.neutrino_potential(DAMPING_10MEV, 1e5)
    assert np.allclose(gen_d.hamiltonian,
                       0.5 * DAMPING_10MEV.eps
                       * pauli_dot(DAMPING_10MEV.vacuum_omega()), atol=1e-15)
    assert np.allclose(gen_d.damping,
                       0.5 * DAMPING_10MEV.eps * v
                       * pauli_dot(DAMPING_10MEV.g_direction()), atol=1e-15)


def test_level_crossing_distances():
    # calibrated profile: resonance and instability radii for 10 MeV
    l_res = nu.msw_resonance(MSW_10MEV)
    assert abs(l_res - 191173.0) <= 5.0
    target = MSW_10MEV.delta_nev * math.cos(2.0 * MSW_10MEV.theta12)
    assert nu.neutrino_potential(MSW_10MEV, l_res) == pytest.approx(
        target, rel=1e-4)

    l_in = nu.instability_locator(DAMPING_10MEV)
    assert abs(l_in - 117600.0) <= 5.0
    assert nu.neutrino_potential(DAMPING_10MEV, l_in) == pytest.approx(
        np.linalg.norm(DAMPING_10MEV.vacuum_omega()), rel=1e-4)


def test_instability_locator_callable_route():
    got = nu.instability_locator(lambda t: 2.0 * math.exp(-t / 7.0),
                                 omega_norm=1.0, hi=50.0, xtol=1e-6)
    assert got == pytest.approx(7.0 * math.log(2.0), abs=1e-5)
    with pytest.raises(DomainError):
        nu.instability_locator(lambda t: t, hi=50.0)
    with pytest.raises(NoCrossingError):
        nu.instability_locator(lambda t: 0.5, omega_norm=1.0, hi=50.0)


def test_evolve_msw_short_run():
    traj = nu.neutrino_evolve(MSW_10MEV, None, L_end=2000.0, step=1.0,
                              sample_stride=100)
    psi = traj.derived["psi"]
    assert traj.derived["survival"][0] == pytest.approx(1.0)
    assert traj.times[-1] == pytest.approx(2000.0)
    norms = np.abs(psi[:, 0]) ** 2 + np.abs(psi[:, 1]) ** 2
    assert np.abs(norms - 1.0).max() <= 1e-12
    # Bloch series are the amplitude bilinears
    assert np.allclose(traj.derived["n3"],
                       2.0 * traj.derived["survival"] - 1.0, atol=1e-12)
    assert np.allclose(traj.derived["n1"] ** 2 + traj.derived["n2"] ** 2
                       + traj.derived["n3"] ** 2, 1.0, atol=1e-10)
    for rho in traj.states[:3]:
        assert np.trace(rho).real == pytest.approx(1.0, abs=1e-12)
        assert np.allclose(rho, rho.conj().T)


def test_evolve_damping_counter_rate_keeps_norm():
    traj = nu.neutrino_evolve(DAMPING_10MEV, None, L_end=2000.0, step=1.0,
                              sample_stride=100)
    psi = traj.derived["psi"]
    norms = np.abs(psi[:, 0]) ** 2 + np.abs(psi[:, 1]) ** 2
    assert np.abs(norms - 1.0).max() <= 1e-12
    # deep inside the damping-dominated core the state must have moved
    assert abs(traj.derived["survival"][-1] - 1.0) > 1e-6


def test_evolve_input_validation():
    with pytest.raises(DomainError):
        nu.neutrino_evolve(MSW_10MEV, None, L_end=-1.0, step=1.0)
    with pytest.raises(DomainError):
        nu.neutrino_evolve(MSW_10MEV, None, L_end=10.0, step=0.0)
    with pytest.raises(DomainError):
        nu.neutrino_evolve(MSW_10MEV, np.array([1.0, 0.0, 0.0]), 10.0, 1.0)
