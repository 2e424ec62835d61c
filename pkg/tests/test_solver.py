"""Steady states, propagation, and resolvent solves against closed-form oracles."""

import numpy as np
import pytest

from cbsim import atoms, liouvillian as lv, solver, spectra
from cbsim.errors import ConditioningError, DomainError, MultiplicityError


def bloch_excited_population(rabi, detuning, gamma=1.0):
    """Independent steady-state oracle for one two-level atom.

    Textbook optical Bloch result, s / (2 (1 + s)) with the saturation
    parameter s; kept separate from the production formulas on purpose.
    """
    s = rabi**2 / (2.0 * (gamma**2 + detuning**2))
    return s / (2.0 * (1.0 + s))


def bloch_coherent_fraction(rabi, detuning, gamma=1.0):
    """Coherent (elastic) fraction 1 / (1 + s) of the same oracle."""
    s = rabi**2 / (2.0 * (gamma**2 + detuning**2))
    return 1.0 / (1.0 + s)


def single_two_level(rabi, detuning=0.0):
    scheme = atoms.build_scheme(atoms.TWO_LEVEL)
    return lv.assemble_single(scheme, lv.PhysicalParams(rabi=rabi, detuning=detuning))


# -- steady states ------------------------------------------------------------


def test_steady_state_no_drive_is_ground():
    liou = single_two_level(0.0)
    rho = solver.steady_state(liou)
    assert np.allclose(rho, np.diag([1.0, 0.0]), atol=1e-12)


def test_steady_state_matches_bloch_oracle_at_unit_saturation():
    rabi = lv.rabi_for_saturation(1.0, 0.0)
    rho = solver.steady_state(single_two_level(rabi))
    assert np.isclose(rho[1, 1].real, 0.25, atol=1e-12)
    assert np.isclose(rho[1, 1].real, bloch_excited_population(rabi, 0.0), atol=1e-12)


@pytest.mark.parametrize("rabi,detuning", [(0.3, 0.0), (2.0, 1.5), (40.0, -7.0)])
def test_steady_state_matches_bloch_oracle(rabi, detuning):
    rho = solver.steady_state(single_two_level(rabi, detuning))
    assert np.isclose(rho[1, 1].real, bloch_excited_population(rabi, detuning),
                      atol=1e-12)


def test_steady_state_saturates_to_half():
    rho = solver.steady_state(single_two_level(lv.rabi_for_saturation(1e6, 0.0)))
    assert abs(rho[1, 1].real - 0.5) < 1e-5


def test_steady_state_invariants_across_parameters():
    scheme = atoms.build_scheme(atoms.V_TYPE)
    for s in (1e-3, 0.5, 10.0, 1e3):
        for detuning in (0.0, 20.0):
            p = lv.PhysicalParams(rabi=lv.rabi_for_saturation(s, detuning),
                                  detuning=detuning, laser_phase_a=1.0,
                                  prop_phase_p=0.5)
            rho = solver.steady_state(lv.assemble(scheme, p))
            solver.validate_density(rho)  # hermitian, unit trace, positive


def test_degenerate_manifold_reports_multiplicity():
    # block-diagonal generator with two independent decay-free subspaces
    gen = np.zeros((16, 16), dtype=complex)
    liou = lv.Liouvillian(4, gen)
    with pytest.raises(MultiplicityError):
        solver.steady_state(liou)


def test_steady_state_populations_invariant_under_global_drive_phase():
    scheme = atoms.build_scheme(atoms.V_TYPE)
    p = lv.PhysicalParams(rabi=2.0, detuning=1.0, laser_phase_a=0.7, prop_phase_p=1.9)
    rho_ref = solver.steady_state(lv.assemble(scheme, p))
    h = lv.drive_hamiltonian(scheme, p, n_atoms=2, global_phase=1.1)
    gen = (lv.hamiltonian_generator(h) + lv.decay_dissipator(scheme, n_atoms=2)
           + lv.exchange_term(scheme, p))
    rho_shift = solver.steady_state(lv.Liouvillian(9, gen))
    assert np.allclose(np.diag(rho_shift).real, np.diag(rho_ref).real, atol=1e-9)


# -- time evolution -----------------------------------------------------------


def test_evolve_identity_at_zero_time():
    liou = single_two_level(1.0)
    rho0 = np.array([[0.7, 0.1j], [-0.1j, 0.3]], dtype=complex)
    assert np.allclose(solver.evolve(liou, rho0, 0.0), rho0, atol=1e-14)


def test_evolve_decay_law():
    liou = single_two_level(0.0)
    rho_e = np.diag([0.0, 1.0]).astype(complex)
    rho_t = solver.evolve(liou, rho_e, 0.5)
    assert np.isclose(rho_t[1, 1].real, np.exp(-1.0), rtol=1e-10)


def test_evolve_converges_to_steady_state():
    liou = single_two_level(2.0, 0.5)
    rho0 = np.diag([1.0, 0.0]).astype(complex)
    rho_inf = solver.evolve(liou, rho0, 200.0)
    assert np.linalg.norm(rho_inf - solver.steady_state(liou)) < 1e-8


def test_evolve_semigroup_property():
    liou = single_two_level(3.0, -1.0)
    rho0 = np.diag([0.4, 0.6]).astype(complex)
    once = solver.evolve(liou, rho0, 1.7)
    twice = solver.evolve(liou, solver.evolve(liou, rho0, 0.9), 0.8)
    assert np.linalg.norm(once - twice) < 1e-9


def test_evolve_preserves_trace_and_hermiticity():
    scheme = atoms.build_scheme(atoms.V_TYPE)
    p = lv.PhysicalParams(rabi=2.0, laser_phase_a=0.2, prop_phase_p=0.4)
    liou = lv.assemble(scheme, p)
    rho0 = np.zeros((9, 9), dtype=complex)
    rho0[0, 0] = 1.0
    rho_t = solver.evolve(liou, rho0, 3.0)
    assert abs(np.trace(rho_t) - 1.0) < 1e-9
    assert np.abs(rho_t - rho_t.conj().T).max() < 1e-9


def test_evolve_rejects_negative_time():
    with pytest.raises(DomainError):
        solver.evolve(single_two_level(1.0), np.eye(2, dtype=complex) / 2, -1.0)


# -- resolvent ----------------------------------------------------------------


def test_resolvent_zero_generator_is_scalar_inversion():
    liou = lv.Liouvillian(2, np.zeros((4, 4), dtype=complex))
    rhs = np.array([1.0, 2.0, -1.0, 0.5], dtype=complex)
    x = solver.resolvent_solve(liou, rhs, 1.0)
    assert np.allclose(x, rhs / 1.0j, atol=1e-14)


def test_resolvent_zero_rhs_gives_zero():
    liou = single_two_level(1.0)
    x = solver.resolvent_solve(liou, np.zeros(4, dtype=complex), 2.0)
    assert np.all(x == 0)


def test_resolvent_reports_singular_system():
    liou = lv.Liouvillian(2, np.zeros((4, 4), dtype=complex))
    with pytest.raises(ConditioningError):
        solver.resolvent_solve(liou, np.ones(4, dtype=complex), 0.0)


def test_resolvent_matches_time_domain_correlation():
    """Inverse transform of resolvent solutions vs evolve-based decay.

    The dipole correlation is computed twice: in the time domain by
    propagating the regression seed with the matrix exponential, and in the
    frequency domain from resolvent solves on a dense grid that is then
    Fourier-inverted (with the known smooth asymptote subtracted to control
    the truncated tails).
    """
    scheme = atoms.build_scheme(atoms.TWO_LEVEL)
    liou = lv.assemble_single(scheme, lv.PhysicalParams(rabi=2.0, detuning=0.7))
    rho = solver.steady_state(liou)
    low = atoms.lowering_operator(scheme, 0)
    high = low.conj().T

    taus = np.linspace(0.0, 5.0, 101)
    seed = rho @ high - np.trace(rho @ high) * rho
    c_time = np.array([np.trace(low @ solver.evolve(liou, seed, t)) for t in taus])

    omegas = np.arange(-300.0, 300.0001, 0.05)
    c_freq = np.array([
        spectra.correlation(liou, rho, high, low, w, connected=True) for w in omegas
    ])
    c0 = np.trace(low @ seed)
    c1 = np.trace(low @ solver.unvectorize(liou.generator @ seed.reshape(-1)))
    w0 = 2.0
    b = c1 + w0 * c0
    regular = c_freq - c0 / (w0 - 1j * omegas) - b / (w0 - 1j * omegas) ** 2
    kernel = np.exp(-1j * np.outer(omegas, taus))
    c_rebuilt = (np.trapezoid(regular[:, None] * kernel, omegas, axis=0) / (2 * np.pi)
                 + (c0 + b * taus) * np.exp(-w0 * taus))
    err = np.abs(c_rebuilt - c_time).max() / np.abs(c_time).max()
    assert err < 1e-3
