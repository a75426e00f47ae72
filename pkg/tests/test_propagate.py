"""Reference RK4 propagator against closed forms and scipy."""
import numpy as np
import pytest
from scipy.integrate import solve_ivp

from dapt import (Grid, NonHermitianInput, StepTooLarge, hamiltonian_samples,
                  propagate, residual)


def vel(w):
    return w / (2.0 * np.pi)


@pytest.fixture(scope="module")
def grid201():
    return Grid.uniform(201)


def test_matches_independent_integrator(gamma, grid201):
    v = vel(0.2)
    psi0 = gamma.frames(0.0)[:, 0]
    mine = propagate(gamma.hamiltonian, grid201, psi0, v, substeps=4)

    def rhs(s, y):
        psi = y[:4] + 1j * y[4:]
        d = -1j / v * (gamma.hamiltonian(s) @ psi)
        return np.concatenate([d.real, d.imag])

    sol = solve_ivp(rhs, (0.0, 1.0), np.concatenate([psi0.real, psi0.imag]),
                    t_eval=grid201.s, rtol=1e-12, atol=1e-12, method="DOP853")
    ref = (sol.y[:4] + 1j * sol.y[4:]).T
    assert residual(mine.psi, ref) < 1e-7


def test_matches_model_closed_form(gamma, grid201):
    v = vel(0.2)
    res = propagate(gamma.hamiltonian, grid201, gamma.frames(0.0)[:, 0], v,
                    substeps=4)
    assert residual(res.psi, gamma.exact_state(grid201.s, v)) < 1e-7


def test_fourth_order_convergence(gamma, grid201):
    v = vel(0.2)
    psi0 = gamma.frames(0.0)[:, 0]
    exact = gamma.exact_state(grid201.s, v)
    errs = [residual(propagate(gamma.hamiltonian, grid201, psi0, v,
                               substeps=m).psi, exact) for m in (1, 2)]
    assert 11.0 < errs[0] / errs[1] < 21.0


def test_norm_preserved(gamma, grid201):
    res = propagate(gamma.hamiltonian, grid201, gamma.frames(0.0)[:, 0],
                    vel(0.2), substeps=4)
    steps = (grid201.n - 1) * res.substeps
    assert res.norm_drift < 1e-12 * steps


def test_batch_matches_single_runs(gamma, grid201):
    v = vel(0.2)
    starts = gamma.frames(0.0)[:, :2].T
    batch = propagate(gamma.hamiltonian, grid201, starts, v, substeps=2)
    assert batch.psi.shape == (201, 2, 4)
    for row in (0, 1):
        single = propagate(gamma.hamiltonian, grid201, starts[row], v,
                           substeps=2)
        assert np.abs(batch.psi[:, row, :] - single.psi).max() < 1e-13


def test_sampled_hamiltonian_route(gamma, grid201):
    v = vel(0.2)
    psi0 = gamma.frames(0.0)[:, 0]
    samples = hamiltonian_samples(gamma.hamiltonian, grid201)
    res = propagate(samples, grid201, psi0, v, substeps=4)
    # piecewise-linear interpolation of H(s) limits the sampled route
    assert residual(res.psi, gamma.exact_state(grid201.s, v)) < 5e-3


def test_projection_onto_snapshot_basis(gamma):
    g = Grid.uniform(2001)
    v = vel(0.05)
    res = propagate(gamma.hamiltonian, g, gamma.frames(0.0)[:, 0], v,
                    substeps=8)
    coeff = res.project(gamma.spectral_path(g))
    assert np.abs(coeff - gamma.exact_coefficients(g.s, v)).max() < 1e-8


def test_automatic_substep_choice(gamma, grid201):
    res = propagate(gamma.hamiltonian, grid201, gamma.frames(0.0)[:, 0],
                    vel(0.2), max_phase=0.01)
    # |H| h / (v substeps) must come out at or below the cap
    assert 0.5 * grid201.h / (vel(0.2) * res.substeps) <= 0.01


def test_input_validation(gamma, grid201):
    psi0 = gamma.frames(0.0)[:, 0]
    with pytest.raises(ValueError):
        propagate(gamma.hamiltonian, grid201, psi0, -0.1)
    with pytest.raises(ValueError):
        propagate(gamma.hamiltonian, grid201, psi0[:3], vel(0.2))
    with pytest.raises(StepTooLarge):
        propagate(gamma.hamiltonian, grid201, psi0, vel(0.2), substeps=100,
                  max_steps=1000)
    bad = hamiltonian_samples(gamma.hamiltonian, grid201)
    bad[7, 0, 1] += 1e-6
    with pytest.raises(NonHermitianInput):
        propagate(bad, grid201, psi0, vel(0.2))


def test_residual_helper():
    a = np.zeros((5, 3))
    b = np.zeros((5, 3))
    b[2, 1] = 0.25
    assert residual(a, b) == 0.25
