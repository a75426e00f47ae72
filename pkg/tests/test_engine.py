"""Series engine: phases, blocks, order recursion, margins."""
import numpy as np
import pytest

from dapt import (BadInitialCondition, DynamicalPhase, Grid, Workspace,
                  check_amplitudes, couplings_via_frame_derivatives, daa_state,
                  first_order_state, ground_amplitudes, j_integral,
                  series_state, smooth_gauge, snapshot_eigensystem,
                  transport_all, validity_margins, zero_order_blocks)


def vel(w):
    return w / (2.0 * np.pi)


def test_dynamical_phase_linear_for_constant_energies(gamma, grid801):
    ph = DynamicalPhase.from_path(gamma.spectral_path(grid801))
    assert np.abs(ph.omega[:, 0] + 0.5 * grid801.s).max() < 1e-14
    assert np.abs(ph.omega[:, 1] - 0.5 * grid801.s).max() < 1e-14
    v = vel(0.05)
    want = np.exp(1j * 0.5 * grid801.s / v)
    assert np.abs(ph.factor(0, v) - want).max() < 1e-12


def test_amplitude_validation():
    assert np.array_equal(ground_amplitudes(3), [1.0, 0.0, 0.0])
    check_amplitudes([1.0, 0.0], 2)
    with pytest.raises(BadInitialCondition):
        check_amplitudes([1.0, 1.0], 2)
    with pytest.raises(BadInitialCondition):
        check_amplitudes([1.0, 0.0, 0.0], 2)


def test_zero_order_blocks_structure(gamma, grid801):
    cs = gamma.couplings(grid801)
    hols = gamma.holonomies(grid801)
    blocks = zero_order_blocks(cs, hols, ground_amplitudes(2))
    assert blocks.order == 0
    assert blocks.dims == (2, 2)
    assert blocks.labels == 2
    assert np.array_equal(blocks.block(0, 0), hols[0].u)
    assert np.abs(blocks.block(1, 1)).max() == 0.0
    assert np.abs(blocks.block(0, 1)).max() == 0.0


def test_daa_matches_closed_form_with_exact_holonomy(gamma, grid801):
    cs = gamma.couplings(grid801)
    hols = gamma.holonomies(grid801)
    ph = DynamicalPhase.from_path(gamma.spectral_path(grid801))
    v = vel(0.01)
    fam = daa_state(cs, hols, ph, ground_amplitudes(2), v)
    assert np.abs(fam.coefficients[:, 0, :]
                  - gamma.daa_coefficients(grid801.s, v)).max() < 1e-10


def test_j_integral_closed_form(gamma, grid801):
    # for this protocol U R R U^dagger / Delta is a constant multiple of
    # the identity, so the running integral is exactly linear in s
    cs = gamma.couplings(grid801)
    hols = gamma.holonomies(grid801)
    j = j_integral(cs, hols, 0, 1)
    scale = np.pi ** 2 * np.sin(gamma.cone_angle) ** 2 / gamma.gap
    want = scale * grid801.s[:, None, None] * np.eye(2)
    assert np.abs(j - want).max() < 1e-12


def test_first_order_routes_agree(ws_gamma):
    v = vel(0.01)
    via_recursion = ws_gamma.term(1, v).coefficients
    direct = first_order_state(ws_gamma.couplings, ws_gamma.holonomies,
                               ws_gamma.phases, ground_amplitudes(2),
                               v).coefficients
    assert np.abs(via_recursion - direct).max() < 2e-5


def test_first_order_matches_closed_form(gamma, ws_gamma):
    v = vel(0.01)
    got = ws_gamma.term(1, v).coefficients[:, 0, :]
    want = gamma.first_order_coefficients(ws_gamma.grid.s, v)
    assert np.abs(got - want).max() < 1e-4


def test_corrections_vanish_at_start(ws_gamma):
    for p in (1, 2):
        assert np.abs(ws_gamma.term(p, vel(0.05)).coefficients[0]).max() < 1e-10


def test_series_state_is_velocity_weighted_sum(ws_gamma):
    v = vel(0.07)
    total = series_state(ws_gamma.blocks, ws_gamma.phases, v, order=2)
    build = sum(v ** p * ws_gamma.term(p, v).coefficients for p in range(3))
    assert np.abs(total.coefficients - build).max() < 1e-14
    assert total.labels == 2
    assert total.level_slices == [slice(0, 2), slice(2, 4)]


def test_series_residual_shrinks_with_order(gamma, ws_gamma):
    v = vel(0.05)
    exact = gamma.exact_coefficients(ws_gamma.grid.s, v)
    errs = []
    for order in (0, 1, 2):
        fam = ws_gamma.series(v, order=order)
        diff = fam.coefficients[:, 0, :] - exact
        errs.append(np.linalg.norm(diff, axis=-1).max())
    assert errs[0] > 10.0 * errs[1]
    assert errs[1] > 3.0 * errs[2]


def test_vectors_requires_matching_path(gamma, spin, ws_gamma):
    fam = ws_gamma.series(vel(0.05))
    from dapt import DimensionMismatch
    with pytest.raises(DimensionMismatch):
        fam.vectors(spin.spectral_path(Grid.uniform(801)))
    vecs = fam.vectors(gamma.spectral_path(ws_gamma.grid))
    norms = np.linalg.norm(fam.coefficients, axis=2)
    assert np.abs(np.linalg.norm(vecs, axis=2) - norms).max() < 1e-12


def test_margins_scale_linearly_and_gate(ws_gamma):
    v = vel(0.01)
    slow = ws_gamma.margins(v)
    twice = ws_gamma.margins(2 * v)
    assert abs(twice.sup_secular / slow.sup_secular - 2.0) < 1e-6
    for n in slow.sup_gap:
        assert abs(twice.sup_gap[n] / slow.sup_gap[n] - 2.0) < 1e-6
    assert slow.adiabatic_ok
    assert slow.final_secular <= slow.sup_secular
    fast = ws_gamma.margins(vel(10.0))
    assert not fast.adiabatic_ok


def test_margins_with_single_level():
    g = Grid.uniform(11)
    samples = np.zeros((11, 2, 2), dtype=complex)
    path = smooth_gauge(snapshot_eigensystem(samples, g))
    assert path.dims == (2,)
    cs = couplings_via_frame_derivatives(path)
    hols = transport_all(cs)
    ph = DynamicalPhase.from_path(path)
    rep = validity_margins(cs, hols, ph, vel(0.05))
    assert rep.adiabatic_ok
    assert rep.sup_secular == 0.0
    assert rep.sup_gap == {}


def test_spin_model_scalar_blocks(spin):
    g = Grid.uniform(201)
    cs = spin.couplings(g)
    hols = spin.holonomies(g)
    blocks = zero_order_blocks(cs, hols, ground_amplitudes(2))
    assert blocks.dims == (1, 1)
    assert blocks.labels == 1
    ph = DynamicalPhase.from_path(spin.spectral_path(g))
    fam = daa_state(cs, hols, ph, ground_amplitudes(2), vel(0.05))
    assert fam.coefficients.shape == (201, 1, 2)
