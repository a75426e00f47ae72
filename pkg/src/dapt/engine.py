"""Order-by-order construction of the adiabatic perturbation series.

Units: hbar = 1. The expansion parameter is the sweep velocity v = 1/t_final;
states are reconstructed as psi = sum_p v^p psi^(p). Correction blocks are
stored velocity-free, so one block computation serves a whole v-sweep;
velocity enters only through the dynamical phase factors at assembly time.

Block layout: B^(p)[(m, n)] has shape (n_nodes, labels, d_n). The column
axis is ragged (level n's degeneracy); the row axis is the tracked
initial-condition label, padded to a common label count (default: the
largest degeneracy) because the s = 0 matching condition sums blocks of
different source levels row-wise.
"""
from dataclasses import dataclass

import numpy as np

from .errors import BadInitialCondition, DimensionMismatch
from .grid import Grid, central_derivative, cumulative_quadrature
from .linalg import unitary_expm
from .spectral import SpectralPath


@dataclass(frozen=True)
class DynamicalPhase:
    """Accumulated phase integrals omega_n(s) = int_0^s E_n ds', per level."""

    grid: Grid
    omega: np.ndarray          # (n_nodes, n_levels)

    @classmethod
    def from_path(cls, path: SpectralPath) -> "DynamicalPhase":
        return cls(grid=path.grid,
                   omega=cumulative_quadrature(path.energies, path.grid))

    def factor(self, n: int, velocity: float) -> np.ndarray:
        """Phase factor exp(-i omega_n(s) / v) on the grid."""
        return np.exp(-1j * self.omega[:, n] / velocity)


@dataclass(frozen=True)
class StateFamily:
    """Snapshot-basis coefficients of one perturbative order (or a series).

    ``coefficients[k, h, j]`` is the amplitude of snapshot basis ket j
    (levels concatenated in order) for initial-condition label h at node k,
    dynamical phases included.
    """

    order: int
    grid: Grid
    dims: tuple
    coefficients: np.ndarray   # (n_nodes, labels, dim)

    @property
    def labels(self) -> int:
        return self.coefficients.shape[1]

    @property
    def level_slices(self) -> list:
        out, start = [], 0
        for d in self.dims:
            out.append(slice(start, start + d))
            start += d
        return out

    def vectors(self, path: SpectralPath) -> np.ndarray:
        """Computational-basis states, shape (n_nodes, labels, dim)."""
        if path.dims != self.dims:
            raise DimensionMismatch("path level structure differs from family")
        return np.einsum("kij,khj->khi", path.basis(), self.coefficients)


@dataclass(frozen=True)
class CorrectionBlocks:
    """Velocity-free expansion blocks B^(p) for every ordered level pair."""

    order: int
    grid: Grid
    dims: tuple
    labels: int
    blocks: dict               # (m, n) -> (n_nodes, labels, d_n)

    def block(self, m: int, n: int) -> np.ndarray:
        return self.blocks[(m, n)]


def check_amplitudes(b0, n_levels: int) -> np.ndarray:
    b0 = np.asarray(b0, dtype=complex)
    if b0.shape != (n_levels,):
        raise BadInitialCondition(
            f"need one amplitude per level ({n_levels}), got shape {b0.shape}")
    total = float(np.sum(np.abs(b0) ** 2))
    if abs(total - 1.0) > 1e-10:
        raise BadInitialCondition(f"amplitudes not normalized: sum |b|^2 = {total!r}")
    return b0


def ground_amplitudes(n_levels: int) -> np.ndarray:
    b0 = np.zeros(n_levels, dtype=complex)
    b0[0] = 1.0
    return b0


def _embed_rows(mat: np.ndarray, labels: int) -> np.ndarray:
    """Zero-pad the row axis of (n, d_m, d_n) stacks up to the label count."""
    n, rows, cols = mat.shape
    if rows == labels:
        return mat
    out = np.zeros((n, labels, cols), dtype=complex)
    out[:, :rows, :] = mat
    return out


def zero_order_blocks(cs, holonomies, b0, labels: int = None) -> CorrectionBlocks:
    """Order-0 blocks: B_{nn} = b_n(0) U^n(s), off-diagonal blocks zero."""
    dims = tuple(cs.matrices[(n, n)].shape[1] for n in range(cs.n_levels))
    b0 = check_amplitudes(b0, cs.n_levels)
    if labels is None:
        labels = max(dims)
    n_nodes = cs.grid.n
    blocks = {}
    for m in range(cs.n_levels):
        for n in range(cs.n_levels):
            if m == n:
                blocks[(m, n)] = _embed_rows(b0[n] * holonomies[n].u, labels)
            else:
                blocks[(m, n)] = np.zeros((n_nodes, labels, dims[n]), dtype=complex)
    return CorrectionBlocks(order=0, grid=cs.grid, dims=dims, labels=labels,
                            blocks=blocks)


def advance_order(blocks: CorrectionBlocks, cs) -> CorrectionBlocks:
    """Raise the expansion order p -> p + 1.

    Off-diagonal blocks are algebraic:
        B'_{mn} = (-i / Delta_mn) (dB_{mn}/ds + sum_k B_{mk} R^{kn}),
    with R the recursion coupling (transposed plain coupling). Diagonal
    blocks satisfy dB'_{nn}/ds = B'_{nn} A^{nn} - G_n with
    G_n = sum_{k != n} B'_{nk} R^{kn}, integrated by the same midpoint
    exponential stepping as wz_transport (so a zero-source diagonal block
    reproduces the holonomy exactly), starting from the s = 0 matching
    value B'_{nn}(0) = -sum_{m != n} B'_{mn}(0).
    """
    levels = range(cs.n_levels)
    new = {}
    for m in levels:
        for n in levels:
            if m == n:
                continue
            source = central_derivative(blocks.block(m, n), cs.grid)
            for k in levels:
                source = source + blocks.block(m, k) @ cs.recursion(k, n)
            delta = cs.gap(m, n)[:, None, None]
            new[(m, n)] = (-1j / delta) * source

    h = cs.grid.h
    for n in levels:
        g = None
        for k in levels:
            if k == n:
                continue
            term = new[(n, k)] @ cs.recursion(k, n)
            g = term if g is None else g + term
        mids = 0.5 * (cs.a(n, n)[:-1] + cs.a(n, n)[1:])
        full = unitary_expm(mids, h)
        half = unitary_expm(mids, h / 2.0)
        g_mid = 0.5 * (g[:-1] + g[1:])
        bnn = np.empty_like(blocks.block(n, n))
        bnn[0] = -sum(new[(m, n)][0] for m in levels if m != n)
        for k in range(cs.grid.n - 1):
            bnn[k + 1] = bnn[k] @ full[k] - h * g_mid[k] @ half[k]
        new[(n, n)] = bnn
    return CorrectionBlocks(order=blocks.order + 1, grid=blocks.grid,
                            dims=blocks.dims, labels=blocks.labels, blocks=new)


def assemble_state(blocks: CorrectionBlocks, phases: DynamicalPhase,
                   velocity: float) -> StateFamily:
    """Snapshot coefficients of one order: sum_m e^{-i omega_m / v} B_{mn}."""
    n_nodes = blocks.grid.n
    dim = sum(blocks.dims)
    coeff = np.zeros((n_nodes, blocks.labels, dim), dtype=complex)
    start = 0
    for n in range(len(blocks.dims)):
        sl = slice(start, start + blocks.dims[n])
        for m in range(len(blocks.dims)):
            coeff[:, :, sl] += (phases.factor(m, velocity)[:, None, None]
                                * blocks.block(m, n))
        start += blocks.dims[n]
    return StateFamily(order=blocks.order, grid=blocks.grid, dims=blocks.dims,
                       coefficients=coeff)


def series_state(block_list, phases: DynamicalPhase, velocity: float,
                 order: int = None) -> StateFamily:
    """Partial sum sum_{p <= order} v^p psi^(p) as one StateFamily."""
    if order is None:
        order = len(block_list) - 1
    total = None
    for p in range(order + 1):
        fam = assemble_state(block_list[p], phases, velocity)
        term = (velocity ** p) * fam.coefficients
        total = term if total is None else total + term
    return StateFamily(order=order, grid=phases.grid,
                       dims=block_list[0].dims, coefficients=total)


def daa_state(cs, holonomies, phases: DynamicalPhase, b0, velocity: float,
              labels: int = None) -> StateFamily:
    """Degenerate adiabatic approximation (order 0) for given amplitudes."""
    blocks = zero_order_blocks(cs, holonomies, b0, labels=labels)
    return assemble_state(blocks, phases, velocity)


def j_integral(cs, holonomies, n: int, m: int) -> np.ndarray:
    """Running integral J^{nmn}(s) = int_0^s W2^{nmn} / Delta_nm ds'.

    W2^{nmn} = U^n R^{nm} R^{mn} U^n-dagger with R the recursion coupling;
    shape (n_nodes, d_n, d_n). Composite-Simpson accumulation.
    """
    u = holonomies[n].u
    u_dag = np.swapaxes(u, 1, 2).conj()
    w2 = u @ cs.recursion(n, m) @ cs.recursion(m, n) @ u_dag
    integrand = w2 / cs.gap(n, m)[:, None, None]
    return cumulative_quadrature(integrand, cs.grid)


def first_order_state(cs, holonomies, phases: DynamicalPhase, b0,
                      velocity: float, labels: int = None) -> StateFamily:
    """Closed-form first-order family psi^(1) (independent of advance_order).

    Built from the three first-order contributions: the secular J-integral
    piece inside each occupied level, the s = 0 matching piece, and the
    instantaneous inter-level mixing piece. psi^(1)(0) = 0 by construction.
    """
    dims = tuple(cs.matrices[(n, n)].shape[1] for n in range(cs.n_levels))
    levels = range(cs.n_levels)
    b0 = check_amplitudes(b0, cs.n_levels)
    if labels is None:
        labels = max(dims)
    n_nodes = cs.grid.n
    dim = sum(dims)
    coeff = np.zeros((n_nodes, labels, dim), dtype=complex)
    slices = []
    start = 0
    for d in dims:
        slices.append(slice(start, start + d))
        start += d

    for n in levels:
        u_n = holonomies[n].u
        for m in levels:
            if m == n:
                continue
            delta_nm = cs.gap(n, m)[:, None, None]
            if b0[n] != 0.0:
                j_nmn = j_integral(cs, holonomies, n, m)
                term = 1j * b0[n] * (j_nmn @ u_n)
                coeff[:, :, slices[n]] += (phases.factor(n, velocity)[:, None, None]
                                           * _embed_rows(term, labels))
            if b0[m] != 0.0:
                w1_0 = holonomies[m].u[0] @ cs.recursion(m, n)[0] \
                    @ u_n[0].conj().T
                term = -1j * b0[m] * (w1_0 @ u_n) / delta_nm[0]
                coeff[:, :, slices[n]] += (phases.factor(n, velocity)[:, None, None]
                                           * _embed_rows(term, labels))
                term = 1j * b0[m] * (holonomies[m].u @ cs.recursion(m, n)) / delta_nm
                coeff[:, :, slices[n]] += (phases.factor(m, velocity)[:, None, None]
                                           * _embed_rows(term, labels))
    return StateFamily(order=1, grid=cs.grid, dims=dims, coefficients=coeff)


@dataclass(frozen=True)
class ValidityReport:
    """Adiabaticity margins for a ground-level start (label 0).

    ``secular`` collects the J-integral margin per ground in-level label;
    ``gap`` the per-excited-level mixing margin. Both are reported as full
    profiles over s plus their sup and end-of-protocol values; every margin
    carries the explicit factor v, so margins scale linearly as the sweep
    slows at fixed protocol shape.
    """

    grid: Grid
    velocity: float
    threshold: float
    secular: np.ndarray        # (n_nodes, d_ground)
    gap: dict                  # n -> (n_nodes, d_n)
    sup_secular: float
    sup_gap: dict
    final_secular: float
    final_gap: dict
    adiabatic_ok: bool


def validity_margins(cs, holonomies, phases: DynamicalPhase, velocity: float,
                     threshold: float = 0.1) -> ValidityReport:
    """Margins that must stay small for the order-0 description to hold."""
    u0 = holonomies[0].u
    if cs.n_levels < 2:
        secular = np.zeros((cs.grid.n, u0.shape[2]))
    else:
        j_sum = None
        for m in range(1, cs.n_levels):
            j = j_integral(cs, holonomies, 0, m)
            j_sum = j if j_sum is None else j_sum + j
        secular = velocity * np.abs((j_sum @ u0)[:, 0, :])

    gap_profiles = {}
    for n in range(1, cs.n_levels):
        delta_n0 = cs.gap(n, 0)
        mixing = (u0 @ cs.recursion(0, n)) / delta_n0[:, None, None]
        w1_0 = u0[0] @ cs.recursion(0, n)[0] @ holonomies[n].u[0].conj().T
        matched = (w1_0 @ holonomies[n].u) / delta_n0[0]
        osc = np.exp(-1j * (phases.omega[:, n] - phases.omega[:, 0]) / velocity)
        gap_profiles[n] = velocity * np.abs(
            mixing[:, 0, :] - osc[:, None] * matched[:, 0, :])

    sup_gap = {n: float(p.max()) for n, p in gap_profiles.items()}
    final_gap = {n: float(p[-1].max()) for n, p in gap_profiles.items()}
    sup_secular = float(secular.max())
    ok = sup_secular <= threshold and all(v <= threshold for v in sup_gap.values())
    return ValidityReport(grid=cs.grid, velocity=velocity, threshold=threshold,
                          secular=secular, gap=gap_profiles,
                          sup_secular=sup_secular, sup_gap=sup_gap,
                          final_secular=float(secular[-1].max()),
                          final_gap=final_gap, adiabatic_ok=bool(ok))
