"""Non-Abelian (Wilczek-Zee) holonomy transport and its velocity correction."""
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NonUnitaryInitial, NotGroundStart
from .grid import Grid
from .linalg import unitary_deviation, unitary_expm


@dataclass(frozen=True)
class HolonomyPath:
    """Transport matrices U(s_k) for one level, shape (n, d, d)."""

    level: int
    grid: Grid
    u: np.ndarray

    @property
    def u0(self) -> np.ndarray:
        return self.u[0]

    def unitarity_deviation(self) -> float:
        return unitary_deviation(self.u)


def wz_transport(a_nn: np.ndarray, grid: Grid, u0: np.ndarray = None,
                 atol: float = 1e-3) -> np.ndarray:
    """Solve dU/ds = U A(s) for anti-Hermitian A sampled on the grid.

    Midpoint-Magnus stepping: U(s_{k+1}) = U(s_k) expm(h A(s_{k+1/2})),
    with the midpoint generator taken as the average of adjacent node
    samples. The initial value sits leftmost in every product, so column
    gauges compose on the right. Global error O(h^2); each factor is
    unitary to roundoff.

    Parameters
    ----------
    a_nn : ndarray, shape (n, d, d)
        Anti-Hermitian generator samples (conjugated intra-level coupling).
    grid : Grid
    u0 : ndarray, optional
        Initial unitary, identity by default.

    Returns
    -------
    ndarray, shape (n, d, d)
    """
    a_nn = np.asarray(a_nn, dtype=complex)
    if a_nn.shape[0] != grid.n:
        raise DimensionMismatch("generator sample count does not match grid")
    d = a_nn.shape[1]
    if u0 is None:
        u0 = np.eye(d, dtype=complex)
    else:
        u0 = np.asarray(u0, dtype=complex)
        if unitary_deviation(u0) > atol:
            raise NonUnitaryInitial(
                f"initial transport matrix deviates from unitary by "
                f"{unitary_deviation(u0):.3e}")
    mids = 0.5 * (a_nn[:-1] + a_nn[1:])
    steps = unitary_expm(mids, grid.h, atol=atol)
    u = np.empty_like(a_nn)
    u[0] = u0
    for k in range(steps.shape[0]):
        u[k + 1] = u[k] @ steps[k]
    return u


def transport_all(cs, u0s=None) -> list:
    """Wilczek-Zee transport for every level of a CouplingSet."""
    out = []
    for n in range(cs.n_levels):
        u0 = None if u0s is None else u0s[n]
        u = wz_transport(cs.a(n, n), cs.grid, u0=u0)
        out.append(HolonomyPath(level=n, grid=cs.grid, u=u))
    return out


@dataclass(frozen=True)
class CorrectedHolonomy:
    """First-order-corrected holonomy data for the initially populated level.

    Attributes
    ----------
    v_matrix : ndarray, shape (n, labels, d)
        Ground-projected coefficient matrix of the order-truncated state
        with the dynamical phase removed; reduces to the bare holonomy as
        v -> 0. Not exactly unitary: its defect grows like v^2.
    population : ndarray, shape (n, labels)
        Probability weight remaining in the level after normalization.
    norm : ndarray, shape (n, labels)
        Normalization 1/||psi^(0) + v psi^(1)|| per label.
    correction : ndarray, shape (n,), complex
        Scalar correction factor extracted from V U^dagger (the deviation
        of its mean diagonal from 1, divided by v).
    excited : dict
        Optional per-level leakage coefficients of the first-order state,
        each of shape (n, labels, d_level), dynamical phase removed.
    velocity : float
    """

    v_matrix: np.ndarray
    population: np.ndarray
    norm: np.ndarray
    correction: np.ndarray
    excited: dict
    velocity: float

    def unitarity_deviation(self) -> float:
        vh = np.swapaxes(self.v_matrix, 1, 2).conj()
        eye = np.eye(self.v_matrix.shape[2])
        return float(np.abs(vh @ self.v_matrix - eye).max())


def corrected_holonomy(psi0_family, psi1_family, phases, holonomy,
                       velocity: float, level: int = 0,
                       start_tol: float = 1e-10) -> CorrectedHolonomy:
    """Combine zeroth- and first-order families into a corrected holonomy.

    The families must hold snapshot-basis coefficients (see StateFamily);
    the zeroth order must start entirely inside ``level``. Rows of the
    result are raw projections of psi^(0) + v psi^(1) onto the level's
    frame, phase-unwound by the level's dynamical phase; no row
    renormalization is applied, so the unitarity defect of the result is a
    genuine O(v^2) diagnostic.

    Raises NotGroundStart if the zeroth order has weight outside ``level``
    at s = 0.
    """
    sl = psi0_family.level_slices[level]
    c0 = psi0_family.coefficients
    c1 = psi1_family.coefficients
    if c0.shape != c1.shape:
        raise DimensionMismatch("family shapes differ")
    outside = np.linalg.norm(np.delete(c0[0], np.r_[sl], axis=1), axis=1)
    if outside.max() > start_tol:
        raise NotGroundStart(
            f"zeroth order has weight {outside.max():.3e} outside level {level} at s=0")

    total = c0 + velocity * c1
    phase_back = np.exp(1j * phases.omega[:, level] / velocity)
    v_matrix = phase_back[:, None, None] * total[:, :, sl]

    norms = np.linalg.norm(total, axis=2)
    population = (np.linalg.norm(total[:, :, sl], axis=2) / norms) ** 2

    u_dag = np.swapaxes(holonomy.u, 1, 2).conj()
    d = v_matrix.shape[2]
    overlap = np.einsum("kij,kji->k", v_matrix[:, :d, :], u_dag) / d
    correction = (overlap - 1.0) / velocity

    excited = {}
    for n, other in enumerate(psi0_family.level_slices):
        if n == level:
            continue
        back_n = np.exp(1j * phases.omega[:, n] / velocity)
        excited[n] = back_n[:, None, None] * c1[:, :, other]
    return CorrectedHolonomy(v_matrix=v_matrix, population=population,
                             norm=1.0 / norms, correction=correction,
                             excited=excited, velocity=velocity)
