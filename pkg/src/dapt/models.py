"""Benchmark models with closed-form references.

Both models drive a magnetic-type Hamiltonian around one full cone
revolution, parametrized by scaled time s in [0, 1] so the protocol shape
is velocity-independent: the axis angle is phi = 2*pi*s and the physical
drive frequency is 2*pi*velocity. Closed-form expressions that depend on
how fast the cone is traversed therefore take the velocity explicitly.

GammaModel: four-dimensional, two levels of double degeneracy, non-Abelian
holonomies, exact solution, and closed forms for the adiabatic state, its
first-order correction, and the correction-dressed holonomy.

SpinHalfModel: two-dimensional Rabi problem, both levels simple; exercises
ragged degeneracy bookkeeping and the Abelian limit of the transport.
"""
from dataclasses import dataclass

import numpy as np

from .couplings import CouplingSet
from .grid import Grid
from .holonomy import HolonomyPath
from .spectral import SpectralPath

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)

# Clifford triple underlying the four-level model: pairwise anticommuting,
# each squaring to the identity. Commutators close on the PI triple:
# [GAMMA_i, GAMMA_j] = 2i eps_ijk PI_k.
GAMMA = tuple(np.kron(PAULI_X, p) for p in (PAULI_X, PAULI_Y, PAULI_Z))
PI = tuple(np.kron(np.eye(2), p) for p in (PAULI_X, PAULI_Y, PAULI_Z))


def _axis(cone_angle: float, phi):
    phi = np.asarray(phi, dtype=float)
    st, ct = np.sin(cone_angle), np.cos(cone_angle)
    return np.stack([st * np.cos(phi), st * np.sin(phi),
                     ct * np.ones_like(phi)], axis=-1)


@dataclass(frozen=True)
class GammaModel:
    """Two doubly degenerate levels split by ``gap``, axis on a cone."""

    gap: float = 1.0
    cone_angle: float = np.pi / 3

    def __post_init__(self):
        if self.gap <= 0.0:
            raise ValueError("gap must be positive")
        if not 0.0 <= self.cone_angle <= np.pi:
            raise ValueError("cone_angle must lie in [0, pi]")

    @property
    def dims(self) -> tuple:
        return (2, 2)

    def hamiltonian(self, s: float) -> np.ndarray:
        r = _axis(self.cone_angle, 2.0 * np.pi * s)
        return (self.gap / 2.0) * sum(r[i] * GAMMA[i] for i in range(3))

    def d_hamiltonian(self, s: float) -> np.ndarray:
        st = np.sin(self.cone_angle)
        phi = 2.0 * np.pi * s
        return (np.pi * self.gap * st) * (-np.sin(phi) * GAMMA[0]
                                          + np.cos(phi) * GAMMA[1])

    def energies(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        half = self.gap / 2.0
        return np.stack([-half * np.ones_like(s), half * np.ones_like(s)],
                        axis=-1)

    def frames(self, s) -> np.ndarray:
        """Snapshot frame, columns [0^0, 0^1, 1^0, 1^1], shape (..., 4, 4)."""
        s = np.asarray(s, dtype=float)
        alpha = np.exp(2j * np.pi * s) * np.sin(self.cone_angle)
        beta = np.cos(self.cone_angle) * np.ones_like(alpha)
        zero = np.zeros_like(alpha)
        one = np.ones_like(alpha)
        cols = []
        for n in (0, 1):
            sgn = (-1.0) ** n
            cols.append(np.stack([alpha.conj(), -beta, zero, -sgn * one], axis=-1))
            cols.append(np.stack([beta, alpha, -sgn * one, zero], axis=-1))
        return np.stack(cols, axis=-1) / np.sqrt(2.0)

    def spectral_path(self, grid: Grid) -> SpectralPath:
        f = self.frames(grid.s)
        return SpectralPath(grid=grid, energies=self.energies(grid.s),
                            blocks=(f[:, :, :2], f[:, :, 2:]))

    def connection(self, s) -> np.ndarray:
        """Plain coupling in d/ds units; one matrix serves every level pair."""
        s = np.asarray(s, dtype=float)
        st, ct = np.sin(self.cone_angle), np.cos(self.cone_angle)
        e = np.exp(2j * np.pi * s)
        row0 = np.stack([st * st * np.ones_like(e), e * st * ct], axis=-1)
        row1 = np.stack([e.conj() * st * ct, -st * st * np.ones_like(e)], axis=-1)
        return -1j * np.pi * np.stack([row0, row1], axis=-2)

    def couplings(self, grid: Grid) -> CouplingSet:
        m = self.connection(grid.s)
        mats = {(n, k): m for n in (0, 1) for k in (0, 1)}
        return CouplingSet(grid=grid, energies=self.energies(grid.s),
                           matrices=mats)

    def wz_matrix(self, s) -> np.ndarray:
        """Holonomy of either level, shape (..., 2, 2)."""
        s = np.asarray(s, dtype=float)
        ct, st = np.cos(self.cone_angle), np.sin(self.cone_angle)
        half = np.pi * s
        z1 = np.exp(1j * half) * (np.cos(half * ct) - 1j * ct * np.sin(half * ct))
        z2 = 1j * np.exp(1j * half) * st * np.sin(half * ct)
        row0 = np.stack([z1, -z2.conj()], axis=-1)
        row1 = np.stack([z2, z1.conj()], axis=-1)
        return np.stack([row0, row1], axis=-2)

    def holonomies(self, grid: Grid) -> list:
        u = self.wz_matrix(grid.s)
        return [HolonomyPath(level=n, grid=grid, u=u) for n in (0, 1)]

    def corrected_wz(self, s, velocity: float) -> np.ndarray:
        """First-order-dressed ground holonomy: scalar factor times wz_matrix."""
        s = np.asarray(s, dtype=float)
        st = np.sin(self.cone_angle)
        factor = 1.0 + 1j * (np.pi ** 2) * velocity * s * st * st / self.gap
        return factor[..., None, None] * self.wz_matrix(s)

    def _rabi(self, s, velocity: float):
        w = 2.0 * np.pi * velocity
        t = np.asarray(s, dtype=float) / velocity
        b, ct = self.gap, np.cos(self.cone_angle)
        om_p = np.sqrt(w * w + b * b + 2.0 * w * b * ct)
        om_m = np.sqrt(w * w + b * b - 2.0 * w * b * ct)
        if min(om_p, om_m) < 1e-12 * max(w, b):
            raise ValueError("resonant parameters: closed form is singular")
        a_p = np.cos(om_p * t / 2) + 1j * ((b + w * ct) / om_p) * np.sin(om_p * t / 2)
        a_m = np.cos(om_m * t / 2) + 1j * ((b - w * ct) / om_m) * np.sin(om_m * t / 2)
        b_p = 1j * (w / om_p) * np.sin(om_p * t / 2)
        b_m = 1j * (w / om_m) * np.sin(om_m * t / 2)
        return a_p, a_m, b_p, b_m

    def exact_coefficients(self, s, velocity: float) -> np.ndarray:
        """Snapshot coefficients of the exact state started in |0^0(0)>.

        Shape (..., 4), ordered like the frame columns.
        """
        a_p, a_m, b_p, b_m = self._rabi(s, velocity)
        s = np.asarray(s, dtype=float)
        ct, st = np.cos(self.cone_angle), np.sin(self.cone_angle)
        ep = np.exp(1j * np.pi * s)
        c00 = ep * ((1 + ct) / 2 * a_m + (1 - ct) / 2 * a_p)
        c01 = ep.conj() * st * (a_p - a_m) / 2
        c10 = ep * st * st * (b_p + b_m) / 2
        c11 = ep.conj() * st * ((1 + ct) / 2 * b_m - (1 - ct) / 2 * b_p)
        return np.stack([c00, c01, c10, c11], axis=-1)

    def exact_state(self, s, velocity: float) -> np.ndarray:
        c = self.exact_coefficients(s, velocity)
        return np.einsum("...ij,...j->...i", self.frames(s), c)

    def daa_coefficients(self, s, velocity: float) -> np.ndarray:
        """Order-0 snapshot coefficients for the |0^0(0)> start, (..., 4)."""
        s = np.asarray(s, dtype=float)
        u = self.wz_matrix(s)
        phase = np.exp(1j * self.gap * s / (2.0 * velocity))
        zero = np.zeros_like(phase)
        return np.stack([phase * u[..., 0, 0], phase * u[..., 0, 1],
                         zero, zero], axis=-1)

    def first_order_coefficients(self, s, velocity: float) -> np.ndarray:
        """Closed-form psi^(1) snapshot coefficients, |0^0(0)> start.

        Normalized so that exact = daa + velocity * first_order + O(v^2).
        """
        s = np.asarray(s, dtype=float)
        b = self.gap
        ct, st = np.cos(self.cone_angle), np.sin(self.cone_angle)
        u = self.wz_matrix(s)
        z1, z2 = u[..., 0, 0], u[..., 1, 0]
        half = b * s / (2.0 * velocity)
        secular = 1j * (np.pi ** 2) * s * st * st / b
        c10 = 2j * np.pi / b * np.sin(half) * st * (z1 * st + z2 * ct)
        c11 = 2 * np.pi / b * (np.cos(half) * z2.conj()
                               + 1j * np.sin(half) * ct
                               * (z1.conj() * st + z2.conj() * ct))
        out = secular[..., None] * self.daa_coefficients(s, velocity)
        out[..., 2] += c10
        out[..., 3] += c11
        return out

    def first_order_state(self, s, velocity: float) -> np.ndarray:
        c = self.first_order_coefficients(s, velocity)
        return np.einsum("...ij,...j->...i", self.frames(s), c)


@dataclass(frozen=True)
class SpinHalfModel:
    """Single spin-1/2 on the same cone protocol; both levels simple."""

    gap: float = 1.0
    cone_angle: float = np.pi / 3

    def __post_init__(self):
        if self.gap <= 0.0:
            raise ValueError("gap must be positive")
        if not 0.0 <= self.cone_angle <= np.pi:
            raise ValueError("cone_angle must lie in [0, pi]")

    @property
    def dims(self) -> tuple:
        return (1, 1)

    def hamiltonian(self, s: float) -> np.ndarray:
        r = _axis(self.cone_angle, 2.0 * np.pi * s)
        return (self.gap / 2.0) * (r[0] * PAULI_X + r[1] * PAULI_Y
                                   + r[2] * PAULI_Z)

    def d_hamiltonian(self, s: float) -> np.ndarray:
        st = np.sin(self.cone_angle)
        phi = 2.0 * np.pi * s
        return (np.pi * self.gap * st) * (-np.sin(phi) * PAULI_X
                                          + np.cos(phi) * PAULI_Y)

    def energies(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        half = self.gap / 2.0
        return np.stack([-half * np.ones_like(s), half * np.ones_like(s)],
                        axis=-1)

    def frames(self, s) -> np.ndarray:
        """Columns [ground, excited], shape (..., 2, 2)."""
        s = np.asarray(s, dtype=float)
        e = np.exp(-2j * np.pi * s)
        ch, sh = np.cos(self.cone_angle / 2), np.sin(self.cone_angle / 2)
        row0 = np.stack([-e * sh, e * ch], axis=-1)
        row1 = np.stack([ch * np.ones_like(e), sh * np.ones_like(e)], axis=-1)
        return np.stack([row0, row1], axis=-2)

    def spectral_path(self, grid: Grid) -> SpectralPath:
        f = self.frames(grid.s)
        return SpectralPath(grid=grid, energies=self.energies(grid.s),
                            blocks=(f[:, :, :1], f[:, :, 1:]))

    def connection(self, s, level: int = 0) -> np.ndarray:
        """Plain in-level coupling (1x1), d/ds units."""
        s = np.asarray(s, dtype=float)
        half = self.cone_angle / 2.0
        w2 = np.sin(half) ** 2 if level == 0 else np.cos(half) ** 2
        return (-2j * np.pi * w2) * np.ones_like(s)[..., None, None]

    def couplings(self, grid: Grid) -> CouplingSet:
        ones = np.ones((grid.n, 1, 1), dtype=complex)
        half = self.cone_angle / 2.0
        cross = 1j * np.pi * np.sin(self.cone_angle)
        mats = {(0, 0): self.connection(grid.s, 0),
                (1, 1): self.connection(grid.s, 1),
                (0, 1): cross * ones, (1, 0): cross * ones}
        return CouplingSet(grid=grid, energies=self.energies(grid.s),
                           matrices=mats)

    def holonomy_phase(self, s, level: int = 0) -> np.ndarray:
        """Closed-form Abelian holonomy U^level(s), shape (..., 1, 1)."""
        s = np.asarray(s, dtype=float)
        half = self.cone_angle / 2.0
        w2 = np.sin(half) ** 2 if level == 0 else np.cos(half) ** 2
        return np.exp(2j * np.pi * s * w2)[..., None, None]

    def holonomies(self, grid: Grid) -> list:
        return [HolonomyPath(level=n, grid=grid,
                             u=self.holonomy_phase(grid.s, n)) for n in (0, 1)]

    def exact_state(self, s, velocity: float) -> np.ndarray:
        """Rotating-frame Rabi solution for the ground start, shape (..., 2)."""
        w = 2.0 * np.pi * velocity
        t = np.asarray(s, dtype=float) / velocity
        b, theta = self.gap, self.cone_angle
        hx = 0.5 * b * np.sin(theta)
        hz = 0.5 * (b * np.cos(theta) - w)
        om = np.sqrt(hx * hx + hz * hz)
        psi0 = np.array([-np.sin(theta / 2.0), np.cos(theta / 2.0)],
                        dtype=complex)
        if om < 1e-300:
            rot = np.broadcast_to(np.eye(2, dtype=complex), t.shape + (2, 2))
        else:
            ang = om * t
            cos = np.cos(ang)[..., None, None] * np.eye(2)
            sin = np.sin(ang)[..., None, None] \
                * (hx * PAULI_X + hz * PAULI_Z) / om
            rot = cos - 1j * sin
        lab = np.exp(-1j * w * t / 2.0)
        frame = np.stack([
            np.stack([lab, np.zeros_like(lab)], axis=-1),
            np.stack([np.zeros_like(lab), lab.conj()], axis=-1)], axis=-2)
        return np.einsum("...ij,...jk,k->...i", frame, rot, psi0)
