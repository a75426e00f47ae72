"""Snapshot eigensystems along a Hamiltonian path, grouped into degenerate levels.

A *level* is a cluster of (numerically) equal eigenvalues; its *frame block*
holds the orthonormal eigenvectors spanning that eigenspace, one column per
in-level label. Blocks are ragged: level n keeps its own degeneracy d_n
columns, no zero padding.
"""
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import (DegeneracyChanged, DimensionMismatch, NonHermitianInput,
                     RankDeficientOverlap)
from .grid import Grid


@dataclass(frozen=True)
class SpectralFrame:
    """Eigensystem at a single node: level energies and frame blocks."""

    s: float
    energies: np.ndarray               # (n_levels,)
    blocks: tuple                      # per level: (dim, d_n)

    @property
    def dims(self) -> tuple:
        return tuple(b.shape[1] for b in self.blocks)


@dataclass(frozen=True)
class SpectralPath:
    """Eigensystem samples along the whole grid.

    Attributes
    ----------
    grid : Grid
    energies : ndarray, shape (n, n_levels)
        Level energies, ascending in the level index at every node.
    blocks : tuple of ndarray
        One array per level, shape (n, dim, d_level); columns are the
        eigenvector frame at each node.
    """

    grid: Grid
    energies: np.ndarray
    blocks: tuple

    def __post_init__(self):
        n = self.grid.n
        if self.energies.shape != (n, len(self.blocks)):
            raise DimensionMismatch("energies shape does not match grid/levels")
        dim = self.dim
        for b in self.blocks:
            if b.shape[0] != n or b.shape[1] != dim:
                raise DimensionMismatch("frame block shape mismatch")

    @property
    def n_levels(self) -> int:
        return len(self.blocks)

    @property
    def dims(self) -> tuple:
        return tuple(b.shape[2] for b in self.blocks)

    @property
    def d_max(self) -> int:
        return max(self.dims)

    @property
    def dim(self) -> int:
        return sum(self.dims)

    def level_slices(self) -> list:
        """Slices of each level inside the flattened snapshot index."""
        out, start = [], 0
        for d in self.dims:
            out.append(slice(start, start + d))
            start += d
        return out

    def frame(self, k: int) -> SpectralFrame:
        return SpectralFrame(s=float(self.grid.s[k]),
                             energies=self.energies[k],
                             blocks=tuple(b[k] for b in self.blocks))

    def basis(self) -> np.ndarray:
        """Full snapshot basis, shape (n, dim, dim): blocks side by side."""
        return np.concatenate(self.blocks, axis=2)

    def projectors(self, level: int) -> np.ndarray:
        """Rank-d_level projectors block @ block^dagger, shape (n, dim, dim)."""
        b = self.blocks[level]
        return b @ np.swapaxes(b, 1, 2).conj()


def hamiltonian_samples(h, grid: Grid) -> np.ndarray:
    """Stack H(s_k) for a callable, or validate precomputed samples."""
    if callable(h):
        samples = np.stack([np.asarray(h(s), dtype=complex) for s in grid.s])
    else:
        samples = np.asarray(h, dtype=complex)
    if samples.ndim != 3 or samples.shape[0] != grid.n \
            or samples.shape[1] != samples.shape[2]:
        raise DimensionMismatch("expected samples of shape (n, dim, dim)")
    return samples


def _cluster_mask(energies: np.ndarray, tol: float) -> np.ndarray:
    """Boolean split markers between adjacent eigenvalues, per node."""
    scale = np.maximum(1.0, np.abs(energies).max(axis=1, keepdims=True))
    return np.diff(energies, axis=1) > tol * scale


def snapshot_eigensystem(h, grid: Grid, degeneracy_tol: float = 1e-8,
                         hermiticity_tol: float = 1e-12) -> SpectralPath:
    """Diagonalize H(s) on the grid and group eigenvalues into levels.

    Parameters
    ----------
    h : callable or ndarray
        Hamiltonian path: callable s -> (dim, dim) or samples (n, dim, dim).
    grid : Grid
    degeneracy_tol : float
        Eigenvalues closer than tol * max(1, |E|_max) are one level.
    hermiticity_tol : float
        Max-entry bound on ||H - H^dagger||.

    Returns
    -------
    SpectralPath
        Levels ascending in energy; per-node gauges are whatever the
        eigensolver returned (see smooth_gauge).

    Raises
    ------
    NonHermitianInput
        If any sample violates the hermiticity tolerance.
    DegeneracyChanged
        If the cluster structure differs between nodes (level crossing or
        a tolerance straddling a gap).
    """
    samples = hamiltonian_samples(h, grid)
    dev = np.abs(samples - np.swapaxes(samples, 1, 2).conj()).max()
    if dev > hermiticity_tol:
        raise NonHermitianInput(f"Hamiltonian deviates from Hermitian by {dev:.3e}")
    evals, evecs = np.linalg.eigh(samples)

    mask = _cluster_mask(evals, degeneracy_tol)
    if not np.all(mask == mask[0]):
        bad = int(np.argmax(np.any(mask != mask[0], axis=1)))
        raise DegeneracyChanged(
            f"degeneracy structure changes at node {bad} (s={grid.s[bad]:.6g})")
    splits = np.flatnonzero(mask[0]) + 1
    bounds = [0, *splits.tolist(), evals.shape[1]]

    energies = np.stack(
        [evals[:, a:b].mean(axis=1) for a, b in zip(bounds, bounds[1:])], axis=1)
    blocks = tuple(evecs[:, :, a:b] for a, b in zip(bounds, bounds[1:]))
    return SpectralPath(grid=grid, energies=energies, blocks=blocks)


def smooth_gauge(path: SpectralPath, min_singular: float = 1e-6) -> SpectralPath:
    """Align each level's frames along the grid by unitary Procrustes.

    Node k+1's block is right-multiplied by the polar unitary of the
    overlap block(k)^dagger block(k+1), which maximizes continuity with
    node k. The first frame is left untouched, and level projectors are
    unchanged (gauge moves within each eigenspace only).

    Raises
    ------
    RankDeficientOverlap
        If an overlap's smallest singular value drops below min_singular;
        the grid is too coarse or the tracked subspace turned over.
    """
    new_blocks = []
    for level, b in enumerate(path.blocks):
        out = b.copy()
        for k in range(b.shape[0] - 1):
            overlap = out[k].conj().T @ out[k + 1]
            w, sig, vh = np.linalg.svd(overlap)
            if sig.min() < min_singular:
                raise RankDeficientOverlap(
                    f"level {level}: overlap singular value {sig.min():.3e} "
                    f"below {min_singular:.3e} between nodes {k} and {k + 1}")
            out[k + 1] = out[k + 1] @ (vh.conj().T @ w.conj().T)
        new_blocks.append(out)
    return SpectralPath(grid=path.grid, energies=path.energies,
                        blocks=tuple(new_blocks))
