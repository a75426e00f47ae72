"""Small dense linear-algebra helpers for unitary transport."""
import numpy as np

from .errors import NotAntiHermitian


def is_hermitian(a: np.ndarray, atol: float = 1e-12) -> bool:
    a = np.asarray(a)
    return bool(np.all(np.abs(a - np.swapaxes(a, -1, -2).conj()) <= atol))


def is_anti_hermitian(a: np.ndarray, atol: float = 1e-12) -> bool:
    a = np.asarray(a)
    return bool(np.all(np.abs(a + np.swapaxes(a, -1, -2).conj()) <= atol))


def is_unitary(u: np.ndarray, atol: float = 1e-10) -> bool:
    u = np.asarray(u)
    eye = np.eye(u.shape[-1])
    return bool(np.all(np.abs(np.swapaxes(u, -1, -2).conj() @ u - eye) <= atol))


def unitary_deviation(u: np.ndarray) -> float:
    """max-entry deviation of U^dagger U from the identity."""
    u = np.asarray(u)
    eye = np.eye(u.shape[-1])
    return float(np.abs(np.swapaxes(u, -1, -2).conj() @ u - eye).max())


def unitary_expm(a: np.ndarray, dt: float = 1.0, atol: float = 1e-3) -> np.ndarray:
    """exp(a * dt) for anti-Hermitian a (batched on leading axes).

    The generator is projected onto its anti-Hermitian part before
    exponentiating: finite-difference-sourced connections carry a spurious
    Hermitian component of order h^2, and discarding it keeps every factor
    unitary to roundoff. Deviations beyond atol (max-entry norm) are not
    treated as noise and raise NotAntiHermitian.
    """
    a = np.asarray(a, dtype=complex)
    a_dag = np.swapaxes(a, -1, -2).conj()
    dev = np.abs(a + a_dag).max()
    if dev > atol:
        raise NotAntiHermitian(f"generator deviates from anti-Hermitian by {dev:.3e}")
    lam, v = np.linalg.eigh(0.5j * (a - a_dag))
    phase = np.exp(-1j * lam * dt)
    return np.einsum("...ij,...j,...kj->...ik", v, phase, v.conj())
