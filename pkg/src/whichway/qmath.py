"""Small complex-matrix kernel for one and two qubits.

Everything here works on plain ``numpy`` arrays: 2x2 matrices for a single
qubit, 4x4 for the Quanton-Detector pair, and length-3 real arrays for Bloch
vectors. The tensor ordering is fixed to Quanton (first factor) x Detector
(second factor) throughout the package; ``tensor`` and ``partial_trace`` are
the only places that know about it.
"""

from __future__ import annotations

import numpy as np

#: Tolerance for a single algebraic identity.
ATOL_IDENTITY = 1e-12
#: Tolerance for results that went through several matrix stages.
ATOL_PIPELINE = 1e-9
#: Smallest eigenvalue still accepted as positive semidefinite.
PSD_TOL = 1e-12

IDENTITY2 = np.eye(2, dtype=complex)
IDENTITY4 = np.eye(4, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = (SIGMA_X, SIGMA_Y, SIGMA_Z)


class UnphysicalStateError(ValueError):
    """Raised when an input is not a valid quantum state or operator."""


def _as_matrix(m, dim: int) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.shape != (dim, dim):
        raise ValueError(f"expected a {dim}x{dim} matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def _as_bloch(s) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    if s.shape != (3,):
        raise ValueError(f"Bloch vector must have 3 components, got shape {s.shape}")
    if not np.all(np.isfinite(s)):
        raise ValueError("Bloch vector has non-finite components")
    return s


def is_hermitian(m, tol: float = ATOL_IDENTITY) -> bool:
    m = np.asarray(m, dtype=complex)
    return bool(np.max(np.abs(m - m.conj().T)) <= tol)


def is_unitary(m, tol: float = ATOL_IDENTITY) -> bool:
    m = np.asarray(m, dtype=complex)
    eye = np.eye(m.shape[0])
    return bool(np.max(np.abs(m.conj().T @ m - eye)) <= tol)


def is_density(m, tol: float = ATOL_IDENTITY) -> bool:
    """Hermitian, unit trace and no eigenvalue below ``-tol``."""
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    if not is_hermitian(m, tol):
        return False
    if abs(np.trace(m) - 1) > tol:
        return False
    if m.shape == (2, 2):
        smallest = hermitian_eigenvalues(m)[1]
    else:
        smallest = np.linalg.eigvalsh((m + m.conj().T) / 2)[0]
    return bool(smallest >= -tol)


def check_density(m, dim: int = 2, tol: float = ATOL_IDENTITY) -> np.ndarray:
    """Return ``m`` as a complex array, raising if it is not a density matrix."""
    m = _as_matrix(m, dim)
    if not is_density(m, tol):
        raise UnphysicalStateError(
            f"not a valid {dim}x{dim} density operator "
            f"(trace={np.trace(m).real:.6g})")
    return m


def bloch_norm(s) -> float:
    return float(np.linalg.norm(_as_bloch(s)))


def bloch_to_density(s, tol: float = ATOL_IDENTITY) -> np.ndarray:
    """Map a Bloch vector to ``(1 + s.sigma) / 2``.

    Raises:
        UnphysicalStateError: if ``|s| > 1 + tol``.
    """
    s = _as_bloch(s)
    if np.linalg.norm(s) > 1 + tol:
        raise UnphysicalStateError(
            f"unphysical Bloch vector: |s| = {np.linalg.norm(s):.6g} > 1")
    return 0.5 * (IDENTITY2 + s[0] * SIGMA_X + s[1] * SIGMA_Y + s[2] * SIGMA_Z)


def density_to_bloch(rho, tol: float = ATOL_IDENTITY) -> np.ndarray:
    """Components ``tr(rho sigma_k)`` of a single-qubit density operator."""
    rho = check_density(rho, 2, tol)
    return np.array([
        2 * rho[0, 1].real,
        -2 * rho[0, 1].imag,
        (rho[0, 0] - rho[1, 1]).real,
    ])


def tensor(quanton, detector) -> np.ndarray:
    """Kronecker product with the Quanton as first factor."""
    return np.kron(_as_matrix(quanton, 2), _as_matrix(detector, 2))


def partial_trace(rho, keep: str, tol: float = ATOL_IDENTITY) -> np.ndarray:
    """Reduce a two-qubit density operator to one subsystem.

    Args:
        rho: 4x4 density operator on Quanton x Detector.
        keep: ``"quanton"`` traces out the detector, ``"detector"`` traces
            out the quanton.
    """
    rho = check_density(rho, 4, tol)
    r = rho.reshape(2, 2, 2, 2)
    if keep == "quanton":
        return np.einsum("ajbj->ab", r)
    if keep == "detector":
        return np.einsum("iaib->ab", r)
    raise ValueError(f"keep must be 'quanton' or 'detector', got {keep!r}")


def hermitian_eigenvalues(m, tol: float = ATOL_IDENTITY) -> tuple[float, float]:
    """Eigenvalues of a 2x2 Hermitian matrix, largest first.

    Uses the quadratic formula with the discriminant written as
    ``((a - d) / 2)**2 + |b|**2``, which equals ``t**2 / 4 - det`` for a
    Hermitian matrix and never goes negative through cancellation.
    """
    m = _as_matrix(m, 2)
    if not is_hermitian(m, tol):
        raise ValueError("matrix is not Hermitian")
    a, d = m[0, 0].real, m[1, 1].real
    mean = 0.5 * (a + d)
    radius = np.hypot(0.5 * (a - d), abs(m[0, 1]))
    return float(mean + radius), float(mean - radius)


def trace_norm(m, tol: float = ATOL_IDENTITY) -> float:
    """Sum of absolute eigenvalues of a 2x2 Hermitian matrix."""
    lam1, lam2 = hermitian_eigenvalues(m, tol)
    return abs(lam1) + abs(lam2)


def linear_entropy(rho) -> float:
    """``1 - tr(rho^2)``."""
    rho = np.asarray(rho, dtype=complex)
    return float(1 - np.trace(rho @ rho).real)


def rz(angle: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * angle), np.exp(0.5j * angle)])


def ry(angle: float) -> np.ndarray:
    c, s = np.cos(angle / 2), np.sin(angle / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def random_unitary(rng: np.random.Generator) -> np.ndarray:
    """Haar-random 2x2 unitary ``e^{i alpha} Rz(beta) Ry(gamma) Rz(delta)``.

    The Haar measure on SU(2) in ZYZ Euler angles is proportional to
    ``sin(gamma)``, so ``gamma`` is drawn as ``arccos(1 - 2u)``.
    """
    alpha, beta, delta = rng.uniform(0, 2 * np.pi, size=3)
    gamma = np.arccos(1 - 2 * rng.uniform())
    return np.exp(1j * alpha) * (rz(beta) @ ry(gamma) @ rz(delta))


def random_bloch(rng: np.random.Generator, pure: bool = False) -> np.ndarray:
    """Bloch vector uniform on the unit sphere, or uniform in the ball."""
    v = rng.standard_normal(3)
    v /= np.linalg.norm(v)
    if pure:
        return v
    return v * rng.uniform() ** (1 / 3)
