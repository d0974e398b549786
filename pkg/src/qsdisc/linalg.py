"""Dense complex linear algebra helpers.

Vectors and matrices are plain ``numpy`` complex128 arrays. Qubit 0 is the
most significant bit of a basis index throughout the package.
"""

from __future__ import annotations

from functools import reduce

import numpy as np

from .errors import NonHermitian

# Default tolerances.
UNITARY_TOL = 1e-10
PROPAGATOR_TOL = 1e-9
PROBABILITY_TOL = 1e-9

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)

PAULI = {"i": I2, "x": X, "y": Y, "z": Z}


def as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-d array, got shape {a.shape}")
    return a


def as_vector(v) -> np.ndarray:
    a = np.asarray(v, dtype=complex)
    if a.ndim != 1:
        raise ValueError(f"expected a 1-d array, got shape {a.shape}")
    return a


def kron(a, b) -> np.ndarray:
    """Kronecker product; ``a`` occupies the more significant index bits."""
    return np.kron(as_matrix(a), as_matrix(b))


def kron_all(*mats) -> np.ndarray:
    return reduce(kron, mats)


def max_abs(m) -> float:
    m = np.asarray(m)
    return float(np.max(np.abs(m))) if m.size else 0.0


def is_unitary(m, tol: float = UNITARY_TOL) -> bool:
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise ValueError("is_unitary needs a square matrix")
    return max_abs(m.conj().T @ m - np.eye(m.shape[0])) <= tol


def is_hermitian(m, tol: float = UNITARY_TOL) -> bool:
    m = as_matrix(m)
    return m.shape[0] == m.shape[1] and max_abs(m - m.conj().T) <= tol


def expm_i(h) -> np.ndarray:
    """Return ``exp(i*h)`` for Hermitian ``h`` by eigendecomposition."""
    h = as_matrix(h)
    if h.shape[0] != h.shape[1] or not is_hermitian(h, 1e-10):
        raise NonHermitian("expm_i needs a Hermitian matrix", deviation=_herm_dev(h))
    # symmetrize so eigh sees exactly Hermitian input
    w, v = np.linalg.eigh((h + h.conj().T) / 2)
    return (v * np.exp(1j * w)) @ v.conj().T


def _herm_dev(h: np.ndarray) -> float | None:
    if h.shape[0] != h.shape[1]:
        return None
    return max_abs(h - h.conj().T)


def global_phase(a, b) -> complex:
    """Unit-modulus c minimizing |a - c*b|, read off the largest entry of b."""
    a, b = np.asarray(a, dtype=complex), np.asarray(b, dtype=complex)
    k = np.unravel_index(np.argmax(np.abs(b)), b.shape)
    if abs(b[k]) == 0 or abs(a[k]) == 0:
        return 1.0 + 0j
    r = a[k] / b[k]
    return r / abs(r)


def equal_up_to_global_phase(a, b, tol: float = PROPAGATOR_TOL) -> bool:
    a, b = np.asarray(a, dtype=complex), np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return max_abs(a - global_phase(a, b) * b) <= tol


def phase_distance(a, b) -> float:
    """Max-entry distance between ``a`` and ``b`` after removing global phase."""
    a, b = np.asarray(a, dtype=complex), np.asarray(b, dtype=complex)
    return max_abs(a - global_phase(a, b) * b)


def commutator(a, b) -> np.ndarray:
    return a @ b - b @ a


def n_qubits_of(dim: int) -> int:
    n = int(dim).bit_length() - 1
    if dim < 1 or 1 << n != dim:
        raise ValueError(f"dimension {dim} is not a power of 2")
    return n


def basis_state(index: int, n_qubits: int) -> np.ndarray:
    v = np.zeros(1 << n_qubits, dtype=complex)
    v[index] = 1.0
    return v


def ket(bits: str) -> np.ndarray:
    """Computational basis vector from a bit string, e.g. ``ket("010")``."""
    return basis_state(int(bits, 2), len(bits))


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Gaussian matrix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (a + a.conj().T) / 2
