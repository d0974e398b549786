"""Gate-application kernels, compiled when available.

The Cython extension ``qsdisc._kernels`` is used if it was built; otherwise
the numpy implementation in ``qsdisc._kernels_py`` is used. Setting
``QSDISC_PURE_PYTHON=1`` forces the fallback.
"""

from __future__ import annotations

import os

import numpy as np

from . import _kernels_py

try:
    if os.environ.get("QSDISC_PURE_PYTHON", "") not in ("", "0"):
        raise ImportError("compiled kernel disabled by QSDISC_PURE_PYTHON")
    from . import _kernels as _impl

    BACKEND = "cython"
except ImportError:
    _impl = _kernels_py
    BACKEND = "numpy"


def _prepare(state, matrix, targets, controls, n_qubits):
    if state.ndim != 2 or state.shape[0] != 1 << n_qubits:
        raise ValueError(f"state shape {state.shape} does not fit {n_qubits} qubits")
    if state.dtype != np.complex128 or not state.flags.c_contiguous:
        raise ValueError("state must be a C-contiguous complex128 array")
    targets = np.ascontiguousarray(targets, dtype=np.int64)
    controls = np.ascontiguousarray(controls, dtype=np.int64)
    used = np.concatenate([targets, controls])
    if used.size and (used.min() < 0 or used.max() >= n_qubits):
        raise ValueError(f"qubit index out of range for {n_qubits} qubits")
    if len(set(used.tolist())) != used.size:
        raise ValueError("targets and controls must be distinct qubits")
    matrix = np.ascontiguousarray(matrix, dtype=np.complex128)
    if matrix.shape != (1 << targets.size,) * 2:
        raise ValueError(f"matrix shape {matrix.shape} does not fit {targets.size} target qubits")
    return targets, controls, matrix


def apply_unitary(state, matrix, targets, controls=(), n_qubits=None, impl=None):
    """Apply ``matrix`` on ``targets`` (MSB first) to each column of ``state`` in place."""
    if n_qubits is None:
        n_qubits = int(state.shape[0]).bit_length() - 1
    targets, controls, matrix = _prepare(state, matrix, targets, controls, n_qubits)
    (impl or _impl).apply_unitary(state, matrix, targets, controls, n_qubits)
    return state


def apply_diagonal(state, diag, impl=None):
    diag = np.ascontiguousarray(diag, dtype=np.complex128)
    if state.shape[0] != diag.shape[0]:
        raise ValueError("diagonal length does not match state dimension")
    (impl or _impl).apply_diagonal(state, diag, int(state.shape[0]).bit_length() - 1)
    return state


def implementations() -> dict:
    """Available kernel modules by name, for benchmarking and cross-checks."""
    out = {"numpy": _kernels_py}
    try:
        from . import _kernels

        out["cython"] = _kernels
    except ImportError:
        pass
    return out
