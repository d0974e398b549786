"""Pure numpy implementation of the gate kernel (fallback for ``_kernels``)."""

from __future__ import annotations

import numpy as np


def apply_unitary(state, matrix, targets, controls, n_qubits):
    """Apply ``matrix`` to ``targets`` of every column of ``state``, in place.

    ``state`` has shape ``(2**n_qubits, ncols)``. ``targets`` are listed most
    significant first with respect to ``matrix``. The gate acts only where all
    ``controls`` are 1.
    """
    ncols = state.shape[1]
    k = len(targets)
    t = state.reshape((2,) * n_qubits + (ncols,))
    # fix control axes to 1 (basic indexing keeps this a view)
    index = [slice(None)] * (n_qubits + 1)
    for c in controls:
        index[c] = 1
    view = t[tuple(index)]
    # surviving axis positions after the integer indexing above
    remaining = [q for q in range(n_qubits) if q not in set(controls)]
    axes = [remaining.index(q) for q in targets]
    m = np.asarray(matrix).reshape((2,) * (2 * k))
    out = np.tensordot(m, view, axes=(list(range(k, 2 * k)), axes))
    view[...] = np.moveaxis(out, list(range(k)), axes)


def apply_diagonal(state, diag, n_qubits):
    state *= np.asarray(diag)[:, None]
