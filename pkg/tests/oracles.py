"""Independent reference constructions used by the tests."""

from functools import reduce

import numpy as np

P0 = np.diag([1.0, 0.0]).astype(complex)
P1 = np.diag([0.0, 1.0]).astype(complex)
HAD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


def _on_ancilla(op, j, n_anc):
    return reduce(np.kron, [op if k == j else np.eye(2) for k in range(n_anc)])


def projector_circuit(operators):
    """Dense H / controlled-U / H unitary on work ⊗ ancillas from explicit projectors."""
    n_anc = len(operators)
    dw = operators[0].shape[0]
    h_all = np.kron(np.eye(dw), reduce(np.kron, [HAD] * n_anc))
    total = h_all
    for j, u in enumerate(operators):
        cu = np.kron(np.eye(dw), _on_ancilla(P0, j, n_anc)) + np.kron(u, _on_ancilla(P1, j, n_anc))
        total = cu @ total
    return h_all @ total


def projector_measurement(operators, psi):
    """{bits: (probability, normalized post-measurement work state)} by projector algebra."""
    n_anc = len(operators)
    dw = operators[0].shape[0]
    da = 1 << n_anc
    anc0 = np.zeros(da, dtype=complex)
    anc0[0] = 1
    out = projector_circuit(operators) @ np.kron(psi, anc0)
    result = {}
    for b in range(da):
        ket_b = np.zeros(da, dtype=complex)
        ket_b[b] = 1
        proj = np.kron(np.eye(dw), np.outer(ket_b, ket_b))
        branch = proj @ out
        p = float(np.vdot(branch, branch).real)
        if p > 1e-12:
            work = np.kron(np.eye(dw), ket_b.conj()[None, :]) @ branch
            result[format(b, f"0{n_anc}b")] = (p, work / np.sqrt(p))
    return result
