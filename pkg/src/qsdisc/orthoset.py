"""Ordered orthonormal state sets and the families used as discrimination targets."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import BadCardinality, DimensionMismatch, NotNormalized, NotOrthonormal, QsdError
from .linalg import UNITARY_TOL, ket, max_abs, n_qubits_of

NORM_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class OrthoSet:
    """``2**n_qubits`` orthonormal states; ``v_matrix[:, i]`` is ``states[i]``."""

    n_qubits: int
    v_matrix: np.ndarray

    def __post_init__(self):
        self.v_matrix.setflags(write=False)

    @property
    def states(self) -> list[np.ndarray]:
        return [self.v_matrix[:, i] for i in range(self.v_matrix.shape[1])]

    @property
    def dim(self) -> int:
        return 1 << self.n_qubits

    def __len__(self) -> int:
        return self.v_matrix.shape[1]

    def __getitem__(self, i: int) -> np.ndarray:
        return self.v_matrix[:, i]

    def index_of(self, vector, tol: float = 1e-9) -> int | None:
        """Position of ``vector`` in the set up to phase, or None."""
        overlaps = np.abs(self.v_matrix.conj().T @ np.asarray(vector, dtype=complex))
        i = int(np.argmax(overlaps))
        return i if abs(overlaps[i] - 1) <= tol else None


def make_ortho_set(vectors, tol: float = UNITARY_TOL) -> OrthoSet:
    """Validate ``vectors`` and assemble them column-wise into an OrthoSet.

    Raises BadCardinality unless there are 2**n vectors of dimension 2**n,
    and NotOrthonormal naming the first offending pair (a pair ``(i, i)``
    means state ``i`` is not normalized).
    """
    vecs = [np.asarray(v, dtype=complex).reshape(-1) for v in vectors]
    count = len(vecs)
    if count == 0 or count & (count - 1):
        raise BadCardinality(f"need 2**n states, got {count}", count=count)
    dims = {v.shape[0] for v in vecs}
    if len(dims) != 1:
        raise DimensionMismatch("states have different dimensions", dims=sorted(dims))
    (dim,) = dims
    if dim != count:
        raise BadCardinality(
            f"{count} states of dimension {dim}; a complete set needs as many states as dimensions",
            count=count,
            dim=dim,
        )
    v = np.column_stack(vecs)
    gram = v.conj().T @ v
    dev = np.abs(gram - np.eye(count))
    if dev.max() > tol:
        i, k = np.unravel_index(np.argmax(dev), dev.shape)
        i, k = (int(min(i, k)), int(max(i, k)))
        raise NotOrthonormal((i, k), float(abs(gram[i, k])))
    return OrthoSet(n_qubits_of(dim), v)


def _check_real_pair(alpha: float, beta: float) -> None:
    if abs(alpha * alpha + beta * beta - 1) > NORM_TOL:
        raise NotNormalized(
            f"alpha**2 + beta**2 = {alpha * alpha + beta * beta!r}, expected 1",
            alpha=alpha,
            beta=beta,
        )


def single_qubit_family(alpha: float, beta: float) -> OrthoSet:
    """{a|0> + b|1>, b|0> - a|1>} for real a, b with a**2 + b**2 = 1."""
    _check_real_pair(alpha, beta)
    return make_ortho_set([[alpha, beta], [beta, -alpha]])


def family_s(alpha: float, beta: float) -> OrthoSet:
    """Two-qubit product states with a superposed second qubit.

    Order: a|00>+b|01>, a|10>+b|11>, b|10>-a|11>, b|00>-a|01>.
    """
    _check_real_pair(alpha, beta)
    k = {b: ket(b) for b in ("00", "01", "10", "11")}
    return make_ortho_set(
        [
            alpha * k["00"] + beta * k["01"],
            alpha * k["10"] + beta * k["11"],
            beta * k["10"] - alpha * k["11"],
            beta * k["00"] - alpha * k["01"],
        ]
    )


def bell_set() -> OrthoSet:
    """Phi+, Phi-, Psi+, Psi- with the first qubit as the most significant bit."""
    s = 1 / np.sqrt(2)
    return make_ortho_set(
        [
            s * (ket("00") + ket("11")),
            s * (ket("00") - ket("11")),
            s * (ket("01") + ket("10")),
            s * (ket("01") - ket("10")),
        ]
    )


def ghz_set(k: int) -> OrthoSet:
    """All 2**k states (|x> +/- |~x>)/sqrt(2).

    Flip classes are taken in ascending order of their smaller label x
    (so x runs over labels with leading bit 0) and "+" precedes "-".
    """
    if k < 2:
        raise ValueError("ghz_set needs k >= 2")
    dim = 1 << k
    full = dim - 1
    s = 1 / np.sqrt(2)
    vecs = []
    for x in range(dim // 2):
        a = np.zeros(dim, dtype=complex)
        b = np.zeros(dim, dtype=complex)
        a[x] = 1.0
        b[full ^ x] = 1.0
        vecs.append(s * (a + b))
        vecs.append(s * (a - b))
    return make_ortho_set(vecs)


def parity_profile(state, tol: float = 1e-12) -> set[int]:
    """Parities (bit-count mod 2) of the basis states a vector has weight on."""
    state = np.asarray(state)
    return {bin(i).count("1") % 2 for i in np.flatnonzero(np.abs(state) > tol)}


# ---- JSON ingestion: an array of states, each an array of [re, im] pairs ----


def vector_to_pairs(v) -> list[list[float]]:
    return [[float(z.real), float(z.imag)] for z in np.asarray(v, dtype=complex)]


def vector_from_pairs(pairs) -> np.ndarray:
    try:
        arr = np.asarray(pairs, dtype=float)
    except (TypeError, ValueError) as exc:
        raise QsdError(f"malformed amplitude list: {exc}") from exc
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise QsdError("each amplitude must be a [re, im] pair", shape=list(arr.shape))
    return arr[:, 0] + 1j * arr[:, 1]


def states_from_json(data) -> list[np.ndarray]:
    if isinstance(data, dict):
        data = data.get("states")
    if not isinstance(data, list) or not data:
        raise QsdError("expected a non-empty array of states")
    return [vector_from_pairs(s) for s in data]


def load_ortho_set(path: str | Path) -> OrthoSet:
    with open(path) as fh:
        data = json.load(fh)
    return make_ortho_set(states_from_json(data))


def ortho_set_to_json(ortho: OrthoSet) -> list:
    return [vector_to_pairs(s) for s in ortho.states]


def max_state_distance(a: OrthoSet, b: OrthoSet) -> float:
    return max_abs(a.v_matrix - b.v_matrix)
