"""Eigenvalue arrays, discrimination operators and their gate decompositions.

Each operator U_j has every member state as an eigenvector with eigenvalue
+1 or -1. With a Hadamard-sandwiched controlled-U_j, eigenvalue +1 leaves
its ancilla in |0> and -1 flips it to |1>, so state i is read out as the
bit string ``signature(i)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    DuplicateOrComplement,
    MalformedArrays,
    NonInjectiveSignatures,
    NotUnitary,
    QsdError,
    UnbalancedArray,
    UnsupportedFamily,
)
from .linalg import PROPAGATOR_TOL, UNITARY_TOL, H, X, Z, as_matrix, is_unitary, max_abs
from .orthoset import OrthoSet, make_ortho_set, ortho_set_to_json, states_from_json

SCHEMA = 1


# ---------------------------------------------------------------- gates


@dataclass(frozen=True, eq=False)
class Gate:
    """One circuit element.

    ``name`` is one of H, X, CNOT, CZ, CU or U. For CNOT and CU the first
    qubit is the control; CZ is symmetric. ``matrix`` is set for CU/U, with
    the listed target qubits ordered most significant first. ``tag`` marks
    which controlled operation (1-based) a gate belongs to.
    """

    name: str
    qubits: tuple[int, ...]
    matrix: np.ndarray | None = None
    tag: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f"{self.name} acts on repeated qubits {self.qubits}")
        arity = {"H": 1, "X": 1, "CNOT": 2, "CZ": 2}
        if self.name in arity:
            if len(self.qubits) != arity[self.name]:
                raise ValueError(f"{self.name} takes {arity[self.name]} qubit(s)")
        elif self.name in ("CU", "U"):
            if self.matrix is None:
                raise ValueError(f"{self.name} needs a matrix")
            m = as_matrix(self.matrix)
            n_targets = len(self.qubits) - (self.name == "CU")
            if m.shape != (1 << n_targets,) * 2:
                raise ValueError(f"{self.name} matrix shape {m.shape} does not match {n_targets} targets")
            if not is_unitary(m):
                raise NotUnitary(f"{self.name} block is not unitary")
            m = m.copy()
            m.setflags(write=False)
            object.__setattr__(self, "matrix", m)
        else:
            raise ValueError(f"unknown gate {self.name!r}")

    def action(self) -> tuple[np.ndarray, tuple[int, ...], tuple[int, ...]]:
        """(matrix, targets, controls) for the kernel."""
        q = self.qubits
        if self.name == "H":
            return H, q, ()
        if self.name == "X":
            return X, q, ()
        if self.name == "CNOT":
            return X, q[1:], q[:1]
        if self.name == "CZ":
            return Z, q[1:], q[:1]
        if self.name == "CU":
            return self.matrix, q[1:], q[:1]
        return self.matrix, q, ()

    def remap(self, mapping, tag=None) -> "Gate":
        return Gate(self.name, tuple(mapping[q] for q in self.qubits), self.matrix, self.tag if tag is None else tag)

    def __repr__(self) -> str:
        tag = "" if self.tag is None else f", tag={self.tag}"
        return f"{self.name}{self.qubits}{tag}"

    def to_json(self) -> dict:
        out = {"name": self.name, "qubits": list(self.qubits)}
        if self.matrix is not None:
            out["matrix"] = matrix_to_json(self.matrix)
        if self.tag is not None:
            out["tag"] = self.tag
        return out

    @classmethod
    def from_json(cls, d: dict) -> "Gate":
        m = d.get("matrix")
        return cls(d["name"], tuple(d["qubits"]), None if m is None else matrix_from_json(m), d.get("tag"))


def h(q):
    return Gate("H", (q,))


def x(q):
    return Gate("X", (q,))


def cnot(control, target):
    return Gate("CNOT", (control, target))


def cz(a, b):
    return Gate("CZ", (a, b))


def cu(control, targets, matrix):
    return Gate("CU", (control, *targets), matrix)


# ---------------------------------------------------------------- eigenvalue arrays


@dataclass(frozen=True)
class EigenArraySet:
    """``arrays[j][i]`` is the eigenvalue (+1/-1) of state i under U_{j+1}."""

    n: int
    arrays: tuple[tuple[int, ...], ...]

    def signature(self, i: int) -> tuple[int, ...]:
        """Ancilla bits for state i: eigenvalue +1 reads 0, -1 reads 1."""
        return tuple(0 if a[i] == 1 else 1 for a in self.arrays)

    def signatures(self) -> list[tuple[int, ...]]:
        return [self.signature(i) for i in range(1 << self.n)]

    def index_of_bits(self, bits) -> int:
        return self.signatures().index(tuple(bits))

    def diag(self, j: int) -> np.ndarray:
        return np.asarray(self.arrays[j], dtype=float)


def canonical_eigenarrays(n: int) -> EigenArraySet:
    """Binary-code arrays: e_j[i] = +1 iff bit j (MSB first) of i is 0."""
    if n < 1:
        raise ValueError("n must be >= 1")
    arrays = tuple(
        tuple(1 if (i >> (n - 1 - j)) & 1 == 0 else -1 for i in range(1 << n)) for j in range(n)
    )
    return validate_eigenarrays(arrays)


def validate_eigenarrays(arrays) -> EigenArraySet:
    """Check balance, pairwise distinctness up to complement, and injectivity.

    The last check is stronger than balance plus distinctness: for n >= 3
    three distinct balanced arrays can still give two states the same
    signature (e.g. a third array equal to the product of the first two).
    """
    try:
        arrs = [tuple(int(v) for v in a) for a in arrays]
    except (TypeError, ValueError) as exc:
        raise MalformedArrays(f"eigenvalue arrays must be integer sequences: {exc}") from exc
    n = len(arrs)
    if n == 0:
        raise MalformedArrays("no eigenvalue arrays given")
    size = 1 << n
    for j, a in enumerate(arrs, start=1):
        if len(a) != size:
            raise MalformedArrays(f"array {j} has length {len(a)}, expected {size} for {n} arrays", j=j)
        if any(v not in (1, -1) for v in a):
            raise MalformedArrays(f"array {j} has entries other than +1/-1", j=j)
        if sum(a) != 0:
            raise UnbalancedArray(j)
    for k in range(1, n):
        for m in range(k):
            if arrs[k] == arrs[m] or arrs[k] == tuple(-v for v in arrs[m]):
                raise DuplicateOrComplement(k + 1, m + 1)
    seen = {}
    for i in range(size):
        sig = tuple(a[i] for a in arrs)
        if sig in seen:
            raise NonInjectiveSignatures(seen[sig], i)
        seen[sig] = i
    return EigenArraySet(n, tuple(arrs))


def load_eigenarrays(path: str | Path) -> EigenArraySet:
    with open(path) as fh:
        data = json.load(fh)
    if isinstance(data, dict):
        data = data.get("arrays")
    return validate_eigenarrays(data)


# ---------------------------------------------------------------- synthesis


def synth_operator(ortho: OrthoSet, array) -> np.ndarray:
    """U = V diag(array) V^dagger, so that U @ states[i] == array[i] * states[i]."""
    a = np.asarray(array, dtype=float)
    if a.shape != (len(ortho),):
        raise ValueError(f"array length {a.size} does not match {len(ortho)} states")
    v = ortho.v_matrix
    return (v * a) @ v.conj().T


def theta_from(alpha: float, beta: float) -> float:
    if alpha == 0 and beta == 0:
        raise ValueError("theta_from needs (alpha, beta) != (0, 0)")
    return 2 * math.atan2(beta, alpha)


def reflection_matrix(theta: float) -> np.ndarray:
    """[[cos, sin], [sin, -cos]]: the single-qubit operator for a real family."""
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, s], [s, -c]], dtype=complex)


def controlled_embed(u) -> np.ndarray:
    """diag(I, u): control qubit is the most significant bit."""
    u = as_matrix(u)
    if not is_unitary(u):
        raise NotUnitary("controlled_embed needs a unitary block")
    d = u.shape[0]
    out = np.eye(2 * d, dtype=complex)
    out[d:, d:] = u
    return out


@dataclass(frozen=True, eq=False)
class DiscriminatorSpec:
    ortho: OrthoSet
    eigen: EigenArraySet
    operators: tuple[np.ndarray, ...] = field(repr=False)

    @property
    def n(self) -> int:
        return self.ortho.n_qubits

    def eigen_residual(self) -> float:
        """max_{i,j} |U_j phi_i - e_j^i phi_i|."""
        worst = 0.0
        v = self.ortho.v_matrix
        for u, a in zip(self.operators, self.eigen.arrays):
            worst = max(worst, max_abs(u @ v - v * np.asarray(a)))
        return worst

    def check(self, tol: float = PROPAGATOR_TOL) -> None:
        if self.eigen.n != self.n or len(self.operators) != self.n:
            raise QsdError("spec has inconsistent sizes")
        for j, u in enumerate(self.operators, start=1):
            if not is_unitary(u, UNITARY_TOL):
                raise NotUnitary(f"operator {j} is not unitary", j=j)
        res = self.eigen_residual()
        if res > tol:
            raise QsdError(f"eigen-equation residual {res:.3g} exceeds {tol}", residual=res)


def build_discriminator(ortho: OrthoSet, eigen: EigenArraySet | None = None) -> DiscriminatorSpec:
    """Synthesize U_1..U_n for ``ortho``; canonical arrays by default."""
    if eigen is None:
        eigen = canonical_eigenarrays(ortho.n_qubits)
    if eigen.n != ortho.n_qubits:
        raise MalformedArrays(f"{eigen.n} arrays given for a {ortho.n_qubits}-qubit set")
    ops = tuple(synth_operator(ortho, a) for a in eigen.arrays)
    for u in ops:
        u.setflags(write=False)
    spec = DiscriminatorSpec(ortho, eigen, ops)
    spec.check()
    return spec


# ---------------------------------------------------------------- decompositions

# Arrays for which the gate products below hold.
BELL_ARRAYS = ((1, -1, 1, -1), (-1, 1, 1, -1))
GHZ3_ARRAYS = (
    (1, -1, 1, -1, 1, -1, 1, -1),
    (-1, 1, 1, -1, 1, -1, -1, 1),
    (-1, 1, 1, -1, -1, 1, 1, -1),
)

# family -> (work qubit count, per-operator CZ pair wrapping the fan-out, or None)
_DECOMPOSITIONS = {
    "bell": (2, {1: None, 2: (2, 1)}),
    "ghz": (3, {1: None, 2: (2, 3), 3: (1, 3)}),
}


def decompose_controlled(family: str, j: int) -> tuple[Gate, ...]:
    """Two-qubit gate sequence for controlled-U_j of the Bell or 3-qubit GHZ set.

    Qubit 0 is the ancilla (control); work qubits are 1..n, most significant
    first. Every sequence is a CNOT fan-out from the ancilla onto all work
    qubits, optionally conjugated by a controlled-Z between two work qubits.
    Composed on n+1 qubits the result equals ``controlled_embed(U_j)``.
    """
    try:
        n_work, table = _DECOMPOSITIONS[family]
    except KeyError:
        raise UnsupportedFamily(f"no decomposition for family {family!r}", family=family) from None
    if j not in table:
        raise UnsupportedFamily(f"family {family!r} has no operator {j}", family=family, j=j)
    fanout = tuple(cnot(0, q) for q in range(1, n_work + 1))
    pair = table[j]
    if pair is None:
        return fanout
    return (cz(*pair), *fanout, cz(*pair))


def decomposition_arrays(family: str) -> EigenArraySet:
    if family == "bell":
        return validate_eigenarrays(BELL_ARRAYS)
    if family == "ghz":
        return validate_eigenarrays(GHZ3_ARRAYS)
    raise UnsupportedFamily(f"no decomposition for family {family!r}", family=family)


# ---------------------------------------------------------------- JSON


def matrix_to_json(m) -> list:
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def matrix_from_json(rows) -> np.ndarray:
    arr = np.asarray(rows, dtype=float)
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise QsdError("matrix must be rows of [re, im] pairs", shape=list(arr.shape))
    return arr[..., 0] + 1j * arr[..., 1]


def spec_to_json(spec: DiscriminatorSpec) -> dict:
    return {
        "schema": SCHEMA,
        "kind": "discriminator",
        "n_qubits": spec.n,
        "states": ortho_set_to_json(spec.ortho),
        "arrays": [list(a) for a in spec.eigen.arrays],
        "signatures": ["".join(map(str, s)) for s in spec.eigen.signatures()],
        "operators": [matrix_to_json(u) for u in spec.operators],
    }


def spec_from_json(data: dict) -> DiscriminatorSpec:
    """Rebuild a spec; stored operators are used verbatim and re-verified."""
    if not isinstance(data, dict) or data.get("schema") != SCHEMA:
        raise QsdError(f"expected a schema-{SCHEMA} discriminator document")
    ortho = make_ortho_set(states_from_json(data["states"]))
    eigen = validate_eigenarrays(data["arrays"])
    if "operators" in data:
        ops = tuple(matrix_from_json(m) for m in data["operators"])
        for u in ops:
            u.setflags(write=False)
        spec = DiscriminatorSpec(ortho, eigen, ops)
        spec.check()
        return spec
    return build_discriminator(ortho, eigen)


def save_spec(spec: DiscriminatorSpec, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(spec_to_json(spec), fh, indent=1)


def load_spec(path: str | Path) -> DiscriminatorSpec:
    with open(path) as fh:
        return spec_from_json(json.load(fh))
