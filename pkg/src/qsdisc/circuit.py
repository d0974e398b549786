"""Phase-estimation discrimination circuits and their exact simulation.

Register layout: work qubits ``0..n_work-1`` followed by ancillas
``n_work..n_work+n_ancilla-1``; qubit 0 is the most significant bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Sequence

import numpy as np

from . import kernels
from .errors import DimensionMismatch, InvalidDensityMatrix, NotAMember, QsdError
from .linalg import PROBABILITY_TOL, max_abs
from .synth import DiscriminatorSpec, Gate

MAX_QUBITS = 10
BRANCH_CUTOFF = 1e-12


@dataclass(frozen=True, eq=False)
class Circuit:
    n_work: int
    n_ancilla: int
    gates: tuple[Gate, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        if self.n_work < 1 or self.n_ancilla < 0:
            raise ValueError("need at least one work qubit")
        if self.n_qubits > MAX_QUBITS:
            raise ValueError(f"{self.n_qubits} qubits exceeds the limit of {MAX_QUBITS}")
        for g in self.gates:
            if any(q < 0 or q >= self.n_qubits for q in g.qubits):
                raise ValueError(f"gate {g!r} is outside the {self.n_qubits}-qubit register")

    @property
    def n_qubits(self) -> int:
        return self.n_work + self.n_ancilla

    @property
    def ancillas(self) -> list[int]:
        return list(range(self.n_work, self.n_qubits))

    def count(self, name: str) -> int:
        return sum(g.name == name for g in self.gates)

    def to_json(self) -> dict:
        return {
            "schema": 1,
            "kind": "circuit",
            "n_work": self.n_work,
            "n_ancilla": self.n_ancilla,
            "gates": [g.to_json() for g in self.gates],
        }

    @classmethod
    def from_json(cls, d: dict) -> "Circuit":
        return cls(d["n_work"], d["n_ancilla"], tuple(Gate.from_json(g) for g in d["gates"]))


@dataclass(frozen=True, eq=False)
class MeasurementRecord:
    bits: tuple[int, ...]
    probability: float
    post_work_state: np.ndarray

    @property
    def bitstring(self) -> str:
        return "".join(map(str, self.bits))


def build_pea_circuit(spec: DiscriminatorSpec, blocks: Sequence[Sequence[Gate]] | None = None) -> Circuit:
    """H on every ancilla, controlled-U_j from ancilla j, H on every ancilla.

    ``blocks`` optionally replaces each controlled-U_j by a gate sequence in
    local numbering (qubit 0 = control ancilla, work qubits 1..n), such as
    the output of ``decompose_controlled``.
    """
    n = spec.n
    anc = list(range(n, 2 * n))
    gates = [Gate("H", (a,), tag=j) for j, a in enumerate(anc, start=1)]
    for j, a in enumerate(anc, start=1):
        if blocks is None:
            gates.append(Gate("CU", (a, *range(n)), spec.operators[j - 1], tag=j))
        else:
            mapping = {0: a, **{q: q - 1 for q in range(1, n + 1)}}
            gates.extend(g.remap(mapping, tag=j) for g in blocks[j - 1])
    gates += [Gate("H", (a,), tag=j) for j, a in enumerate(anc, start=1)]
    return Circuit(n, n, tuple(gates))


def split_single_ancilla(c: Circuit) -> list[Circuit]:
    """One circuit per ancilla holding only that ancilla's gates.

    Each piece uses a single ancilla at index ``n_work``. Requires the gate
    tags set by ``build_pea_circuit``.
    """
    if c.n_ancilla == 1:
        return [c]
    if any(g.tag is None for g in c.gates):
        raise QsdError("split_single_ancilla needs a circuit from build_pea_circuit (tagged gates)")
    pieces = []
    for j, a in enumerate(c.ancillas, start=1):
        mapping = {q: q for q in range(c.n_work)}
        mapping[a] = c.n_work
        gates = tuple(g.remap(mapping) for g in c.gates if g.tag == j)
        pieces.append(Circuit(c.n_work, 1, gates))
    return pieces


# ---------------------------------------------------------------- simulation


def apply_gates(state: np.ndarray, gates: Sequence[Gate], n_qubits: int) -> np.ndarray:
    """Apply gates in order to every column of ``state`` (modified in place)."""
    for g in gates:
        m, targets, controls = g.action()
        kernels.apply_unitary(state, m, targets, controls, n_qubits)
    return state


def compose(gates: Sequence[Gate], n_qubits: int) -> np.ndarray:
    """Unitary of a gate sequence (first gate acts first)."""
    return apply_gates(np.eye(1 << n_qubits, dtype=complex), gates, n_qubits)


def circuit_unitary(c: Circuit) -> np.ndarray:
    return compose(c.gates, c.n_qubits)


def _check_work_vector(c: Circuit, v) -> np.ndarray:
    v = np.asarray(v, dtype=complex).reshape(-1)
    if v.shape[0] != 1 << c.n_work:
        raise DimensionMismatch(
            f"input has dimension {v.shape[0]}, circuit has {c.n_work} work qubits",
            expected=1 << c.n_work,
            got=int(v.shape[0]),
        )
    if abs(np.vdot(v, v).real - 1) > 1e-9:
        raise DimensionMismatch("input state is not normalized", norm=float(np.linalg.norm(v)))
    return v


def run_statevector(c: Circuit, input_work) -> list[MeasurementRecord]:
    """Evolve ``input_work ⊗ |0..0>`` and enumerate every ancilla outcome.

    Records are sorted by ancilla bit string; outcomes with probability
    below 1e-12 are dropped.
    """
    v = _check_work_vector(c, input_work)
    full = np.zeros((1 << c.n_qubits, 1), dtype=complex)
    full[:: 1 << c.n_ancilla, 0] = v
    apply_gates(full, c.gates, c.n_qubits)
    amps = full[:, 0].reshape(1 << c.n_work, 1 << c.n_ancilla)
    records = []
    for b in range(1 << c.n_ancilla):
        branch = amps[:, b]
        p = float(np.vdot(branch, branch).real)
        if p > BRANCH_CUTOFF:
            bits = tuple((b >> (c.n_ancilla - 1 - k)) & 1 for k in range(c.n_ancilla))
            records.append(MeasurementRecord(bits, p, branch / np.sqrt(p)))
    return records


def check_density_matrix(rho, tol: float = 1e-10) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise InvalidDensityMatrix("density matrix must be square", shape=list(rho.shape))
    if abs(np.trace(rho) - 1) > tol:
        raise InvalidDensityMatrix("trace is not 1", trace=complex(np.trace(rho)).real)
    if max_abs(rho - rho.conj().T) > tol:
        raise InvalidDensityMatrix("not Hermitian")
    lo = float(np.linalg.eigvalsh((rho + rho.conj().T) / 2).min())
    if lo < -tol:
        raise InvalidDensityMatrix("not positive semidefinite", min_eigenvalue=lo)
    return rho


def pure_density(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex).reshape(-1)
    return np.outer(v, v.conj())


def run_density(c: Circuit, rho_work) -> np.ndarray:
    """U (rho ⊗ |0..0><0..0|) U^dagger on the full register."""
    rho = check_density_matrix(rho_work)
    if rho.shape[0] != 1 << c.n_work:
        raise DimensionMismatch(
            f"density matrix has dimension {rho.shape[0]}, circuit has {c.n_work} work qubits",
            expected=1 << c.n_work,
            got=int(rho.shape[0]),
        )
    anc0 = np.zeros((1 << c.n_ancilla,) * 2, dtype=complex)
    anc0[0, 0] = 1
    full = np.ascontiguousarray(np.kron(rho, anc0))
    apply_gates(full, c.gates, c.n_qubits)  # U rho
    full = np.ascontiguousarray(full.conj().T)
    apply_gates(full, c.gates, c.n_qubits)  # U rho U^dagger
    return full


def partial_trace(rho, keep: Sequence[int], n_qubits: int) -> np.ndarray:
    """Reduced density matrix on ``keep`` (kept in the listed order)."""
    rho = np.asarray(rho).reshape((2,) * (2 * n_qubits))
    keep = list(keep)
    drop = [q for q in range(n_qubits) if q not in keep]
    perm = keep + drop
    rho = rho.transpose(perm + [n_qubits + q for q in perm])
    dk, dd = 1 << len(keep), 1 << len(drop)
    rho = rho.reshape(dk, dd, dk, dd)
    return np.einsum("ajbj->ab", rho)


def permute_qubits(rho, order: Sequence[int], n_qubits: int) -> np.ndarray:
    """Reorder the register so that new qubit k is old qubit ``order[k]``."""
    order = list(order)
    t = np.asarray(rho).reshape((2,) * (2 * n_qubits))
    t = t.transpose(order + [n_qubits + q for q in order])
    return t.reshape(1 << n_qubits, 1 << n_qubits)


def ancilla_marginal(rho_full, c: Circuit) -> np.ndarray:
    """Probabilities of each ancilla bit string from a full-register density matrix."""
    return np.real(np.diag(partial_trace(rho_full, c.ancillas, c.n_qubits)))


# ---------------------------------------------------------------- discrimination


def discriminate(spec: DiscriminatorSpec, input_work, circuit: Circuit | None = None):
    """Identify a member state: returns ``(index, bits, post_state)``.

    ``index`` is 0-based. Raises NotAMember unless one ancilla outcome has
    probability at least 1 - 1e-9.
    """
    c = circuit if circuit is not None else build_pea_circuit(spec)
    records = run_statevector(c, input_work)
    best = max(records, key=lambda r: r.probability)
    if best.probability < 1 - PROBABILITY_TOL:
        raise NotAMember(
            "input is not a member of the set: outcome is not deterministic",
            outcomes={r.bitstring: r.probability for r in records},
        )
    return spec.eigen.index_of_bits(best.bits), best.bits, best.post_work_state


def state_fidelity(a, b) -> float:
    a = np.asarray(a, dtype=complex).reshape(-1)
    b = np.asarray(b, dtype=complex).reshape(-1)
    if a.shape != b.shape:
        raise DimensionMismatch("state dimensions differ")
    return float(abs(np.vdot(a, b)) ** 2)


def deviation_metrics(rho_ideal, rho_other) -> tuple[float, float]:
    """Average and maximum entrywise |ideal - other|, in percent.

    Both are scaled by the largest entry magnitude of ``rho_ideal``.
    """
    a = np.asarray(rho_ideal, dtype=complex)
    b = np.asarray(rho_other, dtype=complex)
    if a.shape != b.shape:
        raise DimensionMismatch("density matrices differ in shape")
    scale = max_abs(a)
    if scale == 0:
        raise ValueError("ideal density matrix is zero")
    dev = np.abs(a - b) / scale * 100
    return float(dev.mean()), float(dev.max())


def ideal_final_density(spec: DiscriminatorSpec, i: int) -> np.ndarray:
    """|phi_i><phi_i| ⊗ |sig_i><sig_i| for member i of ``spec``."""
    bits = spec.eigen.signature(i)
    anc = np.zeros(1 << len(bits), dtype=complex)
    anc[int("".join(map(str, bits)), 2)] = 1
    return pure_density(np.kron(spec.ortho[i], anc))


def basis_labels(n_qubits: int) -> list[str]:
    return ["".join(p) for p in product("01", repeat=n_qubits)]
