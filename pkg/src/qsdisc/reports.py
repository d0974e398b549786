"""Run reports shared by the command line and the test-suite.

A report holds one row per input (table reproduction) and a list of named
numeric checks; it passes only when every row and every check passes.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import nmr
from .circuit import (
    Circuit,
    basis_labels,
    build_pea_circuit,
    deviation_metrics,
    ideal_final_density,
    partial_trace,
    permute_qubits,
    pure_density,
    run_density,
    run_statevector,
    split_single_ancilla,
    state_fidelity,
)
from .errors import QsdError, UnknownPreset
from .linalg import PROBABILITY_TOL, PROPAGATOR_TOL, expm_i, is_unitary, phase_distance
from .orthoset import OrthoSet, bell_set, family_s, ghz_set, single_qubit_family, vector_to_pairs
from .synth import (
    SCHEMA,
    DiscriminatorSpec,
    EigenArraySet,
    Gate,
    build_discriminator,
    canonical_eigenarrays,
    controlled_embed,
    load_eigenarrays,
    validate_eigenarrays,
)

CSV_COLUMNS = ("input_index", "bits", "probability", "fidelity", "verdict")


def _data(name: str) -> dict:
    return json.loads(resources.files("qsdisc").joinpath("data", name).read_text())


# ---------------------------------------------------------------- presets


def state_set_preset(name: str, alpha: float | None = None, beta: float | None = None) -> OrthoSet:
    """``family-s``, ``single``, ``bell`` or ``ghz<k>`` (k = 2..5)."""
    if alpha is None and beta is None:
        alpha = beta = 1 / math.sqrt(2)
    elif alpha is None or beta is None:
        raise QsdError("give both --alpha and --beta")
    if name == "family-s":
        return family_s(alpha, beta)
    if name == "single":
        return single_qubit_family(alpha, beta)
    if name == "bell":
        return bell_set()
    if name.startswith("ghz") and name[3:].isdigit() and 2 <= int(name[3:]) <= 5:
        return ghz_set(int(name[3:]))
    raise UnknownPreset(f"unknown state-set preset {name!r}", known=["family-s", "single", "bell", "ghz2..ghz5"])


def eigenarrays_for(source: str, n: int) -> EigenArraySet:
    """``canonical``, a built-in array name (``bell``, ``ghz3``) or a JSON file."""
    if source == "canonical":
        return canonical_eigenarrays(n)
    builtin = _data("arrays.json")["arrays"]
    if source in builtin:
        return validate_eigenarrays(builtin[source]["arrays"])
    if Path(source).is_file():
        return load_eigenarrays(source)
    raise UnknownPreset(f"unknown eigenvalue arrays {source!r}", known=["canonical", *sorted(builtin)])


def expectation_table(name: str) -> dict:
    tables = _data("tables.json")["tables"]
    if name not in tables:
        raise UnknownPreset(f"unknown expectation table {name!r}", known=sorted(tables))
    return tables[name]


def table_spec(name: str) -> DiscriminatorSpec:
    """The discriminator a built-in expectation table refers to."""
    t = expectation_table(name)
    ortho = state_set_preset(t["preset"])
    return build_discriminator(ortho, eigenarrays_for(t["arrays"], ortho.n_qubits))


# ---------------------------------------------------------------- reports


@dataclass
class Row:
    input_index: int
    bits: str | None
    probability: float | None
    fidelity: float | None
    verdict: str
    expected: str | None = None
    member_index: int | None = None
    error: str | None = None
    records: list | None = None  # every ancilla outcome: bits, probability, post_state


@dataclass
class Check:
    name: str
    value: float
    tol: float
    passed: bool


@dataclass
class RunReport:
    kind: str
    summary: dict
    rows: list[Row] = field(default_factory=list)
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.verdict == "pass" for r in self.rows) and all(c.passed for c in self.checks)

    def add_check(self, name: str, value: float, tol: float, passed: bool | None = None) -> Check:
        c = Check(name, float(value), tol, bool(value <= tol) if passed is None else passed)
        self.checks.append(c)
        return c

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "kind": self.kind,
            "verdict": "pass" if self.passed else "fail",
            "summary": self.summary,
            "rows": [asdict(r) for r in self.rows],
            "checks": [asdict(c) for c in self.checks],
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.rows:
            w.writerow(
                [
                    r.input_index,
                    r.bits or "",
                    "" if r.probability is None else repr(r.probability),
                    "" if r.fidelity is None else repr(r.fidelity),
                    r.verdict,
                ]
            )
        return buf.getvalue()


def spec_summary(spec: DiscriminatorSpec) -> dict:
    return {
        "n_qubits": spec.n,
        "arrays": [list(a) for a in spec.eigen.arrays],
        "signatures": ["".join(map(str, s)) for s in spec.eigen.signatures()],
    }


def discriminate_report(spec: DiscriminatorSpec, inputs=None, expect: str | None = None) -> RunReport:
    """Discriminate each input (all members by default); rows are 1-based."""
    if inputs is None:
        inputs = spec.ortho.states
    expected = None
    if expect is not None:
        rows = expectation_table(expect)["rows"]
        expected = [r["bits"] for r in rows]
        if len(expected) != len(inputs):
            raise QsdError(f"table {expect} has {len(expected)} rows but {len(inputs)} inputs were given")
    report = RunReport("discriminate", {**spec_summary(spec), "expect": expect})
    circuit = build_pea_circuit(spec)
    for k, v in enumerate(inputs, start=1):
        exp_bits = expected[k - 1] if expected else None
        records = run_statevector(circuit, v)
        dumped = [
            {"bits": r.bitstring, "probability": r.probability, "post_state": vector_to_pairs(r.post_work_state)}
            for r in records
        ]
        best = max(records, key=lambda r: r.probability)
        if best.probability < 1 - PROBABILITY_TOL:
            report.rows.append(Row(k, None, best.probability, None, "fail", exp_bits, None, "NotAMember", dumped))
            continue
        fid = state_fidelity(v, best.post_work_state)
        ok = fid >= 1 - PROBABILITY_TOL and (exp_bits is None or best.bitstring == exp_bits)
        idx = spec.eigen.index_of_bits(best.bits)
        report.rows.append(
            Row(k, best.bitstring, best.probability, fid, "pass" if ok else "fail", exp_bits, idx + 1, None, dumped)
        )
    return report


# ---------------------------------------------------------------- NMR verification


def nmr_circuit(propagator: np.ndarray, n_work: int) -> Circuit:
    """Wrap a spin-ordered propagator (ancilla = spin 1) as a one-gate circuit."""
    return Circuit(n_work, 1, (Gate("U", (n_work, *range(n_work)), propagator),))


def nmr_experiment(seq, sys: nmr.SpinSystem, state) -> tuple[nmr.PeakSign, np.ndarray, np.ndarray]:
    """Run one single-ancilla pulse experiment on a work state.

    Returns the ancilla peak sign, the reduced work density matrix and the
    full final density matrix (circuit order: work qubits, then ancilla).
    """
    n_work = sys.n_spins - 1
    c = nmr_circuit(nmr.compile_pulses(seq, sys), n_work)
    rho = run_density(c, pure_density(state))
    sign = nmr.ancilla_readout(rho, n_work + 1)
    return sign, partial_trace(rho, range(n_work), c.n_qubits), rho


def _propagator_checks(report: RunReport, sys, spec: DiscriminatorSpec, sequences) -> list[np.ndarray]:
    props = []
    for j, seq in enumerate(sequences, start=1):
        p = nmr.compile_pulses(seq, sys)
        props.append(p)
        report.add_check(f"pulses C-U{j} unitary", 0.0, 0.0, is_unitary(p))
        report.add_check(f"pulses C-U{j} vs controlled embedding", phase_distance(p, controlled_embed(spec.operators[j - 1])), PROPAGATOR_TOL)
    return props


def _end_to_end(report: RunReport, sys, spec: DiscriminatorSpec, sequences, table: str) -> None:
    expected = [r["bits"] for r in expectation_table(table)["rows"]]
    worst_fid = 0.0
    n_work = sys.n_spins - 1
    for i, state in enumerate(spec.ortho.states):
        bits, fids, probs = [], [], []
        for seq in sequences:
            sign, work, rho = nmr_experiment(nmr.experiment_sequence(seq), sys, state)
            bits.append("?" if sign.bit is None else str(sign.bit))
            fids.append(float(np.real(np.vdot(state, work @ state))))
            pops = np.real(np.diag(partial_trace(rho, [n_work], n_work + 1)))
            probs.append(float(pops[sign.bit]) if sign.bit is not None else 0.5)
        b = "".join(bits)
        fid = min(fids)
        worst_fid = max(worst_fid, 1 - fid)
        ok = b == expected[i] and fid >= 1 - PROPAGATOR_TOL
        report.rows.append(Row(i + 1, b, min(probs), fid, "pass" if ok else "fail", expected[i], i + 1))
    report.add_check("work-state infidelity after readout", worst_fid, PROPAGATOR_TOL)


def nmr_verify_report(preset: str) -> RunReport:
    """All NMR-level identities and end-to-end readout for a spin-system preset."""
    sys = nmr.load_spin_system(preset)
    report = RunReport("nmr-verify", {"preset": sys.name, "n_spins": sys.n_spins, "labels": list(sys.labels)})
    if sys.n_spins == 3:
        spec = table_spec("tableI")
        for j, key in enumerate(("H1", "H2"), start=1):
            terms = nmr.EFFECTIVE_TERMS[key]
            h = nmr.effective_hamiltonian(key)
            e = expm_i(h)
            report.add_check(f"{key} terms commute", nmr.max_commutator(terms, 3), 1e-12)
            report.add_check(f"exp(i {key}) vs controlled U{j}", phase_distance(e, controlled_embed(spec.operators[j - 1])), PROPAGATOR_TOL)
            factored = np.eye(8, dtype=complex)
            for t in terms:
                factored = expm_i(nmr.realize_product_op(t, 3)) @ factored
            report.add_check(f"exp(i {key}) factorization", phase_distance(factored, e), PROPAGATOR_TOL)
        sequences = [nmr.controlled_u_sequence("H1"), nmr.controlled_u_sequence("H2")]
        props = _propagator_checks(report, sys, spec, sequences)
        for j, key in enumerate(("H1", "H2")):
            report.add_check(f"pulses C-U{j + 1} vs exp(i {key})", phase_distance(props[j], expm_i(nmr.effective_hamiltonian(key))), PROPAGATOR_TOL)
        _end_to_end(report, sys, spec, sequences, "tableI")
    elif sys.n_spins == 4:
        spec = table_spec("tableII")
        sequences = [nmr.ghz_controlled_sequence(j) for j in (1, 2, 3)]
        _propagator_checks(report, sys, spec, sequences)
        _end_to_end(report, sys, spec, sequences, "tableII")
    else:
        raise UnknownPreset(f"no verification plan for a {sys.n_spins}-spin system", preset=preset)
    report.summary["total_delay_s"] = sum(nmr.total_delay(s, sys) for s in sequences)
    return report


# ---------------------------------------------------------------- tomography dumps


def matrix_dump(rho: np.ndarray) -> dict:
    return {"real": np.real(rho).tolist(), "imag": np.imag(rho).tolist()}


def _ancilla_first(rho: np.ndarray, c: Circuit) -> np.ndarray:
    return permute_qubits(rho, [*c.ancillas, *range(c.n_work)], c.n_qubits)


def tomography_dump(c: Circuit, state, ideal_final: np.ndarray | None = None) -> dict:
    """Initial and final full-register density matrices, ancilla qubits first.

    Basis index k (1-based) labels the k-th computational basis state in
    that order. ``ideal_final`` (circuit order) adds deviation metrics.
    """
    rho_in = pure_density(state)
    anc0 = np.zeros((1 << c.n_ancilla,) * 2, dtype=complex)
    anc0[0, 0] = 1
    initial = _ancilla_first(np.kron(rho_in, anc0), c)
    final = _ancilla_first(run_density(c, rho_in), c)
    work_final = partial_trace(final, range(c.n_ancilla, c.n_qubits), c.n_qubits)
    out = {
        "schema": SCHEMA,
        "kind": "tomography",
        "qubit_order": [f"a{k + 1}" for k in range(c.n_ancilla)] + [f"w{k + 1}" for k in range(c.n_work)],
        "basis": {str(k + 1): lab for k, lab in enumerate(basis_labels(c.n_qubits))},
        "initial": matrix_dump(initial),
        "final": matrix_dump(final),
        "work_fidelity": float(np.real(np.vdot(state, work_final @ state))),
    }
    if ideal_final is not None:
        avg, mx = deviation_metrics(_ancilla_first(ideal_final, c), final)
        out["deviation_percent"] = {"average": avg, "maximum": mx}
    return out


def tomography_report(spec: DiscriminatorSpec, index: int, split: bool = False) -> list[dict]:
    """Dumps for member ``index`` (0-based): one for the joint circuit, or one per ancilla."""
    state = spec.ortho[index]
    c = build_pea_circuit(spec)
    if not split:
        return [tomography_dump(c, state, ideal_final_density(spec, index))]
    dumps = []
    for j, piece in enumerate(split_single_ancilla(c)):
        bit = spec.eigen.signature(index)[j]
        anc = np.array([1, 0] if bit == 0 else [0, 1], dtype=complex)
        ideal = pure_density(np.kron(state, anc))
        d = tomography_dump(piece, state, ideal)
        d["experiment"] = j + 1
        dumps.append(d)
    return dumps
