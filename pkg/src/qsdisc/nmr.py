"""NMR realization of the discrimination circuits.

Spins are numbered from 1, and spin 1 is the most significant qubit. In the
preset registers spin 1 is the ancilla and the remaining spins hold the
work register, so an ancilla-controlled block is ``diag(I, U)``.

Simulation happens in the multiple rotating frame with ideal instantaneous
pulses: an RF pulse is exp(-i*angle*I_axis), a coupling delay of angle t is
exp(-i*t*2*I_z^i*I_z^j). Pulse lists are in time order, so the propagator
of ``[p1, p2, p3]`` is ``P3 @ P2 @ P1``.
"""

from __future__ import annotations

import ast
import json
import math
import operator
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from importlib import resources
from itertools import combinations
from pathlib import Path
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import PulseSyntaxError, QsdError, UnknownPreset, UnknownSpin
from .linalg import PAULI, commutator, expm_i, kron_all, n_qubits_of

TWO_PI = 2 * math.pi


# ---------------------------------------------------------------- spin systems


@dataclass(frozen=True, eq=False)
class SpinSystem:
    """Weakly coupled spin-1/2 system. Frequencies and couplings in Hz."""

    name: str
    labels: tuple[str, ...]
    larmor: tuple[float, ...]
    j_coupling: np.ndarray
    gamma_rel: tuple[float, ...]

    def __post_init__(self):
        n = len(self.larmor)
        j = np.asarray(self.j_coupling, dtype=float)
        if j.shape != (n, n):
            raise ValueError(f"coupling matrix must be {n}x{n}")
        if not np.allclose(j, j.T) or np.any(np.diag(j) != 0):
            raise ValueError("coupling matrix must be symmetric with zero diagonal")
        if len(self.labels) != n or len(self.gamma_rel) != n:
            raise ValueError("labels, larmor and gamma_rel must have one entry per spin")
        j.setflags(write=False)
        object.__setattr__(self, "j_coupling", j)

    @property
    def n_spins(self) -> int:
        return len(self.larmor)

    def coupling(self, i: int, j: int) -> float:
        return float(self.j_coupling[i - 1, j - 1])

    @classmethod
    def from_dict(cls, name: str, d: dict) -> "SpinSystem":
        n = len(d["larmor_hz"])
        j = np.zeros((n, n))
        for entry in d.get("j_hz", []):
            a, b, val = int(entry[0]), int(entry[1]), float(entry[2])
            j[a - 1, b - 1] = j[b - 1, a - 1] = val
        return cls(
            name=name,
            labels=tuple(d.get("labels", [str(k + 1) for k in range(n)])),
            larmor=tuple(float(v) for v in d["larmor_hz"]),
            j_coupling=j,
            gamma_rel=tuple(float(v) for v in d.get("gamma_rel", [1.0] * n)),
        )


def _read_data(name: str) -> dict:
    return json.loads(resources.files("qsdisc").joinpath("data", name).read_text())


def preset_names() -> list[str]:
    return sorted(_read_data("spin_systems.json")["presets"])


def load_spin_system(name_or_path: str) -> SpinSystem:
    """A named preset, or a JSON file holding one system or a ``presets`` map."""
    presets = _read_data("spin_systems.json")["presets"]
    if name_or_path in presets:
        return SpinSystem.from_dict(name_or_path, presets[name_or_path])
    p = Path(name_or_path)
    if not p.is_file():
        raise UnknownPreset(f"unknown spin system {name_or_path!r}", known=sorted(presets))
    data = json.loads(p.read_text())
    if "presets" in data:
        (name, d), *rest = data["presets"].items()
        if rest:
            raise QsdError("file holds several presets; name one of them")
        return SpinSystem.from_dict(name, d)
    return SpinSystem.from_dict(data.get("name", p.stem), data)


# ---------------------------------------------------------------- product operators


@dataclass(frozen=True)
class ProductOp:
    """``coef`` times a product of single-spin operators I_axis (axis in x, y, z).

    ``factors`` maps spin -> axis as sorted pairs; no factors means the identity.
    """

    coef: float
    factors: tuple[tuple[int, str], ...] = ()

    def __post_init__(self):
        spins = [s for s, _ in self.factors]
        if len(set(spins)) != len(spins):
            raise ValueError("a spin may appear only once in a product operator")
        for s, a in self.factors:
            if s < 1 or a not in ("x", "y", "z"):
                raise ValueError(f"bad factor {(s, a)!r}")
        object.__setattr__(self, "factors", tuple(sorted(self.factors)))

    @property
    def order(self) -> int:
        return len(self.factors)

    def __str__(self) -> str:
        body = " ".join(f"I{a}^{s}" for s, a in self.factors) or "I"
        return f"{self.coef:+.6g} {body}"


def op(coef: float, spec: str = "") -> ProductOp:
    """``op(pi, "1z 3x")`` is pi * I_z^1 I_x^3."""
    return ProductOp(coef, tuple((int(t[:-1]), t[-1]) for t in spec.split()))


def realize_product_op(term: ProductOp, n_spins: int) -> np.ndarray:
    axes = dict(term.factors)
    if axes and max(axes) > n_spins:
        raise UnknownSpin(f"spin {max(axes)} outside a {n_spins}-spin register", spin=max(axes))
    mats = [PAULI[axes[s]] / 2 if s in axes else PAULI["i"] for s in range(1, n_spins + 1)]
    return term.coef * kron_all(*mats)


def realize_sum(terms: Iterable[ProductOp], n_spins: int) -> np.ndarray:
    return sum(realize_product_op(t, n_spins) for t in terms)


def max_commutator(terms: Sequence[ProductOp], n_spins: int) -> float:
    """Largest Frobenius norm of [A, B] over pairs of terms."""
    mats = [realize_product_op(t, n_spins) for t in terms]
    return max((float(np.linalg.norm(commutator(a, b))) for a, b in combinations(mats, 2)), default=0.0)


def controlled_pauli_terms(control: int, targets: dict[int, str]) -> list[ProductOp]:
    """Terms of H with exp(iH) = controlled-(product of Paulis on ``targets``).

    H = pi * |1><1|_control ⊗ (I - P)/2, expanded into product operators.
    """
    m = len(targets)
    fac = tuple(targets.items())
    return [
        ProductOp(math.pi / 4),
        ProductOp(-math.pi / 2, ((control, "z"),)),
        ProductOp(-math.pi / 4 * 2**m, fac),
        ProductOp(math.pi / 2 * 2**m, ((control, "z"), *fac)),
    ]


def controlled_z_terms(a: int, b: int) -> list[ProductOp]:
    return [op(math.pi / 4), op(-math.pi / 2, f"{a}z"), op(-math.pi / 2, f"{b}z"), op(math.pi, f"{a}z {b}z")]


# Effective Hamiltonians of controlled-U_1 and controlled-U_2 on the 3-spin
# register (spin 1 ancilla, spins 2 and 3 work), as written in product operators.
EFFECTIVE_TERMS = {
    "H1": (op(math.pi / 4), op(-math.pi / 2, "1z"), op(-math.pi / 2, "3x"), op(math.pi, "1z 3x")),
    "H2": (op(math.pi / 4), op(-math.pi / 2, "1z"), op(-math.pi, "2z 3x"), op(2 * math.pi, "1z 2z 3x")),
}


def effective_hamiltonian(which: str) -> np.ndarray:
    try:
        terms = EFFECTIVE_TERMS[which.upper()]
    except KeyError:
        raise QsdError(f"unknown effective Hamiltonian {which!r}; use H1 or H2") from None
    return realize_sum(terms, 3)


def spin_hamiltonian(sys: SpinSystem) -> np.ndarray:
    """sum_i nu_i I_z^i + sum_{i<j} J_ij I_z^i I_z^j, in Hz."""
    n = sys.n_spins
    terms = [op(nu, f"{i}z") for i, nu in enumerate(sys.larmor, start=1)]
    terms += [op(sys.coupling(i, j), f"{i}z {j}z") for i, j in combinations(range(1, n + 1), 2)]
    return realize_sum(terms, n)


def equilibrium_rho(sys: SpinSystem) -> np.ndarray:
    """Deviation density matrix sum_i (gamma_i / gamma_1) I_z^i."""
    g0 = sys.gamma_rel[0]
    return realize_sum([op(g / g0, f"{i}z") for i, g in enumerate(sys.gamma_rel, start=1)], sys.n_spins)


# ---------------------------------------------------------------- pulse sequences


@dataclass(frozen=True)
class RFPulse:
    spin: int
    angle: float
    axis: str  # x, y, -x, -y

    def __post_init__(self):
        if self.axis not in ("x", "y", "-x", "-y"):
            raise ValueError(f"bad pulse phase {self.axis!r}")


@dataclass(frozen=True)
class CouplingDelay:
    """Free evolution under the i-j coupling for a time giving exp(-i*angle*2*Iz^i*Iz^j)."""

    i: int
    j: int
    angle: float

    def __post_init__(self):
        if self.i == self.j:
            raise ValueError("coupling delay needs two distinct spins")


@dataclass(frozen=True)
class ZRotation:
    """exp(-i*angle*I_z), realized by the composite (pi/2)_-x (angle)_y (pi/2)_x."""

    spin: int
    angle: float


Element = Union[RFPulse, CouplingDelay, ZRotation]
PulseSeq = tuple  # tuple[Element, ...]


def rf(spin: int, angle: float, axis: str) -> RFPulse:
    """RF pulse with a non-negative flip angle (negative angles flip the phase)."""
    if angle < 0:
        axis = axis[1:] if axis.startswith("-") else "-" + axis
        angle = -angle
    return RFPulse(spin, angle, axis)


def jdelay(i: int, j: int, angle: float) -> CouplingDelay:
    """Coupling evolution with the angle folded into [0, 2*pi) (global phase only)."""
    return CouplingDelay(i, j, math.fmod(math.fmod(angle, TWO_PI) + TWO_PI, TWO_PI))


def expand(seq: Iterable[Element]) -> tuple[Element, ...]:
    """Replace composite z rotations by their three RF pulses."""
    out = []
    for e in seq:
        if isinstance(e, ZRotation):
            out += [rf(e.spin, math.pi / 2, "-x"), rf(e.spin, e.angle, "y"), rf(e.spin, math.pi / 2, "x")]
        else:
            out.append(e)
    return tuple(out)


def _element_generator(e: Element, n: int) -> np.ndarray:
    """Hermitian G with element propagator exp(-i*G)."""
    if isinstance(e, RFPulse):
        sign = -1.0 if e.axis.startswith("-") else 1.0
        return realize_product_op(ProductOp(sign * e.angle, ((e.spin, e.axis[-1]),)), n)
    if isinstance(e, CouplingDelay):
        return realize_product_op(ProductOp(2 * e.angle, ((e.i, "z"), (e.j, "z"))), n)
    return realize_product_op(ProductOp(e.angle, ((e.spin, "z"),)), n)


def _spins_of(e: Element) -> tuple[int, ...]:
    return (e.i, e.j) if isinstance(e, CouplingDelay) else (e.spin,)


def element_propagator(e: Element, n_spins: int) -> np.ndarray:
    return expm_i(-_element_generator(e, n_spins))


def compile_pulses(seq: Iterable[Element], sys: SpinSystem, expand_composite: bool = True) -> np.ndarray:
    """Propagator of a time-ordered pulse sequence on ``sys``.

    Composite z rotations are expanded into RF pulses unless
    ``expand_composite`` is False, in which case they act as ideal rotations.
    Raises UnknownSpin for out-of-range spins and QsdError for a coupling
    delay between uncoupled spins.
    """
    n = sys.n_spins
    seq = tuple(seq)
    for e in seq:
        for s in _spins_of(e):
            if s < 1 or s > n:
                raise UnknownSpin(f"spin {s} outside the {n}-spin system {sys.name!r}", spin=s)
        if isinstance(e, CouplingDelay) and sys.coupling(e.i, e.j) == 0:
            raise QsdError(f"spins {e.i} and {e.j} are not coupled in {sys.name!r}", i=e.i, j=e.j)
    if expand_composite:
        seq = expand(seq)
    u = np.eye(1 << n, dtype=complex)
    for e in seq:
        u = element_propagator(e, n) @ u
    return u


def delay_time(e: CouplingDelay, sys: SpinSystem) -> float:
    """Seconds of free evolution under 2*pi*J*Iz*Iz giving the element (up to global phase)."""
    j = sys.coupling(e.i, e.j)
    if j == 0:
        raise QsdError(f"spins {e.i} and {e.j} are not coupled")
    angle = e.angle if j > 0 else -e.angle
    return math.fmod(math.fmod(angle, TWO_PI) + TWO_PI, TWO_PI) / (math.pi * abs(j))


def total_delay(seq: Iterable[Element], sys: SpinSystem) -> float:
    return sum(delay_time(e, sys) for e in seq if isinstance(e, CouplingDelay))


# ---------------------------------------------------------------- building sequences

# Pulse pairs (before, after) conjugating I_z into the given axis:
# exp(-i t I_axis ...) = after . exp(-i t I_z ...) . before
_TO_AXIS = {
    "x": ("-y", "y"),
    "y": ("x", "-x"),
}


def two_spin_sandwich(i: int, j: int, theta: float) -> PulseSeq:
    """exp(-i*theta*2*I_z^i*I_x^j): a coupling delay between (pi/2)_{-y} and (pi/2)_y on spin j."""
    if i == j:
        raise ValueError("two_spin_sandwich needs distinct spins")
    return (rf(j, math.pi / 2, "-y"), jdelay(i, j, theta), rf(j, math.pi / 2, "y"))


def evolution(factors: dict[int, str] | Sequence[tuple[int, str]], theta: float) -> PulseSeq:
    """Pulse sequence for exp(-i*theta*2**(k-1)*prod I_axis^spin) over k spins.

    Transverse factors are rotated from z with pulse pairs; products of three
    or more z factors are built by conjugating a shorter evolution with a
    pi/2 coupling evolution (a cascade of two-spin evolutions).
    """
    factors = dict(factors)
    spins = sorted(factors)
    if not spins:
        return ()
    if len(spins) == 1:
        (s,) = spins
        a = factors[s]
        return (ZRotation(s, theta),) if a == "z" else (rf(s, theta, a),)
    transverse = [s for s in spins if factors[s] != "z"]
    if transverse:
        s = transverse[0]
        before, after = _TO_AXIS[factors[s]]
        inner = evolution({**factors, s: "z"}, theta)
        return (rf(s, math.pi / 2, before), *inner, rf(s, math.pi / 2, after))
    if len(spins) == 2:
        return (jdelay(spins[0], spins[1], theta),)
    # all-z product over >= 3 spins:
    # exp(-i t 2^(k-1) Iz^a .. Iz^c) = Rx(pi/2)_c . A . exp(-i t 2^(k-2) .. Ix^c) . A^dag . Rx(pi/2)_c^dag
    # with A = exp(-i (pi/2) 2 Iz^a Iz^c) mapping Ix^c to 2 Iz^a Iy^c.
    a, c = spins[0], spins[-1]
    rest = {s: "z" for s in spins[1:-1]}
    inner = evolution({**rest, c: "x"}, theta)
    return (
        rf(c, math.pi / 2, "-x"),
        jdelay(a, c, -math.pi / 2),
        *inner,
        jdelay(a, c, math.pi / 2),
        rf(c, math.pi / 2, "x"),
    )


def three_spin_cascade(i: int, k: int, j: int, theta: float) -> PulseSeq:
    """exp(-i*theta*4*I_z^i*I_z^k*I_x^j)."""
    return evolution({i: "z", k: "z", j: "x"}, theta)


def hamiltonian_pulses(terms: Sequence[ProductOp], n_spins: int | None = None) -> PulseSeq:
    """Pulses for exp(+i * sum(terms)) when all terms commute.

    Identity terms contribute only a global phase and are dropped.
    """
    if n_spins is not None:
        dev = max_commutator(terms, n_spins)
        if dev > 1e-12:
            raise QsdError(f"terms do not commute (commutator norm {dev:.3g})")
    seq = []
    for t in terms:
        if t.order == 0:
            continue
        # exp(i c prod I) = exp(-i theta 2^(k-1) prod I) with theta = -c / 2^(k-1)
        seq.extend(evolution(t.factors, -t.coef / 2 ** (t.order - 1)))
    return tuple(seq)


def hadamard_pulses(spin: int) -> PulseSeq:
    """(pi/2)_y then (pi)_x: a Hadamard up to global phase."""
    return (rf(spin, math.pi / 2, "y"), rf(spin, math.pi, "x"))


def controlled_u_sequence(which: str) -> PulseSeq:
    """Controlled-U_1 or controlled-U_2 on the 3-spin register, from H1/H2."""
    key = {"1": "H1", "2": "H2", "H1": "H1", "H2": "H2"}.get(str(which).upper())
    if key is None:
        raise QsdError(f"no controlled-U sequence {which!r}")
    return hamiltonian_pulses(EFFECTIVE_TERMS[key], 3)


def cnot_pulses(control: int, target: int) -> PulseSeq:
    return hamiltonian_pulses(controlled_pauli_terms(control, {target: "x"}))


def cz_pulses(a: int, b: int) -> PulseSeq:
    return hamiltonian_pulses(controlled_z_terms(a, b))


def gate_pulses(gates, ancilla_spin: int = 1, work_offset: int = 1) -> PulseSeq:
    """Translate a CNOT/CZ/H/X gate list into pulses.

    Gate qubit 0 is mapped to ``ancilla_spin`` and work qubit q (1-based) to
    spin ``q + work_offset``; this is the numbering of ``decompose_controlled``.
    """

    def spin(q):
        return ancilla_spin if q == 0 else q + work_offset

    seq = []
    for g in gates:
        q = [spin(v) for v in g.qubits]
        if g.name == "CNOT":
            seq += cnot_pulses(q[0], q[1])
        elif g.name == "CZ":
            seq += cz_pulses(q[0], q[1])
        elif g.name == "H":
            seq += hadamard_pulses(q[0])
        elif g.name == "X":
            seq.append(rf(q[0], math.pi, "x"))
        else:
            raise QsdError(f"gate {g.name} has no pulse translation")
    return tuple(seq)


def ghz_controlled_sequence(j: int) -> PulseSeq:
    """Controlled-U_j for 3-qubit GHZ discrimination on a 4-spin register (spin 1 ancilla)."""
    from .synth import decompose_controlled

    return gate_pulses(decompose_controlled("ghz", j))


def experiment_sequence(controlled: PulseSeq, ancilla_spin: int = 1) -> PulseSeq:
    """Hadamard, controlled operation, Hadamard on the ancilla."""
    return (*hadamard_pulses(ancilla_spin), *controlled, *hadamard_pulses(ancilla_spin))


# ---------------------------------------------------------------- readout


class PeakSign(str, Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    INDETERMINATE = "indeterminate"

    @property
    def bit(self) -> int | None:
        return {"positive": 0, "negative": 1}.get(self.value)


READOUT_THRESHOLD = 1e-6


def ancilla_readout(rho, ancilla_spin: int) -> PeakSign:
    """Sign of <I_z> on the ancilla: positive means |0>, negative |1>."""
    rho = np.asarray(rho, dtype=complex)
    n = n_qubits_of(rho.shape[0])
    if not 1 <= ancilla_spin <= n:
        raise UnknownSpin(f"spin {ancilla_spin} outside a {n}-spin register", spin=ancilla_spin)
    iz = realize_product_op(op(1.0, f"{ancilla_spin}z"), n)
    m = float(np.real(np.trace(rho @ iz)))
    if m > READOUT_THRESHOLD:
        return PeakSign.POSITIVE
    if m < -READOUT_THRESHOLD:
        return PeakSign.NEGATIVE
    return PeakSign.INDETERMINATE


# ---------------------------------------------------------------- text format

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv}


def parse_angle(text: str) -> float:
    """Evaluate an angle such as ``pi/2``, ``-3*pi/4`` or ``1.5708``."""

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        raise ValueError("unsupported angle expression")

    try:
        return ev(ast.parse(text.strip(), mode="eval"))
    except (SyntaxError, ValueError, ZeroDivisionError) as exc:
        raise PulseSyntaxError(f"bad angle {text!r}: {exc}") from None


def format_angle(angle: float) -> str:
    frac = Fraction(angle / math.pi).limit_denominator(64)
    if abs(float(frac) * math.pi - angle) < 1e-12:
        if frac == 0:
            return "0"
        num = {1: "", -1: "-"}.get(frac.numerator, f"{frac.numerator}*")
        return f"{num}pi" + ("" if frac.denominator == 1 else f"/{frac.denominator}")
    return repr(angle)


def parse_pulses(text: str) -> PulseSeq:
    """Parse one element per line: ``rf 1 pi/2 y``, ``jdelay 1 3 pi/2``, ``zrot 1 pi/2``.

    Blank lines and ``#`` comments are ignored.
    """
    seq = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        try:
            kind = tok[0].lower()
            if kind == "rf" and len(tok) == 4:
                seq.append(RFPulse(int(tok[1]), parse_angle(tok[2]), tok[3].lower()))
            elif kind == "jdelay" and len(tok) == 4:
                seq.append(CouplingDelay(int(tok[1]), int(tok[2]), parse_angle(tok[3])))
            elif kind == "zrot" and len(tok) == 3:
                seq.append(ZRotation(int(tok[1]), parse_angle(tok[2])))
            else:
                raise PulseSyntaxError(f"unrecognized element {line!r}")
        except PulseSyntaxError as exc:
            raise PulseSyntaxError(f"line {lineno}: {exc}", line=lineno) from None
        except ValueError as exc:
            raise PulseSyntaxError(f"line {lineno}: {exc}", line=lineno) from None
    return tuple(seq)


def format_pulses(seq: Iterable[Element]) -> str:
    lines = []
    for e in seq:
        if isinstance(e, RFPulse):
            lines.append(f"rf {e.spin} {format_angle(e.angle)} {e.axis}")
        elif isinstance(e, CouplingDelay):
            lines.append(f"jdelay {e.i} {e.j} {format_angle(e.angle)}")
        else:
            lines.append(f"zrot {e.spin} {format_angle(e.angle)}")
    return "\n".join(lines) + ("\n" if lines else "")
