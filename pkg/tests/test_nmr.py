import math

import numpy as np
import pytest
import scipy.linalg

from qsdisc import nmr
from qsdisc.errors import PulseSyntaxError, QsdError, UnknownPreset, UnknownSpin
from qsdisc.linalg import X, Z, equal_up_to_global_phase, kron_all
from qsdisc.orthoset import ghz_set
from qsdisc.synth import GHZ3_ARRAYS, build_discriminator, controlled_embed, validate_eigenarrays

PI = math.pi
I2 = np.eye(2)
IX, IY, IZ = X / 2, np.array([[0, -1j], [1j, 0]]) / 2, Z / 2


def ref_expm(gen):
    """exp(-i*gen) by scipy, independent of the package's eigendecomposition."""
    return scipy.linalg.expm(-1j * gen)


@pytest.fixture(scope="module")
def chfbr2():
    return nmr.load_spin_system("chfbr2-3spin")


@pytest.fixture(scope="module")
def crotonic():
    return nmr.load_spin_system("crotonic-4spin")


def test_presets(chfbr2, crotonic):
    assert set(nmr.preset_names()) >= {"chfbr2-3spin", "crotonic-4spin"}
    assert chfbr2.n_spins == 3 and crotonic.n_spins == 4
    assert chfbr2.coupling(1, 3) == chfbr2.coupling(3, 1) == pytest.approx(224.5)


def test_unknown_preset():
    with pytest.raises(UnknownPreset):
        nmr.load_spin_system("no-such-molecule")


def test_spin_hamiltonian_two_spin():
    sys = nmr.SpinSystem.from_dict("ab", {"larmor_hz": [100.0, 50.0], "j_hz": [[1, 2, 10.0]]})
    h = nmr.spin_hamiltonian(sys)
    expected = 100 * np.kron(IZ, I2) + 50 * np.kron(I2, IZ) + 10 * np.kron(IZ, IZ)
    assert np.abs(h - expected).max() < 1e-12
    np.testing.assert_allclose(np.diag(h).real, [77.5, 22.5, -27.5, -72.5])


def test_realize_product_op():
    m = nmr.realize_product_op(nmr.op(2.0, "1z 3x"), 3)
    assert np.abs(m - 2 * kron_all(IZ, I2, IX)).max() == 0
    with pytest.raises(UnknownSpin):
        nmr.realize_product_op(nmr.op(1, "4z"), 3)


@pytest.mark.parametrize("which", ["H1", "H2"])
def test_effective_terms_commute(which):
    assert nmr.max_commutator(nmr.EFFECTIVE_TERMS[which], 3) <= 1e-12


@pytest.mark.parametrize(
    "which,block",
    [("H1", np.kron(I2, X)), ("H2", np.kron(Z, X))],
)
def test_effective_hamiltonian_embeds(which, block):
    u = scipy.linalg.expm(1j * nmr.effective_hamiltonian(which))
    assert equal_up_to_global_phase(u, controlled_embed(block), 1e-9)


def test_exponential_factorizes_over_commuting_terms():
    terms = nmr.EFFECTIVE_TERMS["H2"]
    product = np.eye(8, dtype=complex)
    for t in terms:
        product = scipy.linalg.expm(1j * nmr.realize_product_op(t, 3)) @ product
    assert np.abs(product - scipy.linalg.expm(1j * nmr.effective_hamiltonian("H2"))).max() < 1e-12


def test_equilibrium(chfbr2):
    rho = nmr.equilibrium_rho(chfbr2)
    expected = kron_all(IZ, I2, I2) + 0.94 * kron_all(I2, IZ, I2) + 0.25 * kron_all(I2, I2, IZ)
    assert np.abs(rho - expected).max() < 1e-12


@pytest.mark.parametrize("axis,mat", [("x", IX), ("y", IY), ("-x", -IX), ("-y", -IY)])
def test_rf_pulse(chfbr2, axis, mat):
    u = nmr.compile_pulses([nmr.rf(2, PI / 3, axis)], chfbr2)
    assert np.abs(u - ref_expm(PI / 3 * kron_all(I2, mat, I2))).max() < 1e-12


def test_time_order(chfbr2):
    a, b = nmr.rf(1, PI / 2, "x"), nmr.rf(1, PI / 2, "y")
    ua = nmr.compile_pulses([a], chfbr2)
    ub = nmr.compile_pulses([b], chfbr2)
    assert np.abs(nmr.compile_pulses([a, b], chfbr2) - ub @ ua).max() < 1e-12


@pytest.mark.parametrize("angle", [0.3, PI / 2, 2.5])
def test_zrotation_composite(chfbr2, angle):
    seq = [nmr.ZRotation(3, angle)]
    target = ref_expm(angle * kron_all(I2, I2, IZ))
    assert np.abs(nmr.compile_pulses(seq, chfbr2) - target).max() < 1e-12
    assert np.abs(nmr.compile_pulses(seq, chfbr2, expand_composite=False) - target).max() < 1e-12


@pytest.mark.parametrize("theta", [0.0, 0.4, PI / 2, -1.1])
def test_two_spin_sandwich(chfbr2, theta):
    u = nmr.compile_pulses(nmr.two_spin_sandwich(1, 3, theta), chfbr2)
    target = ref_expm(theta * 2 * kron_all(IZ, I2, IX))
    assert equal_up_to_global_phase(u, target, 1e-12)
    if theta == 0.0:
        assert np.abs(u - np.eye(8)).max() < 1e-12


@pytest.mark.parametrize("theta", [0.7, PI / 4, -PI / 2])
def test_three_spin_cascade(chfbr2, theta):
    u = nmr.compile_pulses(nmr.three_spin_cascade(1, 2, 3, theta), chfbr2)
    target = ref_expm(theta * 4 * kron_all(IZ, IZ, IX))
    assert equal_up_to_global_phase(u, target, 1e-12)


def test_four_spin_evolution(crotonic):
    u = nmr.compile_pulses(nmr.evolution({1: "z", 2: "y", 3: "z", 4: "x"}, 0.3), crotonic)
    target = ref_expm(0.3 * 8 * kron_all(IZ, IY, IZ, IX))
    assert equal_up_to_global_phase(u, target, 1e-12)


def test_hadamard_pulses(chfbr2):
    u = nmr.compile_pulses(nmr.hadamard_pulses(2), chfbr2)
    had = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
    assert equal_up_to_global_phase(u, kron_all(I2, had, I2), 1e-12)


@pytest.mark.parametrize("which,block", [("H1", np.kron(I2, X)), ("H2", np.kron(Z, X))])
def test_controlled_u_sequences(chfbr2, which, block):
    u = nmr.compile_pulses(nmr.controlled_u_sequence(which), chfbr2)
    assert equal_up_to_global_phase(u, controlled_embed(block), 1e-9)


@pytest.mark.parametrize("j", [1, 2, 3])
def test_ghz_sequences(crotonic, j):
    spec = build_discriminator(ghz_set(3), validate_eigenarrays(GHZ3_ARRAYS))
    u = nmr.compile_pulses(nmr.ghz_controlled_sequence(j), crotonic)
    assert equal_up_to_global_phase(u, controlled_embed(spec.operators[j - 1]), 1e-9)


def test_non_commuting_terms_rejected():
    with pytest.raises(QsdError):
        nmr.hamiltonian_pulses([nmr.op(1, "1x"), nmr.op(1, "1z")], 1)


def test_compile_rejects_unknown_spin(chfbr2):
    with pytest.raises(UnknownSpin):
        nmr.compile_pulses([nmr.rf(5, PI, "x")], chfbr2)


def test_compile_rejects_uncoupled_pair():
    sys = nmr.SpinSystem.from_dict("ab", {"larmor_hz": [1.0, 2.0]})
    with pytest.raises(QsdError):
        nmr.compile_pulses([nmr.jdelay(1, 2, PI / 2)], sys)


def test_delay_time(chfbr2):
    # exp(-i*angle*2*Iz*Iz) needs pi*J*t = angle
    t = nmr.delay_time(nmr.jdelay(1, 3, PI / 2), chfbr2)
    assert t == pytest.approx(1 / (2 * 224.5))


def test_jdelay_folding_is_global_phase(chfbr2):
    a = nmr.compile_pulses([nmr.CouplingDelay(1, 2, -PI / 2)], chfbr2)
    b = nmr.compile_pulses([nmr.jdelay(1, 2, -PI / 2)], chfbr2)
    assert nmr.jdelay(1, 2, -PI / 2).angle == pytest.approx(3 * PI / 2)
    assert equal_up_to_global_phase(a, b, 1e-12)


@pytest.mark.parametrize(
    "rho,sign",
    [
        (np.diag([1, 0, 0, 0]), nmr.PeakSign.POSITIVE),
        (np.diag([0, 0, 1, 0]), nmr.PeakSign.NEGATIVE),
        (np.eye(4) / 4, nmr.PeakSign.INDETERMINATE),
    ],
)
def test_readout(rho, sign):
    assert nmr.ancilla_readout(rho, 1) is sign


def test_readout_bits():
    assert nmr.PeakSign.POSITIVE.bit == 0
    assert nmr.PeakSign.NEGATIVE.bit == 1
    assert nmr.PeakSign.INDETERMINATE.bit is None
    with pytest.raises(UnknownSpin):
        nmr.ancilla_readout(np.eye(4) / 4, 3)


@pytest.mark.parametrize("text,value", [("pi/2", PI / 2), ("-3*pi/4", -3 * PI / 4), ("1.5", 1.5), ("2*(pi-1)", 2 * (PI - 1))])
def test_parse_angle(text, value):
    assert nmr.parse_angle(text) == pytest.approx(value)


@pytest.mark.parametrize("text", ["__import__('os')", "pi**2", "1/0", ""])
def test_parse_angle_rejects(text):
    with pytest.raises(PulseSyntaxError):
        nmr.parse_angle(text)


@pytest.mark.parametrize("which", ["H1", "H2"])
def test_pulse_text_round_trip(chfbr2, which):
    seq = nmr.controlled_u_sequence(which)
    back = nmr.parse_pulses(nmr.format_pulses(seq))
    assert len(back) == len(seq)
    assert np.abs(nmr.compile_pulses(back, chfbr2) - nmr.compile_pulses(seq, chfbr2)).max() < 1e-12


def test_parse_pulses_comments_and_errors():
    seq = nmr.parse_pulses("# hadamard\nrf 1 pi/2 y\n\nrf 1 pi x  # flip\nzrot 2 pi/4\njdelay 1 2 pi/2\n")
    assert seq == (
        nmr.RFPulse(1, PI / 2, "y"),
        nmr.RFPulse(1, PI, "x"),
        nmr.ZRotation(2, PI / 4),
        nmr.CouplingDelay(1, 2, PI / 2),
    )
    with pytest.raises(PulseSyntaxError) as err:
        nmr.parse_pulses("rf 1 pi/2 y\nwait 3\n")
    assert err.value.detail["line"] == 2
