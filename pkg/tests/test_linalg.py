import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from qsdisc.errors import NonHermitian
from qsdisc.linalg import (
    H,
    X,
    Y,
    Z,
    I2,
    commutator,
    equal_up_to_global_phase,
    expm_i,
    global_phase,
    is_hermitian,
    is_unitary,
    ket,
    kron,
    kron_all,
    max_abs,
    n_qubits_of,
    random_hermitian,
    random_unitary,
)
from qsdisc.synth import reflection_matrix


def test_kron_examples():
    np.testing.assert_array_equal(kron(X, I2)[0], [0, 0, 1, 0])
    np.testing.assert_array_equal(kron(I2, X)[0], [0, 1, 0, 0])
    np.testing.assert_array_equal(ket("10"), [0, 0, 1, 0])
    np.testing.assert_array_equal(kron_all(X, X, I2) @ ket("101"), ket("011"))


def test_kron_associative():
    rng = np.random.default_rng(1)
    a, b, c = (random_unitary(2, rng) for _ in range(3))
    assert max_abs(kron(kron(a, b), c) - kron(a, kron(b, c))) < 1e-14


@pytest.mark.parametrize("dim", [2, 4, 8])
def test_expm_i_matches_scipy(dim):
    rng = np.random.default_rng(dim)
    h = random_hermitian(dim, rng)
    assert max_abs(expm_i(h) - scipy.linalg.expm(1j * h)) < 1e-12


def test_expm_i_rejects_non_hermitian():
    with pytest.raises(NonHermitian):
        expm_i(np.array([[0, 1], [0, 0]], dtype=complex))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_expm_i_unitary_and_inverse(seed):
    rng = np.random.default_rng(seed)
    h = random_hermitian(4, rng)
    u = expm_i(h)
    assert is_unitary(u)
    assert max_abs(u @ expm_i(-h) - np.eye(4)) < 1e-12


def test_pauli_algebra():
    assert max_abs(X @ Y - 1j * Z) < 1e-15
    assert max_abs(commutator(X, Y) - 2j * Z) < 1e-15
    assert max_abs(H @ Z @ H - X) < 1e-15
    for p in (X, Y, Z, H):
        assert is_unitary(p) and is_hermitian(p)


def test_reflection_is_unitary_but_scaled_pattern_is_not():
    assert is_unitary(reflection_matrix(math.pi / 3))
    pattern = np.kron(I2, X) / math.sqrt(2)
    assert not is_unitary(pattern)


@pytest.mark.parametrize("phi", [0.0, 0.3, math.pi, -2.0])
def test_global_phase(phi):
    rng = np.random.default_rng(7)
    u = random_unitary(4, rng)
    v = np.exp(1j * phi) * u
    assert abs(global_phase(v, u) - np.exp(1j * phi)) < 1e-12
    assert equal_up_to_global_phase(u, v)
    assert not equal_up_to_global_phase(u, u @ np.diag([1, 1, 1, -1]))


@pytest.mark.parametrize("dim,n", [(2, 1), (8, 3), (1024, 10)])
def test_n_qubits_of(dim, n):
    assert n_qubits_of(dim) == n


def test_n_qubits_of_rejects_non_power():
    with pytest.raises(Exception):
        n_qubits_of(6)
