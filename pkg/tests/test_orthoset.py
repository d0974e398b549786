import math

import numpy as np
import pytest

from qsdisc.circuit import partial_trace, pure_density
from qsdisc.errors import BadCardinality, DimensionMismatch, NotOrthonormal
from qsdisc.linalg import X, kron_all, ket
from qsdisc.orthoset import (
    bell_set,
    family_s,
    ghz_set,
    make_ortho_set,
    max_state_distance,
    ortho_set_to_json,
    parity_profile,
    single_qubit_family,
    states_from_json,
)

S = 1 / math.sqrt(2)


def test_family_s_members():
    o = family_s(0.6, 0.8)
    np.testing.assert_allclose(o[0], 0.6 * ket("00") + 0.8 * ket("01"))
    np.testing.assert_allclose(o[2], 0.8 * ket("10") - 0.6 * ket("11"))
    assert o.n_qubits == 2 and len(o) == 4 and o.dim == 4


def test_family_s_has_no_definite_parity():
    for v in family_s(S, S).states:
        assert parity_profile(v) == {0, 1}


def test_bell_parities():
    assert [parity_profile(v) for v in bell_set().states] == [{0}, {0}, {1}, {1}]


def test_bell_is_two_qubit_ghz():
    assert max_state_distance(bell_set(), ghz_set(2)) < 1e-15


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_ghz_eigen_of_full_flip(k):
    flip = kron_all(*[X] * k)
    for i, v in enumerate(ghz_set(k).states):
        sign = 1 if i % 2 == 0 else -1
        assert np.abs(flip @ v - sign * v).max() < 1e-15


@pytest.mark.parametrize("k", [2, 3])
def test_ghz_single_qubit_marginals_are_mixed(k):
    for v in ghz_set(k).states:
        rho = partial_trace(pure_density(v), [0], k)
        assert np.abs(rho - np.eye(2) / 2).max() < 1e-15


def test_ghz3_order():
    o = ghz_set(3)
    np.testing.assert_allclose(o[0], S * (ket("000") + ket("111")))
    np.testing.assert_allclose(o[3], S * (ket("001") - ket("110")))


def test_not_orthonormal_pair():
    with pytest.raises(NotOrthonormal) as err:
        make_ortho_set([[1, 0], [S, S]])
    assert err.value.pair == (0, 1)
    assert err.value.overlap == pytest.approx(S)


def test_not_normalized_reports_diagonal_pair():
    with pytest.raises(NotOrthonormal) as err:
        make_ortho_set([[1, 0], [0, 2]])
    assert err.value.pair == (1, 1)


@pytest.mark.parametrize("vectors", [[[1, 0]], [[1, 0, 0], [0, 1, 0], [0, 0, 1]]])
def test_bad_cardinality(vectors):
    with pytest.raises(BadCardinality):
        make_ortho_set(vectors)


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        make_ortho_set([[1, 0], [0, 1, 0]])


def test_single_qubit_family_rejects_unnormalized():
    with pytest.raises(Exception):
        single_qubit_family(1.0, 1.0)


def test_family_continuity():
    a = family_s(0.6, 0.8)
    b = family_s(math.cos(math.atan2(0.8, 0.6) + 1e-6), math.sin(math.atan2(0.8, 0.6) + 1e-6))
    assert max_state_distance(a, b) < 1e-5


def test_index_of_ignores_global_phase():
    o = bell_set()
    assert o.index_of(1j * o[2]) == 2
    assert o.index_of(ket("00")) is None


def test_json_round_trip():
    o = make_ortho_set([[S, 1j * S], [S, -1j * S]])
    back = make_ortho_set(states_from_json(ortho_set_to_json(o)))
    assert max_state_distance(o, back) == 0


def test_states_are_read_only():
    with pytest.raises(ValueError):
        bell_set().v_matrix[0, 0] = 2
