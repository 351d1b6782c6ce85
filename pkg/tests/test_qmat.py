import numpy as np
import pytest

from bqt.qmat import (
    DimensionError,
    LabeledOperator,
    NotPSDError,
    identity,
    kron,
    partial_trace,
    partial_transpose,
    permute,
    regroup,
    state_fidelity,
    trace_norm,
)
from bqt.states import max_entangled, random_state, swap_operator


def rand_op(dims, rng):
    n = int(np.prod(dims))
    return LabeledOperator(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)), dims)


def test_shape_checked():
    with pytest.raises(DimensionError):
        LabeledOperator(np.eye(3), (2, 2))
    with pytest.raises(DimensionError):
        LabeledOperator(np.eye(1), (0,))


def test_data_is_read_only():
    x = identity((2,))
    with pytest.raises(ValueError):
        x.data[0, 0] = 5


def test_row_major_convention():
    # |0>|1> sits at index 1 for dims (2, 3)
    e = np.zeros(6)
    e[1] = 1
    a = np.array([1.0, 0.0])
    b = np.array([0.0, 1.0, 0.0])
    assert np.array_equal(np.kron(a, b), e)


def test_partial_trace_product():
    rng = np.random.default_rng(0)
    a = random_state((2,), rng)
    b = random_state((3,), rng)
    ab = kron(a, b)
    assert partial_trace(ab, [1]).allclose(a)
    assert partial_trace(ab, [0]).allclose(b)
    assert abs(partial_trace(ab, [0, 1]).trace() - 1) < 1e-12


def test_partial_trace_middle_factor():
    rng = np.random.default_rng(1)
    a, b, c = (random_state((d,), rng) for d in (2, 3, 2))
    assert partial_trace(kron(a, b, c), [1]).allclose(kron(a, c))


def test_partial_transpose_of_gamma_is_swap():
    for d in (2, 3):
        g = max_entangled(d, normalized=False)
        assert partial_transpose(g, [1]).allclose(swap_operator(d))


def test_partial_transpose_full_is_transpose():
    x = rand_op((2, 3), np.random.default_rng(2))
    assert np.allclose(partial_transpose(x, [0, 1]).data, x.data.T)


def test_partial_transpose_involution_bit_exact():
    x = rand_op((3, 2, 2), np.random.default_rng(3))
    back = partial_transpose(partial_transpose(x, [0, 2]), [0, 2])
    assert np.array_equal(back.data, x.data)


def test_permute_matches_kron_order():
    rng = np.random.default_rng(4)
    a, b, c = (random_state((d,), rng) for d in (2, 3, 4))
    assert permute(kron(a, b, c), (2, 0, 1)).allclose(kron(c, a, b))


def test_permute_rejects_non_permutation():
    with pytest.raises(DimensionError):
        permute(identity((2, 2)), (0, 0))


def test_bad_subsystem_index():
    with pytest.raises(DimensionError):
        partial_trace(identity((2, 2)), [2])
    with pytest.raises(DimensionError):
        partial_transpose(identity((2, 2)), [1, 1])


def test_regroup():
    x = identity((2, 2))
    assert regroup(x, (4,)).dims == (4,)
    with pytest.raises(DimensionError):
        regroup(x, (3,))


def test_trace_norm_of_difference_of_pure_states():
    a = LabeledOperator(np.diag([1.0, 0.0]), (2,))
    b = LabeledOperator(np.full((2, 2), 0.5), (2,))
    # orthogonal-ish overlap 1/2: trace distance sqrt(1 - 1/2)
    assert np.isclose(trace_norm(a - b) / 2, np.sqrt(0.5))


def test_state_fidelity_pure():
    phi = max_entangled(2)
    mix = identity((2, 2)) / 4
    assert np.isclose(state_fidelity(phi, mix), 0.25)
    assert np.isclose(state_fidelity(phi, phi), 1.0)


def test_state_fidelity_rejects_non_state():
    bad = LabeledOperator(np.diag([2.0, -1.0]), (2,))
    with pytest.raises(NotPSDError):
        state_fidelity(bad, identity((2,)) / 2)
