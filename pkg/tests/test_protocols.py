import math

import numpy as np
import pytest

from bqt.channels import apply, validate
from bqt.protocols import (
    Kpf16Params,
    ideal_output,
    kpf16_choi,
    kpf16_choi_ordered,
    kpf16_error,
    kpf16_fidelity,
    kpf16_fidelity_formula,
    kpf16_overlap,
    kpf16_second_choi,
    kpf16_second_error,
    kpf16_target,
    single_ebit_scheme_error,
)
from bqt.qmat import kron, partial_trace
from bqt.states import random_state


def test_params_from_angles():
    q = Kpf16Params.from_angles(math.pi, 0.0)
    assert np.isclose(q.p1, 1) and np.isclose(q.p2, 0)
    with pytest.raises(ValueError):
        Kpf16Params(1.5, 0)


@pytest.mark.parametrize("p", [(0, 0), (1, 0), (0.3, 0.8), (1, 1)])
def test_choi_is_a_channel(p):
    rep = validate(kpf16_choi(p))
    assert rep.cp and rep.tp


def test_ordered_layout():
    k = kpf16_choi_ordered((0.2, 0.4))
    assert k.dims == (2, 2, 2, 2)
    assert np.isclose(k.trace(), 4)


def test_corner_channels():
    rng = np.random.default_rng(0)
    a, b = random_state((2,), rng), random_state((2,), rng)
    mixed = np.eye(2) / 2
    # p = (0, 0): both inputs are discarded
    out = apply(kpf16_choi((0, 0)), kron(a, b))
    assert np.allclose(partial_trace(out, [1]).data, mixed)
    # p = (1, 0): Q_A -> C_B and C_A is maximally mixed
    out = apply(kpf16_choi((1, 0)), kron(a, b))
    assert np.allclose(partial_trace(out, [1]).data, mixed)
    assert np.allclose(partial_trace(out, [0]).data, a.data)
    # p = (0, 1): Q_B -> C_A and C_B is maximally mixed
    out = apply(kpf16_choi((0, 1)), kron(a, b))
    assert np.allclose(partial_trace(out, [1]).data, b.data)
    assert np.allclose(partial_trace(out, [0]).data, mixed)


@pytest.mark.parametrize("p1", np.linspace(0, 1, 5))
@pytest.mark.parametrize("p2", np.linspace(0, 1, 5))
def test_fidelity_formula_matches_overlap(p1, p2):
    q = Kpf16Params(p1, p2)
    assert abs(kpf16_overlap(q) - kpf16_fidelity_formula(q)) < 1e-12
    assert kpf16_fidelity(q) <= 0.25 + 1e-15


def test_no_term_contains_the_swap():
    # overlap with Phi (x) Phi stays at most 1/4 for every mixture
    rng = np.random.default_rng(1)
    for _ in range(20):
        q = Kpf16Params(*rng.uniform(size=2))
        assert kpf16_overlap(q) <= 0.25 + 1e-12
    assert np.isclose(kpf16_overlap((1, 0)), 0.25)


def test_ideal_output_is_a_state():
    phi2 = ideal_output()
    assert np.isclose(phi2.trace(), 1)
    assert np.allclose(phi2.data @ phi2.data, phi2.data)


def test_target_is_swap():
    rng = np.random.default_rng(2)
    a, b = random_state((2,), rng), random_state((2,), rng)
    assert apply(kpf16_target(), kron(a, b)).allclose(kron(b, a))


def test_corner_error():
    assert abs(kpf16_error((1, 0)) - 0.75) < 1e-5
    assert abs(kpf16_error((0, 0)) - 1.0) < 1e-5


def test_error_report():
    rep = kpf16_error((0.5, 0.5), report=True)
    assert rep.ok
    assert rep.value >= 1 - kpf16_fidelity_formula((0.5, 0.5)) - 1e-6


def test_second_protocol():
    r = kpf16_second_error(0.5)
    assert abs(r.infidelity - 0.75) < 1e-5
    assert abs(r.diamond - 0.75) < 1e-5
    assert validate(kpf16_second_choi(0.3)).ok


def test_single_ebit_scheme():
    assert abs(single_ebit_scheme_error(2) - 0.5) < 1e-10
    assert abs(single_ebit_scheme_error(3) - 2 / 3) < 1e-10
    with pytest.raises(ValueError):
        single_ebit_scheme_error(4)
