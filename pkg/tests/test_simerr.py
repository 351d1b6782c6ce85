import numpy as np
import pytest

from bqt.channels import choi_from_kraus, identity_choi, replacement_choi, swap_channel_choi
from bqt.qmat import DimensionError, LabeledOperator, identity, kron
from bqt.simerr import (
    ErrorReport,
    channel_box_error,
    channel_fidelity,
    diamond_distance,
    eppt_bcqt,
    eppt_bipartite,
    eppt_infid_bipartite,
    eppt_multipartite,
    eppt_swap,
    ppt_cuts,
    swap_choi_multi,
)
from bqt.states import ResourceState, max_entangled, random_state


def dephasing(p):
    z = np.diag([1.0, -1.0])
    return choi_from_kraus([np.sqrt(1 - p) * np.eye(2), np.sqrt(p) * z], (2,), (2,))


def depolarizing(d):
    return replacement_choi(identity((d,)) / d, (d,))


def test_diamond_known_values():
    assert abs(diamond_distance(identity_choi(2), identity_choi(2))) < 1e-7
    assert abs(diamond_distance(identity_choi(2), depolarizing(2)) - 0.75) < 1e-6
    for p in (0.1, 0.5):
        assert abs(diamond_distance(identity_choi(2), dephasing(p)) - p) < 1e-6


def test_diamond_report():
    rep = diamond_distance(identity_choi(2), dephasing(0.2), report=True)
    assert isinstance(rep, ErrorReport)
    assert rep.ok and rep.gap < 1e-6
    assert {"mu", "Z"} <= set(rep.certificate)


def test_channel_fidelity_known_values():
    assert abs(channel_fidelity(identity_choi(2), depolarizing(2)) - 0.25) < 1e-6
    assert abs(channel_fidelity(identity_choi(2), dephasing(0.3)) - 0.7) < 1e-6
    rep = channel_fidelity(identity_choi(2), identity_choi(2), report=True)
    assert rep.ok and abs(rep.value - 1) < 1e-6


def test_shape_mismatch():
    with pytest.raises(DimensionError):
        diamond_distance(identity_choi(2), identity_choi(3))


def test_ppt_cuts():
    assert ppt_cuts(2) == [(0,)]
    assert ppt_cuts(3) == [(0,), (1,), (2,)]
    assert len(ppt_cuts(4)) == 4 + 3


def test_swap_benchmarks():
    assert abs(eppt_swap(None, 2).value - 0.75) < 1e-6
    assert abs(eppt_swap(ResourceState.isotropic(1, 2), 2).value - 0.5) < 1e-6
    # two ebits: perfect swap
    assert abs(eppt_swap(ResourceState.isotropic(1, 4), 2).value) < 1e-6


def test_swap_rejects_bad_input():
    with pytest.raises(ValueError):
        eppt_swap(None, 1)
    with pytest.raises(DimensionError):
        eppt_swap(LabeledOperator(np.eye(8) / 8, (2, 2, 2)), 2)
    with pytest.raises(TypeError):
        eppt_swap("phi", 2)


def test_general_program_matches_swap_program():
    s = swap_channel_choi(2)
    rho = random_state((2, 2), np.random.default_rng(11))
    a = eppt_bipartite(s, rho, use_dual=True)
    b = eppt_swap(rho, 2)
    assert a.ok and b.ok
    assert abs(a.value - b.value) < 1e-5
    assert a.gap < 1e-6


def test_infidelity_equals_diamond_for_swap():
    rho = ResourceState.werner(0.8, 2)
    a = eppt_infid_bipartite(swap_channel_choi(2), rho)
    assert a.ok
    assert abs(a.value - eppt_swap(rho, 2).value) < 1e-5


def test_multipartite_reduces_to_bipartite():
    rho = random_state((2, 2), np.random.default_rng(12))
    r3 = LabeledOperator(rho.data, (2, 2, 1))
    m = eppt_multipartite(swap_choi_multi(2, trivial=1), r3)
    assert m.ok
    assert abs(m.value - eppt_swap(rho, 2).value) < 1e-5


def test_multipartite_party_limit():
    c = swap_choi_multi(2, trivial=2)
    with pytest.raises(DimensionError):
        eppt_multipartite(c, LabeledOperator(np.eye(4) / 4, (2, 2, 1, 1)))


def test_bcqt_values():
    assert abs(eppt_bcqt(LabeledOperator(np.ones((1, 1)), (1, 1, 1)), 2).value - 0.75) < 1e-6
    phi_pi = kron(max_entangled(2), identity((2,)) / 2)
    assert abs(eppt_bcqt(phi_pi, 2).value - 0.5) < 1e-5


def test_channel_box_trivial():
    # N = M and K = L: the identity superchannel reaches zero infidelity
    n = dephasing(0.3)
    assert abs(channel_box_error(n, n, n, n).value) < 1e-5


def test_channel_box_cannot_create_from_nothing():
    # N = M forces Theta(N) = L, so the error is the infidelity of L to K
    rep = channel_box_error(depolarizing(2), depolarizing(2), identity_choi(2), depolarizing(2))
    assert rep.ok
    assert abs(rep.value - 0.75) < 1e-5


def test_report_json():
    doc = eppt_swap(None, 2).to_json(certificate=False)
    assert doc["target"] == "swap-2"
    assert "certificate" not in doc
    doc = eppt_swap(None, 2).to_json()
    assert set(doc["certificate"]) == set("KLMN")
