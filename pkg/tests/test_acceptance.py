"""The ten acceptance criteria, each at its stated tolerance.

Every test records one PASS/FAIL line, repeated in the terminal summary.
Criterion 4 is checked twice: against its reference form 1 - max{F, 1/16},
which fails and is marked xfail(strict=True), and against the corrected
1 - max{F, 1/4}, which passes. See the companion test for why.
"""

import time

import numpy as np
import pytest

from bqt import analytic as an
from bqt.channels import identity_choi, swap_channel_choi, teleportation_choi
from bqt.protocols import (
    Kpf16Params,
    kpf16_error,
    kpf16_fidelity_formula,
    kpf16_overlap,
    kpf16_second_error,
)
from bqt.qmat import LabeledOperator, kron, partial_transpose
from bqt.sdp import check_feasible, solve_lp
from bqt.simerr import eppt_bcqt, eppt_bipartite, eppt_infid_bipartite, eppt_swap
from bqt.states import (
    ResourceState,
    gadc_fidelity,
    isotropic_state,
    isotropic_twirl,
    max_entangled,
    random_state,
    sym_antisym_projectors,
    werner_state,
    werner_twirl,
)

SEED = 20240611
GRID5 = np.linspace(0, 1, 5)


def swap_value(rho, d=2):
    rep = eppt_swap(rho, d)
    assert rep.ok, rep.status
    return rep.value


def random_resources(count, seed):
    rng = np.random.default_rng(seed)
    return [random_state((2, 2), rng) for _ in range(count)]


def test_1_no_resource(acceptance):
    t0 = time.perf_counter()
    worst = 0.0
    for d in (2, 3):
        want = 1 - 1 / d**2
        vals = [
            an.no_resource_error(d),
            1 - solve_lp(an.build_no_resource_lp(d)).primal_value,
            swap_value(None, d),
        ]
        worst = max(worst, *(abs(v - want) for v in vals))
    dt = time.perf_counter() - t0
    ok = worst <= 1e-6 and dt < 5
    acceptance("1", "no-resource benchmark", ok, f"max |diff| {worst:.2e}, {dt:.2f} s")
    assert worst <= 1e-6
    assert dt < 5


def test_2_isotropic_grid(acceptance):
    t0 = time.perf_counter()
    worst = 0.0
    for F in (0, 0.25, 0.5, 0.75, 0.9, 1):
        for dA in (2, 3, 4):
            a = an.isotropic_error(F, dA, 2)
            lp = an.lp_error(an.build_isotropic_lp(F, dA, 2)).value
            sdp = swap_value(ResourceState.isotropic(F, dA))
            worst = max(worst, abs(a - lp), abs(a - sdp), abs(lp - sdp))
    ebit = swap_value(ResourceState.isotropic(1, 2))
    dt = time.perf_counter() - t0
    ok = worst <= 1e-5 and abs(ebit - 0.5) <= 1e-5 and dt < 60
    acceptance("2", "isotropic grid", ok, f"max |diff| {worst:.2e}, single ebit {ebit:.8f}, {dt:.1f} s")
    assert worst <= 1e-5
    assert abs(an.isotropic_error(1, 2, 2) - 0.5) <= 1e-5
    assert abs(ebit - 0.5) <= 1e-5
    assert dt < 60


def test_3_werner_grid(acceptance):
    worst = 0.0
    for p in (0, 0.25, 0.5, 0.75, 1):
        for dA in (2, 3):
            a = an.werner_error(p, dA, 2)
            lp = an.lp_error(an.build_werner_lp(p, dA, 2)).value
            sdp = swap_value(ResourceState.werner(p, dA))
            worst = max(worst, abs(a - lp), abs(a - sdp), abs(lp - sdp))
    jump = max(
        abs(an.werner_branch(an.Regime.SEPARABLE, 0.5, dA, 2)
            - an.werner_branch(an.Regime.ENTANGLED, 0.5, dA, 2))
        for dA in (2, 3)
    )
    ok = worst <= 1e-5 and jump <= 1e-12
    acceptance("3", "Werner grid", ok, f"max |diff| {worst:.2e}, jump at p=1/2 {jump:.1e}")
    assert worst <= 1e-5
    assert jump <= 1e-12


@pytest.fixture(scope="module")
def gadc_grid():
    t0 = time.perf_counter()
    vals = {(g, n): swap_value(ResourceState.gadc(g, n)) for g in GRID5 for n in GRID5}
    return vals, time.perf_counter() - t0


@pytest.mark.xfail(strict=True, reason="1 - max{F, 1/16} exceeds the no-resource error 3/4 "
                   "when F < 1/4; the SDP gives 1 - max{F, 1/4}")
def test_4_gadc_reference_form(acceptance, gadc_grid):
    vals, dt = gadc_grid
    diffs = {k: abs(v - (1 - max(gadc_fidelity(*k), 1 / 16))) for k, v in vals.items()}
    bad = sorted((float(g), float(n)) for (g, n), r in diffs.items() if r > 1e-4)
    worst = max(diffs.values())
    row0 = max(abs(vals[(0.0, n)]) for n in GRID5)
    ok = not bad and row0 <= 1e-6 and dt < 120
    acceptance("4", "GADC vs 1 - max{F, 1/16}", ok,
               f"{len(bad)} of 25 points off by up to {worst:.4f} at (gamma, N) in {bad}")
    assert not bad


def test_4_gadc_corrected(acceptance, gadc_grid):
    # With two ebits behind the GADC the twirled resource is isotropic with
    # dA = d^2 = 4, so the closed form is the isotropic one: 1 - max{F, 1/4}.
    # The SDP can never exceed the no-resource value 3/4, since the resource
    # may be discarded, so 1 - max{F, 1/16} cannot hold where F < 1/4.
    vals, dt = gadc_grid
    worst = max(abs(v - (1 - max(gadc_fidelity(*k), 1 / 4))) for k, v in vals.items())
    row0 = max(abs(vals[(0.0, n)]) for n in GRID5)
    # where F >= 1/4 the two forms coincide
    agree = max(abs(v - (1 - max(gadc_fidelity(*k), 1 / 16)))
                for k, v in vals.items() if gadc_fidelity(*k) >= 1 / 4)
    ceiling = max(vals.values())
    ok = worst <= 1e-4 and row0 <= 1e-6 and agree <= 1e-4 and dt < 120 and ceiling <= 0.75 + 1e-6
    acceptance("4a", "GADC vs 1 - max{F, 1/4}", ok,
               f"max |diff| {worst:.2e}, gamma=0 row {row0:.1e}, max value {ceiling:.6f}, {dt:.1f} s")
    assert worst <= 1e-4
    assert row0 <= 1e-6
    assert agree <= 1e-4
    assert ceiling <= 0.75 + 1e-6
    assert dt < 120


def test_5_kpf16(acceptance):
    fid_worst = 0.0
    errs = {}
    bound_ok = True
    for p1 in GRID5:
        for p2 in GRID5:
            q = Kpf16Params(p1, p2)
            f = kpf16_fidelity_formula(q)
            fid_worst = max(fid_worst, abs(kpf16_overlap(q) - f))
            errs[(p1, p2)] = kpf16_error(q)
            bound_ok &= errs[(p1, p2)] >= 1 - f - 1e-4
    lo = min(errs.values())
    corners = (errs[(1.0, 0.0)], errs[(0.0, 1.0)])
    second = [kpf16_second_error(p) for p in (0, 0.5, 1)]
    sec_worst = max(max(abs(r.infidelity - 0.75), abs(r.diamond - 0.75)) for r in second)
    ok = (fid_worst <= 1e-12 and abs(lo - 0.75) <= 1e-4 and bound_ok
          and all(abs(c - 0.75) <= 1e-4 for c in corners) and sec_worst <= 1e-5)
    acceptance("5", "KPF16 protocols", ok,
               f"fidelity {fid_worst:.1e}, min error {lo:.6f}, second protocol {sec_worst:.1e}")
    assert fid_worst <= 1e-12
    assert abs(lo - 0.75) <= 1e-4
    assert all(abs(c - 0.75) <= 1e-4 for c in corners)
    assert bound_ok
    assert sec_worst <= 1e-5


def test_6_error_measure_equality(acceptance):
    s = swap_channel_choi(2)
    worst = 0.0
    for rho in random_resources(10, SEED):
        b = eppt_infid_bipartite(s, rho)
        assert b.ok, b.status
        worst = max(worst, abs(b.value - swap_value(rho)))
    acceptance("6", "diamond and infidelity errors agree", worst <= 1e-5, f"max |diff| {worst:.2e}")
    assert worst <= 1e-5


def test_7_sdp_family(acceptance):
    s = swap_channel_choi(2)
    worst, gap = 0.0, 0.0
    for i, rho in enumerate(random_resources(10, SEED + 1)):
        gen = eppt_bipartite(s, rho, use_dual=i < 5)
        assert gen.ok, gen.status
        worst = max(worst, abs(gen.value - swap_value(rho)))
        if i < 5:
            gap = max(gap, gen.gap)
    ok = worst <= 1e-4 and gap <= 1e-6
    acceptance("7", "general and simplified SDPs agree", ok,
               f"max |diff| {worst:.2e}, primal-dual gap {gap:.2e}")
    assert worst <= 1e-4
    assert gap <= 1e-6


def test_8_lp_feasible_points(acceptance):
    rng = np.random.default_rng(SEED + 2)
    tol = 1e-9
    failures = []
    counts = {}

    def certify(regime, lp, x, y, want):
        counts[regime] = counts.get(regime, 0) + 1
        if not check_feasible(lp, x, tol):
            failures.append(f"{regime}: primal")
        if y is not None:
            if not check_feasible(lp.dual(), y, tol):
                failures.append(f"{regime}: dual")
            if abs(1 - lp.dual().value(y) - want) > 1e-9:
                failures.append(f"{regime}: dual value")
        if abs(1 - lp.value(x) - want) > 1e-9:
            failures.append(f"{regime}: primal value")

    for d in range(2, 12):
        x, y = an.no_resource_points(d)
        certify("no resource", an.build_no_resource_lp(d), x, y, 1 - 1 / d**2)
    for _ in range(10):
        d = int(rng.integers(2, 5))
        dA = int(rng.integers(2, d * d + 1))
        F = float(rng.uniform(1 / dA, 1))
        x, y = an.isotropic_points(F, dA, d, float(rng.uniform()))
        certify("isotropic dA <= d^2", an.build_isotropic_lp(F, dA, d), x, y,
                an.isotropic_error(F, dA, d))
    for _ in range(10):
        d = int(rng.integers(2, 5))
        dA = int(rng.integers(d * d + 1, 4 * d * d))
        F = float(rng.uniform(1 / dA, 1))
        x, y = an.isotropic_points(F, dA, d, float(rng.uniform()))
        certify("isotropic dA > d^2", an.build_isotropic_lp(F, dA, d), x, y,
                an.isotropic_error(F, dA, d))
    for _ in range(10):
        d = int(rng.integers(2, 5))
        dA = int(rng.integers(2, 20))
        p = float(rng.uniform(0.5, 1))
        x, y = an.werner_points(p, dA, d, float(rng.uniform()))
        certify("Werner p > 1/2", an.build_werner_lp(p, dA, d), x, y, an.werner_error(p, dA, d))
    # In the separable regimes only the primal optimum is exhibited.
    for _ in range(10):
        d = int(rng.integers(2, 5))
        dA = int(rng.integers(2, 20))
        F = float(rng.uniform(0, 1 / dA))
        p = float(rng.uniform(0, 0.5))
        certify("isotropic F <= 1/dA", an.build_isotropic_lp(F, dA, d), an.product_point(d), None,
                an.isotropic_error(F, dA, d))
        certify("Werner p <= 1/2", an.build_werner_lp(p, dA, d), an.product_point(d), None,
                an.werner_error(p, dA, d))
    summary = ", ".join(f"{k} x{v}" for k, v in counts.items())
    acceptance("8", "LP feasible points", not failures, failures[0] if failures else summary)
    assert not failures


def test_9_bcqt(acceptance):
    worst = 0.0
    for rho in random_resources(5, SEED + 3):
        r3 = LabeledOperator(rho.data, (2, 2, 1))
        rep = eppt_bcqt(r3, 2)
        assert rep.ok, rep.status
        worst = max(worst, abs(rep.value - swap_value(rho)))
    none = eppt_bcqt(LabeledOperator(np.ones((1, 1)), (1, 1, 1)), 2).value
    phi_pi = eppt_bcqt(kron(max_entangled(2), LabeledOperator(np.eye(2) / 2, (2,))), 2).value
    ok = worst <= 1e-5 and abs(none - 0.75) <= 1e-5 and abs(phi_pi - 0.5) <= 1e-5
    acceptance("9", "controlled teleportation", ok,
               f"trivial Charlie {worst:.2e}, no resource {none:.8f}, ebit + mixed {phi_pi:.8f}")
    assert worst <= 1e-5
    assert abs(none - 0.75) <= 1e-5
    assert abs(phi_pi - 0.5) <= 1e-5


def test_10_infrastructure(acceptance):
    tele = max(np.max(np.abs(teleportation_choi(d).data - identity_choi(d).data)) for d in (2, 3))
    rng = np.random.default_rng(SEED + 4)
    twirl = 0.0
    exact = True
    for i in range(50):
        d = 2 + i % 2
        rho = random_state((d, d), rng)
        iso, wer = isotropic_twirl(rho), werner_twirl(rho)
        F = np.trace(max_entangled(d).data @ rho.data).real
        p = np.trace(sym_antisym_projectors(d)[1].data @ rho.data).real
        twirl = max(
            twirl,
            np.max(np.abs(isotropic_twirl(iso).data - iso.data)),
            np.max(np.abs(werner_twirl(wer).data - wer.data)),
            np.max(np.abs(iso.data - isotropic_state(F, d).data)),
            np.max(np.abs(wer.data - werner_state(p, d).data)),
        )
        n = d * d
        x = LabeledOperator(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)), (d, d))
        exact &= np.array_equal(partial_transpose(partial_transpose(x, [1]), [1]).data, x.data)
    ok = tele <= 1e-10 and twirl <= 1e-10 and exact
    acceptance("10", "infrastructure", ok,
               f"teleportation {tele:.1e}, twirls {twirl:.1e}, transpose involution exact={exact}")
    assert tele <= 1e-10
    assert twirl <= 1e-10
    assert exact
