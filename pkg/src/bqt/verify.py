"""Acceptance checks shared by `bqt verify`.

Each check returns a CheckResult with the worst residual it saw. A global
tolerance override replaces every per-check tolerance, which is how the
negative path (an impossibly tight tolerance) is exercised.
"""

import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import analytic as an
from .channels import identity_choi, swap_channel_choi, teleportation_choi
from .protocols import (
    Kpf16Params,
    kpf16_error,
    kpf16_fidelity_formula,
    kpf16_overlap,
    kpf16_second_error,
)
from .qmat import LabeledOperator, kron, partial_transpose
from .sdp import check_feasible, solve_lp
from .simerr import (
    eppt_bcqt,
    eppt_bipartite,
    eppt_infid_bipartite,
    eppt_swap,
)
from .states import (
    ResourceState,
    isotropic_state,
    isotropic_twirl,
    max_entangled,
    random_state,
    sym_antisym_projectors,
    werner_state,
    werner_twirl,
)

SEED = 20240611


@dataclass
class CheckResult:
    name: str
    passed: bool
    residual: float
    tol: float
    runtime: float = 0.0
    time_limit: float = None
    failures: list = field(default_factory=list)
    notes: list = field(default_factory=list)


class _Check:
    """Collects residuals against one tolerance."""

    def __init__(self, name, tol, override):
        self.name = name
        self.tol = tol if override is None else override
        self.worst = 0.0
        self.failures = []
        self.notes = []

    def close(self, label, got, want, tol=None):
        tol = self.tol if tol is None else tol
        r = abs(float(got) - float(want))
        self.worst = max(self.worst, r)
        if not r <= tol:
            self.failures.append(f"{label}: got {got!r}, want {want!r} (|diff| {r:.3g} > {tol:g})")

    def true(self, label, cond):
        if not cond:
            self.failures.append(label)


def _swap_sdp(rho, d, opts):
    rep = eppt_swap(rho, d, opts=opts)
    if not rep.ok:
        raise RuntimeError(f"swap SDP status {rep.status}")
    return rep.value


def check_no_resource(c, opts):
    for d in (2, 3):
        want = 1 - 1 / d**2
        c.close(f"analytic d={d}", an.no_resource_error(d), want)
        c.close(f"lp d={d}", 1 - solve_lp(an.build_no_resource_lp(d)).primal_value, want)
        c.close(f"sdp d={d}", _swap_sdp(ResourceState.none(), d, opts), want)


def check_isotropic(c, opts):
    for F in (0, 0.25, 0.5, 0.75, 0.9, 1):
        for dA in (2, 3, 4):
            a = an.isotropic_error(F, dA, 2)
            c.close(f"lp F={F} dA={dA}", an.lp_error(an.build_isotropic_lp(F, dA, 2)).value, a)
            c.close(f"sdp F={F} dA={dA}", _swap_sdp(ResourceState.isotropic(F, dA), 2, opts), a)
    c.close("single ebit", an.isotropic_error(1, 2, 2), 0.5)


def check_werner(c, opts):
    for p in (0, 0.25, 0.5, 0.75, 1):
        for dA in (2, 3):
            a = an.werner_error(p, dA, 2)
            c.close(f"lp p={p} dA={dA}", an.lp_error(an.build_werner_lp(p, dA, 2)).value, a)
            c.close(f"sdp p={p} dA={dA}", _swap_sdp(ResourceState.werner(p, dA), 2, opts), a)
    for dA in (2, 3):
        lo = an.werner_branch(an.Regime.SEPARABLE, 0.5, dA, 2)
        hi = an.werner_branch(an.Regime.ENTANGLED, 0.5, dA, 2)
        c.close(f"continuity dA={dA}", lo, hi, tol=min(c.tol, 1e-12))


def check_gadc(c, opts):
    grid = np.linspace(0, 1, 5)
    for g in grid:
        for n in grid:
            v = _swap_sdp(ResourceState.gadc(g, n), 2, opts)
            c.close(f"sdp gamma={g} N={n}", v, an.gadc_error(g, n))
            loose = an.gadc_loose_bound(g, n)
            if abs(v - loose) > c.tol:
                c.notes.append(f"1 - max(F, 1/16) = {loose:.6g} at gamma={g} N={n}, SDP {v:.6g}")
            if g == 0:
                c.close(f"perfect resource N={n}", v, 0.0, tol=min(c.tol, 1e-6))


def check_kpf16(c, opts):
    grid = np.linspace(0, 1, 5)
    errs = {}
    for p1 in grid:
        for p2 in grid:
            q = Kpf16Params(p1, p2)
            f = kpf16_fidelity_formula(q)
            c.close(f"overlap ({p1},{p2})", kpf16_overlap(q), f, tol=min(c.tol, 1e-12))
            e = kpf16_error(q, opts=opts)
            errs[(p1, p2)] = e
            c.true(f"bound ({p1},{p2}): {e} < {1 - f}", e >= 1 - f - c.tol)
    c.close("min diamond", min(errs.values()), 0.75)
    c.close("corner (1,0)", errs[(1.0, 0.0)], 0.75)
    c.close("corner (0,1)", errs[(0.0, 1.0)], 0.75)
    for p in (0, 0.5, 1):
        r = kpf16_second_error(p, opts=opts)
        c.close(f"second infidelity p={p}", r.infidelity, 0.75, tol=min(c.tol, 1e-5))
        c.close(f"second diamond p={p}", r.diamond, 0.75, tol=min(c.tol, 1e-5))


def _random_resources(count, seed):
    rng = np.random.default_rng(seed)
    return [random_state((2, 2), rng) for _ in range(count)]


def check_measure_equality(c, opts):
    s = swap_channel_choi(2)
    for i, rho in enumerate(_random_resources(10, SEED)):
        a = _swap_sdp(rho, 2, opts)
        b = eppt_infid_bipartite(s, rho, opts=opts)
        c.true(f"infidelity status #{i}: {b.status}", b.ok)
        c.close(f"resource #{i}", b.value, a)


def check_sdp_family(c, opts):
    s = swap_channel_choi(2)
    rhos = _random_resources(10, SEED + 1)
    for i, rho in enumerate(rhos):
        gen = eppt_bipartite(s, rho, opts=opts, use_dual=i < 5)
        c.true(f"general status #{i}: {gen.status}", gen.ok)
        c.close(f"general vs simplified #{i}", gen.value, _swap_sdp(rho, 2, opts))
        if i < 5:
            c.close(f"primal vs explicit dual #{i}", gen.gap, 0.0, tol=min(c.tol, 1e-6))


def check_lp_points(c, opts):
    rng = np.random.default_rng(SEED + 2)
    tol = c.tol

    def feasible(label, lp, x, y, want):
        c.true(f"{label}: primal point infeasible", check_feasible(lp, x, tol))
        c.true(f"{label}: dual point infeasible", check_feasible(lp.dual(), y, tol))
        c.close(f"{label}: primal value", 1 - lp.value(x), want, tol=max(tol, 1e-12))
        c.close(f"{label}: dual value", 1 - lp.dual().value(y), want, tol=max(tol, 1e-12))

    for d in range(2, 12):
        x, y = an.no_resource_points(d)
        feasible(f"no resource d={d}", an.build_no_resource_lp(d), x, y, 1 - 1 / d**2)
    for _ in range(10):
        d = int(rng.integers(2, 5))
        dA = int(rng.integers(2, d * d + 1))
        F = float(rng.uniform(1 / dA, 1))
        t = float(rng.uniform())
        x, y = an.isotropic_points(F, dA, d, t)
        feasible(f"isotropic F={F:.4f} dA={dA} d={d}", an.build_isotropic_lp(F, dA, d), x, y,
                 an.isotropic_error(F, dA, d))
    for _ in range(10):
        d = int(rng.integers(2, 5))
        dA = int(rng.integers(d * d + 1, 4 * d * d))
        F = float(rng.uniform(1 / dA, 1))
        t = float(rng.uniform())
        x, y = an.isotropic_points(F, dA, d, t)
        feasible(f"isotropic F={F:.4f} dA={dA} d={d}", an.build_isotropic_lp(F, dA, d), x, y,
                 an.isotropic_error(F, dA, d))
    for _ in range(10):
        d = int(rng.integers(2, 5))
        dA = int(rng.integers(2, 20))
        p = float(rng.uniform(0.5, 1))
        t = float(rng.uniform())
        x, y = an.werner_points(p, dA, d, t)
        feasible(f"werner p={p:.4f} dA={dA} d={d}", an.build_werner_lp(p, dA, d), x, y,
                 an.werner_error(p, dA, d))


def check_bcqt(c, opts):
    for i, rho in enumerate(_random_resources(5, SEED + 3)):
        r3 = LabeledOperator(rho.data, (2, 2, 1))
        c.close(f"trivial Charlie #{i}", eppt_bcqt(r3, 2, opts=opts).value, _swap_sdp(rho, 2, opts))
    none3 = LabeledOperator(np.ones((1, 1)), (1, 1, 1))
    c.close("no resource", eppt_bcqt(none3, 2, opts=opts).value, 0.75)
    phi_pi = kron(max_entangled(2), LabeledOperator(np.eye(2) / 2, (2,)))
    c.close("ebit with uncorrelated Charlie", eppt_bcqt(phi_pi, 2, opts=opts).value, 0.5)


def check_infrastructure(c, opts):
    for d in (2, 3):
        diff = np.max(np.abs(teleportation_choi(d).data - identity_choi(d).data))
        c.close(f"teleportation d={d}", diff, 0.0)
    rng = np.random.default_rng(SEED + 4)
    for i in range(50):
        d = 2 + i % 2
        rho = random_state((d, d), rng)
        iso = isotropic_twirl(rho)
        wer = werner_twirl(rho)
        c.close(f"isotropic idempotence #{i}", np.max(np.abs(isotropic_twirl(iso).data - iso.data)), 0)
        c.close(f"werner idempotence #{i}", np.max(np.abs(werner_twirl(wer).data - wer.data)), 0)
        F = np.trace(max_entangled(d).data @ rho.data).real
        p = np.trace(sym_antisym_projectors(d)[1].data @ rho.data).real
        c.close(f"isotropic closure #{i}", np.max(np.abs(iso.data - isotropic_state(F, d).data)), 0)
        c.close(f"werner closure #{i}", np.max(np.abs(wer.data - werner_state(p, d).data)), 0)
        x = LabeledOperator(rng.normal(size=(d * d, d * d)) + 1j * rng.normal(size=(d * d, d * d)),
                            (d, d))
        back = partial_transpose(partial_transpose(x, [1]), [1])
        c.true(f"partial transpose involution #{i}", np.array_equal(back.data, x.data))


# name -> (function, tolerance, time limit in seconds or None)
CHECKS = {
    "no-resource": (check_no_resource, 1e-6, 5.0),
    "isotropic-grid": (check_isotropic, 1e-5, 60.0),
    "werner-grid": (check_werner, 1e-5, None),
    "gadc-grid": (check_gadc, 1e-4, 120.0),
    "kpf16": (check_kpf16, 1e-4, None),
    "error-measure-equality": (check_measure_equality, 1e-5, None),
    "sdp-family": (check_sdp_family, 1e-4, None),
    "lp-feasible-points": (check_lp_points, 1e-9, None),
    "bcqt": (check_bcqt, 1e-5, None),
    "infrastructure": (check_infrastructure, 1e-10, None),
}


def run_check(name, opts=None, tol=None):
    fn, default_tol, limit = CHECKS[name]
    c = _Check(name, default_tol, tol)
    t0 = time.perf_counter()
    try:
        fn(c, opts)
    except Exception as exc:  # reported, not raised: verify lists every failure
        c.failures.append(f"raised {type(exc).__name__}: {exc}")
    dt = time.perf_counter() - t0
    if limit is not None and dt > limit:
        c.failures.append(f"runtime {dt:.1f} s above the {limit:g} s budget")
    return CheckResult(name, not c.failures, c.worst, c.tol, dt, limit, c.failures, c.notes)


def run_checks(only=None, opts=None, tol=None):
    names = list(CHECKS) if not only else list(only)
    results = [run_check(n, opts, tol) for n in names]
    return {"passed": all(r.passed for r in results), "checks": [asdict(r) for r in results]}
