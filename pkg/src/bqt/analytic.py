"""Closed-form simulation errors for the swap channel and their LP certificates.

The LPs for isotropic and Werner resources come from twirling the four
operators K, L, M, N of the simplified swap SDP. Each operator is then fixed
by two coefficients, and every partial-transposed constraint splits along two
orthogonal projectors. Rows are generated from those eigenvalue maps instead of
being typed in, so hand-written matrices serve as independent test oracles.

LP convention throughout: maximize c^T x subject to A x <= b, x >= 0; the
simulation error is 1 minus the optimum.
"""

import enum
from dataclasses import dataclass

import numpy as np

from .sdp import LpProblem, SolverError, solve_lp
from .simerr import ErrorReport
from .states import ResourceState, _check_dim, _check_unit, gadc_fidelity


class Regime(enum.Enum):
    SEPARABLE = "separable"  # F <= 1/dA or p <= 1/2: no better than no resource
    TELEPORT = "teleport"  # isotropic, F > 1/dA and dA <= d^2: twirl then teleport is optimal
    LARGE_RESOURCE = "large-resource"  # isotropic, F > 1/dA and dA > d^2: PPT value only
    ENTANGLED = "entangled"  # Werner, p > 1/2


@dataclass(frozen=True)
class PiecewiseParams:
    family: str  # isotropic | werner
    value: float  # F or p
    dA: int
    d: int
    regime: Regime

    @classmethod
    def isotropic(cls, F, dA, d):
        F = _check_unit("F", F)
        dA = _check_dim("dA", dA, 2)
        d = _check_dim("d", d, 2)
        if F <= 1 / dA:
            regime = Regime.SEPARABLE
        elif dA <= d * d:
            regime = Regime.TELEPORT
        else:
            regime = Regime.LARGE_RESOURCE
        return cls("isotropic", F, dA, d, regime)

    @classmethod
    def werner(cls, p, dA, d):
        p = _check_unit("p", p)
        dA = _check_dim("dA", dA, 2)
        d = _check_dim("d", d, 2)
        regime = Regime.SEPARABLE if p <= 0.5 else Regime.ENTANGLED
        return cls("werner", p, dA, d, regime)


# ---------------------------------------------------------------------------
# closed forms


def no_resource_error(d):
    d = _check_dim("d", d, 2)
    return 1 - 1 / d**2


def isotropic_branch(regime, F, dA, d):
    """Evaluate one branch of the isotropic formula regardless of thresholds."""
    if regime is Regime.SEPARABLE:
        return 1 - 1 / d**2
    if regime is Regime.TELEPORT:
        return 1 - F * dA / d**2
    if regime is Regime.LARGE_RESOURCE:
        return (1 - 1 / d**2) * (1 - F) / (1 - 1 / dA)
    raise ValueError(f"{regime} is not an isotropic regime")


def werner_branch(regime, p, dA, d):
    if regime is Regime.SEPARABLE:
        return 1 - 1 / d**2
    if regime is Regime.ENTANGLED:
        return 1 - (4 * p - 2 + dA) / (d**2 * dA)
    raise ValueError(f"{regime} is not a Werner regime")


def isotropic_error(F, dA, d):
    q = PiecewiseParams.isotropic(F, dA, d)
    return isotropic_branch(q.regime, q.value, q.dA, q.d)


def werner_error(p, dA, d):
    q = PiecewiseParams.werner(p, dA, d)
    return werner_branch(q.regime, q.value, q.dA, q.d)


def gadc_error(gamma, N):
    """Twirl-then-teleport error with the two-ebit GADC resource, d = 2.

    The twirled resource is isotropic with F = F(gamma, N) and dA = d^2 = 4,
    so the isotropic formula gives 1 - max{F, 1/4}. This matches the swap SDP
    on the whole (gamma, N) square.
    """
    return isotropic_error(gadc_fidelity(gamma, N), 4, 2)


def gadc_loose_bound(gamma, N):
    """1 - max{F, 1/16}: a valid upper bound that exceeds the no-resource
    value 3/4 whenever F < 1/4, so it is tight only for F >= 1/4."""
    return 1 - max(gadc_fidelity(gamma, N), 1 / 16)


# ---------------------------------------------------------------------------
# linear programs

# Weights of (K, L, M, N) in the four partial-transpose conditions, each
# written as sum_j w_j T(X_j) >= 0.
def _swap_weights(d):
    return np.array(
        [
            [1, 1 / (d + 1), 1 / (d + 1), 1 / (d + 1) ** 2],
            [-1, 1 / (d - 1), -1 / (d + 1), 1 / (d**2 - 1)],
            [-1, -1 / (d + 1), 1 / (d - 1), 1 / (d**2 - 1)],
            [1, -1 / (d - 1), -1 / (d - 1), 1 / (d - 1) ** 2],
        ]
    )


def build_no_resource_lp(d, keep_redundant=False):
    """Four scalars p1..p4 (K, L, M, N) with p1 + p2 + p3 + p4 = 1.

    The first condition has nonnegative weights and is implied by p >= 0; it
    is omitted unless keep_redundant is set.
    """
    d = _check_dim("d", d, 2)
    w = _swap_weights(d)
    rows = [] if not keep_redundant else [-w[0]]
    rows += [-w[1], -w[2], -w[3], np.ones(4), -np.ones(4)]
    b = [0.0] * (len(rows) - 2) + [1.0, -1.0]
    return LpProblem(c=[1, 0, 0, 0], A=np.array(rows), b=b)


def _twirled_lp(c, eig, keep_first, d):
    """LP over x = [k1, l1, m1, n1, k2, l2, m2, n2].

    `eig` is a 2x2 matrix mapping an operator's coefficients (x1, x2) to the
    (rescaled) weights of its partial transpose on two orthogonal projectors.
    `keep_first` names the projector component of the first condition that is
    not implied by x >= 0.
    """
    w = _swap_weights(d)
    eq = np.zeros((4, 8))
    eq[0, :4], eq[1, :4] = 1, -1
    eq[2, 4:], eq[3, 4:] = 1, -1
    rows = list(eq)
    for i in range(4):
        for comp in (0, 1):
            if i == 0 and comp != keep_first:
                continue
            # -sum_j w_ij (eig[comp, 0] x_j1 + eig[comp, 1] x_j2) <= 0
            rows.append(-np.concatenate([w[i] * eig[comp, 0], w[i] * eig[comp, 1]]))
    b = [1, -1, 1, -1] + [0] * 7
    return LpProblem(c=c, A=np.array(rows), b=b)


def build_isotropic_lp(F, dA, d):
    """K = k1 Phi + k2 (I - Phi); T_B(K) has weights k1 + (dA-1) k2 on the
    symmetric projector and (dA+1) k2 - k1 on the antisymmetric one (times 1/dA)."""
    q = PiecewiseParams.isotropic(F, dA, d)
    D = q.dA
    eig = np.array([[1.0, D - 1.0], [-1.0, D + 1.0]])
    return _twirled_lp([q.value, 0, 0, 0, 1 - q.value, 0, 0, 0], eig, 1, q.d)


def build_werner_lp(p, dA, d):
    """K = k1 Pi_sym + k2 Pi_anti; T_B(K) has weights (dA+1) k1 - (dA-1) k2 on Phi
    and k1 + k2 on I - Phi (times 1/2)."""
    q = PiecewiseParams.werner(p, dA, d)
    D = q.dA
    eig = np.array([[D + 1.0, -(D - 1.0)], [1.0, 1.0]])
    return _twirled_lp([1 - q.value, 0, 0, 0, q.value, 0, 0, 0], eig, 0, q.d)


def lp_error(lp, resource=None, target="swap"):
    """Solve a max-form LP and report 1 - optimum with the dual gap."""
    sol = solve_lp(lp)
    if sol.status not in ("optimal", "inaccurate"):
        raise SolverError(f"LP solver status {sol.status}")
    return ErrorReport(
        value=1 - sol.primal_value,
        method="lp",
        gap=abs(sol.primal_value - sol.dual_value),
        status=sol.status,
        primal_value=1 - sol.primal_value,
        dual_value=1 - sol.dual_value,
        certificate={"x": sol.blocks["x"], "y": sol.blocks["y"]},
        resource=(resource or ResourceState.none()).describe(),
        target=target,
        backend=sol.backend,
    )


# ---------------------------------------------------------------------------
# explicit primal and dual points
#
# Interval-valued coordinates are selected by t in [0, 1] (0 = lower end).


def _lerp(lo, hi, t):
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t must lie in [0, 1], got {t}")
    return lo + t * (hi - lo)


def no_resource_points(d):
    d = _check_dim("d", d, 2)
    x = np.array([1 / d**2, 0, 0, 1 - 1 / d**2])
    y = np.array([(1 - 1 / d**2) / 2, (1 - 1 / d**2) / 2, 0, 1 / d**2, 0])
    return x, y


def isotropic_points(F, dA, d, t=0.5):
    """(primal, dual) points for the isotropic LP when F > 1/dA."""
    q = PiecewiseParams.isotropic(F, dA, d)
    F, D, d = q.value, q.dA, q.d
    dd = d * d
    if q.regime is Regime.TELEPORT:
        k1 = D / dd
        n1 = 1 - k1
        l2 = D / (dd * (D + 1))
        x = np.array([k1, 0, 0, n1, 0, l2, l2, 1 - 2 * l2])
        y1 = _lerp(1 / (D * dd), F / dd, t)
        y6 = (dd - 1) * (F + dd * y1) / (4 * dd)
        y = np.zeros(11)
        y[0] = y1
        y[2] = F * D / dd - y1
        y[4] = (d + 1) ** 2 * (F - dd * y1) / (4 * dd)
        y[5] = y[7] = y6
        y[10] = (d - 1) ** 2 * (F - dd * y1) / (4 * dd)
        return x, y
    if q.regime is Regime.LARGE_RESOURCE:
        k2 = (D - dd) / (dd * (D - 1))
        hi = (d - 1) * D * (D + 1 - dd + d) / (dd * (D * D - 1))
        if D + 1 < d + dd:
            lo = (1 + d) * (dd + d - (D + 1)) * D / (dd * (D * D - 1))
        else:
            lo = 0.0
        l2 = _lerp(lo, hi, t)
        x = np.array([1, 0, 0, 0, k2, l2, l2, 1 - k2 - 2 * l2])
        y1 = (1 - F + dd * (D * F - 1)) / (dd * (D - 1))
        y = np.zeros(11)
        y[0] = y1
        y[2] = (D - 1) * (F - y1) / (dd - 1)
        y[5] = y[7] = (F - y1) / 2
        return x, y
    raise ValueError("explicit LP points are given only for F > 1/dA")


def werner_points(p, dA, d, t=0.5):
    """(primal, dual) points for the Werner LP when p > 1/2."""
    q = PiecewiseParams.werner(p, dA, d)
    if q.regime is not Regime.ENTANGLED:
        raise ValueError("explicit LP points are given only for p > 1/2")
    p, D, d = q.value, q.dA, q.d
    dd = d * d
    k1 = (D - 2) / (dd * D)
    l1 = _lerp(2 / (dd * (D + 1)), (2 + d * (D - 1) - D) / (dd * D), t)
    k2 = (D + 2) / (dd * D)
    l2 = (dd * (D + 1) * l1 - 2) / (dd * (D - 1))
    x = np.array([k1, l1, l1, 1 - k1 - 2 * l1, k2, l2, l2, 1 - k2 - 2 * l2])
    y = np.zeros(11)
    y[0] = ((D + 2) * p - 1) / (dd * D)
    y[2] = (D * (1 - p) + 2 * p - 1) / (dd * D)
    y[4] = (d + 1) ** 2 * (2 * p - 1) / (4 * dd * D)
    y[6] = y[8] = (dd - 1) * (2 * p - 1 + D) / (4 * dd * D)
    y[9] = (d - 1) ** 2 * (2 * p - 1) / (4 * dd * D)
    return x, y


def product_point(d, twirled=True):
    """K = I/d^2, N = (1 - 1/d^2) I: the no-resource optimum lifted to any resource."""
    d = _check_dim("d", d, 2)
    k, n = 1 / d**2, 1 - 1 / d**2
    if not twirled:
        return np.array([k, 0, 0, n])
    return np.array([k, 0, 0, n, k, 0, 0, n])
