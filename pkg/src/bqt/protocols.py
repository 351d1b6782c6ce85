"""Concrete single-ebit bidirectional teleportation protocols.

The two KPF16 protocols are treated as the four-term (resp. two-term) channel
mixtures they reduce to once the trigger qubits are discarded. The target is
the qubit swap Q_A -> C_B, Q_B -> C_A.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .analytic import isotropic_error
from .channels import ChoiOperator, swap_channel_choi
from .qmat import LabeledOperator, identity, kron, permute, trace_norm
from .simerr import channel_fidelity, diamond_distance
from .states import _check_dim, _check_unit, isotropic_twirl, max_entangled

# Natural order of the KPF16 Choi factors and the position of each in the
# [inputs, outputs] layout used by ChoiOperator.
KPF16_ORDER = ("Q_A", "C_A", "C_B", "Q_B")
_TO_CHOI_LAYOUT = (0, 3, 1, 2)  # -> Q_A, Q_B | C_A, C_B


@dataclass(frozen=True)
class Kpf16Params:
    """Trigger probabilities p_i = sin^2(theta_i / 2)."""

    p1: float
    p2: float

    def __post_init__(self):
        object.__setattr__(self, "p1", _check_unit("p1", self.p1))
        object.__setattr__(self, "p2", _check_unit("p2", self.p2))

    @classmethod
    def from_angles(cls, theta1, theta2):
        return cls(math.sin(theta1 / 2) ** 2, math.sin(theta2 / 2) ** 2)


def _params(p):
    if isinstance(p, Kpf16Params):
        return p
    return Kpf16Params(*p)


def _terms():
    """The four Choi terms in the order (Q_A, C_A, C_B, Q_B)."""
    one = identity((2,))
    pi = one / 2
    phi = max_entangled(2)
    gam = max_entangled(2, normalized=False)
    t00 = kron(one, phi, one)
    t01 = permute(kron(one, gam, pi), (0, 1, 3, 2))  # built as Q_A C_A Q_B C_B
    t10 = permute(kron(gam, pi, one), (0, 2, 1, 3))  # built as Q_A C_B C_A Q_B
    t11 = kron(one, pi, pi, one)
    return t00, t01, t10, t11


def _weights(p):
    return ((1 - p.p1) * (1 - p.p2), (1 - p.p1) * p.p2, p.p1 * (1 - p.p2), p.p1 * p.p2)


def kpf16_choi_ordered(p):
    """Unnormalized Choi operator on (Q_A, C_A, C_B, Q_B)."""
    p = _params(p)
    out = None
    for w, t in zip(_weights(p), _terms()):
        out = t * w if out is None else out + t * w
    return out


def _to_choi(op):
    return ChoiOperator(permute(op, _TO_CHOI_LAYOUT), (2, 2), (2, 2))


def kpf16_choi(p):
    """ChoiOperator with inputs (Q_A, Q_B) and outputs (C_A, C_B)."""
    return _to_choi(kpf16_choi_ordered(p))


def kpf16_target():
    """Swap with Q_A -> C_B and Q_B -> C_A in the same layout as kpf16_choi."""
    return swap_channel_choi(2)


def ideal_output(order=KPF16_ORDER):
    """Phi_{Q_A C_B} (x) Phi_{C_A Q_B} on (Q_A, C_A, C_B, Q_B)."""
    phi = max_entangled(2)
    return permute(kron(phi, phi), (0, 2, 1, 3))  # built as Q_A C_B C_A Q_B


def kpf16_fidelity_formula(p):
    p = _params(p)
    return (1 + 3 * (p.p1 + p.p2) - 6 * p.p1 * p.p2) / 16


def kpf16_overlap(p):
    """Tr[(Phi (x) Phi) K / 4] evaluated numerically."""
    k = kpf16_choi_ordered(p)
    return float(np.real(np.trace(ideal_output().data @ k.data))) / 4


def kpf16_fidelity(p, tol=1e-12):
    """Fidelity of the maximally entangled test input, cross-checked numerically."""
    f = kpf16_fidelity_formula(p)
    g = kpf16_overlap(p)
    if abs(f - g) > tol:
        raise ArithmeticError(f"formula {f!r} and numeric overlap {g!r} disagree")
    return f


def kpf16_error(p, opts=None, report=False):
    """Half the diamond distance between the first protocol and the swap."""
    return diamond_distance(kpf16_choi(p), kpf16_target(), opts=opts, report=report)


def kpf16_second_choi(p):
    """p (replace Q_A, keep Q_B) + (1 - p) (keep Q_A, replace Q_B)."""
    p = _check_unit("p", p)
    _, t01, t10, _ = _terms()
    return _to_choi(t01 * p + t10 * (1 - p))


class SecondProtocolErrors(NamedTuple):
    fidelity: float
    diamond: float

    @property
    def infidelity(self):
        return 1 - self.fidelity


def kpf16_second_error(p, opts=None):
    """Worst-case channel fidelity and diamond error of the second protocol."""
    n = kpf16_second_choi(p)
    s = kpf16_target()
    fid = channel_fidelity(n, s, opts=opts)
    dia = diamond_distance(n, s, opts=opts)
    return SecondProtocolErrors(float(fid), float(dia))


def _embed_phi(d):
    """Phi_d on the first d levels of each d^2-dimensional party."""
    D = d * d
    v = np.zeros(D * D)
    for i in range(d):
        v[i * D + i] = 1.0
    v /= math.sqrt(d)
    return LabeledOperator(np.outer(v, v), (D, D))


def single_ebit_scheme_error(d):
    """Error of twirling one e-dit into an isotropic state on d^2 x d^2, then
    teleporting both ways: the trace distance of that state to Phi_{d^2}."""
    d = _check_dim("d", d, 2)
    if d > 3:
        raise ValueError(f"d = {d} needs a {d ** 4}-dimensional state; only d <= 3 is supported")
    omega = isotropic_twirl(_embed_phi(d))
    target = max_entangled(d * d)
    err = trace_norm(target - omega) / 2
    expect = isotropic_error(1.0, d, d)
    if abs(err - expect) > 1e-10 or abs(err - (1 - 1 / d)) > 1e-10:
        raise ArithmeticError(f"single e-dit scheme gives {err!r}, expected {expect!r}")
    return err
