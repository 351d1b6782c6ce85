"""States, fixed operators and twirls."""

import json
import math
from dataclasses import dataclass

import numpy as np

from .qmat import (
    DimensionError,
    LabeledOperator,
    NotPSDError,
    PSD_TOL,
    identity,
    kron,
    partial_trace,
    permute,
)


def _check_unit(name, value):
    value = float(value)
    if math.isnan(value) or not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value}")
    return value


def _check_dim(name, d, least=1):
    if isinstance(d, bool) or int(d) != d or d < least:
        raise ValueError(f"{name} must be an integer >= {least}, got {d}")
    return int(d)


def max_entangled(d, normalized=True):
    """Phi (normalized) or Gamma = |Gamma><Gamma| with |Gamma> = sum_i |ii>."""
    d = _check_dim("d", d)
    v = np.eye(d).ravel()
    out = np.outer(v, v)
    if normalized:
        out = out / d
    return LabeledOperator(out, (d, d))


def swap_operator(d):
    d = _check_dim("d", d)
    out = np.zeros((d * d, d * d))
    for i in range(d):
        for j in range(d):
            out[j * d + i, i * d + j] = 1.0
    return LabeledOperator(out, (d, d))


def sym_antisym_projectors(d):
    f = swap_operator(d)
    one = identity((d, d))
    return (one + f) / 2, (one - f) / 2


def weyl_operator(z, x, d):
    """W^{z,x} = Z(z) X(x) with Z(z)|k> = e^{2 pi i k z/d}|k>, X(x)|k> = |k+x mod d>."""
    d = _check_dim("d", d)
    for name, v in (("z", z), ("x", x)):
        if int(v) != v or not 0 <= v < d:
            raise ValueError(f"{name} must be in [0, {d}), got {v}")
    k = np.arange(d)
    zmat = np.diag(np.exp(2j * np.pi * k * z / d))
    xmat = np.zeros((d, d))
    xmat[(k + x) % d, k] = 1.0
    return LabeledOperator(zmat @ xmat, (d,))


def _bipartite_dim(x):
    if x.nsys != 2 or x.dims[0] != x.dims[1]:
        raise DimensionError(f"expected an operator on [d, d], got dims {list(x.dims)}")
    return x.dims[0]


def isotropic_twirl(x):
    d = _bipartite_dim(x)
    phi = max_entangled(d)
    rest = identity((d, d)) - phi
    f = np.trace(phi.data @ x.data)
    g = np.trace(rest.data @ x.data)
    return phi * f + rest * (g / (d * d - 1))


def werner_twirl(x):
    d = _bipartite_dim(x)
    ps, pa = sym_antisym_projectors(d)
    s = np.trace(ps.data @ x.data)
    out = ps * (2 * s / (d * (d + 1)))
    if d > 1:
        a = np.trace(pa.data @ x.data)
        out = out + pa * (2 * a / (d * (d - 1)))
    return out


def isotropic_state(F, dA):
    F = _check_unit("F", F)
    dA = _check_dim("dA", dA, 2)
    phi = max_entangled(dA)
    return phi * F + (identity((dA, dA)) - phi) * ((1 - F) / (dA * dA - 1))


def werner_state(p, dA):
    p = _check_unit("p", p)
    dA = _check_dim("dA", dA, 2)
    ps, pa = sym_antisym_projectors(dA)
    return ps * (2 * (1 - p) / (dA * (dA + 1))) + pa * (2 * p / (dA * (dA - 1)))


def gadc_kraus(gamma, N):
    gamma = _check_unit("gamma", gamma)
    N = _check_unit("N", N)
    a1 = math.sqrt(1 - N) * np.array([[1, 0], [0, math.sqrt(1 - gamma)]])
    a2 = math.sqrt(gamma * (1 - N)) * np.array([[0, 1], [0, 0]])
    a3 = math.sqrt(N) * np.array([[math.sqrt(1 - gamma), 0], [0, 1]])
    a4 = math.sqrt(gamma * N) * np.array([[0, 0], [1, 0]])
    return [a1, a2, a3, a4]


def gadc_apply(gamma, N, rho):
    if rho.dim != 2:
        raise DimensionError(f"GADC acts on a qubit, got dims {list(rho.dims)}")
    out = sum(a @ rho.data @ a.conj().T for a in gadc_kraus(gamma, N))
    return LabeledOperator(out, rho.dims)


def gadc_fidelity(gamma, N):
    """Overlap of the GADC resource with two ebits, closed form."""
    gamma = _check_unit("gamma", gamma)
    N = _check_unit("N", N)
    return (1 + (gamma / 2) * (gamma - 2 * (1 + gamma * N * (1 - N)))) ** 2


def gadc_state(gamma, N):
    """GADC applied to all four qubits of two ebits, regrouped as [4, 4].

    Qubit order A1 B1 A2 B2 is permuted to A1 A2 | B1 B2 so that Alice
    holds the first factor of dimension 4.
    """
    kr = gadc_kraus(gamma, N)
    phi = max_entangled(2).data
    # A^{(x)2} on one ebit, then tensor the two copies.
    one = sum(np.kron(a, b) @ phi @ np.kron(a, b).conj().T for a in kr for b in kr)
    pair = kron(LabeledOperator(one, (2, 2)), LabeledOperator(one, (2, 2)))
    grouped = permute(pair, (0, 2, 1, 3))
    return LabeledOperator(grouped.data, (4, 4))


@dataclass(frozen=True)
class ResourceState:
    """Tagged resource: kind in {none, isotropic, werner, gadc, custom}."""

    kind: str
    params: tuple = ()
    custom: LabeledOperator = None

    @staticmethod
    def none():
        return ResourceState("none")

    @staticmethod
    def isotropic(F, dA):
        F = _check_unit("F", F)
        dA = _check_dim("dA", dA, 2)
        return ResourceState("isotropic", (F, dA))

    @staticmethod
    def werner(p, dA):
        p = _check_unit("p", p)
        dA = _check_dim("dA", dA, 2)
        return ResourceState("werner", (p, dA))

    @staticmethod
    def gadc(gamma, N):
        return ResourceState("gadc", (_check_unit("gamma", gamma), _check_unit("N", N)))

    @staticmethod
    def from_operator(op, tol=PSD_TOL):
        if op.nsys != 2:
            raise DimensionError(f"custom resources need dims [dA, dB], got {list(op.dims)}")
        validate_state(op, tol)
        return ResourceState("custom", (), op)

    def materialize(self):
        if self.kind == "none":
            return LabeledOperator(np.ones((1, 1)), (1, 1))
        if self.kind == "isotropic":
            return isotropic_state(*self.params)
        if self.kind == "werner":
            return werner_state(*self.params)
        if self.kind == "gadc":
            return gadc_state(*self.params)
        if self.kind == "custom":
            return self.custom
        raise ValueError(f"unknown resource kind {self.kind!r}")

    def describe(self):
        names = {"isotropic": ("F", "dA"), "werner": ("p", "dA"), "gadc": ("gamma", "N")}
        out = {"kind": self.kind}
        out.update(zip(names.get(self.kind, ()), self.params))
        if self.kind == "custom":
            out["dims"] = list(self.custom.dims)
        return out


def validate_state(op, tol=PSD_TOL):
    if not op.is_hermitian():
        raise NotPSDError("state is not Hermitian")
    lo = op.eigvalsh()[0]
    if lo < -tol:
        raise NotPSDError(f"state has eigenvalue {lo:.3g} below -{tol:g}")
    if abs(op.trace() - 1) > 1e-8:
        raise NotPSDError(f"state has trace {op.trace().real:.12g}, expected 1")
    return op


def operator_to_json(op):
    return {"dims": list(op.dims), "re": op.data.real.tolist(), "im": op.data.imag.tolist()}


def operator_from_json(doc):
    try:
        dims = [int(d) for d in doc["dims"]]
        re = np.asarray(doc["re"], dtype=float)
        im = np.asarray(doc.get("im", np.zeros_like(re)), dtype=float)
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed operator document: {exc}") from None
    if re.shape != im.shape:
        raise DimensionError("re and im parts differ in shape")
    return LabeledOperator(re + 1j * im, dims)


def load_resource(path):
    with open(path) as fh:
        op = operator_from_json(json.load(fh))
    return ResourceState.from_operator(op)


def marginal(op, keep):
    over = [k for k in range(op.nsys) if k not in keep]
    return partial_trace(op, over)


def random_state(dims, rng=None, rank=None, real=False):
    """Density operator from a Ginibre matrix, full rank unless `rank` is given."""
    rng = np.random.default_rng(rng)
    dims = tuple(int(d) for d in dims)
    n = int(np.prod(dims))
    k = n if rank is None else int(rank)
    g = rng.normal(size=(n, k))
    if not real:
        g = g + 1j * rng.normal(size=(n, k))
    rho = g @ g.conj().T
    return LabeledOperator(rho / np.trace(rho).real, dims)
