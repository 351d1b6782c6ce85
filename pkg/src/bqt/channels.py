"""Choi-operator calculus.

A ChoiOperator stores the unnormalized Choi operator
Gamma^N = (id (x) N)(Gamma) with factor layout [inputs..., outputs...].
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .qmat import (
    HERM_TOL,
    PSD_TOL,
    DimensionError,
    LabeledOperator,
    _prod,
    as_subsystems,
    identity,
    kron,
    partial_trace,
    partial_transpose,
    permute,
)
from .states import max_entangled, operator_from_json, operator_to_json, weyl_operator


@dataclass(frozen=True, eq=False)
class ChoiOperator:
    op: LabeledOperator
    input_dims: tuple
    output_dims: tuple

    def __post_init__(self):
        ins = tuple(int(d) for d in self.input_dims)
        outs = tuple(int(d) for d in self.output_dims)
        object.__setattr__(self, "input_dims", ins)
        object.__setattr__(self, "output_dims", outs)
        if self.op.dims != ins + outs:
            # Accept any factor structure with the right total size.
            if self.op.dim != _prod(ins) * _prod(outs):
                raise DimensionError(
                    f"Choi of size {self.op.dim} does not fit inputs {ins} and outputs {outs}"
                )
            object.__setattr__(self, "op", LabeledOperator(self.op.data, ins + outs))

    @property
    def n_in(self):
        return len(self.input_dims)

    @property
    def n_out(self):
        return len(self.output_dims)

    @property
    def din(self):
        return _prod(self.input_dims)

    @property
    def dout(self):
        return _prod(self.output_dims)

    @property
    def data(self):
        return self.op.data

    def input_positions(self):
        return tuple(range(self.n_in))

    def output_positions(self):
        return tuple(range(self.n_in, self.n_in + self.n_out))

    def allclose(self, other, atol=1e-10):
        return (
            self.input_dims == other.input_dims
            and self.output_dims == other.output_dims
            and np.allclose(self.data, other.data, rtol=0, atol=atol)
        )

    def __add__(self, other):
        _same_shape(self, other)
        return ChoiOperator(self.op + other.op, self.input_dims, self.output_dims)

    def __mul__(self, c):
        return ChoiOperator(self.op * c, self.input_dims, self.output_dims)

    __rmul__ = __mul__

    def __repr__(self):
        return f"ChoiOperator(in={list(self.input_dims)}, out={list(self.output_dims)})"


def _same_shape(a, b):
    if a.input_dims != b.input_dims or a.output_dims != b.output_dims:
        raise DimensionError(f"channel shapes differ: {a!r} vs {b!r}")


def apply(choi, state, on=None):
    """Apply the channel to the factors `on` of `state`.

    Uses N(X) = Tr_in[(X^T (x) I) Gamma^N]. The result lists the untouched
    factors first, in their original order, followed by the channel outputs.
    """
    if on is None:
        on = tuple(range(state.nsys - choi.n_in, state.nsys))
    on = tuple(int(k) for k in on)
    if len(on) != choi.n_in:
        raise DimensionError(f"channel has {choi.n_in} inputs, got positions {on}")
    as_subsystems(on, state.nsys)
    if tuple(state.dims[k] for k in on) != choi.input_dims:
        raise DimensionError(
            f"state factors {[state.dims[k] for k in on]} do not match inputs {list(choi.input_dims)}"
        )
    rest = tuple(k for k in range(state.nsys) if k not in on)
    x = permute(state, rest + on) if rest + on != tuple(range(state.nsys)) else state
    s = _prod(state.dims[k] for k in rest)
    n, m = choi.din, choi.dout
    rho = x.data.reshape(s, n, s, n)
    g = choi.data.reshape(n, m, n, m)
    out = np.einsum("aibj,icjd->acbd", rho, g).reshape(s * m, s * m)
    return LabeledOperator(out, tuple(state.dims[k] for k in rest) + choi.output_dims)


def compose(first, second):
    """Choi of second o first: Tr_D[Gamma^N_{RD} T_D(Gamma^M_{DE})]."""
    if first.output_dims != second.input_dims:
        raise DimensionError(
            f"cannot feed outputs {list(first.output_dims)} into inputs {list(second.input_dims)}"
        )
    r, dd, e = first.din, first.dout, second.dout
    # Lift both operators to R D E and contract over D.
    gn = kron(LabeledOperator(first.data, (r, dd)), identity((e,)))
    gm = partial_transpose(LabeledOperator(second.data, (dd, e)), [0])
    gm = kron(identity((r,)), gm)
    out = partial_trace(gn @ gm, [1])
    return ChoiOperator(out, first.input_dims, second.output_dims)


def tensor(a, b):
    """Choi of the parallel channel a (x) b, layout [in_a, in_b, out_a, out_b]."""
    na, nb = a.n_in, b.n_in
    ma, mb = a.n_out, b.n_out
    joint = kron(a.op, b.op)
    # joint order: in_a, out_a, in_b, out_b
    ia = list(range(na))
    oa = list(range(na, na + ma))
    ib = list(range(na + ma, na + ma + nb))
    ob = list(range(na + ma + nb, na + ma + nb + mb))
    out = permute(joint, ia + ib + oa + ob)
    return ChoiOperator(out, a.input_dims + b.input_dims, a.output_dims + b.output_dims)


def identity_choi(dims):
    dims = tuple(dims) if not isinstance(dims, int) else (dims,)
    g = max_entangled(_prod(dims), normalized=False)
    return ChoiOperator(g, dims, dims)


def choi_from_kraus(kraus, input_dims, output_dims):
    input_dims = tuple(input_dims)
    output_dims = tuple(output_dims)
    n = _prod(input_dims)
    v = np.eye(n).ravel()
    out = 0
    for k in kraus:
        k = np.asarray(k)
        kv = np.kron(np.eye(n), k) @ v
        out = out + np.outer(kv, kv.conj())
    return ChoiOperator(LabeledOperator(out, input_dims + output_dims), input_dims, output_dims)


def choi_from_map(fn, input_dims, output_dims):
    """Choi of a linear map given as a Python callable on matrices."""
    input_dims = tuple(input_dims)
    output_dims = tuple(output_dims)
    n, m = _prod(input_dims), _prod(output_dims)
    out = np.zeros((n * m, n * m), dtype=complex)
    for i in range(n):
        for j in range(n):
            e = np.zeros((n, n))
            e[i, j] = 1.0
            out[i * m:(i + 1) * m, j * m:(j + 1) * m] = fn(e)
    return ChoiOperator(LabeledOperator(out, input_dims + output_dims), input_dims, output_dims)


def replacement_choi(sigma, input_dims):
    """Channel discarding its input and preparing sigma."""
    input_dims = tuple(input_dims)
    return ChoiOperator(kron(identity(input_dims), sigma), input_dims, sigma.dims)


def swap_channel_choi(d):
    """Gamma_{AB'} (x) Gamma_{BA'} in layout [A, B, A', B']."""
    if int(d) != d or d < 2:
        raise ValueError(f"d must be an integer >= 2, got {d}")
    g = max_entangled(d, normalized=False)
    # kron order A B' B A'
    op = permute(kron(g, g), (0, 2, 3, 1))
    return ChoiOperator(op, (d, d), (d, d))


def gen_pauli_channel_choi(d):
    """(d I - Gamma)/(d^2 - 1), the Choi of the uniform nontrivial Weyl mixture."""
    if int(d) != d or d < 2:
        raise ValueError(f"d must be an integer >= 2, got {d}")
    op = (identity((d, d)) * d - max_entangled(d, normalized=False)) / (d * d - 1)
    return ChoiOperator(op, (d,), (d,))


def weyl_pauli_choi(d):
    """Same channel as gen_pauli_channel_choi, built from the Weyl sum."""
    ws = [weyl_operator(z, x, d).data for z in range(d) for x in range(d) if (z, x) != (0, 0)]
    return choi_from_kraus([w / np.sqrt(d * d - 1) for w in ws], (d,), (d,))


def bell_measurement_choi(d):
    """Measure A Abar in the basis Phi^{z,x} = (W^{z,x} (x) I) Phi (W^{z,x} (x) I)^dag.

    The outcome (z, x) is written to a classical register of size d^2.
    """
    phi = max_entangled(d).data
    effects = []
    for z in range(d):
        for x in range(d):
            w = np.kron(weyl_operator(z, x, d).data, np.eye(d))
            effects.append(w @ phi @ w.conj().T)
    n = d * d

    def meas(rho):
        out = np.zeros((n, n), dtype=complex)
        for k, e in enumerate(effects):
            out[k, k] = np.trace(e @ rho)
        return out

    return choi_from_map(meas, (d, d), (n,))


def dephasing_copy_choi(n):
    """Classical channel C_A -> C_B: dephase in the computational basis."""
    ops = [np.outer(np.eye(n)[k], np.eye(n)[k]) for k in range(n)]
    return choi_from_kraus(ops, (n,), (n,))


def correction_choi(d):
    """C(omega_{C B}) = sum_{z,x} W^{z,x} <z,x| omega |z,x> W^{z,x}^dag."""
    n = d * d
    kraus = []
    for z in range(d):
        for x in range(d):
            k = z * d + x
            bra = np.eye(n)[k][None, :]
            kraus.append(np.kron(bra, weyl_operator(z, x, d).data))
    return choi_from_kraus(kraus, (n, d), (d,))


def append_state_choi(state, input_dims):
    """rho -> rho (x) state, outputs [inputs..., state factors...]."""
    input_dims = tuple(input_dims)
    g = identity_choi(input_dims)
    op = kron(g.op, state)
    return ChoiOperator(op, input_dims, input_dims + state.dims)


def teleportation_choi(d, correct=True):
    """Bell measurement, classical copy and Weyl correction on a shared Phi."""
    if int(d) != d or d < 2:
        raise ValueError(f"d must be an integer >= 2, got {d}")
    n = d * d
    step = append_state_choi(max_entangled(d), (d,))          # A -> A Abar B
    step = compose(step, tensor(bell_measurement_choi(d), identity_choi(d)))  # -> C_A B
    step = compose(step, tensor(dephasing_copy_choi(n), identity_choi(d)))    # -> C_B B
    if correct:
        return compose(step, correction_choi(d))
    return step


def trace_out_outputs(choi, which):
    """Discard some output factors, `which` indexing into output_dims."""
    which = as_subsystems(which, choi.n_out)
    pos = [choi.n_in + k for k in which]
    op = partial_trace(choi.op, pos)
    outs = tuple(d for k, d in enumerate(choi.output_dims) if k not in which)
    return ChoiOperator(op, choi.input_dims, outs)


@dataclass
class ValidationReport:
    cp: bool
    tp: bool
    ppt: dict = field(default_factory=dict)
    min_eig: float = 0.0
    tp_residual: float = 0.0
    ppt_min_eig: dict = field(default_factory=dict)

    @property
    def ok(self):
        return self.cp and self.tp and all(self.ppt.values())


def validate(choi, ppt_cuts=(), tol=PSD_TOL):
    """CP, TP and, for each cut (positions in the Choi layout), T_cut(Choi) >= 0."""
    herm = choi.op.is_hermitian(max(tol, HERM_TOL))
    lo = float(choi.op.eigvalsh()[0])
    marg = partial_trace(choi.op, choi.output_positions())
    tp_res = float(np.max(np.abs(marg.data - np.eye(choi.din))))
    rep = ValidationReport(cp=herm and lo >= -tol, tp=tp_res <= max(tol, 1e-10),
                           min_eig=lo, tp_residual=tp_res)
    for cut in ppt_cuts:
        cut = as_subsystems(cut, choi.op.nsys)
        ev = float(partial_transpose(choi.op, cut).eigvalsh()[0])
        rep.ppt[cut] = ev >= -tol
        rep.ppt_min_eig[cut] = ev
    return rep


def choi_to_json(choi):
    doc = operator_to_json(choi.op)
    doc["input_dims"] = list(choi.input_dims)
    doc["output_dims"] = list(choi.output_dims)
    return doc


def choi_from_json(doc):
    op = operator_from_json(doc)
    try:
        return ChoiOperator(op, doc["input_dims"], doc["output_dims"])
    except KeyError as exc:
        raise ValueError(f"Choi document lacks {exc}") from None


def load_choi(path):
    with open(path) as fh:
        return choi_from_json(json.load(fh))
