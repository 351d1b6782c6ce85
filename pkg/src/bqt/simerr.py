"""SDP builders for simulation errors of channels under PPT-assisted simulation."""

import itertools
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .channels import ChoiOperator, swap_channel_choi
from .qmat import DimensionError, LabeledOperator, _prod, permute
from .sdp import ConicProblem, Expr, SolverError, SolverOptions, bmat, solve_sdp
from .states import ResourceState

AMBIENT_CAP = 4096


@dataclass
class ErrorReport:
    value: float
    method: str  # analytic | lp | sdp-primal | sdp-dual
    gap: float = 0.0
    status: str = "optimal"
    primal_value: float = math.nan
    dual_value: float = math.nan
    certificate: dict = field(default_factory=dict)
    resource: dict = field(default_factory=dict)
    target: str = ""
    backend: str = ""

    @property
    def ok(self):
        return self.status == "optimal"

    def to_json(self, certificate=True):
        out = {k: v for k, v in asdict(self).items() if k != "certificate"}
        for k in ("value", "gap", "primal_value", "dual_value"):
            out[k] = None if out[k] is None or math.isnan(out[k]) else float(out[k])
        if certificate:
            out["certificate"] = {
                name: {
                    "shape": list(np.shape(v)),
                    "re": np.real(v).ravel().tolist(),
                    "im": np.imag(v).ravel().tolist(),
                }
                for name, v in self.certificate.items()
            }
        return out


def _real(*arrays):
    return all(np.max(np.abs(np.imag(a)), initial=0.0) < 1e-14 for a in arrays)


def _resource(rho):
    if isinstance(rho, ResourceState):
        return rho.materialize(), rho.describe()
    if isinstance(rho, LabeledOperator):
        return rho, {"kind": "custom", "dims": list(rho.dims)}
    if rho is None:
        return ResourceState.none().materialize(), {"kind": "none"}
    raise TypeError(f"expected ResourceState or LabeledOperator, got {type(rho).__name__}")


def _check_cap(prob, cap):
    big = max(prob._embedded_sizes(), default=0)
    if big > cap:
        raise DimensionError(
            f"largest embedded PSD block has size {big}, above the cap of {cap}; "
            "use a smaller resource or the LP reductions for isotropic and Werner states"
        )


def _solve(prob, opts, cap=AMBIENT_CAP):
    _check_cap(prob, cap)
    return solve_sdp(prob, opts or SolverOptions.from_env())


def _value_or_raise(sol, what):
    if sol.status != "optimal":
        raise SolverError(f"{what}: solver status {sol.status}")


def _range_factor(g, tol=1e-12):
    """V with g = V V^dag and full column rank."""
    g = (g + g.conj().T) / 2
    w, u = np.linalg.eigh(g)
    keep = w > tol * max(1.0, w[-1])
    v = u[:, keep] * np.sqrt(w[keep])
    return v.real if _real(v) else v


def _fidelity_block(prob, g, x):
    """Impose [[g, Q^dag], [Q, x]] >= 0 and return Q.

    With g = V V^dag of rank r, the block condition holds iff Q = Y V^dag for
    some Y with [[I_r, Y^dag], [Y, x]] >= 0. The reduced block is strictly
    feasible even when g is singular (e.g. the Choi of a unitary channel).
    """
    v = _range_factor(g)
    n, r = v.shape
    Y = prob.matrix("Y", n, r)
    prob.psd(bmat([[np.eye(r), Y.H], [Y, x]]), "[[I, Y^dag], [Y, sim]] >= 0")
    return Y.right(v.conj().T)


# ---------------------------------------------------------------------------
# distances between channels


def _same(n, m):
    if n.input_dims != m.input_dims or n.output_dims != m.output_dims:
        raise DimensionError(f"channel shapes differ: {n!r} vs {m!r}")


def diamond_problem(n, m):
    _same(n, m)
    dims = n.op.dims
    prob = ConicProblem(real=_real(n.data, m.data))
    mu = prob.scalar("mu")
    Z = prob.herm("Z", n.op.dim, psd=True)
    prob.psd(mu.kron(np.eye(n.din)) - Z.ptrace(dims, n.output_positions()), "mu I >= Z_R")
    prob.psd(Z - (n.data - m.data), "Z >= N - M")
    prob.minimize(mu)
    return prob


def diamond_distance(n, m, opts=None, report=False):
    """Half the diamond norm of N - M from their Choi operators."""
    sol = _solve(diamond_problem(n, m), opts)
    rep = ErrorReport(sol.primal_value, "sdp-primal", sol.gap, sol.status, sol.primal_value,
                      sol.dual_value, sol.blocks, target="diamond", backend=sol.backend)
    if report:
        return rep
    _value_or_raise(sol, "diamond distance")
    return sol.primal_value


def fidelity_dual_problem(n, m):
    _same(n, m)
    dims = n.op.dims
    prob = ConicProblem(real=_real(n.data, m.data))
    lam = prob.scalar("lambda", nonneg=True)
    Q = _fidelity_block(prob, m.data, Expr.const(n.data, prob.nvar))
    prob.psd(Q.ptrace(dims, n.output_positions()) - lam.kron(np.eye(n.din)), "lambda I <= Re Tr_D Q")
    prob.maximize(lam)
    return prob


def fidelity_primal_problem(n, m):
    _same(n, m)
    D = n.op.dim
    prob = ConicProblem(real=_real(n.data, m.data))
    rho = prob.herm("rho", n.din, psd=True)
    W = prob.herm("W", D)
    Z = prob.herm("Z", D)
    prob.eq(rho.trace(), 1.0, "Tr rho = 1")
    r = rho.kron(np.eye(n.dout))
    prob.psd(bmat([[W, r], [r, Z]]), "[[W, rho I], [rho I, Z]] >= 0")
    prob.minimize((W.inner(n.data) + Z.inner(m.data)) * 0.5)
    return prob


def channel_fidelity(n, m, opts=None, report=False, check_primal=True):
    """Channel fidelity F(N, M): square of the optimal lambda of the root-fidelity SDP."""
    sol = _solve(fidelity_dual_problem(n, m), opts)
    lam = sol.primal_value
    value = lam * lam
    rep = ErrorReport(value, "sdp-dual", sol.gap, sol.status, lam, sol.dual_value, sol.blocks,
                      target="fidelity", backend=sol.backend)
    if check_primal:
        ps = _solve(fidelity_primal_problem(n, m), opts)
        rep.dual_value = ps.primal_value
        rep.gap = max(rep.gap, abs(ps.primal_value - lam))
        if ps.status != "optimal":
            rep.status = ps.status
    if report:
        return rep
    _value_or_raise(sol, "channel fidelity")
    return value


# ---------------------------------------------------------------------------
# general PPT simulation programs


def ppt_cuts(M):
    """Nonredundant party subsets S: 1 <= |S| <= M//2, keeping the lexicographically
    smaller of S and its complement when |S| = M/2."""
    out = []
    for k in range(1, M // 2 + 1):
        for S in itertools.combinations(range(M), k):
            if 2 * k == M:
                comp = tuple(i for i in range(M) if i not in S)
                if comp < S:
                    continue
            out.append(S)
    return out


def _sim_layout(n, rho):
    M = n.n_in
    if n.n_out != M:
        raise DimensionError(f"channel needs one output per party, got {n!r}")
    if rho.dim == 1 and rho.nsys != M:
        rho = LabeledOperator(rho.data, (1,) * M)
    if rho.nsys != M:
        raise DimensionError(f"resource has {rho.nsys} parties, channel has {M}")
    dims = n.input_dims + rho.dims + n.output_dims
    return M, dims, rho


def _sim_choi_expr(P, n, rho, M, dims):
    """Tr_hat[T_hat(rho) P], the Choi operator of the simulated channel."""
    op = np.kron(np.kron(np.eye(n.din), rho.data.T), np.eye(n.dout))
    return P.left(op).ptrace(dims, range(M, 2 * M))


def ppt_sim_problem(n, rho, cuts, infidelity=False):
    """Diamond (or infidelity) simulation error of N over C-PPT-P channels with resource rho.

    P lives on [A_1..A_M, Ahat_1..Ahat_M, A'_1..A'_M]; each cut S imposes
    T_{S Shat S'}(P) >= 0.
    """
    M, dims, rho = _sim_layout(n, rho)
    D = _prod(dims)
    prob = ConicProblem(real=_real(n.data, rho.data))
    if infidelity:
        lam = prob.scalar("lambda", nonneg=True)
    else:
        mu = prob.scalar("mu")
        Z = prob.herm("Z", n.op.dim, psd=True)
    P = prob.herm("P", D, psd=True)
    for S in cuts:
        on = [k for s in S for k in (s, M + s, 2 * M + s)]
        prob.psd(P.ptranspose(dims, on), f"T_{S}(P) >= 0")
    prob.eq(P.ptrace(dims, range(2 * M, 3 * M)), np.eye(D // n.dout), "Tr_out P = I")
    sim = _sim_choi_expr(P, n, rho, M, dims)
    if infidelity:
        Q = _fidelity_block(prob, n.data, sim)
        prob.psd(Q.ptrace(n.op.dims, n.output_positions()) - lam.kron(np.eye(n.din)),
                 "lambda I <= Re Tr_out Q")
        prob.maximize(lam)
    else:
        prob.psd(mu.kron(np.eye(n.din)) - Z.ptrace(n.op.dims, n.output_positions()), "mu I >= Z")
        prob.psd(Z - (n.data - sim), "Z >= N - sim")
        prob.minimize(mu)
    return prob


def bipartite_dual_problem(n, rho):
    """Dual of the bipartite diamond program.

    sup Tr[N X2] - Tr[W] over X1, X2, X3 >= 0 and Hermitian W with
    Tr X1 <= 1, X2 <= X1 (x) I, X2 (x) T(rho) + T_{B Bhat B'}(X3) <= W (x) I.
    """
    M, dims, rho = _sim_layout(n, rho)
    if M != 2:
        raise DimensionError("the explicit dual is built for two parties")
    D = _prod(dims)
    din, dout = n.din, n.dout
    dr = rho.dim
    prob = ConicProblem(real=_real(n.data, rho.data))
    X1 = prob.herm("X1", din, psd=True)
    X2 = prob.herm("X2", din * dout, psd=True)
    X3 = prob.herm("X3", D, psd=True)
    W = prob.herm("W", din * dr)
    prob.nonneg(1.0 - X1.trace(), "Tr X1 <= 1")
    prob.psd(X1.kron(np.eye(dout)) - X2, "X2 <= X1 (x) I")
    # X2 on [A, B, A', B'] (x) rho^T on [Ahat, Bhat], reordered to the P layout.
    lifted = X2.kron(rho.data.T)
    nd = n.op.dims
    grouped = nd + rho.dims  # A B A' B' Ahat Bhat
    lifted = lifted.permute(grouped, (0, 1, 4, 5, 2, 3))
    lhs = lifted + X3.ptranspose(dims, (1, 3, 5))
    prob.psd(W.kron(np.eye(dout)) - lhs, "W (x) I >= X2 (x) T(rho) + T(X3)")
    prob.maximize(X2.inner(n.data) - W.trace())
    return prob


def _bipartite_target(n):
    if n.n_in != 2 or n.n_out != 2:
        raise DimensionError(f"expected a bipartite channel AB -> A'B', got {n!r}")


def eppt_bipartite(n, rho, use_dual=False, opts=None):
    """PPT simulation error of N_{AB->A'B'} in normalized diamond distance."""
    _bipartite_target(n)
    r, desc = _resource(rho)
    sol = _solve(ppt_sim_problem(n, r, [(1,)]), opts)
    rep = ErrorReport(sol.primal_value, "sdp-primal", sol.gap, sol.status, sol.primal_value,
                      sol.dual_value, sol.blocks, desc, "bipartite", sol.backend)
    if use_dual:
        ds = _solve(bipartite_dual_problem(n, r), opts)
        rep.dual_value = ds.primal_value
        rep.gap = abs(sol.primal_value - ds.primal_value)
        rep.certificate.update({f"dual_{k}": v for k, v in ds.blocks.items()})
        if ds.status != "optimal":
            rep.status = ds.status
    return rep


def _infid_report(sol, desc, target):
    lam_p, lam_d = sol.primal_value, sol.dual_value
    vp, vd = 1 - lam_p ** 2, 1 - lam_d ** 2
    return ErrorReport(vp, "sdp-primal", abs(vp - vd), sol.status, vp, vd, sol.blocks,
                       desc, target, sol.backend)


def eppt_infid_bipartite(n, rho, opts=None):
    """PPT simulation error of N_{AB->A'B'} in channel infidelity."""
    _bipartite_target(n)
    r, desc = _resource(rho)
    sol = _solve(ppt_sim_problem(n, r, [(1,)], infidelity=True), opts)
    return _infid_report(sol, desc, "bipartite-infidelity")


def eppt_multipartite(n, rho, infidelity=False, opts=None):
    """PPT simulation error for an M-party channel, M in {2, 3}."""
    r, desc = _resource(rho)
    M = n.n_in
    if M < 2:
        raise DimensionError("need at least two parties")
    if M > 3:
        raise DimensionError(f"{M} parties exceed the desk-scale limit of 3")
    prob = ppt_sim_problem(n, r, ppt_cuts(M), infidelity=infidelity)
    sol = _solve(prob, opts)
    if infidelity:
        return _infid_report(sol, desc, f"multipartite-{M}-infidelity")
    return ErrorReport(sol.primal_value, "sdp-primal", sol.gap, sol.status, sol.primal_value,
                       sol.dual_value, sol.blocks, desc, f"multipartite-{M}", sol.backend)


# ---------------------------------------------------------------------------
# swap channel, simplified programs


def _swap_family(prob, K, L, M, N, d, dims, on):
    """The four partial-transpose inequalities for the swap channel, transposing `on`."""
    def t(e):
        return e.ptranspose(dims, on)

    prob.psd(t(K + L / (d + 1) + M / (d + 1) + N / (d + 1) ** 2), f"first on {on}")
    prob.psd(t(L + N / (d + 1)) / (d - 1) - t(K + M / (d + 1)), f"second on {on}")
    prob.psd(t(M + N / (d + 1)) / (d - 1) - t(K + L / (d + 1)), f"third on {on}")
    prob.psd(t(K + N / (d - 1) ** 2) - t(L + M) / (d - 1), f"fourth on {on}")


def swap_problem(r, d, transpose_sets=((1,),), extra_psd_on=()):
    dims = r.dims
    n = r.dim
    prob = ConicProblem(real=_real(r.data))
    K, L, M, N = (prob.herm(s, n, psd=True) for s in "KLMN")
    prob.eq(K + L + M + N, np.eye(n), "K + L + M + N = I")
    for on in transpose_sets:
        _swap_family(prob, K, L, M, N, d, dims, on)
    for on in extra_psd_on:
        for name, e in zip("KLMN", (K, L, M, N)):
            prob.psd(e.ptranspose(dims, on), f"T_{on}({name}) >= 0")
    prob.maximize(K.inner(r.data))
    return prob


def _check_d(d):
    if isinstance(d, bool) or int(d) != d or d < 2:
        raise ValueError(f"d must be an integer >= 2, got {d}")
    return int(d)


def _swap_report(sol, desc, target):
    vp, vd = 1 - sol.primal_value, 1 - sol.dual_value
    return ErrorReport(vp, "sdp-primal", abs(vp - vd), sol.status, vp, vd, sol.blocks,
                       desc, target, sol.backend)


def eppt_swap(rho, d, opts=None):
    """1 - sup Tr[rho K] over the POVM {K, L, M, N} of the symmetrized swap simulation."""
    d = _check_d(d)
    r, desc = _resource(rho)
    if r.nsys != 2:
        raise DimensionError(f"resource must be bipartite, got dims {list(r.dims)}")
    sol = _solve(swap_problem(r, d), opts)
    return _swap_report(sol, desc, f"swap-{d}")


def eppt_bcqt(rho_abc, d, opts=None):
    """Controlled swap: same family for Shat in {Ahat, Bhat}, plus T_Chat(each) >= 0."""
    d = _check_d(d)
    r, desc = _resource(rho_abc)
    if r.nsys != 3:
        raise DimensionError(f"resource must be tripartite, got dims {list(r.dims)}")
    sol = _solve(swap_problem(r, d, transpose_sets=((0,), (1,)), extra_psd_on=((2,),)), opts)
    return _swap_report(sol, desc, f"bcqt-{d}")


def swap_choi_multi(d, trivial=0):
    """Swap channel on parties (A, B), with `trivial` extra one-dimensional parties."""
    s = swap_channel_choi(d)
    ones = (1,) * trivial
    return ChoiOperator(LabeledOperator(s.data, (d, d) + ones + (d, d) + ones),
                        (d, d) + ones, (d, d) + ones)


# ---------------------------------------------------------------------------
# channel box transformation


def channel_box_problem(n, m, k, l):
    _same(n, m)
    _same(k, l)
    if n.n_in != 1 or n.n_out != 1 or k.n_in != 1 or k.n_out != 1:
        # group multi-factor systems into single factors
        n, m, k, l = (ChoiOperator(LabeledOperator(c.data, (c.din, c.dout)), (c.din,), (c.dout,))
                      for c in (n, m, k, l))
    dA, dB = n.din, n.dout
    dC, dD = k.din, k.dout
    dims = (dC, dB, dA, dD)
    D = dC * dB * dA * dD
    prob = ConicProblem(real=_real(n.data, m.data, k.data, l.data))
    lam = prob.scalar("lambda", nonneg=True)
    T = prob.herm("Theta", D, psd=True)
    prob.eq(T.ptrace(dims, (2, 3)), np.eye(dC * dB), "Theta_CB = I")
    tcba = T.ptrace(dims, (3,))
    tca = T.ptrace(dims, (1, 3)).kron(np.eye(dB)).permute((dC, dA, dB), (0, 2, 1)) / dB
    prob.eq(tcba - tca, 0.0, "Theta_CBA = Theta_CA (x) I_B / d_B")

    def convert(c):
        # T_AB(Gamma_AB) placed on the B, A slots of [C, B, A, D]
        g = permute(LabeledOperator(c.data.T, (dA, dB)), (1, 0)).data
        op = np.kron(np.kron(np.eye(dC), g), np.eye(dD))
        return T.left(op).ptrace(dims, (1, 2))

    prob.eq(convert(m) - l.data, 0.0, "Theta(M) = L")
    Q = _fidelity_block(prob, k.data, convert(n))
    prob.psd(Q.ptrace((dC, dD), (1,)) - lam.kron(np.eye(dC)), "lambda I <= Re Tr_D Q")
    prob.maximize(lam)
    return prob


def channel_box_error(n, m, k, l, opts=None):
    """Least infidelity of Theta(N) to K over superchannels with Theta(M) = L exactly."""
    sol = _solve(channel_box_problem(n, m, k, l), opts)
    return _infid_report(sol, {}, "channel-box")
