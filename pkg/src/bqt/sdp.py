"""A small conic modeling layer.

Variables are complex (or real) matrices parametrized by a real vector x.
Affine expressions are stored as a sparse complex matrix acting on x plus a
constant, both in row-major vec order. Hermitian PSD constraints are embedded
as real symmetric blocks [[Re, -Im], [Im, Re]] and handed to Clarabel or SCS.
Linear programs go to HiGHS through scipy.
"""

import json
import math
import os
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

from .qmat import _prod, permute_index, trace_index, transpose_index

FEAS_TOL = 1e-8
GAP_TOL = 1e-7


class SolverError(RuntimeError):
    pass


@dataclass(frozen=True)
class SolverOptions:
    backend: str = "auto"  # auto | clarabel | scs
    max_iters: int = 0  # 0 means backend default
    feas_tol: float = FEAS_TOL
    gap_tol: float = GAP_TOL
    verbose: bool = False
    scs_cutoff: int = 600  # svec size of the largest cone above which auto picks SCS

    @classmethod
    def from_env(cls, base=None, var="BQT_SOLVER_OPTS"):
        """Overrides from a JSON object or `key=value,key=value` string."""
        base = base or cls()
        raw = os.environ.get(var, "").strip()
        if not raw:
            return base
        if raw.startswith("{"):
            items = json.loads(raw)
        else:
            items = dict(kv.split("=", 1) for kv in raw.split(",") if kv.strip())
        kw = {}
        for k, v in items.items():
            k = k.strip().replace("-", "_")
            if k not in cls.__dataclass_fields__:
                raise ValueError(f"unknown solver option {k!r} in {var}")
            typ = type(getattr(base, k))
            if typ is bool and isinstance(v, str):
                v = v.strip().lower() in ("1", "true", "yes", "on")
            kw[k] = typ(v)
        return replace(base, **kw)


# ---------------------------------------------------------------------------
# variables and expressions


@dataclass(eq=False)
class Var:
    name: str
    shape: tuple
    kind: str  # herm | sym | complex | real
    offset: int
    basis: sp.csr_matrix = field(repr=False)  # vec(X) = basis @ x[offset:offset+size]

    @property
    def size(self):
        return self.basis.shape[1]

    def to_real(self, value):
        """Real coordinates reproducing `value` (projected onto the variable's set)."""
        v = np.asarray(value, dtype=complex).reshape(self.shape).ravel()
        b = self.basis
        # The basis columns are orthogonal, so least squares is a scaled adjoint.
        g = np.asarray((b.conj().multiply(b)).sum(axis=0)).ravel().real
        return (b.conj().T @ v).real / g


def _herm_basis(n, real):
    rows, cols, vals = [], [], []
    k = 0
    for i in range(n):
        rows.append(i * n + i)
        cols.append(k)
        vals.append(1.0)
        k += 1
    for i in range(n):
        for j in range(i + 1, n):
            rows += [i * n + j, j * n + i]
            cols += [k, k]
            vals += [1.0, 1.0]
            k += 1
            if not real:
                rows += [i * n + j, j * n + i]
                cols += [k, k]
                vals += [1j, -1j]
                k += 1
    return sp.csr_matrix((np.array(vals, dtype=complex), (rows, cols)), shape=(n * n, k))


def _dense_basis(m, real):
    n = m
    if real:
        return sp.identity(n, dtype=complex, format="csr")
    eye = sp.identity(n, dtype=complex, format="csr")
    return sp.hstack([eye, 1j * eye], format="csr")


class Expr:
    """Affine matrix expression vec(E) = A @ x + c (row-major)."""

    __array_priority__ = 100

    def __init__(self, A, c, shape):
        self.A = A.tocsr()
        self.c = np.asarray(c, dtype=complex).ravel()
        self.shape = tuple(shape)

    @staticmethod
    def const(value, nvar=0):
        value = np.atleast_2d(np.asarray(value, dtype=complex))
        return Expr(sp.csr_matrix((value.size, nvar), dtype=complex), value.ravel(), value.shape)

    @property
    def nvar(self):
        return self.A.shape[1]

    def _pad(self, n):
        if self.nvar >= n:
            return self.A
        return sp.hstack([self.A, sp.csr_matrix((self.A.shape[0], n - self.nvar))], format="csr")

    def _lift(self, other):
        if isinstance(other, Expr):
            return other
        other = np.asarray(other, dtype=complex)
        if other.ndim == 0:
            other = other * np.ones(self.shape)
        return Expr.const(other, self.nvar)

    def __add__(self, other):
        other = self._lift(other)
        if other.shape != self.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        n = max(self.nvar, other.nvar)
        return Expr(self._pad(n) + other._pad(n), self.c + other.c, self.shape)

    __radd__ = __add__

    def __neg__(self):
        return Expr(-self.A, -self.c, self.shape)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, s):
        if not np.isscalar(s):
            raise TypeError("use left()/right() for matrix products")
        return Expr(self.A * s, self.c * s, self.shape)

    __rmul__ = __mul__

    def __truediv__(self, s):
        return self * (1.0 / s)

    def _linmap(self, S, shape):
        S = sp.csr_matrix(S)
        return Expr(S @ self.A, S @ self.c, shape)

    def _take(self, p, shape):
        return Expr(self.A[p], self.c[p], shape)

    def left(self, M):
        """M @ E for a constant matrix M."""
        M = np.asarray(M, dtype=complex)
        r, c = self.shape
        return self._linmap(sp.kron(sp.csr_matrix(M), sp.identity(c)), (M.shape[0], c))

    def right(self, M):
        """E @ M for a constant matrix M."""
        M = np.asarray(M, dtype=complex)
        r, c = self.shape
        return self._linmap(sp.kron(sp.identity(r), sp.csr_matrix(M.T)), (r, M.shape[1]))

    @property
    def T(self):
        r, c = self.shape
        p = np.arange(r * c).reshape(r, c).T.ravel()
        return self._take(p, (c, r))

    def conj(self):
        return Expr(self.A.conj(), self.c.conj(), self.shape)

    @property
    def H(self):
        return self.T.conj()

    def herm(self):
        return (self + self.H) * 0.5

    def _square_dims(self, dims):
        dims = tuple(int(d) for d in dims)
        if self.shape != (_prod(dims),) * 2:
            raise ValueError(f"expression of shape {self.shape} does not fit dims {dims}")
        return dims

    def ptranspose(self, dims, on):
        dims = self._square_dims(dims)
        on = tuple(sorted(on))
        if not on:
            return self
        return self._take(transpose_index(dims, on), self.shape)

    def permute(self, dims, perm):
        dims = self._square_dims(dims)
        return self._take(permute_index(dims, tuple(perm)), self.shape)

    def ptrace(self, dims, over):
        dims = self._square_dims(dims)
        over = tuple(sorted(over))
        if not over:
            return self
        t = trace_index(dims, over)
        nout, k = t.shape
        S = sp.csr_matrix(
            (np.ones(t.size), (np.repeat(np.arange(nout), k), t.ravel())),
            shape=(nout, self.A.shape[0]),
        )
        dk = int(round(math.sqrt(nout)))
        return self._linmap(S, (dk, dk))

    def kron(self, C, left=False):
        """E (x) C, or C (x) E when left=True, for a constant matrix C."""
        C = sp.coo_matrix(np.atleast_2d(np.asarray(C, dtype=complex)))
        r, c = self.shape
        cr, cc = C.shape
        ii, jj = np.divmod(np.arange(r * c), c)
        # all (source entry, C entry) pairs
        src = np.repeat(np.arange(r * c), C.nnz)
        ci = np.tile(C.row, r * c)
        cj = np.tile(C.col, r * c)
        cv = np.tile(C.data, r * c)
        i0, j0 = ii[src], jj[src]
        if left:
            rows, cols, R, Cc = ci * r + i0, cj * c + j0, cr * r, cc * c
        else:
            rows, cols, R, Cc = i0 * cr + ci, j0 * cc + cj, r * cr, c * cc
        S = sp.csr_matrix((cv, (rows * Cc + cols, src)), shape=(R * Cc, r * c))
        return self._linmap(S, (R, Cc))

    def trace(self):
        r, c = self.shape
        p = np.arange(min(r, c)) * (c + 1)
        A = sp.csr_matrix(self.A[p].sum(axis=0))
        return Expr(A, [self.c[p].sum()], (1, 1))

    def inner(self, C):
        """Tr[C E] as a 1x1 expression."""
        C = np.asarray(C, dtype=complex)
        w = C.T.ravel()
        return Expr(sp.csr_matrix(w @ self.A), [w @ self.c], (1, 1))

    def value(self, x):
        x = np.asarray(x, dtype=float)
        n = self.nvar
        return (self.A @ x[:n] + self.c).reshape(self.shape)


def bmat(blocks):
    """Block matrix from a nested list of Expr, arrays or None (zero)."""
    nvar = max((b.nvar for row in blocks for b in row if isinstance(b, Expr)), default=0)
    heights = []
    for row in blocks:
        h = {b.shape[0] for b in row if isinstance(b, Expr)}
        h |= {np.atleast_2d(b).shape[0] for b in row if b is not None and not isinstance(b, Expr)}
        if len(h) != 1:
            raise ValueError("cannot infer block row height")
        heights.append(h.pop())
    widths = []
    for j in range(len(blocks[0])):
        w = {row[j].shape[1] for row in blocks if isinstance(row[j], Expr)}
        w |= {np.atleast_2d(row[j]).shape[1] for row in blocks
              if row[j] is not None and not isinstance(row[j], Expr)}
        if len(w) != 1:
            raise ValueError("cannot infer block column width")
        widths.append(w.pop())
    R, C = sum(heights), sum(widths)
    pieces_A, pieces_rows = [], []
    c = np.zeros(R * C, dtype=complex)
    r0 = 0
    for i, row in enumerate(blocks):
        c0 = 0
        for j, b in enumerate(row):
            h, w = heights[i], widths[j]
            if b is not None:
                e = b if isinstance(b, Expr) else Expr.const(b, nvar)
                ii, jj = np.divmod(np.arange(h * w), w)
                dest = (r0 + ii) * C + (c0 + jj)
                pieces_A.append(sp.coo_matrix(e._pad(nvar)))
                pieces_rows.append(dest)
                c[dest] += e.c
            c0 += w
        r0 += h
    rows, cols, vals = [], [], []
    for A, dest in zip(pieces_A, pieces_rows):
        rows.append(dest[A.row])
        cols.append(A.col)
        vals.append(A.data)
    A = sp.csr_matrix(
        (np.concatenate(vals) if vals else [], (np.concatenate(rows) if rows else [],
                                                np.concatenate(cols) if cols else [])),
        shape=(R * C, nvar), dtype=complex,
    )
    return Expr(A, c, (R, C))


# ---------------------------------------------------------------------------
# problems


@dataclass
class ConicSolution:
    status: str  # optimal | infeasible | unbounded | inaccurate
    primal_value: float
    dual_value: float
    blocks: dict
    eq_residual: float
    min_eig: float
    backend: str = ""
    iterations: int = 0
    solve_time: float = 0.0

    @property
    def gap(self):
        return abs(self.primal_value - self.dual_value)

    @property
    def ok(self):
        return self.status == "optimal"


class ConicProblem:
    """Linear objective over matrix variables with equality, nonnegativity and
    Hermitian PSD constraints.

    With real=True every Hermitian variable is real symmetric and every
    general variable is real. That is exact when all data are real, since
    averaging a solution with its complex conjugate keeps it feasible and
    optimal.
    """

    def __init__(self, real=False):
        self.real = bool(real)
        self.vars = {}
        self.nvar = 0
        self.eqs = []
        self.nonnegs = []
        self.psds = []
        self.objective = None
        self.sense = "min"

    def _add_var(self, name, shape, kind, basis):
        if name in self.vars:
            raise ValueError(f"variable {name!r} declared twice")
        v = Var(name, shape, kind, self.nvar, basis.tocsr())
        self.vars[name] = v
        self.nvar += v.size
        A = sp.csr_matrix(
            (v.basis.data, v.basis.indices + v.offset, v.basis.indptr),
            shape=(v.basis.shape[0], self.nvar),
        )
        return Expr(A, np.zeros(v.basis.shape[0]), shape)

    def herm(self, name, n, psd=False):
        kind = "sym" if self.real else "herm"
        e = self._add_var(name, (n, n), kind, _herm_basis(n, self.real))
        if psd:
            self.psd(e, f"{name}>=0")
        return e

    def matrix(self, name, m, n):
        kind = "real" if self.real else "complex"
        return self._add_var(name, (m, n), kind, _dense_basis(m * n, self.real))

    def scalar(self, name, nonneg=False):
        e = self._add_var(name, (1, 1), "real", sp.identity(1, dtype=complex, format="csr"))
        if nonneg:
            self.nonneg(e, f"{name}>=0")
        return e

    def vector(self, name, n, nonneg=False):
        e = self._add_var(name, (n, 1), "real", sp.identity(n, dtype=complex, format="csr"))
        if nonneg:
            self.nonneg(e, f"{name}>=0")
        return e

    def eq(self, lhs, rhs=0.0, label=""):
        e = lhs - rhs if isinstance(lhs, Expr) else (-rhs) + lhs
        self.eqs.append((label, e))

    def nonneg(self, e, label=""):
        self.nonnegs.append((label, e))

    def psd(self, e, label=""):
        if e.shape[0] != e.shape[1]:
            raise ValueError(f"PSD constraint on non-square expression {e.shape}")
        self.psds.append((label, e.herm()))

    def minimize(self, e):
        self.objective, self.sense = e, "min"

    def maximize(self, e):
        self.objective, self.sense = e, "max"

    # -- compilation --------------------------------------------------------

    def _eq_rows(self, e):
        """Independent real rows of E = 0: Re and Im parts, zero rows dropped."""
        n = self.nvar
        A = e._pad(n)
        Ar = sp.vstack([A.real, A.imag], format="csr")
        cr = np.concatenate([e.c.real, e.c.imag])
        r, c = e.shape
        if r == c:
            # Hermitian-looking expressions repeat information below the diagonal.
            ii, jj = np.divmod(np.arange(r * c), c)
            upper = ii <= jj
            keep_re = np.where(upper)[0]
            keep_im = np.where(ii < jj)[0] + r * c
            if _is_hermitian_expr(e):
                sel = np.concatenate([keep_re, keep_im])
                Ar, cr = Ar[sel], cr[sel]
        nz = np.diff(Ar.indptr) > 0
        bad = ~nz & (np.abs(cr) > 1e-12)
        if np.any(bad):
            raise SolverError("equality constraint is constant and nonzero")
        return Ar[nz], cr[nz]

    def _svec_rows(self, e, lower_colmajor):
        """Rows mapping x to svec of the real embedding of E (without constant)."""
        n = e.shape[0]
        A = e._pad(self.nvar)
        stacked = sp.vstack([A.real, A.imag], format="csr")
        cst = np.concatenate([e.c.real, e.c.imag])
        m = n if self.real else 2 * n
        if lower_colmajor:
            jj, ii = np.triu_indices(m)  # column-major lower triangle: (i >= j)
            order = np.lexsort((ii, jj))
            ii, jj = ii[order], jj[order]
        else:
            ii, jj = np.triu_indices(m)
            order = np.lexsort((ii, jj))
            ii, jj = ii[order], jj[order]
        bi, bj = ii // n, jj // n
        si, sj = ii % n, jj % n
        src = si * n + sj
        # [[Re, -Im], [Im, Re]]
        imag = bi != bj
        sign = np.where(imag & (bi < bj), -1.0, 1.0)
        pick = src + np.where(imag, n * n, 0)
        scale = np.where(ii == jj, 1.0, math.sqrt(2.0)) * sign
        rows = sp.diags(scale) @ stacked[pick]
        return rows.tocsr(), scale * cst[pick], m

    def compile(self, backend):
        """Standard form min q^T x s.t. G x + s = h, s in K."""
        if self.objective is None:
            raise ValueError("no objective set")
        n = self.nvar
        obj = self.objective
        if obj.shape != (1, 1):
            raise ValueError("objective must be scalar")
        q = np.asarray(obj._pad(n).real.todense()).ravel()
        q0 = float(obj.c.real[0])
        if self.sense == "max":
            q, q0 = -q, -q0
        G, h = [], []
        nz = 0
        for _, e in self.eqs:
            Ar, cr = self._eq_rows(e)
            G.append(Ar)
            h.append(-cr)
            nz += Ar.shape[0]
        nl = 0
        for _, e in self.nonnegs:
            A = e._pad(n)
            G.append(-A.real)
            h.append(e.c.real)
            nl += A.shape[0]
        psd_sizes = []
        for _, e in self.psds:
            rows, cst, m = self._svec_rows(e, lower_colmajor=(backend == "scs"))
            G.append(-rows)
            h.append(cst)
            psd_sizes.append(m)
        G = sp.vstack(G, format="csc") if G else sp.csc_matrix((0, n))
        h = np.concatenate(h) if h else np.zeros(0)
        return q, q0, G, h, nz, nl, psd_sizes

    def pick_backend(self, opts):
        if opts.backend != "auto":
            return opts.backend
        big = max((m * (m + 1) // 2 for m in self._embedded_sizes()), default=0)
        return "scs" if big > opts.scs_cutoff else "clarabel"

    def _embedded_sizes(self):
        return [e.shape[0] * (1 if self.real else 2) for _, e in self.psds]

    def solve(self, opts=None):
        return solve_sdp(self, opts)

    # -- evaluation --------------------------------------------------------

    def point_to_x(self, point):
        x = np.zeros(self.nvar)
        for name, v in self.vars.items():
            if name not in point:
                raise KeyError(f"point lacks variable {name!r}")
            x[v.offset:v.offset + v.size] = v.to_real(point[name])
        return x

    def blocks_from_x(self, x):
        out = {}
        for name, v in self.vars.items():
            val = (v.basis @ x[v.offset:v.offset + v.size]).reshape(v.shape)
            if v.kind in ("sym", "real"):
                val = val.real
            out[name] = val
        return out

    def residuals(self, x):
        eq = max((float(np.max(np.abs(e.value(x)), initial=0.0)) for _, e in self.eqs), default=0.0)
        lo = np.inf
        for _, e in self.nonnegs:
            lo = min(lo, float(np.min(e.value(x).real, initial=np.inf)))
        for _, e in self.psds:
            m = e.value(x)
            lo = min(lo, float(np.linalg.eigvalsh((m + m.conj().T) / 2)[0]))
        return eq, (0.0 if lo == np.inf else lo)

    def objective_value(self, x):
        return float(self.objective.value(x).real[0, 0])


def _is_hermitian_expr(e):
    h = e.H
    n = max(e.nvar, h.nvar)
    dA = e._pad(n) - h._pad(n)
    return (abs(dA).max() if dA.nnz else 0.0) < 1e-14 and np.max(np.abs(e.c - h.c), initial=0) < 1e-14


def check_feasible(problem, point, tol=1e-9):
    """True iff `point` satisfies every constraint of an LpProblem or ConicProblem within tol."""
    if isinstance(problem, LpProblem):
        return problem.is_feasible(point, tol)
    x = problem.point_to_x(point)
    eq, lo = problem.residuals(x)
    return eq <= tol and lo >= -tol


# ---------------------------------------------------------------------------
# backends


def _solve_clarabel(prob, opts):
    import clarabel

    q, q0, G, h, nz, nl, psd = prob.compile("clarabel")
    cones = []
    if nz:
        cones.append(clarabel.ZeroConeT(nz))
    if nl:
        cones.append(clarabel.NonnegativeConeT(nl))
    cones += [clarabel.PSDTriangleConeT(m) for m in psd]
    s = clarabel.DefaultSettings()
    s.verbose = opts.verbose
    s.tol_feas = opts.feas_tol
    s.tol_gap_abs = opts.gap_tol / 10
    s.tol_gap_rel = opts.gap_tol / 10
    s.presolve_enable = True
    if opts.max_iters:
        s.max_iter = opts.max_iters
    P = sp.csc_matrix((prob.nvar, prob.nvar))
    sol = clarabel.DefaultSolver(P, q, G, h, cones, s).solve()
    st = str(sol.status)
    status = {
        "Solved": "optimal",
        "AlmostSolved": "inaccurate",
        "PrimalInfeasible": "infeasible",
        "AlmostPrimalInfeasible": "infeasible",
        "DualInfeasible": "unbounded",
        "AlmostDualInfeasible": "unbounded",
    }.get(st, "inaccurate")
    x = np.array(sol.x)
    if st == "AlmostSolved":
        # Interior iterates keep z in the dual cone, so a small dual residual
        # together with the primal and gap checks in solve_sdp certifies the point.
        z = np.array(sol.z)
        scale = max(1.0, float(np.max(np.abs(q), initial=0.0)))
        if np.max(np.abs(G.T @ z + q), initial=0.0) <= 10 * opts.feas_tol * scale:
            status = "optimal"
    return status, x, sol.obj_val + q0, sol.obj_val_dual + q0, sol.iterations, sol.solve_time


def _solve_scs(prob, opts):
    import scs

    q, q0, G, h, nz, nl, psd = prob.compile("scs")
    cone = {"z": nz, "l": nl, "s": psd}
    kw = dict(eps_abs=opts.feas_tol, eps_rel=opts.feas_tol, verbose=opts.verbose,
              max_iters=opts.max_iters or 200000, acceleration_lookback=10)
    solver = scs.SCS({"A": G, "b": h, "c": q}, cone, **kw)
    res = solver.solve()
    info = res["info"]
    st = info["status"]
    status = {"solved": "optimal", "solved_inaccurate": "inaccurate",
              "infeasible": "infeasible", "unbounded": "unbounded",
              "infeasible_inaccurate": "infeasible",
              "unbounded_inaccurate": "unbounded"}.get(st, "inaccurate")
    return status, res["x"], info["pobj"] + q0, info["dobj"] + q0, info["iter"], \
        (info["setup_time"] + info["solve_time"]) / 1e3


def solve_sdp(prob, opts=None):
    opts = opts or SolverOptions()
    backend = prob.pick_backend(opts)
    if backend == "clarabel":
        status, x, pv, dv, it, t = _solve_clarabel(prob, opts)
    elif backend == "scs":
        status, x, pv, dv, it, t = _solve_scs(prob, opts)
    else:
        raise ValueError(f"unknown backend {backend!r}")
    if prob.sense == "max":
        pv, dv = -pv, -dv
    if status in ("infeasible", "unbounded"):
        return ConicSolution(status, math.nan, math.nan, {}, math.nan, math.nan, backend, it, t)
    eq, lo = prob.residuals(x)
    pv = prob.objective_value(x)
    scale = max(1.0, abs(pv))
    if status == "optimal":
        if abs(pv - dv) > opts.gap_tol * scale or eq > 10 * opts.feas_tol * scale \
                or lo < -10 * opts.feas_tol * scale:
            status = "inaccurate"
    return ConicSolution(status, pv, dv, prob.blocks_from_x(x), eq, lo, backend, it, t)


# ---------------------------------------------------------------------------
# linear programs


@dataclass
class LpProblem:
    """sense c^T x subject to A x <= b and x_i >= 0 where nonneg[i]."""

    c: np.ndarray
    A: np.ndarray
    b: np.ndarray
    sense: str = "max"
    nonneg: np.ndarray = None

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float).ravel()
        n = self.c.size
        self.A = np.asarray(self.A, dtype=float).reshape(-1, n)
        self.b = np.asarray(self.b, dtype=float).ravel()
        if self.A.shape[0] != self.b.size:
            raise ValueError(f"A has {self.A.shape[0]} rows but b has {self.b.size} entries")
        if self.nonneg is None:
            self.nonneg = np.ones(n, dtype=bool)
        self.nonneg = np.asarray(self.nonneg, dtype=bool).ravel()
        if self.nonneg.size != n:
            raise ValueError("nonneg flags do not match the number of variables")
        if self.sense not in ("max", "min"):
            raise ValueError(f"sense must be max or min, got {self.sense!r}")

    def dual(self):
        """Dual of a max problem with nonnegative variables: min b^T y, A^T y >= c, y >= 0.

        Returned in the same form, i.e. constraints -A^T y <= -c.
        """
        if self.sense != "max" or not self.nonneg.all():
            raise ValueError("dual() implemented for max problems over x >= 0")
        return LpProblem(self.b, -self.A.T, -self.c, sense="min")

    def value(self, x):
        return float(self.c @ np.asarray(x, dtype=float))

    def is_feasible(self, x, tol=1e-9):
        x = np.asarray(x, dtype=float).ravel()
        if x.size != self.c.size:
            raise KeyError(f"point has {x.size} entries, LP has {self.c.size} variables")
        if np.any(x[self.nonneg] < -tol):
            return False
        return bool(np.all(self.A @ x - self.b <= tol)) if self.A.size else True


def _linprog(lp):
    sign = -1.0 if lp.sense == "max" else 1.0
    bounds = [(0, None) if f else (None, None) for f in lp.nonneg]
    kw = {}
    if lp.A.size:
        kw = dict(A_ub=lp.A, b_ub=lp.b)
    res = linprog(sign * lp.c, bounds=bounds, method="highs", **kw)
    return res, sign


def solve_lp(lp, tol=1e-9):
    """Solve the LP and its explicit dual; weak duality is asserted."""
    res, sign = _linprog(lp)
    if res.status == 2:
        return ConicSolution("infeasible", math.nan, math.nan, {}, math.nan, math.nan, "highs")
    if res.status == 3:
        return ConicSolution("unbounded", math.nan, math.nan, {}, math.nan, math.nan, "highs")
    if res.status != 0:
        return ConicSolution("inaccurate", math.nan, math.nan, {}, math.nan, math.nan, "highs")
    pv = lp.value(res.x)
    if lp.sense == "max" and lp.nonneg.all():
        dual = lp.dual()
        dres, _ = _linprog(dual)
        y = dres.x
        dv = dual.value(y)
        if dv < pv - 1e-7 * max(1.0, abs(pv)):
            raise SolverError(f"weak duality violated: dual {dv} < primal {pv}")
    else:
        # HiGHS marginals: dual objective b^T y
        y = -sign * res.ineqlin.marginals if lp.A.size else np.zeros(0)
        dv = float(lp.b @ y) if lp.A.size else pv
    eq = 0.0
    slack = lp.b - lp.A @ res.x if lp.A.size else np.zeros(0)
    lo = float(min(np.min(slack, initial=np.inf), np.min(res.x[lp.nonneg], initial=np.inf)))
    status = "optimal" if abs(pv - dv) <= 1e-7 * max(1.0, abs(pv)) else "inaccurate"
    return ConicSolution(status, pv, dv, {"x": res.x, "y": y}, eq, lo, "highs")
