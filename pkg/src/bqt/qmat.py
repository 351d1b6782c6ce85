"""Dense complex linear algebra on labeled tensor-product spaces.

Convention: row-major, subsystem 0 is the most significant index, so
|i>|j> sits at position i*d_j + j.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

HERM_TOL = 1e-10
PSD_TOL = 1e-8


class DimensionError(ValueError):
    pass


class NotPSDError(ValueError):
    pass


def _prod(dims):
    out = 1
    for d in dims:
        out *= d
    return out


@dataclass(frozen=True, eq=False)
class LabeledOperator:
    """Square complex matrix with an explicit tensor-factor structure."""

    data: np.ndarray
    dims: tuple

    def __post_init__(self):
        data = np.array(self.data, dtype=complex)
        if data.ndim == 0:
            data = data.reshape(1, 1)
        dims = tuple(int(d) for d in self.dims)
        if any(d < 1 for d in dims):
            raise DimensionError(f"subsystem dimensions must be positive, got {dims}")
        n = _prod(dims)
        if data.shape != (n, n):
            raise DimensionError(f"matrix shape {data.shape} does not match dims {dims}")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self):
        return self.data.shape[0]

    @property
    def nsys(self):
        return len(self.dims)

    def trace(self):
        return complex(np.trace(self.data))

    def is_hermitian(self, tol=HERM_TOL):
        return bool(np.max(np.abs(self.data - self.data.conj().T), initial=0.0) <= tol)

    def hermitian_part(self):
        return LabeledOperator((self.data + self.data.conj().T) / 2, self.dims)

    def eigvalsh(self):
        return np.linalg.eigvalsh((self.data + self.data.conj().T) / 2)

    def is_psd(self, tol=PSD_TOL):
        return self.is_hermitian(max(tol, HERM_TOL)) and self.eigvalsh()[0] >= -tol

    def dag(self):
        return LabeledOperator(self.data.conj().T, self.dims)

    def allclose(self, other, atol=1e-10):
        return self.dims == other.dims and np.allclose(self.data, other.data, rtol=0, atol=atol)

    def _check(self, other):
        if self.dims != other.dims:
            raise DimensionError(f"dims differ: {self.dims} vs {other.dims}")

    def __add__(self, other):
        self._check(other)
        return LabeledOperator(self.data + other.data, self.dims)

    def __sub__(self, other):
        self._check(other)
        return LabeledOperator(self.data - other.data, self.dims)

    def __neg__(self):
        return LabeledOperator(-self.data, self.dims)

    def __mul__(self, c):
        return LabeledOperator(self.data * c, self.dims)

    __rmul__ = __mul__

    def __truediv__(self, c):
        return LabeledOperator(self.data / c, self.dims)

    def __matmul__(self, other):
        self._check(other)
        return LabeledOperator(self.data @ other.data, self.dims)

    def __repr__(self):
        return f"LabeledOperator(dims={list(self.dims)})"


def as_subsystems(indices, nsys):
    """Validate a set of subsystem positions and return it sorted."""
    if isinstance(indices, (int, np.integer)):
        indices = [indices]
    idx = sorted(int(i) for i in indices)
    if len(set(idx)) != len(idx):
        raise DimensionError(f"repeated subsystem index in {idx}")
    for i in idx:
        if i < 0 or i >= nsys:
            raise DimensionError(f"subsystem index {i} out of range for {nsys} systems")
    return tuple(idx)


def identity(dims):
    dims = tuple(dims)
    return LabeledOperator(np.eye(_prod(dims)), dims)


def ket_projector(index, dims):
    dims = tuple(dims)
    out = np.zeros((_prod(dims),) * 2)
    out[index, index] = 1.0
    return LabeledOperator(out, dims)


def kron(a, b, *more):
    out = LabeledOperator(np.kron(a.data, b.data), a.dims + b.dims)
    for c in more:
        out = kron(out, c)
    return out


# Index maps. These act on flattened (row-major) matrices and are cached per
# layout, so the same tables drive dense operations and the SDP compiler.


@lru_cache(maxsize=256)
def transpose_index(dims, on):
    """Permutation p with T_on(X).ravel() == X.ravel()[p]."""
    n = len(dims)
    D = _prod(dims)
    axes = list(range(2 * n))
    for k in on:
        axes[k], axes[n + k] = n + k, k
    p = np.arange(D * D).reshape(dims + dims).transpose(axes).ravel()
    p.setflags(write=False)
    return p


@lru_cache(maxsize=256)
def permute_index(dims, perm):
    """Permutation p reordering factors so that new factor k is old perm[k]."""
    n = len(dims)
    D = _prod(dims)
    axes = list(perm) + [n + k for k in perm]
    p = np.arange(D * D).reshape(dims + dims).transpose(axes).ravel()
    p.setflags(write=False)
    return p


@lru_cache(maxsize=256)
def trace_index(dims, over):
    """Index table t of shape (D_keep**2, D_over) with
    Tr_over(X).ravel() == X.ravel()[t].sum(axis=1)."""
    n = len(dims)
    keep = [k for k in range(n) if k not in over]
    D = _prod(dims)
    dk = _prod(dims[k] for k in keep)
    do = _prod(dims[k] for k in over)
    full = np.arange(D * D).reshape(dims + dims)
    axes = keep + [n + k for k in keep] + list(over) + [n + k for k in over]
    t = full.transpose(axes).reshape(dk * dk, do, do)
    t = np.ascontiguousarray(np.diagonal(t, axis1=1, axis2=2))
    t.setflags(write=False)
    return t


def partial_trace(x, over):
    over = as_subsystems(over, x.nsys)
    keep = tuple(d for k, d in enumerate(x.dims) if k not in over)
    if not over:
        return x
    n = x.nsys
    t = x.data.reshape(x.dims + x.dims)
    # Trace out from the highest index down so that axis positions stay valid.
    for k in reversed(over):
        t = np.trace(t, axis1=k, axis2=k + n)
        n -= 1
    dk = _prod(keep)
    return LabeledOperator(t.reshape(dk, dk), keep)


def partial_transpose(x, on):
    on = as_subsystems(on, x.nsys)
    if not on:
        return x
    p = transpose_index(x.dims, on)
    return LabeledOperator(x.data.ravel()[p].reshape(x.dim, x.dim), x.dims)


def permute(x, perm):
    """Reorder tensor factors: factor k of the result is factor perm[k] of x."""
    perm = tuple(int(k) for k in perm)
    if sorted(perm) != list(range(x.nsys)):
        raise DimensionError(f"{perm} is not a permutation of {x.nsys} systems")
    p = permute_index(x.dims, perm)
    dims = tuple(x.dims[k] for k in perm)
    return LabeledOperator(x.data.ravel()[p].reshape(x.dim, x.dim), dims)


def regroup(x, dims):
    """Relabel the factor structure without moving any entries."""
    dims = tuple(dims)
    if _prod(dims) != x.dim:
        raise DimensionError(f"cannot regroup {x.dims} as {dims}")
    return LabeledOperator(x.data, dims)


def trace_norm(x):
    data = x.data if isinstance(x, LabeledOperator) else np.asarray(x)
    return float(np.sum(np.linalg.svd(data, compute_uv=False)))


def sqrtm_psd(a):
    """Square root of a Hermitian PSD matrix, negative eigenvalues clamped."""
    a = (a + a.conj().T) / 2
    w, v = np.linalg.eigh(a)
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T


def _check_state(x, name, tol):
    if not x.is_hermitian(max(tol, HERM_TOL)):
        raise NotPSDError(f"{name} is not Hermitian")
    lo = x.eigvalsh()[0]
    if lo < -tol:
        raise NotPSDError(f"{name} has eigenvalue {lo:.3g} below -{tol:g}")
    if abs(x.trace() - 1) > max(tol, 1e-8):
        raise NotPSDError(f"{name} has trace {x.trace().real:.12g}, expected 1")


def state_fidelity(rho, sigma, tol=PSD_TOL):
    """||sqrt(rho) sqrt(sigma)||_1 squared."""
    if rho.dims != sigma.dims:
        raise DimensionError(f"dims differ: {rho.dims} vs {sigma.dims}")
    _check_state(rho, "rho", tol)
    _check_state(sigma, "sigma", tol)
    s = np.linalg.svd(sqrtm_psd(rho.data) @ sqrtm_psd(sigma.data), compute_uv=False)
    return float(min(max(np.sum(s) ** 2, 0.0), 1.0))
