"""Finite-dimensional T-inner vectors.

A vector ``v`` is T-inner when ``<v, T**n v> = 0`` for every ``n >= 1``.
``v - P v`` with ``P`` the orthogonal projection onto the Krylov span of
``Tv, T**2 v, ...`` is always T-inner or zero; ``krylov_inner`` builds it.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

MAX_DIM = 512


@dataclass
class OperatorSpec:
    matrix: np.ndarray
    label: str = ""
    approximate: bool = False
    tolerance_hint: float = 0.0

    def __post_init__(self):
        A = np.asarray(self.matrix, dtype=complex)
        if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
            raise DomainError("operator matrix must be square and nonempty")
        if A.shape[0] > MAX_DIM:
            raise DomainError(f"operator dimension {A.shape[0]} exceeds {MAX_DIM}")
        if not np.all(np.isfinite(A)):
            raise DomainError("operator matrix has non-finite entries")
        self.matrix = A

    @property
    def dim(self):
        return self.matrix.shape[0]

    def adjoint(self):
        return OperatorSpec(self.matrix.conj().T, (self.label + "*") if self.label else "",
                            self.approximate, self.tolerance_hint)

    def to_dict(self):
        return {
            "label": self.label,
            "dim": self.dim,
            "approximate": self.approximate,
            "tolerance_hint": self.tolerance_hint,
            "matrix": [[[z.real, z.imag] for z in row] for row in self.matrix],
        }


@dataclass
class InnerCandidate:
    vector: np.ndarray
    residuals: list
    tol: float
    certified: bool
    krylov_rank: int | None = None
    rank_cut_index: int | None = None
    extra: dict = field(default_factory=dict)

    def to_dict(self):
        out = {
            "vector": [[z.real, z.imag] for z in np.asarray(self.vector, complex)],
            "residuals": [float(r) for r in self.residuals],
            "residual_max": float(max(self.residuals, default=0.0)),
            "tol": self.tol,
            "certified": self.certified,
        }
        if self.krylov_rank is not None:
            out["krylov_rank"] = self.krylov_rank
            out["rank_cut_index"] = self.rank_cut_index
        out.update(self.extra)
        return out


def _vec(v, d=None):
    v = np.asarray(v, dtype=complex).ravel()
    if d is not None and v.size != d:
        raise DomainError(f"vector has length {v.size}, operator has dimension {d}")
    return v


def _op(T):
    return T if isinstance(T, OperatorSpec) else OperatorSpec(T)


def krylov_basis(T, v, tol=1e-12):
    """Orthonormal basis of ``span{Tv, T**2 v, ...}`` (Arnoldi form).

    Modified Gram-Schmidt with a second pass. The iteration stops once the
    orthogonal part of a new candidate falls below ``tol`` times the
    candidate's own norm (``||Tv||`` for the first one). Returns
    ``(Q, cut_index)`` where ``cut_index`` is the power ``n`` whose
    direction triggered the stop.
    """
    T = _op(T)
    v = _vec(v, T.dim)
    A = T.matrix
    w = A @ v
    Q = np.zeros((T.dim, 0), dtype=complex)
    cut = None
    for n in range(1, T.dim + 1):
        scale = np.linalg.norm(w)
        if scale == 0:
            cut = n
            break
        u = w.copy()
        for _ in range(2):
            for j in range(Q.shape[1]):
                u -= np.vdot(Q[:, j], u) * Q[:, j]
        nu = np.linalg.norm(u)
        if nu < tol * scale:
            cut = n
            break
        Q = np.column_stack([Q, u / nu])
        w = A @ Q[:, -1]
    return Q, cut if cut is not None else T.dim + 1


def krylov_inner(T, v, tol=1e-12):
    """``v - P v`` with ``P`` the orthogonal projection onto ``[Tv]``.

    Parameters
    ----------
    T : OperatorSpec or array_like
    v : array_like
        Nonzero starting vector.
    tol : float
        Relative rank cut for the Krylov orthonormalization.

    Returns
    -------
    numpy.ndarray
        A T-inner vector or zero.
    """
    T = _op(T)
    v = _vec(v, T.dim)
    if not np.any(v):
        raise DomainError("krylov_inner needs a nonzero vector")
    Q, _ = krylov_basis(T, v, tol)
    if Q.shape[1] == 0:
        return v.copy()
    out = v - Q @ (Q.conj().T @ v)
    # one refinement pass against cancellation
    return out - Q @ (Q.conj().T @ out)


def inner_residuals(T, v, n_max=None):
    """``|<v, T**n v>|`` for ``n = 1..n_max`` (default: the dimension)."""
    T = _op(T)
    v = _vec(v, T.dim)
    n_max = T.dim if n_max is None else int(n_max)
    res, w = [], v
    for _ in range(n_max):
        w = T.matrix @ w
        res.append(float(abs(np.vdot(w, v))))
    return res


def check_inner(T, v, n_max=None, tol=1e-12):
    """Residual certificate of the T-inner property.

    Certified when every ``|<v, T**n v>|`` is below ``tol``; residuals are
    absolute, so scale ``v`` before calling if that matters.
    """
    T = _op(T)
    v = _vec(v, T.dim)
    if not np.any(v):
        raise DomainError("check_inner needs a nonzero vector")
    res = inner_residuals(T, v, n_max)
    return InnerCandidate(v, res, float(tol), all(r < tol for r in res))


def adjoint_inner_check(T, v, n_max=None, tol=1e-12):
    """Whether ``v`` passes (or fails) the certificate for both ``T`` and ``T*``."""
    T = _op(T)
    a = check_inner(T, v, n_max, tol)
    b = check_inner(T.adjoint(), v, n_max, tol)
    return a.certified == b.certified


def make_example_operator(kind, params=None):
    """Catalog operators.

    ``kind`` is one of

    * ``compressed_shift`` with ``n``: ones on the subdiagonal;
    * ``compressed_shift_power`` with ``n, k``: ones on the ``k``-th subdiagonal;
    * ``toeplitz_truncation`` with ``coefficients, dim``: lower-triangular
      Toeplitz matrix of the symbol's Taylor coefficients;
    * ``weighted_shift`` with ``space, dim``: subdiagonal entries
      ``sqrt(lambda_{n+1} / lambda_n)``.
    """
    params = dict(params or {})
    try:
        if kind == "compressed_shift":
            n = int(params["n"])
            if n < 1:
                raise DomainError("n must be positive")
            return OperatorSpec(np.eye(n, k=-1, dtype=complex), f"compressed_shift({n})")
        if kind == "compressed_shift_power":
            n, k = int(params["n"]), int(params["k"])
            if n < 1 or k < 0:
                raise DomainError("need n >= 1 and k >= 0")
            return OperatorSpec(np.eye(n, k=-k, dtype=complex),
                                f"compressed_shift_power({n},{k})")
        if kind == "toeplitz_truncation":
            c = np.asarray(params["coefficients"], dtype=complex).ravel()
            dim = int(params["dim"])
            if dim < 1 or c.size == 0:
                raise DomainError("need dim >= 1 and at least one coefficient")
            col = np.zeros(dim, complex)
            col[: min(dim, c.size)] = c[:dim]
            A = np.zeros((dim, dim), complex)
            for j in range(dim):
                A[j:, j] = col[: dim - j]
            tail = float(np.sum(np.abs(c[dim:]))) if c.size > dim else 0.0
            return OperatorSpec(A, f"toeplitz_truncation({dim})", True, tail)
        if kind == "weighted_shift":
            from .spaces import space_from_spec

            space = params["space"]
            space = space_from_spec(space) if isinstance(space, (str, dict)) else space
            dim = int(params["dim"])
            if dim < 1:
                raise DomainError("dim must be positive")
            lam = space.weights(dim)
            A = np.diag(np.sqrt(lam[1:] / lam[:-1]).astype(complex), k=-1)
            return OperatorSpec(A, f"weighted_shift({space.name},{dim})")
    except KeyError as exc:
        raise DomainError(f"missing parameter {exc.args[0]!r} for {kind}") from None
    raise DomainError(f"unknown operator kind {kind!r}")


def blaschke_symbol(w, degree):
    """Taylor coefficients of ``(z - w) / (1 - conj(w) z)`` up to ``degree``."""
    w = complex(w)
    k = np.arange(degree + 1)
    geo = np.power(np.conj(w), k)
    c = -w * geo
    c[1:] += geo[:-1]
    return c


def _pair(x):
    if isinstance(x, (list, tuple)):
        if len(x) != 2:
            raise DomainError("complex entries are [re, im] pairs")
        return complex(float(x[0]), float(x[1]))
    return complex(x)


def load_operator_json(source):
    """Read ``{"matrix": [[[re, im], ...], ...], "vector": [[re, im], ...]}``.

    ``source`` is a path or an already parsed dict. Returns
    ``(OperatorSpec, vector or None)``.
    """
    if isinstance(source, dict):
        data = source
    else:
        with open(source, encoding="utf-8") as fh:
            data = json.load(fh)
    if "matrix" not in data:
        raise DomainError("operator file needs a 'matrix' entry")
    A = np.array([[_pair(x) for x in row] for row in data["matrix"]], dtype=complex)
    op = OperatorSpec(A, data.get("label", ""))
    v = data.get("vector")
    v = None if v is None else np.array([_pair(x) for x in v], dtype=complex)
    if v is not None:
        _vec(v, op.dim)
    return op, v
