"""Zero-set certificates built on inner-function norm sequences.

A sequence is a zero set exactly when ``sup_n ||J_n||`` is finite. Finitely
many norms can show growth past a threshold but never boundedness, so the
verdicts here are three-valued and boundedness is only certified for finite
configurations or through the Hardy product formula.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .engine import ZeroConfig, norm_sequence
from .errors import DomainError
from .spaces import DEFAULT_TOL, KernelNode, kernel_values

BOUNDED = "certified-bounded"
GROWING = "certified-growing"
INCONCLUSIVE = "inconclusive"

SS_MET = "sufficient-condition-met"
SS_NOT_MET = "not-met"

PSD_TOL = -1e-10
EIGH_MAX = 64


@dataclass
class ZeroSetVerdict:
    norms: list
    bounded: str
    bound_used: float
    psd_min_eigenvalues: list | None = None
    partial_products: list | None = None
    blaschke_sum: float | None = None
    extrapolated_sup: float | None = None
    note: str = ""

    def to_dict(self):
        return {
            "norms": list(self.norms),
            "bounded": self.bounded,
            "bound_used": self.bound_used,
            "psd_min_eigenvalues": self.psd_min_eigenvalues,
            "partial_products": self.partial_products,
            "blaschke_sum": self.blaschke_sum,
            "extrapolated_sup": self.extrapolated_sup,
            "note": self.note,
        }


def _take(points, n, finite=None):
    """First ``n`` points from a sequence or a callable ``j -> w_j`` (1-based).

    Returns ``(prefix, complete)`` where ``complete`` says the prefix is the
    whole (finite) configuration.
    """
    if callable(points):
        if finite:
            raise DomainError("a callable point source cannot be declared finite")
        return [complex(points(j)) for j in range(1, n + 1)], False
    pts = [complex(p) for p in points]
    complete = len(pts) <= n if finite is None else bool(finite) and len(pts) <= n
    return pts[:n], complete


def _check_points(pts):
    for p in pts:
        if p == 0 or not abs(p) < 1:
            raise DomainError(f"point {p!r} must lie in the punctured unit disk")


def blaschke_sum(points):
    """``sum (1 - |w_j|)`` over the given points."""
    pts = np.asarray(list(points), dtype=complex)
    if pts.size and np.any(np.abs(pts) >= 1):
        raise DomainError("points must lie inside the unit disk")
    return float(np.sum(1.0 - np.abs(pts)))


def _power_tail(values, index):
    """Envelope ``x_j <= C j**(-alpha)`` fitted on the second half of the data.

    ``alpha`` is the least-squares slope of ``log x`` against ``log j``; ``C``
    is then raised until the envelope covers every fitted sample.
    """
    x = np.asarray(values, dtype=float)
    j = np.asarray(index, dtype=float)
    keep = x > 0
    x, j = x[keep], j[keep]
    if x.size < 4:
        return None
    half = x.size // 2
    lx, lj = np.log(x[half:]), np.log(j[half:])
    slope = np.polyfit(lj, lx, 1)[0]
    alpha = -slope
    C = float(np.max(x[half:] * j[half:] ** alpha))
    return C, float(alpha)


def _tail_sum(C, alpha, n):
    """Upper bound on ``sum_{j>n} C j**(-alpha)`` for ``alpha > 1``."""
    return C * n ** (1 - alpha) / (alpha - 1)


def _hardy_oracle(pts, log_norm_n, source, n_max):
    """Extrapolated ``sup ||J_n|| = prod 1/|w_j|`` from a power-law tail fit."""
    n = len(pts)
    if callable(source):
        extra = [complex(source(j)) for j in range(n + 1, 4 * n + 1)]
    else:
        extra = [complex(p) for p in list(source)[n: 4 * n]]
    allpts = pts + extra
    gaps = 1.0 - np.abs(np.asarray(allpts))
    fit = _power_tail(gaps, np.arange(1, len(allpts) + 1))
    if fit is None:
        return None
    C, alpha = fit
    if alpha <= 1.0 + 1e-6:
        return None
    m = len(allpts)
    observed = float(np.sum(-np.log(np.abs(np.asarray(extra))))) if extra else 0.0
    xmax = C * (m + 1) ** (-alpha)
    if xmax >= 1:
        return None
    # -log(1 - x) <= x / (1 - x) for the unseen tail
    tail = _tail_sum(C, alpha, m) / (1.0 - xmax)
    return math.exp(log_norm_n + observed + tail)


def zero_set_certificate(space, points, n_max, bound, tol=DEFAULT_TOL, finite=None):
    """Three-valued zero-set verdict from the norms ``||J_1||..||J_{n_max}||``.

    Parameters
    ----------
    space : WeightSequence
    points : sequence of complex or callable
        Zeros ``w_1, w_2, ...``; a callable is called with ``j = 1, 2, ...``
        and treated as an infinite sequence.
    n_max : int
        Number of prefixes examined.
    bound : float
        Threshold whose crossing certifies growth.
    finite : bool, optional
        Whether ``points`` is the complete configuration. Defaults to true
        for a sequence of at most ``n_max`` points.
    """
    if n_max < 1:
        raise DomainError("n_max must be at least 1")
    if not bound > 1:
        raise DomainError("bound must exceed 1")
    pts, complete = _take(points, n_max, finite)
    _check_points(pts)
    norms = norm_sequence(space, ZeroConfig.from_points(pts), tol)
    bsum = blaschke_sum(pts)
    verdict = ZeroSetVerdict(list(norms), INCONCLUSIVE, float(bound), blaschke_sum=bsum)
    crossed = [i for i, v in enumerate(norms) if v > bound]
    if crossed:
        verdict.bounded = GROWING
        verdict.note = f"norm exceeds bound at n={crossed[0] + 1}"
        return verdict
    if complete:
        verdict.bounded = BOUNDED
        verdict.extrapolated_sup = norms[-1] if norms else 1.0
        verdict.note = "finite configuration"
        return verdict
    if space.family == "hardy" and norms:
        sup = _hardy_oracle(pts, math.log(norms[-1]), points, n_max)
        if sup is not None:
            verdict.extrapolated_sup = sup
            if sup <= bound:
                verdict.bounded = BOUNDED
                verdict.note = "Blaschke tail bound from power-law fit"
            else:
                verdict.note = "extrapolated supremum exceeds bound"
            return verdict
        verdict.note = "Blaschke tail not summable on observed data"
    else:
        verdict.note = "no analytic oracle for this space"
    return verdict


def _kernel_at(space, w_t, w_s, tol):
    return kernel_values(space, KernelNode(w_t, 0), np.array([w_s]), tol)[0]


def shapiro_shields_matrix(space, points, tol=DEFAULT_TOL):
    """``[1 - k_0(w_s) conj(k_0(w_t)) / (k_{w_t}(w_s) k_0(0))]``."""
    pts = [complex(p) for p in points]
    n = len(pts)
    k00 = 1.0 / space.weight(0)
    M = np.empty((n, n), dtype=complex)
    for t in range(n):
        kt = kernel_values(space, KernelNode(pts[t], 0), np.asarray(pts), tol)
        M[:, t] = 1.0 - k00 * k00 / (kt * k00)
    return 0.5 * (M + M.conj().T)


def _min_eig(M):
    if M.shape[0] <= EIGH_MAX:
        return float(np.linalg.eigvalsh(M)[0])
    # larger blocks: Cholesky of a shifted matrix answers the PSD question
    try:
        np.linalg.cholesky(M - PSD_TOL * np.eye(M.shape[0]))
        return 0.0
    except np.linalg.LinAlgError:
        return float(np.linalg.eigvalsh(M)[0])


def shapiro_shields(space, points, n_max, tol=DEFAULT_TOL):
    """PSD checks and partial products of the Shapiro-Shields condition.

    Returns
    -------
    min_eigs : list of float
        Smallest eigenvalue of each leading block.
    products : list of float
        ``prod_{m<=n} (1 - |k_0(w_m)|**2 / (k_{w_m}(w_m) k_0(0)))``.
    verdict : str
        ``'sufficient-condition-met'`` when every block is PSD and the
        products stay above a positive floor extrapolated from their tail,
        ``'not-met'`` when a block fails the PSD check, else ``'inconclusive'``.
    """
    pts, _ = _take(points, n_max)
    _check_points(pts)
    merged = ZeroConfig.from_points(pts)
    if any(m > 1 for m in merged.multiplicities):
        raise DomainError("shapiro_shields needs distinct points")
    M = shapiro_shields_matrix(space, pts, tol)
    min_eigs = [_min_eig(M[:n, :n]) for n in range(1, len(pts) + 1)]
    factors = np.real(np.diag(M))
    products = list(np.cumprod(factors))
    if any(e < PSD_TOL for e in min_eigs):
        return min_eigs, products, SS_NOT_MET
    x = 1.0 - factors
    if len(pts) <= n_max and not callable(points) and len(list(points)) <= n_max:
        # a finite list: the product is its last partial product
        return min_eigs, products, SS_MET if products[-1] > 0 else SS_NOT_MET
    fit = _power_tail(x, np.arange(1, x.size + 1))
    if fit is None or fit[1] <= 1 + 1e-6:
        return min_eigs, products, "inconclusive"
    C, alpha = fit
    xmax = C * (x.size + 1) ** (-alpha)
    if xmax >= 1:
        return min_eigs, products, "inconclusive"
    floor = products[-1] * math.exp(-_tail_sum(C, alpha, x.size) / (1 - xmax))
    return min_eigs, products, SS_MET if floor > 0 else "inconclusive"


@dataclass
class UnionInequality:
    union_norm: float
    bound: float
    holds: bool
    base_norm: float = field(default=math.nan)

    def to_dict(self):
        return {
            "union_norm": self.union_norm,
            "bound": self.bound,
            "holds": self.holds,
            "base_norm": self.base_norm,
        }


def blaschke_union_inequality(space, base_points, extra_points, tol=DEFAULT_TOL):
    """Check ``||J_{W u E}|| <= ||J_W|| / prod_{w in E} |w|`` for a contractive shift."""
    from .extra import shift_norm

    if shift_norm(space) > 1 + 1e-12:
        raise DomainError(f"space {space.name!r} has shift norm > 1")
    base = [complex(p) for p in base_points]
    extra = [complex(p) for p in extra_points]
    _check_points(base + extra)
    base_norm = norm_sequence(space, base, tol)[-1] if base else math.sqrt(space.weight(0))
    union = base + extra
    union_norm = norm_sequence(space, union, tol)[-1] if union else base_norm
    rhs = base_norm / float(np.prod(np.abs(extra))) if extra else base_norm
    holds = union_norm <= rhs + 1e-8
    if not holds:
        raise AssertionError(f"union inequality violated: {union_norm!r} > {rhs!r}")
    return UnionInequality(union_norm, rhs, holds, base_norm)


def verdict_trace_csv(verdict, min_eigs=None, products=None):
    """CSV text with columns ``n, norm, partial_product, min_eigenvalue``."""
    min_eigs = min_eigs if min_eigs is not None else verdict.psd_min_eigenvalues
    products = products if products is not None else verdict.partial_products
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["n", "norm", "partial_product", "min_eigenvalue"])
    for i, v in enumerate(verdict.norms):
        pp = repr(float(products[i])) if products is not None and i < len(products) else ""
        me = repr(float(min_eigs[i])) if min_eigs is not None and i < len(min_eigs) else ""
        writer.writerow([i + 1, repr(float(v)), pp, me])
    return buf.getvalue()
