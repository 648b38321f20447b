"""Birkhoff-James orthogonality and shift-inner functions in analytic l^p.

A function ``f = sum a_k z^k`` with ``sum |a_k|**p < inf`` is Birkhoff-James
orthogonal to ``g`` when ``||f + beta g||_p >= ||f||_p`` for every complex
``beta``; for ``1 < p < inf`` this is ``sum |a_k|**(p-2) conj(a_k) b_k = 0``.
Inner functions are ``J = f - P f`` with ``P`` the metric projection onto the
shifts ``z f, z**2 f, ...``, computed by a damped Newton method on
``sum |r_k|**p`` in a real parametrization.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .engine import ZeroConfig
from .errors import ConvergenceError, DomainError
from .spaces import _falling

logger = logging.getLogger(__name__)

WEIGHT_FLOOR = 1e-12
D_CAP = 1024
POLISH_STEPS = 20
NEWTON_ZONE = 1e-6
# single-solve routines have no doubling loop, so start generously
DUAL_DEFAULT_D = 64


def _check_p(p):
    p = float(p)
    if not 1 < p < math.inf:
        raise DomainError(f"p = {p} must lie in (1, inf)")
    return p


def conjugate_exponent(p):
    p = _check_p(p)
    return p / (p - 1.0)


@dataclass
class LpSeries:
    """Coefficients ``a_0..a_D`` of a function in analytic l^p."""

    coefficients: np.ndarray
    p: float

    def __post_init__(self):
        self.coefficients = np.atleast_1d(np.asarray(self.coefficients, dtype=complex))
        self.p = _check_p(self.p)
        if not np.all(np.isfinite(self.coefficients)):
            raise DomainError("coefficients must be finite")

    def __len__(self):
        return self.coefficients.size

    def norm(self):
        return lp_norm(self.coefficients, self.p)

    def padded(self, n):
        out = np.zeros(max(n, self.coefficients.size), dtype=complex)
        out[: self.coefficients.size] = self.coefficients
        return out

    def __call__(self, z):
        return np.polynomial.polynomial.polyval(np.asarray(z, dtype=complex), self.coefficients)


@dataclass
class DualSeries:
    """Dual coefficients acting by ``<f, l> = sum a_k l_k`` (no conjugation)."""

    coefficients: np.ndarray
    q: float

    def __post_init__(self):
        self.coefficients = np.atleast_1d(np.asarray(self.coefficients, dtype=complex))

    def norm(self):
        return lp_norm(self.coefficients, self.q)

    def apply(self, f):
        a = f.coefficients if isinstance(f, LpSeries) else np.asarray(f, dtype=complex)
        n = min(a.size, self.coefficients.size)
        return complex(np.sum(a[:n] * self.coefficients[:n]))


def lp_norm(a, p):
    a = np.abs(np.asarray(a, dtype=complex))
    m = float(a.max()) if a.size else 0.0
    if m == 0:
        return 0.0
    return m * float(np.sum((a / m) ** p)) ** (1.0 / p)


def _coef(x):
    return x.coefficients if isinstance(x, LpSeries) else np.asarray(x, dtype=complex)


def _duality_weights(a, p):
    """``|a|**(p-2) conj(a)`` with zero where ``a = 0``."""
    mag = np.abs(a)
    out = np.zeros_like(a)
    nz = mag > 0
    out[nz] = mag[nz] ** (p - 2) * np.conj(a[nz])
    return out


def bj_residual(f, g, p=None):
    """``sum |a_k|**(p-2) conj(a_k) b_k``: zero iff ``f`` is BJ-orthogonal to ``g``."""
    if p is None:
        p = f.p if isinstance(f, LpSeries) else None
    if p is None:
        raise DomainError("exponent p is required")
    a, b = _coef(f), _coef(g)
    if not np.any(a != 0):
        raise DomainError("orthogonality from the zero vector is undefined")
    n = max(a.size, b.size)
    a = np.pad(a, (0, n - a.size))
    b = np.pad(b, (0, n - b.size))
    return complex(np.sum(_duality_weights(a, p) * b))


def norming_functional(f, check_tol=1e-12):
    """The unit functional ``l`` with ``l(f) = ||f||_p``."""
    a = _coef(f)
    p = f.p
    nrm = lp_norm(a, p)
    if nrm == 0:
        raise DomainError("the zero vector has no norming functional")
    # scale first so |a|**(p-2) cannot overflow or underflow
    u = a / nrm
    ell = DualSeries(_duality_weights(u, p), conjugate_exponent(p))
    val = ell.apply(a)
    if abs(val - nrm) > check_tol * nrm or abs(ell.norm() - 1) > check_tol:
        raise AssertionError("norming functional failed its certificate")
    return ell


@dataclass
class ProjectionResult:
    projection: LpSeries
    residual: LpSeries
    beta: np.ndarray
    bj_residuals: np.ndarray
    iterations: int

    def __iter__(self):
        yield self.projection
        yield self.residual

    @property
    def bj_max(self):
        return float(np.max(np.abs(self.bj_residuals))) if self.bj_residuals.size else 0.0


def _as_matrix(basis, length):
    if isinstance(basis, np.ndarray) and basis.ndim == 2:
        B = np.asarray(basis, dtype=complex)
        if B.shape[0] < length:
            B = np.vstack([B, np.zeros((length - B.shape[0], B.shape[1]), complex)])
        return B
    cols = [_coef(b) for b in basis]
    n = max([length] + [c.size for c in cols])
    B = np.zeros((n, len(cols)), dtype=complex)
    for j, c in enumerate(cols):
        B[: c.size, j] = c
    return B


def relative_bj(r, B, p):
    """``|bj(r, B_j)| / (||r||**(p-1) ||B_j||)`` for every column."""
    nr = lp_norm(r, p)
    if nr == 0:
        return np.zeros(B.shape[1])
    w = _duality_weights(r / nr, p)
    raw = np.abs(w @ B)
    cn = np.array([lp_norm(B[:, j], p) for j in range(B.shape[1])])
    return raw / np.where(cn > 0, cn, 1.0)


def certificate_tolerance(p, tol):
    """Attainable relative BJ tolerance in double precision.

    For ``p < 2`` the map ``r -> |r|**(p-2) conj(r)`` is only Holder with
    exponent ``p - 1``, so roundoff of size ``eps`` in a coordinate that should
    vanish shows up as ``eps**(p-1)`` in the residual.
    """
    eps = np.finfo(float).eps
    return max(tol, 100 * eps ** min(1.0, p - 1.0))


def coefficient_tolerance(p):
    """Resolution of projection coefficients from a certified BJ residual.

    Above ``p = 2`` the objective is flat near small coordinates and a BJ
    residual of ``eps`` only pins them to about ``eps**(1/(p-1))``.
    """
    eps = np.finfo(float).eps
    return max(1e-7, 10 * eps ** (1.0 / max(1.0, p - 1.0)))


def metric_project(f, basis, tol=1e-10, p=None, max_iter=200, beta0=None):
    """Nearest point to ``f`` in the span of ``basis`` for the l^p norm.

    Parameters
    ----------
    f : LpSeries
    basis : list of LpSeries or ndarray of shape (length, m)
    tol : float
        Certificate: every relative BJ residual
        ``|bj(f - proj, b_j)| / (||f - proj||**(p-1) ||b_j||)`` must be below
        it (raised to ``certificate_tolerance(p, tol)`` when ``p < 2``).

    Returns
    -------
    ProjectionResult
        Unpacks as ``(projection, residual)``.

    Raises
    ------
    ConvergenceError
        The certificate was not met within ``max_iter`` Newton steps.
    """
    p = _check_p(f.p if p is None else p)
    eff_tol = certificate_tolerance(p, tol)
    a = _coef(f)
    B = _as_matrix(basis, a.size)
    K, m = B.shape
    a = np.pad(a, (0, K - a.size))
    if m == 0:
        z = np.zeros(K, complex)
        return ProjectionResult(LpSeries(z, p), LpSeries(a, p), np.zeros(0, complex), np.zeros(0), 0)
    scale = lp_norm(a, p)
    if scale == 0:
        z = np.zeros(K, complex)
        return ProjectionResult(LpSeries(z, p), LpSeries(z, p), np.zeros(m, complex), np.zeros(m), 0)
    a = a / scale
    cn = np.array([lp_norm(B[:, j], p) for j in range(m)])
    if np.any(cn == 0):
        raise DomainError("basis contains a zero vector")
    # Newton runs on an orthonormal basis of the same span: the shifts
    # z^m f are nearly dependent when f has zeros inside the disk
    Qb, Rb = np.linalg.qr(B / cn)
    Bs = Qb
    P, Q = Bs.real, Bs.imag
    R1 = np.hstack([P, -Q])
    R2 = np.hstack([Q, P])

    def resid(x):
        beta = x[:m] + 1j * x[m:]
        return a - Bs @ beta

    def phi(r):
        return float(np.sum(np.abs(r) ** p))

    if beta0 is not None:
        g0 = Rb @ (np.asarray(beta0, dtype=complex) * cn) / scale
    else:
        g0 = np.conj(Qb.T) @ a  # least squares start: exact at p = 2
    x = np.concatenate([g0.real, g0.imag])
    r = resid(x)
    val = phi(r)
    history = []
    it = 0

    def hessian(w11, w22, w12):
        H = R1.T @ (w11[:, None] * R1) + R2.T @ (w22[:, None] * R2)
        C = R1.T @ (w12[:, None] * R2)
        return H + C + C.T

    def solve(H, g, mu):
        # Levenberg shift relative to the largest curvature: for p > 2 the
        # Hessian degenerates where coordinates of r are tiny
        shift = mu * max(float(np.max(np.diag(H))), 1e-300)
        try:
            return np.linalg.solve(H + shift * np.eye(H.shape[0]), -g)
        except np.linalg.LinAlgError:
            return None

    mu = 1e-12
    polish = 0
    for it in range(1, max_iter + 1):
        rel = relative_bj(r, Bs, p)
        history.append(float(rel.max()))
        if rel.max() < eff_tol:
            # a few extra steps while they still pay: for p > 2 small
            # coordinates are weakly determined by the certificate alone
            if polish >= POLISH_STEPS or (polish and history[-1] > 0.5 * history[-2]):
                break
            polish += 1
        mag = np.abs(r)
        mg = np.maximum(mag, WEIGHT_FLOOR * mag.max())
        G = (mg ** (p - 2) * r) @ np.conj(Bs)
        grad = -p * np.concatenate([G.real, G.imag])
        u1, u2 = r.real / mg, r.imag / mg
        base = p * mg ** (p - 2)
        H = hessian(base * (1 + (p - 2) * u1 * u1),
                    base * (1 + (p - 2) * u2 * u2),
                    base * (p - 2) * u1 * u2)
        accepted = False
        while not accepted and mu < 1e6:
            step = solve(H, grad, mu)
            if step is None:
                mu *= 100
                continue
            slope = float(grad @ step)
            if history[-1] < NEWTON_ZONE:
                # near the optimum the objective stops resolving progress in
                # floating point; Newton steps are judged by the residual
                xn = x + step
                rn = resid(xn)
                vn = phi(rn)
                accepted = relative_bj(rn, Bs, p).max() < history[-1]
            t = 1.0
            while not accepted and t >= 0.125:
                xn = x + t * step
                rn = resid(xn)
                vn = phi(rn)
                accepted = vn < val and vn <= val + 1e-4 * t * slope
                t *= 0.5
            if p < 2:
                # Newton overshoots where |r_k|**p is sharply curved; the
                # reweighted least-squares step minimizes a quadratic
                # majorant, so keep whichever of the two lands lower
                s2 = solve(hessian(base, base, np.zeros_like(base)), grad, mu)
                if s2 is not None:
                    x2 = x + s2
                    r2 = resid(x2)
                    v2 = phi(r2)
                    if v2 < val and (not accepted or v2 < vn):
                        xn, rn, vn, accepted = x2, r2, v2, True
            mu = max(mu / 10, 1e-14) if accepted else mu * 100
        if not accepted:
            # nothing left to gain in floating point; the certificate decides
            break
        x, r, val = xn, rn, vn
    rel = relative_bj(r, B, p)
    history.append(float(rel.max()))
    gamma = x[:m] + 1j * x[m:]
    beta = scipy.linalg.solve_triangular(Rb, gamma) / cn * scale
    proj = LpSeries(Qb @ gamma * scale, p)
    f0 = _coef(f)
    res = LpSeries(np.pad(f0, (0, K - f0.size)) - proj.coefficients, p)
    out = ProjectionResult(proj, res, beta, rel, it)
    if rel.max() >= eff_tol:
        raise ConvergenceError(
            f"metric projection not certified: relative BJ residual {rel.max():.3g} >= {eff_tol:g}",
            last=out,
            residuals=history,
        )
    return out


def _shift_basis(f, D, length=None):
    """Columns ``z**m f`` for ``m = 1..D`` as a dense matrix."""
    f = np.asarray(f, dtype=complex)
    K = f.size + D if length is None else length
    B = np.zeros((K, D), dtype=complex)
    for m in range(1, D + 1):
        B[m: m + f.size, m - 1] = f[: max(0, K - m)]
    return B


def _config(points):
    if isinstance(points, ZeroConfig):
        return points
    return ZeroConfig.from_points(list(points))


@dataclass
class LpInnerReport:
    p: float
    D: int
    norms_by_D: list
    bj_residuals: list
    bj_residual_max: float
    coefficient_change: float
    points: list = field(default_factory=list)

    def to_dict(self):
        return {
            "p": self.p,
            "D": self.D,
            "norms_by_D": [[d, v] for d, v in self.norms_by_D],
            "bj_residuals": list(self.bj_residuals),
            "bj_residual_max": self.bj_residual_max,
            "coefficient_change": self.coefficient_change,
        }


def _constraint_basis(config, K):
    """Orthonormal basis of ``{h : deg h <= K, h(0) = 0, h = 0 on config}``.

    This is the span of ``z f, ..., z**(K - deg f) f``; the shifts themselves
    are too ill-conditioned to use as coordinates (condition numbers grow
    like ``|1/w|**D``).
    """
    A = np.vstack([np.eye(1, K + 1, dtype=complex), _dual_vectors(config, K).T])
    return scipy.linalg.null_space(A)


def _project_inner(p, config, K, tol):
    f = config.polynomial()
    fs = LpSeries(np.pad(f, (0, K + 1 - f.size)), p)
    return metric_project(fs, _constraint_basis(config, K), tol=tol)


def shift_residuals(J, f, D, p):
    """Relative BJ residuals of ``J`` against ``z**m f`` for ``m = 1..D``."""
    a = J.coefficients
    cols = _shift_basis(np.asarray(f, dtype=complex), D, max(a.size, f.size + D))
    a = np.pad(a, (0, cols.shape[0] - a.size))
    return relative_bj(a, cols, p)


def lp_inner_function(p, points, D=None, tol=1e-10, D_max=D_CAP):
    """``J = f_n - P f_n`` with ``P`` the metric projection onto ``[z f_n]``.

    The multiplier degree starts at ``D`` (default ``deg f_n + 8``) and is
    doubled until ``||J||_p`` changes by less than ``tol`` relative and the
    coefficients by less than ``coefficient_tolerance(p)``. Returns
    ``(J, report)``.
    """
    p = _check_p(p)
    config = _config(points)
    f = config.polynomial()
    d = f.size - 1
    if D is None:
        D = d + 8
    if D < d + 8:
        raise DomainError(f"multiplier degree D must be at least deg f + 8 = {d + 8}")
    if d == 0:
        J = LpSeries(np.array([1.0 + 0j]), p)
        return J, LpInnerReport(p, 0, [(0, 1.0)], [], 0.0, 0.0)
    norms, prev, change = [], None, math.inf
    coef_tol = coefficient_tolerance(p)
    while True:
        res = _project_inner(p, config, d + D, tol)
        J = res.residual
        nrm = J.norm()
        if norms and nrm > norms[-1][1] * (1 + 1e-9):
            raise ConvergenceError("projection norms increased with D", last=J, residuals=norms)
        norms.append((D, nrm))
        if prev is not None:
            change = float(np.max(np.abs(J.padded(len(J)) - prev.padded(len(J)))))
            if change < coef_tol and abs(norms[-1][1] - norms[-2][1]) < tol * nrm:
                break
        if 2 * D > D_max:
            raise ConvergenceError(
                f"lp inner function unresolved at D = {D}", last=J, residuals=norms
            )
        prev = J
        D *= 2
    bj = shift_residuals(J, f, D, p)
    eff = certificate_tolerance(p, tol)
    report = LpInnerReport(p, D, norms, [float(v) for v in bj], float(bj.max()), change,
                           list(config.points))
    if bj.max() >= eff:
        raise ConvergenceError(
            f"lp inner function not certified: shift residual {bj.max():.3g}", last=J,
            residuals=report.bj_residuals,
        )
    return J, report


def _dual_vectors(config, K):
    k = np.arange(K + 1)
    cols = []
    for w, mult in zip(config.points, config.multiplicities):
        for s in range(mult):
            cols.append(_falling(k, s) * np.power(complex(w), np.maximum(k - s, 0)))
    return np.column_stack(cols) if cols else np.zeros((K + 1, 0), complex)


def dual_infimum_norm(p, points, D=None, tol=1e-10):
    """``1 / inf_b ||k_0 + sum b_j k_j||_q`` with ``k_j = (w_j**k)_{k<=K}``.

    ``K = deg f_n + D`` matches the ambient degree of ``lp_inner_function``
    run at multiplier degree ``D``; at equal ``K`` the two agree exactly.
    """
    p = _check_p(p)
    q = conjugate_exponent(p)
    config = _config(points)
    d = config.degree
    if D is None:
        D = max(d + 8, DUAL_DEFAULT_D)
    K = d + D
    e0 = np.zeros(K + 1, complex)
    e0[0] = 1.0
    if d == 0:
        return 1.0
    V = _dual_vectors(config, K)
    res = metric_project(LpSeries(e0, q), V, tol=tol)
    return 1.0 / res.residual.norm()


def lp_zero_set_trace(p, points, n_max=None, D=None, tol=1e-10):
    """``||J_n||_p`` over prefixes with one ambient degree ``K`` for all ``n``.

    With ``K`` fixed every ``J_n`` minimizes ``||h||_p`` over polynomials of
    degree at most ``K`` with ``h(0) = 1`` vanishing on the first ``n``
    points; these sets shrink with ``n``, so the trace is nondecreasing.
    """
    p = _check_p(p)
    config = _config(points)
    n_max = len(config) if n_max is None else min(n_max, len(config))
    full = config.prefix(n_max)
    if D is None:
        D = max(full.degree + 8, DUAL_DEFAULT_D)
    K = full.degree + D
    norms = []
    for n in range(1, n_max + 1):
        res = _project_inner(p, config.prefix(n), K, tol)
        v = res.residual.norm()
        if norms and v < norms[-1] * (1 - 1e-8):
            raise ConvergenceError(
                f"lp norm trace decreased at n={n}", last=v, residuals=norms
            )
        norms.append(v)
    return norms


def lp_naive_one_point(p, w, degree=60):
    """Taylor coefficients of ``(1 - z/w) / (1 - |w|**(p-2) conj(w) z)`` to ``degree``."""
    p = _check_p(p)
    w = complex(w)
    if not 0 < abs(w) < 1:
        raise DomainError("need 0 < |w| < 1")
    c = abs(w) ** (p - 2) * np.conj(w)
    return _one_zero_series(w, c, degree, p)


def _one_zero_series(w, c, degree, p):
    k = np.arange(degree + 1)
    geo = np.power(c, k)
    a = geo.copy()
    a[1:] -= geo[:-1] / w
    return LpSeries(a, p)


def lp_one_point_inner(p, w, degree=60):
    """Exact one-zero l^p inner function ``(1 - z/w) / (1 - |w|**(q-2) conj(w) z)``.

    ``q`` is the conjugate exponent, so ``|c| = |w|**(1/(p-1))``; at ``p = 2``
    this is the Hardy factor. Returns ``(J, c)`` with ``J`` truncated to
    ``degree``.
    """
    p = _check_p(p)
    w = complex(w)
    if not 0 < abs(w) < 1:
        raise DomainError("need 0 < |w| < 1")
    q = conjugate_exponent(p)
    c = abs(w) ** (q - 2) * np.conj(w)
    return _one_zero_series(w, c, degree, p), c
