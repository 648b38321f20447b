"""Extra zeros of inner functions and the operator-norm bound that excludes them.

An inner function ``J_n`` may vanish at points outside its prescribed
configuration. Any such zero ``w`` satisfies

    |w| >= sqrt(1 + ||S||^2 ||Q_w||^2) / (||Q_0|| ||S|| ||Q_w||)

where ``S`` is the shift, ``Q_0`` the backward shift and
``Q_w f = (f - f(w)) / (z - w)``. When ``||Q_0|| <= 1`` the right side is at
least one, so no extra zero lies in the disk.
"""
from __future__ import annotations

import csv
import io
import logging
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .engine import ZeroConfig, build_gram, solve_inner
from .errors import DomainError, InconclusiveError
from .spaces import DEFAULT_TOL, KernelNode

logger = logging.getLogger(__name__)

_NAMED_NORMS = {
    # (shift, backward shift)
    "hardy": (1.0, 1.0),
    "dirichlet": (math.sqrt(2.0), 1.0),
    "bergman": (1.0, math.sqrt(2.0)),
    "korenblum": (2.0, 1.0),
}

RATIO_START = 512
RATIO_CAP = 8192
QW_CAP = 2048
DENSE_MAX = 256


def _ratio_sup(space, backward):
    """Supremum of ``sqrt(lam[n+1]/lam[n])`` (or its reciprocal) over all ``n``."""
    if space.family in _NAMED_NORMS:
        return _NAMED_NORMS[space.family][1 if backward else 0]
    if space.family == "custom":
        m = space._custom.size + 2
        inv = space.inverse_weights(m)
        r = inv[1:] / inv[:-1] if backward else inv[:-1] / inv[1:]
        return float(math.sqrt(max(1.0, np.max(r))))
    N = RATIO_START
    while N <= RATIO_CAP:
        inv = space.inverse_weights(N + 1)
        good = inv > 0
        if not np.all(good):
            break
        # lam[n+1]/lam[n] = inv[n]/inv[n+1]
        r = inv[1:] / inv[:-1] if backward else inv[:-1] / inv[1:]
        k = int(np.argmax(r))
        # accept once the supremum sits well inside the computed range and
        # the ratios have settled below it
        if k < N // 2 and np.max(r[N // 2:]) < r[k]:
            return float(math.sqrt(r[k]))
        N *= 2
    raise InconclusiveError(
        f"weight-ratio supremum of {space.name!r} not resolved within {RATIO_CAP} terms"
    )


def shift_norm(space):
    """``sup_n sqrt(lam[n+1] / lam[n])``."""
    return _ratio_sup(space, backward=False)


def backward_shift_norm(space):
    """``sup_n sqrt(lam[n] / lam[n+1])``."""
    return _ratio_sup(space, backward=True)


@dataclass
class OperatorNormReport:
    shift_norm: float
    backward_shift_norm: float
    qw_norm: float
    truncation_degree: int
    converged: bool
    lower_bound: float = math.nan
    history: tuple = ()

    def to_dict(self):
        return {
            "shift_norm": self.shift_norm,
            "backward_shift_norm": self.backward_shift_norm,
            "qw_norm": self.qw_norm,
            "lower_bound": self.lower_bound,
            "truncation_degree": self.truncation_degree,
            "converged": self.converged,
        }


def _qw_truncated_norm(space, w, N, x0=None, iters=3000):
    """Largest singular value of ``Q_w`` restricted to degrees ``0..N``.

    In the orthonormal monomial basis ``Q_w`` has entries
    ``w**(n-1-j) sqrt(lam[j]/lam[n])`` for ``j < n``. At ``w = 0`` this is a
    weighted backward shift whose norm is its largest weight. Otherwise small
    truncations go to LAPACK and larger ones to power iteration on
    ``M^H M``, warm-started from the previous truncation's singular vector;
    ``M x`` and ``M^H y`` are first-order recursions run with ``lfilter``.

    Returns
    -------
    sigma : float
    vector : ndarray or None
        Approximate right singular vector (for warm starts).
    """
    lam = space.weights(N + 1)
    sq = np.sqrt(lam)
    w = complex(w)
    if w == 0:
        return float(np.max(np.sqrt(lam[:-1] / lam[1:]))), None

    def mv(x):
        u = x / sq
        # (T u)_j = u_{j+1} + w (T u)_{j+1}, run from the top index down
        s = np.concatenate([[0.0], u[:0:-1]])
        y = lfilter([1.0], [1.0, -w], s)[::-1]
        return sq * y

    def rmv(y):
        z = lfilter([0.0, 1.0], [1.0, -np.conj(w)], sq * y)
        return z / sq

    if N <= DENSE_MAX:
        j = np.arange(N + 1)
        k = j[None, :] - 1 - j[:, None]
        T = np.where(k >= 0, w ** np.maximum(k, 0), 0)
        M = sq[:, None] * T / sq[None, :]
        U, sv, Vh = np.linalg.svd(M)
        return float(sv[0]), Vh[0].conj()
    if x0 is None:
        x = np.ones(N + 1, dtype=complex)
    else:
        x = np.zeros(N + 1, dtype=complex)
        x[: x0.size] = x0
        x += 1e-8
    x /= np.linalg.norm(x)
    sigma = 0.0
    for _ in range(iters):
        y = mv(x)
        sig_new = float(np.linalg.norm(y))
        x = rmv(y)
        nx = np.linalg.norm(x)
        if nx == 0 or sig_new == 0:
            return 0.0, None
        x = x / nx
        if abs(sig_new - sigma) <= 1e-15 * sig_new:
            sigma = sig_new
            break
        sigma = sig_new
    return sigma, x


def qw_norm_estimate(space, w, degree=8, tol=1e-6, cap=QW_CAP):
    """Estimate ``||Q_w||`` by truncation with doubling degree.

    Each truncation is a compression of ``Q_w`` and so a lower bound. The
    reported ``qw_norm`` is the Richardson extrapolation ``2 s(2N) - s(N)``
    (never below the best lower bound); ``converged`` means two successive
    truncations, or two successive extrapolations, differ by less than
    ``tol`` relative.
    """
    w = complex(w)
    if not abs(w) < 1:
        raise DomainError(f"w = {w!r} is not inside the unit disk")
    if degree < 8:
        raise DomainError("degree must be at least 8")
    N = int(degree)
    sig, vec = _qw_truncated_norm(space, w, N)
    hist = [(N, sig)]
    extrap = []
    converged = False
    while 2 * N <= cap:
        N *= 2
        sig, vec = _qw_truncated_norm(space, w, N, vec)
        hist.append((N, sig))
        s_prev, s_new = hist[-2][1], hist[-1][1]
        extrap.append(max(s_new, 2 * s_new - s_prev))
        if abs(s_new - s_prev) <= tol * s_new:
            converged = True
            break
        if len(extrap) >= 2 and abs(extrap[-1] - extrap[-2]) <= tol * extrap[-1]:
            converged = True
            break
    lower = max(s for _, s in hist)
    est = extrap[-1] if extrap else lower
    try:
        S, Q0 = shift_norm(space), backward_shift_norm(space)
    except InconclusiveError:
        S = Q0 = math.nan
    return OperatorNormReport(S, Q0, float(est), N, converged, float(lower), tuple(hist))


def _bound_from_norms(S, Q0, Q):
    return math.sqrt(1.0 + S * S * Q * Q) / (Q0 * S * Q)


def extra_zero_lower_bound(space, w, return_report=False):
    """Right-hand side of the extra-zero modulus bound at ``w``.

    With ``return_report=True`` also returns the ``OperatorNormReport``; an
    unconverged ``||Q_w||`` is logged since the bound then rests on an
    estimate rather than a limit.
    """
    rep = qw_norm_estimate(space, w)
    if not rep.converged:
        logger.warning("||Q_w|| unconverged at w=%s; bound is an estimate", w)
    b = _bound_from_norms(shift_norm(space), backward_shift_norm(space), rep.qw_norm)
    return (b, rep) if return_report else b


def _det_r(G):
    """Determinant of rows ``1..n``, columns ``0..n-1`` and the row-scaled modulus."""
    R = G[1:, :-1]
    if R.size == 0:
        return 1.0 + 0j, 1.0
    rows = np.linalg.norm(R, axis=1)
    lu, piv = _lu(R / rows[:, None])
    d = np.diag(lu)
    swaps = int(np.sum(piv != np.arange(piv.size)))
    logabs = float(np.sum(np.log(np.abs(d)))) if np.all(d != 0) else -math.inf
    phase = complex(np.prod(d / np.where(d == 0, 1, np.abs(d))))
    if swaps % 2:
        phase = -phase
    rel = math.exp(logabs) if math.isfinite(logabs) else 0.0
    det = phase * math.exp(logabs + float(np.sum(np.log(rows)))) if math.isfinite(logabs) else 0j
    return det, rel


def _lu(A):
    import scipy.linalg

    with warnings.catch_warnings():
        # an exactly singular R is a legitimate answer (det R = 0), not an error
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        return scipy.linalg.lu_factor(A, check_finite=False)


def det_r_residual(space, zeros, candidate, tol=DEFAULT_TOL, relative=False):
    """``det R`` for the Gram matrix over ``k_0, k_{w_1}, ..., k_{w_{n-1}}, k_c``.

    ``R`` keeps rows ``1..n`` and columns ``0..n-1`` of ``G[s, t] = <k_t, k_s>``.
    It vanishes exactly when ``J_{n-1}(c) = 0``, through
    ``det R = (-1)**(n-1) J_{n-1}(c) det G[k_0..k_{n-1}]``.

    With ``relative=True`` returns ``|det R|`` divided by the product of the
    row norms of ``R`` instead (a scale-free residual in ``[0, 1]``).
    """
    zeros = [complex(p) for p in zeros]
    c = complex(candidate)
    for p in zeros + [c]:
        if p == 0 or not abs(p) < 1:
            raise DomainError(f"point {p!r} must lie in the punctured unit disk")
    if any(abs(c - p) < 1e-12 for p in zeros):
        raise DomainError("candidate coincides with a prescribed zero")
    nodes = [KernelNode(0j, 0)] + [KernelNode(p, 0) for p in zeros + [c]]
    G = build_gram(space, nodes, tol, check=False).matrix
    det, rel = _det_r(G)
    return rel if relative else det


def phi_space_extra_zero(a1, a2, w):
    """Explicit extra zero ``-(a1 + a2 |w|**2) / (a2 conj(w))`` of a one-point J."""
    w = complex(w)
    if not a1 > 0:
        raise DomainError("need a1 > 0")
    if not a2 > 4 * a1:
        raise DomainError(f"need a2 > 4 a1 (a1={a1}, a2={a2})")
    if a1 + a2 > 1:
        raise DomainError("need a1 + a2 <= 1")
    if not 0 < abs(w) < 1:
        raise DomainError("need 0 < |w| < 1")
    r = abs(w)
    if not r - r * r > a1 / a2:
        raise DomainError(f"need |w| - |w|^2 > a1/a2 ({r - r * r:.6g} <= {a1 / a2:.6g})")
    return -(a1 + a2 * r * r) / (a2 * np.conj(w))


@dataclass
class ExtraZeroFinding:
    location: complex
    residual: float
    det_r_residual: complex
    bound: float
    bound_satisfied: bool
    refined: bool = True
    det_r_relative: float = math.nan
    cell: tuple | None = None

    def to_dict(self):
        return {
            "location": [self.location.real, self.location.imag],
            "residual": self.residual,
            "det_r_residual": [self.det_r_residual.real, self.det_r_residual.imag],
            "det_r_relative": self.det_r_relative,
            "bound": self.bound,
            "bound_satisfied": self.bound_satisfied,
            "refined": self.refined,
            "cell": None if self.cell is None else list(self.cell),
        }


@dataclass
class ScanResult:
    findings: list
    radii: np.ndarray
    angles: np.ndarray
    modulus: np.ndarray

    def heatmap_csv(self):
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["r", "theta", "abs_J"])
        for i, r in enumerate(self.radii):
            for j, t in enumerate(self.angles):
                wr.writerow([repr(float(r)), repr(float(t)), repr(float(self.modulus[i, j]))])
        return buf.getvalue()


def _newton(rep, z0, tol=1e-12, maxit=60):
    """Damped Newton on ``J``: steps are halved until ``|J|`` decreases."""
    z = complex(z0)
    fz = rep.values(np.array([z]))[0]
    for _ in range(maxit):
        df = rep.values(np.array([z]), dz=1)[0]
        if df == 0:
            return z, False
        step = fz / df
        t = 1.0
        while t > 1e-6:
            zn = z - t * step
            if abs(zn) < 1:
                fn = rep.values(np.array([zn]))[0]
                if abs(fn) < abs(fz) or abs(t * step) < tol:
                    break
            t *= 0.5
        else:
            return z, False
        z, fz = zn, fn
        if abs(t * step) < tol or fz == 0:
            return z, True
    return z, False


def scan_extra_zeros(space, config, r_max=0.99, grid_resolution=(256, 128), tol=1e-8,
                     return_scan=False):
    """Locate zeros of ``J_n`` in ``|z| <= r_max`` other than the prescribed ones.

    Parameters
    ----------
    grid_resolution : (int, int)
        Number of angles and radii of the polar grid.
    tol : float
        Largest ``|J|`` accepted at a refined zero.
    """
    if not 0 < r_max < 1:
        raise DomainError("r_max must lie in (0, 1)")
    if not isinstance(config, ZeroConfig):
        config = ZeroConfig.from_points(config)
    rep = solve_inner(space, config)
    n_ang, n_rad = (int(v) for v in grid_resolution)
    radii = np.linspace(r_max / n_rad, r_max, n_rad)
    angles = np.linspace(0.0, 2 * np.pi, n_ang, endpoint=False)
    Z = radii[:, None] * np.exp(1j * angles)[None, :]
    Jv = rep.values(Z)
    A = np.abs(Jv)

    candidates = []
    for i in range(n_rad):
        for j in range(n_ang):
            nb = []
            for di in (-1, 0, 1):
                ii = i + di
                if ii < 0 or ii >= n_rad:
                    continue
                for dj in (-1, 0, 1):
                    if di == 0 and dj == 0:
                        continue
                    nb.append((ii, (j + dj) % n_ang))
            if any(A[p] < A[i, j] for p in nb):
                continue
            dist = np.array([abs(Z[p] - Z[i, j]) for p in nb])
            lip = max(abs(Jv[p] - Jv[i, j]) / d for p, d in zip(nb, dist))
            if A[i, j] < 10 * lip * dist.max():
                candidates.append((i, j))

    prescribed = list(config.points)
    findings = []
    for i, j in candidates:
        z, ok = _newton(rep, Z[i, j])
        res = float(abs(rep.values(np.array([z]))[0])) if abs(z) < 1 else math.inf
        if ok and (res >= tol or abs(z) > r_max + 1e-9):
            # converged, but to a point that is not a zero inside the scanned disk
            logger.debug("dropped scan candidate near %s (|J| = %.3g)", Z[i, j], res)
            continue
        if not ok:
            # damped Newton stalled; keep the grid cell so the miss is visible
            z, res = complex(Z[i, j]), float(A[i, j])
        if any(abs(z - p) <= 1e-6 for p in prescribed):
            continue
        if any(abs(z - f.location) <= 1e-6 for f in findings):
            continue
        det = det_r_residual(space, prescribed, z)
        rel = det_r_residual(space, prescribed, z, relative=True)
        bound = extra_zero_lower_bound(space, z)
        findings.append(
            ExtraZeroFinding(
                complex(z),
                res,
                complex(det),
                float(bound),
                bool(abs(z) >= bound - 1e-8),
                refined=bool(ok),
                det_r_relative=float(rel),
                cell=(float(radii[i]), float(angles[j])),
            )
        )
    if return_scan:
        return findings, ScanResult(findings, radii, angles, A)
    return findings
