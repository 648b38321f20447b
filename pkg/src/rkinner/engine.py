"""Gram systems and the shift-inner function of a finite zero configuration.

For zeros ``W = (w_1, ..., w_n)`` the inner function is the element
``J = sum_j c_j k_j`` of the span of ``k_0, k_{w_1}, ...`` with ``J(0) = 1``
that vanishes on ``W``; its coefficients solve ``G c = e_0`` where
``G[s, t] = <k_t, k_s>``.

Double precision is used whenever the Gram matrix is tame. Clustered zeros
make ``G`` badly conditioned (Pick matrices of points near the circle reach
``cond > 1e17`` with a dozen points), so ``precision='auto'`` falls back to
mpmath with closed-form kernels and raises the working precision until two
successive solves agree.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import mpmath
import numpy as np
import scipy.linalg

from .errors import CertificationError, DomainError, GramDegeneracyError
from .spaces import (
    DEFAULT_TOL,
    KernelNode,
    SPACE_NAMES,
    WeightSequence,
    gram_entry,
    gram_entry_mp,
    kernel_eval_mp,
    kernel_values,
    make_named_space,
    merge_points,
    _falling,
)

logger = logging.getLogger(__name__)

INTERP_TOL = 1e-9
RESIDUAL_TOL = 1e-8
NORM_TOL = 1e-9
COND_WARN = 1e10
COND_MAX = 1e14
PIVOT_FLOOR = 1e-14
MAX_DPS = 1280


@dataclass(frozen=True)
class ZeroConfig:
    """Distinct nonzero points with multiplicities, plus the origin node."""

    points: tuple = ()
    multiplicities: tuple = ()
    include_origin: bool = True

    @classmethod
    def from_points(cls, points, multiplicities=None, include_origin=True):
        merged, mults = merge_points(points, multiplicities)
        for p in merged:
            if not abs(p) < 1:
                raise DomainError(f"zero {p!r} is not inside the unit disk")
            if p == 0:
                raise DomainError("prescribed zeros must be nonzero")
        return cls(tuple(merged), tuple(mults), include_origin)

    def __len__(self):
        return len(self.points)

    @property
    def degree(self):
        return int(sum(self.multiplicities))

    def nodes(self):
        out = [KernelNode(0j, 0)] if self.include_origin else []
        for p, m in zip(self.points, self.multiplicities):
            out.extend(KernelNode(p, s) for s in range(m))
        return out

    def prefix(self, n):
        return ZeroConfig(self.points[:n], self.multiplicities[:n], self.include_origin)

    def polynomial(self):
        """Ascending coefficients of ``prod (1 - z/w_j)**r_j``."""
        coef = np.array([1.0 + 0j])
        for p, m in zip(self.points, self.multiplicities):
            for _ in range(m):
                coef = np.convolve(coef, np.array([1.0, -1.0 / p]))
        return coef


class GramSystem:
    """Hermitian Gram matrix over a node list (origin first) and its LU factors."""

    def __init__(self, space, nodes, matrix, tol=DEFAULT_TOL):
        self.space = space
        self.nodes = list(nodes)
        self.matrix = np.asarray(matrix, dtype=complex)
        self.tol = tol
        n = self.matrix.shape[0]
        with np.errstate(all="ignore"):
            self.condition_estimate = float(np.linalg.cond(self.matrix)) if n else 1.0
        if not math.isfinite(self.condition_estimate):
            self.condition_estimate = math.inf
        self.lu, self.piv = scipy.linalg.lu_factor(self.matrix, check_finite=False)
        self._mp = {}

    def __len__(self):
        return len(self.nodes)

    @property
    def pivots(self):
        return np.diag(self.lu)

    def degenerate_pair(self):
        """Index pair responsible for the first tiny pivot, or ``None``."""
        piv = np.abs(self.pivots)
        if piv.size == 0:
            return None
        small = np.nonzero(piv < PIVOT_FLOOR * piv.max())[0]
        if small.size == 0:
            return None
        i = int(small[0])
        others = [j for j in range(len(self.nodes)) if j != i]
        if not others:
            return (i, i)
        j = min(others, key=lambda k: abs(self.nodes[k].point - self.nodes[i].point))
        return (min(i, j), max(i, j))

    def solve(self, rhs):
        return scipy.linalg.lu_solve((self.lu, self.piv), rhs)

    def log_det(self):
        """``(log|det G|, phase)`` from the LU pivots."""
        piv = self.pivots
        logabs = float(np.sum(np.log(np.abs(piv))))
        phase = complex(np.prod(piv / np.abs(piv)))
        swaps = int(np.sum(self.piv != np.arange(self.piv.size)))
        if swaps % 2:
            phase = -phase
        return logabs, phase

    def leading(self, m):
        """Gram system of the first ``m`` nodes (shares the mp cache)."""
        sub = GramSystem(self.space, self.nodes[:m], self.matrix[:m, :m], self.tol)
        sub._parent = (self, m)
        return sub

    def mp_matrix(self, dps):
        """The Gram matrix from closed-form kernels at ``dps`` digits."""
        parent = getattr(self, "_parent", None)
        if parent is not None:
            full = parent[0].mp_matrix(dps)
            m = parent[1]
            with mpmath.workdps(dps):
                return full[:m, :m]
        if dps not in self._mp:
            n = len(self.nodes)
            with mpmath.workdps(dps):
                G = mpmath.matrix(n, n)
                for s in range(n):
                    for t in range(s, n):
                        val = gram_entry_mp(self.space, self.nodes[s], self.nodes[t])
                        G[s, t] = val
                        G[t, s] = mpmath.conj(val)
                self._mp[dps] = G
        return self._mp[dps]


    def mp_ldl(self, dps):
        """Factors ``(L, D)`` with ``G = L diag(D) L^H`` at ``dps`` digits.

        A leading block's factors are the leading part of the full ones, so
        every prefix of a zero list reuses a single factorization.
        """
        parent = getattr(self, "_parent", None)
        if parent is not None:
            L, D = parent[0].mp_ldl(dps)
            return L, D[: parent[1]]
        key = ("ldl", dps)
        if key not in self._mp:
            G = self.mp_matrix(dps)
            n = G.rows
            with mpmath.workdps(dps):
                L = [[mpmath.mpc(0)] * n for _ in range(n)]
                D = []
                for j in range(n):
                    Lj = L[j]
                    d = G[j, j] - mpmath.fsum(abs(Lj[k]) ** 2 * D[k] for k in range(j))
                    d = mpmath.re(d)
                    if d <= 0:
                        D.append(d)
                        break
                    D.append(d)
                    Lj[j] = mpmath.mpc(1)
                    for i in range(j + 1, n):
                        Li = L[i]
                        acc = G[i, j] - mpmath.fsum(
                            Li[k] * mpmath.conj(Lj[k]) * D[k] for k in range(j)
                        )
                        Li[j] = acc / d
            self._mp[key] = (L, D)
        return self._mp[key]


def _ldl_solve(L, D, m, rhs_index=0):
    """Solve the leading ``m x m`` system from LDL^H factors (current precision)."""
    y = [mpmath.mpc(0)] * m
    for i in range(m):
        acc = mpmath.mpc(1 if i == rhs_index else 0)
        Li = L[i]
        for k in range(i):
            acc -= Li[k] * y[k]
        y[i] = acc
    z = [y[i] / D[i] for i in range(m)]
    x = [mpmath.mpc(0)] * m
    for i in range(m - 1, -1, -1):
        acc = z[i]
        for k in range(i + 1, m):
            acc -= mpmath.conj(L[k][i]) * x[k]
        x[i] = acc
    return x


def build_gram(space, config, tol=DEFAULT_TOL, check=True):
    """Gram matrix ``G[s, t] = <k_t, k_s>`` over the nodes of ``config``."""
    nodes = config.nodes() if isinstance(config, ZeroConfig) else list(config)
    if not nodes:
        raise DomainError("empty configuration")
    n = len(nodes)
    G = np.empty((n, n), dtype=complex)
    for s in range(n):
        for t in range(s, n):
            val = gram_entry(space, nodes[s], nodes[t], tol)
            G[s, t] = val
            G[t, s] = np.conj(val)
        G[s, s] = G[s, s].real
    gram = GramSystem(space, nodes, G, tol)
    if check:
        _check_gram(gram)
    return gram


def _check_gram(gram):
    pair = gram.degenerate_pair()
    if pair is not None or gram.condition_estimate > COND_MAX:
        if pair is None:
            pair = _closest_pair(gram.nodes)
        a, b = gram.nodes[pair[0]], gram.nodes[pair[1]]
        raise GramDegeneracyError(
            f"Gram matrix numerically singular (cond ~ {gram.condition_estimate:.3g}); "
            f"offending nodes {a} and {b}",
            pair=pair,
        )
    if gram.condition_estimate > COND_WARN:
        logger.warning("Gram matrix condition estimate %.3g", gram.condition_estimate)


def _closest_pair(nodes):
    best, pair = math.inf, (0, 0)
    for i in range(len(nodes)):
        for j in range(i + 1, len(nodes)):
            d = abs(nodes[i].point - nodes[j].point)
            if d < best:
                best, pair = d, (i, j)
    return pair


# ---------------------------------------------------------------------------
# inner function representation


@dataclass
class InnerFunctionRep:
    """``J = sum_j c_j k_j`` over the kernel basis of ``config`` (origin first)."""

    coefficients: np.ndarray
    space: WeightSequence
    config: ZeroConfig
    norm_squared: float = math.nan
    quadratic_form: float = math.nan
    residual_report: list = field(default_factory=list)
    interpolation_error: float = math.nan
    precision: str = "double"
    dps: int | None = None
    coefficients_mp: list | None = None
    condition_estimate: float = math.nan

    @property
    def nodes(self):
        return self.config.nodes()

    @property
    def norm(self):
        return math.sqrt(self.norm_squared)

    def __call__(self, z, tol=DEFAULT_TOL):
        return eval_inner(self, z, tol)

    def values(self, z, tol=DEFAULT_TOL, dz=0):
        """Vectorized double-precision evaluation (``dz=1``: derivative)."""
        z = np.asarray(z, dtype=complex)
        out = np.zeros(z.shape, dtype=complex)
        for c, node in zip(self.coefficients, self.nodes):
            out += c * kernel_values(self.space, node, z.ravel(), tol, dz=dz).reshape(z.shape)
        return out

    def taylor(self, K):
        """Taylor coefficients ``J_0..J_K``."""
        k = np.arange(K + 1)
        inv = self.space.inverse_weights(K + 1)
        out = np.zeros(K + 1, dtype=complex)
        for c, node in zip(self.coefficients, self.nodes):
            s = node.order
            out += c * _falling(k, s) * np.power(np.conj(node.point), np.maximum(k - s, 0))
        return out * inv

    def to_dict(self):
        return {
            "coefficients": [[c.real, c.imag] for c in self.coefficients],
            "nodes": [[n.point.real, n.point.imag, n.order] for n in self.nodes],
            "norm": self.norm,
            "norm_squared": self.norm_squared,
            "quadratic_form": self.quadratic_form,
            "interpolation_error": self.interpolation_error,
            "residual_report": [[m, r] for m, r in self.residual_report],
            "precision": self.precision,
            "dps": self.dps,
            "condition_estimate": self.condition_estimate,
        }


def eval_inner(rep, z, tol=DEFAULT_TOL):
    """Evaluate ``J(z)``; error at most ``tol * sum |c_j|`` in double precision."""
    z = complex(z)
    if not abs(z) < 1:
        raise DomainError(f"z = {z!r} is not inside the unit disk")
    if rep.coefficients_mp is not None:
        with mpmath.workdps(rep.dps):
            total = mpmath.fsum(
                c * kernel_eval_mp(rep.space, node, z)
                for c, node in zip(rep.coefficients_mp, rep.nodes)
            )
            return complex(total)
    return complex(rep.values(np.array([z]), tol)[0])


def _residual_depth(config):
    return 2 * len(config.nodes()) + 8


def _certify(rep, gram, residual_depth, raise_on_fail=True):
    """Fill in the certificates of ``rep``; return the list of failures."""
    failures = []
    nodes = rep.nodes
    c = rep.coefficients
    config = rep.config
    space = rep.space

    # interpolation: J(0) = 1 and J^(s)(w) = 0 at every prescribed node
    interp = []
    if rep.coefficients_mp is not None:
        with mpmath.workdps(rep.dps):
            G = gram.mp_matrix(rep.dps)
            cm = rep.coefficients_mp
            for i in range(len(nodes)):
                val = mpmath.fsum(G[i, j] * cm[j] for j in range(len(nodes)))
                target = 1 if (i == 0 and config.include_origin) else 0
                interp.append(abs(complex(val - target)))
    else:
        for i, node in enumerate(nodes):
            val = sum(
                cj * kernel_values(space, nj, np.array([node.point]), gram.tol, dz=node.order)[0]
                for cj, nj in zip(c, nodes)
            )
            target = 1.0 if (i == 0 and config.include_origin) else 0.0
            interp.append(abs(val - target))
    rep.interpolation_error = float(max(interp)) if interp else 0.0
    if rep.interpolation_error > INTERP_TOL:
        failures.append(("interpolation", rep.interpolation_error))

    # norm: Re(c_0) against the quadratic form c^H G c
    if rep.coefficients_mp is not None:
        with mpmath.workdps(rep.dps):
            G = gram.mp_matrix(rep.dps)
            cm = mpmath.matrix(rep.coefficients_mp)
            q = (cm.H * G * cm)[0, 0]
            rep.quadratic_form = float(mpmath.re(q))
            rep.norm_squared = float(mpmath.re(rep.coefficients_mp[0]))
    else:
        rep.quadratic_form = float(np.real(np.conj(c) @ (gram.matrix @ c)))
        rep.norm_squared = float(c[0].real)
    if abs(rep.quadratic_form - rep.norm_squared) > NORM_TOL * max(1.0, abs(rep.norm_squared)):
        failures.append(("norm", abs(rep.quadratic_form - rep.norm_squared)))

    # shift-inner residuals <J, z^m f_n>, m = 1..depth, in coefficient space
    f = config.polynomial()
    K = f.size - 1 + residual_depth
    lam = space.weights(K + 1)
    report = []
    if rep.coefficients_mp is not None:
        with mpmath.workdps(rep.dps):
            inv = space.inverse_weights(K + 1)
            taylor = [mpmath.mpc(0)] * (K + 1)
            for cj, node in zip(rep.coefficients_mp, nodes):
                s = node.order
                wb = mpmath.conj(mpmath.mpc(node.point))
                term = cj * mpmath.factorial(s)  # ff(k, s) * wb**(k - s) at k = s
                for k in range(s, K + 1):
                    taylor[k] += term
                    term = term * wb * (k + 1) / (k + 1 - s)
            taylor = [t * mpmath.mpf(inv[k]) for k, t in enumerate(taylor)]
            for m in range(1, residual_depth + 1):
                acc = mpmath.fsum(
                    taylor[m + i] * mpmath.conj(mpmath.mpc(f[i])) * mpmath.mpf(lam[m + i])
                    for i in range(f.size)
                )
                report.append((m, abs(complex(acc))))
    else:
        taylor = rep.taylor(K)
        for m in range(1, residual_depth + 1):
            val = np.sum(taylor[m:m + f.size] * np.conj(f) * lam[m:m + f.size])
            report.append((m, float(abs(val))))
    rep.residual_report = report
    worst = None
    for m, r in report:
        # absolute below 1e-8 unless the shifted polynomial itself is large
        gnorm = math.sqrt(float(np.sum(np.abs(f) ** 2 * lam[m:m + f.size])))
        scale = max(1.0, gnorm)
        if r > RESIDUAL_TOL * scale and (worst is None or r > worst[1]):
            worst = (m, r)
    if worst is not None:
        failures.append(("residual", worst))

    if failures and raise_on_fail:
        kind, detail = failures[0]
        raise CertificationError(
            f"inner function certificate failed ({kind}: {detail})",
            worst=worst if kind == "residual" else detail,
        )
    return failures


def _start_dps(cond):
    if not math.isfinite(cond) or cond > 1e15:
        return 60
    return max(30, int(math.log10(max(cond, 1.0))) + 25)


def _solve_mp(gram, rhs_index=0):
    """Solve ``G c = e_rhs`` in mpmath, doubling precision until stable."""
    n = len(gram.nodes)
    dps = _start_dps(gram.condition_estimate)
    prev = None
    while dps <= MAX_DPS:
        with mpmath.workdps(dps):
            L, D = gram.mp_ldl(dps)
            c = None
            if len(D) >= n and all(d > 0 for d in D[:n]):
                c = _ldl_solve(L, D, n, rhs_index)
            if c is not None and prev is not None:
                scale = max(abs(x) for x in c)
                diff = max(abs(c[i] - prev[i]) for i in range(n))
                if diff <= mpmath.mpf(10) ** (-20) * scale:
                    return c, dps
            prev = c
        dps *= 2
    pair = _closest_pair(gram.nodes)
    raise GramDegeneracyError(
        f"Gram system unresolved at {MAX_DPS} digits; offending nodes "
        f"{gram.nodes[pair[0]]} and {gram.nodes[pair[1]]}",
        pair=pair,
    )


def _solve_with_gram(space, config, gram, residual_depth, precision):
    if precision not in ("auto", "double", "mp"):
        raise DomainError(f"unknown precision {precision!r}")
    n = len(gram.nodes)
    e0 = np.zeros(n, dtype=complex)
    e0[0] = 1.0
    if precision in ("auto", "double"):
        try:
            if precision == "double":
                _check_gram(gram)
            ok = gram.degenerate_pair() is None and gram.condition_estimate <= COND_WARN
            if ok or precision == "double":
                c = gram.solve(e0)
                rep = InnerFunctionRep(c, space, config, condition_estimate=gram.condition_estimate)
                failures = _certify(rep, gram, residual_depth, raise_on_fail=precision == "double")
                if not failures:
                    return rep
                logger.info("double-precision certificate failed (%s); escalating", failures[0])
        except GramDegeneracyError:
            if precision == "double":
                raise
    cm, dps = _solve_mp(gram)
    c = np.array([complex(x) for x in cm])
    rep = InnerFunctionRep(
        c,
        space,
        config,
        precision="mp",
        dps=dps,
        coefficients_mp=cm,
        condition_estimate=gram.condition_estimate,
    )
    _certify(rep, gram, residual_depth, raise_on_fail=True)
    return rep


def _as_config(config):
    if isinstance(config, ZeroConfig):
        return config
    return ZeroConfig.from_points(config)


def solve_inner(space, config, tol=DEFAULT_TOL, residual_depth=None, precision="auto"):
    """Solve ``G c = e_0`` for the inner function of ``config`` and certify it.

    Parameters
    ----------
    space : WeightSequence
    config : ZeroConfig or sequence of complex
        Prescribed zeros; a plain sequence is merged into a configuration.
    tol : float
        Truncation tolerance of every kernel series.
    residual_depth : int, optional
        Number of shifts ``z^m f_n`` checked; default ``2 * nodes + 8``.
    precision : {'auto', 'double', 'mp'}
        ``auto`` escalates to mpmath when the double solve is badly
        conditioned or fails its certificates.

    Raises
    ------
    GramDegeneracyError
        The Gram system could not be resolved.
    CertificationError
        A residual exceeded its tolerance; ``worst`` carries ``(m, residual)``.
    """
    config = _as_config(config)
    if not config.include_origin:
        raise DomainError("inner-function solves need the origin node")
    gram = build_gram(space, config, tol, check=False)
    depth = _residual_depth(config) if residual_depth is None else residual_depth
    return _solve_with_gram(space, config, gram, depth, precision)


def closed_form_one_point(space, w):
    """One-zero inner function from closed-form kernels.

    ``J = (k_w(w) k_0 - conj(k_w(0)) k_w) / (k_w(w) k_0(0) - |k_w(0)|**2)``.
    """
    if isinstance(space, str):
        space = make_named_space(space)
    w = complex(w)
    if w == 0:
        raise DomainError("the one-point formula needs w != 0")
    if not abs(w) < 1:
        raise DomainError(f"w = {w!r} is not inside the unit disk")
    kww = complex(space.generating(abs(w) ** 2))
    kw0 = complex(space.generating(0.0))
    k00 = complex(space.generating(0.0))
    D = kww * k00 - abs(kw0) ** 2
    c = np.array([kww / D, -np.conj(kw0) / D])
    config = ZeroConfig.from_points([w])
    rep = InnerFunctionRep(c, space, config)
    rep.norm_squared = float(c[0].real)
    return rep


def norm_sequence(space, points, tol=DEFAULT_TOL, precision="auto", return_reps=False):
    """``||J_1||, ||J_2||, ...`` over the prefixes of ``points``.

    One Gram matrix is built for the whole list; each prefix is solved on
    its leading block. A decrease beyond ``1e-9`` relative raises
    ``CertificationError`` since monotonicity is a theorem.
    """
    config = _as_config(points)
    if len(config) == 0:
        return ([], []) if return_reps else []
    gram = build_gram(space, config, tol, check=False)
    norms, reps = [], []
    count = 1
    for n in range(1, len(config) + 1):
        count += config.multiplicities[n - 1]
        sub_config = config.prefix(n)
        rep = _solve_with_gram(
            space, sub_config, gram.leading(count), _residual_depth(sub_config), precision
        )
        norm = rep.norm
        if norms and norm < norms[-1] * (1 - 1e-9):
            raise CertificationError(
                f"norm sequence decreased at n={n}: {norms[-1]!r} -> {norm!r}", worst=(n, norm)
            )
        norms.append(norm)
        reps.append(rep)
    return (norms, reps) if return_reps else norms


def _log_det_mp(G):
    """``log|det|`` of an mpmath matrix."""
    return mpmath.log(abs(mpmath.det(G)))


def projection_distance(space, points, tol=DEFAULT_TOL, precision="auto"):
    """Distance ``d_n`` from ``k_0`` to the span of the zero kernels.

    ``d_n**2 = det G[k_0, ..., k_n] / det G[k_1, ..., k_n]``, evaluated in
    log space from LU pivots (mpmath when the matrix is badly conditioned).
    """
    config = _as_config(points)
    if len(config) == 0:
        return 1.0 / math.sqrt(space.weight(0))
    full = build_gram(space, config, tol, check=False)
    inner = GramSystem(space, full.nodes[1:], full.matrix[1:, 1:], tol)
    tame = (
        full.condition_estimate <= COND_WARN
        and full.degenerate_pair() is None
        and inner.degenerate_pair() is None
    )
    if precision == "double" or (precision == "auto" and tame):
        a, _ = full.log_det()
        b, _ = inner.log_det()
        return math.exp(0.5 * (a - b))
    dps = _start_dps(full.condition_estimate)
    prev = None
    while dps <= MAX_DPS:
        with mpmath.workdps(dps):
            G = full.mp_matrix(dps)
            n = G.rows
            val = _log_det_mp(G) - _log_det_mp(G[1:n, 1:n])
            if prev is not None and abs(val - prev) < mpmath.mpf(10) ** (-20):
                return float(mpmath.exp(val / 2))
            prev = val
        dps *= 2
    raise GramDegeneracyError("determinant ratio unresolved in extended precision")


@dataclass
class GramSchmidtTable:
    """Orthonormal ``v_j = sum_{i<=j} coeffs[j, i] k_i`` over the zero kernels."""

    nodes: list
    coeffs: np.ndarray
    k0_products: np.ndarray  # <k_0, v_j>
    gram: np.ndarray  # <k_j, k_i> over the zero kernels (row i, column j)

    def inner(self, i, j):
        """``<v_i, v_j>``."""
        x, y = self.coeffs[i], self.coeffs[j]
        return complex(np.conj(y) @ (self.gram @ x))


def gram_schmidt_kernels(space, points, tol=DEFAULT_TOL):
    """Modified Gram-Schmidt (one reorthogonalization pass) on ``k_{w_1}, ...``."""
    config = _as_config(points)
    full = build_gram(space, config, tol, check=True)
    G = full.matrix[1:, 1:]
    g0 = full.matrix[1:, 0]  # <k_0, k_j>
    n = G.shape[0]

    def ip(x, y):
        return np.conj(y) @ (G @ x)

    V = np.zeros((n, n), dtype=complex)
    for j in range(n):
        v = np.zeros(n, dtype=complex)
        v[j] = 1.0
        for _ in range(2):
            for i in range(j):
                v = v - ip(v, V[i]) * V[i]
        nrm = math.sqrt(max(ip(v, v).real, 0.0))
        if nrm < 1e-14:
            raise GramDegeneracyError(f"kernel {j + 1} is numerically dependent", pair=(j, j))
        V[j] = v / nrm
    k0 = np.array([np.conj(V[j]) @ g0 for j in range(n)])
    return GramSchmidtTable(full.nodes[1:], V, k0, G)


def inner_from_gram_schmidt(table, space, points):
    """``J = (k_0 - sum <k_0, v_j> v_j) / ||k_0 - sum <k_0, v_j> v_j||**2``."""
    config = _as_config(points)
    n = table.coeffs.shape[0]
    proj = np.zeros(n, dtype=complex)
    for j in range(n):
        proj += table.k0_products[j] * table.coeffs[j]
    denom = 1.0 / space.weight(0) - float(np.sum(np.abs(table.k0_products) ** 2))
    c = np.concatenate([[1.0 + 0j], -proj]) / denom
    rep = InnerFunctionRep(c, space, config)
    rep.norm_squared = 1.0 / denom
    return rep
