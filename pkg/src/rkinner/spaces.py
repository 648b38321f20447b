"""Diagonal weighted spaces of analytic functions on the unit disk.

A space is fixed by positive weights ``lam[n]`` with ``lam[0] == 1``; the
inner product is ``<f, g> = sum f_n conj(g_n) lam[n]`` on Taylor
coefficients and the reproducing kernel is ``k_w(z) = K(conj(w) z)`` with
generating function ``K(t) = sum t**n / lam[n]``.

Kernel series are summed termwise with an explicit geometric tail bound.
Each space advertises an envelope ``1/lam[n] <= C (n + 1)**alpha`` which is
what makes that bound computable.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import mpmath
import numpy as np
from scipy.special import spence

from .errors import DivergenceError, DomainError

SPACE_NAMES = ("hardy", "dirichlet", "bergman", "korenblum")

DEFAULT_TOL = 1e-12
MERGE_TOL = 1e-10
SERIES_TOL = 1e-15

_MAX_TERMS = 5_000_000


@dataclass(frozen=True)
class PhiSpec:
    """Coefficients ``a_1..a_M`` of ``Phi(t) = 1 / (1 - sum a_m t**m)``."""

    a: tuple

    def __post_init__(self):
        a = tuple(float(x) for x in self.a)
        object.__setattr__(self, "a", a)
        if not a:
            raise DomainError("phi spec needs at least one coefficient")
        if any(x < 0 for x in a):
            raise DomainError("phi coefficients must be nonnegative")
        if not a[0] > 0:
            raise DomainError("phi spec violates a_1 > 0")
        if sum(a) > 1 + 1e-14:
            raise DomainError(f"phi spec violates sum(a_m) <= 1 (sum = {sum(a)!r})")


@dataclass(frozen=True)
class KernelNode:
    """Evaluation of the ``order``-th derivative at ``point``."""

    point: complex
    order: int = 0

    def __post_init__(self):
        object.__setattr__(self, "point", complex(self.point))
        if not abs(self.point) < 1:
            raise DomainError(f"kernel node {self.point!r} is not inside the unit disk")
        if int(self.order) != self.order or self.order < 0:
            raise DomainError("kernel node order must be a nonnegative integer")
        object.__setattr__(self, "order", int(self.order))


class WeightSequence:
    """Lazily extended weight sequence of a diagonal space.

    Parameters
    ----------
    family : str
        One of ``hardy``, ``dirichlet``, ``bergman``, ``korenblum``, ``phi``
        or ``custom``.
    phi : PhiSpec, optional
        Required for ``family='phi'``.
    lam : sequence of float, optional
        Required for ``family='custom'``. The weights beyond the supplied
        list repeat its last entry.
    """

    def __init__(self, family, phi=None, lam=None, name=None):
        if family not in SPACE_NAMES + ("phi", "custom"):
            raise DomainError(
                f"unknown space {family!r}; valid names: {', '.join(SPACE_NAMES)}, phi, custom"
            )
        self.family = family
        self.name = name or family
        self.phi = phi
        self._custom = None
        if family == "phi":
            if not isinstance(phi, PhiSpec):
                phi = PhiSpec(tuple(phi))
                self.phi = phi
        if family == "custom":
            lam = np.asarray(lam, dtype=float)
            if lam.ndim != 1 or lam.size == 0:
                raise DomainError("custom weights must be a nonempty list")
            if not np.all(lam > 0) or not np.all(np.isfinite(lam)):
                raise DomainError("custom weights must be finite and positive")
            if abs(lam[0] - 1.0) > 1e-15:
                raise DomainError("custom weights must satisfy lambda_0 = 1")
            self._custom = lam
        self._lock = threading.Lock()
        self._inv = np.empty(0)

    # identity -------------------------------------------------------------
    def _key(self):
        if self.family == "phi":
            return ("phi", self.phi.a)
        if self.family == "custom":
            return ("custom", tuple(self._custom.tolist()))
        return (self.family,)

    def __eq__(self, other):
        return isinstance(other, WeightSequence) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return f"WeightSequence({self.spec()!r})"

    def spec(self):
        """Space specification record (the CLI configuration schema)."""
        if self.family == "phi":
            return {"type": "phi", "a": list(self.phi.a)}
        if self.family == "custom":
            return {"type": "custom", "lambda": self._custom.tolist()}
        return {"type": "named", "name": self.family}

    # weights --------------------------------------------------------------
    def _compute_inverse(self, n):
        k = np.arange(n, dtype=float)
        if self.family == "hardy":
            return np.ones(n)
        if self.family == "dirichlet":
            return 1.0 / (k + 1.0)
        if self.family == "bergman":
            return k + 1.0
        if self.family == "korenblum":
            out = np.ones(n)
            out[1:] = 1.0 / k[1:] ** 2
            return out
        if self.family == "custom":
            lam = self._custom
            out = np.full(n, 1.0 / lam[-1])
            m = min(n, lam.size)
            out[:m] = 1.0 / lam[:m]
            return out
        return phi_coefficients(self.phi, n - 1)

    def inverse_weights(self, n):
        """Return ``1/lam[0..n-1]``; memoized, safe under concurrent use."""
        inv = self._inv
        if inv.size >= n:
            return inv[:n]
        with self._lock:
            if self._inv.size < n:
                size = max(n, 2 * self._inv.size, 64)
                self._inv = self._compute_inverse(size)
            return self._inv[:n]

    def weights(self, n):
        with np.errstate(divide="ignore"):
            return 1.0 / self.inverse_weights(n)

    def weight(self, k):
        return float(self.weights(k + 1)[k])

    def envelope(self):
        """Constants ``(C, alpha)`` with ``1/lam[n] <= C (n+1)**alpha``."""
        if self.family == "bergman":
            return 1.0, 1.0
        if self.family == "custom":
            return float(np.max(1.0 / self._custom)), 0.0
        # hardy, dirichlet, korenblum: 1/lam <= 1; phi: b_n <= 1 when sum a <= 1
        return 1.0, 0.0

    # closed-form generating functions ------------------------------------
    def generating(self, t):
        """Closed form of ``K(t) = sum t**n / lam[n]`` (double precision)."""
        t = np.asarray(t, dtype=complex)
        fam = self.family
        if fam == "hardy":
            return 1.0 / (1.0 - t)
        if fam == "bergman":
            return 1.0 / (1.0 - t) ** 2
        if fam == "dirichlet":
            safe = np.where(np.abs(t) < 1e-6, 0.5, t)
            out = -np.log1p(-safe) / safe
            small = np.abs(t) < 1e-6
            series = 1.0 + t / 2.0 + t * t / 3.0 + t ** 3 / 4.0
            return np.where(small, series, out)
        if fam == "korenblum":
            return 1.0 + spence(1.0 - t)
        if fam == "phi":
            den = 1.0 - sum(a * t ** (m + 1) for m, a in enumerate(self.phi.a))
            return 1.0 / den
        lam = self._custom
        n = np.arange(lam.size)
        head = sum(t ** k / lam[k] for k in n)
        return head + t ** lam.size / (lam[-1] * (1.0 - t))

    def generating_mp(self, t):
        """Closed form of ``K`` evaluated with mpmath at the current precision."""
        t = mpmath.mpmathify(t)
        fam = self.family
        if fam == "hardy":
            return 1 / (1 - t)
        if fam == "bergman":
            return 1 / (1 - t) ** 2
        if fam == "dirichlet":
            if t == 0:
                return mpmath.mpf(1)
            return -mpmath.log(1 - t) / t
        if fam == "korenblum":
            return 1 + mpmath.polylog(2, t)
        if fam == "phi":
            return 1 / (1 - mpmath.fsum(mpmath.mpf(a) * t ** (m + 1) for m, a in enumerate(self.phi.a)))
        lam = [mpmath.mpf(x) for x in self._custom]
        head = mpmath.fsum(t ** k / lam[k] for k in range(len(lam)))
        return head + t ** len(lam) / (lam[-1] * (1 - t))

    def generating_derivatives_mp(self, t, order):
        """``[K(t), K'(t), ..., K^(order)(t)]`` with mpmath."""
        t = mpmath.mpmathify(t)
        if self.family == "hardy":
            return [mpmath.factorial(r) / (1 - t) ** (r + 1) for r in range(order + 1)]
        if self.family == "bergman":
            return [mpmath.factorial(r + 1) / (1 - t) ** (r + 2) for r in range(order + 1)]
        out = [self.generating_mp(t)]
        for r in range(1, order + 1):
            out.append(mpmath.diff(self.generating_mp, t, r))
        return out


def make_named_space(name):
    """Return the weight sequence of one of the four named spaces."""
    if name not in SPACE_NAMES:
        raise DomainError(f"unknown space {name!r}; valid names: {', '.join(SPACE_NAMES)}")
    return WeightSequence(name)


def phi_coefficients(spec, degree):
    """Power-series coefficients ``b_0..b_degree`` of ``1/(1 - sum a_m t**m)``."""
    a = np.asarray(spec.a, dtype=float)
    m_max = a.size
    b = np.zeros(degree + 1)
    b[0] = 1.0
    for n in range(1, degree + 1):
        m = min(n, m_max)
        # b_n = sum_{m=1}^{min(n,M)} a_m b_{n-m}
        b[n] = np.dot(a[:m], b[n - 1::-1][:m])
    return b


def weights_from_phi(spec, degree):
    """Space with weights ``lam_n = 1/b_n``; ``degree`` terms are computed eagerly.

    The ``b_n`` are checked strictly positive up to ``degree``.
    """
    if not isinstance(spec, PhiSpec):
        spec = PhiSpec(tuple(spec))
    if degree < 1:
        raise DomainError("degree must be at least 1")
    b = phi_coefficients(spec, degree)
    if not np.all(b > 0):
        raise DomainError("phi recursion produced a nonpositive coefficient")
    space = WeightSequence("phi", phi=spec)
    space.inverse_weights(degree + 1)
    return space


def space_from_spec(record):
    """Build a space from a specification record (dict) or shorthand string.

    Shorthands: ``hardy``, ``phi:0.04,0.9``, ``custom:1,2,3``.
    """
    if isinstance(record, WeightSequence):
        return record
    if isinstance(record, str):
        text = record.strip()
        if text in SPACE_NAMES:
            return make_named_space(text)
        head, _, tail = text.partition(":")
        try:
            values = [float(x) for x in tail.split(",") if x.strip()]
        except ValueError as exc:
            raise DomainError(f"cannot parse space {record!r}") from exc
        if head == "phi":
            return WeightSequence("phi", phi=PhiSpec(tuple(values)))
        if head == "custom":
            return WeightSequence("custom", lam=values)
        raise DomainError(
            f"unknown space {record!r}; valid names: {', '.join(SPACE_NAMES)}, phi:<a>, custom:<lambda>"
        )
    if not isinstance(record, dict) or "type" not in record:
        raise DomainError("space record must be a dict with a 'type' field")
    kind = record["type"]
    if kind == "named":
        return make_named_space(record.get("name"))
    if kind == "phi":
        return WeightSequence("phi", phi=PhiSpec(tuple(record.get("a", ()))))
    if kind == "custom":
        return WeightSequence("custom", lam=record.get("lambda", ()))
    raise DomainError(f"unknown space record type {kind!r}")


# ---------------------------------------------------------------------------
# truncated series


def _falling(n, s):
    """``n! / (n - s)!`` elementwise (zero where ``n < s``)."""
    out = np.ones(n.shape, dtype=float)
    for i in range(s):
        out = out * (n - i)
    return out


def truncation_degree(rho, beta, C, shift, tol):
    """Smallest ``N`` with ``sum_{n>N} C (n+1)**beta rho**(n-shift) <= tol``.

    The tail is bounded by its first term over ``1 - q`` where ``q`` bounds
    the ratio of consecutive terms past ``N``.
    """
    if rho == 0:
        return shift
    if not rho < 1:
        raise DivergenceError(f"kernel series does not converge (|w z| = {rho!r})")
    log_rho = math.log(rho)
    log_tol = math.log(tol)

    def log_tail(N):
        q = ((N + 3) / (N + 2)) ** beta * rho
        if q >= 1:
            return math.inf
        return (
            math.log(C)
            + beta * math.log(N + 2)
            + (N + 1 - shift) * log_rho
            - math.log1p(-q)
        )

    lo = shift
    if log_tail(lo) <= log_tol:
        return lo
    hi = max(shift + 8, 2 * shift)
    while log_tail(hi) > log_tol:
        hi *= 2
        if hi > _MAX_TERMS:
            raise DivergenceError(
                f"kernel tail bound needs more than {_MAX_TERMS} terms (|w z| = {rho!r})"
            )
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if log_tail(mid) <= log_tol:
            hi = mid
        else:
            lo = mid
    return hi


def kernel_coefficients(space, node, N):
    """Taylor coefficients ``0..N`` of the kernel ``k_{s,w}``."""
    n = np.arange(N + 1)
    s = node.order
    exps = np.maximum(n - s, 0)
    powers = np.power(np.conj(node.point), exps)
    return _falling(n, s) * powers * space.inverse_weights(N + 1)


def _check_point(z, what="z"):
    z = complex(z)
    if not abs(z) < 1:
        raise DomainError(f"{what} = {z!r} is not inside the unit disk")
    return z


def kernel_eval(space, node, z, tol=DEFAULT_TOL, method="auto"):
    """Evaluate ``k_{s,w}(z)`` with absolute error at most ``tol``."""
    z = _check_point(z)
    return complex(kernel_values(space, node, np.array([z]), tol, method=method)[0])


def _use_closed_form(method, plain):
    if method not in ("auto", "series"):
        raise DomainError(f"method must be 'auto' or 'series', not {method!r}")
    return method == "auto" and plain


def kernel_values(space, node, z, tol=DEFAULT_TOL, dz=0, method="auto"):
    """Vectorized kernel evaluation over an array of points.

    ``dz > 0`` returns that derivative in ``z`` instead of the value.
    ``method='series'`` forces the truncated sum at exactly ``tol``; the
    default uses the closed form for plain kernels and tightens ``tol`` to
    ``SERIES_TOL`` for derivative kernels.
    """
    z = np.asarray(z, dtype=complex)
    zmax = float(np.max(np.abs(z))) if z.size else 0.0
    if not zmax < 1:
        raise DomainError("evaluation points must lie inside the unit disk")
    if _use_closed_form(method, node.order == 0 and dz == 0):
        return np.asarray(space.generating(np.conj(node.point) * z), dtype=complex)
    if method == "auto":
        tol = min(tol, SERIES_TOL)
    C, alpha = space.envelope()
    rho = abs(node.point) * zmax
    N = truncation_degree(rho, alpha + node.order + dz, C, node.order + dz, tol)
    N = max(N, node.order + dz)
    coef = kernel_coefficients(space, node, N)
    if dz:
        coef = coef[dz:] * _falling(np.arange(dz, N + 1), dz)
    # Horner, highest degree first
    return np.polynomial.polynomial.polyval(z, coef)


def gram_entry(space, node_a, node_b, tol=DEFAULT_TOL, method="auto"):
    """``<k_B, k_A>`` summed in coefficient space with error at most ``tol``."""
    sa, sb = node_a.order, node_b.order
    if _use_closed_form(method, sa == 0 and sb == 0):
        # plain kernels: the closed form is exact up to rounding, which the
        # truncated sum only matches at a cost when |w_a w_b| is near 1
        return complex(space.generating(np.conj(node_b.point) * node_a.point))
    C, alpha = space.envelope()
    if method == "auto":
        tol = min(tol, SERIES_TOL)
    rho = abs(node_a.point) * abs(node_b.point)
    smax = max(sa, sb)
    N = truncation_degree(rho, alpha + sa + sb, C, smax, tol)
    N = max(N, smax)
    n = np.arange(N + 1)
    terms = (
        _falling(n, sa)
        * _falling(n, sb)
        * np.power(np.conj(node_b.point), np.maximum(n - sb, 0))
        * np.power(node_a.point, np.maximum(n - sa, 0))
        * space.inverse_weights(N + 1)
    )
    return complex(np.sum(terms[::-1]))


def gram_entry_mp(space, node_a, node_b):
    """``<k_B, k_A>`` from the closed-form generating function, in mpmath.

    Uses ``d^a/dx^a d^b/dy^b K(x y)`` at ``x = conj(w_B)``, ``y = w_A``.
    """
    a, b = node_b.order, node_a.order
    x = mpmath.conj(mpmath.mpc(node_b.point))
    y = mpmath.mpc(node_a.point)
    derivs = space.generating_derivatives_mp(x * y, a + b)
    total = mpmath.mpc(0)
    for i in range(min(a, b) + 1):
        coeff = mpmath.binomial(a, i) * mpmath.ff(b, i)
        total += coeff * x ** (b - i) * y ** (a - i) * derivs[a + b - i]
    return total


def kernel_eval_mp(space, node, z):
    """``k_{s,w}(z) = z**s K^(s)(conj(w) z)`` in mpmath."""
    z = mpmath.mpc(z)
    t = mpmath.conj(mpmath.mpc(node.point)) * z
    derivs = space.generating_derivatives_mp(t, node.order)
    return z ** node.order * derivs[node.order]


def merge_points(points, multiplicities=None, tol=MERGE_TOL):
    """Collapse points closer than ``tol`` into one with summed multiplicity."""
    points = [complex(p) for p in points]
    if multiplicities is None:
        multiplicities = [1] * len(points)
    if len(multiplicities) != len(points):
        raise DomainError("multiplicities and points differ in length")
    merged, mults = [], []
    for p, m in zip(points, multiplicities):
        if int(m) != m or m < 1:
            raise DomainError("multiplicities must be positive integers")
        for i, q in enumerate(merged):
            if abs(p - q) < tol:
                mults[i] += int(m)
                break
        else:
            merged.append(p)
            mults.append(int(m))
    return merged, mults
