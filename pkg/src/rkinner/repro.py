"""Acceptance checks shared by the test suite and ``rkinner repro``.

Each check returns a ``CheckResult``; none of them raise on a numerical
miss, so a full run always produces the complete table.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import engine, extra, lp, operators, zerosets
from .spaces import make_named_space, space_from_spec

MONO_TOL = 1e-8


@dataclass
class CheckResult:
    key: str
    title: str
    passed: bool
    detail: str
    elapsed: float = 0.0
    data: dict = field(default_factory=dict)

    def line(self):
        mark = "PASS" if self.passed else "FAIL"
        return f"[{mark}] {self.key:>3} {self.title}: {self.detail} ({self.elapsed:.2f} s)"

    def to_dict(self):
        return {"key": self.key, "title": self.title, "passed": self.passed,
                "detail": self.detail, "elapsed": round(self.elapsed, 3)}


class Recorder:
    """Collects every norm trace produced during a run for the monotonicity check."""

    def __init__(self):
        self.traces = []

    def add(self, label, values):
        self.traces.append((label, [float(v) for v in values]))
        return values


def random_points(rng, n, r_min=0.1, r_max=0.9, sep=0.05):
    """``n`` points with moduli in ``[r_min, r_max]`` and pairwise gaps ``>= sep``."""
    pts = []
    while len(pts) < n:
        r = rng.uniform(r_min, r_max)
        z = r * np.exp(2j * np.pi * rng.uniform())
        if all(abs(z - p) >= sep for p in pts):
            pts.append(complex(z))
    return pts


def _monotone(values, tol=MONO_TOL):
    return all(b >= a * (1 - tol) for a, b in zip(values, values[1:]))


def check_hardy_one_point(rng, rec):
    space = make_named_space("hardy")
    rep = engine.solve_inner(space, [0.5], tol=1e-10)
    cf = engine.closed_form_one_point(space, 0.5)
    err_c = float(np.max(np.abs(rep.coefficients - np.array([4.0, -3.0]))))
    err_n = abs(rep.norm - 2.0)
    err_cf = float(np.max(np.abs(rep.coefficients - cf.coefficients)))
    ok = err_c < 1e-10 and err_n < 1e-10 and err_cf < 1e-10
    return ok, f"coef err {err_c:.1e}, norm err {err_n:.1e}, closed-form err {err_cf:.1e}"


def check_hardy_telescoping(rng, rec):
    space = make_named_space("hardy")
    base = rec.add("hardy (0.5,-0.5)", engine.norm_sequence(space, [0.5, -0.5]))
    err0 = max(abs(base[0] - 2), abs(base[1] - 4))
    worst, count = 0.0, 0
    while count < 200:
        pts = random_points(rng, 5, 0.05, 0.95)
        norms = rec.add("hardy random", engine.norm_sequence(space, pts))
        prod = np.cumprod(np.abs(pts) ** 2)
        worst = max(worst, float(np.max(np.abs(np.square(norms) * prod - 1))))
        count += len(pts)
    ok = err0 < 1e-9 and worst < 1e-8
    return ok, f"(2,4) err {err0:.1e}, product identity err {worst:.1e} over {count} prefixes"


def check_norm_identity(rng, rec):
    worst = 0.0
    for name in ("hardy", "dirichlet", "bergman", "korenblum"):
        space = make_named_space(name)
        k00 = 1.0 / space.weight(0)
        for _ in range(20):
            pts = random_points(rng, int(rng.integers(1, 5)))
            table = engine.gram_schmidt_kernels(space, pts)
            phi2 = float(np.sum(np.abs(table.k0_products) ** 2))
            norms = rec.add(f"{name} random", engine.norm_sequence(space, pts))
            worst = max(worst, abs((k00 - phi2) * norms[-1] ** 2 - 1))
    return worst < 1e-8, f"max |(|k0|^2 - |Phi|^2)|J|^2 - 1| = {worst:.1e} over 80 configs"


def check_monotone(rng, rec):
    for p, pts in ((1.5, [0.5, 0.3j]), (3.0, [0.5, 0.3j, -0.6]), (4.0, [0.4, -0.4j])):
        rec.add(f"lp trace p={p}", lp.lp_zero_set_trace(p, pts))
    bad = [label for label, v in rec.traces if not _monotone(v)]
    ok = not bad
    detail = f"{len(rec.traces)} traces nondecreasing" if ok else f"decreasing: {bad[:3]}"
    return ok, detail


def check_blaschke_bounded(rng, rec):
    space = make_named_space("hardy")
    v = zerosets.zero_set_certificate(space, lambda j: 1 - 1 / (j + 1) ** 2, 30, 1e3)
    rec.add("hardy 1-1/(j+1)^2", v.norms)
    return v.bounded == zerosets.BOUNDED, (
        f"verdict {v.bounded}, sup estimate {v.extrapolated_sup:.6g}"
        if v.extrapolated_sup is not None else f"verdict {v.bounded}"
    )


def check_blaschke_growing(rng, rec):
    space = make_named_space("hardy")
    v = zerosets.zero_set_certificate(space, lambda j: 1 - 1 / (j + 1), 40, 1e3)
    rec.add("hardy 1-1/(j+1)", v.norms)
    top = max(v.norms)
    return top > 1e3, f"max ||J_n|| for n <= 40 is {top:.6g}; verdict {v.bounded}"


def _random_phi(rng):
    m = int(rng.integers(1, 4))
    a = rng.dirichlet(np.ones(m + 1))[:m] if m > 1 else [rng.uniform(0.2, 1.0)]
    a = np.asarray(a, dtype=float)
    if a[0] <= 0:
        a[0] = 0.1
    return space_from_spec({"type": "phi", "a": (a / max(1.0, a.sum())).tolist()})


def check_shapiro_shields(rng, rec):
    worst = math.inf
    hardy = make_named_space("hardy")
    for _ in range(20):
        pts = random_points(rng, int(rng.integers(1, 7)))
        eig = np.linalg.eigvalsh(zerosets.shapiro_shields_matrix(hardy, pts))[0]
        worst = min(worst, float(eig))
    for _ in range(5):
        space = _random_phi(rng)
        for _ in range(100):
            pts = random_points(rng, int(rng.integers(1, 7)))
            eig = np.linalg.eigvalsh(zerosets.shapiro_shields_matrix(space, pts))[0]
            worst = min(worst, float(eig))
    return worst >= -1e-10, f"smallest eigenvalue {worst:.2e} (Hardy + 5 phi spaces x 100)"


def check_no_extra_zeros(rng, rec, configs=50):
    found, bounds = 0, []
    for name in ("dirichlet", "korenblum"):
        space = make_named_space(name)
        for _ in range(configs):
            pts = random_points(rng, int(rng.integers(1, 4)))
            found += len(extra.scan_extra_zeros(space, pts, r_max=0.99))
        for w in (0.0, 0.5, 0.9j):
            bounds.append(extra.extra_zero_lower_bound(space, w))
    ok = found == 0 and min(bounds) >= 1 - 1e-12
    return ok, f"{found} findings in {2 * configs} scans; min lower bound {min(bounds):.6f}"


def check_extra_zero_construction(rng, rec):
    space = space_from_spec("phi:0.04,0.9")
    zeta = extra.phi_space_extra_zero(0.04, 0.9, 0.5)
    found = extra.scan_extra_zeros(space, [0.5], r_max=0.95)
    if len(found) != 1:
        return False, f"{len(found)} findings"
    f = found[0]
    err = abs(f.location - zeta)
    ok = err < 1e-6 and f.residual < 1e-8 and f.det_r_relative < 1e-10 and f.bound_satisfied
    return ok, (f"zeta {f.location.real:.12f}, err {err:.1e}, |J| {f.residual:.1e}, "
                f"det R rel {f.det_r_relative:.1e}, bound {f.bound:.4f}")


def check_lp_naive_formula(rng, rec):
    worst = 0.0
    for p in (1.5, 3.0, 4.0):
        for w in (0.3, 0.5j):
            f = lp.lp_naive_one_point(p, w, 60)
            worst = max(worst, _shift_bj(f, 20))
    exact = 0.0
    for p in (1.5, 3.0, 4.0):
        for w in (0.3, 0.5j):
            g, _ = lp.lp_one_point_inner(p, w, 60)
            exact = max(exact, _shift_bj(g, 20))
    return worst < 1e-8, (f"max BJ residual {worst:.3g} for the stated formula; "
                          f"{exact:.1e} with exponent q - 2")


def _shift_bj(f, m_max):
    a = f.coefficients
    return max(abs(lp.bj_residual(f, np.concatenate([np.zeros(m), a]))) for m in range(1, m_max + 1))


def check_lp_hilbert(rng, rec):
    space = make_named_space("hardy")
    coef_err, dual_err = 0.0, 0.0
    for _ in range(20):
        pts = random_points(rng, int(rng.integers(1, 3)), 0.1, 0.8)
        J, report = lp.lp_inner_function(2, pts)
        ref = engine.solve_inner(space, pts).taylor(len(J) - 1)
        coef_err = max(coef_err, float(np.max(np.abs(J.coefficients - ref))))
        dual = lp.dual_infimum_norm(2, pts, D=report.D)
        dual_err = max(dual_err, abs(dual - J.norm()) / J.norm())
    ok = coef_err < 1e-6 and dual_err < 1e-4
    return ok, f"Taylor coefficient err {coef_err:.1e}, dual relative err {dual_err:.1e}"


def check_operator_catalog(rng, rec):
    S2 = operators.make_example_operator("compressed_shift_power", {"n": 4, "k": 2})
    agree = 0
    for i in range(1000):
        v = rng.normal(size=4) + 1j * rng.normal(size=4)
        if i % 3 == 0:
            v[2] = -v[3] * np.conj(v[1]) / np.conj(v[0])
        crit = abs(v[2] * np.conj(v[0]) + v[3] * np.conj(v[1])) < 1e-12
        agree += crit == operators.check_inner(S2, v, tol=1e-12).certified
    jordan_ok = True
    for n in range(3, 9):
        Jn = operators.make_example_operator("compressed_shift", {"n": n})
        for j in range(n - 1):
            jordan_ok &= operators.check_inner(Jn, np.eye(n)[j]).certified
    idem = 0.0
    for _ in range(50):
        d = int(rng.integers(2, 9))
        A = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        A /= np.linalg.norm(A, 2)
        u = operators.krylov_inner(A, rng.normal(size=d) + 1j * rng.normal(size=d))
        if np.linalg.norm(u) > 1e-8:
            idem = max(idem, float(np.max(np.abs(operators.krylov_inner(A, u) - u))))
    ok = agree == 1000 and jordan_ok and idem < 1e-12
    return ok, f"criterion agreement {agree}/1000, Jordan e_j inner {jordan_ok}, idempotence err {idem:.1e}"


def check_takenaka(rng, rec):
    space = make_named_space("hardy")
    worst = 0.0
    for _ in range(50):
        pts = random_points(rng, 4)
        table = engine.gram_schmidt_kernels(space, pts)
        mod = np.abs(pts)
        prev = np.concatenate([[1.0], np.cumprod(mod ** 2)[:-1]])
        expect = (1 - mod ** 2) * prev
        worst = max(worst, float(np.max(np.abs(np.abs(table.k0_products) ** 2 - expect))))
    return worst < 1e-10, f"max deviation {worst:.1e} over 50 configs"


CHECKS = [
    ("1", "Hardy one-point oracle", check_hardy_one_point),
    ("2", "Hardy telescoping", check_hardy_telescoping),
    ("3", "norm identity", check_norm_identity),
    ("5a", "Blaschke sequence certified bounded", check_blaschke_bounded),
    ("5b", "non-Blaschke norms exceed 1e3 by n=40", check_blaschke_growing),
    ("6", "Shapiro-Shields PSD", check_shapiro_shields),
    ("7", "no extra zeros (Dirichlet, Korenblum)", check_no_extra_zeros),
    ("8", "extra-zero construction", check_extra_zero_construction),
    ("9", "lp one-point formula as stated", check_lp_naive_formula),
    ("10", "p = 2 consistency", check_lp_hilbert),
    ("11", "operator catalog", check_operator_catalog),
    ("12", "Takenaka cross-check", check_takenaka),
    # last, so that it sees every trace produced above
    ("4", "monotone norm traces", check_monotone),
]


def run_check(key, seed=0, recorder=None):
    for k, title, fn in CHECKS:
        if k == key:
            rec = recorder if recorder is not None else Recorder()
            rng = np.random.default_rng([seed, sum(map(ord, k))])
            t0 = time.perf_counter()
            try:
                ok, detail = fn(rng, rec)
            except Exception as exc:  # a crash is a failed criterion, not a failed run
                ok, detail = False, f"{type(exc).__name__}: {exc}"
            return CheckResult(k, title, bool(ok), detail, time.perf_counter() - t0)
    raise KeyError(key)


def run_all(seed=0, keys=None):
    rec = Recorder()
    wanted = [k for k, _, _ in CHECKS if keys is None or k in keys]
    return [run_check(k, seed, rec) for k in wanted]
