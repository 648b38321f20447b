import math

import numpy as np
import pytest

from rkinner.engine import build_gram, solve_inner
from rkinner.errors import DomainError
from rkinner.extra import (
    backward_shift_norm,
    det_r_residual,
    extra_zero_lower_bound,
    phi_space_extra_zero,
    qw_norm_estimate,
    scan_extra_zeros,
    shift_norm,
)
from rkinner.spaces import SPACE_NAMES, KernelNode, make_named_space, space_from_spec

PHI = "phi:0.04,0.9"


@pytest.mark.parametrize(
    "name, s, q0",
    [("hardy", 1, 1), ("dirichlet", math.sqrt(2), 1), ("bergman", 1, math.sqrt(2)), ("korenblum", 2, 1)],
)
def test_shift_norms(name, s, q0):
    space = make_named_space(name)
    assert shift_norm(space) == pytest.approx(s, abs=1e-12)
    assert backward_shift_norm(space) == pytest.approx(q0, abs=1e-12)


def test_phi_space_shift_norms_from_ratios():
    space = space_from_spec(PHI)
    lam = space.weights(4000)
    assert shift_norm(space) == pytest.approx(np.max(np.sqrt(lam[1:] / lam[:-1])), rel=1e-9)


@pytest.mark.parametrize("name", SPACE_NAMES)
def test_qw_at_origin_matches_backward_shift(name):
    space = make_named_space(name)
    assert qw_norm_estimate(space, 0).qw_norm == pytest.approx(backward_shift_norm(space), abs=1e-6)


def test_qw_hardy_estimates_nondecreasing():
    rep = qw_norm_estimate(make_named_space("hardy"), 0.5)
    vals = [v for _, v in rep.history]
    assert vals[0] >= 1 and all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))
    assert rep.qw_norm >= rep.lower_bound >= 1


def test_qw_dirichlet_half():
    rep = qw_norm_estimate(make_named_space("dirichlet"), 0.5, tol=1e-3)
    assert rep.converged and math.isfinite(rep.qw_norm)
    vals = [v for _, v in rep.history]
    assert all(b >= a for a, b in zip(vals, vals[1:]))
    assert 1.99 < rep.lower_bound <= rep.qw_norm
    # extrapolated limit sits just above 2
    assert rep.qw_norm == pytest.approx(2.0, abs=2e-3)


@pytest.mark.parametrize("name", ["hardy", "dirichlet", "korenblum"])
def test_contractive_backward_shift_gives_bound_at_least_one(name):
    space = make_named_space(name)
    for w in (0.0, 0.3 - 0.4j):
        assert extra_zero_lower_bound(space, w) >= 1


def test_det_r_hardy_formula():
    h = make_named_space("hardy")
    for r, s in ((0.5, 0.3), (0.5, -0.7), (-0.2, 0.6)):
        expect = 1 / (1 - s * r) - 1 / (1 - r * r)
        assert det_r_residual(h, [r], s) == pytest.approx(expect, abs=1e-12)
        assert abs(expect) > 0


def test_det_r_complex_points_up_to_conjugation():
    # the two-point expansion pairs <k_2, k_1>; rows 1..n of G give <k_1, k_2>
    h = make_named_space("hardy")
    r, s = 0.4, 0.2 + 0.3j
    expect = 1 / (1 - np.conj(s) * r) - 1 / (1 - r * r)
    assert det_r_residual(h, [r], s) == pytest.approx(np.conj(expect), abs=1e-12)


def test_det_r_phi_extra_zero():
    space = space_from_spec(PHI)
    zeta = phi_space_extra_zero(0.04, 0.9, 0.5)
    assert det_r_residual(space, [0.5], zeta, relative=True) < 1e-10


def test_det_r_matches_evaluation():
    rng = np.random.default_rng(0)
    for name in SPACE_NAMES:
        space = make_named_space(name)
        for _ in range(5):
            pts = [complex(rng.uniform(0.1, 0.8) * np.exp(2j * np.pi * rng.uniform())) for _ in range(3)]
            zeros, c = pts[:-1], pts[-1]
            n = len(zeros) + 1
            det = det_r_residual(space, zeros, c)
            nodes = [KernelNode(0)] + [KernelNode(p) for p in zeros]
            G = build_gram(space, nodes, check=False).matrix
            J = solve_inner(space, zeros)(c)
            expect = (-1) ** (n - 1) * J * np.linalg.det(G)
            assert abs(det - expect) <= 1e-8 * abs(expect)


def test_phi_extra_zero_examples():
    assert phi_space_extra_zero(0.04, 0.9, 0.5) == pytest.approx(-0.265 / 0.45)
    z = phi_space_extra_zero(0.04, 0.9, 0.5j)
    assert abs(z) == pytest.approx(0.265 / 0.45)
    assert z == pytest.approx(-0.265 / 0.45 * 1j)


@pytest.mark.parametrize(
    "a1, a2, w, msg",
    [(0.1, 0.5, 0.9, r"\|w\| - \|w\|\^2"), (0.3, 0.9, 0.5, "a2 > 4 a1"), (0.1, 0.95, 0.5, "a1 \\+ a2")],
)
def test_phi_extra_zero_preconditions(a1, a2, w, msg):
    with pytest.raises(DomainError, match=msg):
        phi_space_extra_zero(a1, a2, w)


def test_scan_phi_finds_extra_zero():
    space = space_from_spec(PHI)
    found = scan_extra_zeros(space, [0.5], r_max=0.95)
    assert len(found) == 1
    f = found[0]
    assert abs(f.location - (-0.265 / 0.45)) < 1e-6
    assert f.residual < 1e-8 and f.bound_satisfied and f.refined
    assert abs(f.location) >= f.bound - 1e-8


@pytest.mark.parametrize("name, zeros", [("dirichlet", [0.5]), ("korenblum", [0.5, -0.3]),
                                          ("hardy", [0.5, 0.2j]), ("bergman", [0.5, -0.3])])
def test_scan_empty_for_no_extra_zero_spaces(name, zeros):
    assert scan_extra_zeros(make_named_space(name), zeros, r_max=0.99) == []


def test_scan_random_configs_hardy():
    rng = np.random.default_rng(1)
    h = make_named_space("hardy")
    for _ in range(50):
        k = int(rng.integers(1, 4))
        pts = [complex(rng.uniform(0.1, 0.9) * np.exp(2j * np.pi * rng.uniform())) for _ in range(k)]
        assert scan_extra_zeros(h, pts, r_max=0.99, grid_resolution=(64, 32)) == []


def test_scan_heatmap():
    findings, scan = scan_extra_zeros(space_from_spec(PHI), [0.5], r_max=0.95,
                                      grid_resolution=(16, 8), return_scan=True)
    lines = scan.heatmap_csv().splitlines()
    assert lines[0] == "r,theta,abs_J" and len(lines) == 1 + 16 * 8


def test_scan_rejects_bad_radius():
    with pytest.raises(DomainError):
        scan_extra_zeros(make_named_space("hardy"), [0.5], r_max=1.0)
