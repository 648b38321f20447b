import math

import numpy as np
import pytest

from rkinner.engine import (
    ZeroConfig,
    build_gram,
    closed_form_one_point,
    eval_inner,
    gram_schmidt_kernels,
    inner_from_gram_schmidt,
    norm_sequence,
    projection_distance,
    solve_inner,
)
from rkinner.errors import DomainError
from rkinner.spaces import SPACE_NAMES, make_named_space, space_from_spec


@pytest.fixture
def hardy():
    return make_named_space("hardy")


def random_config(rng, n, rmax=0.85, sep=0.08):
    pts = []
    while len(pts) < n:
        z = rng.uniform(0.1, rmax) * np.exp(2j * np.pi * rng.uniform())
        if all(abs(z - p) > sep for p in pts):
            pts.append(complex(z))
    return pts


def test_build_gram_examples(hardy):
    G = build_gram(hardy, ZeroConfig.from_points([0.5])).matrix
    np.testing.assert_allclose(G, [[1, 1], [1, 4 / 3]], atol=1e-14)
    G0 = build_gram(hardy, ZeroConfig.from_points([])).matrix
    np.testing.assert_allclose(G0, [[1]])
    Gb = build_gram(make_named_space("bergman"), ZeroConfig.from_points([0.5])).matrix
    np.testing.assert_allclose(Gb, [[1, 1], [1, 16 / 9]], atol=1e-14)


def test_gram_is_hermitian_positive(hardy):
    rng = np.random.default_rng(1)
    for name in SPACE_NAMES:
        G = build_gram(make_named_space(name), ZeroConfig.from_points(random_config(rng, 4))).matrix
        assert np.max(np.abs(G - G.conj().T)) < 1e-12
        assert np.linalg.eigvalsh(G)[0] > 0


def test_solve_hardy_one_point(hardy):
    rep = solve_inner(hardy, [0.5])
    np.testing.assert_allclose(rep.coefficients, [4, -3], atol=1e-10)
    assert rep.norm_squared == pytest.approx(4, abs=1e-10)
    assert max(r for _, r in rep.residual_report) < 1e-8


def test_solve_no_zeros():
    for name in SPACE_NAMES:
        rep = solve_inner(make_named_space(name), [])
        assert rep.norm == pytest.approx(1)
        assert rep(0.3 - 0.2j) == pytest.approx(1)


def test_bergman_one_point_norm():
    rep = solve_inner(make_named_space("bergman"), [0.5])
    assert rep.norm_squared == pytest.approx(16 / 7, abs=1e-9)


def test_eval_inner_examples(hardy):
    rep = solve_inner(hardy, [0.5])
    assert abs(eval_inner(rep, 0) - 1) < 1e-12
    assert abs(eval_inner(rep, 0.5)) < 1e-12
    assert eval_inner(rep, -0.5) == pytest.approx(1.6, abs=1e-12)
    with pytest.raises(DomainError):
        eval_inner(rep, 1.0)


def test_closed_form_hardy_sign(hardy):
    # (1/w)(w - z)/(1 - conj(w) z); the opposite sign would break J(0) = 1
    w = 0.5
    rep = closed_form_one_point(hardy, w)
    for z in (0.0, 0.3, -0.7j):
        assert rep(z) == pytest.approx((w - z) / (w * (1 - np.conj(w) * z)), abs=1e-12)


def test_closed_form_dirichlet_display():
    space = make_named_space("dirichlet")
    w = 0.5
    rep = closed_form_one_point(space, w)
    # the displayed numerator over log(1 - |w|^2) + |w|^2; with "- |w|^2" J(0) would not be 1
    den = math.log(1 - abs(w) ** 2) + abs(w) ** 2
    for z in (0.2, -0.6, 0.4j):
        num = math.log(1 - abs(w) ** 2) - (w / z) * np.log(1 - np.conj(w) * z)
        assert rep(z) == pytest.approx(num / den, abs=1e-10)
    assert solve_inner(space, [w])(0.2) == pytest.approx(rep(0.2), abs=1e-10)


def test_closed_form_bergman_display():
    space = make_named_space("bergman")
    rep = closed_form_one_point(space, 0.5)
    for z in (0.0, 0.3, -0.8):
        assert rep(z) == pytest.approx((1 - 0.5625 / (1 - 0.5 * z) ** 2) / 0.4375, abs=1e-12)


def test_closed_form_rejects_origin(hardy):
    with pytest.raises(DomainError):
        closed_form_one_point(hardy, 0)


def test_oracle_equivalence():
    rng = np.random.default_rng(2)
    for _ in range(50):
        space = make_named_space(SPACE_NAMES[rng.integers(4)])
        w = random_config(rng, 1, 0.95)[0]
        a = solve_inner(space, [w]).coefficients
        b = closed_form_one_point(space, w).coefficients
        assert np.max(np.abs(a - b)) < 1e-10 * max(1, np.max(np.abs(b)))


def test_norm_sequence_examples(hardy):
    np.testing.assert_allclose(norm_sequence(hardy, [0.5, -0.5]), [2, 4], atol=1e-12)
    assert norm_sequence(hardy, [0.9])[0] == pytest.approx(1 / 0.9, abs=1e-12)
    d = norm_sequence(make_named_space("dirichlet"), [0.5])[0]
    assert d == pytest.approx(math.sqrt(1 / (1 - 1 / (4 * math.log(4 / 3)))), rel=1e-12)
    # value pinned from the first verified run
    assert d == pytest.approx(2.7630516877, abs=1e-9)


def test_norm_sequence_monotone_everywhere():
    rng = np.random.default_rng(4)
    for name in SPACE_NAMES:
        space = make_named_space(name)
        for _ in range(5):
            v = norm_sequence(space, random_config(rng, 6))
            assert all(b >= a * (1 - 1e-9) for a, b in zip(v, v[1:]))


def test_projection_distance_examples(hardy):
    assert projection_distance(hardy, [0.5]) == pytest.approx(0.5, abs=1e-12)
    assert projection_distance(hardy, [0.5, -0.5]) == pytest.approx(0.25, abs=1e-12)
    assert projection_distance(hardy, []) == pytest.approx(1)


def test_three_way_norm_agreement():
    rng = np.random.default_rng(6)
    for name in SPACE_NAMES:
        space = make_named_space(name)
        for _ in range(5):
            pts = random_config(rng, int(rng.integers(1, 5)))
            rep = solve_inner(space, pts)
            d = projection_distance(space, pts)
            a, b, c = rep.coefficients[0].real, rep.quadratic_form, 1 / d**2
            assert abs(a - b) < 1e-8 * a and abs(a - c) < 1e-8 * a


def test_interpolation_certificate_with_multiplicity(hardy):
    config = ZeroConfig.from_points([0.5, -0.3j], [2, 1])
    rep = solve_inner(hardy, config)
    assert abs(rep(0) - 1) < 1e-9
    assert abs(rep(0.5)) < 1e-9 and abs(rep(-0.3j)) < 1e-9
    assert abs(rep.values(np.array([0.5]), dz=1)[0]) < 1e-9
    assert rep.interpolation_error < 1e-9
    # Hardy: ||J||^2 = prod |w|^-2r
    assert rep.norm_squared == pytest.approx(16 / 0.09, rel=1e-10)


def test_near_coincident_points_use_extended_precision(hardy):
    rep = solve_inner(hardy, [0.5, 0.5 + 1e-9])
    assert rep.precision == "mp"
    assert rep.norm == pytest.approx(4, rel=1e-8)


def test_residuals_below_tolerance():
    rng = np.random.default_rng(9)
    space = space_from_spec("phi:0.04,0.9")
    rep = solve_inner(space, random_config(rng, 3))
    assert len(rep.residual_report) == 2 * 4 + 8
    assert max(r for _, r in rep.residual_report) < 1e-8


def test_gram_schmidt_examples(hardy):
    w1, w2 = 0.4 + 0.3j, -0.6j
    t1 = gram_schmidt_kernels(hardy, [w1])
    assert t1.coeffs[0, 0] == pytest.approx(math.sqrt(1 - abs(w1) ** 2))
    assert t1.inner(0, 0) == pytest.approx(1)
    t2 = gram_schmidt_kernels(hardy, [w1, w2])
    assert abs(t2.k0_products[1]) ** 2 == pytest.approx((1 - abs(w2) ** 2) * abs(w1) ** 2, abs=1e-12)


def test_gram_schmidt_orthonormal_and_consistent():
    rng = np.random.default_rng(10)
    for name in SPACE_NAMES:
        space = make_named_space(name)
        pts = random_config(rng, 4)
        t = gram_schmidt_kernels(space, pts)
        ip = np.array([[t.inner(i, j) for j in range(4)] for i in range(4)])
        assert np.max(np.abs(ip - np.eye(4))) < 1e-10
        gs = inner_from_gram_schmidt(t, space, pts)
        rep = solve_inner(space, pts)
        assert np.max(np.abs(gs.coefficients - rep.coefficients)) < 1e-8 * np.max(np.abs(rep.coefficients))


def test_takenaka_telescoping(hardy):
    rng = np.random.default_rng(12)
    for _ in range(20):
        pts = random_config(rng, 4)
        t = gram_schmidt_kernels(hardy, pts)
        lhs = 1 - np.cumsum(np.abs(t.k0_products) ** 2)
        np.testing.assert_allclose(lhs, np.cumprod(np.abs(pts) ** 2), atol=1e-10)


def test_config_rejects_origin_and_outside():
    with pytest.raises(DomainError):
        ZeroConfig.from_points([0.0])
    with pytest.raises(DomainError):
        ZeroConfig.from_points([1.0])


def test_taylor_coefficients(hardy):
    rep = solve_inner(hardy, [0.5])
    k = np.arange(10)
    # (1 - 2z)/(1 - z/2) = 1 - (3/2) sum_{k>=1} (z/2)**(k-1) z
    expect = np.concatenate([[1.0], -1.5 * 0.5 ** (k[1:] - 1)])
    np.testing.assert_allclose(rep.taylor(9), expect, atol=1e-12)
