import numpy as np
import pytest

from rkinner.engine import build_gram
from rkinner.errors import DomainError
from rkinner.spaces import SPACE_NAMES, KernelNode, make_named_space, space_from_spec
from rkinner.zerosets import (
    BOUNDED,
    GROWING,
    INCONCLUSIVE,
    SS_MET,
    blaschke_sum,
    blaschke_union_inequality,
    shapiro_shields,
    shapiro_shields_matrix,
    verdict_trace_csv,
    zero_set_certificate,
)


def _points(rng, n, rmax=0.9):
    return [complex(rng.uniform(0.1, rmax) * np.exp(2j * np.pi * rng.uniform())) for _ in range(n)]


def test_blaschke_sequence_certified_bounded():
    v = zero_set_certificate(make_named_space("hardy"), lambda j: 1 - 1 / (j + 1) ** 2, 30, 1e3)
    assert v.bounded == BOUNDED
    assert v.norms[-1] <= v.extrapolated_sup <= 1e3
    assert all(b >= a for a, b in zip(v.norms, v.norms[1:]))


def test_non_blaschke_sequence_grows():
    # ||J_n|| = n + 1 here, so a bound of 20 is crossed at n = 20
    v = zero_set_certificate(make_named_space("hardy"), lambda j: 1 - 1 / (j + 1), 25, 20)
    assert v.bounded == GROWING
    np.testing.assert_allclose(v.norms, np.arange(2, 27), rtol=1e-8)
    assert "n=20" in v.note


def test_non_blaschke_within_forty_terms_is_inconclusive():
    v = zero_set_certificate(make_named_space("hardy"), lambda j: 1 - 1 / (j + 1), 40, 1e3)
    assert v.bounded == INCONCLUSIVE
    assert max(v.norms) == pytest.approx(41, rel=1e-8)


@pytest.mark.parametrize("name", SPACE_NAMES)
def test_single_point_is_a_zero_set(name):
    v = zero_set_certificate(make_named_space(name), [0.5], 1, 1e3)
    assert v.bounded == BOUNDED


def test_no_oracle_outside_hardy_is_inconclusive():
    v = zero_set_certificate(make_named_space("bergman"), lambda j: 1 - 1 / (j + 1) ** 2, 10, 1e3)
    assert v.bounded == INCONCLUSIVE


def test_certificate_rejections():
    h = make_named_space("hardy")
    with pytest.raises(DomainError):
        zero_set_certificate(h, [0.5], 0, 10)
    with pytest.raises(DomainError):
        zero_set_certificate(h, [0.5], 1, 0.5)
    with pytest.raises(DomainError):
        zero_set_certificate(h, [0.0], 1, 10)


def test_growing_only_above_bound():
    rng = np.random.default_rng(0)
    h = make_named_space("hardy")
    for _ in range(10):
        pts = _points(rng, 5)
        bound = float(rng.uniform(1.5, 30))
        v = zero_set_certificate(h, pts, 5, bound, finite=False)
        assert (v.bounded == GROWING) == (max(v.norms) > bound)


def test_hardy_norms_telescope():
    rng = np.random.default_rng(1)
    h = make_named_space("hardy")
    count = 0
    while count < 200:
        pts = _points(rng, 8, 0.95)
        v = zero_set_certificate(h, pts, 8, 1e12)
        prods = np.cumprod(np.abs(pts) ** 2)
        np.testing.assert_allclose(np.square(v.norms) * prods, 1, atol=1e-8)
        count += 8


def test_shapiro_shields_hardy_matrix():
    pts = [0.5, 0.3j, -0.4 + 0.2j]
    M = shapiro_shields_matrix(make_named_space("hardy"), pts)
    w = np.asarray(pts)
    np.testing.assert_allclose(M, np.conj(w)[None, :] * w[:, None], atol=1e-14)


def test_shapiro_shields_hardy_products():
    eigs, prods, verdict = shapiro_shields(make_named_space("hardy"), [0.5, 0.25], 2)
    np.testing.assert_allclose(prods, [0.25, 0.015625], atol=1e-14)
    assert min(eigs) >= -1e-10 and verdict == SS_MET


def test_shapiro_shields_phi_matrix():
    space = space_from_spec("phi:0.04,0.9")
    pts = [0.5, -0.3 + 0.4j, 0.7j]
    w = np.asarray(pts)
    t = np.conj(w)[None, :] * w[:, None]
    expect = 0.04 * t + 0.9 * t**2
    np.testing.assert_allclose(shapiro_shields_matrix(space, pts), expect, atol=1e-12)


def test_shapiro_shields_rejects_repeated_points():
    with pytest.raises(DomainError):
        shapiro_shields(make_named_space("hardy"), [0.5, 0.5], 2)


def test_phi_space_matrices_psd():
    rng = np.random.default_rng(2)
    for _ in range(5):
        a = rng.dirichlet(np.ones(3))[:2]
        space = space_from_spec({"type": "phi", "a": a.tolist()})
        for _ in range(100):
            pts = _points(rng, int(rng.integers(1, 8)))
            assert np.linalg.eigvalsh(shapiro_shields_matrix(space, pts))[0] >= -1e-10


def test_shapiro_shields_consistent_with_certificate():
    rng = np.random.default_rng(3)
    for name in ("hardy", "dirichlet"):
        space = make_named_space(name)
        for _ in range(10):
            pts = _points(rng, 4)
            _, _, ss = shapiro_shields(space, pts, 4)
            if ss == SS_MET:
                assert zero_set_certificate(space, pts, 4, 1e3).bounded != GROWING


def test_shapiro_shields_infinite_sequence():
    _, prods, verdict = shapiro_shields(make_named_space("hardy"), lambda j: 1 - 1 / (j + 1) ** 2, 30)
    assert verdict == SS_MET and prods[-1] > 0


def test_oppenheim_inequality():
    rng = np.random.default_rng(4)
    for _ in range(50):
        pts = _points(rng, 4)
        nodes = [KernelNode(p) for p in pts]
        A = build_gram(make_named_space("hardy"), nodes, check=False).matrix
        B = build_gram(make_named_space("dirichlet"), nodes, check=False).matrix
        lhs = np.linalg.det(A * B).real
        rhs = np.linalg.det(A).real * np.prod(np.diag(B).real)
        assert lhs >= rhs - 1e-10


def test_blaschke_sum_examples():
    assert blaschke_sum([0.5, 0.5]) == pytest.approx(1.0)
    assert blaschke_sum([1 - 1 / (j + 1) ** 2 for j in (1, 2, 3)]) == pytest.approx(1 / 4 + 1 / 9 + 1 / 16)
    assert blaschke_sum([]) == 0


def test_union_inequality_examples():
    h = make_named_space("hardy")
    r = blaschke_union_inequality(h, [0.5], [-0.5])
    assert r.union_norm == pytest.approx(4) and r.bound == pytest.approx(4)
    r = blaschke_union_inequality(h, [], [0.9])
    assert r.union_norm == pytest.approx(1 / 0.9) and r.bound == pytest.approx(1 / 0.9)
    assert blaschke_union_inequality(make_named_space("bergman"), [0.5], [0.25]).holds


def test_union_inequality_needs_contractive_shift():
    with pytest.raises(DomainError, match="dirichlet"):
        blaschke_union_inequality(make_named_space("dirichlet"), [0.5], [0.25])


def test_trace_csv():
    h = make_named_space("hardy")
    v = zero_set_certificate(h, [0.5, -0.5], 2, 10)
    eigs, prods, _ = shapiro_shields(h, [0.5, -0.5], 2)
    text = verdict_trace_csv(v, eigs, prods)
    lines = text.strip().splitlines()
    assert lines[0] == "n,norm,partial_product,min_eigenvalue"
    assert len(lines) == 3 and lines[2].startswith("2,4.0")
