import math
import threading

import numpy as np
import pytest

from rkinner.errors import DivergenceError, DomainError
from rkinner.spaces import (
    SPACE_NAMES,
    KernelNode,
    PhiSpec,
    WeightSequence,
    gram_entry,
    kernel_eval,
    kernel_values,
    make_named_space,
    merge_points,
    phi_coefficients,
    space_from_spec,
    truncation_degree,
    weights_from_phi,
)


def _rand_disk(rng, rmax=0.9):
    return rmax * math.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())


@pytest.mark.parametrize(
    "name, expected",
    [
        ("hardy", [1, 1, 1, 1, 1]),
        ("dirichlet", [1, 2, 3, 4, 5]),
        ("bergman", [1, 1 / 2, 1 / 3, 1 / 4, 1 / 5]),
        ("korenblum", [1, 1, 4, 9, 16]),
    ],
)
def test_named_weights(name, expected):
    np.testing.assert_allclose(make_named_space(name).weights(5), expected, rtol=0, atol=1e-15)


def test_unknown_space_lists_valid_names():
    with pytest.raises(DomainError, match="hardy, dirichlet, bergman, korenblum"):
        make_named_space("sobolev")


def test_phi_hardy_case():
    space = weights_from_phi(PhiSpec((1.0,)), 5)
    np.testing.assert_allclose(space.weights(6), np.ones(6))


def test_phi_two_term_recursion():
    b = phi_coefficients(PhiSpec((0.04, 0.9)), 3)
    np.testing.assert_allclose(b, [1, 0.04, 0.9016, 0.072064], rtol=1e-14)
    space = weights_from_phi((0.04, 0.9), 3)
    np.testing.assert_allclose(space.weights(4), 1 / b, rtol=1e-14)


def test_phi_geometric():
    np.testing.assert_allclose(phi_coefficients(PhiSpec((0.5,)), 3), [1, 0.5, 0.25, 0.125])


@pytest.mark.parametrize("a, msg", [((0.0, 0.5), "a_1 > 0"), ((0.6, 0.6), "sum"), ((0.5, -0.1), "nonnegative")])
def test_phi_rejections(a, msg):
    with pytest.raises(DomainError, match=msg):
        PhiSpec(a)


def test_custom_weights_validated():
    with pytest.raises(DomainError):
        WeightSequence("custom", lam=[2.0, 1.0])
    with pytest.raises(DomainError):
        WeightSequence("custom", lam=[1.0, -1.0])
    s = space_from_spec("custom:1,2,3")
    np.testing.assert_allclose(s.weights(5), [1, 2, 3, 3, 3])


def test_space_records_round_trip():
    for rec in ({"type": "named", "name": "bergman"}, {"type": "phi", "a": [0.04, 0.9]},
                {"type": "custom", "lambda": [1.0, 2.0]}):
        assert space_from_spec(rec).spec() == rec
    assert space_from_spec("phi:0.04,0.9") == space_from_spec({"type": "phi", "a": [0.04, 0.9]})
    with pytest.raises(DomainError):
        space_from_spec({"type": "weird"})


def test_kernel_examples():
    h = make_named_space("hardy")
    assert kernel_eval(h, KernelNode(0.5), 0.5) == pytest.approx(4 / 3, abs=1e-12)
    d = make_named_space("dirichlet")
    assert kernel_eval(d, KernelNode(0.5), 0.5) == pytest.approx(4 * math.log(4 / 3), abs=1e-10)
    for name in SPACE_NAMES:
        assert kernel_eval(make_named_space(name), KernelNode(0.3 - 0.6j), 0) == pytest.approx(1)


def test_kernel_domain_errors():
    h = make_named_space("hardy")
    with pytest.raises(DomainError):
        kernel_eval(h, KernelNode(0.5), 1.0)
    with pytest.raises(DomainError):
        KernelNode(1.2)
    with pytest.raises(DomainError):
        KernelNode(0.2, -1)


def test_divergent_tail_rejected():
    with pytest.raises(DivergenceError):
        truncation_degree(1.0, 0.0, 1.0, 0, 1e-12)


def test_gram_entry_examples():
    h, b = make_named_space("hardy"), make_named_space("bergman")
    n5, n0 = KernelNode(0.5), KernelNode(0)
    assert gram_entry(h, n5, n5) == pytest.approx(4 / 3, abs=1e-12)
    assert gram_entry(b, n5, n5) == pytest.approx(16 / 9, abs=1e-12)
    assert gram_entry(h, n5, n0) == pytest.approx(1, abs=1e-15)


@pytest.mark.parametrize("name", SPACE_NAMES)
def test_series_matches_closed_form(name):
    rng = np.random.default_rng(7)
    space = make_named_space(name)
    for _ in range(100):
        w, z = _rand_disk(rng), _rand_disk(rng)
        series = kernel_eval(space, KernelNode(w), z, tol=1e-12, method="series")
        closed = complex(space.generating(np.conj(w) * z))
        assert abs(series - closed) < 1e-10


def test_phi_series_matches_closed_form():
    rng = np.random.default_rng(8)
    space = space_from_spec("phi:0.04,0.9")
    for _ in range(50):
        w, z = _rand_disk(rng), _rand_disk(rng)
        series = kernel_eval(space, KernelNode(w), z, tol=1e-12, method="series")
        assert abs(series - complex(space.generating(np.conj(w) * z))) < 1e-10


@pytest.mark.parametrize("name", SPACE_NAMES + ("phi",))
def test_tail_bound_soundness(name):
    rng = np.random.default_rng(11)
    space = space_from_spec("phi:0.3,0.6") if name == "phi" else make_named_space(name)
    for _ in range(30):
        w, z = _rand_disk(rng, 0.97), _rand_disk(rng, 0.97)
        order = int(rng.integers(0, 3))
        tol = 10.0 ** rng.uniform(-12, -4)
        node = KernelNode(w, order)
        a = kernel_eval(space, node, z, tol, method="series")
        b = kernel_eval(space, node, z, tol / 100, method="series")
        assert abs(a - b) <= tol


def test_gram_hermitian():
    rng = np.random.default_rng(3)
    for name in SPACE_NAMES:
        space = make_named_space(name)
        for _ in range(20):
            a = KernelNode(_rand_disk(rng), int(rng.integers(0, 3)))
            b = KernelNode(_rand_disk(rng), int(rng.integers(0, 3)))
            assert abs(gram_entry(space, a, b) - np.conj(gram_entry(space, b, a))) < 1e-12


def test_gram_entry_matches_coefficient_sum():
    # <k_B, k_A> for order-0 nodes is sum (conj(w_B) w_A)**n / lambda_n
    space = make_named_space("dirichlet")
    wa, wb = 0.4 + 0.3j, -0.2 + 0.5j
    n = np.arange(400)
    direct = np.sum((np.conj(wb) * wa) ** n / (n + 1))
    assert abs(gram_entry(space, KernelNode(wa), KernelNode(wb)) - direct) < 1e-13


@pytest.mark.parametrize("name", SPACE_NAMES)
def test_derivative_kernel_finite_difference(name):
    space = make_named_space(name)
    rng = np.random.default_rng(5)
    h = 1e-5
    for _ in range(10):
        w, z = _rand_disk(rng, 0.8), _rand_disk(rng, 0.8)
        # shifting w by a real h shifts conj(w) by h
        fd = (kernel_eval(space, KernelNode(w + h), z) - kernel_eval(space, KernelNode(w - h), z)) / (2 * h)
        assert abs(kernel_eval(space, KernelNode(w, 1), z) - fd) < 1e-6


def test_kernel_z_derivative():
    space = make_named_space("hardy")
    w, z = 0.3 + 0.2j, -0.4 + 0.1j
    expect = np.conj(w) / (1 - np.conj(w) * z) ** 2
    assert abs(kernel_values(space, KernelNode(w), np.array([z]), dz=1)[0] - expect) < 1e-13
    expect2 = 2 * np.conj(w) ** 2 / (1 - np.conj(w) * z) ** 3
    assert abs(kernel_values(space, KernelNode(w), np.array([z]), dz=2)[0] - expect2) < 1e-12


def test_merge_close_points():
    pts, mult = merge_points([0.5, 0.5 + 1e-12, -0.3])
    assert len(pts) == 2 and mult == [2, 1]


def test_concurrent_weight_extension():
    space = space_from_spec("phi:0.2,0.5,0.3")
    out = {}

    def work(k):
        out[k] = space.inverse_weights(200 + 37 * k).copy()

    threads = [threading.Thread(target=work, args=(k,)) for k in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    ref = phi_coefficients(space.phi, 500)
    for k, v in out.items():
        np.testing.assert_allclose(v, ref[: v.size], rtol=1e-14)
