import numpy as np
import pytest

from coconet.errors import SingularIminusW
from coconet.matrix import check_diag_dominance, check_inverse_nonneg, check_sign_pattern, matrix_suite
from coconet.model import Network, Partition, validate_network

from netgen import random_superfair, random_W


def test_inverse_example():
    rep = check_inverse_nonneg([[0, 0.75], [0.75, 0]])
    assert rep.passed
    np.testing.assert_allclose(rep.detail["inverse"], np.array([[16, 12], [12, 16]]) / 7)
    assert check_inverse_nonneg(np.zeros((3, 3))).value == 0.0


def test_inverse_singular():
    with pytest.raises(SingularIminusW):
        check_inverse_nonneg([[0, 1], [1, 0]])


def test_inverse_random(rng):
    for _ in range(300):
        n = int(rng.integers(2, 7))
        W = random_W(n, rng) * 0.99
        assert check_inverse_nonneg(W).passed


def test_sign_pattern_examples(fair_net):
    rep = check_sign_pattern(set(), set(), fair_net)
    assert rep.passed and rep.value == pytest.approx(0.0)
    net4 = validate_network([1, 1], [8, 8], [8, 8], [[0, 0.3], [0.3, 0]])
    assert check_sign_pattern(set(), {0, 1}, net4).passed


def test_sign_pattern_detects_bad_matrix():
    # negative share counts break the theory; the check must notice
    net = Network(np.array([-0.9, -0.9]), np.ones(2), np.ones(2), np.array([[0, 0.9], [0.9, 0]]))
    assert not check_sign_pattern(set(), {0, 1}, net).passed


def test_diag_dominance_examples(fair_net):
    rep = check_diag_dominance(set(), {0, 1}, fair_net)
    assert rep.passed and rep.value == pytest.approx(2 - 0.75)
    assert check_diag_dominance(set(), set(), fair_net).value == pytest.approx(1.0)
    full = validate_network([3, 3], [1, 1], [1, 1], [[0, 1], [1, 0]])
    assert check_diag_dominance(set(), {0, 1}, full).value == pytest.approx(1.0)


def test_random_draws(rng):
    for _ in range(300):
        net = random_superfair(rng)
        st = rng.integers(0, 3, size=net.n)
        p = Partition.from_status(st)
        assert check_sign_pattern(p.B, p.C, net).passed
        assert check_diag_dominance(p.B, p.C, net).passed


def test_suite_exhaustive_and_sampled(fair_net, rng):
    out = matrix_suite(fair_net, trials=100, seed=0)
    assert out["sign_pattern"]["partitions"] == 9
    assert all(out[k]["passed"] for k in out)
    big = random_superfair(rng, n=6)
    out = matrix_suite(big, trials=50, seed=0)
    assert out["diag_dominance"]["partitions"] == 50
    assert matrix_suite(big, trials=50, seed=0) == out


def test_suite_singular_inverse_reported():
    net = validate_network([1, 1], [1, 1], [1, 1], [[0, 1], [1, 0]])
    out = matrix_suite(net, trials=10)
    assert out["inverse_nonneg"]["error"] == "SingularIminusW"
    assert out["sign_pattern"]["passed"] and out["diag_dominance"]["passed"]
