"""Compiled kernels and the numpy fallback must agree."""

import numpy as np
import pytest

from coconet import _fallback, kernels
from coconet.model import Partition

from netgen import random_superfair

_kernels = pytest.importorskip("coconet._kernels")
BACKENDS = [_fallback, _kernels]


def _args(net):
    return net.m, net.c, net.l, net.W


def test_backend_selected():
    assert kernels.BACKEND in ("cython", "python")


@pytest.mark.parametrize("seed", range(20))
def test_enumerate_parity(seed):
    rng = np.random.default_rng(seed)
    net = random_superfair(rng)
    for _ in range(10):
        a = rng.uniform(-30, 50, size=net.n)
        (k1, S1), (k2, S2) = (b.enumerate_candidates(*_args(net), a, 1e-9) for b in BACKENDS)
        np.testing.assert_array_equal(k1, k2)
        np.testing.assert_allclose(S1, S2, rtol=1e-10, atol=1e-10)
        f1, F1 = _fallback.enumerate_candidates(*_args(net), a, 1e-9, True)
        f2, F2 = _kernels.enumerate_candidates(*_args(net), a, 1e-9, True)
        assert len(f1) == len(f2) == min(1, len(k1))
        if len(f1):
            assert f1[0] == f2[0] == k1[0]


@pytest.mark.parametrize("seed", range(20))
def test_fictitious_parity(seed):
    rng = np.random.default_rng(100 + seed)
    net = random_superfair(rng)
    a = rng.uniform(-30, 50, size=net.n)
    r1, r2 = (b.fictitious(*_args(net), a, 1e-9, 3 * net.n) for b in BACKENDS)
    np.testing.assert_array_equal(r1[0], r2[0])
    np.testing.assert_allclose(r1[1], r2[1], rtol=1e-10, atol=1e-10)
    assert r1[2:] == r2[2:]


@pytest.mark.parametrize("seed", range(10))
def test_solve_status_parity(seed):
    rng = np.random.default_rng(200 + seed)
    net = random_superfair(rng)
    a = rng.uniform(-30, 50, size=net.n)
    st = Partition.from_status(rng.integers(0, 3, size=net.n)).status
    s1, s2 = (b.solve_status(net.m, net.c, net.W, a, st) for b in BACKENDS)
    np.testing.assert_allclose(s1, s2, rtol=1e-10, atol=1e-10)


def test_singular_returns_none():
    # m = -1 makes the bankrupt block of L vanish
    m = -np.ones(2)
    for b in BACKENDS:
        assert b.solve_status(m, np.ones(2), np.zeros((2, 2)), np.ones(2), np.array([0, 0])) is None


def test_candidates_sorted_by_code():
    rng = np.random.default_rng(5)
    net = random_superfair(rng, n=4)
    for b in BACKENDS:
        codes, _ = b.enumerate_candidates(*_args(net), rng.uniform(-30, 50, size=4), 1e-9)
        assert list(codes) == sorted(codes)


def test_fictitious_is_monotone_and_bounded():
    rng = np.random.default_rng(9)
    for _ in range(200):
        net = random_superfair(rng)
        a = rng.uniform(0, 50, size=net.n)
        for b in BACKENDS:
            status, _, k, _ = b.fictitious(*_args(net), a, 1e-9, 3 * net.n)
            assert k <= 2 * net.n
            assert np.all((status >= 0) & (status <= 2))


def test_fictitious_single_bank():
    m, c, l, W = np.ones(1), np.array([8.0]), np.array([8.0]), np.zeros((1, 1))
    for b in BACKENDS:
        status, s, k, ok = b.fictitious(m, c, l, W, np.array([20.0]), 1e-9, 3)
        assert ok and k == 0 and status.tolist() == [2]
        status, s, k, ok = b.fictitious(m, c, l, W, np.array([-4.0]), 1e-9, 3)
        assert ok and status.tolist() == [0] and k == 2
        np.testing.assert_allclose(s, [-2.0])
