import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from coconet.errors import NoConvergence, NotFair, NotSubFair, SingularSystem, TooManyBanks
from coconet.forward import partition_of, phi
from coconet.model import Network, Partition, validate_network
from coconet.solver import (
    enumerate_equilibria,
    fair_inverse,
    fictitious_conversion,
    is_consistent,
    solve_candidate,
    subfair_witness,
)

from netgen import assets_oracle, random_fair, random_subfair, random_superfair


def brute_force(a, net, tol=1e-9):
    """Independent oracle: every partition, solved from the balance-sheet map."""
    out = []
    n = net.n
    for status in itertools.product(range(3), repeat=n):
        p = Partition.from_status(status)
        # each branch is affine in s: recover L and b by probing it at 0 and unit vectors
        base = np.zeros(n)
        cols = []
        for j in range(n):
            e = np.zeros(n)
            e[j] = 1.0
            cols.append(_branch(e, p, net) - _branch(base, p, net))
        L = np.array(cols).T
        b = _branch(base, p, net)
        try:
            s = np.linalg.solve(L, a - b)
        except np.linalg.LinAlgError:
            continue
        eps = tol * (1 + np.abs(s).max())
        ok = all(
            (st == 0 and s[i] < 0) or (st == 1 and -eps <= s[i] <= net.l[i] + eps) or (st == 2 and s[i] > net.l[i])
            for i, st in enumerate(status)
        )
        if ok and not any(np.abs(s - t).max() <= 1e-7 * (1 + np.abs(s).max()) for t in out):
            out.append(s)
    return out


def _branch(s, p, net):
    """Balance-sheet assets for prices ``s`` with statuses forced to ``p``."""
    n = net.n
    st = p.status
    pay = np.where(st == 2, net.c, np.where(st == 1, net.m * s, 0.0))
    shares = np.where(st == 2, 1.0, 1.0 + net.m)
    own = np.where(st == 2, net.c, 0.0)
    return shares * s + own - net.W @ pay


def test_branch_helper_agrees_with_oracle(rng):
    for _ in range(50):
        net = random_superfair(rng)
        s = rng.uniform(-10, 40, size=net.n)
        np.testing.assert_allclose(_branch(s, partition_of(s, net), net), assets_oracle(s, net))


def test_fair_example(fair_net):
    eqs = enumerate_equilibria([10, 10], fair_net)
    assert eqs.count == 1 and eqs.labels == ["CC"]
    np.testing.assert_allclose(eqs.equilibria[0].s, [8, 8])
    assert eqs.to_dict()["equilibria"][0]["C"] == [1, 2]


def test_superfair_two_equilibria(superfair_net):
    eqs = enumerate_equilibria([-6, 16], superfair_net)
    assert eqs.labels == ["BH", "CC"]
    np.testing.assert_allclose(eqs.equilibria[0].s, [-1.5, 12])
    np.testing.assert_allclose(eqs.equilibria[1].s, [0, 8])
    assert eqs.equilibria[1].boundary == (True, True)


def test_subfair_no_equilibrium(subfair_net):
    assert enumerate_equilibria([9, 30], subfair_net).count == 0


def test_boundary_solution_reported_once_as_converting(fair_net):
    # s = (8, 8) lies on the CC / HH / CH / HC boundary
    eqs = enumerate_equilibria(phi([8, 8], fair_net), fair_net)
    assert eqs.labels == ["CC"]
    eqs = enumerate_equilibria(phi([0, 3], fair_net), fair_net)
    assert eqs.labels == ["CC"]


def test_stored_prices_reproduce_partition(rng):
    for _ in range(200):
        net = random_superfair(rng)
        for eq in enumerate_equilibria(rng.uniform(-30, 50, size=net.n), net):
            assert partition_of(eq.s, net) == eq.partition


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6))
def test_enumeration_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    net = random_superfair(rng, n=int(rng.integers(2, 5)))
    a = rng.uniform(-30, 50, size=net.n)
    got = enumerate_equilibria(a, net)
    want = brute_force(a, net)
    assert got.count == len(want)
    for eq in got:
        assert min(np.abs(eq.s - t).max() for t in want) <= 1e-7 * (1 + np.abs(eq.s).max())
        np.testing.assert_allclose(assets_oracle(eq.s, net), a, atol=1e-8 * (1 + np.abs(a).max()))


def test_fair_uniqueness_small_sample(rng):
    for _ in range(100):
        net = random_fair(rng)
        a = rng.uniform(-30, 50, size=net.n)
        eqs = enumerate_equilibria(a, net)
        assert eqs.count == 1
        assert eqs.equilibria[0].residual <= 1e-8 * (1 + np.abs(a).max())


def test_solve_candidate(fair_net):
    s = solve_candidate(Partition.from_label("CH"), [5, 20], fair_net)
    np.testing.assert_allclose(s, [5.5, 16.125])
    ok, flags = is_consistent(Partition.from_label("CH"), s, fair_net)
    assert ok and flags == (False, False)
    assert not is_consistent(Partition.from_label("HH"), s, fair_net)[0]


def test_solve_candidate_singular():
    # L is diagonally dominant for every valid network; force singularity with m = -1
    net = Network(np.array([-1.0, -1.0]), np.ones(2), np.ones(2), np.zeros((2, 2)))
    with pytest.raises(SingularSystem):
        solve_candidate(Partition.from_label("BB"), [1, 1], net)


def test_too_many_banks(monkeypatch):
    net = validate_network(np.ones(3), np.ones(3), np.ones(3), np.zeros((3, 3)))
    with pytest.raises(TooManyBanks):
        enumerate_equilibria(np.ones(3), net, n_max=2)
    monkeypatch.setenv("COCO_NET_NMAX", "2")
    with pytest.raises(TooManyBanks):
        enumerate_equilibria(np.ones(3), net)


@pytest.mark.parametrize(
    "a, label, s, k",
    [((5, 20), "CH", (5.5, 16.125), 1), ((20, 20), "HH", (18, 18), 0), ((0, 0), "CC", (0, 0), None)],
)
def test_fictitious_examples(fair_net, a, label, s, k):
    res = fictitious_conversion(a, fair_net)
    assert res.equilibrium.label == label
    np.testing.assert_allclose(res.equilibrium.s, s, atol=1e-12)
    if k is not None:
        assert res.iterations == k
    assert res.iterations <= 3 * fair_net.n


def test_fictitious_requires_fair(superfair_net):
    with pytest.raises(NotFair):
        fictitious_conversion([1, 1], superfair_net)


def test_fictitious_matches_enumeration(rng):
    for _ in range(200):
        net = random_fair(rng)
        a = rng.uniform(0, 50, size=net.n)
        res = fictitious_conversion(a, net, fallback=False)
        eq = enumerate_equilibria(a, net).equilibria[0]
        assert res.method == "fictitious" and res.iterations <= 3 * net.n
        np.testing.assert_allclose(res.equilibrium.s, eq.s, atol=1e-9 * (1 + np.abs(a).max()))


def test_fictitious_falls_back_when_demotion_stalls(rng):
    seen = 0
    while seen < 20:
        net = random_fair(rng)
        a = rng.uniform(-30, 50, size=net.n)
        try:
            fictitious_conversion(a, net, fallback=False)
            continue
        except NoConvergence:
            seen += 1
        res = fictitious_conversion(a, net)
        ref = enumerate_equilibria(a, net).equilibria[0]
        assert res.method == "enumerate"
        np.testing.assert_array_equal(res.equilibrium.s, ref.s)


def test_fair_inverse_negative_assets(rng):
    for _ in range(200):
        net = random_fair(rng)
        a = rng.uniform(-30, 50, size=net.n)
        eq = fair_inverse(a, net)
        ref = enumerate_equilibria(a, net).equilibria[0]
        assert eq.partition == ref.partition
        np.testing.assert_allclose(eq.s, ref.s, atol=1e-9 * (1 + np.abs(a).max()))


def test_witness_example(subfair_net):
    a = subfair_witness(0, subfair_net)
    np.testing.assert_allclose(a, [9, 29])
    assert enumerate_equilibria(a, subfair_net).count == 0


def test_witness_single_bank():
    net = validate_network([1], [12], [8], [[0]])
    a = subfair_witness(0, net)
    assert 16 < a[0] < 20
    assert enumerate_equilibria(a, net).count == 0


def test_witness_requires_subfair(fair_net):
    with pytest.raises(NotSubFair):
        subfair_witness(0, fair_net)


def test_witness_random(rng):
    for _ in range(50):
        net, sub = random_subfair(rng)
        for i in sub:
            assert enumerate_equilibria(subfair_witness(i, net), net).count == 0
