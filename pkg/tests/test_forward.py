import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from coconet.errors import NegativeShift, SingularSystem
from coconet.forward import (
    boundary_consistency_check,
    branch_gap,
    local_system,
    partition_of,
    phi,
    phi_hat,
    shift_vector,
)
from coconet.model import Partition, validate_network

from netgen import assets_oracle, random_fair, random_superfair


@pytest.mark.parametrize(
    "s, label",
    [((-1, 12), "BH"), ((0, 8), "CC"), ((9, 3), "HC"), ((-1e-12, 8 + 1e-12), "BH")],
)
def test_partition_of(fair_net, s, label):
    assert partition_of(s, fair_net).label == label


def test_partition_of_tolerance(fair_net):
    assert partition_of((-1e-12, 8 + 1e-12), fair_net, eps=1e-9).label == "CC"


def test_local_system_examples(fair_net):
    ls = local_system(Partition.from_label("CC"), fair_net)
    np.testing.assert_allclose(ls.L, [[2, -0.75], [-0.75, 2]])
    np.testing.assert_allclose(ls.b, 0)
    ls = local_system(Partition.from_label("BH"), fair_net)
    np.testing.assert_allclose(ls.L, [[2, 0], [0, 1]])
    np.testing.assert_allclose(ls.b, [-6, 8])
    dec = validate_network([1, 1], [3, 5], [1, 1], np.zeros((2, 2)))
    ls = local_system(Partition.from_label("HH"), dec)
    np.testing.assert_allclose(ls.L, np.eye(2))
    np.testing.assert_allclose(ls.b, [3, 5])


def test_local_solve_inverts_apply(fair_net):
    ls = local_system(Partition.from_label("CH"), fair_net)
    s = np.array([3.0, 11.0])
    np.testing.assert_allclose(ls.solve(ls.apply(s)), s)


def test_local_solve_singular():
    from coconet.forward import LocalSystem

    ls = LocalSystem(np.zeros((2, 2)), np.zeros(2), Partition.from_label("CC"))
    with pytest.raises(SingularSystem):
        ls.solve([1, 1])


@pytest.mark.parametrize("s, a", [((18, 18), (20, 20)), ((4, 4), (5, 5)), ((-1, 12), (-8, 20))])
def test_phi_examples(fair_net, s, a):
    np.testing.assert_allclose(phi(s, fair_net), a)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**6))
def test_phi_matches_balance_sheet_oracle(seed):
    rng = np.random.default_rng(seed)
    net = random_superfair(rng)
    s = rng.uniform(-10, 40, size=net.n)
    np.testing.assert_allclose(phi(s, net), assets_oracle(s, net), atol=1e-9)


def test_shift_vectors():
    net4 = validate_network([1, 1], [8, 8], [8, 8], [[0, 0.3], [0.3, 0]])
    np.testing.assert_allclose(shift_vector(net4, [6, 6], {0}), [6, -1.8])
    net5 = validate_network([1, 1], [6, 6], [6, 6], [[0, 0.6], [0.6, 0]])
    np.testing.assert_allclose(shift_vector(net5, [2.5, 5.9], {1}), [-3.54, 5.9])


def test_phi_hat_zero_shift_is_phi(rng):
    for _ in range(50):
        net = random_fair(rng)
        s = rng.uniform(-10, 40, size=net.n)
        np.testing.assert_array_equal(phi_hat(s, net, np.zeros(net.n)), phi(s, net))


def test_phi_hat_is_phi_of_reduced_network(rng):
    for _ in range(100):
        net = random_fair(rng)
        d = rng.uniform(0, 1, size=net.n) * net.c
        reduced = net.with_credits(net.c - d)
        s = rng.uniform(-10, 40, size=net.n)
        np.testing.assert_allclose(phi_hat(s, net, d), phi(s, reduced), atol=1e-9)


def test_phi_hat_rejects_negative_shift(fair_net):
    with pytest.raises(NegativeShift):
        phi_hat([1, 1], fair_net, [-1, 0])


def test_branch_gaps(fair_net, superfair_net):
    np.testing.assert_allclose(branch_gap([8, 8], fair_net, 0, "threshold"), 0)
    np.testing.assert_allclose(branch_gap([8, 12], fair_net, 0, "threshold"), 0)
    np.testing.assert_allclose(phi([8, 12], fair_net), [10, 14])
    np.testing.assert_allclose(branch_gap([8, 12], superfair_net, 0, "threshold"), [-4, 3])
    np.testing.assert_allclose(branch_gap([0, 3], superfair_net, 0, "zero"), 0)


def test_boundary_check_fair_and_superfair(rng):
    for _ in range(5):
        rep = boundary_consistency_check(random_fair(rng), trials=200, seed=1)
        assert rep.fair and rep.passed and rep.max_rel_discrepancy <= 1e-9
    rep = boundary_consistency_check(random_superfair(rng), trials=200, seed=2)
    assert rep.passed and rep.max_jump_formula_error <= 1e-9
    assert rep.to_dict()["comparisons"] == rep.comparisons


def test_boundary_check_records_jumps(superfair_net):
    rep = boundary_consistency_check(superfair_net, trials=300, seed=0)
    assert not rep.fair and rep.passed
    assert rep.jumps and rep.max_discrepancy > 0


def test_boundary_check_deterministic(fair_net):
    a = boundary_consistency_check(fair_net, trials=50, seed=7).to_dict()
    b = boundary_consistency_check(fair_net, trials=50, seed=7).to_dict()
    assert a == b
