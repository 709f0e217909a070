"""The forward map from stock prices to the asset values that rationalise them.

For a fixed partition the relation is affine, ``a = L s + b`` with

    L = I + Diag(m_B) + (I - W) Diag(m_C),    b = (I - W) c_H,

and the partition itself is read off from ``s``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NegativeShift, SingularSystem
from .model import Network, Partition, classify_fairness, Fairness


def partition_of(s, net: Network, eps: float = 0.0) -> Partition:
    """Status of each bank implied by its price.

    B: ``s_i < -eps``; C: ``-eps <= s_i <= l_i + eps``; H: ``s_i > l_i + eps``.
    """
    s = np.asarray(s, dtype=float)
    status = np.where(s < -eps, 0, np.where(s <= net.l + eps, 1, 2))
    return Partition.from_status(status)


@dataclass(frozen=True, eq=False)
class LocalSystem:
    """Affine branch ``a = L s + b`` valid on one partition cell."""

    L: np.ndarray
    b: np.ndarray
    partition: Partition = field(repr=False)

    def apply(self, s) -> np.ndarray:
        return self.L @ np.asarray(s, dtype=float) + self.b

    def solve(self, a) -> np.ndarray:
        try:
            return np.linalg.solve(self.L, np.asarray(a, dtype=float) - self.b)
        except np.linalg.LinAlgError as exc:
            raise SingularSystem(f"L for partition {self.partition.label} is singular") from exc

    def column_margins(self) -> np.ndarray:
        """``L_jj - sum_{i != j} |L_ij|`` for every column j."""
        absL = np.abs(self.L)
        return 2 * np.diag(absL) - absL.sum(axis=0)


def local_system(p: Partition, net: Network) -> LocalSystem:
    st = p.status
    IW = net.I_minus_W
    mB = np.where(st == 0, net.m, 0.0)
    mC = np.where(st == 1, net.m, 0.0)
    cH = np.where(st == 2, net.c, 0.0)
    L = np.eye(net.n) + np.diag(mB) + IW * mC[None, :]
    return LocalSystem(L, IW @ cH, p)


def phi(s, net: Network) -> np.ndarray:
    """Unique asset vector rationalising the price vector ``s``."""
    s = np.asarray(s, dtype=float)
    return local_system(partition_of(s, net), net).apply(s)


def shift_vector(net: Network, d, X) -> np.ndarray:
    """``(I - W) d_X``: the combined shift of the banks in ``X``."""
    dX = np.zeros(net.n)
    idx = list(X)
    dX[idx] = np.asarray(d, dtype=float)[idx]
    return net.I_minus_W @ dX


def phi_hat(s, fair_net: Network, d) -> np.ndarray:
    """Forward map of the network with credits reduced to ``c - d``.

    Written as the fair map minus the shifts of the banks healthy at
    ``phi(s)``. Since the fair map is a bijection, those are exactly the
    banks with ``s_i > l_i``.
    """
    d = np.asarray(d, dtype=float)
    if np.any(d < 0):
        raise NegativeShift(f"shift amounts must be non-negative, got {d.tolist()}")
    s = np.asarray(s, dtype=float)
    p = partition_of(s, fair_net)
    return local_system(p, fair_net).apply(s) - shift_vector(fair_net, d, p.H)


@dataclass
class BoundaryReport:
    """Outcome of :func:`boundary_consistency_check`.

    ``max_discrepancy`` is the largest gap between adjacent affine branches at
    the sampled boundary points, ``max_rel_discrepancy`` the same gap divided
    by ``1 + |a|_inf``. On non-fair networks the gaps at ``s_i = l_i`` are
    genuine jumps; ``max_jump_formula_error`` compares them with
    ``(c_i - l_i m_i)(I - W) e_i``.
    """

    fair: bool
    trials: int
    comparisons: int
    max_discrepancy: float
    max_rel_discrepancy: float
    max_jump_formula_error: float
    max_zero_boundary_gap: float
    jumps: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        if self.fair:
            return self.max_rel_discrepancy <= 1e-9
        return self.max_jump_formula_error <= 1e-9 and self.max_zero_boundary_gap <= 1e-9

    def to_dict(self) -> dict:
        return {
            "fair": self.fair,
            "trials": self.trials,
            "comparisons": self.comparisons,
            "max_discrepancy": self.max_discrepancy,
            "max_rel_discrepancy": self.max_rel_discrepancy,
            "max_jump_formula_error": self.max_jump_formula_error,
            "max_zero_boundary_gap": self.max_zero_boundary_gap,
            "passed": self.passed,
        }


def branch_gap(s, net: Network, bank: int, kind: str) -> np.ndarray:
    """Difference of the two affine branches meeting at a boundary of ``bank``.

    ``kind='zero'``: C-branch minus B-branch at ``s_bank = 0``.
    ``kind='threshold'``: H-branch minus C-branch at ``s_bank = l_bank``.
    Other banks keep the status implied by their own prices.
    """
    s = np.asarray(s, dtype=float)
    st = partition_of(s, net).status.copy()
    lo, hi = (0, 1) if kind == "zero" else (1, 2)
    st[bank] = lo
    a_lo = local_system(Partition.from_status(st), net).apply(s)
    st[bank] = hi
    a_hi = local_system(Partition.from_status(st), net).apply(s)
    return a_hi - a_lo


def boundary_consistency_check(net: Network, trials: int = 1000, seed: int = 0) -> BoundaryReport:
    """Compare adjacent affine branches at random boundary points.

    Each trial draws a price vector and pins a random non-empty subset of
    banks to ``0`` or ``l_i``; every pinned bank contributes one comparison.
    """
    rng = np.random.default_rng(seed)
    n = net.n
    fair = classify_fairness(net).market is Fairness.FAIR
    span = 2.0 * (float(net.l.max()) + 1.0)
    IW = net.I_minus_W
    max_abs = max_rel = max_formula = max_zero = 0.0
    comparisons = 0
    jumps = []
    for _ in range(trials):
        s = rng.uniform(-span, span, size=n)
        k = int(rng.integers(1, n + 1))
        pinned = rng.choice(n, size=k, replace=False)
        kinds = rng.integers(0, 2, size=k)
        for i, kind in zip(pinned, kinds):
            s[i] = 0.0 if kind == 0 else net.l[i]
        a_ref = float(np.abs(phi(s, net)).max())
        for i, kind in zip(pinned, kinds):
            label = "zero" if kind == 0 else "threshold"
            gap = branch_gap(s, net, int(i), label)
            g = float(np.abs(gap).max())
            comparisons += 1
            max_abs = max(max_abs, g)
            max_rel = max(max_rel, g / (1.0 + a_ref))
            if label == "zero":
                max_zero = max(max_zero, g)
            else:
                predicted = (net.c[i] - net.l[i] * net.m[i]) * IW[:, i]
                max_formula = max(max_formula, float(np.abs(gap - predicted).max()))
                if not fair and g > 0:
                    jumps.append((int(i), gap))
    return BoundaryReport(fair, trials, comparisons, max_abs, max_rel, max_formula, max_zero, jumps)
