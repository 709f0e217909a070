"""Equilibria with super-fair thresholds, recovered from a fair reference network.

A network with thresholds ``l_i >= c_i / m_i`` is viewed as the fair network
with credits ``c*_i = m_i l_i`` whose credits have been reduced by
``d_i = c*_i - c_i >= 0``. Each bank then owns a shift vector
``d_i (I - W) e_i``, and an equilibrium at ``a`` corresponds to a set ``X``
of banks that are healthy, in the fair network, at ``a + (I - W) d_X``.
The set is found by iterating ``h(X) = H(a + (I - W) d_X)`` from ``H(a)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    InternalInvariantBroken,
    NegativeShift,
    NotFair,
    NotSuperFair,
    SingularIminusW,
)
from .forward import local_system, shift_vector
from .model import Fairness, Network, classify_fairness, subset_to_list
from .solver import (
    Equilibrium,
    RESIDUAL_RTOL,
    _scale_tol,
    fair_inverse,
    is_consistent,
    make_equilibrium,
)

RCOND_MIN = 1e-12


def check_invertible(W) -> float:
    """Reciprocal 1-norm condition number of ``I - W``; raises when singular."""
    W = np.asarray(W, dtype=float)
    IW = np.eye(W.shape[0]) - W
    with np.errstate(all="ignore"):
        cond = np.linalg.cond(IW, 1)
    rcond = 0.0 if not np.isfinite(cond) else 1.0 / cond
    if rcond < RCOND_MIN:
        raise SingularIminusW(f"I - W is numerically singular (rcond={rcond:.3g})")
    return rcond


@dataclass(frozen=True, eq=False)
class SuperFairDecomposition:
    """Fair reference network plus per-bank credit reductions."""

    fair_net: Network
    d: np.ndarray

    @property
    def fair_credits(self) -> np.ndarray:
        return self.fair_net.c

    @property
    def shift_vectors(self) -> np.ndarray:
        """Column j is ``d_j (I - W) e_j``."""
        return self.fair_net.I_minus_W * self.d[None, :]

    def shift(self, X) -> np.ndarray:
        return shift_vector(self.fair_net, self.d, X)


def decompose(net: Network) -> SuperFairDecomposition:
    """Split a fair or super-fair network into its fair reference and shifts."""
    fc = classify_fairness(net)
    if fc.market is Fairness.SUB_FAIR:
        raise NotSuperFair("a bank has a sub-fair threshold")
    fair_c = net.m * net.l
    d = fair_c - net.c
    # fair banks within tolerance get exactly zero shift
    d = np.where(np.array([lab is Fairness.FAIR for lab in fc.labels]), 0.0, d)
    fair_c = net.c + d
    return SuperFairDecomposition(net.with_credits(fair_c), d)


def decomposition_from_shifts(fair_net: Network, d) -> SuperFairDecomposition:
    d = np.asarray(d, dtype=float)
    if np.any(d < 0):
        raise NegativeShift(f"shift amounts must be non-negative, got {d.tolist()}")
    if classify_fairness(fair_net).market is not Fairness.FAIR:
        raise NotFair("the reference network must have fair thresholds")
    return SuperFairDecomposition(fair_net, d)


def healthy_set(a, fair_net: Network) -> frozenset[int]:
    """Banks healthy in the (unique) equilibrium of the fair network at ``a``.

    Banks exactly at their threshold count as converting.
    """
    return fair_inverse(a, fair_net).partition.H


def h_map(X, a_hat, dec: SuperFairDecomposition) -> frozenset[int]:
    return healthy_set(np.asarray(a_hat, dtype=float) + dec.shift(X), dec.fair_net)


@dataclass
class FixedPointTrace:
    """Iterates ``X_0 = H(a_hat)``, ``X_{k+1} = h(X_k)`` up to the first repeat.

    ``sets`` holds ``X_0 .. X_K`` with ``X_K == X_{K-1}`` when ``terminal``;
    ``shifted[k]`` is ``a_hat + (I - W) d_{X_k}`` for ``k < K``.
    """

    a_hat: np.ndarray
    sets: list[frozenset[int]] = field(default_factory=list)
    shifted: list[np.ndarray] = field(default_factory=list)
    boundary: list[tuple[bool, ...]] = field(default_factory=list)
    terminal: bool = False

    @property
    def K(self) -> int:
        return len(self.sets) - 1

    @property
    def steps(self) -> list[frozenset[int]]:
        """Distinct iterates, ending with the fixed point."""
        return self.sets[:-1] if self.terminal else list(self.sets)

    @property
    def fixed_point(self) -> frozenset[int]:
        if not self.terminal:
            raise InternalInvariantBroken("trace did not reach a fixed point")
        return self.sets[-1]

    def records(self) -> list[dict]:
        """One record per step, 1-based bank indices."""
        return [
            {
                "k": k,
                "X": subset_to_list(self.sets[k]),
                "shifted": self.shifted[k].tolist(),
                "healthy": subset_to_list(self.sets[k + 1]),
                "boundary": [i + 1 for i, b in enumerate(self.boundary[k]) if b],
            }
            for k in range(len(self.shifted))
        ]


def _check_sandwich(X: list[frozenset[int]]) -> None:
    """Inclusions that the iterates must obey (alternating squeeze)."""
    k = len(X) - 1
    if k == 1 and not X[1] <= X[0]:
        raise InternalInvariantBroken(f"X_1={set(X[1])} not inside X_0={set(X[0])}")
    if k < 2:
        return
    j = k - 2
    if X[j + 1] == X[j]:
        return
    if j % 2 == 0:
        lo, mid, hi = X[j + 1], X[j + 2], X[j]
        shrink = len(mid - lo) < len(hi - lo)
    else:
        lo, mid, hi = X[j], X[j + 2], X[j + 1]
        shrink = len(hi - mid) < len(hi - lo)
    ok = lo <= mid <= hi
    if not ok:
        raise InternalInvariantBroken(f"iterate X_{k} escaped the bracket of X_{j}, X_{j + 1}")
    if j > 0 and not shrink:
        raise InternalInvariantBroken(f"bracket did not shrink at step {k}")


def fixed_point_iterate(a_hat, dec: SuperFairDecomposition) -> FixedPointTrace:
    """Iterate the healthy-set map until it repeats.

    Terminates in at most ``2n + 2`` steps; the bracketing structure of the
    iterates is verified along the way.
    """
    check_invertible(dec.fair_net.W)
    n = dec.fair_net.n
    a_hat = np.asarray(a_hat, dtype=float)
    trace = FixedPointTrace(a_hat)
    trace.sets.append(healthy_set(a_hat, dec.fair_net))
    for _ in range(2 * n + 2):
        X = trace.sets[-1]
        point = a_hat + dec.shift(X)
        eq = fair_inverse(point, dec.fair_net)
        trace.shifted.append(point)
        trace.boundary.append(eq.boundary)
        trace.sets.append(eq.partition.H)
        _check_sandwich(trace.sets)
        if trace.sets[-1] == X:
            trace.terminal = True
            return trace
    raise InternalInvariantBroken(f"no fixed point within {2 * n + 2} steps")


def superfair_solve(a_hat, net: Network) -> Equilibrium:
    """One equilibrium of a fair or super-fair network at ``a_hat``.

    Runs the fixed-point iteration on the fair reference network and maps the
    fair equilibrium at the shifted point back; the result is checked for
    consistency and residual before returning.
    """
    dec = decompose(net)
    a_hat = np.asarray(a_hat, dtype=float)
    trace = fixed_point_iterate(a_hat, dec)
    X = trace.fixed_point
    fair_eq = fair_inverse(a_hat + dec.shift(X), dec.fair_net)
    p, s = fair_eq.partition, fair_eq.s
    ok, _ = is_consistent(p, s, net)
    residual = float(np.abs(local_system(p, net).apply(s) - a_hat).max())
    if not ok or residual > _scale_tol(s, RESIDUAL_RTOL):
        raise InternalInvariantBroken(
            f"recovered prices fail verification (consistent={ok}, residual={residual:.3g})"
        )
    return make_equilibrium(p, s, a_hat, net)


@dataclass
class ShiftLemmaReport:
    """Counts of hypotheses met and violations found per checked statement."""

    pairs: int = 0
    checked: dict = field(default_factory=dict)
    violations: dict = field(default_factory=dict)
    examples: list = field(default_factory=list)

    def _record(self, name: str, holds: bool, detail=None) -> None:
        self.checked[name] = self.checked.get(name, 0) + 1
        if not holds:
            self.violations[name] = self.violations.get(name, 0) + 1
            if len(self.examples) < 20:
                self.examples.append((name, detail))

    @property
    def total_violations(self) -> int:
        return sum(self.violations.values())

    @property
    def passed(self) -> bool:
        return self.total_violations == 0

    def to_dict(self) -> dict:
        return {
            "pairs": self.pairs,
            "checked": dict(sorted(self.checked.items())),
            "violations": dict(sorted(self.violations.items())),
            "passed": self.passed,
        }


def _random_subset(rng, n: int) -> frozenset[int]:
    return frozenset(int(i) for i in np.flatnonzero(rng.random(n) < 0.5))


def _random_between(rng, lo: frozenset[int], hi: frozenset[int]) -> frozenset[int]:
    extra = sorted(hi - lo)
    return lo | frozenset(i for i in extra if rng.random() < 0.5)


def shift_lemma_checks(
    dec: SuperFairDecomposition,
    trials: int = 1000,
    seed: int = 0,
    a_low: float | None = None,
    a_high: float | None = None,
) -> ShiftLemmaReport:
    """Sample ``(a, X)`` pairs and test the shift/healthy-set relations.

    For every pair: ``H(a + (I-W)d_X) ⊆ H(a) ∪ X``; when ``∅ ≠ X ⊆ H(a)`` the
    shift keeps some bank of ``X`` healthy. With ``h`` built around ``a``, the
    four monotonicity implications are checked whenever their hypotheses hold
    (``Y`` drawn between the relevant sets).
    """
    check_invertible(dec.fair_net.W)
    net = dec.fair_net
    n = net.n
    rng = np.random.default_rng(seed)
    scale = float(max(net.c.max(), net.l.max(), 1.0))
    lo = -2.0 * scale if a_low is None else a_low
    hi = 4.0 * scale if a_high is None else a_high
    report = ShiftLemmaReport()
    for _ in range(trials):
        a = rng.uniform(lo, hi, size=n)
        X = _random_subset(rng, n)

        def h(Z):
            return h_map(Z, a, dec)

        Ha = healthy_set(a, net)
        hX = h(X)
        report.pairs += 1
        report._record("shift_within_union", hX <= Ha | X, (a, X))
        if X and X <= Ha:
            report._record("shift_keeps_one", bool(X & hX), (a, X))
        # a subset of H(a) exercises the sandwich hypotheses more often
        Xs = X & Ha if rng.random() < 0.5 else X
        hXs = h(Xs)
        if Xs <= hXs:
            Y = _random_between(rng, Xs, hXs)
            report._record("bracket_up", h(Y) <= hXs, (a, Xs, Y))
        if hXs <= Xs:
            Y = _random_between(rng, hXs, Xs)
            report._record("bracket_down", hXs <= h(Y), (a, Xs, Y))
        h2 = h(hXs)
        if Xs <= h2 and h2 < hXs:
            h3 = h(h2)
            report._record("squeeze_down", h2 <= h3 and h3 < hXs, (a, Xs))
        if hXs < h2 and h2 <= Xs:
            h3 = h(h2)
            report._record("squeeze_up", hXs < h3 and h3 <= h2, (a, Xs))
    return report
