"""Runnable checks of the structural matrix facts the theory leans on.

* ``(I - W)^{-1}`` is entrywise non-negative when it exists.
* ``L_{B,C}^{-1}(I - W)`` has a non-negative diagonal and non-positive
  off-diagonal entries.
* every ``L_{B,C}`` is strictly column-diagonally dominant.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import SingularIminusW
from .forward import local_system
from .model import Network, Partition
from .superfair import check_invertible

SIGN_TOL = 1e-10


@dataclass
class CheckReport:
    name: str
    passed: bool
    value: float
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "value": self.value, **self.detail}


def _blocks_partition(B, C, n: int) -> Partition:
    B, C = frozenset(B), frozenset(C)
    return Partition(B, C, frozenset(range(n)) - B - C, n)


def check_inverse_nonneg(W) -> CheckReport:
    """Minimum entry of ``(I - W)^{-1}``; passes iff it is ``>= -1e-10``.

    Raises :class:`SingularIminusW` rather than giving a verdict when ``I - W``
    is not invertible.
    """
    W = np.asarray(W, dtype=float)
    check_invertible(W)
    inv = np.linalg.inv(np.eye(W.shape[0]) - W)
    lo = float(inv.min())
    return CheckReport("inverse_nonneg", lo >= -SIGN_TOL, lo, {"inverse": inv.tolist()})


def check_sign_pattern(B, C, net: Network) -> CheckReport:
    """Sign pattern of ``M = L_{B,C}^{-1}(I - W)``.

    ``value`` is the worst violation margin (``<= 0`` means the pattern holds).
    """
    p = _blocks_partition(B, C, net.n)
    L = local_system(p, net).L
    M = np.linalg.solve(L, net.I_minus_W)
    diag = np.diag(M)
    off = M - np.diag(diag)
    # off carries zeros on its diagonal, so off.max() >= 0
    worst = max(float(-diag.min()), float(off.max()))
    ok = diag.min() >= -SIGN_TOL and off.max() <= SIGN_TOL
    return CheckReport("sign_pattern", bool(ok), worst, {"partition": p.label})


def check_diag_dominance(B, C, net: Network) -> CheckReport:
    """Smallest column margin ``L_jj - sum_{i != j} |L_ij|``; must be > 0."""
    p = _blocks_partition(B, C, net.n)
    margins = local_system(p, net).column_margins()
    lo = float(margins.min())
    return CheckReport("diag_dominance", lo > 0, lo, {"partition": p.label})


def _partitions(n: int, trials: int, rng) -> list[Partition]:
    if 3**n <= trials:
        return [Partition.from_status(st) for st in itertools.product(range(3), repeat=n)]
    return [Partition.from_status(rng.integers(0, 3, size=n)) for _ in range(trials)]


def matrix_suite(net: Network, trials: int = 1000, seed: int = 0) -> dict:
    """All three checks; every partition when ``3^n <= trials``, else a sample."""
    rng = np.random.default_rng(seed)
    parts = _partitions(net.n, trials, rng)
    out: dict = {}
    try:
        inv = check_inverse_nonneg(net.W)
        out["inverse_nonneg"] = {"passed": inv.passed, "min_entry": inv.value}
    except SingularIminusW as exc:
        out["inverse_nonneg"] = {"passed": None, "error": "SingularIminusW", "message": str(exc)}
    sign = [check_sign_pattern(p.B, p.C, net) for p in parts]
    dom = [check_diag_dominance(p.B, p.C, net) for p in parts]
    out["sign_pattern"] = {
        "passed": all(r.passed for r in sign),
        "partitions": len(sign),
        "worst_violation": max(r.value for r in sign),
        "failures": [r.detail["partition"] for r in sign if not r.passed],
    }
    out["diag_dominance"] = {
        "passed": all(r.passed for r in dom),
        "partitions": len(dom),
        "min_margin": min(r.value for r in dom),
        "failures": [r.detail["partition"] for r in dom if not r.passed],
    }
    return out
