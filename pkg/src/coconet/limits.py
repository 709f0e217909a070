"""Total-equity formulation and its two limits in the share count ``m``.

In equity terms ``v_i = s_i`` for healthy banks and ``v_i = (1 + m_i) s_i``
otherwise, and the equilibrium conditions read

    v = a - (I - W) c_H + W Diag(k_C) v,      k_j = m_j / (1 + m_j),

with bands ``v < 0`` (B), ``0 <= v <= (1 + m) l`` (C), ``v > l`` (H).
Letting ``m -> inf`` gives ``k = 1`` and bands ``[0, c]`` / ``v > 0``: the
Eisenberg-Noe clearing model with conversion in place of default. Letting
``m -> 0`` gives ``k = 0`` and no healthy banks: plain debt cancellation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .model import CONVERTING, HEALTHY, Network, Partition, validate_network
from .solver import CONSISTENCY_RTOL, RESIDUAL_RTOL, Equilibrium, n_max_default, _scale_tol
from .errors import TooManyBanks

DEFAULT_M_GRID = (1e-6, 1e-3, 1.0, 1e3, 1e6)


@dataclass(frozen=True, eq=False)
class EquityResult:
    v: np.ndarray
    partition: Partition

    @property
    def label(self) -> str:
        return self.partition.label


def equity_from_stock(eq: Equilibrium, net: Network) -> np.ndarray:
    """Total equity values for a stock-price equilibrium."""
    healthy = eq.partition.status == HEALTHY
    return np.where(healthy, eq.s, (1 + net.m) * eq.s)


def equity_system(p: Partition, net: Network, weight=None):
    """Matrix and right-hand side of the equity equations for partition ``p``.

    ``weight`` overrides the conversion weights ``m / (1 + m)``.
    """
    st = p.status
    k = net.m / (1 + net.m) if weight is None else np.broadcast_to(np.asarray(weight, dtype=float), (net.n,))
    A = np.eye(net.n) - net.W * np.where(st == CONVERTING, k, 0.0)[None, :]
    rhs = -(net.I_minus_W @ np.where(st == HEALTHY, net.c, 0.0))
    return A, rhs


def equity_residual(v, p: Partition, a, net: Network, weight=None) -> float:
    A, rhs = equity_system(p, net, weight)
    return float(np.abs(A @ np.asarray(v, dtype=float) - (np.asarray(a, dtype=float) + rhs)).max())


def _sweep(a, net: Network, weight, upper_c, lower_h) -> list[EquityResult]:
    """Enumerate partitions of a linear equity model with the given bands."""
    a = np.asarray(a, dtype=float)
    n = net.n
    if n > n_max_default():
        raise TooManyBanks(f"n={n} exceeds the enumeration cap {n_max_default()}")
    status = np.array(list(itertools.product((0, 1, 2), repeat=n)), dtype=np.int64).reshape(-1, n)
    IW = net.I_minus_W
    kC = np.where(status == CONVERTING, weight[None, :], 0.0)
    A = np.eye(n)[None, :, :] - net.W[None, :, :] * kC[:, None, :]
    rhs = a[None, :] - np.where(status == HEALTHY, net.c[None, :], 0.0) @ IW.T
    V = np.full((len(status), n), np.nan)
    try:
        V = np.linalg.solve(A, rhs[:, :, None])[:, :, 0]
    except np.linalg.LinAlgError:
        # singular blocks only arise in the m -> inf limit with full column sums
        for k in range(len(status)):
            try:
                V[k] = np.linalg.solve(A[k], rhs[k])
            except np.linalg.LinAlgError:
                pass
    tol = CONSISTENCY_RTOL * (1 + np.nan_to_num(np.abs(V), nan=0.0).max(axis=1, initial=0.0))[:, None]
    ok = np.where(
        status == 0,
        V < 0,
        np.where(status == 1, (V >= -tol) & (V <= upper_c[None, :] + tol), V > lower_h[None, :]),
    ).all(axis=1)
    out: list[EquityResult] = []
    for k in np.flatnonzero(ok):
        v = V[k]
        cand = EquityResult(v, Partition.from_status(status[k]))
        for idx, r in enumerate(out):
            if np.abs(r.v - v).max() <= _scale_tol(v, RESIDUAL_RTOL):
                # same point reached from adjacent cells: boundary banks go to C
                if len(cand.partition.C) > len(r.partition.C):
                    out[idx] = cand
                break
        else:
            out.append(cand)
    return out


def solve_equity(a, net: Network) -> list[EquityResult]:
    """All equilibria of the equity formulation (unique for fair networks)."""
    weight = net.m / (1 + net.m)
    return _sweep(a, net, weight, (1 + net.m) * net.l, net.l)


def eisenberg_noe_solve(a, net: Network) -> list[EquityResult]:
    """Equilibria of the ``m -> inf`` limit; ``m`` and ``l`` are ignored.

    Converting banks have ``0 <= v <= c`` and pass their whole equity through
    the network; healthy banks have ``v > 0`` and repay ``c``.
    """
    return _sweep(a, net, np.ones(net.n), net.c, np.zeros(net.n))


def debt_cancellation_solve(a, net: Network) -> EquityResult:
    """The ``m -> 0`` limit: ``v = a``; banks with ``a_i >= 0`` convert, others fail."""
    v = np.array(a, dtype=float)
    return EquityResult(v, Partition.from_status(np.where(v >= 0, CONVERTING, 0)))


@dataclass
class LimitReport:
    a: np.ndarray
    m_grid: list[float]
    v: list[np.ndarray]
    labels: list[str]
    v_en: np.ndarray | None
    dist_en: list[float] = field(default_factory=list)
    dist_cancel: list[float] = field(default_factory=list)

    @property
    def monotone_en(self) -> bool:
        """Distance to the clearing limit does not grow along ``m >= 1``."""
        d = [x for m, x in zip(self.m_grid, self.dist_en) if m >= 1]
        return all(y <= x + 1e-12 for x, y in zip(d, d[1:]))

    @property
    def monotone_cancel(self) -> bool:
        """Distance to ``v = a`` does not grow as ``m`` shrinks below 1."""
        d = [x for m, x in zip(self.m_grid, self.dist_cancel) if m <= 1]
        return all(x <= y + 1e-12 for x, y in zip(d, d[1:]))

    def rows(self) -> list[list[float]]:
        return [[m, *v.tolist(), de, dc] for m, v, de, dc in zip(self.m_grid, self.v, self.dist_en, self.dist_cancel)]


def fair_network_for_m(net: Network, m: float) -> Network:
    """Same credits and holdings, uniform share count ``m``, fair thresholds."""
    return validate_network(np.full(net.n, float(m)), net.c, "fair", net.W)


def limit_convergence_check(a, net: Network, m_grid=DEFAULT_M_GRID) -> LimitReport:
    """Solve the fair model along ``m_grid`` and measure the distance to both limits."""
    a = np.asarray(a, dtype=float)
    grid = sorted(float(m) for m in m_grid)
    en = eisenberg_noe_solve(a, net)
    v_en = en[0].v if len(en) == 1 else None
    report = LimitReport(a, grid, [], [], v_en)
    for m in grid:
        sols = solve_equity(a, fair_network_for_m(net, m))
        v = sols[0].v if len(sols) == 1 else np.full(net.n, np.nan)
        report.v.append(v)
        report.labels.append(sols[0].label if len(sols) == 1 else "")
        report.dist_en.append(float(np.abs(v - v_en).max()) if v_en is not None else float("nan"))
        report.dist_cancel.append(float(np.abs(v - a).max()))
    return report
