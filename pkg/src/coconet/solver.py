"""Inverting the forward map: all equilibria at a given asset vector."""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import NoConvergence, NotFair, NotSubFair, SingularSystem, TooManyBanks
from .forward import local_system, partition_of
from .model import (
    CONVERTING,
    Fairness,
    Network,
    Partition,
    classify_fairness,
    decode_status,
)

CONSISTENCY_RTOL = 1e-9
RESIDUAL_RTOL = 1e-8
DEFAULT_N_MAX = 12


def n_max_default() -> int:
    return int(os.environ.get("COCO_NET_NMAX", DEFAULT_N_MAX))


def _scale_tol(s, rtol: float) -> float:
    return rtol * (1.0 + float(np.abs(s).max(initial=0.0)))


@dataclass(frozen=True, eq=False)
class Equilibrium:
    partition: Partition
    s: np.ndarray
    a: np.ndarray
    residual: float
    boundary: tuple[bool, ...]

    @property
    def label(self) -> str:
        return self.partition.label

    def to_dict(self) -> dict:
        return {
            **self.partition.to_dict(),
            "s": self.s.tolist(),
            "residual": self.residual,
        }


@dataclass(frozen=True)
class EquilibriumSet:
    a: np.ndarray
    equilibria: tuple[Equilibrium, ...]

    @property
    def count(self) -> int:
        return len(self.equilibria)

    @property
    def labels(self) -> list[str]:
        return [eq.label for eq in self.equilibria]

    def __iter__(self):
        return iter(self.equilibria)

    def __len__(self) -> int:
        return self.count

    def to_dict(self) -> dict:
        return {"count": self.count, "equilibria": [eq.to_dict() for eq in self.equilibria]}


def solve_candidate(p: Partition, a, net: Network) -> np.ndarray:
    """Prices solving the linear system of partition ``p`` at assets ``a``."""
    s = kernels.solve_status(net.m, net.c, net.W, np.asarray(a, dtype=float), p.status)
    if s is None:
        raise SingularSystem(f"singular system for partition {p.label}")
    return s


def boundary_flags(s, net: Network, eps: float | None = None) -> tuple[bool, ...]:
    s = np.asarray(s, dtype=float)
    if eps is None:
        eps = _scale_tol(s, CONSISTENCY_RTOL)
    return tuple(bool(x) for x in (np.abs(s) <= eps) | (np.abs(s - net.l) <= eps))


def is_consistent(p: Partition, s, net: Network, eps: float | None = None) -> tuple[bool, tuple[bool, ...]]:
    """Whether every bank's price lies in its status band.

    B needs ``s_i < 0`` and H needs ``s_i > l_i`` (strict); C accepts
    ``[-eps, l_i + eps]``. Returns the verdict and per-bank boundary flags.
    """
    s = np.asarray(s, dtype=float)
    if eps is None:
        eps = _scale_tol(s, CONSISTENCY_RTOL)
    st = p.status
    ok = np.where(
        st == 0,
        s < 0,
        np.where(st == 1, (s >= -eps) & (s <= net.l + eps), s > net.l),
    )
    return bool(ok.all()), boundary_flags(s, net, eps)


def make_equilibrium(p: Partition, s, a, net: Network) -> Equilibrium:
    """Package a consistent candidate.

    Converting banks are clipped into ``[0, l_i]`` so that the partition read
    off from the stored prices is exactly ``p``; the shift is within the
    consistency tolerance.
    """
    s = np.array(s, dtype=float)
    a = np.asarray(a, dtype=float)
    eps = _scale_tol(s, CONSISTENCY_RTOL)
    flags = boundary_flags(s, net, eps)
    conv = p.status == CONVERTING
    s[conv] = np.clip(s[conv], 0.0, net.l[conv])
    residual = float(np.abs(local_system(p, net).apply(s) - a).max(initial=0.0))
    s.setflags(write=False)
    return Equilibrium(p, s, a, residual, flags)


def _dedupe(codes, S, net: Network) -> list[tuple[int, np.ndarray]]:
    """Merge candidates with the same prices; prefer C for boundary banks.

    Returns ``(code, s)`` pairs sorted by partition code.
    """
    kept: list[list] = []
    for code, s in zip(codes, S):
        code = int(code)
        flags = np.array(boundary_flags(s, net))
        conv = np.array(decode_status(code, net.n)) == CONVERTING
        score = int(np.sum(flags & conv))
        for entry in kept:
            tol = max(_scale_tol(s, RESIDUAL_RTOL), _scale_tol(entry[1], RESIDUAL_RTOL))
            if np.abs(entry[1] - s).max() <= tol:
                if score > entry[2]:
                    entry[0], entry[1], entry[2] = code, s, score
                break
        else:
            kept.append([code, s, score])
    return sorted(((code, s) for code, s, _ in kept), key=lambda cs: cs[0])


def equilibrium_codes(a, net: Network) -> list[tuple[int, np.ndarray]]:
    """Deduplicated ``(partition code, prices)`` pairs; no range checks."""
    codes, S = kernels.enumerate_candidates(net.m, net.c, net.l, net.W, np.asarray(a, dtype=float), CONSISTENCY_RTOL)
    if len(codes) <= 1:
        return [(int(c), s) for c, s in zip(codes, S)]
    return _dedupe(codes, S, net)


def enumerate_equilibria(a, net: Network, n_max: int | None = None) -> EquilibriumSet:
    """Every equilibrium at ``a`` by sweeping all ``3^n`` partitions.

    An empty result means no equilibrium exists; several mean multiplicity.
    Output is ordered by partition code (labels in lexicographic B < C < H
    order).
    """
    a = np.asarray(a, dtype=float)
    if n_max is None:
        n_max = n_max_default()
    if net.n > n_max:
        raise TooManyBanks(f"n={net.n} exceeds the enumeration cap {n_max}")
    found = equilibrium_codes(a, net)
    return EquilibriumSet(
        a, tuple(make_equilibrium(Partition.from_code(code, net.n), s, a, net) for code, s in found)
    )


@dataclass(frozen=True)
class ConversionResult:
    equilibrium: Equilibrium
    iterations: int
    method: str  # "fictitious" or "enumerate"


def _require_fair(net: Network, what: str) -> None:
    if classify_fairness(net).market is not Fairness.FAIR:
        raise NotFair(f"{what} requires fair thresholds (l_i = c_i / m_i)")


def fictitious_conversion(a, net: Network, fallback: bool = True) -> ConversionResult:
    """Fictitious-conversion iteration for fair networks.

    Starting from all banks healthy, solve the current partition's system and
    move every bank whose price left its band down one status, until the
    partition reproduces itself (at most ``3n`` rounds). Statuses only ever
    decrease, so the iteration stops within ``2n`` rounds; it succeeds for
    ``a >= 0``. If a bank would need promotion instead, the enumeration is
    used when ``fallback`` is set, else :class:`NoConvergence` is raised.
    """
    _require_fair(net, "fictitious_conversion")
    a = np.asarray(a, dtype=float)
    status, s, k, ok = kernels.fictitious(net.m, net.c, net.l, net.W, a, CONSISTENCY_RTOL, 3 * net.n)
    if ok:
        p = Partition.from_status(status)
        return ConversionResult(make_equilibrium(p, s, a, net), int(k), "fictitious")
    if not fallback:
        raise NoConvergence(f"no fixed partition after {3 * net.n} rounds")
    eqs = enumerate_equilibria(a, net)
    if eqs.count != 1:
        raise NoConvergence(f"enumeration fallback found {eqs.count} equilibria in a fair network")
    return ConversionResult(eqs.equilibria[0], int(k), "enumerate")


def fair_inverse(a, net: Network) -> Equilibrium:
    """The unique equilibrium of a fair network (no fairness re-check)."""
    a = np.asarray(a, dtype=float)
    status, s, _, ok = kernels.fictitious(net.m, net.c, net.l, net.W, a, CONSISTENCY_RTOL, 3 * net.n)
    if ok:
        return make_equilibrium(Partition.from_status(status), s, a, net)
    codes, S = kernels.enumerate_candidates(net.m, net.c, net.l, net.W, a, CONSISTENCY_RTOL, True)
    if len(codes) == 0:
        raise NoConvergence("no equilibrium found for a fair network")
    # canonical partition: boundary banks go to C
    p = partition_of(S[0], net, eps=_scale_tol(S[0], CONSISTENCY_RTOL))
    s = solve_candidate(p, a, net)
    if not is_consistent(p, s, net)[0]:
        p, s = Partition.from_code(int(codes[0]), net.n), S[0]
    return make_equilibrium(p, s, a, net)


def subfair_witness(i: int, net: Network) -> np.ndarray:
    """Asset vector with no equilibrium, built around sub-fair bank ``i`` (0-based).

    Every other bank gets enough assets to be healthy in any equilibrium;
    bank ``i`` then sits strictly inside the gap between its converting and
    healthy ranges, ``(l_i(1+m_i) - C_i, l_i + c_i - C_i)`` with
    ``C_i = sum_{j != i} w_ij c_j``.
    """
    if classify_fairness(net).labels[i] is not Fairness.SUB_FAIR:
        raise NotSubFair(f"bank {i + 1} does not have a sub-fair threshold")
    m, c, l, W = net.m, net.c, net.l, net.W
    a = c + l * (1 + m) + 1.0
    C_i = float(W[i] @ c - W[i, i] * c[i])
    lo = l[i] * (1 + m[i]) - C_i
    hi = l[i] + c[i] - C_i
    a[i] = 0.5 * (lo + hi)
    return a
