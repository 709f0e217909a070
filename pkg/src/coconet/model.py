"""Market primitives: the network, bank partitions and threshold fairness."""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    BadWeight,
    ColumnSumExceeded,
    DimensionMismatch,
    InvalidPartition,
    NegativeShareCount,
    NegativeValue,
    SelfHolding,
)

# bank status codes, also used by the compiled kernels
BANKRUPT, CONVERTING, HEALTHY = 0, 1, 2
STATUS_LETTERS = "BCH"

COLUMN_SUM_SLACK = 1e-12
FAIR_RTOL = 1e-9


def _frozen(x) -> np.ndarray:
    arr = np.array(x, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Network:
    """Banks with cross-held convertible debt.

    Attributes
    ----------
    m : (n,) new shares issued by bank i on conversion.
    c : (n,) face value of bank i's convertible debt.
    l : (n,) conversion threshold on bank i's stock price.
    W : (n, n) ``W[i, j]`` is the fraction of bank j's convertible debt held
        by bank i.

    Construct through :func:`validate_network` to get the invariants checked.
    Arrays are stored read-only.
    """

    m: np.ndarray
    c: np.ndarray
    l: np.ndarray
    W: np.ndarray

    @property
    def n(self) -> int:
        return self.m.shape[0]

    @property
    def I_minus_W(self) -> np.ndarray:
        return np.eye(self.n) - self.W

    def with_credits(self, c) -> "Network":
        return validate_network(self.m, c, self.l, self.W)

    def with_thresholds(self, l) -> "Network":
        return validate_network(self.m, self.c, l, self.W)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m.tolist(),
            "c": self.c.tolist(),
            "l": self.l.tolist(),
            "W": self.W.tolist(),
        }


def validate_network(m, c, l, W) -> Network:
    """Check the standing assumptions and build an immutable :class:`Network`.

    ``l`` may be the string ``"fair"``, in which case ``l = c / m``.
    Raises a :class:`~coconet.errors.NetworkError` subclass naming the
    violated invariant.
    """
    m = np.atleast_1d(np.asarray(m, dtype=float))
    c = np.atleast_1d(np.asarray(c, dtype=float))
    n = m.shape[0]
    if m.ndim != 1 or c.shape != (n,):
        raise DimensionMismatch(f"m and c must be vectors of equal length, got {m.shape} and {c.shape}")
    if not np.all(np.isfinite(m)) or np.any(m <= 0):
        bad = [i + 1 for i in range(n) if not m[i] > 0]
        raise NegativeShareCount(f"share counts must be positive (banks {bad})")
    if isinstance(l, str):
        if l != "fair":
            raise DimensionMismatch(f"threshold spec must be a vector or 'fair', got {l!r}")
        l = c / m
    l = np.atleast_1d(np.asarray(l, dtype=float))
    W = np.asarray(W, dtype=float)
    if n == 1 and W.ndim == 0:
        W = W.reshape(1, 1)
    if l.shape != (n,) or W.shape != (n, n):
        raise DimensionMismatch(f"expected l of shape ({n},) and W of shape ({n}, {n}), got {l.shape} and {W.shape}")
    for name, v in (("c", c), ("l", l)):
        if not np.all(np.isfinite(v)) or np.any(v < 0):
            raise NegativeValue(f"{name} must be finite and non-negative")
    if not np.all(np.isfinite(W)) or np.any(W < 0) or np.any(W > 1):
        i, j = np.argwhere(~((W >= 0) & (W <= 1)))[0]
        raise BadWeight(f"w[{i + 1},{j + 1}] = {W[i, j]} is outside [0, 1]")
    diag = np.diag(W)
    if np.any(diag != 0):
        i = int(np.flatnonzero(diag)[0])
        raise SelfHolding(f"w[{i + 1},{i + 1}] = {diag[i]} but banks cannot hold their own debt")
    colsum = W.sum(axis=0)
    if np.any(colsum > 1 + COLUMN_SUM_SLACK):
        j = int(np.argmax(colsum))
        raise ColumnSumExceeded(f"column {j + 1} of W sums to {colsum[j]} > 1")
    return Network(_frozen(m), _frozen(c), _frozen(l), _frozen(W))


def network_from_dict(raw: Mapping) -> Network:
    """Build a network from the JSON config layout ``{n, m, c, l, W}``."""
    try:
        m, c, l, W = raw["m"], raw["c"], raw["l"], raw["W"]
    except KeyError as exc:
        raise DimensionMismatch(f"network config is missing key {exc}") from None
    net = validate_network(m, c, l, W)
    if "n" in raw and int(raw["n"]) != net.n:
        raise DimensionMismatch(f"declared n={raw['n']} but arrays have length {net.n}")
    return net


def load_network(path: str | Path) -> Network:
    with open(path) as fh:
        return network_from_dict(json.load(fh))


class Fairness(str, Enum):
    SUB_FAIR = "SubFair"
    FAIR = "Fair"
    SUPER_FAIR = "SuperFair"


@dataclass(frozen=True)
class FairnessClass:
    labels: tuple[Fairness, ...]
    margins: tuple[float, ...]  # l_i * m_i - c_i
    market: Fairness

    def to_dict(self) -> dict:
        return {
            "banks": [
                {"bank": i + 1, "label": lab.value, "margin": mar}
                for i, (lab, mar) in enumerate(zip(self.labels, self.margins))
            ],
            "market": self.market.value,
        }


def classify_fairness(net: Network) -> FairnessClass:
    """Label each threshold by the sign of ``l_i m_i - c_i``, then the market.

    One sub-fair bank makes the whole market sub-fair; otherwise any
    super-fair bank makes it super-fair.
    """
    fair_level = net.l * net.m
    margins = fair_level - net.c
    eps = FAIR_RTOL * np.maximum(1.0, fair_level)
    labels = []
    for mar, e in zip(margins, eps):
        if mar > e:
            labels.append(Fairness.SUPER_FAIR)
        elif mar < -e:
            labels.append(Fairness.SUB_FAIR)
        else:
            labels.append(Fairness.FAIR)
    if Fairness.SUB_FAIR in labels:
        market = Fairness.SUB_FAIR
    elif all(lab is Fairness.FAIR for lab in labels):
        market = Fairness.FAIR
    else:
        market = Fairness.SUPER_FAIR
    return FairnessClass(tuple(labels), tuple(float(x) for x in margins), market)


def is_fair(net: Network) -> bool:
    return classify_fairness(net).market is Fairness.FAIR


@dataclass(frozen=True)
class Partition:
    """Disjoint cover ``(B, C, H)`` of the banks ``0..n-1``.

    Indices are 0-based inside the library; the CLI converts to 1-based.
    """

    B: frozenset[int]
    C: frozenset[int]
    H: frozenset[int]
    n: int

    def __post_init__(self):
        B, C, H = (frozenset(int(i) for i in x) for x in (self.B, self.C, self.H))
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "H", H)
        if B & C or B & H or C & H:
            raise InvalidPartition("status sets overlap")
        if B | C | H != frozenset(range(self.n)):
            raise InvalidPartition(f"status sets do not cover banks 0..{self.n - 1}")

    @classmethod
    def from_status(cls, status: Sequence[int]) -> "Partition":
        status = list(status)
        return cls(
            frozenset(i for i, x in enumerate(status) if x == BANKRUPT),
            frozenset(i for i, x in enumerate(status) if x == CONVERTING),
            frozenset(i for i, x in enumerate(status) if x == HEALTHY),
            len(status),
        )

    @classmethod
    def from_label(cls, label: str) -> "Partition":
        return cls.from_status([STATUS_LETTERS.index(ch) for ch in label.upper()])

    @classmethod
    def from_code(cls, code: int, n: int) -> "Partition":
        return cls.from_status(decode_status(code, n))

    @classmethod
    def uniform(cls, n: int, status: int) -> "Partition":
        return cls.from_status([status] * n)

    @property
    def status(self) -> np.ndarray:
        out = np.empty(self.n, dtype=np.int64)
        out[list(self.B)] = BANKRUPT
        out[list(self.C)] = CONVERTING
        out[list(self.H)] = HEALTHY
        return out

    @property
    def label(self) -> str:
        return "".join(STATUS_LETTERS[x] for x in self.status)

    @property
    def code(self) -> int:
        return encode_status(self.status)

    def to_dict(self) -> dict:
        return {k: sorted(i + 1 for i in getattr(self, k)) for k in "BCH"}

    def __str__(self) -> str:
        return self.label


def encode_status(status: Iterable[int]) -> int:
    """Ternary code with bank 0 as the most significant digit.

    Sorting by code is the same as sorting labels lexicographically (B < C < H).
    """
    code = 0
    for x in status:
        code = 3 * code + int(x)
    return code


def decode_status(code: int, n: int) -> list[int]:
    out = [0] * n
    for i in range(n - 1, -1, -1):
        code, out[i] = divmod(code, 3)
    return out


def subset_to_list(X: Iterable[int]) -> list[int]:
    """1-based sorted list, for serialisation."""
    return sorted(int(i) + 1 for i in X)
