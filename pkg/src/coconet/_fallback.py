"""Pure-Python/numpy versions of the compiled kernels.

Same signatures and semantics as ``coconet._kernels``. The candidate sweep
is vectorised over chunks of partitions with batched ``numpy.linalg.solve``.
"""

import numpy as np

_CHUNK = 2048


def _status_block(start: int, stop: int, n: int) -> np.ndarray:
    codes = np.arange(start, stop, dtype=np.int64)
    powers = 3 ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return (codes[:, None] // powers[None, :]) % 3


def _systems(m, c, W, a, status):
    """Stacked L_{B,C} and right-hand sides for a block of status vectors."""
    n = m.shape[0]
    IW = np.eye(n) - W
    mB = m * (status == 0)
    mC = m * (status == 1)
    cH = c * (status == 2)
    L = IW[None, :, :] * mC[:, None, :]
    idx = np.arange(n)
    L[:, idx, idx] += 1.0 + mB
    rhs = a[None, :] - cH @ IW.T
    return L, rhs


def solve_status(m, c, W, a, status):
    m, c, W, a = (np.asarray(x, dtype=float) for x in (m, c, W, a))
    L, rhs = _systems(m, c, W, a, np.asarray(status, dtype=np.int64)[None, :])
    try:
        return np.linalg.solve(L[0], rhs[0])
    except np.linalg.LinAlgError:
        return None


def _consistent(S, status, l, eps_rel):
    tol = eps_rel * (1.0 + np.abs(S).max(axis=1, initial=0.0))[:, None]
    ok_b = S < 0.0
    ok_c = (S >= -tol) & (S <= l[None, :] + tol)
    ok_h = S > l[None, :]
    ok = np.where(status == 0, ok_b, np.where(status == 1, ok_c, ok_h))
    return ok.all(axis=1)


def enumerate_candidates(m, c, l, W, a, eps_rel, first_only=False):
    m, c, l, W, a = (np.asarray(x, dtype=float) for x in (m, c, l, W, a))
    n = m.shape[0]
    total = 3**n
    codes, rows = [], []
    for start in range(0, total, _CHUNK):
        stop = min(total, start + _CHUNK)
        status = _status_block(start, stop, n)
        L, rhs = _systems(m, c, W, a, status)
        S = np.linalg.solve(L, rhs[:, :, None])[:, :, 0]
        ok = np.flatnonzero(_consistent(S, status, l, eps_rel))
        if ok.size:
            if first_only:
                ok = ok[:1]
            codes.append(ok + start)
            rows.append(S[ok])
            if first_only:
                break
    if not codes:
        return np.empty(0, dtype=np.int64), np.empty((0, n))
    return np.concatenate(codes).astype(np.int64), np.concatenate(rows)


def fictitious(m, c, l, W, a, eps_rel, max_iter):
    """Fictitious conversion: monotone demotion from all-healthy.

    Each round solves the current partition's system; every bank whose price
    falls below its current band moves down one status (H to C, C to B).
    Stops when the partition is self-consistent (converged) or when a bank
    would need promotion or ``max_iter`` rounds pass (not converged).
    Returns ``(status, s, rounds, converged)``.
    """
    m, c, l, W, a = (np.asarray(x, dtype=float) for x in (m, c, l, W, a))
    n = m.shape[0]
    status = np.full(n, 2, dtype=np.int64)
    s = np.empty(n)
    for k in range(max_iter + 1):
        s = solve_status(m, c, W, a, status)
        if s is None:
            return status, np.full(n, np.nan), k, False
        tol = eps_rel * (1.0 + np.abs(s).max())
        nxt = np.where(s < -tol, 0, np.where(s <= l + tol, 1, 2))
        down = nxt < status
        if not down.any():
            return status, s, k, not bool((nxt > status).any())
        status = status - down
    return status, s, max_iter, False
