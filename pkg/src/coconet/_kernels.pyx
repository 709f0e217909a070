# cython: language_level=3
"""Compiled inner loops: per-partition linear solves, the 3^n candidate sweep
and the fictitious-conversion iteration.

Status codes: 0 bankrupt, 1 converting, 2 healthy. Partition codes are
ternary with bank 0 as the most significant digit.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs

cnp.import_array()


cdef int _solve_status(int n, const double[::1] m, const double[::1] c,
                       const double[:, ::1] W, const double[::1] a,
                       const long[::1] status, double[:, ::1] L,
                       double[::1] s) noexcept nogil:
    """Solve L_{B,C} s = a - (I-W) c_H in place. Returns 1 if singular."""
    cdef int i, j, k, piv
    cdef double mj, cj, t, best
    for i in range(n):
        s[i] = a[i]
        for j in range(n):
            L[i, j] = 0.0
        L[i, i] = 1.0
    for j in range(n):
        if status[j] == 0:
            L[j, j] += m[j]
        elif status[j] == 1:
            mj = m[j]
            L[j, j] += mj
            for i in range(n):
                L[i, j] -= mj * W[i, j]
        else:
            cj = c[j]
            s[j] -= cj
            for i in range(n):
                s[i] += W[i, j] * cj
    # Gaussian elimination with partial pivoting
    for k in range(n):
        piv = k
        best = fabs(L[k, k])
        for i in range(k + 1, n):
            if fabs(L[i, k]) > best:
                best = fabs(L[i, k])
                piv = i
        if best == 0.0:
            return 1
        if piv != k:
            for j in range(k, n):
                t = L[k, j]
                L[k, j] = L[piv, j]
                L[piv, j] = t
            t = s[k]
            s[k] = s[piv]
            s[piv] = t
        for i in range(k + 1, n):
            t = L[i, k] / L[k, k]
            if t != 0.0:
                for j in range(k + 1, n):
                    L[i, j] -= t * L[k, j]
                s[i] -= t * s[k]
    for k in range(n - 1, -1, -1):
        t = s[k]
        for j in range(k + 1, n):
            t -= L[k, j] * s[j]
        s[k] = t / L[k, k]
    return 0


cdef inline double _tol(int n, const double[::1] s, double eps_rel) noexcept nogil:
    cdef double mx = 0.0
    cdef int i
    for i in range(n):
        if fabs(s[i]) > mx:
            mx = fabs(s[i])
    return eps_rel * (1.0 + mx)


def solve_status(m, c, W, a, status):
    """Candidate prices for one partition (status vector)."""
    cdef const double[::1] mv = np.ascontiguousarray(m, dtype=np.float64)
    cdef const double[::1] cv = np.ascontiguousarray(c, dtype=np.float64)
    cdef const double[:, ::1] Wv = np.ascontiguousarray(W, dtype=np.float64)
    cdef const double[::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef const long[::1] st = np.ascontiguousarray(status, dtype=np.int64)
    cdef int n = mv.shape[0]
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] s = out
    cdef double[:, ::1] L = np.empty((n, n), dtype=np.float64)
    if _solve_status(n, mv, cv, Wv, av, st, L, s):
        return None
    return out


def enumerate_candidates(m, c, l, W, a, double eps_rel, bint first_only=False):
    """Sweep all 3^n partitions and keep the self-consistent candidates.

    Returns ``(codes, S)`` in ternary-counter order. Consistency: B strict
    ``s < 0``, C closed ``[-tol, l + tol]``, H strict ``s > l``.
    """
    cdef const double[::1] mv = np.ascontiguousarray(m, dtype=np.float64)
    cdef const double[::1] cv = np.ascontiguousarray(c, dtype=np.float64)
    cdef const double[::1] lv = np.ascontiguousarray(l, dtype=np.float64)
    cdef const double[:, ::1] Wv = np.ascontiguousarray(W, dtype=np.float64)
    cdef const double[::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef int n = mv.shape[0]
    cdef long total = 1
    cdef long code, rem
    cdef int i, ok, hits = 0, cap = 16
    cdef double tol, si
    cdef long[::1] st = np.zeros(n, dtype=np.int64)
    cdef double[::1] s = np.empty(n, dtype=np.float64)
    cdef double[:, ::1] L = np.empty((n, n), dtype=np.float64)
    for i in range(n):
        total *= 3
    codes_arr = np.empty(cap, dtype=np.int64)
    S_arr = np.empty((cap, n), dtype=np.float64)
    cdef long[::1] codes = codes_arr
    cdef double[:, ::1] S = S_arr
    for code in range(total):
        rem = code
        for i in range(n - 1, -1, -1):
            st[i] = rem % 3
            rem = rem // 3
        if _solve_status(n, mv, cv, Wv, av, st, L, s):
            continue
        tol = _tol(n, s, eps_rel)
        ok = 1
        for i in range(n):
            si = s[i]
            if st[i] == 0:
                if not si < 0.0:
                    ok = 0
                    break
            elif st[i] == 1:
                if si < -tol or si > lv[i] + tol:
                    ok = 0
                    break
            else:
                if not si > lv[i]:
                    ok = 0
                    break
        if not ok:
            continue
        if hits == cap:
            cap *= 2
            codes_arr = np.resize(codes_arr, cap)
            S_arr = np.resize(S_arr, (cap, n))
            codes = codes_arr
            S = S_arr
        codes[hits] = code
        for i in range(n):
            S[hits, i] = s[i]
        hits += 1
        if first_only:
            break
    return codes_arr[:hits].copy(), S_arr[:hits].copy()


def fictitious(m, c, l, W, a, double eps_rel, int max_iter):
    """Fictitious conversion: monotone demotion from all-healthy.

    Each round solves the current partition's system; every bank whose price
    falls below its current band moves down one status (H to C, C to B).
    Stops when the partition is self-consistent (converged) or when a bank
    would need promotion or ``max_iter`` rounds pass (not converged).
    Returns ``(status, s, rounds, converged)``.
    """
    cdef const double[::1] mv = np.ascontiguousarray(m, dtype=np.float64)
    cdef const double[::1] cv = np.ascontiguousarray(c, dtype=np.float64)
    cdef const double[::1] lv = np.ascontiguousarray(l, dtype=np.float64)
    cdef const double[:, ::1] Wv = np.ascontiguousarray(W, dtype=np.float64)
    cdef const double[::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef int n = mv.shape[0]
    cdef int i, k, demoted, promote
    cdef long nxt
    cdef double tol
    status = np.full(n, 2, dtype=np.int64)
    s_arr = np.empty(n, dtype=np.float64)
    cdef long[::1] st = status
    cdef double[::1] s = s_arr
    cdef double[:, ::1] L = np.empty((n, n), dtype=np.float64)
    for k in range(max_iter + 1):
        if _solve_status(n, mv, cv, Wv, av, st, L, s):
            return status, s_arr, k, False
        tol = _tol(n, s, eps_rel)
        demoted = 0
        promote = 0
        for i in range(n):
            if s[i] < -tol:
                nxt = 0
            elif s[i] <= lv[i] + tol:
                nxt = 1
            else:
                nxt = 2
            if nxt < st[i]:
                st[i] -= 1
                demoted = 1
            elif nxt > st[i]:
                promote = 1
        if not demoted:
            return status, s_arr, k, not promote
    return status, s_arr, max_iter, False
