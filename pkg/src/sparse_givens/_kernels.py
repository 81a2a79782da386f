"""Hot numeric kernels with numba-compiled and pure-numpy implementations.

Every kernel exists twice: a loop version compiled with ``numba.njit`` and a
vectorised numpy version.  The environment variable ``SPARSE_GIVENS_NUMBA``
selects the active path at import time (``0``/``false``/``off`` forces the
numpy fallback; anything else, or unset, uses numba when it is importable).
``benchmarks/bench_kernels.py`` times the two paths against each other.

Index convention: all row/column indices here are 0-based with i < j.
Rotation convention: O(w) is the identity except
O[i,i] = O[j,j] = cos(w), O[i,j] = sin(w), O[j,i] = -sin(w).
"""

from __future__ import annotations

import os

import numpy as np

_flag = os.environ.get("SPARSE_GIVENS_NUMBA", "1").strip().lower()
NUMBA_ENABLED = _flag not in ("0", "false", "off", "no")

if NUMBA_ENABLED:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover - numba is a hard dependency
        NUMBA_ENABLED = False

__all__ = [
    "NUMBA_ENABLED",
    "conjugate_pair",
    "conjugate_ascending",
    "conjugate_descending",
    "rotate_left",
    "rotate_right",
    "compose_rotations",
    "decompose_rotations",
    "conditional_coeffs",
    "insertion_coeffs",
    "fit_quad_mode",
    "quad_grid_max",
    "sparsity_zero_counts",
    "precision_from_rotators",
    "precision_batch",
]


# ---------------------------------------------------------------------------
# loop implementations (numba targets)
# ---------------------------------------------------------------------------

def _conjugate_pair_loops(M, i, j, c, s):
    # M <- O' M O, touching only rows and columns i, j.
    q = M.shape[0]
    for k in range(q):
        mi = M[i, k]
        mj = M[j, k]
        M[i, k] = c * mi - s * mj
        M[j, k] = s * mi + c * mj
    for k in range(q):
        mi = M[k, i]
        mj = M[k, j]
        M[k, i] = c * mi - s * mj
        M[k, j] = s * mi + c * mj


def _conjugate_ascending_loops(M, ii, jj, ws, count):
    # M <- (O_0 ... O_{count-1})' M (O_0 ... O_{count-1})
    q = M.shape[0]
    for t in range(count):
        c = np.cos(ws[t])
        s = np.sin(ws[t])
        i = ii[t]
        j = jj[t]
        for k in range(q):
            mi = M[i, k]
            mj = M[j, k]
            M[i, k] = c * mi - s * mj
            M[j, k] = s * mi + c * mj
        for k in range(q):
            mi = M[k, i]
            mj = M[k, j]
            M[k, i] = c * mi - s * mj
            M[k, j] = s * mi + c * mj


def _conjugate_descending_loops(M, ii, jj, ws, start):
    # M <- (O_start ... O_{z-1}) M (O_start ... O_{z-1})'
    q = M.shape[0]
    for t in range(ws.shape[0] - 1, start - 1, -1):
        c = np.cos(ws[t])
        s = -np.sin(ws[t])
        i = ii[t]
        j = jj[t]
        for k in range(q):
            mi = M[i, k]
            mj = M[j, k]
            M[i, k] = c * mi - s * mj
            M[j, k] = s * mi + c * mj
        for k in range(q):
            mi = M[k, i]
            mj = M[k, j]
            M[k, i] = c * mi - s * mj
            M[k, j] = s * mi + c * mj


def _rotate_left_loops(M, i, j, c, s):
    # M <- O M (rows only); pass -s for O' M.
    q = M.shape[1]
    for k in range(q):
        mi = M[i, k]
        mj = M[j, k]
        M[i, k] = c * mi + s * mj
        M[j, k] = -s * mi + c * mj


def _rotate_right_loops(M, i, j, c, s):
    # M <- M O (columns only); pass -s for M O'.
    q = M.shape[0]
    for k in range(q):
        mi = M[k, i]
        mj = M[k, j]
        M[k, i] = c * mi - s * mj
        M[k, j] = s * mi + c * mj


def _compose_rotations_loops(q, ii, jj, ws):
    # Left-to-right product of rotators applied to the identity:
    # R = O_0 O_1 ... O_{z-1}, built by successive right multiplication.
    R = np.eye(q)
    for t in range(ii.shape[0]):
        c = np.cos(ws[t])
        s = np.sin(ws[t])
        i = ii[t]
        j = jj[t]
        for k in range(q):
            mi = R[k, i]
            mj = R[k, j]
            R[k, i] = c * mi - s * mj
            R[k, j] = s * mi + c * mj
    return R


def _decompose_rotations_loops(R, snap):
    # Peel rotators off the left in lexicographic pair order, zeroing the
    # subdiagonal of each column in turn; the residue is a +/-1 diagonal.
    q = R.shape[0]
    W = R.copy()
    m = q * (q - 1) // 2
    angles = np.zeros(m)
    half_pi = np.pi / 2.0
    t = 0
    for i in range(q - 1):
        for j in range(i + 1, q):
            x = W[i, i]
            y = W[j, i]
            if y == 0.0:
                a = 0.0
            else:
                a = np.arctan2(-y, x)
                if a > half_pi:
                    a -= np.pi
                elif a <= -half_pi:
                    a += np.pi
            if -snap < a < snap:
                a = 0.0
            if a != 0.0:
                ca = np.cos(a)
                sa = np.sin(a)
                for k in range(q):
                    wi = W[i, k]
                    wj = W[j, k]
                    W[i, k] = ca * wi - sa * wj
                    W[j, k] = sa * wi + ca * wj
            angles[t] = a
            t += 1
    signs = np.empty(q)
    for k in range(q):
        signs[k] = W[k, k]
    return angles, signs


def _conditional_coeffs_loops(S_st, A_st, i, j):
    # Coefficients (qc2, qs2, qsc, lc, ls) of the single-angle trace term
    #   tr(O A_st O' S_st) = const + qc2 c^2 + qs2 s^2 + qsc s c + lc c + ls s
    # with c = cos(w), s = sin(w).
    q = S_st.shape[0]
    p11 = S_st[i, i]
    p12 = S_st[i, j]
    p22 = S_st[j, j]
    t11 = A_st[i, i]
    t12 = A_st[i, j]
    t22 = A_st[j, j]
    # 2x2 block of A_st @ S_st at rows/cols (i, j)
    n11 = 0.0
    n12 = 0.0
    n21 = 0.0
    n22 = 0.0
    for k in range(q):
        n11 += A_st[i, k] * S_st[k, i]
        n12 += A_st[i, k] * S_st[k, j]
        n21 += A_st[j, k] * S_st[k, i]
        n22 += A_st[j, k] * S_st[k, j]
    g11 = n11 - (t11 * p11 + t12 * p12)
    g12 = n12 - (t11 * p12 + t12 * p22)
    g21 = n21 - (t12 * p11 + t22 * p12)
    g22 = n22 - (t12 * p12 + t22 * p22)
    qc2 = t11 * p11 + 2.0 * t12 * p12 + t22 * p22
    qs2 = t11 * p22 - 2.0 * t12 * p12 + t22 * p11
    qsc = 2.0 * (t12 * (p11 - p22) + p12 * (t22 - t11))
    lc = 2.0 * (g11 + g22)
    ls = 2.0 * (g21 - g12)
    return qc2, qs2, qsc, lc, ls


def _insertion_coeffs_loops(S, a, ii, jj, ws, pos_lo, pos_hi, i, j):
    # Conditional coefficients for the rotator slot between positions pos_lo
    # and pos_hi of the sequence: S is conjugated by rotators [0, pos_lo),
    # diag(a) by rotators [pos_hi, z).  Covers both an insertion at position
    # p (pos_lo = pos_hi = p) and an existing rotator k (pos_lo=k, pos_hi=k+1).
    q = S.shape[0]
    Sp = S.copy()
    for t in range(pos_lo):
        c = np.cos(ws[t])
        s = np.sin(ws[t])
        a_ = ii[t]
        b_ = jj[t]
        for k in range(q):
            mi = Sp[a_, k]
            mj = Sp[b_, k]
            Sp[a_, k] = c * mi - s * mj
            Sp[b_, k] = s * mi + c * mj
        for k in range(q):
            mi = Sp[k, a_]
            mj = Sp[k, b_]
            Sp[k, a_] = c * mi - s * mj
            Sp[k, b_] = s * mi + c * mj
    Ap = np.zeros((q, q))
    for k in range(q):
        Ap[k, k] = a[k]
    for t in range(ws.shape[0] - 1, pos_hi - 1, -1):
        c = np.cos(ws[t])
        s = -np.sin(ws[t])
        a_ = ii[t]
        b_ = jj[t]
        for k in range(q):
            mi = Ap[a_, k]
            mj = Ap[b_, k]
            Ap[a_, k] = c * mi - s * mj
            Ap[b_, k] = s * mi + c * mj
        for k in range(q):
            mi = Ap[k, a_]
            mj = Ap[k, b_]
            Ap[k, a_] = c * mi - s * mj
            Ap[k, b_] = s * mi + c * mj
    p11 = Sp[i, i]
    p12 = Sp[i, j]
    p22 = Sp[j, j]
    t11 = Ap[i, i]
    t12 = Ap[i, j]
    t22 = Ap[j, j]
    n11 = 0.0
    n12 = 0.0
    n21 = 0.0
    n22 = 0.0
    for k in range(q):
        n11 += Ap[i, k] * Sp[k, i]
        n12 += Ap[i, k] * Sp[k, j]
        n21 += Ap[j, k] * Sp[k, i]
        n22 += Ap[j, k] * Sp[k, j]
    g11 = n11 - (t11 * p11 + t12 * p12)
    g12 = n12 - (t11 * p12 + t12 * p22)
    g21 = n21 - (t12 * p11 + t22 * p12)
    g22 = n22 - (t12 * p12 + t22 * p22)
    qc2 = t11 * p11 + 2.0 * t12 * p12 + t22 * p22
    qs2 = t11 * p22 - 2.0 * t12 * p12 + t22 * p11
    qsc = 2.0 * (t12 * (p11 - p22) + p12 * (t22 - t11))
    lc = 2.0 * (g11 + g22)
    ls = 2.0 * (g21 - g12)
    return qc2, qs2, qsc, lc, ls


def _fit_quad_mode_loops(qc2, qs2, qsc, lc, ls, lo, hi, n):
    # Interior maximizer of f(w) = -(qc2 c^2 + qs2 s^2 + qsc s c + lc c + ls s)/2
    # by grid seeding plus safeguarded Newton; returns (mode, f''(mode)).
    best_w = lo
    best_f = -1e300
    step = (hi - lo) / (n - 1)
    for t in range(n):
        w = lo + step * t
        c = np.cos(w)
        s = np.sin(w)
        f = -0.5 * (qc2 * c * c + qs2 * s * s + qsc * s * c + lc * c + ls * s)
        if f > best_f:
            best_f = f
            best_w = w
    w = best_w
    amp = qc2 - qs2
    converged = False
    for _ in range(100):
        s2 = np.sin(2.0 * w)
        c2 = np.cos(2.0 * w)
        s1 = np.sin(w)
        c1 = np.cos(w)
        d1 = -0.5 * (-amp * s2 + qsc * c2 - lc * s1 + ls * c1)
        d2 = -0.5 * (-2.0 * amp * c2 - 2.0 * qsc * s2 - lc * c1 - ls * s1)
        if d2 >= 0.0:
            break
        delta = -d1 / d2
        if delta > step:
            delta = step
        elif delta < -step:
            delta = -step
        w_new = w + delta
        if w_new < lo:
            w_new = lo
        elif w_new > hi:
            w_new = hi
        if abs(w_new - w) < 1e-12:
            w = w_new
            converged = True
            break
        w = w_new
    if not converged:
        # golden-section between the grid neighbours as a safety net
        a_ = best_w - step if best_w - step > lo else lo
        b_ = best_w + step if best_w + step < hi else hi
        inv_phi = 0.6180339887498949
        c_ = b_ - inv_phi * (b_ - a_)
        d_ = a_ + inv_phi * (b_ - a_)
        for _ in range(90):
            cc = np.cos(c_)
            sc_ = np.sin(c_)
            fc = -0.5 * (qc2 * cc * cc + qs2 * sc_ * sc_ + qsc * sc_ * cc
                         + lc * cc + ls * sc_)
            cd = np.cos(d_)
            sd = np.sin(d_)
            fd = -0.5 * (qc2 * cd * cd + qs2 * sd * sd + qsc * sd * cd
                         + lc * cd + ls * sd)
            if fc > fd:
                b_, d_ = d_, c_
                c_ = b_ - inv_phi * (b_ - a_)
            else:
                a_, c_ = c_, d_
                d_ = a_ + inv_phi * (b_ - a_)
        w = 0.5 * (a_ + b_)
    s2 = np.sin(2.0 * w)
    c2 = np.cos(2.0 * w)
    s1 = np.sin(w)
    c1 = np.cos(w)
    d2 = -0.5 * (-2.0 * amp * c2 - 2.0 * qsc * s2 - lc * c1 - ls * s1)
    return w, d2


def _quad_grid_max_loops(qc2, qs2, qsc, lc, ls, lo, hi, n):
    # Maximise f(w) = -(qc2 c^2 + qs2 s^2 + qsc s c + lc c + ls s)/2 on a grid.
    best_w = lo
    best_f = -1e300
    step = (hi - lo) / (n - 1)
    for t in range(n):
        w = lo + step * t
        c = np.cos(w)
        s = np.sin(w)
        f = -0.5 * (qc2 * c * c + qs2 * s * s + qsc * s * c + lc * c + ls * s)
        if f > best_f:
            best_f = f
            best_w = w
    return best_w, best_f


def _sparsity_zero_counts_loops(q, ii, jj, ws, eigs, rel_tol):
    # For each simulated rotator draw: count zeros in the off-diagonal of the
    # composed R and in the upper triangle of K = R diag(1/eigs) R'.
    nsim = ii.shape[0]
    z = ii.shape[1]
    r_zeros = np.empty(nsim, dtype=np.int64)
    k_zeros = np.empty(nsim, dtype=np.int64)
    R = np.empty((q, q))
    K = np.empty((q, q))
    for sim in range(nsim):
        for r in range(q):
            for cidx in range(q):
                R[r, cidx] = 0.0
                K[r, cidx] = 0.0
            R[r, r] = 1.0
            K[r, r] = 1.0 / eigs[sim, r]
        for t in range(z):
            c = np.cos(ws[sim, t])
            s = np.sin(ws[sim, t])
            i = ii[sim, t]
            j = jj[sim, t]
            for k in range(q):
                mi = R[k, i]
                mj = R[k, j]
                R[k, i] = c * mi - s * mj
                R[k, j] = s * mi + c * mj
        # K = R A R': conjugate diag(1/eigs) by the rotators right to left.
        for t in range(z - 1, -1, -1):
            c = np.cos(ws[sim, t])
            s = -np.sin(ws[sim, t])
            i = ii[sim, t]
            j = jj[sim, t]
            for k in range(q):
                mi = K[i, k]
                mj = K[j, k]
                K[i, k] = c * mi - s * mj
                K[j, k] = s * mi + c * mj
            for k in range(q):
                mi = K[k, i]
                mj = K[k, j]
                K[k, i] = c * mi - s * mj
                K[k, j] = s * mi + c * mj
        rmax = 0.0
        kmax = 0.0
        for r in range(q):
            for cidx in range(q):
                ar = abs(R[r, cidx])
                ak = abs(K[r, cidx])
                if ar > rmax:
                    rmax = ar
                if ak > kmax:
                    kmax = ak
        rthr = rel_tol * rmax
        kthr = rel_tol * kmax
        rz = 0
        kz = 0
        for r in range(q):
            for cidx in range(q):
                if r != cidx and abs(R[r, cidx]) <= rthr:
                    rz += 1
                if cidx > r and abs(K[r, cidx]) <= kthr:
                    kz += 1
        r_zeros[sim] = rz
        k_zeros[sim] = kz
    return r_zeros, k_zeros


def _precision_from_rotators_loops(q, ii, jj, ws, a):
    # K = R diag(a) R' via two-sided rotations, O(z q + q) work.
    K = np.zeros((q, q))
    for r in range(q):
        K[r, r] = a[r]
    for t in range(ii.shape[0] - 1, -1, -1):
        c = np.cos(ws[t])
        s = -np.sin(ws[t])
        i = ii[t]
        j = jj[t]
        for k in range(q):
            mi = K[i, k]
            mj = K[j, k]
            K[i, k] = c * mi - s * mj
            K[j, k] = s * mi + c * mj
        for k in range(q):
            mi = K[k, i]
            mj = K[k, j]
            K[k, i] = c * mi - s * mj
            K[k, j] = s * mi + c * mj
    return K


def _precision_batch_loops(q, zs, ii_flat, jj_flat, ws_flat, a2d):
    # Ragged batch of draws -> stacked precision matrices (ndraw, q, q).
    ndraw = zs.shape[0]
    out = np.empty((ndraw, q, q))
    pos = 0
    for d in range(ndraw):
        z = zs[d]
        K = out[d]
        for r in range(q):
            for cidx in range(q):
                K[r, cidx] = 0.0
            K[r, r] = a2d[d, r]
        for t in range(pos + z - 1, pos - 1, -1):
            c = np.cos(ws_flat[t])
            s = -np.sin(ws_flat[t])
            i = ii_flat[t]
            j = jj_flat[t]
            for k in range(q):
                mi = K[i, k]
                mj = K[j, k]
                K[i, k] = c * mi - s * mj
                K[j, k] = s * mi + c * mj
            for k in range(q):
                mi = K[k, i]
                mj = K[k, j]
                K[k, i] = c * mi - s * mj
                K[k, j] = s * mi + c * mj
        pos += z
    return out


# ---------------------------------------------------------------------------
# numpy implementations
# ---------------------------------------------------------------------------

def _conjugate_pair_numpy(M, i, j, c, s):
    ri = c * M[i, :] - s * M[j, :]
    rj = s * M[i, :] + c * M[j, :]
    M[i, :] = ri
    M[j, :] = rj
    ci = c * M[:, i] - s * M[:, j]
    cj = s * M[:, i] + c * M[:, j]
    M[:, i] = ci
    M[:, j] = cj


def _conjugate_ascending_numpy(M, ii, jj, ws, count):
    for t in range(count):
        _conjugate_pair_numpy(M, ii[t], jj[t], np.cos(ws[t]), np.sin(ws[t]))


def _conjugate_descending_numpy(M, ii, jj, ws, start):
    for t in range(len(ws) - 1, start - 1, -1):
        _conjugate_pair_numpy(M, ii[t], jj[t], np.cos(ws[t]), -np.sin(ws[t]))


def _rotate_left_numpy(M, i, j, c, s):
    ri = c * M[i, :] + s * M[j, :]
    rj = -s * M[i, :] + c * M[j, :]
    M[i, :] = ri
    M[j, :] = rj


def _rotate_right_numpy(M, i, j, c, s):
    ci = c * M[:, i] - s * M[:, j]
    cj = s * M[:, i] + c * M[:, j]
    M[:, i] = ci
    M[:, j] = cj


def _compose_rotations_numpy(q, ii, jj, ws):
    R = np.eye(q)
    for t in range(len(ws)):
        _rotate_right_numpy(R, ii[t], jj[t], np.cos(ws[t]), np.sin(ws[t]))
    return R


def _decompose_rotations_numpy(R, snap):
    q = R.shape[0]
    W = R.copy()
    angles = np.zeros(q * (q - 1) // 2)
    half_pi = np.pi / 2.0
    t = 0
    for i in range(q - 1):
        for j in range(i + 1, q):
            x, y = W[i, i], W[j, i]
            if y == 0.0:
                a = 0.0
            else:
                a = np.arctan2(-y, x)
                if a > half_pi:
                    a -= np.pi
                elif a <= -half_pi:
                    a += np.pi
            if -snap < a < snap:
                a = 0.0
            if a != 0.0:
                ca, sa = np.cos(a), np.sin(a)
                ri = ca * W[i, :] - sa * W[j, :]
                rj = sa * W[i, :] + ca * W[j, :]
                W[i, :] = ri
                W[j, :] = rj
            angles[t] = a
            t += 1
    return angles, np.diag(W).copy()


def _conditional_coeffs_numpy(S_st, A_st, i, j):
    sel = [i, j]
    phi = S_st[np.ix_(sel, sel)]
    psi = A_st[np.ix_(sel, sel)]
    N = np.empty((2, 2))
    N[0, 0] = A_st[i, :] @ S_st[:, i]
    N[0, 1] = A_st[i, :] @ S_st[:, j]
    N[1, 0] = A_st[j, :] @ S_st[:, i]
    N[1, 1] = A_st[j, :] @ S_st[:, j]
    G = N - psi @ phi
    qc2 = psi[0, 0] * phi[0, 0] + 2.0 * psi[0, 1] * phi[0, 1] + psi[1, 1] * phi[1, 1]
    qs2 = psi[0, 0] * phi[1, 1] - 2.0 * psi[0, 1] * phi[0, 1] + psi[1, 1] * phi[0, 0]
    qsc = 2.0 * (psi[0, 1] * (phi[0, 0] - phi[1, 1]) + phi[0, 1] * (psi[1, 1] - psi[0, 0]))
    lc = 2.0 * (G[0, 0] + G[1, 1])
    ls = 2.0 * (G[1, 0] - G[0, 1])
    return qc2, qs2, qsc, lc, ls


def _insertion_coeffs_numpy(S, a, ii, jj, ws, pos_lo, pos_hi, i, j):
    Sp = S.copy()
    _conjugate_ascending_numpy(Sp, ii, jj, ws, pos_lo)
    Ap = np.diag(a).astype(float)
    _conjugate_descending_numpy(Ap, ii, jj, ws, pos_hi)
    return _conditional_coeffs_numpy(Sp, Ap, i, j)


def _fit_quad_mode_numpy(qc2, qs2, qsc, lc, ls, lo, hi, n):
    return _fit_quad_mode_loops(qc2, qs2, qsc, lc, ls, lo, hi, n)


def _quad_grid_max_numpy(qc2, qs2, qsc, lc, ls, lo, hi, n):
    w = np.linspace(lo, hi, n)
    c = np.cos(w)
    s = np.sin(w)
    f = -0.5 * (qc2 * c * c + qs2 * s * s + qsc * s * c + lc * c + ls * s)
    k = int(np.argmax(f))
    return float(w[k]), float(f[k])


def _sparsity_zero_counts_numpy(q, ii, jj, ws, eigs, rel_tol):
    nsim = ii.shape[0]
    r_zeros = np.empty(nsim, dtype=np.int64)
    k_zeros = np.empty(nsim, dtype=np.int64)
    for sim in range(nsim):
        R = _compose_rotations_numpy(q, ii[sim], jj[sim], ws[sim])
        K = np.diag(1.0 / eigs[sim])
        for t in range(ii.shape[1] - 1, -1, -1):
            _conjugate_pair_numpy(K, ii[sim, t], jj[sim, t],
                                  np.cos(ws[sim, t]), -np.sin(ws[sim, t]))
        rthr = rel_tol * np.abs(R).max()
        kthr = rel_tol * np.abs(K).max()
        off = ~np.eye(q, dtype=bool)
        r_zeros[sim] = int(np.count_nonzero((np.abs(R) <= rthr) & off))
        iu = np.triu_indices(q, 1)
        k_zeros[sim] = int(np.count_nonzero(np.abs(K[iu]) <= kthr))
    return r_zeros, k_zeros


def _precision_from_rotators_numpy(q, ii, jj, ws, a):
    K = np.diag(a).astype(float)
    for t in range(len(ws) - 1, -1, -1):
        _conjugate_pair_numpy(K, ii[t], jj[t], np.cos(ws[t]), -np.sin(ws[t]))
    return K


def _precision_batch_numpy(q, zs, ii_flat, jj_flat, ws_flat, a2d):
    ndraw = len(zs)
    out = np.empty((ndraw, q, q))
    pos = 0
    for d in range(ndraw):
        z = int(zs[d])
        out[d] = _precision_from_rotators_numpy(
            q, ii_flat[pos:pos + z], jj_flat[pos:pos + z],
            ws_flat[pos:pos + z], a2d[d])
        pos += z
    return out


# ---------------------------------------------------------------------------
# path selection
# ---------------------------------------------------------------------------

if NUMBA_ENABLED:
    conjugate_pair = njit(cache=True)(_conjugate_pair_loops)
    conjugate_ascending = njit(cache=True)(_conjugate_ascending_loops)
    conjugate_descending = njit(cache=True)(_conjugate_descending_loops)
    rotate_left = njit(cache=True)(_rotate_left_loops)
    rotate_right = njit(cache=True)(_rotate_right_loops)
    compose_rotations = njit(cache=True)(_compose_rotations_loops)
    decompose_rotations = njit(cache=True)(_decompose_rotations_loops)
    conditional_coeffs = njit(cache=True)(_conditional_coeffs_loops)
    insertion_coeffs = njit(cache=True)(_insertion_coeffs_loops)
    fit_quad_mode = njit(cache=True)(_fit_quad_mode_loops)
    quad_grid_max = njit(cache=True)(_quad_grid_max_loops)
    sparsity_zero_counts = njit(cache=True)(_sparsity_zero_counts_loops)
    precision_from_rotators = njit(cache=True)(_precision_from_rotators_loops)
    precision_batch = njit(cache=True)(_precision_batch_loops)
else:
    conjugate_pair = _conjugate_pair_numpy
    conjugate_ascending = _conjugate_ascending_numpy
    conjugate_descending = _conjugate_descending_numpy
    rotate_left = _rotate_left_numpy
    rotate_right = _rotate_right_numpy
    compose_rotations = _compose_rotations_numpy
    decompose_rotations = _decompose_rotations_numpy
    conditional_coeffs = _conditional_coeffs_numpy
    insertion_coeffs = _insertion_coeffs_numpy
    fit_quad_mode = _fit_quad_mode_numpy
    quad_grid_max = _quad_grid_max_numpy
    sparsity_zero_counts = _sparsity_zero_counts_numpy
    precision_from_rotators = _precision_from_rotators_numpy
    precision_batch = _precision_batch_numpy
