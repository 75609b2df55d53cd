"""Hot stepping loops: a numba-compiled kernel and its pure-numpy twin.

Both paths implement the identical implicit step -- memory-weighted history
sums on the right-hand side, tridiagonal solve for the new time level --
and agree to roundoff.  Backend selection lives in backend.py (env flag
FRACSTEFAN_BACKEND); benchmarks/bench_backends.py times one against the
other.

The numpy twin recomputes the history differences from the stored grid at
every step (two BLAS mat-vecs per step), while the compiled kernel keeps
the second differences and the advective accumulator incrementally.  Both
are O(n^2 * m) overall; the kernel simply has no per-step Python cost.
"""

from __future__ import annotations


import numpy as np

from .errors import ZeroPivotError
from .fracquad import trap_weights

try:  # pragma: no cover - exercised implicitly by backend tests
    import numba
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover
    numba = None
    NUMBA_AVAILABLE = False

    def njit(*args, **kwargs):  # fallback decorator, keeps definitions importable
        if args and callable(args[0]):
            return args[0]

        def wrap(fn):
            return fn

        return wrap


def step_system(ubar, k, tcoef, rfac, qfac_in, gq, init_mult, c):
    """Tridiagonal system advancing the grid from levels 0..k to level k+1.

    c must hold the memory weights targeting level k+1 (length >= k+2);
    qfac_in is the per-interior-node advective factor.  The boundary
    columns of ubar must already be filled at level k+1.  Returns
    (sub, diag, sup, rhs, dominance_violations).
    """
    m = ubar.shape[1] - 1
    rows = ubar[:k + 1, :]
    d2 = rows[:, :-2] - 2.0 * rows[:, 1:-1] + rows[:, 2:]
    rhs = ubar[0, 1:-1] * init_mult + rfac * (c[:k + 1] @ d2)
    if k >= 1:
        dc = rows[1:, 2:] - rows[1:, :-2]
        rhs = rhs + qfac_in * (gq[1:k + 1] @ dc)
    r_imp = rfac * c[k + 1]
    q_imp = qfac_in * gq[k + 1]
    sub = -r_imp + q_imp
    sup = -r_imp - q_imp
    diag = np.full(m - 1, tcoef[k + 1] + 2.0 * r_imp)
    rhs[0] -= sub[0] * ubar[k + 1, 0]
    rhs[-1] -= sup[-1] * ubar[k + 1, m]
    violations = int(np.count_nonzero(np.abs(diag) < np.abs(sub) + np.abs(sup)))
    return sub, diag, sup, rhs, violations


def thomas(sub, diag, sup, rhs):
    """Thomas elimination for a tridiagonal system; O(size).

    sub[0] and sup[-1] are ignored.  Raises ZeroPivotError on a vanishing
    pivot, which signals a non-dominant assembly upstream.
    """
    n = diag.shape[0]
    cp = np.empty(n)
    xp = np.empty(n)
    pivot = diag[0]
    if pivot == 0.0:
        raise ZeroPivotError("zero pivot at row 0")
    cp[0] = sup[0] / pivot
    xp[0] = rhs[0] / pivot
    for i in range(1, n):
        pivot = diag[i] - sub[i] * cp[i - 1]
        if pivot == 0.0:
            raise ZeroPivotError(f"zero pivot at row {i}")
        cp[i] = sup[i] / pivot
        xp[i] = (rhs[i] - sub[i] * xp[i - 1]) / pivot
    x = np.empty(n)
    x[n - 1] = xp[n - 1]
    for i in range(n - 2, -1, -1):
        x[i] = xp[i] - cp[i] * x[i + 1]
    return x


def advance_numpy(ubar, tcoef, rfac, qfac_in, gq, init_mult, alpha, dtau, through):
    """Populate ubar rows 1..through by repeated assembly + Thomas solve."""
    violations = 0
    for k in range(through):
        c = trap_weights(k, alpha, dtau).c
        sub, diag, sup, rhs, v = step_system(
            ubar, k, tcoef, rfac, qfac_in, gq, init_mult, c
        )
        violations += v
        ubar[k + 1, 1:-1] = thomas(sub, diag, sup, rhs)
    return violations


# --- numba twin ------------------------------------------------------------
#
# The weight helpers mirror fracquad._first_factor / _interior_factor
# term for term so the two backends produce matching weights.

@njit(cache=True)
def _first_factor_nb(k, alpha):
    if k == 0:
        return alpha
    ap1 = alpha + 1.0
    if k < 1415:  # fracquad.SERIES_LAG
        return k ** ap1 - (k - alpha) * (k + 1.0) ** alpha
    K = k + 1.0
    h = 1.0 / K
    coef = ap1 * alpha / 2.0
    acc = coef * h * h
    hpow = h * h
    for m in range(3, 10):
        coef *= -(ap1 - m + 1.0) / m
        hpow = hpow * h
        acc = acc + coef * hpow
    return K ** ap1 * acc


@njit(cache=True)
def _interior_factor_nb(lag, alpha):
    ap1 = alpha + 1.0
    if lag < 1415:
        return (lag + 1.0) ** ap1 + (lag - 1.0) ** ap1 - 2.0 * lag ** ap1
    h2 = 1.0 / (lag * lag)
    coef = ap1 * alpha / 2.0
    acc = coef * h2
    hpow = h2
    for m in range(2, 6):
        coef *= (ap1 - 2.0 * m + 2.0) * (ap1 - 2.0 * m + 1.0) / ((2.0 * m - 1.0) * 2.0 * m)
        hpow = hpow * h2
        acc = acc + coef * hpow
    return lag ** ap1 * (2.0 * acc)


@njit(cache=True)
def _fill_weights_nb(c, k, alpha, pref):
    c[0] = pref * _first_factor_nb(k, alpha)
    for j in range(1, k + 1):
        c[j] = pref * _interior_factor_nb(k - j + 1.0, alpha)
    c[k + 1] = pref


@njit(cache=True)
def _advance_nb(ubar, tcoef, rfac, qfac_in, gq, init_mult, alpha, dtau, through):
    nlev = ubar.shape[0]
    m = ubar.shape[1] - 1
    mi = m - 1  # interior width
    pref = dtau ** alpha / (alpha * (alpha + 1.0))

    c = np.empty(nlev + 1)
    d2 = np.empty((through + 1, mi))
    qs = np.zeros(mi)
    sub = np.empty(mi)
    sup = np.empty(mi)
    rhs = np.empty(mi)
    cp = np.empty(mi)
    xp = np.empty(mi)

    for i in range(1, m):
        d2[0, i - 1] = ubar[0, i - 1] - 2.0 * ubar[0, i] + ubar[0, i + 1]

    violations = 0
    for k in range(through):
        _fill_weights_nb(c, k, alpha, pref)
        r_imp = rfac * c[k + 1]
        g_imp = gq[k + 1]
        diag = tcoef[k + 1] + 2.0 * r_imp

        for i in range(mi):
            rhs[i] = ubar[0, i + 1] * init_mult + qfac_in[i] * qs[i]
        for j in range(k + 1):
            rc = rfac * c[j]
            for i in range(mi):
                rhs[i] += rc * d2[j, i]
        for i in range(mi):
            q = qfac_in[i] * g_imp
            sub[i] = -r_imp + q
            sup[i] = -r_imp - q
            if abs(diag) < abs(sub[i]) + abs(sup[i]):
                violations += 1
        rhs[0] -= sub[0] * ubar[k + 1, 0]
        rhs[mi - 1] -= sup[mi - 1] * ubar[k + 1, m]

        pivot = diag
        if pivot == 0.0:
            return k, violations
        cp[0] = sup[0] / pivot
        xp[0] = rhs[0] / pivot
        for i in range(1, mi):
            pivot = diag - sub[i] * cp[i - 1]
            if pivot == 0.0:
                return k, violations
            cp[i] = sup[i] / pivot
            xp[i] = (rhs[i] - sub[i] * xp[i - 1]) / pivot
        ubar[k + 1, m - 1] = xp[mi - 1]
        for i in range(mi - 2, -1, -1):
            ubar[k + 1, i + 1] = xp[i] - cp[i] * ubar[k + 1, i + 2]

        for i in range(1, m):
            d2[k + 1, i - 1] = ubar[k + 1, i - 1] - 2.0 * ubar[k + 1, i] + ubar[k + 1, i + 1]
            qs[i - 1] += g_imp * (ubar[k + 1, i + 1] - ubar[k + 1, i - 1])
    return -1, violations


def advance_numba(ubar, tcoef, rfac, qfac_in, gq, init_mult, alpha, dtau, through):
    """Compiled advance; same contract as advance_numpy."""
    if not NUMBA_AVAILABLE:  # pragma: no cover
        raise RuntimeError("numba is not available")
    pivot_step, violations = _advance_nb(
        ubar, tcoef, rfac, qfac_in, gq, init_mult, alpha, dtau, through
    )
    if pivot_step >= 0:
        raise ZeroPivotError(f"zero pivot while advancing to level {pivot_step + 1}")
    return violations


ADVANCE_IMPLS = {"numpy": advance_numpy}
if NUMBA_AVAILABLE:
    ADVANCE_IMPLS["numba"] = advance_numba
