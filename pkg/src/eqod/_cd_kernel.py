"""Hot loop of the coordinate-descent LASSO path.

The kernel is compiled with numba when available; the numpy fallback
runs the identical arithmetic in the identical order, so results do not
depend on which path executed.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    _HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        if args and callable(args[0]):
            return args[0]
        return wrap


@njit(cache=True)
def cd_sweeps(gram, corr, diag, zero_col, half_lam, xi, q, tol, max_sweeps):
    """Cyclic coordinate-descent sweeps for every lambda column of xi.

    Updates xi and q (= gram @ xi) in place; a column is frozen once a
    full sweep moves none of its coordinates by tol or more. Returns
    True when every column froze before the sweep cap.
    """
    p, n_lam = xi.shape
    settled = np.zeros(n_lam, np.bool_)
    for _ in range(max_sweeps):
        step = np.zeros(n_lam)
        for j in range(p):
            if zero_col[j]:
                continue
            for l in range(n_lam):
                if settled[l]:
                    continue
                rho = corr[j] - q[j, l] + diag[j] * xi[j, l]
                mag = abs(rho) - half_lam[l]
                if mag <= 0.0:
                    new = 0.0
                elif rho > 0.0:
                    new = mag / diag[j]
                else:
                    new = -mag / diag[j]
                delta = new - xi[j, l]
                if delta != 0.0:
                    for k in range(p):
                        q[k, l] += gram[k, j] * delta
                    xi[j, l] = new
                    if abs(delta) > step[l]:
                        step[l] = abs(delta)
        done = True
        for l in range(n_lam):
            if not settled[l]:
                if step[l] < tol:
                    settled[l] = True
                else:
                    done = False
        if done:
            return True
    return False
