# Compiled coordinate-descent sweeps for the (elastic-net) lasso.
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs

cnp.import_array()


cdef inline double _soft(double z, double t) noexcept nogil:
    if z > t:
        return z - t
    if z < -t:
        return z + t
    return 0.0


def cd_sweeps(double[::1, :] X, double[::1] beta, double[::1] r,
              double[::1] col_sq, double lam1, double lam2,
              Py_ssize_t n_sweeps, long[::1] idx):
    """Run cyclic sweeps over the coordinates in idx, updating beta and the
    residual r = y - X beta in place. Returns the largest scaled coordinate
    change seen in the final sweep."""
    cdef Py_ssize_t n = X.shape[0]
    cdef Py_ssize_t m = idx.shape[0]
    cdef Py_ssize_t sweep, k, i, j
    cdef double z, new, delta, dmax = 0.0, denom, scaled
    with nogil:
        for sweep in range(n_sweeps):
            dmax = 0.0
            for k in range(m):
                j = idx[k]
                if col_sq[j] == 0.0:
                    continue
                z = 0.0
                for i in range(n):
                    z = z + X[i, j] * r[i]
                z = z + col_sq[j] * beta[j]
                denom = col_sq[j] + lam2
                new = _soft(z, lam1) / denom
                delta = new - beta[j]
                if delta != 0.0:
                    for i in range(n):
                        r[i] = r[i] - X[i, j] * delta
                    beta[j] = new
                    scaled = fabs(delta) * denom
                    if scaled > dmax:
                        dmax = scaled
    return dmax
