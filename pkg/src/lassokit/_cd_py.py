"""Pure-Python coordinate-descent sweeps, used when the compiled kernel is absent."""
import numpy as np


def cd_sweeps(X, beta, r, col_sq, lam1, lam2, n_sweeps, idx):
    """Same contract as the compiled kernel: in-place update of beta and
    r = y - X beta over the coordinates in idx."""
    dmax = 0.0
    for _ in range(n_sweeps):
        dmax = 0.0
        for j in idx:
            cj = col_sq[j]
            if cj == 0.0:
                continue
            xj = X[:, j]
            z = float(xj @ r) + cj * beta[j]
            denom = cj + lam2
            new = np.sign(z) * max(abs(z) - lam1, 0.0) / denom
            delta = new - beta[j]
            if delta != 0.0:
                r -= delta * xj
                beta[j] = new
                dmax = max(dmax, abs(delta) * denom)
    return dmax
