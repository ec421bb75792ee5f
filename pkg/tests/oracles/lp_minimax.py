"""Exact discrete minimax oracle via linear programming.

Independent cross-check for the Lawson solver: minimize t subject to
|F_i - p(z_i)| <= t with the modulus linearized over n_dirs half-planes
(a regular polygon circumscribing the disk of radius t).  The optimum of
the linearized problem lower-bounds the true discrete minimax value and
is within a factor cos(pi/n_dirs) of it, i.e. well under half a percent
at 32 directions.  Only meant for small degrees on modest grids.
"""

import numpy as np
from scipy.optimize import linprog


def lp_minimax(zs, F, n, center, scale, n_dirs=32):
    """Discrete minimax value for degree-n fits on the given grid.

    The polynomial space is spanned by ((z - center)/scale)**k; the value
    does not depend on that choice, only the conditioning does.
    """
    zs = np.asarray(zs, dtype=complex)
    F = np.asarray(F, dtype=complex)
    t = (zs - center) / scale
    A = np.vander(t, n + 1, increasing=True)

    m, k = A.shape
    blocks = []
    rhs = []
    for j in range(n_dirs):
        e = np.exp(-2j * np.pi * j / n_dirs)
        eA = e * A[:, :, None][:, :, 0]  # (m, k)
        eA = e * A
        eF = e * F
        # Re[e(F - A c)] <= t  becomes  -Re(eA) c_re + Im(eA) c_im - t <= -Re(eF)
        blocks.append(np.hstack([-eA.real, eA.imag, -np.ones((m, 1))]))
        rhs.append(-eF.real)
    A_ub = np.vstack(blocks)
    b_ub = np.concatenate(rhs)
    cost = np.zeros(2 * k + 1)
    cost[-1] = 1.0
    bounds = [(None, None)] * (2 * k) + [(0.0, None)]
    res = linprog(cost, A_ub=A_ub, b_ub=b_ub, bounds=bounds, method="highs")
    if not res.success:
        raise RuntimeError(f"LP oracle failed: {res.message}")
    return float(res.x[-1])
