"""Reference values for the Green's function of two unit disks at 0 and 18.

Run once; the printed values are frozen into the test suite.

Route A (exact, bipolar coordinates): the Moebius map
T(z) = (z - p-)/(z - p+), with p± = 9 ± 4*sqrt(5) the limit points of the
coaxial pencil through the two circles, sends the exterior of both disks to
a concentric annulus rho < |w| < 1 (after scaling by the image radius of
the second circle).  Green's functions are conformally invariant, so
g(z, infinity) equals the annulus Green's function evaluated at
(T(z), T(infinity)).  On the annulus the function separates: a log pole
plus a Fourier series in the angle whose coefficients solve 2x2 systems per
mode, with terms decaying like |w0|^n — machine precision by n ≈ 25.

Route B (corroboration, finite differences): a five-point Laplace solve on
a large square box with g = 0 on the disk boundaries (Shortley-Weller
cut-cell stencils) and g = ln|z| + robin_A on the box edge, using the Robin
constant from route A.  Confirms route A to the discretization error.

The two routes share no code or method with the package's charge-simulation
solver, so they are independent oracles for it.
"""

from __future__ import annotations

import math

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

D_SEP = 18.0  # center separation of the two unit disks


def annulus_green_series(n_modes: int = 60):
    """Exact g via the coaxial map; returns (g(9), robin)."""
    s5 = math.sqrt(5.0)
    p_minus, p_plus = 9.0 - 4.0 * s5, 9.0 + 4.0 * s5
    # image radii of the two unit circles under T, before normalization
    r2 = 9.0 + 4.0 * s5            # |T| on the circle around 18
    w0 = 1.0 / r2                  # = 9 - 4*sqrt(5); T(infinity)=1 scaled by 1/r2
    rho = (9.0 - 4.0 * s5) ** 2    # inner radius of the normalized annulus

    # harmonic correction h with h = ln|w - w0| on both circles;
    # h = a0 + b0 ln r + sum_n (a_n r^n + b_n r^-n) cos(n theta)
    b0 = math.log(w0) / math.log(rho)
    a = np.zeros(n_modes + 1)
    b = np.zeros(n_modes + 1)
    for n in range(1, n_modes + 1):
        c_out = -(w0 ** n) / n            # Fourier coeff of ln|e^{i t} - w0|
        c_in = -((rho / w0) ** n) / n     # ... of ln|rho e^{i t} - w0|
        m = np.array([[1.0, 1.0], [rho ** n, rho ** (-n)]])
        a[n], b[n] = np.linalg.solve(m, [c_out, c_in])

    def h(r: float, theta: float) -> float:
        ns = np.arange(1, n_modes + 1)
        return b0 * math.log(r) + float(
            np.sum((a[1:] * r ** ns + b[1:] * r ** (-ns)) * np.cos(ns * theta)))

    # g(9): T(9) = -1, so w = -w0 (theta = pi, radius w0)
    g_mid = -math.log(2.0 * w0) + h(w0, math.pi)
    # robin: g(z) - ln|z| -> h(w0, 0) - ln(8*sqrt(5)*w0) as z -> infinity
    robin = h(w0, 0.0) - math.log((p_plus - p_minus) * w0)
    return g_mid, robin


def fd_green(half_width: float, h: float, robin: float) -> float:
    """Five-point FD solve; returns g at the midpoint z = 9."""
    cx = 9.0
    n = int(round(2 * half_width / h)) + 1
    xs = cx - half_width + h * np.arange(n)
    ys = -half_width + h * np.arange(n)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    Z = X + 1j * Y
    d0 = np.abs(Z) - 1.0            # signed distance to each disk
    d1 = np.abs(Z - D_SEP) - 1.0
    inside = (d0 <= 0) | (d1 <= 0)
    edge = (X == xs[0]) | (X == xs[-1]) | (Y == ys[0]) | (Y == ys[-1])
    active = ~inside & ~edge
    idx = -np.ones((n, n), dtype=int)
    idx[active] = np.arange(int(active.sum()))

    bc = np.where(edge, np.log(np.abs(Z) + 1e-300) + robin, 0.0)
    rows, cols, vals = [], [], []
    rhs = np.zeros(int(active.sum()))

    def leg_length(i, j, di, dj):
        """Distance to the neighbour, shortened where a disk cuts the leg."""
        z_here = Z[i, j]
        z_next = Z[i + di, j + dj]
        if not inside[i + di, j + dj]:
            return h, (i + di, j + dj), False
        # the leg crosses a circle: find the cut by bisection on |z|-1
        for c in (0.0, D_SEP):
            f0 = abs(z_here - c) - 1.0
            f1 = abs(z_next - c) - 1.0
            if f0 > 0 >= f1:
                lo, hi = 0.0, 1.0
                for _ in range(60):
                    mid = 0.5 * (lo + hi)
                    if abs(z_here + mid * (z_next - z_here) - c) - 1.0 > 0:
                        lo = mid
                    else:
                        hi = mid
                return 0.5 * (lo + hi) * h, None, True
        return h, (i + di, j + dj), False  # touching corner case; keep full leg

    ii, jj = np.nonzero(active)
    for i, j in zip(ii, jj):
        k = idx[i, j]
        diag = 0.0
        for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            # Shortley-Weller: 2/(s*(s+t)) weights for unequal leg lengths
            s_len, nb, cut = leg_length(i, j, di, dj)
            t_len, _, _ = leg_length(i, j, -di, -dj)
            w = 2.0 / (s_len * (s_len + t_len))
            diag -= w
            if cut:
                continue  # boundary value 0 on the disk: no contribution
            ni, nj = nb
            if idx[ni, nj] >= 0:
                rows.append(k); cols.append(idx[ni, nj]); vals.append(w)
            else:
                rhs[k] -= w * bc[ni, nj]
        rows.append(k); cols.append(k); vals.append(diag)

    A = sp.csr_matrix((vals, (rows, cols)),
                      shape=(int(active.sum()), int(active.sum())))
    u = spla.spsolve(A, rhs)
    i9 = int(np.argmin(np.abs(xs - 9.0)))
    j0 = int(np.argmin(np.abs(ys - 0.0)))
    return float(u[idx[i9, j0]])


def main() -> None:
    g9, robin = annulus_green_series()
    print(f"series  g(9)      = {g9:.15f}")
    print(f"series  robin     = {robin:.15f}")
    print(f"series  capacity  = {math.exp(-robin):.15f}")
    for depth in (25, 50):
        for h in (0.25, 0.125):
            g_fd = fd_green(depth, h, robin)
            print(f"fd W={depth:5.1f} h={h:6.3f}: g(9) = {g_fd:.8f} "
                  f"(delta {g_fd - g9:+.2e})")


if __name__ == "__main__":
    main()
