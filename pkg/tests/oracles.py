"""Independent brute-force oracles used to freeze expected values.

These deliberately do not reuse the library's quadrature plans: the double
integral is evaluated on a dense uniform panel grid (a multiple of the mesh
resolution) with its own Gauss rules and grading, so the library and the
oracle share only the mathematical definitions.
"""

import numpy as np
from mpmath import mp


def kernel_constant_oracle(n, p, s, dps=50):
    """High-precision evaluation of s*4^s*Gamma((ps+p+n-2)/2)/(pi^(n/2)*Gamma(1-s))."""
    mp.dps = dps
    s_ = mp.mpf(s)
    p_ = mp.mpf(p)
    val = s_ * mp.power(4, s_) * mp.gamma((p_ * s_ + p_ + n - 2) / 2) / (mp.pi ** (mp.mpf(n) / 2) * mp.gamma(1 - s_))
    return float(val)


def gagliardo_seminorm_oracle(space, v, s, p, refine=4, gauss=12, levels=12):
    """Dense double quadrature of the Gagliardo seminorm at `refine`x resolution.

    Panels are uniform with width h/refine (aligned with the mesh so the
    interpolant is linear per panel); identical panels use the closed-form
    power integral, touching panels a geometric grading with `levels` levels,
    everything else tensor Gauss.  Returns the seminorm (not its p-th power).
    """
    a, b = space.domain.a, space.domain.b
    m, h = space.m, space.h
    vbar = np.zeros(m + 2)
    vbar[1:-1] = np.asarray(v, dtype=float)
    ps = p * s
    expo = 1.0 + ps
    n_panel = (m + 1) * refine
    hp = h / refine
    edges = a + hp * np.arange(n_panel + 1)

    def veval(x):
        t = np.clip((x - a) / h, 0.0, m + 1.0)
        e = np.minimum(np.floor(t).astype(int), m)
        lc = t - e
        return vbar[e] * (1.0 - lc) + vbar[e + 1] * lc

    xi, wgt = np.polynomial.legendre.leggauss(gauss)
    loc = 0.5 * (xi + 1.0)
    gw = 0.5 * wgt

    total = 0.0
    # identical panels: closed form, slope constant per panel
    alpha = p - 1.0 - ps
    el_slopes = np.diff(vbar) / h
    panel_slopes = np.repeat(el_slopes, refine)
    jsame = 2.0 * hp ** (alpha + 2.0) / ((alpha + 1.0) * (alpha + 2.0))
    total += jsame * np.sum(np.abs(panel_slopes) ** p)

    # separated panels
    ip, iq = np.triu_indices(n_panel, k=2)
    if ip.size:
        X = edges[ip][:, None] + hp * loc[None, :]
        Y = edges[iq][:, None] + hp * loc[None, :]
        VX = veval(X)
        VY = veval(Y)
        K = np.abs(X[:, :, None] - Y[:, None, :]) ** (-expo)
        F = np.abs(VX[:, :, None] - VY[:, None, :]) ** p
        W = (hp * gw)[None, :, None] * (hp * gw)[None, None, :]
        total += 2.0 * float(np.sum(W * K * F))

    # touching panels: grade both sides toward the shared point
    cuts = hp * 2.0 ** (-np.arange(levels, dtype=float))
    starts = np.concatenate(([0.0], cuts[::-1][:-1]))
    widths = np.diff(np.concatenate(([0.0], cuts[::-1])))
    off = starts[:, None] + widths[:, None] * loc[None, :]
    cw = widths[:, None] * gw[None, :]
    for i in range(n_panel - 1):
        xs = edges[i + 1] - off
        ys = edges[i + 1] + off
        VX = veval(xs).reshape(-1)
        VY = veval(ys).reshape(-1)
        K = np.abs(xs.reshape(-1)[:, None] - ys.reshape(-1)[None, :]) ** (-expo)
        F = np.abs(VX[:, None] - VY[None, :]) ** p
        W = cw.reshape(-1)[:, None] * cw.reshape(-1)[None, :]
        total += 2.0 * float(np.sum(W * K * F))

    # exterior tail over the truncated box, graded at the boundary panels
    wt_box = space.domain.exterior_truncation

    def tail_kernel(x):
        return (
            (x - a) ** (-ps) - (x - a + wt_box) ** (-ps)
            + (b - x) ** (-ps) - (b - x + wt_box) ** (-ps)
        ) / ps

    for i in range(1, n_panel - 1):
        xs = edges[i] + hp * loc
        total += 2.0 * float(np.sum(hp * gw * tail_kernel(xs) * np.abs(veval(xs)) ** p))
    for i, toward_left in ((0, True), (n_panel - 1, False)):
        if toward_left:
            xs = edges[i] + off
        else:
            xs = edges[i + 1] - off
        vals = np.abs(veval(xs.reshape(-1))) ** p
        total += 2.0 * float(np.sum(cw.reshape(-1) * tail_kernel(xs.reshape(-1)) * vals))

    return total ** (1.0 / p)
