"""Fixed-order Gauss-Legendre quadrature over the unit band rectangles.

The shell constraint pins the last copy's coordinates to a union of four unit
rectangles; each is integrated with 16 nodes per axis.  Rectangles that meet
the cutoff disk are handled in polar coordinates with breakpoints at every
corner and circle crossing, so the integrand stays smooth on each panel and
the quadrature keeps close to full precision there too.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np


@lru_cache(maxsize=None)
def _gl(n: int):
    nodes, weights = np.polynomial.legendre.leggauss(n)
    return nodes, weights


def gl_unit(n: int = 16):
    """Nodes and weights on [0, 1]."""
    nodes, weights = _gl(n)
    return (nodes + 1.0) / 2.0, weights / 2.0


def gl_interval(a: float, b: float, n: int = 16):
    nodes, weights = _gl(n)
    half = 0.5 * (b - a)
    return a + half * (nodes + 1.0), half * weights


def rect_min_max_dist(ax: float, ay: float, side: float = 1.0):
    """Distance range from the origin to the rectangle [ax, ax+side] x [ay, ay+side]."""
    dx = max(ax, -(ax + side), 0.0)
    dy = max(ay, -(ay + side), 0.0)
    fx = max(abs(ax), abs(ax + side))
    fy = max(abs(ay), abs(ay + side))
    return math.hypot(dx, dy), math.hypot(fx, fy)


def rect_integral(weight2d, ax: float, ay: float, n: int = 16) -> float:
    """Tensor Gauss-Legendre over the unit rectangle at (ax, ay), split at the
    coordinate axes where |x|, |y| kink the integrand."""
    xcuts = [ax, ax + 1.0] if not ax < 0.0 < ax + 1.0 else [ax, 0.0, ax + 1.0]
    ycuts = [ay, ay + 1.0] if not ay < 0.0 < ay + 1.0 else [ay, 0.0, ay + 1.0]
    total = 0.0
    for x0, x1 in zip(xcuts, xcuts[1:]):
        xs, wx = gl_interval(x0, x1, n)
        for y0, y1 in zip(ycuts, ycuts[1:]):
            ys, wy = gl_interval(y0, y1, n)
            vals = weight2d(xs[:, None], ys[None, :])
            total += float(wx @ vals @ wy)
    return total


def _ray_rect_range(c: float, s: float, x0: float, x1: float, y0: float, y1: float):
    """Parameter range t >= 0 where (t*c, t*s) lies inside the rectangle."""
    lo, hi = 0.0, math.inf
    for direction, w0, w1 in ((c, x0, x1), (s, y0, y1)):
        if abs(direction) < 1e-300:
            if not w0 <= 0.0 <= w1:
                return None
            continue
        t0, t1 = w0 / direction, w1 / direction
        if t0 > t1:
            t0, t1 = t1, t0
        lo, hi = max(lo, t0), min(hi, t1)
    if hi <= lo:
        return None
    return lo, hi


def _circle_edge_angles(cut: float, x0: float, x1: float, y0: float, y1: float):
    """Angles where the cutoff circle meets the rectangle boundary."""
    angles = []
    for x in (x0, x1):
        if abs(x) < cut:
            yy = math.sqrt(cut * cut - x * x)
            for y in (yy, -yy):
                if y0 <= y <= y1:
                    angles.append(math.atan2(y, x))
    for y in (y0, y1):
        if abs(y) < cut:
            xx = math.sqrt(cut * cut - y * y)
            for x in (xx, -xx):
                if x0 <= x <= x1:
                    angles.append(math.atan2(y, x))
    return angles


def clipped_rect_integral(
    weight2d, ax: float, ay: float, cut: float, n_theta: int = 16, n_rho: int = 16
) -> float:
    """Integral of weight2d over ([ax, ax+1] x [ay, ay+1]) \\ {||x|| <= cut}.

    Polar integration with panel breakpoints at corner angles and circle-edge
    crossings; weight2d is only evaluated at radii > cut.
    """
    x0, x1, y0, y1 = ax, ax + 1.0, ay, ay + 1.0
    dmin, dmax = rect_min_max_dist(ax, ay)
    if dmax <= cut:
        return 0.0
    if dmin >= cut:
        return rect_integral(weight2d, ax, ay, n=n_rho)

    corners = ((x0, y0), (x1, y0), (x0, y1), (x1, y1))
    inside = x0 < 0.0 < x1 and y0 < 0.0 < y1
    if inside:
        theta_lo, theta_hi = -math.pi, math.pi
        angles = [math.atan2(cy, cx) for cx, cy in corners]
    else:
        cx0, cy0 = (x0 + x1) / 2.0, (y0 + y1) / 2.0
        center = math.atan2(cy0, cx0)

        def _unwrap(t):
            while t <= center - math.pi:
                t += 2.0 * math.pi
            while t > center + math.pi:
                t -= 2.0 * math.pi
            return t

        angles = [_unwrap(math.atan2(cy, cx)) for cx, cy in corners]
        theta_lo, theta_hi = min(angles), max(angles)

    # Panel boundaries: corners, circle crossings, and the axis angles where
    # |x| or |y| kink the integrand.
    axis_angles = [0.0, math.pi / 2.0, math.pi, -math.pi / 2.0, -math.pi]
    crossings = _circle_edge_angles(cut, x0, x1, y0, y1)
    if inside:
        breaks = sorted(set(angles + crossings + axis_angles[:4]))
        panels = list(zip(breaks, breaks[1:] + [breaks[0] + 2.0 * math.pi]))
    else:
        pts = {theta_lo, theta_hi}
        for t in angles + crossings + axis_angles:
            tt = _unwrap(t)
            if theta_lo < tt < theta_hi:
                pts.add(tt)
        breaks = sorted(pts)
        panels = list(zip(breaks[:-1], breaks[1:]))

    total = 0.0
    for t0, t1 in panels:
        if t1 - t0 < 1e-14:
            continue
        tn, tw = gl_interval(t0, t1, n_theta)
        for theta, wt in zip(tn, tw):
            c, s = math.cos(theta), math.sin(theta)
            rng = _ray_rect_range(c, s, x0, x1, y0, y1)
            if rng is None:
                continue
            rho_lo = max(rng[0], cut)
            rho_hi = rng[1]
            if rho_hi <= rho_lo + 1e-14:
                continue
            rn, rw = gl_interval(rho_lo, rho_hi, n_rho)
            vals = weight2d(rn * c, rn * s)
            total += wt * float(np.sum(rw * rn * vals))
    return total


def band_rectangles(q: float, r: float, s1: float = 0.0, s2: float = 0.0):
    """Lower-left corners of the four unit rectangles where the last copy can
    sit: |s1 + x| in [q-1, q) and |s2 + y| in [r-1, r)."""
    xs = (q - 1.0 - s1, -q - s1)
    ys = (r - 1.0 - s2, -r - s2)
    return [(ax, ay) for ax in xs for ay in ys]


def band_integral(weight2d, q: float, r: float, cut: float, s1: float = 0.0, s2: float = 0.0) -> float:
    """Integral of weight2d over the admissible band of the last copy."""
    return sum(
        clipped_rect_integral(weight2d, ax, ay, cut)
        for ax, ay in band_rectangles(q, r, s1, s2)
    )
