"""Rotation number estimates: Birkhoff averaging and Farey bracket refinement.

The Farey solver maintains a unimodular bracket p/q < rho < p'/q' and tests
mediants through the sign of the extrema of F_t^Q(x) - x - P over the circle.
Both signs present means a periodic orbit exists and the rotation number is
locked at the tested fraction.  Runs of one-sided steps are accelerated by a
doubling search over repeated mediants, so near-rational rotation numbers cost
O(log a) sign tests per partial quotient a instead of O(a).

Extrema are grid estimates (1024 samples) sharpened by halving a three point
bracket; they are reliable for the gentle derivative budgets of desk scale
runs, not certified global optima.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from .circle_map import FamilyPoint, displacement_total
from .errors import CapExceeded, PreconditionFailed, QCapExceeded

INNER_GRID = 1024
# bracket width 1/(grid 2^rounds) makes the quadratic extremum error
# ~ (width^2/2) |G''|, far below the 1e-10 plateau tolerances downstream
REFINE_ROUNDS = 20
Q_CAP_BINARY64 = 10**4
Q_CAP_EXTENDED = 10**5
BIRKHOFF_CAP = 10**7


@dataclass(frozen=True)
class RotationEstimate:
    """Enclosure [value - radius, value + radius] of a rotation number."""

    value: float
    radius: float
    n_used: int
    method: str
    locked: Fraction | None = None

    @property
    def lo(self) -> float:
        return self.value - self.radius

    @property
    def hi(self) -> float:
        return self.value + self.radius


def default_q_cap(fp: FamilyPoint) -> int:
    return Q_CAP_EXTENDED if fp.precision > 15 else Q_CAP_BINARY64


# ---------------------------------------------------------------------------
# displacement kernels


def displacement_after(fp: FamilyPoint, q: int, xs: np.ndarray) -> np.ndarray:
    """F_t^q(x) - x for an array of circle points, with reduced tracking."""
    return displacement_total(fp, q, xs)


def displacement_after_scalar(fp: FamilyPoint, q: int, x: float) -> float:
    if fp.is_exact_rotation:
        return q * fp.t
    return float(displacement_total(fp, q, np.array([x]))[0])


def displacement_after_mp(fp: FamilyPoint, q: int, x) -> mpmath.mpf:
    with mpmath.workdps(fp.precision):
        frac = mpmath.mpf(x)
        frac -= mpmath.floor(frac)
        total = mpmath.mpf(0)
        for _ in range(q):
            step = fp.lift.displacement_mp(frac) + fp.t
            total += step
            frac += step
            frac -= mpmath.floor(frac)
        return total


def _refine_extremum(eval_batch, a, c, b, va, vc, vb, minimize: bool, rounds: int):
    """Shrink the bracket (a, c, b) around a local extremum; returns (x, value)."""
    better = (lambda u, v: u < v) if minimize else (lambda u, v: u > v)
    for _ in range(rounds):
        m1 = 0.5 * (a + c)
        m2 = 0.5 * (c + b)
        v1, v2 = eval_batch(np.array([m1, m2]))
        pts = [(a, va), (m1, v1), (c, vc), (m2, v2), (b, vb)]
        best = 1
        for i in (2, 3):
            if better(pts[i][1], pts[best][1]):
                best = i
        a, va = pts[best - 1]
        c, vc = pts[best]
        b, vb = pts[best + 1]
    return c, vc


def discrepancy_extrema(fp: FamilyPoint, q: int, p: int,
                        grid: int = INNER_GRID, rounds: int = REFINE_ROUNDS):
    """Refined (min, max) of F_t^q(x) - x - p over the circle."""
    if fp.is_exact_rotation:
        v = q * fp.t - p
        return v, v
    xs = np.arange(grid) / grid
    disc = displacement_after(fp, q, xs) - p

    def eval_batch(pts):
        return displacement_after(fp, q, np.asarray(pts, dtype=float)) - p

    h = 1.0 / grid
    out = []
    for minimize in (True, False):
        i = int(disc.argmin() if minimize else disc.argmax())
        x_star, v_star = _refine_extremum(
            eval_batch,
            xs[i] - h, xs[i], xs[i] + h,
            float(disc[(i - 1) % grid]), float(disc[i]), float(disc[(i + 1) % grid]),
            minimize, rounds,
        )
        if fp.precision > 15:
            # confirm the decisive value at the declared precision
            v_star = float(displacement_after_mp(fp, q, x_star) - p)
        out.append(v_star)
    return out[0], out[1]


# ---------------------------------------------------------------------------
# estimators


def rotation_birkhoff(fp: FamilyPoint, x0: float = 0.0, n: int = 10**5,
                      cap: int = BIRKHOFF_CAP) -> RotationEstimate:
    """(F_t^n(x0) - x0)/n with the a priori radius 1/n."""
    if n < 1:
        raise PreconditionFailed("n must be >= 1")
    if n > cap:
        raise CapExceeded(f"n = {n} exceeds cap {cap}")
    if fp.precision > 15:
        disp = float(displacement_after_mp(fp, n, x0))
    else:
        disp = displacement_after_scalar(fp, n, x0)
    return RotationEstimate(disp / n, 1.0 / n, n, "birkhoff")


def _locked(fraction: Fraction, n_used: int) -> RotationEstimate:
    return RotationEstimate(float(fraction), 0.0, n_used, "farey", fraction)


def _enclosure(p0: int, q0: int, p1: int, q1: int, n_used: int) -> RotationEstimate:
    mid = Fraction(p0, q0) / 2 + Fraction(p1, q1) / 2
    return RotationEstimate(float(mid), float(Fraction(1, 2 * q0 * q1)), n_used, "farey")


def _max_jump(side, pa, qa, pb, qb, want, q_cap):
    """Largest k with the sign test at (pa + k pb)/(qa + k qb) still on `want`.

    k = 1 is known good on entry.  Returns (k, locked) where locked is the
    fraction at which a sign straddle was found, if any.
    """
    k_cap = (q_cap - qa) // qb
    k_good, k_bad = 1, None
    k = 2
    while k_bad is None and k_good < k_cap:
        k_try = min(k, k_cap)
        s = side(pa + k_try * pb, qa + k_try * qb)
        if s == 0:
            return k_try, Fraction(pa + k_try * pb, qa + k_try * qb)
        if s == want:
            k_good = k_try
            k = 2 * k_try
        else:
            k_bad = k_try
    while k_bad is not None and k_bad - k_good > 1:
        k_mid = (k_good + k_bad) // 2
        s = side(pa + k_mid * pb, qa + k_mid * qb)
        if s == 0:
            return k_mid, Fraction(pa + k_mid * pb, qa + k_mid * qb)
        if s == want:
            k_good = k_mid
        else:
            k_bad = k_mid
    return k_good, None


def _farey_engine(fp: FamilyPoint, q_cap: int, grid: int, rounds: int,
                  stop, track: list | None):
    """Bracket descent shared by rotation_farey and compare_rotation_to.

    `stop(p0, q0, p1, q1, n_used)` may return a final result at each round;
    None continues the descent.  Raises QCapExceeded carrying the last valid
    enclosure when the cap interrupts an unfinished bracket.
    """
    steps = [0]

    def side(p, q):
        steps[0] += q
        lo, hi = discrepancy_extrema(fp, q, p, grid, rounds)
        if lo > 0.0:
            return 1
        if hi < 0.0:
            return -1
        return 0

    # integer stage through the one step displacement range
    lo, hi = discrepancy_extrema(fp, 1, 0, grid, rounds)
    steps[0] += 1
    m = math.ceil(lo)
    if m <= hi:
        return _locked(Fraction(m), steps[0])
    p0, q0 = math.floor(lo), 1
    p1, q1 = p0 + 1, 1
    if track is not None:
        track.append((Fraction(p0, q0), Fraction(p1, q1)))

    while True:
        res = stop(p0, q0, p1, q1, steps[0])
        if res is not None:
            return res
        pm, qm = p0 + p1, q0 + q1
        if qm > q_cap:
            raise QCapExceeded(
                f"bracket unresolved at q cap {q_cap}",
                estimate=_enclosure(p0, q0, p1, q1, steps[0]),
            )
        s = side(pm, qm)
        if s == 0:
            return _locked(Fraction(pm, qm), steps[0])
        if s > 0:
            k, locked = _max_jump(side, p0, q0, p1, q1, 1, q_cap)
            if locked is not None:
                return _locked(locked, steps[0])
            p0, q0 = p0 + k * p1, q0 + k * q1
        else:
            k, locked = _max_jump(side, p1, q1, p0, q0, -1, q_cap)
            if locked is not None:
                return _locked(locked, steps[0])
            p1, q1 = p1 + k * p0, q1 + k * q0
        if track is not None:
            track.append((Fraction(p0, q0), Fraction(p1, q1)))


def rotation_farey(fp: FamilyPoint, tol: float = 1e-9, q_cap: int | None = None,
                   grid: int = INNER_GRID, rounds: int = REFINE_ROUNDS,
                   track: list | None = None) -> RotationEstimate:
    """Farey bracket enclosure of the rotation number of F_t.

    Returns a locked rational (radius 0) when a mediant sign test straddles
    zero, otherwise narrows the bracket until its width is at most tol.
    Raises QCapExceeded, carrying the still valid enclosure, when the
    denominator cap is hit first.
    """
    if tol <= 0.0:
        raise PreconditionFailed("tol must be positive")
    if q_cap is None:
        q_cap = default_q_cap(fp)
    if fp.is_exact_rotation:
        exact = Fraction(fp.t)
        locked = exact if exact.denominator <= q_cap else None
        return RotationEstimate(value=fp.t, radius=0.0, n_used=0,
                                method="farey", locked=locked)

    def stop(p0, q0, p1, q1, n_used):
        if 1.0 <= tol * q0 * q1:
            return _enclosure(p0, q0, p1, q1, n_used)
        return None

    return _farey_engine(fp, q_cap, grid, rounds, stop, track)


def compare_rotation_to(fp: FamilyPoint, target, q_cap: int | None = None,
                        grid: int = INNER_GRID, rounds: int = REFINE_ROUNDS):
    """Placement of rho(F_t) against a target value.

    Returns (side, estimate): side is +1 when rho > target, -1 when
    rho < target, and 0 when the descent cannot separate them, either by an
    exact rational lock equal to the target or because the cap was reached
    with the target still inside the bracket.  estimate is None for decided
    comparisons reached without a lock.
    """
    if q_cap is None:
        q_cap = default_q_cap(fp)
    goal = Fraction(target)

    def stop(p0, q0, p1, q1, n_used):
        if Fraction(p1, q1) <= goal:
            return (-1, None)
        if Fraction(p0, q0) >= goal:
            return (1, None)
        return None

    try:
        res = _farey_engine(fp, q_cap, grid, rounds, stop, None)
    except QCapExceeded as exc:
        return 0, exc.estimate
    if isinstance(res, tuple):
        return res
    # locked rational: compare exactly
    if res.locked < goal:
        return -1, res
    if res.locked > goal:
        return 1, res
    return 0, res
