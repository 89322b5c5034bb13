"""Birkhoff averages, orbit-built conjugacies, and parameter-derivative checks.

With an irrational rotation number alpha the orbit of any point is ordered on
the circle exactly like the orbit of a rigid rotation by alpha, so the map
frac(j alpha) -> frac(F^j x) extends to a circle homeomorphism h once the
observed orbit order matches.  The piecewise-linear interpolant through those
knots is a computable stand-in for h and is what the residual and derivative
routines below consume.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .circle_map import FamilyPoint, iterate
from .errors import OrderMismatch, PreconditionFailed, QCapExceeded
from .rotation import rotation_farey

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class InvariantAverage:
    """Time average of an observable along an orbit.

    drift is the change from the half-length average and gives a cheap
    consistency scale for how settled the value is.
    """

    value: float
    n: int
    x0: float
    drift: float


def birkhoff_average(fp: FamilyPoint, observable, x0: float = 0.0,
                     n: int = 10**5) -> InvariantAverage:
    """Average observable(frac(F^j x0)) over j = 0..n-1."""
    if n < 2:
        raise PreconditionFailed("n must be at least 2")
    fracs = np.asarray(iterate(fp, x0, n - 1).points, dtype=float)
    fracs -= np.floor(fracs)
    vals = np.asarray(observable(fracs), dtype=float)
    value = float(np.mean(vals))
    half = float(np.mean(vals[: n // 2]))
    return InvariantAverage(value=value, n=n, x0=x0, drift=value - half)


@dataclass(frozen=True)
class ConjugacyEstimate:
    """Piecewise-linear conjugacy knots: h(theta[k]) = y_lift[k] mod 1.

    theta is sorted in [0, 1); y_lift is the orbit value lifted so it
    increases with theta (the circle wrap is the +1 jump at the end).
    """

    alpha: float
    x0: float
    n: int
    theta: np.ndarray = field(repr=False)
    y_lift: np.ndarray = field(repr=False)
    fp: FamilyPoint = field(repr=False)

    def _ext(self):
        th = np.concatenate([self.theta, [self.theta[0] + 1.0]])
        yl = np.concatenate([self.y_lift, [self.y_lift[0] + 1.0]])
        return th, yl

    def h(self, u):
        """Evaluate the interpolated conjugacy at u (mod 1), returning fracs."""
        th, yl = self._ext()
        uu = np.mod(np.asarray(u, dtype=float) - self.theta[0], 1.0) + self.theta[0]
        out = np.interp(uu, th, yl)
        return np.mod(out, 1.0)

    def h_inv(self, y):
        th, yl = self._ext()
        base = self.y_lift[0]
        yy = np.mod(np.asarray(y, dtype=float) - base, 1.0) + base
        out = np.interp(yy, yl, th)
        return np.mod(out, 1.0)

    def residual(self, points=None) -> float:
        """Worst circle distance between h(u + alpha) and F(h(u)).

        Defaults to the knot midpoints, where the interpolation error of a
        piecewise-linear h is largest.
        """
        if points is None:
            mids = 0.5 * (self.theta[:-1] + self.theta[1:])
            wrap = math.modf(0.5 * (self.theta[-1] + self.theta[0] + 1.0))[0]
            points = np.concatenate([mids, [wrap]])
        points = np.asarray(points, dtype=float)
        lhs = self.h(points + self.alpha)
        hu = self.h(points)
        img = hu + self.fp.displacement_vec(hu)
        rhs = np.mod(img, 1.0)
        d = np.abs(lhs - rhs)
        d = np.minimum(d, 1.0 - d)
        return float(np.max(d))

    def rho_prime(self) -> float:
        """Sum of (d theta)^2 / (d y) over the knot cells.

        Both increment families sum to 1 around the circle, so the value is
        at least 1 by Cauchy-Schwarz, with equality exactly when the
        conjugacy is affine, i.e. the map is a rigid rotation.
        """
        th, yl = self._ext()
        dth = np.diff(th)
        dy = np.diff(yl)
        return float(np.sum(dth * dth / dy))


def conjugacy_from_orbit(fp: FamilyPoint, x0: float = 0.0, n: int = 4096,
                         alpha=None, alpha_radius: float = 0.0,
                         q_cap: int | None = None,
                         rho_tol: float = 1e-11) -> ConjugacyEstimate:
    """Build the conjugacy interpolant from an orbit of length n.

    Raises OrderMismatch when the orbit is not ordered like the rotation by
    alpha, which happens when alpha is off by more than the smallest knot gap
    or when the map is actually locked.
    """
    if n < 8:
        raise PreconditionFailed("n must be at least 8")
    if alpha is None:
        try:
            est = rotation_farey(fp, rho_tol, q_cap)
        except QCapExceeded as exc:
            est = exc.estimate
        if est.locked is not None:
            raise PreconditionFailed(
                f"rotation number locks at {est.locked}; the orbit is eventually periodic"
            )
        alpha = est.value
    alpha = float(alpha)

    y = np.asarray(iterate(fp, x0, n - 1).points, dtype=float)
    y -= np.floor(y)
    theta = np.mod(np.arange(n) * alpha, 1.0)
    perm = np.argsort(theta, kind="stable")
    th_s = theta[perm]
    y_s = y[perm]

    desc = np.flatnonzero(np.diff(y_s) <= 0.0)
    if len(desc) > 1:
        raise OrderMismatch(
            f"orbit order disagrees with rotation by {alpha} at {len(desc)} places"
        )
    y_lift = y_s.copy()
    if len(desc) == 1:
        y_lift[desc[0] + 1:] += 1.0
    if not np.all(np.diff(y_lift) > 0.0):
        raise OrderMismatch("orbit points collide; rotation order is degenerate")

    return ConjugacyEstimate(alpha=alpha, x0=x0, n=n, theta=th_s,
                             y_lift=y_lift, fp=fp)


def derivative_via_conjugacy(conj: ConjugacyEstimate) -> float:
    """Parameter derivative of the rotation number read off the conjugacy knots."""
    return conj.rho_prime()


class RotationPath:
    """Path s -> R_{offset + speed s} compose f for a fixed lift."""

    def __init__(self, lift, offset: float = 0.0, speed: float = 1.0):
        self.lift = lift
        self.offset = offset
        self.speed = speed

    def family_point(self, s: float) -> FamilyPoint:
        return FamilyPoint(self.lift, self.offset + self.speed * s)

    def rho_enclosure(self, s: float, tol: float, q_cap=None):
        try:
            est = rotation_farey(self.family_point(s), tol, q_cap)
        except QCapExceeded as exc:
            est = exc.estimate
        return est.value, est.radius

    def dt(self, s: float, xs: np.ndarray) -> np.ndarray:
        return np.full_like(np.asarray(xs, dtype=float), self.speed)


class ReparamPath:
    """Path s -> R_{w(s)} compose f with a smooth reparametrization w."""

    def __init__(self, lift, w, dw):
        self.lift = lift
        self.w = w
        self.dw = dw

    def family_point(self, s: float) -> FamilyPoint:
        return FamilyPoint(self.lift, self.w(s))

    def rho_enclosure(self, s: float, tol: float, q_cap=None):
        try:
            est = rotation_farey(self.family_point(s), tol, q_cap)
        except QCapExceeded as exc:
            est = exc.estimate
        return est.value, est.radius

    def dt(self, s: float, xs: np.ndarray) -> np.ndarray:
        return np.full_like(np.asarray(xs, dtype=float), self.dw(s))


class ConjugatedRotationPath:
    """Path s -> h compose R_s compose h^{-1} with h(x) = x + eps sin(2 pi x).

    The rotation number along this path is s exactly, so the enclosure is
    returned with zero radius; dt is h'(h^{-1}(x) + s).
    """

    def __init__(self, eps: float):
        if not abs(eps) * TWO_PI < 1.0:
            raise PreconditionFailed("need |2 pi eps| < 1 for h to be a diffeomorphism")
        self.eps = eps

    def family_point(self, s: float):
        return None

    def rho_enclosure(self, s: float, tol: float, q_cap=None):
        return s, 0.0

    def _h_inv(self, x: np.ndarray) -> np.ndarray:
        u = np.array(x, dtype=float)
        for _ in range(80):
            r = u + self.eps * np.sin(TWO_PI * u) - x
            if np.max(np.abs(r)) < 1e-15:
                break
            u -= r / (1.0 + TWO_PI * self.eps * np.cos(TWO_PI * u))
        return u

    def dt(self, s: float, xs: np.ndarray) -> np.ndarray:
        u = self._h_inv(np.asarray(xs, dtype=float))
        return 1.0 + TWO_PI * self.eps * np.cos(TWO_PI * (u + s))


@dataclass(frozen=True)
class BrunovskyRecord:
    """Two-sided comparison of d rho / ds with the space mean of the flow speed."""

    s0: float
    ds: float
    lhs: float
    lhs_uncertainty: float
    rhs: float

    @property
    def gap(self) -> float:
        return self.lhs - self.rhs


def brunovsky_check(path, s0: float = 0.0, ds: float = 1.0 / 1024.0,
                    rho_tol: float = 1e-12, grid: int = 4096,
                    q_cap: int | None = None) -> BrunovskyRecord:
    """Compare the finite-difference slope of rho along a path with the
    uniform space average of the instantaneous parameter speed.

    The two agree exactly when the map at s0 is conjugate to a rotation in a
    way that carries Lebesgue measure; in general the right-hand side uses
    the wrong measure and the difference is the interesting output.
    """
    if ds <= 0.0:
        raise PreconditionFailed("ds must be positive")
    vp, rp = path.rho_enclosure(s0 + ds, rho_tol, q_cap)
    vm, rm = path.rho_enclosure(s0 - ds, rho_tol, q_cap)
    lhs = (vp - vm) / (2.0 * ds)
    lhs_unc = (rp + rm) / (2.0 * ds)
    xs = (np.arange(grid) + 0.5) / grid
    rhs = float(np.mean(path.dt(s0, xs)))
    return BrunovskyRecord(s0=s0, ds=ds, lhs=lhs, lhs_uncertainty=lhs_unc, rhs=rhs)
