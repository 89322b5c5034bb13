"""Lifts of circle diffeomorphisms and their one parameter rotation families.

A map is described by its lift

    F(x) = x + sum_k (c_k sin(2 pi k x) + d_k cos(2 pi k x))

which has degree one by construction.  The family studied everywhere else in
the package is F_t = F + t, i.e. the map composed with the rigid rotation by
t.  Membership in the diffeomorphism class is validated at construction time:
either the sufficient coefficient bound 1 - sum_k 2 pi k (|c_k| + |d_k|) > 0
holds, or a padded grid minimum of F' must be positive.

All heavy consumers work with displacements F_t^n(x) - x while keeping the
circle coordinate reduced to [0, 1), which keeps rounding error additive in n
instead of proportional to the size of the lift values.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property

import mpmath
import numba
import numpy as np

from .errors import CapExceeded, DomainError, NonConvergence

TWO_PI = 2.0 * math.pi

# default budget for iterate(); callers needing more go through the
# displacement kernels which do not store full orbits
DEFAULT_ITER_CAP = 10**7

_VALIDATION_GRID = 1 << 15
_DISTORTION_GRID = 1 << 14


def _as_tuple(coeffs) -> tuple[float, ...]:
    out = tuple(float(c) for c in coeffs)
    for c in out:
        if not math.isfinite(c):
            raise DomainError("coefficients must be finite")
    # drop trailing zero harmonics so identity-like lifts are recognized
    while out and out[-1] == 0.0:
        out = out[:-1]
    return out


@dataclass(frozen=True)
class LiftDescriptor:
    """Trigonometric polynomial lift of an orientation preserving circle diffeo."""

    sin_coeffs: tuple[float, ...] = ()
    cos_coeffs: tuple[float, ...] = ()
    precision: int = 15
    family: str = "custom"

    def __post_init__(self):
        object.__setattr__(self, "sin_coeffs", _as_tuple(self.sin_coeffs))
        object.__setattr__(self, "cos_coeffs", _as_tuple(self.cos_coeffs))
        if self.precision < 15:
            raise DomainError("precision must be at least 15 decimal digits")
        _validate_diffeo(self)

    # -- constructors -------------------------------------------------

    @staticmethod
    def identity(precision: int = 15) -> "LiftDescriptor":
        return LiftDescriptor((), (), precision, "identity")

    @staticmethod
    def arnold(K: float, precision: int = 15) -> "LiftDescriptor":
        """x + (K / 2 pi) sin(2 pi x); diffeomorphism iff |K| < 1."""
        return LiftDescriptor((K / TWO_PI,), (), precision, "arnold")

    # -- basic structure ----------------------------------------------

    @property
    def n_harmonics(self) -> int:
        return max(len(self.sin_coeffs), len(self.cos_coeffs))

    @cached_property
    def _coeff_arrays(self):
        """Zero padded coefficient arrays for the compiled orbit kernel."""
        m = self.n_harmonics
        cs = np.zeros(m)
        ds = np.zeros(m)
        cs[: len(self.sin_coeffs)] = self.sin_coeffs
        ds[: len(self.cos_coeffs)] = self.cos_coeffs
        return cs, ds

    @property
    def is_rotation(self) -> bool:
        return self.n_harmonics == 0

    def _harmonics(self):
        m = self.n_harmonics
        cs = self.sin_coeffs + (0.0,) * (m - len(self.sin_coeffs))
        ds = self.cos_coeffs + (0.0,) * (m - len(self.cos_coeffs))
        return [(k + 1, cs[k], ds[k]) for k in range(m)]

    def coefficient_sum(self) -> float:
        """sum_k (|c_k| + |d_k|), a bound for |F(x) - x|."""
        return sum(abs(c) + abs(d) for _, c, d in self._harmonics())

    # -- evaluation, binary64 -----------------------------------------

    def displacement(self, x):
        """F(x) - x, accepting scalars or numpy arrays."""
        if self.is_rotation:
            return np.zeros_like(x) if isinstance(x, np.ndarray) else 0.0
        if isinstance(x, np.ndarray):
            s = np.zeros_like(x)
            for k, c, d in self._harmonics():
                u = (TWO_PI * k) * x
                if c:
                    s += c * np.sin(u)
                if d:
                    s += d * np.cos(u)
            return s
        s = 0.0
        for k, c, d in self._harmonics():
            u = TWO_PI * k * x
            s += c * math.sin(u) + d * math.cos(u)
        return s

    def deriv(self, x, order: int = 1):
        """d^order/dx^order of the lift; order 0 returns the lift itself."""
        if order == 0:
            return x + self.displacement(x)
        use_np = isinstance(x, np.ndarray)
        s = np.zeros_like(x) if use_np else 0.0
        sin = np.sin if use_np else math.sin
        cos = np.cos if use_np else math.cos
        for k, c, d in self._harmonics():
            w = TWO_PI * k
            u = w * x
            amp = w**order
            # derivative cycles sin -> cos -> -sin -> -cos
            r = order % 4
            if r == 0:
                term = c * sin(u) + d * cos(u)
            elif r == 1:
                term = c * cos(u) - d * sin(u)
            elif r == 2:
                term = -c * sin(u) - d * cos(u)
            else:
                term = -c * cos(u) + d * sin(u)
            s = s + amp * term
        if order == 1:
            s = s + (np.ones_like(x) if use_np else 1.0)
        return s

    # -- evaluation, extended precision --------------------------------

    def displacement_mp(self, x):
        """F(x) - x in mpmath arithmetic at this descriptor's precision."""
        with mpmath.workdps(self.precision):
            xm = mpmath.mpf(x) if not isinstance(x, mpmath.mpf) else x
            s = mpmath.mpf(0)
            for k, c, d in self._harmonics():
                u = 2 * mpmath.pi * k * xm
                if c:
                    s += c * mpmath.sin(u)
                if d:
                    s += d * mpmath.cos(u)
            return s

    def deriv_mp(self, x):
        with mpmath.workdps(self.precision):
            xm = mpmath.mpf(x) if not isinstance(x, mpmath.mpf) else x
            s = mpmath.mpf(1)
            for k, c, d in self._harmonics():
                w = 2 * mpmath.pi * k
                u = w * xm
                s += w * (c * mpmath.cos(u) - d * mpmath.sin(u))
            return s

    # -- serialization -------------------------------------------------

    def to_json(self) -> str:
        return json.dumps(
            {
                "family": self.family,
                "coefficients": {
                    "sin": list(self.sin_coeffs),
                    "cos": list(self.cos_coeffs),
                },
                "precision": self.precision,
            }
        )

    @staticmethod
    def from_json(text: str) -> "LiftDescriptor":
        obj = json.loads(text)
        coeffs = obj.get("coefficients", {})
        return LiftDescriptor(
            tuple(coeffs.get("sin", ())),
            tuple(coeffs.get("cos", ())),
            int(obj.get("precision", 15)),
            obj.get("family", "custom"),
        )


def _validate_diffeo(lift: LiftDescriptor) -> None:
    if lift.is_rotation:
        return
    margin = 1.0
    lipschitz = 0.0
    for k, c, d in lift._harmonics():
        margin -= TWO_PI * k * (abs(c) + abs(d))
        lipschitz += (TWO_PI * k) ** 2 * (abs(c) + abs(d))
    if margin > 0.0:
        return
    # sufficient bound failed; fall back to a grid minimum of F' padded by
    # the Lipschitz constant of F' over half a grid cell
    xs = np.arange(_VALIDATION_GRID) / _VALIDATION_GRID
    fp = lift.deriv(xs, 1)
    pad = lipschitz * 0.5 / _VALIDATION_GRID
    if float(fp.min()) - pad <= 0.0:
        raise DomainError(
            "lift is not an increasing diffeomorphism: min F' <= 0 within grid padding"
        )


@dataclass(frozen=True)
class FamilyPoint:
    """A single member F_t = F + t of the rotation family of a lift."""

    lift: LiftDescriptor
    t: float

    def __post_init__(self):
        if not math.isfinite(self.t):
            raise DomainError("t must be finite")

    @property
    def precision(self) -> int:
        return self.lift.precision

    @property
    def is_exact_rotation(self) -> bool:
        return self.lift.is_rotation

    def displacement_vec(self, x: np.ndarray) -> np.ndarray:
        """One step displacement F_t(x) - x for an array of circle points."""
        return self.lift.displacement(x) + self.t

    def displacement_scalar(self, x: float) -> float:
        return self.lift.displacement(x) + self.t

    def deriv(self, x, order: int = 1):
        if order == 0:
            return self.lift.deriv(x, 0) + self.t
        return self.lift.deriv(x, order)

    def __call__(self, x):
        return self.lift.deriv(x, 0) + self.t


def eval_lift(fp: FamilyPoint, x: float, order: int = 0):
    """Value of the lift of F_t at x (order 0) or its x-derivatives."""
    if fp.precision > 15 and order <= 1:
        with mpmath.workdps(fp.precision):
            if order == 0:
                return x + fp.lift.displacement_mp(x) + mpmath.mpf(fp.t)
            return fp.lift.deriv_mp(x)
    return fp.deriv(x, order)


# ---------------------------------------------------------------------------
# orbits


@numba.njit(cache=True)
def _displacement_kernel(cs, ds, t, frac, q):
    """Total displacement of F_t^q elementwise over reduced points frac.

    frac is updated in place to the reduced coordinates after q steps.  The
    Python fallbacks in rotation.py mirror this arithmetic exactly; the
    kernel only exists because the per step loop dominates every deep Farey
    descent.
    """
    n = frac.shape[0]
    m = cs.shape[0]
    total = np.zeros(n)
    for _ in range(q):
        for i in range(n):
            x = frac[i]
            s = 0.0
            for k in range(m):
                u = (TWO_PI * (k + 1.0)) * x
                s += cs[k] * math.sin(u)
                s += ds[k] * math.cos(u)
            s += t
            total[i] += s
            x += s
            frac[i] = x - math.floor(x)
    return total


def displacement_total(fp: "FamilyPoint", q: int, xs) -> np.ndarray:
    """F_t^q(x) - x for an array of circle points via the compiled kernel."""
    shape = np.shape(xs)
    if fp.is_exact_rotation:
        return np.full(shape, q * fp.t)
    frac = np.ravel(np.array(xs, dtype=float))
    frac -= np.floor(frac)
    cs, ds = fp.lift._coeff_arrays
    total = _displacement_kernel(cs, ds, fp.t, frac, q)
    return total.reshape(shape)


@dataclass(frozen=True)
class OrbitSegment:
    """Orbit x0, F_t(x0), ..., F_t^n(x0) as lift values plus iterate derivatives.

    points[j] = F_t^j(x0) on the real line; derivs[j] = (F_t^j)'(x0).
    Negative n records the backward orbit under F_t^{-1}.
    """

    x0: float
    n: int
    points: tuple
    derivs: tuple


def invert_step(fp: FamilyPoint, x: float, tol: float | None = None) -> float:
    """Solve F_t(y) = x for y by safeguarded Newton iteration.

    The residual |F_t(y) - x| is driven below tol (default 1e-14 in binary64,
    scale adjusted for mpf inputs at higher precision).
    """
    mp_mode = fp.precision > 15 and isinstance(x, mpmath.mpf)
    if tol is None:
        tol = 1e-14 if not mp_mode else mpmath.mpf(10) ** (1 - fp.precision)
    amp = fp.lift.coefficient_sum()
    if mp_mode:
        with mpmath.workdps(fp.precision):
            y = x - fp.t
            for _ in range(200):
                r = y + fp.lift.displacement_mp(y) + fp.t - x
                if abs(r) <= tol:
                    return y
                y = y - r / fp.lift.deriv_mp(y)
            raise NonConvergence("inverse step did not converge (mp)")
    lo, hi = x - fp.t - amp, x - fp.t + amp
    y = x - fp.t
    for _ in range(100):
        r = y + fp.displacement_scalar(y) - x
        if abs(r) <= tol:
            return y
        dy = r / fp.deriv(y, 1)
        y_new = y - dy
        if not (lo <= y_new <= hi):
            # Newton left the a-priori bracket; bisect against the residual sign
            y_new = 0.5 * ((lo if r > 0 else y) + (hi if r < 0 else y))
        if r > 0:
            hi = min(hi, y)
        else:
            lo = max(lo, y)
        y = y_new
    raise NonConvergence("inverse step did not converge")


def iterate(fp: FamilyPoint, x0: float, n: int, cap: int = DEFAULT_ITER_CAP) -> OrbitSegment:
    """Orbit segment of F_t through x0, forward for n >= 0, backward for n < 0."""
    if abs(n) > cap:
        raise CapExceeded(f"|n| = {abs(n)} exceeds cap {cap}")
    if fp.precision > 15:
        return _iterate_mp(fp, x0, n)
    points = [float(x0)]
    derivs = [1.0]
    if n >= 0:
        # track the reduced coordinate for trig accuracy and the cumulative
        # displacement for the lift values; displacement is 1-periodic so the
        # reduced point sees the same step as the lift point
        frac = x0 - math.floor(x0)
        dtot = 0.0
        dprod = 1.0
        for _ in range(n):
            dprod *= fp.deriv(frac, 1)
            step = fp.displacement_scalar(frac)
            dtot += step
            frac += step
            frac -= math.floor(frac)
            points.append(x0 + dtot)
            derivs.append(dprod)
    else:
        y = float(x0)
        dprod = 1.0
        for _ in range(-n):
            y = invert_step(fp, y)
            dprod /= fp.deriv(y, 1)
            points.append(y)
            derivs.append(dprod)
    return OrbitSegment(float(x0), n, tuple(points), tuple(derivs))


def _iterate_mp(fp: FamilyPoint, x0, n: int) -> OrbitSegment:
    with mpmath.workdps(fp.precision):
        x = mpmath.mpf(x0)
        points = [x]
        derivs = [mpmath.mpf(1)]
        dprod = mpmath.mpf(1)
        if n >= 0:
            for _ in range(n):
                dprod *= fp.lift.deriv_mp(x)
                x = x + fp.lift.displacement_mp(x) + fp.t
                points.append(x)
                derivs.append(dprod)
        else:
            for _ in range(-n):
                x = invert_step(fp, x)
                dprod /= fp.lift.deriv_mp(x)
                points.append(x)
                derivs.append(dprod)
        return OrbitSegment(float(x0), n, tuple(points), tuple(derivs))


# ---------------------------------------------------------------------------
# distortion constants


@dataclass(frozen=True)
class DistortionConstants:
    """C0 norms steering the distortion estimates.

    M bounds |(log F')'| = |F''/F'|; N additionally covers the inverse map,
    whose log-derivative slope is |F''|/F'^2.  Values are grid maxima sharpened
    by a golden section pass around every local maximum, not certified bounds.
    """

    M: float
    N: float
    grid: int


def _golden_max(f, a: float, b: float, iters: int = 60) -> float:
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc < fd:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = f(d)
        else:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = f(c)
    return max(fc, fd)


def _refined_max(f, grid: int) -> float:
    xs = np.arange(grid) / grid
    vals = f(xs)
    best = float(vals.max())
    h = 1.0 / grid
    # refine every strict local maximum of the sampled profile
    left = np.roll(vals, 1)
    right = np.roll(vals, -1)
    locs = np.nonzero((vals >= left) & (vals >= right))[0]
    for i in locs:
        x = xs[i]
        best = max(best, _golden_max(lambda u: float(f(np.asarray([u]))[0]), x - h, x + h))
    return best


def distortion_constants(lift: LiftDescriptor, grid: int = _DISTORTION_GRID) -> DistortionConstants:
    """Distortion norms of the lift (shared by every member of its family)."""
    if lift.is_rotation:
        return DistortionConstants(0.0, 0.0, grid)

    def ratio1(xs):
        return np.abs(lift.deriv(xs, 2)) / lift.deriv(xs, 1)

    def ratio2(xs):
        fp = lift.deriv(xs, 1)
        return np.abs(lift.deriv(xs, 2)) / (fp * fp)

    m = _refined_max(ratio1, grid)
    n_inv = _refined_max(ratio2, grid)
    return DistortionConstants(m, max(m, n_inv), grid)
