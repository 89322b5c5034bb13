"""Mode locking plateaus and the inverse of the rotation staircase.

Plateau endpoints use that t -> max_x (F_t^q(x) - x - p) and its min
counterpart are strictly increasing with slope at least 1 in t, so bisection
with a residual stop |G| <= tol localizes the endpoint to within tol.  The
staircase inverse bisects on t, classifying each midpoint against the target
through Farey bracket comparisons that stop as soon as the bracket separates
from the target.

The parameter domain is not clipped to [-1/2, 1/2]: the family satisfies
rho(t + 1) = rho(t) + 1, so every target is reachable and the solvers simply
report where they land.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .circle_map import FamilyPoint, LiftDescriptor, distortion_constants
from .errors import (
    BoundViolation,
    NonConvergence,
    PreconditionFailed,
    QCapExceeded,
)
from .rotation import (
    INNER_GRID,
    REFINE_ROUNDS,
    RotationEstimate,
    compare_rotation_to,
    discrepancy_extrema,
    rotation_farey,
)


@dataclass(frozen=True)
class Plateau:
    """Parameter interval [t_left, t_right] on which rho is locked at pq."""

    pq: Fraction
    t_left: float
    t_right: float
    tol: float

    @property
    def width(self) -> float:
        return self.t_right - self.t_left


@dataclass(frozen=True)
class JdMeasurement:
    """Measure of the set of parameters with 0 < |rho - p/q| < q^{-d}."""

    pq: Fraction
    d: float
    measure: float
    bound: float
    t_minus: float
    t_plus: float
    plateau: Plateau


@dataclass(frozen=True)
class StaircaseSweep:
    ts: tuple
    estimates: tuple

    def monotonicity_violations(self) -> list[int]:
        """Indices i where the enclosure at t_i sits wholly above the one at t_{i+1}."""
        bad = []
        for i in range(len(self.ts) - 1):
            a, b = self.estimates[i], self.estimates[i + 1]
            if a.lo > b.hi + 1e-15:
                bad.append(i)
        return bad

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("t,rho,radius,locked_p,locked_q\n")
        for t, est in zip(self.ts, self.estimates):
            if est.locked is not None:
                lp, lq = str(est.locked.numerator), str(est.locked.denominator)
            else:
                lp = lq = ""
            buf.write(f"{t!r},{est.value!r},{est.radius!r},{lp},{lq}\n")
        return buf.getvalue()


def _bracket_pad(lift: LiftDescriptor) -> float:
    return lift.coefficient_sum() + 0.1


def plateau_endpoints(lift: LiftDescriptor, pq, tol: float = 1e-10,
                      grid: int = INNER_GRID, rounds: int = REFINE_ROUNDS) -> Plateau:
    """Endpoints of the locking plateau rho^{-1}(p/q).

    Residuals of the defining extremum equations at the returned endpoints are
    at most tol, which bounds the endpoint error by tol as well.  A width
    below 2 tol is reported as zero by collapsing both endpoints to their
    midpoint.
    """
    if tol <= 0.0:
        raise PreconditionFailed("tol must be positive")
    pq = Fraction(pq)
    if lift.coefficient_sum() == 0.0:
        # pure rotation: the plateau is the single parameter point p/q
        v = float(pq)
        return Plateau(pq, v, v, 0.0)
    p, q = pq.numerator, pq.denominator
    pad = _bracket_pad(lift)
    t_lo = float(pq) - pad
    t_hi = float(pq) + pad

    def solve(kind: int) -> float:
        # kind 0: min over x (right endpoint), kind 1: max over x (left endpoint)
        a, b = t_lo, t_hi
        for _ in range(300):
            m = 0.5 * (a + b)
            g = discrepancy_extrema(FamilyPoint(lift, m), q, p, grid, rounds)[kind]
            if abs(g) <= tol:
                return m
            if g > 0.0:
                b = m
            else:
                a = m
            if b - a <= tol * 2.0**-8:
                return 0.5 * (a + b)
        raise NonConvergence(f"plateau endpoint for {pq} not localized at tol {tol}")

    t_left = solve(1)
    t_right = solve(0)
    if t_right - t_left < 2.0 * tol:
        mid = 0.5 * (t_left + t_right)
        return Plateau(pq, mid, mid, tol)
    return Plateau(pq, t_left, t_right, tol)


def inverse_rho(lift: LiftDescriptor, alpha, tol: float = 1e-9,
                q_cap: int | None = None, grid: int = INNER_GRID) -> float:
    """Parameter t* with rho(t*) = alpha, by bisection on t.

    Midpoints are classified against alpha via Farey bracket comparisons.  A
    midpoint whose enclosure cannot be separated from alpha is already within
    the solver's rho resolution of the preimage and is returned directly;
    raising q_cap tightens that resolution.  For rational alpha any point of
    the locking plateau may be returned.
    """
    if tol <= 0.0:
        raise PreconditionFailed("tol must be positive")
    target = Fraction(alpha)
    alpha_f = float(alpha)
    if not math.isfinite(alpha_f):
        raise PreconditionFailed("alpha must be finite")
    pad = _bracket_pad(lift)
    a, b = alpha_f - pad, alpha_f + pad
    # rho(a) <= alpha - 0.1 and rho(b) >= alpha + 0.1 by the displacement bound
    while b - a > tol:
        m = 0.5 * (a + b)
        side, est = compare_rotation_to(FamilyPoint(lift, m), target, q_cap, grid)
        if side == 0:
            return m
        if side < 0:
            a = m
        else:
            b = m
    return 0.5 * (a + b)


def measure_Jd(lift: LiftDescriptor, pq, d: float, tol: float = 1e-9,
               q_cap: int | None = None) -> JdMeasurement:
    """Lebesgue measure of the parameters with 0 < |rho - p/q| < q^{-d}.

    The window preimage is solved through inverse_rho at the two surrogate
    targets p/q -+ q^{-d}, the plateau is subtracted, and the result is
    checked against the distortion bound 2 e^M q^{-d}.
    """
    pq = Fraction(pq)
    if pq.denominator <= 1:
        raise PreconditionFailed("q must exceed 1")
    if d <= 3.0:
        raise PreconditionFailed("d must exceed 3")
    delta = float(pq.denominator) ** (-d)
    t_plus = inverse_rho(lift, float(pq) + delta, tol, q_cap)
    t_minus = inverse_rho(lift, float(pq) - delta, tol, q_cap)
    plateau = plateau_endpoints(lift, pq, min(tol, 1e-10))
    raw = (t_plus - t_minus) - plateau.width
    measure = max(raw, 0.0)
    M = distortion_constants(lift).M
    bound = 2.0 * math.exp(M) * delta
    slack = max(4.0 * tol, 1e-10)
    if measure > bound + slack:
        raise BoundViolation(
            f"window measure {measure} exceeds 2 e^M q^-d = {bound} beyond slack {slack}"
        )
    return JdMeasurement(pq, d, measure, bound, t_minus, t_plus, plateau)


def sweep(lift: LiftDescriptor, t_lo: float = -0.5, t_hi: float = 0.5,
          samples: int = 101, tol: float = 1e-6,
          q_cap: int | None = None, grid: int = INNER_GRID) -> StaircaseSweep:
    """Rotation number enclosures on a uniform parameter grid."""
    if samples < 2:
        raise PreconditionFailed("samples must be >= 2")
    if not t_hi > t_lo:
        raise PreconditionFailed("need t_hi > t_lo")
    ts = np.linspace(t_lo, t_hi, samples)
    ests = []
    for t in ts:
        try:
            est = rotation_farey(FamilyPoint(lift, float(t)), tol, q_cap, grid)
        except QCapExceeded as exc:
            # samples hugging a plateau edge cannot reach tol before the
            # denominator cap; keep the wider but still valid enclosure
            est = exc.estimate
        ests.append(est)
    return StaircaseSweep(tuple(float(t) for t in ts), tuple(ests))
