"""Difference-quotient probes for the rotation number along a family.

Two instruments live here.  quotient_sequence walks the convergents of the
rotation number at a base parameter and measures the slope of t -> rho(t)
toward the nearest locking plateau of each convergent; every slope is checked
against the hard floor exp(-M) and, where the return-time combinatorics
certify, against the sharper floor exp(-M * ell) from the hat-interval
construction.  rational_boundary_probe sits at one edge of a single plateau
and measures the same slope at a ladder of offsets, exposing the blow-up of
the derivative as the plateau is approached from outside.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .circle_map import FamilyPoint, LiftDescriptor, distortion_constants
from .cont_frac import continued_fraction
from .denjoy import hat_ell_bound_check
from .errors import (BoundViolation, CombinatoricsViolation, DegenerateInput,
                     NonConvergence, PreconditionFailed, QCapExceeded,
                     Unresolvable)
from .rotation import rotation_farey
from .staircase import Plateau, plateau_endpoints

# require the rho increment at a probe offset to dominate the enclosure
# radius by this factor before trusting the quotient
_RESOLUTION_FACTOR = 8.0


@dataclass(frozen=True)
class QuotientRecord:
    """One convergent's slope measurement toward its locking plateau.

    quotient is (p/q - rho(t0)) / (t_edge - t0) with t_edge the plateau
    endpoint facing t0; uncertainty propagates the rho enclosure radius.
    bound_coarse is exp(-M); bound_refined is exp(-M * ell) when the
    hat-interval certificate succeeded (None with a note otherwise).
    A record with quotient = nan marks a convergent skipped because its
    plateau could not be resolved; note says why.
    """

    k: int
    pq: Fraction
    side: int
    t_edge: float
    quotient: float
    uncertainty: float
    bound_coarse: float
    bound_refined: Optional[float] = None
    ell: Optional[float] = None
    note: str = ""

    @property
    def skipped(self) -> bool:
        return not math.isfinite(self.quotient)

    @property
    def holds_coarse(self) -> bool:
        return (not self.skipped
                and self.quotient + self.uncertainty
                >= self.bound_coarse * (1.0 - 1e-12))

    @property
    def holds_refined(self) -> Optional[bool]:
        if self.skipped or self.bound_refined is None:
            return None
        return (self.quotient + self.uncertainty
                >= self.bound_refined * (1.0 - 1e-9))


@dataclass(frozen=True)
class BlowupProbe:
    """Slope ladder at one plateau edge.

    offsets are strictly decreasing; quotients[i] = |rho(edge +- offsets[i])
    - p/q| / offsets[i].  loglog_slope is the least-squares slope of
    log quotient against log offset: 0 for a rotation family, negative when
    the one-sided derivative blows up at the edge.
    """

    pq: Fraction
    side: str
    offsets: tuple
    quotients: tuple
    radii: tuple
    loglog_slope: float
    t_edge: float

    @property
    def running_max(self) -> tuple:
        out, best = [], -math.inf
        for v in self.quotients:
            best = max(best, v)
            out.append(best)
        return tuple(out)


def _rho_enclosure(fp: FamilyPoint, tol: float, q_cap):
    try:
        return rotation_farey(fp, tol, q_cap)
    except QCapExceeded as exc:
        return exc.estimate


def quotient_sequence(lift: LiftDescriptor, t0: float, n_conv: int,
                      alpha=None, alpha_radius: float = 0.0,
                      plateau_tol: float = 1e-10,
                      q_cap: int | None = None,
                      rho_tol: float = 1e-9,
                      with_refined: bool = True,
                      x: float = 0.0) -> list[QuotientRecord]:
    """Slopes toward the plateaus of the first n_conv + 1 convergents.

    alpha with alpha_radius can be supplied when the rotation number at t0 is
    known better than rotation_farey would resolve it; otherwise the enclosure
    midpoint is used.  Convergent indices run k = 0 .. n_conv but stop early
    at the denominator cap.  Raises BoundViolation if any resolved quotient
    undershoots its floor: that is a genuine counterexample, not a numerical
    skip.
    """
    if n_conv < 1:
        raise PreconditionFailed("n_conv must be at least 1")
    fp = FamilyPoint(lift, t0)
    if alpha is None:
        est = _rho_enclosure(fp, rho_tol, q_cap)
        if est.locked is not None and not fp.is_exact_rotation:
            raise PreconditionFailed(
                f"rotation number locks at {est.locked}; quotients toward the"
                " containing plateau are not defined"
            )
        alpha, alpha_radius = est.value, est.radius
    else:
        alpha = float(alpha)

    cf = continued_fraction(alpha)
    consts = distortion_constants(lift)
    bound_coarse = math.exp(-consts.M)
    cap = q_cap if q_cap is not None else 10**4

    records = []
    for k, pq in enumerate(cf.convergents):
        if k > n_conv or pq.denominator > cap:
            break
        if float(pq) == alpha:
            records.append(QuotientRecord(
                k=k, pq=pq, side=0, t_edge=math.nan, quotient=math.nan,
                uncertainty=math.nan, bound_coarse=bound_coarse,
                note="convergent coincides with the rotation estimate"))
            continue
        side = 1 if float(pq) > alpha else -1
        plateau = plateau_endpoints(lift, pq, plateau_tol)
        t_edge = plateau.t_left if side > 0 else plateau.t_right
        denom = t_edge - t0
        if denom * side <= 0.0:
            records.append(QuotientRecord(
                k=k, pq=pq, side=side, t_edge=t_edge, quotient=math.nan,
                uncertainty=math.nan, bound_coarse=bound_coarse,
                note="plateau is not separated from the base parameter"))
            continue
        quotient = (float(pq) - alpha) / denom
        uncertainty = alpha_radius / abs(denom)
        rec = QuotientRecord(k=k, pq=pq, side=side, t_edge=t_edge,
                             quotient=quotient, uncertainty=uncertainty,
                             bound_coarse=bound_coarse)
        if not rec.holds_coarse:
            raise BoundViolation(
                f"quotient {quotient} at convergent {pq} undershoots"
                f" exp(-M) = {bound_coarse}"
            )
        if with_refined and side > 0:
            try:
                hat = hat_ell_bound_check(
                    fp, x=x, n_index=k, alpha=alpha,
                    alpha_radius=alpha_radius, plateau_tol=plateau_tol,
                    q_cap=q_cap)
                rec = QuotientRecord(
                    k=k, pq=pq, side=side, t_edge=t_edge, quotient=quotient,
                    uncertainty=uncertainty, bound_coarse=bound_coarse,
                    bound_refined=hat.bound, ell=hat.ells[0])
                if rec.holds_refined is False:
                    raise BoundViolation(
                        f"quotient {quotient} at convergent {pq} undershoots"
                        f" the refined floor {hat.bound}"
                    )
            except (PreconditionFailed, CombinatoricsViolation,
                    DegenerateInput, NonConvergence, Unresolvable) as exc:
                rec = QuotientRecord(
                    k=k, pq=pq, side=side, t_edge=t_edge, quotient=quotient,
                    uncertainty=uncertainty, bound_coarse=bound_coarse,
                    note=f"refined floor unavailable: {exc}")
        elif with_refined:
            rec = QuotientRecord(
                k=k, pq=pq, side=side, t_edge=t_edge, quotient=quotient,
                uncertainty=uncertainty, bound_coarse=bound_coarse,
                note="refined floor needs the plateau above the base parameter")
        records.append(rec)
    return records


def rational_boundary_probe(lift: LiftDescriptor, pq, side: str = "right",
                            deltas=(1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7),
                            plateau_tol: float = 1e-9,
                            rho_tol: float = 1e-9,
                            q_cap: int | None = None) -> BlowupProbe:
    """Slope ladder outside one edge of the plateau of p/q.

    deltas must be positive and strictly decreasing, with the smallest at
    least 10x the plateau tolerance so the edge location error stays below
    a tenth of every offset.  Raises Unresolvable when an offset's rho
    increment is too small for the solver to separate from the plateau.
    """
    if side not in ("left", "right"):
        raise PreconditionFailed(f"side must be left or right, got {side!r}")
    deltas = tuple(float(d) for d in deltas)
    if not deltas or any(d <= 0.0 for d in deltas):
        raise PreconditionFailed("offsets must be positive")
    if any(b >= a for a, b in zip(deltas, deltas[1:])):
        raise PreconditionFailed("offsets must be strictly decreasing")
    if deltas[-1] < 10.0 * plateau_tol:
        raise PreconditionFailed(
            f"smallest offset {deltas[-1]} is within 10x the plateau"
            f" tolerance {plateau_tol}; tighten the plateau first"
        )
    pq = Fraction(pq)
    target = float(pq)
    plateau = plateau_endpoints(lift, pq, plateau_tol)
    sign = 1.0 if side == "right" else -1.0
    t_edge = plateau.t_right if side == "right" else plateau.t_left

    quotients, radii = [], []
    for d in deltas:
        est = _rho_enclosure(FamilyPoint(lift, t_edge + sign * d), rho_tol, q_cap)
        inc = abs(est.value - target)
        if est.locked is None and inc < _RESOLUTION_FACTOR * est.radius:
            raise Unresolvable(
                f"rho increment {inc} at offset {d} is inside {_RESOLUTION_FACTOR}x"
                f" the enclosure radius {est.radius}; raise q_cap or stop higher"
            )
        quotients.append(inc / d)
        radii.append(est.radius / d)
    slope = float(np.polyfit(np.log(deltas), np.log(quotients), 1)[0])
    return BlowupProbe(pq=pq, side=side, offsets=deltas,
                       quotients=tuple(quotients), radii=tuple(radii),
                       loglog_slope=slope, t_edge=t_edge)
