"""Orbit combinatorics and distortion bounds for irrational rotation numbers.

Everything here reduces to order statements about finitely many orbit points,
which hold for any circle diffeomorphism whose rotation number has the same
continued fraction expansion as the reference rotation.  Intervals are kept
in lift coordinates; circle comparisons reduce differences to their nearest
integer representative, which is safe because every arc involved is shorter
than 1/2 once the convergent index is at least 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .circle_map import FamilyPoint, distortion_constants, iterate
from .cont_frac import continued_fraction
from .errors import (
    BoundViolation,
    CombinatoricsViolation,
    PreconditionFailed,
    QCapExceeded,
)
from .rotation import rotation_farey
from .staircase import plateau_endpoints

_GAP_CUTOFF = -1e-12


@dataclass(frozen=True)
class DynInterval:
    """Closed interval [lo, hi] in lift coordinates with hi - lo < 1."""

    lo: float
    hi: float

    def __post_init__(self):
        if not (self.hi >= self.lo and self.hi - self.lo < 1.0):
            raise PreconditionFailed(
                f"interval [{self.lo}, {self.hi}] is not a short circle arc"
            )

    @property
    def length(self) -> float:
        return self.hi - self.lo

    @property
    def start(self) -> float:
        """Left endpoint reduced to [0, 1)."""
        return self.lo - math.floor(self.lo)


def _between(a: float, b: float) -> DynInterval:
    """Interval between two lift points after snapping b next to a."""
    b_adj = b - round(b - a)
    return DynInterval(min(a, b_adj), max(a, b_adj))


def _signed_offset(y: float, x: float) -> float:
    """Circle displacement from x to y, nearest representative."""
    d = y - x
    return d - round(d)


def _min_cyclic_gap(intervals) -> float:
    """Smallest gap between consecutive arcs sorted around the circle.

    Negative values measure the worst overlap.
    """
    items = sorted((iv.start, iv.length) for iv in intervals)
    gaps = []
    for i in range(len(items)):
        s_next = items[(i + 1) % len(items)][0] + (1.0 if i + 1 == len(items) else 0.0)
        gaps.append(s_next - (items[i][0] + items[i][1]))
    return min(gaps)


def _min_cyclic_gap_labeled(items) -> float:
    """Like _min_cyclic_gap but skipping pairs that share an orbit point.

    items holds (start, length, left_label, right_label); a gap where the
    right label of one arc equals the left label of the next is an exact
    abutment built from the same orbit value, so it is zero by construction
    and says nothing about the disjointness of the interiors.
    """
    items = sorted(items)
    gaps = []
    for i in range(len(items)):
        j = (i + 1) % len(items)
        wrap = 1.0 if j == 0 else 0.0
        if items[i][3] == items[j][2]:
            continue
        gaps.append(items[j][0] + wrap - (items[i][0] + items[i][1]))
    return min(gaps) if gaps else 0.0


def _merged_measure(intervals) -> float:
    """Measure of the union of arcs reduced mod 1."""
    pieces = []
    for iv in intervals:
        s, ln = iv.start, iv.length
        if s + ln <= 1.0:
            pieces.append((s, s + ln))
        else:
            pieces.append((s, 1.0))
            pieces.append((0.0, s + ln - 1.0))
    pieces.sort()
    total = 0.0
    cur_lo, cur_hi = pieces[0]
    for lo, hi in pieces[1:]:
        if lo > cur_hi:
            total += cur_hi - cur_lo
            cur_lo, cur_hi = lo, hi
        else:
            cur_hi = max(cur_hi, hi)
    total += cur_hi - cur_lo
    return total


def _resolve_alpha(fp: FamilyPoint, alpha, alpha_radius: float,
                   q_cap, rho_tol: float):
    if alpha is not None:
        return float(alpha), float(alpha_radius)
    try:
        est = rotation_farey(fp, rho_tol, q_cap)
    except QCapExceeded as exc:
        est = exc.estimate
    if est.locked is not None:
        raise PreconditionFailed(
            f"rotation number locks at {est.locked}; need an irrational target"
        )
    return est.value, est.radius


def _convergent_data(alpha: float, n_index: int, need_next: bool):
    cf = continued_fraction(alpha)
    if n_index < 2:
        raise PreconditionFailed("n_index must be at least 2")
    need = n_index + 1 if need_next else n_index
    if need >= len(cf.quotients):
        raise PreconditionFailed(
            f"continued fraction of {alpha} only resolves {len(cf.quotients)} terms"
        )
    pq = cf.convergents[n_index]
    pq_prev = cf.convergents[n_index - 1]
    a_next = cf.quotients[n_index + 1] if need_next else None
    return cf, pq, pq_prev, a_next


@dataclass(frozen=True)
class ReturnPartition:
    """First-return combinatorics of the convergent p_n/q_n at a base point.

    imagesL holds the q_n + q_{n-1} forward iterates of L, which are pairwise
    disjoint arcs; imagesK the q_n forward iterates of K, disjoint except for
    shared endpoints along the orbit; chain holds the a_{n+1} backward
    q_n-step translates of L, whose union sits inside K.  Margins are the
    smallest clearances of those facts in circle length, with the built-in
    endpoint abutments of the K family excluded.
    """

    x: float
    alpha: float
    n_index: int
    pq: Fraction
    pq_prev: Fraction
    a_next: int
    side: int
    L: DynInterval
    K: DynInterval
    imagesL: tuple
    imagesK: tuple
    chain: tuple
    margin_imagesL: float
    margin_imagesK: float
    margin_chain: float

    @property
    def margins(self) -> dict:
        return {"imagesL": self.margin_imagesL,
                "imagesK": self.margin_imagesK,
                "chain": self.margin_chain}


def return_partition(fp: FamilyPoint, x: float = 0.0, n_index: int = 4,
                     alpha=None, alpha_radius: float = 0.0,
                     q_cap: int | None = None,
                     rho_tol: float = 1e-11) -> ReturnPartition:
    """Build the return partition of the convergent at n_index around x.

    L spans x and the backward q_n iterate of x; K spans x and the forward
    q_{n-1} iterate.  Raises CombinatoricsViolation if the disjointness of
    the forward images of L and K or the containment of the backward chain
    in K fails beyond rounding.
    """
    alpha, _ = _resolve_alpha(fp, alpha, alpha_radius, q_cap, rho_tol)
    _, pq, pq_prev, a_next = _convergent_data(alpha, n_index, need_next=True)
    q_n = pq.denominator
    q_prev = pq_prev.denominator

    back = iterate(fp, x, -(a_next * q_n)).points
    y1 = back[q_n]
    z_off = [_signed_offset(back[nu * q_n], x) for nu in range(a_next + 1)]
    fwd = iterate(fp, x, q_n + q_prev - 1).points
    fwd_y = iterate(fp, y1, q_n - 1).points

    imagesL = tuple(_between(a, b) for a, b in zip(fwd, fwd_y))
    L = imagesL[0]
    off_K = _signed_offset(fwd[q_prev], x)
    K = DynInterval(x + min(0.0, off_K), x + max(0.0, off_K))
    side = 1 if z_off[1] > 0.0 else -1

    # K_j spans the orbit points with indices j and j + q_prev; consecutive
    # members share one of them, so the disjointness margin must ignore
    # those index-matched abutments
    imagesK = tuple(_between(fwd[j], fwd[j + q_prev]) for j in range(q_n))
    lab_lo, lab_hi = (0, q_prev) if off_K > 0.0 else (q_prev, 0)
    labeled = [
        (iv.start, iv.length, j + lab_lo, j + lab_hi)
        for j, iv in enumerate(imagesK)
    ]

    chain = tuple(
        DynInterval(x + min(z_off[nu], z_off[nu + 1]),
                    x + max(z_off[nu], z_off[nu + 1]))
        for nu in range(a_next)
    )
    margin_imagesL = _min_cyclic_gap(imagesL)
    margin_imagesK = _min_cyclic_gap_labeled(labeled)
    if off_K * z_off[-1] <= 0.0:
        margin_chain = -abs(z_off[-1])
    else:
        margin_chain = abs(off_K) - abs(z_off[-1])
    margins = {
        "imagesL": margin_imagesL,
        "imagesK": margin_imagesK,
        "chain": margin_chain,
    }
    if min(margins.values()) < _GAP_CUTOFF:
        raise CombinatoricsViolation(
            "return partition geometry is inconsistent with the convergent data",
            margins=margins,
        )
    return ReturnPartition(
        x=x, alpha=alpha, n_index=n_index, pq=pq, pq_prev=pq_prev,
        a_next=a_next, side=side, L=L, K=K, imagesL=imagesL, imagesK=imagesK,
        chain=chain, margin_imagesL=margin_imagesL,
        margin_imagesK=margin_imagesK, margin_chain=margin_chain,
    )


@dataclass(frozen=True)
class DistortionRatio:
    """Observed n-step derivative spread over an interval against exp(M * sum)."""

    n: int
    ratio: float
    bound: float
    total_length: float
    disjoint_margin: float
    M: float


def distortion_ratio_check(fp: FamilyPoint, J: DynInterval, n: int,
                           grid: int = 64) -> DistortionRatio:
    """Check sup/inf of (F^n)' over J against exp(M * total image length).

    The images of J under the first n iterates must be pairwise disjoint
    arcs; that is the caller's obligation and its failure raises
    PreconditionFailed.  The derivative spread is sampled on a grid, so the
    reported ratio is a lower bound on the true one.
    """
    lo, hi = J.lo, J.hi
    if not (hi > lo and hi - lo <= 0.5):
        raise PreconditionFailed("need a nondegenerate arc of length <= 1/2")
    if n < 1:
        raise PreconditionFailed("n must be at least 1")
    M = distortion_constants(fp.lift).M

    xs = np.linspace(lo, hi, grid)
    prod = np.ones_like(xs)
    pos = xs - np.floor(xs)
    end_lo, end_hi = lo, hi
    intervals = []
    for _ in range(n):
        intervals.append(DynInterval(end_lo, end_hi))
        prod *= fp.deriv(pos, 1)
        step = fp.displacement_vec(pos)
        pos = pos + step
        pos -= np.floor(pos)
        end_lo += fp.displacement_scalar(end_lo - math.floor(end_lo))
        end_hi += fp.displacement_scalar(end_hi - math.floor(end_hi))
        if end_hi - end_lo >= 1.0:
            raise PreconditionFailed(
                f"image of the interval wraps the circle after {len(intervals)} steps"
            )
    margin = _min_cyclic_gap(intervals)
    if margin < _GAP_CUTOFF:
        raise PreconditionFailed(
            f"first {n} images of the interval overlap (margin {margin:.3e})"
        )
    total = sum(iv.length for iv in intervals)
    ratio = float(np.max(prod) / np.min(prod))
    bound = math.exp(M * total)
    if ratio > bound * (1.0 + 1e-9):
        raise BoundViolation(
            f"derivative spread {ratio} exceeds exp(M * {total}) = {bound}"
        )
    return DistortionRatio(n=n, ratio=ratio, bound=bound, total_length=total,
                           disjoint_margin=margin, M=M)


@dataclass(frozen=True)
class HatChainRecord:
    """Hat-interval certificate for the speed of approach to a plateau.

    quotient is (p_n/q_n - alpha) / t with t the parameter distance from the
    base point to the near edge of the p_n/q_n plateau; the certified lower
    bound for it is exp(-M * ell) with ell the merged measure of the forward
    images of the hat interval at the base point.  ells lists that measure at
    the a_{n+1} backward translates of x (index 0 is x itself); their sum
    stays below 1 and the translates are comparable within exp(N).
    """

    pq: Fraction
    n_index: int
    a_next: int
    t: float
    quotient: float
    uncertainty: float
    ells: tuple
    bound: float
    chain_sum: float
    comparability: tuple
    M: float
    N: float
    min_tau: float
    holds_quotient: bool
    holds_chain_sum: bool
    holds_comparability: bool

    @property
    def holds(self) -> bool:
        return self.holds_quotient and self.holds_chain_sum and self.holds_comparability


def _hat_ell(fp: FamilyPoint, fp_edge: FamilyPoint, y: float, q_n: int):
    """Merged measure of the first q_n forward images of the hat interval at y.

    Returns (ell, min_tau).  The hat interval spans y and the backward q_n
    iterate (at the base parameter) of the forward q_n iterate of y at the
    plateau edge parameter; min_tau is the smallest step of the hybrid
    telescoping f^{q_n - i} after i edge steps, positive whenever the edge
    parameter really sits above the base.
    """
    c = iterate(fp_edge, y, q_n).points
    c_q = c[-1]
    b_prev = iterate(fp, y, q_n).points[-1]
    min_tau = math.inf
    for i in range(1, q_n + 1):
        b_i = iterate(fp, c[i], q_n - i).points[-1]
        min_tau = min(min_tau, b_i - b_prev)
        b_prev = b_i

    w = iterate(fp, c_q, -q_n).points[-1]
    off = _signed_offset(w, y)
    if off <= 0.0:
        raise PreconditionFailed(
            "hat interval collapsed; the plateau edge sits on the wrong side"
        )
    top = y + off
    pts_y = iterate(fp, y, q_n).points
    pts_w = iterate(fp, top, q_n).points
    # the lift is increasing and off < 1, so pw - py stays in (0, 1);
    # image index 0 is the hat interval itself and stays out of the union
    images = [DynInterval(py, pw)
              for py, pw in zip(pts_y[1:], pts_w[1:])]
    ell = _merged_measure(images)
    return ell, min_tau


def hat_ell_bound_check(fp: FamilyPoint, x: float = 0.0, n_index: int = 5,
                        alpha=None, alpha_radius: float = 0.0,
                        plateau_tol: float = 1e-10,
                        q_cap: int | None = None,
                        rho_tol: float = 1e-11) -> HatChainRecord:
    """Certify the hat-interval lower bound on the approach quotient at x.

    Requires a convergent p_n/q_n lying above alpha (odd index), so the
    plateau edge is reached by increasing the parameter.  The quotient
    (p_n/q_n - alpha)/t is checked against exp(-M * ell); the chain of
    backward translates is checked for total measure below 1 and pairwise
    comparability within exp(N).
    """
    alpha, alpha_radius = _resolve_alpha(fp, alpha, alpha_radius, q_cap, rho_tol)
    _, pq, _, a_next = _convergent_data(alpha, n_index, need_next=True)
    q_n = pq.denominator
    if float(pq) <= alpha:
        raise PreconditionFailed(
            f"convergent {pq} sits below alpha; pick an index with p_n/q_n > alpha"
        )
    consts = distortion_constants(fp.lift)
    plateau = plateau_endpoints(fp.lift, pq, plateau_tol)
    t = plateau.t_left - fp.t
    if t <= 0.0:
        raise PreconditionFailed(
            f"plateau edge of {pq} is not above the base parameter"
        )
    fp_edge = FamilyPoint(fp.lift, plateau.t_left)

    anchors = [x - math.floor(x)]
    if a_next > 1:
        back = iterate(fp, x, -((a_next - 1) * q_n)).points
        for nu in range(1, a_next):
            p = back[nu * q_n]
            anchors.append(p - math.floor(p))

    ells = []
    min_tau = math.inf
    for y in anchors:
        ell, mt = _hat_ell(fp, fp_edge, y, q_n)
        ells.append(ell)
        min_tau = min(min_tau, mt)

    quotient = (float(pq) - alpha) / t
    uncertainty = (alpha_radius + plateau_tol) / t
    bound = math.exp(-consts.M * ells[0])
    chain_sum = sum(ells)
    comparability = tuple(ells[0] / e for e in ells[1:])
    cap = math.exp(consts.N)

    holds_quotient = quotient + uncertainty >= bound * (1.0 - 1e-9)
    holds_chain_sum = chain_sum <= 1.0 + 1e-9
    holds_comparability = all(r <= cap * (1.0 + 1e-9) for r in comparability)

    return HatChainRecord(
        pq=pq, n_index=n_index, a_next=a_next, t=t, quotient=quotient,
        uncertainty=uncertainty, ells=tuple(ells), bound=bound,
        chain_sum=chain_sum, comparability=comparability,
        M=consts.M, N=consts.N, min_tau=min_tau,
        holds_quotient=holds_quotient, holds_chain_sum=holds_chain_sum,
        holds_comparability=holds_comparability,
    )
