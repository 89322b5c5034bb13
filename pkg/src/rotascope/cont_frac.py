"""Continued fractions, closest return times, and the convergent criterion.

Rational values are fractions.Fraction throughout; expansions of binary64
inputs operate on the exact rational the float represents and are truncated
once the residual |alpha - p_k/q_k| falls below the reliability floor
q_k^2 * eps, since quotients past that depth reflect the encoding rather
than the intended number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import DegenerateInput, PreconditionFailed

_EPS = 2.0**-52
_BRUTE_LIMIT = 10**4

#: (sqrt(5) - 1) / 2, the canonical test irrational
GOLDEN_MEAN = (math.sqrt(5.0) - 1.0) / 2.0
SQRT2_MINUS_1 = math.sqrt(2.0) - 1.0


def circle_distance(x: float) -> float:
    """Distance from x to the nearest integer."""
    f = x - math.floor(x)
    return min(f, 1.0 - f)


@dataclass(frozen=True)
class ContinuedFraction:
    """Expansion [a0; a1, a2, ...] with convergents p_k/q_k.

    exact is False when the expansion was truncated, either at the float
    reliability floor or at the term cap.
    """

    quotients: tuple[int, ...]
    convergents: tuple[Fraction, ...]
    exact: bool

    @property
    def denominators(self) -> tuple[int, ...]:
        return tuple(c.denominator for c in self.convergents)

    @property
    def numerators(self) -> tuple[int, ...]:
        return tuple(c.numerator for c in self.convergents)

    def __len__(self) -> int:
        return len(self.quotients)


def cf_from_quotients(quotients) -> ContinuedFraction:
    """Build convergents from given partial quotients by the standard recurrence.

    Serves as the exact path for quadratic irrationals, whose quotient
    sequences are eventually periodic and can be written down directly.
    """
    qs = [int(a) for a in quotients]
    if not qs:
        raise PreconditionFailed("need at least one partial quotient")
    if any(a < 1 for a in qs[1:]):
        raise PreconditionFailed("partial quotients past a0 must be >= 1")
    p_prev, q_prev = 1, 0
    p, q = qs[0], 1
    convergents = [Fraction(p, q)]
    for a in qs[1:]:
        p, p_prev = a * p + p_prev, p
        q, q_prev = a * q + q_prev, q
        convergents.append(Fraction(p, q))
    return ContinuedFraction(tuple(qs), tuple(convergents), True)


def golden_mean_cf(n_terms: int) -> ContinuedFraction:
    """[0; 1, 1, 1, ...] with Fibonacci convergents."""
    return cf_from_quotients([0] + [1] * n_terms)


def sqrt2_minus1_cf(n_terms: int) -> ContinuedFraction:
    """[0; 2, 2, 2, ...]."""
    return cf_from_quotients([0] + [2] * n_terms)


def continued_fraction(alpha, max_terms: int = 64) -> ContinuedFraction:
    """Continued fraction expansion of alpha.

    Fraction input expands exactly.  Float input expands the exact rational
    value of the float but stops at the q_k^2 * eps residual floor, returning
    exact=False for the truncated tail.
    """
    from_float = isinstance(alpha, float)
    value = Fraction(alpha)
    quotients: list[int] = []
    convergents: list[Fraction] = []
    p_prev, q_prev = 0, 1
    p, q = 1, 0
    rem = value
    exact = False
    for _ in range(max_terms):
        a = math.floor(rem)
        quotients.append(int(a))
        p, p_prev = a * p + p_prev, p
        q, q_prev = a * q + q_prev, q
        convergents.append(Fraction(p, q))
        frac_part = rem - a
        if frac_part == 0:
            exact = True
            break
        if from_float:
            residual = abs(value - Fraction(p, q))
            if residual < Fraction(q) * Fraction(q) * Fraction(_EPS):
                break
        rem = 1 / frac_part
    return ContinuedFraction(tuple(quotients), tuple(convergents), exact)


def _return_sign(k: int) -> int:
    """Sign of q_k alpha - p_k: convergents alternate around alpha."""
    return 1 if k % 2 == 0 else -1


def closest_returns(alpha: float, Q: int, method: str = "auto") -> list[tuple[int, int]]:
    """Return times q <= Q with |j alpha| > |q alpha| for all 0 < j < q.

    Each entry is (q, sign) where sign tells which side of the nearest
    integer q*alpha falls on.  Direct verification is used up to Q = 10^4;
    beyond that the convergent denominators are read off the expansion, with
    DegenerateInput raised when alpha sits within 1/Q^2 of a rational of
    denominator <= Q and the expansion cannot be trusted at that depth.
    """
    if Q < 1:
        raise PreconditionFailed("Q must be >= 1")
    if method not in ("auto", "brute", "convergents"):
        raise PreconditionFailed(f"unknown method {method!r}")
    if method == "brute" or (method == "auto" and Q <= _BRUTE_LIMIT):
        return _closest_returns_brute(alpha, Q)
    return _closest_returns_convergents(alpha, Q)


def _closest_returns_brute(alpha: float, Q: int) -> list[tuple[int, int]]:
    out = []
    best = math.inf
    for j in range(1, Q + 1):
        v = j * alpha
        f = v - math.floor(v)
        d = min(f, 1.0 - f)
        if d < best:
            best = d
            out.append((j, 1 if f < 0.5 else -1))
    return out

def _closest_returns_convergents(alpha: float, Q: int) -> list[tuple[int, int]]:
    cf = continued_fraction(alpha)
    for conv in cf.convergents:
        if conv.denominator <= Q and abs(Fraction(alpha) - conv) < Fraction(1, Q * Q):
            raise DegenerateInput(
                f"alpha within 1/Q^2 of {conv}; expansion unreliable at depth Q={Q}"
            )
    if not cf.exact and cf.convergents[-1].denominator < Q:
        raise DegenerateInput(
            f"expansion truncated at denominator {cf.convergents[-1].denominator} "
            f"below requested depth Q={Q}"
        )
    out: list[tuple[int, int]] = []
    seen = set()
    ks = range(len(cf.convergents))
    # q_0 = q_1 = 1 when a_1 = 1: the later index carries the true sign of
    # the q = 1 return (nearest integer, not floor)
    for k in reversed(ks):
        q = cf.convergents[k].denominator
        if q <= Q and q not in seen:
            seen.add(q)
            out.append((q, _return_sign(k)))
    out.reverse()
    return out


def _log_fraction(x: Fraction) -> float:
    """log of a positive Fraction without overflow or underflow."""
    if x <= 0:
        raise ValueError("positive value required")
    return math.log(x.numerator) - math.log(x.denominator)


def convergent_test(alpha, pq: Fraction, d: float) -> dict:
    """Check |alpha - p/q| < q^{-d} and whether p/q is a convergent of alpha.

    For d > 3 and q > 1 the hypothesis forces p/q to be a convergent; that
    implication is asserted.  Exact rational arithmetic is used so that
    residuals far below binary64 resolution of alpha are still meaningful
    when alpha is given as a Fraction.
    """
    if d <= 3:
        raise PreconditionFailed("d must exceed 3")
    pq = Fraction(pq)
    q = pq.denominator
    if q <= 1:
        raise PreconditionFailed("q must exceed 1")
    value = Fraction(alpha)
    diff = abs(value - pq)
    if diff == 0:
        holds = True
    else:
        holds = _log_fraction(diff) < -d * math.log(q)

    is_conv = False
    cf = continued_fraction(value if not isinstance(alpha, float) else float(alpha))
    for conv in cf.convergents:
        if conv == pq:
            is_conv = True
            break
        if conv.denominator > q:
            break
    if holds and not is_conv:
        raise ArithmeticError(
            f"{pq} approximates to q^-{d} yet is not a convergent; expansion inconsistent"
        )
    return {"holds_hypothesis": holds, "is_convergent": is_conv}
