"""Difference-quotient records over convergents and plateau-edge probes."""

import math
from fractions import Fraction

import numpy as np
import pytest

from rotascope import (
    GOLDEN_MEAN,
    LiftDescriptor,
    PreconditionFailed,
    distortion_constants,
    quotient_sequence,
    rational_boundary_probe,
)


def test_identity_quotients_are_exactly_one():
    recs = quotient_sequence(LiftDescriptor.identity(), GOLDEN_MEAN, 7)
    assert len(recs) == 8
    for rec in recs:
        assert rec.quotient == 1.0
        assert rec.uncertainty == 0.0
        assert rec.bound_coarse == 1.0
        assert rec.holds_coarse
        assert not rec.skipped


def test_arnold_quotients_clear_coarse_floor(ctx):
    lift = ctx.arnold_half
    recs = quotient_sequence(lift, ctx.t_golden, 7, alpha=GOLDEN_MEAN,
                             alpha_radius=ctx.alpha_radius)
    M = distortion_constants(lift).M
    floor = math.exp(-M)
    kept = [r for r in recs if not r.skipped]
    assert [r.k for r in kept] == list(range(8))
    for rec in kept:
        assert rec.holds_coarse
        assert rec.quotient + rec.uncertainty >= floor
        assert rec.bound_coarse == pytest.approx(floor, rel=1e-12)
    # the limsup diagnostic: a running maximum never decreases
    q = [r.quotient for r in kept]
    running = np.maximum.accumulate(q)
    assert running[-1] == max(q)
    assert q[-1] == pytest.approx(1.042275, rel=1e-4)


def test_arnold_refined_floor_on_upper_convergents(ctx):
    recs = quotient_sequence(ctx.arnold_half, ctx.t_golden, 7,
                             alpha=GOLDEN_MEAN, alpha_radius=ctx.alpha_radius)
    by_k = {r.k: r for r in recs}
    # odd golden convergents from 2/3 on sit above alpha and certify
    for k in (3, 5, 7):
        rec = by_k[k]
        assert rec.bound_refined is not None
        assert rec.ell is not None and rec.ell < 1.0
        assert rec.bound_refined >= rec.bound_coarse
        assert rec.quotient + rec.uncertainty >= rec.bound_refined * (1 - 1e-9)
    assert by_k[5].bound_refined == pytest.approx(0.198295248, rel=1e-6)
    # below alpha there is no plateau on the required side, and the very
    # first upper convergent has too short a return history
    assert by_k[1].note.startswith("refined floor unavailable")
    for k in (0, 2, 4, 6):
        assert by_k[k].note.startswith("refined floor needs the plateau above")
        assert by_k[k].bound_refined is None


def test_quotient_sequence_preconditions(ctx):
    with pytest.raises(PreconditionFailed):
        quotient_sequence(ctx.arnold_half, ctx.t_golden, 0)
    # a locked base parameter has no difference quotients to take
    with pytest.raises(PreconditionFailed):
        quotient_sequence(ctx.arnold_half, 0.01, 4)


def test_boundary_probe_identity_contrast():
    probe = rational_boundary_probe(LiftDescriptor.identity(), Fraction(1, 2),
                                    deltas=(1e-2, 1e-4, 1e-6))
    assert probe.quotients == pytest.approx((1.0, 1.0, 1.0), abs=1e-9)
    assert abs(probe.loglog_slope) <= 1e-6
    assert probe.t_edge == 0.5


def test_boundary_probe_arnold_blows_up():
    probe = rational_boundary_probe(LiftDescriptor.arnold(0.5), Fraction(0, 1),
                                    side="right", deltas=(1e-2, 1e-3, 1e-4, 1e-5))
    q = probe.quotients
    assert all(b > a for a, b in zip(q, q[1:]))
    assert q[-1] / q[0] > 10.0
    # the edge leaves like a square root, so the quotient scales like
    # delta^{-1/2}
    assert probe.loglog_slope == pytest.approx(-0.5, abs=0.1)
    assert probe.t_edge == pytest.approx(0.5 / (2 * math.pi), abs=1e-7)


def test_boundary_probe_left_side_mirrors_right():
    probe = rational_boundary_probe(LiftDescriptor.arnold(0.5), Fraction(0, 1),
                                    side="left", deltas=(1e-2, 1e-3))
    assert probe.quotients[0] == pytest.approx(4.1417, rel=1e-3)
    assert probe.quotients[1] > probe.quotients[0]
    assert probe.t_edge < 0.0


def test_boundary_probe_validates_offsets():
    lift = LiftDescriptor.identity()
    with pytest.raises(PreconditionFailed):
        rational_boundary_probe(lift, Fraction(1, 2), deltas=(1e-4, 1e-3))
    with pytest.raises(PreconditionFailed):
        rational_boundary_probe(lift, Fraction(1, 2), deltas=(1e-2, 1e-9),
                                plateau_tol=1e-9)
