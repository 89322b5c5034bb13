"""Return-time interval combinatorics and distortion certificates."""

import math
from fractions import Fraction

import pytest

from rotascope import (
    GOLDEN_MEAN,
    CombinatoricsViolation,
    DynInterval,
    FamilyPoint,
    LiftDescriptor,
    PreconditionFailed,
    distortion_constants,
    distortion_ratio_check,
    eval_lift,
    hat_ell_bound_check,
    iterate,
    plateau_endpoints,
    return_partition,
)


def _rotation_fp():
    return FamilyPoint(LiftDescriptor.identity(), GOLDEN_MEAN)


def test_partition_pure_rotation_geometry():
    # closest returns of the golden mean at depth 4: q_n = 5, q_{n-1} = 3;
    # L = [x, x - 5 alpha + 3] has the closest-return length |5 alpha - 3|
    part = return_partition(_rotation_fp(), 0.0, n_index=4)
    a = GOLDEN_MEAN
    assert part.pq == Fraction(3, 5)
    assert part.pq_prev == Fraction(2, 3)
    assert part.a_next == 1
    assert part.L.length == pytest.approx(abs(5 * a - 3), abs=1e-12)
    assert part.K.length == pytest.approx(abs(3 * a - 2), abs=1e-12)
    # the tightest gap between the q_n forward images is the next return
    assert part.margin_imagesL == pytest.approx(abs(8 * a - 5), abs=1e-9)
    assert len(part.imagesL) == 5
    assert len(part.imagesK) == 5


def test_partition_margins_exposed_as_dict():
    part = return_partition(_rotation_fp(), 0.0, n_index=4)
    assert set(part.margins) == {"imagesL", "imagesK", "chain"}
    assert all(v > 1e-12 for v in part.margins.values())


def test_partition_arnold_at_golden_parameter(fp_golden, alpha_radius):
    part = return_partition(fp_golden, 0.0, n_index=4,
                            alpha=GOLDEN_MEAN, alpha_radius=alpha_radius)
    assert part.pq == Fraction(3, 5)
    assert part.L.length == pytest.approx(0.0830657823, rel=1e-6)
    assert all(v > 1e-12 for v in part.margins.values())
    # the backward chain stays inside K
    assert len(part.chain) == part.a_next


def test_partition_needs_consistent_alpha(fp_golden):
    with pytest.raises(CombinatoricsViolation):
        return_partition(fp_golden, 0.0, n_index=4, alpha=0.61, alpha_radius=0.0)


def test_partition_index_floor():
    with pytest.raises(PreconditionFailed):
        return_partition(_rotation_fp(), 0.0, n_index=0)


def test_distortion_ratio_identity_is_one():
    part = return_partition(_rotation_fp(), 0.0, n_index=4)
    rec = distortion_ratio_check(_rotation_fp(), part.L, 5)
    assert rec.ratio == 1.0
    assert rec.bound == 1.0


def test_distortion_ratio_arnold_within_bound(fp_golden, alpha_radius):
    part = return_partition(fp_golden, 0.0, n_index=5,
                            alpha=GOLDEN_MEAN, alpha_radius=alpha_radius)
    assert part.pq == Fraction(5, 8)
    rec = distortion_ratio_check(fp_golden, part.L, 8)
    M = distortion_constants(fp_golden.lift).M
    assert 1.0 <= rec.ratio <= rec.bound
    assert rec.bound == pytest.approx(math.exp(M * rec.total_length), rel=1e-12)
    assert rec.total_length < 1.0
    assert rec.ratio == pytest.approx(1.00798, rel=1e-3)


def test_distortion_ratio_rejects_overlapping_iterates():
    # an interval of length 0.6 cannot have disjoint images under a rotation
    with pytest.raises(PreconditionFailed):
        distortion_ratio_check(_rotation_fp(), DynInterval(0.0, 0.6), 3)


def test_hat_bound_identity_is_equality():
    rec = hat_ell_bound_check(_rotation_fp(), 0.0, n_index=3)
    assert rec.pq == Fraction(2, 3)
    assert rec.quotient == 1.0
    assert rec.bound == 1.0
    assert rec.M == 0.0
    assert rec.holds
    assert rec.ells[0] == pytest.approx(0.4376941012, abs=1e-9)


def test_hat_bound_arnold_certifies(fp_golden, alpha_radius):
    rec = hat_ell_bound_check(fp_golden, 0.0, n_index=5,
                              alpha=GOLDEN_MEAN, alpha_radius=alpha_radius)
    assert rec.pq == Fraction(5, 8)
    assert rec.ells[0] < 1.0
    assert rec.quotient + rec.uncertainty >= rec.bound
    assert rec.bound == pytest.approx(math.exp(-rec.M * rec.ells[0]), rel=1e-12)
    assert rec.quotient == pytest.approx(1.043731, rel=1e-4)
    # golden mean partial quotients are all 1, so the chain has one term and
    # no cross-anchor comparisons
    assert rec.a_next == 1
    assert rec.chain_sum == rec.ells[0]
    assert rec.chain_sum <= 1.0
    assert rec.comparability == ()
    assert rec.min_tau > 0.0
    assert rec.holds


def test_hat_bound_requires_plateau_above(fp_golden, alpha_radius):
    # even-index golden convergents sit below alpha; their plateau cannot
    # serve as the upper comparison point
    with pytest.raises(PreconditionFailed):
        hat_ell_bound_check(fp_golden, 0.0, n_index=4,
                            alpha=GOLDEN_MEAN, alpha_radius=alpha_radius)


def test_hat_bound_index_floor():
    with pytest.raises(PreconditionFailed):
        hat_ell_bound_check(_rotation_fp(), 0.0, n_index=1)


def test_chain_interval_lengths_equal_parameter_gap(fp_golden):
    # I_i = [F_base(y), F_edge(y)] at y = F_edge^{i-1}(x): both lifts share
    # the oscillatory part, so each length is exactly the parameter offset
    pl = plateau_endpoints(fp_golden.lift, Fraction(5, 8), tol=1e-10)
    gap = pl.t_left - fp_golden.t
    assert gap > 0.0
    fp_edge = FamilyPoint(fp_golden.lift, pl.t_left)
    ys = iterate(fp_edge, 0.0, 7).points
    for y in ys:
        length = eval_lift(fp_edge, y, 0) - eval_lift(fp_golden, y, 0)
        assert length == pytest.approx(gap, abs=1e-15)
