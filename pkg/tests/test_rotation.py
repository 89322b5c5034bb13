"""Rotation number estimators: Birkhoff averaging and Farey refinement."""

from fractions import Fraction

import pytest

from rotascope import (
    GOLDEN_MEAN,
    FamilyPoint,
    LiftDescriptor,
    QCapExceeded,
    rotation_birkhoff,
    rotation_farey,
)


def test_birkhoff_pure_rotation():
    fp = FamilyPoint(LiftDescriptor.identity(), 0.3)
    est = rotation_birkhoff(fp, 0.0, 1000)
    assert est.value == pytest.approx(0.3, abs=1e-12)
    assert est.radius == 0.001
    assert est.method == "birkhoff"
    assert est.n_used == 1000


def test_birkhoff_fixed_point_gives_zero():
    # x = 0 is fixed for the K=0.5 family at t = 0, so the average is 0 at any n
    fp = FamilyPoint(LiftDescriptor.arnold(0.5), 0.0)
    assert rotation_birkhoff(fp, 0.0, 50).value == 0.0
    assert rotation_birkhoff(fp, 0.0, 5000).value == 0.0


def test_birkhoff_value_inside_farey_enclosure():
    fp = FamilyPoint(LiftDescriptor.arnold(0.9), 0.25)
    bb = rotation_birkhoff(fp, 0.0, 10**5)
    try:
        ff = rotation_farey(fp, 1e-9, 10**4)
    except QCapExceeded as exc:
        ff = exc.estimate
    assert ff.lo - bb.radius <= bb.value <= ff.hi + bb.radius


def test_farey_identity_locks_at_half():
    est = rotation_farey(FamilyPoint(LiftDescriptor.identity(), 0.5), 1e-9)
    assert est.value == 0.5
    assert est.radius == 0.0
    assert est.locked == Fraction(1, 2)


def test_farey_pure_rotation_is_exact():
    # rho(t) = t for the identity family, reported with zero radius; a float
    # parameter with a huge reduced denominator is not flagged as locked
    est = rotation_farey(FamilyPoint(LiftDescriptor.identity(), GOLDEN_MEAN), 1e-9)
    assert est.value == GOLDEN_MEAN
    assert est.radius == 0.0
    assert est.locked is None

    est = rotation_farey(FamilyPoint(LiftDescriptor.identity(), 0.25), 1e-9)
    assert est.locked == Fraction(1, 4)


def test_farey_locks_inside_plateau():
    # 0.01 < K/2pi ~ 0.0796, inside the 0/1 plateau of the K=0.5 family
    est = rotation_farey(FamilyPoint(LiftDescriptor.arnold(0.5), 0.01), 1e-9)
    assert est.locked == Fraction(0, 1)
    assert est.value == 0.0
    assert est.radius == 0.0


def test_farey_unlocked_enclosure_contains_golden(fp_golden):
    try:
        est = rotation_farey(fp_golden, 1e-9, 40000)
    except QCapExceeded as exc:
        est = exc.estimate
    assert est.locked is None
    assert est.radius <= 1e-8
    assert est.lo <= GOLDEN_MEAN <= est.hi


def test_qcap_estimate_is_still_valid(fp_golden):
    with pytest.raises(QCapExceeded) as ei:
        rotation_farey(fp_golden, 1e-15, 100)
    est = ei.value.estimate
    assert est.lo <= GOLDEN_MEAN <= est.hi
    assert est.radius < 1e-3


def test_farey_enclosures_ordered_in_t():
    lift = LiftDescriptor.arnold(0.5)
    estimates = []
    for t in (0.10, 0.30, 0.45):
        try:
            estimates.append(rotation_farey(FamilyPoint(lift, t), 1e-6, 4000))
        except QCapExceeded as exc:
            estimates.append(exc.estimate)
    assert estimates[0].hi <= estimates[1].lo + 1e-12
    assert estimates[1].hi <= estimates[2].lo + 1e-12


def test_farey_brackets_stay_unimodular():
    # every recorded bracket (p/q, p'/q') must satisfy p'q - pq' = 1
    track = []
    try:
        rotation_farey(FamilyPoint(LiftDescriptor.arnold(0.5), 0.3), 1e-6,
                       4000, track=track)
    except QCapExceeded as exc:
        _ = exc.estimate
    assert track
    for lo, hi in track:
        assert hi.numerator * lo.denominator - lo.numerator * hi.denominator == 1


def test_farey_brackets_follow_convergents_for_near_rotation():
    # a vanishingly small harmonic keeps the descent logic active while the
    # staircase is that of the rigid rotation; the visited brackets must pick
    # up the golden mean convergents
    lift = LiftDescriptor(sin_coeffs=(1e-13,))
    track = []
    try:
        rotation_farey(FamilyPoint(lift, GOLDEN_MEAN), 1e-8, 10**4, track=track)
    except QCapExceeded as exc:
        pass
    seen = {side for pair in track for side in pair}
    for conv in (Fraction(1, 2), Fraction(2, 3), Fraction(3, 5),
                 Fraction(5, 8), Fraction(8, 13)):
        assert conv in seen
