"""Plateau endpoints, staircase inversion, window measures, and sweeps."""

import math
from fractions import Fraction

import pytest

from rotascope import (
    GOLDEN_MEAN,
    SQRT2_MINUS_1,
    FamilyPoint,
    LiftDescriptor,
    PreconditionFailed,
    QCapExceeded,
    distortion_constants,
    inverse_rho,
    measure_Jd,
    plateau_endpoints,
    rotation_farey,
    sweep,
)


def test_plateau_identity_is_a_point():
    pl = plateau_endpoints(LiftDescriptor.identity(), Fraction(1, 3))
    assert pl.t_left == pl.t_right == pytest.approx(1.0 / 3.0, abs=1e-15)
    assert pl.width == 0.0


def test_plateau_arnold_zero_matches_analytic_width():
    # a fixed point needs t = -(K/2pi) sin 2pi x to be solvable: |t| <= K/2pi
    for K in (0.5, 0.9):
        pl = plateau_endpoints(LiftDescriptor.arnold(K), Fraction(0, 1), tol=1e-10)
        half_width = K / (2.0 * math.pi)
        assert pl.t_right == pytest.approx(half_width, abs=1e-9)
        assert pl.t_left == pytest.approx(-half_width, abs=1e-9)


def test_plateau_translates_with_integer_shift():
    # rho(t + 1) = rho(t) + 1 lets the solver reach targets outside [-1/2, 1/2]
    lift = LiftDescriptor.arnold(0.5)
    base = plateau_endpoints(lift, Fraction(0, 1), tol=1e-10)
    moved = plateau_endpoints(lift, Fraction(2, 1), tol=1e-10)
    assert moved.t_left == pytest.approx(base.t_left + 2.0, abs=2e-10)
    assert moved.t_right == pytest.approx(base.t_right + 2.0, abs=2e-10)


def test_plateau_edges_agree_with_locking_scan():
    # just inside both endpoints the map locks at 1/2, just outside it does not
    lift = LiftDescriptor.arnold(0.9)
    pl = plateau_endpoints(lift, Fraction(1, 2), tol=1e-8)
    assert pl.width > 0.06

    def locked_at(t):
        try:
            est = rotation_farey(FamilyPoint(lift, t), 1e-8, 4000)
        except QCapExceeded as exc:
            est = exc.estimate
        return est.locked

    assert locked_at(pl.t_left + 1e-6) == Fraction(1, 2)
    assert locked_at(pl.t_right - 1e-6) == Fraction(1, 2)
    assert locked_at(pl.t_left - 1e-6) != Fraction(1, 2)
    assert locked_at(pl.t_right + 1e-6) != Fraction(1, 2)


def test_plateau_nesting_in_tolerance():
    lift = LiftDescriptor.arnold(0.9)
    coarse = plateau_endpoints(lift, Fraction(0, 1), tol=1e-6)
    fine = plateau_endpoints(lift, Fraction(0, 1), tol=1e-10)
    assert fine.t_left >= coarse.t_left - 1e-6
    assert fine.t_right <= coarse.t_right + 1e-6


def test_inverse_rho_identity():
    t = inverse_rho(LiftDescriptor.identity(), GOLDEN_MEAN, tol=1e-9)
    assert t == pytest.approx(GOLDEN_MEAN, abs=1e-9)


def test_inverse_rho_preserves_order():
    lift = LiftDescriptor.arnold(0.5)
    t_a = inverse_rho(lift, SQRT2_MINUS_1, tol=1e-4)
    t_b = inverse_rho(lift, GOLDEN_MEAN, tol=1e-4)
    assert t_a == pytest.approx(0.41645, abs=5e-4)
    assert t_b == pytest.approx(0.61448, abs=5e-4)
    assert t_a < t_b


def test_inverse_rho_self_consistent(fp_golden, t_golden):
    # the session fixture solves inverse_rho at 1e-9; its rho enclosure must
    # cover the golden mean
    try:
        est = rotation_farey(fp_golden, 1e-9, 40000)
    except QCapExceeded as exc:
        est = exc.estimate
    assert est.lo - 2e-9 <= GOLDEN_MEAN <= est.hi + 2e-9
    assert abs(t_golden) < 1.0


def test_measure_jd_identity_hits_bound():
    # rho = id makes the window measure exactly 2 q^{-d}, the M = 0 bound
    m = measure_Jd(LiftDescriptor.identity(), Fraction(1, 5), 3.5,
                   tol=1e-11, q_cap=10**7)
    assert m.measure == pytest.approx(2.0 * 5.0**-3.5, abs=1e-10)
    assert m.bound == pytest.approx(2.0 * 5.0**-3.5, rel=1e-12)
    assert m.plateau.width == 0.0
    assert m.t_minus < float(m.pq) < m.t_plus


def test_measure_jd_arnold_below_bound():
    lift = LiftDescriptor.arnold(0.5)
    m = measure_Jd(lift, Fraction(1, 5), 3.5, tol=1e-6)
    M = distortion_constants(lift).M
    assert m.bound == pytest.approx(2.0 * math.exp(M) * 5.0**-3.5, rel=1e-12)
    assert 0.0 < m.measure <= m.bound
    assert m.measure < 0.05 * m.bound  # far from saturation for this family


def test_measure_jd_preconditions():
    lift = LiftDescriptor.arnold(0.5)
    with pytest.raises(PreconditionFailed):
        measure_Jd(lift, Fraction(1, 1), 3.5)
    with pytest.raises(PreconditionFailed):
        measure_Jd(lift, Fraction(1, 5), 2.5)


def test_sweep_identity_reproduces_diagonal():
    sw = sweep(LiftDescriptor.identity(), -0.5, 0.5, samples=11, tol=1e-9)
    assert len(sw.ts) == 11
    for t, est in zip(sw.ts, sw.estimates):
        assert est.value == t
        assert est.radius == 0.0
    assert sw.monotonicity_violations() == []


def test_sweep_arnold_flags_plateau_samples():
    # every sample below the analytic 0/1 plateau edge K/2pi must lock there
    sw = sweep(LiftDescriptor.arnold(0.9), 0.0, 0.2, samples=201,
               tol=1e-5, q_cap=500)
    edge = 0.9 / (2.0 * math.pi)
    inside = [(t, e) for t, e in zip(sw.ts, sw.estimates) if t < edge - 1e-4]
    assert len(inside) > 100
    assert all(e.locked == Fraction(0, 1) for _, e in inside)
    assert sw.monotonicity_violations() == []


def test_sweep_csv_shape():
    sw = sweep(LiftDescriptor.identity(), 0.0, 0.5, samples=3, tol=1e-9)
    lines = sw.to_csv().strip().splitlines()
    assert lines[0] == "t,rho,radius,locked_p,locked_q"
    assert len(lines) == 4
    assert lines[1] == "0.0,0.0,0.0,0,1"
