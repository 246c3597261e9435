import math

import numpy as np
import pytest

from ncphase import (
    CheckReport, DeformationSpec, ForceMass, SecondOrderState, TimeGrid, Trajectory,
    compare_trajectories, convergence_order, exact_commutative_trajectory, fd_acceleration,
    integrate_newton, kappa_limit_sweep, newton_residual, simulate_flow, transform_t2,
)


def traj_from(f, dt, t_end=1.0):
    g = TimeGrid(0.0, t_end, dt)
    x = np.stack([f(g.times)] * 3, axis=1)
    return Trajectory(g, x, np.zeros_like(x))


def test_fd_polynomial_exact():
    t, a = fd_acceleration(traj_from(lambda t: t**2 / 2, 1e-2))
    np.testing.assert_allclose(a, 1.0, atol=1e-10)
    assert len(t) == 101 - 4


def test_fd_sine():
    t, a = fd_acceleration(traj_from(np.sin, 1e-3))
    np.testing.assert_allclose(a[:, 0], -np.sin(t), atol=1e-9)


def test_fd_constant():
    _, a = fd_acceleration(traj_from(lambda t: 0 * t + 3.0, 0.1))
    assert np.all(a == 0)


def test_fd_needs_five_samples():
    with pytest.raises(ValueError):
        fd_acceleration(traj_from(lambda t: t, 0.5, t_end=1.5))


def test_residual_exact_solution():
    fm = ForceMass([1.0, -2.0, 0.5], 2.0)
    tr = exact_commutative_trajectory(fm, SecondOrderState([0, 0, 0], [0, 0, 0]), TimeGrid(0, 1, 1e-3))
    rep = newton_residual(tr, fm)
    assert rep.measured <= 1e-9 and rep.passed


def test_residual_t2_pipeline():
    spec, fm = DeformationSpec.lie2(1.0), ForceMass([0, 0, 1])
    deformed = integrate_newton(spec, fm, SecondOrderState([1, 0, 0], [0, 0, 0]), TimeGrid(0, 1, 1e-3))
    assert newton_residual(transform_t2(deformed, spec, fm), fm).passed


def test_residual_lie1_without_transform_fails():
    # the two Newton systems differ by the constant (m/kappa) (-F_tau, F_rho)
    fm = ForceMass([4.0, 6.0, 0.0], 1.5)
    tr = integrate_newton(DeformationSpec.lie1(2.0), fm, SecondOrderState([0, 0, 0], [0, 0, 0]),
                          TimeGrid(0, 1, 1e-3))
    rep = newton_residual(tr, fm)
    assert not rep.passed
    assert rep.measured == pytest.approx(1.5 * 6.0 / 2.0, rel=1e-8)


def test_residual_decreases_with_dt():
    spec, fm = DeformationSpec.lie2(1.0), ForceMass([0, 0, 1])
    res = []
    for dt in (4e-3, 2e-3, 1e-3):
        deformed = integrate_newton(spec, fm, SecondOrderState([1, 0, 0], [0, 0, 0]), TimeGrid(0, 1, dt))
        res.append(newton_residual(transform_t2(deformed, spec, fm), fm).measured)
    assert all(b <= 2 * a for a, b in zip(res, res[1:]))


def test_compare_self_is_zero():
    tr = integrate_newton(DeformationSpec.lie2(1.0), ForceMass([0.3, 0, 1]),
                          SecondOrderState([1, 0, 0], [0, 0, 0]), TimeGrid(0.5, 1.5, 1e-2))
    r = compare_trajectories(tr, tr)
    assert (r.max_abs, r.l2, r.argmax_time) == (0.0, 0.0, 0.5)


def test_compare_canonical_vs_commutative():
    fm, s0, g = ForceMass([1, 2, 3]), SecondOrderState([0.1, 0, 0], [0, 0.3, 0]), TimeGrid(0, 1, 1e-3)
    r = compare_trajectories(simulate_flow(DeformationSpec.canonical(0.4), fm, s0, g),
                             simulate_flow(DeformationSpec.commutative(), fm, s0, g))
    assert r.max_abs <= 1e-9


def test_compare_lie1_vs_commutative():
    fm, s0, g = ForceMass([4, 6, 0]), SecondOrderState([0, 0, 0], [0, 0, 0]), TimeGrid(0, 1, 1e-3)
    r = compare_trajectories(integrate_newton(DeformationSpec.lie1(2.0), fm, s0, g),
                             integrate_newton(DeformationSpec.commutative(), fm, s0, g))
    assert r.max_abs == pytest.approx(1.5, abs=1e-6)
    assert r.argmax_time == 1.0


def test_compare_grid_mismatch():
    fm, s0 = ForceMass([1, 0, 0]), SecondOrderState([0, 0, 0], [0, 0, 0])
    a = exact_commutative_trajectory(fm, s0, TimeGrid(0, 1, 0.1))
    b = exact_commutative_trajectory(fm, s0, TimeGrid(0, 1, 0.05))
    with pytest.raises(ValueError):
        compare_trajectories(a, b)


def test_convergence_order_examples():
    assert convergence_order([(0.1, 1e-4), (0.05, 6.25e-6)]) == pytest.approx(4.0)
    assert convergence_order([(0.1, 1e-3), (0.05, 1e-3), (0.025, 1e-3)]) == pytest.approx(0.0, abs=1e-12)
    assert convergence_order([(0.1, 1e-3), (0.05, 0.0), (0.025, 0.0)]) == math.inf
    with pytest.raises(ValueError):
        convergence_order([(0.05, 1e-3), (0.1, 1e-4)])


def test_limit_sweep_lie1_slope():
    rep = kappa_limit_sweep(DeformationSpec.lie1(1.0), ForceMass([4, 6, 0]),
                            SecondOrderState([0, 0, 0], [0, 0, 0]), TimeGrid(0, 1, 1e-3), (1, 2, 4, 8))
    assert rep.measured == pytest.approx(-1.0, abs=0.05)
    assert rep.passed


def test_limit_sweep_zero_force_sentinel():
    rep = kappa_limit_sweep(DeformationSpec.lie1(1.0), ForceMass([0, 0, 0]),
                            SecondOrderState([0, 0, 0], [1, 0, 0]), TimeGrid(0, 1, 1e-2))
    assert rep.measured == -math.inf and rep.passed


def test_limit_sweep_quadratic():
    rep = kappa_limit_sweep(DeformationSpec.quadratic(1.0), ForceMass([0.5, -0.3, 1.0]),
                            SecondOrderState([1, 0, 0], [0, 0.5, 0]), TimeGrid(0, 0.5, 1e-3))
    assert rep.measured <= -0.9


def test_limit_sweep_needs_increasing_factors():
    with pytest.raises(ValueError):
        kappa_limit_sweep(DeformationSpec.lie1(1.0), ForceMass([1, 0, 0]),
                          SecondOrderState([0, 0, 0], [0, 0, 0]), TimeGrid(0, 1, 0.1), (2, 1))


@pytest.mark.parametrize("measured, tol, passed", [(0.5, 1.0, True), (1.0, 1.0, False), (-math.inf, -0.9, True)])
def test_report_semantics(measured, tol, passed):
    r = CheckReport("x", measured, tol)
    assert r.passed is passed
    assert r.line().split()[1] == ("PASS" if passed else "FAIL")
