import numpy as np
import pytest

from ncphase import (
    DeformationSpec, ForceMass, Hamiltonian, IntegrationBlowup, Kind, SecondOrderState, TimeGrid,
    broken_control_structure, compare_trajectories, energy_along, hamiltonian_value,
    hamiltonian_vector_field, integrate_flow, integrate_newton, make_structure, simulate_flow,
)
from ncphase.poisson import ConfigurationError

from conftest import ALL_SPECS


def lie2_exact(t, omega=1.0):
    # u = x_k + i x_l = (1 - i omega t) exp(i omega t)
    u = (1 - 1j * omega * t) * np.exp(1j * omega * t)
    return u.real, u.imag


@pytest.mark.parametrize("F, m, x, p, expected", [
    ([0, 0, 0], 1.0, [7, 8, 9], [1, 0, 0], 0.5),
    ([1, 0, 0], 2.0, [3, 0, 0], [0, 0, 0], -3.0),
    ([1, 1, 1], 1.0, [0, 0, 0], [1, 1, 1], 1.5),
])
def test_hamiltonian_value(F, m, x, p, expected):
    assert hamiltonian_value(Hamiltonian(ForceMass(F, m)), np.r_[x, p]) == expected


def test_vector_field_commutative():
    zdot = hamiltonian_vector_field(make_structure(DeformationSpec.commutative()),
                                    Hamiltonian(ForceMass([0, 0, 1])), [5, 6, 7, 1, 0, 0], 0.0)
    np.testing.assert_array_equal(zdot, [1, 0, 0, 0, 0, 1])


def test_vector_field_lie1():
    zdot = hamiltonian_vector_field(make_structure(DeformationSpec.lie1(2.0)),
                                    Hamiltonian(ForceMass([4, 6, 0])), [0, 0, 0, 0, 0, 0], 1.0)
    np.testing.assert_allclose(zdot, [-3, 2, 0, 4, 6, 0])


def test_vector_field_rest_point(spec):
    zdot = hamiltonian_vector_field(make_structure(spec), Hamiltonian(ForceMass([0, 0, 0])),
                                    [0.3, -2, 1, 0, 0, 0], 1.3)
    assert np.all(zdot == 0)


def test_grid():
    g = TimeGrid(0.0, 1.0, 0.25)
    assert g.n_nodes == 5
    np.testing.assert_array_equal(g.times, [0, 0.25, 0.5, 0.75, 1.0])
    for bad in [(0, 1, 0), (1, 1, 0.1), (0, 1, 0.3)]:
        with pytest.raises(ConfigurationError):
            TimeGrid(*bad)


def test_flow_free_fall_exact():
    tr = integrate_flow(make_structure(DeformationSpec.commutative()), Hamiltonian(ForceMass([0, 0, 1])),
                        np.zeros(6), TimeGrid(0, 1, 1e-3))
    np.testing.assert_allclose(tr.x[-1], [0, 0, 0.5], atol=1e-12)
    assert tr.method == "rk4-flow"


def test_flow_canonical_matches_commutative():
    fm = ForceMass([0, 0, 1])
    s0 = SecondOrderState([0, 0, 0], [0, 0, 0])
    g = TimeGrid(0, 1, 1e-3)
    a = simulate_flow(DeformationSpec.canonical(0.5), fm, s0, g)
    b = simulate_flow(DeformationSpec.commutative(), fm, s0, g)
    assert compare_trajectories(a, b).max_abs <= 1e-9


@pytest.mark.parametrize("integrate", ["flow", "newton"])
def test_lie2_rotating_solution(integrate):
    omega, kappa_hat = 1.0, 1.0
    fm = ForceMass([0, 0, omega * kappa_hat])
    spec = DeformationSpec.lie2(kappa_hat)
    s0 = SecondOrderState([1, 0, 0], [0, 0, 0])
    g = TimeGrid(0, 2, 1e-3)
    tr = (simulate_flow if integrate == "flow" else integrate_newton)(spec, fm, s0, g)
    xk, xl = lie2_exact(g.times, omega)
    assert max(np.abs(tr.x[:, 0] - xk).max(), np.abs(tr.x[:, 1] - xl).max()) <= 1e-6


def test_flow_velocity_is_true_velocity():
    spec = DeformationSpec.lie1(2.0)
    fm = ForceMass([4, 6, 0])
    tr = simulate_flow(spec, fm, SecondOrderState([0, 0, 0], [0, 0, 0]), TimeGrid(0, 1, 1e-3))
    np.testing.assert_allclose(tr.v[-1], [1.0, 8.0, 0.0], atol=1e-12)
    np.testing.assert_allclose(tr.p[-1], [4.0, 6.0, 0.0], atol=1e-12)


def test_newton_lie1_closed_form():
    tr = integrate_newton(DeformationSpec.lie1(2.0), ForceMass([4, 6, 0]),
                          SecondOrderState([0, 0, 0], [0, 0, 0]), TimeGrid(0, 1, 1e-3))
    np.testing.assert_allclose(tr.x[-1], [0.5, 4.0, 0.0], atol=1e-12)
    assert tr.method == "rk4-newton"


def test_newton_free_motion_exact():
    s0 = SecondOrderState([1, -2, 3], [0.5, 0.25, -1])
    g = TimeGrid(0, 1, 0.125)
    tr = integrate_newton(DeformationSpec.commutative(), ForceMass([0, 0, 0]), s0, g)
    np.testing.assert_array_equal(tr.x, s0.x + s0.v * g.times[:, None])


def test_newton_quadratic_undeformed_limit():
    tr = integrate_newton(DeformationSpec.quadratic(1e9), ForceMass([1, 0, 0]),
                          SecondOrderState([0, 0, 0], [0, 0, 0]), TimeGrid(0, 1, 1e-3))
    np.testing.assert_allclose(tr.x[-1], [0.5, 0, 0], atol=1e-8)


def test_energy_conserved(spec):
    fm = ForceMass([1.0, -0.5, 0.8])
    tr = simulate_flow(spec, fm, SecondOrderState([0.2, -0.1, 0.3], [0.5, -0.3, 0.1]), TimeGrid(0, 2, 1e-3))
    H = energy_along(tr)
    assert np.abs(H - H[0]).max() <= 1e-7


def test_energy_needs_momenta():
    tr = integrate_newton(DeformationSpec.commutative(), ForceMass([1, 0, 0]),
                          SecondOrderState([0, 0, 0], [0, 0, 0]), TimeGrid(0, 1, 0.1))
    with pytest.raises(ValueError):
        energy_along(tr)


@pytest.mark.parametrize("kind", list(Kind))
def test_flow_newton_cross_model(kind):
    from ncphase.acceptance import random_case
    rng = np.random.default_rng(99)
    g = TimeGrid(0, 1, 1e-3)
    for _ in range(3):
        spec, fm, s0 = random_case(kind, rng)
        a = simulate_flow(spec, fm, s0, g)
        b = integrate_newton(spec, fm, s0, g)
        assert compare_trajectories(a, b).max_abs <= 1e-6


def test_rk4_order_lie2():
    spec, fm = DeformationSpec.lie2(1.0), ForceMass([0, 0, 1])
    s0 = SecondOrderState([1, 0, 0], [0, 0, 0])
    errs = []
    for dt in (4e-3, 2e-3, 1e-3):
        tr = integrate_newton(spec, fm, s0, TimeGrid(0, 2, dt))
        xk, xl = lie2_exact(tr.t)
        errs.append(max(np.abs(tr.x[:, 0] - xk).max(), np.abs(tr.x[:, 1] - xl).max()))
    order = np.polyfit(np.log([4e-3, 2e-3, 1e-3]), np.log(errs), 1)[0]
    assert 3.8 <= order <= 4.2


def test_deterministic(spec):
    fm = ForceMass([0.4, 0.2, -1])
    s0 = SecondOrderState([0.1, 0.2, 0.3], [-0.3, 0.2, 0.1])
    g = TimeGrid(0, 0.5, 1e-3)
    a, b = simulate_flow(spec, fm, s0, g), simulate_flow(spec, fm, s0, g)
    assert np.array_equal(a.x, b.x) and np.array_equal(a.v, b.v)


def test_rk45_matches_rk4(spec):
    fm = ForceMass([0.4, 0.2, -1])
    s0 = SecondOrderState([0.1, 0.2, 0.3], [-0.3, 0.2, 0.1])
    g = TimeGrid(0, 1, 1e-2)
    for run in (simulate_flow, integrate_newton):
        a = run(spec, fm, s0, g)
        b = run(spec, fm, s0, g, method="rk45", rtol=1e-10)
        assert compare_trajectories(a, b).max_abs <= 1e-7


def test_generic_structure_path():
    # the python fallback for callable structures agrees with the compiled kernel
    from ncphase import PoissonStructure
    s = PoissonStructure("commutative", {(i, 3 + i): (lambda z, t: 1.0) for i in range(3)})
    h = Hamiltonian(ForceMass([0.3, 0, -1]))
    g = TimeGrid(0, 0.5, 1e-2)
    a = integrate_flow(s, h, [0, 0, 0, 1, 0, 0], g)
    b = integrate_flow(make_structure(DeformationSpec.commutative()), h, [0, 0, 0, 1, 0, 0], g)
    np.testing.assert_allclose(a.x, b.x, atol=1e-14)
    np.testing.assert_allclose(a.v, b.v, atol=1e-14)


def test_blowup_detected():
    # rotation rate F_gamma t / kappa_bar far beyond 1/dt makes RK4 unstable
    with pytest.raises(IntegrationBlowup) as info:
        integrate_newton(DeformationSpec.quadratic(1e-3), ForceMass([0, 0, 50]),
                         SecondOrderState([1e3, 0, 0], [0, 0, 0]), TimeGrid(0, 50, 1e-2))
    assert info.value.node > 0


def test_blowup_generic_path():
    s = broken_control_structure()
    with pytest.raises(IntegrationBlowup):
        integrate_flow(s, Hamiltonian(ForceMass([0, 1e6, 0])), [1e6, 0, 0, 0, 0, 0], TimeGrid(0, 1, 0.5))
