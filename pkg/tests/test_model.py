import math
from dataclasses import replace

import numpy as np
import pytest

from softimpact import (
    DomainError,
    InfeasibleEnergyError,
    JacobiSetup,
    PhaseState,
    WedgeModel,
    Window,
    background_potential,
    check_conditions,
    jacobi_transform,
    model_from_dict,
    total_energy,
    v20_from_energy,
    wall_background_minimum,
    wall_potential,
)


def fd_gradient(f, q, h=1e-6):
    """Central-difference gradient oracle."""
    q = np.asarray(q, dtype=float)
    g = np.zeros_like(q)
    for j in range(q.size):
        qp, qm = q.copy(), q.copy()
        qp[j] += h
        qm[j] -= h
        g[j] = (f(qp) - f(qm)) / (2.0 * h)
    return g


# ---------------------------------------------------------------------------
# mass-weighted coordinates


def test_jacobi_origin_maps_to_origin():
    setup = JacobiSetup.from_masses(1.0, 2.0, 3.0)
    assert jacobi_transform(0.0, 0.0, setup) == (0.0, 0.0)


def test_jacobi_equal_masses():
    setup = JacobiSetup.from_masses(1.0, 1.0, 1.0)
    assert setup.a_hat == pytest.approx(math.sqrt(2.0 / 3.0), rel=1e-14)
    assert setup.beta == pytest.approx(math.pi / 3.0, rel=1e-14)
    q1, q2 = jacobi_transform(1.0, 0.0, setup)
    assert q1 == pytest.approx(math.sqrt(2.0 / 3.0), rel=1e-14)
    assert q2 == 0.0


def test_jacobi_linearity():
    rng = np.random.default_rng(7)
    setup = JacobiSetup.from_masses(1.2, 0.9, 2.4)
    for _ in range(25):
        r1, r2, a = rng.uniform(-5, 5, size=3)
        q = np.array(jacobi_transform(r1, r2, setup))
        qa = np.array(jacobi_transform(a * r1, a * r2, setup))
        assert np.allclose(qa, a * q, rtol=0, atol=1e-12 * max(1.0, np.abs(q).max()))


def test_jacobi_rejects_bad_masses():
    with pytest.raises(DomainError):
        JacobiSetup.from_masses(1.0, -1.0, 1.0)
    with pytest.raises(DomainError):
        JacobiSetup(m_a=1.0, m_b=1.0, m_c=1.0, a_hat=1.0, b_hat=1.0, beta=1.0)


# ---------------------------------------------------------------------------
# potentials


def test_background_vanishes_at_saddle(demo_model):
    value, grad = background_potential(demo_model, [demo_model.u1s, demo_model.u2s])
    assert value == 0.0
    assert np.all(grad == 0.0)


def test_background_value_on_axis(demo_model):
    value, _ = background_potential(demo_model, [9.23, 0.0])
    assert value == pytest.approx(0.5 * 6.73**2, rel=1e-15)


def test_background_three_dof_reduces_at_rest(demo_model):
    m3 = replace(demo_model, kappa=math.sqrt(3.0), u3s=0.0, delta=0.0)
    v2, _ = background_potential(demo_model, [4.0, 1.0])
    v3, _ = background_potential(m3, [4.0, 1.0, 0.0])
    assert v3 == v2


def test_background_gradient_matches_finite_differences(demo_model):
    rng = np.random.default_rng(11)
    m3 = replace(demo_model, kappa=math.sqrt(3.0), u3s=0.3, delta=0.2)
    for model, d in ((demo_model, 2), (m3, 3)):
        for _ in range(20):
            q = rng.uniform(-3, 8, size=d)
            _, grad = background_potential(model, q)
            oracle = fd_gradient(lambda x: background_potential(model, x)[0], q)
            assert np.allclose(grad, oracle, rtol=1e-6, atol=1e-7)


def test_background_hessian_is_constant(demo_model):
    # quadratic in the plane: finite-difference Hessian identical across points
    rng = np.random.default_rng(3)
    h = 1e-4

    def hess(q):
        out = np.zeros((2, 2))
        for j in range(2):
            e = np.zeros(2)
            e[j] = h
            gp = background_potential(demo_model, q + e)[1]
            gm = background_potential(demo_model, q - e)[1]
            out[:, j] = (gp - gm) / (2 * h)
        return out

    base = hess(rng.uniform(-2, 6, size=2))
    for _ in range(5):
        assert np.allclose(hess(rng.uniform(-2, 6, size=2)), base, atol=1e-8)


def test_wall_potential_decays_inside(demo_model):
    m = replace(demo_model, epsilon=0.1)
    value, _ = wall_potential(m, [9.0, 0.0])
    assert value < 1e-12 * m.b


def test_wall_potential_value_on_wall(demo_model):
    m = replace(demo_model, epsilon=0.1)
    u1 = 3.0
    q = [u1, u1 * math.tan(m.beta / 2)]
    value, _ = wall_potential(m, q)
    # the opposite wall term is exp(-2 u1 sin(beta/2)/eps) ~ 1e-14
    assert value == pytest.approx(m.b, rel=1e-12)


def test_wall_gradient_matches_finite_differences(demo_model):
    m = replace(demo_model, epsilon=0.1)
    _, grad = wall_potential(m, [3.0, 0.5])
    oracle = fd_gradient(lambda q: wall_potential(m, q)[0], np.array([3.0, 0.5]))
    assert np.allclose(grad, oracle, rtol=1e-6)


def test_wall_gradient_property_random(demo_model):
    rng = np.random.default_rng(19)
    for eps in (0.3, 0.1, 0.02):
        m = replace(demo_model, epsilon=eps)
        count = 0
        while count < 25:
            q = rng.uniform([0.0, -2.0], [6.0, 2.0])
            value, grad = wall_potential(m, q)
            if value <= 1e-10:
                continue
            count += 1
            oracle = fd_gradient(lambda x: wall_potential(m, x)[0], q)
            assert np.allclose(grad, oracle, rtol=1e-5, atol=1e-9 * max(1.0, value / eps))


def test_wall_potential_requires_steepness(demo_model):
    with pytest.raises(DomainError):
        wall_potential(demo_model, [1.0, 0.0])


# ---------------------------------------------------------------------------
# energy bookkeeping


def test_total_energy_hard_wall_reference_state(demo_model):
    s = PhaseState(q=[9.23, 0.0], p=[0.0, 4.89])
    oracle = 4.89**2 / 2 + 0.5 * 6.73**2
    assert total_energy(demo_model, s) == pytest.approx(oracle, abs=1e-12)


def test_total_energy_steep_reference_state(demo_model):
    m = replace(demo_model, epsilon=0.1)
    s = PhaseState(q=[9.23, 0.0], p=[0.0, 4.91])
    wall, _ = wall_potential(m, [9.23, 0.0])
    oracle = 4.91**2 / 2 + 0.5 * 6.73**2 + wall
    assert total_energy(m, s) == pytest.approx(oracle, abs=1e-12)
    assert total_energy(m, s) == pytest.approx(34.70050, abs=1e-10)


def test_total_energy_zero_at_rest_saddle(demo_model):
    s = PhaseState(q=[demo_model.u1s, 0.0], p=[0.0, 0.0])
    assert total_energy(demo_model, s) == 0.0


def test_total_energy_rejects_exterior_at_hard_wall(demo_model):
    with pytest.raises(DomainError):
        total_energy(demo_model, PhaseState(q=[1.0, 4.0], p=[0.0, 0.0]))


def test_v20_round_trip(demo_model):
    s = PhaseState(q=[9.23, 0.0], p=[0.0, 4.88998])
    h = total_energy(demo_model, s)
    assert v20_from_energy(demo_model, h, 9.23, 0.0, 0.0) == pytest.approx(4.88998, rel=1e-13)


def test_v20_round_trip_property(demo_model):
    rng = np.random.default_rng(23)
    for eps in (0.0, 0.05, 0.2):
        m = replace(demo_model, epsilon=eps)
        for _ in range(20):
            u1 = rng.uniform(1.0, 9.0)
            u2 = rng.uniform(-0.4, 0.4) * u1 * m.tan_half
            v1 = rng.uniform(-3, 3)
            v2 = rng.uniform(0.0, 6.0)
            s = PhaseState(q=[u1, u2], p=[v1, v2])
            h = total_energy(m, s)
            back = v20_from_energy(m, h, u1, v1, u2)
            assert back == pytest.approx(v2, rel=1e-12, abs=1e-12)


def test_v20_zero_margin(demo_model):
    h = 0.5 * (9.0 - demo_model.u1s) ** 2
    assert v20_from_energy(demo_model, h, 9.0, 0.0, 0.0) == 0.0


def test_v20_infeasible(demo_model):
    h = 0.5 * (9.0 - demo_model.u1s) ** 2
    with pytest.raises(InfeasibleEnergyError):
        v20_from_energy(demo_model, h - 1.0, 9.0, 0.0, 0.0)


def test_wall_background_minimum_matches_sampling(demo_model):
    win = Window(0.0, 12.0, -4.0, 4.0)
    analytic = wall_background_minimum(demo_model, win)
    # dense 1-d sampling oracle over both wall segments (clipped by the window top)
    best = math.inf
    tb = demo_model.tan_half
    for sign in (1.0, -1.0):
        us = np.linspace(0.0, min(12.0, 4.0 / tb), 200001)
        vals = 0.5 * (us - 2.5) ** 2 - 1.0 * (sign * us * tb) ** 2
        best = min(best, float(vals.min()))
    assert analytic == pytest.approx(best, abs=1e-8)


def test_wall_background_minimum_interior_vertex(demo_model):
    # window tall enough that the quadratic's vertex (u1 = 7.5) lies on the segment
    win = Window(0.0, 12.0, -5.0, 5.0)
    analytic = wall_background_minimum(demo_model, win)
    assert analytic == pytest.approx(-6.25, abs=1e-12)


# ---------------------------------------------------------------------------
# steepness diagnostics


def test_conditions_interior_decay_ratio(demo_model):
    win = Window(0.0, 12.0, -4.0, 4.0)
    report = check_conditions(demo_model, win, [0.1, 0.01], delta_k=0.5)
    ratio = report.entries[0].interior_max_value / report.entries[1].interior_max_value
    # sup sits near the margin contour, so the ratio tracks exp(-0.5/eps);
    # grid quantization of the margin shifts the exponent by a few units
    oracle = math.exp(-0.5 / 0.1) / math.exp(-0.5 / 0.01)
    assert ratio > 1e3
    assert abs(math.log(ratio) - math.log(oracle)) < 5.0


def test_conditions_inverse_width_linear_in_eps(demo_model):
    win = Window(0.0, 12.0, -4.0, 4.0)
    report = check_conditions(demo_model, win, [0.2, 0.1], delta_k=0.5)
    assert report.entries[0].inverse_sup == pytest.approx(2.0 * report.entries[1].inverse_sup, rel=1e-12)
    assert report.entries[0].inverse_slope_sup == pytest.approx(
        2.0 * report.entries[1].inverse_slope_sup, rel=1e-12
    )


def test_conditions_energy_window_demo_parameters(demo_model):
    win = Window(0.0, 12.0, -5.0, 5.0)
    report = check_conditions(demo_model, win, [0.1], delta_k=0.5)
    assert report.u_hat == pytest.approx(-6.25, abs=1e-12)
    assert report.wall_min_ok  # -b < u_hat
    assert report.energy_window == pytest.approx((-6.25, 3.75))
    assert report.barrier_unbounded


def test_conditions_strictly_decreasing_property(demo_model):
    rng = np.random.default_rng(5)
    win = Window(0.0, 8.0, -2.5, 2.5)
    for _ in range(5):
        eps = np.sort(rng.uniform(0.01, 0.5, size=4))[::-1]
        report = check_conditions(demo_model, win, list(eps), delta_k=0.5)
        assert report.interior_decay_monotone
        assert report.inverse_decay_monotone
        assert all(e.barrier_monotone for e in report.entries)


def test_conditions_rejects_bad_input(demo_model):
    win = Window(0.0, 8.0, -2.5, 2.5)
    with pytest.raises(DomainError):
        check_conditions(demo_model, win, [0.01, 0.1])  # not decreasing
    with pytest.raises(DomainError):
        check_conditions(demo_model, Window(-5.0, -4.0, 1.0, 2.0), [0.1])  # outside wedge


# ---------------------------------------------------------------------------
# construction and validation


def test_model_from_dict_round_trip(demo_model):
    data = {
        "beta": math.pi / 3,
        "omega": 1.0,
        "lambda": math.sqrt(2.0),
        "u1s": 2.5,
        "u2s": 0.0,
        "b": 10.0,
        "epsilon": 0.0,
    }
    assert model_from_dict(data) == demo_model


def test_model_from_dict_rejects_unknown_keys():
    with pytest.raises(DomainError):
        model_from_dict({"beta": 1.0, "omega": 1.0, "lambda": 1.0, "u1s": 0.0, "beta2": 1.0})


def test_model_validation():
    with pytest.raises(DomainError):
        WedgeModel(beta=4.0, omega=1.0, lam=1.0, u1s=0.0)
    with pytest.raises(DomainError):
        WedgeModel(beta=1.0, omega=0.0, lam=1.0, u1s=0.0)
    with pytest.raises(DomainError):
        WedgeModel(beta=1.0, omega=1.0, lam=1.0, u1s=0.0, kappa=1.0)  # u3s missing


def test_phase_state_validation():
    with pytest.raises(DomainError):
        PhaseState(q=[1.0], p=[1.0])
    with pytest.raises(DomainError):
        PhaseState(q=[1.0, math.nan], p=[0.0, 0.0])
    s = PhaseState(q=[1.0, 2.0], p=[3.0, 4.0])
    assert s.d == 2
    assert np.allclose(PhaseState.from_vector(s.as_vector()).q, s.q)


def test_three_dof_requires_oscillator(demo_model):
    with pytest.raises(DomainError):
        background_potential(demo_model, [1.0, 0.0, 0.0])
