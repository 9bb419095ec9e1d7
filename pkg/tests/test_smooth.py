import math
from dataclasses import replace

import numpy as np
import pytest

from softimpact import (
    DomainError,
    EnergyDriftExceededError,
    EscapeError,
    IntegratorConfig,
    PhaseState,
    SectionSpec,
    SectionTimeoutError,
    SlabSpec,
    Wall,
    find_period2_smooth,
    integrate_smooth,
    section_crossings,
    smooth_rhs,
    total_energy,
    wall_normal,
)

TIGHT = IntegratorConfig(rel_tol=1e-12, abs_tol=1e-14)


@pytest.fixture(scope="module")
def steep_model(demo_model):
    return replace(demo_model, epsilon=0.1)


@pytest.fixture(scope="module")
def steep_orbit(steep_model, demo_orbit):
    return find_period2_smooth(steep_model, demo_orbit, "fix_u10")


def test_rhs_vanishes_at_rest_saddle(steep_model):
    s = PhaseState(q=[steep_model.u1s, 0.0], p=[0.0, 0.0])
    deriv = smooth_rhs(steep_model, s)
    assert np.max(np.abs(deriv)) < 1e-10


def test_rhs_is_symplectic_gradient(steep_model):
    # compare against central finite differences of the Hamiltonian
    rng = np.random.default_rng(31)
    h_step = 1e-6
    for _ in range(20):
        u1 = rng.uniform(0.5, 8.0)
        u2 = rng.uniform(-0.8, 0.8) * u1 * steep_model.tan_half
        y = np.array([u1, u2, *rng.uniform(-3, 3, size=2)])

        def ham(yv):
            return total_energy(steep_model, PhaseState(q=yv[:2], p=yv[2:]))

        grad = np.zeros(4)
        for j in range(4):
            yp, ym = y.copy(), y.copy()
            yp[j] += h_step
            ym[j] -= h_step
            grad[j] = (ham(yp) - ham(ym)) / (2 * h_step)
        deriv = smooth_rhs(steep_model, PhaseState(q=y[:2], p=y[2:]))
        oracle = np.array([grad[2], grad[3], -grad[0], -grad[1]])
        assert np.allclose(deriv, oracle, rtol=1e-6, atol=1e-6)


def test_rhs_wall_push(steep_model):
    # on the upper wall line the wall term pushes inward with size b/eps
    u1 = 3.0
    q = [u1, u1 * steep_model.tan_half]
    deriv = np.asarray(smooth_rhs(steep_model, PhaseState(q=q, p=[0.0, 0.0])))
    n = wall_normal(steep_model, Wall.UPPER)
    push = float(deriv[2:] @ n)
    expected = steep_model.b / steep_model.epsilon
    assert push == pytest.approx(expected, rel=0.05)  # background gradient is the remainder
    assert push > 0.0


def test_energy_drift_over_orbit_period(steep_model, steep_orbit):
    traj = integrate_smooth(steep_model, steep_orbit.section_state(), steep_orbit.period)
    assert traj.max_energy_drift < 1e-8


def test_decoupled_third_oscillator(demo_model):
    m2 = replace(demo_model, epsilon=0.001)
    m3 = replace(m2, kappa=math.sqrt(3.0), u3s=0.0, delta=0.0)
    s2 = PhaseState(q=[9.27, 0.0], p=[0.0, 4.95])
    s3 = PhaseState(q=[9.27, 0.0, 0.0], p=[0.0, 4.95, 0.0])
    t_final = 3.0
    tr2 = integrate_smooth(m2, s2, t_final, TIGHT)
    tr3 = integrate_smooth(m3, s3, t_final, TIGHT)
    ts = np.linspace(0.0, t_final, 200)
    a2 = tr2.states_at(ts)
    a3 = tr3.states_at(ts)[:, [0, 1, 3, 4]]
    assert np.max(np.abs(a3 - a2)) < 1e-8


def test_time_reversibility(steep_model, steep_orbit):
    s0 = steep_orbit.section_state()
    fwd = integrate_smooth(steep_model, s0, 2.0, TIGHT)
    end = fwd.state_at(2.0)
    back = integrate_smooth(steep_model, end, -2.0, TIGHT)
    final = back.state_at(-2.0)
    assert np.linalg.norm(final.as_vector() - s0.as_vector()) < 1e-7


def test_tolerance_halving_sanity(steep_model, steep_orbit):
    s0 = steep_orbit.section_state()
    t_final = 2.0
    coarse = IntegratorConfig(rel_tol=2e-9, abs_tol=1e-11)
    fine = IntegratorConfig(rel_tol=1e-9, abs_tol=1e-11)
    ref = integrate_smooth(steep_model, s0, t_final, TIGHT).state_at(t_final).as_vector()
    e_coarse = np.linalg.norm(integrate_smooth(steep_model, s0, t_final, coarse).state_at(t_final).as_vector() - ref)
    e_fine = np.linalg.norm(integrate_smooth(steep_model, s0, t_final, fine).state_at(t_final).as_vector() - ref)
    assert e_fine < 10.0 * max(e_coarse, 1e-13)


def test_boundary_layer_containment(demo_model, demo_orbit):
    # no penetration beyond the steepness-scaled layer
    s0 = demo_orbit.section_state()
    for eps in (0.1, 0.01):
        m = replace(demo_model, epsilon=eps)
        traj = integrate_smooth(m, s0, demo_orbit.period)
        ts = np.linspace(0.0, demo_orbit.period, 2000)
        states = traj.states_at(ts)
        sh, ch = math.sin(m.half_angle), math.cos(m.half_angle)
        gap_up = states[:, 0] * sh - states[:, 1] * ch
        gap_low = states[:, 0] * sh + states[:, 1] * ch
        bound = 3.0 * eps * math.log(m.b / 2.2e-16)
        assert min(gap_up.min(), gap_low.min()) > -bound


def test_section_start_not_counted(steep_model, steep_orbit):
    s0 = steep_orbit.section_state()  # exactly on the section with v2 > 0
    pts = section_crossings(steep_model, s0, 1, SectionSpec(coordinate=1, direction=1))
    assert pts[0].t > 1.0  # the next return, not the start


def test_periodic_orbit_is_section_fixed_point(steep_model, steep_orbit):
    pts = section_crossings(steep_model, steep_orbit.section_state(), 3,
                            SectionSpec(coordinate=1, direction=1), TIGHT)
    base = np.array([steep_orbit.u10, 0.0])
    for st in pts:
        assert np.linalg.norm(np.array([st.q[0], st.p[0]]) - base) < 1e-6


def test_slab_filtering(demo_model):
    m3 = replace(demo_model, epsilon=0.001, kappa=math.sqrt(3.0), u3s=0.0, delta=0.1)
    s0 = PhaseState(q=[9.27, 0.0, 0.0], p=[0.0, 4.9, 0.05])
    spec = SectionSpec(coordinate=1, direction=1,
                       slab=SlabSpec(index=2, half_width=0.1, velocity_sign=1))
    pts = section_crossings(m3, s0, 5, spec)
    assert len(pts) == 5
    for st in pts:
        assert abs(st.q[2]) <= 0.1
        assert st.p[2] > 0.0


def test_section_timeout(steep_model):
    # on-axis oscillation never crosses u2 = 0 upward twice in a short budget
    s0 = PhaseState(q=[4.0, 0.1], p=[0.0, -1.0])
    with pytest.raises(SectionTimeoutError):
        section_crossings(steep_model, s0, 500, SectionSpec(coordinate=1, direction=1),
                          max_time=5.0)


def test_escape_guard(steep_model):
    # kinetic energy far above the effective barrier: crosses the wall crest
    s0 = PhaseState(q=[5.0, 0.0], p=[0.0, 12.0])
    with pytest.raises(EscapeError):
        integrate_smooth(steep_model, s0, 5.0)


def test_energy_drift_abort(demo_model, demo_orbit):
    m = replace(demo_model, epsilon=0.001)
    loose = IntegratorConfig(rel_tol=1e-4, abs_tol=1e-6, energy_drift_abort=1e-8 * 1e4)
    with pytest.raises(EnergyDriftExceededError):
        integrate_smooth(m, demo_orbit.section_state(), demo_orbit.period, loose)


def test_integrator_config_validation():
    with pytest.raises(DomainError):
        IntegratorConfig(rel_tol=-1.0)
    with pytest.raises(DomainError):
        IntegratorConfig(rel_tol=1e-6, energy_drift_abort=1e-8)


def test_rhs_requires_steepness(demo_model):
    with pytest.raises(DomainError):
        smooth_rhs(demo_model, PhaseState(q=[3.0, 0.0], p=[0.0, 1.0]))
