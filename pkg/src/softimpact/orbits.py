"""Symmetric period-2 orbits: shooting, analytic linearization, stability, return maps.

The orbit hits each wall once per period at a right angle, so one period is
section -> upper wall -> lower wall -> section with flight times
``t_c``, ``2 t_c``, ``t_c``. All reduced 2x2 maps act on the section
coordinates ``(u1, v1)`` at fixed energy, with ``v2`` recovered from the
energy relation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np
from scipy.optimize import brentq

from .errors import (
    DegenerateCollisionError,
    DomainError,
    NoConvergenceError,
    NoRootError,
    NotSymplecticError,
    SingularLinearizationError,
    StartOnWallError,
)
from .impact import Wall, linear_flow, next_collision, propagate_impact, reflect
from .model import PhaseState, WedgeModel, total_energy, v20_from_energy
from .smooth import IntegratorConfig, SectionSpec, SlabSpec, section_crossings

FIX_U10 = "fix_u10"
FIX_ENERGY = "fix_energy"
FIX_RE_MULTIPLIER = "fix_re_multiplier"
CONSTRAINTS = (FIX_U10, FIX_ENERGY, FIX_RE_MULTIPLIER)

# integration tolerances for orbit solves and finite-difference monodromies
ORBIT_CFG = IntegratorConfig(rel_tol=1e-12, abs_tol=1e-14, energy_drift_abort=1e-6)
_FD_SCALE = 1e-6
# the smooth map carries ~1e-9 integration noise, so its difference step is
# larger to keep the Jacobian determinant within 1e-6 of one
_FD_SCALE_SMOOTH = 1e-4


class Stability(Enum):
    ELLIPTIC = "Elliptic"
    HYPERBOLIC = "Hyperbolic"
    PARABOLIC = "Parabolic"


@dataclass(frozen=True)
class PeriodicOrbit:
    """A symmetric period-2 orbit and its linearized section return map."""

    epsilon: float
    u10: float
    v20: float
    h: float
    t_c: float
    monodromy: np.ndarray
    multipliers: tuple[complex, complex]
    stability: Stability

    def __post_init__(self) -> None:
        m = np.array(self.monodromy, dtype=float)
        if m.shape != (2, 2):
            raise DomainError("monodromy must be a 2x2 matrix")
        m.setflags(write=False)
        object.__setattr__(self, "monodromy", m)

    @property
    def period(self) -> float:
        return 4.0 * self.t_c

    @property
    def trace(self) -> float:
        return float(np.trace(self.monodromy))

    def section_state(self) -> PhaseState:
        return PhaseState(q=[self.u10, 0.0], p=[0.0, self.v20])


def multipliers_from_trace(tr: float) -> tuple[complex, complex]:
    disc = complex(tr * tr - 4.0)
    root = np.sqrt(disc)
    return (complex(0.5 * (tr + root)), complex(0.5 * (tr - root)))


def classify_stability(monodromy: np.ndarray) -> Stability:
    """Classify a 2x2 symplectic map from its trace.

    The parabolic band |trace| = 2 +- 1e-9 makes the classifier total on
    floating-point inputs.
    """
    m = np.asarray(monodromy, dtype=float)
    det = float(np.linalg.det(m))
    if abs(det - 1.0) >= 1e-6:
        raise NotSymplecticError(f"|det - 1| = {abs(det - 1.0):.3e} exceeds 1e-6")
    tr = abs(float(np.trace(m)))
    if abs(tr - 2.0) <= 1e-9:
        return Stability.PARABOLIC
    if tr < 2.0:
        return Stability.ELLIPTIC
    return Stability.HYPERBOLIC


# ---------------------------------------------------------------------------
# hard-wall orbit shooting


def _tangential_at_first_hit(model: WedgeModel, u10: float, v20: float, t_max: float):
    s0 = PhaseState(q=[u10, 0.0], p=[0.0, v20])
    ev = next_collision(model, s0, t_max=t_max)
    if ev is None:
        return None, None
    hb = model.half_angle
    tang = ev.state_pre.p[0] * math.cos(hb) + ev.state_pre.p[1] * math.sin(hb)
    return float(tang), ev


def find_period2_impact(
    model: WedgeModel,
    u10: float,
    h_max: float | None = None,
    n_scan: int = 200,
    v20_guess: float | None = None,
) -> PeriodicOrbit:
    """Shoot for the right-angle wall hit from ``(u10, 0, 0, v20)`` at ``epsilon = 0``.

    The wall-parallel momentum at the first upper-wall hit is driven to zero
    over ``v20``. The scan covers ``(0, sqrt(2 h_max)]`` from above, so the
    root returned is the one with the smallest collision time (the
    first-collision branch); ``v20_guess`` warm-starts the bracket and skips
    the scan when it still encloses a sign change.
    """
    if u10 <= model.u1s:
        raise DomainError("u10 must lie to the right of the saddle")
    if model.u2s != 0.0:
        raise DomainError("period-2 shooting requires the symmetric model (u2s = 0)")
    if h_max is None:
        h_max = 40.0 * (1.0 + model.omega**2 * (u10 - model.u1s) ** 2)
    t_max = 50.0 / model.lam + 10.0 / model.omega
    f = lambda v: _tangential_at_first_hit(model, u10, v, t_max)[0]

    bracket = None
    if v20_guess is not None:
        lo, hi = 0.95 * v20_guess, 1.05 * v20_guess
        flo, fhi = f(lo), f(hi)
        if flo is not None and fhi is not None and flo * fhi < 0:
            bracket = (lo, hi)
    if bracket is None:
        vmax = math.sqrt(2.0 * h_max)
        vs = np.linspace(vmax, vmax / n_scan, n_scan)
        prev_v, prev_f = None, None
        for v in vs:
            try:
                fv = f(float(v))
            except (DegenerateCollisionError, StartOnWallError):
                prev_v, prev_f = None, None
                continue
            if fv is None:
                continue
            if prev_f is not None and prev_f * fv < 0:
                bracket = (float(v), prev_v)
                break
            prev_v, prev_f = float(v), fv
        if bracket is None:
            raise NoRootError(f"no right-angle solution for u10={u10} in the scanned v20 range")

    v20 = brentq(f, *bracket, xtol=1e-13)
    tang, ev = _tangential_at_first_hit(model, u10, v20, t_max)
    if abs(tang) >= 1e-11:
        raise NoConvergenceError(f"shooting residual {tang:.3e} at v20={v20}")
    t_c = ev.t_c
    s0 = PhaseState(q=[u10, 0.0], p=[0.0, v20])
    h = total_energy(replace(model, epsilon=0.0), s0)
    mono = _assemble_return_map(model, u10, v20, t_c, h)
    stability = classify_stability(mono)
    orbit = PeriodicOrbit(
        epsilon=0.0,
        u10=u10,
        v20=v20,
        h=h,
        t_c=t_c,
        monodromy=mono,
        multipliers=multipliers_from_trace(float(np.trace(mono))),
        stability=stability,
    )
    # closure across one full period
    traj = propagate_impact(model, s0, orbit.period)
    err = float(np.linalg.norm(traj.state_at(orbit.period).as_vector() - s0.as_vector()))
    if err > 1e-8:
        raise NoConvergenceError(f"orbit closure error {err:.3e} exceeds 1e-8")
    return orbit


def find_period2_impact_at_energy(
    model: WedgeModel, h: float, u10_bracket: tuple[float, float]
) -> PeriodicOrbit:
    """Hard-wall orbit on a prescribed energy shell, solved over ``u10``."""
    orbits: dict[float, PeriodicOrbit] = {}

    def g(u10: float) -> float:
        orb = find_period2_impact(model, u10)
        orbits[u10] = orb
        return orb.h - h

    u10 = brentq(g, *u10_bracket, xtol=1e-11)
    return orbits.get(u10) or find_period2_impact(model, u10)


def find_period2_impact_with_trace(
    model: WedgeModel, trace_target: float, u10_bracket: tuple[float, float]
) -> PeriodicOrbit:
    """Hard-wall orbit whose linearized return map has the given trace."""
    orbits: dict[float, PeriodicOrbit] = {}

    def g(u10: float) -> float:
        orb = find_period2_impact(model, u10)
        orbits[u10] = orb
        return orb.trace - trace_target

    u10 = brentq(g, *u10_bracket, xtol=1e-11)
    return orbits.get(u10) or find_period2_impact(model, u10)


# ---------------------------------------------------------------------------
# analytic linearized return map (hard wall)


def linearized_return_map_impact(model: WedgeModel, orbit: PeriodicOrbit) -> np.ndarray:
    """Analytic 2x2 linearization of the section return map at a hard-wall orbit.

    Chain rule across the three flight legs and the two wall reflections,
    with the collision-time sensitivities obtained by implicit
    differentiation of the wall-hit (or section-hit) condition on the energy
    shell.
    """
    if orbit.epsilon != 0.0:
        raise DomainError("analytic linearization is defined for the hard-wall orbit")
    return _assemble_return_map(model, orbit.u10, orbit.v20, orbit.t_c, orbit.h)


def _shell_speed(model: WedgeModel, h: float, u1: float, v1: float, on_wall: bool) -> float:
    """|v2| from the energy relation, on a wall line or on the section."""
    w2, l2, tb = model.omega**2, model.lam**2, model.tan_half
    rad = 2.0 * h - v1 * v1 - w2 * (u1 - model.u1s) ** 2
    if on_wall:
        rad += l2 * tb * tb * u1 * u1
    if rad <= 0.0:
        raise SingularLinearizationError("energy shell leaves no normal momentum")
    return math.sqrt(rad)


def _leg_jacobian(model, h, u1a, v1a, t, source: str) -> np.ndarray:
    """Reduced Jacobian of one flight leg from its departure section.

    ``source`` is 'section_up' (section departure moving up), 'upper'
    (departure from the upper wall moving down) or 'lower' (departure from
    the lower wall moving up). Arrival surface is the next one in the
    period-2 itinerary.
    """
    w, l, tb = model.omega, model.lam, model.tan_half
    u1s = model.u1s
    cw, sw = math.cos(w * t), math.sin(w * t)
    clam, slam = math.cosh(l * t), math.sinh(l * t)
    d0 = np.array([[cw, sw / w], [-w * sw, cw]])
    # time derivative of the reduced flow at arrival
    x1 = u1a - u1s
    u1_arr = u1s + x1 * cw + (v1a / w) * sw
    v1_arr = -w * x1 * sw + v1a * cw
    dfdt = np.array([v1_arr, -w * w * (u1_arr - u1s)])

    if source == "section_up":
        s = _shell_speed(model, h, u1a, v1a, on_wall=False)
        num_u = -w * w * slam * x1 / (l * s) - tb * cw
        num_v = -v1a * slam / (l * s) - tb * sw / w
        den = tb * (-x1 * w * sw + v1a * cw) - clam * s
    elif source == "upper":
        s = _shell_speed(model, h, u1a, v1a, on_wall=True)
        num_u = tb * clam + slam * (w * w * x1 - u1a * l * l * tb * tb) / (l * s) + tb * cw
        num_v = v1a * slam / (l * s) + tb * sw / w
        den = -tb * (v1a * cw - w * x1 * sw) - u1a * l * tb * slam + clam * s
    elif source == "lower":
        s = _shell_speed(model, h, u1a, v1a, on_wall=True)
        num_u = tb * clam + slam * (w * w * x1 - u1a * l * l * tb * tb) / (l * s)
        num_v = v1a * slam / (l * s)
        den = clam * s - u1a * l * tb * slam
    else:  # pragma: no cover
        raise AssertionError(source)

    if abs(den) < 1e-12:
        raise SingularLinearizationError("flight-leg time sensitivity denominator vanished")
    grad_t = np.array([num_u / den, num_v / den])
    return d0 + np.outer(dfdt, grad_t)


def _reflection_jacobian(model, h, u1, v1) -> np.ndarray:
    """Reduced Jacobian of an elastic wall reflection (same form on both walls)."""
    w2, l2, tb = model.omega**2, model.lam**2, model.tan_half
    cb, sb = math.cos(model.beta), math.sin(model.beta)
    s = _shell_speed(model, h, u1, v1, on_wall=True)
    a = -sb * (w2 * (u1 - model.u1s) - u1 * l2 * tb * tb) / s
    d = cb - v1 * sb / s
    return np.array([[1.0, 0.0], [a, d]])


def _assemble_return_map(model, u10: float, v20: float, t_c: float, h: float) -> np.ndarray:
    dep0 = PhaseState(q=[u10, 0.0], p=[0.0, v20])
    arr_f = linear_flow(model, dep0, t_c)
    post_up = reflect(model, arr_f, Wall.UPPER)
    arr_g = linear_flow(model, post_up, 2.0 * t_c)
    post_low = reflect(model, arr_g, Wall.LOWER)

    df = _leg_jacobian(model, h, u10, 0.0, t_c, "section_up")
    dr_up = _reflection_jacobian(model, h, float(arr_f.q[0]), float(arr_f.p[0]))
    dg = _leg_jacobian(model, h, float(post_up.q[0]), float(post_up.p[0]), 2.0 * t_c, "upper")
    dr_low = _reflection_jacobian(model, h, float(arr_g.q[0]), float(arr_g.p[0]))
    dh = _leg_jacobian(model, h, float(post_low.q[0]), float(post_low.p[0]), t_c, "lower")
    return dh @ dr_low @ dg @ dr_up @ df


def return_map_factors(model: WedgeModel, orbit: PeriodicOrbit) -> dict[str, np.ndarray]:
    """The five factors of the analytic linearization, for diagnostics."""
    u10, v20, t_c, h = orbit.u10, orbit.v20, orbit.t_c, orbit.h
    dep0 = PhaseState(q=[u10, 0.0], p=[0.0, v20])
    arr_f = linear_flow(model, dep0, t_c)
    post_up = reflect(model, arr_f, Wall.UPPER)
    arr_g = linear_flow(model, post_up, 2.0 * t_c)
    post_low = reflect(model, arr_g, Wall.LOWER)
    return {
        "df": _leg_jacobian(model, h, u10, 0.0, t_c, "section_up"),
        "dr_up": _reflection_jacobian(model, h, float(arr_f.q[0]), float(arr_f.p[0])),
        "dg": _leg_jacobian(model, h, float(post_up.q[0]), float(post_up.p[0]), 2.0 * t_c, "upper"),
        "dr_low": _reflection_jacobian(model, h, float(arr_g.q[0]), float(arr_g.p[0])),
        "dh": _leg_jacobian(model, h, float(post_low.q[0]), float(post_low.p[0]), t_c, "lower"),
    }


# ---------------------------------------------------------------------------
# section return maps (shared by the finite-difference oracle and sampling)


def impact_return_map(model: WedgeModel, h: float, z: np.ndarray, n: int = 1) -> np.ndarray:
    """Iterate the hard-wall section return map ``n`` times at fixed energy.

    ``z = (u1, v1)`` on the section; ``v2`` is the positive energy-relation
    root. Returns are crossings of ``u2 = 0`` with ``v2 > 0``.
    """
    if model.u2s != 0.0:
        raise DomainError("closed-form section returns require the symmetric model")
    u1, v1 = float(z[0]), float(z[1])
    v2 = v20_from_energy(replace(model, epsilon=0.0), h, u1, v1, 0.0)
    state = PhaseState(q=[u1, 0.0], p=[v1, v2])
    crossings = 0
    from_wall = None
    guard = 0
    while True:
        guard += 1
        if guard > 100_000:
            raise NoConvergenceError("return-map iteration exceeded the event guard")
        ev = next_collision(model, state, t_max=1e3, _from_wall=from_wall)
        t_seg = ev.t_c if ev is not None else 1e3
        t_x = _section_crossing_time(model, state, t_seg)
        if t_x is not None:
            mid = linear_flow(model, state, t_x)
            if mid.p[1] > 0.0:
                crossings += 1
                if crossings == n:
                    return np.array([mid.q[0], mid.p[0]])
            state = mid
            from_wall = None
            # continue the same flight from the crossing; the next wall hit
            # is re-detected from here
            continue
        if ev is None:
            raise NoConvergenceError("no section return within the time horizon")
        state = ev.state_post
        from_wall = ev.wall


def _section_crossing_time(model: WedgeModel, state: PhaseState, t_max: float) -> float | None:
    """Closed-form first zero of u2 in (0, t_max), if any (symmetric model)."""
    l = model.lam
    w0 = float(state.q[1])
    v0 = float(state.p[1])
    c_plus = 0.5 * (w0 + v0 / l)
    c_minus = 0.5 * (w0 - v0 / l)
    # u2(t) = c_plus e^{lt} + c_minus e^{-lt}
    if c_plus == 0.0:
        return None
    ratio = -c_minus / c_plus
    if ratio <= 0.0:
        return None
    t_x = 0.5 * math.log(ratio) / l
    if 1e-12 < t_x < t_max - 1e-14:
        return t_x
    return None


def finite_difference_monodromy(return_map, z0: np.ndarray, scale: float = _FD_SCALE) -> np.ndarray:
    """Central-difference Jacobian of a 2D map, steps scaled per coordinate."""
    z0 = np.asarray(z0, dtype=float)
    jac = np.zeros((2, 2))
    for j in range(2):
        hj = scale * max(1.0, abs(z0[j]))
        zp, zm = z0.copy(), z0.copy()
        zp[j] += hj
        zm[j] -= hj
        jac[:, j] = (return_map(zp) - return_map(zm)) / (2.0 * hj)
    return jac


# ---------------------------------------------------------------------------
# smooth orbits


def _half_return_v1(model: WedgeModel, u10: float, v20: float, cfg: IntegratorConfig):
    """v1 at the first downward section crossing, plus the crossing itself."""
    s0 = PhaseState(q=[u10, 0.0], p=[0.0, v20])
    down = section_crossings(model, s0, 1, SectionSpec(coordinate=1, direction=-1), cfg)[0]
    return float(down.p[0]), down


def smooth_return_map(model: WedgeModel, h: float, z: np.ndarray, cfg: IntegratorConfig | None = None) -> np.ndarray:
    """One full return of the smooth section map at fixed energy."""
    cfg = cfg or ORBIT_CFG
    u1, v1 = float(z[0]), float(z[1])
    v2 = v20_from_energy(model, h, u1, v1, 0.0)
    s0 = PhaseState(q=[u1, 0.0], p=[v1, v2])
    up = section_crossings(model, s0, 1, SectionSpec(coordinate=1, direction=1), cfg)[0]
    return np.array([up.q[0], up.p[0]])


def _solve_scalar(f, x0: float, rel_step: float = 1e-3, tol: float = 1e-11, max_iter: int = 50) -> float:
    """Secant iteration with bracket fallback for a scalar residual."""
    x1 = x0 * (1.0 + rel_step) if x0 != 0.0 else rel_step
    f0, f1 = f(x0), f(x1)
    if f0 * f1 < 0:
        return brentq(f, min(x0, x1), max(x0, x1), xtol=1e-13)
    for _ in range(max_iter):
        if abs(f1) < tol:
            return x1
        if f1 == f0:
            break
        x2 = x1 - f1 * (x1 - x0) / (f1 - f0)
        x0, f0, x1 = x1, f1, x2
        f1 = f(x1)
        if f0 * f1 < 0:
            return brentq(f, min(x0, x1), max(x0, x1), xtol=1e-13)
    if abs(f1) < tol:
        return x1
    raise NoConvergenceError(f"scalar solve stalled with residual {f1:.3e}")


def find_period2_smooth(
    model: WedgeModel,
    guess: PeriodicOrbit,
    constraint: str = FIX_U10,
    target: float | None = None,
    cfg: IntegratorConfig | None = None,
) -> PeriodicOrbit:
    """Continue a period-2 orbit into the steep-wall system.

    The symmetric orbit crosses the section perpendicularly, so the solve
    drives ``v1`` at the half-period (downward) crossing to zero; the full
    return-map fixed point is then verified to 1e-9. Constraints:

    - ``fix_u10``: solve v20 at the guess's u10;
    - ``fix_energy``: solve u10 on the guess's energy shell;
    - ``fix_re_multiplier``: additionally move u10 so that the elliptic
      multiplier pair has real part ``target`` (trace = 2 target).
    """
    if model.epsilon <= 0.0:
        raise DomainError("find_period2_smooth requires epsilon > 0")
    if constraint not in CONSTRAINTS:
        raise DomainError(f"unknown constraint {constraint!r}")
    cfg = cfg or ORBIT_CFG

    if constraint == FIX_U10:
        u10 = guess.u10
        v20 = _solve_scalar(lambda v: _half_return_v1(model, u10, v, cfg)[0], guess.v20)
        return _finish_smooth_orbit(model, u10, v20, cfg)

    if constraint == FIX_ENERGY:
        h = guess.h

        def res(u10: float) -> float:
            v20 = v20_from_energy(model, h, u10, 0.0, 0.0)
            return _half_return_v1(model, u10, v20, cfg)[0]

        u10 = _solve_scalar(res, guess.u10)
        return _finish_smooth_orbit(model, u10, v20_from_energy(model, h, u10, 0.0, 0.0), cfg)

    if target is None:
        raise DomainError("fix_re_multiplier requires a target real part")
    if not -1.0 < target < 1.0:
        raise DomainError("target real part must lie in (-1, 1) for an elliptic pair")
    trace_target = 2.0 * target
    v_warm = [guess.v20]

    def trace_res(u10: float) -> float:
        v20 = _solve_scalar(lambda v: _half_return_v1(model, u10, v, cfg)[0], v_warm[0])
        v_warm[0] = v20
        orb = _finish_smooth_orbit(model, u10, v20, cfg)
        trace_res.last = orb
        return orb.trace - trace_target

    u10 = _solve_scalar(trace_res, guess.u10, rel_step=3e-3, tol=5e-7)
    orb = trace_res.last
    if abs(orb.u10 - u10) > 1e-12:
        v20 = _solve_scalar(lambda v: _half_return_v1(model, u10, v, cfg)[0], v_warm[0])
        orb = _finish_smooth_orbit(model, u10, v20, cfg)
    return orb


def _smooth_monodromy(model: WedgeModel, h: float, z0: np.ndarray, cfg: IntegratorConfig) -> np.ndarray:
    """Central-difference monodromy, Richardson-extrapolated across two steps.

    Differences at steps (s, 2s) cancel the quadratic truncation term while
    keeping the steps large against the ~1e-9 integration noise. The exact
    map determinant (one) gates the result; smaller step pairs are tried if
    the primary pair misses the gate.
    """
    fd = lambda scale: finite_difference_monodromy(
        lambda z: smooth_return_map(model, h, z, cfg), z0, scale=scale
    )
    best = None
    cache: dict[float, np.ndarray] = {}
    for s in (1e-3, 5e-4, 2.5e-4):
        for step in (s, 2 * s):
            if step not in cache:
                cache[step] = fd(step)
        j1, j2 = cache[s], cache[2 * s]
        jac = (4.0 * j1 - j2) / 3.0
        err = abs(float(np.linalg.det(jac)) - 1.0)
        if best is None or err < best[0]:
            best = (err, jac)
        if err <= 5e-7:
            return jac
    return best[1]


def _finish_smooth_orbit(model: WedgeModel, u10: float, v20: float, cfg: IntegratorConfig) -> PeriodicOrbit:
    s0 = PhaseState(q=[u10, 0.0], p=[0.0, v20])
    h = total_energy(model, s0)
    _, down = _half_return_v1(model, u10, v20, cfg)
    t_c = down.t / 2.0
    # full-period fixed-point residual
    z0 = np.array([u10, 0.0])
    z1 = smooth_return_map(model, h, z0, cfg)
    residual = float(np.linalg.norm(z1 - z0))
    if residual > 1e-9:
        raise NoConvergenceError(f"fixed-point residual {residual:.3e} exceeds 1e-9")
    mono = _smooth_monodromy(model, h, z0, cfg)
    stability = classify_stability(mono)
    return PeriodicOrbit(
        epsilon=model.epsilon,
        u10=u10,
        v20=v20,
        h=h,
        t_c=t_c,
        monodromy=mono,
        multipliers=multipliers_from_trace(float(np.trace(mono))),
        stability=stability,
    )


# ---------------------------------------------------------------------------
# return-map point clouds


@dataclass
class ReturnMapCloud:
    """Section return points per seed: rows ``(seed_id, k, u1, v1)``."""

    points: np.ndarray
    errors: list[tuple[int, str]]
    extra: np.ndarray | None = None  # (u3, v3) columns for slab sections


def sample_return_map(
    model: WedgeModel,
    seeds: list[PhaseState],
    n_returns: int,
    spec: SectionSpec | None = None,
    cfg: IntegratorConfig | None = None,
) -> ReturnMapCloud:
    """Iterate the section return map from each seed and collect (u1, v1) points.

    Hard-wall models iterate the closed-form impact flow; steep-wall models
    integrate. A failing seed is recorded and the remaining seeds continue.
    """
    spec = spec or SectionSpec()
    cfg = cfg or IntegratorConfig()
    rows = []
    extra_rows = []
    errors: list[tuple[int, str]] = []
    for sid, seed in enumerate(seeds):
        try:
            if model.epsilon == 0.0:
                h = total_energy(replace(model, epsilon=0.0), seed)
                z = np.array([seed.q[0], seed.p[0]])
                for k in range(1, n_returns + 1):
                    z = impact_return_map(model, h, z)
                    rows.append((sid, k, z[0], z[1]))
            else:
                crossings = section_crossings(model, seed, n_returns, spec, cfg)
                for k, st in enumerate(crossings, start=1):
                    rows.append((sid, k, float(st.q[0]), float(st.p[0])))
                    if st.d == 3:
                        extra_rows.append((float(st.q[2]), float(st.p[2])))
        except Exception as exc:  # per-seed isolation
            errors.append((sid, f"{type(exc).__name__}: {exc}"))
    points = np.array(rows, dtype=float) if rows else np.empty((0, 4))
    extra = np.array(extra_rows, dtype=float) if extra_rows else None
    return ReturnMapCloud(points=points, errors=errors, extra=extra)
