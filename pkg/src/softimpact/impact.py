"""Hard-wall impact flow: closed-form interior flight, wall events, reflections."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np
from scipy.optimize import brentq

from .errors import (
    DegenerateCollisionError,
    DomainError,
    EventOverflowError,
    StartOnWallError,
)
from .model import PhaseState, Wall, WedgeModel, background_potential, total_energy, wall_distance, wall_normal, wall_direction

MAX_EVENTS = 1_000_000
VERTEX_RADIUS = 1e-6
_T_SKIP = 1e-12  # roots closer than this to a segment start are the start itself


class ReflectionClass(Enum):
    REGULAR = "Regular"
    NON_DEGENERATE_TANGENT = "NonDegenerateTangent"
    DEGENERATE = "Degenerate"


@dataclass(frozen=True)
class CollisionEvent:
    """A wall hit: time, wall identity, pre/post states, and its classification."""

    t_c: float
    wall: Wall
    state_pre: PhaseState
    state_post: PhaseState
    classification: ReflectionClass


@dataclass(frozen=True)
class Segment:
    """One collision-free flight: closed-form flow from ``state0`` over ``[t0, t1]``."""

    t0: float
    t1: float
    state0: PhaseState


@dataclass
class ImpactTrajectory:
    model: WedgeModel
    segments: list[Segment]
    events: list[CollisionEvent]
    samples: np.ndarray | None  # columns: t, q..., p..., H
    h0: float

    def state_at(self, t: float) -> PhaseState:
        """Closed-form state at absolute time ``t`` within the propagated span."""
        if not self.segments:
            raise DomainError("empty trajectory")
        if t < self.segments[0].t0 - 1e-12 or t > self.segments[-1].t1 + 1e-12:
            raise DomainError(f"time {t} outside propagated span")
        for seg in self.segments:
            if t <= seg.t1 or seg is self.segments[-1]:
                return linear_flow(self.model, seg.state0, t - seg.t0)
        raise AssertionError("unreachable")

    def states_at(self, ts: np.ndarray) -> np.ndarray:
        return np.array([self.state_at(float(t)).as_vector() for t in np.asarray(ts)])


def _check_frozen_oscillator(model: WedgeModel, state: PhaseState) -> None:
    if state.d == 3:
        model.require_dof(3)
        if model.delta != 0.0 or state.p[2] != 0.0 or state.q[2] != model.u3s:
            raise DomainError(
                "closed-form interior flight supports a third coordinate only "
                "at rest at its center with zero coupling"
            )


def linear_flow(model: WedgeModel, s0: PhaseState, t) -> PhaseState:
    """Closed-form interior flight of the background dynamics for time ``t``.

    ``u1`` oscillates about the saddle at frequency ``omega``; ``u2 - u2s``
    follows the hyperbolic cosh/sinh motion at rate ``lam``. The wall term is
    ignored: this is the flow between collisions of the hard-wall system.
    """
    _check_frozen_oscillator(model, s0)
    u1, u2 = s0.q[0], s0.q[1]
    v1, v2 = s0.p[0], s0.p[1]
    w, l = model.omega, model.lam
    cw, sw = math.cos(w * t), math.sin(w * t)
    clam, slam = math.cosh(l * t), math.sinh(l * t)
    x1 = u1 - model.u1s
    x2 = u2 - model.u2s
    nu1 = model.u1s + x1 * cw + (v1 / w) * sw
    nv1 = -w * x1 * sw + v1 * cw
    nu2 = model.u2s + x2 * clam + (v2 / l) * slam
    nv2 = l * x2 * slam + v2 * clam
    if s0.d == 3:
        q = np.array([nu1, nu2, s0.q[2]])
        p = np.array([nv1, nv2, s0.p[2]])
    else:
        q = np.array([nu1, nu2])
        p = np.array([nv1, nv2])
    return PhaseState(q=q, p=p, t=s0.t + t)


def _flow_arrays(model: WedgeModel, s0: PhaseState, ts: np.ndarray):
    """Vectorized (u1, u2, v1, v2) of the interior flight at times ``ts``."""
    u1, u2 = s0.q[0], s0.q[1]
    v1, v2 = s0.p[0], s0.p[1]
    w, l = model.omega, model.lam
    cw, sw = np.cos(w * ts), np.sin(w * ts)
    clam, slam = np.cosh(l * ts), np.sinh(l * ts)
    x1 = u1 - model.u1s
    x2 = u2 - model.u2s
    return (
        model.u1s + x1 * cw + (v1 / w) * sw,
        model.u2s + x2 * clam + (v2 / l) * slam,
        -w * x1 * sw + v1 * cw,
        l * x2 * slam + v2 * clam,
    )


def _wall_gap(model: WedgeModel, s0: PhaseState, wall: Wall, t):
    """Signed gap to a wall along the flight, positive inside the wedge."""
    ts = np.asarray(t, dtype=float)
    u1, u2, _, _ = _flow_arrays(model, s0, ts)
    tb = model.tan_half
    if wall is Wall.UPPER:
        return u1 * tb - u2
    return u2 + u1 * tb


def _wall_gap_rate(model: WedgeModel, s0: PhaseState, wall: Wall, t: float) -> float:
    _, _, v1, v2 = _flow_arrays(model, s0, np.asarray(t, dtype=float))
    tb = model.tan_half
    if wall is Wall.UPPER:
        return float(v1 * tb - v2)
    return float(v2 + v1 * tb)


def default_scan_step(model: WedgeModel) -> float:
    # bounds missed double crossings for the model's growth rates
    return min(0.05, 0.1 / model.lam)


def next_collision(
    model: WedgeModel,
    s0: PhaseState,
    t_max: float,
    dt_scan: float | None = None,
    _from_wall: Wall | None = None,
) -> CollisionEvent | None:
    """First wall hit of the interior flight within ``(0, t_max]``, or None.

    Candidate crossings are bracketed on a uniform time grid and refined by
    Brent root finding plus a Newton polish to |t| error below 1e-12. Raises
    ``StartOnWallError`` when the start state is not strictly interior
    (unless ``_from_wall`` names the wall the trajectory is just leaving) and
    ``DegenerateCollisionError`` when the hit lands inside the vertex guard
    radius.
    """
    if t_max <= 0.0:
        raise DomainError("t_max must be positive")
    _check_frozen_oscillator(model, s0)
    scale = max(1.0, float(np.max(np.abs(s0.q[:2]))))
    for wall in Wall:
        gap0 = float(_wall_gap(model, s0, wall, 0.0))
        if wall is _from_wall:
            if gap0 < -1e-9 * scale:
                raise StartOnWallError(f"start state beyond the {wall.value} wall")
            continue
        if gap0 <= 1e-12 * scale:
            raise StartOnWallError(f"start state on or beyond the {wall.value} wall")

    dt = dt_scan if dt_scan is not None else default_scan_step(model)
    # u1 stays bounded while |u2| grows exponentially, so any collision occurs
    # well before lam*t ~ 350 (also keeps cosh within floating range)
    t_cap = min(t_max, 350.0 / model.lam)
    window = max(4.0 * math.pi / model.omega, 8.0 / model.lam)
    hits: list[tuple[float, Wall]] = []
    t_lo = 0.0
    while t_lo < t_cap and not hits:
        t_hi = min(t_lo + window, t_cap)
        n = int(math.ceil((t_hi - t_lo) / dt))
        ts = np.linspace(t_lo, t_hi, n + 1)
        for wall in Wall:
            gaps = np.asarray(_wall_gap(model, s0, wall, ts))
            pos = gaps > 0.0
            crossing = np.nonzero(pos[:-1] & ~pos[1:])[0]
            t_hit = None
            for k in crossing:
                a, b = float(ts[k]), float(ts[k + 1])
                root = brentq(lambda t: float(_wall_gap(model, s0, wall, t)), a, b, xtol=1e-14)
                # Newton polish on the closed form
                for _ in range(2):
                    g = float(_wall_gap(model, s0, wall, root))
                    dg = _wall_gap_rate(model, s0, wall, root)
                    if dg != 0.0:
                        root -= g / dg
                if root > _T_SKIP:
                    t_hit = root
                    break
            if t_hit is not None:
                hits.append((t_hit, wall))
        t_lo = t_hi
    if not hits:
        return None
    t_c, wall = min(hits, key=lambda h: h[0])
    state_pre = linear_flow(model, s0, t_c)
    if math.hypot(state_pre.q[0], state_pre.q[1]) < VERTEX_RADIUS:
        raise DegenerateCollisionError("trajectory entered the vertex guard region")
    classification = classify_reflection(model, state_pre, wall)
    state_post = reflect(model, state_pre, wall)
    return CollisionEvent(
        t_c=t_c,
        wall=wall,
        state_pre=state_pre,
        state_post=state_post,
        classification=classification,
    )


def reflect(model: WedgeModel, s: PhaseState, wall: Wall) -> PhaseState:
    """Elastic reflection at the named wall; position and time are unchanged."""
    scale = max(1.0, float(np.max(np.abs(s.q[:2]))))
    if abs(float(wall_distance(model, s.q[:2], wall))) > 1e-8 * scale:
        raise DomainError(f"state is not on the {wall.value} wall")
    cb, sb = math.cos(model.beta), math.sin(model.beta)
    v1, v2 = s.p[0], s.p[1]
    if wall is Wall.UPPER:
        nv1, nv2 = v1 * cb + v2 * sb, v1 * sb - v2 * cb
    else:
        nv1, nv2 = v1 * cb - v2 * sb, -v1 * sb - v2 * cb
    p = np.array(s.p, copy=True)
    p[0], p[1] = nv1, nv2
    return PhaseState(q=s.q, p=p, t=s.t)


def classify_reflection(model: WedgeModel, s: PhaseState, wall: Wall) -> ReflectionClass:
    """Classify a wall hit from the normal momentum and the normal potential slope.

    Regular hits have non-negligible normal momentum. Tangential hits with
    non-zero wall-parallel momentum still separate from a flat wall exactly
    when the inward normal derivative of the background potential is
    negative; otherwise the hit is degenerate.
    """
    n = wall_normal(model, wall)
    d = wall_direction(model, wall)
    p2 = s.p[:2]
    p_norm = float(np.linalg.norm(s.p))
    tol = 1e-8 * max(p_norm, 1e-300)
    p_y = float(np.dot(p2, n))
    if abs(p_y) > tol:
        return ReflectionClass.REGULAR
    p_x_sq = float(np.dot(p2, d)) ** 2
    if s.d == 3:
        p_x_sq += float(s.p[2]) ** 2
    _, grad = background_potential(model, s.q)
    u_y = float(np.dot(grad[:2], n))
    # straight walls: the curvature form vanishes, so the test is 0 > u_y
    if p_x_sq > tol * tol and 0.0 > u_y:
        return ReflectionClass.NON_DEGENERATE_TANGENT
    return ReflectionClass.DEGENERATE


def propagate_impact(
    model: WedgeModel,
    s0: PhaseState,
    t_final: float,
    sample_dt: float | None = None,
) -> ImpactTrajectory:
    """Event-driven propagation over ``[0, t_final]``.

    Alternates closed-form flights with elastic reflections. Aborts on
    degenerate reflections and on more than ``MAX_EVENTS`` events. Dense
    samples at ``sample_dt`` (plus the final time) carry the energy column.
    """
    if t_final <= 0.0:
        raise DomainError("t_final must be positive")
    h0 = total_energy(replace(model, epsilon=0.0), s0)
    segments: list[Segment] = []
    events: list[CollisionEvent] = []
    t = 0.0
    state = s0
    from_wall: Wall | None = None
    while True:
        ev = next_collision(model, state, t_max=t_final - t, _from_wall=from_wall)
        if ev is None:
            segments.append(Segment(t0=t, t1=t_final, state0=state))
            break
        if ev.classification is ReflectionClass.DEGENERATE:
            raise DegenerateCollisionError(
                f"degenerate reflection at t={t + ev.t_c:.6g} on the {ev.wall.value} wall"
            )
        segments.append(Segment(t0=t, t1=t + ev.t_c, state0=state))
        t += ev.t_c
        abs_pre = PhaseState(q=ev.state_pre.q, p=ev.state_pre.p, t=t)
        abs_post = PhaseState(q=ev.state_post.q, p=ev.state_post.p, t=t)
        events.append(replace(ev, t_c=t, state_pre=abs_pre, state_post=abs_post))
        if len(events) > MAX_EVENTS:
            raise EventOverflowError("more than MAX_EVENTS wall events in one propagation")
        state = abs_post
        from_wall = ev.wall
        if t >= t_final:
            break

    traj = ImpactTrajectory(model=model, segments=segments, events=events, samples=None, h0=h0)
    if sample_dt is not None:
        ts = np.arange(0.0, t_final, sample_dt)
        if ts.size == 0 or ts[-1] < t_final:
            ts = np.append(ts, t_final)
        rows = []
        m0 = replace(model, epsilon=0.0)
        for tt in ts:
            st = traj.state_at(float(tt))
            rows.append([tt, *st.q, *st.p, total_energy(m0, st)])
        traj.samples = np.array(rows)
    return traj


def compare_flows(
    model: WedgeModel,
    s0: PhaseState,
    t_final: float,
    epsilons: list[float],
    cfg=None,
    n_samples: int = 1024,
    event_margin: float = 0.2,
) -> list[tuple[float, float]]:
    """Sup phase-space distance between the steep-wall flow and the hard-wall flow.

    The hard-wall trajectory of ``s0`` over ``[0, t_final]`` must have only
    regular reflections. For each steepness the smooth system is integrated
    from the same initial state and the distance is the sup over uniform
    sample times of the Euclidean distance in (q, p). Sample times within
    ``event_margin`` of a reflection are excluded: the hard-wall momentum is
    discontinuous there, so the matched-time distance at those instants stays
    at the size of the momentum jump for every steepness and carries no
    convergence information.
    """
    from .smooth import integrate_smooth

    if any(e <= 0.0 for e in epsilons):
        raise DomainError("epsilons must be positive")
    reference = propagate_impact(model, s0, t_final)
    for ev in reference.events:
        if ev.classification is not ReflectionClass.REGULAR:
            raise DegenerateCollisionError(
                "reference trajectory has a non-regular reflection; comparison undefined"
            )
    ts = np.linspace(0.0, t_final, n_samples)
    if reference.events and event_margin > 0.0:
        keep = np.ones(ts.size, dtype=bool)
        for ev in reference.events:
            keep &= np.abs(ts - ev.t_c) > event_margin
        if not keep.any():
            raise DomainError("event_margin excludes every sample time")
        ts = ts[keep]
    ref = reference.states_at(ts)
    out = []
    for eps in epsilons:
        smooth = integrate_smooth(replace(model, epsilon=eps), s0, t_final, cfg)
        sm = smooth.states_at(ts)
        dist = float(np.max(np.linalg.norm(sm - ref, axis=1)))
        out.append((eps, dist))
    return out
