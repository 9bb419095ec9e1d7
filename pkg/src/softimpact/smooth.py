"""Adaptive integration of the steep-wall Hamiltonian and section crossings."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .errors import (
    DomainError,
    EnergyDriftExceededError,
    EscapeError,
    SectionTimeoutError,
    StepUnderflowError,
)
from .model import PhaseState, WedgeModel, total_energy


@dataclass(frozen=True)
class IntegratorConfig:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_step: float = math.inf
    energy_drift_abort: float = 1e-6

    def __post_init__(self) -> None:
        if self.rel_tol <= 0.0 or self.abs_tol <= 0.0 or self.max_step <= 0.0:
            raise DomainError("integrator tolerances must be positive")
        if self.energy_drift_abort <= self.rel_tol:
            raise DomainError("energy_drift_abort must exceed rel_tol")


@dataclass(frozen=True)
class SlabSpec:
    """Projection slab for higher-dimensional sections."""

    index: int = 2
    half_width: float = 0.1
    velocity_sign: int = 1

    def __post_init__(self) -> None:
        if self.half_width <= 0.0:
            raise DomainError("slab half_width must be positive")
        if self.velocity_sign not in (-1, 1):
            raise DomainError("slab velocity_sign must be +1 or -1")


@dataclass(frozen=True)
class SectionSpec:
    """Poincare section: one coordinate zeroed, crossed with a fixed sign."""

    coordinate: int = 1
    direction: int = 1
    slab: SlabSpec | None = None

    def __post_init__(self) -> None:
        if self.direction not in (-1, 1):
            raise DomainError("section direction must be +1 or -1")


def smooth_rhs(model: WedgeModel, s: PhaseState) -> np.ndarray:
    """Phase-space derivative (qdot, pdot) of the steep-wall Hamiltonian."""
    f = make_rhs(model, s.d)
    return f(0.0, s.as_vector())


def make_rhs(model: WedgeModel, d: int):
    """Derivative function f(t, y) with constants hoisted out of the hot loop."""
    if model.epsilon <= 0.0:
        raise DomainError("smooth dynamics require epsilon > 0")
    model.require_dof(d)
    sh, ch = math.sin(model.half_angle), math.cos(model.half_angle)
    w2, l2 = model.omega**2, model.lam**2
    inv_eps = 1.0 / model.epsilon
    b = model.b
    u1s, u2s = model.u1s, model.u2s
    if d == 2:

        def f(t, y):
            u1, u2, v1, v2 = y
            e_up = b * math.exp(min((-u1 * sh + u2 * ch) * inv_eps, 600.0))
            e_low = b * math.exp(min((-u1 * sh - u2 * ch) * inv_eps, 600.0))
            a1 = -w2 * (u1 - u1s) + inv_eps * (e_up + e_low) * sh
            a2 = l2 * (u2 - u2s) + inv_eps * (e_low - e_up) * ch
            return (v1, v2, a1, a2)

        return f

    kw2 = (model.kappa * model.omega) ** 2
    u3s, delta = model.u3s, model.delta

    def f3(t, y):
        u1, u2, u3, v1, v2, v3 = y
        e_up = b * math.exp(min((-u1 * sh + u2 * ch) * inv_eps, 600.0))
        e_low = b * math.exp(min((-u1 * sh - u2 * ch) * inv_eps, 600.0))
        x3 = u3 - u3s
        a1 = -w2 * (u1 - u1s) + inv_eps * (e_up + e_low) * sh
        a2 = l2 * (u2 - u2s) + inv_eps * (e_low - e_up) * ch
        a3 = -kw2 * x3 - x3**3
        if delta != 0.0:
            a1 -= delta * (math.cos(u1 - u2) - math.cos(u3 - u1))
            a2 -= delta * (-math.cos(u1 - u2) + math.cos(u2 - u3))
            a3 -= delta * (-math.cos(u2 - u3) + math.cos(u3 - u1))
        return (v1, v2, v3, a1, a2, a3)

    return f3


@dataclass
class SmoothTrajectory:
    """Dense-output trajectory of the steep-wall system over ``[t0, t1]``."""

    model: WedgeModel
    t0: float
    t1: float
    sol: object  # scipy OdeSolution
    step_times: np.ndarray
    h0: float
    max_energy_drift: float

    def state_at(self, t: float) -> PhaseState:
        y = self.sol(t)
        d = y.size // 2
        return PhaseState(q=y[:d], p=y[d:], t=t)

    def states_at(self, ts) -> np.ndarray:
        return np.asarray(self.sol(np.asarray(ts))).T

    def energy_at(self, t: float) -> float:
        return total_energy(self.model, self.state_at(t))


def _escape_event(model: WedgeModel):
    sh, ch = math.sin(model.half_angle), math.cos(model.half_angle)
    margin = 10.0 * model.epsilon

    def event(t, y):
        gap_up = y[0] * sh - y[1] * ch
        gap_low = y[0] * sh + y[1] * ch
        return min(gap_up, gap_low) + margin

    event.terminal = True
    return event


def integrate_smooth(
    model: WedgeModel,
    s0: PhaseState,
    t_final: float,
    cfg: IntegratorConfig | None = None,
) -> SmoothTrajectory:
    """Integrate the steep-wall system with dense output and an energy gate.

    Uses an adaptive 8th-order embedded Runge-Kutta pair. The run aborts if
    the relative energy drift at any accepted step exceeds the configured
    level, or if the trajectory crosses the wall crest (escape guard at wall
    gap below -10 epsilon).
    """
    cfg = cfg or IntegratorConfig()
    if t_final == 0.0:
        raise DomainError("t_final must be non-zero")
    f = make_rhs(model, s0.d)
    h0 = total_energy(model, s0)
    res = solve_ivp(
        f,
        (0.0, t_final),
        s0.as_vector(),
        method="DOP853",
        dense_output=True,
        rtol=cfg.rel_tol,
        atol=cfg.abs_tol,
        max_step=cfg.max_step,
        events=[_escape_event(model)],
    )
    if res.status == -1:
        raise StepUnderflowError(f"integrator failed: {res.message}")
    if res.status == 1:
        raise EscapeError("trajectory crossed the wall crest (energy above the barrier window)")
    drift = _max_drift(model, res, h0)
    if drift > cfg.energy_drift_abort:
        raise EnergyDriftExceededError(
            f"relative energy drift {drift:.3e} exceeds abort level {cfg.energy_drift_abort:.3e}"
        )
    return SmoothTrajectory(
        model=model,
        t0=0.0,
        t1=t_final,
        sol=res.sol,
        step_times=res.t,
        h0=h0,
        max_energy_drift=drift,
    )


def hamiltonian_values(model: WedgeModel, states: np.ndarray) -> np.ndarray:
    """Vectorized total energy for a (2d, n) array of states."""
    d = states.shape[0] // 2
    model.require_dof(d)
    q = states[:d]
    p = states[d:]
    kinetic = 0.5 * np.sum(p * p, axis=0)
    x1 = q[0] - model.u1s
    x2 = q[1] - model.u2s
    u = 0.5 * model.omega**2 * x1 * x1 - 0.5 * model.lam**2 * x2 * x2
    if d == 3:
        x3 = q[2] - model.u3s
        u = u + 0.5 * (model.kappa * model.omega) ** 2 * x3 * x3 + 0.25 * x3**4
        if model.delta != 0.0:
            u = u + model.delta * (
                np.sin(q[0] - q[1]) + np.sin(q[1] - q[2]) + np.sin(q[2] - q[0])
            )
    sh, ch = math.sin(model.half_angle), math.cos(model.half_angle)
    gap_up = q[0] * sh - q[1] * ch
    gap_low = q[0] * sh + q[1] * ch
    inv_eps = 1.0 / model.epsilon
    v = model.b * (
        np.exp(np.minimum(-gap_up * inv_eps, 600.0))
        + np.exp(np.minimum(-gap_low * inv_eps, 600.0))
    )
    return kinetic + u + v


def _max_drift(model: WedgeModel, res, h0: float) -> float:
    h = hamiltonian_values(model, res.y)
    return float(np.max(np.abs(h - h0)) / max(abs(h0), 1e-300))


def section_crossings(
    model: WedgeModel,
    s0: PhaseState,
    n: int,
    spec: SectionSpec | None = None,
    cfg: IntegratorConfig | None = None,
    max_time: float = 1e4,
    _collect_trajectory: list | None = None,
) -> list[PhaseState]:
    """First ``n`` emitted crossings of the section, in time order.

    A crossing is the zeroed coordinate passing through zero with the
    requested sign of its velocity, localized on the dense output. With a
    slab, crossings outside the slab (position window or velocity sign) are
    skipped without being counted. A start exactly on the section is not a
    crossing; the first emitted point is the next return.
    """
    spec = spec or SectionSpec()
    cfg = cfg or IntegratorConfig()
    if n < 1:
        raise DomainError("need at least one crossing")
    d = s0.d
    if spec.coordinate >= d:
        raise DomainError("section coordinate index out of range")
    if spec.slab is not None and d < 3:
        raise DomainError("slab projection requires a 3 d.o.f. state")
    f = make_rhs(model, d)
    h0 = total_energy(model, s0)

    def section_event(t, y):
        return y[spec.coordinate]

    section_event.direction = spec.direction

    found: list[PhaseState] = []
    y = s0.as_vector()
    t_abs = 0.0
    # chunk long enough to contain a few returns of either mode
    chunk = max(20.0 / model.lam, 20.0 / model.omega)
    while len(found) < n:
        if t_abs >= max_time:
            raise SectionTimeoutError(
                f"found {len(found)}/{n} crossings within the {max_time} time budget"
            )
        t_span = min(chunk, max_time - t_abs)
        # stop the chunk once enough crossings occurred (slab skips, if any,
        # are made up by the next chunk); a start exactly on the section with
        # the matching sign fires a spurious occurrence at t = 0
        spurious = int(
            abs(y[spec.coordinate]) < 1e-10
            and math.copysign(1.0, y[spec.coordinate + d]) == spec.direction
        )
        section_event.terminal = n - len(found) + spurious
        res = solve_ivp(
            f,
            (0.0, t_span),
            y,
            method="DOP853",
            dense_output=True,
            rtol=cfg.rel_tol,
            atol=cfg.abs_tol,
            max_step=cfg.max_step,
            events=[section_event, _escape_event(model)],
        )
        if res.status == -1:
            raise StepUnderflowError(f"integrator failed: {res.message}")
        if res.status == 1 and res.t_events[1].size:
            raise EscapeError("trajectory crossed the wall crest during section sampling")
        drift = _max_drift(model, res, h0)
        if drift > cfg.energy_drift_abort:
            raise EnergyDriftExceededError(
                f"relative energy drift {drift:.3e} during section sampling"
            )
        if res.t[-1] <= 1e-9 and res.status == 1:
            # terminated on the spurious event at a start lying exactly on the
            # section: take a short plain step to move off it
            res = solve_ivp(
                f,
                (0.0, min(0.01 * chunk, t_span)),
                y,
                method="DOP853",
                dense_output=True,
                rtol=cfg.rel_tol,
                atol=cfg.abs_tol,
                max_step=cfg.max_step,
                events=[_escape_event(model)],
            )
            if res.status == -1:
                raise StepUnderflowError(f"integrator failed: {res.message}")
            y = res.y[:, -1]
            t_abs += res.t[-1]
            continue
        if _collect_trajectory is not None:
            _collect_trajectory.append((t_abs, res.sol))
        for t_e in res.t_events[0]:
            t_cross = t_abs + t_e
            if t_cross <= 1e-9:
                continue
            if found and t_cross - found[-1].t < 1e-9:
                continue  # chunk-boundary duplicate
            ye = res.sol(t_e)
            st = PhaseState(q=ye[:d], p=ye[d:], t=t_cross)
            if spec.slab is not None:
                j = spec.slab.index
                center = model.u3s if j == 2 and model.u3s is not None else 0.0
                if abs(st.q[j] - center) > spec.slab.half_width:
                    continue
                if math.copysign(1.0, st.p[j]) != spec.slab.velocity_sign or st.p[j] == 0.0:
                    continue
            found.append(st)
            if len(found) == n:
                break
        y = res.y[:, -1]
        t_abs += res.t[-1]
    return found
