"""Wedge model: geometry, potentials, energy bookkeeping, and steepness diagnostics.

All quantities are in the dimensionless, mass-weighted units of the model. The
configuration space is the symmetric wedge of full opening angle ``beta`` whose
walls pass through the origin along the unit vectors
``(cos(beta/2), +-sin(beta/2))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DomainError, InfeasibleEnergyError

# Exponent cap for the wall terms: keeps values finite far outside the wedge
# (only affects points deeper than ~600*epsilon past a wall line).
_EXP_CAP = 600.0


class Wall(Enum):
    UPPER = "Upper"
    LOWER = "Lower"


class CornerClass(Enum):
    TRANSVERSE = "Transverse"
    INTERIOR_NON_TRANSVERSE = "InteriorNonTransverse"
    BIFURCATING = "Bifurcating"


@dataclass(frozen=True)
class PhaseState:
    """Point-particle state: mass-weighted position ``q``, momentum ``p``, time ``t``."""

    q: np.ndarray
    p: np.ndarray
    t: float = 0.0

    def __post_init__(self) -> None:
        q = np.array(self.q, dtype=float, copy=True).reshape(-1)
        p = np.array(self.p, dtype=float, copy=True).reshape(-1)
        if q.size not in (2, 3) or p.size != q.size:
            raise DomainError(
                f"q and p must both have length 2 or 3, got {q.size} and {p.size}"
            )
        if not (np.all(np.isfinite(q)) and np.all(np.isfinite(p)) and math.isfinite(self.t)):
            raise DomainError("phase-space state contains non-finite components")
        q.setflags(write=False)
        p.setflags(write=False)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)

    @property
    def d(self) -> int:
        return self.q.size

    def as_vector(self) -> np.ndarray:
        """State as the flat vector [q, p] used by the integrators."""
        return np.concatenate([self.q, self.p])

    @classmethod
    def from_vector(cls, y, t: float = 0.0) -> "PhaseState":
        y = np.asarray(y, dtype=float).reshape(-1)
        d = y.size // 2
        return cls(q=y[:d], p=y[d:], t=t)


@dataclass(frozen=True)
class WedgeModel:
    """Complete parameter set of the wedge model.

    Parameters
    ----------
    beta : float
        Full wedge opening angle in radians, in (0, pi).
    omega : float
        Frequency of the oscillatory (u1) mode of the background saddle-center.
    lam : float
        Growth rate of the hyperbolic (u2) mode.
    u1s, u2s : float
        Saddle location; ``u2s = 0`` in the symmetric case.
    b : float
        Wall stiffness: value of a single wall term on its wall line.
    epsilon : float
        Wall steepness; ``0`` selects the hard-wall impact flow.
    kappa, u3s : float, optional
        Third degree of freedom: a quartic oscillator of linear frequency
        ``kappa * omega`` centered at ``u3s``. Both or neither must be given.
    delta : float
        Strength of the pairwise sine coupling between the three coordinates.
    """

    beta: float
    omega: float
    lam: float
    u1s: float
    u2s: float = 0.0
    b: float = 10.0
    epsilon: float = 0.0
    kappa: float | None = None
    u3s: float | None = None
    delta: float = 0.0

    def __post_init__(self) -> None:
        if not 0.0 < self.beta < math.pi:
            raise DomainError(f"beta must lie in (0, pi), got {self.beta}")
        for name in ("omega", "lam", "b"):
            if getattr(self, name) <= 0.0:
                raise DomainError(f"{name} must be strictly positive")
        if self.epsilon < 0.0:
            raise DomainError("epsilon must be non-negative")
        if self.delta < 0.0:
            raise DomainError("delta must be non-negative")
        if (self.kappa is None) != (self.u3s is None):
            raise DomainError("kappa and u3s must be provided together")
        if self.kappa is not None and self.kappa <= 0.0:
            raise DomainError("kappa must be strictly positive")

    @property
    def has_oscillator(self) -> bool:
        return self.kappa is not None

    @property
    def half_angle(self) -> float:
        return 0.5 * self.beta

    @property
    def tan_half(self) -> float:
        return math.tan(0.5 * self.beta)

    def require_dof(self, d: int) -> None:
        if d == 3 and not self.has_oscillator:
            raise DomainError("3 d.o.f. requested but the model has no third oscillator")
        if d not in (2, 3):
            raise DomainError(f"only 2 or 3 d.o.f. supported, got {d}")


@dataclass(frozen=True)
class Window:
    """Axis-aligned rectangle in the (u1, u2) plane."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float

    def __post_init__(self) -> None:
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise DomainError("window must have positive extent on both axes")

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    def contains(self, u1: float, u2: float) -> bool:
        return self.x_min <= u1 <= self.x_max and self.y_min <= u2 <= self.y_max


@dataclass(frozen=True)
class EnergyBudget:
    """Admissible-energy bookkeeping for a bounded window.

    ``e_barrier`` is the effective finite barrier (the single-wall value ``b``
    on the wall line); the exponential wall itself is unbounded, which we
    record separately in ``barrier_unbounded``.
    """

    h_star: float
    e_barrier: float
    u_hat: float
    barrier_unbounded: bool = True

    def admissible(self) -> bool:
        return self.u_hat < self.h_star < self.e_barrier + self.u_hat


# ---------------------------------------------------------------------------
# wedge geometry


def wall_normal(model: WedgeModel, wall: Wall) -> np.ndarray:
    """Inward unit normal of a wall (2-vector in the (u1, u2) plane)."""
    sh, ch = math.sin(model.half_angle), math.cos(model.half_angle)
    if wall is Wall.UPPER:
        return np.array([sh, -ch])
    return np.array([sh, ch])


def wall_direction(model: WedgeModel, wall: Wall) -> np.ndarray:
    """Unit vector along a wall, pointing away from the vertex."""
    sh, ch = math.sin(model.half_angle), math.cos(model.half_angle)
    if wall is Wall.UPPER:
        return np.array([ch, sh])
    return np.array([ch, -sh])


def wall_distance(model: WedgeModel, q, wall: Wall):
    """Signed distance to a wall line; positive on the interior side."""
    q = np.asarray(q, dtype=float)
    sh, ch = math.sin(model.half_angle), math.cos(model.half_angle)
    if wall is Wall.UPPER:
        return q[..., 0] * sh - q[..., 1] * ch
    return q[..., 0] * sh + q[..., 1] * ch


def wall_distances(model: WedgeModel, q) -> tuple[float, float]:
    """Signed distances (upper, lower); both positive strictly inside the wedge."""
    return wall_distance(model, q, Wall.UPPER), wall_distance(model, q, Wall.LOWER)


def inside_wedge(model: WedgeModel, q, tol: float = 0.0) -> bool:
    du, dl = wall_distances(model, np.asarray(q, dtype=float)[:2])
    return bool(du >= -tol and dl >= -tol)


# ---------------------------------------------------------------------------
# potentials


def background_potential(model: WedgeModel, q) -> tuple[float, np.ndarray]:
    """Background potential and its exact gradient at position ``q``.

    The 2 d.o.f. part is the saddle-center quadratic
    ``omega^2/2 (u1-u1s)^2 - lam^2/2 (u2-u2s)^2``. With a third coordinate it
    gains the quartic oscillator term and, for ``delta > 0``, the pairwise
    sine coupling of all three coordinates.
    """
    q = np.asarray(q, dtype=float).reshape(-1)
    model.require_dof(q.size)
    x1 = q[0] - model.u1s
    x2 = q[1] - model.u2s
    w2, l2 = model.omega**2, model.lam**2
    value = 0.5 * w2 * x1 * x1 - 0.5 * l2 * x2 * x2
    grad = np.zeros(q.size)
    grad[0] = w2 * x1
    grad[1] = -l2 * x2
    if q.size == 3:
        x3 = q[2] - model.u3s
        kw2 = (model.kappa * model.omega) ** 2
        value += 0.5 * kw2 * x3 * x3 + 0.25 * x3**4
        grad[2] = kw2 * x3 + x3**3
        if model.delta != 0.0:
            u1, u2, u3 = q
            value += model.delta * (
                math.sin(u1 - u2) + math.sin(u2 - u3) + math.sin(u3 - u1)
            )
            grad[0] += model.delta * (math.cos(u1 - u2) - math.cos(u3 - u1))
            grad[1] += model.delta * (-math.cos(u1 - u2) + math.cos(u2 - u3))
            grad[2] += model.delta * (-math.cos(u2 - u3) + math.cos(u3 - u1))
    return value, grad


def wall_potential(model: WedgeModel, q) -> tuple[float, np.ndarray]:
    """Steep wall potential and its exact gradient at position ``q``.

    One exponential term per wall, ``b * exp(-distance/epsilon)``, where
    ``distance`` is the signed distance to the wall line. Requires
    ``epsilon > 0``; the hard-wall limit has no potential to evaluate.
    """
    if model.epsilon <= 0.0:
        raise DomainError("wall_potential requires epsilon > 0; use the impact flow at epsilon = 0")
    q = np.asarray(q, dtype=float).reshape(-1)
    model.require_dof(q.size)
    sh, ch = math.sin(model.half_angle), math.cos(model.half_angle)
    q_up = q[0] * sh - q[1] * ch
    q_low = q[0] * sh + q[1] * ch
    e_up = model.b * math.exp(min(-q_up / model.epsilon, _EXP_CAP))
    e_low = model.b * math.exp(min(-q_low / model.epsilon, _EXP_CAP))
    value = e_up + e_low
    grad = np.zeros(q.size)
    c = -1.0 / model.epsilon
    grad[0] = c * (e_up * sh + e_low * sh)
    grad[1] = c * (-e_up * ch + e_low * ch)
    return value, grad


def total_energy(model: WedgeModel, state: PhaseState) -> float:
    """Total energy of a state; at ``epsilon = 0`` the position must lie in the closed wedge."""
    kinetic = 0.5 * float(np.dot(state.p, state.p))
    u, _ = background_potential(model, state.q)
    if model.epsilon > 0.0:
        v, _ = wall_potential(model, state.q)
        return kinetic + u + v
    tol = 1e-9 * max(1.0, float(np.max(np.abs(state.q[:2]))))
    if not inside_wedge(model, state.q, tol=tol):
        raise DomainError("position lies outside the closed wedge at epsilon = 0")
    return kinetic + u


def v20_from_energy(model: WedgeModel, h: float, u10: float, v10: float, u20: float) -> float:
    """Non-negative section momentum ``v2`` fixed by the energy relation.

    Inverts ``total_energy`` at the configuration ``(u10, u20)`` with
    transverse momentum ``v10``: the wall term is included when
    ``epsilon > 0`` (it is negligible on the section for steep walls but kept
    for exactness).
    """
    q = np.array([u10, u20])
    u, _ = background_potential(model, q)
    pot = u
    if model.epsilon > 0.0:
        v, _ = wall_potential(model, q)
        pot += v
    radicand = 2.0 * (h - pot) - v10 * v10
    if radicand < 0.0:
        raise InfeasibleEnergyError(
            f"energy {h} leaves negative kinetic margin {radicand} at u1={u10}, u2={u20}"
        )
    return math.sqrt(radicand)


# ---------------------------------------------------------------------------
# mass-weighted coordinates


@dataclass(frozen=True)
class JacobiSetup:
    """Mass-weighted coordinate constants for a collinear three-body chain.

    Derived constants must satisfy their defining square-root formulas; this
    is re-checked on construction to 1e-12 relative.
    """

    m_a: float
    m_b: float
    m_c: float
    a_hat: float
    b_hat: float
    beta: float

    def __post_init__(self) -> None:
        if min(self.m_a, self.m_b, self.m_c) <= 0.0:
            raise DomainError("all three masses must be strictly positive")
        a, b, beta = _jacobi_constants(self.m_a, self.m_b, self.m_c)
        for got, want, name in ((self.a_hat, a, "a_hat"), (self.b_hat, b, "b_hat"), (self.beta, beta, "beta")):
            if abs(got - want) > 1e-12 * max(1.0, abs(want)):
                raise DomainError(f"{name}={got} does not match its defining formula ({want})")

    @classmethod
    def from_masses(cls, m_a: float, m_b: float, m_c: float) -> "JacobiSetup":
        if min(m_a, m_b, m_c) <= 0.0:
            raise DomainError("all three masses must be strictly positive")
        a, b, beta = _jacobi_constants(m_a, m_b, m_c)
        return cls(m_a=m_a, m_b=m_b, m_c=m_c, a_hat=a, b_hat=b, beta=beta)


def _jacobi_constants(m_a: float, m_b: float, m_c: float) -> tuple[float, float, float]:
    m_tot = m_a + m_b + m_c
    a_hat = math.sqrt(m_a * (m_b + m_c) / m_tot)
    b_hat = math.sqrt(m_c * (m_b + m_a) / m_tot)
    beta = math.acos(math.sqrt(m_a * m_c / ((m_a + m_b) * (m_b + m_c))))
    return a_hat, b_hat, beta


def jacobi_transform(r1: float, r2: float, setup: JacobiSetup) -> tuple[float, float]:
    """Map inter-particle separations (r1, r2) to mass-weighted plane coordinates."""
    if not (math.isfinite(r1) and math.isfinite(r2)):
        raise DomainError("separations must be finite")
    q1 = setup.a_hat * r1 + setup.b_hat * r2 * math.cos(setup.beta)
    q2 = setup.b_hat * r2 * math.sin(setup.beta)
    return q1, q2


# ---------------------------------------------------------------------------
# wall minimum and steepness diagnostics


def _wall_u1_range(model: WedgeModel, window: Window, wall: Wall) -> tuple[float, float] | None:
    """Parameter range (in u1) of a wall segment inside the window, or None."""
    tb = model.tan_half
    lo = max(0.0, window.x_min)
    hi = window.x_max
    if wall is Wall.UPPER:
        hi = min(hi, window.y_max / tb) if tb > 0 else hi
        if window.y_max < 0:
            return None
    else:
        hi = min(hi, -window.y_min / tb) if tb > 0 else hi
        if window.y_min > 0:
            return None
    if hi <= lo:
        return None
    return lo, hi


def wall_background_minimum(model: WedgeModel, window: Window) -> float:
    """Minimum of the background potential over the wall segments inside a window.

    Along each wall the potential is a quadratic in u1, so the minimum is at
    an endpoint or at the vertex of the parabola. Returns +inf if no wall
    segment intersects the window.
    """
    w2, l2, tb = model.omega**2, model.lam**2, model.tan_half
    best = math.inf
    for wall in Wall:
        rng = _wall_u1_range(model, window, wall)
        if rng is None:
            continue
        lo, hi = rng
        sign = 1.0 if wall is Wall.UPPER else -1.0

        def u_wall(u1: float) -> float:
            return 0.5 * w2 * (u1 - model.u1s) ** 2 - 0.5 * l2 * (sign * u1 * tb - model.u2s) ** 2

        candidates = [lo, hi]
        a2 = w2 - l2 * tb * tb
        b1 = -w2 * model.u1s + l2 * tb * sign * model.u2s
        if a2 != 0.0:
            vertex = -b1 / a2
            if lo < vertex < hi:
                candidates.append(vertex)
        best = min(best, min(u_wall(u) for u in candidates))
    return best


def energy_budget(model: WedgeModel, h_star: float, window: Window) -> EnergyBudget:
    """Energy bookkeeping for a window: wall minimum and effective barrier."""
    u_hat = wall_background_minimum(model, window)
    return EnergyBudget(h_star=h_star, e_barrier=model.b, u_hat=u_hat)


@dataclass(frozen=True)
class ConditionEntry:
    """Per-steepness diagnostics of the wall potential."""

    epsilon: float
    interior_max_value: float
    interior_max_grad: float
    barrier_monotone: bool
    inverse_sup: float
    inverse_slope_sup: float


@dataclass(frozen=True)
class ConditionReport:
    """Numerical verification that the wall family steepens cleanly.

    ``entries`` follow the input epsilon order (must be decreasing). The
    interior quantities are sups of |V| and |grad V| over the compact set of
    window points at distance at least ``delta_k`` from both walls; the
    inverse quantities are sups of the width function Q(W) = -eps*log(W/b)
    and its derivative over the mid-barrier band [0.1 b, 0.9 b].
    """

    entries: tuple[ConditionEntry, ...]
    interior_decay_monotone: bool
    inverse_decay_monotone: bool
    u_hat: float
    e_barrier: float
    barrier_unbounded: bool
    energy_window: tuple[float, float]
    wall_min_ok: bool
    delta_k: float


def check_conditions(
    model: WedgeModel,
    window: Window,
    epsilons: list[float],
    delta_k: float = 0.5,
    grid: int = 256,
) -> ConditionReport:
    """Verify the steep-wall family diagnostics over a bounded window.

    ``epsilons`` must be sorted in decreasing order. See ``ConditionReport``
    for the quantities computed per epsilon.
    """
    if any(e <= 0.0 for e in epsilons):
        raise DomainError("all epsilons must be positive")
    if any(b >= a for a, b in zip(epsilons, epsilons[1:])):
        raise DomainError("epsilons must be sorted in decreasing order")
    xs = np.linspace(window.x_min, window.x_max, grid)
    ys = np.linspace(window.y_min, window.y_max, grid)
    u1g, u2g = np.meshgrid(xs, ys, indexing="ij")
    sh, ch = math.sin(model.half_angle), math.cos(model.half_angle)
    q_up = u1g * sh - u2g * ch
    q_low = u1g * sh + u2g * ch
    mask = (q_up >= delta_k) & (q_low >= delta_k)
    if not mask.any():
        raise DomainError("window does not contain interior points at the requested margin")

    entries = []
    w_band = np.linspace(0.1 * model.b, 0.9 * model.b, 64)
    for eps in epsilons:
        e_up = model.b * np.exp(np.minimum(-q_up[mask] / eps, _EXP_CAP))
        e_low = model.b * np.exp(np.minimum(-q_low[mask] / eps, _EXP_CAP))
        vmax = float(np.max(e_up + e_low))
        gmax = float(np.max(np.hypot((e_up + e_low) * sh, (e_low - e_up) * ch)) / eps)
        # single-wall barrier profile on a distance grid: must decrease with Q
        q_samples = np.linspace(0.0, 5.0 * delta_k, 128)
        w_samples = model.b * np.exp(-q_samples / eps)
        monotone = bool(np.all(np.diff(w_samples) < 0.0))
        q_of_w = -eps * np.log(w_band / model.b)
        entries.append(
            ConditionEntry(
                epsilon=eps,
                interior_max_value=vmax,
                interior_max_grad=gmax,
                barrier_monotone=monotone,
                inverse_sup=float(np.max(np.abs(q_of_w))),
                inverse_slope_sup=float(np.max(eps / w_band)),
            )
        )

    def strictly_decreasing(values: list[float]) -> bool:
        return all(a > b for a, b in zip(values, values[1:]))

    interior_ok = strictly_decreasing([e.interior_max_value for e in entries]) and strictly_decreasing(
        [e.interior_max_grad for e in entries]
    )
    inverse_ok = strictly_decreasing([e.inverse_sup for e in entries]) and strictly_decreasing(
        [e.inverse_slope_sup for e in entries]
    )
    u_hat = wall_background_minimum(model, window)
    return ConditionReport(
        entries=tuple(entries),
        interior_decay_monotone=interior_ok,
        inverse_decay_monotone=inverse_ok,
        u_hat=u_hat,
        e_barrier=model.b,
        barrier_unbounded=True,
        energy_window=(u_hat, u_hat + model.b),
        wall_min_ok=bool(-model.b < u_hat),
        delta_k=delta_k,
    )


def model_from_dict(data: dict) -> WedgeModel:
    """Build a model from the JSON parameter object (angles in radians)."""
    allowed = {"beta", "omega", "lambda", "u1s", "u2s", "b", "epsilon", "kappa", "u3s", "delta"}
    unknown = set(data) - allowed
    if unknown:
        raise DomainError(f"unknown model keys: {sorted(unknown)}")
    required = {"beta", "omega", "lambda", "u1s"}
    missing = required - set(data)
    if missing:
        raise DomainError(f"missing model keys: {sorted(missing)}")
    kwargs = dict(
        beta=float(data["beta"]),
        omega=float(data["omega"]),
        lam=float(data["lambda"]),
        u1s=float(data["u1s"]),
        u2s=float(data.get("u2s", 0.0)),
        b=float(data.get("b", 10.0)),
        epsilon=float(data.get("epsilon", 0.0)),
        delta=float(data.get("delta", 0.0)),
    )
    if "kappa" in data or "u3s" in data:
        kwargs["kappa"] = float(data["kappa"]) if "kappa" in data else None
        kwargs["u3s"] = float(data["u3s"]) if "u3s" in data else None
    return WedgeModel(**kwargs)
