"""Parameter continuation of period-2 orbits and stability-transition scans."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .errors import DomainError, SoftImpactError
from .model import WedgeModel
from .orbits import (
    CONSTRAINTS,
    FIX_ENERGY,
    FIX_RE_MULTIPLIER,
    FIX_U10,
    PeriodicOrbit,
    Stability,
    find_period2_impact,
    find_period2_smooth,
)


@dataclass
class ContinuationRun:
    constraint: str
    target: float | None
    path: tuple[float, ...]
    orbits: list[PeriodicOrbit]
    failures: list[tuple[float, str]]

    @property
    def converged(self) -> bool:
        return not self.failures and len(self.orbits) == len(self.path)


@dataclass
class BifurcationCurve:
    """Stability tags over a (frequency-ratio, u10) grid and the onset curve.

    ``u_c`` holds, per ratio, the refined hyperbolic-to-elliptic transition
    point (NaN when the grid shows no transition); ``transitions`` counts all
    tag changes so a non-monotone pattern is visible to callers.
    """

    epsilon: float
    ratios: tuple[float, ...]
    u10_grid: tuple[float, ...]
    traces: np.ndarray  # (n_ratios, n_u10), NaN where the solve failed
    tags: list[list[str]]  # stability names, "" where failed
    u_c: list[float]
    transitions: list[int]


def _solve_at(model: WedgeModel, u10: float, constraint: str, target, guess: PeriodicOrbit | None,
              eps_ladder: tuple[float, ...] = ()) -> PeriodicOrbit:
    """Orbit at the model's epsilon, seeded from the hard-wall solution."""
    imp = find_period2_impact(
        replace(model, epsilon=0.0), u10,
        v20_guess=guess.v20 if guess is not None else None,
    )
    if model.epsilon == 0.0:
        return imp
    orb = imp
    for eps in (*eps_ladder, model.epsilon):
        orb = find_period2_smooth(replace(model, epsilon=eps), orb, constraint, target)
    return orb


def continue_orbit(
    model: WedgeModel,
    orbit0: PeriodicOrbit,
    eps_path: list[float],
    constraint: str = FIX_U10,
    target: float | None = None,
) -> ContinuationRun:
    """Track an orbit family along a steepness path, warm-starting each step.

    On a failed step, one midpoint value is inserted and the step retried
    from the midpoint solution; if the step still fails it is recorded and
    the run stops.
    """
    if constraint not in CONSTRAINTS:
        raise DomainError(f"unknown constraint {constraint!r}")
    if not eps_path:
        raise DomainError("eps_path must be non-empty")
    run = ContinuationRun(constraint=constraint, target=target, path=tuple(eps_path),
                          orbits=[], failures=[])
    prev = orbit0
    for eps in eps_path:
        try:
            orb = _solve_one(model, prev, eps, constraint, target)
        except SoftImpactError as exc:
            mid = 0.5 * (prev.epsilon + eps)
            try:
                bridge = _solve_one(model, prev, mid, constraint, target)
                orb = _solve_one(model, bridge, eps, constraint, target)
            except SoftImpactError as exc2:
                run.failures.append((eps, f"{type(exc2).__name__}: {exc2}"))
                break
        run.orbits.append(orb)
        prev = orb
    return run


def _solve_one(model, guess: PeriodicOrbit, eps: float, constraint: str, target) -> PeriodicOrbit:
    if eps == guess.epsilon:
        return guess
    if eps == 0.0:
        return find_period2_impact(replace(model, epsilon=0.0), guess.u10, v20_guess=guess.v20)
    return find_period2_smooth(replace(model, epsilon=eps), guess, constraint, target)


def _scan_one_ratio(args) -> tuple[list[float], list[str], float, int]:
    model_base, ratio, u10_grid, epsilon, eps_ladder, u_c_tol = args
    lam = model_base.omega / ratio
    model = replace(model_base, lam=lam, epsilon=epsilon)
    traces: list[float] = []
    tags: list[str] = []
    guess: PeriodicOrbit | None = None
    orbit_cache: dict[float, PeriodicOrbit] = {}

    def orbit_at(u10: float) -> PeriodicOrbit:
        if u10 not in orbit_cache:
            orbit_cache[u10] = _solve_at(model, u10, FIX_U10, None, guess, eps_ladder)
        return orbit_cache[u10]

    for u10 in u10_grid:
        try:
            orb = orbit_at(float(u10))
            guess = orb
            traces.append(orb.trace)
            tags.append(orb.stability.value)
        except SoftImpactError:
            traces.append(math.nan)
            tags.append("")

    # one hyperbolic -> elliptic onset expected; refine it on |trace| - 2
    transitions = 0
    bracket = None
    for a, b in zip(range(len(tags) - 1), range(1, len(tags))):
        ta, tb = tags[a], tags[b]
        if not ta or not tb or ta == tb:
            continue
        transitions += 1
        if ta == Stability.HYPERBOLIC.value and tb == Stability.ELLIPTIC.value and bracket is None:
            bracket = (float(u10_grid[a]), float(u10_grid[b]))
    u_c = math.nan
    if bracket is not None:
        lo, hi = bracket
        g = lambda u: abs(orbit_at(u).trace) - 2.0
        glo = g(lo)
        while hi - lo > u_c_tol:
            mid = 0.5 * (lo + hi)
            gm = g(mid)
            if glo * gm > 0:
                lo, glo = mid, gm
            else:
                hi = mid
        u_c = 0.5 * (lo + hi)
    return traces, tags, u_c, transitions


def bifurcation_scan(
    model_base: WedgeModel,
    ratios: list[float],
    u10_grid: list[float],
    epsilon: float,
    u_c_tol: float = 1e-6,
    workers: int | None = None,
    eps_ladder: tuple[float, ...] = (0.001, 0.01, 0.1, 0.2),
) -> BifurcationCurve:
    """Stability scan over frequency ratio and launch position.

    The ratio sweep varies ``lam`` at fixed ``omega``. At ``epsilon = 0``
    every orbit is analytic; otherwise each grid point is continued from its
    hard-wall orbit through the sub-``epsilon`` entries of ``eps_ladder``.
    Grid points where the solve fails are recorded as NaN and excluded from
    the transition search.
    """
    if any(r <= 0 for r in ratios):
        raise DomainError("frequency ratios must be positive")
    if any(b <= a for a, b in zip(u10_grid, u10_grid[1:])) or not u10_grid:
        raise DomainError("u10_grid must be strictly ascending and non-empty")
    if u10_grid[0] <= model_base.u1s:
        raise DomainError("u10 grid must start to the right of the saddle")
    ladder = tuple(e for e in eps_ladder if 0.0 < e < epsilon)
    jobs = [(model_base, float(r), tuple(float(u) for u in u10_grid), epsilon, ladder, u_c_tol)
            for r in ratios]
    if workers is not None and workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_scan_one_ratio, jobs))
    else:
        results = [_scan_one_ratio(job) for job in jobs]
    traces = np.array([r[0] for r in results])
    return BifurcationCurve(
        epsilon=epsilon,
        ratios=tuple(float(r) for r in ratios),
        u10_grid=tuple(float(u) for u in u10_grid),
        traces=traces,
        tags=[r[1] for r in results],
        u_c=[r[2] for r in results],
        transitions=[r[3] for r in results],
    )
