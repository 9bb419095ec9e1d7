"""Hill's regions: allowed-motion boundaries, corner taxonomy, convergence metrics."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import brentq
from scipy.spatial import cKDTree
from skimage import measure

from .errors import DomainError
from .model import (
    CornerClass,
    Wall,
    WedgeModel,
    Window,
    background_potential,
    energy_budget,
    wall_direction,
    wall_normal,
    _wall_u1_range,
)

_EXP_CAP = 600.0


@dataclass(frozen=True)
class BoundaryPolyline:
    """Ordered point chain (n, 2) with a part tag: 'interior', 'wall', or 'smooth'."""

    points: np.ndarray
    tag: str

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 2:
            raise DomainError("polyline needs at least two 2-d points")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)


@dataclass(frozen=True)
class HillCorner:
    point: np.ndarray
    wall: Wall
    kind: CornerClass | None = None


@dataclass(frozen=True)
class HillRegion:
    h_star: float
    epsilon: float
    window: Window
    boundary: tuple[BoundaryPolyline, ...]
    corners: tuple[HillCorner, ...]

    def parts(self, tag: str) -> list[np.ndarray]:
        return [b.points for b in self.boundary if b.tag == tag]


def _planar_potential_grid(model: WedgeModel, window: Window, resolution: int, with_wall: bool,
                           epsilon: float | None = None):
    xs = np.linspace(window.x_min, window.x_max, resolution)
    ys = np.linspace(window.y_min, window.y_max, resolution)
    u1, u2 = np.meshgrid(xs, ys, indexing="ij")
    x1 = u1 - model.u1s
    x2 = u2 - model.u2s
    values = 0.5 * model.omega**2 * x1 * x1 - 0.5 * model.lam**2 * x2 * x2
    if with_wall:
        eps = model.epsilon if epsilon is None else epsilon
        sh, ch = math.sin(model.half_angle), math.cos(model.half_angle)
        values = values + model.b * (
            np.exp(np.minimum(-(u1 * sh - u2 * ch) / eps, _EXP_CAP))
            + np.exp(np.minimum(-(u1 * sh + u2 * ch) / eps, _EXP_CAP))
        )
    return xs, ys, values


def _contours_xy(values: np.ndarray, level: float, xs: np.ndarray, ys: np.ndarray) -> list[np.ndarray]:
    """Marching-squares contours converted from index to (u1, u2) coordinates."""
    dx = xs[1] - xs[0]
    dy = ys[1] - ys[0]
    out = []
    for c in measure.find_contours(values, level):
        pts = np.empty_like(c)
        pts[:, 0] = xs[0] + c[:, 0] * dx
        pts[:, 1] = ys[0] + c[:, 1] * dy
        out.append(pts)
    return out


def _wall_value(model: WedgeModel, wall: Wall, u1):
    sign = 1.0 if wall is Wall.UPPER else -1.0
    u2 = sign * np.asarray(u1) * model.tan_half
    x1 = np.asarray(u1) - model.u1s
    x2 = u2 - model.u2s
    return 0.5 * model.omega**2 * x1 * x1 - 0.5 * model.lam**2 * x2 * x2


def _wall_point(model: WedgeModel, wall: Wall, u1: float) -> np.ndarray:
    sign = 1.0 if wall is Wall.UPPER else -1.0
    return np.array([u1, sign * u1 * model.tan_half])


def _clip_to_wedge(model: WedgeModel, pts: np.ndarray) -> list[np.ndarray]:
    """Split a polyline at the wall lines, keeping the inside runs."""
    sh, ch = math.sin(model.half_angle), math.cos(model.half_angle)
    gap_up = pts[:, 0] * sh - pts[:, 1] * ch
    gap_low = pts[:, 0] * sh + pts[:, 1] * ch
    inside = (gap_up >= 0.0) & (gap_low >= 0.0)
    pieces: list[list[np.ndarray]] = []
    current: list[np.ndarray] = []
    for k in range(len(pts)):
        if inside[k]:
            if not current and k > 0:
                # entering: add the wall intersection on the previous segment
                current.append(_segment_wall_point(pts[k - 1], pts[k], gap_up, gap_low, k - 1))
            current.append(pts[k])
        else:
            if current:
                current.append(_segment_wall_point(pts[k - 1], pts[k], gap_up, gap_low, k - 1))
                pieces.append(current)
                current = []
    if current:
        pieces.append(current)
    return [np.array(p) for p in pieces if len(p) >= 2]


def _segment_wall_point(a, b, gap_up, gap_low, k) -> np.ndarray:
    """Linear interpolation of the wall crossing on segment (a, b)."""
    ga0, ga1 = gap_up[k], gap_up[k + 1]
    gl0, gl1 = gap_low[k], gap_low[k + 1]
    ts = []
    for g0, g1 in ((ga0, ga1), (gl0, gl1)):
        if (g0 < 0.0) != (g1 < 0.0) and g0 != g1:
            ts.append(g0 / (g0 - g1))
    t = min(ts) if min(gap_up[k], gap_low[k]) >= 0 else max(ts)
    return a + t * (b - a)


def impact_hill_region(model: WedgeModel, h_star: float, window: Window, resolution: int) -> HillRegion:
    """Allowed-motion region of the hard-wall system at energy ``h_star``.

    The interior boundary is the marching-squares contour of the background
    potential clipped to the closed wedge; the wall part collects wall
    segments whose potential lies below ``h_star`` (sampled 1-d along each
    wall, with crossing and tangency points refined by root finding). The
    corner set holds the refined contour-wall intersections.
    """
    if resolution < 64:
        raise DomainError("resolution must be at least 64 cells per axis")
    budget = energy_budget(model, h_star, window)
    if h_star >= budget.e_barrier + budget.u_hat:
        raise DomainError(
            f"h_star {h_star} reaches the escape window (u_hat={budget.u_hat}, barrier={budget.e_barrier})"
        )
    xs, ys, values = _planar_potential_grid(model, window, resolution, with_wall=False)
    polylines: list[BoundaryPolyline] = []
    for pts in _contours_xy(values, h_star, xs, ys):
        for piece in _clip_to_wedge(model, pts):
            polylines.append(BoundaryPolyline(points=piece, tag="interior"))

    corners: list[HillCorner] = []
    for wall in Wall:
        rng = _wall_u1_range(model, window, wall)
        if rng is None:
            continue
        lo, hi = rng
        us = np.linspace(lo, hi, resolution)
        vals = _wall_value(model, wall, us) - h_star
        # allowed runs (potential below the energy) become wall polylines
        allowed = vals <= 0.0
        k = 0
        while k < len(us):
            if not allowed[k]:
                k += 1
                continue
            j = k
            while j + 1 < len(us) and allowed[j + 1]:
                j += 1
            u_a, u_b = us[k], us[j]
            if k > 0:
                u_a = brentq(lambda u: float(_wall_value(model, wall, u) - h_star), us[k - 1], us[k], xtol=1e-12)
                corners.append(HillCorner(point=_wall_point(model, wall, u_a), wall=wall))
            if j + 1 < len(us):
                u_b = brentq(lambda u: float(_wall_value(model, wall, u) - h_star), us[j], us[j + 1], xtol=1e-12)
                corners.append(HillCorner(point=_wall_point(model, wall, u_b), wall=wall))
            if u_b > u_a:
                seg = np.linspace(u_a, u_b, max(2, int(round((u_b - u_a) / (us[1] - us[0]))) + 1))
                polylines.append(BoundaryPolyline(
                    points=np.column_stack([seg, (1.0 if wall is Wall.UPPER else -1.0) * seg * model.tan_half]),
                    tag="wall",
                ))
            k = j + 1
        # tangential touches: critical points of the wall potential at the level
        dv = np.diff(vals)
        for k in np.nonzero(np.sign(dv[:-1]) * np.sign(dv[1:]) < 0)[0]:
            du = us[1] - us[0]
            u_crit = brentq(
                lambda u: float(_wall_value(model, wall, u + 0.5 * du) - _wall_value(model, wall, u - 0.5 * du)),
                us[k], us[k + 2], xtol=1e-12,
            )
            scale = max(1.0, abs(h_star))
            if abs(float(_wall_value(model, wall, u_crit)) - h_star) <= 1e-9 * scale and not any(
                c.wall is wall and abs(c.point[0] - u_crit) < 1e-6 for c in corners
            ):
                corners.append(HillCorner(point=_wall_point(model, wall, u_crit), wall=wall))
    return HillRegion(
        h_star=h_star,
        epsilon=0.0,
        window=window,
        boundary=tuple(polylines),
        corners=tuple(corners),
    )


def smooth_hill_boundary(
    model: WedgeModel, h_star: float, epsilon: float, window: Window, resolution: int
) -> HillRegion:
    """Level set of the full (background + wall) potential at ``h_star``."""
    if resolution < 64:
        raise DomainError("resolution must be at least 64 cells per axis")
    if epsilon <= 0.0:
        raise DomainError("smooth boundary requires epsilon > 0")
    budget = energy_budget(model, h_star, window)
    if h_star >= budget.e_barrier + budget.u_hat:
        raise DomainError("h_star reaches the escape window")
    xs, ys, values = _planar_potential_grid(model, window, resolution, with_wall=True, epsilon=epsilon)
    polylines = tuple(
        BoundaryPolyline(points=pts, tag="smooth") for pts in _contours_xy(values, h_star, xs, ys)
    )
    return HillRegion(h_star=h_star, epsilon=epsilon, window=window, boundary=polylines, corners=())


def classify_boundary_points(model: WedgeModel, region: HillRegion) -> HillRegion:
    """Tag each corner by gradient transversality and the normal potential slope.

    A corner is transverse when the background gradient is not parallel to
    the wall normal (angle tolerance 1e-6 rad); non-transverse corners split
    by the sign of the inward normal derivative.
    """
    if region.epsilon != 0.0:
        raise DomainError("corner classification applies to the hard-wall region")
    out = []
    for corner in region.corners:
        _, grad = background_potential(model, corner.point)
        n = wall_normal(model, corner.wall)
        d = wall_direction(model, corner.wall)
        g_norm = float(np.linalg.norm(grad))
        tangential = abs(float(np.dot(grad, d)))
        if g_norm == 0.0 or tangential > math.sin(1e-6) * g_norm:
            kind = CornerClass.TRANSVERSE
        else:
            u_y = float(np.dot(grad, n))
            kind = CornerClass.INTERIOR_NON_TRANSVERSE if u_y < 0.0 else CornerClass.BIFURCATING
        out.append(replace(corner, kind=kind))
    return replace(region, corners=tuple(out))


def hausdorff_distance(a, b, sample_step: float | None = None) -> float:
    """Symmetric Hausdorff distance between two polyline sets.

    Inputs are sequences of (n, 2) arrays (or ``BoundaryPolyline``); the
    distance is computed between their sampled point sets, optionally
    resampled so that no segment exceeds ``sample_step``.
    """
    pa = _collect_points(a, sample_step)
    pb = _collect_points(b, sample_step)
    if pa.size == 0 or pb.size == 0:
        raise DomainError("both polyline sets must be non-empty")
    d_ab = float(np.max(cKDTree(pb).query(pa)[0]))
    d_ba = float(np.max(cKDTree(pa).query(pb)[0]))
    return max(d_ab, d_ba)


def _collect_points(polylines, sample_step: float | None) -> np.ndarray:
    chunks = []
    for item in polylines:
        pts = item.points if isinstance(item, BoundaryPolyline) else np.asarray(item, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise DomainError("each polyline must be an (n, 2) array")
        if sample_step is not None and sample_step > 0:
            pts = _resample(pts, sample_step)
        chunks.append(pts)
    if not chunks:
        return np.empty((0, 2))
    return np.vstack(chunks)


def _resample(pts: np.ndarray, max_seg: float) -> np.ndarray:
    out = [pts[0]]
    for a, b in zip(pts[:-1], pts[1:]):
        seg = float(np.linalg.norm(b - a))
        if seg > max_seg:
            n = int(math.ceil(seg / max_seg))
            for k in range(1, n):
                out.append(a + (b - a) * (k / n))
        out.append(b)
    return np.array(out)


def filtered_hausdorff(
    a, b, exclude_near: np.ndarray | None, radius: float, sample_step: float | None = None
) -> float:
    """Hausdorff distance after dropping points within ``radius`` of given centers."""
    pa = _collect_points(a, sample_step)
    pb = _collect_points(b, sample_step)
    if exclude_near is not None and len(exclude_near):
        tree = cKDTree(np.asarray(exclude_near, dtype=float))
        pa = pa[tree.query(pa)[0] > radius]
        pb = pb[tree.query(pb)[0] > radius]
    if pa.size == 0 or pb.size == 0:
        raise DomainError("filter removed all points")
    d_ab = float(np.max(cKDTree(pb).query(pa)[0]))
    d_ba = float(np.max(cKDTree(pa).query(pb)[0]))
    return max(d_ab, d_ba)
