"""Planar convex bodies: exact polygons and lazily evaluated support functions.

Every body contains the origin in its interior, so support values are
positive.  Polygons are stored counterclockwise with no repeated or collinear
vertices.  Bodies without a polygonal form (discs, L_p combinations) are
turned into circumscribed polygons by :func:`support_polytope`.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

UNIT_TOL = 1e-12
SNAP = 1e-12
VERTEX_MERGE = 1e-10


class GeometryError(ValueError):
    pass


class DegenerateInput(GeometryError):
    pass


class OriginNotInterior(GeometryError):
    pass


class NotConvex(GeometryError):
    def __init__(self, message: str, triple=None):
        super().__init__(message)
        self.triple = triple


def _cross(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def unit_directions(n: int, offset: float = 0.0) -> np.ndarray:
    theta = offset + 2 * np.pi * np.arange(n) / n
    return np.column_stack([np.cos(theta), np.sin(theta)])


def random_directions(rng: np.random.Generator, n: int) -> np.ndarray:
    theta = rng.uniform(0, 2 * np.pi, n)
    return np.column_stack([np.cos(theta), np.sin(theta)])


class Body:
    """Convex body with the origin in its interior, known by its support function."""

    kind = "body"

    def h(self, u: np.ndarray) -> np.ndarray:
        """Support values at the rows of ``u`` (unit vectors, unchecked)."""
        raise NotImplementedError

    def support(self, u) -> float | np.ndarray:
        return support(self, u)

    def edge_normals(self) -> np.ndarray:
        """Directions where the support function may have a kink."""
        return np.empty((0, 2))

    def circumradius(self) -> float:
        """Upper bound on the distance from the origin to any point of the body."""
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError


def support(body: Body, u) -> float | np.ndarray:
    """``max <x, u>`` over the body for a unit vector (or rows of unit vectors) ``u``."""
    arr = np.asarray(u, dtype=float)
    single = arr.ndim == 1
    arr = np.atleast_2d(arr)
    if arr.shape[-1] != 2:
        raise ValueError("directions must be 2-vectors")
    norms = np.hypot(arr[:, 0], arr[:, 1])
    if np.any(np.abs(norms - 1.0) > UNIT_TOL):
        raise ValueError("support needs unit directions")
    values = body.h(arr)
    return float(values[0]) if single else values


@dataclass(frozen=True, eq=False)
class Polygon(Body):
    """Convex polygon, counterclockwise, origin strictly inside.

    The constructor accepts clockwise input (reversed), drops repeated and
    collinear vertices, and raises on anything that is not a convex polygon
    around the origin.
    """

    vertices: np.ndarray
    kind = "polygon"

    def __post_init__(self):
        v = _normalize_vertices(self.vertices)
        v.flags.writeable = False
        object.__setattr__(self, "vertices", v)

    def h(self, u: np.ndarray) -> np.ndarray:
        return np.max(u @ self.vertices.T, axis=1)

    @cached_property
    def edges(self) -> np.ndarray:
        return np.roll(self.vertices, -1, axis=0) - self.vertices

    @cached_property
    def edge_lengths(self) -> np.ndarray:
        return np.hypot(self.edges[:, 0], self.edges[:, 1])

    @cached_property
    def normals(self) -> np.ndarray:
        e = self.edges
        return np.column_stack([e[:, 1], -e[:, 0]]) / self.edge_lengths[:, None]

    @cached_property
    def facet_support(self) -> np.ndarray:
        """Support value at each outward edge normal (distance of the edge line)."""
        return np.einsum("ij,ij->i", self.normals, self.vertices)

    @cached_property
    def area(self) -> float:
        v = self.vertices
        return 0.5 * float(np.sum(_cross(v, np.roll(v, -1, axis=0))))

    def edge_normals(self) -> np.ndarray:
        return self.normals

    def circumradius(self) -> float:
        return float(np.max(np.hypot(self.vertices[:, 0], self.vertices[:, 1])))

    def scaled(self, lam: float) -> "Polygon":
        return Polygon(lam * self.vertices)

    def translated(self, shift) -> "Polygon":
        return Polygon(self.vertices + np.asarray(shift, dtype=float))

    def __len__(self) -> int:
        return len(self.vertices)

    def to_dict(self) -> dict:
        return {"type": "polygon", "vertices": self.vertices.tolist()}


def _normalize_vertices(points) -> np.ndarray:
    v = np.array(points, dtype=float)
    if v.ndim != 2 or v.shape[1] != 2 or len(v) < 3:
        raise DegenerateInput("need at least 3 points given as (x, y) pairs")
    if not np.all(np.isfinite(v)):
        raise DegenerateInput("vertices must be finite")
    scale = float(np.max(np.abs(v)))
    if scale == 0:
        raise DegenerateInput("all points coincide")

    # repeated consecutive points, including the wrap-around pair
    keep = np.ones(len(v), dtype=bool)
    keep[1:] = np.max(np.abs(np.diff(v, axis=0)), axis=1) > SNAP * scale
    v = v[keep]
    if len(v) > 1 and np.max(np.abs(v[0] - v[-1])) <= SNAP * scale:
        v = v[:-1]
    if len(v) < 3:
        raise DegenerateInput("fewer than 3 distinct points")

    signed = 0.5 * float(np.sum(_cross(v, np.roll(v, -1, axis=0))))
    if abs(signed) <= SNAP * scale * scale:
        raise DegenerateInput("polygon has zero area")
    if signed < 0:
        v = v[::-1].copy()

    # collinear middle vertices are not extreme points; drop them
    while True:
        e_in = v - np.roll(v, 1, axis=0)
        e_out = np.roll(v, -1, axis=0) - v
        sizes = np.hypot(e_in[:, 0], e_in[:, 1]) * np.hypot(e_out[:, 0], e_out[:, 1])
        flat = np.abs(_cross(e_in, e_out)) <= SNAP * sizes
        if not flat.any():
            break
        if np.sum(~flat) < 3:
            raise DegenerateInput("points are collinear")
        v = v[~flat]

    e_in = v - np.roll(v, 1, axis=0)
    e_out = np.roll(v, -1, axis=0) - v
    turn = _cross(e_in, e_out)
    bad = np.flatnonzero(turn <= 0)
    if bad.size:
        i = int(bad[0])
        triple = [v[i - 1].tolist(), v[i].tolist(), v[(i + 1) % len(v)].tolist()]
        raise NotConvex(f"reflex or flat turn at vertex triple {triple}", triple)
    angles = np.arctan2(turn, np.einsum("ij,ij->i", e_in, e_out))
    if abs(float(np.sum(angles)) - 2 * np.pi) > 1e-6:
        raise NotConvex("vertex order winds more than once (self-intersecting)", None)

    e = np.roll(v, -1, axis=0) - v
    dist = _cross(e, -v) / np.hypot(e[:, 0], e[:, 1])
    if np.any(dist <= SNAP * scale):
        i = int(np.argmin(dist))
        raise OriginNotInterior(
            f"origin is not strictly inside: edge {i} line at signed distance {float(dist[i])!r}"
        )
    return v


def polygon_from_vertices(points: Sequence[Sequence[float]]) -> Polygon:
    return Polygon(points)


def regular_polygon(k: int, radius: float = 1.0, offset: float = 0.0) -> Polygon:
    return Polygon(radius * unit_directions(k, offset))


def square(half_side: float = 1.0) -> Polygon:
    s = half_side
    return Polygon([[-s, -s], [s, -s], [s, s], [-s, s]])


@dataclass(frozen=True, eq=False)
class Ball(Body):
    center: tuple
    radius: float
    kind = "ball"

    def __post_init__(self):
        c = tuple(float(x) for x in self.center)
        if len(c) != 2:
            raise GeometryError("ball center must be a 2-vector")
        r = float(self.radius)
        if not r > 0:
            raise DegenerateInput("ball radius must be positive")
        if math.hypot(*c) >= r:
            raise OriginNotInterior("origin is not strictly inside the ball")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radius", r)

    def h(self, u: np.ndarray) -> np.ndarray:
        return u @ np.asarray(self.center) + self.radius

    def circumradius(self) -> float:
        return math.hypot(*self.center) + self.radius

    @property
    def area(self) -> float:
        return math.pi * self.radius**2

    def to_dict(self) -> dict:
        return {"type": "ball", "center": list(self.center), "radius": self.radius}


def unit_ball() -> Ball:
    return Ball((0.0, 0.0), 1.0)


@dataclass(frozen=True, eq=False)
class Dilate(Body):
    lam: float
    body: Body
    kind = "dilate"

    def __post_init__(self):
        if not float(self.lam) > 0:
            raise GeometryError("dilation factor must be positive")
        object.__setattr__(self, "lam", float(self.lam))

    def h(self, u: np.ndarray) -> np.ndarray:
        return self.lam * self.body.h(u)

    def edge_normals(self) -> np.ndarray:
        return self.body.edge_normals()

    def circumradius(self) -> float:
        return self.lam * self.body.circumradius()

    def to_dict(self) -> dict:
        return {"type": "dilate", "lambda": self.lam, "body": self.body.to_dict()}


@dataclass(frozen=True, eq=False)
class LpSum(Body):
    """Minkowski-Firey combination with support ``(h_left^p + h_right^p)^(1/p)``."""

    p: float
    left: Body
    right: Body
    kind = "lp_sum"

    def __post_init__(self):
        p = float(self.p)
        if not p >= 1 or not math.isfinite(p):
            raise GeometryError(f"L_p combination needs finite p >= 1, got {p!r}")
        object.__setattr__(self, "p", p)

    def h(self, u: np.ndarray) -> np.ndarray:
        a = self.left.h(u)
        b = self.right.h(u)
        hi = np.maximum(a, b)
        lo = np.minimum(a, b)
        # factor out the larger value so huge p does not overflow
        return hi * (1.0 + (lo / hi) ** self.p) ** (1.0 / self.p)

    def edge_normals(self) -> np.ndarray:
        return np.vstack([self.left.edge_normals(), self.right.edge_normals()])

    def circumradius(self) -> float:
        return 2 ** (1 / self.p) * max(self.left.circumradius(), self.right.circumradius())

    def to_dict(self) -> dict:
        return {
            "type": "lp_sum",
            "p": self.p,
            "left": self.left.to_dict(),
            "right": self.right.to_dict(),
        }


def lp_combination(a: Body, b: Body, p: float) -> LpSum:
    if not float(p) >= 1:
        raise GeometryError(f"L_p combination is only convex for p >= 1, got {p!r}")
    return LpSum(p, a, b)


def body_from_dict(data: dict, path: str = "$") -> Body:
    """Parse the body JSON schema; errors name the offending path and field."""
    if not isinstance(data, dict):
        raise GeometryError(f"{path}: expected an object")
    kind = data.get("type")

    def need(field):
        if field not in data:
            raise GeometryError(f"{path}.{field}: missing field for type {kind!r}")
        return data[field]

    if kind == "polygon":
        return Polygon(need("vertices"))
    if kind == "ball":
        return Ball(tuple(need("center")), need("radius"))
    if kind == "dilate":
        return Dilate(need("lambda"), body_from_dict(need("body"), f"{path}.body"))
    if kind == "lp_sum":
        return LpSum(
            need("p"),
            body_from_dict(need("left"), f"{path}.left"),
            body_from_dict(need("right"), f"{path}.right"),
        )
    raise GeometryError(f"{path}.type: unknown body type {kind!r}")


def body_from_json(text: str) -> Body:
    return body_from_dict(json.loads(text))


def body_to_json(body: Body) -> str:
    return json.dumps(body.to_dict())


def volume(body: Body, n_directions: int = 4096) -> float:
    """Area; exact for polygons, discs and their dilates, else via :func:`support_polytope`."""
    if isinstance(body, Polygon):
        return body.area
    if isinstance(body, Ball):
        return body.area
    if isinstance(body, Dilate) and not isinstance(body.body, LpSum):
        return body.lam**2 * volume(body.body, n_directions)
    return support_polytope(body, n_directions).area


def support_area_identity(P: Polygon) -> float:
    """Area as ``(1/2) sum h(u_i) l_i`` over the edges."""
    return 0.5 * float(P.facet_support @ P.edge_lengths)


@dataclass(frozen=True)
class SurfaceMeasure:
    normals: np.ndarray
    weights: np.ndarray

    @property
    def total(self) -> float:
        return float(self.weights.sum())

    def closure(self) -> np.ndarray:
        """``sum w_i u_i``; zero for any closed polygon."""
        return self.weights @ self.normals


def surface_area_measure(P: Polygon) -> SurfaceMeasure:
    return SurfaceMeasure(P.normals.copy(), P.edge_lengths.copy())


def _hull_indices(points: np.ndarray) -> list[int]:
    """Andrew's monotone chain; indices of strict hull vertices, counterclockwise."""
    order = np.lexsort((points[:, 1], points[:, 0])).tolist()
    xs = points[:, 0].tolist()
    ys = points[:, 1].tolist()

    def turn(o, a, b):
        return (xs[a] - xs[o]) * (ys[b] - ys[o]) - (ys[a] - ys[o]) * (xs[b] - xs[o])

    lower: list[int] = []
    for i in order:
        while len(lower) >= 2 and turn(lower[-2], lower[-1], i) <= 0:
            lower.pop()
        lower.append(i)
    upper: list[int] = []
    for i in reversed(order):
        while len(upper) >= 2 and turn(upper[-2], upper[-1], i) <= 0:
            upper.pop()
        upper.append(i)
    return lower[:-1] + upper[:-1]


def convex_hull(points) -> Polygon:
    pts = np.asarray(points, dtype=float)
    return Polygon(pts[_hull_indices(pts)])


def _merge_parallel(normals: np.ndarray, offsets: np.ndarray):
    """Keep only the tightest of constraints whose normals agree to ``SNAP``."""
    theta = np.mod(np.arctan2(normals[:, 1], normals[:, 0]), 2 * np.pi)
    order = np.argsort(theta, kind="stable")
    theta, normals, offsets = theta[order], normals[order], offsets[order]
    starts = np.flatnonzero(np.concatenate([[True], np.diff(theta) > SNAP]))
    tight = np.minimum.reduceat(offsets, starts)
    normals = normals[starts]
    # a group can straddle angle 0
    if len(starts) > 1 and theta[-1] - theta[0] > 2 * np.pi - SNAP:
        tight[0] = min(tight[0], tight[-1])
        normals, tight = normals[:-1], tight[:-1]
    return normals, tight


def halfplane_polygon(normals: np.ndarray, offsets: np.ndarray) -> Polygon:
    """Bounded polygon ``{x : <x, n_i> <= c_i}`` for offsets ``c_i > 0``.

    The polar body is the hull of the points ``n_i / c_i``; its vertices are
    the irredundant constraints, and consecutive ones meet at the vertices.
    """
    normals = np.asarray(normals, dtype=float)
    offsets = np.asarray(offsets, dtype=float)
    if np.any(offsets <= 0):
        raise OriginNotInterior("every halfplane must contain the origin strictly")
    normals, offsets = _merge_parallel(normals, offsets)
    active = _hull_indices(normals / offsets[:, None])
    if len(active) < 3:
        raise DegenerateInput("halfplanes do not bound a polygon")
    n1 = normals[active]
    c1 = offsets[active]
    n2 = np.roll(n1, -1, axis=0)
    c2 = np.roll(c1, -1)
    det = _cross(n1, n2)
    if np.any(det <= 0):
        raise DegenerateInput("halfplanes do not bound a polygon")
    x = (c1 * n2[:, 1] - c2 * n1[:, 1]) / det
    y = (n1[:, 0] * c2 - n2[:, 0] * c1) / det
    pts = np.column_stack([x, y])
    # nearly parallel neighbours meet at almost the same point, and rounding
    # can leave a tiny reflex turn there; merge such points and re-hull
    scale = float(np.max(np.abs(pts)))
    keep = np.ones(len(pts), dtype=bool)
    keep[1:] = np.max(np.abs(np.diff(pts, axis=0)), axis=1) > VERTEX_MERGE * scale
    return convex_hull(pts[keep])


def _merge_directions(base: np.ndarray, extra: np.ndarray) -> np.ndarray:
    if extra.size == 0:
        return base
    u = np.vstack([base, extra / np.hypot(extra[:, 0], extra[:, 1])[:, None]])
    theta = np.mod(np.arctan2(u[:, 1], u[:, 0]), 2 * np.pi)
    order = np.argsort(theta, kind="stable")
    theta, u = theta[order], u[order]
    keep = np.ones(len(u), dtype=bool)
    keep[1:] = np.diff(theta) > SNAP
    if keep.sum() > 1 and theta[-1] - theta[0] > 2 * np.pi - SNAP:
        keep[-1] = False
    return u[keep]


def support_polytope(
    body: Body,
    n_directions: int = 4096,
    extra_directions: np.ndarray | None = None,
    include_edge_normals: bool = True,
) -> Polygon:
    """Circumscribed polygon from ``N`` equally spaced supporting halfplanes.

    Edge normals of polygons inside ``body`` are merged into the direction set
    so polygonal inputs come back exactly.  For a smooth body the area error is
    ``O(N^-2)`` and always an overestimate.
    """
    if n_directions < 8:
        raise ValueError("support_polytope needs at least 8 directions")
    u = unit_directions(n_directions)
    extra = [np.asarray(extra_directions, dtype=float).reshape(-1, 2)] if extra_directions is not None else []
    if include_edge_normals:
        extra.append(body.edge_normals())
    if extra:
        u = _merge_directions(u, np.vstack(extra))
    return halfplane_polygon(u, body.h(u))


def as_polygon(body: Body, n_directions: int = 4096) -> Polygon:
    if isinstance(body, Polygon):
        return body
    if isinstance(body, Dilate) and isinstance(body.body, Polygon):
        return body.body.scaled(body.lam)
    return support_polytope(body, n_directions)


def convex_hull_union(P: Polygon, Q: Polygon) -> Polygon:
    return convex_hull(np.vstack([P.vertices, Q.vertices]))


def intersection(P: Polygon, Q: Polygon) -> Polygon:
    """``P ∩ Q`` as the polygon cut out by both edge sets (both contain the origin)."""
    normals = np.vstack([P.normals, Q.normals])
    offsets = np.concatenate([P.facet_support, Q.facet_support])
    return halfplane_polygon(normals, offsets)


def symmetric_difference_area(P: Polygon, Q: Polygon) -> float:
    common = intersection(P, Q).area
    return max(P.area + Q.area - 2 * common, 0.0)


def difference_area(P: Polygon, Q: Polygon) -> float:
    """Area of ``P \\ Q``."""
    return max(P.area - intersection(P, Q).area, 0.0)


def support_dominates(a: Body, b: Body, directions: np.ndarray, tol: float = 0.0) -> bool:
    """True when ``h_a <= h_b + tol`` at every given direction."""
    return bool(np.all(a.h(directions) <= b.h(directions) + tol))


def kink_directions(bodies: Iterable[Body]) -> np.ndarray:
    parts = [b.edge_normals() for b in bodies]
    return np.vstack(parts) if parts else np.empty((0, 2))
