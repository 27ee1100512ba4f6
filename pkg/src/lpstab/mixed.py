"""L_p mixed volumes, deficits and the two stability inequalities in the plane.

For a polygon ``K`` the surface area measure is atomic, so

    V_p(K, L) = (1/2) * sum_i (h_L(u_i) / h_K(u_i))^p * h_K(u_i) * l_i

is an exact finite sum over the edges of ``K``.  Only volumes of non-polygonal
bodies (discs, L_p combinations) go through a circumscribed polygon.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .planar import (
    Body,
    Dilate,
    Polygon,
    as_polygon,
    convex_hull_union,
    intersection,
    lp_combination,
    support_polytope,
    symmetric_difference_area,
    volume,
)

DIM = 2
DEFAULT_DIRECTIONS = 4096
EXACT_ERROR = 1e-12
THEOREM1_DENOM = 128
THEOREM2_DENOM = 512


def _check_p(p: float, strict: bool = False) -> float:
    p = float(p)
    if not math.isfinite(p) or p < 1 or (strict and p == 1):
        bound = "> 1" if strict else ">= 1"
        raise ValueError(f"p must be {bound}, got {p!r}")
    return p


def _edge_sum(K: Polygon, values: np.ndarray) -> float:
    return 0.5 * float(values @ K.edge_lengths)


def mixed_volume_p(K: Polygon, L: Body, p: float) -> float:
    p = _check_p(p)
    hk = K.facet_support
    hl = L.h(K.normals)
    return _edge_sum(K, (hl / hk) ** p * hk)


@dataclass(frozen=True)
class Area:
    value: float
    error: float


def discretized_area(body: Body, n_directions: int = DEFAULT_DIRECTIONS) -> Area:
    """Area with an error estimate ``|V_N - V_2N| + pi^3 R^2 / (3 N^2)``.

    Polygons and their dilates are exact and report zero error.
    """
    if isinstance(body, Polygon) or (isinstance(body, Dilate) and isinstance(body.body, Polygon)):
        return Area(as_polygon(body).area, 0.0)
    coarse = support_polytope(body, n_directions).area
    fine = support_polytope(body, 2 * n_directions).area
    r = body.circumradius()
    return Area(coarse, abs(coarse - fine) + math.pi**3 * r * r / (3 * n_directions**2))


def deficit_delta(K: Polygon, L: Body, p: float, n_directions: int = DEFAULT_DIRECTIONS) -> float:
    p = _check_p(p)
    vk = K.area
    vl = volume(L, n_directions)
    return mixed_volume_p(K, L, p) / (vk ** (1 - p / DIM) * vl ** (p / DIM)) - 1


@dataclass(frozen=True)
class Beta:
    value: float
    error: float
    volume_sum: float


def beta_with_error(
    K: Body, L: Body, p: float, n_directions: int = DEFAULT_DIRECTIONS, consistent: bool = True
) -> Beta:
    """Brunn-Minkowski-Firey deficit and a first-order error bound.

    With ``consistent`` the volumes of ``K`` and ``L`` use the same
    circumscribed discretization as ``K +_p L`` so the O(N^-2) bias cancels to
    leading order; polygons are exact either way.
    """
    p = _check_p(p)
    if n_directions < 64:
        raise ValueError("deficit_beta needs at least 64 directions")
    q = p / DIM
    s = discretized_area(lp_combination(K, L, p), n_directions)
    if consistent:
        a, b = discretized_area(K, n_directions), discretized_area(L, n_directions)
    else:
        a = Area(volume(K, n_directions), 0.0)
        b = Area(volume(L, n_directions), 0.0)
    denom = a.value**q + b.value**q
    ratio = s.value**q / denom
    # linear propagation of the three area errors
    err = q * s.value ** (q - 1) * s.error / denom
    err += ratio * q * (a.value ** (q - 1) * a.error + b.value ** (q - 1) * b.error) / denom
    return Beta(ratio - 1, err, s.value)


def deficit_beta(
    K: Body, L: Body, p: float, n_directions: int = DEFAULT_DIRECTIONS, consistent: bool = True
) -> float:
    return beta_with_error(K, L, p, n_directions, consistent).value


def relative_asymmetry(K: Body, L: Body, n_directions: int = DEFAULT_DIRECTIONS) -> float:
    """``area(K Δ λL) / area(K)`` with ``λ = sqrt(area K / area L)``.

    Non-polygonal bodies are replaced by circumscribed polygons at the given
    resolution, and ``λ`` is computed from those snapshots.
    """
    P = as_polygon(K, n_directions)
    Q = as_polygon(L, n_directions)
    lam = math.sqrt(P.area / Q.area)
    return symmetric_difference_area(P, Q.scaled(lam)) / P.area


def sigma(K: Body, L: Body, n_directions: int = DEFAULT_DIRECTIONS) -> float:
    vk, vl = volume(K, n_directions), volume(L, n_directions)
    return max(vk / vl, vl / vk)


@dataclass(frozen=True)
class StabilityReport:
    p: float
    n: int
    lhs: float
    rhs: float
    margin: float
    asymmetry: float
    sigma: float
    discretization: int
    estimated_error: float

    def to_dict(self) -> dict:
        return asdict(self)

    @property
    def holds(self) -> bool:
        return self.margin >= -self.estimated_error


def check_theorem_1(
    K: Polygon, L: Body, p: float, n_directions: int = DEFAULT_DIRECTIONS, rhs_scale: float = 1.0
) -> StabilityReport:
    """``delta_p(K, L) >= (p-1)/(128 n^2) A(K, L)^2``.

    Exact when ``L`` is a polygon; otherwise ``L`` enters through its exact
    support function in ``V_p`` and a circumscribed snapshot in ``A``.
    """
    p = _check_p(p, strict=True)
    lhs = deficit_delta(K, L, p, n_directions)
    a = relative_asymmetry(K, L, n_directions)
    rhs = rhs_scale * (p - 1) / (THEOREM1_DENOM * DIM**2) * a * a
    err = EXACT_ERROR
    if not isinstance(L, Polygon):
        err += discretized_area(L, n_directions).error / volume(L, n_directions)
    return StabilityReport(p, DIM, lhs, rhs, lhs - rhs, a, sigma(K, L, n_directions), n_directions, err)


def check_theorem_2(
    K: Body, L: Body, p: float, n_directions: int = DEFAULT_DIRECTIONS, rhs_scale: float = 1.0
) -> StabilityReport:
    """``beta_p(K, L) >= (p-1)/(512 n^2 sigma^(p/n)) A(K, L)^2``."""
    p = _check_p(p, strict=True)
    beta = beta_with_error(K, L, p, n_directions)
    a = relative_asymmetry(K, L, n_directions)
    sig = sigma(K, L, n_directions)
    rhs = rhs_scale * (p - 1) / (THEOREM2_DENOM * DIM**2 * sig ** (p / DIM)) * a * a
    err = beta.error + EXACT_ERROR
    return StabilityReport(p, DIM, beta.value, rhs, beta.value - rhs, a, sig, n_directions, err)


@dataclass(frozen=True)
class ProofChainReport:
    """Every inequality of the stability argument, evaluated on one normalized pair.

    ``margins`` maps a step name to ``larger side - smaller side``; each should
    be nonnegative up to rounding.  ``identities`` holds differences that
    should vanish.  ``support_min_gap`` measures how far ``h(K ∩ γL)`` falls
    below ``min(h_K, h_γL)`` in the edge integral (the proof only needs the
    min-function value, and uses the intersection only through ``K_2 ⊆ K``).
    """

    p: float
    delta: float
    v1: float
    gamma: float
    gamma_p: float
    vol_k1: float
    vol_k2: float
    support_gap: float
    support_min_gap: float
    asymmetry: float
    margins: dict = field(default_factory=dict)
    identities: dict = field(default_factory=dict)
    notes: tuple = ()

    @property
    def min_margin(self) -> float:
        return min(self.margins.values())

    def to_dict(self) -> dict:
        return asdict(self)


def proof_chain(K: Polygon, L: Polygon, p: float) -> ProofChainReport:
    p = _check_p(p, strict=True)
    n = DIM
    K = K.scaled(1 / math.sqrt(K.area))
    L = L.scaled(1 / math.sqrt(L.area))
    vk = K.area

    delta = mixed_volume_p(K, L, p) - 1
    v1 = mixed_volume_p(K, L, 1)
    gamma = 1 / v1
    gl = L.scaled(gamma)
    K1 = convex_hull_union(K, gl)
    K2 = intersection(K, gl)

    hk = K.facet_support
    hg = gl.h(K.normals)
    gap = _edge_sum(K, np.abs(hg - hk))
    v1_max = _edge_sum(K, np.maximum(hg, hk))
    v1_min = _edge_sum(K, np.minimum(hg, hk))
    v1_k1 = mixed_volume_p(K, K1, 1)
    v1_k2 = mixed_volume_p(K, K2, 1)
    vol_k1 = K1.area

    gamma_p = 1 + 2 * math.sqrt(2 * max(delta, 0.0) / (p - 1))
    a = symmetric_difference_area(K, L)
    l_minus_k = L.area - intersection(L, K).area
    gl_minus_k = gl.area - K2.area
    ring_minus_k = l_minus_k - gl_minus_k
    d1 = n * gamma_p ** (n - 1)

    m = {}
    # Jensen stability on the measure h_K dS_K / n with f = h_L / h_K, then Bernoulli
    jensen = (p - 1) / 2 * v1**p * gap**2 + v1**p - 1
    bernoulli = (p - 1) / 2 * gap**2 + p * (v1 - 1)
    m["jensen"] = delta - jensen
    m["bernoulli"] = jensen - bernoulli
    m["gamma_upper"] = 1 - gamma
    m["gamma_lower"] = gamma - p / (p + delta)
    m["gap_vs_hull"] = gap - (v1_k1 - vk) / 2
    m["min_below_k"] = vk - v1_min
    m["hull_first_variation"] = (v1_k1 - vk) - (vol_k1 ** (1 / n) - vk ** (1 / n))
    m["root_concavity"] = (vol_k1 ** (1 / n) - vk ** (1 / n)) - (vol_k1 - vk) / (n * vol_k1 ** ((n - 1) / n))
    m["delta_vs_hull"] = delta - (p - 1) / 8 * (vol_k1 ** (1 / n) - 1) ** 2
    m["hull_volume"] = gamma_p**n - vol_k1
    m["hull_mixed_volume"] = (v1_k1 - vk) - (vol_k1 - vk) / d1
    m["hull_covers_outside"] = (vol_k1 - vk) - gl_minus_k
    m["ring_volume"] = (1 - gamma**n) - ring_minus_k
    pre = (p - 1) / 2 * (gl_minus_k / d1) ** 2 + p * (1 - gamma)
    m["delta_vs_outside"] = delta - pre
    pre2 = (p - 1) / (2 * d1**2) * l_minus_k**2 - (p - 1) / d1 * (1 - gamma**n) + p * (1 - gamma)
    m["outside_split"] = pre - pre2
    via_outside = (p - 1) / (8 * n**2 * gamma_p ** (2 * (n - 1))) * a**2
    m["delta_vs_asymmetry"] = delta - via_outside
    m["stability"] = delta - (p - 1) / (THEOREM1_DENOM * n**2) * a**2

    ident = {
        "gap_is_max_minus_min": gap - (v1_max - v1_min),
        "hull_is_max": v1_k1 - v1_max,
        "vp_kk": mixed_volume_p(K, K, p) - vk,
        "outside_split": l_minus_k - (gl_minus_k + ring_minus_k),
        "half_symmetric_difference": l_minus_k - a / 2,
    }
    notes = (
        "the step after the L1 gap uses V_1(K, K_2); the min-support value is used",
    )
    return ProofChainReport(
        p=p,
        delta=delta,
        v1=v1,
        gamma=gamma,
        gamma_p=gamma_p,
        vol_k1=vol_k1,
        vol_k2=K2.area,
        support_gap=gap,
        support_min_gap=v1_min - v1_k2,
        asymmetry=a,
        margins=m,
        identities=ident,
        notes=notes,
    )


@dataclass(frozen=True)
class Theorem2ChainReport:
    """Derivation of the Brunn-Minkowski-Firey bound from the mixed-volume bound.

    ``M`` is the circumscribed snapshot of ``K +_p L``.  At its edge normals the
    snapshot's support equals the exact combination, so the splitting
    ``V(M) = V_p(M, K) + V_p(M, L)`` holds exactly at the discrete level.
    """

    p: float
    beta: float
    vol_m: float
    asym_mk: float
    asym_ml: float
    asym_kl: float
    margins: dict
    identities: dict

    @property
    def min_margin(self) -> float:
        return min(self.margins.values())


def theorem2_chain(
    K: Polygon, L: Polygon, p: float, n_directions: int = DEFAULT_DIRECTIONS
) -> Theorem2ChainReport:
    p = _check_p(p, strict=True)
    n = DIM
    q = p / n
    M = support_polytope(lp_combination(K, L, p), n_directions)
    vm, vk, vl = M.area, K.area, L.area
    beta = vm**q / (vk**q + vl**q) - 1
    c = (p - 1) / (THEOREM1_DENOM * n**2)
    amk = relative_asymmetry(M, K)
    aml = relative_asymmetry(M, L)
    akl = relative_asymmetry(K, L)
    vpk = mixed_volume_p(M, K, p)
    vpl = mixed_volume_p(M, L, p)
    sig = max(vk / vl, vl / vk)
    wk = vk**q / (vk**q + vl**q)
    wl = vl**q / (vk**q + vl**q)

    m = {}
    m["thm1.MK"] = vpk - vm ** (1 - q) * vk**q * (1 + c * amk**2)
    m["thm1.ML"] = vpl - vm ** (1 - q) * vl**q * (1 + c * aml**2)
    s1 = wk * c * amk**2 + wl * c * aml**2
    s2 = (p - 1) / (2 * THEOREM1_DENOM * n**2 * sig**q) * (amk**2 + aml**2)
    s3 = (p - 1) / (4 * THEOREM1_DENOM * n**2 * sig**q) * (amk + aml) ** 2
    s4 = (p - 1) / (THEOREM2_DENOM * n**2 * sig**q) * akl**2
    m["sum"] = beta - s1
    m["weights"] = s1 - s2
    m["square"] = s2 - s3
    m["triangle"] = s3 - s4
    ident = {"split": vm - (vpk + vpl)}
    return Theorem2ChainReport(p, beta, vm, amk, aml, akl, m, ident)
