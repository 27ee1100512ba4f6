"""Improved Jensen inequality for Tsallis entropy on finite probability spaces.

A finite space is a vector of positive weights summing to one together with a
nonnegative function on its atoms.  For ``p > 0`` the quantity

    (1/(p-1)) * (E[f^p] / E[f]^p - 1)

dominates ``c_p * (E|f/E f - 1|)^2``, with ``c_p = 1/2`` for ``p >= 1`` and
``(p+1)^(p+1) / (8 p^(p-1))`` below one.  At ``p = 1`` the left side is the
Shannon entropy of ``f / E f`` and the bound is Pinsker's inequality.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from typing import NamedTuple

import numpy as np

WEIGHT_SUM_TOL = 1e-12


class InvalidDistribution(ValueError):
    pass


def _check_p(p: float) -> float:
    p = float(p)
    if not math.isfinite(p) or p <= 0:
        raise ValueError(f"p must be a positive finite number, got {p!r}")
    return p


@dataclass(frozen=True, eq=False)
class DiscreteDistribution:
    """Weights ``mu`` of a finite probability space and values of ``f`` on its atoms."""

    weights: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=float).ravel()
        f = np.array(self.values, dtype=float).ravel()
        if w.size == 0 or w.size != f.size:
            raise InvalidDistribution(
                f"weights and values need equal nonzero length, got {w.size} and {f.size}"
            )
        if not (np.all(np.isfinite(w)) and np.all(np.isfinite(f))):
            raise InvalidDistribution("weights and values must be finite")
        if np.any(w <= 0):
            raise InvalidDistribution("every weight must be positive")
        if abs(w.sum() - 1.0) > WEIGHT_SUM_TOL:
            raise InvalidDistribution(f"weights sum to {w.sum()!r}, not 1")
        if np.any(f < 0):
            raise InvalidDistribution("values must be nonnegative")
        if not np.any(f > 0):
            raise InvalidDistribution("values are all zero")
        w.flags.writeable = False
        f.flags.writeable = False
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "values", f)

    @classmethod
    def from_unnormalized(cls, weights, values) -> "DiscreteDistribution":
        w = np.asarray(weights, dtype=float)
        return cls(w / w.sum(), values)

    @property
    def mass(self) -> float:
        """Integral of f; the scale removed by normalization."""
        return float(self.weights @ self.values)

    def normalized_values(self) -> np.ndarray:
        return self.values / self.mass

    def scaled(self, c: float) -> "DiscreteDistribution":
        return DiscreteDistribution(self.weights, c * self.values)

    def to_dict(self) -> dict:
        return {"weights": self.weights.tolist(), "values": self.values.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "DiscreteDistribution":
        missing = {"weights", "values"} - set(data)
        if missing:
            raise InvalidDistribution(f"missing field(s): {', '.join(sorted(missing))}")
        return cls(data["weights"], data["values"])

    @classmethod
    def from_json(cls, text: str) -> "DiscreteDistribution":
        return cls.from_dict(json.loads(text))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def stability_constant(p: float) -> float:
    p = _check_p(p)
    if p >= 1:
        return 0.5
    return (p + 1) ** (p + 1) / (8 * p ** (p - 1))


def _power_gap(g: np.ndarray, w: np.ndarray, p: float) -> float:
    # sum w (g^p - g) / (p - 1), written with expm1 so p near 1 keeps its digits;
    # relies on sum w g == 1.
    pos = g > 0
    gp = g[pos]
    if p == 1:
        return float(w[pos] @ (gp * np.log(gp)))
    return float(w[pos] @ (gp * np.expm1((p - 1) * np.log(gp)))) / (p - 1)


def tsallis_entropy(d: DiscreteDistribution, p: float) -> float:
    """Tsallis entropy of ``f / E f``; Shannon entropy (0 ln 0 = 0) at ``p = 1``.

    The normalizing scale is ``d.mass``.
    """
    p = _check_p(p)
    return _power_gap(d.normalized_values(), d.weights, p)


def jensen_deficit(d: DiscreteDistribution, p: float) -> float:
    """Left side of the improved Jensen inequality; invariant under f -> c f."""
    # identical to the Tsallis entropy of the normalized function; at p = 1 this is
    # the scale-free limit sum w g ln g with g = f / E f
    return tsallis_entropy(d, p)


def l1_deviation(d: DiscreteDistribution) -> float:
    g = d.normalized_values()
    return float(d.weights @ np.abs(g - 1.0))


@dataclass(frozen=True)
class JensenReport:
    p: float
    deficit: float
    deviation: float
    c_p: float
    margin: float

    def to_dict(self) -> dict:
        return asdict(self)


def stability_check(d: DiscreteDistribution, p: float, rhs_scale: float = 1.0) -> JensenReport:
    """Compare the deficit with ``c_p * deviation^2``.

    ``rhs_scale`` multiplies the right side; it exists so harnesses can inject a
    known violation.
    """
    p = _check_p(p)
    deficit = jensen_deficit(d, p)
    dev = l1_deviation(d)
    c = stability_constant(p)
    return JensenReport(p, deficit, dev, c, deficit - rhs_scale * c * dev * dev)


def psi(a: float, t: float, p: float) -> float:
    """Two-parameter reduction: nonnegative for ``0 < a <= t < 1``."""
    p = _check_p(p)
    if p == 1:
        raise ValueError("psi is defined for p != 1")
    if not 0 < a < 1:
        raise ValueError(f"a must lie in (0, 1), got {a!r}")
    if t >= 1:
        raise ValueError(f"t must be < 1, got {t!r}")
    if a > t:
        raise ValueError(f"need a <= t, got a={a!r}, t={t!r}")
    return float(_psi_array(np.float64(a), np.float64(t), p))


def _psi_array(a, t, p):
    head = (t ** (1 - p) * a**p + (1 - t) ** (1 - p) * (1 - a) ** p - 1) / (p - 1)
    return head - 4 * stability_constant(p) * (t - a) ** 2


class GridMinimum(NamedTuple):
    minimum: float
    a: float
    t: float
    t_step: float


def psi_grid_oracle(p: float, a_steps: int = 99, t_steps: int = 1000) -> GridMinimum:
    """Brute-force minimum of ``psi`` on a rectangular (a, t) grid.

    ``a`` runs over ``i / (a_steps + 1)``; for each ``a`` the ``t`` grid has
    ``t_steps`` equally spaced points from ``a`` to ``1 - 1/t_steps``.
    """
    p = _check_p(p)
    if p == 1:
        raise ValueError("psi is defined for p != 1")
    if a_steps < 2 or t_steps < 2:
        raise ValueError("a_steps and t_steps must be at least 2")
    a = np.arange(1, a_steps + 1) / (a_steps + 1)
    t_hi = 1.0 - 1.0 / t_steps
    s = np.linspace(0.0, 1.0, t_steps)
    # rows with a above the t ceiling have an empty range; pin them to t = a
    span = np.maximum(t_hi - a, 0.0)
    t = a[:, None] + span[:, None] * s[None, :]
    vals = _psi_array(a[:, None], t, p)
    i, j = np.unravel_index(np.argmin(vals), vals.shape)
    step = span[i] / (t_steps - 1)
    return GridMinimum(float(vals[i, j]), float(a[i]), float(t[i, j]), float(step))


def two_point(a: float, t: float) -> DiscreteDistribution:
    """Distribution with weights (t, 1-t) and values (a/t, (1-a)/(1-t))."""
    return DiscreteDistribution([t, 1 - t], [a / t, (1 - a) / (1 - t)])


def log_jensen_gap(d: DiscreteDistribution) -> float:
    """``ln E f - E ln f - dev^2 / 8``; the p -> 0 limit of the stability gap divided by p."""
    if np.any(d.values <= 0):
        raise InvalidDistribution("log gap needs strictly positive values")
    g = d.normalized_values()
    dev = l1_deviation(d)
    return float(-(d.weights @ np.log(g))) - dev * dev / 8


def empirical_constant(p: float, grid: int = 400) -> float:
    """Smallest deficit / deviation^2 over the two-point family on a grid.

    Gives an empirical view of how far ``c_p`` is from sharp; no claim is made.
    """
    p = _check_p(p)
    x = (np.arange(1, grid) / grid)
    a, t = np.meshgrid(x, x, indexing="ij")
    keep = a < t
    a, t = a[keep], t[keep]
    g_lo, g_hi = a / t, (1 - a) / (1 - t)
    if p == 1:
        deficit = a * np.log(g_lo) + (1 - a) * np.log(g_hi)
    else:
        deficit = (t * g_lo**p + (1 - t) * g_hi**p - 1) / (p - 1)
    dev = 2 * (t - a)
    return float(np.min(deficit / dev**2))
