"""Unit ball against a translated unit ball, in any dimension.

With ``K = B`` and ``L = eps*x0 + B`` both bodies have the same volume, the
support of ``L`` is ``1 + eps <x0, u>``, and every integral over the sphere
depends on ``t = <x0, u>`` alone.  The deficit and the asymmetry both scale
like ``eps^2``, which shows the square of the asymmetry in the stability bound
cannot be replaced by a higher power.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import integrate, special

from .mixed import beta_with_error
from .planar import Ball

QUAD_RTOL = 1e-12
DEFAULT_EPSILONS = tuple(np.logspace(-3, -1, 17))
CSV_COLUMNS = ("n", "p", "epsilon", "delta_p", "asymmetry", "asymmetry_sq", "beta_p")


class QuadratureError(RuntimeError):
    pass


def _sphere_weight_norm(n: int) -> float:
    # integral of sin^(n-2) over [0, pi]
    return math.sqrt(math.pi) * math.exp(special.gammaln((n - 1) / 2) - special.gammaln(n / 2))


def sphere_mean(g: Callable[[float], float], n: int) -> float:
    """Mean of ``g(<x0, u>)`` over the unit sphere in ``R^n``.

    The marginal density of ``t`` is proportional to ``(1 - t^2)^((n-3)/2)``;
    with ``t = cos(theta)`` it becomes ``sin(theta)^(n-2)``, which removes the
    endpoint singularity at ``n = 2``.
    """
    if n < 2:
        raise ValueError("dimension must be at least 2")
    k = n - 2

    def integrand(theta):
        return g(math.cos(theta)) * math.sin(theta) ** k

    out = integrate.quad(
        integrand, 0.0, math.pi, epsabs=0.0, epsrel=QUAD_RTOL, limit=200, full_output=1
    )
    value, err = out[0], out[1]
    # a zero integral never meets a relative target; accept a tiny absolute error
    if not math.isfinite(value) or (len(out) > 3 and err > 1e-13 * max(1.0, abs(value))):
        raise QuadratureError(f"quadrature did not converge: value={value!r}, error={err!r}")
    return value / _sphere_weight_norm(n)


def _check_eps(eps: float, upper: float = 1.0) -> float:
    eps = float(eps)
    if not 0 <= eps < upper:
        raise ValueError(f"epsilon must lie in [0, {upper}), got {eps!r}")
    return eps


def ball_delta_p(n: int, p: float, eps: float) -> float:
    """Mixed-volume deficit of the unit ball and its ``eps`` translate.

    Integrates ``(1 + eps t)^p - 1 - p eps t``; the linear term has mean zero,
    and dropping it avoids cancellation when the deficit is tiny.
    """
    eps = _check_eps(eps)
    if not p > 1:
        raise ValueError(f"p must be > 1, got {p!r}")
    if eps == 0:
        return 0.0

    def g(t):
        x = eps * t
        return math.expm1(p * math.log1p(x)) - p * x

    return sphere_mean(g, n)


def ball_vp_gap(n: int, p: float, eps: float) -> float:
    """``V_p(K, L) - V(K)``; the deficit times the ball volume."""
    return ball_volume(n) * ball_delta_p(n, p, eps)


def ball_volume(n: int) -> float:
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1)


def ball_asymmetry(n: int, eps: float) -> float:
    """``V(B Δ (eps x0 + B)) / V(B)`` in closed form.

    The lens is two caps at distance ``eps/2`` from each center; written with
    the complementary regularized incomplete beta so small ``eps`` keeps full
    relative precision.
    """
    if n < 1:
        raise ValueError("dimension must be positive")
    eps = float(eps)
    if not 0 < eps < 2:
        raise ValueError(f"need 0 < eps < 2 for overlapping balls, got {eps!r}")
    return 2.0 * float(special.betainc(0.5, (n + 1) / 2, eps * eps / 4))


def disk_lens_asymmetry(eps: float) -> float:
    """Planar asymmetry from the elementary two-circle lens area."""
    d = eps / 2
    lens = 2 * math.acos(d) - 2 * d * math.sqrt(1 - d * d)
    return 2 * (math.pi - lens) / math.pi


def monte_carlo_asymmetry(
    n: int, eps: float, samples: int, rng: np.random.Generator, chunk: int = 1_000_000
) -> tuple[float, float]:
    """Estimate and standard error of the ball asymmetry by uniform sampling in ``B``."""
    hits = 0
    done = 0
    while done < samples:
        m = min(chunk, samples - done)
        x = rng.standard_normal((m, n))
        x *= (rng.uniform(size=m) ** (1 / n) / np.linalg.norm(x, axis=1))[:, None]
        x[:, 0] -= eps
        hits += int(np.count_nonzero(np.einsum("ij,ij->i", x, x) > 1.0))
        done += m
    frac = hits / samples
    return 2 * frac, 2 * math.sqrt(frac * (1 - frac) / samples)


def ball_beta_p(p: float, eps: float, n_directions: int = 8192) -> tuple[float, float]:
    """Planar Brunn-Minkowski-Firey deficit of the disc and its translate, with error."""
    eps = _check_eps(eps)
    beta = beta_with_error(Ball((0.0, 0.0), 1.0), Ball((eps, 0.0), 1.0), p, n_directions)
    return beta.value, beta.error


@dataclass(frozen=True)
class ScanRow:
    epsilon: float
    delta_p: float
    asymmetry: float
    beta_p: float | None = None
    vp_gap: float | None = None

    @property
    def asymmetry_sq(self) -> float:
        return self.asymmetry**2


def loglog_slope(x: Sequence[float], y: Sequence[float]) -> float:
    lx, ly = np.log(np.asarray(x, float)), np.log(np.asarray(y, float))
    return float(np.polyfit(lx, ly, 1)[0])


def even_limit(eps: Sequence[float], ratio: Sequence[float]) -> float:
    """Extrapolate an even function of ``eps`` to zero: fit ``c0 + c1 e^2 + c2 e^4``."""
    e2 = np.asarray(eps, float) ** 2
    A = np.column_stack([np.ones_like(e2), e2, e2 * e2])
    coef, *_ = np.linalg.lstsq(A, np.asarray(ratio, float), rcond=None)
    return float(coef[0])


@dataclass
class EpsilonScan:
    n: int
    p: float
    rows: list[ScanRow]
    fitted_slopes: dict = field(default_factory=dict)
    ratio_limits: dict = field(default_factory=dict)

    @property
    def sharp(self) -> bool:
        """Both deficit and squared asymmetry scale as eps^2 with a positive ratio."""
        s = self.fitted_slopes
        return (
            abs(s["delta_p"] - 2) <= 0.05
            and abs(s["asymmetry_sq"] - 2) <= 0.05
            and self.ratio_limits["delta_over_asymmetry_sq"] > 0
        )

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.rows:
            w.writerow(
                [
                    self.n,
                    repr(float(self.p)),
                    repr(r.epsilon),
                    repr(r.delta_p),
                    repr(r.asymmetry),
                    repr(r.asymmetry_sq),
                    "" if r.beta_p is None else repr(r.beta_p),
                ]
            )
        return buf.getvalue()

    def summary(self) -> dict:
        return {
            "n": self.n,
            "p": self.p,
            "points": len(self.rows),
            "fitted_slopes": self.fitted_slopes,
            "ratio_limits": self.ratio_limits,
            "sharp": self.sharp,
        }

    def summary_json(self) -> str:
        return json.dumps(self.summary(), indent=2, sort_keys=True)


def sharpness_scan(
    n: int,
    p: float,
    epsilons: Sequence[float] = DEFAULT_EPSILONS,
    include_beta: bool = False,
    n_directions: int = 8192,
) -> EpsilonScan:
    eps = sorted(float(e) for e in epsilons)
    if len(eps) < 5:
        raise ValueError("need at least 5 epsilon values")
    if eps[0] <= 0 or eps[-1] > 0.2:
        raise ValueError("epsilon values must lie in (0, 0.2]")
    if eps[-1] / eps[0] < 10 * (1 - 1e-9):
        raise ValueError("epsilon values must span at least a decade")
    with_beta = include_beta and n == 2
    rows = []
    for e in eps:
        beta = ball_beta_p(p, e, n_directions)[0] if with_beta else None
        rows.append(
            ScanRow(e, ball_delta_p(n, p, e), ball_asymmetry(n, e), beta, ball_vp_gap(n, p, e))
        )
    e = np.array(eps)
    delta = np.array([r.delta_p for r in rows])
    asym = np.array([r.asymmetry for r in rows])
    slopes = {
        "delta_p": loglog_slope(e, delta),
        "asymmetry_sq": loglog_slope(e, asym**2),
    }
    limits = {
        "delta_over_eps_sq": even_limit(e, delta / e**2),
        "asymmetry_over_eps": even_limit(e, asym / e),
        "delta_over_asymmetry_sq": even_limit(e, delta / asym**2),
        "vp_gap_over_eps_sq": even_limit(e, np.array([r.vp_gap for r in rows]) / e**2),
    }
    if with_beta:
        beta = np.array([r.beta_p for r in rows])
        slopes["beta_p"] = loglog_slope(e, beta)
        limits["beta_over_eps_sq"] = even_limit(e, beta / e**2)
    return EpsilonScan(n, float(p), rows, slopes, limits)


def delta_series(n: int, p: float, eps: float) -> float:
    """Leading term ``p (p-1) eps^2 / (2n)`` of the ball deficit."""
    return p * (p - 1) * eps * eps / (2 * n)
