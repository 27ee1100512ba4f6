import csv
import io
import json
import math

import mpmath
import numpy as np
import pytest

from lpstab.sharpness import (
    CSV_COLUMNS,
    DEFAULT_EPSILONS,
    QuadratureError,
    ball_asymmetry,
    ball_beta_p,
    ball_delta_p,
    ball_volume,
    ball_vp_gap,
    delta_series,
    disk_lens_asymmetry,
    even_limit,
    loglog_slope,
    monte_carlo_asymmetry,
    sharpness_scan,
    sphere_mean,
)


def hyp_delta(n, p, eps):
    """Sphere mean of (1 + eps t)^p - 1 from the moment series, summed as 2F1."""
    mpmath.mp.dps = 40
    e = mpmath.mpf(eps)
    p = mpmath.mpf(p)
    return mpmath.hyp2f1(-p / 2, (1 - p) / 2, mpmath.mpf(n) / 2, e * e) - 1


def mp_lens_asymmetry(eps):
    mpmath.mp.dps = 40
    d = mpmath.mpf(eps) / 2
    lens = 2 * mpmath.acos(d) - 2 * d * mpmath.sqrt(1 - d * d)
    return 2 * (mpmath.pi - lens) / mpmath.pi


# sphere mean


@pytest.mark.parametrize("n", [2, 3, 4, 5, 10, 25])
def test_sphere_mean_moments(n):
    assert sphere_mean(lambda t: 1.0, n) == pytest.approx(1.0, rel=1e-13)
    assert abs(sphere_mean(lambda t: t, n)) <= 1e-13
    assert sphere_mean(lambda t: t * t, n) == pytest.approx(1 / n, rel=1e-12)
    assert sphere_mean(lambda t: t**4, n) == pytest.approx(3 / (n * (n + 2)), rel=1e-12)


def test_sphere_mean_n3_is_uniform():
    assert sphere_mean(lambda t: t * t, 3) == pytest.approx(1 / 3, rel=1e-14)
    assert sphere_mean(math.exp, 3) == pytest.approx(math.sinh(1.0), rel=1e-13)


def test_sphere_mean_rejects():
    with pytest.raises(ValueError):
        sphere_mean(lambda t: 1.0, 1)
    with pytest.raises(QuadratureError):
        sphere_mean(lambda t: math.sin(1e6 / (t + 2)), 3)


# ball deficit


def test_delta_examples():
    assert ball_delta_p(2, 2.0, 0.0) == 0
    assert abs(ball_delta_p(2, 2.0, 0.01) - 5.0e-5) <= 1e-8
    assert abs(ball_delta_p(3, 2.0, 0.01) - 3.333e-5) <= 1e-8


@pytest.mark.parametrize("p", [1.2, 2.0, 3.7])
@pytest.mark.parametrize("eps", [1e-3, 0.05, 0.4, 0.9])
def test_delta_n3_closed_form(p, eps):
    mpmath.mp.dps = 40
    e, q = mpmath.mpf(eps), mpmath.mpf(p)
    exact = ((1 + e) ** (q + 1) - (1 - e) ** (q + 1)) / (2 * e * (q + 1)) - 1
    assert ball_delta_p(3, p, eps) == pytest.approx(float(exact), rel=1e-11)


@pytest.mark.parametrize("n", [2, 4, 5, 10])
@pytest.mark.parametrize("p", [1.5, 2.0, 4.0])
def test_delta_hypergeometric_oracle(n, p):
    for eps in (1e-3, 1e-2, 0.1, 0.5):
        assert ball_delta_p(n, p, eps) == pytest.approx(float(hyp_delta(n, p, eps)), rel=1e-11)


def test_delta_n2_trapezoid_oracle():
    # periodic integrand: the plain trapezoid rule converges geometrically
    theta = 2 * np.pi * np.arange(4096) / 4096
    for p in (1.5, 2.0, 4.0):
        for eps in (0.05, 0.3):
            oracle = np.mean((1 + eps * np.cos(theta)) ** p) - 1
            assert ball_delta_p(2, p, eps) == pytest.approx(oracle, rel=1e-11)


def test_delta_rejects():
    with pytest.raises(ValueError):
        ball_delta_p(2, 2.0, 1.0)
    with pytest.raises(ValueError):
        ball_delta_p(2, 1.0, 0.1)


def test_delta_symmetric_in_direction():
    for n in (2, 3, 7):
        for p in (1.5, 3.0):
            for eps in (0.01, 0.2):
                plus = sphere_mean(lambda t: (1 + eps * t) ** p, n)
                minus = sphere_mean(lambda t: (1 - eps * t) ** p, n)
                assert plus == pytest.approx(minus, rel=1e-12)


def test_series_remainder_is_fourth_order():
    for n in (2, 3, 10):
        for p in (1.5, 2.0, 4.0):
            # coefficient of eps^4 in the 2F1 series
            c4 = (-p / 2) * (1 - p / 2) * ((1 - p) / 2) * ((3 - p) / 2) / ((n / 2) * (n / 2 + 1) * 2)
            eps = np.logspace(-2, -1, 6)
            ratio = [(ball_delta_p(n, p, e) - delta_series(n, p, e)) / e**4 for e in eps]
            assert np.all(np.isfinite(ratio))
            assert max(abs(r) for r in ratio) <= 2 * abs(c4) + 1e-9
            assert ratio[0] == pytest.approx(c4, rel=0.01, abs=1e-6)


def test_vp_gap_scales_delta():
    for n in (2, 3, 6):
        assert ball_vp_gap(n, 2.0, 0.1) == pytest.approx(ball_volume(n) * ball_delta_p(n, 2.0, 0.1), rel=1e-15)
    assert ball_volume(2) == pytest.approx(math.pi)
    assert ball_volume(3) == pytest.approx(4 * math.pi / 3)


# asymmetry


def test_asymmetry_examples():
    assert abs(ball_asymmetry(2, 0.01) - 0.012732) <= 1e-6
    assert ball_asymmetry(2, 1e-9) == pytest.approx(4e-9 / math.pi, rel=1e-6)


@pytest.mark.parametrize("eps", [1e-4, 1e-3, 0.01, 0.1, 0.5, 1.5])
def test_asymmetry_matches_lens(eps):
    assert ball_asymmetry(2, eps) == pytest.approx(float(mp_lens_asymmetry(eps)), rel=1e-12)
    assert disk_lens_asymmetry(eps) == pytest.approx(float(mp_lens_asymmetry(eps)), rel=1e-8)


def test_asymmetry_in_three_dimensions():
    # two caps of height 1 - eps/2: V = 2 pi h^2 (3 - h) / 3 each
    for eps in (0.01, 0.3, 1.0):
        h = 1 - eps / 2
        lens = 2 * math.pi * h * h * (3 - h) / 3
        expected = 2 * (4 * math.pi / 3 - lens) / (4 * math.pi / 3)
        assert ball_asymmetry(3, eps) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("n", [2, 3, 5, 10])
def test_asymmetry_monte_carlo(n):
    est, se = monte_carlo_asymmetry(n, 0.15, 10_000_000, np.random.default_rng(1000 + n))
    assert abs(est - ball_asymmetry(n, 0.15)) <= 3 * se


def test_asymmetry_rejects():
    for eps in (0.0, -0.1, 2.0):
        with pytest.raises(ValueError):
            ball_asymmetry(2, eps)


# fitting helpers


def test_synthetic_slope_is_two():
    e = np.logspace(-3, -1, 9)
    assert loglog_slope(e, e**2) == pytest.approx(2.0, abs=1e-12)
    assert loglog_slope(e, 3 * e**2) == pytest.approx(2.0, abs=1e-12)
    assert even_limit(e, 0.7 + 2 * e**2 - e**4) == pytest.approx(0.7, abs=1e-12)


# scans


@pytest.fixture(scope="module")
def plane_scan():
    return sharpness_scan(2, 2.0, DEFAULT_EPSILONS, include_beta=True)


def test_scan_plane(plane_scan):
    s = plane_scan
    assert abs(s.fitted_slopes["delta_p"] - 2) <= 0.05
    assert abs(s.fitted_slopes["asymmetry_sq"] - 2) <= 0.05
    assert abs(s.fitted_slopes["beta_p"] - 2) <= 0.1
    lim = s.ratio_limits
    assert lim["delta_over_eps_sq"] == pytest.approx(0.5, rel=1e-6)
    assert lim["asymmetry_over_eps"] == pytest.approx(4 / math.pi, rel=1e-6)
    # (p(p-1)/4) / (4/pi)^2
    assert lim["delta_over_asymmetry_sq"] == pytest.approx(math.pi**2 / 32, rel=1e-5)
    assert lim["vp_gap_over_eps_sq"] == pytest.approx(math.pi / 2, rel=1e-6)
    # area of K +_2 L is 2 pi + pi eps^2 / 4
    assert lim["beta_over_eps_sq"] == pytest.approx(1 / 8, rel=1e-3)
    assert s.sharp


def test_beta_against_expansion():
    for eps in (0.02, 0.05):
        value, err = ball_beta_p(2.0, eps, 8192)
        assert value == pytest.approx(eps**2 / 8, rel=1e-3)
        assert err < 1e-2 * value


@pytest.mark.parametrize("n", [3, 5, 10])
def test_scan_higher_dimensions(n):
    s = sharpness_scan(n, 2.0)
    assert s.ratio_limits["delta_over_eps_sq"] == pytest.approx(2 / (2 * n), rel=1e-6)
    assert "beta_p" not in s.fitted_slopes
    assert s.sharp


def test_scan_csv(plane_scan):
    rows = list(csv.reader(io.StringIO(plane_scan.to_csv())))
    assert tuple(rows[0]) == CSV_COLUMNS
    assert len(rows) == 1 + len(DEFAULT_EPSILONS)
    for row, r in zip(rows[1:], plane_scan.rows):
        assert float(row[2]) == r.epsilon
        assert float(row[3]) == r.delta_p
        assert float(row[6]) == r.beta_p
    summary = json.loads(plane_scan.summary_json())
    assert summary["sharp"] is True
    assert summary["points"] == len(DEFAULT_EPSILONS)


def test_scan_csv_without_beta():
    s = sharpness_scan(3, 2.0, np.logspace(-2, -1, 5))
    rows = list(csv.reader(io.StringIO(s.to_csv())))
    assert all(row[6] == "" for row in rows[1:])


@pytest.mark.parametrize(
    "eps",
    [[0.01, 0.02, 0.05, 0.1], [0.0, 0.01, 0.02, 0.05, 0.1], [0.01, 0.02, 0.05, 0.1, 0.3], [0.02, 0.03, 0.05, 0.08, 0.1]],
)
def test_scan_rejects(eps):
    with pytest.raises(ValueError):
        sharpness_scan(2, 2.0, eps)


@pytest.mark.parametrize("n", [2, 3, 5, 10])
@pytest.mark.parametrize("p", [1.5, 2.0, 4.0])
def test_theorem1_on_ball_family(n, p):
    for eps in np.logspace(-3, math.log10(0.2), 12):
        rhs = (p - 1) / (128 * n * n) * ball_asymmetry(n, eps) ** 2
        assert ball_delta_p(n, p, eps) >= rhs
