import itertools

import hypothesis
import numpy as np
import pytest

hypothesis.settings.register_profile("default", max_examples=200, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=20, deadline=None)
hypothesis.settings.load_profile("default")


def shoelace(points):
    v = np.asarray(points, float)
    return 0.5 * float(np.sum(v[:, 0] * np.roll(v[:, 1], -1) - v[:, 1] * np.roll(v[:, 0], -1)))


def clip_area(subject, clipper):
    """Sutherland-Hodgman clip of a convex subject by a CCW convex clipper; area of the result."""
    out = [tuple(x) for x in subject]
    c = [tuple(x) for x in clipper]
    for i in range(len(c)):
        a, b = c[i], c[(i + 1) % len(c)]

        def inside(q):
            return (b[0] - a[0]) * (q[1] - a[1]) - (b[1] - a[1]) * (q[0] - a[0]) >= 0

        def cut(s, e):
            dc = (a[0] - b[0], a[1] - b[1])
            dp = (s[0] - e[0], s[1] - e[1])
            n1 = a[0] * b[1] - a[1] * b[0]
            n2 = s[0] * e[1] - s[1] * e[0]
            n3 = 1.0 / (dc[0] * dp[1] - dc[1] * dp[0])
            return ((n1 * dp[0] - n2 * dc[0]) * n3, (n1 * dp[1] - n2 * dc[1]) * n3)

        inp, out = out, []
        if not inp:
            return 0.0
        s = inp[-1]
        for e in inp:
            if inside(e):
                if not inside(s):
                    out.append(cut(s, e))
                out.append(e)
            elif inside(s):
                out.append(cut(s, e))
            s = e
    return shoelace(out) if len(out) >= 3 else 0.0


def brute_hull_area(points):
    """Hull area from the extreme points found by testing every ordered pair as an edge."""
    pts = [tuple(p) for p in np.asarray(points, float)]
    extreme = set()
    for a, b in itertools.permutations(range(len(pts)), 2):
        pa, pb = pts[a], pts[b]
        if pa == pb:
            continue
        side = [
            (pb[0] - pa[0]) * (q[1] - pa[1]) - (pb[1] - pa[1]) * (q[0] - pa[0]) for q in pts
        ]
        length = ((pb[0] - pa[0]) ** 2 + (pb[1] - pa[1]) ** 2) ** 0.5
        if all(s >= -1e-12 * length for s in side):
            extreme.update((a, b))
    ex = np.array([pts[i] for i in extreme])
    c = ex.mean(axis=0)
    order = np.argsort(np.arctan2(ex[:, 1] - c[1], ex[:, 0] - c[0]))
    return shoelace(ex[order])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
