"""The d = 3 parameter space: fundamental domain, core triangles, chambers and walls.

The normalized family is invariant (up to isometry) under the S3 action on t
generated by t -> 1 - t and t -> 1/t.  The words t, 1/(1-t), 1 - 1/t keep the
upper half-plane; T is the closed triangle bounded by [0, 1] and the arcs
|t| = 1, |t - 1| = 1 meeting at e^{i pi/3}.

Chamber decisions use the developed triangle of the three zeros (alpha = 1,
integration along chords from the centroid of the working chart).  When the
developed triangle has the orientation of the chart triangle its sides are the
three saddle connections.  Otherwise the triangle is folded: only the saddles
through infinity exist and the angle between them at infinity is
2 pi minus the developed angle.
"""
import hashlib
import json
import os
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT
from .degeneration import developed_points, triangle_angles, x_chart_periods
from .differential import PolynomialCubicDifferential, branch_ratio, segment_integral
from .errors import CubicNetError, NoTriangle, NotReducible, WallNotBracketed

EPI3 = np.exp(1j * np.pi / 3)
CACHE_ENV = "CUBICNET_CACHE_DIR"
LABELS = ("CA", "CB", "CC", "CD", "Delta1Minus", "Delta1Plus", "Delta2", "Delta3", "Delta4",
          "VertexEpi3", "VertexHalf", "VertexZero")

_WORDS = {
    "1-t": lambda t: 1 - t,
    "1/t": lambda t: 1 / t,
}


@dataclass
class FundamentalPoint:
    t: complex
    orbit_map: tuple  # words applied in order


@dataclass
class CoreTriangle:
    side_vectors: tuple  # developed (a, b, c) for [1, oo], [-oo, 0], [0, 1]
    closure_residual: float
    angles: tuple  # at 0, 1, oo

    @property
    def angle_sum(self):
        return float(sum(self.angles))


@dataclass
class ChamberLabel:
    label: str
    t: complex
    angles: tuple
    folded: bool = False

    def __str__(self):
        return self.label

    def to_dict(self):
        return {"chamber": self.label, "t_reduced": [self.t.real, self.t.imag],
                "angles": [float(a) for a in self.angles], "folded": self.folded}


def in_T(t, eps=1e-12):
    return t.imag >= -eps and abs(t) <= 1 + eps and abs(t - 1) <= 1 + eps


def reduce_to_T(t, snap=1e-10):
    """Move t into T by the words t -> 1 - t and t -> 1/t.

    Lower half-plane points first take 1 - t; in the upper half-plane the
    order-3 rotations 1/(1-t) and 1 - 1/t permute the three sectors cut out
    by the geodesics from e^{i pi/3} to 0, 1 and oo.
    """
    t = complex(t)
    if abs(t) < 1e-14 or abs(t - 1) < 1e-14:
        raise NotReducible("t must avoid 0 and 1")
    word = []
    if abs(t.imag) < snap:
        t = complex(t.real, 0.0)
        # real axis: 1/t, 1 - t and 1/(1-t) bring t into (0, 1/2] or its mirror [1/2, 1)
        for w in ((), ("1/t",), ("1-t",), ("1-t", "1/t"), ("1/t", "1-t"), ("1-t", "1/t", "1-t")):
            u = apply_word(t, w)
            if 0 < u.real <= 1:
                return FundamentalPoint(complex(u.real, 0.0), tuple(w))
        raise NotReducible(f"no reduction of {t}")
    if t.imag < 0:
        t = 1 - t
        word.append("1-t")
    for w in ((), ("1-t", "1/t"), ("1/t", "1-t")):
        u = apply_word(t, w)
        if abs(u.imag) < snap:
            u = complex(u.real, 0.0)
        if in_T(u, snap):
            if abs(u - EPI3) < snap:
                u = EPI3
            return FundamentalPoint(u, tuple(word) + tuple(w))
    raise NotReducible(f"no reduction of {t} within the step bound")


def apply_word(t, word):
    for w in word:
        t = _WORDS[w](t)
    return t


def _chart_orientation(P):
    return np.sign(((P[1] - P[0]).conjugate() * (P[2] - P[0])).imag)


def developed_triangle(t):
    """Developed vertices (0, 1, oo order), their angles and whether the triangle is folded."""
    phi = PolynomialCubicDifferential.normalized(1.0, t)
    P = phi.work_zeros
    D, _ = developed_points(phi, P)
    folded = _chart_orientation(D) != _chart_orientation(P)
    return D, triangle_angles(D), bool(folded)


def angle_at_infinity(t):
    """Angle between the two saddles meeting at oo, continuous across the fold."""
    _, ang, folded = developed_triangle(t)
    return 2 * np.pi - ang[2] if folded else ang[2]


def core_triangle(phi):
    """Core triangle of a normalized differential from its three saddle periods.

    The sides are chord integrals with the root continued from the centroid of
    the working chart, so their closure is an independent check.
    """
    if phi.form != "NormalizedDegree3":
        raise NoTriangle("core triangles are defined for the normalized family")
    zs = phi.work_zeros
    c = complex(zs.mean())
    b0 = complex(np.polyval(phi.desc(0.0), c) ** (1 / 3))

    def side(i, j):
        m = 0.5 * (zs[i] + zs[j])
        b_m = b0 * complex(branch_ratio(zs, c, np.array([m]))[0])
        v, _ = segment_integral(zs, zs[i], zs[j], b_m, m, True, True)
        return v

    # zeros indexed 0 -> "0", 1 -> "1", 2 -> "inf"
    a = side(1, 2)
    b = side(2, 0)
    cc = side(0, 1)
    D = np.array([0j, cc, cc + a])
    if _chart_orientation(D) != _chart_orientation(zs):
        raise NoTriangle("only two saddle connections exist")
    ang = triangle_angles(D)
    res = abs(a + b + cc)
    return CoreTriangle((a, b, cc), float(res), tuple(float(x) for x in ang))


def classify_chamber(t, tol=DEFAULT):
    """Chamber or wall label of t (reduced to T first)."""
    fp = reduce_to_T(t)
    tau = fp.t
    eps = tol.wall_angle
    if abs(tau - EPI3) < 1e-10:
        return ChamberLabel("VertexEpi3", tau, (np.pi / 3,) * 3)
    if abs(tau - 0.5) < 1e-10:
        return ChamberLabel("VertexHalf", tau, ())
    if abs(tau) < 1e-10 or abs(tau - 1) < 1e-10:
        return ChamberLabel("VertexZero", tau, ())
    if abs(tau.imag) < 1e-10:
        return ChamberLabel("Delta4", tau, ())
    D, ang, folded = developed_triangle(tau)
    angles = tuple(float(a) for a in ang)
    if folded:
        g = 2 * np.pi - ang[2]
        if abs(g - 4 * np.pi / 3) < eps:
            lab = "Delta4"
        elif abs(g - np.pi) < eps:
            lab = "Delta3"
        elif np.pi < g < 4 * np.pi / 3:
            lab = "CD"
        else:
            raise CubicNetError(f"folded triangle with angle {g} at infinity")
        return ChamberLabel(lab, tau, angles[:2] + (g,), True)
    m = max(ang)
    if abs(m - np.pi) < eps:
        lab = "Delta3"
    elif abs(m - 2 * np.pi / 3) < eps:
        lab = "Delta2"
    elif m > 2 * np.pi / 3:
        lab = "CC"
    elif any(abs(a - np.pi / 3) < eps for a in ang):
        lab = "Delta1Minus" if tau.real < 0.5 else "Delta1Plus"
    elif sum(a > np.pi / 3 for a in ang) == 1:
        lab = "CB"
    else:
        lab = "CA"
    return ChamberLabel(lab, tau, angles, False)


# ----------------------------------------------------------------------------
# walls

def _top(x):
    """Upper boundary of T over Re t = x."""
    return np.sqrt(max(0.0, 1 - (x - 1) ** 2)) if x <= 0.5 else np.sqrt(max(0.0, 1 - x * x))


def wall_function(k, t):
    """Signed distance-like function vanishing on the wall Delta_k."""
    if k == 3:
        return angle_at_infinity(t) - np.pi
    _, ang, folded = developed_triangle(t)
    if k == 2:
        m = 2 * np.pi - ang[2] if folded else max(ang)
        return m - 2 * np.pi / 3
    if k == 1:
        if folded:
            return 1.0
        return float(np.prod(ang - np.pi / 3))
    raise ValueError(f"no wall function for k={k}")


def _bisect(f, lo, hi, flo, tol=1e-8):
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if np.sign(fm) == np.sign(flo):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def wall_points_on_line(k, x, samples=24):
    """All wall points of Delta_k on the vertical line Re t = x inside T."""
    top = _top(x)
    if top <= 1e-6:
        raise WallNotBracketed(f"line Re t = {x} misses T")
    ys = np.linspace(1e-4 * top, top * (1 - 1e-6), samples)
    vals = [wall_function(k, complex(x, y)) for y in ys]
    roots = []
    for i in range(samples - 1):
        if np.sign(vals[i]) != np.sign(vals[i + 1]):
            y = _bisect(lambda s: wall_function(k, complex(x, s)), ys[i], ys[i + 1], vals[i])
            roots.append(complex(x, y))
    if not roots:
        raise WallNotBracketed(f"Delta_{k} not bracketed on Re t = {x}")
    return roots


def _cache_key(k, M, samples, tol):
    blob = json.dumps({"k": k, "M": M, "samples": samples, "tol": tol.as_dict()}, sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()[:24]


def trace_wall(k, M=40, tol=DEFAULT, cache_dir=None, samples=24):
    """Points of the wall Delta_k in T, ordered along the wall.

    Delta_4 is the segment (0, 1/2].  The other walls are bisected on M
    vertical scan lines, each sampled at the given number of heights; lines
    that miss the wall are skipped.  Results are
    cached as JSON when a cache directory is given or set in the environment.
    """
    k = int(k)
    if k == 4:
        xs = np.linspace(0.5 / M, 0.5, M)
        return [complex(x, 0.0) for x in xs]
    cache_dir = cache_dir or os.environ.get(CACHE_ENV)
    path = None
    if cache_dir:
        path = os.path.join(cache_dir, f"wall_{k}_{_cache_key(k, M, samples, tol)}.json")
        if os.path.exists(path):
            with open(path) as fh:
                return [complex(a, b) for a, b in json.load(fh)["points"]]
    pts = []
    for x in np.linspace(0.0, 1.0, M + 2)[1:-1]:
        try:
            pts += wall_points_on_line(k, x, samples)
        except WallNotBracketed:
            continue
    pts.sort(key=lambda z: (z.real, z.imag))
    if path:
        os.makedirs(cache_dir, exist_ok=True)
        tmp = path + ".tmp"
        with open(tmp, "w") as fh:
            json.dump(wall_json(k, pts), fh)
        os.replace(tmp, path)
    return pts


def wall_json(k, pts):
    return {"k": int(k), "points": [[round(p.real, 12), round(p.imag, 12)] for p in pts]}


def symmetric_locus_check(t, tol=1e-10):
    """True iff t lies on Re t = 1/2, |t| = 1 or |t - 1| = 1.

    On the vertical line the reflection symmetry is cross-checked through the
    saddle periods |w0| = |w1|.
    """
    t = complex(t)
    vertical = abs(t.real - 0.5) < tol
    on = vertical or abs(abs(t) - 1) < tol or abs(abs(t - 1) - 1) < tol
    if vertical and abs(t.imag) > 1e-8:
        p = x_chart_periods(1.0, t)
        if abs(abs(p["w0"]) - abs(p["w1"])) > 1e-9 * abs(p["w0"]):
            raise CubicNetError("reflection symmetry broken on Re t = 1/2")
    return bool(on)


def table_for(label):
    """Name of the scan table expected for a chamber or wall label."""
    return {"CA": "CA", "CB": "CB", "CC": "CC", "CD": "CD", "Delta2": "Delta2", "Delta3": "Delta3",
            "Delta4": "Delta4", "VertexEpi3": "VertexEpi3", "Delta1Plus": "Delta1Plus",
            "Delta1Minus": "Delta1Minus"}.get(label)
