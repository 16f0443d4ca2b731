"""Tracing real trajectories of a rotated cubic differential.

A trajectory of sign s is a curve along which s * g(x) (dx)^3 > 0, where
g = e^{-3i theta} P in the working chart.  We integrate it in Euclidean
arclength l:

    dx/dl = e^{i psi},     3 psi = arg(s) - arg g(x)  (mod 2 pi),
    ds/dl = |g(x)|^{1/3}   (flat length).

The direction psi is not integrated; at every stage it is the root of the
congruence nearest to the current direction, which is exactly branch
continuation of the cube root.  Along the trajectory the developing map has
derivative b(x) = |g|^{1/3} e^{-i psi}, a cube root of s g, so that the
developed curve runs along the positive real axis.
"""
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT
from .differential import (CubeRootBranch, horner, segment_integral, work_critical_directions)
from .errors import Hit

TWO_PI3 = 2 * np.pi / 3

# Dormand-Prince 5(4) tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_B4 = (5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40)
_E = tuple(a - b for a, b in zip(_B5, _B4))


@dataclass
class Verdict:
    kind: str  # HitZero | EscapedToPole | Truncated
    zero: int = -1
    distance: float = 0.0
    reason: str = ""

    def as_dict(self):
        d = {"kind": self.kind}
        if self.kind == "HitZero":
            d.update(zero=self.zero, distance=self.distance)
        if self.kind == "Truncated":
            d["reason"] = self.reason
        return d


@dataclass
class Limits:
    max_flat_length: float
    escape_radius: float
    hit_tolerance: float  # developed (flat) units


def default_limits(phi, tol=DEFAULT):
    d = phi.degree
    R = tol.escape_factor * phi.scale
    flat_escape = 3 / (d + 3) * abs(phi.lead) ** (1 / 3) * (R + abs(phi.center)) ** ((d + 3) / 3)
    return Limits(max_flat_length=50 * flat_escape, escape_radius=R,
                  hit_tolerance=tol.hit_tol * phi.flat_scale)


@dataclass
class Trajectory:
    sign: int
    origin: dict
    points: np.ndarray
    flat_lengths: np.ndarray
    psis: np.ndarray
    verdict: Verdict
    theta: float
    passes: dict = field(default_factory=dict)
    id: int = -1
    generation: int = 0

    desc: tuple = ()

    @property
    def branch_at_end(self):
        """Cube-root branch of sign*g at the last point, the developing-map derivative."""
        return CubeRootBranch(self.end, complex(self.b_at(-1)), self.desc)

    def b_at(self, i):
        """Developing-map derivative at point i (a cube root of sign*g)."""
        x = self.points[i]
        return abs(horner(self.desc, x)) ** (1 / 3) * np.exp(-1j * self.psis[i])

    @property
    def end(self):
        return complex(self.points[-1])

    @property
    def start(self):
        return complex(self.points[0])

    @property
    def flat_length(self):
        return float(self.flat_lengths[-1])

    def hits(self):
        return self.verdict.zero if self.verdict.kind == "HitZero" else None

    def to_dict(self, phi=None, decimate=None):
        pts = self.points
        if decimate:
            pts = pts[douglas_peucker(pts, decimate)]
        if phi is not None:
            pts = np.asarray(phi.to_native(pts))
        return {
            "id": self.id,
            "generation": self.generation,
            "sign": "+" if self.sign > 0 else "-",
            "origin": self.origin,
            "verdict": self.verdict.as_dict(),
            "flat_length": round(self.flat_length, 10),
            "points": [[round(float(p.real), 10), round(float(p.imag), 10)] for p in pts],
        }


def douglas_peucker(points, tol):
    """Indices kept by Douglas-Peucker decimation (for output only)."""
    pts = np.asarray(points)
    n = len(pts)
    if n <= 2:
        return np.arange(n)
    keep = np.zeros(n, bool)
    keep[0] = keep[-1] = True
    stack = [(0, n - 1)]
    while stack:
        i, j = stack.pop()
        if j <= i + 1:
            continue
        a, b = pts[i], pts[j]
        seg = b - a
        mid = pts[i + 1:j]
        if not np.isfinite(mid).all():
            keep[i + 1:j] = True
            continue
        if abs(seg) == 0:
            d = np.abs(mid - a)
        else:
            d = np.abs(((mid - a) * np.conj(seg)).imag) / abs(seg)
        k = int(np.argmax(d))
        if d[k] > tol:
            keep[i + 1 + k] = True
            stack.append((i, i + 1 + k))
            stack.append((i + 1 + k, j))
    return np.nonzero(keep)[0]


class _Field:
    """Direction field of one rotated differential and sign."""

    def __init__(self, phi, theta, sign):
        self.desc = tuple(phi.desc(theta))
        self.sign = sign
        self.arg_sign = 0.0 if sign > 0 else np.pi

    def direction(self, x, psi_ref):
        g = horner(self.desc, x)
        base = (self.arg_sign - np.angle(g)) / 3
        m = round((psi_ref - base) / TWO_PI3)
        psi = base + m * TWO_PI3
        return psi, abs(g) ** (1 / 3)

    def project(self, x, psi_ref):
        return self.direction(x, psi_ref)[0]


def _near_radii(zs):
    n = len(zs)
    r = np.zeros(n)
    for i in range(n):
        others = [abs(zs[i] - zs[j]) for j in range(n) if j != i]
        r[i] = 0.25 * min(others) if others else 0.0
    return r


def _developed_to_zero(zs, x, z, b_x):
    v, _ = segment_integral(zs, x, z, b_x, x, q_zero=True, rel=1e-12)
    return v


def trace(phi, theta, start, direction, sign, limits=None, tol=DEFAULT, origin=None,
          start_flat=0.0, prefix=None, skip_zero=None):
    """Trace a trajectory from a working-chart point in a unit direction.

    direction is projected to the nearest admissible direction of the given
    sign; a deviation above 1e-3 rad is rejected.  prefix optionally holds
    (points, flat_lengths, psis) that precede start (used for launches from
    zeros).
    """
    theta = float(theta)
    if limits is None:
        limits = default_limits(phi, tol)
    fld = _Field(phi, theta, sign)
    x = complex(start)
    psi0 = float(np.angle(direction))
    psi = fld.project(x, psi0)
    if abs((psi - psi0 + np.pi) % (2 * np.pi) - np.pi) > 1e-3:
        raise ValueError("direction is not a real direction of the requested sign")
    zs = phi.work_zeros
    nz = len(zs)
    rnear = _near_radii(zs)
    center = phi.center
    scale = phi.scale
    d = phi.degree
    r_stop = tol.launch_factor * tol.eps_sing * scale
    fs = phi.flat_scale
    hit_tol = limits.hit_tolerance
    if prefix is None:
        pts, sl, ps = [x], [float(start_flat)], [psi]
    else:
        pts, sl, ps = list(prefix[0]) + [x], list(prefix[1]) + [float(start_flat)], list(prefix[2]) + [psi]
    s = float(start_flat)
    passes = {}
    verdict = None
    committed = -1  # zero index the trajectory is committed to hit
    commit_along = 0.0
    commit_s = 0.0
    if limits.max_flat_length <= 0:
        return Trajectory(sign, origin or {}, np.array(pts[:1]), np.array(sl[:1]), np.array(ps[:1]),
                          Verdict("Truncated", reason="MaxFlatLength"), theta, desc=fld.desc)
    h = None
    steps = 0
    desc = fld.desc
    while True:
        dz = np.abs(zs - x) if nz else np.array([np.inf])
        dmin = float(dz.min()) if nz else abs(x - center) + scale
        rc = abs(x - center)
        # pole escape (monotone in the far field)
        if rc > limits.escape_radius and (np.conj(x - center) * np.exp(1j * psi)).real > 0:
            verdict = Verdict("EscapedToPole")
            break
        if s > limits.max_flat_length:
            verdict = Verdict("Truncated", reason="MaxFlatLength")
            break
        if steps >= tol.max_steps:
            verdict = Verdict("Truncated", reason="NearMiss" if committed < 0 and dmin < rnear.max(initial=0) else "StepCap")
            break
        # hit detection inside the near disk of a zero
        if committed < 0:
            for k in range(nz):
                if k == skip_zero or dz[k] >= rnear[k]:
                    continue
                b_x = abs(horner(desc, x)) ** (1 / 3) * np.exp(-1j * psi)
                delta = _developed_to_zero(zs, x, zs[k], b_x)
                along, miss = delta.real, delta.imag
                if along > 0:
                    prev = passes.get(k)
                    if prev is None or abs(miss) < abs(prev):
                        passes[k] = float(miss)
                if along > 0 and abs(miss) < hit_tol:
                    committed = k
                    commit_along = along
                    commit_s = s
        if committed >= 0:
            dk = abs(zs[committed] - x)
            if dk < r_stop or s - commit_s > 2 * commit_along + hit_tol:
                b_x = abs(horner(desc, x)) ** (1 / 3) * np.exp(-1j * psi)
                rest = _developed_to_zero(zs, x, zs[committed], b_x)
                pts.append(complex(zs[committed]))
                sl.append(s + max(rest.real, 0.0))
                ps.append(psi)
                verdict = Verdict("HitZero", zero=committed, distance=float(dk))
                break
        # step size caps
        cap = 0.25 * dmin
        cap = min(cap, 0.1 * max(scale, rc))
        if h is None:
            h = 0.1 * cap
        h = min(h, cap)
        tol_dev = tol.step_tol * fs * max(1.0, rc / scale) ** ((d + 3) / 3)
        accepted = False
        for _ in range(tol.max_subdivisions):
            ks = []
            kss = []
            psi_stage = psi
            ok = True
            for i in range(7):
                xi = x
                if i:
                    acc = 0j
                    for a, kv in zip(_A[i], ks):
                        acc += a * kv
                    xi = x + h * acc
                g = horner(desc, xi)
                if g == 0:
                    ok = False
                    break
                base = (fld.arg_sign - np.angle(g)) / 3
                m = round((psi - base) / TWO_PI3)
                pst = base + m * TWO_PI3
                if abs(pst - psi) > np.pi / 6:
                    ok = False
                    break
                ks.append(np.exp(1j * pst))
                kss.append(abs(g) ** (1 / 3))
                psi_stage = pst
            if not ok:
                h *= 0.25
                continue
            dx5 = 0j
            err = 0j
            ds5 = 0.0
            for b5, e, kv, kq in zip(_B5, _E, ks, kss):
                dx5 += b5 * kv
                err += e * kv
                ds5 += b5 * kq
            err_dev = abs(err) * h * kss[-1]
            if err_dev <= tol_dev or h < 1e-15 * scale:
                x_new = x + h * dx5
                s_new = s + h * ds5
                psi_new = psi_stage
                fac = 5.0 if err_dev == 0 else min(5.0, max(0.2, 0.9 * (tol_dev / err_dev) ** 0.2))
                h_next = h * fac
                accepted = True
                break
            h *= max(0.2, 0.9 * (tol_dev / err_dev) ** 0.2)
        if not accepted:
            verdict = Verdict("Truncated", reason="StepCollapse")
            break
        # re-project direction at the new point
        psi_new = fld.project(x_new, psi_new)
        x, s, psi = x_new, s_new, psi_new
        pts.append(x)
        sl.append(s)
        ps.append(psi)
        h = h_next
        steps += 1
    return Trajectory(sign, origin or {}, np.array(pts, dtype=complex), np.array(sl), np.array(ps),
                      verdict, theta, passes, desc=fld.desc)


def launch_data(phi, theta, k_zero, k_dir, tol=DEFAULT):
    """Start point, direction, sign and flat offset for a critical trajectory."""
    a = complex(phi.work_zeros[k_zero])
    psi, e, sign = work_critical_directions(phi, k_zero, theta)[k_dir]
    r0 = tol.launch_factor * tol.eps_sing * phi.scale
    gp = horner(np.polyder(phi.desc(theta)), a)
    s0 = 0.75 * abs(gp) ** (1 / 3) * r0 ** (4 / 3)
    return a, a + r0 * e, e, sign, s0, psi


def trace_critical(phi, theta, k_zero, k_dir, limits=None, tol=DEFAULT):
    """Trace the critical trajectory leaving zero k_zero along direction index k_dir."""
    a, start, e, sign, s0, psi = launch_data(phi, theta, k_zero, k_dir, tol)
    tr = trace(phi, theta, start, e, sign, limits=limits, tol=tol,
               origin={"kind": "Zero", "zero": int(k_zero), "direction": int(k_dir)},
               start_flat=s0, prefix=([a], [0.0], [psi]), skip_zero=k_zero)
    return tr


def pole_escape(phi, point, velocity, escape_radius=None, tol=DEFAULT):
    """Escape predicate in native coordinates.

    True when the point is beyond the escape radius of the working chart and
    moves outward there.  For the normalized family the working chart is
    u = 1/(x - t), so points near t are far out.
    """
    if escape_radius is None:
        escape_radius = tol.escape_factor * phi.scale
    point = complex(point)
    velocity = complex(velocity)
    if phi.form == "NormalizedDegree3":
        if np.isinf(point.real) or np.isinf(point.imag):
            return False
        w = point - phi.t
        if w == 0:
            return True
        u = 1 / w
        du = -velocity / (w * w)
    else:
        u, du = point, velocity
    rc = u - phi.center
    return bool(abs(rc) > escape_radius and (np.conj(rc) * du).real > 0)


def closest_approach(traj, target, hit_tolerance=None):
    """Minimal distance from the polyline to target and the side it passes on.

    Side is 'left' when target lies to the left of the local tangent.  Raises
    Hit when the distance is below hit_tolerance (working-chart units).
    """
    pts = np.asarray(traj.points)
    target = complex(target)
    if hit_tolerance is None:
        hit_tolerance = 1e-9
    if len(pts) == 1:
        dist = abs(pts[0] - target)
        if dist < hit_tolerance:
            raise Hit(dist)
        raise ValueError("side undefined for a single point")
    a = pts[:-1]
    b = pts[1:]
    seg = b - a
    L2 = np.abs(seg) ** 2
    with np.errstate(invalid="ignore", divide="ignore"):
        u = np.clip(((target - a) * np.conj(seg)).real / L2, 0, 1)
    u = np.where(L2 > 0, u, 0.0)
    proj = a + u * seg
    d = np.abs(proj - target)
    i = int(np.argmin(d))
    dist = float(d[i])
    if dist < hit_tolerance:
        raise Hit(dist)
    cross = (np.conj(seg[i]) * (target - proj[i])).imag
    if abs(cross) < 1e-14 and i + 1 < len(seg):
        cross = (np.conj(seg[i + 1]) * (target - proj[i])).imag
    return dist, ("left" if cross > 0 else "right")


def self_intersections(traj, exclude_radius=0.0):
    """Number of proper self-intersections of the polyline."""
    from .network import segment_intersections
    pts = np.asarray(traj.points)
    hits = segment_intersections(pts, pts, same=True)
    return len(hits)
