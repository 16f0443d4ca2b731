"""Saddle connections, critical tripods and the phase scan.

Periods are integrals of the continued cube root of P along working-chart
polylines.  A saddle between zeros a and b in the homotopy class of a path
can only appear at the phase arg(period) mod pi/3, so the period gives the
candidate phase and tracing confirms it.  Tripods sit at the Fermat point of
the developed triangle of three zeros.
"""
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gamma, hyp2f1

from .config import DEFAULT
from .differential import (PI3, CubeRootBranch, branch_ratio, gl_integrate, horner, phase_distance,
                           reduce_phase, segment_integral, work_critical_directions)
from .errors import CubicNetError, QuadratureStall
from .network import refine_intersection, segment_intersections
from .trajectory import _Field, default_limits, trace

TAGS = ("SegNeg", "SegPos", "Seg01")
# zero labels joined by each reference path of the normalized family
TAG_ZEROS = {"SegNeg": ("inf", "0"), "SegPos": ("1", "inf"), "Seg01": ("0", "1")}


@dataclass
class PeriodValue:
    value: complex
    path_tag: str = "Custom"
    quadrature_error: float = 0.0

    def to_dict(self):
        return {"value": [self.value.real, self.value.imag], "path_tag": self.path_tag,
                "quadrature_error": self.quadrature_error}


@dataclass
class SaddleConnection:
    endpoints: tuple
    phase: float
    period: PeriodValue
    path: np.ndarray
    flat_length: float
    lattice_class: tuple = None

    def to_dict(self, phi=None):
        pts = self.path if phi is None else np.asarray(phi.to_native(self.path))
        return {"type": "saddle", "endpoints": list(self.endpoints), "phase": self.phase,
                "period": self.period.to_dict(), "flat_length": self.flat_length,
                "class": list(self.lattice_class) if self.lattice_class else None,
                "path": [[round(float(p.real), 10), round(float(p.imag), 10)] for p in pts[::max(1, len(pts) // 200)]]}


@dataclass
class CriticalTripod:
    zeros: tuple
    fermat_point: complex
    phase: float
    leg_periods: tuple
    spread: float = 0.0
    leg_angles: tuple = ()
    legs: list = field(default_factory=list)
    lattice_class: tuple = None

    @property
    def flat_length(self):
        return float(sum(abs(v) for v in self.leg_periods))

    def to_dict(self, phi=None):
        f = self.fermat_point if phi is None else complex(phi.to_native(self.fermat_point))
        return {"type": "tripod", "zeros": list(self.zeros), "phase": self.phase,
                "fermat_point": [f.real, f.imag],
                "leg_periods": [[v.real, v.imag] for v in self.leg_periods],
                "class": list(self.lattice_class) if self.lattice_class else None}


# ----------------------------------------------------------------------------
# periods

def _principal_branch(phi, x):
    g = horner(phi.desc(0.0), x)
    return CubeRootBranch(complex(x), complex(g ** (1 / 3)), tuple(phi.desc(0.0)))


def period(phi, path, initial_branch=None, tag="Custom", rel=None, tol=DEFAULT):
    """Integral of the continued cube root of P along a working-chart polyline.

    initial_branch fixes the root at its base point (principal root at the
    midpoint of the first segment by default); it is carried to the path by
    straight continuation.  Endpoints on zeros are handled by the cube
    substitution inside segment_integral.
    """
    rel = tol.quad_rel if rel is None else rel
    pts = [complex(p) for p in path]
    if len(pts) < 2 or all(p == pts[0] for p in pts):
        return PeriodValue(0j, tag, 0.0)
    zs = phi.work_zeros
    snap = 1e-12 * phi.scale
    is_zero = [bool(len(zs)) and float(np.min(np.abs(zs - p))) < snap for p in pts]
    k0 = next(i for i in range(len(pts) - 1) if pts[i] != pts[i + 1])
    m0 = 0.5 * (pts[k0] + pts[k0 + 1])
    if initial_branch is None:
        initial_branch = _principal_branch(phi, m0)
    ref = initial_branch.base_point
    b = initial_branch.value
    total = 0j
    err = 0.0
    for i in range(k0, len(pts) - 1):
        p, q = pts[i], pts[i + 1]
        if p == q:
            continue
        m = 0.5 * (p + q)
        b_m = b * complex(branch_ratio(zs, ref, np.array([m]))[0]) if m != ref else b
        v, e = segment_integral(zs, p, q, b_m, m, is_zero[i], is_zero[i + 1], rel=rel)
        total += v
        err += e
        ref, b = m, b_m
    if err > 1e-9 * abs(total) and abs(total) > 0:
        raise QuadratureStall(f"period error {err:.2e} exceeds target for |value| {abs(total):.3e}")
    return PeriodValue(complex(total), tag, float(err))


def _cbrt(z):
    return complex(z) ** (1 / 3)


def x_chart_periods(alpha, t, rel=1e-13):
    """w0, w1 and w01: integrals of cbrt(alpha x(x-1))/(x-t)^3 over (-oo,0], [1,oo), [0,1].

    Principal cube roots of alpha and of x(x-1).  The half-lines are mapped to
    finite intervals by x = -1/v resp. x = 1/v, and every endpoint singularity
    of exponent 1/3 is removed by a cube substitution.
    """
    alpha = complex(alpha)
    t = complex(t)
    ca = _cbrt(alpha)
    c_neg = np.exp(1j * np.pi / 3)  # principal cube root of -1

    def q(f):
        return gl_integrate(f, 0.0, 1.0, rel=rel)

    # w0 = int_{-oo}^{-1} + int_{-1}^{0}
    a1, e1 = q(lambda s: -3 * s ** 3 * np.cbrt(1 + s ** 3) / (1 + t * s ** 3) ** 3)
    a2, e2 = q(lambda s: 3 * s ** 2 * (s * np.cbrt(s ** 3 + 1)) / (-s ** 3 - t) ** 3)
    w0 = ca * (a1 + a2)
    # w1 = int_1^2 + int_2^oo
    b1, f1 = q(lambda s: 3 * s ** 2 * (s * np.cbrt(1 + s ** 3)) / (1 + s ** 3 - t) ** 3)
    h = 0.5 ** (1 / 3)
    b2, f2 = q(lambda s: 3 * h ** 3 * s ** 2 * (h * s) * np.cbrt(1 - h ** 3 * s ** 3)
               / (1 - t * h ** 3 * s ** 3) ** 3)
    w1 = ca * (b1 + b2)
    # w01 = int_0^1 with x(x-1) <= 0, split at 1/2
    g1, k1 = q(lambda s: 3 * s ** 2 * c_neg * s * np.cbrt(1 - s ** 3 * 0.5) * 0.5 ** (4 / 3)
               / (0.5 * s ** 3 - t) ** 3)
    g2, k2 = q(lambda s: 3 * s ** 2 * c_neg * s * np.cbrt(1 - s ** 3 * 0.5) * 0.5 ** (4 / 3)
               / (1 - 0.5 * s ** 3 - t) ** 3)
    w01 = ca * (g1 + g2)
    errs = abs(ca) * np.array([e1 + e2, f1 + f2, k1 + k2])
    return {"w0": complex(w0), "w1": complex(w1), "w01": complex(w01), "errors": errs.tolist()}


_K = gamma(-5 / 3) * gamma(-5 / 6)
_C2 = 54 * 2 ** (2 / 3) * np.sqrt(np.pi)


def _F(z):
    return complex(hyp2f1(4 / 3, 3, 8 / 3, complex(z)))


def _p53(z):
    return complex(z) ** (5 / 3)


def closed_form_periods(alpha, t):
    """Hypergeometric closed forms of w0 and w1 (principal powers)."""
    alpha = complex(alpha)
    t = complex(t)
    ca = _cbrt(alpha)
    q = t * t - t + 1
    w0 = (-2 * np.pi * ca * q / (9 * np.sqrt(3) * _p53(t - 1) * _p53(t))
          - 5 * ca * _K * _F(1 / t) / (_C2 * t ** 3))
    w1 = (2 * np.pi * ca * q / (9 * np.sqrt(3) * _p53(1 - t) * _p53(-t))
          - 5 * ca * _K * _F(1 / (1 - t)) / (_C2 * (t - 1) ** 3))
    return complex(w0), complex(w1)


def reference_paths(phi):
    """Reference paths between zero pairs: list of (a, b, tag, polyline).

    For the normalized family the tags SegNeg, SegPos, Seg01 are the chords of
    the working chart, homotopic to the real intervals [-oo,0], [1,oo], [0,1].
    Otherwise every pair is joined by its chord.
    """
    zs = phi.work_zeros
    out = []
    if phi.form == "NormalizedDegree3":
        for tag in TAGS:
            a, b = (phi.labels.index(l) for l in TAG_ZEROS[tag])
            out.append((a, b, tag, np.array([zs[a], zs[b]])))
        return out
    for i in range(len(zs)):
        for j in range(i + 1, len(zs)):
            out.append((i, j, f"Chord({i},{j})", np.array([zs[i], zs[j]])))
    return out


# ----------------------------------------------------------------------------
# saddles

def _launch(phi, theta, k_zero, psi, sign, tol, limits):
    a = complex(phi.work_zeros[k_zero])
    r0 = tol.launch_factor * tol.eps_sing * phi.scale
    gp = horner(np.polyder(phi.desc(theta)), a)
    s0 = 0.75 * abs(gp) ** (1 / 3) * r0 ** (4 / 3)
    e = np.exp(1j * psi)
    return trace(phi, theta, a + r0 * e, e, sign, limits=limits, tol=tol,
                 origin={"kind": "Zero", "zero": int(k_zero)}, start_flat=s0,
                 prefix=([a], [0.0], [psi]), skip_zero=k_zero)


def _dir_at(phi, k_zero, k_dir, theta, theta_ref):
    """Critical direction k_dir at theta_ref followed continuously to theta."""
    psi0, _, sign = work_critical_directions(phi, k_zero, theta_ref)[k_dir]
    return psi0 + 0.75 * (theta - theta_ref), sign


def _shoot(phi, a, b, k_dir, lo, hi, m_lo, m_hi, theta_ref, tol, limits):
    """Bisect the signed miss at zero b of the trajectory from a; returns a trajectory or None."""
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        psi, sign = _dir_at(phi, a, k_dir, mid, theta_ref)
        tr = _launch(phi, mid, a, psi, sign, tol, limits)
        if tr.verdict.kind == "HitZero" and tr.verdict.zero == b:
            return tr
        m = tr.passes.get(b)
        if m is None or hi - lo < tol.shoot_tol:
            return None
        if np.sign(m) == np.sign(m_lo):
            lo, m_lo = mid, m
        else:
            hi, m_hi = mid, m
    return None


def _thin_path(points, zeros):
    """Coarser polyline in the same homotopy class of the punctured plane.

    A run of points is replaced by its chord when every skipped point lies
    closer to the chord than a quarter of its distance to the nearest zero.
    Endpoints sitting on zeros are kept as they are.
    """
    pts = np.asarray(points, dtype=complex)
    n = len(pts)
    if n <= 2 or not len(zeros):
        return pts
    dz = np.min(np.abs(pts[:, None] - np.asarray(zeros)[None, :]), axis=1)
    out = [pts[0]]
    i = 0
    while i < n - 1:
        j = i + 1
        while j + 1 < n:
            p, q = pts[i], pts[j + 1]
            mid = pts[i + 1:j + 1]
            d = q - p
            dev = np.abs(((mid - p) * d.conjugate()).imag) / abs(d)
            if np.any(dev > 0.25 * dz[i + 1:j + 1]):
                break
            j += 1
        out.append(pts[j])
        i = j
    return np.array(out)


def _saddle_from(phi, tr, a, b, tag, tol):
    per = period(phi, _thin_path(tr.points, phi.work_zeros), tag=tag, tol=tol)
    return SaddleConnection((int(a), int(b)), reduce_phase(tr.theta), per, tr.points.copy(),
                            tr.flat_length)


def _check_candidate(phi, a, b, theta, tol, limits, length=None):
    for k_dir, (psi, _, sign) in enumerate(work_critical_directions(phi, a, theta)):
        tr = _launch(phi, theta, a, psi, sign, tol, limits)
        if tr.verdict.kind == "HitZero" and tr.verdict.zero == b:
            if length is None or abs(tr.flat_length - length) < 1e-6 * length:
                return tr
    return None


def _window_shoot(phi, a, b, theta0, tol, limits, samples=5):
    w = tol.shoot_window
    grid = np.linspace(theta0 - w, theta0 + w, samples)
    for k_dir in range(8):
        misses = []
        for th in grid:
            psi, sign = _dir_at(phi, a, k_dir, th, theta0)
            tr = _launch(phi, th, a, psi, sign, tol, limits)
            if tr.verdict.kind == "HitZero" and tr.verdict.zero == b:
                return tr
            misses.append(tr.passes.get(b))
        for i in range(samples - 1):
            m0, m1 = misses[i], misses[i + 1]
            if m0 is not None and m1 is not None and np.sign(m0) != np.sign(m1):
                tr = _shoot(phi, a, b, k_dir, grid[i], grid[i + 1], m0, m1, theta0, tol, limits)
                if tr is not None:
                    return tr
    return None


def sweep_saddles(phi, resolution, tol=DEFAULT, limits=None):
    """Saddles found by a full sweep of [0, pi/3] at the given resolution.

    Every critical trajectory is followed continuously in the phase; a sign
    change of its signed miss at another zero is bisected.
    """
    limits = limits or default_limits(phi, tol)
    n = len(phi.work_zeros)
    grid = np.linspace(0.0, PI3, int(resolution) + 1)
    found = []
    for a in range(n):
        for k_dir in range(8):
            prev = None
            for th in grid:
                psi, sign = _dir_at(phi, a, k_dir, th, 0.0)
                tr = _launch(phi, th, a, psi, sign, tol, limits)
                if tr.verdict.kind == "HitZero":
                    found.append(tr)
                cur = dict(tr.passes)
                if prev is not None:
                    for b, m1 in cur.items():
                        m0 = prev[1].get(b)
                        if b != a and m0 is not None and np.sign(m0) != np.sign(m1):
                            hit = _shoot(phi, a, b, k_dir, prev[0], th, m0, m1, 0.0, tol, limits)
                            if hit is not None:
                                found.append(hit)
                prev = (th, cur)
    return found


def _dedupe_saddles(phi, trs, tol):
    out = []
    for tr, tag in trs:
        a = tr.origin["zero"]
        b = tr.verdict.zero
        ph = reduce_phase(tr.theta)
        if any(set(s.endpoints) == {a, b} and phase_distance(s.phase, ph) < tol.phase_merge for s in out):
            continue
        out.append(_saddle_from(phi, tr, a, b, tag, tol))
    out.sort(key=lambda s: (s.phase, s.endpoints))
    return out


def find_saddles(phi, sweep=None, tol=DEFAULT, limits=None):
    """Saddle connections of phi over all phases.

    Each reference path gives a candidate phase arg(period) mod pi/3; the
    candidate is confirmed by tracing from one endpoint, with a shooting
    window around it as fallback.  sweep=N additionally runs the full
    phase sweep at resolution N (for classes no reference path covers).
    """
    limits = limits or default_limits(phi, tol)
    hits = []
    for a, b, tag, path in reference_paths(phi):
        per = period(phi, path, tag=tag, tol=tol)
        theta0 = reduce_phase(np.angle(per.value))
        tr = _check_candidate(phi, a, b, theta0, tol, limits, length=abs(per.value))
        if tr is None:
            tr = _check_candidate(phi, b, a, theta0, tol, limits, length=abs(per.value))
        if tr is None and sweep is None and phi.form != "NormalizedDegree3":
            tr = _window_shoot(phi, a, b, theta0, tol, limits)
        if tr is not None:
            hits.append((tr, tag))
    if sweep:
        hits += [(tr, "Custom") for tr in sweep_saddles(phi, sweep, tol, limits)]
    return _dedupe_saddles(phi, hits, tol)


# ----------------------------------------------------------------------------
# tripods and the developing map

def developed_points(phi, targets, base=None, theta=0.0):
    """Developed images of working-chart points, integrating straight from base.

    The root at base is the principal root of the rotated polynomial.  Targets
    on zeros use the endpoint substitution.  Returns (values, branch at base).
    """
    zs = phi.work_zeros
    if base is None:
        base = complex(zs.mean())
    desc = phi.desc(theta)
    b0 = complex(horner(desc, base) ** (1 / 3))
    snap = 1e-12 * phi.scale
    out = []
    for y in targets:
        y = complex(y)
        qz = bool(len(zs)) and float(np.min(np.abs(zs - y))) < snap
        v, _ = segment_integral(zs, base, y, b0, base, q_zero=qz)
        out.append(v)
    return np.array(out), b0


def fermat_point(A, B, C):
    """Fermat point of a counterclockwise triangle with all angles < 2pi/3."""
    # apex of the outward equilateral triangle on BC; the Fermat point lies on
    # the line from A to it, and likewise for the other sides
    def apex(P, Q):
        return P + (Q - P) * np.exp(-1j * np.pi / 3)
    P1, Q1 = A, apex(B, C)
    P2, Q2 = B, apex(C, A)
    d1, d2 = Q1 - P1, Q2 - P2
    s = ((np.conj(d2) * (P2 - P1)).imag) / ((np.conj(d2) * d1).imag)
    return P1 + s * d1


def triangle_angles(D):
    """Interior angles of the triangle with vertices D[0], D[1], D[2]."""
    out = []
    for i in range(3):
        a = D[(i + 1) % 3] - D[i]
        b = D[(i + 2) % 3] - D[i]
        out.append(abs(float(np.angle(b / a))))
    return np.array(out)


def _orient(p):
    return np.sign(((p[1] - p[0]).conjugate() * (p[2] - p[0])).imag)


def _invert_developing(phi, target, base, b0, theta=0.0, iters=60):
    """Working-chart point whose developed image from base equals target."""
    zs = phi.work_zeros
    desc = phi.desc(theta)
    y = complex(base)
    for _ in range(iters):
        v, _ = segment_integral(zs, base, y, b0, base) if y != base else (0j, 0)
        b_y = b0 * complex(branch_ratio(zs, base, np.array([y]))[0])
        step = (target - v) / b_y
        # keep Newton steps inside the zero-free neighbourhood
        dmin = float(np.min(np.abs(zs - y)))
        if abs(step) > 0.5 * dmin:
            step *= 0.5 * dmin / abs(step)
        y += step
        if abs(step) < 1e-14 * phi.scale:
            break
    return y


def tripod_candidates(phi, tol=DEFAULT):
    """Zero triples whose developed triangle admits a Fermat point.

    Returns (triple ordered counterclockwise, developed vertices, phase, Fermat
    point in the chart) for each triple with a genuine developed triangle of
    angles < 2pi/3 whose chart triangle contains no other zero.
    """
    zs = phi.work_zeros
    n = len(zs)
    out = []
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                tri = [i, j, k]
                P = zs[tri]
                if _orient(P) < 0:
                    tri = [i, k, j]
                    P = zs[tri]
                others = [m for m in range(n) if m not in tri]
                if any(_inside(P, zs[m]) for m in others):
                    continue
                base = complex(P.mean())
                D, b0 = developed_points(phi, P, base)
                if _orient(D) <= 0:
                    continue
                ang = triangle_angles(D)
                if ang.max() >= 2 * np.pi / 3 - tol.wall_angle:
                    continue
                F = fermat_point(*D)
                theta = reduce_phase(np.angle(F - D[0]))
                y = _invert_developing(phi, F, base, b0)
                out.append((tuple(tri), D, theta, y, F))
    return out


def _inside(P, z):
    s = [((P[(i + 1) % 3] - P[i]).conjugate() * (z - P[i])).imag for i in range(3)]
    return all(v > 0 for v in s) or all(v < 0 for v in s)


def _tripod_legs(phi, theta, tri, y, tol, limits):
    """For each zero of the triple, the critical trajectory passing closest to y."""
    legs = []
    for a in tri:
        best = None
        for psi, _, sign in work_critical_directions(phi, a, theta):
            tr = _launch(phi, theta, a, psi, sign, tol, limits)
            d = float(np.min(np.abs(tr.points - y)))
            if best is None or d < best[0]:
                best = (d, tr, psi, sign)
        legs.append(best)
    return legs


def _leg_meets(phi, legs):
    pts = []
    for p in range(3):
        t1, t2 = legs[p][1], legs[(p + 1) % 3][1]
        h = segment_intersections(t1.points, t2.points)
        h = [x for x in h if float(np.min(np.abs(phi.work_zeros - x[2]))) > 1e-6 * phi.scale]
        if not h:
            return None
        i, j, y0 = min(h, key=lambda x: abs(x[2] - legs[p][1].points[0]))
        pts.append(refine_intersection(phi, t1, i, t2, j, y0))
    return np.array(pts)


def find_tripods(phi, tol=DEFAULT, limits=None):
    """Critical tripods: one per zero triple admitting a Fermat point."""
    limits = limits or default_limits(phi, tol)
    out = []
    for tri, D, theta, y, F in tripod_candidates(phi, tol):
        legs = _tripod_legs(phi, theta, tri, y, tol, limits)
        if len({l[3] for l in legs}) != 1:
            continue
        meets = _leg_meets(phi, legs)
        if meets is None:
            continue
        spread = float(max(abs(meets[p] - meets[q]) for p in range(3) for q in range(p)))
        if spread > 1e-8 * phi.scale:
            theta, meets, spread, legs = _refine_tripod(phi, tri, legs, theta, tol, limits, spread)
        if spread > 1e-6 * phi.scale:
            continue
        fp = complex(meets.mean())
        dirs = []
        for leg in legs:
            tr = leg[1]
            psi = tr.psis[int(np.argmin(np.abs(tr.points - fp)))]
            dirs.append(np.exp(1j * _Field(phi, theta, tr.sign).project(fp, psi)))
        ang = tuple(float(abs(np.angle(dirs[(p + 1) % 3] / dirs[p]))) for p in range(3))
        out.append(CriticalTripod(tri, fp, reduce_phase(theta), tuple(complex(F - d) for d in D),
                                  spread, ang, [l[1] for l in legs]))
    out.sort(key=lambda c: (c.phase, c.zeros))
    return out


def _signed_area(p):
    return float(((p[1] - p[0]).conjugate() * (p[2] - p[0])).imag)


def _refine_tripod(phi, tri, legs, theta0, tol, limits, spread0, width=1e-5):
    k_dirs = [int(np.argmin([abs(np.angle(np.exp(1j * (psi - l[2]))))
                             for psi, _, _ in work_critical_directions(phi, a, theta0)]))
              for a, l in zip(tri, legs)]

    def at(th):
        ls = []
        for a, k in zip(tri, k_dirs):
            psi, sign = _dir_at(phi, a, k, th, theta0)
            tr = _launch(phi, th, a, psi, sign, tol, limits)
            ls.append((0.0, tr, psi, sign))
        m = _leg_meets(phi, ls)
        return m, ls

    lo, hi = theta0 - width, theta0 + width
    m_lo, _ = at(lo)
    m_hi, _ = at(hi)
    best = (spread0, theta0, None, legs)
    if m_lo is None or m_hi is None or np.sign(_signed_area(m_lo)) == np.sign(_signed_area(m_hi)):
        m, ls = at(theta0)
        return theta0, m if m is not None else np.zeros(3), spread0, legs
    a_lo = _signed_area(m_lo)
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        m, ls = at(mid)
        if m is None:
            break
        sp = float(max(abs(m[p] - m[q]) for p in range(3) for q in range(p)))
        if sp < best[0] or best[2] is None:
            best = (sp, mid, m, ls)
        if sp < 1e-8 * phi.scale or hi - lo < 1e-15:
            break
        if np.sign(_signed_area(m)) == np.sign(a_lo):
            lo = mid
        else:
            hi = mid
    sp, th, m, ls = best
    return th, m, sp, ls


# ----------------------------------------------------------------------------
# phase scan

def _events(saddles, tripods, tol):
    ev = [(s.phase, "saddle", s) for s in saddles] + [(c.phase, "tripod", c) for c in tripods]
    ev.sort(key=lambda e: e[0])
    groups = []
    for e in ev:
        if groups and phase_distance(groups[-1][0][0], e[0]) < tol.phase_merge:
            groups[-1].append(e)
        elif groups and phase_distance(groups[0][0][0], e[0]) < tol.phase_merge:
            groups[0].append(e)
        else:
            groups.append([e])
    out = []
    names = {1: "saddle", 2: "twosaddles", 3: "threesaddles"}
    for g in groups:
        kinds = [e[1] for e in g]
        if "tripod" in kinds:
            if len(g) > 1:
                raise CubicNetError("tripod phase coincides with a saddle phase")
            typ = "tripod"
        else:
            typ = names.get(len(g), f"{len(g)}saddles")
        out.append((g[0][0], typ, [e[2] for e in g]))
    return out


def scan_phases(phi, resolution=None, tol=DEFAULT, saddles=None, tripods=None):
    """Cycle of special phases and core-type intervals over [0, pi/3).

    Returns a list of dicts, either {"phase", "type", "events"} for special
    phases or {"core_type", "phase"} for the interval sampled at phase.
    """
    from .spectralcore import SHORT, core_type
    if saddles is None:
        saddles = find_saddles(phi, sweep=resolution, tol=tol)
    if tripods is None:
        tripods = find_tripods(phi, tol=tol) if phi.degree == 3 else []
    ev = _events(saddles, tripods, tol)
    cycle = []
    if not ev:
        mids = [PI3 / 2]
    else:
        mids = []
        for i, (ph, typ, items) in enumerate(ev):
            nxt = ev[(i + 1) % len(ev)][0]
            gap = (nxt - ph) % PI3 or PI3
            mids.append(reduce_phase(ph + gap / 2))
    for i, mid in enumerate(mids):
        if ev:
            ph, typ, items = ev[i]
            cycle.append({"phase": ph, "type": typ, "events": items})
        name, _, _ = core_type(phi, mid, tol=tol)
        cycle.append({"core_type": SHORT.get(name, name), "phase": mid})
    return cycle


def cycle_labels(cycle):
    """Compact labels of a scan cycle, e.g. ['S', 'III', 'S', 'IV']."""
    short = {"saddle": "S", "tripod": "T", "twosaddles": "2S", "threesaddles": "3S"}
    return [short.get(c["type"], c["type"]) if "type" in c else c["core_type"] for c in cycle]


TABLES = {
    "CD": ["S", "III", "S", "IV"],
    "CC": ["S", "II-", "S", "II+", "S", "III"],
    "CB": ["S", "I", "T", "I", "S", "II-", "S", "II+"],
    "CA": ["S", "I", "T", "I", "S", "II+", "S", "II-"],
    "VertexEpi3": ["3S", "I", "T", "I"],
    "Delta1Plus": ["2S", "I", "T", "I", "S", "II-"],
    "Delta1Minus": ["S", "I", "T", "I", "2S", "II+"],
    "Delta2": ["2S", "II-", "S", "II+"],
    "Delta3": ["2S", "III"],
    "Delta4": ["2S", "IV"],
}


def cyclic_equal(a, b):
    a, b = list(a), list(b)
    if len(a) != len(b):
        return False
    return any(a[r:] + a[:r] == b for r in range(max(1, len(a))))


def cycle_json(cycle, phi=None):
    out = []
    for c in cycle:
        if "type" in c:
            cls = [list(e.lattice_class) if e.lattice_class else None for e in c["events"]]
            out.append({"phase": round(c["phase"], 12), "type": c["type"], "class": cls})
        else:
            out.append({"core_type": c["core_type"]})
    return out
