"""Spectral cores: assembly from critical trajectories, classification and audits.

The polar domain around the pole is covered by maximal half-planes.  For a
polynomial of degree d the critical trajectories escape along 2(d+3)
asymptotic directions phi_j, and a trajectory escaping along phi_j has sign
(-1)^j.  Half-plane H_j spans the directions j..j+3: it is bounded by the
most counterclockwise trajectory of direction j and the least
counterclockwise one of direction j+3 (with a saddle connection between
their origins when those differ).  Consecutive half-planes H_j, H_{j+1}
cut a regular corner where their boundary trajectories cross.  Walking j
upward traces the core boundary counterclockwise.
"""
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT
from .differential import gauss_bonnet_residual, horner, work_critical_directions
from .errors import CoreAssemblyFailure, UnclassifiedCore
from .network import segment_intersections, refine_intersection, point_polyline_distance
from .trajectory import _Field

PI3 = np.pi / 3

CORE_TYPES = ("I", "IIminus", "IIplus", "III", "IV", "Sad1Par", "Sad1Pent", "Sad2Quad",
              "Sad2Pair", "Sad3Tri", "D2Parallelogram", "D2Saddle")
SHORT = {"IIminus": "II-", "IIplus": "II+"}

_HEXAGONS = {
    "I": (2, 2, 2, 2, 2, 2),
    "IIminus": (3, 2, 1, 2, 2, 2),
    "IIplus": (3, 2, 2, 2, 1, 2),
    "III": (4, 2, 1, 2, 1, 2),
}


@dataclass
class Corner:
    location: complex
    kind: str  # ZeroCorner | RegularCorner
    zero: int = -1
    interior_angle: float = 0.0


@dataclass
class Edge:
    start: tuple
    end: tuple
    poly: np.ndarray
    saddle: bool = False
    k_start: int = -1
    k_end: int = -1


@dataclass
class Component:
    corners: list
    edges: list

    @property
    def degenerate(self):
        return len(self.corners) <= 2

    @property
    def angles(self):
        return [c.interior_angle for c in self.corners]

    def boundary(self):
        pts = [e.poly for e in self.edges]
        return np.concatenate(pts) if pts else np.array([c.location for c in self.corners])


@dataclass
class CorePolygon:
    components: list
    saddle_sides: int
    n_zeros: int
    degree: int
    theta: float = 0.0
    notes: list = field(default_factory=list)

    @property
    def triangles(self):
        return sum(len(c.corners) - 2 for c in self.components if not c.degenerate)

    def contains(self, y, tol=1e-9):
        """Point in (or on) the core, in working-chart coordinates."""
        for c in self.components:
            b = c.boundary()
            if len(b) >= 2 and point_polyline_distance(np.array([y]), b)[0] <= tol:
                return True
            if len(b) == 1 and abs(b[0] - y) <= tol:
                return True
            if not c.degenerate and _winding(b, y) != 0:
                return True
        return False

    def to_dict(self, phi=None):
        def cx(z):
            if phi is not None:
                z = complex(phi.to_native(z))
            return [round(z.real, 10), round(z.imag, 10)]
        comps = []
        for c in self.components:
            b = c.boundary()
            comps.append({
                "corners": [{"location": cx(k.location), "kind": k.kind, "zero": k.zero,
                             "interior_angle": round(k.interior_angle, 10)} for k in c.corners],
                "boundary": [cx(z) for z in b[::max(1, len(b) // 400)]],
            })
        return {"components": comps, "saddle_sides": self.saddle_sides, "triangles": self.triangles}


def _winding(poly, y):
    p = np.asarray(poly) - y
    if len(p) < 3:
        return 0
    p = np.append(p, p[0])
    ang = np.angle(p[1:] / p[:-1])
    return int(round(ang.sum() / (2 * np.pi)))


def asymptotic_directions(phi, theta):
    """The 2(d+3) escape directions in the working chart and their signs."""
    d = phi.degree
    a = phi.lead * np.exp(-3j * theta)
    n = 2 * (d + 3)
    return [((j * np.pi - np.angle(a)) / (d + 3), (-1) ** j) for j in range(n)]


def _exit_angle(tr, center, R):
    pts = tr.points - center
    r = np.abs(pts)
    inside = np.nonzero(r <= R)[0]
    if len(inside) == 0 or inside[-1] == len(pts) - 1:
        return float(np.angle(pts[-1]))
    i = inside[-1]
    a, b = pts[i], pts[i + 1]
    # solve |a + s (b - a)| = R on the last crossing segment
    v = b - a
    A = abs(v) ** 2
    B = 2 * (np.conj(a) * v).real
    C = abs(a) ** 2 - R * R
    s = (-B + np.sqrt(max(B * B - 4 * A * C, 0.0))) / (2 * A)
    return float(np.angle(a + s * v))


def _arrival_index(phi, theta, tr, zero):
    """Critical direction index at zero along which a trajectory arrives."""
    z = phi.work_zeros[zero]
    pts = tr.points
    dist = np.abs(pts - z)
    r = 100 * phi.tol.launch_factor * phi.tol.eps_sing * phi.scale
    idx = np.nonzero(dist > r)[0]
    p = pts[idx[-1]] if len(idx) else pts[0]
    ang = np.angle(p - z)
    dirs = work_critical_directions(phi, zero, theta)
    diffs = [abs(np.angle(np.exp(1j * (ang - psi)))) for psi, _, _ in dirs]
    return int(np.argmin(diffs))


def compute_spectral_core(phi, theta, network, tol=DEFAULT):
    """Assemble the spectral core boundary from the critical trajectories."""
    theta = float(theta)
    crit = [tr for tr in network.trajectories if tr.origin.get("kind") == "Zero"]
    n = len(phi.work_zeros)
    if n == 0:
        return CorePolygon([], 0, 0, phi.degree, theta)
    R = network.limits.escape_radius
    center = phi.center
    dirs = asymptotic_directions(phi, theta)
    D2 = len(dirs)
    groups = {j: [] for j in range(D2)}
    for tr in crit:
        if tr.verdict.kind == "Truncated":
            raise CoreAssemblyFailure(f"trajectory {tr.id} truncated ({tr.verdict.reason})")
        if tr.verdict.kind != "EscapedToPole":
            continue
        ang = _exit_angle(tr, center, R)
        rel = [abs(np.angle(np.exp(1j * (ang - p)))) for p, _ in dirs]
        j = int(np.argmin(rel))
        if dirs[j][1] != tr.sign:
            raise CoreAssemblyFailure(f"trajectory {tr.id} escapes along a direction of the wrong sign")
        groups[j].append((float(np.angle(np.exp(1j * (ang - dirs[j][0])))), tr))
    for j in range(D2):
        if not groups[j]:
            raise CoreAssemblyFailure(f"no critical trajectory escapes along direction {j}")
        groups[j].sort(key=lambda v: v[0])
    first = {j: groups[j][0][1] for j in range(D2)}
    last = {j: groups[j][-1][1] for j in range(D2)}

    def zid(tr):
        return tr.origin["zero"]

    edges = []
    corners_at = {}
    for j in range(D2):
        L = last[j]
        F = first[(j + 3) % D2]
        N = last[(j + 1) % D2]
        if zid(L) != zid(F):
            edges.append(_saddle_edge(phi, theta, crit, zid(L), zid(F)))
        if zid(F) != zid(N):
            hits = segment_intersections(F.points, N.points)
            hits = [h for h in hits if min(np.abs(phi.work_zeros - h[2])) > 1e-6 * phi.scale]
            if len(hits) != 1:
                raise CoreAssemblyFailure(
                    f"boundary trajectories {F.id} and {N.id} meet {len(hits)} times")
            i, k, y0 = hits[0]
            y = refine_intersection(phi, F, i, N, k, y0)
            fld = _Field(phi, theta, F.sign)
            eF = np.exp(1j * fld.project(y, F.psis[i]))
            eN = np.exp(1j * fld.project(y, N.psis[k]))
            angle = float(np.angle((-eF) / (-eN)) % (2 * np.pi))
            cid = len(corners_at)
            corners_at[cid] = (y, angle)
            edges.append(Edge(("Z", zid(F)), ("C", cid), np.append(F.points[:i + 1], y),
                              k_start=F.origin["direction"]))
            edges.append(Edge(("C", cid), ("Z", zid(N)), np.append([y], N.points[:k + 1][::-1]),
                              k_end=N.origin["direction"]))
    if not edges:
        # all boundary pieces collapse onto a single zero
        z = zid(last[0])
        comp = Component([Corner(complex(phi.work_zeros[z]), "ZeroCorner", z, 0.0)], [])
        return CorePolygon([comp], 0, n, phi.degree, theta)
    for a, b in zip(edges, edges[1:] + edges[:1]):
        if a.end != b.start:
            raise CoreAssemblyFailure("core boundary walk does not close")
    comps = _split(edges)
    components = []
    for es in comps:
        corners = []
        for m, e_out in enumerate(es):
            e_in = es[m - 1]
            v = e_out.start
            if v[0] == "Z":
                if len(es) <= 2 and e_in.start == e_out.end:
                    ang = 0.0
                else:
                    ang = ((e_in.k_end - e_out.k_start) % 8) * PI3
                corners.append(Corner(complex(phi.work_zeros[v[1]]), "ZeroCorner", v[1], ang))
            else:
                y, ang = corners_at[v[1]]
                corners.append(Corner(complex(y), "RegularCorner", -1, ang))
        components.append(Component(corners, es))
    delta = sum(e.saddle for e in edges)
    return CorePolygon(components, delta, n, phi.degree, theta)


def _saddle_edge(phi, theta, crit, a, b):
    for tr in crit:
        if tr.verdict.kind == "HitZero" and tr.origin["zero"] == a and tr.verdict.zero == b:
            return Edge(("Z", a), ("Z", b), tr.points.copy(), True, tr.origin["direction"],
                        _arrival_index(phi, theta, tr, b))
    for tr in crit:
        if tr.verdict.kind == "HitZero" and tr.origin["zero"] == b and tr.verdict.zero == a:
            return Edge(("Z", a), ("Z", b), tr.points[::-1].copy(), True,
                        _arrival_index(phi, theta, tr, a), tr.origin["direction"])
    raise CoreAssemblyFailure(f"no saddle connection between zeros {a} and {b}")


def _split(edges):
    """Split a closed edge cycle at zeros visited more than once."""
    verts = [e.start for e in edges]
    m = len(verts)
    for p in range(m):
        if verts[p][0] != "Z":
            continue
        for q in range(p + 1, m):
            if verts[q] == verts[p]:
                a = edges[p:q]
                b = edges[q:] + edges[:p]
                return _split(a) + _split(b)
    return [edges]


def _units(angles):
    return [a / PI3 for a in angles]


def _cyclic_match(seq, pattern, anchor_value=None):
    n = len(seq)
    for r in range(n):
        rot = tuple(seq[r:] + seq[:r])
        if rot == tuple(pattern):
            return True
    return False


def _rounded(component, tol):
    u = _units(component.angles)
    r = [int(round(v)) for v in u]
    if any(abs(v - k) > tol / PI3 for v, k in zip(u, r)):
        return None
    return r


def classify_core(core, tol=DEFAULT):
    """Combinatorial type of an assembled core."""
    atol = tol.core_angle
    nondeg = [c for c in core.components if not c.degenerate]
    deg = [c for c in core.components if c.degenerate]
    delta = core.saddle_sides
    seqs = []
    for c in nondeg:
        r = _rounded(c, atol)
        if r is None:
            raise UnclassifiedCore(f"corner angles not multiples of pi/3: {c.angles}")
        seqs.append(r)
    if core.degree == 2:
        if delta == 0 and len(seqs) == 1 and _cyclic_match(seqs[0], (1, 2, 1, 2)):
            return "D2Parallelogram"
        if not seqs and delta == 2:
            return "D2Saddle"
        raise UnclassifiedCore(f"d=2 core {seqs} delta={delta}")
    if core.degree != 3:
        raise UnclassifiedCore("classification is only available for d = 2, 3")
    if delta == 0:
        if len(seqs) == 1 and len(seqs[0]) == 6:
            s = seqs[0]
            for name, pat in _HEXAGONS.items():
                if _cyclic_match(s, pat):
                    return name
        if len(seqs) == 2 and all(_cyclic_match(s, (1, 2, 1, 2)) for s in seqs):
            return "IV"
    else:
        if not seqs and delta == 4:
            return "Sad2Pair"
        if len(seqs) == 1:
            V = len(seqs[0])
            if V == 3 and delta == 3:
                return "Sad3Tri"
            if V == 5 and delta == 1:
                return "Sad1Pent"
            if V == 4 and delta == 2 and deg:
                return "Sad1Par"
            if V == 4 and delta == 2:
                return "Sad2Quad"
    raise UnclassifiedCore(f"core with angle sequences {seqs}, delta={delta}")


def audit_core(core, network=None, tol=DEFAULT):
    """Structural checks on an assembled core; returns {check: (passed, detail)}."""
    rep = {}
    n, p, g = core.n_zeros, 1, 0
    expected = 4 * g - 4 + 2 * n + 2 * p - core.saddle_sides
    if n == 0:
        expected = 0
    rep["triangle_count"] = (core.triangles == expected, f"{core.triangles} vs {expected}")
    gb = [abs(gauss_bonnet_residual(c.angles)) for c in core.components if not c.degenerate]
    rep["gauss_bonnet"] = (all(r < tol.polygon_audit for r in gb), gb)
    alt = True
    if core.saddle_sides == 0:
        for c in core.components:
            if c.degenerate:
                continue
            kinds = [k.kind for k in c.corners]
            alt &= all(kinds[i] != kinds[i - 1] for i in range(len(kinds)))
    rep["alternation"] = (alt, None)
    reg = [k.interior_angle for c in core.components for k in c.corners if k.kind == "RegularCorner"]
    rep["regular_corners"] = (all(abs(2 * np.pi - a - 4 * np.pi / 3) < 1e-4 for a in reg), reg)
    mult = [k.interior_angle for c in core.components for k in c.corners]
    rep["angles_multiple"] = (all(abs(a / PI3 - round(a / PI3)) < 1e-4 / PI3 for a in mult), None)
    if network is not None:
        eps = 1e-6 * network.phi.scale
        outside = [j.location for j in network.joints if not core.contains(j.location, eps)]
        rep["joints_inside"] = (not outside, outside)
    return rep


def core_type(phi, theta, network=None, tol=DEFAULT, **kw):
    """Build (if needed) the network at theta and classify its core."""
    from .network import build
    if network is None:
        network = build(phi, theta, tol=tol, **kw)
    core = compute_spectral_core(phi, theta, network, tol=tol)
    return classify_core(core, tol=tol), core, network
