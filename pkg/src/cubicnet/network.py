"""Spectral networks by iterative birthing at same-sign intersections."""
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT
from .differential import branch_ratio, _gl
from .trajectory import default_limits, trace, trace_critical, _Field

CHUNK = 32


@dataclass
class Joint:
    location: complex
    parents: tuple
    born: int
    generation: int
    clustered: bool = False

    def to_dict(self, phi=None):
        loc = self.location if phi is None else complex(phi.to_native(self.location))
        return {"location": [round(loc.real, 10), round(loc.imag, 10)], "parents": list(self.parents),
                "born": self.born, "generation": self.generation, "clustered": self.clustered}


@dataclass
class SpectralNetwork:
    phi: object
    theta: float
    trajectories: list
    joints: list = field(default_factory=list)
    status: tuple = ("Fixpoint", 0)
    limits: object = None
    tol: object = DEFAULT
    pairs_seen: set = field(default_factory=set)

    def by_generation(self, k):
        return [tr for tr in self.trajectories if tr.generation == k]

    @property
    def critical(self):
        return [tr for tr in self.trajectories if tr.origin.get("kind") == "Zero"]

    def counts(self):
        c = {"trajectories": len(self.trajectories), "joints": len(self.joints)}
        for kind in ("HitZero", "EscapedToPole", "Truncated"):
            c[kind] = sum(tr.verdict.kind == kind for tr in self.trajectories)
        return c

    def to_dict(self, decimate=1e-4):
        phi = self.phi
        scale = phi.scale
        return {
            "differential": phi.to_spec(),
            "theta": round(self.theta, 12),
            "status": {"kind": self.status[0], "value": self.status[1]},
            "counts": self.counts(),
            "trajectories": [tr.to_dict(phi, decimate * scale if decimate else None) for tr in self.trajectories],
            "joints": [j.to_dict(phi) for j in self.joints],
        }


# ----------------------------------------------------------------------------
# geometry

def _bboxes(P):
    n = len(P) - 1
    out = []
    for c0 in range(0, n, CHUNK):
        seg = P[c0:min(n, c0 + CHUNK) + 1]
        out.append((c0, min(n, c0 + CHUNK), seg.real.min(), seg.real.max(), seg.imag.min(), seg.imag.max()))
    return out


def segment_intersections(P, Q, same=False):
    """Proper intersections between segments of polylines P and Q.

    Returns a list of (i, j, point) with segment i of P and segment j of Q.
    Segments are half-open so a crossing through a shared vertex is counted
    once.  With same=True, P is Q and adjacent segments are ignored.
    """
    P = np.asarray(P, dtype=complex)
    Q = np.asarray(Q, dtype=complex)
    if len(P) < 2 or len(Q) < 2:
        return []
    bp = _bboxes(P)
    bq = _bboxes(Q)
    out = []
    for (a0, a1, ax0, ax1, ay0, ay1) in bp:
        for (b0, b1, bx0, bx1, by0, by1) in bq:
            if same and b1 <= a0:
                continue
            if ax1 < bx0 or bx1 < ax0 or ay1 < by0 or by1 < ay0:
                continue
            p = P[a0:a1][:, None]
            r = (P[a0 + 1:a1 + 1] - P[a0:a1])[:, None]
            q = Q[b0:b1][None, :]
            w = (Q[b0 + 1:b1 + 1] - Q[b0:b1])[None, :]
            den = (np.conj(r) * w).imag
            qp = q - p
            with np.errstate(divide="ignore", invalid="ignore"):
                s = (np.conj(qp) * w).imag / den
                u = (np.conj(qp) * r).imag / den
            # near-parallel pairs (collinear runs) are not proper crossings
            ok = (np.abs(den) > 1e-12 * np.abs(r) * np.abs(w)) & (s >= 0) & (s < 1) & (u >= 0) & (u < 1)
            if same:
                ii = np.arange(a0, a1)[:, None]
                jj = np.arange(b0, b1)[None, :]
                ok &= jj > ii + 1
            for i, j in zip(*np.nonzero(ok)):
                out.append((a0 + int(i), b0 + int(j), complex(p[i, 0] + s[i, j] * r[i, 0])))
    return out


def point_polyline_distance(pts, poly):
    """Distance from each point to the polyline."""
    pts = np.asarray(pts, dtype=complex)[:, None]
    a = np.asarray(poly[:-1], dtype=complex)[None, :]
    seg = np.asarray(poly[1:], dtype=complex)[None, :] - a
    L2 = np.abs(seg) ** 2
    with np.errstate(invalid="ignore", divide="ignore"):
        u = np.clip(((pts - a) * np.conj(seg)).real / L2, 0, 1)
    u = np.where(L2 > 0, u, 0.0)
    return np.abs(a + u * seg - pts).min(axis=1)


def hausdorff(P, Q):
    if len(P) == 1 or len(Q) == 1:
        return float(np.abs(np.asarray(P)[:, None] - np.asarray(Q)[None, :]).max())
    return float(max(point_polyline_distance(P, Q).max(), point_polyline_distance(Q, P).max()))


def _developed_line(zs, p, b_p, y):
    """Integral of the branch from p to y along the straight segment (short segments)."""
    x, w = _gl(16)
    xs = p + (y - p) * x
    return (y - p) * b_p * np.dot(w, branch_ratio(zs, p, xs))


def refine_intersection(phi, t1, i, t2, j, y0, iters=3):
    """Newton refinement on the two developed straight-line models."""
    zs = phi.work_zeros
    p1, p2 = complex(t1.points[i]), complex(t2.points[j])
    b1, b2 = t1.b_at(i), t2.b_at(j)
    y = complex(y0)
    for _ in range(iters):
        F = np.array([_developed_line(zs, p1, b1, y).imag, _developed_line(zs, p2, b2, y).imag])
        c1 = b1 * complex(branch_ratio(zs, p1, np.array([y]))[0])
        c2 = b2 * complex(branch_ratio(zs, p2, np.array([y]))[0])
        J = np.array([[c1.imag, c1.real], [c2.imag, c2.real]])
        try:
            dx = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError:
            break
        y = y + complex(dx[0], dx[1])
        if abs(complex(dx[0], dx[1])) < 1e-14 * max(1.0, abs(y)):
            break
    return y


def birth_direction(e1, e2, sign):
    """Newborn direction between two same-sign forward directions and its sign.

    e1, e2 are unit directions (complex) or angles.
    """
    if not isinstance(e1, complex):
        e1 = np.exp(1j * float(e1))
    if not isinstance(e2, complex):
        e2 = np.exp(1j * float(e2))
    v = e1 + e2
    return v / abs(v), -sign


# ----------------------------------------------------------------------------

def build_initial(phi, theta, limits=None, tol=DEFAULT):
    """Generation 0: the 8 critical trajectories of every zero."""
    if limits is None:
        limits = default_limits(phi, tol)
    trs = []
    for k in range(len(phi.work_zeros)):
        for m in range(8):
            tr = trace_critical(phi, theta, k, m, limits=limits, tol=tol)
            tr.id = len(trs)
            tr.generation = 0
            trs.append(tr)
    return SpectralNetwork(phi, float(theta), trs, [], ("Fixpoint", 0), limits, tol)


def _excluded(net, y, tr_a, tr_b):
    phi = net.phi
    r = 2 * net.tol.launch_factor * net.tol.eps_sing * phi.scale
    if len(phi.work_zeros) and np.min(np.abs(phi.work_zeros - y)) < max(r, 1e-9):
        return True
    eps = net.tol.eps_joint * phi.scale
    for tr in (tr_a, tr_b):
        if tr.origin.get("kind") == "Joint" and abs(tr.start - y) < eps:
            return True
    return False


def find_joints(network, k):
    """Candidate joints among same-sign pairs involving generation-k trajectories.

    Returns a list of (location, id_a, id_b) not yet registered, sorted by
    distance from the centroid of the zeros.
    """
    trs = network.trajectories
    new_ids = [tr.id for tr in trs if tr.generation == k]
    cands = []
    for ia in new_ids:
        ta = trs[ia]
        if ta.verdict.kind == "HitZero":
            continue
        for tb in trs:
            if tb.id == ia or tb.sign != ta.sign or tb.verdict.kind == "HitZero":
                continue
            if tb.generation == k and tb.id < ia:
                continue
            key = (min(ia, tb.id), max(ia, tb.id))
            if key in network.pairs_seen:
                continue
            for (i, j, y0) in segment_intersections(ta.points, tb.points):
                if _excluded(network, y0, ta, tb):
                    continue
                y = refine_intersection(network.phi, ta, i, tb, j, y0)
                if abs(y - y0) > 10 * max(abs(ta.points[i + 1] - ta.points[i]), abs(tb.points[j + 1] - tb.points[j])):
                    y = y0
                cands.append((y, key[0], key[1], (ia, i), (tb.id, j)))
    c = network.phi.center
    cands.sort(key=lambda v: (abs(v[0] - c), v[1], v[2]))
    return cands


def _already_born(trs, y, direction, sign, eps):
    for tr in trs:
        if tr.sign != sign or len(tr.points) < 2:
            continue
        d = np.abs(tr.points[:-1] - y)
        i = int(np.argmin(d))
        if point_polyline_distance(np.array([y]), tr.points)[0] > eps:
            continue
        if abs(np.angle(np.exp(1j * tr.psis[i]) / direction)) < 1e-3:
            return True
    return False


def _retraces(trs, new, eps, m=10):
    """True if the start of `new` runs along an existing same-sign trajectory.

    The comparison allows for the chord error of the stored polylines, taken
    as a small fraction of the local step of the existing trajectory.
    """
    pts = new.points[:m]
    if len(pts) < 2:
        return False
    for tr in trs:
        if tr.sign != new.sign or len(tr.points) < 2 or tr is new:
            continue
        seg = np.abs(np.diff(tr.points))
        d = point_polyline_distance(pts, tr.points)
        near = np.argmin(np.abs(tr.points[:-1, None] - pts[None, :]), axis=0)
        if np.all(d < eps + 1e-2 * seg[near]):
            i = int(near[0])
            if ((pts[1] - pts[0]) * np.conj(tr.points[i + 1] - tr.points[i])).real > 0:
                return True
    return False


def build(phi, theta, max_generation=8, max_trajectories=400, limits=None, tol=DEFAULT):
    """Iterate joint detection and birthing until a fixpoint or a cap."""
    net = build_initial(phi, theta, limits=limits, tol=tol)
    limits = net.limits
    eps = tol.eps_joint * phi.scale
    k = 0
    while True:
        cands = find_joints(net, k)
        newborn = []
        for (y, a, b, (ia, i), (ib, j)) in cands:
            net.pairs_seen.add((a, b))
            clustered = False
            dup = False
            for jt in net.joints:
                if abs(jt.location - y) < eps:
                    dup = True
                    jt.clustered = True
                    break
            if dup:
                continue
            if len(net.trajectories) + len(newborn) >= max_trajectories:
                net.status = ("TrajectoryCapped", max_trajectories)
                return net
            ta, tb = net.trajectories[ia], net.trajectories[ib]
            fld = _Field(phi, theta, ta.sign)
            e1 = np.exp(1j * fld.project(y, ta.psis[i]))
            e2 = np.exp(1j * fld.project(y, tb.psis[j]))
            if abs(np.angle(e1 / e2)) < 1e-3:
                # overlapping collinear pieces, not a crossing
                continue
            direction, sgn = birth_direction(e1, e2, ta.sign)
            if _already_born(net.trajectories + newborn, y, direction, sgn, eps):
                # the newborn would retrace an existing trajectory (symmetric phases)
                jt = Joint(y, (a, b), -1, k + 1, True)
                net.joints.append(jt)
                continue
            tr = trace(phi, theta, y, direction, sgn, limits=limits, tol=tol,
                       origin={"kind": "Joint", "joint": len(net.joints)})
            if _retraces(net.trajectories + newborn, tr, eps):
                # a third trajectory passes through the joint and already carries the newborn
                net.joints.append(Joint(y, (a, b), -1, k + 1, True))
                continue
            tr.id = len(net.trajectories) + len(newborn)
            tr.generation = k + 1
            net.joints.append(Joint(y, (a, b), tr.id, k + 1, clustered))
            newborn.append(tr)
        if not newborn:
            net.status = ("Fixpoint", k)
            return net
        net.trajectories.extend(newborn)
        k += 1
        if k >= max_generation:
            if find_joints(net, k):
                net.status = ("GenerationCapped", max_generation)
            else:
                net.status = ("Fixpoint", k)
            return net


def find_double_trajectories(network, tol=None):
    """Saddle and tripod candidates among oppositely oriented coincident trajectories."""
    phi = network.phi
    if tol is None:
        tol = 1e-6 * phi.scale
    trs = network.trajectories
    out = []
    seen = set()
    for tr in trs:
        if tr.verdict.kind != "HitZero":
            continue
        if tr.origin.get("kind") == "Zero":
            a, b = tr.origin["zero"], tr.verdict.zero
            key = (min(a, b), max(a, b))
            if key in seen:
                continue
            seen.add(key)
            partner = None
            for other in trs:
                if (other.verdict.kind == "HitZero" and other.origin.get("kind") == "Zero"
                        and other.origin["zero"] == b and other.verdict.zero == a):
                    partner = other
                    break
            entry = {"kind": "SaddleCandidate", "zeros": key, "trajectories": [tr.id],
                     "points": tr.points, "flat_length": tr.flat_length}
            if partner is not None:
                h = hausdorff(tr.points, partner.points[::-1])
                entry["trajectories"].append(partner.id)
                entry["hausdorff"] = h
                if h > max(tol, 1e-3 * phi.scale):
                    entry["kind"] = "Other"
            out.append(entry)
        else:
            jt = network.joints[tr.origin["joint"]]
            pa, pb = (trs[i] for i in jt.parents)
            zs = {p.origin.get("zero") for p in (pa, pb) if p.origin.get("kind") == "Zero"}
            c = tr.verdict.zero
            if len(zs) == 2 and c not in zs:
                fld = _Field(phi, network.theta, pa.sign)
                ia = int(np.argmin(np.abs(pa.points - jt.location)))
                ib = int(np.argmin(np.abs(pb.points - jt.location)))
                e = [np.exp(1j * fld.project(jt.location, pa.psis[ia])) * -1,
                     np.exp(1j * fld.project(jt.location, pb.psis[ib])) * -1,
                     np.exp(1j * tr.psis[0])]
                angs = [abs(np.angle(e[(m + 1) % 3] / e[m])) for m in range(3)]
                ok = all(abs(a - 2 * np.pi / 3) < 1e-4 for a in angs)
                out.append({"kind": "TripodCandidate" if ok else "Other",
                            "zeros": tuple(sorted(zs | {c})), "trajectories": [pa.id, pb.id, tr.id],
                            "point": jt.location, "angles": angs})
            else:
                out.append({"kind": "Other", "trajectories": [tr.id]})
    return out
