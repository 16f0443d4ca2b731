"""Deterministic SVG figures of spectral networks.

Two frames are supported.  "identity" draws the native x-plane.  "mobius"
draws the working chart, in which the normalized family has its zeros
0, 1, oo at -1/t, 1/(1-t), 0; for generic polynomials both frames coincide.
Every coordinate is written with four decimals and every element carries a
stable id, so identical inputs give byte-identical files.
"""
import numpy as np

FRAMES = ("identity", "mobius")

COLORS = {"pos": "#1f4e9c", "neg": "#b8321a", "core": "#9a9a9a", "ink": "#000000"}


def _fmt(v):
    s = f"{v:.4f}"
    return "0.0000" if s == "-0.0000" else s


def _to_frame(phi, pts, frame):
    pts = np.asarray(pts, dtype=complex)
    if frame == "mobius" or phi.form == "GenericPolynomial":
        return pts
    return np.asarray(phi.to_native(pts), dtype=complex)


def _extent(phi, frame):
    """Center and half-width of the drawing in frame coordinates."""
    zs = phi.work_zeros
    if frame == "identity" and phi.form == "NormalizedDegree3":
        pts = np.array([0, 1, phi.t], dtype=complex)
    elif len(zs):
        pts = zs
    else:
        pts = np.zeros(1, dtype=complex)
    c = complex(pts.mean())
    r = float(np.max(np.abs(pts - c))) if len(pts) > 1 else 1.0
    return c, 2.0 * max(r, 0.5)


def _pieces(pts, c, R):
    """Split a polyline at non-finite or far-away points (clipped by the viewBox)."""
    ok = np.isfinite(pts.real) & np.isfinite(pts.imag)
    ok[ok] &= np.abs(pts[ok] - c) < 4 * R
    out, cur = [], []
    for p, good in zip(pts, ok):
        if good:
            cur.append(p)
        elif cur:
            out.append(cur)
            cur = []
    if cur:
        out.append(cur)
    return [q for q in out if len(q) > 1]


def _clamped(pts, c, R):
    """Closed outline with far points pulled onto a circle outside the view (cores through infinity)."""
    pts = pts[np.isfinite(pts.real) & np.isfinite(pts.imag)]
    d = pts - c
    r = np.abs(d)
    far = r > 4 * R
    pts = pts.copy()
    pts[far] = c + d[far] / r[far] * 4 * R
    return pts


def _path(pts):
    return " ".join(("M" if i == 0 else "L") + f"{_fmt(p.real)},{_fmt(-p.imag)}" for i, p in enumerate(pts))


def render_svg(network, core=None, degenerations=(), frame="identity", size=600, decimate=1e-4):
    """SVG document for a built network, its core polygons and double trajectories."""
    from .trajectory import douglas_peucker
    if frame not in FRAMES:
        raise ValueError(f"frame must be one of {FRAMES}")
    phi = network.phi
    c, R = _extent(phi, frame)
    x0, y0, w = c.real - R, -c.imag - R, 2 * R
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="{_fmt(x0)} {_fmt(y0)} {_fmt(w)} {_fmt(w)}">',
        f'<defs><clipPath id="view"><rect x="{_fmt(x0)}" y="{_fmt(y0)}" width="{_fmt(w)}" '
        f'height="{_fmt(w)}"/></clipPath></defs>',
        f'<rect id="frame" x="{_fmt(x0)}" y="{_fmt(y0)}" width="{_fmt(w)}" height="{_fmt(w)}" fill="#ffffff"/>',
        '<g clip-path="url(#view)">',
    ]
    lw = 0.002 * w
    if core is not None:
        for i, comp in enumerate(core.components):
            b = _clamped(_to_frame(phi, comp.boundary(), frame), c, R)
            if len(b) > 2:
                lines.append(f'<path id="core-{i}" class="core" fill="{COLORS["core"]}" '
                             f'fill-opacity="0.35" stroke="none" d="{_path(b)} Z"/>')
    doubled = set()
    for d in degenerations:
        if d.get("kind") in ("SaddleCandidate", "TripodCandidate"):
            doubled.update(d["trajectories"])
    for tr in network.trajectories:
        pts = _to_frame(phi, tr.points, frame)
        cls = "pos" if tr.sign > 0 else "neg"
        width = lw
        if tr.id in doubled:
            cls += " double"
            width = 3 * lw
        for j, piece in enumerate(_pieces(pts, c, R)):
            if decimate:
                piece = np.asarray(piece)[douglas_peucker(np.asarray(piece), decimate * w)]
            lines.append(f'<path id="tr-{tr.id}-{j}" class="{cls}" fill="none" stroke="{COLORS[cls[:3]]}" '
                         f'stroke-width="{_fmt(width)}" d="{_path(piece)}"/>')
    lines.append("</g>")
    dot = 0.012 * w
    zs = _to_frame(phi, phi.work_zeros, frame)
    for k, z in enumerate(zs):
        if np.isfinite(z):
            lines.append(f'<circle id="zero-{k}" class="zero" fill="{COLORS["ink"]}" cx="{_fmt(z.real)}" cy="{_fmt(-z.imag)}" r="{_fmt(dot)}"/>')
    if frame == "identity" and phi.form == "NormalizedDegree3":
        p = phi.t
        lines.append(f'<g id="pole" class="pole" fill="none" stroke="{COLORS["ink"]}" stroke-width="{_fmt(lw)}">'
                     f'<circle cx="{_fmt(p.real)}" cy="{_fmt(-p.imag)}" r="{_fmt(1.5 * dot)}"/>'
                     f'<path d="M{_fmt(p.real - 1.5 * dot)},{_fmt(-p.imag)} L{_fmt(p.real + 1.5 * dot)},{_fmt(-p.imag)}'
                     f' M{_fmt(p.real)},{_fmt(-p.imag - 1.5 * dot)} L{_fmt(p.real)},{_fmt(-p.imag + 1.5 * dot)}"/></g>')
    else:
        # the pole sits at infinity: marked by a dashed circle around the picture
        lines.append(f'<circle id="pole" class="pole" fill="none" stroke="{COLORS["ink"]}" '
                     f'stroke-width="{_fmt(lw)}" stroke-dasharray="{_fmt(4 * lw)} {_fmt(3 * lw)}" cx="{_fmt(c.real)}" '
                     f'cy="{_fmt(-c.imag)}" r="{_fmt(0.96 * R)}"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
