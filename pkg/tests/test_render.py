import re
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from cubicnet.differential import PolynomialCubicDifferential as P
from cubicnet.network import build, find_double_trajectories
from cubicnet.render import FRAMES, render_svg
from cubicnet.spectralcore import compute_spectral_core

NS = {"s": "http://www.w3.org/2000/svg"}


def _paths(svg, cls=None):
    root = ET.fromstring(svg)
    out = root.findall(".//s:path", NS)
    if cls:
        out = [p for p in out if cls in (p.get("class") or "").split()]
    return out


def test_degree_one_rays():
    net = build(P.polynomial([0, 1]), 0.0)
    svg = render_svg(net, compute_spectral_core(net.phi, 0.0, net))
    trs = [p for p in _paths(svg) if p.get("id", "").startswith("tr-")]
    assert len(trs) == 8
    for p in trs:
        coords = re.findall(r"[ML](-?[\d.]+),(-?[\d.]+)", p.get("d"))
        x0, y0 = map(float, coords[0])
        assert abs(x0) < 1e-3 and abs(y0) < 1e-3  # every ray starts at the origin


def test_degenerate_quadratic_thickened_segment():
    net = build(P.polynomial([-1, 0, 1]), 0.0)
    doubles = find_double_trajectories(net)
    svg = render_svg(net, compute_spectral_core(net.phi, 0.0, net), doubles)
    thick = _paths(svg, "double")
    assert thick
    widths = {float(p.get("stroke-width")) for p in _paths(svg, "pos") + _paths(svg, "neg")}
    assert len(widths) == 2 and max(widths) == pytest.approx(3 * min(widths), rel=1e-3)
    for p in thick:
        ys = [float(y) for _, y in re.findall(r"[ML](-?[\d.]+),(-?[\d.]+)", p.get("d"))]
        assert max(abs(y) for y in ys) < 1e-3  # along [-1, 1]


def test_empty_network_has_pole_marker():
    net = build(P.polynomial([1]), 0.0)
    svg = render_svg(net)
    root = ET.fromstring(svg)
    assert root.find(".//*[@id='pole']", NS) is not None
    assert not [p for p in _paths(svg) if p.get("id", "").startswith("tr-")]


def test_deterministic_and_fixed_precision():
    phi = P.normalized(1.0, 0.5 + 0.3j)
    a = render_svg(build(phi, 0.4), frame="mobius")
    b = render_svg(build(phi, 0.4), frame="mobius")
    assert a == b
    nums = re.findall(r"-?\d+\.\d+", a)
    assert nums and all(len(n.split(".")[1]) == 4 for n in nums)
    assert "-0.0000" not in a


def test_frames():
    phi = P.normalized(1.0, 0.5 + 0.3j)
    net = build(phi, 0.4)
    assert FRAMES == ("identity", "mobius")
    ident = render_svg(net, frame="identity")
    assert 'id="pole" class="pole" fill="none"' in ident and "<g id=\"pole\"" in ident
    assert "stroke-dasharray" in render_svg(net, frame="mobius")
    with pytest.raises(ValueError):
        render_svg(net, frame="polar")
