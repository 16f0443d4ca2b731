import numpy as np
import pytest

from cubicnet.degeneration import find_saddles
from cubicnet.differential import PolynomialCubicDifferential as P, figure_phase_offset, reduce_phase
from cubicnet.errors import UnclassifiedCore
from cubicnet.network import build
from cubicnet.spectralcore import (Component, CorePolygon, Corner, asymptotic_directions, audit_core,
                                   classify_core, compute_spectral_core, core_type)

from conftest import FIGURE_ALPHA

PI3 = np.pi / 3
QUAD = P.polynomial([-1, 0, 1])


def _comp(units, kinds=None):
    kinds = kinds or ["ZeroCorner" if i % 2 == 0 else "RegularCorner" for i in range(len(units))]
    return Component([Corner(0j, k, interior_angle=u * PI3) for u, k in zip(units, kinds)], [])


def _core(comps, delta=0, degree=3):
    return CorePolygon(comps, delta, 3 if degree == 3 else 2, degree)


# classification of synthetic cores

@pytest.mark.parametrize("units,name", [
    ((2, 2, 2, 2, 2, 2), "I"),
    ((3, 2, 1, 2, 2, 2), "IIminus"),
    ((2, 1, 2, 3, 2, 2), "IIplus"),
    ((1, 2, 4, 2, 1, 2), "III"),
])
def test_classify_hexagons(units, name):
    assert classify_core(_core([_comp(units)])) == name


def test_classify_two_parallelograms():
    assert classify_core(_core([_comp((1, 2, 1, 2)), _comp((1, 2, 1, 2))])) == "IV"


def test_classify_saddle_triangle():
    comp = _comp((1, 1, 1), ["ZeroCorner"] * 3)
    assert classify_core(_core([comp], delta=3)) == "Sad3Tri"


def test_classify_degree_two():
    assert classify_core(_core([_comp((1, 2, 1, 2))], degree=2)) == "D2Parallelogram"
    assert classify_core(_core([_comp((0, 0))], delta=2, degree=2)) == "D2Saddle"


def test_unclassified_angles():
    with pytest.raises(UnclassifiedCore):
        classify_core(_core([_comp((2.5, 1.5, 2, 2, 2, 2))]))


# assembled cores

def test_degree_two_parallelogram():
    name, core, net = core_type(QUAD, 0.3)
    assert name == "D2Parallelogram"
    (comp,) = core.components
    for c in comp.corners:
        want = PI3 if c.kind == "ZeroCorner" else 2 * PI3
        assert abs(c.interior_angle - want) < 1e-6
    assert core.triangles == 2
    # the saddle [-1, 1] is a diagonal: both zeros are corners
    zs = sorted(round(c.location.real, 6) for c in comp.corners if c.kind == "ZeroCorner")
    assert zs == [-1.0, 1.0]
    assert all(core.contains(j.location, 1e-6) for j in net.joints)


def test_degree_two_degenerate_core():
    name, core, _ = core_type(QUAD, 0.0)
    assert name == "D2Saddle"
    assert core.triangles == 0 and core.saddle_sides == 2


def test_chamber_b_type_one_hexagon():
    phi = P.normalized(FIGURE_ALPHA, 0.5 + 0.5j)
    name, core, net = core_type(phi, reduce_phase(0.036 - figure_phase_offset(phi)))
    assert name == "I"
    (comp,) = core.components
    assert np.allclose(comp.angles, 2 * PI3, atol=1e-6)
    rep = audit_core(core, net)
    assert all(ok for ok, _ in rep.values()), rep


@pytest.mark.parametrize("t,theta", [(0.5 + 0.1j, 0.2), (0.5 + 0.3j, 0.4), (0.5 + 0.5j, 0.3),
                                     (0.3 + 0.6j, 0.9)])
def test_nondegenerate_cores_have_four_triangles(t, theta):
    phi = P.normalized(1.0, t)
    _, core, net = core_type(phi, theta)
    assert core.saddle_sides == 0 and core.triangles == 4
    rep = audit_core(core, net)
    assert all(ok for ok, _ in rep.values()), rep


def test_two_saddle_core_on_delta3():
    phi = P.normalized(1.0, 0.5 + 0.176543j)
    s = find_saddles(phi)[0]
    name, core, net = core_type(phi, s.phase)
    assert core.saddle_sides == 2 and core.triangles == 2
    assert name == "Sad1Par"
    assert audit_core(core, net)["gauss_bonnet"][0]


def test_asymptotic_directions_count():
    assert len(asymptotic_directions(QUAD, 0.1)) == 10
    assert len(asymptotic_directions(P.normalized(1.0, 0.5 + 0.5j), 0.1)) == 12
