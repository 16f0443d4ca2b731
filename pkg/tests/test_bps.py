from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from cubicnet.bps import (GENERATORS, ORBITS, OMEGA, TwistedRational as TR, bps_automorphism,
                          bps_structure, central_charges, charge_of, closed_form_z3, evaluate_rays,
                          full_turn_rays, identify_class, orbit_of, pairing, parse, sector_product,
                          sector_rays, to_sympy, twisted_mul, verify_wcf)
from cubicnet.degeneration import find_saddles, find_tripods
from cubicnet.differential import PolynomialCubicDifferential as P
from cubicnet.errors import BoundaryRayActive

import oracles
from conftest import FIGURE_ALPHA

x1, x2, x3, x4 = sympy.symbols("x1 x2 x3 x4")
XS = (x1, x2, x3, x4)
G1, G2, G3, G4 = GENERATORS

CD_CLASSES = {(1, 0, 0, 0), (-1, 1, 1, 1), (0, -1, -1, -1), (0, -1, -1, 0), (1, 0, -1, -1), (-1, 1, 2, 1)}
CC_EXTRA = {(0, 1, 0, 0), (-1, 0, 1, 0), (1, -1, -1, 0)}
CB_EXTRA = {(1, 1, 0, 0), (-2, 1, 2, 1), (1, -2, -2, -1)}


def _pm(classes):
    return classes | {tuple(-v for v in g) for g in classes}


def _random_T(rng):
    while True:
        t = complex(rng.uniform(0.05, 0.95), rng.uniform(0.05, 0.95))
        if abs(t) < 0.98 and abs(t - 1) < 0.98:
            return t


# central charges

def test_z4_is_rotated_z3(rng):
    for _ in range(30):
        Z = central_charges(_random_T(rng), 1.0)
        assert abs(Z[3] / Z[2] - OMEGA) < 1e-12


def test_z3_closed_form_and_loop_oracle(rng):
    import mpmath as mp
    for _ in range(8):
        t = _random_T(rng)
        Z = central_charges(t, FIGURE_ALPHA)
        ref = oracles.z3_closed_form(FIGURE_ALPHA, t)
        assert abs(Z[2] - ref) < 1e-8 * abs(ref)
        assert abs(closed_form_z3(t, FIGURE_ALPHA) - ref) < 1e-10 * abs(ref)
    # the closed form itself against an mpmath contour integral
    t = 0.5 + 0.5j
    third = mp.mpf(1) / 3
    root_t = mp.exp(-2j * mp.pi / 3) * mp.mpc(t - 1) ** third * mp.mpc(t) ** third

    def f(x):
        h = root_t * mp.exp((mp.log(x / t) + mp.log((x - 1) / (t - 1))) / 3)
        return h / (x - t) ** 3
    loop = oracles.loop_integral(f, mp.mpc(t), 0.25)
    assert abs(loop - oracles.z3_closed_form(1.0, t)) < 1e-10 * abs(loop)


def test_alpha_phase_rotates_charges():
    t = 0.4 + 0.5j
    psi = 0.37
    a = central_charges(t, 1.0)
    b = central_charges(t, np.exp(3j * psi))
    assert np.allclose(np.array(b), np.exp(1j * psi) * np.array(a), rtol=1e-12)


# class identification

def test_reference_saddles_identify_generators():
    t = 0.5 + 0.3j
    phi = P.normalized(FIGURE_ALPHA, t)
    Z = central_charges(t, FIGURE_ALPHA)
    by_tag = {s.period.path_tag: identify_class(s, Z) for s in find_saddles(phi)}
    assert by_tag["SegPos"] in (G1, tuple(-v for v in G1))
    assert by_tag["Seg01"] in [g for c in ORBITS["saddle_C"] for g in (c, tuple(-v for v in c))]


def test_tripod_class_in_chamber_b():
    t = 0.5 + 0.5j
    (tri,) = find_tripods(P.normalized(FIGURE_ALPHA, t))
    g = identify_class(tri, central_charges(t, FIGURE_ALPHA))
    assert g in _pm(set(ORBITS["tripod"]))


def test_orbits_are_cover_orbits():
    for orbit in ORBITS.values():
        assert orbit_of(orbit[1]) == list(orbit)
        assert tuple(sum(c) for c in zip(*orbit))[:2] == (0, 0)


# active classes

@pytest.mark.parametrize("t,expected", [
    (0.5 + 0.1j, _pm(CD_CLASSES)),
    (0.5 + 0.3j, _pm(CD_CLASSES | CC_EXTRA)),
    (0.5 + 0.5j, _pm(CD_CLASSES | CC_EXTRA | CB_EXTRA)),
])
def test_active_classes_by_chamber(t, expected):
    b = bps_structure(t, FIGURE_ALPHA)
    classes = set(b.classes())
    assert classes == expected
    assert all(tuple(-v for v in g) in classes for g in classes)
    assert all(b.omega(g) == 1 for g in classes)
    # closed under the order-3 cover automorphism
    assert all(set(orbit_of(g)) <= classes for g in classes)


def test_bps_json_shape():
    d = bps_structure(0.5 + 0.3j, 1.0).to_dict()
    assert d["chamber"] == "CC" and len(d["active"]) == 18 and len(d["Z"]) == 4
    assert {a["provenance"] for a in d["active"]} == {"saddle"}


# twisted torus

def test_twisted_products():
    assert TR.x(G1) * TR.x(G2) == -TR.x((1, 1, 0, 0))
    assert TR.x(G3) * TR.x(G4) == TR.x((0, 0, 1, 1))
    assert TR.x((2, -1, 0, 3)) * TR.x((-2, 1, 0, -3)) == TR.const(1)


_mono = st.tuples(*[st.integers(-2, 2)] * 4)
_elem = st.dictionaries(_mono, st.integers(-3, 3), min_size=1, max_size=3)


@settings(max_examples=60, deadline=None)
@given(_elem, _elem, _elem)
def test_associativity(a, b, c):
    a, b, c = TR(a), TR(b), TR(c)
    lhs = (a * b) * c
    rhs = a * (b * c)
    assert lhs.num == rhs.num and lhs.den == rhs.den


@settings(max_examples=40, deadline=None)
@given(_elem, _elem)
def test_rewriting_is_a_ring_map(a, b):
    # oracle: the fixed rewriting sends twisted products to ordinary products
    a, b = TR(a), TR(b)
    assert sympy.simplify(to_sympy(twisted_mul(a, b)) - to_sympy(a) * to_sympy(b)) == 0
    assert sympy.simplify(to_sympy(a + b) - to_sympy(a) - to_sympy(b)) == 0


def test_parse_roundtrip():
    e = parse("x1*(1 + x1/(x2*x3**2*x4))")
    assert parse(e.display()) == e
    assert sympy.simplify(to_sympy(e) - x1 * (1 + x1 / (x2 * x3 ** 2 * x4))) == 0


# automorphisms

def test_automorphism_examples():
    gr = (1, -1, -2, -1)
    assert bps_automorphism([(gr, 1)], G1) == parse("x1*(1 + x1/(x2*x3**2*x4))")
    assert bps_automorphism([(G1, 1)], G2) == parse("x2*(1 - x1)")
    for ray in ([(gr, 1)], [(G1, 1)], [((1, 1, 0, 0), 1), ((-2, 1, 2, 1), 1)]):
        assert bps_automorphism(ray, G3) == TR.x(G3)
        assert bps_automorphism(ray, G4) == TR.x(G4)


@pytest.fixture(scope="module")
def chamber_b():
    return bps_structure(0.5 + 0.43j, FIGURE_ALPHA)


def _ray_angle(b, g):
    return float(np.angle(charge_of(g, b.Z)))


def test_empty_sector_is_identity(chamber_b):
    angs = sorted(_ray_angle(chamber_b, g) for g in chamber_b.classes())
    gap = max(range(len(angs) - 1), key=lambda i: angs[i + 1] - angs[i])
    lo, hi = angs[gap] + 1e-4, angs[gap + 1] - 1e-4
    out = sector_product(chamber_b, (lo, hi))
    assert all(out[g] == TR.x(g) for g in GENERATORS)


def test_single_ray_sector(chamber_b):
    a = _ray_angle(chamber_b, G1)
    rays = sector_rays(chamber_b, (a - 1e-6, a + 1e-6))
    assert rays == [[(G1, 1)]]
    out = sector_product(chamber_b, (a - 1e-6, a + 1e-6))
    assert out[G2] == bps_automorphism([(G1, 1)], G2)


def test_boundary_ray_rejected(chamber_b):
    a = _ray_angle(chamber_b, G1)
    with pytest.raises(BoundaryRayActive):
        sector_rays(chamber_b, (a, a + 0.3))


def test_printed_normal_forms_on_chamber_b(chamber_b):
    out = sector_product(chamber_b, (0.1, 0.6))
    m = x2 * x3 ** 2 * x4
    want_x1 = x1 * (1 + x1 / m)
    want_x2 = x2 * (1 + x1 * (m - (m + x1) ** 2) / (x2 ** 2 * x3 ** 4 * x4 ** 2))
    assert out[G1] == parse(str(want_x1))
    assert out[G2] == parse(str(want_x2))
    # symbol for symbol in the fixed rewriting
    assert out[G1].display() == str(sympy.expand(want_x1))
    assert out[G2].display() == str(sympy.expand(want_x2))


# wall-crossing

def test_wcf_across_delta2():
    rep = verify_wcf(0.5 + 0.38j, 0.5 + 0.43j, (0.1, 0.6), FIGURE_ALPHA)
    assert rep["equal"]
    assert len(rep["left_rays"]) == 2 and len(rep["right_rays"]) == 3
    assert parse(rep["per_generator"]["x1"]["left"]) == parse("x1*(1 + x1/(x2*x3**2*x4))")


def test_wcf_across_delta3_pentagon():
    rep = verify_wcf(0.5 + 0.15j, 0.5 + 0.2j, (-0.5, 0.3), FIGURE_ALPHA)
    assert rep["equal"]
    assert [len(r) for r in rep["left_rays"]] == [1, 1]
    assert [len(r) for r in rep["right_rays"]] == [1, 1, 1]


def test_wcf_same_chamber():
    assert verify_wcf(0.5 + 0.3j, 0.45 + 0.32j, (0.1, 0.6), FIGURE_ALPHA)["equal"]


def test_evaluation_agrees_with_algebra(chamber_b):
    rays = sector_rays(chamber_b, (0.1, 0.6))
    out = sector_product(chamber_b, (0.1, 0.6))
    p = [Fraction(2, 3), Fraction(5, 7), Fraction(-3, 11), Fraction(7, 5)]
    vals = evaluate_rays(rays, p)
    subs = dict(zip(XS, [sympy.Rational(v.numerator, v.denominator) for v in p]))
    for g, v in zip(GENERATORS, vals):
        assert sympy.Rational(v.numerator, v.denominator) == to_sympy(out[g]).subs(subs)


@pytest.mark.parametrize("t", [0.5 + 0.1j, 0.5 + 0.3j, 0.5 + 0.5j])
def test_full_turn_is_an_involution(t):
    b = bps_structure(t, FIGURE_ALPHA)
    rays = full_turn_rays(b)
    assert sum(len(r) for r in rays) == len(b.active)
    p = [Fraction(2, 3), Fraction(5, 7), Fraction(-3, 11), Fraction(7, 5)]
    q = evaluate_rays(rays, p)
    assert q[2:] == p[2:]
    assert q != p
    assert evaluate_rays(rays, q) == p


def test_pairing_matrix():
    assert pairing(G1, G2) == 1 and pairing(G2, G1) == -1
    assert all(pairing(G3, g) == 0 and pairing(G4, g) == 0 for g in GENERATORS)
