import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cubicnet.bps import central_charges, charge_of, identify_class
from cubicnet.degeneration import (TABLES, closed_form_periods, cycle_labels, cyclic_equal, fermat_point,
                                   find_saddles, find_tripods, period, reference_paths, scan_phases,
                                   triangle_angles, x_chart_periods)
from cubicnet.differential import PolynomialCubicDifferential as P, phase_distance

import oracles
from conftest import FIGURE_ALPHA

EPI3 = np.exp(1j * np.pi / 3)


def _rel(a, b):
    return abs(a - b) / abs(b)


# periods

def test_periods_match_series_oracle(rng):
    for _ in range(10):
        t = rng.uniform(1.15, 3.0) * np.exp(1j * rng.uniform(0.1, np.pi - 0.1))
        p = x_chart_periods(1.0, t)
        w0, w1 = oracles.saddle_periods(1.0, t)
        assert _rel(p["w0"], w0) < 1e-8
        assert _rel(p["w1"], w1) < 1e-8


def test_closed_form_matches_oracle(rng):
    for _ in range(5):
        t = rng.uniform(1.15, 3.0) * np.exp(1j * rng.uniform(-np.pi + 0.1, -0.1))
        c = closed_form_periods(2 - 1j, t)
        o = oracles.saddle_periods(2 - 1j, t)
        assert _rel(c[0], o[0]) < 1e-10 and _rel(c[1], o[1]) < 1e-10


def test_chart_periods_agree_with_real_line_periods():
    # outside the series disk quadrature is the reference: two independent paths
    t = 0.3 + 0.2j
    phi = P.normalized(1.0, t)
    w = x_chart_periods(1.0, t)
    for a, b, tag, path in reference_paths(phi):
        key = {"SegNeg": "w0", "SegPos": "w1", "Seg01": "w01"}[tag]
        assert abs(abs(period(phi, path, tag=tag).value) - abs(w[key])) < 1e-10 * abs(w[key])


@settings(max_examples=15, deadline=None)
@given(st.floats(0.02, 1.5))
def test_symmetric_line_equal_moduli(y):
    p = x_chart_periods(1.0, complex(0.5, y))
    assert abs(abs(p["w0"]) - abs(p["w1"])) < 1e-9 * abs(p["w0"])


def test_zero_length_path():
    phi = P.normalized(1.0, 0.5 + 0.5j)
    assert period(phi, [0.3 + 0.1j, 0.3 + 0.1j]).value == 0


def test_alpha_homogeneity():
    t = 0.4 + 0.6j
    a = x_chart_periods(1.5 - 0.5j, t)
    b = x_chart_periods(8 * (1.5 - 0.5j), t)
    for k in ("w0", "w1", "w01"):
        assert _rel(b[k], 2 * a[k]) < 1e-12


# saddles

@pytest.mark.parametrize("t", [0.5 + 0.1j, 0.2 + 0.3j, 0.5 + 0.5j, 0.8 + 0.45j, 0.45 + 0.8j])
def test_outer_saddles_always_present(t):
    tags = {s.period.path_tag for s in find_saddles(P.normalized(1.0, t))}
    assert {"SegNeg", "SegPos"} <= tags


def test_saddle_counts_by_chamber():
    assert len(find_saddles(P.normalized(FIGURE_ALPHA, 0.5 + 0.1j))) == 2
    assert len(find_saddles(P.normalized(FIGURE_ALPHA, 0.5 + 0.3j))) == 3


def test_degree_two_single_saddle():
    (s,) = find_saddles(P.polynomial([-1, 0, 1]))
    assert phase_distance(s.phase, 0.0) < 1e-9


def test_saddle_flat_length_matches_central_charge():
    t = 0.5 + 0.5j
    phi = P.normalized(FIGURE_ALPHA, t)
    Z = central_charges(t, FIGURE_ALPHA)
    for s in find_saddles(phi):
        g = identify_class(s, Z)
        assert _rel(abs(charge_of(g, Z)), np.sqrt(3) * s.flat_length) < 1e-6
        assert _rel(abs(s.period.value), s.flat_length) < 1e-6


# tripods

def test_single_tripod_in_chamber_b():
    phi = P.normalized(FIGURE_ALPHA, 0.5 + 0.5j)
    (tri,) = find_tripods(phi)
    for s in find_saddles(phi):
        assert phase_distance(s.phase, tri.phase) > 1e-6
    assert np.allclose(tri.leg_angles, 2 * np.pi / 3, atol=1e-4)


def test_no_tripod_in_chamber_d():
    assert find_tripods(P.normalized(FIGURE_ALPHA, 0.5 + 0.1j)) == []


def test_equilateral_tripod_at_centroid():
    phi = P.normalized(1.0, EPI3)
    (tri,) = find_tripods(phi)
    assert abs(sum(tri.leg_periods)) < 1e-10
    # the symmetric point fixed by x -> 1/(1 - x) away from the pole
    assert abs(complex(phi.to_native(tri.fermat_point)) - EPI3.conjugate()) < 1e-8


@settings(max_examples=50, deadline=None)
@given(st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False),
       st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False),
       st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False))
def test_fermat_point_angles(a, b, c):
    D = np.array([a, b, c])
    area = ((b - a).conjugate() * (c - a)).imag
    if area <= 0.05 or min(abs(b - a), abs(c - b), abs(a - c)) < 0.05:
        return
    if triangle_angles(D).max() >= 2 * np.pi / 3 - 0.05:
        return
    F = fermat_point(a, b, c)
    u = [(v - F) / abs(v - F) for v in D]
    for i in range(3):
        assert abs(abs(np.angle(u[(i + 1) % 3] / u[i])) - 2 * np.pi / 3) < 1e-8


# upper bounds

@pytest.mark.parametrize("d", [3, 4, 5])
def test_roots_of_unity_bounds(d):
    phi = P.polynomial([-1] + [0] * (d - 1) + [1])
    assert len(find_saddles(phi)) <= d * (d - 1) // 2
    assert len(find_tripods(phi)) <= d * (d - 1) * (d - 2) // 6


# scans

def _wall(k, x, which=0):
    from cubicnet.walls import wall_points_on_line
    return wall_points_on_line(k, x)[which]


# wall points are given as (k, Re t) and bisected to full precision
@pytest.mark.parametrize("t,table", [
    (0.5 + 0.1j, "CD"),
    (0.5 + 0.3j, "CC"),
    (0.5 + 0.5j, "CB"),
    (0.8 + 0.3j, "CC"),
    (EPI3, "VertexEpi3"),
    ((2, 0.5), "Delta2"),
    ((3, 0.5), "Delta3"),
    ((2, 0.8), "Delta2"),
    ((1, 0.3), "Delta1Minus"),
    ((1, 0.45), "Delta1Minus"),
    ((1, 0.7), "Delta1Plus"),
])
def test_scan_tables(t, table):
    if isinstance(t, tuple):
        t = _wall(*t)
    cyc = scan_phases(P.normalized(FIGURE_ALPHA, t))
    assert cyclic_equal(cycle_labels(cyc), TABLES[table]), cycle_labels(cyc)


@pytest.mark.xfail(strict=True, reason="scans inside C_A reproduce the C_B row; see decisions ledger")
def test_scan_table_chamber_a():
    cyc = scan_phases(P.normalized(FIGURE_ALPHA, 0.3 + 0.65j))
    assert cyclic_equal(cycle_labels(cyc), TABLES["CA"])


def test_scan_in_chamber_a_gives_row_b():
    cyc = scan_phases(P.normalized(FIGURE_ALPHA, 0.3 + 0.65j))
    assert cyclic_equal(cycle_labels(cyc), TABLES["CB"])


def test_cyclic_equal():
    assert cyclic_equal(["S", "III", "S", "IV"], ["S", "IV", "S", "III"])
    assert not cyclic_equal(["S", "I"], ["I", "I"])
    assert not cyclic_equal(["S"], ["S", "S"])
