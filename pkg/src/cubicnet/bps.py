"""BPS structures of the normalized family and exact wall-crossing checks.

Lattice classes live in Gamma = Z^4 with basis gamma_1..gamma_4.  The pairing
is <a, b> = a1 b2 - a2 b1 (gamma_3, gamma_4 span the kernel).  Twisted
characters obey x_a x_b = (-1)^{<a,b>} x_{a+b}; all algebra below is done in
that ring.  Printed formulas in x1..x4 use the rewriting
x_n = (-1)^{n1 n2} x1^n1 x2^n2 x3^n3 x4^n4, which is a ring isomorphism onto
ordinary Laurent polynomials.
"""
from dataclasses import dataclass, field
from functools import reduce
from math import gcd

import numpy as np

from .config import DEFAULT
from .errors import AmbiguousClass, BoundaryRayActive

OMEGA = np.exp(2j * np.pi / 3)
ZERO = (0, 0, 0, 0)

# orbits of the order-3 cover automorphism; the first member is the representative
ORBITS = {
    "saddle_A": ((1, 0, 0, 0), (-1, 1, 1, 1), (0, -1, -1, -1)),
    "saddle_B": ((0, -1, -1, 0), (1, 0, -1, -1), (-1, 1, 2, 1)),
    "saddle_C": ((0, 1, 0, 0), (-1, 0, 1, 0), (1, -1, -1, 0)),
    "tripod": ((1, 1, 0, 0), (-2, 1, 2, 1), (1, -2, -2, -1)),
}


def pairing(a, b):
    return a[0] * b[1] - a[1] * b[0]


PAIRING_MATRIX = np.array([[pairing(e, f) for f in np.eye(4, dtype=int).tolist()]
                           for e in np.eye(4, dtype=int).tolist()])


def _add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _neg(a):
    return tuple(-x for x in a)


def _scale(a, k):
    return tuple(k * x for x in a)


# ----------------------------------------------------------------------------
# central charges

def _cbrt(z):
    return complex(z) ** (1 / 3)


def central_charges(t, alpha, quadrature=True, nodes=256):
    """(Z1, Z2, Z3, Z4) on the generators.

    Z1 and Z2 are the lifts of the saddles along [1, oo] and [0, 1]:
    Z1 = -i sqrt(3) w1 and Z2 = i sqrt(3) w01.  Z3 is the loop integral of
    cbrt(alpha x (x-1)) / (x - t)^3 around t, with the root at t fixed to
    cbrt(alpha) e^{-2 pi i/3} cbrt(t-1) cbrt(t) (continuous in t off the real
    axis), and Z4 = e^{2 pi i/3} Z3.
    """
    from .degeneration import x_chart_periods
    t = complex(t)
    alpha = complex(alpha)
    p = x_chart_periods(alpha, t)
    z1 = -1j * np.sqrt(3) * p["w1"]
    z2 = 1j * np.sqrt(3) * p["w01"]
    if quadrature:
        z3 = _loop_charge(t, alpha, nodes)
    else:
        z3 = closed_form_z3(t, alpha)
    return (complex(z1), complex(z2), complex(z3), complex(OMEGA * z3))


def _root_at_t(t, alpha):
    return _cbrt(alpha) * OMEGA.conjugate() * _cbrt(t - 1) * _cbrt(t)


def closed_form_z3(t, alpha):
    c = OMEGA.conjugate() * _cbrt(t - 1) * _cbrt(t)
    return complex(-2j * np.pi / 9 * _cbrt(alpha) * (t * t - t + 1) * c ** -5)


def _loop_charge(t, alpha, n):
    # periodic trapezoid rule on |x - t| = r; the integrand is analytic there
    r = 0.5 * min(abs(t), abs(t - 1))
    ph = 2 * np.pi * np.arange(n) / n
    e = np.exp(1j * ph)
    x = t + r * e
    h = _root_at_t(t, alpha) * np.exp((np.log(x / t) + np.log((x - 1) / (t - 1))) / 3)
    vals = h / (r * e) ** 3 * 1j * r * e
    return complex(vals.sum() * 2 * np.pi / n)


def charge_of(gamma, Z):
    return complex(sum(g * z for g, z in zip(gamma, Z)))


# ----------------------------------------------------------------------------
# class identification

def identify_class(degeneration, Z, rel=1e-6, phase_tol=1e-6):
    """Lattice class of a saddle or tripod from its flat length and phase.

    A class matches when |Z| = sqrt(3) L and arg Z = theta + pi/6 mod pi/3.
    The three lifts of one degeneration form an orbit of the cover
    automorphism; the orbit representative is returned, with the sign that puts
    Z in the half-plane of the detected phase.
    """
    L = float(degeneration.flat_length)
    theta = float(degeneration.phase)
    target = np.sqrt(3) * L
    hits = []
    near = []
    for name, orbit in ORBITS.items():
        for g in orbit:
            z = charge_of(g, Z)
            d_mod = abs(abs(z) - target) / target
            d_arg = abs(((np.angle(z) - theta - np.pi / 6) + np.pi / 6) % (np.pi / 3) - np.pi / 6)
            if d_mod < 1e-2:
                near.append((name, g, d_mod, d_arg))
            if d_mod < rel and d_arg < phase_tol:
                hits.append((name, g))
    names = sorted({h[0] for h in hits})
    if len(names) != 1:
        if not names:
            near += _box_search(Z, target, theta, rel, phase_tol)
        raise AmbiguousClass(f"{len(names)} orbits match flat length {L:.9g} at phase {theta:.9g}",
                             near=near)
    rep = ORBITS[names[0]][0]
    z = charge_of(rep, Z)
    if (z * np.exp(-1j * (theta + np.pi / 6))).real < 0:
        rep = _neg(rep)
    return rep


def _box_search(Z, target, theta, rel, phase_tol, bound=3):
    out = []
    rng = range(-bound, bound + 1)
    for g in ((a, b, c, d) for a in rng for b in rng for c in rng for d in rng):
        if g == ZERO:
            continue
        z = charge_of(g, Z)
        d_mod = abs(abs(z) - target) / target
        d_arg = abs(((np.angle(z) - theta - np.pi / 6) + np.pi / 6) % (np.pi / 3) - np.pi / 6)
        if d_mod < rel and d_arg < phase_tol:
            out.append(("lattice", g, d_mod, d_arg))
    return out


def orbit_of(gamma):
    """Orbit of gamma under the cover automorphism, starting at the signed representative."""
    for orbit in ORBITS.values():
        for s in (1, -1):
            signed = [tuple(s * x for x in g) for g in orbit]
            if tuple(gamma) in signed:
                return signed
    raise KeyError(gamma)


@dataclass
class BPSStructure:
    Z: tuple
    active: list  # (class, omega)
    provenance: dict = field(default_factory=dict)
    t: complex = 0j
    alpha: complex = 1.0
    chamber: str = ""

    def classes(self):
        return [g for g, _ in self.active]

    def omega(self, gamma):
        return dict(self.active).get(tuple(gamma), 0)

    def to_dict(self):
        return {
            "t": [self.t.real, self.t.imag],
            "alpha": [self.alpha.real, self.alpha.imag],
            "chamber": self.chamber,
            "Z": [[z.real, z.imag] for z in self.Z],
            "active": [{"class": list(g), "omega": w, "provenance": self.provenance.get(g)}
                       for g, w in self.active],
        }


def bps_structure(t, alpha, tol=DEFAULT, saddles=None, tripods=None):
    """Active classes from the saddles and tripods of the normalized differential."""
    from .degeneration import find_saddles, find_tripods
    from .differential import PolynomialCubicDifferential
    from .walls import classify_chamber
    t = complex(t)
    alpha = complex(alpha)
    phi = PolynomialCubicDifferential.normalized(alpha, t, tol=tol)
    Z = central_charges(t, alpha)
    if saddles is None:
        saddles = find_saddles(phi, tol=tol)
    if tripods is None:
        tripods = find_tripods(phi, tol=tol)
    active = []
    prov = {}
    for kind, degs in (("saddle", saddles), ("tripod", tripods)):
        for dgn in degs:
            rep = identify_class(dgn, Z)
            dgn.lattice_class = rep
            for g in orbit_of(rep):
                for s in (1, -1):
                    c = _scale(g, s)
                    if c not in prov:
                        prov[c] = kind
                        active.append((c, 1))
    active.sort()
    try:
        chamber = classify_chamber(t, tol).label
    except Exception:
        chamber = ""
    return BPSStructure(Z, active, prov, t, alpha, chamber)


# ----------------------------------------------------------------------------
# twisted torus algebra

def _poly_mul(p, q):
    out = {}
    for a, ca in p.items():
        for b, cb in q.items():
            s = -1 if pairing(a, b) % 2 else 1
            k = _add(a, b)
            out[k] = out.get(k, 0) + s * ca * cb
    return {k: v for k, v in out.items() if v}


def _poly_add(p, q, sign=1):
    out = dict(p)
    for k, v in q.items():
        out[k] = out.get(k, 0) + sign * v
    return {k: v for k, v in out.items() if v}


def _poly_pow(p, n):
    out = {ZERO: 1}
    for _ in range(n):
        out = _poly_mul(out, p)
    return out


class TwistedRational:
    """Quotient of two finite integer combinations of twisted characters."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        num = {tuple(k): int(v) for k, v in dict(num).items() if v}
        den = {ZERO: 1} if den is None else {tuple(k): int(v) for k, v in dict(den).items() if v}
        if not den:
            raise ZeroDivisionError("zero denominator")
        self.num, self.den = self._normalize(num, den)

    @staticmethod
    def _normalize(num, den):
        if not num:
            return {}, {ZERO: 1}
        # a monomial denominator is absorbed into the numerator
        if len(den) == 1:
            (m, c), = den.items()
            inv = {_neg(m): 1}
            num = _poly_mul(num, inv)
            s = -1 if pairing(m, _neg(m)) % 2 else 1
            num = {k: v * s for k, v in num.items()}
            den = {ZERO: c}
        g = reduce(gcd, list(num.values()) + list(den.values()))
        lead = min(den)
        if den[lead] < 0:
            g = -g
        num = {k: v // g for k, v in num.items()}
        den = {k: v // g for k, v in den.items()}
        return num, den

    @classmethod
    def x(cls, gamma):
        return cls({tuple(gamma): 1})

    @classmethod
    def const(cls, c):
        return cls({ZERO: c})

    def __mul__(self, other):
        other = _coerce(other)
        return TwistedRational(_poly_mul(self.num, other.num), _poly_mul(self.den, other.den))

    __rmul__ = __mul__

    def __add__(self, other):
        other = _coerce(other)
        num = _poly_add(_poly_mul(self.num, other.den), _poly_mul(other.num, self.den))
        return TwistedRational(num, _poly_mul(self.den, other.den))

    __radd__ = __add__

    def __neg__(self):
        return TwistedRational({k: -v for k, v in self.num.items()}, self.den)

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def inverse(self):
        if not self.num:
            raise ZeroDivisionError("inverse of zero")
        return TwistedRational(self.den, self.num)

    def __truediv__(self, other):
        return self * _coerce(other).inverse()

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        return TwistedRational(_poly_pow(self.num, n), _poly_pow(self.den, n))

    def __eq__(self, other):
        other = _coerce(other)
        return _poly_mul(self.num, other.den) == _poly_mul(other.num, self.den)

    def __hash__(self):
        return hash(self.display())

    def is_zero(self):
        return not self.num

    def substitute(self, images):
        """Apply a ring map given on monomials: images(gamma) -> TwistedRational."""
        return _eval(self.num, images) / _eval(self.den, images)

    def display(self):
        """Canonical expanded form in x1..x4."""
        return _sympy_display(self)

    def __repr__(self):
        return f"TwistedRational({self.display()})"


def _coerce(v):
    if isinstance(v, TwistedRational):
        return v
    return TwistedRational.const(int(v))


def _eval(poly, images):
    total = TwistedRational({})
    for k, c in sorted(poly.items()):
        total = total + images(k) * c
    return total


def twisted_mul(a, b):
    return _coerce(a) * _coerce(b)


# ----------------------------------------------------------------------------
# display and parsing through the fixed rewriting

_SYMS = None


def _symbols():
    global _SYMS
    if _SYMS is None:
        import sympy
        _SYMS = sympy.symbols("x1 x2 x3 x4")
    return _SYMS


def _to_sympy(poly):
    import sympy
    xs = _symbols()
    expr = sympy.Integer(0)
    for n, c in poly.items():
        s = -1 if (n[0] * n[1]) % 2 else 1
        term = sympy.Integer(s * c)
        for xi, ni in zip(xs, n):
            term *= xi ** ni
        expr += term
    return expr


def to_sympy(tr):
    return _to_sympy(tr.num) / _to_sympy(tr.den)


def _sympy_display(tr):
    import sympy
    expr = sympy.cancel(sympy.together(to_sympy(tr)))
    num, den = sympy.fraction(expr)
    xs = _symbols()
    # monomial denominators are written as negative powers
    if den.is_Mul or den.is_Pow or den.is_Symbol or den.is_Integer:
        if sympy.Poly(den, *xs).is_monomial:
            return str(sympy.expand(expr))
    return f"({sympy.expand(num)})/({sympy.expand(den)})"


def parse(text):
    """Parse an expression in x1..x4 (juxtaposition is the ordinary product)."""
    import sympy
    xs = _symbols()
    expr = sympy.sympify(text, locals={f"x{i + 1}": xs[i] for i in range(4)})
    num, den = sympy.fraction(sympy.together(expr))
    return TwistedRational(_from_sympy(num), _from_sympy(den))


def _from_sympy(expr):
    import sympy
    xs = _symbols()
    expr = sympy.expand(expr)
    # clear negative powers into a monomial shift
    lo = [0] * 4
    terms = sympy.Add.make_args(expr)
    parsed = []
    for term in terms:
        c, mono = term.as_coeff_Mul()
        powers = mono.as_powers_dict()
        n = tuple(int(powers.get(x, 0)) for x in xs)
        if not c.is_Integer:
            raise ValueError("only integer coefficients are supported")
        parsed.append((n, int(c)))
    out = {}
    for n, c in parsed:
        s = -1 if (n[0] * n[1]) % 2 else 1
        out[n] = out.get(n, 0) + s * c
    return {k: v for k, v in out.items() if v}


# ----------------------------------------------------------------------------
# BPS automorphisms and sector products

def _ray_image(ray_classes, gamma):
    """S*(x_gamma) = x_gamma prod (1 - x_c)^{Omega <c, gamma>}."""
    out = TwistedRational.x(gamma)
    for c, om in ray_classes:
        k = om * pairing(c, gamma)
        if k:
            out = out * (1 - TwistedRational.x(c)) ** k
    return out


def bps_automorphism(ray_classes, target):
    """Image of x_target under the automorphism of one ray."""
    ray_classes = [(tuple(c), int(om)) for c, om in ray_classes]
    return _ray_image(ray_classes, tuple(target))


def apply_ray(ray_classes, value):
    """Pull back a TwistedRational through the automorphism of one ray."""
    cache = {}

    def img(g):
        if g not in cache:
            cache[g] = _ray_image(ray_classes, g)
        return cache[g]
    return value.substitute(img)


GENERATORS = ((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1))


def _in_sector(a, lo, hi):
    return (a - lo) % (2 * np.pi) < (hi - lo) % (2 * np.pi)


def sector_rays(bps, sector, eps=1e-9):
    """Active rays in the sector, counterclockwise, as lists of (class, Omega)."""
    lo, hi = (float(s) for s in sector)
    rays = []
    for g, om in bps.active:
        a = float(np.angle(charge_of(g, bps.Z)))
        for edge in (lo, hi):
            if abs(np.angle(np.exp(1j * (a - edge)))) < eps:
                raise BoundaryRayActive(f"class {g} lies on the sector boundary {edge}")
        if _in_sector(a, lo, hi):
            rel = (a - lo) % (2 * np.pi)
            for r in rays:
                if abs(r[0] - rel) < eps:
                    r[1].append((g, om))
                    break
            else:
                rays.append([rel, [(g, om)]])
    rays.sort(key=lambda r: r[0])
    return [r[1] for r in rays]


def sector_product(bps, sector, generators=GENERATORS):
    """Action of the counterclockwise sector product on the generators.

    With rays l_1, ..., l_k by increasing argument, x is first replaced by
    S_1*(x); then every monomial of the result is replaced by its image under
    S_2*, and so on up to S_k*.
    """
    rays = sector_rays(bps, sector)
    out = {}
    for gen in generators:
        v = TwistedRational.x(gen)
        for ray in rays:
            v = apply_ray(ray, v)
        out[gen] = v
    return out


def verify_wcf(t_left, t_right, sector, alpha=1.0, tol=DEFAULT, left=None, right=None):
    """Compare sector products on both sides of a wall exactly."""
    left = left or bps_structure(t_left, alpha, tol)
    right = right or bps_structure(t_right, alpha, tol)
    pl = sector_product(left, sector)
    pr = sector_product(right, sector)
    per = {}
    equal = True
    for i, g in enumerate(GENERATORS):
        same = pl[g] == pr[g]
        equal &= same
        per[f"x{i + 1}"] = {"left": pl[g].display(), "right": pr[g].display(), "equal": bool(same)}
    return {"equal": bool(equal), "per_generator": per,
            "left_rays": [[list(c) for c, _ in r] for r in sector_rays(left, sector)],
            "right_rays": [[list(c) for c, _ in r] for r in sector_rays(right, sector)]}


# ----------------------------------------------------------------------------
# exact pointwise evaluation

def character_value(gamma, point):
    """Value of x_gamma at a point given by the values of x1..x4 (fixed rewriting)."""
    from fractions import Fraction
    v = Fraction(-1 if (gamma[0] * gamma[1]) % 2 else 1)
    for n, p in zip(gamma, point):
        v *= Fraction(p) ** n
    return v


def _ray_point_map(ray_classes, point):
    out = []
    for i, gi in enumerate(GENERATORS):
        v = point[i]
        for c, om in ray_classes:
            k = om * pairing(c, gi)
            if k:
                v *= (1 - character_value(c, point)) ** k
        out.append(v)
    return out


def evaluate_rays(rays, point):
    """Values of the composed pullbacks of the generators at a rational point.

    Agrees with sector_product evaluated at the point; as maps of points the
    last ray acts first.
    """
    from fractions import Fraction
    p = [Fraction(v) for v in point]
    for ray in reversed(rays):
        p = _ray_point_map(ray, p)
    return p


def full_turn_rays(bps, start=None):
    """All active rays counterclockwise from a start angle carrying no class."""
    angs = sorted(float(np.angle(charge_of(g, bps.Z))) for g, _ in bps.active)
    if start is None:
        start = 0.5 * (angs[0] + angs[1]) if len(angs) > 1 else 0.0
    return sector_rays(bps, (start, start + 2 * np.pi - 1e-9))
