"""Polynomial cubic differentials and the flat-geometry primitives built on them.

Every differential is handled through a *working chart* in which it reads
P(u) du^3 with P a polynomial and the only pole sitting at u = oo.  For a
polynomial differential this chart is the identity.  For the normalized
degree-3 family alpha x(x-1)/(x-t)^9 dx^3 it is u = 1/(x - t), where the
differential becomes -alpha u (1 + t u)(1 + (t-1) u) du^3 and the zero at
x = oo is the ordinary simple zero u = 0.
"""
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT
from .errors import BranchAmbiguity, MultipleZero, QuadratureStall, ConfigError

PI3 = np.pi / 3
OMEGA = np.exp(2j * np.pi / 3)
INF = complex(np.inf, 0.0)


def reduce_phase(theta):
    """Reduce an angle into [0, pi/3)."""
    r = float(theta) % PI3
    if PI3 - r < 1e-15:
        r = 0.0
    return r


def phase_distance(a, b):
    """Cyclic distance between two phases on R/(pi/3)Z."""
    d = (a - b) % PI3
    return min(d, PI3 - d)


def figure_phase_offset(phi):
    """Shift from engine phases to the phases quoted with published figures.

    For the normalized family the figures measure phases as if alpha were
    real and negative: theta_figure = theta + (pi - arg alpha)/3 mod pi/3.
    Generic polynomials have no offset.
    """
    if getattr(phi, "form", None) != "NormalizedDegree3":
        return 0.0
    return (np.pi - float(np.angle(phi.alpha))) / 3


@dataclass(frozen=True)
class Phase:
    theta: float

    def __post_init__(self):
        object.__setattr__(self, "theta", reduce_phase(self.theta))

    def __float__(self):
        return self.theta


def horner(desc, x):
    """Evaluate a polynomial with coefficients in descending order at a scalar."""
    v = 0j
    for c in desc:
        v = v * x + c
    return v


def _polish_root(asc, r, tol):
    p = np.polynomial.polynomial
    d = p.polyder(asc)
    for _ in range(50):
        f = p.polyval(r, asc)
        fp = p.polyval(r, d)
        if fp == 0:
            break
        step = f / fp
        r = r - step
        if abs(step) <= tol * max(1.0, abs(r)):
            break
    return complex(r)


class PolynomialCubicDifferential:
    """phi = P(x) dx^3 (GenericPolynomial) or alpha x(x-1)/(x-t)^9 dx^3 (NormalizedDegree3)."""

    def __init__(self, form, coefficients=None, alpha=None, t=None, tol=DEFAULT):
        self.form = form
        self.tol = tol
        if form == "GenericPolynomial":
            c = np.trim_zeros(np.asarray(coefficients, dtype=complex), "b")
            if c.size == 0:
                raise ConfigError("zero polynomial")
            self.coefficients = c
            self.alpha = None
            self.t = None
            self.coeffs = c
            self.degree = c.size - 1
            roots = np.roots(c[::-1]) if self.degree >= 1 else np.zeros(0, complex)
            roots = np.array([_polish_root(c, r, tol.root_tol) for r in roots], dtype=complex)
            order = np.lexsort((roots.imag, roots.real))
            self.work_zeros = roots[order]
            self.labels = [f"z{i}" for i in range(self.degree)]
        elif form == "NormalizedDegree3":
            alpha = complex(alpha)
            t = complex(t)
            if alpha == 0:
                raise ConfigError("alpha must be nonzero")
            if abs(t) < 1e-14 or abs(t - 1) < 1e-14:
                raise ConfigError("t must avoid 0 and 1")
            self.alpha = alpha
            self.t = t
            self.coefficients = None
            self.degree = 3
            # -alpha u (1 + t u)(1 + (t-1) u), ascending in u
            self.coeffs = -alpha * np.array([0, 1, 2 * t - 1, t * (t - 1)], dtype=complex)
            self.work_zeros = np.array([-1 / t, 1 / (1 - t), 0j], dtype=complex)
            self.labels = ["0", "1", "inf"]
        else:
            raise ConfigError(f"unknown form {form!r}")
        self._check_simple()
        z = self.work_zeros
        if z.size >= 2:
            self.scale = float(max(abs(a - b) for i, a in enumerate(z) for b in z[i + 1:]))
        elif z.size == 1:
            self.scale = max(1.0, abs(z[0]))
        else:
            self.scale = 1.0
        self.center = complex(z.mean()) if z.size else 0j
        self.lead = complex(self.coeffs[-1])
        self.flat_scale = abs(self.lead) ** (1 / 3) * self.scale ** ((self.degree + 3) / 3)

    # construction helpers
    @classmethod
    def polynomial(cls, coefficients, tol=DEFAULT):
        return cls("GenericPolynomial", coefficients=coefficients, tol=tol)

    @classmethod
    def normalized(cls, alpha, t, tol=DEFAULT):
        return cls("NormalizedDegree3", alpha=alpha, t=t, tol=tol)

    @classmethod
    def from_spec(cls, spec, tol=DEFAULT):
        """Parse {"poly": [[re, im], ...]} or {"alpha": [re, im], "t": [re, im]}."""
        def cx(v):
            if isinstance(v, (list, tuple)):
                if len(v) != 2:
                    raise ConfigError(f"complex must be [re, im], got {v!r}")
                return complex(float(v[0]), float(v[1]))
            return complex(v)
        if "poly" in spec:
            return cls.polynomial([cx(v) for v in spec["poly"]], tol=tol)
        if "t" in spec:
            return cls.normalized(cx(spec.get("alpha", [1, 0])), cx(spec["t"]), tol=tol)
        raise ConfigError("differential spec needs 'poly' or 't'")

    def to_spec(self):
        if self.form == "GenericPolynomial":
            return {"poly": [[c.real, c.imag] for c in self.coefficients]}
        return {"alpha": [self.alpha.real, self.alpha.imag], "t": [self.t.real, self.t.imag]}

    def _check_simple(self):
        z = self.work_zeros
        if z.size < 2:
            return
        size = max(1.0, float(np.max(np.abs(z))))
        for i in range(z.size):
            for j in range(i + 1, z.size):
                if abs(z[i] - z[j]) < self.tol.multiple_zero_rel * size:
                    raise MultipleZero(f"zero of multiplicity > 1 near {z[i]}")

    # charts
    def to_native(self, u):
        """Working-chart point(s) to the native x-plane."""
        if self.form == "GenericPolynomial":
            return u
        u = np.asarray(u, dtype=complex)
        with np.errstate(divide="ignore", invalid="ignore"):
            x = self.t + 1 / u
        x = np.where(u == 0, INF, x)
        return x if x.ndim else complex(x)

    def from_native(self, x):
        if self.form == "GenericPolynomial":
            return x
        x = np.asarray(x, dtype=complex)
        with np.errstate(divide="ignore", invalid="ignore"):
            u = 1 / (x - self.t)
        u = np.where(np.isinf(x), 0j, u)
        return u if u.ndim else complex(u)

    def native_direction(self, u, du):
        """Push a working-chart tangent direction at u to the native chart (unit)."""
        if self.form == "GenericPolynomial" or u == 0:
            return du / abs(du)
        v = -du / (u * u)
        return v / abs(v)

    def zero_index(self, zero):
        """Index of a zero given by label, index, or native location."""
        if isinstance(zero, (int, np.integer)):
            return int(zero)
        if isinstance(zero, str):
            return self.labels.index(zero)
        z = complex(zero)
        if np.isinf(z.real) or np.isinf(z.imag):
            return self.labels.index("inf")
        w = self.from_native(z)
        k = int(np.argmin(np.abs(self.work_zeros - w)))
        if abs(self.work_zeros[k] - w) > 1e-8 * max(1.0, self.scale):
            raise ValueError(f"{zero} is not a zero")
        return k

    def rotated_coeffs(self, theta):
        return self.coeffs * np.exp(-3j * theta)

    def desc(self, theta=0.0):
        """Descending coefficients of the rotated working polynomial."""
        return self.rotated_coeffs(theta)[::-1].copy()

    def __repr__(self):
        if self.form == "GenericPolynomial":
            return f"PolynomialCubicDifferential(poly={list(self.coefficients)})"
        return f"PolynomialCubicDifferential(alpha={self.alpha}, t={self.t})"


def rotate(phi, theta):
    """Return e^{-3i theta} phi."""
    theta = float(theta)
    f = np.exp(-3j * theta)
    if phi.form == "GenericPolynomial":
        return PolynomialCubicDifferential.polynomial(phi.coefficients * f, tol=phi.tol)
    return PolynomialCubicDifferential.normalized(phi.alpha * f, phi.t, tol=phi.tol)


def zeros(phi):
    """Zeros of phi in the native chart with multiplicities."""
    if phi.degree < 1:
        return []
    if phi.form == "NormalizedDegree3":
        return [(0j, 1), (1 + 0j, 1), (INF, 1)]
    return [(complex(z), 1) for z in phi.work_zeros]


@dataclass(frozen=True)
class CubeRootBranch:
    base_point: complex
    value: complex
    coeffs: tuple  # descending coefficients of the rotated working polynomial


def make_branch(phi, point, theta=0.0, value=None):
    """Branch of (e^{-3i theta} P)^{1/3} at point; principal root unless value is given."""
    desc = tuple(phi.desc(theta))
    g = horner(desc, point)
    if value is None:
        value = g ** (1 / 3) if g != 0 else 0j
    return CubeRootBranch(complex(point), complex(value), desc)


def continue_branch(branch, next_point, margin=DEFAULT.branch_margin):
    """Continue a cube-root branch to next_point by the nearest-candidate rule."""
    g = horner(branch.coeffs, next_point)
    if g == 0:
        raise BranchAmbiguity("continuation onto a zero")
    c0 = g ** (1 / 3)
    cands = (c0, c0 * OMEGA, c0 * OMEGA.conjugate())
    d = [abs(c - branch.value) for c in cands]
    k = int(np.argmin(d))
    sep = abs(c0) * np.sqrt(3)
    if d[k] >= margin * sep:
        raise BranchAmbiguity(f"branch jump {d[k]:.3e} vs separation {sep:.3e}")
    return CubeRootBranch(complex(next_point), complex(cands[k]), branch.coeffs)


def work_critical_directions(phi, k_zero, theta):
    """Critical directions at a working-chart zero: list of (angle, unit, sign)."""
    a = phi.work_zeros[k_zero]
    desc = phi.desc(theta)
    gp = horner(np.polyder(desc), a)
    base = np.angle(gp)
    out = []
    for k in range(8):
        psi = (k * np.pi - base) / 4
        out.append((psi, np.exp(1j * psi), 1 if k % 2 == 0 else -1))
    return out


def critical_directions(phi, zero, theta=0.0):
    """The 8 critical directions at a simple zero, counterclockwise, alternating sign.

    Directions are expressed in the native chart for finite zeros and in the
    chart u = 1/(x - c) for the zero at infinity.
    """
    theta = float(theta)
    k = phi.zero_index(zero)
    a = phi.work_zeros[k]
    dirs = work_critical_directions(phi, k, theta)
    out = [(phi.native_direction(a, e), s) for _, e, s in dirs]
    # sort counterclockwise starting from the first direction; orientation is preserved
    return out


def gauss_bonnet_residual(corner_angles, interior_orders=()):
    """Sum of corner angles minus ((k-2) pi - (2 pi/3) sum a_i)."""
    k = len(corner_angles)
    return float(sum(corner_angles) - ((k - 2) * np.pi - 2 * np.pi / 3 * sum(interior_orders)))


# ----------------------------------------------------------------------------
# branch continuation along straight segments and segment integrals

def branch_ratio(zeros_arr, ref, xs):
    """(g(xs)/g(ref))^{1/3} continued along straight segments from ref to xs."""
    xs = np.asarray(xs, dtype=complex)
    f = np.ones_like(xs)
    with np.errstate(divide="ignore", invalid="ignore"):
        for z in zeros_arr:
            f = f * np.exp(np.log((xs - z) / (ref - z)) / 3)
    return np.where(np.isnan(f), 0, f)


_GL_CACHE = {}


def _gl(n):
    if n not in _GL_CACHE:
        x, w = np.polynomial.legendre.leggauss(n)
        _GL_CACHE[n] = ((x + 1) / 2, w / 2)
    return _GL_CACHE[n]


def gl_integrate(f, a=0.0, b=1.0, rel=DEFAULT.quad_rel, abs_tol=0.0, max_depth=DEFAULT.quad_max_refine, n=16):
    """Adaptive composite Gauss-Legendre for a vectorized complex integrand.

    Returns (value, error estimate).  Each panel is accepted when a single
    n-point rule agrees with the rule on its two halves.
    """
    x, w = _gl(n)

    def rule(lo, hi):
        h = hi - lo
        return h * np.dot(w, f(lo + h * x))

    total = rule(a, b)
    stack = [(a, b, total, 0)]
    value = 0j
    err = 0.0
    scale = abs(total)
    while stack:
        lo, hi, est, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        left = rule(lo, mid)
        right = rule(mid, hi)
        refined = left + right
        e = abs(refined - est)
        scale = max(scale, abs(refined))
        width = abs(hi - lo) / abs(b - a) if b != a else 1.0
        if e <= max(rel * scale, abs_tol) * max(width, 1e-3) or e == 0:
            value += refined
            err += e
            continue
        if depth >= max_depth:
            raise QuadratureStall(f"quadrature stalled on [{lo}, {hi}]")
        stack.append((lo, mid, left, depth + 1))
        stack.append((mid, hi, right, depth + 1))
    return complex(value), float(err)


def segment_integral(zeros_arr, p, q, b_ref, ref, p_zero=False, q_zero=False, rel=DEFAULT.quad_rel):
    """Integral of the continued branch along the straight segment [p, q].

    The branch equals b_ref at ref, a point of the segment (or an endpoint that
    is not a zero).  Endpoints flagged as zeros are handled by the substitution
    x = end + (mid - end) s^3, which makes the integrand smooth.
    Returns (value, error estimate).
    """
    p = complex(p)
    q = complex(q)
    if p == q:
        return 0j, 0.0
    m = 0.5 * (p + q)
    b_m = b_ref * complex(branch_ratio(zeros_arr, ref, np.array([m]))[0]) if ref != m else b_ref

    def half(end, is_zero):
        # integral from m to end
        d = end - m
        if is_zero:
            # the factor of the endpoint zero is exactly s; taking it out avoids
            # the cancellation in xs - end close to the zero
            zs = np.asarray(zeros_arr, dtype=complex)
            others = np.delete(zs, int(np.argmin(np.abs(zs - end)))) if len(zs) else zs

            def f(s):
                xs = end - d * s ** 3
                return branch_ratio(others, m, xs) * 3 * s ** 3
            v, e = gl_integrate(f, 0.0, 1.0, rel=rel)
            # dx = -3 d s^2 ds and the limits run from s=1 (at m) to s=0 (at end)
            return d * v * b_m, e * abs(d * b_m)
        def f(s):
            xs = m + d * s
            return branch_ratio(zeros_arr, m, xs)
        v, e = gl_integrate(f, 0.0, 1.0, rel=rel)
        return d * v * b_m, e * abs(d * b_m)

    v1, e1 = half(q, q_zero)
    v0, e0 = half(p, p_zero)
    return v1 - v0, e0 + e1
