"""Boundary-value machinery: Hilbert transform, outer functions, line norms.

One regularized kernel is used throughout,

    K(lam, t) = 1/(lam - t) + t/(1 + t^2),

so that the phase produced by the Hilbert transform and the modulus produced
by the outer representation

    O(lam) = exp(i c) * exp((i/pi) * int K(lam, t) logmod(t) dt)

are consistent on the boundary (the Plemelj relation).  Piecewise-polynomial
and spline log-modulus data are integrated in closed form; generic callables
fall back to adaptive quadrature with a tangent compactification for
unbounded windows.  The free unimodular constant is fixed by requiring
positivity at lam = 1e3 * i.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from .errors import DomainError, PrecisionError, TailDecayError
from .poly import (
    PiecewisePoly,
    SplineCauchy,
    bump_poly,
    kernel_left_tail,
    kernel_right_tail,
)

_PHASE_REF = 1e3j
_QUAD_LIMIT = 400


# ---------------------------------------------------------------------------
# Hilbert transform (regularized harmonic conjugate)
# ---------------------------------------------------------------------------

def hilbert_transform(f, x: float, *, breakpoints=(), window=None) -> float:
    """(1/pi) PV int f(t) (1/(x - t) + t/(1 + t^2)) dt.

    ``f`` may be a PiecewisePoly (evaluated in closed form, including the
    principal value) or a real callable.  For callables, ``window`` bounds the
    support; ``window=None`` means the whole line, handled by the substitution
    t = tan(theta).  Evaluation exactly at a jump of a piecewise polynomial is
    refused; perturb x instead.
    """
    if isinstance(f, PiecewisePoly):
        return _hilbert_poly(f, x)
    return _hilbert_callable(f, x, tuple(breakpoints), window)


def _hilbert_poly(f: PiecewisePoly, x: float) -> float:
    reg = float(np.real(f.reg_moment()))
    br = f.breaks
    hit = np.where(np.abs(br - x) < 1e-13)[0]
    if not hit.size:
        # PV int f/(x - t) = -PV int f/(t - x)
        return (-float(np.real(f.cauchy_pv(x))) + reg) / math.pi

    # x sits on a knot: refuse jumps, divide out (t - x) on the adjacent pieces
    i = int(hit[0])
    left = f.coeffs[i - 1] if i > 0 else np.array([0.0])
    right = f.coeffs[i] if i < len(f.coeffs) else np.array([0.0])
    lv = float(np.real(np.polyval(left[::-1], x)))
    rv = float(np.real(np.polyval(right[::-1], x)))
    if abs(lv - rv) > 1e-12 * max(1.0, abs(lv), abs(rv)):
        raise DomainError(f"Hilbert transform evaluated at a jump of the data (x={x})")
    fx = rv if i < len(f.coeffs) else lv
    total = 0.0
    for j, c in enumerate(f.coeffs):
        a, b = br[j], br[j + 1]
        if j in (i - 1, i):
            q, _ = _divide_at(c, x)
            mom = np.array([(b ** (m + 1) - a ** (m + 1)) / (m + 1) for m in range(len(q))])
            total += float(np.real(np.dot(q, mom)))
        else:
            total += float(np.real(_pv_outside(c, a, b, x)))
    if abs(fx) > 0:
        # cutoff logs of the two adjacent pieces cancel into one finite term
        total += fx * math.log((br[i + 1] - x) / (x - br[i - 1]))
    return (-total + reg) / math.pi


def _divide_at(coeffs: np.ndarray, x: float):
    """p(t) = q(t)(t - x) + p(x); returns (q ascending, p(x))."""
    c = np.asarray(coeffs, dtype=complex)
    n = len(c)
    if n == 1:
        return np.array([0.0]), complex(c[0])
    q = np.zeros(n - 1, dtype=complex)
    rem = c[-1]
    for m in range(n - 2, -1, -1):
        q[m] = rem
        rem = c[m] + x * rem
    return q, rem


def _pv_outside(coeffs, a, b, x):
    from .poly import cauchy_poly, cauchy_poly_pv

    if a < x < b:
        return cauchy_poly_pv(np.asarray(coeffs), a, b, x)
    return cauchy_poly(np.asarray(coeffs), a, b, complex(x))


def _hilbert_callable(f, x: float, breakpoints, window) -> float:
    if window is not None:
        lo, hi = window
        theta_lo, theta_hi = math.atan(lo), math.atan(hi)
    else:
        theta_lo, theta_hi = -math.pi / 2, math.pi / 2

    def big_f(theta: float) -> float:
        t = math.tan(theta)
        return f(t) * (1.0 + x * t) / (x - t)

    theta_x = math.atan(x)
    pts = sorted({math.atan(bp) for bp in breakpoints})
    total = 0.0
    if theta_lo < theta_x < theta_hi:
        s0 = min(theta_x - theta_lo, theta_hi - theta_x, 0.3)
        # symmetric pairs absorb the odd kernel singularity
        def pair(s: float) -> float:
            return big_f(theta_x + s) + big_f(theta_x - s)

        total += quad(pair, 0.0, s0, limit=_QUAD_LIMIT, epsabs=1e-12, epsrel=1e-11)[0]
        segs = [(theta_lo, theta_x - s0), (theta_x + s0, theta_hi)]
    else:
        segs = [(theta_lo, theta_hi)]
    for a, b in segs:
        if b - a < 1e-15:
            continue
        inner = [p for p in pts if a < p < b]
        val, err = quad(big_f, a, b, points=inner or None,
                        limit=_QUAD_LIMIT, epsabs=1e-12, epsrel=1e-11)[:2]
        if not math.isfinite(val) or err > 1e-4 * max(1.0, abs(val)):
            raise PrecisionError("Hilbert transform quadrature failed to converge")
        total += val
    return total / math.pi


# ---------------------------------------------------------------------------
# Outer functions
# ---------------------------------------------------------------------------

class OuterFunction:
    """Zero-free analytic function in the upper half-plane built from boundary data.

    ``log_raw`` maps an array of upper-half-plane points to log values before
    the phase normalization; the phase constant makes the function positive at
    lam = 1e3i unless an explicit ``c`` is supplied.  The scalar-eval cache is
    idempotent under concurrent inserts.
    """

    def __init__(self, log_raw, c: float | None = None, logmod=None, meta: dict | None = None):
        self._log_raw = log_raw
        self.logmod = logmod
        self.meta = meta or {}
        if c is None:
            ref = np.atleast_1d(self._log_raw(np.array([_PHASE_REF])))[0]
            c = float(-np.imag(ref))
        self.c = c
        self._cache: dict[complex, complex] = {}

    def log_eval_many(self, lam: np.ndarray) -> np.ndarray:
        lam = np.asarray(lam, dtype=complex)
        if np.any(np.imag(lam) <= 0):
            raise DomainError("outer function defined in the open upper half-plane")
        return 1j * self.c + self._log_raw(lam)

    def eval_many(self, lam) -> np.ndarray:
        return np.exp(self.log_eval_many(np.atleast_1d(np.asarray(lam, dtype=complex))))

    def eval(self, lam: complex) -> complex:
        key = complex(lam)
        got = self._cache.get(key)
        if got is None:
            got = complex(self.eval_many(np.array([key]))[0])
            self._cache[key] = got
        return got

    def __call__(self, lam):
        lam = np.asarray(lam, dtype=complex)
        if lam.ndim == 0:
            return self.eval(complex(lam))
        return self.eval_many(lam)

    def star(self, lam):
        """gamma_*(lam) = conj(gamma(conj(lam))), defined for Im lam < 0."""
        lam = np.asarray(lam, dtype=complex)
        if np.any(np.imag(np.atleast_1d(lam)) >= 0):
            raise DomainError("the star evaluator lives in the lower half-plane")
        return np.conj(self(np.conj(lam)))


def outer_from_logmod(logmod, c: float | None = None, *, breakpoints=(),
                      window=None) -> OuterFunction:
    """Outer function with prescribed boundary log-modulus.

    ``logmod`` is a PiecewisePoly (closed-form evaluation), a SplineCauchy, or
    a real callable; callables use adaptive quadrature over ``window`` (the
    whole line when None, via t = tan(theta)).  Raises if the weighted tail
    integral fails to converge.
    """
    if isinstance(logmod, PiecewisePoly):
        reg = complex(logmod.reg_moment())

        def log_raw(lam: np.ndarray) -> np.ndarray:
            return (1j / math.pi) * (-logmod.cauchy(lam) + reg)

        return OuterFunction(log_raw, c, logmod=logmod)

    if isinstance(logmod, SplineCauchy):
        reg = logmod.reg_moment()

        def log_raw(lam: np.ndarray) -> np.ndarray:
            return (1j / math.pi) * (-logmod.cauchy(lam) + reg)

        return OuterFunction(log_raw, c, logmod=logmod)

    if callable(logmod):
        return _outer_from_callable(logmod, c, tuple(breakpoints), window)

    raise DomainError("unsupported log-modulus representation")


def _outer_from_callable(fn, c, breakpoints, window) -> OuterFunction:
    if window is not None:
        th_lo, th_hi = math.atan(window[0]), math.atan(window[1])
    else:
        th_lo, th_hi = -math.pi / 2, math.pi / 2
    pts = sorted({math.atan(bp) for bp in breakpoints})

    def window_kernel(lam: complex) -> complex:
        """int_window K(lam, t) dt in closed form."""
        if window is None:
            return -1j * math.pi
        a, b = window
        anti = lambda t: -np.log(lam - t) + 0.5 * math.log(1.0 + t * t)
        return anti(b) - anti(a)

    def kernel_integral(lam: complex) -> complex:
        re, im = float(np.real(lam)), float(np.imag(lam))
        # near the axis inside the window: subtract the boundary value so the
        # integrand stays bounded through the kernel spike
        shift = 0.0
        if abs(im) < 0.05 and (window is None or window[0] < re < window[1]):
            shift = fn(re)

        def integrand(theta: float) -> complex:
            t = math.tan(theta)
            return (fn(t) - shift) * (1.0 + lam * t) / (lam - t)

        inner = list(pts)
        if abs(im) < 1.0 and th_lo < math.atan(re) < th_hi:
            inner = sorted(set(inner) | {math.atan(re)})
        val, err = quad(integrand, th_lo, th_hi, points=inner or None,
                        complex_func=True, limit=_QUAD_LIMIT,
                        epsabs=1e-12, epsrel=1e-11)[:2]
        if not np.isfinite(val) or abs(err) > 1e-3 * max(1.0, abs(val)):
            raise PrecisionError(
                "outer representation integral diverges; log-modulus not integrable "
                "against (1+t^2)^{-1}"
            )
        if shift:
            val += shift * window_kernel(lam)
        return val

    def log_raw(lam: np.ndarray) -> np.ndarray:
        return np.array([(1j / math.pi) * kernel_integral(complex(z)) for z in np.atleast_1d(lam)])

    return OuterFunction(log_raw, c, logmod=fn)


# ---------------------------------------------------------------------------
# Herglotz bumps (the beta builder)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HerglotzBump:
    """Cauchy transform of a nonnegative C^1 bump supported on a finite union.

    beta(lam) = int b(k)/(k - lam) dk is Herglotz in the upper half-plane and
    continues analytically across the complement of the support; the boundary
    jump is 2*pi*i*b(k).
    """

    bump: PiecewisePoly

    def __call__(self, lam):
        return self.bump.cauchy(lam)

    def star(self, lam):
        """Continuation to the lower half-plane: the same Cauchy integral."""
        return self.bump.cauchy(lam)

    def boundary_imag(self, x) -> np.ndarray:
        """Nontangential limit of Im beta on the axis: pi * b(x)."""
        return math.pi * np.real(self.bump(x))

    def beta0(self, x) -> np.ndarray:
        """Strong limit of beta(A + i eps) - beta_*(A - i eps): 2*pi*i*b."""
        return 2j * math.pi * np.real(self.bump(x))

    def jump(self, x, eps: float) -> np.ndarray:
        """beta(x + i eps) - beta_*(x - i eps) = 2i Im beta(x + i eps)."""
        lam = np.asarray(x, dtype=complex) + 1j * eps
        return 2j * np.imag(self.bump.cauchy(lam))


def beta_eval(bump: PiecewisePoly | HerglotzBump, lam):
    """beta(lam) = int b(k)/(k - lam) dk for Im lam > 0 (mirror via .star)."""
    b = bump.bump if isinstance(bump, HerglotzBump) else bump
    lam_arr = np.atleast_1d(np.asarray(lam, dtype=complex))
    if np.any(np.imag(lam_arr) <= 0):
        raise DomainError("beta_eval is the upper-half-plane evaluator")
    return b.cauchy(lam)


def build_bump(intervals: list[tuple[float, float]], shape: int = 2,
               amplitude: float = 1.0) -> HerglotzBump:
    """C^1 polynomial bump on a finite union of disjoint intervals."""
    if not intervals:
        raise DomainError("bump support must be a nonempty union of intervals")
    if shape < 2:
        raise DomainError("shape exponent >= 2 is needed for a C^1 bump")
    ivs = sorted((float(a), float(b)) for a, b in intervals)
    for (a1, b1), (a2, b2) in zip(ivs, ivs[1:]):
        if b1 >= a2:
            raise DomainError("bump intervals must be disjoint")
    knots = [ivs[0][0]]
    pieces = []
    for i, (a, b) in enumerate(ivs):
        if knots[-1] < a:
            knots.append(a)
            pieces.append(np.array([0.0]))
        single = bump_poly(a, b, shape, amplitude)
        knots.append(b)
        pieces.append(single.coeffs[0])
    return HerglotzBump(PiecewisePoly(np.array(knots), tuple(pieces)))


# ---------------------------------------------------------------------------
# C^1 extension
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class C1Extension:
    """phi on [x0, inf) extended to the line: cubic Hermite blend down to a constant."""

    phi: object
    x0: float
    margin: float
    value0: float
    slope0: float

    def blend_poly(self) -> PiecewisePoly:
        """The Hermite blend on [x0 - m, x0] as a global-power cubic."""
        m, x0 = self.margin, self.x0
        # h(s) = s (s + m)^2 / m^2 in s = t - x0;  p = value0 + slope0 * h
        s_poly = np.array([-x0, 1.0])
        sm = np.array([m - x0, 1.0])
        cub = np.convolve(s_poly, np.convolve(sm, sm)) / (m * m)
        coeffs = self.slope0 * cub
        coeffs[0] += self.value0
        return PiecewisePoly(np.array([x0 - m, x0]), (coeffs,))

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        t = np.atleast_1d(t)
        out = np.empty(t.shape, dtype=float)
        left = t <= self.x0 - self.margin
        mid = (~left) & (t < self.x0)
        right = t >= self.x0
        out[left] = self.value0
        if np.any(mid):
            out[mid] = np.real(self.blend_poly()(t[mid]))
        if np.any(right):
            out[right] = np.real(np.asarray(self.phi(t[right]), dtype=float))
        return float(out[0]) if scalar else out


def c1_extension(phi, x0: float, margin: float, slope0: float | None = None) -> C1Extension:
    """Extend phi from [x0, inf) to the line, C^1 across both knots.

    The extension equals phi exactly on [x0, inf), blends through a cubic
    Hermite on [x0 - margin, x0], and is the constant phi(x0) to the left.
    ``slope0`` overrides the numerically differentiated slope at x0.
    """
    if margin <= 0:
        raise DomainError("extension margin must be positive")
    v0 = float(phi(x0))
    if slope0 is None:
        h = 1e-6 * max(1.0, abs(x0))
        slope0 = float((-3 * phi(x0) + 4 * phi(x0 + h) - phi(x0 + 2 * h)) / (2 * h))
    return C1Extension(phi, float(x0), float(margin), v0, float(slope0))


# ---------------------------------------------------------------------------
# Line traces and H^p line norms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LineTrace:
    """Samples of an analytic function on the horizontal line Im lam = eps."""

    eps: float
    xs: np.ndarray
    values: np.ndarray
    tail_exponent: float

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=float)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "values", np.asarray(self.values, dtype=complex))
        dx = np.diff(xs)
        if len(xs) < 8 or np.any(dx <= 0) or np.max(dx) - np.min(dx) > 1e-9 * np.mean(dx):
            raise DomainError("line trace grid must be uniform and increasing")
        if len(self.values) != len(xs):
            raise DomainError("trace values must match the grid")


@dataclass(frozen=True)
class LineNormResult:
    norm: float
    window_part: float
    tail_part: float
    tail_divergent: bool


def line_norm(trace: LineTrace, p: int) -> float:
    return line_norm_detailed(trace, p).norm


def line_norm_detailed(trace: LineTrace, p: int) -> LineNormResult:
    """L^p norm on the line: composite Simpson over the window + analytic tail.

    The declared tail exponent q (|f| ~ C|x|^{-q}) must satisfy q > 1/2 for
    p = 2 and q >= 1 for p = 1; at p*q == 1 the tail is log-divergent and only
    the window part is returned, flagged.  The tail constant is estimated from
    the outermost samples.
    """
    if p not in (1, 2):
        raise DomainError("line norms support p in {1, 2}")
    q = trace.tail_exponent
    if p == 1 and q < 1.0:
        raise TailDecayError(f"L^1 line norm needs tail exponent >= 1, declared {q}")
    if p == 2 and q <= 0.5:
        raise TailDecayError(f"L^2 line norm needs tail exponent > 1/2, declared {q}")
    absv = np.abs(trace.values) ** p
    window = float(_simpson(absv, trace.xs))
    divergent = p * q <= 1.0
    tail = 0.0
    if not divergent:
        edge = 5
        c_left = float(np.mean(absv[:edge] * np.abs(trace.xs[:edge]) ** (p * q)))
        c_right = float(np.mean(absv[-edge:] * np.abs(trace.xs[-edge:]) ** (p * q)))
        t_lo, t_hi = abs(trace.xs[0]), abs(trace.xs[-1])
        tail = (c_left * t_lo ** (1 - p * q) + c_right * t_hi ** (1 - p * q)) / (p * q - 1)
    total = window + tail
    return LineNormResult(total ** (1.0 / p), window, tail, divergent)


def _simpson(y: np.ndarray, x: np.ndarray) -> float:
    from scipy.integrate import simpson

    return float(simpson(y, x=x))
