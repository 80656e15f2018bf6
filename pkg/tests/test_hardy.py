import math

import numpy as np
import pytest
import scipy.integrate as si

from singspec.errors import DomainError, TailDecayError
from singspec.hardy import (
    LineTrace,
    beta_eval,
    build_bump,
    c1_extension,
    hilbert_transform,
    line_norm,
    line_norm_detailed,
    outer_from_logmod,
)
from singspec.poly import PiecewisePoly, bump_poly


# -- Hilbert transform -------------------------------------------------------

def test_hilbert_zero():
    zero = PiecewisePoly.constant(0.0, -1.0, 1.0)
    for x in (0.5, 5.0, -3.0):
        assert hilbert_transform(zero, x) == 0.0


def test_hilbert_indicator_closed_form():
    chi = PiecewisePoly.constant(1.0, -1.0, 1.0)
    got = hilbert_transform(chi, 2.0)
    assert got == pytest.approx(math.log(3.0) / math.pi, abs=1e-12)
    # adaptive principal-value quadrature oracle (symmetric-pair form unused:
    # the singular point lies outside the support here)
    oracle = si.quad(lambda t: (1 / (2 - t) + t / (1 + t * t)) / math.pi, -1, 1)[0]
    assert got == pytest.approx(oracle, rel=1e-10)


def test_hilbert_interior_pv():
    chi = PiecewisePoly.constant(1.0, -1.0, 1.0)
    x = 0.3
    got = hilbert_transform(chi, x)
    assert got == pytest.approx(math.log((1 + x) / (1 - x)) / math.pi, rel=1e-12)


def test_hilbert_even_function_antisymmetry():
    # even data: PV part is odd and the regularizer integral vanishes
    tent = PiecewisePoly(np.array([-1.0, 0.0, 1.0]),
                         (np.array([1.0, 1.0]), np.array([1.0, -1.0])))
    reg = float(np.real(tent.reg_moment()))
    assert reg == pytest.approx(0.0, abs=1e-15)
    for x in (0.4, 1.7, 3.0):
        s = hilbert_transform(tent, x) + hilbert_transform(tent, -x)
        assert s == pytest.approx(2.0 * reg / math.pi, abs=1e-12)


def test_hilbert_jump_error():
    chi = PiecewisePoly.constant(1.0, -1.0, 1.0)
    with pytest.raises(DomainError, match="jump"):
        hilbert_transform(chi, 1.0)


def test_hilbert_continuous_knot_ok():
    tent = PiecewisePoly(np.array([-1.0, 0.0, 1.0]),
                         (np.array([1.0, 1.0]), np.array([1.0, -1.0])))
    got = hilbert_transform(tent, 0.0)
    xs = 1e-6
    near = hilbert_transform(tent, xs)
    assert got == pytest.approx(near, abs=1e-4)


def test_hilbert_callable_matches_poly():
    bump = bump_poly(-1.0, 1.0, 2)
    for x in (0.25, 2.5):
        exact = hilbert_transform(bump, x)
        via_quad = hilbert_transform(lambda t: float(np.real(bump(t))), x,
                                     window=(-1.0, 1.0))
        assert via_quad == pytest.approx(exact, abs=1e-9)


# -- outer functions ---------------------------------------------------------

def test_outer_trivial():
    outer = outer_from_logmod(PiecewisePoly.constant(0.0, -1.0, 1.0), c=0.0)
    for lam in (1j, 0.3 + 0.5j, -2 + 4j):
        assert outer.eval(lam) == pytest.approx(1.0)


def test_outer_rational_roundtrip():
    logmod = lambda t: 0.5 * math.log((t * t + 1) / (t * t + 4))
    outer = outer_from_logmod(logmod)
    target = lambda lam: (lam + 1j) / (lam + 2j)
    assert abs(outer.eval(1j)) == pytest.approx(2.0 / 3.0, abs=1e-6)
    for lam in (1j, 0.5 + 0.25j, -2 + 3j, 4 + 0.5j):
        assert outer.eval(lam) == pytest.approx(target(lam), rel=1e-6)


def test_outer_compact_logmod_far_field():
    data = bump_poly(-1.0, 1.0, 2, -0.8)  # negative bump: modulus dips below 1
    outer = outer_from_logmod(data)
    assert abs(abs(outer.eval(1e4j)) - 1.0) < 1e-3


def test_outer_roundtrip_nontrivial_phase():
    """Reconstruct exp(Cauchy transform of a bump) from its boundary modulus."""
    g = build_bump([(-1.0, 0.5)], shape=2, amplitude=0.4)
    target = lambda lam: np.exp(g.bump.cauchy(lam))
    logmod = lambda t: float(np.real(g.bump.cauchy_pv(t)))
    outer = outer_from_logmod(logmod, breakpoints=(-1.0, 0.5))
    rng = np.random.default_rng(3)
    pts = rng.uniform(-3, 3, 8) + 1j * rng.uniform(0.3, 2.0, 8)
    for lam in pts:
        got, want = outer.eval(lam), target(complex(lam))
        assert abs(got - want) / abs(want) < 1e-6


def test_outer_plemelj_phase_modulus_consistency():
    logmod = lambda t: 0.5 * math.log((t * t + 1) / (t * t + 4))
    outer = outer_from_logmod(logmod)
    for x in (-1.5, 0.0, 2.2):
        phase = np.angle(outer.eval(x + 1e-6j))
        conj = hilbert_transform(logmod, x)
        assert phase - outer.c - conj == pytest.approx(0.0, abs=1e-5)


def test_outer_domain_errors():
    outer = outer_from_logmod(PiecewisePoly.constant(0.0, -1.0, 1.0))
    with pytest.raises(DomainError):
        outer.eval(-1j)
    with pytest.raises(DomainError):
        outer.star(1j)
    with pytest.raises(DomainError):
        outer_from_logmod(42)


# -- Herglotz bumps ----------------------------------------------------------

def test_beta_zero_bump():
    zero = PiecewisePoly.constant(0.0, -1.0, 1.0)
    assert beta_eval(zero, 2j) == 0.0


def test_beta_poisson_limit():
    b = build_bump([(-1.0, 1.0)], shape=2)
    assert np.real(b.bump(np.array(0.0))) == pytest.approx(1.0)
    got = np.imag(beta_eval(b, 0 + 1e-4j))
    assert abs(got - math.pi) < 1e-3


def test_beta_positive_imag_upper_half():
    b = build_bump([(-1.0, 1.0)], shape=3)
    assert np.imag(beta_eval(b, 2j)) > 0
    rng = np.random.default_rng(5)
    lam = rng.uniform(-4, 4, 20) + 1j * rng.uniform(0.05, 5, 20)
    assert np.all(np.imag(b.bump.cauchy(lam)) > 0)


def test_beta_c1_endpoints():
    b = build_bump([(-1.0, 1.0)], shape=2)
    assert np.real(b.bump(np.array(1.0))) == pytest.approx(0.0, abs=1e-14)
    h = 1e-7
    deriv = (np.real(b.bump(np.array(1.0))) - np.real(b.bump(np.array(1.0 - h)))) / h
    assert abs(deriv) < 1e-5


def test_beta_continuation_off_support():
    b = build_bump([(-1.0, 1.0)], shape=2)
    for x in (1.5, -2.0, 10.0):
        for eps in (1e-2, 1e-4):
            jump = b.bump.cauchy(x + 1j * eps) - b.star(x - 1j * eps)
            assert abs(jump) < 4 * math.pi * eps / min((x - 1) ** 2, (x + 1) ** 2, 1)


def test_beta_jump_equals_imag_part():
    b = build_bump([(0.0, 2.0)], shape=2)
    x, eps = 1.2, 1e-3
    jump = b.jump(np.array([x]), eps)[0]
    assert jump == pytest.approx(2j * np.imag(b.bump.cauchy(x + 1j * eps)))
    assert b.beta0(np.array([x]))[0] == pytest.approx(2j * math.pi * np.real(b.bump(x)))


def test_bump_builder_validation():
    with pytest.raises(DomainError):
        build_bump([])
    with pytest.raises(DomainError):
        build_bump([(0.0, 1.0)], shape=1)
    with pytest.raises(DomainError):
        build_bump([(0.0, 1.0), (0.5, 2.0)])


# -- C^1 extension -----------------------------------------------------------

def test_extension_constant():
    ext = c1_extension(lambda t: np.full_like(np.asarray(t, dtype=float), 5.0), 0.0, 1.0)
    for t in (-10.0, -1.0, -0.3, 0.0, 7.0):
        assert ext(t) == pytest.approx(5.0)


def test_extension_linear_blend():
    ext = c1_extension(lambda t: np.asarray(t, dtype=float), 0.0, 1.0)
    assert ext(-1.0) == pytest.approx(0.0)     # the blend constant is phi(0)
    assert ext(2.0) == pytest.approx(2.0)      # exact on the right
    blend = ext.blend_poly()
    dpoly = np.polyder(np.asarray(blend.coeffs[0], dtype=float)[::-1])
    # derivative continuity at both knots, to 1e-10
    assert np.polyval(dpoly, 0.0) == pytest.approx(1.0, abs=1e-10)
    assert np.polyval(dpoly, -1.0) == pytest.approx(0.0, abs=1e-10)


def test_extension_c1_scan():
    ext = c1_extension(lambda t: np.sin(np.asarray(t, dtype=float)), 0.0, 0.7)
    ts = np.linspace(-1.5, 1.5, 3001)
    vals = np.array([ext(t) for t in ts])
    d2 = np.diff(vals, 2)
    # second differences stay bounded: no derivative jump anywhere
    assert np.max(np.abs(d2)) < 5 * (ts[1] - ts[0]) ** 2 * 10


def test_extension_margin_error():
    with pytest.raises(DomainError):
        c1_extension(lambda t: t, 0.0, 0.0)


# -- line traces and norms ---------------------------------------------------

def _trace(eps, f, tail_q, half=50.0, n=2**14):
    xs = np.linspace(-half, half, n)
    return LineTrace(eps, xs, f(xs + 1j * eps), tail_q)


def test_line_norm_zero():
    tr = _trace(0.01, lambda lam: np.zeros(lam.shape, dtype=complex), 1.0)
    assert line_norm(tr, 1) == 0.0
    assert line_norm(tr, 2) == 0.0


def test_line_norm_lorentzian():
    eps, sigma = 0.01, 1.0
    tr = _trace(eps, lambda lam: 1.0 / (lam - (0 - 1j * sigma)), 1.0)
    want = math.sqrt(math.pi / (eps + sigma))
    assert line_norm(tr, 2) == pytest.approx(want, rel=0.01)


def test_line_norm_homogeneity():
    tr = _trace(0.01, lambda lam: 1.0 / (lam + 2j), 1.0)
    tr2 = LineTrace(tr.eps, tr.xs, 2.0 * tr.values, tr.tail_exponent)
    assert line_norm(tr2, 2) == pytest.approx(2.0 * line_norm(tr, 2), rel=1e-12)
    assert line_norm(tr2, 1) == pytest.approx(2.0 * line_norm(tr, 1), rel=1e-12)


def test_line_norm_tail_gates():
    tr = _trace(0.01, lambda lam: 1.0 / (lam + 2j), 0.4)
    with pytest.raises(TailDecayError):
        line_norm(tr, 2)
    with pytest.raises(TailDecayError):
        line_norm(tr, 1)
    marginal = _trace(0.01, lambda lam: 1.0 / (lam + 2j), 1.0)
    detail = line_norm_detailed(marginal, 1)
    assert detail.tail_divergent and detail.tail_part == 0.0


def test_line_trace_validation():
    xs = np.concatenate([np.linspace(0, 1, 50), [2.0]])
    with pytest.raises(DomainError):
        LineTrace(0.01, xs, np.zeros(51), 1.0)
