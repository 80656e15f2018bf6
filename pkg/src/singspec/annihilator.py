"""Constructive weak annihilators for the multiplication model.

Gap mode ("thm2"): given a spectral gap around 0 of half-width > delta0, the
bundle carries gamma = gamma_1 * gamma_2 where

* gamma_1 is the outer function whose boundary modulus is |gamma_A| on the
  window W = (-inf, -delta0) and 1 elsewhere.  It is evaluated through the
  outer-representation identity: the Cauchy integral of log|gamma_A| over the
  whole line is log gamma_A itself (gamma_A is outer and zero-free), so only
  the integral over the smooth complement [-delta0, inf) has to be carried
  numerically -- as a cubic spline integrated in closed form.  The log
  singularities of log|gamma_A| at atoms and Cantor leaves inside W therefore
  enter exactly and are never clipped.
* gamma_2 repairs the phase: phi is the regularized harmonic conjugate of
  log|gamma_A| restricted to W, phi_1 its C^1 extension that keeps phi on
  [0, inf), and gamma_2 = exp((1/pi) int K(lam, t) phi_1(t) dt).  On the right
  half-line the boundary phases of gamma_1 and gamma_2 cancel identically, so
  gamma has real boundary values there by construction.

Window mode ("thm3"): gamma is gamma_A itself and the bundle carries the
Herglotz bump beta supported on the target set; annihilation is tested on the
product gamma * (beta - beta_*).

Boundary data is sampled at height EPS_BOUNDARY (Richardson-checked at twice
that); weak traces are evaluated by spectral calculus on the multiplication
model: atoms exactly, Cantor pieces by scale-matched leaf atoms, AC pieces by
feature-graded panels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, GapError
from .hardy import C1Extension, HerglotzBump, OuterFunction, build_bump
from .measure import SpectralMeasure, SymbolVector
from .operator import OperatorModel, log_gamma_a
from .poly import (
    PiecewisePoly,
    SplineCauchy,
    kernel_left_tail,
    kernel_right_tail,
)

EPS_BOUNDARY = 1e-6
_SEP_FLOOR = 1e-8


@dataclass(frozen=True)
class AnnihilatorBundle:
    """The pair (gamma, beta) with construction metadata."""

    mode: str
    gamma: OuterFunction
    beta: HerglotzBump | None = None
    delta0: float | None = None
    delta: tuple = ()
    derealized: bool = False
    diagnostics: dict = field(default_factory=dict)
    payload: dict = field(default_factory=dict, repr=False)

    def gamma_star(self, lam):
        """gamma_*(lam) = conj(gamma(conj lam)) in the lower half-plane."""
        return self.gamma.star(lam)

    def to_dict(self) -> dict:
        """Serializable construction data (grids + metadata) for reruns."""
        out = {
            "mode": self.mode,
            "delta0": self.delta0,
            "delta": [list(iv) for iv in self.delta],
            "derealized": self.derealized,
            "diagnostics": {k: v for k, v in self.diagnostics.items()},
        }
        out.update({k: v for k, v in self.payload.items()})
        return out


def _check_ladder(eps_ladder) -> np.ndarray:
    ladder = np.asarray(list(eps_ladder), dtype=float)
    if len(ladder) == 0 or np.any(ladder <= 0) or np.any(np.diff(ladder) >= 0):
        raise DomainError("eps ladder must be positive and strictly decreasing")
    return ladder


def spectral_gap(mu: SpectralMeasure) -> tuple[float, float]:
    """The component-free interval around 0, or raises GapError."""
    left, right = -np.inf, np.inf
    def feed(lo, hi):
        nonlocal left, right
        if lo <= 0 <= hi:
            raise GapError("a measure component contains 0; no spectral gap around the origin")
        if hi < 0:
            left = max(left, hi)
        else:
            right = min(right, lo)
    for a, _ in mu.atoms:
        feed(a, a)
    for p in mu.ac_pieces:
        feed(*p.interval)
    for p in mu.sc_pieces:
        feed(p.lo, p.hi)
    return float(left), float(right)


# ---------------------------------------------------------------------------
# Gap-mode construction
# ---------------------------------------------------------------------------

def build_gamma_thm2(model: OperatorModel, delta0: float, *,
                     margin: float | None = None,
                     eps_boundary: float = EPS_BOUNDARY,
                     far_pad: float = 50.0) -> AnnihilatorBundle:
    """Bounded outer gamma with real boundary values right of the gap that
    cancels the boundary zeros of gamma_A on (-inf, -delta0).

    Preconditions: the model has a spectral gap around 0 of half-width
    > delta0, |gamma_A| is separated from zero across the gap, and no
    singular-continuous piece extends right of -delta0 (its boundary data
    could not be resolved on the complement window).
    """
    if delta0 <= 0:
        raise DomainError("delta0 must be positive")
    mu = model.mu
    gap_lo, gap_hi = spectral_gap(mu)
    if min(-gap_lo, gap_hi) <= delta0:
        raise GapError(
            f"gap half-width {min(-gap_lo, gap_hi):g} does not exceed delta0 = {delta0:g}"
        )
    for p in mu.sc_pieces:
        if p.hi > -delta0:
            raise DomainError(
                "singular-continuous pieces must lie left of -delta0 in gap mode"
            )
    gap_lo_c = max(gap_lo, -4.0 * delta0)
    gap_hi_c = min(gap_hi, 4.0 * delta0)
    ts = np.linspace(gap_lo_c * 0.95, gap_hi_c * 0.95, 41)
    sep = np.min(np.abs(np.exp(log_gamma_a(model, ts + 1j * eps_boundary))))
    if sep < _SEP_FLOOR:
        raise GapError(
            f"|gamma_A| is not separated from zero on the gap (min {sep:.3g})"
        )

    hull_lo, hull_hi = mu.hull
    x_phi = hull_hi + far_pad
    x_tail = x_phi + 15.0
    m = margin if margin is not None else delta0 / 2.0
    if not 0 < m <= delta0:
        raise DomainError("blend margin must lie in (0, delta0]")

    # boundary data of log|gamma_A| on the complement window [-delta0, x_tail]
    knots = _complement_knots(mu, delta0, gap_hi_c, hull_hi, x_tail, eps_boundary)
    lf_vals = np.real(log_gamma_a(model, knots + 1j * eps_boundary))
    lf_spline = SplineCauchy.fit(knots, lf_vals)
    lf_reg = lf_spline.reg_moment()
    check = np.real(log_gamma_a(model, knots[::16] + 2j * eps_boundary))
    richardson_dev = float(np.max(np.abs(check - lf_vals[::16])))

    # far-field asymptotics of log|gamma_A| ~ c2/t^2 + c3/t^3
    t_fit = np.linspace(x_phi + 2.0, x_tail, 25)
    lf_fit = np.real(log_gamma_a(model, t_fit + 1j * eps_boundary))
    basis = np.stack([t_fit**-2.0, t_fit**-3.0], axis=1)
    c2, c3 = np.linalg.lstsq(basis, lf_fit, rcond=None)[0]
    lf_tail = np.array([0.0, 0.0, c2, c3])

    def compl_integral(lam: np.ndarray) -> np.ndarray:
        return (-lf_spline.cauchy(lam) + lf_reg
                + kernel_right_tail(x_tail, lam, lf_tail))

    # phi = regularized conjugate of log|gamma_A| * chi_W on [0, x_phi]
    xs_phi = _phi_grid(hull_hi, x_phi)
    arg_full = np.imag(log_gamma_a(model, xs_phi + 1j * eps_boundary))
    # the tail formulas divide by lam; at distance x_tail - x >= 15 they are
    # flat, so nudging the origin point is harmless
    xs_safe = np.where(np.abs(xs_phi) < 1e-4, 1e-4, xs_phi).astype(complex)
    tail_re = np.real(kernel_right_tail(x_tail, xs_safe, lf_tail))
    phi_compl = (-lf_spline.cauchy_pv(xs_phi) + lf_reg + tail_re) / math.pi
    phi_vals = arg_full - phi_compl
    phi_spline = SplineCauchy.fit(xs_phi, phi_vals)
    phi_reg = phi_spline.reg_moment()
    phi0 = float(phi_vals[0])
    slope0 = float(phi_spline.derivative(np.array([0.0]))[0])

    # C^1 extension: exact phi-spline on [0, inf) side, Hermite blend, constant
    ext = C1Extension(lambda t: phi_spline(t), 0.0, m, phi0, slope0)
    blend = ext.blend_poly()
    blend_reg = complex(blend.reg_moment())

    # phi tail: phi ~ cinf + a1/x + a2/x^2
    sel = xs_phi >= x_phi - 25.0
    basis = np.stack([np.ones(np.sum(sel)), xs_phi[sel] ** -1.0, xs_phi[sel] ** -2.0], axis=1)
    cinf, a1, a2 = np.linalg.lstsq(basis, phi_vals[sel], rcond=None)[0]
    phi_tail = np.array([cinf, a1, a2, 0.0])

    def log_raw(lam: np.ndarray) -> np.ndarray:
        lam = np.asarray(lam, dtype=complex)
        log_g1 = (log_gamma_a(model, lam + 1j * eps_boundary)
                  - (1j / math.pi) * compl_integral(lam))
        j2 = (phi0 * kernel_left_tail(-m, lam)
              + (-blend.cauchy(lam) + blend_reg)
              + (-phi_spline.cauchy(lam) + phi_reg)
              + kernel_right_tail(x_phi, lam, phi_tail))
        return log_g1 + j2 / math.pi

    # the two construction constants are paired (e^{ic} e^{-ic} = 1): the
    # boundary phase right of the gap cancels exactly, so no further phase
    # normalization may be applied there
    gamma = OuterFunction(log_raw, c=0.0, meta={"kind": "gap-annihilator"})
    diag = _gap_diagnostics(gamma, model, delta0, gap_hi, eps_boundary)
    diag["richardson_dev"] = richardson_dev
    diag["phi_sup"] = float(np.max(np.abs(phi_vals)))
    diag["gap"] = (gap_lo, gap_hi)
    payload = {
        "eps_boundary": eps_boundary,
        "margin": m,
        "lf_knots": knots.tolist(),
        "lf_values": lf_vals.tolist(),
        "lf_tail": lf_tail.tolist(),
        "phi_xs": xs_phi.tolist(),
        "phi_values": phi_vals.tolist(),
        "phi_tail": phi_tail.tolist(),
        "x_phi": x_phi,
        "x_tail": x_tail,
    }
    return AnnihilatorBundle(
        mode="thm2", gamma=gamma, delta0=delta0, diagnostics=diag, payload=payload
    )


def _complement_knots(mu, delta0, gap_hi, hull_hi, x_tail, eps_b) -> np.ndarray:
    pts = [np.linspace(-delta0, gap_hi, 48)]
    if hull_hi > gap_hi:
        pts.append(np.linspace(gap_hi, hull_hi, max(int(120 * (hull_hi - gap_hi)), 60)))
    pts.append(hull_hi + np.geomspace(0.02, x_tail - hull_hi, 90))
    for a, _ in mu.atoms:
        if a > -delta0:
            offs = np.geomspace(eps_b, 0.6, 48)
            pts.append(np.clip(np.concatenate([a - offs, [a], a + offs]), -delta0, x_tail))
    for p in mu.ac_pieces:
        for e in p.density.breaks:
            if e > -delta0:
                offs = np.geomspace(4 * eps_b, 0.4, 40)
                pts.append(np.clip(np.concatenate([e - offs, e + offs]), -delta0, x_tail))
    knots = np.unique(np.concatenate(pts))
    keep = np.concatenate([[True], np.diff(knots) > 5e-8])
    return knots[keep]


def _phi_grid(hull_hi, x_phi) -> np.ndarray:
    near_hi = min(hull_hi + 2.0, x_phi - 1.0)
    xs = [np.linspace(0.0, near_hi, 361)]
    xs.append(near_hi + np.geomspace(0.05, x_phi - near_hi, 110))
    grid = np.unique(np.concatenate(xs))
    return grid


def _gap_diagnostics(gamma, model, delta0, gap_hi, eps_b) -> dict:
    hull_lo, hull_hi = model.mu.hull
    rng = np.random.default_rng(20260810)
    lam = (hull_lo - 8 + (hull_hi - hull_lo + 16) * rng.random(400)
           + 1j * np.exp(rng.uniform(np.log(1e-4), np.log(50.0), 400)))
    sup = float(np.max(np.abs(gamma.eval_many(lam))))
    ts = np.linspace(hull_lo - 8.0, -delta0, 200)
    ratio = np.abs(gamma.eval_many(ts + 1e-4j)) / np.abs(
        np.exp(log_gamma_a(model, ts + 1e-4j))
    )
    # boundary reality holds a.e. right of the gap; keep the sampled residual
    # away from right-side atoms, where the phase swings on a zero-measure set
    right = np.linspace(delta0 / 2.0, hull_hi + 3.0, 150)
    for a, _ in model.mu.atoms:
        if a > 0:
            right = right[np.abs(right - a) > 0.02]
    g_right = gamma.eval_many(right + 1e-5j)
    reality = float(np.max(np.abs(np.imag(g_right)) / np.maximum(np.abs(g_right), 1e-300)))
    return {
        "sup_bound": sup,
        "zero_cancellation_C": float(np.max(ratio)),
        "right_reality_residual": reality,
    }


def derealize(bundle: AnnihilatorBundle, omega: list[tuple[float, float]], *,
              amplitude: float = 0.5, shape: int = 2) -> AnnihilatorBundle:
    """Multiply gamma by the bounded outer factor exp(ghat) with
    ghat(lam) = int g(k)/(k - lam) dk, g a bump supported on closure(Omega).

    Forces non-real boundary values on Omega (boundary phase pi*g(k)) while
    keeping them real on the right half-line, where Im ghat vanishes.
    """
    if bundle.mode != "thm2":
        raise DomainError("derealization applies to gap-mode bundles")
    if not omega:
        return bundle
    if max(hi for _, hi in omega) >= 0:
        raise DomainError("derealization set must stay inside (-inf, 0)")
    if not 0 < amplitude < 1:
        raise DomainError("derealization amplitude must lie in (0, 1) to keep sin(pi g) != 0")
    g = build_bump(omega, shape=shape, amplitude=amplitude)
    base = bundle.gamma

    def log_raw(lam: np.ndarray) -> np.ndarray:
        lam = np.asarray(lam, dtype=complex)
        return base._log_raw(lam) + g.bump.cauchy(lam)

    # ghat has real boundary values right of Omega, so c = 0 keeps reality
    gamma = OuterFunction(log_raw, c=base.c, meta=dict(base.meta, derealized=True))
    diag = dict(bundle.diagnostics)
    mids = [0.5 * (lo + hi) for lo, hi in omega]
    factor = np.exp(g.bump.cauchy(np.array(mids) + 1e-4j))
    diag["derealization_min_im"] = float(np.min(np.abs(np.imag(factor))))
    payload = dict(bundle.payload, omega=[list(iv) for iv in omega],
                   derealize_amplitude=amplitude, derealize_shape=shape)
    return AnnihilatorBundle(
        mode="thm2", gamma=gamma, beta=bundle.beta, delta0=bundle.delta0,
        delta=bundle.delta, derealized=True, diagnostics=diag, payload=payload,
    )


# ---------------------------------------------------------------------------
# Window-mode construction
# ---------------------------------------------------------------------------

def build_beta_thm3(delta: list[tuple[float, float]], shape: int = 2) -> HerglotzBump:
    """Herglotz component for the target set: C^1 bump b > 0 on the interior
    of each interval, zero outside, with beta = Cauchy transform of b."""
    if not delta:
        raise DomainError("the target set must be a nonempty union of intervals")
    return build_bump(delta, shape=shape)


def build_bundle_thm3(model: OperatorModel, delta: list[tuple[float, float]],
                      shape: int = 2) -> AnnihilatorBundle:
    """Bundle (gamma_A, beta) for annihilation on an arbitrary bounded set."""
    beta = build_beta_thm3(delta, shape)

    def log_raw(lam: np.ndarray) -> np.ndarray:
        return log_gamma_a(model, np.asarray(lam, dtype=complex))

    gamma = OuterFunction(log_raw, c=0.0, meta={"kind": "gamma_A"})
    diag = {"beta_sup_jump": 2.0 * math.pi * float(np.max(np.abs(beta.bump(
        np.linspace(min(lo for lo, _ in delta), max(hi for _, hi in delta), 512)))))}
    return AnnihilatorBundle(
        mode="thm3", gamma=gamma, beta=beta,
        delta=tuple((float(a), float(b)) for a, b in delta),
        diagnostics=diag, payload={"shape": shape},
    )


# ---------------------------------------------------------------------------
# Weak traces via spectral calculus
# ---------------------------------------------------------------------------

def _trace_nodes(model: OperatorModel, eps: float):
    mu = model.mu
    return mu.quadrature_nodes(eps, refine_at=mu.singular_points())


def weak_trace_thm2(bundle: AnnihilatorBundle, model: OperatorModel,
                    u: SymbolVector, v: SymbolVector, eps_ladder) -> np.ndarray:
    """T_eps = <(gamma(A+i eps) - gamma_*(A-i eps)) u, v>
             = int 2i Im gamma(k + i eps) u(k) conj(v(k)) dmu(k)."""
    if bundle.mode != "thm2":
        raise DomainError("weak_trace_thm2 needs a gap-mode bundle")
    ladder = _check_ladder(eps_ladder)
    out = np.empty(len(ladder), dtype=complex)
    for n, eps in enumerate(ladder):
        pos, mass = _trace_nodes(model, eps)
        g = bundle.gamma.eval_many(pos + 1j * eps)
        out[n] = np.sum(mass * 2j * np.imag(g) * u(pos) * np.conj(v(pos)))
    return out


def weak_trace_thm3(bundle: AnnihilatorBundle, model: OperatorModel,
                    u: SymbolVector, v: SymbolVector, eps_ladder) -> np.ndarray:
    """T_eps = int gamma_A(k+i eps) (beta(k+i eps) - conj beta(k+i eps))
                   u(k) conj(v(k)) dmu(k)."""
    if bundle.mode != "thm3" or bundle.beta is None:
        raise DomainError("weak_trace_thm3 needs a window-mode bundle with beta")
    ladder = _check_ladder(eps_ladder)
    out = np.empty(len(ladder), dtype=complex)
    for n, eps in enumerate(ladder):
        pos, mass = _trace_nodes(model, eps)
        lam = pos + 1j * eps
        g = bundle.gamma.eval_many(lam)
        bdiff = 2j * np.imag(bundle.beta(lam))
        out[n] = np.sum(mass * g * bdiff * u(pos) * np.conj(v(pos)))
    return out


def weak_trace_table(bundle: AnnihilatorBundle, model: OperatorModel,
                     vectors: list[SymbolVector], eps_ladder,
                     pairs: list[tuple[int, int]] | None = None) -> dict:
    """All pair traces over a dictionary, sharing the gamma evaluations per eps."""
    ladder = _check_ladder(eps_ladder)
    if pairs is None:
        pairs = [(i, j) for i in range(len(vectors)) for j in range(i, len(vectors))]
    table = {p: np.empty(len(ladder), dtype=complex) for p in pairs}
    for n, eps in enumerate(ladder):
        pos, mass = _trace_nodes(model, eps)
        lam = pos + 1j * eps
        g = bundle.gamma.eval_many(lam)
        if bundle.mode == "thm2":
            core = mass * 2j * np.imag(g)
        else:
            core = mass * g * 2j * np.imag(bundle.beta(lam))
        vals = [vec(pos) for vec in vectors]
        for (i, j) in pairs:
            table[(i, j)][n] = np.sum(core * vals[i] * np.conj(vals[j]))
    return table


def boundary_limit_oracle(bundle: AnnihilatorBundle, model: OperatorModel,
                          u: SymbolVector, v: SymbolVector,
                          eps0: float = 1e-6) -> complex:
    """Richardson-extrapolated eps -> 0 limit of the weak trace.

    Independent check of the ladder limit: evaluates the boundary integrand at
    eps0 and 2*eps0 directly and extrapolates linearly.
    """
    def at(eps: float) -> complex:
        pos, mass = _trace_nodes(model, max(eps, 1e-3))
        lam = pos + 1j * eps
        g = bundle.gamma.eval_many(lam)
        if bundle.mode == "thm2":
            core = mass * 2j * np.imag(g)
        else:
            core = mass * g * 2j * np.imag(bundle.beta(lam))
        return complex(np.sum(core * u(pos) * np.conj(v(pos))))

    f1, f2 = at(eps0), at(2 * eps0)
    return 2 * f1 - f2
