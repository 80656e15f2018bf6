"""Mixed spectral measures with compact support and their Cauchy/Borel transforms.

A measure has three kinds of components:

* atoms (position, weight),
* absolutely continuous pieces with piecewise-polynomial densities,
* singular-continuous pieces generated by a two-branch affine iterated
  function system (middle-Cantor type), refined on demand to leaf atoms.

All transforms of atoms and AC pieces are evaluated in closed form (see
``poly``); SC pieces are resolved into leaf atoms whose spacing undercuts the
distance from the evaluation point to the axis.  Every object is immutable
after construction and every operation is pure, so grids of evaluation points
can be processed concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BoundaryEvaluationError, DomainError, PrecisionError
from .poly import PiecewisePoly, gauss_panels, geometric_refinement

_MASS_RTOL = 1e-12
# leaf spacing must undercut the evaluation scale by this factor
_SC_SCALE_FRACTION = 0.1
_DEFAULT_MAX_DEPTH = 24
_LAM_CHUNK = 512


@dataclass(frozen=True, eq=False)
class AcPiece:
    """Absolutely continuous component: nonnegative density on [lo, hi]."""

    density: PiecewisePoly

    def __post_init__(self):
        lo, hi = self.density.support
        xs = np.linspace(lo, hi, 257)
        vals = np.real(self.density(xs))
        if np.min(vals) < -1e-10 * max(1.0, np.max(np.abs(vals))):
            raise DomainError("AC density must be nonnegative on its support")

    @property
    def interval(self) -> tuple[float, float]:
        return self.density.support

    @property
    def mass(self) -> float:
        return float(np.real(self.density.integral()))


@dataclass(frozen=True)
class ScPiece:
    """Two-branch affine IFS measure on [lo, hi].

    The maps send [lo, hi] to its left and right sub-intervals of relative
    length ``ratio`` with branch weights (p, 1-p).  ``depth`` is the declared
    baseline refinement used for inner products and test vectors; transforms
    pick their own depth from the evaluation scale.
    """

    lo: float
    hi: float
    ratio: float
    p: float
    depth: int
    mass: float = 1.0

    def __post_init__(self):
        if not self.lo < self.hi:
            raise DomainError("sc piece needs lo < hi")
        if not 0.0 < self.ratio < 0.5:
            raise DomainError("sc contraction ratio must lie in (0, 1/2)")
        if not 0.0 <= self.p <= 1.0:
            raise DomainError("sc branch weight must lie in [0, 1]")
        if self.depth < 1:
            raise DomainError("sc refinement depth must be >= 1")
        if self.mass <= 0:
            raise DomainError("sc piece mass must be positive")

    @property
    def interval(self) -> tuple[float, float]:
        return (self.lo, self.hi)

    def required_depth(self, scale: float) -> int:
        """Smallest d with (hi-lo) * ratio**d <= scale * fraction."""
        target = scale * _SC_SCALE_FRACTION
        width = self.hi - self.lo
        if width <= target:
            return 1
        return int(np.ceil(np.log(width / target) / np.log(1.0 / self.ratio)))

    def boxes(self, depth: int) -> np.ndarray:
        """Left endpoints/right endpoints (2^depth, 2) of depth-d cells."""
        lo = np.array([self.lo])
        hi = np.array([self.hi])
        for _ in range(depth):
            width = (hi - lo) * self.ratio
            lo = np.concatenate([lo, hi - width])
            hi = np.concatenate([lo[: len(width)] + width, hi])
            order = np.argsort(lo)
            lo, hi = lo[order], hi[order]
        return np.stack([lo, hi], axis=1)


def refine_sc(piece: ScPiece, depth: int, max_depth: int = _DEFAULT_MAX_DEPTH):
    """Leaf atoms of ``piece`` at the given depth.

    Returns (positions, weights): 2^depth midpoints of the depth-d cells with
    product branch weights scaled by the piece mass.  Weights sum to the piece
    mass exactly (up to the unavoidable rounding of products).
    """
    if depth < 1:
        raise DomainError("refinement depth must be >= 1")
    if depth > max_depth:
        raise PrecisionError(
            f"sc refinement depth {depth} exceeds the configured maximum {max_depth}"
        )
    lo = np.array([piece.lo])
    hi = np.array([piece.hi])
    w = np.array([piece.mass])
    for _ in range(depth):
        width = (hi - lo) * piece.ratio
        lo_l, hi_l, w_l = lo, lo + width, w * piece.p
        lo_r, hi_r, w_r = hi - width, hi, w * (1.0 - piece.p)
        lo = np.concatenate([lo_l, lo_r])
        hi = np.concatenate([hi_l, hi_r])
        w = np.concatenate([w_l, w_r])
    mid = 0.5 * (lo + hi)
    order = np.argsort(mid)
    return mid[order], w[order]


@dataclass(frozen=True, eq=False)
class SpectralMeasure:
    """Compactly supported positive measure: atoms + AC pieces + SC pieces."""

    atoms: tuple = ()
    ac_pieces: tuple = ()
    sc_pieces: tuple = ()
    max_sc_depth: int = _DEFAULT_MAX_DEPTH
    total_mass: float = field(default=None)  # type: ignore[assignment]
    _leaf_cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        atoms = tuple((float(a), float(w)) for a, w in self.atoms)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "ac_pieces", tuple(self.ac_pieces))
        object.__setattr__(self, "sc_pieces", tuple(self.sc_pieces))
        positions = [a for a, _ in atoms]
        if len(set(positions)) != len(positions):
            raise DomainError("atom positions must be pairwise distinct")
        if any(w <= 0 for _, w in atoms):
            raise DomainError("atom weights must be positive")
        for piece in self.sc_pieces:
            if not 0.0 < piece.p < 1.0:
                raise DomainError("measure sc pieces need branch weight strictly inside (0, 1)")
        if not (atoms or self.ac_pieces or self.sc_pieces):
            raise DomainError("measure needs at least one component")
        computed = (
            sum(w for _, w in atoms)
            + sum(p.mass for p in self.ac_pieces)
            + sum(p.mass for p in self.sc_pieces)
        )
        if self.total_mass is None:
            object.__setattr__(self, "total_mass", float(computed))
        elif abs(self.total_mass - computed) > _MASS_RTOL * max(computed, 1.0):
            raise DomainError(
                f"cached total mass {self.total_mass} disagrees with computed {computed}"
            )

    # -- geometry ----------------------------------------------------------

    @property
    def hull(self) -> tuple[float, float]:
        los, his = [], []
        for a, _ in self.atoms:
            los.append(a)
            his.append(a)
        for p in self.ac_pieces:
            lo, hi = p.interval
            los.append(lo)
            his.append(hi)
        for p in self.sc_pieces:
            los.append(p.lo)
            his.append(p.hi)
        return (min(los), max(his))

    def on_support(self, x: float, atol: float = 0.0) -> bool:
        for a, _ in self.atoms:
            if abs(x - a) <= atol:
                return True
        for p in self.ac_pieces:
            lo, hi = p.interval
            if lo - atol <= x <= hi + atol:
                return True
        for p in self.sc_pieces:
            if p.lo - atol <= x <= p.hi + atol:
                return True
        return False

    def singular_points(self) -> list[float]:
        """Atom positions plus SC cell structure markers for panel grading."""
        pts = [a for a, _ in self.atoms]
        for p in self.sc_pieces:
            for lo, hi in p.boxes(min(4, p.depth)):
                pts.append(0.5 * (lo + hi))
        return sorted(pts)

    def density_edges(self) -> list[float]:
        edges = []
        for p in self.ac_pieces:
            edges.extend(p.density.breaks.tolist())
        return sorted(set(edges))

    def leaves(self, piece: ScPiece, depth: int):
        key = (id(piece), depth)
        got = self._leaf_cache.get(key)
        if got is None:
            got = refine_sc(piece, depth, self.max_sc_depth)
            self._leaf_cache[key] = got  # idempotent concurrent insert
        return got

    # -- transforms ----------------------------------------------------------

    def _sc_depth_for(self, piece: ScPiece, scale: float) -> int:
        depth = piece.required_depth(scale)
        if depth > self.max_sc_depth:
            raise PrecisionError(
                f"evaluation at scale {scale:g} needs sc depth {depth} "
                f"> configured maximum {self.max_sc_depth}"
            )
        return max(depth, 1)

    def _scales(self, lam: np.ndarray, piece: ScPiece) -> np.ndarray:
        """Per-point resolution scale: |Im| off axis, distance to piece on axis."""
        im = np.abs(np.imag(lam))
        re = np.real(lam)
        dist = np.maximum(piece.lo - re, re - piece.hi)
        scales = np.where(im > 0, im, np.maximum(dist, 0.0))
        if np.any(scales <= 0):
            raise BoundaryEvaluationError(
                "real evaluation point inside an sc support interval"
            )
        return scales

    def borel_transform(self, weight: PiecewisePoly, lam) -> np.ndarray:
        """int weight(k) / (k - lam) dmu(k) for lam off supp(mu).

        Atoms and AC pieces are summed/integrated in closed form; SC pieces
        are refined to leaf atoms until the leaf spacing is below a tenth of
        the evaluation scale.
        """
        lam = np.asarray(lam, dtype=complex)
        scalar = lam.ndim == 0
        lam = np.atleast_1d(lam).astype(complex)
        real_mask = np.imag(lam) == 0
        if np.any(real_mask):
            for x in np.real(lam[real_mask]):
                if self.on_support(float(x), atol=0.0):
                    raise BoundaryEvaluationError(
                        f"transform evaluated at {x} on the support with Im = 0"
                    )
        out = np.zeros(lam.shape, dtype=complex)

        if self.atoms:
            pos = np.array([a for a, _ in self.atoms])
            wts = np.array([w for _, w in self.atoms])
            vals = wts * weight(pos)
            out += np.sum(vals[:, None] / (pos[:, None] - lam[None, :]), axis=0)

        for piece in self.ac_pieces:
            prod = piece.density * weight
            if not prod.is_zero:
                out += prod.cauchy(lam)

        for piece in self.sc_pieces:
            scales = self._scales(lam, piece)
            depths = np.array([self._sc_depth_for(piece, s) for s in scales])
            for depth in np.unique(depths):
                sel = depths == depth
                pos, wts = self.leaves(piece, int(depth))
                vals = wts * weight(pos)
                lam_sel = lam[sel]
                acc = np.zeros(lam_sel.shape, dtype=complex)
                for s0 in range(0, len(lam_sel), _LAM_CHUNK):
                    chunk = lam_sel[s0 : s0 + _LAM_CHUNK]
                    acc[s0 : s0 + _LAM_CHUNK] = np.sum(
                        vals[:, None] / (pos[:, None] - chunk[None, :]), axis=0
                    )
                out[sel] += acc

        return out[0] if scalar else out

    def poisson_imag(self, weight: PiecewisePoly, x: float, eps: float) -> float:
        """Im of the weighted transform at x + i*eps (eps > 0)."""
        if eps <= 0:
            raise DomainError("poisson evaluation needs eps > 0")
        return float(np.imag(self.borel_transform(weight, complex(x, eps))))

    # -- inner products and node expansions ---------------------------------

    def inner(self, u: PiecewisePoly, v: PiecewisePoly, sc_depth: int | None = None) -> complex:
        """<u, v> = int u * conj(v) dmu."""
        total = 0.0 + 0.0j
        if self.atoms:
            pos = np.array([a for a, _ in self.atoms])
            wts = np.array([w for _, w in self.atoms])
            total += np.sum(wts * u(pos) * np.conj(v(pos)))
        for piece in self.ac_pieces:
            prod = piece.density * (u * v.conj())
            total += prod.integral()
        for piece in self.sc_pieces:
            depth = sc_depth if sc_depth is not None else piece.depth
            pos, wts = self.leaves(piece, depth)
            total += np.sum(wts * u(pos) * np.conj(v(pos)))
        return complex(total)

    def quadrature_nodes(self, scale: float, sc_depth: int | None = None,
                         refine_at: list[float] | None = None):
        """Discrete nodes (positions, masses) so that sum f(pos)*mass ~ int f dmu.

        Atoms contribute exactly; SC pieces as leaf atoms at the scale-matched
        depth; AC pieces as composite Gauss panels with the density folded into
        the weights, graded toward ``refine_at`` points (default: the measure's
        own singular features inside each piece).
        """
        positions = []
        masses = []
        if self.atoms:
            positions.append(np.array([a for a, _ in self.atoms]))
            masses.append(np.array([w for _, w in self.atoms]))
        for piece in self.sc_pieces:
            depth = sc_depth if sc_depth is not None else self._sc_depth_for(piece, scale)
            pos, wts = self.leaves(piece, depth)
            positions.append(pos)
            masses.append(wts)
        features = refine_at if refine_at is not None else [a for a, _ in self.atoms]
        for piece in self.ac_pieces:
            lo, hi = piece.interval
            width = hi - lo
            edges = set(np.linspace(lo, hi, 33).tolist())
            edges.update(piece.density.breaks.tolist())
            for f in features:
                if lo < f < hi:
                    ref = geometric_refinement(f, max(scale, 1e-9), width / 4.0)
                    edges.update(ref[(ref > lo) & (ref < hi)].tolist())
            for edge_pt in (lo, hi):
                ref = geometric_refinement(edge_pt, max(scale, 1e-9), width / 8.0)
                edges.update(ref[(ref > lo) & (ref < hi)].tolist())
            edge_arr = np.array(sorted(edges))
            nodes, gw = gauss_panels(edge_arr, 8)
            positions.append(nodes)
            masses.append(gw * np.real(piece.density(nodes)))
        return np.concatenate(positions), np.concatenate(masses)


# ---------------------------------------------------------------------------
# Symbols (vectors in L^2(mu))
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SymbolVector:
    """Vector u in L^2(mu) represented by its multiplier symbol w(k).

    The generating vector is the constant symbol 1; spectral projections act
    by restricting the symbol to the projection window.
    """

    poly: PiecewisePoly
    name: str = "u"

    def __call__(self, x):
        return self.poly(x)

    def conj(self) -> "SymbolVector":
        return SymbolVector(self.poly.conj(), self.name + "*")

    def project(self, intervals: list[tuple[float, float]]) -> "SymbolVector":
        return SymbolVector(self.poly.restrict(intervals), self.name + "|")

    def pairing_weight(self, other: "SymbolVector") -> PiecewisePoly:
        """Piecewise-polynomial weight u * conj(v) for transform pairings."""
        return self.poly * other.poly.conj()


def constant_symbol(mu: SpectralMeasure, value=1.0, name: str = "one",
                    pad: float = 1.0) -> SymbolVector:
    lo, hi = mu.hull
    return SymbolVector(PiecewisePoly.constant(value, lo - pad, hi + pad), name)


def indicator_symbol(mu: SpectralMeasure, lo: float, hi: float, name: str) -> SymbolVector:
    return SymbolVector(PiecewisePoly.constant(1.0, lo, hi), name)


def norm_sq(mu: SpectralMeasure, u: SymbolVector, sc_depth: int | None = None) -> float:
    value = mu.inner(u.poly, u.poly, sc_depth=sc_depth)
    return float(np.real(value))


def weighted_borel_transform(mu: SpectralMeasure, weight, lam):
    """Functional form of ``SpectralMeasure.borel_transform``.

    ``weight`` may be a PiecewisePoly or a SymbolVector pairing weight.
    """
    poly = weight.poly if isinstance(weight, SymbolVector) else weight
    return mu.borel_transform(poly, lam)


def poisson_imaginary(mu: SpectralMeasure, weight, x: float, eps: float) -> float:
    poly = weight.poly if isinstance(weight, SymbolVector) else weight
    return mu.poisson_imag(poly, x, eps)
