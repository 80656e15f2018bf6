"""Self-adjoint multiplication model with finite-rank dissipative coupling.

The operator A acts as multiplication by the independent variable on
L^2(mu); the coupling V = sum_i v_i <., phi_i> phi_i is finite rank with
strictly positive strengths.  Everything an evaluator needs reduces to the
r x r Herglotz matrix

    N_ij(lam) = sqrt(v_i v_j) <(A - lam)^{-1} phi_j, phi_i>,

whose entries are weighted Borel transforms of the measure.  The
characteristic function of A + iV is the matrix Cayley transform
S = (I + iN)(I - iN)^{-1}; Theta = (I + S)/2 = (I - iN)^{-1}; the outer
determinants are delta_+ = det Theta and delta_-(lam) = conj(delta_+(conj lam)).
Resolvent application is symbolic (division by k - lam), so no discretization
error enters anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, SingularEvaluationError
from .measure import SpectralMeasure, SymbolVector, constant_symbol
from .poly import PiecewisePoly

_DET_FLOOR = 1e-14


@dataclass(frozen=True, eq=False)
class OperatorModel:
    """Multiplication operator on L^2(mu) with finite-rank coupling.

    ``couplings`` lists (vector, strength) pairs; the rank-one default is the
    constant symbol with unit strength, which is cyclic whenever the spectrum
    is simple.
    """

    mu: SpectralMeasure
    couplings: tuple = ()
    _pair_polys: tuple = field(default=None, compare=False, repr=False)  # type: ignore[assignment]
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        couplings = tuple(self.couplings) or ((constant_symbol(self.mu), 1.0),)
        object.__setattr__(self, "couplings", couplings)
        if any(v <= 0 for _, v in couplings):
            raise DomainError("coupling strengths must be positive")
        gram = np.array([
            [self.mu.inner(wj.poly, wi.poly) for wj, _ in couplings]
            for wi, _ in couplings
        ])
        eigs = np.linalg.eigvalsh(0.5 * (gram + gram.conj().T))
        if np.min(eigs) <= 1e-12 * max(np.max(eigs), 1.0):
            raise DomainError("coupling vectors must be linearly independent in L^2(mu)")
        polys = tuple(
            tuple(couplings[j][0].poly * couplings[i][0].poly.conj()
                  for j in range(len(couplings)))
            for i in range(len(couplings))
        )
        object.__setattr__(self, "_pair_polys", polys)

    @property
    def rank(self) -> int:
        return len(self.couplings)

    @property
    def strengths(self) -> np.ndarray:
        return np.array([v for _, v in self.couplings])

    def herglotz_matrix(self, lam) -> np.ndarray:
        """N(lam), shape (..., r, r); positive-semidefinite imaginary part in C_+."""
        lam = np.atleast_1d(np.asarray(lam, dtype=complex))
        r = self.rank
        v = self.strengths
        out = np.empty(lam.shape + (r, r), dtype=complex)
        for i in range(r):
            for j in range(r):
                scale = np.sqrt(v[i] * v[j])
                out[..., i, j] = scale * self.mu.borel_transform(self._pair_polys[i][j], lam)
        return out

    def resolvent_pairings(self, u: SymbolVector, lam) -> np.ndarray:
        """<(A - lam)^{-1} u, phi_i> for each coupling vector, shape (..., r)."""
        lam = np.atleast_1d(np.asarray(lam, dtype=complex))
        out = np.empty(lam.shape + (self.rank,), dtype=complex)
        for i, (phi, _) in enumerate(self.couplings):
            out[..., i] = self.mu.borel_transform(u.poly * phi.poly.conj(), lam)
        return out

    def alpha_resolvent_norm_sq(self, u: SymbolVector, lam) -> np.ndarray:
        """||alpha (A - lam)^{-1} u||^2 = 2 sum_i v_i |<R u, phi_i>|^2."""
        pair = self.resolvent_pairings(u, lam)
        return 2.0 * np.sum(self.strengths * np.abs(pair) ** 2, axis=-1)


# ---------------------------------------------------------------------------
# Characteristic data
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CharacteristicData:
    """Evaluator bundle for the coupling-scaled Herglotz matrix of a model."""

    model: OperatorModel

    def matrix(self, lam) -> np.ndarray:
        return self.model.herglotz_matrix(lam)


def _require_half_plane(lam: np.ndarray, sign: int, what: str):
    im = np.imag(lam)
    if sign > 0 and np.any(im <= 0):
        raise DomainError(f"{what} is defined for Im lambda > 0")
    if sign < 0 and np.any(im >= 0):
        raise DomainError(f"{what} is defined for Im lambda < 0")


def perturbation_determinant(model: OperatorModel, lam) -> np.ndarray:
    """D(lam) = det(I + N(lam)); rank one: 1 + v <(A-lam)^{-1} phi, phi>."""
    lam = np.asarray(lam, dtype=complex)
    scalar = lam.ndim == 0
    lam_arr = np.atleast_1d(lam)
    if np.any(np.imag(lam_arr) == 0):
        raise DomainError("perturbation determinant needs Im lambda != 0; sample at +i*eps")
    n = model.herglotz_matrix(lam_arr)
    eye = np.eye(model.rank)
    det = np.linalg.det(eye + n)
    return det[0] if scalar else det


def characteristic_function(model: OperatorModel, lam) -> np.ndarray:
    """S(lam) = (I + iN)(I - iN)^{-1}, a contraction for Im lam > 0."""
    lam = np.asarray(lam, dtype=complex)
    scalar = lam.ndim == 0
    lam_arr = np.atleast_1d(lam)
    _require_half_plane(lam_arr, +1, "the characteristic function")
    n = model.herglotz_matrix(lam_arr)
    eye = np.eye(model.rank)
    denom = eye - 1j * n
    det = np.linalg.det(denom)
    if np.any(np.abs(det) < _DET_FLOOR):
        raise SingularEvaluationError("I - iN numerically singular in the upper half-plane")
    s = np.linalg.solve(np.swapaxes(denom, -1, -2),
                        np.swapaxes(eye + 1j * n, -1, -2))
    s = np.swapaxes(s, -1, -2)
    return s[0] if scalar else s


def theta(model: OperatorModel, lam) -> np.ndarray:
    """Theta(lam) = (I + S)/2 = (I - iN)^{-1}, an outer contraction in C_+."""
    lam = np.asarray(lam, dtype=complex)
    scalar = lam.ndim == 0
    lam_arr = np.atleast_1d(lam)
    _require_half_plane(lam_arr, +1, "Theta")
    n = model.herglotz_matrix(lam_arr)
    eye = np.eye(model.rank)
    out = np.linalg.inv(eye - 1j * n)
    return out[0] if scalar else out


def theta_prime(model: OperatorModel, lam) -> np.ndarray:
    """Theta'(lam) for Im lam < 0: the conjugate transpose of Theta(conj lam)."""
    lam = np.asarray(lam, dtype=complex)
    scalar = lam.ndim == 0
    lam_arr = np.atleast_1d(lam)
    _require_half_plane(lam_arr, -1, "Theta'")
    up = theta(model, np.conj(lam_arr))
    out = np.conj(np.swapaxes(up, -1, -2))
    return out[0] if scalar else out


def outer_determinant_delta(model: OperatorModel, lam) -> np.ndarray:
    """delta_+ = det Theta for Im lam > 0; delta_-(lam) = conj(delta_+(conj lam)) below."""
    lam = np.asarray(lam, dtype=complex)
    scalar = lam.ndim == 0
    lam_arr = np.atleast_1d(lam)
    im = np.imag(lam_arr)
    if np.any(im == 0):
        raise DomainError("outer determinants need Im lambda != 0")
    out = np.empty(lam_arr.shape, dtype=complex)
    upper = im > 0
    if np.any(upper):
        out[upper] = np.exp(log_delta_plus(model, lam_arr[upper]))
    if np.any(~upper):
        out[~upper] = np.conj(np.exp(log_delta_plus(model, np.conj(lam_arr[~upper]))))
    return out[0] if scalar else out


def log_delta_plus(model: OperatorModel, lam) -> np.ndarray:
    """log det Theta(lam) on the branch that vanishes at i*infinity.

    The numerical range of I - iN lies in {Re >= 1}, so every eigenvalue has
    positive real part and principal logs sum to the continuous branch.
    """
    lam = np.asarray(lam, dtype=complex)
    scalar = lam.ndim == 0
    lam_arr = np.atleast_1d(lam)
    _require_half_plane(lam_arr, +1, "log delta_+")
    n = model.herglotz_matrix(lam_arr)
    eye = np.eye(model.rank)
    mat = eye - 1j * n
    if model.rank == 1:
        out = -np.log(mat[..., 0, 0])
    else:
        eigs = np.linalg.eigvals(mat)
        out = -np.sum(np.log(eigs), axis=-1)
    return out[0] if scalar else out


def gamma_a(model: OperatorModel, lam) -> np.ndarray:
    """The contractive outer determinant gamma_A = det Theta = delta_+.

    Rank one reduces to 1/(1 - i(D - 1)) with D the perturbation determinant;
    gamma_A(i tau) -> 1 as tau -> infinity.
    """
    lam = np.asarray(lam, dtype=complex)
    scalar = lam.ndim == 0
    out = np.exp(log_delta_plus(model, np.atleast_1d(lam)))
    return out[0] if scalar else out


def log_gamma_a(model: OperatorModel, lam) -> np.ndarray:
    return log_delta_plus(model, lam)


# ---------------------------------------------------------------------------
# Dense realization on atom-only measures (test oracle, maximality check)
# ---------------------------------------------------------------------------

def dense_matrices(model: OperatorModel) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Euclidean matrices (A, V, alpha) of the model on an atom-only measure.

    The isometry x(k) -> (sqrt(w_i) x(a_i))_i turns L^2(mu) into C^n; useful
    as an independent linear-algebra oracle at desk scale.
    """
    mu = model.mu
    if mu.ac_pieces or mu.sc_pieces:
        raise DomainError("dense realization needs an atom-only measure")
    pos = np.array([a for a, _ in mu.atoms])
    wts = np.array([w for _, w in mu.atoms])
    a_mat = np.diag(pos).astype(complex)
    v_mat = np.zeros((len(pos), len(pos)), dtype=complex)
    for phi, v in model.couplings:
        vec = np.sqrt(wts) * phi(pos)
        v_mat += v * np.outer(vec, np.conj(vec))
    evals, evecs = np.linalg.eigh(v_mat)
    evals = np.clip(np.real(evals), 0.0, None)
    alpha = (evecs * np.sqrt(2.0 * evals)) @ evecs.conj().T
    return a_mat, v_mat, alpha


def resolvent_gram_rank(model: OperatorModel, n_samples: int | None = None,
                        seed: int = 12345) -> int:
    """Numerical rank of the Gram matrix of resolvent samples (A-lam_j)^{-1} phi.

    On atom-only measures a full rank equal to the number of atoms certifies
    that the coupling span is dense (the maximality condition).
    """
    mu = model.mu
    if mu.ac_pieces or mu.sc_pieces:
        raise DomainError("the desk-scale cyclicity check runs on atom-only measures")
    n = len(mu.atoms)
    m = n_samples or n
    rng = np.random.default_rng(seed)
    lo, hi = mu.hull
    lams = (lo + (hi - lo) * rng.random(m)) + 1j * (0.3 + rng.random(m))
    pos = np.array([a for a, _ in mu.atoms])
    wts = np.array([w for _, w in mu.atoms])
    cols = []
    for lam in lams:
        for phi, _ in model.couplings:
            cols.append(np.sqrt(wts) * phi(pos) / (pos - lam))
    mat = np.stack(cols, axis=1)
    gram = mat.conj().T @ mat
    svals = np.linalg.svd(gram, compute_uv=False)
    return int(np.sum(svals > 1e-10 * svals[0]))
