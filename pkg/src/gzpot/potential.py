"""Exact evaluation of the determinant-form potentials.

The potential pair is

    v = -4 d_z d_zbar ln det A,      w = 12 d_z^2 ln det A,

where A is the 4N x 4N matrix with entries

    A_ll = (i sqrt(E)/2)(zbar - z/lambda_l^2)
           - 3 i E^(3/2) t (lambda_l^2 - 1/lambda_l^4) - gamma_l,
    A_lm = 1/(lambda_l - lambda_m)            (l != m).

Only the diagonal depends on (x, t), and each partial derivative of A in the
directions z, zbar, t is a constant diagonal matrix.  Mixed partials of
F = ln det A are therefore evaluated exactly by the trace calculus

    d_a F = tr(A^-1 D_a),     d_b (A^-1) = -A^-1 D_b A^-1,

which expands any mixed partial into a signed sum of traces of alternating
products A^-1 D_a1 A^-1 D_a2 ... (generated symbolically once per derivative
multiset and cached).  v is real up to rounding; the imaginary part is kept
as a diagnostic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np
from scipy.linalg import lapack

from .params import ParameterSet, velocity

DIRECTIONS = ("z", "zbar", "t")
MAX_DERIVATIVE_ORDER = 5
# Reciprocal-condition threshold below which evaluation refuses to proceed.
NEAR_SINGULAR_RCOND = 1e-12


class EvaluationError(Exception):
    """Base class for evaluation failures of the potential machinery."""


class SingularMatrixError(EvaluationError):
    """Exactly singular matrix met during factorization."""

    def __init__(self, pivot_index: int):
        super().__init__(f"singular matrix: zero pivot at index {pivot_index}")
        self.pivot_index = pivot_index


class NearSingularError(EvaluationError):
    """Potential matrix nearly singular at an evaluation point."""

    def __init__(self, point: "SpacetimePoint", absdet: float, rcond: float):
        super().__init__(
            f"near-singular potential matrix at {point}: |det| = {absdet:.3e}, rcond = {rcond:.3e}"
        )
        self.point = point
        self.absdet = absdet
        self.rcond = rcond


@dataclass(frozen=True)
class SpacetimePoint:
    """Point (x1, x2, t) with z = x1 + i x2."""

    x1: float
    x2: float
    t: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(c) for c in (self.x1, self.x2, self.t)):
            raise ValueError("spacetime coordinates must be finite")

    @classmethod
    def from_z(cls, z: complex, t: float = 0.0) -> "SpacetimePoint":
        z = complex(z)
        return cls(z.real, z.imag, t)

    @property
    def z(self) -> complex:
        return complex(self.x1, self.x2)

    @property
    def zbar(self) -> complex:
        return complex(self.x1, -self.x2)

    def __str__(self) -> str:
        return f"(x1={self.x1:.6g}, x2={self.x2:.6g}, t={self.t:.6g})"


@dataclass(frozen=True)
class FieldSample:
    """Potential values at one point plus numerical diagnostics.

    v_imag is the imaginary part discarded when taking v real; for a
    constraint-satisfying parameter set it is rounding noise.
    cond_estimate is a 1-norm condition estimate of the potential matrix.
    """

    v: float
    w: complex
    absdet: float
    cond_estimate: float
    v_imag: float = 0.0


class LUFactor:
    """Partial-pivoted LU of a square complex matrix (LAPACK zgetrf).

    Exposes solves against the factorization, the absolute determinant and a
    reciprocal-condition estimate.  Exactly singular input raises
    SingularMatrixError carrying the zero-pivot index.
    """

    def __init__(self, matrix: np.ndarray):
        m = np.asarray(matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("matrix must be square")
        anorm = np.linalg.norm(m, 1)
        lu, piv, info = lapack.zgetrf(m)
        if info > 0:
            raise SingularMatrixError(info - 1)
        if info < 0:
            raise ValueError(f"illegal value in argument {-info} of zgetrf")
        self._lu = lu
        self._piv = piv
        self.n = m.shape[0]
        self.absdet = float(np.prod(np.abs(np.diag(lu))))
        rcond, info = lapack.zgecon(lu, anorm)
        self.rcond = float(rcond) if info == 0 else 0.0

    @property
    def near_singular(self) -> bool:
        return self.rcond < NEAR_SINGULAR_RCOND

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        b = np.asarray(rhs, dtype=complex)
        x, info = lapack.zgetrs(self._lu, self._piv, b.reshape(self.n, -1))
        if info != 0:
            raise ValueError(f"zgetrs failed with info={info}")
        return x.reshape(b.shape)

    def inverse(self) -> np.ndarray:
        return self.solve(np.eye(self.n, dtype=complex))


@dataclass(frozen=True)
class LUSolveResult:
    solution: np.ndarray
    absdet: float
    rcond: float

    @property
    def near_singular(self) -> bool:
        return self.rcond < NEAR_SINGULAR_RCOND


def lu_solve(matrix: np.ndarray, rhs: np.ndarray) -> LUSolveResult:
    """Solve matrix @ x = rhs (one or many right-hand sides) via pivoted LU.

    Returns the solutions together with |det| and a reciprocal-condition
    estimate; near-singularity is flagged, exact singularity raises.
    """
    fac = LUFactor(matrix)
    return LUSolveResult(fac.solve(rhs), fac.absdet, fac.rcond)


class PotentialEvaluator:
    """Assembled, immutable state for evaluating one parameter set.

    Precomputes the constant off-diagonal part of A and the three diagonal
    direction matrices; safe to share across threads.
    """

    def __init__(self, params: ParameterSet):
        self.params = params
        lam = params.lambdas
        e = params.energy
        sqrt_e = math.sqrt(e)
        lam2 = lam * lam
        inv_lam2 = 1.0 / lam2
        self.size = lam.size
        self._gammas = params.gammas
        # Coefficients of z, zbar, t in the diagonal of A; these are also the
        # direction matrices d A/d z, d A/d zbar, d A/d t.
        self._diag = {
            "z": -0.5j * sqrt_e * inv_lam2,
            "zbar": np.full(self.size, 0.5j * sqrt_e),
            "t": -3j * e * sqrt_e * (lam2 - inv_lam2**2),
        }
        diff = lam[:, None] - lam[None, :]
        np.fill_diagonal(diff, 1.0)
        off = 1.0 / diff
        np.fill_diagonal(off, 0.0)
        self._offdiag = off
        self._inv_lam2 = inv_lam2
        for arr in (*self._diag.values(), off, inv_lam2):
            arr.setflags(write=False)

    def direction_diagonal(self, direction: str) -> np.ndarray:
        """Diagonal of the constant matrix dA in the given direction."""
        return self._diag[direction]

    def matrix_at(self, z: complex, zbar: complex, t: float) -> np.ndarray:
        """A with z and zbar treated as independent variables."""
        m = self._offdiag.copy()
        d = self._diag
        np.fill_diagonal(m, d["z"] * z + d["zbar"] * zbar + d["t"] * t - self._gammas)
        return m


def build_matrix(ev: PotentialEvaluator, point: SpacetimePoint) -> np.ndarray:
    """The 4N x 4N potential matrix A at one spacetime point."""
    return ev.matrix_at(point.z, point.zbar, point.t)


def _check_index(idx: Sequence[str]) -> tuple[str, ...]:
    idx = tuple(idx)
    if not 1 <= len(idx) <= MAX_DERIVATIVE_ORDER:
        raise ValueError(f"derivative order must be 1..{MAX_DERIVATIVE_ORDER}, got {len(idx)}")
    for d in idx:
        if d not in DIRECTIONS:
            raise ValueError(f"unknown direction {d!r}; expected one of {DIRECTIONS}")
    return idx


def _canonical_cycle(cycle: tuple[str, ...]) -> tuple[str, ...]:
    # Traces of the alternating products are invariant under cyclic rotation.
    return min(cycle[i:] + cycle[:i] for i in range(len(cycle)))


@lru_cache(maxsize=None)
def _trace_terms(idx_key: tuple[str, ...]) -> tuple[tuple[tuple[str, ...], int], ...]:
    """Signed trace monomials of the mixed partial of ln det A.

    Each monomial (cycle, coeff) stands for coeff * tr(prod_i A^-1 D_{cycle_i}).
    Differentiating a monomial inserts the new direction before each existing
    factor with a sign flip, per d(A^-1) = -A^-1 D A^-1.  Keyed by the sorted
    multiset: mixed partials commute.
    """
    terms: dict[tuple[str, ...], int] = {(idx_key[0],): 1}
    for d in idx_key[1:]:
        nxt: dict[tuple[str, ...], int] = {}
        for cycle, coeff in terms.items():
            for i in range(len(cycle)):
                key = _canonical_cycle(cycle[:i] + (d,) + cycle[i:])
                nxt[key] = nxt.get(key, 0) - coeff
        terms = nxt
    return tuple(sorted(terms.items()))


def _trace_sum(factors: dict[str, np.ndarray], key: tuple[str, ...]) -> complex:
    total = 0.0 + 0.0j
    for cycle, coeff in _trace_terms(key):
        prod = factors[cycle[0]]
        for d in cycle[1:]:
            prod = prod @ factors[d]
        total += coeff * np.trace(prod)
    return total


def derivative_table(
    ev: PotentialEvaluator, point: SpacetimePoint, idx_keys: Iterable[tuple[str, ...]]
) -> tuple[dict[tuple[str, ...], complex], LUFactor]:
    """Mixed partials of ln det A for several sorted multisets, one factorization.

    Cheaper than repeated log_det_derivative calls when many derivatives are
    needed at the same point; keys must be sorted tuples over the direction
    alphabet.
    """
    fac = LUFactor(build_matrix(ev, point))
    if fac.near_singular:
        raise NearSingularError(point, fac.absdet, fac.rcond)
    ainv = fac.inverse()
    factors: dict[str, np.ndarray] = {}
    out: dict[tuple[str, ...], complex] = {}
    for key in idx_keys:
        for d in set(key):
            if d not in factors:
                # (A^-1 D_d) scales the columns of A^-1.
                factors[d] = ainv * ev.direction_diagonal(d)[None, :]
        out[key] = _trace_sum(factors, key)
    return out, fac


def log_det_derivative(
    ev: PotentialEvaluator, point: SpacetimePoint, idx: Sequence[str]
) -> complex:
    """Exact mixed partial of ln det A at a point.

    idx is a sequence over {"z", "zbar", "t"} of length 1..5; the result does
    not depend on its ordering.
    """
    key = tuple(sorted(_check_index(idx)))
    return derivative_table(ev, point, (key,))[0][key]


_KEY_V = ("z", "zbar")
_KEY_W = ("z", "z")


def eval_fields(ev: PotentialEvaluator, point: SpacetimePoint) -> FieldSample:
    """Potential values v, w at a point via the trace calculus.

    v = Re(-4 F_z_zbar), w = 12 F_zz for F = ln det A; the imaginary part of
    the v expression is reported in the sample as a reality diagnostic.
    """
    der, fac = derivative_table(ev, point, (_KEY_V, _KEY_W))
    g = -4.0 * der[_KEY_V]
    return FieldSample(
        v=g.real,
        w=12.0 * der[_KEY_W],
        absdet=fac.absdet,
        cond_estimate=1.0 / fac.rcond,
        v_imag=g.imag,
    )


def linear_system_fields(
    ev: PotentialEvaluator, point: SpacetimePoint
) -> tuple[complex, complex]:
    """Secondary evaluation path for (v, w) through linear systems.

    Solves A psi^(j) = -2 i sqrt(E) e_j and the differentiated systems
    A (psi^(j))_z = (i sqrt(E) / (2 lambda_m^2)) psi_m^(j), summing the
    diagonal derivatives; similarly for w with right-hand sides
    -6 i sqrt(E) lambda_j^-2 e_j.  Exists as a cross-check of eval_fields;
    v is returned as the complex trace without taking the real part.
    """
    fac = LUFactor(build_matrix(ev, point))
    if fac.near_singular:
        raise NearSingularError(point, fac.absdet, fac.rcond)
    sqrt_e = math.sqrt(ev.params.energy)
    deriv_scale = (0.5j * sqrt_e * ev._inv_lam2)[:, None]

    psi = fac.solve(-2j * sqrt_e * np.eye(ev.size, dtype=complex))
    psi_z = fac.solve(deriv_scale * psi)
    v = np.trace(psi_z)

    eta = fac.solve(np.diag(-6j * sqrt_e * ev._inv_lam2))
    eta_z = fac.solve(deriv_scale * eta)
    w = np.trace(eta_z)
    return complex(v), complex(w)


def soliton_profile(
    ev: PotentialEvaluator, block: int, xi: complex, t: float = 0.0
) -> tuple[float, complex]:
    """Travel-wave profile (nu_k, omega_k) of one block at profile coordinate xi.

    Built from the 4x4 diagonal subblock of A evaluated at z = xi + c_k t; the
    block depends on (z, t) only through z - c_k t, so the result does not
    depend on t (up to rounding).  For N = 1 this reproduces v, w themselves.
    """
    n_blocks = ev.size // 4
    if not 1 <= block <= n_blocks:
        raise ValueError(f"block index {block} out of range 1..{n_blocks}")
    sl = slice(4 * (block - 1), 4 * block)
    c = velocity(ev.params.lambdas[sl.start], ev.params.energy)
    z = complex(xi) + c * t
    point = SpacetimePoint.from_z(z, t)

    sub = ev.matrix_at(z, z.conjugate(), t)[sl, sl]
    fac = LUFactor(sub)
    if fac.near_singular:
        raise NearSingularError(point, fac.absdet, fac.rcond)
    ainv = fac.inverse()
    factors = {
        d: ainv * ev.direction_diagonal(d)[sl][None, :] for d in ("z", "zbar")
    }
    nu = (-4.0 * _trace_sum(factors, _KEY_V)).real
    omega = 12.0 * _trace_sum(factors, _KEY_W)
    return nu, omega
