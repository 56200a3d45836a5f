"""Parameter algebra for the rational Novikov-Veselov solitons at positive energy.

A Grinevich-Zakharov potential is specified by an energy E > 0 and N blocks of
four spectral parameters each.  Within the full arrays lambda_1..lambda_4N,
gamma_1..gamma_4N (1-based indexing here and in all report messages) the
entries are tied together by

    lambda_2j  = -lambda_{2j-1},            gamma_{2j-1} - gamma_2j = 1/lambda_{2j-1},
    lambda_{4j-1} = 1/conj(lambda_{4j-3}),  gamma_{4j-1} = conj(lambda_{4j-3})^2 * conj(gamma_{4j-3}),

so each block is generated by one free pair (lambda, gamma) with lambda != 0
and |lambda| != 1.  Velocities of the travel waves are identified with complex
numbers, c = c1 + i*c2.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

# Rejection margins for the open constraints lambda != 0, |lambda| != 1; closer
# approaches make the potential matrix ill-conditioned.
ZERO_LAMBDA_TOL = 1e-6
UNIT_MODULUS_TOL = 1e-6
# Pairwise lambda distinctness (scaled absolute difference).
DISTINCT_LAMBDA_TOL = 1e-9
# Tolerance for the equality constraints tying the arrays together.
CONSTRAINT_RTOL = 1e-9


class InvalidParameterSetError(ValueError):
    """Raised when a constraint-violating parameter set is rejected."""

    def __init__(self, report: "ValidationReport"):
        super().__init__("; ".join(report.violations) or "invalid parameter set")
        self.report = report


class VelocityInverseError(RuntimeError):
    """Raised when the velocity inversion fails to converge (distinct from
    the velocity lying in the forbidden region, which is not an error)."""


@dataclass(frozen=True)
class ParameterSet:
    """Energy plus the full derived arrays of 4N spectral parameters.

    Instances are dumb containers: nothing is checked beyond array shape, so
    deliberately broken sets can be constructed for diagnostics.  Use
    :func:`validate` for the constraint report and :func:`expand_blocks` to
    build a checked set from block seeds.
    """

    energy: float
    lambdas: np.ndarray
    gammas: np.ndarray

    def __post_init__(self):
        lam = np.asarray(self.lambdas, dtype=complex).copy()
        gam = np.asarray(self.gammas, dtype=complex).copy()
        if lam.ndim != 1 or lam.shape != gam.shape or lam.size == 0 or lam.size % 4:
            raise ValueError("lambdas and gammas must be equal-length 1-d arrays of size 4N")
        lam.setflags(write=False)
        gam.setflags(write=False)
        object.__setattr__(self, "energy", float(self.energy))
        object.__setattr__(self, "lambdas", lam)
        object.__setattr__(self, "gammas", gam)

    @property
    def n_blocks(self) -> int:
        return self.lambdas.size // 4

    def block(self, k: int) -> tuple[np.ndarray, np.ndarray]:
        """Parameter slice of block k (1-based), itself a valid one-block set."""
        if not 1 <= k <= self.n_blocks:
            raise ValueError(f"block index {k} out of range 1..{self.n_blocks}")
        sl = slice(4 * (k - 1), 4 * k)
        return self.lambdas[sl], self.gammas[sl]


@dataclass(frozen=True)
class BlockSeed:
    """Free parameters (lambda_{4k-3}, gamma_{4k-3}) generating one block.

    Validity (lam != 0, |lam| != 1) is checked by expand_blocks/validate,
    not at construction.
    """

    lam: complex
    gamma: complex


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple[str, ...]

    def __bool__(self) -> bool:
        return self.ok


def _close(lhs: complex, rhs: complex, rtol: float = CONSTRAINT_RTOL) -> bool:
    return abs(lhs - rhs) <= rtol * (1.0 + abs(rhs))


def expand_blocks(energy: float, seeds: Sequence[BlockSeed], check: bool = True) -> ParameterSet:
    """Derive the full 4N parameter arrays from N block seeds.

    Per block with seed (lam, gam) the four entries are
    lam, -lam, 1/conj(lam), -1/conj(lam) and
    gam, gam - 1/lam, conj(lam)^2*conj(gam), conj(lam)^2*conj(gam) - conj(lam).

    With check=True (the default) the result is validated and a violating set
    (unit-modulus or zero seed, lambda collision across blocks, ...) raises
    InvalidParameterSetError.
    """
    if energy <= 0:
        raise ValueError("energy must be positive")
    if not seeds:
        raise ValueError("at least one block seed is required")
    lambdas = np.empty(4 * len(seeds), dtype=complex)
    gammas = np.empty_like(lambdas)
    for k, seed in enumerate(seeds):
        lam = complex(seed.lam)
        gam = complex(seed.gamma)
        if lam == 0:
            raise InvalidParameterSetError(
                ValidationReport(False, (f"lambda[{4 * k + 1}] is zero within tolerance",))
            )
        mirror = 1.0 / lam.conjugate()
        lambdas[4 * k : 4 * k + 4] = (lam, -lam, mirror, -mirror)
        gam_mirror = lam.conjugate() ** 2 * gam.conjugate()
        gammas[4 * k : 4 * k + 4] = (gam, gam - 1.0 / lam, gam_mirror, gam_mirror - 1.0 / mirror)
    ps = ParameterSet(energy, lambdas, gammas)
    if check:
        report = validate(ps)
        if not report.ok:
            raise InvalidParameterSetError(report)
    return ps


def validate(p: ParameterSet) -> ValidationReport:
    """Check every constraint of the parameter family; report violations by name.

    Indices in the messages are 1-based, matching the block structure
    lambda_1..lambda_4N.
    """
    v: list[str] = []
    lam = p.lambdas
    gam = p.gammas
    n4 = lam.size

    if not p.energy > 0:
        v.append("energy E must be positive")
    if not (np.all(np.isfinite(lam.view(float))) and np.all(np.isfinite(gam.view(float)))):
        v.append("parameters must be finite")
        return ValidationReport(False, tuple(v))

    for j in range(n4):
        if abs(lam[j]) < ZERO_LAMBDA_TOL:
            v.append(f"lambda[{j + 1}] is zero within tolerance")
        if abs(abs(lam[j]) - 1.0) < UNIT_MODULUS_TOL:
            v.append(f"|lambda[{j + 1}]| = 1 within tolerance")
    for l in range(n4):
        for m in range(l + 1, n4):
            if abs(lam[l] - lam[m]) <= DISTINCT_LAMBDA_TOL * max(1.0, abs(lam[l])):
                v.append(f"lambda[{l + 1}] and lambda[{m + 1}] coincide")

    # Pair constraints, j = 1..2N (1-based pairs (2j-1, 2j)).
    for i in range(n4 // 2):
        a, b = 2 * i, 2 * i + 1
        if not _close(lam[b], -lam[a]):
            v.append(f"lambda[{b + 1}] = -lambda[{a + 1}] violated")
        if abs(lam[a]) >= ZERO_LAMBDA_TOL and not _close(gam[a] - gam[b], 1.0 / lam[a]):
            v.append(f"gamma[{a + 1}] - gamma[{b + 1}] = 1/lambda[{a + 1}] violated")

    # Conjugation constraints, j = 1..N (entries 4j-3 and 4j-1).
    for k in range(n4 // 4):
        a, b = 4 * k, 4 * k + 2
        if abs(lam[a]) >= ZERO_LAMBDA_TOL:
            if not _close(lam[b], 1.0 / lam[a].conjugate()):
                v.append(f"lambda[{b + 1}] = 1/conj(lambda[{a + 1}]) violated")
            if not _close(gam[b], lam[a].conjugate() ** 2 * gam[a].conjugate()):
                v.append(
                    f"gamma[{b + 1}] = conj(lambda[{a + 1}])^2 conj(gamma[{a + 1}]) violated"
                )

    return ValidationReport(not v, tuple(v))


def velocity(lam: complex, energy: float) -> complex:
    """Travel-wave velocity of the one-block family containing lam.

    c = 6E (conj(lam)^2 + 1/lam^2 + lam^2/conj(lam)^2); the same value is
    obtained from any of the four members lam, -lam, +/-1/conj(lam).
    """
    lam = complex(lam)
    if lam == 0:
        raise ValueError("velocity is undefined for lambda = 0")
    l2 = lam * lam
    lb2 = (lam.conjugate()) ** 2
    return 6.0 * energy * (lb2 + 1.0 / l2 + l2 / lb2)


def block_velocities(p: ParameterSet) -> np.ndarray:
    """Velocity of each block, computed from its first member."""
    return np.array(
        [velocity(p.lambdas[4 * k], p.energy) for k in range(p.n_blocks)], dtype=complex
    )


def velocity_spread(p: ParameterSet) -> float:
    """Largest relative within-block velocity mismatch.

    Zero up to rounding for any constraint-satisfying set; a large value
    signals broken block structure.
    """
    worst = 0.0
    for k in range(p.n_blocks):
        cs = [velocity(p.lambdas[4 * k + j], p.energy) for j in range(4)]
        scale = 1.0 + abs(cs[0])
        worst = max(worst, max(abs(c - cs[0]) for c in cs[1:]) / scale)
    return worst


def _deltoid_implicit(x: float, y: float) -> float:
    """Implicit quartic of the forbidden-region boundary in u = c/E units.

    The boundary is the three-cusped curve phi -> 6(2 e^{-i phi} + e^{2 i phi})
    (cusps at radius 18 in the directions 0, +-2pi/3, waists at radius 6 in
    between); it is the |lambda| -> 1 limit of the attainable velocities.
    Negative inside, zero on the curve, positive outside.
    """
    r2 = x * x + y * y
    return r2 * r2 - 48.0 * x**3 + 144.0 * x * y * y + 648.0 * r2 - 34992.0


def forbidden_region_contains(c: complex, energy: float) -> bool:
    """Whether velocity c admits no one-block travel wave (boundary included).

    True exactly when u = c/E lies inside or on the three-cusped boundary
    curve; every velocity attained by a valid lambda lies strictly outside.
    """
    if energy <= 0:
        raise ValueError("energy must be positive")
    u = complex(c) / energy
    return _deltoid_implicit(u.real, u.imag) <= 0.0


def _boundary_point(phi_p: float) -> complex:
    return 6.0 * (2.0 * cmath.exp(-1j * phi_p) + cmath.exp(2j * phi_p))


def forbidden_region_bound(c: complex, energy: float) -> float:
    """Radial extent of the forbidden velocity region in the direction of c.

    Velocities c' with arg(c') = arg(c) are forbidden exactly for
    |c'| <= bound; the extent runs from 6E (waist directions +-pi/3, pi) to
    18E (cusp directions 0, +-2pi/3).  Computed from the parametric boundary:
    the region is star-shaped, and as the parameter runs over one arc between
    cusps the polar angle of the boundary point sweeps one third of the turn
    monotonically.
    """
    if energy <= 0:
        raise ValueError("energy must be positive")
    third = 2.0 * math.pi / 3.0
    # Fold the target direction into the arc phi_p in [0, 2pi/3], on which
    # arg(_boundary_point) decreases from 0 to -2pi/3 (the curve has a
    # three-fold rotation symmetry).
    target = cmath.phase(complex(c))
    target -= third * math.ceil(target / third)
    phi_p = brentq(
        lambda p: cmath.phase(_boundary_point(p)) - target, 0.0, third, xtol=1e-14
    )
    return energy * abs(_boundary_point(phi_p))


def _inverse_residual(s: float, theta: float, u0: complex) -> complex:
    mu = cmath.exp(-2j * theta)
    return s * mu + mu.conjugate() ** 2 - u0


def _newton_velocity_inverse(
    u0: complex, s0: float, theta0: float, tol: float, max_iter: int = 80
) -> tuple[float, float, float]:
    """Damped Newton on f(s, theta) = s e^{-2 i theta} + e^{4 i theta} - u0.

    Two real unknowns against Re f, Im f; returns (s, theta, |f|).
    """
    s, th = s0, theta0
    f = _inverse_residual(s, th, u0)
    for _ in range(max_iter):
        if abs(f) <= tol:
            break
        mu = cmath.exp(-2j * th)
        df_ds = mu
        df_dth = -2j * s * mu + 4j * mu.conjugate() ** 2
        det = df_ds.real * df_dth.imag - df_ds.imag * df_dth.real
        if det == 0:
            break
        ds = (-f.real * df_dth.imag + f.imag * df_dth.real) / det
        dth = (-df_ds.real * f.imag + df_ds.imag * f.real) / det
        # Backtracking line search on the residual norm.
        step = 1.0
        for _ in range(30):
            f_new = _inverse_residual(s + step * ds, th + step * dth, u0)
            if abs(f_new) < abs(f):
                s, th, f = s + step * ds, th + step * dth, f_new
                break
            step *= 0.5
        else:
            break
    return s, th, abs(f)


def solve_velocity_inverse(
    c: complex, energy: float, n_starts: int = 16, tol: float = 1e-12
) -> np.ndarray | None:
    """Recover the four-element lambda set whose travel-wave velocity is c.

    Returns None when c lies in the forbidden region (no set exists) and the
    canonically ordered set otherwise; raises VelocityInverseError if no
    Newton start converges.  The representative root is fixed to |lambda| > 1;
    with lam = rho e^{i theta} the velocity relation reads
    c/(6E) = s e^{-2 i theta} + e^{4 i theta} with s = rho^2 + 1/rho^2 > 2,
    which is solved for (s, theta) and then rho^2 = (s + sqrt(s^2 - 4))/2.
    """
    if energy <= 0:
        raise ValueError("energy must be positive")
    if forbidden_region_contains(c, energy):
        return None
    u0 = complex(c) / (6.0 * energy)
    res_tol = tol * max(1.0, abs(u0))
    s0 = max(2.2, abs(u0))
    for k in range(n_starts):
        s, th, res = _newton_velocity_inverse(u0, s0, math.pi * k / n_starts, res_tol)
        if res > res_tol or s <= 2.0 + 1e-9:
            continue
        rho = math.sqrt((s + math.sqrt(s * s - 4.0)) / 2.0)
        lam = rho * cmath.exp(1j * th)
        if _close(velocity(lam, energy), complex(c), rtol=1e-9):
            mirror = 1.0 / lam.conjugate()
            return canonical_lambda_order([lam, -lam, mirror, -mirror])
    raise VelocityInverseError(
        f"velocity inversion did not converge for c={c!r}, E={energy!r}"
    )


def canonical_lambda_order(lams: Sequence[complex]) -> np.ndarray:
    """Deterministic set ordering: moduli > 1 first, then by principal argument.

    Signed zeros are flushed before taking the argument so values on the
    negative real axis sort by +pi regardless of how they were produced.
    """

    def key(l: complex):
        return abs(l) <= 1.0, cmath.phase(complex(l.real + 0.0, l.imag + 0.0))

    return np.array(sorted((complex(l) for l in lams), key=key), dtype=complex)


def translate_gammas(p: ParameterSet, zeta: complex, tau: float) -> ParameterSet:
    """Parameter shift realizing the translation (z, t) -> (z + zeta, t + tau).

    The returned set has gammas gamma_j - delta_j with

        delta_j = (i sqrt(E)/2)(conj(zeta) - zeta/lambda_j^2)
                  - 3 i E^(3/2) tau (lambda_j^2 - 1/lambda_j^4),

    absorbing the shift of the potential matrix diagonal, so the shifted
    fields satisfy v~(z, t) = v(z + zeta, t + tau) and likewise for w.  The
    block constraints are preserved exactly: delta is even in lambda and
    delta(1/conj(lambda)) = conj(lambda)^2 conj(delta(lambda)).
    """
    lam = p.lambdas
    sqrt_e = math.sqrt(p.energy)
    lam2 = lam * lam
    delta = 0.5j * sqrt_e * (np.conj(zeta) - zeta / lam2) - 3j * p.energy * sqrt_e * tau * (
        lam2 - 1.0 / lam2**2
    )
    return ParameterSet(p.energy, lam, p.gammas - delta)


# -- parameter-set JSON schema -------------------------------------------------
#
# {"E": number > 0, "blocks": [{"lambda": [re, im], "gamma": [re, im]}, ...]}
#
# Only block seeds are ever read from files; the full 4N arrays are derived.


def _schema_complex(obj, where: str) -> complex:
    if (
        not isinstance(obj, (list, tuple))
        or len(obj) != 2
        or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in obj)
    ):
        raise ValueError(f"{where}: expected [re, im] pair of numbers")
    return complex(obj[0], obj[1])


def parameter_set_from_dict(obj) -> ParameterSet:
    """Build an (unvalidated) ParameterSet from the JSON schema above.

    Schema violations raise ValueError naming the offending key; run
    :func:`validate` afterwards for the constraint report.
    """
    if not isinstance(obj, dict):
        raise ValueError("top level: expected an object")
    try:
        energy = obj["E"]
    except KeyError:
        raise ValueError('missing key "E"') from None
    if not isinstance(energy, (int, float)) or isinstance(energy, bool) or not energy > 0:
        raise ValueError('"E": expected a positive number')
    blocks = obj.get("blocks")
    if not isinstance(blocks, list) or not blocks:
        raise ValueError('"blocks": expected a non-empty list')
    seeds = []
    for i, blk in enumerate(blocks):
        if not isinstance(blk, dict) or "lambda" not in blk or "gamma" not in blk:
            raise ValueError(f'blocks[{i}]: expected an object with "lambda" and "gamma"')
        seeds.append(
            BlockSeed(
                _schema_complex(blk["lambda"], f'blocks[{i}].lambda'),
                _schema_complex(blk["gamma"], f'blocks[{i}].gamma'),
            )
        )
    return expand_blocks(float(energy), seeds, check=False)


def load_parameter_set(path: str | Path) -> ParameterSet:
    """Read a parameter-set JSON file (unvalidated; see parameter_set_from_dict)."""
    with open(path, "r", encoding="utf-8") as fh:
        return parameter_set_from_dict(json.load(fh))
