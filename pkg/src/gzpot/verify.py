"""Numerical witnesses: equation residuals, travel-wave exactness, splitting.

The potential pair must satisfy

    d_t v = 4 Re(4 d_z^3 v + d_z(v w) - E d_z w),
    d_zbar w = -3 d_z v,        v real,

and for large |t| the field splits into the per-block travel waves
nu_k(z - c_k t), omega_k(z - c_k t).  Everything here is evaluated from the
exact mixed partials of F = ln det A; derivatives of v = Re(g),
g = -4 F_z_zbar, use the Wirtinger rule d_z Re(g) = (d_z g + conj(d_zbar g))/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .params import block_velocities, velocity
from .potential import (
    PotentialEvaluator,
    SpacetimePoint,
    derivative_table,
    eval_fields,
    soliton_profile,
)

# Derivative multisets of F entering the residuals (sorted keys).
_K_V = ("z", "zbar")
_K_W = ("z", "z")
_K_TV = ("t", "z", "zbar")
_K_ZV = ("z", "z", "zbar")
_K_ZBV = ("z", "zbar", "zbar")
_K_ZW = ("z", "z", "z")
_K_Z3V_A = ("z", "z", "z", "z", "zbar")
_K_Z3V_B = ("z", "zbar", "zbar", "zbar", "zbar")
_RESIDUAL_KEYS = (_K_V, _K_W, _K_TV, _K_ZV, _K_ZBV, _K_ZW, _K_Z3V_A, _K_Z3V_B)


@dataclass(frozen=True)
class ResidualReport:
    """Max evolution and constraint residuals over a point sample."""

    evolution_residual: float
    constraint_residual: float
    n_points: int
    seed: int | None = None

    def to_json_dict(self) -> dict:
        return {
            "evolution_residual": self.evolution_residual,
            "constraint_residual": self.constraint_residual,
            "points": self.n_points,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class AsymptoticsTable:
    errors_v: tuple[float, ...]
    errors_w: tuple[float, ...]
    probe_decay: tuple[float, ...]

    def to_json_dict(self) -> dict:
        return {
            "errors_v": list(self.errors_v),
            "errors_w": list(self.errors_w),
            "probe_decay": list(self.probe_decay),
        }


@dataclass(frozen=True)
class AsymptoticsReport:
    """Per-time splitting errors for one block, both time directions.

    forward holds the sup over the profile window of |v(xi + c_k t, t) -
    nu_k(xi)| and the w analogue for each t in times, plus the decay of
    sup |v| along a probe velocity distinct from every block velocity;
    backward is the same with t negated.
    """

    block: int
    velocity: complex
    times: tuple[float, ...]
    probe_velocity: complex
    forward: AsymptoticsTable
    backward: AsymptoticsTable

    def to_json_dict(self) -> dict:
        return {
            "block": self.block,
            "velocity": [self.velocity.real, self.velocity.imag],
            "times": list(self.times),
            "probe_velocity": [self.probe_velocity.real, self.probe_velocity.imag],
            "forward": self.forward.to_json_dict(),
            "backward": self.backward.to_json_dict(),
        }


def sample_points(
    n: int, seed: int, radius: float = 5.0, t_range: float = 2.0
) -> list[SpacetimePoint]:
    """n points uniform on the disc |x| <= radius times uniform t in [-t_range, t_range]."""
    rng = np.random.default_rng(seed)
    r = radius * np.sqrt(rng.uniform(size=n))
    ang = rng.uniform(0.0, 2.0 * math.pi, size=n)
    t = rng.uniform(-t_range, t_range, size=n)
    return [
        SpacetimePoint(ri * math.cos(ai), ri * math.sin(ai), ti)
        for ri, ai, ti in zip(r, ang, t)
    ]


def point_residuals(ev: PotentialEvaluator, point: SpacetimePoint) -> tuple[float, float]:
    """(evolution, constraint) residual magnitudes at a single point."""
    der, _ = derivative_table(ev, point, _RESIDUAL_KEYS)
    v = (-4.0 * der[_K_V]).real
    w = 12.0 * der[_K_W]
    dt_v = (-4.0 * der[_K_TV]).real
    # d_z of v = Re(-4 F_z_zbar) by the Wirtinger rule; its conjugate-pair
    # structure makes the constraint residual a genuine reality check.
    dz_v = -2.0 * (der[_K_ZV] + der[_K_ZBV].conjugate())
    dz3_v = -2.0 * (der[_K_Z3V_A] + der[_K_Z3V_B].conjugate())
    dz_w = 12.0 * der[_K_ZW]
    dzbar_w = 12.0 * der[_K_ZV]

    rhs = 4.0 * (4.0 * dz3_v + dz_v * w + v * dz_w - ev.params.energy * dz_w).real
    evolution = abs(dt_v - rhs)
    constraint = abs(dzbar_w + 3.0 * dz_v)
    return evolution, constraint


def nv_residual(
    ev: PotentialEvaluator, points: list[SpacetimePoint], seed: int | None = None
) -> ResidualReport:
    """Max equation residuals over a point sample.

    All derivatives are analytic (trace calculus); near-singular evaluation
    aborts with the offending point attached to the exception.
    """
    evolution = 0.0
    constraint = 0.0
    for pt in points:
        e, c = point_residuals(ev, pt)
        evolution = max(evolution, e)
        constraint = max(constraint, c)
    return ResidualReport(evolution, constraint, len(points), seed)


def travel_wave_error(
    ev: PotentialEvaluator,
    dt: float,
    points: list[SpacetimePoint],
    block: int = 1,
) -> float:
    """Max of |v(z + c dt, t + dt) - v(z, t)| over the points.

    c is the velocity of the chosen block.  Zero up to rounding iff the
    potential is a travel wave, which happens exactly for N = 1; for N > 1
    the error is genuinely nonzero for every candidate block velocity.
    """
    c = velocity(ev.params.lambdas[4 * (block - 1)], ev.params.energy)
    worst = 0.0
    for pt in points:
        shifted = SpacetimePoint.from_z(pt.z + c * dt, pt.t + dt)
        worst = max(worst, abs(eval_fields(ev, shifted).v - eval_fields(ev, pt).v))
    return worst


def _window_grid(radius: float, n: int) -> list[complex]:
    g = np.linspace(-radius, radius, n)
    return [complex(a, b) for a in g for b in g if a * a + b * b <= radius * radius]


def asymptotic_error_sweep(
    ev: PotentialEvaluator,
    block: int,
    times: list[float],
    window_radius: float = 3.0,
    window_points: int = 13,
    probe_velocity: complex = 0j,
) -> AsymptoticsReport:
    """Splitting experiment for one block over a list of times.

    For each t (both signs, reported separately) the full field is compared
    against the block profile on the co-moving window |xi| <= window_radius,
    and sup |v| is recorded along the probe velocity, which must differ from
    every block velocity (there the field must die out).
    """
    times = [float(t) for t in times]
    if not times or any(t <= 0 for t in times) or any(
        b <= a for a, b in zip(times, times[1:])
    ):
        raise ValueError("times must be positive and strictly increasing")
    velocities = block_velocities(ev.params)
    if not 1 <= block <= velocities.size:
        raise ValueError(f"block index {block} out of range 1..{velocities.size}")
    for a in range(velocities.size):
        for b in range(a + 1, velocities.size):
            if abs(velocities[a] - velocities[b]) <= 1e-9 * (1.0 + abs(velocities[a])):
                raise ValueError(f"blocks {a + 1} and {b + 1} share a velocity")
        if abs(probe_velocity - velocities[a]) <= 1e-9 * (1.0 + abs(velocities[a])):
            raise ValueError(f"probe velocity coincides with block {a + 1}")

    c = complex(velocities[block - 1])
    window = _window_grid(window_radius, window_points)
    profiles = [soliton_profile(ev, block, xi) for xi in window]

    tables = []
    for sign in (1.0, -1.0):
        errors_v, errors_w, probe = [], [], []
        for t in times:
            tt = sign * t
            ev_err = 0.0
            ew_err = 0.0
            probe_sup = 0.0
            for xi, (nu, omega) in zip(window, profiles):
                sample = eval_fields(ev, SpacetimePoint.from_z(xi + c * tt, tt))
                ev_err = max(ev_err, abs(sample.v - nu))
                ew_err = max(ew_err, abs(sample.w - omega))
                probe_sample = eval_fields(
                    ev, SpacetimePoint.from_z(xi + probe_velocity * tt, tt)
                )
                probe_sup = max(probe_sup, abs(probe_sample.v))
            errors_v.append(ev_err)
            errors_w.append(ew_err)
            probe.append(probe_sup)
        tables.append(AsymptoticsTable(tuple(errors_v), tuple(errors_w), tuple(probe)))

    return AsymptoticsReport(
        block=block,
        velocity=c,
        times=tuple(times),
        probe_velocity=complex(probe_velocity),
        forward=tables[0],
        backward=tables[1],
    )
