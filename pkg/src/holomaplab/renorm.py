"""Brody-Zalcman rescaling engine.

For a holomorphic map on the unit ball the boundary-weighted derivative
functional

    lambda(m) = sup_{|z|<1} (1 - |z|) |J(z)|

is estimated by sampling plus hill climbing.  At a near-maximizer a the
rescaled map

    psi(z) = m(a + B z),   B = J(a)^-1

satisfies psi'(0) = I, and whenever sup kappa <= C the rescaled
derivative is bounded by 2C on |z| <= lambda/(2C), with the intermediate
shift bound |B z| <= (1 - |a|)/2.  Both bounds are checked on a sampled
grid and recorded rather than asserted: a failed check diagnoses an
undersampled lambda or an undersized C, not a mathematical breakdown.
For a sequence of maps the lambda series separates the normal regime
(bounded) from the rescaling regime (lambda growing without bound).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import algebra
from ._sampling import chunked_apply, coordinate_ascent, shell_points, subseed
from .conditioning import SamplerConfig
from .errors import RadiusExceedsValidity, SingularJacobianAtBase, SingularMatrix
from .mapkit import DomainSpec, MapExpr, evaluate_batch, jacobian, jacobian_batch, reparametrize


@dataclass
class BoundCheck:
    """Sampled verification of the rescaled-derivative and shift bounds."""

    max_jacobian_norm: float
    bound: float
    passed: bool
    worst_point: np.ndarray
    shift_max: float
    shift_limit: float
    shift_ok: bool


@dataclass
class RenormStep:
    """One rescaling record: functional value, base point, normalizing matrix,
    the rescaled map and the radius on which its bounds were checked."""

    lambda_: float
    base_point: np.ndarray
    b_matrix: np.ndarray
    psi: MapExpr
    validity_radius: float
    bound_check: BoundCheck


def lambda_functional(m: MapExpr, cfg: SamplerConfig, threads: int = 1):
    """Sampled-and-refined lower estimate of sup (1-|z|)|J(z)| on the unit
    ball, together with the near-maximizer that attained it."""
    dom = DomainSpec.ball(m.dim, 1.0)
    pts = shell_points(dom, cfg.radial_shells, cfg.points_per_shell,
                       subseed(cfg.rng_seed, "lambda-shells"))
    norms = chunked_apply(
        lambda c: algebra.spectral_norm_batch(jacobian_batch(m, c)[1]), pts, threads
    )
    weights = 1.0 - np.linalg.norm(pts, axis=1)
    objective_vals = weights * norms
    idx = int(np.argmax(objective_vals))
    best_pt = np.array(pts[idx])
    best = float(objective_vals[idx])

    def objective(z):
        return (1.0 - np.linalg.norm(z)) * algebra.spectral_norm(jacobian(m, z).jacobian)

    if cfg.refine_steps > 0:
        refined_pt, refined = coordinate_ascent(
            objective, best_pt, cfg.refine_steps, 0.1,
            inside=lambda z: np.linalg.norm(z) < 1.0,
        )
        if refined > best:
            best_pt, best = refined_pt, float(refined)
    return best, best_pt


def bz_step(
    m: MapExpr,
    c_bound: float,
    cfg: SamplerConfig,
    grid_factor: float = 0.9,
    bound_rtol: float = 1e-6,
    threads: int = 1,
) -> RenormStep:
    """Build one rescaling step and check its derivative bounds.

    c_bound is caller-supplied (typically a sup-kappa estimate plus a
    safety margin); the step does not recompute it.  The recorded
    validity radius is lambda/(2 c_bound); the check grid conservatively
    stays within grid_factor of it.
    """
    if c_bound < 1.0:
        raise ValueError("c_bound must be >= 1 (kappa is never below 1)")
    lam, a = lambda_functional(m, cfg, threads)
    try:
        b_matrix = algebra.invert(jacobian(m, a).jacobian)
    except SingularMatrix as exc:
        raise SingularJacobianAtBase(str(exc)) from exc
    psi = reparametrize(m, a, b_matrix)
    validity = lam / (2.0 * c_bound)

    grid_dom = DomainSpec.ball(m.dim, grid_factor * validity)
    grid = shell_points(grid_dom, cfg.radial_shells, cfg.points_per_shell,
                        subseed(cfg.rng_seed, "bz-grid"))
    norms = chunked_apply(
        lambda c: algebra.spectral_norm_batch(jacobian_batch(psi, c)[1]), grid, threads
    )
    imax = int(np.argmax(norms))
    max_norm = float(norms[imax])
    bound = 2.0 * c_bound
    shifts = np.linalg.norm(grid @ b_matrix.T, axis=1)
    shift_max = float(shifts.max())
    shift_limit = 0.5 * (1.0 - float(np.linalg.norm(a)))
    check = BoundCheck(
        max_jacobian_norm=max_norm,
        bound=bound,
        passed=max_norm <= bound * (1.0 + bound_rtol),
        worst_point=np.array(grid[imax]),
        shift_max=shift_max,
        shift_limit=shift_limit,
        shift_ok=shift_max <= shift_limit + 1e-9,
    )
    return RenormStep(lam, a, b_matrix, psi, validity, check)


def bz_sequence(
    family: Callable[[int], MapExpr],
    n_values: Sequence[int],
    c_bound: float,
    cfg: SamplerConfig,
    grid_factor: float = 0.9,
    threads: int = 1,
) -> list[RenormStep]:
    """One rescaling step per family member; the lambda series of the result
    shows whether the family escapes (lambda unbounded) or stays normal."""
    return [
        bz_step(family(n), c_bound, cfg, grid_factor=grid_factor, threads=threads)
        for n in n_values
    ]


def convergence_diagnostic(
    steps: Sequence[RenormStep], radius: float, grid_per_axis: int
) -> list[float]:
    """Successive sup-differences d_i = max |psi_{i+1} - psi_i| on a shared
    grid of the ball |z| <= radius.

    The grid is the Cartesian product of grid_per_axis equispaced values
    per real axis, restricted to the ball; with an odd grid_per_axis it
    contains the points of norm exactly `radius` on each axis.  Decreasing
    d_i is evidence of convergence of the rescaled sequence; the limit map
    itself is not computed.
    """
    if len(steps) < 2:
        return []
    k = steps[0].psi.dim
    if any(s.psi.dim != k for s in steps):
        raise RadiusExceedsValidity("steps have mismatched dimensions")
    vmin = min(s.validity_radius for s in steps)
    if radius > vmin * (1.0 + 1e-12):
        raise RadiusExceedsValidity(
            f"radius {radius} exceeds the smallest validity radius {vmin}"
        )
    if grid_per_axis < 2:
        raise ValueError("grid_per_axis must be >= 2")
    if grid_per_axis ** (2 * k) > 2_000_000:
        raise ValueError("comparison grid too large; reduce grid_per_axis")
    axes = np.linspace(-radius, radius, grid_per_axis)
    mesh = np.meshgrid(*([axes] * (2 * k)), indexing="ij")
    flat = np.stack([axis.ravel() for axis in mesh], axis=1)
    pts = flat[:, :k] + 1j * flat[:, k:]
    pts = pts[np.linalg.norm(pts, axis=1) <= radius * (1.0 + 1e-12)]
    values = [evaluate_batch(s.psi, pts) for s in steps]
    return [
        float(np.max(np.linalg.norm(values[i + 1] - values[i], axis=1)))
        for i in range(len(values) - 1)
    ]
