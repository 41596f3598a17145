"""Condition functionals of holomorphic maps over ball/polydisc domains.

The pointwise functional is kappa(z) = |J(z)| * |J(z)^-1| in the spectral
norm, i.e. sigma_max/sigma_min of the Jacobian.  In one variable it is
identically 1 wherever the derivative does not vanish.  Suprema over a
domain are estimated from below by stratified shell sampling plus a local
hill climb; points where the Jacobian is singular can be skipped and
counted, so maps only conditioned outside an analytic exceptional set
are still usable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import algebra
from ._sampling import (
    BOUNDARY_GAP,
    chunked_apply,
    coordinate_ascent,
    shell_points,
    subseed,
)
from .errors import (
    DimensionMismatch,
    EmptySample,
    PreconditionFailed,
    SingularBasePoint,
    SingularJacobian,
    SingularMatrix,
)
from .mapkit import DomainSpec, MapExpr, jacobian, jacobian_batch


@dataclass(frozen=True)
class SamplerConfig:
    """Deterministic sampling plan: same seed => same sample set, independent
    of how the evaluation work is partitioned."""

    radial_shells: int = 12
    points_per_shell: int = 96
    rng_seed: int = 0
    refine_steps: int = 20
    exclusion_tolerance: float = 1e-12

    def __post_init__(self):
        if self.radial_shells < 1 or self.points_per_shell < 1:
            raise ValueError("sampler needs at least one shell and one point")
        if self.refine_steps < 0:
            raise ValueError("refine_steps must be >= 0")
        if self.exclusion_tolerance < 0:
            raise ValueError("exclusion_tolerance must be >= 0")
        if self.rng_seed < 0:
            raise ValueError("rng_seed must be a nonnegative integer")


@dataclass
class ConditionReport:
    """Lower estimate of a supremum with the sample that attained it."""

    sup_estimate: float
    argmax_point: np.ndarray
    samples_used: int
    skipped_singular: int
    norm_name: str = algebra.NORM_NAME


def kappa_at(m: MapExpr, z) -> float:
    """Pointwise condition number of the Jacobian; +inf where singular."""
    return algebra.kappa(jacobian(m, z).jacobian)


def sup_kappa(m: MapExpr, dom: DomainSpec, cfg: SamplerConfig, threads: int = 1) -> ConditionReport:
    """Sampled lower estimate of sup kappa over the domain.

    Stratified shell samples are refined with a coordinate-wise hill climb
    from the best point.  Points whose Jacobian is singular (relative
    sigma_min below max(exclusion_tolerance, machine threshold)) are
    skipped and counted when exclusion_tolerance > 0; with a zero
    tolerance a singular sample makes the estimate +inf instead.
    """
    if dom.dim != m.dim:
        raise DimensionMismatch(f"domain has k={dom.dim}, map has k={m.dim}")
    pts = shell_points(dom, cfg.radial_shells, cfg.points_per_shell,
                       subseed(cfg.rng_seed, "kappa-shells"))
    jacs = chunked_apply(lambda c: jacobian_batch(m, c)[1], pts, threads)
    s = algebra.singular_values_batch(jacs)
    smax, smin = s[..., 0], s[..., -1]
    base_singular = smin <= algebra.SINGULAR_RTOL * smax
    with np.errstate(divide="ignore", invalid="ignore"):
        kvals = np.where(base_singular, np.inf, smax / np.maximum(smin, 1e-300))
    kvals = np.maximum(kvals, 1.0)

    excl = cfg.exclusion_tolerance
    skipped = 0
    if excl > 0:
        excluded = smin <= max(algebra.SINGULAR_RTOL, excl) * smax
        skipped = int(excluded.sum())
        if excluded.all():
            raise EmptySample(
                f"all {len(pts)} sampled points were excluded as singular"
            )
        kvals = np.where(excluded, -np.inf, kvals)

    idx = int(np.argmax(kvals))
    best_val = float(kvals[idx])
    best_pt = np.array(pts[idx])
    evals = len(pts)

    if np.isposinf(best_val):  # only reachable with exclusion disabled
        return ConditionReport(best_val, best_pt, evals, skipped)

    counters = {"evals": 0, "skipped": 0}

    def objective(z):
        counters["evals"] += 1
        sv = algebra.singular_values(jacobian(m, z).jacobian)
        if sv[-1] <= max(algebra.SINGULAR_RTOL, excl) * sv[0]:
            counters["skipped"] += 1
            return -np.inf
        return max(float(sv[0] / sv[-1]), 1.0)

    if cfg.refine_steps > 0:
        limit = dom.radius * (1.0 - 0.5 * BOUNDARY_GAP)
        refined_pt, refined_val = coordinate_ascent(
            objective, best_pt, cfg.refine_steps, 0.1 * dom.radius,
            inside=lambda z: dom.norm(z) <= limit,
        )
        if refined_val > best_val:
            best_pt, best_val = refined_pt, float(refined_val)

    return ConditionReport(
        best_val, best_pt, evals + counters["evals"], skipped + counters["skipped"]
    )


def refined_sup(m: MapExpr, a, cfg: SamplerConfig, threads: int = 1) -> float:
    """Sampled sup of |J(a+z) J(a)^-1| over the closed ball |z| <= (1-|a|)/2.

    This functional only normalizes by the base-point Jacobian, so it can
    stay bounded for maps whose raw kappa degenerates.
    """
    a = algebra.as_vector(a)
    if a.size != m.dim:
        raise DimensionMismatch(f"base point has k={a.size}, map has k={m.dim}")
    na = float(np.linalg.norm(a))
    if na >= 1.0:
        raise PreconditionFailed(f"base point must lie in the open unit ball, |a|={na:.3f}")
    try:
        j0_inv = algebra.invert(jacobian(m, a).jacobian)
    except SingularMatrix as exc:
        raise SingularBasePoint(str(exc)) from exc

    rad = 0.5 * (1.0 - na)
    ball = DomainSpec.ball(m.dim, rad)
    offsets = shell_points(ball, cfg.radial_shells, cfg.points_per_shell,
                           subseed(cfg.rng_seed, "refined-sup"))

    def norms(chunk):
        jacs = jacobian_batch(m, a + chunk)[1]
        return algebra.spectral_norm_batch(jacs @ j0_inv)

    vals = chunked_apply(norms, offsets, threads)
    idx = int(np.argmax(vals))
    best_off, best = np.array(offsets[idx]), float(vals[idx])

    def objective(off):
        return algebra.spectral_norm(jacobian(m, a + off).jacobian @ j0_inv)

    if cfg.refine_steps > 0:
        refined_off, refined = coordinate_ascent(
            objective, best_off, cfg.refine_steps, 0.1 * rad,
            inside=lambda off: np.linalg.norm(off) <= rad,  # closed ball
        )
        if refined > best:
            best = float(refined)
    return best


def comparability_ratio(m: MapExpr, z) -> float:
    """|lambda_max| / |lambda_min| over the Jacobian's eigenvalues.

    Always bounded by kappa_at(m, z), since every eigenvalue modulus lies
    between sigma_min and sigma_max.
    """
    jac = jacobian(m, z).jacobian
    sv = algebra.singular_values(jac)
    if sv[-1] <= algebra.SINGULAR_RTOL * sv[0]:
        raise SingularJacobian(f"Jacobian singular at {z}")
    mods = algebra.eigen_moduli(jac)
    return float(mods[-1] / mods[0])
