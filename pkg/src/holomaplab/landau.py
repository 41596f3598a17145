"""Inscribed-ball (Landau-number) estimation via Newton membership certificates.

The Landau number of a map on a domain is the supremum of radii r such
that the image contains a Euclidean ball of radius r.  It is estimated
from below by certifying membership of sphere points: a certificate is a
preimage strictly inside the domain whose image matches the target to
tolerance.  Radii grow multiplicatively from r0 = tolerance * 1e3; the
last radius whose whole direction set certified is the reported lower
bound.  A Newton failure is never proof of non-membership, so the upper
bound from the first failing shell is heuristic - except for the Harris
and Duren-Rudin maps on the unit polydisc, where the counterexample
witnesses supply a certified bound.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from . import algebra
from ._sampling import interior_points, sphere_directions, subseed
from .counterexamples import certify_no_ball
from .errors import CenterNotInImage, DimensionMismatch
from .mapkit import (
    DomainSpec,
    DurenRudin,
    Harris,
    MapExpr,
    dilate,
    evaluate,
    evaluate_batch,
    jacobian_batch,
)

_DIVERGENCE_FACTOR = 25.0
_MAX_SHELLS = 200_000


@dataclass(frozen=True)
class NewtonConfig:
    """Newton solver plan; deterministic given rng_seed."""

    max_iterations: int = 40
    tolerance: float = 1e-9
    multistart_count: int = 8
    continuation_steps: int = 8
    domain_margin_min: float = 1e-4
    rng_seed: int = 0

    def __post_init__(self):
        if self.max_iterations < 1 or self.multistart_count < 1 or self.continuation_steps < 1:
            raise ValueError("iteration/start/continuation counts must be positive")
        if not self.tolerance > 0 or not self.domain_margin_min > 0:
            raise ValueError("tolerance and domain_margin_min must be positive")
        if self.rng_seed < 0:
            raise ValueError("rng_seed must be a nonnegative integer")


@dataclass
class MembershipCertificate:
    """Verified preimage: |m(preimage) - target| = residual <= tolerance and
    the preimage keeps domain_margin > 0 to the boundary."""

    target: np.ndarray
    preimage: np.ndarray
    residual: float
    domain_margin: float


@dataclass
class NotFound:
    """Failed membership search; carries the best residual attained.
    Not a proof of non-membership."""

    best_residual: float
    best_point: np.ndarray


@dataclass
class LandauEstimate:
    """Certified lower bound r_lo and labeled upper bound r_hi for the largest
    ball around `center` inside the image."""

    center: np.ndarray
    r_lo: float
    r_hi: float
    r_hi_label: str
    certificates: list
    directions_tested: int
    shell_history: list


def _newton_point(m, target, start, dom, cfg):
    """Single-point damped-free Newton; returns (z, residual)."""
    z = np.array(start, dtype=np.complex128)
    escape = _DIVERGENCE_FACTOR * (dom.radius + float(np.linalg.norm(target)) + 1.0)
    best_z, best_res = z.copy(), np.inf
    for _ in range(cfg.max_iterations):
        vals, jacs = jacobian_batch(m, z[None, :])
        f = vals[0] - target
        res = float(np.linalg.norm(f))
        if res < best_res:
            best_z, best_res = z.copy(), res
        if res <= cfg.tolerance:
            break
        try:
            step = np.linalg.solve(jacs[0], f)
        except np.linalg.LinAlgError:
            break  # singular step: caller retries from the next start
        z = z - step
        if np.linalg.norm(z) > escape:
            break
    return best_z, best_res


def _continuation_start(m, z0, b0, b1, dom, cfg):
    """Track the preimage along the segment b0 -> b1 to warm-start Newton."""
    z = np.array(z0, dtype=np.complex128)
    for t in np.linspace(0.0, 1.0, cfg.continuation_steps + 1)[1:]:
        z, res = _newton_point(m, (1.0 - t) * b0 + t * b1, z, dom, cfg)
        if not np.isfinite(res):
            break
    return z


def solve_membership(m: MapExpr, b, dom: DomainSpec, cfg: NewtonConfig, known=()):
    """Newton search for a preimage of b strictly inside the domain.

    Start list: continuation from the nearest previously certified target
    (when `known` pairs are supplied), the origin, then seeded interior
    multistarts.  Returns a MembershipCertificate on success and NotFound
    (with the best residual) otherwise.
    """
    b = algebra.as_vector(b)
    if b.size != m.dim or dom.dim != m.dim:
        raise DimensionMismatch(
            f"target k={b.size}, domain k={dom.dim}, map k={m.dim}"
        )
    starts = []
    if known:
        t0, z0 = min(known, key=lambda pair: float(np.linalg.norm(pair[0] - b)))
        starts.append(_continuation_start(m, z0, np.asarray(t0, complex), b, dom, cfg))
    starts.append(np.zeros(m.dim, dtype=np.complex128))
    starts.extend(interior_points(dom, cfg.multistart_count,
                                  subseed(cfg.rng_seed, "newton-starts")))
    best_res, best_z = np.inf, np.zeros(m.dim, dtype=np.complex128)
    for start in starts:
        z, res = _newton_point(m, b, start, dom, cfg)
        if res <= cfg.tolerance:
            margin = float(dom.margin(z))
            if margin >= cfg.domain_margin_min:
                return MembershipCertificate(b, z, res, margin)
        if res < best_res:
            best_res, best_z = res, z
    return NotFound(float(best_res), best_z)


def _newton_batch(m, targets, warm, dom, cfg):
    """Vectorized Newton across a shell of targets; per-point arithmetic is
    independent, so results do not depend on batch partitioning."""
    z = np.array(warm, dtype=np.complex128)
    n = z.shape[0]
    alive = np.ones(n, dtype=bool)
    escape = _DIVERGENCE_FACTOR * (dom.radius + float(np.abs(targets).max()) + 1.0)
    for _ in range(cfg.max_iterations):
        if not alive.any():
            break
        idx = np.flatnonzero(alive)
        vals, jacs = jacobian_batch(m, z[idx])
        f = vals - targets[idx]
        res = np.linalg.norm(f, axis=1)
        done = res <= cfg.tolerance
        alive[idx[done]] = False
        rem = idx[~done]
        if rem.size == 0:
            continue
        f_rem, j_rem = f[~done], jacs[~done]
        try:
            step = np.linalg.solve(j_rem, f_rem[..., None])[..., 0]
        except np.linalg.LinAlgError:
            step = np.zeros_like(f_rem)
            for t in range(rem.size):
                try:
                    step[t] = np.linalg.solve(j_rem[t], f_rem[t])
                except np.linalg.LinAlgError:
                    step[t] = 0.0  # frozen; the scalar salvage path retries it
        z[rem] = z[rem] - step
        runaway = rem[np.abs(z[rem]).max(axis=1) > escape]
        alive[runaway] = False
    return z


def _certify_shell(m, targets, dom, cfg, warm, known_pool, threads=1):
    """Certify a whole shell of targets; failed points get a scalar retry with
    multistarts and continuation from already-certified neighbors.  Direction
    tests are independent, so thread-chunking never changes the arithmetic."""
    if threads > 1 and len(targets) >= 128:
        splits = np.array_split(np.arange(len(targets)), int(threads))
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=int(threads)) as ex:
            parts = list(ex.map(
                lambda idx: _newton_batch(m, targets[idx], warm[idx], dom, cfg), splits
            ))
        z = np.concatenate(parts, axis=0)
    else:
        z = _newton_batch(m, targets, warm, dom, cfg)
    res = np.linalg.norm(evaluate_batch(m, z) - targets, axis=1)
    margins = dom.margin(z)
    ok = (res <= cfg.tolerance) & (margins >= cfg.domain_margin_min)
    if not ok.all():
        pool = list(known_pool) + [
            (targets[j], z[j]) for j in np.flatnonzero(ok)
        ]
        for j in np.flatnonzero(~ok):
            sol = solve_membership(m, targets[j], dom, cfg, known=pool)
            if isinstance(sol, MembershipCertificate):
                z[j] = sol.preimage
                res[j] = sol.residual
                margins[j] = sol.domain_margin
                ok[j] = True
    return ok, z, res, np.asarray(margins, dtype=float)


def inscribed_lower_bound(
    m: MapExpr,
    a,
    dom: DomainSpec,
    cfg: NewtonConfig,
    direction_count: int,
    growth_factor: float = 1.05,
    threads: int = 1,
    _r_start: float | None = None,
) -> LandauEstimate:
    """Grow certified spheres around a fixed center a (which must itself be
    certified in the image, else CenterNotInImage).

    At each radius all direction_count quasi-uniform sphere points must
    certify; continuation reuses the previous shell's preimages as warm
    starts, so radius growth is sequential while direction tests vectorize.
    """
    a = algebra.as_vector(a)
    if not growth_factor > 1.0:
        raise ValueError("growth_factor must be > 1")
    if direction_count < 1:
        raise ValueError("direction_count must be >= 1")
    center_sol = solve_membership(m, a, dom, cfg)
    if isinstance(center_sol, NotFound):
        raise CenterNotInImage(
            f"no certificate for center {a}; best residual {center_sol.best_residual:.3e}"
        )
    dirs = sphere_directions(direction_count, m.dim, subseed(cfg.rng_seed, "directions"))
    r = float(_r_start) if _r_start else cfg.tolerance * 1e3
    warm = np.tile(center_sol.preimage, (direction_count, 1))
    known_pool = [(a, center_sol.preimage)]
    r_lo, r_hi = 0.0, np.inf
    shell_certs: list = []
    history: list = []
    while len(history) < _MAX_SHELLS:
        targets = a + r * dirs
        ok, z, res, margins = _certify_shell(m, targets, dom, cfg, warm, known_pool, threads)
        if bool(ok.all()):
            history.append((r, True))
            r_lo = r
            warm = z
            known_pool = [(a, center_sol.preimage)] + [
                (targets[j], z[j]) for j in range(direction_count)
            ]
            shell_certs = [
                MembershipCertificate(targets[j], np.array(z[j]), float(res[j]), float(margins[j]))
                for j in range(direction_count)
            ]
            r *= growth_factor
        else:
            history.append((r, False))
            r_hi = r
            break
    return LandauEstimate(
        center=a,
        r_lo=float(r_lo),
        r_hi=float(r_hi),
        r_hi_label="heuristic",
        certificates=[center_sol] + shell_certs,
        directions_tested=int(direction_count),
        shell_history=history,
    )


def _certified_upper_bound(m: MapExpr, dom: DomainSpec, centers):
    """Certified inscribed-ball bound where one exists (shear maps on the
    unit polydisc); None otherwise."""
    if dom.shape == "polydisc" and dom.radius == 1.0 and isinstance(m, (Harris, DurenRudin)):
        pairs = [(c[0], c[1]) for c in centers]
        return certify_no_ball(m, pairs)
    return None


def landau_estimate(
    m: MapExpr,
    dom: DomainSpec,
    cfg: NewtonConfig,
    center_candidates: int = 4,
    direction_count: int | None = None,
    growth_factor: float = 1.05,
    center_refine_steps: int = 2,
    threads: int = 1,
) -> LandauEstimate:
    """Lower bound for the Landau number: best inscribed estimate over the
    image of the origin, seeded random image points, and a hill climb of
    the winning center.

    center_candidates counts all starting centers, the origin's image
    included; the random candidates are prefix-stable in the count, so the
    estimate never shrinks when more are requested.  Probe runs during the
    climb start near the incumbent radius to fail fast; only centers whose
    probe improves get a full (from-r0) run, and the reported estimate is
    always a full run.
    """
    if dom.dim != m.dim:
        raise DimensionMismatch(f"domain has k={dom.dim}, map has k={m.dim}")
    if center_candidates < 1:
        raise ValueError("center_candidates must be >= 1")
    if direction_count is None:
        direction_count = 64 * m.dim

    def full_run(center):
        return inscribed_lower_bound(
            m, center, dom, cfg, direction_count, growth_factor, threads
        )

    centers = [evaluate(m, np.zeros(m.dim))]
    if center_candidates > 1:
        pre = interior_points(dom, center_candidates - 1, subseed(cfg.rng_seed, "centers"))
        centers.extend(evaluate_batch(m, pre))

    results = []
    for center in centers:
        try:
            results.append(full_run(center))
        except CenterNotInImage:
            continue
    if not results:
        raise CenterNotInImage("no candidate center could be certified in the image")
    best = max(results, key=lambda est: est.r_lo)

    step = 0.25 * best.r_lo if best.r_lo > 0 else 0.0
    for _ in range(int(center_refine_steps)):
        if step <= 0:
            break
        improved = False
        for j in range(m.dim):
            for delta in (step, -step, 1j * step, -1j * step):
                cand = best.center.copy()
                cand[j] += delta
                try:
                    probe = inscribed_lower_bound(
                        m, cand, dom, cfg, direction_count, growth_factor, threads,
                        _r_start=max(cfg.tolerance * 1e3, 0.8 * best.r_lo),
                    )
                except CenterNotInImage:
                    continue
                if probe.r_lo > best.r_lo * (1.0 + 1e-9):
                    try:
                        full = full_run(cand)
                    except CenterNotInImage:
                        continue
                    if full.r_lo > best.r_lo:
                        best = full
                        improved = True
        if not improved:
            step *= 0.5

    certified = _certified_upper_bound(m, dom, [best.center] + centers)
    if certified is not None:
        best = replace(best, r_hi=certified.value, r_hi_label=certified.label)
    return best


def rescaled_growth(
    m: MapExpr,
    r_values: Sequence[float],
    cfg: NewtonConfig,
    center_candidates: int = 2,
    direction_count: int | None = None,
    growth_factor: float = 1.05,
    center_refine_steps: int = 1,
    threads: int = 1,
) -> list[tuple[float, float]]:
    """Inscribed-ball growth of an entire map under dilation: for each R,
    estimate the Landau number of z -> (1/R) m(R z) on the unit ball and
    scale it back, reporting the series (R, R * r_lo(R)) whose growth
    mirrors 'contains balls of arbitrarily large radius'."""
    dom = DomainSpec.ball(m.dim, 1.0)
    series = []
    for R in r_values:
        R = float(R)
        if not R > 0:
            raise ValueError("dilation factors must be positive")
        est = landau_estimate(
            dilate(m, R), dom, cfg,
            center_candidates=center_candidates,
            direction_count=direction_count,
            growth_factor=growth_factor,
            center_refine_steps=center_refine_steps,
            threads=threads,
        )
        series.append((R, R * est.r_lo))
    return series
