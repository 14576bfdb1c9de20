"""
Sampled engulfing checks and the characterization constant.

Soft mode asks that the base point x lies in S(y, q, K·t) whenever
y ∈ S(x, p, t); full mode asks the same of every z ∈ S(x, p, t). Both modes
draw the same triples: task i uses its own generator default_rng([seed, i]),
so verdicts are reproducible and independent of K.
"""
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from ..helpers.error_handlers import KinkPointError, handle_service_error
from ..helpers.logging_config import log_operation
from ..helpers.validators import require_constant_above_one
from ..models.config_models import RefineConfig, SamplerConfig
from ..models.function_spec import FunctionSpec, SubgradientPair
from ..models.verdict import (EngulfingVerdict, EngulfingWitness, EquivalenceReport, FlatSegmentRecord, KEstimate,
                              KinkRecord, LevelRecord, RegularityReport, SampledTriple)
from .bregman_core import (NULL_GAP_TOLERANCE, characterization_residual, gap_value, pairwise_gap_matrix,
                           symmetry_gaps, worst_characterization_residual)
from .convex_oracle import gradient_at, subdifferential_interval_1d, subgradients
from .sampling import draw_height, draw_point, grid_points_1d, task_rng
from .sections import SectionSampler, classify_boundedness

logger = logging.getLogger(__name__)

PAIR_SEED_MARGIN = 1e-6
ANCHOR_PROBABILITY = 0.05
SOFT_MARGIN = 1e-3


def engulfing_constant_bound(K_soft: float) -> float:
    """Full engulfing constant 2K(K+1) implied by soft engulfing with constant K."""
    K_soft = require_constant_above_one(K_soft, 'K_soft')
    return 2.0 * K_soft * (K_soft + 1.0)


# ---------------------------------------------------------------------------
# Triple sampling
# ---------------------------------------------------------------------------

@dataclass
class _Draw:
    x: np.ndarray
    p: np.ndarray
    t: float
    y: np.ndarray
    section: Optional[SectionSampler]


class _TripleSource:
    """
    Deterministic triples (x, p, t, y) with y ∈ S(x, p, t).

    A share of the tasks is pair-seeded: x and y come from the point measure
    and t sits just above D(y; x, p), putting y on the verge of the section.
    The rest draw t log-uniformly and y from the section.
    """

    def __init__(self, f: FunctionSpec, sampler: SamplerConfig):
        self.f = f
        self.cfg = sampler
        n = f.dimension
        self.anchors = [np.zeros(n)]
        if n == 1:
            self.anchors.extend(np.array([k]) for k in f.body.kinks_1d())

    def point(self, rng: np.random.Generator) -> np.ndarray:
        if rng.random() < ANCHOR_PROBABILITY:
            return self.anchors[int(rng.integers(len(self.anchors)))].copy()
        return draw_point(rng, self.f.dimension, self.cfg.box, self.cfg.inner_scale)

    def draw(self, task: int) -> Tuple[np.random.Generator, Optional[_Draw]]:
        cfg = self.cfg
        rng = task_rng(cfg.seed, task)
        x = self.point(rng)
        try:
            slopes = subgradients(self.f, x)
        except KinkPointError:
            return rng, None
        p = slopes[int(rng.integers(len(slopes)))]
        if rng.random() < cfg.pair_seeded_fraction:
            y = draw_point(rng, self.f.dimension, cfg.box, cfg.inner_scale)
            forward = gap_value(self.f, x, p, y)
            if math.isfinite(forward):
                t = max(forward * (1.0 + PAIR_SEED_MARGIN), cfg.t_min)
                if t <= cfg.t_max and forward < t:
                    return rng, _Draw(x, p, t, y, None)
        t = draw_height(rng, cfg.t_min, cfg.t_max)
        section = SectionSampler(self.f, x, p, t, cfg.r_cap, cfg.unbounded_radius)
        near_boundary = rng.random() < 0.5
        y = section.draw(rng, near_boundary)
        if y is None:
            return rng, None
        return rng, _Draw(x, p, t, y, section)


def _witness(f: FunctionSpec, mode: str, draw: _Draw, q: np.ndarray, z: Optional[np.ndarray],
             K: float, backward: float) -> EngulfingWitness:
    return EngulfingWitness(
        mode=mode,
        x=draw.x.tolist(),
        p=draw.p.tolist(),
        t=draw.t,
        y=draw.y.tolist(),
        q=q.tolist(),
        z=None if z is None else z.tolist(),
        K=K,
        forward_gap=gap_value(f, draw.x, draw.p, draw.y),
        backward_gap=backward,
    )


def _verdict(f: FunctionSpec, mode: str, K: float, sampler: SamplerConfig, used: int, skipped: int,
             capped: int, witness: Optional[EngulfingWitness] = None) -> EngulfingVerdict:
    verdict = EngulfingVerdict(
        mode=mode,
        K=K,
        verdict='fail' if witness is not None else 'pass',
        witness=witness,
        samples_used=used,
        skipped=skipped,
        seed=sampler.seed,
        function=f.label,
        derivative_mode=f.derivative_mode,
        cap_classified_rays=capped,
    )
    if capped:
        logger.warning(f"{mode} check of {f.label} sampled {capped} cap-classified unbounded rays")
    logger.info(f"{mode} check of {f.label} at K={K}: {verdict.verdict} ({used} triples, {skipped} skipped)")
    return verdict


@handle_service_error
def check_soft(f: FunctionSpec, K: float, sampler: Optional[SamplerConfig] = None,
               trace: Optional[List[SampledTriple]] = None) -> EngulfingVerdict:
    """
    Sampled soft engulfing at constant K: x ∈ S(y, q, K·t) for every extreme
    q ∈ ∂φ(y) whenever y ∈ S(x, p, t). Stops at the first witness.

    When `trace` is given, every checked (x, p, y, q, t) is appended to it.
    """
    K = require_constant_above_one(K)
    sampler = sampler or SamplerConfig()
    log_operation(logger, 'check_soft', {'function': f.label, 'K': K, 'samples': sampler.samples,
                                         'seed': sampler.seed})
    source = _TripleSource(f, sampler)
    used = skipped = capped = 0
    for task in range(sampler.samples):
        _, draw = source.draw(task)
        if draw is None:
            skipped += 1
            continue
        if draw.section is not None:
            capped += draw.section.cap_classified
        try:
            slopes = subgradients(f, draw.y)
        except KinkPointError:
            skipped += 1
            continue
        used += 1
        bound = K * draw.t
        for q in slopes:
            backward = gap_value(f, draw.y, q, draw.x)
            if trace is not None:
                trace.append(SampledTriple(draw.x, draw.p, draw.y, q, draw.t))
            if not backward < bound:
                witness = _witness(f, 'soft', draw, q, None, K, backward)
                return _verdict(f, 'soft', K, sampler, used, skipped, capped, witness)
    return _verdict(f, 'soft', K, sampler, used, skipped, capped)


@handle_service_error
def check_full(f: FunctionSpec, K: float, sampler: Optional[SamplerConfig] = None) -> EngulfingVerdict:
    """
    Sampled full engulfing at constant K: S(x, p, t) ⊂ S(y, q, K·t).

    The first pass tests z = x on every task, which is the soft criterion,
    so a soft witness comes back unchanged with z = x. The second pass tries
    `section_samples` further members of S(x, p, t) per task (alternating
    near-boundary and interior draws).
    """
    K = require_constant_above_one(K)
    sampler = sampler or SamplerConfig()
    log_operation(logger, 'check_full', {'function': f.label, 'K': K, 'samples': sampler.samples,
                                         'seed': sampler.seed})
    source = _TripleSource(f, sampler)
    used = skipped = capped = 0
    pending: List[Tuple[np.random.Generator, _Draw, List[np.ndarray]]] = []
    for task in range(sampler.samples):
        rng, draw = source.draw(task)
        if draw is None:
            skipped += 1
            continue
        if draw.section is not None:
            capped += draw.section.cap_classified
        try:
            slopes = subgradients(f, draw.y)
        except KinkPointError:
            skipped += 1
            continue
        used += 1
        bound = K * draw.t
        for q in slopes:
            backward = gap_value(f, draw.y, q, draw.x)
            if not backward < bound:
                witness = _witness(f, 'full', draw, q, draw.x, K, backward)
                return _verdict(f, 'full', K, sampler, used, skipped, capped, witness)
        pending.append((rng, draw, slopes))

    for rng, draw, slopes in pending:
        section = draw.section or SectionSampler(f, draw.x, draw.p, draw.t, sampler.r_cap,
                                                 sampler.unbounded_radius)
        before = section.cap_classified if draw.section is not None else 0
        members = []
        for k in range(sampler.section_samples):
            z = section.draw(rng, near_boundary=(k % 2 == 0))
            if z is not None:
                members.append(z)
        capped += section.cap_classified - before
        bound = K * draw.t
        for q in slopes:
            for z in members:
                backward = gap_value(f, draw.y, q, z)
                if not backward < bound:
                    witness = _witness(f, 'full', draw, q, z, K, backward)
                    return _verdict(f, 'full', K, sampler, used, skipped, capped, witness)
    return _verdict(f, 'full', K, sampler, used, skipped, capped)


def verify_witness(f: FunctionSpec, verdict: EngulfingVerdict) -> bool:
    """Recompute the membership chain of a fail witness without any sampling."""
    w = verdict.witness
    if w is None:
        return False
    x, p, y, q = (np.array(v, dtype=float) for v in (w.x, w.p, w.y, w.q))
    if not gap_value(f, x, p, y) < w.t:
        return False
    target = np.array(w.z, dtype=float) if w.mode == 'full' and w.z is not None else x
    return not gap_value(f, y, q, target) < w.K * w.t


# ---------------------------------------------------------------------------
# Characterization constant
# ---------------------------------------------------------------------------

@dataclass
class _Scan:
    value: float
    pair: Optional[Tuple[np.ndarray, np.ndarray]]
    infinite_reason: Optional[str] = None
    ill_conditioned: int = 0
    flat_candidates: int = 0


def _estimation_points(f: FunctionSpec, box: float, inner_scale: float, grid: int,
                       seed: int, level: int) -> np.ndarray:
    if f.dimension == 1:
        return grid_points_1d(box, grid, inner_scale, f.body.kinks_1d()).reshape(-1, 1)
    rng = task_rng(seed, 0xE5, level)
    points = [np.zeros(f.dimension)]
    points.extend(draw_point(rng, f.dimension, box, inner_scale) for _ in range(grid - 1))
    return np.array(points)


def _scan_pairs(f: FunctionSpec, points: np.ndarray, refine: RefineConfig) -> _Scan:
    kept, phi, grads = [], [], []
    for point in points:
        try:
            g = gradient_at(f, point)
        except KinkPointError:
            others = [other for other in points if not np.array_equal(other, point)]
            partner = min(others, key=lambda other: float(np.linalg.norm(other - point)))
            logger.info(f"Kink of {f.label} at {point.tolist()}: characterization constant is infinite")
            return _Scan(math.inf, (point, partner), 'kink')
        value = f.body.value(point)
        if math.isfinite(value) and np.all(np.isfinite(g)):
            kept.append(point)
            phi.append(value)
            grads.append(g)
    X, phi, G = np.array(kept), np.array(phi), np.array(grads)
    forward, forward_scale = pairwise_gap_matrix(phi, G, X)
    backward, backward_scale = forward.T, forward_scale.T
    upper = np.triu(np.ones(forward.shape, dtype=bool), k=1)
    tol = refine.ill_conditioned
    usable_f = forward >= tol * forward_scale
    usable_b = backward >= tol * backward_scale
    null_f = forward <= NULL_GAP_TOLERANCE * forward_scale
    null_b = backward <= NULL_GAP_TOLERANCE * backward_scale
    well = upper & usable_f & usable_b
    flat = upper & ((null_f & usable_b) | (null_b & usable_f))
    ill = int(np.count_nonzero(upper & ~well & ~flat & ~(null_f & null_b)))
    flats = int(np.count_nonzero(flat))
    if flats:
        i, j = (int(v) for v in np.argwhere(flat)[0])
        logger.info(f"Flat segment candidate of {f.label} between {X[i].tolist()} and {X[j].tolist()}")
        return _Scan(math.inf, (X[i], X[j]), 'flat-segment', ill, flats)
    if not np.any(well):
        return _Scan(1.0, None, None, ill, 0)
    with np.errstate(divide='ignore', invalid='ignore'):
        constants = np.where(well, np.maximum(backward / forward, forward / backward), -np.inf)
    i, j = np.unravel_index(int(np.argmax(constants)), constants.shape)
    return _Scan(float(constants[i, j]), (X[i], X[j]), None, ill, 0)


def _pair_constant(f: FunctionSpec, x: np.ndarray, y: np.ndarray, tol: float) -> float:
    """max(r, 1/r) at a well-conditioned pair, -inf otherwise."""
    if np.array_equal(x, y):
        return -math.inf
    try:
        numerator, numerator_scale, denominator, denominator_scale = symmetry_gaps(f, x, y)
    except KinkPointError:
        return -math.inf
    if numerator < tol * numerator_scale or denominator < tol * denominator_scale:
        return -math.inf
    return max(numerator / denominator, denominator / numerator)


def _pattern_search(f: FunctionSpec, pair: Tuple[np.ndarray, np.ndarray], box: float,
                    refine: RefineConfig) -> Tuple[float, Tuple[np.ndarray, np.ndarray], float]:
    """Compass search on (x, y) from a grid pair; returns (value, pair, last-round growth)."""
    n = pair[0].shape[0]
    z = np.concatenate(pair).astype(float)
    best = _pair_constant(f, z[:n], z[n:], refine.ill_conditioned)
    step = 0.1 * max(float(np.max(np.abs(z))), box * 1e-6)
    history = [best]
    for _ in range(refine.rounds):
        improved = False
        for k in range(2 * n):
            for sign in (1.0, -1.0):
                trial = z.copy()
                trial[k] = min(max(trial[k] + sign * step, -box), box)
                value = _pair_constant(f, trial[:n], trial[n:], refine.ill_conditioned)
                if value > best:
                    z, best, improved = trial, value, True
                    break
        if not improved:
            step *= refine.shrink
        history.append(best)
    growth = 0.0
    if len(history) >= 2 and math.isfinite(history[-2]) and history[-2] > 0:
        growth = history[-1] / history[-2] - 1.0
    x, y = z[:n], z[n:]
    numerator, _, denominator, _ = symmetry_gaps(f, x, y)
    if numerator < denominator:
        x, y = y, x
    return best, (x, y), growth


@handle_service_error
def estimate_k_char(f: FunctionSpec, sampler: Optional[SamplerConfig] = None,
                    refine: Optional[RefineConfig] = None) -> KEstimate:
    """
    Estimate sup over pairs of max(r, 1/r), r the symmetry ratio.

    Each level scans all pairs of a grid (1D) or of seeded random points (nD),
    then refines the best pair by compass search. Level l doubles the box and
    quarters the smallest magnitude near 0; growth above the threshold between
    the last two levels or in the last refinement round of a level flags
    divergence.
    """
    sampler = sampler or SamplerConfig()
    refine = refine or RefineConfig()
    log_operation(logger, 'estimate_k_char', {'function': f.label, 'box': sampler.box, 'grid': refine.grid,
                                              'rounds': refine.rounds, 'seed': sampler.seed})
    levels: List[LevelRecord] = []
    best_value, best_pair = -math.inf, None
    ill = flats = 0

    def result(value, pair, diverging=False, reason=None):
        estimate = KEstimate(
            value=value,
            argmax_pair=None if pair is None else (pair[0].tolist(), pair[1].tolist()),
            diverging=diverging,
            infinite_reason=reason,
            grid=refine.grid,
            box=sampler.box,
            seed=sampler.seed,
            refinement_rounds=refine.rounds,
            levels=levels,
            ill_conditioned_pairs=ill,
            flat_segment_candidates=flats,
            derivative_mode=f.derivative_mode,
        )
        logger.info(f"Characterization constant of {f.label}: {value} (diverging={diverging}, reason={reason})")
        return estimate

    for level in range(refine.box_doublings + 1):
        box = sampler.box * 2.0 ** level
        inner = sampler.inner_scale / 4.0 ** level
        points = _estimation_points(f, box, inner, refine.grid, sampler.seed, level)
        scan = _scan_pairs(f, points, refine)
        ill += scan.ill_conditioned
        flats += scan.flat_candidates
        if scan.infinite_reason is not None:
            return result(math.inf, scan.pair, False, scan.infinite_reason)
        if scan.pair is None:
            levels.append(LevelRecord(box=box, inner_scale=inner, grid_value=1.0, refined_value=1.0))
            continue
        refined, pair, growth = _pattern_search(f, scan.pair, box, refine)
        logger.debug(f"Level {level}: grid {scan.value}, refined {refined}, last-round growth {growth}")
        levels.append(LevelRecord(box=box, inner_scale=inner, grid_value=scan.value, refined_value=refined,
                                  last_round_growth=growth))
        if refined > best_value:
            best_value, best_pair = refined, pair

    if best_pair is None:
        return result(1.0, None)
    threshold = refine.growth_threshold
    previous, last = levels[-2], levels[-1]
    diverging = (last.grid_value > previous.grid_value * (1.0 + threshold)
                 or last.refined_value > previous.refined_value * (1.0 + threshold)
                 or any(record.last_round_growth > threshold for record in levels))
    return result(best_value, best_pair, diverging)


@handle_service_error
def check_equivalence(f: FunctionSpec, sampler: Optional[SamplerConfig] = None,
                      refine: Optional[RefineConfig] = None) -> EquivalenceReport:
    """
    Soft check at K̂·1.001 and full check at 2K(K+1) of that constant; both
    skipped when K̂ is infinite or diverging.
    """
    sampler = sampler or SamplerConfig()
    estimate = estimate_k_char(f, sampler, refine)
    if not estimate.finite:
        return EquivalenceReport(estimate=estimate, conclusion='not engulfing for any K')
    soft_K = max(estimate.value, 1.0) * (1.0 + SOFT_MARGIN)
    full_K = engulfing_constant_bound(soft_K)
    soft = check_soft(f, soft_K, sampler).model_copy(update={'diverging': estimate.diverging})
    full = check_full(f, full_K, sampler).model_copy(update={'diverging': estimate.diverging})
    if soft.passed and full.passed:
        conclusion = 'engulfing'
    elif soft.passed:
        conclusion = 'soft engulfing only (full check failed at the implied constant)'
    else:
        conclusion = 'inconclusive'
    return EquivalenceReport(estimate=estimate, soft_K=soft_K, full_K=full_K, soft=soft, full=full,
                             conclusion=conclusion)


# ---------------------------------------------------------------------------
# Regularity diagnostics
# ---------------------------------------------------------------------------

def _kinks_1d(f: FunctionSpec, sampler: SamplerConfig, trial_K: float) -> List[KinkRecord]:
    candidates = set(f.body.kinks_1d())
    scan = grid_points_1d(sampler.box, 200, sampler.inner_scale) if f.body.analytic else ()
    for u in scan:
        if not subdifferential_interval_1d(f, [u]).is_degenerate:
            candidates.add(float(u))
    records = []
    for c in sorted(candidates):
        interval = subdifferential_interval_1d(f, [c])
        if interval.is_degenerate:
            continue
        delta = 1e-2 * (1.0 + abs(c))
        worst = min((worst_characterization_residual(f, [c], [c + s * delta], trial_K) for s in (-1.0, 1.0)),
                    key=lambda r: r.worst_slack)
        records.append(KinkRecord(point=[c], lower_slope=interval.lower, upper_slope=interval.upper,
                                  worst_slack=worst.worst_slack, breaks_characterization=worst.worst_slack < 0))
    return records


def _kinks_nd(f: FunctionSpec, points: np.ndarray, trial_K: float) -> List[KinkRecord]:
    records = []
    for point in points:
        try:
            gradient_at(f, point)
            continue
        except KinkPointError as e:
            axis = e.details.get('axis') or 0
            left, right = e.left, e.right
        e_axis = np.zeros(f.dimension)
        e_axis[axis] = 1.0
        scale = 1.0 + float(np.max(np.abs(point)))
        near = point - 1e-9 * scale * e_axis
        far = point + 1e-2 * scale * e_axis
        worst_slack = None
        try:
            residual = characterization_residual(f, SubgradientPair(near, gradient_at(f, near)),
                                                 SubgradientPair(far, gradient_at(f, far)), trial_K)
            worst_slack = residual.worst_slack
        except KinkPointError:
            pass
        records.append(KinkRecord(point=point.tolist(), lower_slope=left, upper_slope=right, axis=axis,
                                  worst_slack=worst_slack,
                                  breaks_characterization=worst_slack is not None and worst_slack < 0))
    return records


def _flat_segments(f: FunctionSpec, points: np.ndarray, box: float, limit: int = 10) -> List[FlatSegmentRecord]:
    kept, phi, grads = [], [], []
    for point in points:
        try:
            g = gradient_at(f, point)
        except KinkPointError:
            continue
        value = f.body.value(point)
        if math.isfinite(value):
            kept.append(point)
            phi.append(value)
            grads.append(g)
    if len(kept) < 2:
        return []
    X = np.array(kept)
    gaps, scales = pairwise_gap_matrix(np.array(phi), np.array(grads), X)
    null = gaps <= NULL_GAP_TOLERANCE * scales
    distance = np.linalg.norm(X[None, :, :] - X[:, None, :], axis=2)
    flat = np.triu(null & null.T & (distance >= 1e-4 * box), k=1)
    pairs = sorted(((float(distance[i, j]), int(i), int(j)) for i, j in np.argwhere(flat)), reverse=True)
    if f.dimension == 1:
        intervals = sorted((min(X[i, 0], X[j, 0]), max(X[i, 0], X[j, 0])) for _, i, j in pairs)
        merged: List[List[float]] = []
        for lo, hi in intervals:
            if merged and lo <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], hi)
            else:
                merged.append([lo, hi])
        return [FlatSegmentRecord(start=[lo], end=[hi]) for lo, hi in merged[:limit]]
    return [FlatSegmentRecord(start=X[i].tolist(), end=X[j].tolist()) for _, i, j in pairs[:limit]]


@handle_service_error
def diagnose_regularity(f: FunctionSpec, sampler: Optional[SamplerConfig] = None,
                        trial_K: float = 100.0) -> RegularityReport:
    """
    Locate kinks and flat segments and confirm that kinks break the
    characterization at the trial constant. The findings are evidence about
    differentiability and strict convexity, not proofs.
    """
    sampler = sampler or SamplerConfig()
    trial_K = require_constant_above_one(trial_K, 'trial_K')
    log_operation(logger, 'diagnose_regularity', {'function': f.label, 'trial_K': trial_K})
    rng = task_rng(sampler.seed, 0xD1)
    n = f.dimension
    if n == 1:
        kinks = _kinks_1d(f, sampler, trial_K)
        points = grid_points_1d(sampler.box, 200, 1e-3).reshape(-1, 1)
    else:
        base = [np.zeros(n)] + [draw_point(rng, n, sampler.box, sampler.inner_scale) for _ in range(199)]
        kinks = _kinks_nd(f, np.array(base), trial_K)
        axis_points = []
        for b in base[:16]:
            for i in range(n):
                e = np.zeros(n)
                e[i] = 0.5 * sampler.box
                axis_points.extend([b, b + e])
        points = np.array(base + axis_points)
    flats = _flat_segments(f, points, sampler.box)
    sections = classify_boundedness(f, sampler)

    evidence = []
    if any(k.breaks_characterization for k in kinks):
        evidence.append(f"kinks break the characterization at K={trial_K}: no engulfing constant exists")
    elif kinks:
        evidence.append("kinks found but the residual at the trial constant did not confirm a violation")
    else:
        evidence.append("no kinks found on the sampled set (consistent with differentiability)")
    if flats and sections == 'bounded':
        evidence.append("flat segments with bounded sections: incompatible with engulfing")
    elif flats:
        evidence.append(f"flat segments found; sections are {sections} (allowed along unbounded directions)")
    else:
        evidence.append("no flat segments found (consistent with strict convexity)")

    report = RegularityReport(function=f.label, trial_K=trial_K, kinks=kinks, flat_segments=flats,
                              sections=sections, evidence=evidence)
    logger.info(f"Regularity of {f.label}: {len(kinks)} kinks, {len(flats)} flat segments, sections {sections}")
    return report
