"""Randomized base construction with empty strips.

Sample ``N`` uniform points, give each the first slope from a small grid
whose closed strip of vertical half-width ``delta`` holds no other sample,
and keep the points that found one. Every kept pair is then more than
``delta`` apart in both directions. Points are sampled directly in
``[-1/2, 1/2]^2`` (a translate of the unit square), which changes no
vertical distance.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from pointline import _backend
from pointline.analysis import gain, gamma_emp
from pointline.geometry import Configuration, min_distance_bruteforce
from pointline.report import BuildReport


class DeltaTooLarge(ValueError):
    pass


class RetriesExhausted(RuntimeError):
    """No attempt reached the size target; the best attempt is attached."""

    def __init__(self, message, configuration, report):
        super().__init__(message)
        self.configuration = configuration
        self.report = report


@dataclass(frozen=True)
class Lemma1Params:
    delta: float
    N: int
    M: int
    box_half: float
    slope_step: float
    seed: int = 0
    max_retries: int = 20
    size_target: int = 1

    def slopes(self) -> np.ndarray:
        """Scan order ``0, +1, -1, ..., +M, -M`` times ``slope_step``."""
        js = [0]
        for j in range(1, self.M + 1):
            js += [j, -j]
        return np.array(js, dtype=np.float64) * self.slope_step


def derive_params(delta: float, seed: int = 0, max_retries: int = 20) -> Lemma1Params:
    if not 0 < delta < 1:
        raise DeltaTooLarge(f"delta must lie in (0, 1), got {delta}")
    N = math.floor(0.1 * (1.0 / delta) * math.log(1.0 / delta))
    if N < 2:
        raise DeltaTooLarge(f"delta too large: N = {N} < 2 sample points")
    M = math.floor(1.0 / (8 * delta * math.sqrt(N)))
    if M < 1:
        raise DeltaTooLarge(f"delta too large: slope grid size M = {M} < 1")
    return Lemma1Params(
        delta=delta,
        N=N,
        M=M,
        box_half=1.0 / (4 * math.sqrt(N)),
        slope_step=8 * delta * math.sqrt(N),
        seed=seed,
        max_retries=max_retries,
        size_target=math.ceil(N / 2),
    )


@dataclass(frozen=True)
class StripQuery:
    px: float
    py: float
    theta: float
    half_width: float

    def __post_init__(self):
        if not self.half_width > 0:
            raise ValueError("half_width must be positive")


def strip_contains(q: StripQuery, x: float, y: float) -> bool:
    """Closed strip membership."""
    return abs(y - q.py - q.theta * (x - q.px)) <= q.half_width


def _attempt(params: Lemma1Params, rng: np.random.Generator):
    pts = rng.random((params.N, 2)) - 0.5
    x = np.ascontiguousarray(pts[:, 0])
    y = np.ascontiguousarray(pts[:, 1])
    slopes = params.slopes()
    choice = _backend.kernels.strip_scan(x, y, slopes, params.delta)
    kept = np.flatnonzero(choice >= 0)
    coords = np.column_stack((x[kept], y[kept], slopes[choice[kept]]))
    return coords, pts


def build_lemma1(params: Lemma1Params, *, raise_on_failure: bool = True):
    """Run attempts until one keeps at least ``size_target`` points.

    Returns ``(configuration, report)``. The configuration's claim is its
    brute-force minimal distance, which exceeds ``delta`` by construction.
    On exhaustion raises :class:`RetriesExhausted` carrying the best
    attempt, unless ``raise_on_failure`` is false.
    """
    streams = np.random.SeedSequence(params.seed).spawn(max(1, params.max_retries))
    best = None
    sizes = []
    for attempt, ss in enumerate(streams):
        rng = np.random.Generator(np.random.Philox(ss))
        coords, _ = _attempt(params, rng)
        sizes.append(len(coords))
        if best is None or len(coords) > len(best):
            best = coords
        if len(coords) >= params.size_target:
            break
    success = len(best) >= params.size_target

    cfg = Configuration(best, provenance=f"lemma1(delta={params.delta!r},seed={params.seed})")
    report = BuildReport(
        kind="lemma1",
        n=len(cfg),
        claimed_delta=None,
        success=success,
        params={
            "delta": params.delta, "N": params.N, "M": params.M, "box_half": params.box_half,
            "slope_step": params.slope_step, "seed": params.seed,
            "max_retries": params.max_retries, "size_target": params.size_target,
            "attempt_sizes": sizes,
        },
    )
    if len(cfg) >= 2:
        value, witness = min_distance_bruteforce(cfg)
        if not value > params.delta:  # pragma: no cover - would mean a kernel bug
            raise AssertionError(f"strip construction produced d = {value} <= delta")
        cfg = cfg.replace(claimed_delta=value)
        report.claimed_delta = report.measured_delta = value
        report.witness = tuple(witness)
        report.verification = "exact"
        report.gain = gain(len(cfg), value)
        report.gamma_emp = gamma_emp(len(cfg), value)
    if not success:
        report.notes.append(f"retries exhausted: best size {len(cfg)} < target {params.size_target}")
        if raise_on_failure:
            raise RetriesExhausted(report.notes[-1], cfg, report)
    return cfg, report
