"""Self-affine amplification of a base configuration.

Each element ``(p_i, theta_i)`` of the shrunken base ``X1`` is replaced by
``2*floor(1/w) - 1`` vertically shifted copies of the ``w``-rescaled inner
configuration, centred at ``p_i + (0, C j w^2)``. Sizes multiply, distances
shrink by ``w^2``. :func:`iterate_theorem` folds this ``m`` times.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from pointline.analysis import check_sanity, gain, gamma_emp, level_table
from pointline.geometry import (
    TOL_ABS,
    Configuration,
    ConfigurationError,
    min_distance,
    min_distance_bruteforce,
    min_distance_grid,
    trivial_configuration,
)
from pointline.report import BuildReport
from pointline.rescale import Rescaler, rescale_configuration

GUARANTEED = "guaranteed"
EXPLORATORY = "exploratory"

#: Full O(n^2) verification up to this many elements.
VERIFY_CAP = 20000
#: Cross-cell pairs sampled above the cap.
SAMPLE_PAIRS = 10**6
#: Relative tolerance of the same-cell scaling identity.
SAME_CELL_RTOL = 1e-12
#: Absolute floor for it: coordinates of size ~1 carry rounding of a few ulps.
SAME_CELL_ATOL = 8 * np.finfo(float).eps

HALF = Rescaler(0.0, 0.0, 0.0, 0.5)


class PreconditionError(ValueError):
    """A guaranteed-path inequality does not hold."""


@dataclass(frozen=True)
class ComposeParams:
    w: float
    C: float = 5.0

    def __post_init__(self):
        if not 0 < self.w < 1:
            raise ValueError(f"w must lie in (0, 1), got {self.w}")
        if not self.C > 0:
            raise ValueError(f"C must be positive, got {self.C}")

    @property
    def j_max(self) -> int:
        return math.floor(1 / self.w) - 1

    @property
    def copies(self) -> int:
        """Number of shifts per base element, ``2*floor(1/w) - 1``."""
        return 2 * self.j_max + 1

    @property
    def base_requirement(self) -> float:
        return 4 * self.C**2 * self.w

    def guarantee_problems(self) -> list[str]:
        out = []
        if self.C < 5:
            out.append(f"C = {self.C!r} < 5")
        if self.w > 1 / (4 * self.C**2):
            out.append(f"w = {self.w!r} > 1/(4C^2) = {1 / (4 * self.C**2)!r}")
        return out


def make_X1(X0: Configuration) -> Configuration:
    """Shrink by ``w = 1/2`` about the origin; lands in ``[-1/2,1/2]x[-1/4,1/4]x[-1/2,1/2]``."""
    X1 = rescale_configuration(HALF, X0)
    c = X1.coords
    assert np.all(np.abs(c[:, 0]) <= 0.5) and np.all(np.abs(c[:, 1]) <= 0.25)
    assert np.all(np.abs(c[:, 2]) <= 0.5)
    return X1.replace(provenance=f"X1[{X0.provenance}]")


def _capped(d: float) -> float:
    return min(d, 1.0)


def effective_distance(X: Configuration) -> float:
    """``min(d(X), 1)`` with the empty minimum of a singleton read as 1.

    Uses the configuration's claim when it has one (a certified lower
    bound), otherwise measures.
    """
    if len(X) < 2:
        return 1.0
    if X.claimed_delta is not None:
        return _capped(X.claimed_delta)
    return _capped(min_distance(X)[0])


def check_guarantee(X0: Configuration, params: ComposeParams) -> float | None:
    """Raise :class:`PreconditionError` naming the failing inequality; return ``d(X0)``."""
    problems = params.guarantee_problems()
    d0 = None
    if len(X0) >= 2:
        d0 = min_distance_bruteforce(X0)[0]
        req = params.base_requirement
        if d0 < req:
            problems.append(f"d(X0) = {d0:.6g} < 4C^2w = {req:.6g}")
    if problems:
        raise PreconditionError("guaranteed path preconditions fail: " + "; ".join(problems))
    return d0


def _centres(X1: Configuration, params: ComposeParams):
    k = len(X1)
    js = np.arange(-params.j_max, params.j_max + 1)
    shift = params.C * js * params.w * params.w
    cx = np.repeat(X1.x, js.size)
    cy = (X1.y[:, None] + shift[None, :]).ravel()
    ct = np.repeat(X1.theta, js.size)
    ii = np.repeat(np.arange(k), js.size)
    jj = np.tile(js, k)
    return cx, cy, ct, ii, jj


def compose(X0: Configuration, X: Configuration, params: ComposeParams, mode: str = GUARANTEED,
            measure: bool = True):
    """Union of ``psi_{i,j}(X)`` over base elements ``i`` and shifts ``|j| <= j_max``.

    Guaranteed mode checks the preconditions first and claims
    ``w^2 min(d(X), 1)``. Exploratory mode accepts any ``C`` and ``w`` and
    claims the measured distance (``measure=False`` leaves the claim unset,
    for callers that certify it themselves). Elements carry ``(i, j, inner)``
    labels. Returns ``(configuration, report)``.
    """
    if len(X0) == 0 or len(X) == 0:
        raise ConfigurationError("compose needs nonempty base and inner configurations")
    if mode not in (GUARANTEED, EXPLORATORY):
        raise ValueError(f"unknown mode {mode!r}")
    d0 = check_guarantee(X0, params) if mode == GUARANTEED else None

    X1 = make_X1(X0)
    cx, cy, ct, ii, jj = _centres(X1, params)
    # exploratory compositions only need the images to stay in the cube,
    # which Configuration enforces below
    bad = np.flatnonzero((np.abs(cx) > 0.5) | (np.abs(cy) > 0.5))
    if mode == GUARANTEED and bad.size:
        b = int(bad[0])
        raise ConfigurationError(
            f"centre p_(i={ii[b]},j={jj[b]}) = ({cx[b]!r}, {cy[b]!r}) leaves [-1/2,1/2]^2; "
            f"reduce C or w")

    w = params.w
    xs, ys, ts = X.x, X.y, X.theta
    # same operation order as rescale.apply_coords
    out_x = cx[:, None] + w * xs[None, :]
    out_y = cy[:, None] + w * ct[:, None] * xs[None, :] + w * w * ys[None, :]
    out_t = ct[:, None] + w * ts[None, :]
    coords = np.stack((out_x.ravel(), out_y.ravel(), out_t.ravel()), axis=1)
    n_in = len(X)
    labels = np.stack((np.repeat(ii, n_in), np.repeat(jj, n_in), np.tile(np.arange(n_in), ii.size)),
                      axis=1)

    expected = len(X0) * params.copies * n_in
    # duplicate elements are rejected here, so success certifies a disjoint union
    out = Configuration(coords, provenance=f"compose(w={w!r},C={params.C!r},{mode})",
                        labels=labels)
    assert len(out) == expected

    report = BuildReport(kind="compose", n=len(out), claimed_delta=None,
                         params={"w": w, "C": params.C, "mode": mode, "k": len(X0),
                                 "copies": params.copies, "inner_size": n_in, "d_X0": d0})
    if mode == GUARANTEED:
        claim = w * w * effective_distance(X)
        out = out.replace(claimed_delta=claim)
        report.claimed_delta = claim
    elif measure and len(out) >= 2:
        value, wit = min_distance(out)
        out = out.replace(claimed_delta=value)
        report.claimed_delta = report.measured_delta = value
        report.witness = tuple(wit)
        report.verification = "exact"
    if report.claimed_delta is not None:
        report.gain = gain(len(out), report.claimed_delta)
        report.gamma_emp = gamma_emp(len(out), report.claimed_delta)
    return out, report


# --------------------------------------------------------------------------- case checks

def _pair_d(c: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.abs(c[a, 1] - c[b, 1] - c[b, 2] * (c[a, 0] - c[b, 0]))


@dataclass
class CaseReport:
    pairs_checked: int = 0
    violations: list = field(default_factory=list)
    counts: dict = field(default_factory=lambda: {"cross_i": 0, "cross_j": 0, "same_cell": 0})
    minima: dict = field(default_factory=lambda: {"cross_i": math.inf, "cross_j": math.inf,
                                                  "same_cell": math.inf})
    max_same_cell_rel_err: float = 0.0
    sampled: bool = False

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "pairs_checked": self.pairs_checked,
            "violation_count": len(self.violations),
            "violations": [list(v) for v in self.violations[:20]],
            "counts": dict(self.counts),
            "minima": dict(self.minima),
            "max_same_cell_rel_err": self.max_same_cell_rel_err,
            "sampled": self.sampled,
        }


def _check_pairs(rep: CaseReport, Xt: Configuration, inner: Configuration, w: float,
                 a: np.ndarray, b: np.ndarray, limit: int = 1000):
    lab = Xt.labels
    d = _pair_d(Xt.coords, a, b)
    li, lj, lk = lab[a].T
    mi, mj, mk = lab[b].T
    cross_i = li != mi
    cross_j = ~cross_i & (lj != mj)
    same = ~cross_i & ~cross_j
    rep.pairs_checked += a.size
    for name, mask, bound in (("cross_i", cross_i, w), ("cross_j", cross_j, w * w)):
        if mask.any():
            vals = d[mask]
            rep.counts[name] += int(mask.sum())
            rep.minima[name] = min(rep.minima[name], float(vals.min()))
            bad = np.flatnonzero(vals < bound)
            for t in bad[: max(0, limit - len(rep.violations))]:
                idx = np.flatnonzero(mask)[t]
                rep.violations.append((int(a[idx]), int(b[idx]), name, float(d[idx]), bound))
    if same.any():
        sa, sb = a[same], b[same]
        ds = d[same]
        ref = w * w * _pair_d(inner.coords, lab[sa, 2], lab[sb, 2])
        err = np.abs(ds - ref)
        rel = err / np.maximum(ref, np.finfo(float).tiny)
        rep.counts["same_cell"] += int(same.sum())
        rep.minima["same_cell"] = min(rep.minima["same_cell"], float(ds.min()))
        rep.max_same_cell_rel_err = max(rep.max_same_cell_rel_err, float(rel.max()))
        bad = np.flatnonzero(err > SAME_CELL_RTOL * ref + SAME_CELL_ATOL)
        for t in bad[: max(0, limit - len(rep.violations))]:
            rep.violations.append((int(sa[t]), int(sb[t]), "same_cell", float(ds[t]), float(ref[t])))


def case_bound_check(Xt: Configuration, params: ComposeParams, inner: Configuration,
                     sample: int | None = None, seed: int = 0) -> CaseReport:
    """Check the three pair cases of a labelled composition.

    Different base element: distance at least ``w``. Same base element,
    different shift: at least ``w^2``. Same cell: exactly ``w^2`` times the
    inner distance (relative tolerance ``SAME_CELL_RTOL``). All ordered
    pairs are scanned unless ``sample`` asks for that many random ones.
    Violations are recorded, not raised.
    """
    if Xt.labels is None:
        raise ValueError("case_bound_check needs a labelled composition")
    n = len(Xt)
    rep = CaseReport()
    w = params.w
    if sample is None:
        block = max(1, 2_000_000 // max(n, 1))
        cols = np.arange(n)
        for s in range(0, n, block):
            rows = np.arange(s, min(n, s + block))
            a = np.repeat(rows, n)
            b = np.tile(cols, rows.size)
            keep = a != b
            _check_pairs(rep, Xt, inner, w, a[keep], b[keep])
    else:
        rep.sampled = True
        rng = np.random.Generator(np.random.Philox(seed))
        a = rng.integers(0, n, sample)
        b = rng.integers(0, n - 1, sample)
        b = b + (b >= a)
        _check_pairs(rep, Xt, inner, w, a, b)
    return rep


def _sample_pairs(rng, n, size, n_in, same_cell):
    """Random ordered pairs restricted to the same cell or to different cells."""
    if same_cell:
        cells = n // n_in
        cell = rng.integers(0, cells, size)
        a = rng.integers(0, n_in, size)
        b = rng.integers(0, n_in - 1, size)
        b = b + (b >= a)
        return cell * n_in + a, cell * n_in + b
    a = rng.integers(0, n, size)
    b = rng.integers(0, n - 1, size)
    b = b + (b >= a)
    keep = (a // n_in) != (b // n_in)
    return a[keep], b[keep]


def verify_structured(Xt: Configuration, params: ComposeParams, inner: Configuration,
                      claim: float, sample: int = SAMPLE_PAIRS, seed: int = 0,
                      enforce_cases: bool = True) -> dict:
    """Verification above the full brute-force cap.

    The exact minimum comes from the grid verifier. On top of that, random
    same-cell pairs are checked against the scaling identity and random
    cross-cell pairs against their case bounds (fatal only when
    ``enforce_cases``, i.e. on the guaranteed path).
    """
    rng = np.random.Generator(np.random.Philox(seed))
    n, n_in = len(Xt), len(inner)
    cells = CaseReport(sampled=True)
    if n_in > 1:
        a, b = _sample_pairs(rng, n, sample, n_in, True)
        _check_pairs(cells, Xt, inner, params.w, a, b)
    cross = CaseReport(sampled=True)
    a, b = _sample_pairs(rng, n, sample, n_in, False)
    _check_pairs(cross, Xt, inner, params.w, a, b)
    value, wit = min_distance_grid(Xt)
    check_sanity(n, value)
    passed = cells.ok and (cross.ok or not enforce_cases) and value >= claim - TOL_ABS
    return {"passed": passed, "measured_delta": value, "witness": list(wit),
            "same_cell": cells.to_dict(), "cross_cell": cross.to_dict()}


# --------------------------------------------------------------------------- iteration

@dataclass
class RecursionPlan:
    depth: int
    base: Configuration
    params: ComposeParams
    inner_seed: Configuration = field(
        default_factory=lambda: Configuration(np.zeros((1, 3)), provenance="singleton"))
    mode: str = GUARANTEED
    verify_cap: int = VERIFY_CAP
    max_size: int = 5_000_000
    sample_pairs: int = SAMPLE_PAIRS
    seed: int = 0

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError("depth must be at least 1")

    @property
    def growth(self) -> int:
        return len(self.base) * self.params.copies

    def expected_size(self, level: int) -> int:
        return self.growth**level * len(self.inner_seed)

    def expected_delta(self, level: int) -> float:
        w2 = self.params.w * self.params.w
        return w2**level * effective_distance(self.inner_seed)


def iterate_theorem(plan: RecursionPlan):
    """Fold :func:`compose` ``plan.depth`` times starting from the inner seed.

    Each level's claim is the telescoped ``w^(2t) min(d(seed), 1)``. On the
    guaranteed path that holds a priori; on the exploratory path it is
    adopted only when verification confirms it, otherwise the level claims
    its measured distance and the report says so. Levels up to
    ``verify_cap`` elements get full verification; larger ones get the
    structured same-cell plus sampled cross-cell checks.
    """
    p = plan.params
    if plan.mode == GUARANTEED:
        check_guarantee(plan.base, p)
    if plan.expected_size(plan.depth) > plan.max_size:
        raise ValueError(f"final size {plan.expected_size(plan.depth)} exceeds cap {plan.max_size}")
    if len(plan.inner_seed) >= 2 and plan.inner_seed.claimed_delta is None:
        value = min_distance(plan.inner_seed)[0]
        inner = plan.inner_seed.replace(claimed_delta=value)
    else:
        inner = plan.inner_seed

    X = inner
    levels = []
    all_ok = True
    for t in range(1, plan.depth + 1):
        Xn, _ = compose(plan.base, X, p, mode=plan.mode, measure=False)
        assert len(Xn) == plan.expected_size(t)
        bound = p.w * p.w * effective_distance(X)
        level = {"level": t, "n": len(Xn), "bound_delta": bound}
        if len(Xn) <= plan.verify_cap:
            value, wit = min_distance(Xn, "brute")
            check_sanity(len(Xn), value)
            level.update(verification="exact", measured_delta=value, witness=list(wit))
            ok = value >= bound - TOL_ABS
        else:
            res = verify_structured(Xn, p, X, bound, plan.sample_pairs, plan.seed + t,
                                    enforce_cases=plan.mode == GUARANTEED)
            value = res["measured_delta"]
            level.update(verification="grid+sampled", measured_delta=value, witness=res["witness"],
                         structured=res)
            ok = res["passed"]
        if ok:
            claim = bound
        elif plan.mode == EXPLORATORY:
            claim = value
        else:
            raise AssertionError(f"level {t}: claim {bound!r} not certified ({level})")
        level["telescoped"] = bool(ok)
        level["claimed_delta"] = claim
        all_ok &= ok
        Xn = Xn.replace(claimed_delta=claim, provenance=f"iterate(level={t},{plan.mode})")
        levels.append(level)
        X = Xn

    rows = level_table(levels)
    for lv, row in zip(levels, rows):
        lv.update(gain=row["gain"], gamma_emp=row["gamma_emp"], gain_factor=row["gain_factor"])
    last = levels[-1]
    report = BuildReport(
        kind="iterate",
        n=len(X),
        claimed_delta=X.claimed_delta,
        success=True,
        measured_delta=last.get("measured_delta"),
        witness=tuple(last["witness"]) if "witness" in last else None,
        verification=last["verification"],
        params={"w": p.w, "C": p.C, "mode": plan.mode, "depth": plan.depth, "k": len(plan.base),
                "copies": p.copies, "seed_size": len(plan.inner_seed), "telescoped": all_ok,
                "expected_sizes": [plan.expected_size(t) for t in range(1, plan.depth + 1)],
                "expected_deltas": [plan.expected_delta(t) for t in range(1, plan.depth + 1)]},
        levels=levels,
        gain=last["gain"],
        gamma_emp=last["gamma_emp"],
    )
    if not all_ok:
        report.notes.append("telescoped bound not met at some level; those levels claim their "
                            "measured distance")
    return X, report


# --------------------------------------------------------------------------- base search

def _distance_matrix(c: np.ndarray) -> np.ndarray:
    x, y, t = c[:, 0], c[:, 1], c[:, 2]
    D = np.abs(y[:, None] - y[None, :] - t[None, :] * (x[:, None] - x[None, :]))
    np.fill_diagonal(D, np.inf)
    return D


def _update(D: np.ndarray, c: np.ndarray, e: int):
    x, y, t = c[:, 0], c[:, 1], c[:, 2]
    D[e, :] = np.abs(y[e] - y - t * (x[e] - x))
    D[:, e] = np.abs(y - y[e] - t[e] * (x - x[e]))
    D[e, e] = np.inf


def _ascend(c: np.ndarray, budget: int, rng: np.random.Generator,
            step_hi: float = 0.5, step_lo: float = 1e-5):
    c = c.copy()
    k = len(c)
    D = _distance_matrix(c)
    d = D.min()
    for s in range(budget):
        step = step_hi * (step_lo / step_hi) ** (s / max(1, budget - 1))
        if rng.random() < 0.5:
            a, b = np.unravel_index(np.argmin(D), D.shape)
            e = int(a if rng.random() < 0.5 else b)
        else:
            e = int(rng.integers(k))
        coord = int(rng.integers(3))
        old = c[e, coord]
        c[e, coord] = min(1.0, max(-1.0, old + step * rng.standard_normal()))
        saved = (D[e, :].copy(), D[:, e].copy())
        _update(D, c, e)
        nd = D.min()
        if nd >= d:
            d = nd
        else:
            c[e, coord] = old
            D[e, :], D[:, e] = saved
    return c, float(d)


def search_base(k_target: int, delta_target: float, budget: int, seed: int = 0,
                restarts: int = 4, start: Configuration | None = None):
    """Random-restart coordinate ascent on ``d(X)`` over ``k_target`` elements.

    Restart 0 starts from ``start`` (default: the stacked baseline), the
    others from uniform random configurations; ``budget`` proposals are
    split across restarts. Returns ``(configuration, report)`` with the best
    result (ties to the lower restart index); ``report.success`` says
    whether ``delta_target`` was met.
    """
    if delta_target > 2:
        raise ValueError("delta_target > 2 is unreachable for two elements in the cube")
    if k_target < 2:
        raise ValueError("k_target must be at least 2")
    start = start if start is not None else trivial_configuration(k_target)
    if len(start) != k_target:
        raise ValueError("start configuration has the wrong size")
    streams = np.random.SeedSequence(seed).spawn(max(1, restarts))
    results = []
    for r, ss in enumerate(streams):
        rng = np.random.Generator(np.random.Philox(ss))
        share = budget // len(streams) + (r < budget % len(streams))
        c0 = start.coords if r == 0 else rng.uniform(-1, 1, (k_target, 3))
        if share == 0:
            results.append((np.array(c0), float(_distance_matrix(np.array(c0)).min())))
            continue
        results.append(_ascend(np.array(c0), share, rng))
    best = max(range(len(results)), key=lambda r: (results[r][1], -r))
    coords, _ = results[best]
    if budget == 0:
        cfg = start
    else:
        cfg = Configuration(coords, provenance=f"search_base(k={k_target},seed={seed})")
    value, wit = min_distance_bruteforce(cfg)
    check_sanity(len(cfg), value)
    cfg = cfg.replace(claimed_delta=value)
    report = BuildReport(
        kind="search_base", n=len(cfg), claimed_delta=value, measured_delta=value,
        witness=tuple(wit), verification="exact", success=value >= delta_target,
        params={"k_target": k_target, "delta_target": delta_target, "budget": budget,
                "seed": seed, "restarts": restarts, "winner": best,
                "restart_values": [v for _, v in results]},
        gain=gain(len(cfg), value), gamma_emp=gamma_emp(len(cfg), value))
    if not report.success:
        report.notes.append(f"budget exhausted: d = {value!r} < target {delta_target!r}")
    return cfg, report
