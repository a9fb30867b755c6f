"""Configuration space of incident point-line pairs and the vertical distance.

An element ``(x, y, theta)`` of ``[-1, 1]^3`` is the point ``(x, y)`` together
with the line of slope ``theta`` through it. The vertical distance from the
point of ``a`` to the line of ``b`` is ``|a.y - b.y - b.theta * (a.x - b.x)|``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from pointline import _backend

#: Absolute tolerance used when comparing a measured distance to a claim.
TOL_ABS = 1e-12


class ConfigurationError(ValueError):
    """Invalid configuration: element outside the cube, duplicates, bad shape."""


class ClaimViolation(Exception):
    """A configuration's measured minimal distance is below its claim."""

    def __init__(self, message: str, witness: "DistanceWitness"):
        super().__init__(message)
        self.witness = witness


class SanityBoundExceeded(AssertionError):
    """A verified distance beat the tiling upper bound: the verifier is broken."""


class ConfigElement(NamedTuple):
    x: float
    y: float
    theta: float

    def in_omega(self) -> bool:
        return abs(self.x) <= 1 and abs(self.y) <= 1 and abs(self.theta) <= 1


class DistanceWitness(NamedTuple):
    """Ordered pair achieving the minimum: point of ``index_a``, line of ``index_b``."""

    index_a: int
    index_b: int
    value: float


def vertical_distance(w1: Sequence[float], w2: Sequence[float]) -> float:
    """Vertical offset from the point of ``w1`` to the line of ``w2``.

    Not symmetric: only the slope of ``w2`` enters.
    """
    return abs(w1[1] - w2[1] - w2[2] * (w1[0] - w2[0]))


def _as_coords(elements) -> np.ndarray:
    arr = np.array(elements, dtype=np.float64)
    if arr.size == 0:
        arr = arr.reshape(0, 3)
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise ConfigurationError(f"expected an (n, 3) array of elements, got shape {arr.shape}")
    return arr


@dataclass(frozen=True, eq=False)
class Configuration:
    """Immutable finite configuration.

    ``coords`` is a read-only ``(n, 3)`` float64 array with columns
    ``x, y, theta``. ``labels`` optionally carries an ``(n, 3)`` integer array
    of ``(i, j, inner)`` provenance labels from a composition.
    """

    coords: np.ndarray
    claimed_delta: float | None = None
    provenance: str = ""
    labels: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        coords = _as_coords(self.coords)
        if not np.all(np.isfinite(coords)):
            raise ConfigurationError("non-finite coordinate")
        bad = np.flatnonzero(np.any(np.abs(coords) > 1.0, axis=1))
        if bad.size:
            i = int(bad[0])
            raise ConfigurationError(f"element {i} {tuple(coords[i])} lies outside [-1,1]^3")
        if coords.shape[0] > 1:
            _, first = np.unique(coords, axis=0, return_index=True)
            if first.size != coords.shape[0]:
                dup = sorted(set(range(coords.shape[0])) - set(first.tolist()))[0]
                raise ConfigurationError(f"element {dup} duplicates an earlier element")
        coords.setflags(write=False)
        object.__setattr__(self, "coords", coords)
        if self.claimed_delta is not None:
            cd = float(self.claimed_delta)
            if not cd >= 0:
                raise ConfigurationError(f"claimed_delta must be nonnegative, got {cd}")
            object.__setattr__(self, "claimed_delta", cd)
        if self.labels is not None:
            labels = np.array(self.labels, dtype=np.int64).reshape(-1, 3)
            if labels.shape[0] != coords.shape[0]:
                raise ConfigurationError("labels must have one row per element")
            labels.setflags(write=False)
            object.__setattr__(self, "labels", labels)

    @classmethod
    def from_elements(cls, elements, **kwargs) -> "Configuration":
        return cls(_as_coords(list(elements)), **kwargs)

    def __len__(self) -> int:
        return self.coords.shape[0]

    def __getitem__(self, i: int) -> ConfigElement:
        return ConfigElement(*map(float, self.coords[i]))

    def __iter__(self):
        return (ConfigElement(*row) for row in self.coords.tolist())

    @property
    def elements(self) -> list[ConfigElement]:
        return list(self)

    @property
    def x(self) -> np.ndarray:
        return self.coords[:, 0]

    @property
    def y(self) -> np.ndarray:
        return self.coords[:, 1]

    @property
    def theta(self) -> np.ndarray:
        return self.coords[:, 2]

    def columns(self):
        """Contiguous ``x, y, theta`` arrays for the kernels."""
        c = self.coords
        return (np.ascontiguousarray(c[:, 0]), np.ascontiguousarray(c[:, 1]),
                np.ascontiguousarray(c[:, 2]))

    def replace(self, **changes) -> "Configuration":
        fields = dict(coords=self.coords, claimed_delta=self.claimed_delta,
                      provenance=self.provenance, labels=self.labels)
        fields.update(changes)
        return Configuration(**fields)

    def same_elements(self, other: "Configuration") -> bool:
        return self.coords.shape == other.coords.shape and bool(np.array_equal(self.coords, other.coords))


def _tripwire(n: int, value: float):
    from pointline.analysis import check_sanity

    check_sanity(n, value)


def _require_pair(X: Configuration):
    if len(X) < 2:
        raise ConfigurationError(f"minimal distance needs at least 2 elements, got {len(X)}")


def min_distance_bruteforce(X: Configuration, num_threads: int | None = None):
    """Exact ``d(X)`` over all ordered pairs, with the lexicographically smallest witness."""
    _require_pair(X)
    threads = num_threads or _backend.default_threads()
    value, a, b = _backend.kernels.min_pair_brute(*X.columns(), num_threads=threads)
    _tripwire(len(X), value)
    return value, DistanceWitness(int(a), int(b), value)


def min_distance_grid(X: Configuration, cell: float | None = None):
    """Same value as :func:`min_distance_bruteforce`, pruned with a bucket grid.

    ``cell`` is the bucket side length; ``None`` picks one from the bounding
    box so that there are about ``n`` buckets. Ties resolve to the same
    witness as the brute-force scan.
    """
    _require_pair(X)
    if cell is not None and not cell > 0:
        raise ValueError(f"cell must be positive, got {cell}")
    value, a, b = _backend.kernels.min_pair_grid(*X.columns(), cell)
    _tripwire(len(X), value)
    return value, DistanceWitness(int(a), int(b), value)


def min_distance(X: Configuration, method: str = "auto"):
    if method == "brute" or (method == "auto" and len(X) <= 4000):
        return min_distance_bruteforce(X)
    return min_distance_grid(X)


@dataclass
class Verification:
    """Outcome of checking a configuration against its claimed distance."""

    n: int
    claimed_delta: float | None
    measured_delta: float | None
    witness: DistanceWitness | None
    passed: bool
    degenerate: bool = False
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "claimed_delta": self.claimed_delta,
            "measured_delta": self.measured_delta,
            "witness": None if self.witness is None else list(self.witness),
            "passed": self.passed,
            "degenerate": self.degenerate,
            "warnings": list(self.warnings),
        }


def verify_claim(X: Configuration, *, method: str = "auto", raise_on_failure: bool = False,
                 claimed_delta: float | None = None) -> Verification:
    """Recompute ``d(X)`` and compare with the claim (``X.claimed_delta`` by default).

    Passes iff ``d(X) >= claim - TOL_ABS``. A measured distance above the
    tiling upper bound raises :class:`SanityBoundExceeded` unconditionally.
    """
    claim = X.claimed_delta if claimed_delta is None else float(claimed_delta)
    if claim is None:
        raise ValueError("configuration carries no claimed_delta")
    if len(X) < 2:
        return Verification(len(X), claim, None, None, True, degenerate=True,
                            warnings=["degenerate: fewer than two elements"])
    value, witness = min_distance(X, method)  # raises SanityBoundExceeded on a broken verifier
    passed = value >= claim - TOL_ABS
    result = Verification(len(X), claim, value, witness, passed)
    if not passed and raise_on_failure:
        raise ClaimViolation(
            f"d(X) = {value!r} < claimed {claim!r}; witness: point {witness.index_a} "
            f"to line {witness.index_b}", witness)
    return result


def stacked_configuration(ys, provenance: str = "stacked") -> Configuration:
    """Horizontal lines through ``(0, y)`` for each ``y``; claim is the smallest gap."""
    ys = sorted(float(v) for v in ys)
    coords = np.zeros((len(ys), 3))
    coords[:, 1] = ys
    claim = min(b - a for a, b in zip(ys, ys[1:])) if len(ys) > 1 else None
    return Configuration(coords, claimed_delta=claim, provenance=provenance)


def _gap_ladder(n: int, gap: float) -> list[float]:
    # Symmetric ladder whose computed adjacent differences are all >= gap,
    # with equality at the centre, so d(X) == gap holds exactly in float64.
    if n % 2:
        ys = [0.0]
    else:
        ys = [gap / 2]
    while len(ys) < (n + 1) // 2:
        nxt = ys[-1] + gap
        while nxt - ys[-1] < gap:
            nxt = math.nextafter(nxt, math.inf)
        ys.append(nxt)
    if n % 2:
        return [-v for v in reversed(ys[1:])] + ys
    return [-v for v in reversed(ys)] + ys


def trivial_configuration(n: int) -> Configuration:
    """``n`` horizontal lines stacked at spacing ``2/n``: the baseline with ``d = 2/n``.

    The heights are ``-1 + (2i+1)/n`` up to a few ulps, nudged so that the
    computed minimal distance is exactly ``2/n``.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if n == 1:
        return Configuration(np.zeros((1, 3)), provenance="trivial(1)")
    gap = 2.0 / n
    ys = _gap_ladder(n, gap)
    coords = np.zeros((n, 3))
    coords[:, 1] = ys
    if np.abs(coords).max() > 1:  # pragma: no cover - ladder drift is a few ulps
        raise ConfigurationError("stacked ladder left the cube")
    return Configuration(coords, claimed_delta=gap, provenance=f"trivial({n})")

