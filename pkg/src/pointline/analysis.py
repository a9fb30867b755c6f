"""Baselines, the tiling tripwire, and gain / empirical-exponent metrics."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from pointline.geometry import Configuration, SanityBoundExceeded, verify_claim


def upper_bound_sanity(n: int) -> float:
    """Tiling bound ``4*sqrt(2)/floor(sqrt(n-1))`` on ``d(X)`` for ``|X| = n``.

    Loose on purpose (factor 4 for the side-2 box and vertical vs euclidean
    distance); a verified distance above it means the verifier is wrong.
    """
    if n < 2:
        raise ValueError("upper bound needs n >= 2")
    return 4 * math.sqrt(2) / math.isqrt(n - 1)


def check_sanity(n: int, delta: float) -> None:
    if n >= 2 and delta > upper_bound_sanity(n):
        raise SanityBoundExceeded(
            f"measured d = {delta!r} exceeds tiling bound {upper_bound_sanity(n)!r} for n = {n}")


def gain(n: int, delta: float) -> float:
    # ratio to the stacked baseline distance 2/n; equals n*delta/2
    return delta / (2.0 / n)


def gamma_emp(n: int, delta: float) -> float:
    """``ln(gain) / ln(1/delta)``; 0 for ``delta >= 1`` where the ratio is meaningless."""
    if delta >= 1 or delta <= 0:
        return 0.0
    g = gain(n, delta)
    return math.log(g) / math.log(1.0 / delta)


@dataclass(frozen=True)
class GainRecord:
    n: int
    delta: float
    gain: float
    gamma_emp: float
    witness: tuple | None = None
    provenance: str = ""

    @classmethod
    def from_values(cls, n: int, delta: float, **kw) -> "GainRecord":
        return cls(n, delta, gain(n, delta), gamma_emp(n, delta), **kw)

    def to_dict(self) -> dict:
        d = asdict(self)
        if self.witness is not None:
            d["witness"] = list(self.witness)
        return d


def gain_report(X: Configuration, verification=None) -> GainRecord:
    """Gain of a verified configuration.

    The delta used is the certified claim when the configuration carries one
    that verifies, otherwise the measured minimal distance.
    """
    if len(X) < 2:
        raise ValueError("gain is undefined for fewer than two elements")
    if verification is None:
        if X.claimed_delta is None:
            verification = verify_claim(X, claimed_delta=0.0)
        else:
            verification = verify_claim(X)
    if not verification.passed:
        raise ValueError(f"configuration does not verify: {verification.to_dict()}")
    delta = X.claimed_delta if X.claimed_delta is not None else verification.measured_delta
    check_sanity(len(X), delta)
    witness = tuple(verification.witness) if verification.witness is not None else None
    return GainRecord.from_values(len(X), delta, witness=witness, provenance=X.provenance)


def level_table(levels: list[dict]) -> list[dict]:
    """Per-level rows from a recursion report.

    Each input dict needs ``n`` and ``claimed_delta``. Rows add gain,
    empirical exponent, and the ratios to the previous level.
    """
    rows = []
    prev = None
    for t, lv in enumerate(levels, start=1):
        n, delta = lv["n"], lv["claimed_delta"]
        rec = GainRecord.from_values(n, delta)
        row = {
            "level": lv.get("level", t),
            "n": n,
            "delta": delta,
            "measured_delta": lv.get("measured_delta"),
            "gain": rec.gain,
            "gamma_emp": rec.gamma_emp,
            "size_ratio": None if prev is None else n / prev["n"],
            "delta_ratio": None if prev is None else delta / prev["delta"],
            "gain_factor": None if prev is None else rec.gain / prev["gain"],
        }
        rows.append(row)
        prev = row
    return rows


def format_table(rows: list[dict]) -> str:
    cols = ["level", "n", "delta", "measured_delta", "gain", "gamma_emp", "size_ratio",
            "delta_ratio", "gain_factor"]

    def fmt(v):
        if v is None:
            return "-"
        if isinstance(v, float):
            return f"{v:.6g}"
        return str(v)

    cells = [cols] + [[fmt(r.get(c)) for c in cols] for r in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(cols))]
    return "\n".join("  ".join(s.rjust(w) for s, w in zip(row, widths)) for row in cells)
