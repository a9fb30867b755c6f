"""Build reports shared by the constructions and the CLI."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any


def _jsonable(v):
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if hasattr(v, "item") and callable(v.item):  # numpy scalars
        return _jsonable(v.item())
    return v


@dataclass
class BuildReport:
    """What was built, how it was checked, and how it compares to the baseline.

    ``success`` is the construction's own target (size for the random build,
    claim certification for compositions); ``verification`` holds the
    verifier's output.
    """

    kind: str
    n: int
    claimed_delta: float | None
    success: bool = True
    measured_delta: float | None = None
    witness: tuple | None = None
    verification: str = "none"
    params: dict[str, Any] = field(default_factory=dict)
    levels: list[dict] = field(default_factory=list)
    gain: float | None = None
    gamma_emp: float | None = None
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return _jsonable({
            "kind": self.kind,
            "n": self.n,
            "claimed_delta": self.claimed_delta,
            "measured_delta": self.measured_delta,
            "witness": None if self.witness is None else list(self.witness),
            "verification": self.verification,
            "success": self.success,
            "gain": self.gain,
            "gamma_emp": self.gamma_emp,
            "params": self.params,
            "levels": self.levels,
            "notes": self.notes,
        })
