"""Self-affine rescaling maps on the configuration space.

``Rescaler(x0, y0, theta0, w)`` sends ``(x, y, theta)`` to
``(x0 + w x, y0 + w theta0 x + w^2 y, theta0 + w theta)``. Every vertical
distance is multiplied by exactly ``w^2``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from pointline.geometry import ConfigElement, Configuration, ConfigurationError


@dataclass(frozen=True)
class Rescaler:
    x0: float
    y0: float
    theta0: float
    w: float

    def __post_init__(self):
        if not self.w > 0:
            raise ValueError(f"scale w must be positive, got {self.w}")

    @property
    def omega_safe(self) -> bool:
        """True when the map is guaranteed to send the cube into itself."""
        return abs(self.x0) <= 0.5 and abs(self.y0) <= 0.5 and abs(self.theta0) <= 0.5 and self.w <= 0.5

    def __call__(self, e):
        return apply_element(self, e)


def apply_point(r: Rescaler, x: float, y: float) -> tuple[float, float]:
    return r.x0 + r.w * x, r.y0 + r.w * r.theta0 * x + r.w * r.w * y


def apply_element(r: Rescaler, e, require_omega: bool = False) -> ConfigElement:
    x, y, theta = e
    px, py = apply_point(r, x, y)
    out = ConfigElement(px, py, r.theta0 + r.w * theta)
    if require_omega and not out.in_omega():
        raise ConfigurationError(f"{tuple(e)} maps outside the cube to {tuple(out)}")
    return out


def apply_coords(r: Rescaler, coords: np.ndarray) -> np.ndarray:
    """Vectorised :func:`apply_element` on an ``(n, 3)`` array (same rounding)."""
    x, y, t = coords[:, 0], coords[:, 1], coords[:, 2]
    out = np.empty_like(coords, dtype=np.float64)
    out[:, 0] = r.x0 + r.w * x
    out[:, 1] = r.y0 + r.w * r.theta0 * x + r.w * r.w * y
    out[:, 2] = r.theta0 + r.w * t
    return out


def rescale_configuration(r: Rescaler, X: Configuration, allow_unsafe: bool = False) -> Configuration:
    """Image of ``X``; the claim (if any) scales by ``w^2``.

    Unsafe rescalers are refused unless ``allow_unsafe``; even then every
    image element must stay inside the cube.
    """
    if not (r.omega_safe or allow_unsafe):
        raise ConfigurationError(f"{r} is not Omega-safe; pass allow_unsafe=True to use it anyway")
    claim = None if X.claimed_delta is None else r.w * r.w * X.claimed_delta
    return Configuration(apply_coords(r, X.coords), claimed_delta=claim,
                         provenance=f"rescale(w={r.w!r})[{X.provenance}]", labels=X.labels)
