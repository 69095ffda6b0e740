"""CHSH expressions, the relaxed bound B <= 2 + M, and quantum-optimal settings."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import UnitVec3, unit

# Sign patterns over (XY, XY', X'Y, X'Y') with an odd number of minus signs.
# Variant 0 is the textbook form XY + XY' + X'Y - X'Y'; variants 4..7 negate 0..3.
VARIANTS = np.array(
    [
        [1, 1, 1, -1],
        [1, 1, -1, 1],
        [1, -1, 1, 1],
        [-1, 1, 1, 1],
        [-1, -1, -1, 1],
        [-1, -1, 1, -1],
        [-1, 1, -1, -1],
        [1, -1, -1, -1],
    ],
    dtype=float,
)


@dataclass(frozen=True)
class CorrelatorQuad:
    xy: float
    xyp: float
    xpy: float
    xpyp: float

    def __post_init__(self):
        for v in self.as_array():
            if not (-1.0 <= v <= 1.0):
                raise ValueError(f"correlator {v} outside [-1, 1]")

    def as_array(self) -> np.ndarray:
        return np.array([self.xy, self.xyp, self.xpy, self.xpyp], dtype=float)

    @classmethod
    def from_iterable(cls, values) -> "CorrelatorQuad":
        vals = [float(v) for v in values]
        if len(vals) != 4:
            raise ValueError(f"need four correlators, got {len(vals)}")
        return cls(*vals)


def _quad_array(quad) -> np.ndarray:
    if isinstance(quad, CorrelatorQuad):
        return quad.as_array()
    return CorrelatorQuad.from_iterable(quad).as_array()


def chsh_value(quad, variant: int = 0) -> float:
    if not (0 <= int(variant) < len(VARIANTS)) or int(variant) != variant:
        raise ValueError(f"variant must be an integer in 0..7, got {variant}")
    return float(abs(VARIANTS[int(variant)] @ _quad_array(quad)))


def chsh_values(quad) -> np.ndarray:
    return np.abs(VARIANTS @ _quad_array(quad))


def chsh_max(quad) -> tuple[float, int]:
    """Largest CHSH value over all variants; ties go to the lowest variant index."""
    vals = chsh_values(quad)
    k = int(np.argmax(vals))
    return float(vals[k]), k


def bound_check(B: float, M: float, tol: float = 0.0) -> bool:
    """True iff B <= 2 + M + tol."""
    if not (0.0 <= M <= 2.0):
        raise ValueError(f"measurement dependence must lie in [0, 2], got {M}")
    if tol < 0:
        raise ValueError("tol must be non-negative")
    return B <= 2.0 + M + tol


@dataclass(frozen=True)
class ChshReport:
    value_per_variant: tuple
    max_value: float
    argmax_variant: int
    bound: float
    satisfied: bool


def chsh_report(quad, m: float, tol: float = 0.0) -> ChshReport:
    vals = chsh_values(quad)
    b, k = chsh_max(quad)
    return ChshReport(tuple(float(v) for v in vals), b, k, 2.0 + m, bound_check(b, m, tol))


def quantum_optimal_settings() -> dict[str, UnitVec3]:
    """Settings reaching B = 2 sqrt 2 (variant 0) for the correlator -X.Y."""
    return {
        "X": unit(1, 0, 0),
        "X'": unit(0, 1, 0),
        "Y": unit(-1, -1, 0),
        "Y'": unit(-1, 1, 0),
    }


TSIRELSON = 2.0 * math.sqrt(2.0)


def analytic_quad(model, settings: dict) -> CorrelatorQuad:
    """Closed-form correlators (XY, XY', X'Y, X'Y') of ``model`` at ``settings``."""
    pairs = (("X", "Y"), ("X", "Y'"), ("X'", "Y"), ("X'", "Y'"))
    return CorrelatorQuad(*(model.correlator(settings[x], settings[y]) for x, y in pairs))


TOY_SETTINGS = {"X": "X", "X'": "X'", "Y": "Y", "Y'": "Y'"}
