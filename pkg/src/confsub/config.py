"""Tolerance settings shared across the engine.

Structural tolerances guard frame construction; the theorem tolerance drives
checker verdicts (holds below tol, fails above 10*tol, inconclusive between).
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace

__all__ = ["Tolerances", "DEFAULT_TOLERANCES", "env_default_theorem_tol"]


@dataclass(frozen=True)
class Tolerances:
    theorem: float = 1e-6
    identity: float = 1e-7  # second-fundamental-form identity residuals
    structural: float = 1e-9  # frame orthonormality, kernel and J-invariance residuals
    conformality: float = 1e-8  # relative to the square dilation
    kahler: float = 1e-9
    reconstruction: float = 1e-10
    homothety: float = 1e-8
    drop: float = 1e-10  # Gram-Schmidt drop threshold
    split_threshold: float = 1e-7  # invariant part: singular value > 1 - split_threshold
    split_margin: float = 1e-3  # anything closer below the threshold is ambiguous
    exclusion_distance: float = 1e-3

    def with_theorem(self, tol: float) -> "Tolerances":
        return replace(self, theorem=float(tol))


DEFAULT_TOLERANCES = Tolerances()


def env_default_theorem_tol() -> float | None:
    """Optional override of the theorem tolerance via CONFSUB_TOL."""
    raw = os.environ.get("CONFSUB_TOL")
    if raw is None or raw.strip() == "":
        return None
    return float(raw)
