"""
qualtensor/config.py
─────────────────────
Tuneable parameters for the randomized parts of the library, one frozen
dataclass per concern. Environment overrides are applied by the root
`settings` module, never here.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, replace
from typing import Optional


@dataclass(frozen=True)
class SearchConfig:
    """Numerical rank search (cp_fit, mr_upper_search, bounds_report)."""

    # ── Alternating least squares ─────────────────────────────────────────────
    restarts: int          = 20       # independent random starts per target rank
    iterations: int        = 500      # ALS sweeps per restart
    tol: float             = 1e-8     # relative residual that counts as a fit
    ridge: float           = 1e-12    # Tikhonov term on the normal equations
    stall_tol: float       = 1e-13    # stop a restart once the residual stops moving
    seed: int              = 0

    # ── Sign-constrained search ───────────────────────────────────────────────
    magnitude_low: float   = 1e-2     # nonzero magnitudes are clamped into
    magnitude_high: float  = 1e2      #   [magnitude_low, magnitude_high]
    sign_margin: float     = 1e-6     # reconstructed entries must clear this

    # ── Rank scan ─────────────────────────────────────────────────────────────
    r_max: Optional[int]   = None     # None → ∏ of all dims but the largest

    def __post_init__(self) -> None:
        if self.restarts < 1 or self.iterations < 1:
            raise ValueError("restarts and iterations must be >= 1")
        if self.tol <= 0 or self.ridge < 0:
            raise ValueError("tol must be > 0 and ridge >= 0")
        if not 0 < self.magnitude_low <= self.magnitude_high:
            raise ValueError("need 0 < magnitude_low <= magnitude_high")
        if self.r_max is not None and self.r_max < 1:
            raise ValueError("r_max must be >= 1")
        if self.seed < 0:
            raise ValueError(f"seed must be >= 0, got {self.seed}")

    def with_overrides(self, **changes: object) -> "SearchConfig":
        """Copy with every non-None keyword applied."""
        return replace(self, **{k: v for k, v in changes.items() if v is not None})

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class SamplingConfig:
    """Member sampling for qualitative classes."""

    magnitude_low: float  = 0.1
    magnitude_high: float = 10.0
    trials: int           = 1000      # sns_falsify_sample attempts
    samples: int          = 200       # members drawn for Mr lower bounds
    seed: int             = 0

    def __post_init__(self) -> None:
        if not 0 < self.magnitude_low <= self.magnitude_high:
            raise ValueError("need 0 < magnitude_low <= magnitude_high")
        if self.trials < 1 or self.samples < 1:
            raise ValueError("trials and samples must be >= 1")
        if self.seed < 0:
            raise ValueError(f"seed must be >= 0, got {self.seed}")

    @property
    def magnitude_range(self) -> tuple[float, float]:
        return self.magnitude_low, self.magnitude_high

    def with_overrides(self, **changes: object) -> "SamplingConfig":
        return replace(self, **{k: v for k, v in changes.items() if v is not None})

    def to_dict(self) -> dict:
        return asdict(self)
