"""Variance schedules driving the forward and reverse diffusion processes.

A schedule fixes the per-timestep noise variances beta_t together with the
derived alpha_t = 1 - beta_t and their running product alpha_bar_t. Timesteps
are 1-based: step 1 is the first noising step, step T the last, and index 0
is reserved for the clean image (``alpha_bar(0) == 1``).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class VarianceSchedule:
    """Immutable noise schedule; safe to share across threads.

    ``alphas`` and ``alpha_bars`` are derived from ``betas`` on construction.
    The signal fraction surviving to step t is alpha_bar_t, which decreases
    strictly from just below 1 toward 0 as t grows.
    """

    betas: np.ndarray
    alphas: np.ndarray = field(init=False)
    alpha_bars: np.ndarray = field(init=False)

    def __post_init__(self):
        betas = np.asarray(self.betas, dtype=np.float64)
        if betas.ndim != 1 or betas.size < 1:
            raise ValueError(f"betas must be a non-empty 1-D sequence, got shape {betas.shape}")
        if not np.all(np.isfinite(betas)):
            raise ValueError("betas must be finite")
        if np.any(betas <= 0.0) or np.any(betas >= 1.0):
            t_bad = int(np.argmax((betas <= 0.0) | (betas >= 1.0))) + 1
            raise ValueError(f"betas must lie in (0, 1); betas[t={t_bad}] = {betas[t_bad - 1]}")
        alphas = 1.0 - betas
        alpha_bars = np.cumprod(alphas)
        for arr in (betas, alphas, alpha_bars):
            arr.flags.writeable = False
        object.__setattr__(self, "betas", betas)
        object.__setattr__(self, "alphas", alphas)
        object.__setattr__(self, "alpha_bars", alpha_bars)

    @property
    def T(self) -> int:
        return self.betas.size

    def _check_t(self, t: int, lo: int = 1) -> int:
        t = int(t)
        if not lo <= t <= self.T:
            raise ValueError(f"timestep t={t} out of range [{lo}, {self.T}]")
        return t

    def beta(self, t: int) -> float:
        return float(self.betas[self._check_t(t) - 1])

    def alpha(self, t: int) -> float:
        return float(self.alphas[self._check_t(t) - 1])

    def alpha_bar(self, t: int) -> float:
        """Cumulative product of alphas through step t; ``alpha_bar(0) == 1``."""
        t = self._check_t(t, lo=0)
        return 1.0 if t == 0 else float(self.alpha_bars[t - 1])

    def posterior_variance(self, t: int) -> float:
        """The tightened reverse variance (1 - alpha_bar_{t-1}) / (1 - alpha_bar_t) * beta_t."""
        t = self._check_t(t)
        return (1.0 - self.alpha_bar(t - 1)) / (1.0 - self.alpha_bar(t)) * self.beta(t)


def make_linear_schedule(T: int, beta_start: float, beta_end: float) -> VarianceSchedule:
    """Linearly interpolate beta from ``beta_start`` to ``beta_end`` over T steps.

    Endpoints are inclusive; ``T == 1`` yields ``[beta_start]``.
    """
    T = int(T)
    if T < 1:
        raise ValueError(f"T must be >= 1, got T={T}")
    if not 0.0 < beta_start <= beta_end:
        raise ValueError(
            f"need 0 < beta_start <= beta_end, got beta_start={beta_start}, beta_end={beta_end}")
    if beta_end >= 1.0:
        raise ValueError(f"beta_end must be < 1, got beta_end={beta_end}")
    if T == 1:
        betas = np.array([beta_start], dtype=np.float64)
    else:
        betas = np.linspace(beta_start, beta_end, T, dtype=np.float64)
    return VarianceSchedule(betas)


def signal_to_noise(s: VarianceSchedule, t: int) -> float:
    """Ratio alpha_bar_t / (1 - alpha_bar_t): remaining signal vs accumulated noise.

    Strictly decreasing in t; near 0 means the state is close to pure noise.
    """
    ab = s.alpha_bar(s._check_t(t))
    return ab / (1.0 - ab)
