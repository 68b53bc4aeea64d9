"""Forward noising, reverse sampling and the reconstruction loss.

Images live in two coordinate conventions: dataset space [0, 1] at I/O
boundaries and diffusion space nominally [-1, 1] everywhere else. Noised
states routinely exceed [-1, 1], so they carry ``value_range=None``
(unbounded); only the final sample is clamped back into range, and clamping
is always an explicit operation.

The reverse step reconstructs the posterior mean from the denoiser's clean
image estimate:

    mu = sqrt(alpha_bar_{t-1}) * beta_t / (1 - alpha_bar_t) * x0_hat
       + sqrt(alpha_t) * (1 - alpha_bar_{t-1}) / (1 - alpha_bar_t) * x_t

with alpha_bar_0 == 1, which makes the final step (t=1) return the estimate
exactly, with no noise added.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .schedules import VarianceSchedule

DATASET_RANGE = (0.0, 1.0)
DIFFUSION_RANGE = (-1.0, 1.0)

# A denoiser maps (noisy image, timestep) to a clean image estimate.
DenoiserFn = Callable[["ImageTensor", int], "ImageTensor"]


@dataclass(frozen=True)
class ImageTensor:
    """A (channels, height, width) float raster with a declared value range.

    ``value_range=None`` marks an unbounded tensor (noised diffusion states).
    Entries must be finite and, when a range is declared, inside it.
    """

    data: np.ndarray
    value_range: Optional[tuple[float, float]] = DIFFUSION_RANGE

    def __post_init__(self):
        data = np.asarray(self.data)
        if data.ndim != 3:
            raise ValueError(f"image data must be (C, H, W), got shape {data.shape}")
        if not np.issubdtype(data.dtype, np.floating):
            raise ValueError(f"image data must be floating point, got dtype {data.dtype}")
        if not np.all(np.isfinite(data)):
            raise ValueError("image data must be finite")
        if self.value_range is not None:
            lo, hi = self.value_range
            dmin, dmax = float(data.min()), float(data.max())
            if dmin < lo or dmax > hi:
                raise ValueError(
                    f"image data [{dmin}, {dmax}] exceeds declared value_range [{lo}, {hi}]; "
                    "clamp explicitly or declare value_range=None")
        object.__setattr__(self, "data", data)

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.data.shape

    @property
    def width(self) -> int:
        return self.data.shape[2]

    @property
    def height(self) -> int:
        return self.data.shape[1]

    def clamped(self, value_range: tuple[float, float] = DIFFUSION_RANGE) -> "ImageTensor":
        """Explicitly clip entries into ``value_range`` and declare it."""
        lo, hi = value_range
        return ImageTensor(np.clip(self.data, lo, hi), (lo, hi))

    def to_diffusion_range(self) -> "ImageTensor":
        """Affine map [0, 1] -> [-1, 1]."""
        if self.value_range != DATASET_RANGE:
            raise ValueError(f"expected dataset-range image, got value_range={self.value_range}")
        return ImageTensor(self.data * 2.0 - 1.0, DIFFUSION_RANGE)

    def to_dataset_range(self) -> "ImageTensor":
        """Affine map [-1, 1] -> [0, 1]; input must already be clamped."""
        if self.value_range != DIFFUSION_RANGE:
            raise ValueError(
                f"expected clamped diffusion-range image, got value_range={self.value_range}")
        return ImageTensor((self.data + 1.0) / 2.0, DATASET_RANGE)


@dataclass(frozen=True)
class NoiseDraw:
    """A standard-normal draw together with the seed that produced it."""

    epsilon: np.ndarray
    seed: int

    @classmethod
    def draw(cls, shape: tuple[int, ...], seed: int, dtype=np.float64) -> "NoiseDraw":
        rng = np.random.Generator(np.random.PCG64(seed))
        return cls(rng.standard_normal(shape, dtype=dtype), seed)


def _check_diffusion_mode(img: ImageTensor, name: str) -> None:
    if img.value_range == DATASET_RANGE:
        raise ValueError(
            f"{name} is in dataset range [0, 1]; convert with to_diffusion_range() first")


def _check_same_shape(a: np.ndarray, b: np.ndarray, what: str) -> None:
    if a.shape != b.shape:
        raise ValueError(f"{what}: shape {b.shape} does not match image shape {a.shape}")


def gaussian_pdf(x: float, mu: float, sigma: float) -> float:
    """Density of N(mu, sigma^2) at x."""
    if sigma <= 0.0:
        raise ValueError(f"sigma must be positive, got sigma={sigma}")
    z = (x - mu) / sigma
    return math.exp(-0.5 * z * z) / (sigma * math.sqrt(2.0 * math.pi))


def q_step(x_prev: ImageTensor, t: int, s: VarianceSchedule, rng_seed: int) -> ImageTensor:
    """One forward noising step: sample N(sqrt(1-beta_t) x_prev, beta_t I)."""
    _check_diffusion_mode(x_prev, "x_prev")
    beta = s.beta(t)
    eps = NoiseDraw.draw(x_prev.shape, rng_seed, dtype=x_prev.data.dtype).epsilon
    _check_same_shape(x_prev.data, eps, "noise draw")
    out = math.sqrt(1.0 - beta) * x_prev.data + math.sqrt(beta) * eps
    return ImageTensor(out, value_range=None)


def q_sample(x0: ImageTensor, t: int, s: VarianceSchedule, noise: NoiseDraw) -> ImageTensor:
    """Closed-form t-step noising: x_t = sqrt(ab_t) x0 + sqrt(1-ab_t) eps.

    Equivalent in distribution to composing :func:`q_step` t times; pure in
    its inputs.
    """
    _check_diffusion_mode(x0, "x0")
    ab = s.alpha_bar(s._check_t(t))
    _check_same_shape(x0.data, noise.epsilon, "noise")
    out = math.sqrt(ab) * x0.data + math.sqrt(1.0 - ab) * noise.epsilon
    return ImageTensor(out, value_range=None)


def q_sample_batch(x0: np.ndarray, alpha_bars_t: np.ndarray, eps: np.ndarray) -> np.ndarray:
    """Array-level :func:`q_sample` over a batch with per-sample alpha_bar_t."""
    ab = alpha_bars_t.reshape(-1, 1, 1, 1).astype(x0.dtype, copy=False)
    return np.sqrt(ab) * x0 + np.sqrt(1.0 - ab) * eps


def posterior_mean_coeffs(s: VarianceSchedule, t: int) -> tuple[float, float]:
    """Coefficients (on x0_hat, on x_t) of the reverse-step posterior mean."""
    t = s._check_t(t)
    ab_t = s.alpha_bar(t)
    ab_prev = s.alpha_bar(t - 1)
    c0 = math.sqrt(ab_prev) * s.beta(t) / (1.0 - ab_t)
    ct = math.sqrt(s.alpha(t)) * (1.0 - ab_prev) / (1.0 - ab_t)
    return c0, ct


def p_step(x_t: ImageTensor, t: int, s: VarianceSchedule, denoiser: DenoiserFn,
           rng_seed: int, *, use_posterior_variance: bool = False) -> ImageTensor:
    """One reverse step from x_t toward x_{t-1}.

    Uses variance beta_t by default; ``use_posterior_variance`` switches to
    the tightened posterior variance. No noise is added at the final step
    (t == 1), so the last transition is deterministic given the denoiser.
    """
    _check_diffusion_mode(x_t, "x_t")
    t = s._check_t(t)
    x0_hat = denoiser(x_t, t)
    _check_same_shape(x_t.data, x0_hat.data, "denoiser output")
    c0, ct = posterior_mean_coeffs(s, t)
    mean = c0 * x0_hat.data + ct * x_t.data
    if t == 1:
        return ImageTensor(mean, value_range=None)
    var = s.posterior_variance(t) if use_posterior_variance else s.beta(t)
    eps = NoiseDraw.draw(x_t.shape, rng_seed, dtype=x_t.data.dtype).epsilon
    return ImageTensor(mean + math.sqrt(var) * eps, value_range=None)


def sample(s: VarianceSchedule, shape: tuple[int, int, int], denoiser: DenoiserFn,
           rng_seed: int, *, use_posterior_variance: bool = False,
           dtype=np.float64) -> ImageTensor:
    """Draw x_T ~ N(0, I) and run p_step for t = T..1; clamp the result.

    The whole trajectory is reproducible from ``rng_seed``: the initial draw
    and every step's noise use seeds derived from it.
    """
    seeds = np.random.SeedSequence(rng_seed).generate_state(s.T + 1)
    rng = np.random.Generator(np.random.PCG64(int(seeds[0])))
    x = ImageTensor(rng.standard_normal(shape, dtype=dtype), value_range=None)
    for t in range(s.T, 0, -1):
        x = p_step(x, t, s, denoiser, int(seeds[t]),
                   use_posterior_variance=use_posterior_variance)
    return x.clamped(DIFFUSION_RANGE)


def diffusion_loss(x0: ImageTensor, x0_pred: ImageTensor) -> float:
    """Mean absolute error between the clean image and its reconstruction."""
    _check_same_shape(x0.data, x0_pred.data, "x0_pred")
    return float(np.mean(np.abs(x0.data - x0_pred.data)))
