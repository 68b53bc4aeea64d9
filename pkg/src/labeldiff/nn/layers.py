"""Minimal feed-forward layers with explicit forward/backward passes.

Each layer caches what its backward pass needs and accumulates parameter
gradients into ``Param.grad`` (callers zero grads between steps). Convs run
through the im2col/col2im kernels in :mod:`labeldiff.kernels`; the matrix
products go to BLAS. Dtypes: every layer holds float32 or float64 parameters
and casts its input to match.
"""

from __future__ import annotations

import math

import numpy as np

from .. import kernels


class Param:
    """A learnable array plus its gradient accumulator."""

    __slots__ = ("value", "grad")

    def __init__(self, value: np.ndarray):
        self.value = value
        self.grad = np.zeros_like(value)


def sigmoid(x: np.ndarray) -> np.ndarray:
    """Numerically stable logistic function."""
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def sinusoidal_embedding(t: np.ndarray, dim: int, max_period: float = 10000.0,
                         dtype=np.float64) -> np.ndarray:
    """Fixed sin/cos features of a timestep vector, shape (N, dim)."""
    if dim % 2 != 0:
        raise ValueError(f"embedding dim must be even, got {dim}")
    half = dim // 2
    freqs = np.exp(-math.log(max_period) * np.arange(half, dtype=np.float64) / half)
    args = np.asarray(t, dtype=np.float64).reshape(-1, 1) * freqs[None, :]
    return np.concatenate([np.cos(args), np.sin(args)], axis=1).astype(dtype)


class Conv2d:
    """3x3-style convolution via im2col + GEMM, stride 1 or 2, zero padding."""

    def __init__(self, in_ch: int, out_ch: int, k: int = 3, stride: int = 1,
                 pad: int | None = None, rng: np.random.Generator | None = None,
                 init_scale: float = 1.0, dtype=np.float32):
        self.in_ch, self.out_ch, self.k, self.stride = in_ch, out_ch, k, stride
        self.pad = k // 2 if pad is None else pad
        rng = rng or np.random.default_rng()
        std = init_scale * math.sqrt(2.0 / (in_ch * k * k))
        w = rng.standard_normal((out_ch, in_ch, k, k)) * std
        self.weight = Param(w.astype(dtype))
        self.bias = Param(np.zeros(out_ch, dtype=dtype))
        self._cache = None

    def params(self):
        return [("weight", self.weight), ("bias", self.bias)]

    def forward(self, x: np.ndarray) -> np.ndarray:
        x = np.ascontiguousarray(x, dtype=self.weight.value.dtype)
        n, c, h, w = x.shape
        if c != self.in_ch:
            raise ValueError(f"expected {self.in_ch} input channels, got {c}")
        p = self.pad
        xp = np.pad(x, ((0, 0), (0, 0), (p, p), (p, p))) if p else x
        cols = kernels.im2col(xp, self.k, self.stride)
        ckk, _, l = cols.shape
        colsf = cols.reshape(ckk, n * l)
        w2 = self.weight.value.reshape(self.out_ch, ckk)
        y = w2 @ colsf + self.bias.value[:, None]
        oh = (xp.shape[2] - self.k) // self.stride + 1
        ow = (xp.shape[3] - self.k) // self.stride + 1
        self._cache = (colsf, xp.shape, (n, c, h, w))
        return y.reshape(self.out_ch, n, l).transpose(1, 0, 2).reshape(n, self.out_ch, oh, ow)

    def backward(self, dy: np.ndarray) -> np.ndarray:
        colsf, xp_shape, x_shape = self._cache
        n, c, h, w = x_shape
        ckk = colsf.shape[0]
        dyf = np.ascontiguousarray(dy.transpose(1, 0, 2, 3)).reshape(self.out_ch, -1)
        w2 = self.weight.value.reshape(self.out_ch, ckk)
        self.weight.grad += (dyf @ colsf.T).reshape(self.weight.value.shape)
        self.bias.grad += dyf.sum(axis=1)
        dcols = (w2.T @ dyf).reshape(ckk, n, -1)
        dxp = kernels.col2im(np.ascontiguousarray(dcols), n, c, xp_shape[2], xp_shape[3],
                             self.k, self.stride)
        p = self.pad
        return dxp[:, :, p:p + h, p:p + w] if p else dxp


class Linear:
    def __init__(self, in_dim: int, out_dim: int, rng: np.random.Generator | None = None,
                 init_scale: float = 1.0, dtype=np.float32):
        rng = rng or np.random.default_rng()
        std = init_scale * math.sqrt(2.0 / in_dim)
        self.weight = Param((rng.standard_normal((out_dim, in_dim)) * std).astype(dtype))
        self.bias = Param(np.zeros(out_dim, dtype=dtype))
        self._cache = None

    def params(self):
        return [("weight", self.weight), ("bias", self.bias)]

    def forward(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=self.weight.value.dtype)
        self._cache = x
        return x @ self.weight.value.T + self.bias.value

    def backward(self, dy: np.ndarray) -> np.ndarray:
        x = self._cache
        self.weight.grad += dy.T @ x
        self.bias.grad += dy.sum(axis=0)
        return dy @ self.weight.value


class SiLU:
    """x * sigmoid(x); smooth everywhere, which keeps finite differences honest."""

    def __init__(self):
        self._cache = None

    def params(self):
        return []

    def forward(self, x: np.ndarray) -> np.ndarray:
        s = sigmoid(x)
        self._cache = (x, s)
        return x * s

    def backward(self, dy: np.ndarray) -> np.ndarray:
        x, s = self._cache
        return dy * (s * (1.0 + x * (1.0 - s)))


class GroupNorm:
    """Normalize over channel groups x spatial extent, with per-channel affine."""

    def __init__(self, channels: int, groups: int | None = None, eps: float = 1e-5,
                 dtype=np.float32):
        if groups is None:
            groups = 4 if channels % 4 == 0 else (2 if channels % 2 == 0 else 1)
        if channels % groups != 0:
            raise ValueError(f"channels={channels} not divisible by groups={groups}")
        self.channels, self.groups, self.eps = channels, groups, eps
        self.gamma = Param(np.ones(channels, dtype=dtype))
        self.beta = Param(np.zeros(channels, dtype=dtype))
        self._cache = None

    def params(self):
        return [("gamma", self.gamma), ("beta", self.beta)]

    def forward(self, x: np.ndarray) -> np.ndarray:
        x = np.ascontiguousarray(x, dtype=self.gamma.value.dtype)
        n, c, h, w = x.shape
        g = self.groups
        xg = x.reshape(n, g, -1)
        mu = xg.mean(axis=2, keepdims=True)
        var = xg.var(axis=2, keepdims=True)
        invstd = 1.0 / np.sqrt(var + self.eps)
        xhat = ((xg - mu) * invstd).reshape(n, c, h, w)
        self._cache = (xhat, invstd)
        return self.gamma.value[None, :, None, None] * xhat + self.beta.value[None, :, None, None]

    def backward(self, dy: np.ndarray) -> np.ndarray:
        xhat, invstd = self._cache
        n, c, h, w = dy.shape
        g = self.groups
        self.gamma.grad += (dy * xhat).sum(axis=(0, 2, 3))
        self.beta.grad += dy.sum(axis=(0, 2, 3))
        dxhat = (dy * self.gamma.value[None, :, None, None]).reshape(n, g, -1)
        xhat_g = xhat.reshape(n, g, -1)
        mean_d = dxhat.mean(axis=2, keepdims=True)
        mean_dx = (dxhat * xhat_g).mean(axis=2, keepdims=True)
        dxg = invstd * (dxhat - mean_d - xhat_g * mean_dx)
        return dxg.reshape(n, c, h, w)


class NearestUpsample2x:
    def __init__(self):
        self._shape = None

    def params(self):
        return []

    def forward(self, x: np.ndarray) -> np.ndarray:
        self._shape = x.shape
        return x.repeat(2, axis=2).repeat(2, axis=3)

    def backward(self, dy: np.ndarray) -> np.ndarray:
        n, c, h, w = self._shape
        return dy.reshape(n, c, h, 2, w, 2).sum(axis=(3, 5))
