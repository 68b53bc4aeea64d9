"""Pure-numpy im2col / col2im, the fallback backend.

Both functions loop only over the k*k kernel offsets; each iteration is a
vectorized strided copy (im2col) or accumulate (col2im), so the fallback is
usable for real work, just slower than the compiled backend.
"""

import numpy as np

BACKEND = "numpy"


def im2col(x, k, stride):
    """Unfold padded images into patch columns.

    x: (N, C, Hp, Wp) C-contiguous float array, already padded.
    Returns (C*k*k, N, OH*OW) with the leading axis ordered (c, ki, kj),
    matching a (out_ch, in_ch, k, k) weight tensor flattened per out channel.
    """
    n, c, hp, wp = x.shape
    oh = (hp - k) // stride + 1
    ow = (wp - k) // stride + 1
    out = np.empty((c, k, k, n, oh * ow), dtype=x.dtype)
    for ki in range(k):
        hi = ki + stride * (oh - 1) + 1
        for kj in range(k):
            wj = kj + stride * (ow - 1) + 1
            blk = x[:, :, ki:hi:stride, kj:wj:stride]
            out[:, ki, kj] = blk.transpose(1, 0, 2, 3).reshape(c, n, oh * ow)
    return out.reshape(c * k * k, n, oh * ow)


def col2im(cols, n, c, hp, wp, k, stride):
    """Scatter-add patch columns back onto a padded image gradient.

    cols: (C*k*k, N, OH*OW) as produced by :func:`im2col`.
    Returns (N, C, Hp, Wp).
    """
    oh = (hp - k) // stride + 1
    ow = (wp - k) // stride + 1
    cols6 = cols.reshape(c, k, k, n, oh, ow)
    x = np.zeros((n, c, hp, wp), dtype=cols.dtype)
    for ki in range(k):
        hi = ki + stride * (oh - 1) + 1
        for kj in range(k):
            wj = kj + stride * (ow - 1) + 1
            x[:, :, ki:hi:stride, kj:wj:stride] += cols6[:, ki, kj].transpose(1, 0, 2, 3)
    return x
