"""Pure-numpy implementations of the hot kernels.

Numerically equivalent to the compiled versions in ``_core``; floating-point
results may differ in the last ULP on non-integer data because numpy uses
pairwise summation while the compiled loops accumulate sequentially.
"""

import numpy as np


def block_sum(image, n):
    """Sum ``n x n`` blocks of ``image`` anchored at the top-left corner.

    Rows/columns that do not fill a complete block are discarded.
    """
    image = np.ascontiguousarray(image, dtype=np.float64)
    h, w = image.shape
    hb, wb = h // n, w // n
    trimmed = image[: hb * n, : wb * n]
    return trimmed.reshape(hb, n, wb, n).sum(axis=(1, 3))


def deposit(out, rows, cols):
    """Accumulate one count per (row, col) index pair into ``out`` in place.

    Indices must already be in bounds.
    """
    h, w = out.shape
    flat = rows * w + cols
    counts = np.bincount(flat, minlength=h * w)
    out += counts.reshape(h, w)
    return out


def deposit_weighted(out, rows, cols, weights):
    """Accumulate ``weights`` at (row, col) index pairs into ``out`` in place."""
    h, w = out.shape
    flat = rows * w + cols
    acc = np.bincount(flat, weights=weights, minlength=h * w)
    out += acc.reshape(h, w)
    return out


def pearson_shift_map(a, b, radius_r, radius_c):
    """Pearson correlation of ``b`` against ``a`` for every integer shift.

    Entry ``[radius_r + dr, radius_c + dc]`` is the correlation over the
    overlap region when ``b`` is displaced by ``(dr, dc)`` relative to ``a``,
    i.e. pixel ``b[i, j]`` is compared with ``a[i - dr, j - dc]``.
    Degenerate overlaps (zero variance on either side) yield 0.
    """
    a = np.ascontiguousarray(a, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    h, w = a.shape
    out = np.zeros((2 * radius_r + 1, 2 * radius_c + 1))
    for dr in range(-radius_r, radius_r + 1):
        for dc in range(-radius_c, radius_c + 1):
            r0, r1 = max(dr, 0), h + min(dr, 0)
            c0, c1 = max(dc, 0), w + min(dc, 0)
            if r1 - r0 < 2 or c1 - c0 < 2:
                continue
            bo = b[r0:r1, c0:c1]
            ao = a[r0 - dr : r1 - dr, c0 - dc : c1 - dc]
            am = ao.mean()
            bm = bo.mean()
            da = ao - am
            db = bo - bm
            va = np.sum(da * da)
            vb = np.sum(db * db)
            if va <= 0.0 or vb <= 0.0:
                continue
            out[dr + radius_r, dc + radius_c] = np.sum(da * db) / np.sqrt(va * vb)
    return out
