"""Independent reference computations used only by the tests."""

import math

import numpy as np


def rowspace_recoverable(rows, k):
    """Brute-force the GF(2) span of ``rows`` (pairs of coefficient and
    payload ints).  Returns ``{sensor: payload}`` for every unit vector in
    the span.  Exponential in the number of rows."""
    m = len(rows)
    found = {}
    for mask in range(1, 1 << m):
        c = p = 0
        for j in range(m):
            if mask >> j & 1:
                c ^= rows[j][0]
                p ^= rows[j][1]
        if c and c & (c - 1) == 0:
            found.setdefault(c.bit_length() - 1, p)
    return {i: p for i, p in found.items() if i < k}


def mc_disc_square_area(cx, cy, r, L, samples, seed, chunk=1_000_000):
    """Monte Carlo area of disc ∩ [0, L]^2, sampling the disc's bounding box."""
    rng = np.random.default_rng(seed)
    hits = 0
    done = 0
    while done < samples:
        m = min(chunk, samples - done)
        x = rng.uniform(cx - r, cx + r, m)
        y = rng.uniform(cy - r, cy + r, m)
        inside = ((x - cx) ** 2 + (y - cy) ** 2 <= r * r) & (x >= 0) & (x <= L) & (y >= 0) & (y <= L)
        hits += int(inside.sum())
        done += m
    box = 4 * r * r
    p = hits / samples
    return box * p, box * math.sqrt(p * (1 - p) / samples)


def edge_clipped_area(r, d):
    """Disc of radius r whose centre is distance d < r from a single edge."""
    return math.pi * r * r - (r * r * math.acos(d / r) - d * math.sqrt(r * r - d * d))
