"""Small numerical helpers shared across the package."""

from __future__ import annotations

import numpy as np

LN2 = float(np.log(2.0))
DB_PER_NAT = 10.0 / float(np.log(10.0))


def logsumexp(a, axis=None, keepdims=False):
    """Stable log(sum(exp(a))) with the usual max-shift.

    -inf entries are handled (they contribute zero mass); an all--inf
    slice returns -inf.
    """
    a = np.asarray(a, dtype=float)
    amax = np.max(a, axis=axis, keepdims=True)
    amax = np.where(np.isfinite(amax), amax, 0.0)
    total = np.sum(np.exp(a - amax), axis=axis, keepdims=True)
    with np.errstate(divide="ignore"):
        out = np.log(total) + amax
    if not keepdims and axis is not None:
        out = np.squeeze(out, axis=axis)
    elif not keepdims:
        out = out.reshape(())
    return out if out.ndim else float(out)


def log_normalize(log_w, axis=None):
    """Shift log weights so they describe a normalized distribution."""
    return log_w - logsumexp(log_w, axis=axis, keepdims=axis is not None)


def nats_to_db(x):
    """Convert -log(p) in nats to 10*log10(1/p) in dB."""
    return DB_PER_NAT * np.asarray(x, dtype=float)


def largest_remainder_allocation(weights, total):
    """Split `total` items over `weights` proportionally, rounding by
    largest remainder so the counts sum exactly to `total`."""
    w = np.asarray(weights, dtype=float)
    if w.sum() <= 0:
        raise ValueError("weights must have positive mass")
    w = w / w.sum()
    raw = w * total
    counts = np.floor(raw).astype(int)
    short = total - int(counts.sum())
    if short > 0:
        order = np.argsort(-(raw - counts), kind="stable")
        counts[order[:short]] += 1
    return counts
