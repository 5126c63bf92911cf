"""Compiled inner loops for skip-gram training.

All randomness comes from a 64-bit linear congruential generator whose state
lives in a one-element ``uint64`` array owned by the caller, so a single
worker replays bit for bit from the same seed. Kernels release the GIL;
concurrent workers update the shared matrices without locks.
"""

import math

import numpy as np
from numba import njit

_MULT = np.uint64(25214903917)
_INC = np.uint64(11)
_SHIFT = np.uint64(11)
_SCALE = 1.0 / 9007199254740992.0  # 2**-53


def seed_state(seed, stream=0):
    """Fresh generator state for worker ``stream``."""
    mixed = (int(seed) * 0x9E3779B97F4A7C15 + int(stream) * 0xBF58476D1CE4E5B9 + 1) % (1 << 64)
    return np.array([mixed], dtype=np.uint64)


@njit(cache=True, nogil=True)
def uniform(state):
    state[0] = state[0] * _MULT + _INC
    return (state[0] >> _SHIFT) * _SCALE


@njit(cache=True, nogil=True)
def sigmoid(x):
    if x >= 0.0:
        return 1.0 / (1.0 + math.exp(-x))
    z = math.exp(x)
    return z / (1.0 + z)


@njit(cache=True, nogil=True)
def sample_index(cdf, state):
    i = np.searchsorted(cdf, uniform(state), side="right")
    if i >= cdf.shape[0]:
        i = cdf.shape[0] - 1
    return i


@njit(cache=True, nogil=True)
def draw_many(cdf, n, state):
    out = np.empty(n, dtype=np.int64)
    for i in range(n):
        out[i] = sample_index(cdf, state)
    return out


@njit(cache=True, nogil=True)
def sgns_update(syn0, syn1, center, targets, n_targets, lr, neu1e, dots):
    """One exact gradient step on a (center, targets) group.

    ``targets[0]`` is the positive context and the rest are negatives. Every
    dot product is taken before any row moves, so the step equals ``-lr``
    times the analytic gradient even when a negative repeats.
    """
    dim = syn0.shape[1]
    for j in range(n_targets):
        t = targets[j]
        acc = 0.0
        for d in range(dim):
            acc += syn1[t, d] * syn0[center, d]
        dots[j] = acc
    for d in range(dim):
        neu1e[d] = 0.0
    for j in range(n_targets):
        label = 1.0 if j == 0 else 0.0
        g = (label - sigmoid(dots[j])) * lr
        dots[j] = g
        t = targets[j]
        for d in range(dim):
            neu1e[d] += g * syn1[t, d]
    for j in range(n_targets):
        g = dots[j]
        t = targets[j]
        for d in range(dim):
            syn1[t, d] += g * syn0[center, d]
    for d in range(dim):
        syn0[center, d] += neu1e[d]


@njit(cache=True, nogil=True)
def train_chunk(
    syn0,
    syn1,
    tokens,
    sent_bounds,
    keep_prob,
    cdf,
    window,
    negatives,
    initial_lr,
    progress,
    total,
    state,
):
    """Train on a chunk of encoded sentences.

    ``sent_bounds`` has one more entry than there are sentences; sentence
    ``s`` is ``tokens[sent_bounds[s]:sent_bounds[s + 1]]``. ``progress`` is a
    shared one-element counter of center tokens seen so far, used for the
    linear learning-rate decay.
    """
    dim = syn0.shape[1]
    vocab_size = syn0.shape[0]
    neu1e = np.zeros(dim)
    dots = np.zeros(negatives + 1)
    targets = np.zeros(negatives + 1, dtype=np.int64)
    kept = np.empty(tokens.shape[0], dtype=np.int64)
    min_lr = initial_lr * 1e-4
    for s in range(sent_bounds.shape[0] - 1):
        n = 0
        for p in range(sent_bounds[s], sent_bounds[s + 1]):
            w = tokens[p]
            if keep_prob[w] < 1.0 and keep_prob[w] < uniform(state):
                continue
            kept[n] = w
            n += 1
        for i in range(n):
            frac = progress[0] / total if total > 0 else 0.0
            lr = initial_lr * (1.0 - frac)
            if lr < min_lr:
                lr = min_lr
            progress[0] += 1
            center = kept[i]
            radius = window - int(uniform(state) * window)
            if radius < 1:
                radius = 1
            lo = i - radius
            if lo < 0:
                lo = 0
            hi = i + radius + 1
            if hi > n:
                hi = n
            for c in range(lo, hi):
                if c == i:
                    continue
                context = kept[c]
                targets[0] = context
                n_targets = 1
                if vocab_size > 1:
                    for _ in range(negatives):
                        neg = sample_index(cdf, state)
                        while neg == context:
                            neg = sample_index(cdf, state)
                        targets[n_targets] = neg
                        n_targets += 1
                sgns_update(syn0, syn1, center, targets, n_targets, lr, neu1e, dots)
        # center tokens dropped by subsampling still advance the schedule
        progress[0] += (sent_bounds[s + 1] - sent_bounds[s]) - n
