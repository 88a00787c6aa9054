"""Packed joint-state indexing.

A joint state (s_0, ..., s_{n-1}) over a shared state space of size S is
stored as the base-S integer sum_k s_k * S**(n-1-k), i.e. player 0 is the
most significant digit.  This matches ``numpy.reshape`` row-major order, so
a flat value table of length S**n can be viewed as an (S, ..., S) tensor
whose axis k belongs to player k.
"""

from functools import lru_cache

import numpy as np


def pack_joint(states, state_count: int) -> np.ndarray:
    """Pack per-player state columns into flat joint indices.

    Parameters
    ----------
    states : array-like, shape (..., n)
        Last axis enumerates players in index order.
    state_count : int
        Shared state-space size S.

    Returns
    -------
    ndarray of int64, shape (...,)
    """
    arr = np.asarray(states, dtype=np.int64)
    n = arr.shape[-1]
    radix = state_count ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return arr @ radix


def unpack_joint(packed, state_count: int, n: int) -> np.ndarray:
    """Inverse of :func:`pack_joint`; returns shape (..., n)."""
    idx = np.asarray(packed, dtype=np.int64)
    out = np.empty(idx.shape + (n,), dtype=np.int64)
    for k in range(n - 1, -1, -1):
        out[..., k] = idx % state_count
        idx = idx // state_count
    return out


def joint_digits(state_count: int, n: int) -> np.ndarray:
    """Digit table for every packed joint index; shape (S**n, n), read-only."""
    return _joint_digits_cached(state_count, n)


@lru_cache(maxsize=64)
def _joint_digits_cached(state_count: int, n: int) -> np.ndarray:
    digits = unpack_joint(np.arange(state_count**n, dtype=np.int64), state_count, n)
    digits.setflags(write=False)
    return digits


def collision_free_mask(state_count: int, n: int) -> np.ndarray:
    """Indicator over packed joint states that all n players occupy distinct
    states (1.0 where pairwise distinct, else 0.0).  Cached and read-only."""
    return _collision_free_cached(state_count, n)


@lru_cache(maxsize=64)
def _collision_free_cached(state_count: int, n: int) -> np.ndarray:
    digits = joint_digits(state_count, n)
    ok = np.ones(state_count**n, dtype=bool)
    for a in range(n):
        for b in range(a + 1, n):
            ok &= digits[:, a] != digits[:, b]
    mask = ok.astype(np.float64)
    mask.setflags(write=False)
    return mask


def pairwise_distinct(digits: np.ndarray) -> np.ndarray:
    """Row-wise all-distinct check for a (..., m) digit array."""
    arr = np.asarray(digits)
    m = arr.shape[-1]
    ok = np.ones(arr.shape[:-1], dtype=bool)
    for a in range(m):
        for b in range(a + 1, m):
            ok &= arr[..., a] != arr[..., b]
    return ok


def insert_player_digit(packed_rest, own_state, player: int, state_count: int, n: int):
    """Splice player ``player``'s state into a packed (n-1)-player index.

    ``packed_rest`` packs the other players in increasing player order.
    Broadcasts ``packed_rest`` against ``own_state``.
    """
    low_radix = state_count ** (n - 1 - player)
    rest = np.asarray(packed_rest, dtype=np.int64)
    high, low = rest // low_radix, rest % low_radix
    return (high * state_count + np.asarray(own_state, dtype=np.int64)) * low_radix + low


def drop_player_digit(packed_full, player: int, state_count: int, n: int):
    """Remove player ``player``'s digit from a packed n-player index."""
    low_radix = state_count ** (n - 1 - player)
    full = np.asarray(packed_full, dtype=np.int64)
    high = full // (low_radix * state_count)
    low = full % low_radix
    return high * low_radix + low
