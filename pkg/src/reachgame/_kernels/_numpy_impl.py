"""Pure-numpy implementations of the two hot kernels.

These are the reference semantics; the compiled core in ``_core.pyx`` must
agree with them to floating-point roundoff.  Dense BLAS contractions are used
throughout, so this backend is competitive on dense kernels and slower than
the compiled core on games with sparse transition rows.
"""

import numpy as np

BACKEND = "python"

# Bounds the (S, A, chunk) temporary in br_action_values.
_ENTRY_CHUNK = 8192


def masked_value_contract(v_next: np.ndarray, kernels, mask: np.ndarray) -> np.ndarray:
    """One backward step of the joint-state value recursion.

    Contracts the flat next-time value table (length S**n) with one (S, S)
    row-stochastic matrix per player, one axis at a time, then applies the
    collision mask.

    Parameters
    ----------
    v_next : (S**n,) array
    kernels : sequence of n (S, S) arrays
        ``kernels[j][s, s']`` moves player j from s to s'.
    mask : (S**n,) array
        Multiplied in after the contraction (typically the pairwise-distinct
        indicator).
    """
    n = len(kernels)
    s_count = kernels[0].shape[0]
    w = v_next.reshape((s_count,) * n)
    for j, y in enumerate(kernels):
        w = np.moveaxis(np.tensordot(y, w, axes=([1], [j])), 0, j)
    return mask * w.reshape(-1)


def br_action_values(
    v_next: np.ndarray,
    own_kernel: np.ndarray,
    player: int,
    n_players: int,
    src_digits: np.ndarray,
    internal_ok: np.ndarray,
    dst: np.ndarray,
    mass: np.ndarray,
) -> np.ndarray:
    """Occupancy-projected continuation value of every (state, action) pair.

    For each sparse two-step opponent entry e = (src, dst, mass) the
    contribution to local state s and action a is

        mass_e * [src internally distinct] * [s not among src digits]
               * sum_s' own_kernel[s, a, s'] * v_next[join(s', dst_e)]

    where join() splices the player's digit into the packed opponent index.

    Parameters
    ----------
    v_next : (S**n,) array              flat joint value at t+1
    own_kernel : (S, A, S) array        the responding player's kernel
    player : int                        responding player index
    n_players : int
    src_digits : (E, n-1) int64 array   unpacked source opponent states
    internal_ok : (E,) bool array       src pairwise distinct
    dst : (E,) int64 array              packed destination opponent states
    mass : (E,) float64 array           two-step occupancy weights

    Returns
    -------
    (S, A) float64 array
    """
    s_count, a_count = own_kernel.shape[0], own_kernel.shape[1]
    n_entries = dst.shape[0]
    values = np.zeros((s_count, a_count))
    if n_entries == 0:
        return values
    low_radix = s_count ** (n_players - 1 - player)
    dst_base = (dst // low_radix) * (low_radix * s_count) + dst % low_radix
    kernel_2d = own_kernel.reshape(s_count * a_count, s_count)
    own_offsets = np.arange(s_count, dtype=np.int64)[:, None] * low_radix
    local_states = np.arange(s_count)[:, None, None]
    for lo in range(0, n_entries, _ENTRY_CHUNK):
        hi = min(lo + _ENTRY_CHUNK, n_entries)
        u = v_next[dst_base[None, lo:hi] + own_offsets]  # (S, chunk)
        cont = (kernel_2d @ u).reshape(s_count, a_count, hi - lo)
        occupied = (src_digits[None, lo:hi, :] == local_states).any(axis=2)
        weights = np.where(
            internal_ok[None, lo:hi] & ~occupied, mass[None, lo:hi], 0.0
        )
        values += np.einsum("se,sae->sa", weights, cont)
    return values
