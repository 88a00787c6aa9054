import numpy as np
from hypothesis import given, strategies as st

from reachgame.indexing import (
    collision_free_mask,
    drop_player_digit,
    insert_player_digit,
    pack_joint,
    pairwise_distinct,
    unpack_joint,
)


@given(
    st.integers(2, 6),
    st.integers(1, 4),
    st.integers(0, 10**6),
)
def test_pack_unpack_roundtrip(state_count, n, raw):
    packed = raw % state_count**n
    states = unpack_joint(packed, state_count, n)
    assert pack_joint(states, state_count) == packed
    assert np.all((0 <= states) & (states < state_count))


@given(st.integers(2, 5), st.integers(2, 4), st.integers(0, 10**6), st.integers(0, 4))
def test_insert_drop_inverse(state_count, n, raw, player):
    player = player % n
    rest = raw % state_count ** (n - 1)
    own = raw % state_count
    full = insert_player_digit(rest, own, player, state_count, n)
    assert drop_player_digit(full, player, state_count, n) == rest
    assert unpack_joint(full, state_count, n)[player] == own


def test_collision_mask_matches_definition():
    mask = collision_free_mask(3, 3)
    digits = unpack_joint(np.arange(27), 3, 3)
    for idx in range(27):
        expect = float(len(set(digits[idx].tolist())) == 3)
        assert mask[idx] == expect


def test_pairwise_distinct_empty_and_single():
    assert pairwise_distinct(np.empty((4, 0), dtype=np.int64)).all()
    assert pairwise_distinct(np.array([[2], [0]])).all()
