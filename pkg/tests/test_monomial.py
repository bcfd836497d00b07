from collections import deque

import pytest
from hypothesis import given, strategies as st

from grues.monomial import (
    MOVE_KINDS,
    BinomialMove,
    MoveError,
    admissible_moves,
    apply_merge,
    apply_move,
    apply_out_add,
    apply_out_del,
    apply_split,
    apply_within,
    fiber_equivalent,
    neighbors,
)
from grues.uec import (
    MonomialRep,
    all_monomial_reps,
    enumerate_uec_representatives,
    independence_number,
    is_uec_representative,
    sufficient_statistic,
)

from conftest import uec_graphs

ALPHA_CHANGE = {"merge": -1, "split": 1, "out_add": 0, "out_del": 0, "within": 0}


def rep(n, *terms):
    return MonomialRep.of(n, terms)


def test_two_step_within_walk():
    start = rep(5, (0, {1}), (2, {1, 3}), (4, {3}))
    # term order is source-sorted: 0, 2, 4
    mid = apply_within(start, 2, 0, {1})
    assert mid == rep(5, (0, set()), (2, {1, 3}), (4, {1, 3}))
    end = apply_within(mid, 0, 1, {3})
    assert end == rep(5, (0, {3}), (2, {1}), (4, {1, 3}))
    assert sufficient_statistic(start) == sufficient_statistic(end)


def test_mixed_walk_between_fibers():
    u = rep(5, (0, {2}), (1, {2, 4}), (3, {2, 4}))
    u1 = apply_out_del(u, 1, 0, 2)
    assert u1 == rep(5, (0, set()), (1, {2, 4}), (3, {2, 4}))
    # the example labels this step within-fiber; dropping 2 from one tail is a delete
    u2 = apply_out_del(u1, 1, 2, 2)
    assert u2 == rep(5, (0, set()), (1, {2, 4}), (3, {4}))
    # re-source the clique {1,2,4} at 2
    u2b = rep(5, (0, set()), (2, {1, 4}), (3, {4}))
    assert u2b.realize() == u2.realize()
    u3 = apply_within(u2b, 0, 1, {1})
    assert u3 == rep(5, (0, {1}), (2, {4}), (3, {4}))
    u4 = apply_out_del(u3, 1, 2, 4)
    assert u4 == rep(5, (0, {1}), (2, {4}), (3, set()))
    u5 = apply_out_add(u4, 0, 1, 1)
    u6 = apply_out_add(u5, 0, 2, 1)
    assert u6 == rep(5, (0, {1}), (2, {1, 4}), (3, {1}))


def test_merge_and_split_are_inverse():
    two = rep(3, (0, {2}), (1, {2}))
    merged = apply_merge(two, 0, 1)
    assert merged == rep(3, (0, {1, 2}))
    assert apply_split(merged, 0, 1) == two


@pytest.mark.parametrize(
    "call",
    [
        lambda r: apply_within(r, 0, 0, {1}),
        lambda r: apply_within(r, 0, 1, {0}),
        lambda r: apply_out_add(r, 0, 1, 3),
        lambda r: apply_out_del(r, 0, 1, 1),
        lambda r: apply_merge(r, 0, 1),
        lambda r: apply_split(r, 0, 3),
        lambda r: apply_within(r, 0, 5, {1}),
    ],
)
def test_inadmissible_moves_raise(call):
    r = rep(5, (0, {1, 3}), (2, {3, 4}))
    with pytest.raises(MoveError):
        call(r)


def test_apply_move_dispatch():
    r = rep(4, (0, {2, 3}), (1, {3}))
    assert apply_move(r, BinomialMove("out_add", 0, 1, frozenset({2}))) == apply_out_add(r, 0, 1, 2)
    assert apply_move(r, BinomialMove("split", 0, None, frozenset({2}))) == apply_split(r, 0, 2)


@given(uec_graphs(max_n=6), st.data())
def test_moves_stay_in_the_space(g, data):
    reps = all_monomial_reps(g)
    r = data.draw(st.sampled_from(reps))
    moves = list(admissible_moves(r))
    if not moves:
        return
    move = data.draw(st.sampled_from(moves))
    out = apply_move(r, move)
    h = out.realize()
    assert is_uec_representative(h)
    assert independence_number(h) == independence_number(g) + ALPHA_CHANGE[move.kind]
    if move.kind == "within":
        assert sufficient_statistic(out) == sufficient_statistic(r)


@given(uec_graphs(max_n=5))
def test_within_neighbors_are_fiber_equivalent(g):
    for h in neighbors(g, ("within",)):
        assert fiber_equivalent(g, h)


def test_fiber_equivalence_examples():
    u = rep(5, (0, {1, 2}), (3, {2, 4})).realize()
    v = rep(5, (0, {2, 4}), (3, {1, 2})).realize()
    assert fiber_equivalent(u, v)
    assert not fiber_equivalent(u, rep(5, (0, {1}), (3, {2, 4})).realize())


@pytest.mark.parametrize("n,count", [(3, 8), (4, 49)])
def test_moves_connect_everything(n, count):
    reps = enumerate_uec_representatives(n)
    start = reps[0]
    seen = {start}
    queue = deque([start])
    while queue:
        g = queue.popleft()
        for h in neighbors(g, MOVE_KINDS):
            if h not in seen:
                seen.add(h)
                queue.append(h)
    assert len(seen) == count == len(reps)
