import pytest
from hypothesis import given, settings, strategies as st

from conftest import arc, fixture_text, random_instance
from netkernel.errors import SupportError
from netkernel.instance import expected_rank, parse_instance
from netkernel.oracle import assemble_dense, bareiss_rank
from netkernel.support import (
    Support,
    build_support,
    format_support,
    load_support,
    parse_support,
    spanning_tree,
    verify_support,
)

EXAMPLE = parse_instance(fixture_text("example.inst"))


def test_pinned_trees_load():
    support = load_support(EXAMPLE, fixture_text("example.support"))
    assert support.tree(1) == (arc(1, 1, 2), arc(1, 1, 3))
    assert support.tree(2) == (arc(2, 2, 3), arc(2, 2, 4), arc(2, 4, 5))
    assert support.tree(3) == (arc(3, 2, 4), arc(3, 3, 4), arc(3, 4, 5))
    assert support.non_tree(EXAMPLE.commodity(2)) == [arc(2, 3, 4), arc(2, 5, 3)]


def test_automatic_trees_follow_depth_first_order():
    support = build_support(EXAMPLE)
    assert support.tree(1) == (arc(1, 1, 2), arc(1, 2, 3))
    assert support.tree(2) == (arc(2, 2, 3), arc(2, 3, 4), arc(2, 4, 5))
    assert verify_support(EXAMPLE, support)


def test_alternative_tree_verifies():
    trees = dict(build_support(EXAMPLE).trees)
    trees[1] = (arc(1, 1, 2), arc(1, 2, 3))
    assert verify_support(EXAMPLE, Support(trees))


def test_cyclic_tree_rejected():
    trees = dict(build_support(EXAMPLE).trees)
    trees[2] = (arc(2, 2, 3), arc(2, 3, 4), arc(2, 2, 4))
    check = verify_support(EXAMPLE, Support(trees))
    assert not check
    assert check.k == 2
    assert "cycle" in check.reason


def test_wrong_arc_count_rejected():
    trees = dict(build_support(EXAMPLE).trees)
    trees[3] = trees[3][:2]
    check = verify_support(EXAMPLE, Support(trees))
    assert not check and check.k == 3


def test_undeclared_arc_raises():
    trees = dict(build_support(EXAMPLE).trees)
    trees[1] = (arc(1, 2, 1), arc(1, 2, 3))
    with pytest.raises(SupportError, match="undeclared"):
        verify_support(EXAMPLE, Support(trees))


def test_empty_support_file():
    with pytest.raises(SupportError, match="no tree"):
        load_support(EXAMPLE, "")


def test_support_file_syntax_errors():
    with pytest.raises(SupportError, match="line 2"):
        parse_support("tree 1: 1:2 1:3\nforest 2: 2:3\n")
    with pytest.raises(SupportError, match="bad arc"):
        parse_support("tree 1: 1-2\n")


def test_support_text_round_trip():
    support = build_support(EXAMPLE)
    assert parse_support(format_support(support)) == support


def test_tree_commodity_has_no_non_tree_arcs():
    inst = parse_instance("commodity 1\nnode 1 balance 1\nnode 2\nnode 3 balance -1\narc 1 2\narc 3 2\n", strict=False)
    support = build_support(inst)
    assert set(support.tree(1)) == set(inst.commodity(1).arcs)
    assert support.non_tree(inst.commodity(1)) == []


def tree_columns_rank(inst, support):
    dense = assemble_dense(inst)
    keep = [c for c, a in enumerate(dense.columns) if a in support.tree_set(a.k)]
    rows = [[row[c] for c in keep] for row in dense.matrix[: dense.network_rows]]
    return bareiss_rank(rows), len(keep)


def test_worked_example_tree_columns_full_rank():
    support = load_support(EXAMPLE, fixture_text("example.support"))
    rank, count = tree_columns_rank(EXAMPLE, support)
    assert rank == count == 8


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_support_size_matches_network_rank(seed):
    inst = random_instance(seed)
    support = build_support(inst)
    assert verify_support(inst, support)
    rank, count = tree_columns_rank(inst, support)
    assert count == expected_rank(inst).network
    assert rank == count
    dense = assemble_dense(inst)
    assert bareiss_rank(dense.matrix[: dense.network_rows]) == count


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_any_tree_plus_one_arc_has_one_cycle(seed):
    inst = random_instance(seed)
    for net in inst.commodities:
        tree = spanning_tree(net)
        dense = assemble_dense(inst)
        for extra in net.arcs:
            if extra in tree:
                continue
            keep = [c for c, a in enumerate(dense.columns) if a in tree or a == extra]
            rows = [[row[c] for c in keep] for row in dense.matrix[: dense.network_rows]]
            # |I^k| arcs on a rank |I^k|-1 block: exactly one dependent combination
            assert len(keep) - bareiss_rank(rows) == 1
