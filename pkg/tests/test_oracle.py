import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from conftest import arc, random_instance
from netkernel.affine import AffineForm
from netkernel.errors import OracleRefusal
from netkernel.instance import expected_rank, parse_instance
from netkernel.oracle import (
    MAX_COLUMNS,
    apply,
    assemble_dense,
    bareiss_rank,
    dense_rank,
    float_rank,
    nullspace_dimension,
    oracle_check,
    random_rational,
)
from netkernel.solution import ParametricSolution


small_fractions = st.fractions(min_value=-5, max_value=5, max_denominator=6)


def fraction_rank(rows):
    """Plain Gaussian elimination over Fraction (reference for the Bareiss rank)."""
    m = [[F(v) for v in row] for row in rows]
    rank, n_cols = 0, len(m[0]) if m else 0
    for c in range(n_cols):
        piv = next((r for r in range(rank, len(m)) if m[r][c] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for r in range(len(m)):
            if r != rank and m[r][c]:
                f = m[r][c] / m[rank][c]
                m[r] = [a - f * b for a, b in zip(m[r], m[rank])]
        rank += 1
    return rank


def test_worked_example_matrix(example):
    inst, _, _ = example
    dense = assemble_dense(inst)
    assert dense.shape == (14, 13)
    assert dense.network_rows == 11
    assert dense.row_labels[-1] == "couple (2,4)"
    t_row = dense.matrix[-1]
    ones = [dense.columns[c] for c, v in enumerate(t_row) if v]
    assert ones == [arc(2, 2, 4), arc(3, 2, 4)]
    assert all(v in (0, 1) for v in t_row)
    first = dense.matrix[0]  # commodity 1, node 1: arcs (1,2) and (1,3) leave it
    assert [dense.columns[c] for c, v in enumerate(first) if v == 1] == [arc(1, 1, 2), arc(1, 1, 3)]
    # every incidence column has one +1 and one -1
    for c in range(13):
        col = sorted(row[c] for row in dense.matrix[:11])
        assert col[0] == -1 and col[-1] == 1 and sum(1 for v in col if v) == 2


def test_worked_example_ranks(example):
    inst, _, _ = example
    dense = assemble_dense(inst)
    assert dense_rank(dense, "network") == 8
    assert dense_rank(dense, "full") == 11
    assert nullspace_dimension(dense) == 2


def test_single_arc():
    inst = parse_instance("commodity 1\nnode 1 balance 1\nnode 2 balance -1\narc 1 2\n", strict=False)
    dense = assemble_dense(inst)
    assert dense.matrix == [[1], [-1]]
    assert dense_rank(dense) == 1


def test_zero_matrix_rank():
    assert bareiss_rank([[0, 0], [0, 0]]) == 0
    assert float_rank([[0.0, 0.0]]) == 0


def test_rank_selector_validated(example):
    with pytest.raises(ValueError):
        dense_rank(assemble_dense(example[0]), "side")


def test_apply_matches_rhs_on_solution(example_result):
    dense = assemble_dense(example_result.instance)
    flow = {a: f.constant for a, f in example_result.solution.forms.items()}
    assert apply(dense, flow) == dense.rhs


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(small_fractions, min_size=4, max_size=4), max_size=6))
def test_bareiss_agrees_with_fraction_elimination(rows):
    assert bareiss_rank(rows) == fraction_rank(rows)
    if rows:
        assert float_rank([[float(v) for v in r] for r in rows]) == fraction_rank(rows)


@pytest.mark.parametrize("seed", range(50))
def test_network_rank_on_random_instances(seed):
    inst = random_instance(seed)
    dense = assemble_dense(inst)
    assert dense_rank(dense, "network") == expected_rank(inst).network
    for net in inst.commodities:
        rows = [r for r, label in enumerate(dense.row_labels) if label.startswith(f"balance k={net.k} ")]
        assert bareiss_rank([dense.matrix[r] for r in rows]) == len(net.nodes) - 1


def test_oracle_passes_on_worked_example(example_result):
    report = oracle_check(example_result.instance, example_result.solution, trials=20, seed=3)
    assert report.passed, report.summary()
    assert (report.nullity, report.free) == (2, 2)


def test_oracle_accepts_characteristic_vectors(example_result):
    from netkernel.cycles import characteristic_vector

    vectors = [characteristic_vector(c).components for c in example_result.cycles.values()]
    report = oracle_check(example_result.instance, example_result.solution, trials=0, vectors=vectors)
    assert report.passed


def test_oracle_flags_perturbed_constant(example_result):
    forms = {a: f.copy() for a, f in example_result.solution.forms.items()}
    forms[arc(1, 2, 3)] = forms[arc(1, 2, 3)] + 1
    sol = ParametricSolution(forms, example_result.solution.free)
    report = oracle_check(example_result.instance, sol, trials=3)
    assert not report.passed
    labels = {m.label for m in report.failures}
    assert "side p=2" in labels
    assert "couple (2,4)" not in labels
    assert "FAIL" in report.summary()


def test_oracle_flags_wrong_free_count(example_result):
    # pin x3:5:3 to zero: one free arc left, nullity still 2
    x253 = arc(2, 5, 3)
    forms = {a: AffineForm(f.constant, {x253: f.coefficient(x253)}) for a, f in example_result.solution.forms.items()}
    sol = ParametricSolution(forms, (x253,))
    report = oracle_check(example_result.instance, sol, trials=0)
    assert any(m.check == "nullity" for m in report.failures)


def test_oracle_zero_trials(example_result):
    report = oracle_check(example_result.instance, example_result.solution, trials=0)
    assert report.passed and report.trials == 0


def test_oracle_refuses_large_instances():
    nodes = MAX_COLUMNS // 2 + 2
    lines = ["commodity 1"] + [f"node {i}" for i in range(1, nodes + 1)]
    lines += [f"arc {i} {i + 1}" for i in range(1, nodes)] + [f"arc {i + 1} {i}" for i in range(1, nodes)]
    inst = parse_instance("\n".join(lines))
    assert inst.n_arcs > MAX_COLUMNS
    with pytest.raises(OracleRefusal):
        assemble_dense(inst)


def test_random_rational_range():
    rng = random.Random(0)
    values = [random_rational(rng) for _ in range(200)]
    assert all(-50 <= v <= 50 for v in values)
    assert any(v.denominator > 1 for v in values)
