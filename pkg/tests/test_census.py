from __future__ import annotations

import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvelattice.census import (
    CASE_A,
    CASE_B,
    CASE_B1,
    EXCLUDED,
    NOT_NEF_BIG,
    VIOLATION,
    CensusParams,
    _classify_fast,
    _det_sign_tree,
    _divisor_adjoint,
    check_subgraph_lemma,
    classify_tree,
    det_sign_status,
    forest_minors,
    is_b1_configuration,
    run_census,
    star_witnesses,
    trichotomy_classify,
    verify_det_sign,
    verify_subgraph_lemma,
)
from curvelattice.config import Configuration, Curve, QDivisor, gram_matrix
from curvelattice.linalg import HypothesisError, determinant, is_negative_definite
from curvelattice.trees import free_shapes, weighted_trees_of_shape

from conftest import chain_config, tree_config

# 2-comp pattern: C0 and C4 carry multiplicity 2, each meeting two further curves
I1_STAR_TREE = ([-2, -2, -2, -3, -2, -3, -3], [(0, 1), (0, 2), (0, 3), (0, 4), (4, 5), (4, 6)])


def _weighted(n_max, weights, n_min=1):
    for n in range(n_min, n_max + 1):
        for shape in free_shapes(n):
            yield from weighted_trees_of_shape(shape, weights)


def test_forest_minors_match_bareiss():
    for tree in _weighted(7, (-2, -3, -4)):
        rows = gram_matrix(tree.to_configuration()).rows()
        definite, det = forest_minors(tree)
        assert det == determinant(rows)
        assert definite == is_negative_definite(rows)


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 9), st.data())
def test_forest_minors_on_subforests(n, data):
    trees = list(weighted_trees_of_shape(free_shapes(n)[data.draw(st.integers(0, len(free_shapes(n)) - 1))], (-2, -3)))
    tree = trees[data.draw(st.integers(0, len(trees) - 1))]
    keep = data.draw(st.lists(st.booleans(), min_size=n, max_size=n))
    cfg = tree.to_configuration()
    labels = [label for label, k in zip(cfg.labels, keep) if k]
    rows = gram_matrix(cfg).submatrix(labels).rows()
    definite, det = forest_minors(tree, keep)
    assert det == determinant(rows)
    assert definite == is_negative_definite(rows)


def test_fast_path_agrees_with_full_pipeline():
    for tree in _weighted(6, (-2, -3, -4)):
        fast = _classify_fast(tree)
        if fast is not None:
            assert trichotomy_classify(tree.to_configuration()).kind == fast.kind


def test_b1_verdict(load):
    cfg, _ = load("b1.json")
    assert is_b1_configuration(cfg)
    v = trichotomy_classify(cfg)
    assert v.kind == CASE_B1 and v.fiber_type == "III*'"
    assert v.details["C_dot_KplusC"] == 0
    assert v.details["P_sq"] == Fraction(1, 70)
    mult = v.divisor
    assert all(cfg.curve(x).self_int == -2 for x in mult if mult[x] >= 2)


def test_i_n_star_pattern():
    cfg = tree_config(*I1_STAR_TREE)
    v = trichotomy_classify(cfg)
    # the doubled chain already meets L_red twice, so (A) is reported first
    assert v.kind == CASE_A
    assert gram_matrix(cfg).pair(QDivisor.reduced(cfg.labels), v.divisor) >= 2
    witness = next(w for w in star_witnesses(cfg, ("I_n_star",)) if w.fiber_type != "I_0_star")
    assert witness.fiber_type == "I_1_star" and witness.primed
    assert {x for x in witness.multiplicities if witness.multiplicities[x] == 2} == {"C0", "C4"}
    assert _divisor_adjoint(cfg, witness.multiplicities) == 0


def test_simple_verdicts():
    assert trichotomy_classify(chain_config([-2] * 6)).kind == NOT_NEF_BIG
    assert trichotomy_classify(chain_config([-5])).kind == NOT_NEF_BIG
    i0 = tree_config([-2] * 6, [(0, 1), (0, 2), (0, 3), (0, 4), (4, 5)])
    v = trichotomy_classify(i0)
    assert v.kind == EXCLUDED and v.fiber_type == "I_0_star"
    with pytest.raises(HypothesisError):
        trichotomy_classify(chain_config([-1, -2]))
    cycle = Configuration(
        tuple(Curve(f"C{i}", -2) for i in range(3)), tuple((f"C{i}", f"C{(i + 1) % 3}") for i in range(3))
    )
    with pytest.raises(HypothesisError):
        trichotomy_classify(cycle)


def test_witness_soundness():
    seen = {CASE_A: 0, CASE_B: 0}
    for tree in _weighted(8, (-2, -3), n_min=6):
        if _classify_fast(tree) is not None:
            continue
        cfg = tree.to_configuration()
        v = trichotomy_classify(cfg)
        assert v.kind != VIOLATION
        if v.kind == CASE_A:
            assert gram_matrix(cfg).pair(QDivisor.reduced(cfg.labels), v.divisor) >= 2
            assert cfg.is_connected(v.witness) and v.details["P_sq"] > 0
        elif v.kind in (CASE_B, CASE_B1):
            assert _divisor_adjoint(cfg, v.divisor) == 0
            assert all(cfg.curve(x).self_int == -2 for x in v.divisor if v.divisor[x] >= 2)
        if v.kind in seen:
            seen[v.kind] += 1
    assert seen[CASE_A] > 100 and seen[CASE_B] >= 1


def test_census_small_runs():
    report = run_census(CensusParams(max_components=1))
    assert report.total == 4 and report.counts[NOT_NEF_BIG] == 4
    report = run_census(CensusParams(max_components=5))
    assert report.total == 4 + 10 + 40 + 216 + 1324
    assert report.violations == []
    # nothing on five curves or fewer is nef and big
    assert report.nef_big_total == 0
    assert report.counts[EXCLUDED] == 1


def test_parallel_report_identical():
    serial = run_census(CensusParams(max_components=7, weight_set=[-2, -3]))
    parallel = run_census(CensusParams(max_components=7, weight_set=[-2, -3], parallel=True, jobs=2))
    assert json.dumps(serial.to_json()) == json.dumps(parallel.to_json())
    assert serial.to_text() == parallel.to_text()


def test_subgraph_lemma_cases():
    assert check_subgraph_lemma(chain_config([-2] * 10))[0] == "ok"
    star = tree_config([-2] * 6, [(0, 1), (0, 2), (0, 3), (0, 4), (4, 5)])
    assert check_subgraph_lemma(star) == ("skipped", None)
    report = verify_subgraph_lemma(CensusParams(max_components=7, weight_set=[-2, -3]))
    assert report.failures == [] and report.checked > 0 and report.skipped > 0
    with pytest.raises(ValueError):
        verify_subgraph_lemma(CensusParams(max_components=11, weight_set=[-2]))


def test_det_sign_cases(load):
    cfg, _ = load("nine-curve.json")
    status, info = det_sign_status(cfg)
    assert status == "ok" and info["n"] == 8 and info["det"] > 0
    two = Configuration((Curve("D0", 1), Curve("D1", -2)), (("D0", "D1"),))
    status, info = det_sign_status(two)
    assert status == "ok" and info["n"] == 1 and info["det"] == -3
    assert det_sign_status(chain_config([-2, -2, -2]))[0] == "skipped"


def test_det_sign_fast_path_matches_general():
    for tree in _weighted(6, (-2, -3, -4)):
        fast, _ = _det_sign_tree(tree)
        slow, _ = det_sign_status(tree.to_configuration())
        assert fast == slow


def test_det_sign_small_census():
    report = verify_det_sign(CensusParams(max_components=7))
    assert report.failures == [] and report.checked > 0


def test_classify_tree_dispatch():
    tree = next(iter(weighted_trees_of_shape(free_shapes(3)[0], (-2,))))
    assert classify_tree(tree).kind == NOT_NEF_BIG
