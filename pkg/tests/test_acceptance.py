"""Acceptance criteria 1-10, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py`` (the lines are printed even
when output capture is on) or directly with ``python tests/test_acceptance.py``.
Criteria 8-10 walk the full census and take several minutes.
"""
from __future__ import annotations

import sys
import time
from contextlib import contextmanager
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from curvelattice.arith import riemann_roch_chi, solve_multiplicity, SurfaceContext  # noqa: E402
from curvelattice.census import (  # noqa: E402
    CASE_A,
    CASE_B,
    CASE_B1,
    VIOLATION,
    CensusParams,
    enumerate_weighted_trees,
    run_census,
    verify_det_sign,
    verify_subgraph_lemma,
)
from curvelattice.classify import classify_star_fiber  # noqa: E402
from curvelattice.config import (  # noqa: E402
    QDivisor,
    canonical_lattice,
    gram_matrix,
    intersect,
    load_configuration,
    round_up,
)
from curvelattice.linalg import SEMIDEFINITE_DEGENERATE, definiteness, determinant  # noqa: E402
from curvelattice.zariski import self_square, zariski_decompose  # noqa: E402

from conftest import CONFIG_DIR  # noqa: E402
from oracles import KODAIRA_II_STAR, brute_zariski  # noqa: E402
from test_linalg import b1_family, comb_family  # noqa: E402

_printer = None


def _emit(line: str) -> None:
    if _printer is None:
        print(line, flush=True)
    else:
        with _printer.disabled():
            print(line, flush=True)


@contextmanager
def criterion(number: int, title: str):
    start = time.perf_counter()
    try:
        yield
    except BaseException as exc:
        _emit(f"\nCRITERION {number:2d} FAIL  {title}  ({type(exc).__name__}: {exc})")
        raise
    _emit(f"\nCRITERION {number:2d} PASS  {title}  [{time.perf_counter() - start:.1f}s]")


@pytest.fixture(autouse=True)
def _uncaptured(capsys):
    global _printer
    _printer = capsys
    yield
    _printer = None


def _load(name):
    return load_configuration(CONFIG_DIR / name)


def test_criterion_01_zariski_exactness():
    with criterion(1, "Zariski positive part of the nine-curve configuration"):
        cfg, d = _load("nine-curve.json")
        start = time.perf_counter()
        z = zariski_decompose(cfg, d)
        elapsed = time.perf_counter() - start
        expected = [Fraction(x) for x in ("1", "4/5", "3/5", "2/5", "1/5", "5/7", "3/7", "1/7", "1/2")]
        assert [z.P.get(label) for label in cfg.labels] == expected
        assert self_square(cfg, z.P) == Fraction(1, 70)
        assert intersect(cfg, z.P, QDivisor({"D0": 1})) == Fraction(1, 70)
        assert elapsed < 1.0


def test_criterion_02_b1_lattice():
    with criterion(2, "B1 lattice: det -1 at K^2 = 0, det 0 and K-vector at K^2 = 1"):
        cfg, _ = _load("b1.json")
        lattice = canonical_lattice(cfg, 0)
        k_row = [lattice.entries[0][j] for j in range(1, 10)]
        assert k_row == [0, 0, 0, 0, 0, 0, 1, 0, 0]
        assert determinant(lattice) == -1
        lattice1 = canonical_lattice(cfg, 1)
        assert determinant(lattice1) == 1 - 1
        k_vec = dict(zip(cfg.labels, (10, 5, 7, 8, 4, 6, 1, 4, 2)))
        dots = gram_matrix(cfg).apply(k_vec)
        residual = [dots[label] - cfg.curve(label).k_dot for label in cfg.labels]
        assert residual == [0] * 9
        # the vector's own pairing with K recovers K^2 = 1
        assert sum(k_vec[label] * cfg.curve(label).k_dot for label in cfg.labels) == 1


def test_criterion_03_determinant_polynomials():
    with criterion(3, "B1-family and comb determinant polynomials"):
        b1 = [determinant(gram_matrix(b1_family(x6, x8))) for x6, x8 in ((2, 2), (3, 2), (3, 3))]
        assert b1 == [2, 1, -1]
        assert b1 == [-4 + 3 * x6 + 4 * x8 - 2 * x6 * x8 for x6, x8 in ((2, 2), (3, 2), (3, 3))]
        middle = [determinant(gram_matrix(comb_family(x, 3))) for x in (2, 3)]
        other = [determinant(gram_matrix(comb_family(x, 2))) for x in (2, 3)]
        assert middle == [24, -21] == [114 - 45 * x for x in (2, 3)]
        assert other == [18, -22] == [98 - 40 * x for x in (2, 3)]


def test_criterion_04_example_k3():
    with criterion(4, "K3 example: round-up is H + G and chi(K + round-up) = 0"):
        cfg, d = _load("k3-roundup.json")
        up = round_up(d)
        assert up == QDivisor({"H": 1, "G": 1})
        up_sq = self_square(cfg, up)
        assert up_sq == -4
        assert riemann_roch_chi(up_sq, 0, SurfaceContext(chi=2)) == 0


def test_criterion_05_ii_star_kernel():
    with criterion(5, "II* radical is one-dimensional with Kodaira multiplicities"):
        cfg, _ = _load("ii-star.json")
        info = definiteness(gram_matrix(cfg))
        assert info.kind == SEMIDEFINITE_DEGENERATE and len(info.kernel) == 1
        assert tuple(info.kernel[0][label] for label in cfg.labels) == KODAIRA_II_STAR
        cls = classify_star_fiber(cfg)
        assert tuple(cls.multiplicities[label] for label in cfg.labels) == KODAIRA_II_STAR


def test_criterion_06_multiplicities():
    with criterion(6, "multiple-fibre search returns (2, 3) with k = 6 only"):
        assert solve_multiplicity() == [(2, 3, 6)]


def test_criterion_07_oracle_equivalence():
    with criterion(7, "Zariski vs subset oracle on all trees <= 6 nodes, weights -2..-4"):
        start = time.perf_counter()
        cases = 0
        for cfg in enumerate_weighted_trees(CensusParams(max_components=6, weight_set=[-2, -3, -4])):
            d = QDivisor.reduced(cfg.labels)
            z = zariski_decompose(cfg, d)
            p, S = brute_zariski(gram_matrix(cfg).rows(), [Fraction(1)] * len(cfg))
            assert [z.P.get(label) for label in cfg.labels] == p
            assert z.negative_support == frozenset(cfg.labels[i] for i in S)
            cases += 1
        assert cases == 3 + 6 + 18 + 75 + 342 + 1773
        assert time.perf_counter() - start < 120


def test_criterion_08_trichotomy_census():
    with criterion(8, "trichotomy census n <= 9, weights -2..-5: no violations"):
        start = time.perf_counter()
        report = run_census(CensusParams(max_components=9, min_weight=-5))
        elapsed = time.perf_counter() - start
        _emit(report.to_text())
        assert report.violations == [] and report.counts[VIOLATION] == 0
        assert report.nef_big_total == report.counts[CASE_A] + report.counts[CASE_B] + report.counts[CASE_B1]
        assert elapsed <= 30 * 60


def test_criterion_09_subgraph_lemma():
    with criterion(9, "negative definite subgraph on all trees <= 10 nodes, weights -2, -3"):
        report = verify_subgraph_lemma(CensusParams(max_components=10, weight_set=[-2, -3]))
        _emit(report.to_text())
        assert report.failures == []


def test_criterion_10_det_sign():
    with criterion(10, "determinant sign rule over the n <= 9 census"):
        report = verify_det_sign(CensusParams(max_components=9, min_weight=-5))
        _emit(report.to_text())
        assert report.failures == [] and report.checked > 0


if __name__ == "__main__":
    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except BaseException:
                failed += 1
    sys.exit(1 if failed else 0)
