"""Exhaustive census of weighted rational trees.

Each tree is run through the trichotomy pipeline: exclusion of elliptic
subfibres, the Zariski positive part of the reduced divisor, then a search
for a linear chain C with L.C >= 2 (case A) or a star-fibre divisor whose
multiplicity >= 2 components are (-2)-curves (case B).
"""
from __future__ import annotations

import json
import logging
from collections import Counter
from collections.abc import Iterable, Iterator
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from .classify import (
    _arms,
    classify_star_fiber,
    detect_elliptic_subfiber,
    fiber_name,
    find_negative_definite_subgraph,
    supports_i0_star_of_minus_two,
    tree_shape,
)
from .config import Configuration, QDivisor, adjoint_pairing, gram_matrix, is_rational_tree
from .linalg import HypothesisError, determinant, has_positive_square, is_negative_definite
from .trees import WeightedTree, free_shapes, weight_range, weighted_trees_of_shape
from .zariski import self_square, zariski_decompose

log = logging.getLogger(__name__)

NOT_NEF_BIG = "not_nef_big"
CASE_A = "case_A"
CASE_B = "case_B"
CASE_B1 = "case_B1"
EXCLUDED = "excluded_elliptic_subfiber"
VIOLATION = "violation"
VERDICTS = (NOT_NEF_BIG, CASE_A, CASE_B, CASE_B1, EXCLUDED, VIOLATION)

MAX_ENUMERATED = 12


@dataclass(frozen=True)
class CensusParams:
    max_components: int = 9
    min_weight: int = -5
    weight_set: tuple | None = None
    parallel: bool = False
    jobs: int = 1
    min_components: int = 1

    def __post_init__(self):
        if self.max_components < 1:
            raise ValueError("max_components must be >= 1")
        if self.max_components > MAX_ENUMERATED:
            raise ValueError(f"enumeration is capped at {MAX_ENUMERATED} components")
        if self.weight_set is None and self.min_weight > -2:
            raise ValueError("min_weight must be <= -2")
        if self.weight_set is not None:
            ws = tuple(sorted({int(w) for w in self.weight_set}, reverse=True))
            if not ws or ws[0] > -2:
                raise ValueError("weights must all be <= -2")
            object.__setattr__(self, "weight_set", ws)

    @property
    def weights(self) -> tuple:
        return weight_range(self.min_weight, self.weight_set)


def _shapes(params: CensusParams) -> list[tuple[int, int]]:
    return [
        (n, i)
        for n in range(params.min_components, params.max_components + 1)
        for i in range(len(free_shapes(n)))
    ]


def enumerate_weighted_trees(params: CensusParams) -> Iterator[Configuration]:
    """One configuration per weighted tree isomorphism class, in a fixed order."""
    for n, i in _shapes(params):
        for tree in weighted_trees_of_shape(free_shapes(n)[i], params.weights):
            yield tree.to_configuration()


# integer subtree determinants for trees --------------------------------------


def _parents(tree: WeightedTree) -> list[int]:
    parent = [-1] * len(tree.weights)
    for a, b in tree.edges:
        parent[b] = a
    return parent


def _roots_and_children(tree: WeightedTree, keep) -> tuple[list[int], list[list[int]]]:
    n = len(tree.weights)
    children = [[] for _ in range(n)]
    roots = []
    parent = [-1] * n
    for a, b in tree.edges:
        parent[b] = a
    for v in range(n):
        if not keep[v]:
            continue
        p = parent[v]
        if p >= 0 and keep[p]:
            children[p].append(v)
        else:
            roots.append(v)
    return roots, children


def forest_minors(tree: WeightedTree, keep=None) -> tuple[bool, int]:
    """Negative definiteness and determinant of the induced sub-forest.

    Uses the cofactor recursion for trees on A = -Gram: for a node v with
    children c, det A(v) = a_v prod det A(c) - sum_c det A(c - c) prod_{c' != c} det A(c').
    A is positive definite iff every subtree determinant is positive.
    Returns (negative_definite, det of the Gram matrix).

    Nodes are in preorder (parents precede children), as produced by the
    tree enumeration.
    """
    n = len(tree.weights)
    if keep is None:
        keep = [True] * n
    roots, children = _roots_and_children(tree, keep)
    sub = [0] * n  # det A restricted to subtree(v)
    without = [0] * n  # det A restricted to subtree(v) minus v
    definite = True
    for v in range(n - 1, -1, -1):
        if not keep[v]:
            continue
        kids = children[v]
        prod = 1
        for c in kids:
            prod *= sub[c]
        total = -tree.weights[v] * prod
        for c in kids:
            rest = 1
            for c2 in kids:
                if c2 != c:
                    rest *= sub[c2]
            total -= without[c] * rest
        sub[v] = total
        without[v] = prod
        if total <= 0:
            definite = False
    det_a = 1
    size = 0
    for r in roots:
        det_a *= sub[r]
    size = sum(1 for k in keep if k)
    det_m = det_a if size % 2 == 0 else -det_a
    return definite, det_m


# trichotomy -----------------------------------------------------------------


@dataclass(frozen=True)
class TrichotomyVerdict:
    kind: str
    witness: tuple = ()
    divisor: QDivisor | None = None
    fiber_type: str | None = None
    details: dict = field(default_factory=dict)

    def to_json(self, order=None) -> dict:
        out = {"kind": self.kind}
        if self.witness:
            out["witness"] = list(self.witness)
        if self.divisor is not None:
            out["divisor"] = self.divisor.to_json(order)
        if self.fiber_type is not None:
            out["fiber_type"] = self.fiber_type
        if self.details:
            out["details"] = {k: _jsonable(v) for k, v in sorted(self.details.items())}
        return out


def _jsonable(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, QDivisor):
        return v.to_json()
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def _tree_path(adj: dict, a, b) -> list:
    prev = {a: None}
    stack = [a]
    while stack:
        v = stack.pop()
        if v == b:
            break
        for w in adj[v]:
            if w not in prev:
                prev[w] = v
                stack.append(w)
    path = [b]
    while path[-1] != a:
        path.append(prev[path[-1]])
    return path[::-1]


def linear_chains(cfg: Configuration) -> list[tuple]:
    """All linear chains (paths) in a tree, by length then curve order."""
    adj = cfg.adjacency()
    labels = cfg.labels
    chains = [(label,) for label in labels]
    for i, j in combinations(range(len(labels)), 2):
        chains.append(tuple(_tree_path(adj, labels[i], labels[j])))
    order = {label: i for i, label in enumerate(labels)}
    chains.sort(key=lambda c: (len(c), sorted(order[x] for x in c), [order[x] for x in c]))
    return chains


def is_b1_configuration(cfg: Configuration) -> bool:
    """Nine curves, arms of lengths 1, 3, 4 off one node, the 3-arm tip a (-3)-curve."""
    if len(cfg) != 9 or not is_rational_tree(cfg):
        return False
    name, _, data = tree_shape(cfg)
    if name != "none":
        return False
    adj = cfg.adjacency()
    branch = [v for v in cfg.labels if len(adj[v]) >= 3]
    if len(branch) != 1 or len(adj[branch[0]]) != 3:
        return False
    arms = sorted(_arms(adj, branch[0]), key=len)
    if [len(a) for a in arms] != [1, 3, 4]:
        return False
    tip = arms[1][-1]
    return all(c.self_int == (-3 if c.label == tip else -2) for c in cfg.curves)


def star_witnesses(cfg: Configuration, types=("I_n_star", "IV_star", "III_star")) -> Iterator:
    """Star-fibre divisors supported on connected subsets, smallest first.

    Only divisors whose multiplicity >= 2 components are (-2)-curves are
    yielded.
    """
    labels = cfg.labels
    for size in range(5, len(labels) + 1):
        for subset in combinations(labels, size):
            sub = cfg.subconfiguration(subset)
            if len(sub.edges) != size - 1:
                continue
            name, _, _ = tree_shape(sub)
            if name not in types:
                continue
            cls = classify_star_fiber(sub)
            mult = cls.multiplicities
            if all(sub.curve(x).self_int == -2 for x in subset if mult[x] >= 2):
                yield cls


def trichotomy_classify(cfg: Configuration) -> TrichotomyVerdict:
    if not is_rational_tree(cfg):
        raise HypothesisError("trichotomy needs a rational tree")
    if any(c.self_int > -2 for c in cfg.curves):
        raise HypothesisError("all weights must be <= -2")
    fib = detect_elliptic_subfiber(cfg)
    if fib is not None:
        return TrichotomyVerdict(
            EXCLUDED, fib.labels, fib.multiplicities, fib.fiber_type
        )
    reduced = QDivisor.reduced(cfg.labels)
    z = zariski_decompose(cfg, reduced)
    p_sq = self_square(cfg, z.P)
    if p_sq <= 0:
        return TrichotomyVerdict(NOT_NEF_BIG, details={"P_sq": p_sq})
    gram = gram_matrix(cfg)
    details = {"P_sq": p_sq, "P": z.P}
    for chain in linear_chains(cfg):
        value = gram.pair(reduced, QDivisor.reduced(chain))
        if value >= 2:
            return TrichotomyVerdict(CASE_A, chain, QDivisor.reduced(chain), details={**details, "L_dot_C": value})
    b1 = is_b1_configuration(cfg)
    witness = None
    if b1:
        witness = next(star_witnesses(cfg, ("III_star",)), None)
    if witness is None:
        witness = next(star_witnesses(cfg), None)
    if witness is not None:
        kind = CASE_B1 if b1 else CASE_B
        fiber = fiber_name(witness.fiber_type) + "'"
        return TrichotomyVerdict(
            kind,
            witness.witnesses,
            witness.multiplicities,
            fiber,
            details={**details, "C_dot_KplusC": _divisor_adjoint(cfg, witness.multiplicities)},
        )
    return TrichotomyVerdict(VIOLATION, details=details)


def _divisor_adjoint(cfg: Configuration, c: QDivisor) -> Fraction:
    """C.(K + C) for a Q-divisor C."""
    gram = gram_matrix(cfg)
    k_part = sum((cfg.curve(label).k_dot * coef for label, coef in c.items()), Fraction(0))
    return gram.pair(c, c) + k_part


def _classify_fast(tree: WeightedTree) -> TrichotomyVerdict | None:
    """Verdicts decidable from subtree determinants alone; None otherwise."""
    n = len(tree.weights)
    minus_two = [w == -2 for w in tree.weights]
    if any(minus_two):
        ok, _ = forest_minors(tree, minus_two)
        if not ok:
            return None
    definite, _ = forest_minors(tree)
    if definite:
        return TrichotomyVerdict(NOT_NEF_BIG)
    return None


def classify_tree(tree: WeightedTree) -> TrichotomyVerdict:
    fast = _classify_fast(tree)
    if fast is not None:
        return fast
    return trichotomy_classify(tree.to_configuration())


# reports --------------------------------------------------------------------


@dataclass
class CensusReport:
    params: dict
    counts: Counter = field(default_factory=Counter)
    by_size: dict = field(default_factory=dict)
    case_b_types: Counter = field(default_factory=Counter)
    violations: list = field(default_factory=list)
    b1_hits: list = field(default_factory=list)
    total: int = 0

    def merge(self, other: CensusReport) -> None:
        self.counts.update(other.counts)
        for n, c in other.by_size.items():
            self.by_size.setdefault(n, Counter()).update(c)
        self.case_b_types.update(other.case_b_types)
        self.violations.extend(other.violations)
        self.b1_hits.extend(other.b1_hits)
        self.total += other.total

    @property
    def nef_big_total(self) -> int:
        return sum(self.counts[k] for k in (CASE_A, CASE_B, CASE_B1, VIOLATION))

    def to_json(self) -> dict:
        return {
            "params": self.params,
            "total": self.total,
            "counts": {k: self.counts.get(k, 0) for k in VERDICTS},
            "by_size": {
                str(n): {k: c.get(k, 0) for k in VERDICTS} for n, c in sorted(self.by_size.items())
            },
            "case_B_fiber_types": dict(sorted(self.case_b_types.items())),
            "case_B1_hits": self.b1_hits,
            "violations": self.violations,
        }

    def to_text(self) -> str:
        lines = [f"census {json.dumps(self.params, sort_keys=True)}", f"total trees: {self.total}"]
        header = "n".rjust(3) + "".join(k.rjust(28) for k in VERDICTS)
        lines.append(header)
        for n, c in sorted(self.by_size.items()):
            lines.append(str(n).rjust(3) + "".join(str(c.get(k, 0)).rjust(28) for k in VERDICTS))
        lines.append("all".rjust(3) + "".join(str(self.counts.get(k, 0)).rjust(28) for k in VERDICTS))
        if self.case_b_types:
            lines.append(
                "case B witness types: "
                + ", ".join(f"{t}={c}" for t, c in sorted(self.case_b_types.items()))
            )
        lines.append(f"case B1 hits: {len(self.b1_hits)}")
        for hit in self.b1_hits:
            lines.append("  " + json.dumps(hit, sort_keys=True))
        lines.append(f"violations: {len(self.violations)}")
        for v in self.violations:
            lines.append("  " + json.dumps(v, sort_keys=True))
        return "\n".join(lines)


def _run_shape(args) -> CensusReport:
    n, index, weights, params_dict = args
    report = CensusReport(params_dict)
    sizes = report.by_size.setdefault(n, Counter())
    for tree in weighted_trees_of_shape(free_shapes(n)[index], weights):
        verdict = classify_tree(tree)
        report.total += 1
        report.counts[verdict.kind] += 1
        sizes[verdict.kind] += 1
        if verdict.kind in (CASE_B, CASE_B1):
            report.case_b_types[verdict.fiber_type] += 1
        if verdict.kind in (CASE_B1, VIOLATION):
            cfg = tree.to_configuration()
            entry = {"configuration": cfg.to_json(), "verdict": verdict.to_json(cfg.labels)}
            (report.b1_hits if verdict.kind == CASE_B1 else report.violations).append(entry)
    return report


def _params_json(params: CensusParams) -> dict:
    return {
        "max_components": params.max_components,
        "min_components": params.min_components,
        "weights": list(params.weights),
    }


def _map_shapes(func, params: CensusParams, extra=()) -> list:
    tasks = [(n, i, params.weights, _params_json(params)) + tuple(extra) for n, i in _shapes(params)]
    jobs = params.jobs if params.parallel or params.jobs > 1 else 1
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(func, tasks, chunksize=1))
    return [func(t) for t in tasks]


def run_census(params: CensusParams) -> CensusReport:
    report = CensusReport(_params_json(params))
    for part in _map_shapes(_run_shape, params):
        report.merge(part)
    log.info("census done: %d trees", report.total)
    return report


# lemma verifications ----------------------------------------------------------


@dataclass
class LemmaReport:
    name: str
    params: dict
    checked: int = 0
    skipped: int = 0
    failures: list = field(default_factory=list)

    def merge(self, other: LemmaReport) -> None:
        self.checked += other.checked
        self.skipped += other.skipped
        self.failures.extend(other.failures)

    def to_json(self) -> dict:
        return {
            "lemma": self.name,
            "params": self.params,
            "checked": self.checked,
            "skipped": self.skipped,
            "failures": self.failures,
        }

    def to_text(self) -> str:
        lines = [
            f"{self.name} {json.dumps(self.params, sort_keys=True)}",
            f"checked: {self.checked}",
            f"skipped (hypothesis fails): {self.skipped}",
            f"failures: {len(self.failures)}",
        ]
        lines.extend("  " + json.dumps(f, sort_keys=True) for f in self.failures)
        return "\n".join(lines)


def check_subgraph_lemma(cfg: Configuration) -> tuple[str, tuple | None]:
    """Returns ("skipped" | "ok" | "failed", subset)."""
    if supports_i0_star_of_minus_two(cfg):
        return "skipped", None
    subset = find_negative_definite_subgraph(cfg)
    r = min(9, len(cfg) - 1)
    if subset is None or len(subset) != r:
        return "failed", subset
    if subset and not is_negative_definite(gram_matrix(cfg).submatrix(subset).rows()):
        return "failed", subset
    return "ok", subset


def _subgraph_shape(args) -> LemmaReport:
    n, index, weights, params_dict = args
    report = LemmaReport("subgraph", params_dict)
    for tree in weighted_trees_of_shape(free_shapes(n)[index], weights):
        cfg = tree.to_configuration()
        status, subset = check_subgraph_lemma(cfg)
        if status == "skipped":
            report.skipped += 1
        else:
            report.checked += 1
            if status == "failed":
                report.failures.append({"configuration": cfg.to_json(), "subset": subset})
    return report


def verify_subgraph_lemma(params: CensusParams) -> LemmaReport:
    if params.max_components > 10:
        raise ValueError("subgraph verification runs on at most 10 components")
    report = LemmaReport("subgraph", _params_json(params))
    for part in _map_shapes(_subgraph_shape, params):
        report.merge(part)
    return report


def det_sign_status(cfg: Configuration) -> tuple[str, dict]:
    """Check the determinant parity rule on one configuration.

    Hypothesis: some curve D_0 leaves a negative definite block, and the
    lattice has a vector of positive square. Then det > 0 iff the number
    of remaining curves is even.
    """
    gram = gram_matrix(cfg)
    if not has_positive_square(gram):
        return "skipped", {"reason": "no positive square"}
    labels = cfg.labels
    for d0 in labels:
        rest = [x for x in labels if x != d0]
        if is_negative_definite(gram.submatrix(rest).rows()):
            break
    else:
        return "skipped", {"reason": "no curve leaves a negative definite block"}
    n = len(labels) - 1
    det = determinant(gram)
    ok = det > 0 if n % 2 == 0 else det < 0
    return ("ok" if ok else "failed"), {"distinguished": d0, "det": det, "n": n}


def _det_sign_tree(tree: WeightedTree) -> tuple[str, dict]:
    definite, det = forest_minors(tree)
    if definite:
        return "skipped", {}
    size = len(tree.weights)
    for v in range(size):
        keep = [i != v for i in range(size)]
        if forest_minors(tree, keep)[0]:
            break
    else:
        return "skipped", {}
    # with a definite block of size n, a positive square exists unless the
    # lattice is degenerate, in which case det = 0
    if det == 0:
        return det_sign_status(tree.to_configuration())
    n = size - 1
    ok = det > 0 if n % 2 == 0 else det < 0
    return ("ok" if ok else "failed"), {"det": det, "n": n}


def _det_sign_shape(args) -> LemmaReport:
    n, index, weights, params_dict = args
    report = LemmaReport("det_sign", params_dict)
    for tree in weighted_trees_of_shape(free_shapes(n)[index], weights):
        status, info = _det_sign_tree(tree)
        if status == "skipped":
            report.skipped += 1
        else:
            report.checked += 1
            if status == "failed":
                report.failures.append(
                    {"configuration": tree.to_configuration().to_json(), **_jsonable_dict(info)}
                )
    return report


def _jsonable_dict(d: dict) -> dict:
    return {k: _jsonable(v) for k, v in d.items()}


def verify_det_sign(params: CensusParams) -> LemmaReport:
    report = LemmaReport("det_sign", _params_json(params))
    for part in _map_shapes(_det_sign_shape, params):
        report.merge(part)
    return report
