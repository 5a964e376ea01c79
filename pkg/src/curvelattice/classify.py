"""Dynkin and Kodaira-star recognition on rational trees."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from .config import Configuration, ConfigurationError, QDivisor, gram_matrix, is_rational_tree
from .linalg import (
    SEMIDEFINITE_DEGENERATE,
    HypothesisError,
    definiteness,
    is_negative_definite,
)

A_PRIME = "A_prime"
D_PRIME = "D_prime"
E_PRIME = "E_prime"
STAR_FIBER = "star_fiber"
NONE = "none"

STAR_TYPES = ("I_n_star", "II_star", "III_star", "IV_star")

_E_ARMS = {(1, 2, 2): 6, (1, 2, 3): 7, (1, 2, 4): 8}
_AFFINE_E_ARMS = {(2, 2, 2): "IV_star", (1, 3, 3): "III_star", (1, 2, 5): "II_star"}


@dataclass(frozen=True)
class ConfigClass:
    kind: str
    n: int | None = None
    fiber_type: str | None = None  # e.g. "I_2_star", "III_star"
    primed: bool | None = None
    multiplicities: QDivisor | None = None
    witnesses: tuple = ()
    weights: dict = field(default_factory=dict)

    def describe(self) -> str:
        if self.kind in (A_PRIME, D_PRIME, E_PRIME):
            return f"{self.kind[0]}_{self.n}'"
        if self.kind == STAR_FIBER:
            return fiber_name(self.fiber_type) + ("'" if self.primed else "")
        return "none"


def fiber_name(fiber_type: str) -> str:
    if fiber_type.startswith("I_") and fiber_type.endswith("_star"):
        return f"I_{fiber_type[2:-5]}*"
    return fiber_type.replace("_star", "*")


def _require_tree(cfg: Configuration) -> None:
    if not is_rational_tree(cfg):
        raise ConfigurationError("configuration is not a rational tree")


def _arms(adj: dict, center) -> list[list]:
    """Arms hanging off ``center`` when every arm is a path; else []."""
    arms = []
    for start in adj[center]:
        arm = [start]
        prev, cur = center, start
        while True:
            nxt = [w for w in adj[cur] if w != prev]
            if not nxt:
                break
            if len(nxt) > 1:
                return []
            prev, cur = cur, nxt[0]
            arm.append(cur)
        arms.append(arm)
    return arms


def tree_shape(cfg: Configuration) -> tuple[str, object, dict]:
    """Unweighted ADE / affine-ADE shape of a tree.

    Returns ``(name, parameter, data)`` with name one of A, D, E, I_n_star,
    II_star, III_star, IV_star or none.
    """
    adj = cfg.adjacency()
    n = len(cfg)
    branch = [v for v in cfg.labels if len(adj[v]) >= 3]
    if not branch:
        return "A", n, {}
    if len(branch) == 1:
        c = branch[0]
        arms = _arms(adj, c)
        if not arms:
            return "none", None, {}
        lengths = tuple(sorted(len(a) for a in arms))
        data = {"center": c, "arms": sorted(arms, key=len)}
        if len(arms) == 3:
            if lengths[:2] == (1, 1):
                return "D", n, data
            if lengths in _E_ARMS:
                return "E", _E_ARMS[lengths], data
            if lengths in _AFFINE_E_ARMS:
                return _AFFINE_E_ARMS[lengths], None, data
        if lengths == (1, 1, 1, 1):
            return "I_n_star", 0, data
        return "none", None, {}
    if len(branch) == 2:
        a, b = branch
        if len(adj[a]) != 3 or len(adj[b]) != 3:
            return "none", None, {}
        leaves_a = [w for w in adj[a] if len(adj[w]) == 1]
        leaves_b = [w for w in adj[b] if len(adj[w]) == 1]
        if len(leaves_a) < 2 or len(leaves_b) < 2:
            return "none", None, {}
        return "I_n_star", n - 5, {"ends": (a, b)}
    return "none", None, {}


def classify_dynkin(cfg: Configuration) -> ConfigClass:
    _require_tree(cfg)
    name, param, _ = tree_shape(cfg)
    weights = {c.label: c.self_int for c in cfg.curves}
    kinds = {"A": A_PRIME, "D": D_PRIME, "E": E_PRIME}
    if name in kinds:
        return ConfigClass(kinds[name], n=param, witnesses=cfg.labels, weights=weights)
    return ConfigClass(NONE, weights=weights)


def star_multiplicities(cfg: Configuration) -> QDivisor:
    """Kernel vector of the all-(-2) Gram matrix on the shape of ``cfg``."""
    flat = cfg.with_weights({label: -2 for label in cfg.labels})
    info = definiteness(gram_matrix(flat))
    if info.kind != SEMIDEFINITE_DEGENERATE or len(info.kernel) != 1:
        raise ConfigurationError("shape has no one-dimensional radical")
    vec = info.kernel[0]
    if any(vec.get(label) <= 0 or vec.get(label).denominator != 1 for label in cfg.labels):
        raise ConfigurationError("radical vector is not a positive integral vector")
    return vec


def classify_star_fiber(cfg: Configuration) -> ConfigClass:
    _require_tree(cfg)
    name, param, _ = tree_shape(cfg)
    weights = {c.label: c.self_int for c in cfg.curves}
    if name not in STAR_TYPES:
        return ConfigClass(NONE, weights=weights)
    fiber_type = f"I_{param}_star" if name == "I_n_star" else name
    primed = any(w != -2 for w in weights.values())
    return ConfigClass(
        STAR_FIBER,
        n=len(cfg),
        fiber_type=fiber_type,
        primed=primed,
        multiplicities=star_multiplicities(cfg),
        witnesses=cfg.labels,
        weights=weights,
    )


@dataclass(frozen=True)
class EllipticSubfiber:
    labels: tuple
    fiber_type: str
    multiplicities: QDivisor


def _is_minus_two(cfg: Configuration, label) -> bool:
    c = cfg.curve(label)
    return c.self_int == -2 and c.k_dot == 0


def _connected_subsets(cfg: Configuration, nodes: list, exhaustive_limit: int = 10):
    """Connected subsets of ``nodes`` ordered by size, then by curve order."""
    order = {label: i for i, label in enumerate(cfg.labels)}
    nodes = sorted(nodes, key=order.__getitem__)
    if len(nodes) <= exhaustive_limit:
        for size in range(1, len(nodes) + 1):
            for combo in combinations(nodes, size):
                if cfg.is_connected(combo):
                    yield combo
        return
    adj = cfg.adjacency()
    allowed = set(nodes)
    seen = set()
    found = []
    for start in nodes:
        bfs = [start]
        queue = deque([start])
        visited = {start}
        while queue:
            v = queue.popleft()
            for w in adj[v]:
                if w in allowed and w not in visited:
                    visited.add(w)
                    bfs.append(w)
                    queue.append(w)
        for k in range(1, len(bfs) + 1):
            key = frozenset(bfs[:k])
            if key not in seen:
                seen.add(key)
                found.append(tuple(sorted(key, key=order.__getitem__)))
    found.sort(key=lambda s: (len(s), [order[x] for x in s]))
    yield from found


def detect_elliptic_subfiber(cfg: Configuration) -> EllipticSubfiber | None:
    """First set of (-2)-curves supporting a divisor of elliptic fibre type."""
    minus_two = [label for label in cfg.labels if _is_minus_two(cfg, label)]
    if not minus_two:
        return None
    gram = gram_matrix(cfg)
    suspicious = []
    for comp in cfg.components(minus_two):
        if not is_negative_definite(gram.submatrix(comp).rows()):
            suspicious.append(comp)
    for comp in suspicious:
        for subset in _connected_subsets(cfg, comp):
            info = definiteness(gram.submatrix(subset))
            if info.kind != SEMIDEFINITE_DEGENERATE or len(info.kernel) != 1:
                continue
            vec = info.kernel[0]
            if not all(vec.get(label) > 0 and vec.get(label).denominator == 1 for label in subset):
                continue
            sub = cfg.subconfiguration(subset)
            if is_rational_tree(sub):
                name, param, _ = tree_shape(sub)
                fiber_type = f"I_{param}_star" if name == "I_n_star" else name
            elif len(sub.edges) == len(sub) and all(m == 1 for _, _, m in sub.edges):
                fiber_type = f"I_{len(sub)}"
            else:
                fiber_type = "other"
            return EllipticSubfiber(tuple(subset), fiber_type, vec)
    return None


def supports_i0_star_of_minus_two(cfg: Configuration) -> bool:
    adj = cfg.adjacency()
    for label in cfg.labels:
        if _is_minus_two(cfg, label):
            if sum(1 for w in adj[label] if _is_minus_two(cfg, w)) >= 4:
                return True
    return False


def _removal_order(cfg: Configuration) -> list:
    adj = cfg.adjacency()
    order = {label: i for i, label in enumerate(cfg.labels)}
    hub = max(cfg.labels, key=lambda v: (len(adj[v]), -order[v]))
    seen = [hub]
    queue = deque([hub])
    visited = {hub}
    while queue:
        v = queue.popleft()
        for w in adj[v]:
            if w not in visited:
                visited.add(w)
                seen.append(w)
                queue.append(w)
    return seen


def find_negative_definite_subgraph(cfg: Configuration) -> tuple | None:
    """A set of min(9, #cfg - 1) curves with negative definite Gram matrix.

    Single-curve removals are tried first, starting from the curve of
    highest degree and moving outward; larger trees fall back to an
    exhaustive scan. Returns None if no such set exists.
    """
    _require_tree(cfg)
    if supports_i0_star_of_minus_two(cfg):
        raise HypothesisError("the (-2)-curves support a divisor of type I_0*")
    n = len(cfg)
    r = min(9, n - 1)
    if r <= 0:
        return ()
    gram = gram_matrix(cfg)
    if n - 1 == r:
        for removed in _removal_order(cfg):
            keep = tuple(label for label in cfg.labels if label != removed)
            if is_negative_definite(gram.submatrix(keep).rows()):
                return keep
        return None
    for keep in combinations(cfg.labels, r):
        if is_negative_definite(gram.submatrix(keep).rows()):
            return keep
    return None
