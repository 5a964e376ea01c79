"""Enumeration of unlabeled trees and their weightings, one per isomorphism class.

Rooted shapes are canonical nested tuples (the sorted tuple of child shapes).
Free trees are rooted at their centroid; trees with two centroids are an
unordered pair of rooted halves joined by the central edge.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations_with_replacement, groupby, product

from .config import Configuration, Curve


@lru_cache(maxsize=None)
def shape_size(shape: tuple) -> int:
    return 1 + sum(shape_size(c) for c in shape)


@lru_cache(maxsize=None)
def _partitions(total: int, largest: int) -> tuple:
    """Partitions of ``total`` into parts <= ``largest``, parts non-increasing."""
    if total == 0:
        return ((),)
    out = []
    for first in range(min(total, largest), 0, -1):
        for rest in _partitions(total - first, first):
            out.append((first,) + rest)
    return tuple(out)


@lru_cache(maxsize=None)
def _rooted(size: int, max_child: int) -> tuple:
    """Rooted shapes with ``size`` nodes whose root subtrees have <= max_child nodes."""
    out = []
    for parts in _partitions(size - 1, max_child):
        choices = []
        for part, group in groupby(parts):
            count = len(list(group))
            choices.append(list(combinations_with_replacement(rooted_shapes(part), count)))
        for pick in product(*choices):
            children = tuple(sorted(c for grp in pick for c in grp))
            out.append(children)
    return tuple(sorted(out))


def rooted_shapes(size: int) -> tuple:
    return _rooted(size, size - 1)


@dataclass(frozen=True)
class FreeShape:
    """A free tree: a centroid-rooted shape, or two halves joined by an edge."""

    root: tuple | None = None
    halves: tuple | None = None

    @property
    def size(self) -> int:
        if self.root is not None:
            return shape_size(self.root)
        return shape_size(self.halves[0]) + shape_size(self.halves[1])


@lru_cache(maxsize=None)
def free_shapes(n: int) -> tuple:
    """All unlabeled trees on ``n`` nodes in a fixed canonical order."""
    if n < 1:
        return ()
    out = [FreeShape(root=s) for s in _rooted(n, (n - 1) // 2)]
    if n % 2 == 0:
        half = rooted_shapes(n // 2)
        for a, b in combinations_with_replacement(half, 2):
            out.append(FreeShape(halves=(a, b)))
    return tuple(out)


@lru_cache(maxsize=None)
def _weighted_rooted(shape: tuple, weights: tuple) -> tuple:
    groups = [(c, len(list(g))) for c, g in groupby(shape)]
    choices = [
        list(combinations_with_replacement(_weighted_rooted(c, weights), count)) for c, count in groups
    ]
    out = []
    for w in weights:
        for pick in product(*choices):
            out.append((w, tuple(t for grp in pick for t in grp)))
    return tuple(out)


@dataclass(frozen=True)
class WeightedTree:
    """Lightweight weighted tree: node weights and parent-child edges."""

    weights: tuple
    edges: tuple

    def __len__(self):
        return len(self.weights)

    def labels(self) -> tuple:
        return tuple(f"C{i}" for i in range(len(self.weights)))

    def to_configuration(self) -> Configuration:
        labels = self.labels()
        curves = tuple(Curve(labels[i], w) for i, w in enumerate(self.weights))
        edges = tuple((labels[a], labels[b]) for a, b in self.edges)
        return Configuration(curves, edges)


def _flatten(tree, weights: list, edges: list, parent: int | None) -> None:
    me = len(weights)
    weights.append(tree[0])
    if parent is not None:
        edges.append((parent, me))
    for child in tree[1]:
        _flatten(child, weights, edges, me)


def weighted_trees_of_shape(shape: FreeShape, weights) -> list[WeightedTree]:
    """Every weighting of ``shape`` by ``weights``, one per isomorphism class."""
    weights = tuple(weights)
    if shape.root is not None:
        raw = [(t,) for t in _weighted_rooted(shape.root, weights)]
    else:
        a, b = shape.halves
        wa = _weighted_rooted(a, weights)
        if a == b:
            raw = list(combinations_with_replacement(wa, 2))
        else:
            raw = list(product(wa, _weighted_rooted(b, weights)))
    out = []
    for parts in raw:
        ws, es = [], []
        _flatten(parts[0], ws, es, None)
        if len(parts) == 2:
            offset = len(ws)
            _flatten(parts[1], ws, es, None)
            es.append((0, offset))
        out.append(WeightedTree(tuple(ws), tuple(es)))
    return out


def weight_range(min_weight: int, weight_set=None) -> tuple:
    if weight_set is not None:
        return tuple(sorted(set(weight_set), reverse=True))
    return tuple(range(-2, min_weight - 1, -1))
