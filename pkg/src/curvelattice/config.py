"""Curve configurations, Q-divisors and Gram matrices.

A configuration is a weighted dual graph: one node per curve carrying its
self-intersection and either an arithmetic genus or an explicit canonical
pairing, and one edge per intersecting pair carrying the intersection
multiplicity.
"""
from __future__ import annotations

import json
import math
import re
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from fractions import Fraction

_RATIONAL_RE = re.compile(r"^\s*(-?\d+)(?:\s*/\s*(\d+))?\s*$")


class ConfigurationError(ValueError):
    """Raised for malformed or inconsistent configuration data."""


def parse_rational(value) -> Fraction:
    """Parse an integer or a ``"p/q"`` string into a reduced Fraction."""
    if isinstance(value, bool):
        raise ConfigurationError(f"malformed rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        m = _RATIONAL_RE.match(value)
        if m:
            den = int(m.group(2)) if m.group(2) is not None else 1
            if den == 0:
                raise ConfigurationError(f"zero denominator in rational: {value!r}")
            return Fraction(int(m.group(1)), den)
    raise ConfigurationError(f"malformed rational: {value!r}")


def format_rational(q: Fraction) -> str:
    return str(Fraction(q))


@dataclass(frozen=True)
class Curve:
    label: str
    self_int: Fraction
    genus: int | None = 0
    k_pairing: Fraction | None = None

    def __post_init__(self):
        object.__setattr__(self, "self_int", parse_rational(self.self_int))
        if (self.genus is None) == (self.k_pairing is None):
            raise ConfigurationError(
                f"curve {self.label!r}: exactly one of genus and k must be given"
            )
        if self.genus is not None:
            if not isinstance(self.genus, int) or isinstance(self.genus, bool) or self.genus < 0:
                raise ConfigurationError(f"curve {self.label!r}: bad genus {self.genus!r}")
        else:
            object.__setattr__(self, "k_pairing", parse_rational(self.k_pairing))

    @property
    def k_dot(self) -> Fraction:
        """K.C by adjunction, or the explicit pairing for abstract classes."""
        if self.genus is not None:
            return 2 * self.genus - 2 - self.self_int
        return self.k_pairing


class QDivisor(Mapping):
    """Immutable map label -> Fraction; absent labels have coefficient 0."""

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Mapping | Iterable = ()):
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        clean = {}
        for label, c in items:
            c = parse_rational(c)
            if c:
                clean[label] = c
        self._coeffs = clean

    @classmethod
    def reduced(cls, labels: Iterable[str]) -> QDivisor:
        return cls((label, 1) for label in labels)

    def __getitem__(self, label):
        return self._coeffs[label]

    def get(self, label, default=Fraction(0)):
        return self._coeffs.get(label, default)

    def __iter__(self) -> Iterator[str]:
        return iter(self._coeffs)

    def __len__(self) -> int:
        return len(self._coeffs)

    def __eq__(self, other):
        if isinstance(other, QDivisor):
            return self._coeffs == other._coeffs
        if isinstance(other, Mapping):
            return self == QDivisor(other)
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._coeffs.items()))

    def __add__(self, other: QDivisor) -> QDivisor:
        out = dict(self._coeffs)
        for label, c in other.items():
            out[label] = out.get(label, 0) + c
        return QDivisor(out)

    def __sub__(self, other: QDivisor) -> QDivisor:
        return self + other.scale(-1)

    def scale(self, factor) -> QDivisor:
        factor = Fraction(factor)
        return QDivisor((label, c * factor) for label, c in self._coeffs.items())

    @property
    def support(self) -> frozenset:
        return frozenset(self._coeffs)

    def is_effective(self) -> bool:
        return all(c > 0 for c in self._coeffs.values())

    def to_json(self, order: Iterable[str] | None = None) -> dict:
        labels = list(order) if order is not None else sorted(self._coeffs)
        return {label: format_rational(self._coeffs[label]) for label in labels if label in self._coeffs}

    def __repr__(self):
        body = ", ".join(f"{k}: {v}" for k, v in self._coeffs.items())
        return f"QDivisor({{{body}}})"


@dataclass(frozen=True)
class GramMatrix:
    labels: tuple
    entries: tuple  # tuple of row tuples of Fraction

    def __post_init__(self):
        n = len(self.labels)
        if len(self.entries) != n or any(len(row) != n for row in self.entries):
            raise ConfigurationError("Gram matrix must be square and match its labels")

    @classmethod
    def from_rows(cls, labels, rows) -> GramMatrix:
        return cls(tuple(labels), tuple(tuple(Fraction(x) for x in row) for row in rows))

    @property
    def size(self) -> int:
        return len(self.labels)

    def rows(self) -> list[list[Fraction]]:
        return [list(row) for row in self.entries]

    def index(self, label) -> int:
        return self.labels.index(label)

    def is_symmetric(self) -> bool:
        n = self.size
        return all(self.entries[i][j] == self.entries[j][i] for i in range(n) for j in range(i))

    def submatrix(self, labels: Iterable) -> GramMatrix:
        idx = [self.index(label) for label in labels]
        return GramMatrix(
            tuple(self.labels[i] for i in idx),
            tuple(tuple(self.entries[i][j] for j in idx) for i in idx),
        )

    def pair(self, a: Mapping, b: Mapping) -> Fraction:
        """Bilinear pairing of two coefficient maps over this matrix's labels."""
        total = Fraction(0)
        for i, li in enumerate(self.labels):
            ca = a.get(li, 0)
            if not ca:
                continue
            row = self.entries[i]
            for j, lj in enumerate(self.labels):
                cb = b.get(lj, 0)
                if cb and row[j]:
                    total += ca * row[j] * cb
        return total

    def apply(self, v: Mapping) -> dict:
        """Return the map label -> (v . label)."""
        out = {}
        for i, li in enumerate(self.labels):
            row = self.entries[i]
            out[li] = sum((row[j] * v.get(lj, 0) for j, lj in enumerate(self.labels)), Fraction(0))
        return out

    def __str__(self):
        width = max((len(str(x)) for row in self.entries for x in row), default=1)
        return "\n".join(" ".join(str(x).rjust(width) for x in row) for row in self.entries)


@dataclass(frozen=True)
class Configuration:
    curves: tuple
    edges: tuple = ()
    _index: dict = field(init=False, repr=False, compare=False)
    _mult: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "curves", tuple(self.curves))
        index = {}
        for pos, curve in enumerate(self.curves):
            if curve.label in index:
                raise ConfigurationError(f"duplicate curve label {curve.label!r}")
            index[curve.label] = pos
        mult = {}
        norm_edges = []
        for edge in self.edges:
            if len(edge) == 2:
                a, b = edge
                m = 1
            elif len(edge) == 3:
                a, b, m = edge
            else:
                raise ConfigurationError(f"bad edge record {edge!r}")
            for end in (a, b):
                if end not in index:
                    raise ConfigurationError(f"edge refers to unknown curve {end!r}")
            if a == b:
                raise ConfigurationError(f"self-edge on {a!r}")
            if not isinstance(m, int) or isinstance(m, bool) or m < 1:
                raise ConfigurationError(f"edge {a!r}-{b!r}: multiplicity must be a positive integer")
            key = frozenset((a, b))
            if key in mult:
                raise ConfigurationError(f"duplicate edge {a!r}-{b!r}")
            mult[key] = m
            norm_edges.append((a, b, m))
        object.__setattr__(self, "edges", tuple(norm_edges))
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "_mult", mult)

    @property
    def labels(self) -> tuple:
        return tuple(c.label for c in self.curves)

    def __len__(self):
        return len(self.curves)

    def __contains__(self, label):
        return label in self._index

    def curve(self, label) -> Curve:
        try:
            return self.curves[self._index[label]]
        except KeyError:
            raise ConfigurationError(f"unknown curve {label!r}") from None

    def multiplicity(self, a, b) -> int:
        return self._mult.get(frozenset((a, b)), 0)

    def neighbors(self, label) -> list:
        self.curve(label)
        out = []
        for a, b, _ in self.edges:
            if a == label:
                out.append(b)
            elif b == label:
                out.append(a)
        return sorted(out, key=self._index.__getitem__)

    def adjacency(self) -> dict:
        adj = {label: [] for label in self.labels}
        for a, b, _ in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        for label in adj:
            adj[label].sort(key=self._index.__getitem__)
        return adj

    def subconfiguration(self, labels: Iterable) -> Configuration:
        keep = set(labels)
        for label in keep:
            self.curve(label)
        curves = [c for c in self.curves if c.label in keep]
        edges = [(a, b, m) for a, b, m in self.edges if a in keep and b in keep]
        return Configuration(tuple(curves), tuple(edges))

    def with_weights(self, weights: Mapping) -> Configuration:
        """Copy with some self-intersections replaced (genus data kept)."""
        curves = []
        for c in self.curves:
            if c.label in weights:
                c = Curve(c.label, parse_rational(weights[c.label]), c.genus, c.k_pairing)
            curves.append(c)
        return Configuration(tuple(curves), self.edges)

    def components(self, labels: Iterable | None = None) -> list[list]:
        """Connected components of the induced subgraph, each in curve order."""
        keep = set(self.labels if labels is None else labels)
        adj = self.adjacency()
        seen = set()
        comps = []
        for start in self.labels:
            if start not in keep or start in seen:
                continue
            comp = []
            stack = [start]
            seen.add(start)
            while stack:
                v = stack.pop()
                comp.append(v)
                for w in adj[v]:
                    if w in keep and w not in seen:
                        seen.add(w)
                        stack.append(w)
            comps.append(sorted(comp, key=self._index.__getitem__))
        return comps

    def is_connected(self, labels: Iterable | None = None) -> bool:
        return len(self.components(labels)) <= 1

    def to_json(self, divisor: QDivisor | None = None) -> dict:
        curves = []
        for c in self.curves:
            entry = {"id": c.label, "self": format_rational(c.self_int)}
            if c.genus is not None:
                entry["genus"] = c.genus
            else:
                entry["k"] = format_rational(c.k_pairing)
            curves.append(entry)
        out = {
            "curves": curves,
            "edges": [[a, b] if m == 1 else [a, b, m] for a, b, m in self.edges],
        }
        if divisor is not None:
            out["divisor"] = divisor.to_json(self.labels)
        return out


_CURVE_KEYS = {"id", "self", "genus", "k"}
_TOP_KEYS = {"curves", "edges", "divisor"}


def parse_configuration(text: str) -> tuple[Configuration, QDivisor | None]:
    """Parse the JSON configuration format.

    Returns the configuration and the optional ``"divisor"`` entry.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"invalid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigurationError("top level must be a JSON object")
    unknown = set(data) - _TOP_KEYS
    if unknown:
        raise ConfigurationError(f"unknown fields: {sorted(unknown)}")
    if "curves" not in data:
        raise ConfigurationError("missing 'curves'")
    curves = []
    for entry in data["curves"]:
        if not isinstance(entry, dict):
            raise ConfigurationError(f"curve entry must be an object: {entry!r}")
        unknown = set(entry) - _CURVE_KEYS
        if unknown:
            raise ConfigurationError(f"unknown curve fields: {sorted(unknown)}")
        if "id" not in entry or "self" not in entry:
            raise ConfigurationError(f"curve entry needs 'id' and 'self': {entry!r}")
        label = entry["id"]
        if not isinstance(label, str):
            raise ConfigurationError(f"curve id must be a string: {label!r}")
        has_genus, has_k = "genus" in entry, "k" in entry
        if has_genus == has_k:
            raise ConfigurationError(f"curve {label!r}: exactly one of 'genus' and 'k' must be given")
        curves.append(
            Curve(
                label,
                parse_rational(entry["self"]),
                genus=entry["genus"] if has_genus else None,
                k_pairing=parse_rational(entry["k"]) if has_k else None,
            )
        )
    edges = []
    for edge in data.get("edges", []):
        if not isinstance(edge, list) or len(edge) not in (2, 3):
            raise ConfigurationError(f"bad edge record {edge!r}")
        edges.append(tuple(edge))
    cfg = Configuration(tuple(curves), tuple(edges))
    divisor = None
    if "divisor" in data:
        raw = data["divisor"]
        if not isinstance(raw, dict):
            raise ConfigurationError("'divisor' must be an object")
        for label in raw:
            if label not in cfg:
                raise ConfigurationError(f"divisor refers to unknown curve {label!r}")
        divisor = QDivisor({label: parse_rational(v) for label, v in raw.items()})
    return cfg, divisor


def load_configuration(path) -> tuple[Configuration, QDivisor | None]:
    with open(path, encoding="utf-8") as fh:
        return parse_configuration(fh.read())


def gram_matrix(cfg: Configuration) -> GramMatrix:
    labels = cfg.labels
    n = len(labels)
    rows = [[Fraction(0)] * n for _ in range(n)]
    for i, c in enumerate(cfg.curves):
        rows[i][i] = c.self_int
    index = {label: i for i, label in enumerate(labels)}
    for a, b, m in cfg.edges:
        i, j = index[a], index[b]
        rows[i][j] = rows[j][i] = Fraction(m)
    return GramMatrix(labels, tuple(tuple(r) for r in rows))


def canonical_lattice(cfg: Configuration, k_sq, k_label: str = "K") -> GramMatrix:
    """Gram matrix of the canonical class followed by the curves of ``cfg``."""
    if k_label in cfg:
        raise ConfigurationError(f"label {k_label!r} already used")
    base = gram_matrix(cfg)
    kc = [c.k_dot for c in cfg.curves]
    rows = [[parse_rational(k_sq)] + kc]
    for i, row in enumerate(base.entries):
        rows.append([kc[i]] + list(row))
    return GramMatrix.from_rows((k_label,) + base.labels, rows)


def k_dot(cfg: Configuration, label) -> Fraction:
    return cfg.curve(label).k_dot


def intersect(cfg: Configuration, a: Mapping, b: Mapping) -> Fraction:
    return gram_matrix(cfg).pair(a, b)


def round_up(d: Mapping) -> QDivisor:
    return QDivisor((label, math.ceil(c)) for label, c in d.items())


def is_rational_tree(cfg: Configuration) -> bool:
    if len(cfg) == 0:
        return False
    if any(c.genus != 0 for c in cfg.curves):
        return False
    if any(m != 1 for _, _, m in cfg.edges):
        return False
    return len(cfg.edges) == len(cfg) - 1 and cfg.is_connected()


def adjoint_pairing(cfg: Configuration, support: Iterable | None = None) -> Fraction:
    """D.(K + D) for the reduced divisor D on ``support`` (all curves by default)."""
    labels = list(cfg.labels if support is None else support)
    if not labels:
        raise ConfigurationError("empty support")
    if isinstance(support, Mapping) and any(support[label] != 1 for label in labels):
        raise ConfigurationError("adjoint_pairing expects a reduced divisor")
    if not cfg.is_connected(labels):
        raise ConfigurationError("support is not connected")
    sub = cfg.subconfiguration(labels)
    total = Fraction(0)
    for c in sub.curves:
        total += c.self_int + c.k_dot
    total += 2 * sum(m for _, _, m in sub.edges)
    return total
