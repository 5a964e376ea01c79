"""Zariski decomposition of effective Q-divisors on a configuration."""
from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction

from .config import Configuration, ConfigurationError, QDivisor, gram_matrix
from .linalg import HypothesisError, SingularMatrixError, is_negative_definite, solve


@dataclass(frozen=True)
class ZariskiDecomposition:
    P: QDivisor
    N: QDivisor
    negative_support: frozenset
    iterations: int


def _check_divisor(cfg: Configuration, d: Mapping) -> None:
    for label in d:
        if label not in cfg:
            raise ConfigurationError(f"divisor refers to unknown curve {label!r}")


def zariski_decompose(cfg: Configuration, d: Mapping) -> ZariskiDecomposition:
    """Decompose ``d = P + N`` by growing the negative support.

    Start from an empty negative set S; with the coefficients off S fixed
    at those of ``d``, solve ``P.C = 0`` for C in S, then add every curve
    with ``P.C < 0`` to S. S only grows, so at most #Supp(d) rounds run.
    """
    d = d if isinstance(d, QDivisor) else QDivisor(d)
    _check_divisor(cfg, d)
    if not d.is_effective():
        raise ValueError("Zariski decomposition needs an effective divisor")
    labels = [label for label in cfg.labels if label in d]
    n = len(labels)
    gram = gram_matrix(cfg).submatrix(labels).rows()
    coeff = [d[label] for label in labels]
    neg: list[int] = []
    p = list(coeff)
    rounds = 0
    while True:
        dots = [sum(gram[j][i] * p[i] for i in range(n)) for j in range(n)]
        bad = [j for j in range(n) if dots[j] < 0]
        if not bad:
            break
        neg = sorted(set(neg) | set(bad))
        rounds += 1
        inside = set(neg)
        rhs = [-sum(gram[j][i] * coeff[i] for i in range(n) if i not in inside) for j in neg]
        try:
            sol = solve(gram, rhs, neg)
        except SingularMatrixError as exc:
            raise ArithmeticError("negative support has a singular intersection matrix") from exc
        p = list(coeff)
        for j, x in zip(neg, sol):
            p[j] = x
    if neg and not is_negative_definite([[gram[i][j] for j in neg] for i in neg]):
        raise ArithmeticError("negative support is not negative definite")
    if any(x < 0 for x in p) or any(p[i] > coeff[i] for i in range(n)):
        raise ArithmeticError("positive part escaped [0, d]")
    P = QDivisor(zip(labels, p))
    N = QDivisor((labels[i], coeff[i] - p[i]) for i in range(n))
    return ZariskiDecomposition(P, N, frozenset(labels[i] for i in neg), rounds)


def dot_with_curves(cfg: Configuration, q: Mapping) -> dict:
    _check_divisor(cfg, q)
    return gram_matrix(cfg).apply(q)


def is_nef(cfg: Configuration, q: Mapping) -> bool:
    return all(v >= 0 for v in dot_with_curves(cfg, q).values())


def self_square(cfg: Configuration, q: Mapping) -> Fraction:
    _check_divisor(cfg, q)
    return gram_matrix(cfg).pair(q, q)


def is_big_nef(cfg: Configuration, q: Mapping) -> bool:
    return is_nef(cfg, q) and self_square(cfg, q) > 0


FORCED_INTO_N = "forced_into_N"
NO_CONCLUSION = "no_conclusion"


@dataclass(frozen=True)
class ChainForcing:
    verdict: str
    contact: str
    # b_i / p_attachment for the end-contact case, else empty
    bound_factors: tuple = ()
    reason: str = ""


def _check_linear_chain(cfg: Configuration, chain: Sequence) -> None:
    if not chain:
        raise HypothesisError("empty chain")
    if len(set(chain)) != len(chain):
        raise HypothesisError("chain repeats a curve")
    members = set(chain)
    for a, b, m in cfg.edges:
        if a in members and b in members:
            i, j = chain.index(a), chain.index(b)
            if abs(i - j) != 1 or m != 1:
                raise HypothesisError("not a linear chain")
    for i in range(len(chain) - 1):
        if cfg.multiplicity(chain[i], chain[i + 1]) != 1:
            raise HypothesisError("not a linear chain")


def chain_forcing(cfg: Configuration, chain: Sequence, attachment) -> ChainForcing:
    """Decide whether a twig ``chain`` must lie in the negative part.

    The chain meets the rest of the configuration exactly once, at
    ``attachment``. When the contact is an end of the chain, or the
    contact curve has square <= -3, the chain is contained in Supp(N).
    """
    chain = list(chain)
    for label in chain + [attachment]:
        cfg.curve(label)
    if attachment in chain:
        raise HypothesisError("attachment belongs to the chain")
    _check_linear_chain(cfg, chain)
    members = set(chain)
    outside = 0
    contact = None
    for a, b, m in cfg.edges:
        if (a in members) != (b in members):
            outside += m
            inner, outer = (a, b) if a in members else (b, a)
            if outer == attachment:
                contact = inner
    if outside != 1 or contact is None:
        raise HypothesisError("chain must meet the rest exactly once, at the attachment")
    t = chain.index(contact)
    if t == 0 and len(chain) > 1:
        chain.reverse()
        t = len(chain) - 1
    m = len(chain)
    if t == m - 1:
        factors = tuple((label, Fraction(i + 1, m + 1)) for i, label in enumerate(chain))
        return ChainForcing(FORCED_INTO_N, contact, factors, "contact at the end of the chain")
    if cfg.curve(contact).self_int <= -3:
        return ChainForcing(FORCED_INTO_N, contact, (), "contact curve has square <= -3")
    return ChainForcing(NO_CONCLUSION, contact)


def coefficient_upper_bounds(cfg: Configuration, d: Mapping, reassigned_weights: Mapping) -> dict:
    """Upper bounds for positive-part coefficients on a relaxed block.

    The block is the set of curves in ``reassigned_weights``; each gets a
    square G^2 with -2 >= G^2 >= C^2. Coefficients off the block are read
    from ``d`` (the positive part, or upper bounds for it).
    """
    d = d if isinstance(d, QDivisor) else QDivisor(d)
    _check_divisor(cfg, d)
    block = [label for label in cfg.labels if label in reassigned_weights]
    if len(block) != len(reassigned_weights):
        unknown = set(reassigned_weights) - set(block)
        raise ConfigurationError(f"unknown curves {sorted(unknown)}")
    relaxed_cfg = cfg.with_weights(reassigned_weights)
    for label in block:
        g = relaxed_cfg.curve(label).self_int
        if not (-2 >= g >= cfg.curve(label).self_int):
            raise HypothesisError(f"weight for {label!r} must satisfy -2 >= G^2 >= C^2")
    full = gram_matrix(relaxed_cfg)
    sub = full.submatrix(block).rows()
    if not is_negative_definite(sub):
        raise HypothesisError("relaxed block is not negative definite")
    rows = full.rows()
    index = {label: i for i, label in enumerate(full.labels)}
    inside = set(block)
    rhs = []
    for label in block:
        j = index[label]
        rhs.append(-sum(rows[index[o]][j] * c for o, c in d.items() if o not in inside))
    sol = solve(sub, rhs)
    return dict(zip(block, sol))


def separated_chains(cfg: Configuration) -> list[tuple[tuple, str]]:
    """Linear chains cut off from the rest by a single edge of multiplicity 1.

    Returns (chain in path order, attachment) pairs, ordered by the
    position of the attachment and then of the chain's first curve.
    """
    order = {label: i for i, label in enumerate(cfg.labels)}
    out = []
    for a, b, m in cfg.edges:
        if m != 1:
            continue
        for inner, outer in ((a, b), (b, a)):
            side = _side(cfg, inner, outer)
            if side is None or outer in side:
                continue
            path = _as_path(cfg, side)
            if path is None:
                continue
            if path[-1] != inner and path[0] == inner:
                path.reverse()
            out.append((tuple(path), outer))
    out.sort(key=lambda t: (order[t[1]], [order[x] for x in t[0]]))
    return out


def _side(cfg: Configuration, start, blocked):
    """Curves reachable from ``start`` without the edge start-blocked."""
    adj = cfg.adjacency()
    seen = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if v == start and w == blocked:
                continue
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


def _as_path(cfg: Configuration, nodes: set):
    """The nodes in path order if they form a linear chain, else None."""
    sub = cfg.subconfiguration(nodes)
    if len(sub.edges) != len(nodes) - 1 or any(m != 1 for _, _, m in sub.edges):
        return None
    adj = sub.adjacency()
    if any(len(adj[v]) > 2 for v in nodes):
        return None
    ends = [v for v in sub.labels if len(adj[v]) <= 1]
    path = [ends[0]]
    prev = None
    while len(path) < len(nodes):
        nxt = [w for w in adj[path[-1]] if w != prev]
        prev = path[-1]
        path.append(nxt[0])
    return path
