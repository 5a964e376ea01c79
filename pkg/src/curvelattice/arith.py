"""Scalar Riemann-Roch, Noether and fibration bookkeeping.

These functions take intersection numbers supplied by the caller and
return the Euler characteristics and bounds derived from them. No
cohomology is computed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .config import parse_rational


@dataclass(frozen=True)
class SurfaceContext:
    chi: Fraction | None = None
    q: int | None = None
    pg: int | None = None
    K_sq: Fraction | None = None
    kappa: str | None = None

    def __post_init__(self):
        chi = self.chi
        if chi is None and self.q is not None and self.pg is not None:
            chi = 1 - self.q + self.pg
        if chi is not None:
            chi = parse_rational(chi)
            if self.q is not None and self.pg is not None and chi != 1 - self.q + self.pg:
                raise ValueError("chi must equal 1 - q + p_g")
        object.__setattr__(self, "chi", chi)
        if self.K_sq is not None:
            object.__setattr__(self, "K_sq", parse_rational(self.K_sq))

    def require(self, *names):
        for name in names:
            if getattr(self, name) is None:
                raise ValueError(f"surface context is missing {name}")


def riemann_roch_chi(M_sq, M_dot_K, ctx: SurfaceContext) -> Fraction:
    """chi(O_X(M)) = chi(O_X) + (M^2 - M.K)/2."""
    ctx.require("chi")
    return ctx.chi + (parse_rational(M_sq) - parse_rational(M_dot_K)) / 2


def adjoint_products(D_sq, K_dot_D, K_sq) -> tuple[Fraction, Fraction]:
    """(M^2, M.K) for M = K + D."""
    d_sq, kd, k_sq = (parse_rational(x) for x in (D_sq, K_dot_D, K_sq))
    return k_sq + 2 * kd + d_sq, k_sq + kd


def chi_restriction(C_dot_M, C_dot_KplusC) -> Fraction:
    """chi(O_C(M|C)) = C.M - C.(K + C)/2."""
    return parse_rational(C_dot_M) - parse_rational(C_dot_KplusC) / 2


def noether_picard_bound(ctx: SurfaceContext) -> int:
    """b_2 = c_2 - 2 + 4q with c_2 = 12 chi - K^2; bounds the Picard number."""
    ctx.require("chi", "q", "K_sq")
    b2 = 12 * ctx.chi - ctx.K_sq - 2 + 4 * ctx.q
    if b2.denominator != 1:
        raise ValueError("non-integral second Betti number")
    return int(b2)


def remark_h0(KplusD_dot_D, ctx: SurfaceContext) -> Fraction:
    """(K + D).D / 2 + chi(O_X)."""
    ctx.require("chi")
    return parse_rational(KplusD_dot_D) / 2 + ctx.chi


# multiple fibres -------------------------------------------------------------

SEARCH_LIMIT = 100


def multiplicity_relation(m1: int, m2: int, k: int) -> bool:
    return m1 * m2 == k * (m1 * m2 - m1 - m2)


def admissible_pair(m1: int, m2: int) -> bool:
    return 2 <= m1 < m2 and math.gcd(m1, m2) == 1


def solve_multiplicity(k: int | None = None, limit: int = SEARCH_LIMIT) -> list[tuple[int, int, int]]:
    """All coprime 2 <= m1 < m2 <= limit with m1 m2 = k (m1 m2 - m1 - m2) and m1 m2 | k.

    With ``k`` unset every admissible k is considered; k is then forced by
    the pair.
    """
    found = []
    for m1 in range(2, limit + 1):
        for m2 in range(m1 + 1, limit + 1):
            if not admissible_pair(m1, m2):
                continue
            denom = m1 * m2 - m1 - m2
            if denom <= 0 or (m1 * m2) % denom:
                continue
            kk = (m1 * m2) // denom
            if k is not None and kk != k:
                continue
            if kk % (m1 * m2) == 0 and multiplicity_relation(m1, m2, kk):
                found.append((m1, m2, kk))
    return found


def elliptic_multiplicities() -> tuple[int, int, int]:
    sols = solve_multiplicity()
    if len(sols) != 1:
        raise ArithmeticError(f"expected a unique solution, found {sols}")
    return sols[0]


def canonical_fiber_coefficient(multiplicities) -> Fraction:
    """Coefficient of a fibre in K over P^1: -1 + sum(1 - 1/m_i)."""
    return -1 + sum((1 - Fraction(1, m) for m in multiplicities), Fraction(0))


# Hirzebruch surfaces -----------------------------------------------------------


@dataclass(frozen=True)
class HirzebruchReport:
    d: int
    case: str  # "i", "ii", "iii" or "not_a_tree"
    horizontal_sum: Fraction  # sum c_i (C_i . F)
    fiber_sum: Fraction
    fiber_bound: Fraction  # 2 + (c_1 - 1) d - sum_{i>=2} c_i (C_i . C_1)
    fiber_inequality: bool  # (K + L).F >= 0
    section_inequality: bool  # (K + L).C_1 >= 0
    roundup_class: tuple[int, int]  # K + round-up(L) = a C_1 + b F
    dominates: bool  # round-up(L) - (-K) effective

    @property
    def feasible(self) -> bool:
        return self.fiber_inequality and self.section_inequality


def hirzebruch_check(d: int, horizontal, fibers) -> HirzebruchReport:
    """Nef inequalities for K + L on F_d and whether round-up(L) >= -K.

    ``horizontal`` lists (c_i, C_i.F, C_i.C_1) with the negative section
    C_1 first, so its entry is (c_1, 1, -d). ``fibers`` lists the
    coefficients f_j of distinct fibres. Curve classes are written in the
    basis C_1, F with C_1^2 = -d, F^2 = 0, C_1.F = 1 and K = -2 C_1 - (d+2) F.
    """
    if d < 1:
        raise ValueError("d must be >= 1")
    horizontal = [tuple(parse_rational(x) for x in h) for h in horizontal]
    fibers = [parse_rational(f) for f in fibers]
    if not horizontal:
        raise ValueError("the negative section must be listed first")
    c1, c1f, c1c1 = horizontal[0]
    if c1f != 1 or c1c1 != -d:
        raise ValueError("first horizontal entry must be the negative section (C.F = 1, C^2 = -d)")
    for c, cf, _ in horizontal:
        if cf <= 0:
            raise ValueError("horizontal component with C.F <= 0")
        if c <= 0:
            raise ValueError("coefficients must be positive")
    if any(f <= 0 for f in fibers):
        raise ValueError("coefficients must be positive")
    horizontal_sum = sum(c * cf for c, cf, _ in horizontal)
    fiber_sum = sum(fibers, Fraction(0))
    others = sum((c * cc1 for c, _, cc1 in horizontal[1:]), Fraction(0))
    fiber_bound = 2 + (c1 - 1) * d - others
    k = len(horizontal)
    if k == 1:
        case = "i"
    elif len(fibers) == 1:
        case = "ii"
    elif not fibers:
        case = "iii"
    else:
        case = "not_a_tree"
    # C_i ~ a_i C_1 + b_i F with a_i = C_i.F and b_i = C_i.C_1 + d a_i
    a_tot = 0
    b_tot = 0
    for c, cf, cc1 in horizontal:
        a_i, b_i = cf, cc1 + d * cf
        if a_i.denominator != 1 or b_i.denominator != 1:
            raise ValueError("inconsistent intersection data")
        a_tot += math.ceil(c) * int(a_i)
        b_tot += math.ceil(c) * int(b_i)
    b_tot += sum(math.ceil(f) for f in fibers)
    roundup_class = (a_tot - 2, b_tot - (d + 2))
    return HirzebruchReport(
        d=d,
        case=case,
        horizontal_sum=horizontal_sum,
        fiber_sum=fiber_sum,
        fiber_bound=fiber_bound,
        fiber_inequality=horizontal_sum >= 2,
        section_inequality=fiber_sum >= fiber_bound,
        roundup_class=roundup_class,
        dominates=roundup_class[0] >= 0 and roundup_class[1] >= 0,
    )
