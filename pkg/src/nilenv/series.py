"""Central series, iterated centralizer towers, and the commutator lemma checkers.

The iterated centralizer tower of a base subgroup P inside an ambient
subgroup G generalizes the upper central series: the level-m term collects
the elements of the intersection of the normalizers of all lower terms whose
commutators with P land in the previous term.  Everything here is computed
from that raw definition so that the structural claims about the tower
(subgroup-hood, normalization by P, the intersection law) stay testable.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import HypothesisError, InternalCheckError, ParentMismatchError
from .groups import (
    FiniteGroup,
    Subgroup,
    commutator_subgroup,
    is_subgroup_mask,
    iter_mask,
)


def _ambient_pair(ambient) -> tuple[FiniteGroup, int]:
    if isinstance(ambient, FiniteGroup):
        return ambient, ambient.full_mask
    return ambient.parent, ambient.members


@dataclass(frozen=True)
class CentralSeries:
    """A lower or upper central series with its class, when it terminates."""

    kind: str
    terms: tuple[Subgroup, ...]
    nilpotence_class: int | None


def lower_central_series(P: Subgroup) -> CentralSeries:
    """The series P = gamma_1 >= gamma_2 >= ..., stopped at stabilization."""
    G = P.parent
    key = ("lcs", P.members)
    cached = G._memo.get(key)
    if cached is None:
        masks = [P.members]
        while len(masks) <= G.order:
            nxt = commutator_subgroup(Subgroup(G, masks[-1]), P).members
            if nxt == masks[-1]:
                break
            masks.append(nxt)
        cls = len(masks) - 1 if masks[-1] == 1 else None
        cached = (tuple(masks), cls)
        G._memo[key] = cached
    masks, cls = cached
    return CentralSeries("lower", tuple(Subgroup(G, m) for m in masks), cls)


def upper_central_series(P: Subgroup) -> CentralSeries:
    """The series 1 = Z_0 <= Z_1 <= ... of P, stopped at stabilization."""
    G = P.parent
    key = ("ucs", P.members)
    cached = G._memo.get(key)
    if cached is None:
        members = P.elements
        masks = [1]
        while len(masks) <= G.order + 1:
            prev = masks[-1]
            if prev == P.members:
                break
            nxt = 0
            for x in members:
                if all(prev >> G._comm(x, p) & 1 for p in members):
                    nxt |= 1 << x
            if nxt == prev:
                break
            masks.append(nxt)
        cls = len(masks) - 1 if masks[-1] == P.members else None
        cached = (tuple(masks), cls)
        G._memo[key] = cached
    masks, cls = cached
    return CentralSeries("upper", tuple(Subgroup(G, m) for m in masks), cls)


def nilpotence_class(P: Subgroup) -> int | None:
    """Nilpotence class of P, or None when P is not nilpotent.

    Computed from both central series and cross-checked; a disagreement
    raises :class:`InternalCheckError`.
    """
    G = P.parent
    key = ("nilclass", P.members)
    if key not in G._memo:
        by_lower = lower_central_series(P).nilpotence_class
        by_upper = upper_central_series(P).nilpotence_class
        if by_lower != by_upper:
            raise InternalCheckError(
                f"central series disagree on nilpotence class: {by_lower} vs {by_upper}"
            )
        G._memo[key] = by_lower
    return G._memo[key]


@dataclass(frozen=True)
class IteratedCentralizerTower:
    """Tower terms[m] = C_ambient^m(base) for m = 0..n."""

    ambient: Subgroup
    base: Subgroup
    terms: tuple[Subgroup, ...]


def iterated_centralizer(ambient, base: Subgroup, n: int) -> IteratedCentralizerTower:
    """The iterated centralizers of ``base`` inside ``ambient`` up to level n.

    Level m is computed literally: elements of the intersection of the
    ambient normalizers of all lower terms whose commutator with every
    element of ``base`` lies in level m-1.  Each term is verified to be a
    subgroup.
    """
    G, amb = _ambient_pair(ambient)
    if base.parent is not G:
        raise ParentMismatchError("base subgroup belongs to a different group")
    if base.members & ~amb:
        raise HypothesisError("base subgroup is not contained in the ambient subgroup")
    if n < 0:
        raise HypothesisError("tower level must be nonnegative")

    key = ("tower", amb, base.members)
    terms, norm_inter = G._memo.get(key, ((1,), amb))
    if len(terms) <= n:
        terms = list(terms)
        base_elems = base.elements
        while len(terms) <= n:
            prev = terms[-1]
            norm_inter &= G.normalizer_mask(prev) if prev != 1 else amb
            level = 0
            for x in iter_mask(norm_inter):
                if all(prev >> G._comm(x, p) & 1 for p in base_elems):
                    level |= 1 << x
            if not is_subgroup_mask(G, level):
                raise InternalCheckError("iterated centralizer level is not a subgroup")
            terms.append(level)
        terms = tuple(terms)
        G._memo[key] = (terms, norm_inter)

    amb_sub = ambient if isinstance(ambient, Subgroup) else G.as_subgroup()
    return IteratedCentralizerTower(
        amb_sub, base, tuple(Subgroup(G, m) for m in terms[: n + 1])
    )


def _series_term(masks, i: int) -> int:
    """Term i of a stabilized series, repeating the last term past the end."""
    return masks[i] if i < len(masks) else masks[-1]


@dataclass(frozen=True)
class HallBoundReport:
    """Whether [gamma_i(base), C^k(base)] lands inside C^(k-i)(base)."""

    ok: bool
    lhs: Subgroup
    rhs: Subgroup
    counterexample: tuple[int, int, int] | None


def check_hall_bound(ambient, base: Subgroup, i: int, k: int) -> HallBoundReport:
    """Check the commutator bound relating the tower to the lower series."""
    if not 1 <= i <= k:
        raise HypothesisError("indices must satisfy 1 <= i <= k")
    G, _ = _ambient_pair(ambient)
    tower = iterated_centralizer(ambient, base, k)
    lower = lower_central_series(base)
    gamma_i = _series_term([s.members for s in lower.terms], i - 1)
    c_k = tower.terms[k].members
    rhs = tower.terms[k - i]

    counterexample = None
    for a in iter_mask(gamma_i):
        for c in iter_mask(c_k):
            w = G._comm(a, c)
            if not rhs.members >> w & 1:
                counterexample = (a, c, w)
                break
        if counterexample:
            break
    lhs = commutator_subgroup(Subgroup(G, gamma_i), Subgroup(G, c_k))
    ok = counterexample is None
    if ok != (lhs.members & ~rhs.members == 0):
        raise InternalCheckError("pairwise and generated commutator checks disagree")
    return HallBoundReport(ok, lhs, rhs, counterexample)


@dataclass(frozen=True)
class ThreeSubgroupReport:
    """Outcome of a three-subgroup implication instance.

    ``conclusion_holds`` is None when the hypotheses fail (the implication is
    then vacuously true).
    """

    hypotheses_hold: bool
    conclusion_holds: bool | None
    implication_holds: bool


def check_three_subgroup(
    first: Subgroup, second: Subgroup, third: Subgroup, inside: Subgroup
) -> ThreeSubgroupReport:
    """Check: [K,L,M] <= N and [L,M,K] <= N imply [M,K,L] <= N.

    K, L, M must all normalize N; violating that precondition raises
    :class:`HypothesisError`, matching the lemma's standing hypothesis.
    """
    G = inside.parent
    for sub in (first, second, third):
        if sub.parent is not G:
            raise ParentMismatchError("all four subgroups must share one parent group")
    norm = G.normalizer_mask(inside.members)
    for label, sub in (("K", first), ("L", second), ("M", third)):
        if sub.members & ~norm:
            raise HypothesisError(f"subgroup {label} does not normalize N")

    def triple(a, b, c):
        return commutator_subgroup(commutator_subgroup(a, b), c)

    n_mask = inside.members
    hyp = (
        triple(first, second, third).members & ~n_mask == 0
        and triple(second, third, first).members & ~n_mask == 0
    )
    if not hyp:
        return ThreeSubgroupReport(False, None, True)
    conclusion = triple(third, first, second).members & ~n_mask == 0
    return ThreeSubgroupReport(True, conclusion, conclusion)


@dataclass(frozen=True)
class TransferReport:
    """Outcome of a centralizer transfer instance at level k.

    status is one of "hypotheses-fail", "conclusion-holds", "violation";
    the tower terms C^k(X) and C^k(P) are included for inspection.
    """

    status: str
    level: int
    x_term: Subgroup
    p_term: Subgroup


def check_centralizer_transfer(ambient, small: Subgroup, big: Subgroup, k: int) -> TransferReport:
    """Check that a subgroup and an overgroup share their level-k centralizer.

    Given X <= P inside the ambient subgroup, the hypotheses are: the towers
    of X and P agree below level k, [gamma_k(P), C^k(X)] = 1, and X and P
    have equal centralizers.  The conclusion is C^k(X) = C^k(P); a violation
    with the hypotheses holding would mean an implementation bug.
    """
    if k < 1:
        raise HypothesisError("level k must be at least 1")
    G, amb = _ambient_pair(ambient)
    if small.members & ~big.members:
        raise HypothesisError("X must be contained in P")
    if big.members & ~amb:
        raise HypothesisError("P must be contained in the ambient subgroup")

    x_tower = iterated_centralizer(ambient, small, k)
    p_tower = iterated_centralizer(ambient, big, k)
    agree_below = all(
        x_tower.terms[i].members == p_tower.terms[i].members for i in range(k)
    )
    gamma_k = _series_term([s.members for s in lower_central_series(big).terms], k - 1)
    c_k_x = x_tower.terms[k]
    commute = commutator_subgroup(Subgroup(G, gamma_k), c_k_x).members == 1
    same_centralizer = G.centralizer_mask(small.members, within=amb) == G.centralizer_mask(
        big.members, within=amb
    )

    if not (agree_below and commute and same_centralizer):
        return TransferReport("hypotheses-fail", k, c_k_x, p_tower.terms[k])
    status = "conclusion-holds" if c_k_x.members == p_tower.terms[k].members else "violation"
    return TransferReport(status, k, c_k_x, p_tower.terms[k])


@dataclass(frozen=True)
class NestedTowerReport:
    """Outcome of a nested tower comparison across subgroups A <= B <= C."""

    hypothesis_holds: bool
    conclusion_holds: bool | None
    implication_holds: bool
    failed_level: int | None


def check_nested_towers(inner: Subgroup, mid: Subgroup, outer: Subgroup, n: int) -> NestedTowerReport:
    """Check C_B^j(A) = C_C^j(A) meet B for j <= n, for nested A <= B <= C.

    The hypothesis, checked first, is that the tower of A inside C agrees
    with the upper central series of C at every level below n.
    """
    if n < 1:
        raise HypothesisError("level n must be at least 1")
    if inner.members & ~mid.members or mid.members & ~outer.members:
        raise HypothesisError("subgroups must be nested as A <= B <= C")

    G = outer.parent
    outer_tower = iterated_centralizer(outer, inner, n)
    upper = [s.members for s in upper_central_series(outer).terms]
    hypothesis = all(
        outer_tower.terms[k].members == _series_term(upper, k) for k in range(n)
    )
    if not hypothesis:
        return NestedTowerReport(False, None, True, None)

    mid_tower = iterated_centralizer(mid, inner, n)
    for j in range(n + 1):
        if mid_tower.terms[j].members != outer_tower.terms[j].members & mid.members:
            return NestedTowerReport(True, False, False, j)
    return NestedTowerReport(True, True, True, None)
