"""Centralizer lattices, centralizer dimension, and small witness sets.

The centralizer dimension of a group is the number of strict drops in the
longest descending chain of centralizers, with the convention that abelian
groups (where the only centralizer is the whole group) have dimension 1.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import CapExceededError, InternalCheckError, WitnessBoundError
from .groups import ElementSet, FiniteGroup, Subgroup, iter_mask, mask_of

DEFAULT_NODE_CAP = 20_000


def _ambient_pair(ambient) -> tuple[FiniteGroup, int]:
    if isinstance(ambient, FiniteGroup):
        return ambient, ambient.full_mask
    return ambient.parent, ambient.members


def centralizer(subset: ElementSet, within: Subgroup | None = None) -> Subgroup:
    """The centralizer of a subset, inside ``within`` (default: the whole group)."""
    G = subset.parent
    inner = None if within is None else within.members
    return Subgroup(G, G.centralizer_mask(subset.members, within=inner))


class CentralizerLattice:
    """All centralizers of subsets of an ambient subgroup, inside that subgroup.

    ``nodes[i]`` is the i-th centralizer (sorted by descending order, then by
    mask) and ``witnesses[i]`` is a subset whose centralizer it is.
    """

    def __init__(self, group, ambient, nodes, witnesses):
        self.group = group
        self.ambient = ambient
        self.nodes = nodes
        self.witnesses = witnesses
        self._hasse: tuple[tuple[int, int], ...] | None = None

    def __len__(self) -> int:
        return len(self.nodes)

    def hasse_edges(self) -> tuple[tuple[int, int], ...]:
        """Covering pairs (i, j): node i properly contains node j with nothing between."""
        if self._hasse is None:
            masks = [s.members for s in self.nodes]
            edges = []
            for i, big in enumerate(masks):
                below = [j for j, small in enumerate(masks) if small != big and small & big == small]
                for j in below:
                    direct = not any(
                        masks[k] != masks[j]
                        and masks[k] & big == masks[k]
                        and masks[k] != big
                        and masks[j] & masks[k] == masks[j]
                        for k in below
                    )
                    if direct:
                        edges.append((i, j))
            self._hasse = tuple(edges)
        return self._hasse

    def to_dot(self) -> str:
        lines = ["digraph centralizers {"]
        for i, node in enumerate(self.nodes):
            lines.append(f'  n{i} [label="C{i} (order {node.order})"];')
        for i, j in self.hasse_edges():
            lines.append(f"  n{i} -> n{j};")
        lines.append("}")
        return "\n".join(lines)


def centralizer_lattice(ambient, node_cap: int = DEFAULT_NODE_CAP) -> CentralizerLattice:
    """Compute every centralizer of a subset of ``ambient`` inside ``ambient``.

    The family is closed under intersection and is generated by the single
    element centralizers, so it is found by intersecting pairs to a fixpoint.
    Raises :class:`CapExceededError` if more than ``node_cap`` centralizers
    appear.
    """
    G, amb = _ambient_pair(ambient)
    key = ("lattice", amb, node_cap)
    cached = G._memo.get(key)
    if cached is not None:
        return cached

    found: dict[int, int] = {amb: 0}
    order: list[int] = [amb]
    for g in iter_mask(amb):
        node = G.element_centralizer_mask(g) & amb
        if node not in found:
            found[node] = 1 << g
            order.append(node)

    i = 1
    while i < len(order):
        current = order[i]
        for j in range(i):
            inter = current & order[j]
            if inter not in found:
                if len(order) >= node_cap:
                    raise CapExceededError(
                        f"centralizer lattice exceeds {node_cap} nodes", partial=len(order)
                    )
                found[inter] = found[current] | found[order[j]]
                order.append(inter)
        i += 1

    for node, wit in found.items():
        if G.centralizer_mask(wit, within=amb) != node:
            raise InternalCheckError("lattice node does not match its witness centralizer")

    ranked = sorted(found, key=lambda m: (-m.bit_count(), m))
    ambient_sub = ambient if isinstance(ambient, Subgroup) else G.as_subgroup()
    lattice = CentralizerLattice(
        G,
        ambient_sub,
        tuple(Subgroup(G, m) for m in ranked),
        tuple(ElementSet(G, found[m]) for m in ranked),
    )
    G._memo[key] = lattice
    return lattice


@dataclass(frozen=True)
class ChainReport:
    """A longest strictly descending chain of centralizers.

    ``length`` counts the strict drops (at least 1 by convention), ``chain``
    lists the centralizers from the ambient subgroup down, and
    ``witness_sets[i]`` is a set whose centralizer is ``chain[i]``.
    """

    length: int
    chain: tuple[Subgroup, ...]
    witness_sets: tuple[ElementSet, ...]


def c_dimension(lattice: CentralizerLattice) -> ChainReport:
    """Extract a longest descending centralizer chain from a lattice."""
    masks = [s.members for s in lattice.nodes]
    n = len(masks)
    best = [1] * n
    back = [-1] * n
    for i in range(n):
        for j in range(i):
            if masks[i] != masks[j] and masks[i] & masks[j] == masks[i]:
                if best[j] + 1 > best[i]:
                    best[i] = best[j] + 1
                    back[i] = j
    end = max(range(n), key=lambda i: (best[i], -i))
    path = []
    while end != -1:
        path.append(end)
        end = back[end]
    path.reverse()

    G = lattice.group
    amb = lattice.ambient.members
    chain = tuple(lattice.nodes[i] for i in path)
    cumulative = []
    wit = 0
    for i in path:
        wit |= lattice.witnesses[i].members
        cumulative.append(ElementSet(G, wit))
        if G.centralizer_mask(wit, within=amb) != lattice.nodes[i].members:
            raise InternalCheckError("witness set does not cut out its chain entry")
    return ChainReport(max(1, len(path) - 1), chain, tuple(cumulative))


def dimension(ambient, node_cap: int = DEFAULT_NODE_CAP) -> int:
    """The centralizer dimension of a group or subgroup."""
    G, amb = _ambient_pair(ambient)
    key = ("dimension", amb)
    cached = G._memo.get(key)
    if cached is None:
        cached = c_dimension(centralizer_lattice(ambient, node_cap=node_cap)).length
        G._memo[key] = cached
    return cached


def greedy_witness(
    subset: ElementSet, bound: int | None = None, within: Subgroup | None = None
) -> tuple[int, ...]:
    """A short tuple of elements of ``subset`` with the same centralizer.

    Scans the subset in ascending order and keeps the elements that strictly
    shrink the running centralizer, so the result length never exceeds the
    centralizer dimension of the ambient group.  With ``bound`` set, raises
    :class:`WitnessBoundError` when the result would be longer.
    """
    G = subset.parent
    current = G.full_mask if within is None else within.members
    picked: list[int] = []
    for x in subset:
        shrunk = current & G.element_centralizer_mask(x)
        if shrunk != current:
            picked.append(x)
            current = shrunk
            if bound is not None and len(picked) > bound:
                raise WitnessBoundError(
                    f"witness for centralizer needs more than {bound} elements"
                )
    return tuple(picked)


def minimal_centralizer_above(h: ElementSet) -> tuple[Subgroup, ElementSet]:
    """The least centralizer containing ``h``, with the set it centralizes.

    The least centralizer containing H is the double centralizer C(C(H)).
    Returns that subgroup together with C(H).  Both inclusions that make it
    least are re-verified, and failure raises :class:`InternalCheckError`.
    """
    G = h.parent
    c = G.centralizer_mask(h.members)
    e1 = G.centralizer_mask(c)
    if h.members & ~e1:
        raise InternalCheckError("double centralizer lost elements of the base set")
    for g in iter_mask(c):
        if e1 & G.element_centralizer_mask(g) != e1:
            raise InternalCheckError("double centralizer is not the least one")
    return Subgroup(G, e1), ElementSet(G, c)


@dataclass(frozen=True)
class BottomChainCase:
    """How a subgroup sits at the bottom of the centralizer chain.

    Case 1: the subgroup is central.  Case 2: its centralizer properly
    contains the center, and ``witness`` is that centralizer.  Case 3: its
    centralizer is exactly the center (and then Z(H) = Z(G) meet H).
    """

    case: int
    witness: ElementSet | None


def bottom_chain_classify(h: Subgroup) -> BottomChainCase:
    """Classify a subgroup by the trichotomy at the bottom of its chain."""
    G = h.parent
    z = G.center_mask()
    if h.members & ~z == 0:
        return BottomChainCase(1, None)
    c = G.centralizer_mask(h.members)
    if c != z:
        if c & ~z == 0:
            raise InternalCheckError("centralizer of a subgroup misses the center")
        c_of_c = G.centralizer_mask(c)
        if h.members & ~c_of_c or c_of_c == G.full_mask:
            raise InternalCheckError("case 2 witness fails H <= C(A) < G")
        return BottomChainCase(2, ElementSet(G, c))
    inner_center = G.centralizer_mask(h.members, within=h.members)
    if inner_center != z & h.members:
        raise InternalCheckError("Z(H) differs from Z(G) meet H in case 3")
    return BottomChainCase(3, None)
