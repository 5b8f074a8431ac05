"""Finite groups with fast mask-based subset machinery.

Elements of a group of order n are the integers 0..n-1, with 0 always the
identity.  Subsets are represented as Python int bitmasks, so intersections
are single AND operations and membership tests are shifts.  Two backends are
supported: explicit Cayley tables and permutation groups given by generators
(which also get a table when small enough).
"""

from __future__ import annotations

import json
import random

import numpy as np

from .errors import (
    CapExceededError,
    MalformedInputError,
    NotASubgroupError,
    ParentMismatchError,
)

DEFAULT_ORDER_CAP = 100_000
TABLE_MAX_ORDER = 2048
ASSOCIATIVITY_EXHAUSTIVE_MAX = 256
ASSOCIATIVITY_SAMPLES = 20_000


def iter_mask(mask: int):
    """Yield the set bit positions of ``mask`` in ascending order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mask_of(indices) -> int:
    """Build a bitmask from an iterable of element indices."""
    mask = 0
    for i in indices:
        mask |= 1 << i
    return mask


class FiniteGroup:
    """A finite group on elements 0..order-1 with identity 0."""

    def __init__(self, order, name, kind, table, perms, perm_generators):
        self.order = order
        self.name = name
        self.kind = kind
        self._table = table
        self._perms = perms
        self._perm_generators = perm_generators
        self._perm_index = {p: i for i, p in enumerate(perms)} if perms else None
        self.full_mask = (1 << order) - 1
        self._elem_cent: list[int | None] = [None] * order
        self._memo: dict = {}
        self.inverse_table = self._build_inverses()

    # -- construction -------------------------------------------------

    @classmethod
    def from_cayley_table(cls, table, name: str = "G", validate: bool = True) -> FiniteGroup:
        """Build a group from a full multiplication table.

        The table is relabelled if needed so that the identity is element 0.
        With ``validate`` set, the table is checked to be a Latin square with
        a two-sided identity, and associativity is checked exhaustively up to
        order 256 (by random sampling above that).
        """
        if not isinstance(table, (list, tuple)) or not table:
            raise MalformedInputError("table must be a nonempty list of rows")
        n = len(table)
        rows = []
        for i, row in enumerate(table):
            if not isinstance(row, (list, tuple)) or len(row) != n:
                raise MalformedInputError(f"row {i} does not have length {n}")
            for v in row:
                if not isinstance(v, int) or isinstance(v, bool) or not 0 <= v < n:
                    raise MalformedInputError(f"row {i} contains bad entry {v!r}")
            rows.append(list(row))

        arr = np.array(rows, dtype=np.int64)
        if validate:
            expect = np.arange(n, dtype=np.int64)
            for axis, what in ((1, "row"), (0, "column")):
                ok = (np.sort(arr, axis=axis) == (expect[None, :] if axis == 1 else expect[:, None])).all()
                if not ok:
                    raise MalformedInputError(f"some {what} is not a permutation of 0..{n - 1}")

        ident = [e for e in range(n) if rows[e] == list(range(n)) and all(rows[i][e] == i for i in range(n))]
        if len(ident) != 1:
            raise MalformedInputError("table has no two-sided identity element")
        e = ident[0]
        if e != 0:
            sigma = list(range(n))
            sigma[0], sigma[e] = e, 0
            rows = [[sigma[rows[sigma[i]][sigma[j]]] for j in range(n)] for i in range(n)]
            arr = np.array(rows, dtype=np.int64)

        if validate:
            cls._check_associative(arr, n)
        interned = list(range(n))
        rows = [[interned[v] for v in row] for row in rows]
        return cls(n, name, "cayley", rows, None, None)

    @staticmethod
    def _check_associative(arr, n: int) -> None:
        if n <= ASSOCIATIVITY_EXHAUSTIVE_MAX:
            for k in range(n):
                left = arr[arr, k]
                right = arr[:, arr[:, k]]
                if not np.array_equal(left, right):
                    i, j = np.argwhere(left != right)[0]
                    raise MalformedInputError(
                        f"multiplication is not associative at ({i}, {j}, {k})"
                    )
        else:
            rng = random.Random(0xA55)
            for _ in range(ASSOCIATIVITY_SAMPLES):
                i, j, k = (rng.randrange(n) for _ in range(3))
                if arr[arr[i, j], k] != arr[i, arr[j, k]]:
                    raise MalformedInputError(
                        f"multiplication is not associative at ({i}, {j}, {k})"
                    )

    @classmethod
    def from_permutations(
        cls,
        degree: int,
        generators,
        name: str = "G",
        order_cap: int = DEFAULT_ORDER_CAP,
        table_max_order: int = TABLE_MAX_ORDER,
    ) -> FiniteGroup:
        """Build the group generated by permutations of 0..degree-1.

        Permutations compose left to right: (g * h) moves i to h[g[i]].
        Enumeration stops with :class:`CapExceededError` if the group grows
        past ``order_cap``.  A multiplication table is precomputed when the
        order is at most ``table_max_order``.
        """
        if not isinstance(degree, int) or degree < 1:
            raise MalformedInputError("degree must be a positive integer")
        gens = []
        for g in generators:
            p = tuple(g)
            if len(p) != degree or sorted(p) != list(range(degree)):
                raise MalformedInputError(f"{g!r} is not a permutation of 0..{degree - 1}")
            gens.append(p)

        identity = tuple(range(degree))
        perms = [identity]
        index = {identity: 0}
        frontier = [identity]
        while frontier:
            nxt = []
            for p in frontier:
                for s in gens:
                    q = tuple(s[v] for v in p)
                    if q not in index:
                        if len(perms) >= order_cap:
                            raise CapExceededError(
                                f"group order exceeds cap {order_cap}", partial=len(perms)
                            )
                        index[q] = len(perms)
                        perms.append(q)
                        nxt.append(q)
            frontier = nxt

        n = len(perms)
        table = None
        if n <= table_max_order:
            interned = list(range(n))
            table = [
                [interned[index[tuple(q[v] for v in p)]] for q in perms]
                for p in perms
            ]
        return cls(n, name, "perm", table, tuple(perms), tuple(gens))

    def _build_inverses(self) -> list[int]:
        if self._perms is not None:
            out = []
            for p in self._perms:
                inv = [0] * len(p)
                for i, v in enumerate(p):
                    inv[v] = i
                out.append(self._perm_index[tuple(inv)])
            return out
        table = self._table
        inv = [-1] * self.order
        for i in range(self.order):
            inv[i] = table[i].index(0)
        return inv

    # -- the operations -----------------------------------------------

    def _mul(self, a: int, b: int) -> int:
        if self._table is not None:
            return self._table[a][b]
        p, q = self._perms[a], self._perms[b]
        return self._perm_index[tuple(q[v] for v in p)]

    def _inv(self, a: int) -> int:
        return self.inverse_table[a]

    def _conj(self, g: int, h: int) -> int:
        """g conjugated by h, that is h^-1 * g * h."""
        return self._mul(self._mul(self.inverse_table[h], g), h)

    def _comm(self, g: int, h: int) -> int:
        """The commutator g^-1 * h^-1 * g * h."""
        return self._mul(self.inverse_table[self._mul(h, g)], self._mul(g, h))

    def _check_index(self, a: int) -> None:
        if not isinstance(a, int) or isinstance(a, bool) or not 0 <= a < self.order:
            raise MalformedInputError(f"{a!r} is not an element index of {self.name}")

    def mul(self, a: int, b: int) -> int:
        self._check_index(a)
        self._check_index(b)
        return self._mul(a, b)

    def inv(self, a: int) -> int:
        self._check_index(a)
        return self.inverse_table[a]

    def conj(self, g: int, h: int) -> int:
        self._check_index(g)
        self._check_index(h)
        return self._conj(g, h)

    def comm(self, g: int, h: int) -> int:
        self._check_index(g)
        self._check_index(h)
        return self._comm(g, h)

    # -- masks ----------------------------------------------------------

    def element_centralizer_mask(self, g: int) -> int:
        """Mask of all x with x * g == g * x."""
        cached = self._elem_cent[g]
        if cached is None:
            cached = 0
            for x in range(self.order):
                if self._mul(x, g) == self._mul(g, x):
                    cached |= 1 << x
            self._elem_cent[g] = cached
        return cached

    def center_mask(self) -> int:
        cached = self._memo.get("center")
        if cached is None:
            cached = self.full_mask
            for g in range(self.order):
                cached &= self.element_centralizer_mask(g)
                if cached == 1:
                    break
            self._memo["center"] = cached
        return cached

    def centralizer_mask(self, setmask: int, within: int | None = None) -> int:
        """Mask of elements of ``within`` commuting with everything in ``setmask``."""
        result = self.full_mask if within is None else within
        for g in iter_mask(setmask):
            result &= self.element_centralizer_mask(g)
        return result

    def normalizer_mask(self, mask: int) -> int:
        """Mask of all g with (mask conjugated by g) == mask."""
        key = ("norm", mask)
        cached = self._memo.get(key)
        if cached is None:
            members = list(iter_mask(mask))
            cached = 0
            for g in range(self.order):
                if all(mask >> self._conj(x, g) & 1 for x in members):
                    cached |= 1 << g
            self._memo[key] = cached
        return cached

    def conjugate_mask(self, mask: int, g: int) -> int:
        out = 0
        for x in iter_mask(mask):
            out |= 1 << self._conj(x, g)
        return out

    def closure_mask(self, seedmask: int) -> int:
        """Mask of the subgroup generated by the elements of ``seedmask``."""
        key = ("closure", seedmask)
        cached = self._memo.get(key)
        if cached is None:
            gens = list(iter_mask(seedmask))
            cached = 1
            frontier = [0]
            while frontier:
                nxt = []
                for x in frontier:
                    for s in gens:
                        y = self._mul(x, s)
                        if not cached >> y & 1:
                            cached |= 1 << y
                            nxt.append(y)
                frontier = nxt
            self._memo[key] = cached
        return cached

    # -- subgroup conveniences -------------------------------------------

    def subgroup(self, elements, check: bool = True) -> Subgroup:
        """Wrap an iterable of element indices as a subgroup, validating it."""
        for x in elements:
            self._check_index(x)
        sub = Subgroup(self, mask_of(elements) | 1)
        if check:
            sub.validate()
        return sub

    def subgroup_from_generators(self, generators) -> Subgroup:
        for x in generators:
            self._check_index(x)
        return Subgroup(self, self.closure_mask(mask_of(generators)))

    def as_subgroup(self) -> Subgroup:
        return Subgroup(self, self.full_mask)

    def trivial_subgroup(self) -> Subgroup:
        return Subgroup(self, 1)

    def center(self) -> Subgroup:
        return Subgroup(self, self.center_mask())

    @property
    def is_abelian(self) -> bool:
        return self.center_mask() == self.full_mask

    def __repr__(self) -> str:
        return f"<FiniteGroup {self.name!r} of order {self.order}>"


class ElementSet:
    """An arbitrary subset of a group, stored as a bitmask."""

    __slots__ = ("parent", "members")

    def __init__(self, parent: FiniteGroup, members: int) -> None:
        self.parent = parent
        self.members = members

    def __len__(self) -> int:
        return self.members.bit_count()

    def __contains__(self, x: int) -> bool:
        return 0 <= x < self.parent.order and bool(self.members >> x & 1)

    def __iter__(self):
        return iter_mask(self.members)

    @property
    def elements(self) -> tuple[int, ...]:
        return tuple(iter_mask(self.members))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ElementSet)
            and self.parent is other.parent
            and self.members == other.members
        )

    def __hash__(self) -> int:
        return hash((id(self.parent), self.members))

    def __repr__(self) -> str:
        shown = self.elements
        body = ", ".join(map(str, shown[:12])) + (", ..." if len(shown) > 12 else "")
        return f"<{type(self).__name__} {{{body}}} in {self.parent.name}>"


class Subgroup(ElementSet):
    """A subgroup of a group, stored as a bitmask over the parent."""

    __slots__ = ("_gens",)

    def __init__(self, parent: FiniteGroup, members: int) -> None:
        if not members & 1:
            raise NotASubgroupError("subgroup mask must contain the identity")
        super().__init__(parent, members)
        self._gens: tuple[int, ...] | None = None

    @property
    def order(self) -> int:
        return self.members.bit_count()

    @property
    def generators(self) -> tuple[int, ...]:
        """A generating set, found by a greedy ascending scan."""
        if self._gens is None:
            gens: list[int] = []
            reached = 1
            for x in iter_mask(self.members):
                if not reached >> x & 1:
                    gens.append(x)
                    reached = self.parent.closure_mask(mask_of(gens))
                    if reached == self.members:
                        break
            self._gens = tuple(gens)
        return self._gens

    def validate(self) -> None:
        """Raise :class:`NotASubgroupError` unless closed under the operations."""
        G = self.parent
        elems = self.elements
        for a in elems:
            if not self.members >> G.inverse_table[a] & 1:
                raise NotASubgroupError(f"set is not closed under inverse of {a}")
            for b in elems:
                if not self.members >> G._mul(a, b) & 1:
                    raise NotASubgroupError(f"set is not closed under product {a} * {b}")

    def conjugate_by(self, g: int) -> Subgroup:
        self.parent._check_index(g)
        return Subgroup(self.parent, self.parent.conjugate_mask(self.members, g))

    def is_normalized_by(self, elements) -> bool:
        return all(
            self.parent.conjugate_mask(self.members, g) == self.members for g in elements
        )

    @property
    def is_normal(self) -> bool:
        return self.parent.normalizer_mask(self.members) == self.parent.full_mask


def is_subgroup_mask(parent: FiniteGroup, mask: int) -> bool:
    """Check that a nonempty mask is closed under multiplication."""
    if not mask & 1:
        return False
    elems = list(iter_mask(mask))
    for a in elems:
        for b in elems:
            if not mask >> parent._mul(a, b) & 1:
                return False
    return True


def closure(parent: FiniteGroup, seed) -> Subgroup:
    """The subgroup generated by an iterable of element indices."""
    return parent.subgroup_from_generators(seed)


def commutator_subgroup(first: ElementSet, second: ElementSet) -> Subgroup:
    """The subgroup generated by all commutators [a, b], a in first, b in second."""
    if first.parent is not second.parent:
        raise ParentMismatchError("commutator of sets in different groups")
    G = first.parent
    a_mask, b_mask = first.members, second.members
    key = ("commsub", min(a_mask, b_mask), max(a_mask, b_mask))
    cached = G._memo.get(key)
    if cached is None:
        seed = 0
        for a in iter_mask(a_mask):
            for b in iter_mask(b_mask):
                seed |= 1 << G._comm(a, b)
        cached = G.closure_mask(seed)
        G._memo[key] = cached
    return Subgroup(G, cached)


def normalizer(subset: ElementSet) -> Subgroup:
    return Subgroup(subset.parent, subset.parent.normalizer_mask(subset.members))


def normal_closure(parent: FiniteGroup, g: int) -> Subgroup:
    """The smallest normal subgroup containing g."""
    parent._check_index(g)
    key = ("ncl", g)
    cached = parent._memo.get(key)
    if cached is None:
        orbit = 0
        for h in range(parent.order):
            orbit |= 1 << parent._conj(g, h)
        cached = parent.closure_mask(orbit)
        parent._memo[key] = cached
    return Subgroup(parent, cached)


def product_set(first: Subgroup, second: Subgroup) -> Subgroup:
    """The product AB of two subgroups, if it is itself a subgroup.

    AB is a subgroup exactly when AB == BA as sets; otherwise
    :class:`NotASubgroupError` is raised.
    """
    if first.parent is not second.parent:
        raise ParentMismatchError("product of subgroups of different groups")
    G = first.parent
    ab = 0
    for a in first:
        for b in second:
            ab |= 1 << G._mul(a, b)
    ba = 0
    for b in second:
        for a in first:
            ba |= 1 << G._mul(b, a)
    if ab != ba:
        raise NotASubgroupError("product set AB differs from BA, so AB is not a subgroup")
    out = Subgroup(G, ab)
    out._gens = tuple(dict.fromkeys(first.generators + second.generators))
    return out


def hall_witt_products(G: FiniteGroup, x: int, y: int, z: int) -> tuple[int, int]:
    """Both Hall-Witt triple products; each equals the identity in any group.

    The first is [x, y^-1, z]^y * [y, z^-1, x]^z * [z, x^-1, y]^x and the
    second is [x, y, z^x] * [z, x, y^z] * [y, z, x^y], where [a, b, c] means
    [[a, b], c].
    """
    for a in (x, y, z):
        G._check_index(a)
    inv, comm, conj, mul = G._inv, G._comm, G._conj, G._mul

    def triple(a, b, c):
        return comm(comm(a, b), c)

    first = mul(
        mul(conj(triple(x, inv(y), z), y), conj(triple(y, inv(z), x), z)),
        conj(triple(z, inv(x), y), x),
    )
    second = mul(
        mul(triple(x, y, conj(z, x)), triple(z, x, conj(y, z))),
        triple(y, z, conj(x, y)),
    )
    return first, second


# -- serialization ------------------------------------------------------


def group_to_dict(G: FiniteGroup) -> dict:
    if G.kind == "perm":
        return {
            "kind": "perm",
            "name": G.name,
            "degree": len(G._perms[0]),
            "generators": [list(p) for p in G._perm_generators],
        }
    return {"kind": "cayley", "name": G.name, "order": G.order, "table": G._table}


def group_from_dict(data: dict, order_cap: int = DEFAULT_ORDER_CAP) -> FiniteGroup:
    if not isinstance(data, dict) or "kind" not in data:
        raise MalformedInputError("group description must be a dict with a 'kind' key")
    kind = data["kind"]
    name = data.get("name", "G")
    if kind == "cayley":
        if "table" not in data:
            raise MalformedInputError("cayley group description needs a 'table'")
        return FiniteGroup.from_cayley_table(data["table"], name=name)
    if kind == "perm":
        if "degree" not in data or "generators" not in data:
            raise MalformedInputError("perm group description needs 'degree' and 'generators'")
        return FiniteGroup.from_permutations(
            data["degree"], data["generators"], name=name, order_cap=order_cap
        )
    raise MalformedInputError(f"unknown group kind {kind!r}")


def load_group(path, order_cap: int = DEFAULT_ORDER_CAP) -> FiniteGroup:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise MalformedInputError(f"{path} is not valid JSON: {exc}") from exc
    return group_from_dict(data, order_cap=order_cap)


def save_group(G: FiniteGroup, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(group_to_dict(G), fh)
        fh.write("\n")


def subgroup_to_dict(S: Subgroup) -> dict:
    G = S.parent
    if G.kind == "perm":
        return {"generators": [list(G._perms[g]) for g in S.generators]}
    return {"generators": list(S.generators)}


def subgroup_from_dict(parent: FiniteGroup, data: dict) -> Subgroup:
    if not isinstance(data, dict) or "generators" not in data:
        raise MalformedInputError("subgroup description must be a dict with 'generators'")
    gens = []
    for spec in data["generators"]:
        if isinstance(spec, int) and not isinstance(spec, bool):
            parent._check_index(spec)
            gens.append(spec)
        elif isinstance(spec, list):
            if parent.kind != "perm":
                raise MalformedInputError("image-array generators need a permutation group")
            idx = parent._perm_index.get(tuple(spec))
            if idx is None:
                raise MalformedInputError(f"{spec!r} is not an element of {parent.name}")
            gens.append(idx)
        else:
            raise MalformedInputError(f"bad generator spec {spec!r}")
    return parent.subgroup_from_generators(gens)
