"""Built-in families of small groups, addressable by spec strings.

A spec string names a constructor and its arguments, for example
``"cyclic(12)"``, ``"quaternion"``, or ``"product(dihedral(4), symmetric(3))"``.
Specs can nest, and :func:`from_spec` caches the built groups so repeated
lookups share element indexing and memoized computations.
"""

from __future__ import annotations

from functools import lru_cache

from .errors import CapExceededError, MalformedInputError
from .groups import TABLE_MAX_ORDER, FiniteGroup


def cyclic(n: int) -> FiniteGroup:
    """The cyclic group of order n."""
    if n < 1:
        raise MalformedInputError("cyclic order must be at least 1")
    table = [[(i + j) % n for j in range(n)] for i in range(n)]
    return FiniteGroup.from_cayley_table(table, name=f"cyclic({n})", validate=False)


def dihedral(n: int) -> FiniteGroup:
    """The dihedral group of order 2n, symmetries of a regular n-gon.

    Element e*n + i stands for r^i s^e, where r is the rotation and s a
    reflection, so s * r^i * s == r^-i.
    """
    if n < 1:
        raise MalformedInputError("dihedral argument must be at least 1")
    table = [[0] * (2 * n) for _ in range(2 * n)]
    for e1 in (0, 1):
        for i1 in range(n):
            for e2 in (0, 1):
                for i2 in range(n):
                    i = (i1 + (i2 if e1 == 0 else -i2)) % n
                    table[e1 * n + i1][e2 * n + i2] = (e1 ^ e2) * n + i
    return FiniteGroup.from_cayley_table(table, name=f"dihedral({n})", validate=False)


def symmetric(n: int) -> FiniteGroup:
    """The symmetric group on n points."""
    if n < 1:
        raise MalformedInputError("symmetric degree must be at least 1")
    gens = []
    if n >= 2:
        gens.append([1, 0] + list(range(2, n)))
    if n >= 3:
        gens.append(list(range(1, n)) + [0])
    return FiniteGroup.from_permutations(n, gens, name=f"symmetric({n})")


def alternating(n: int) -> FiniteGroup:
    """The alternating group on n points, generated by consecutive 3-cycles."""
    if n < 1:
        raise MalformedInputError("alternating degree must be at least 1")
    gens = []
    for i in range(n - 2):
        # the 3-cycle sending i -> i+1 -> i+2 -> i
        cycle = list(range(n))
        cycle[i], cycle[i + 1], cycle[i + 2] = cycle[i + 1], cycle[i + 2], cycle[i]
        gens.append(cycle)
    return FiniteGroup.from_permutations(max(n, 1), gens, name=f"alternating({n})")


def quaternion() -> FiniteGroup:
    """The quaternion group of order 8 on the units +-1, +-i, +-j, +-k."""
    units = {
        (0, 0): (0, 0), (0, 1): (0, 1), (0, 2): (0, 2), (0, 3): (0, 3),
        (1, 0): (0, 1), (1, 1): (1, 0), (1, 2): (0, 3), (1, 3): (1, 2),
        (2, 0): (0, 2), (2, 1): (1, 3), (2, 2): (1, 0), (2, 3): (0, 1),
        (3, 0): (0, 3), (3, 1): (0, 2), (3, 2): (1, 1), (3, 3): (1, 0),
    }
    table = [[0] * 8 for _ in range(8)]
    for s1 in (0, 1):
        for u1 in range(4):
            for s2 in (0, 1):
                for u2 in range(4):
                    s, u = units[(u1, u2)]
                    table[s1 * 4 + u1][s2 * 4 + u2] = ((s1 ^ s2 ^ s) * 4) + u
    return FiniteGroup.from_cayley_table(table, name="quaternion", validate=False)


def unitriangular(p: int) -> FiniteGroup:
    """Upper unitriangular 3x3 matrices over the field with p elements.

    The matrix with top row (1, a, b) and middle row (0, 1, c) is encoded
    as a*p*p + b*p + c, so the group has order p**3 and class 2.
    """
    if p < 2 or any(p % q == 0 for q in range(2, p)):
        raise MalformedInputError("unitriangular argument must be a prime")
    n = p * p * p
    table = [[0] * n for _ in range(n)]
    for a1 in range(p):
        for b1 in range(p):
            for c1 in range(p):
                row = table[a1 * p * p + b1 * p + c1]
                for a2 in range(p):
                    for b2 in range(p):
                        for c2 in range(p):
                            a = (a1 + a2) % p
                            b = (b1 + b2 + a1 * c2) % p
                            c = (c1 + c2) % p
                            row[a2 * p * p + b2 * p + c2] = a * p * p + b * p + c
    return FiniteGroup.from_cayley_table(table, name=f"unitriangular({p})", validate=False)


def direct_product(G: FiniteGroup, H: FiniteGroup) -> FiniteGroup:
    """The direct product, with (g, h) encoded as g * H.order + h."""
    n = G.order * H.order
    if n > TABLE_MAX_ORDER:
        raise CapExceededError(
            f"direct product order {n} exceeds table limit {TABLE_MAX_ORDER}", partial=n
        )
    m = H.order
    table = [[0] * n for _ in range(n)]
    for g1 in range(G.order):
        for h1 in range(m):
            row = table[g1 * m + h1]
            for g2 in range(G.order):
                gm = G._mul(g1, g2) * m
                for h2 in range(m):
                    row[g2 * m + h2] = gm + H._mul(h1, h2)
    return FiniteGroup.from_cayley_table(
        table, name=f"product({G.name},{H.name})", validate=False
    )


_SIMPLE_BUILDERS = {
    "cyclic": cyclic,
    "dihedral": dihedral,
    "symmetric": symmetric,
    "alternating": alternating,
    "unitriangular": unitriangular,
}


def _parse_spec(text: str, pos: int) -> tuple[FiniteGroup, int]:
    while pos < len(text) and text[pos].isspace():
        pos += 1
    start = pos
    while pos < len(text) and text[pos].isalpha():
        pos += 1
    name = text[start:pos]
    if not name:
        raise MalformedInputError(f"expected a group name at position {start} of {text!r}")
    while pos < len(text) and text[pos].isspace():
        pos += 1

    if name == "quaternion":
        return quaternion(), pos

    if pos >= len(text) or text[pos] != "(":
        raise MalformedInputError(f"group {name!r} needs arguments, as in {name}(...)")
    pos += 1

    if name == "product":
        factors = []
        while True:
            factor, pos = _parse_spec(text, pos)
            factors.append(factor)
            while pos < len(text) and text[pos].isspace():
                pos += 1
            if pos < len(text) and text[pos] == ",":
                pos += 1
                continue
            break
        if pos >= len(text) or text[pos] != ")":
            raise MalformedInputError(f"unclosed product(...) in {text!r}")
        if len(factors) < 2:
            raise MalformedInputError("product(...) needs at least two factors")
        built = factors[0]
        for factor in factors[1:]:
            built = direct_product(built, factor)
        return built, pos + 1

    if name not in _SIMPLE_BUILDERS:
        raise MalformedInputError(f"unknown group family {name!r}")
    while pos < len(text) and text[pos].isspace():
        pos += 1
    start = pos
    while pos < len(text) and text[pos].isdigit():
        pos += 1
    if start == pos:
        raise MalformedInputError(f"{name}(...) needs an integer argument")
    arg = int(text[start:pos])
    while pos < len(text) and text[pos].isspace():
        pos += 1
    if pos >= len(text) or text[pos] != ")":
        raise MalformedInputError(f"unclosed {name}(...) in {text!r}")
    return _SIMPLE_BUILDERS[name](arg), pos + 1


@lru_cache(maxsize=None)
def from_spec(spec: str) -> FiniteGroup:
    """Build (or fetch the cached copy of) the group a spec string names."""
    built, pos = _parse_spec(spec, 0)
    if spec[pos:].strip():
        raise MalformedInputError(f"trailing text {spec[pos:]!r} after group spec")
    return built


DEFAULT_CATALOG: tuple[str, ...] = (
    "cyclic(1)",
    "cyclic(2)",
    "cyclic(6)",
    "cyclic(12)",
    "product(cyclic(2),cyclic(2))",
    "product(cyclic(2),cyclic(4))",
    "dihedral(4)",
    "dihedral(6)",
    "dihedral(8)",
    "quaternion",
    "symmetric(3)",
    "symmetric(4)",
    "alternating(4)",
    "alternating(5)",
    "unitriangular(2)",
    "unitriangular(3)",
    "unitriangular(5)",
    "product(dihedral(4),symmetric(3))",
    "unitriangular(7)",
)
