"""Group construction, subset machinery, and serialization."""

from __future__ import annotations

import random

import pytest

from nilenv.catalog import cyclic, dihedral, from_spec, quaternion, symmetric, unitriangular
from nilenv.errors import (
    CapExceededError,
    MalformedInputError,
    NotASubgroupError,
    ParentMismatchError,
)
from nilenv.groups import (
    ElementSet,
    FiniteGroup,
    Subgroup,
    closure,
    commutator_subgroup,
    group_from_dict,
    group_to_dict,
    hall_witt_products,
    load_group,
    mask_of,
    normal_closure,
    normalizer,
    product_set,
    save_group,
    subgroup_from_dict,
    subgroup_to_dict,
)

# A Latin square of order 5 with identity 0 that is not associative: the
# only group of order 5 is cyclic, and here 1 * 1 = 0 gives an element of
# order 2, which 5 does not allow.
NONASSOCIATIVE_TABLE = [
    [0, 1, 2, 3, 4],
    [1, 0, 3, 4, 2],
    [2, 3, 4, 0, 1],
    [3, 4, 1, 2, 0],
    [4, 2, 0, 1, 3],
]


def element_order(G: FiniteGroup, g: int) -> int:
    k, x = 1, g
    while x != 0:
        x = G.mul(x, g)
        k += 1
    return k


def brute_closure(G: FiniteGroup, seed) -> set[int]:
    got = {0, *seed}
    while True:
        more = {G.mul(a, b) for a in got for b in got} | {G.inv(a) for a in got}
        if more <= got:
            return got
        got |= more


def test_identity_is_relabelled_to_zero():
    # cyclic of order 3 written with identity at index 2
    table = [[1, 2, 0], [2, 0, 1], [0, 1, 2]]
    G = FiniteGroup.from_cayley_table(table)
    assert G.order == 3
    assert all(G.mul(0, j) == j and G.mul(j, 0) == j for j in range(3))
    assert element_order(G, 1) == 3


def test_bad_tables_are_rejected():
    with pytest.raises(MalformedInputError):
        FiniteGroup.from_cayley_table([])
    with pytest.raises(MalformedInputError):
        FiniteGroup.from_cayley_table([[0, 1], [1]])
    with pytest.raises(MalformedInputError):
        FiniteGroup.from_cayley_table([[0, 1], [1, 2]])
    with pytest.raises(MalformedInputError):
        FiniteGroup.from_cayley_table([[0, 0], [1, 1]])
    # Latin square whose only left identity is not a right identity
    with pytest.raises(MalformedInputError):
        FiniteGroup.from_cayley_table([[0, 1, 2], [2, 0, 1], [1, 2, 0]])


def test_nonassociative_table_names_a_triple():
    with pytest.raises(MalformedInputError, match=r"not associative at \(\d+, \d+, \d+\)"):
        FiniteGroup.from_cayley_table(NONASSOCIATIVE_TABLE)


def test_permutation_group_construction():
    G = FiniteGroup.from_permutations(3, [[1, 0, 2], [1, 2, 0]])
    assert G.order == 6
    assert G.kind == "perm"
    assert sorted(element_order(G, g) for g in range(6)) == [1, 2, 2, 2, 3, 3]


def test_permutation_order_cap():
    with pytest.raises(CapExceededError) as excinfo:
        FiniteGroup.from_permutations(4, [[1, 0, 2, 3], [1, 2, 3, 0]], order_cap=10)
    assert excinfo.value.partial == 10


def test_bad_permutations_are_rejected():
    with pytest.raises(MalformedInputError):
        FiniteGroup.from_permutations(3, [[0, 0, 1]])
    with pytest.raises(MalformedInputError):
        FiniteGroup.from_permutations(3, [[1, 0]])
    with pytest.raises(MalformedInputError):
        FiniteGroup.from_permutations(0, [])


def test_cayley_and_permutation_dihedral_agree():
    table_version = dihedral(4)
    perm_version = FiniteGroup.from_permutations(4, [[1, 2, 3, 0], [3, 2, 1, 0]])
    assert perm_version.order == table_version.order == 8
    assert perm_version.center().order == table_version.center().order == 2
    for G in (table_version, perm_version):
        assert sorted(element_order(G, g) for g in range(8)) == [1, 2, 2, 2, 2, 2, 4, 4]


def test_element_index_checks():
    G = symmetric(3)
    with pytest.raises(MalformedInputError):
        G.mul(0, 6)
    with pytest.raises(MalformedInputError):
        G.inv(-1)
    with pytest.raises(MalformedInputError):
        G.subgroup_from_generators([2, 99])
    with pytest.raises(MalformedInputError):
        G.mul(True, 0)


def test_inverses_and_commutators():
    rng = random.Random(7)
    for G in (symmetric(4), quaternion(), unitriangular(3)):
        for _ in range(50):
            a, b = rng.randrange(G.order), rng.randrange(G.order)
            assert G.mul(a, G.inv(a)) == 0
            assert G.mul(G.inv(a), a) == 0
            lhs = G.mul(G.mul(G.mul(G.inv(a), G.inv(b)), a), b)
            assert G.comm(a, b) == lhs
            assert G.conj(a, b) == G.mul(G.mul(G.inv(b), a), b)


def test_closure_against_brute_force():
    rng = random.Random(11)
    G = symmetric(4)
    for _ in range(20):
        seed = [rng.randrange(G.order) for _ in range(rng.randint(1, 3))]
        sub = closure(G, seed)
        assert set(sub.elements) == brute_closure(G, seed)


def test_subgroup_basics():
    G = dihedral(4)
    rotations = closure(G, [1])
    assert rotations.order == 4
    assert rotations.elements == (0, 1, 2, 3)
    assert 2 in rotations
    assert 5 not in rotations
    assert rotations.is_normal
    assert len(list(iter(rotations))) == 4
    regenerated = G.subgroup_from_generators(rotations.generators)
    assert regenerated == rotations
    assert hash(regenerated) == hash(rotations)


def test_subgroup_validation():
    G = symmetric(3)
    three_cycle = next(g for g in range(6) if element_order(G, g) == 3)
    with pytest.raises(NotASubgroupError):
        G.subgroup([0, three_cycle])
    assert G.subgroup([0, three_cycle], check=False).order == 2


def test_commutator_subgroup_oracles():
    D8 = dihedral(4)
    derived = commutator_subgroup(D8.as_subgroup(), D8.as_subgroup())
    assert derived.members == D8.center_mask()

    S3 = symmetric(3)
    derived = commutator_subgroup(S3.as_subgroup(), S3.as_subgroup())
    assert derived.order == 3
    assert all(element_order(S3, g) in (1, 3) for g in derived)


def test_commutator_subgroup_parent_mismatch():
    with pytest.raises(ParentMismatchError):
        commutator_subgroup(symmetric(3).as_subgroup(), dihedral(4).as_subgroup())


def test_product_set():
    S3 = symmetric(3)
    a3 = commutator_subgroup(S3.as_subgroup(), S3.as_subgroup())
    flips = [g for g in range(6) if element_order(S3, g) == 2]
    whole = product_set(a3, closure(S3, [flips[0]]))
    assert whole.members == S3.full_mask
    with pytest.raises(NotASubgroupError):
        product_set(closure(S3, [flips[0]]), closure(S3, [flips[1]]))


def test_product_set_generators_have_no_duplicates():
    G = dihedral(4)
    rotations = closure(G, [1])
    again = product_set(rotations, rotations)
    assert again == rotations
    assert len(set(again.generators)) == len(again.generators)
    assert closure(G, again.generators) == rotations


def test_normalizer_and_normal_closure():
    S3 = symmetric(3)
    flips = [g for g in range(6) if element_order(S3, g) == 2]
    three_cycles = [g for g in range(6) if element_order(S3, g) == 3]
    assert normalizer(closure(S3, [three_cycles[0]])).members == S3.full_mask
    assert normalizer(closure(S3, [flips[0]])).order == 2
    assert normal_closure(S3, flips[0]).members == S3.full_mask
    assert normal_closure(S3, three_cycles[0]).order == 3


def test_conjugate_subgroups():
    S3 = symmetric(3)
    flips = [g for g in range(6) if element_order(S3, g) == 2]
    sub = closure(S3, [flips[0]])
    images = {sub.conjugate_by(g).members for g in range(6)}
    assert len(images) == 3
    assert all(Subgroup(S3, m).order == 2 for m in images)
    assert not sub.is_normal


def test_hall_witt_products_vanish():
    rng = random.Random(23)
    for G in (symmetric(4), quaternion(), dihedral(6)):
        for _ in range(100):
            x, y, z = (rng.randrange(G.order) for _ in range(3))
            assert hall_witt_products(G, x, y, z) == (0, 0)
    assert hall_witt_products(symmetric(3), 0, 0, 0) == (0, 0)


def test_element_set_behavior():
    G = quaternion()
    s = ElementSet(G, mask_of([1, 4, 6]))
    assert len(s) == 3
    assert list(s) == [1, 4, 6]
    assert s.elements == (1, 4, 6)
    assert 4 in s and 5 not in s
    assert s == ElementSet(G, mask_of([1, 4, 6]))
    assert s != ElementSet(G, mask_of([1, 4]))
    assert s != ElementSet(symmetric(3), mask_of([1, 4]))


def test_center_of_unitriangular():
    for p in (2, 3):
        G = unitriangular(p)
        center = G.center()
        assert center.order == p
        assert center.elements == tuple(b * p for b in range(p))


def test_group_dict_round_trip():
    for G in (quaternion(), symmetric(3)):
        data = group_to_dict(G)
        H = group_from_dict(data)
        assert H.order == G.order
        assert H.kind == G.kind
        rng = random.Random(3)
        for _ in range(30):
            a, b = rng.randrange(G.order), rng.randrange(G.order)
            assert H.mul(a, b) == G.mul(a, b)


def test_group_dict_rejects_junk():
    with pytest.raises(MalformedInputError):
        group_from_dict([1, 2, 3])
    with pytest.raises(MalformedInputError):
        group_from_dict({"kind": "sporadic"})
    with pytest.raises(MalformedInputError):
        group_from_dict({"kind": "cayley"})
    with pytest.raises(MalformedInputError):
        group_from_dict({"kind": "perm", "degree": 3})


def test_group_file_round_trip(tmp_path):
    G = dihedral(4)
    path = tmp_path / "d8.json"
    save_group(G, path)
    H = load_group(path)
    assert H.order == 8
    assert H.name == G.name
    assert H.center().order == 2

    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    with pytest.raises(MalformedInputError):
        load_group(bad)


def test_subgroup_dict_round_trip():
    D8 = dihedral(4)
    rotations = closure(D8, [1])
    data = subgroup_to_dict(rotations)
    assert data == {"generators": [1]}
    assert subgroup_from_dict(D8, data) == rotations

    S4 = symmetric(4)
    doubles = [g for g in range(24) if element_order(S4, g) == 2 and normal_closure(S4, g).order == 4]
    klein = closure(S4, doubles)
    assert klein.order == 4
    data = subgroup_to_dict(klein)
    assert all(isinstance(spec, list) for spec in data["generators"])
    assert subgroup_from_dict(S4, data) == klein

    with pytest.raises(MalformedInputError):
        subgroup_from_dict(S4, {"generators": [[0, 0, 1, 2]]})
    with pytest.raises(MalformedInputError):
        subgroup_from_dict(D8, {"generators": [[0, 1]]})
    with pytest.raises(MalformedInputError):
        subgroup_from_dict(D8, {"elements": [0, 1]})


def test_from_spec_round_trips_and_caches():
    G = from_spec("product(dihedral(4), symmetric(3))")
    assert G.order == 48
    assert G is from_spec("product(dihedral(4), symmetric(3))")
    assert from_spec("quaternion") is from_spec("quaternion")
    with pytest.raises(MalformedInputError):
        from_spec("symmetric(3) trailing")
    with pytest.raises(MalformedInputError):
        from_spec("symmetric(")
    with pytest.raises(MalformedInputError):
        from_spec("frobnicated(3)")
