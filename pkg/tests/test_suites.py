"""Tests for the property-suite runner, subgroup pools, and failure replay."""

from __future__ import annotations

import json
from dataclasses import replace

import pytest

from nilenv.catalog import from_spec
from nilenv.errors import MalformedInputError
from nilenv.suites import (
    ALL_SUITES,
    Failure,
    GroupContext,
    SuiteConfig,
    all_subgroups,
    build_contexts,
    replay_failure,
    run_suite,
    run_suites,
    sample_subgroups,
)

SMALL_CONFIG = SuiteConfig(
    groups=("symmetric(3)", "dihedral(4)"),
    hallwitt_triples=40,
    threesubgroup_target=60,
    bryant_target=60,
    nested_target=60,
    samples_per_group=30,
    envelope_samples=6,
)

SUBGROUP_COUNTS = {
    "symmetric(3)": 6,
    "dihedral(4)": 10,
    "quaternion": 6,
    "alternating(4)": 10,
    "symmetric(4)": 30,
    "alternating(5)": 59,
    "unitriangular(3)": 19,
    "dihedral(8)": 19,
    "product(dihedral(4), symmetric(3))": 120,
}


def is_cyclic(sub):
    G = sub.parent
    return any(G.closure_mask(1 << g | 1) == sub.members for g in sub.elements)


def test_all_suites_names():
    assert ALL_SUITES == (
        "hallwitt",
        "threesubgroup",
        "hall",
        "bryant",
        "nested",
        "bottomchain",
        "dimension",
        "envelope",
        "formula",
        "fitting",
    )
    assert SuiteConfig().suites == ALL_SUITES


def test_all_subgroups_counts():
    for spec, count in SUBGROUP_COUNTS.items():
        assert len(all_subgroups(from_spec(spec))) == count


def test_all_subgroups_sorted_unique_and_closed():
    G = from_spec("symmetric(4)")
    subs = all_subgroups(G)
    members = [s.members for s in subs]
    assert len(set(members)) == len(members)
    keys = [(s.order, s.members) for s in subs]
    assert keys == sorted(keys)
    assert subs[0].order == 1 and subs[-1].order == G.order
    for s in subs:
        assert G.closure_mask(s.members) == s.members


def test_sample_subgroups_covers_basic_shapes():
    G = from_spec("symmetric(4)")
    sample = sample_subgroups(G, 50, 0)
    assert any(s.order == 1 for s in sample)
    assert any(s.order > 1 and is_cyclic(s) for s in sample)
    assert any(not is_cyclic(s) for s in sample)
    assert sample_subgroups(G, 0, 0) == []


def test_sample_subgroups_deterministic():
    G = from_spec("symmetric(4)")
    first = [s.members for s in sample_subgroups(G, 40, 7)]
    second = [s.members for s in sample_subgroups(G, 40, 7)]
    assert first == second
    from nilenv.catalog import symmetric

    fresh = [s.members for s in sample_subgroups(symmetric(4), 40, 7)]
    assert fresh == first


def test_group_context_exhaustive():
    G = from_spec("symmetric(4)")
    ctx = GroupContext("symmetric(4)", G, SuiteConfig())
    assert ctx.exhaustive
    assert ctx.subgroups == all_subgroups(G)
    assert set(ctx.nilpotent) <= set(ctx.subgroups)
    assert ctx.dimension == 4
    assert ctx.envelope_pool(SuiteConfig()) == ctx.nilpotent


def test_group_context_sampled():
    G = from_spec("unitriangular(7)")
    config = SuiteConfig(samples_per_group=40, envelope_samples=5)
    ctx = GroupContext("unitriangular(7)", G, config)
    assert not ctx.exhaustive
    assert ctx.subgroups[0].order == 1
    assert ctx.subgroups[-1].order == G.order
    keys = [(s.order, s.members) for s in ctx.subgroups]
    assert keys == sorted(keys)
    pool = ctx.envelope_pool(config)
    assert len(pool) <= config.envelope_samples + 1
    assert any(s.order == G.order for s in pool)


def test_build_contexts_extra_groups():
    from nilenv.catalog import cyclic

    extra = cyclic(10)
    contexts = build_contexts(SMALL_CONFIG, (extra,))
    labels = [c.label for c in contexts]
    assert labels == ["symmetric(3)", "dihedral(4)", extra.name]
    assert contexts[-1].group is extra


def test_empty_suite_set_gives_empty_report():
    report = run_suites(replace(SMALL_CONFIG, suites=()))
    assert report.outcomes == ()
    assert report.ok
    assert report.total_passes == 0
    assert report.stable_text() == "total passes=0 failures=0"


def test_unknown_suite_name_rejected():
    with pytest.raises(MalformedInputError, match="unknown suite"):
        run_suites(replace(SMALL_CONFIG, suites=("hallwitt", "bogus")))
    with pytest.raises(MalformedInputError, match="unknown suite"):
        run_suite("bogus", build_contexts(SMALL_CONFIG), SMALL_CONFIG)


def test_reduced_run_is_deterministic():
    first = run_suites(SMALL_CONFIG)
    second = run_suites(SMALL_CONFIG)
    assert first.ok
    assert first.stable_text() == second.stable_text()
    assert "elapsed=" in first.format_text()
    assert "elapsed=" not in first.stable_text()
    assert first.total_passes == sum(o.passes for o in first.outcomes)
    assert first.failures == ()


def test_worker_pool_matches_sequential():
    sequential = run_suites(SMALL_CONFIG)
    threaded = run_suites(replace(SMALL_CONFIG, workers=2))
    assert sequential.stable_text() == threaded.stable_text()


def test_report_notes_and_cross_group_line():
    text = run_suites(SMALL_CONFIG).stable_text()
    assert "suite=formula group=(cross-group)" in text
    assert "note phi[" in text
    assert "note engel-bound:" in text
    for suite in ALL_SUITES:
        for group in SMALL_CONFIG.groups:
            assert f"suite={suite} group={group} " in text


def test_run_suite_single():
    contexts = build_contexts(SMALL_CONFIG)
    outcomes = run_suite("dimension", contexts, SMALL_CONFIG)
    assert [o.group for o in outcomes] == ["symmetric(3)", "dihedral(4)"]
    assert all(o.suite == "dimension" for o in outcomes)
    assert all(not o.failures for o in outcomes)


def test_quota_suites_skip_oversized_groups():
    config = SuiteConfig(
        groups=("dihedral(4)", "unitriangular(5)"),
        suites=("bryant",),
        bryant_target=40,
    )
    report = run_suites(config)
    by_group = {o.group: o for o in report.outcomes}
    assert by_group["dihedral(4)"].passes == 40
    assert by_group["unitriangular(5)"].passes == 0
    assert report.ok


def test_failure_payload_text_round_trips():
    failure = Failure("hall", "dihedral(4)", "demo", {"kind": "hall", "i": 1})
    text = failure.payload_text()
    assert json.loads(text) == failure.payload
    assert text == json.dumps(failure.payload, sort_keys=True)


HEALTHY_PAYLOADS = [
    {"kind": "hallwitt", "group": "symmetric(3)", "triple": [1, 2, 3]},
    {
        "kind": "threesubgroup",
        "group": "symmetric(3)",
        "k": [2],
        "l": [2],
        "m": [2],
        "n": [2],
    },
    {"kind": "hall", "group": "dihedral(4)", "subgroup": [1, 4], "i": 1, "k": 2},
    {"kind": "bryant", "group": "dihedral(4)", "x": [1], "p": [1], "k": 1},
    {"kind": "nested", "group": "dihedral(4)", "a": [2], "b": [1], "c": [1, 4], "n": 1},
    {"kind": "bottomchain", "group": "dihedral(4)", "subgroup": [1]},
    {"kind": "dimension-abelian", "group": "symmetric(3)"},
    {"kind": "greedy-bound", "group": "dihedral(4)", "subset": [1, 4]},
    {"kind": "triple-law", "group": "dihedral(4)", "subset": [3]},
    {"kind": "subgroup-dimension", "group": "symmetric(4)", "subgroup": [1]},
    {"kind": "least-centralizer-normality", "group": "dihedral(4)", "subgroup": [1]},
    {"kind": "envelope", "group": "alternating(4)", "subgroup": [1], "check": "containment"},
    {"kind": "envelope", "group": "alternating(4)", "subgroup": [1], "check": "class"},
    {"kind": "envelope", "group": "alternating(4)", "subgroup": [1], "check": "normality"},
    {"kind": "envelope", "group": "alternating(4)", "subgroup": [1], "check": "verify"},
    {"kind": "envelope", "group": "alternating(4)", "subgroup": [1], "check": "idempotence"},
    {"kind": "formula-solution", "group": "dihedral(4)", "subgroup": [2], "d": 2},
    {"kind": "formula-centralizer", "group": "symmetric(3)", "p0": 3},
    {"kind": "fitting-agreement", "group": "symmetric(4)"},
    {"kind": "fitting-containment", "group": "symmetric(3)", "subgroup": [2]},
    {
        "kind": "quota",
        "group": "symmetric(3)",
        "suite": "threesubgroup",
        "quota": 5,
        "achieved": 0,
        "attempts": 300,
        "seed": 0,
    },
    {
        "kind": "uniformity",
        "key": "phi[2,3]",
        "groups": ["dihedral(4)", "symmetric(3)"],
    },
]


def test_replay_healthy_payloads_report_no_failure():
    for payload in HEALTHY_PAYLOADS:
        failure = Failure("synthetic", payload.get("group", "?"), "demo", payload)
        assert replay_failure(failure) is False, payload


def test_replay_detects_genuine_violation():
    payload = {"kind": "fitting-containment", "group": "symmetric(3)", "subgroup": [1, 2]}
    failure = Failure("fitting", "symmetric(3)", "demo", payload)
    assert replay_failure(failure) is True


def test_replay_unknown_kind_rejected():
    failure = Failure("synthetic", "?", "demo", {"kind": "flux"})
    with pytest.raises(MalformedInputError, match="unknown failure kind"):
        replay_failure(failure)
