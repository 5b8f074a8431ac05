"""Property-suite runner: catalog groups, subgroup pools, and report output.

Each suite drives one family of checks (commutator identities, tower lemmas,
envelope construction, formula evaluation, Fitting subgroups) over a pool of
groups and subgroups.  Runs are deterministic: the same configuration always
produces the same report, independent of worker count, and every failure
carries a payload from which the single failing check can be replayed.
"""

from __future__ import annotations

import json
import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

from .catalog import DEFAULT_CATALOG, from_spec
from .centralizers import (
    DEFAULT_NODE_CAP,
    bottom_chain_classify,
    centralizer,
    dimension,
    greedy_witness,
    minimal_centralizer_above,
)
from .envelope import EnvelopeTrace, build_envelope, fitting, verify_envelope
from .errors import InternalCheckError, MalformedInputError
from .formula import (
    emit_envelope_formula,
    envelope_formula,
    evaluate,
    format_formula,
    parse,
)
from .groups import (
    DEFAULT_ORDER_CAP,
    ElementSet,
    FiniteGroup,
    Subgroup,
    hall_witt_products,
    mask_of,
)
from .series import (
    check_centralizer_transfer,
    check_hall_bound,
    check_nested_towers,
    check_three_subgroup,
    nilpotence_class,
)

ALL_SUITES = (
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


@dataclass(frozen=True)
class SuiteConfig:
    """Knobs for a suite run.  Equal configs give equal reports."""

    seed: int = 0
    max_exhaustive_order: int = 200
    samples_per_group: int = 200
    node_cap: int = DEFAULT_NODE_CAP
    order_cap: int = DEFAULT_ORDER_CAP
    suites: tuple[str, ...] = ALL_SUITES
    groups: tuple[str, ...] = DEFAULT_CATALOG
    hallwitt_triples: int = 1000
    threesubgroup_target: int = 5000
    bryant_target: int = 10000
    nested_target: int = 5000
    envelope_samples: int = 24
    threesubgroup_max_order: int = 64
    bryant_max_order: int = 100
    nested_max_order: int = 100
    workers: int = 1


@dataclass(frozen=True)
class Failure:
    """One failed check with everything needed to re-run it standalone."""

    suite: str
    group: str
    label: str
    payload: dict

    def payload_text(self) -> str:
        return json.dumps(self.payload, sort_keys=True)


@dataclass(frozen=True)
class SuiteOutcome:
    suite: str
    group: str
    passes: int
    failures: tuple[Failure, ...]
    elapsed: float
    notes: tuple[tuple[str, str], ...] = ()


@dataclass(frozen=True)
class Report:
    config: SuiteConfig
    outcomes: tuple[SuiteOutcome, ...]

    @property
    def total_passes(self) -> int:
        return sum(o.passes for o in self.outcomes)

    @property
    def failures(self) -> tuple[Failure, ...]:
        return tuple(f for o in self.outcomes for f in o.failures)

    @property
    def ok(self) -> bool:
        return not self.failures

    def format_text(self, include_timing: bool = True) -> str:
        lines = []
        for o in self.outcomes:
            line = f"suite={o.suite} group={o.group} passes={o.passes} failures={len(o.failures)}"
            if include_timing:
                line += f" elapsed={o.elapsed:.2f}s"
            lines.append(line)
            for key, value in o.notes:
                lines.append(f"  note {key}: {value}")
            for f in o.failures:
                lines.append(f"  FAIL {f.label}: {f.payload_text()}")
        lines.append(
            f"total passes={self.total_passes} failures={len(self.failures)}"
        )
        return "\n".join(lines)

    def stable_text(self) -> str:
        """Report text without timing, byte-identical across equal-config runs."""
        return self.format_text(include_timing=False)


# -- Subgroup pools --------------------------------------------------------


def all_subgroups(G: FiniteGroup) -> tuple[Subgroup, ...]:
    """Every subgroup, as the join-closure of the cyclic subgroups."""
    key = ("allsubs",)
    got = G._memo.get(key)
    if got is None:
        masks = {1}
        for g in range(G.order):
            masks.add(G.closure_mask(1 << g | 1))
        frontier = list(masks)
        known = set(masks)
        while frontier:
            fresh = []
            for a in frontier:
                for b in known.copy():
                    joined = G.closure_mask(a | b)
                    if joined not in known:
                        known.add(joined)
                        fresh.append(joined)
            frontier = fresh
        got = tuple(
            Subgroup(G, m) for m in sorted(known, key=lambda m: (m.bit_count(), m))
        )
        G._memo[key] = got
    return got


def sample_subgroups(G: FiniteGroup, count: int, seed: int) -> list[Subgroup]:
    """Deterministic sample: closures of 1 to 3 random elements, deduplicated."""
    rng = random.Random(f"{seed}:{G.name}")
    seen = set()
    out = []
    for _ in range(count):
        k = rng.randint(1, 3)
        elems = rng.sample(range(G.order), min(k, G.order))
        sub = Subgroup(G, G.closure_mask(mask_of(elems) | 1))
        if sub.members not in seen:
            seen.add(sub.members)
            out.append(sub)
    return out


class GroupContext:
    """One group plus its subgroup pool, shared by every suite."""

    def __init__(self, label: str, group: FiniteGroup, config: SuiteConfig) -> None:
        self.label = label
        self.group = group
        self.exhaustive = group.order <= config.max_exhaustive_order
        if self.exhaustive:
            self.subgroups = all_subgroups(group)
        else:
            pool = {1: group.trivial_subgroup(), group.full_mask: group.as_subgroup()}
            for sub in sample_subgroups(group, config.samples_per_group, config.seed):
                pool.setdefault(sub.members, sub)
            self.subgroups = tuple(
                sorted(pool.values(), key=lambda s: (s.order, s.members))
            )
        self.nilpotent = tuple(
            s for s in self.subgroups if nilpotence_class(s) is not None
        )
        self.dimension = dimension(group, node_cap=config.node_cap)
        self._traces: dict[int, EnvelopeTrace] = {}

    def trace_for(self, sub: Subgroup) -> EnvelopeTrace:
        got = self._traces.get(sub.members)
        if got is None:
            got = build_envelope(self.group, sub)
            self._traces[sub.members] = got
        return got

    def envelope_pool(self, config: SuiteConfig) -> tuple[Subgroup, ...]:
        """Nilpotent subgroups to trace: all of them when exhaustive, a slice otherwise."""
        if self.exhaustive:
            return self.nilpotent
        pool = list(self.nilpotent[: config.envelope_samples])
        full = self.group.as_subgroup()
        if nilpotence_class(full) is not None and all(
            s.members != full.members for s in pool
        ):
            pool.append(full)
        return tuple(pool)


def build_contexts(
    config: SuiteConfig, extra_groups: tuple[FiniteGroup, ...] = ()
) -> tuple[GroupContext, ...]:
    """Contexts for the configured catalog specs plus any pre-built groups."""
    contexts = [GroupContext(spec, from_spec(spec), config) for spec in config.groups]
    contexts.extend(GroupContext(g.name, g, config) for g in extra_groups)
    return tuple(contexts)


def _rng_for(config: SuiteConfig, suite: str, label: str) -> random.Random:
    return random.Random(f"{config.seed}:{suite}:{label}")


def _gens(sub: Subgroup) -> list[int]:
    return list(sub.generators)


def _from_gens(G: FiniteGroup, gens) -> Subgroup:
    return Subgroup(G, G.closure_mask(mask_of(gens) | 1))


# -- Individual suites ------------------------------------------------------


def _suite_hallwitt(ctx: GroupContext, config: SuiteConfig, quota: int | None):
    G = ctx.group
    rng = _rng_for(config, "hallwitt", ctx.label)
    passes = 0
    failures = []
    for _ in range(config.hallwitt_triples):
        x = rng.randrange(G.order)
        y = rng.randrange(G.order)
        z = rng.randrange(G.order)
        first, second = hall_witt_products(G, x, y, z)
        if first == 0 and second == 0:
            passes += 1
        else:
            failures.append(
                Failure(
                    "hallwitt",
                    ctx.label,
                    "commutator identity product is not the identity",
                    {"kind": "hallwitt", "group": ctx.label, "triple": [x, y, z]},
                )
            )
    return passes, failures, ()


def _suite_threesubgroup(ctx: GroupContext, config: SuiteConfig, quota: int | None):
    G = ctx.group
    rng = _rng_for(config, "threesubgroup", ctx.label)
    passes = 0
    failures = []
    if quota is None:
        return passes, failures, ()
    candidates_for: dict[int, list[Subgroup]] = {}
    hits = 0
    attempts = 0
    cap = quota * 60
    while hits < quota and attempts < cap:
        attempts += 1
        n = rng.choice(ctx.subgroups)
        inside = candidates_for.get(n.members)
        if inside is None:
            norm = G.normalizer_mask(n.members)
            inside = [s for s in ctx.subgroups if s.members & ~norm == 0]
            candidates_for[n.members] = inside
        k, l, m = (rng.choice(inside) for _ in range(3))
        report = check_three_subgroup(k, l, m, n)
        if not report.hypotheses_hold:
            continue
        hits += 1
        if report.conclusion_holds:
            passes += 1
        else:
            failures.append(
                Failure(
                    "threesubgroup",
                    ctx.label,
                    "conclusion fails despite both hypotheses",
                    {
                        "kind": "threesubgroup",
                        "group": ctx.label,
                        "k": _gens(k),
                        "l": _gens(l),
                        "m": _gens(m),
                        "n": _gens(n),
                    },
                )
            )
    if hits < quota:
        failures.append(
            Failure(
                "threesubgroup",
                ctx.label,
                "sampling quota not reached",
                {
                    "kind": "quota",
                    "group": ctx.label,
                    "suite": "threesubgroup",
                    "quota": quota,
                    "achieved": hits,
                    "attempts": attempts,
                    "seed": config.seed,
                },
            )
        )
    return passes, failures, ()


def _suite_hall(ctx: GroupContext, config: SuiteConfig, quota: int | None):
    G = ctx.group
    passes = 0
    failures = []
    for h in ctx.nilpotent:
        n = nilpotence_class(h)
        for k in range(1, n + 1):
            for i in range(1, k + 1):
                report = check_hall_bound(G, h, i, k)
                if report.ok:
                    passes += 1
                else:
                    failures.append(
                        Failure(
                            "hall",
                            ctx.label,
                            f"commutator bound fails at i={i}, k={k}",
                            {
                                "kind": "hall",
                                "group": ctx.label,
                                "subgroup": _gens(h),
                                "i": i,
                                "k": k,
                            },
                        )
                    )
    return passes, failures, ()


def _suite_bryant(ctx: GroupContext, config: SuiteConfig, quota: int | None):
    G = ctx.group
    rng = _rng_for(config, "bryant", ctx.label)
    passes = 0
    failures = []
    if quota is None:
        return passes, failures, ()
    inside_cache: dict[int, list[Subgroup]] = {}
    hits = 0
    attempts = 0
    cap = quota * 60
    while hits < quota and attempts < cap:
        attempts += 1
        p = rng.choice(ctx.subgroups)
        if rng.random() < 0.5:
            x = p
        else:
            inside = inside_cache.get(p.members)
            if inside is None:
                inside = [s for s in ctx.subgroups if s.members & ~p.members == 0]
                inside_cache[p.members] = inside
            x = rng.choice(inside)
        k = rng.randint(1, 3)
        report = check_centralizer_transfer(G, x, p, k)
        if report.status == "hypotheses-fail":
            continue
        hits += 1
        if report.status == "conclusion-holds":
            passes += 1
        else:
            failures.append(
                Failure(
                    "bryant",
                    ctx.label,
                    f"level-{k} centralizer transfer fails",
                    {
                        "kind": "bryant",
                        "group": ctx.label,
                        "x": _gens(x),
                        "p": _gens(p),
                        "k": k,
                    },
                )
            )
    if hits < quota:
        failures.append(
            Failure(
                "bryant",
                ctx.label,
                "sampling quota not reached",
                {
                    "kind": "quota",
                    "group": ctx.label,
                    "suite": "bryant",
                    "quota": quota,
                    "achieved": hits,
                    "attempts": attempts,
                    "seed": config.seed,
                },
            )
        )
    return passes, failures, ()


def _suite_nested(ctx: GroupContext, config: SuiteConfig, quota: int | None):
    rng = _rng_for(config, "nested", ctx.label)
    passes = 0
    failures = []
    if quota is None:
        return passes, failures, ()
    inside_cache: dict[int, list[Subgroup]] = {}

    def inside(sub: Subgroup) -> list[Subgroup]:
        got = inside_cache.get(sub.members)
        if got is None:
            got = [s for s in ctx.subgroups if s.members & ~sub.members == 0]
            inside_cache[sub.members] = got
        return got

    hits = 0
    attempts = 0
    cap = quota * 60
    while hits < quota and attempts < cap:
        attempts += 1
        c = rng.choice(ctx.subgroups)
        b = rng.choice(inside(c))
        a = rng.choice(inside(b))
        n = rng.randint(1, 3)
        report = check_nested_towers(a, b, c, n)
        if not report.hypothesis_holds:
            continue
        hits += 1
        if report.conclusion_holds:
            passes += 1
        else:
            failures.append(
                Failure(
                    "nested",
                    ctx.label,
                    f"restriction fails at level {report.failed_level}",
                    {
                        "kind": "nested",
                        "group": ctx.label,
                        "a": _gens(a),
                        "b": _gens(b),
                        "c": _gens(c),
                        "n": n,
                    },
                )
            )
    if hits < quota:
        failures.append(
            Failure(
                "nested",
                ctx.label,
                "sampling quota not reached",
                {
                    "kind": "quota",
                    "group": ctx.label,
                    "suite": "nested",
                    "quota": quota,
                    "achieved": hits,
                    "attempts": attempts,
                    "seed": config.seed,
                },
            )
        )
    return passes, failures, ()


def _suite_bottomchain(ctx: GroupContext, config: SuiteConfig, quota: int | None):
    passes = 0
    failures = []
    for h in ctx.subgroups:
        try:
            bottom_chain_classify(h)
            passes += 1
        except InternalCheckError as err:
            failures.append(
                Failure(
                    "bottomchain",
                    ctx.label,
                    str(err),
                    {"kind": "bottomchain", "group": ctx.label, "subgroup": _gens(h)},
                )
            )
    return passes, failures, ()


def _suite_dimension(ctx: GroupContext, config: SuiteConfig, quota: int | None):
    G = ctx.group
    rng = _rng_for(config, "dimension", ctx.label)
    passes = 0
    failures = []

    def fail(label, payload):
        failures.append(Failure("dimension", ctx.label, label, payload))

    if (ctx.dimension == 1) == G.is_abelian:
        passes += 1
    else:
        fail(
            "dimension 1 must coincide with being abelian",
            {"kind": "dimension-abelian", "group": ctx.label},
        )

    for _ in range(config.samples_per_group):
        k = rng.randint(1, min(G.order, 5))
        subset = ElementSet(G, mask_of(rng.sample(range(G.order), k)))
        witnesses = greedy_witness(subset)
        if len(witnesses) <= ctx.dimension:
            passes += 1
        else:
            fail(
                "greedy witness exceeds the dimension",
                {
                    "kind": "greedy-bound",
                    "group": ctx.label,
                    "subset": list(subset.elements),
                },
            )
        first = G.centralizer_mask(subset.members)
        third = G.centralizer_mask(G.centralizer_mask(first))
        if first == third:
            passes += 1
        else:
            fail(
                "triple centralizer differs from single centralizer",
                {
                    "kind": "triple-law",
                    "group": ctx.label,
                    "subset": list(subset.elements),
                },
            )

    if ctx.exhaustive:
        for h in ctx.subgroups:
            if dimension(h, node_cap=config.node_cap) <= ctx.dimension:
                passes += 1
            else:
                fail(
                    "subgroup dimension exceeds the ambient dimension",
                    {
                        "kind": "subgroup-dimension",
                        "group": ctx.label,
                        "subgroup": _gens(h),
                    },
                )
            least, _ = minimal_centralizer_above(h)
            if G.normalizer_mask(h.members) & ~G.normalizer_mask(least.members) == 0:
                passes += 1
            else:
                fail(
                    "least centralizer is not normalized by the subgroup normalizer",
                    {
                        "kind": "least-centralizer-normality",
                        "group": ctx.label,
                        "subgroup": _gens(h),
                    },
                )
    return passes, failures, ()


_ENVELOPE_CHECKS = ("containment", "class", "normality", "verify", "idempotence")


def _envelope_check(ctx: GroupContext, h: Subgroup, which: str, config: SuiteConfig) -> bool:
    G = ctx.group
    trace = ctx.trace_for(h)
    envelope = trace.envelope
    if which == "containment":
        return h.members & ~envelope.members == 0
    if which == "class":
        return nilpotence_class(envelope) == trace.nilpotence_class == nilpotence_class(h)
    if which == "normality":
        return G.normalizer_mask(h.members) & ~G.normalizer_mask(envelope.members) == 0
    if which == "verify":
        return verify_envelope(trace, samples_per_level=2, seed=config.seed).ok
    return ctx.trace_for(envelope).envelope.members == envelope.members


def _suite_envelope(ctx: GroupContext, config: SuiteConfig, quota: int | None):
    passes = 0
    failures = []
    for h in ctx.envelope_pool(config):
        for which in _ENVELOPE_CHECKS:
            try:
                ok = _envelope_check(ctx, h, which, config)
            except InternalCheckError as err:
                ok = False
                detail = str(err)
            else:
                detail = ""
            if ok:
                passes += 1
            else:
                failures.append(
                    Failure(
                        "envelope",
                        ctx.label,
                        f"{which} check failed" + (f": {detail}" if detail else ""),
                        {
                            "kind": "envelope",
                            "group": ctx.label,
                            "subgroup": _gens(h),
                            "check": which,
                        },
                    )
                )
    return passes, failures, ()


def _suite_formula(ctx: GroupContext, config: SuiteConfig, quota: int | None):
    G = ctx.group
    rng = _rng_for(config, "formula", ctx.label)
    passes = 0
    failures = []
    shapes: dict[tuple[int, int], str] = {}
    for h in ctx.envelope_pool(config):
        trace = ctx.trace_for(h)
        phi = emit_envelope_formula(trace, ctx.dimension)
        shapes.setdefault((ctx.dimension, trace.nilpotence_class), format_formula(phi))
        solution = evaluate(phi, G, trace.parameters)
        if solution.members == trace.envelope.members:
            passes += 1
        else:
            failures.append(
                Failure(
                    "formula",
                    ctx.label,
                    "solution set differs from the envelope",
                    {
                        "kind": "formula-solution",
                        "group": ctx.label,
                        "subgroup": _gens(h),
                        "d": ctx.dimension,
                    },
                )
            )
    commuting = parse("x*p0 = p0*x")
    for _ in range(8):
        g = rng.randrange(G.order)
        got = evaluate(commuting, G, (g,))
        want = centralizer(ElementSet(G, 1 << g))
        if got.members == want.members:
            passes += 1
        else:
            failures.append(
                Failure(
                    "formula",
                    ctx.label,
                    "commuting formula disagrees with the centralizer",
                    {"kind": "formula-centralizer", "group": ctx.label, "p0": g},
                )
            )
    notes = tuple(
        (f"phi[{d},{n}]", text) for (d, n), text in sorted(shapes.items())
    )
    return passes, failures, notes


def _suite_fitting(ctx: GroupContext, config: SuiteConfig, quota: int | None):
    G = ctx.group
    passes = 0
    failures = []
    try:
        report = fitting(G)
    except InternalCheckError as err:
        failures.append(
            Failure(
                "fitting",
                ctx.label,
                str(err),
                {"kind": "fitting-agreement", "group": ctx.label},
            )
        )
        return passes, failures, ()
    passes += 1
    if nilpotence_class(report.fitting) is not None:
        passes += 1
    else:
        failures.append(
            Failure(
                "fitting",
                ctx.label,
                "Fitting subgroup is not nilpotent",
                {"kind": "fitting-agreement", "group": ctx.label},
            )
        )
    for h in ctx.subgroups:
        if not h.is_normal or nilpotence_class(h) is None:
            continue
        if h.members & ~report.fitting.members == 0:
            passes += 1
        else:
            failures.append(
                Failure(
                    "fitting",
                    ctx.label,
                    "normal nilpotent subgroup escapes the Fitting subgroup",
                    {
                        "kind": "fitting-containment",
                        "group": ctx.label,
                        "subgroup": _gens(h),
                    },
                )
            )
    return passes, failures, (("engel-bound", str(report.engel_bound_n)),)


_SUITE_FUNCS = {
    "hallwitt": _suite_hallwitt,
    "threesubgroup": _suite_threesubgroup,
    "hall": _suite_hall,
    "bryant": _suite_bryant,
    "nested": _suite_nested,
    "bottomchain": _suite_bottomchain,
    "dimension": _suite_dimension,
    "envelope": _suite_envelope,
    "formula": _suite_formula,
    "fitting": _suite_fitting,
}

_QUOTA_SUITES = {
    "threesubgroup": ("threesubgroup_target", "threesubgroup_max_order"),
    "bryant": ("bryant_target", "bryant_max_order"),
    "nested": ("nested_target", "nested_max_order"),
}


def _quotas(config: SuiteConfig, contexts) -> dict[tuple[str, str], int | None]:
    """Per-(suite, group) sampling quotas, split evenly over eligible groups."""
    out: dict[tuple[str, str], int | None] = {}
    for suite, (target_field, order_field) in _QUOTA_SUITES.items():
        target = getattr(config, target_field)
        max_order = getattr(config, order_field)
        eligible = [c for c in contexts if c.group.order <= max_order]
        for c in contexts:
            if c in eligible:
                out[(suite, c.label)] = -(-target // len(eligible))
            else:
                out[(suite, c.label)] = None
    return out


def run_suite(
    suite: str, contexts, config: SuiteConfig, quotas=None
) -> list[SuiteOutcome]:
    """Run one suite over the given contexts, sequentially."""
    if suite not in _SUITE_FUNCS:
        raise MalformedInputError(f"unknown suite {suite!r}")
    if quotas is None:
        quotas = _quotas(config, contexts)
    out = []
    for ctx in contexts:
        out.append(_run_task(suite, ctx, config, quotas.get((suite, ctx.label))))
    return out


def _run_task(suite: str, ctx: GroupContext, config: SuiteConfig, quota) -> SuiteOutcome:
    started = time.perf_counter()
    passes, failures, notes = _SUITE_FUNCS[suite](ctx, config, quota)
    return SuiteOutcome(
        suite, ctx.label, passes, tuple(failures), time.perf_counter() - started, notes
    )


def run_suites(
    config: SuiteConfig, extra_groups: tuple[FiniteGroup, ...] = ()
) -> Report:
    """Run the configured suites and merge outcomes in (suite, group) order."""
    for suite in config.suites:
        if suite not in _SUITE_FUNCS:
            raise MalformedInputError(f"unknown suite {suite!r}")
    contexts = build_contexts(config, extra_groups)
    quotas = _quotas(config, contexts)
    tasks = [(suite, ctx) for suite in config.suites for ctx in contexts]
    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            outcomes = list(
                pool.map(
                    lambda t: _run_task(t[0], t[1], config, quotas.get((t[0], t[1].label))),
                    tasks,
                )
            )
    else:
        outcomes = [
            _run_task(suite, ctx, config, quotas.get((suite, ctx.label)))
            for suite, ctx in tasks
        ]
    outcomes.sort(key=lambda o: (o.suite, o.group))
    outcomes.extend(_uniformity_outcome(outcomes))
    return Report(config, tuple(outcomes))


def _uniformity_outcome(outcomes) -> list[SuiteOutcome]:
    """Cross-group check that equal (d, n) always produced the same formula."""
    shapes: dict[str, dict[str, str]] = {}
    for o in outcomes:
        if o.suite != "formula":
            continue
        for key, text in o.notes:
            shapes.setdefault(key, {})[o.group] = text
    if not shapes:
        return []
    passes = 0
    failures = []
    for key in sorted(shapes):
        texts = shapes[key]
        if len(set(texts.values())) == 1:
            passes += 1
        else:
            failures.append(
                Failure(
                    "formula",
                    "(cross-group)",
                    f"{key} differs between groups",
                    {"kind": "uniformity", "key": key, "groups": sorted(texts)},
                )
            )
    return [SuiteOutcome("formula", "(cross-group)", passes, tuple(failures), 0.0)]


# -- Failure replay ---------------------------------------------------------


def replay_failure(failure: Failure, config: SuiteConfig | None = None) -> bool:
    """Re-run the single check behind a failure; True when it still fails."""
    config = config or SuiteConfig()
    payload = failure.payload
    kind = payload["kind"]
    if kind == "uniformity":
        texts = {
            format_formula(envelope_formula(*map(int, payload["key"][4:-1].split(","))))
        }
        return len(texts) != 1
    if kind not in _REPLAY_KINDS:
        raise MalformedInputError(f"unknown failure kind {kind!r}")
    G = from_spec(payload["group"])
    sub = lambda key: _from_gens(G, payload[key])
    if kind == "hallwitt":
        first, second = hall_witt_products(G, *payload["triple"])
        return first != 0 or second != 0
    if kind == "threesubgroup":
        report = check_three_subgroup(sub("k"), sub("l"), sub("m"), sub("n"))
        return not report.implication_holds
    if kind == "hall":
        return not check_hall_bound(G, sub("subgroup"), payload["i"], payload["k"]).ok
    if kind == "bryant":
        report = check_centralizer_transfer(G, sub("x"), sub("p"), payload["k"])
        return report.status == "violation"
    if kind == "nested":
        report = check_nested_towers(sub("a"), sub("b"), sub("c"), payload["n"])
        return report.hypothesis_holds and not report.conclusion_holds
    if kind == "bottomchain":
        try:
            bottom_chain_classify(sub("subgroup"))
            return False
        except InternalCheckError:
            return True
    if kind == "dimension-abelian":
        return (dimension(G) == 1) != G.is_abelian
    if kind == "greedy-bound":
        subset = ElementSet(G, mask_of(payload["subset"]))
        return len(greedy_witness(subset)) > dimension(G)
    if kind == "triple-law":
        first = G.centralizer_mask(mask_of(payload["subset"]))
        return G.centralizer_mask(G.centralizer_mask(first)) != first
    if kind == "subgroup-dimension":
        return dimension(sub("subgroup")) > dimension(G)
    if kind == "least-centralizer-normality":
        h = sub("subgroup")
        least, _ = minimal_centralizer_above(h)
        return bool(G.normalizer_mask(h.members) & ~G.normalizer_mask(least.members))
    if kind == "envelope":
        ctx = GroupContext(payload["group"], G, config)
        try:
            return not _envelope_check(ctx, sub("subgroup"), payload["check"], config)
        except InternalCheckError:
            return True
    if kind == "formula-solution":
        trace = build_envelope(G, sub("subgroup"))
        phi = emit_envelope_formula(trace, payload["d"])
        return evaluate(phi, G, trace.parameters).members != trace.envelope.members
    if kind == "formula-centralizer":
        got = evaluate(parse("x*p0 = p0*x"), G, (payload["p0"],))
        return got.members != centralizer(ElementSet(G, 1 << payload["p0"])).members
    if kind == "fitting-agreement":
        try:
            report = fitting(G)
        except InternalCheckError:
            return True
        return nilpotence_class(report.fitting) is None
    if kind == "fitting-containment":
        h = sub("subgroup")
        return bool(h.members & ~fitting(G).fitting.members)
    ctx = GroupContext(payload["group"], G, replace(config, seed=payload["seed"]))
    runner = _SUITE_FUNCS[payload["suite"]]
    _, failures, _ = runner(ctx, replace(config, seed=payload["seed"]), payload["quota"])
    return any(f.payload.get("kind") == "quota" for f in failures)


_REPLAY_KINDS = frozenset(
    {
        "hallwitt",
        "threesubgroup",
        "hall",
        "bryant",
        "nested",
        "bottomchain",
        "dimension-abelian",
        "greedy-bound",
        "triple-law",
        "subgroup-dimension",
        "least-centralizer-normality",
        "envelope",
        "formula-solution",
        "formula-centralizer",
        "fitting-agreement",
        "fitting-containment",
        "quota",
    }
)
