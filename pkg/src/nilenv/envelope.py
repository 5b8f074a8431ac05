"""Nilpotent envelopes: the descending tower construction and Fitting subgroups.

Given a nilpotent subgroup H of class n, the construction produces a tower
E_1 >= E_2 >= ... >= E_n of subgroups, each cut out from the previous one by
finitely many commutator conditions, and returns D = Z_n(E_n).  D contains H,
it is nilpotent of the same class, every element normalizing H normalizes D,
and it is the solution set of a uniform first-order formula whose parameters
are the recorded witnesses.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .centralizers import dimension, greedy_witness, minimal_centralizer_above
from .errors import (
    ArityMismatchError,
    InternalCheckError,
    NotNilpotentError,
    NotNormalError,
    ParentMismatchError,
)
from .groups import (
    ElementSet,
    FiniteGroup,
    Subgroup,
    commutator_subgroup,
    is_subgroup_mask,
    iter_mask,
    mask_of,
    normal_closure,
    product_set,
    subgroup_to_dict,
)
from .series import (
    iterated_centralizer,
    lower_central_series,
    nilpotence_class,
    upper_central_series,
)


def _padded(masks: list[int], i: int) -> int:
    return masks[i] if i < len(masks) else masks[-1]


def _upper_masks(sub: Subgroup) -> list[int]:
    return [t.members for t in upper_central_series(sub).terms]


def _lower_masks(sub: Subgroup) -> list[int]:
    return [t.members for t in lower_central_series(sub).terms]


@dataclass(frozen=True)
class TowerLevel:
    """One stage of the tower: E_k, its witnesses, and Z_(k-1) of the stage above."""

    level: int
    subgroup: Subgroup
    witnesses: tuple[int, ...]
    prev_center: Subgroup


@dataclass(frozen=True)
class EnvelopeTrace:
    """Everything the envelope construction produced, for checking and emission."""

    group: FiniteGroup
    original: Subgroup
    replaced: Subgroup
    tower: tuple[TowerLevel, ...]
    envelope: Subgroup
    nilpotence_class: int
    parameters: tuple[int, ...]


def _condition_mask(G: FiniteGroup, ambient_mask: int, h: int, center_mask: int) -> int:
    """The set {x in ambient : [x, h] in center}."""
    out = 0
    for x in iter_mask(ambient_mask):
        if center_mask >> G._comm(x, h) & 1:
            out |= 1 << x
    return out


def build_envelope(G: FiniteGroup, H: Subgroup) -> EnvelopeTrace:
    """Run the tower construction for a nilpotent subgroup H of G.

    Stage one takes E_1 to be the least centralizer containing H and swaps H
    for H * Z(E_1), which leaves the class unchanged.  Each later stage
    intersects finitely many commutator conditions [x, witness] in
    Z_(k-1)(E_(k-1)) chosen so that the witnesses have the same centralizer
    as the full level-k iterated centralizer of H.  The envelope is
    Z_n(E_n).  The construction's structural guarantees are re-asserted
    before returning; a violation raises :class:`InternalCheckError`.
    """
    if H.parent is not G:
        raise ParentMismatchError("subgroup belongs to a different group")
    n = nilpotence_class(H)
    if n is None:
        raise NotNilpotentError("envelope construction needs a nilpotent subgroup")
    if n == 0:
        return EnvelopeTrace(G, H, H, (), G.trivial_subgroup(), 0, ())

    e1, c_of_h = minimal_centralizer_above(H)
    witnesses1 = greedy_witness(c_of_h)
    if G.centralizer_mask(mask_of(witnesses1), within=None) != e1.members:
        raise InternalCheckError("stage-one witnesses do not cut out E_1")
    z1 = Subgroup(G, G.centralizer_mask(e1.members, within=e1.members))
    replaced = product_set(H, z1)
    if nilpotence_class(replaced) != n:
        raise InternalCheckError("central enlargement changed the nilpotence class")

    levels = [TowerLevel(1, e1, witnesses1, G.trivial_subgroup())]
    current = e1
    for k in range(2, n + 1):
        prev = current
        prev_center = Subgroup(G, _padded(_upper_masks(prev), k - 1))
        t_k = iterated_centralizer(prev, replaced, k).terms[k]
        wits = greedy_witness(ElementSet(G, t_k.members), within=prev)
        if not wits:
            raise InternalCheckError(f"no tower witnesses at level {k}")
        if G.centralizer_mask(mask_of(wits), within=prev.members) != G.centralizer_mask(
            t_k.members, within=prev.members
        ):
            raise InternalCheckError(f"witnesses at level {k} have the wrong centralizer")
        mask = prev.members
        for w in wits:
            mask &= _condition_mask(G, prev.members, w, prev_center.members)
        if not is_subgroup_mask(G, mask):
            raise InternalCheckError(f"stage {k} intersection is not a subgroup")
        current = Subgroup(G, mask)
        levels.append(TowerLevel(k, current, wits, prev_center))

    envelope = Subgroup(G, _padded(_upper_masks(current), n))
    trace = EnvelopeTrace(
        G,
        H,
        replaced,
        tuple(levels),
        envelope,
        n,
        (),
    )
    _assert_trace(trace)
    return EnvelopeTrace(
        G, H, replaced, tuple(levels), envelope, n, padded_parameters(trace, dimension(G))
    )


def _assert_trace(trace: EnvelopeTrace) -> None:
    """Envelope guarantees and tower properties, asserted at build time."""
    G = trace.group
    n = trace.nilpotence_class
    levels = trace.tower
    h_mask = trace.original.members
    hp = trace.replaced

    if h_mask & ~hp.members:
        raise InternalCheckError("replaced subgroup lost elements of H")
    for idx, lvl in enumerate(levels):
        upper_mask = levels[idx - 1].subgroup.members if idx else G.full_mask
        if lvl.subgroup.members & ~upper_mask or hp.members & ~lvl.subgroup.members:
            raise InternalCheckError("tower is not a descending chain over H")

    for lvl in levels:
        e_k = lvl.subgroup
        tower = iterated_centralizer(e_k, hp, lvl.level)
        zs = _upper_masks(e_k)
        for j in range(1, lvl.level + 1):
            if tower.terms[j].members != _padded(zs, j):
                raise InternalCheckError(
                    f"level {lvl.level}: C^{j}(H) differs from Z_{j} of the stage"
                )

    envelope = trace.envelope
    if h_mask & ~envelope.members or envelope.members & ~levels[-1].subgroup.members:
        raise InternalCheckError("envelope is not squeezed between H and E_n")
    if nilpotence_class(envelope) != n:
        raise InternalCheckError("envelope has the wrong nilpotence class")

    norm_h = G.normalizer_mask(h_mask)
    for lvl in levels:
        if norm_h & ~G.normalizer_mask(lvl.subgroup.members):
            raise InternalCheckError(f"stage {lvl.level} is not normalized by N_G(H)")
    if norm_h & ~G.normalizer_mask(envelope.members):
        raise InternalCheckError("envelope is not normalized by N_G(H)")


def padded_parameters(trace: EnvelopeTrace, d: int) -> tuple[int, ...]:
    """Flatten the tower witnesses into a d*n tuple, repeating the last witness.

    A stage with fewer than d witnesses repeats its last one, which leaves
    the defined intersection unchanged.  A stage with no witnesses at all
    (possible only at stage one, when C_G(H) is the center) pads with the
    identity, whose commutation constraint is vacuous.  A stage with more
    than d witnesses raises :class:`ArityMismatchError`.
    """
    if d < 1:
        raise ArityMismatchError("parameter width d must be at least 1")
    out: list[int] = []
    for lvl in trace.tower:
        wits = lvl.witnesses
        if len(wits) > d:
            raise ArityMismatchError(
                f"stage {lvl.level} has {len(wits)} witnesses, more than width {d}"
            )
        if wits:
            out.extend(wits + (wits[-1],) * (d - len(wits)))
        else:
            out.extend((0,) * d)
    return tuple(out)


@dataclass(frozen=True)
class CheckEntry:
    level: int | None
    label: str
    ok: bool
    detail: str = ""


@dataclass(frozen=True)
class EnvelopeReport:
    entries: tuple[CheckEntry, ...]

    @property
    def ok(self) -> bool:
        return all(e.ok for e in self.entries)

    def failures(self) -> tuple[CheckEntry, ...]:
        return tuple(e for e in self.entries if not e.ok)


def verify_envelope(trace: EnvelopeTrace, samples_per_level: int = 4, seed: int = 0) -> EnvelopeReport:
    """Independently re-check the identities behind an envelope trace.

    Re-derives each stage from its inputs, confirms the stage equals the
    intersection over the full level-k iterated centralizer (not only the
    witnesses), checks the commutator identities [gamma_k(E_k(h)), h] = 1 and
    [gamma_k(E_k), C^k(H)] = 1, compares relative towers against sampled
    intermediate subgroups, and reports normalization by the normalizers of
    both the original and the replaced subgroup.
    """
    G = trace.group
    n = trace.nilpotence_class
    hp = trace.replaced
    entries: list[CheckEntry] = []
    rng = random.Random(f"{seed}:envelope-verify")

    def note(level, label, ok, detail=""):
        entries.append(CheckEntry(level, label, bool(ok), detail))

    if n == 0:
        note(None, "trivial subgroup has the trivial envelope", trace.envelope.order == 1)
        return EnvelopeReport(tuple(entries))

    e1 = trace.tower[0].subgroup
    c_h = G.centralizer_mask(trace.original.members)
    note(1, "stage one is the double centralizer", G.centralizer_mask(c_h) == e1.members)
    note(
        1,
        "stage-one witnesses cut out the stage",
        G.centralizer_mask(mask_of(trace.tower[0].witnesses)) == e1.members,
    )
    note(
        1,
        "replacement only adds the stage-one center",
        hp.members == product_set(trace.original, Subgroup(G, G.centralizer_mask(e1.members, within=e1.members))).members,
    )

    for idx in range(1, n):
        lvl = trace.tower[idx]
        k = lvl.level
        prev = trace.tower[idx - 1].subgroup
        prev_center = lvl.prev_center
        note(k, "recorded center matches Z_(k-1) of the stage above",
             prev_center.members == _padded(_upper_masks(prev), k - 1))

        t_k = iterated_centralizer(prev, hp, k).terms[k]
        note(k, "witnesses lie in the level-k iterated centralizer",
             mask_of(lvl.witnesses) & ~t_k.members == 0)
        note(
            k,
            "witnesses have the same relative centralizer as the full level",
            G.centralizer_mask(mask_of(lvl.witnesses), within=prev.members)
            == G.centralizer_mask(t_k.members, within=prev.members),
        )

        full = prev.members
        for h in iter_mask(t_k.members):
            full &= _condition_mask(G, prev.members, h, prev_center.members)
        note(k, "stage equals the intersection over the whole level",
             full == lvl.subgroup.members)

        t_elems = list(iter_mask(t_k.members))
        picked = t_elems if len(t_elems) <= samples_per_level else rng.sample(t_elems, samples_per_level)
        for h in picked:
            ekh = Subgroup(G, _condition_mask(G, prev.members, h, prev_center.members))
            gamma = Subgroup(G, _padded(_lower_masks(ekh), k - 1))
            ok = commutator_subgroup(gamma, Subgroup(G, 1 << h | 1)).members == 1
            note(k, "commutators of gamma_k of a one-witness stage with its witness vanish",
                 ok, detail=f"h={h}")

        gamma_ek = Subgroup(G, _padded(_lower_masks(lvl.subgroup), k - 1))
        note(k, "gamma_k of the stage centralizes the whole level",
             commutator_subgroup(gamma_ek, t_k).members == 1)

        for _ in range(samples_per_level):
            extra = rng.choice(list(iter_mask(prev.members)))
            p = Subgroup(G, G.closure_mask(hp.members | 1 << extra))
            p_tower = iterated_centralizer(p, hp, k)
            prev_tower = iterated_centralizer(prev, hp, k)
            ok = all(
                p_tower.terms[j].members == prev_tower.terms[j].members & p.members
                for j in range(1, k + 1)
            )
            note(k, "relative towers restrict along sampled intermediate subgroups",
                 ok, detail=f"extra={extra}")

    for idx in range(n):
        lvl = trace.tower[idx]
        e_k = lvl.subgroup
        zs = _upper_masks(e_k)
        for _ in range(samples_per_level):
            extra = rng.choice(list(iter_mask(e_k.members)))
            p = Subgroup(G, G.closure_mask(hp.members | 1 << extra))
            p_tower = iterated_centralizer(e_k, p, lvl.level)
            ok = all(
                p_tower.terms[j].members == _padded(zs, j) for j in range(1, lvl.level + 1)
            )
            note(lvl.level, "iterated centralizers of sampled subgroups equal the stage centers",
                 ok, detail=f"extra={extra}")

    e_n = trace.tower[-1].subgroup
    note(n, "envelope is Z_n of the last stage",
         trace.envelope.members == _padded(_upper_masks(e_n), n))
    note(n, "envelope contains the original subgroup",
         trace.original.members & ~trace.envelope.members == 0)
    note(n, "envelope class matches", nilpotence_class(trace.envelope) == n)

    for who, base in (("original", trace.original), ("replaced", hp)):
        norm = G.normalizer_mask(base.members)
        ok = all(
            norm & ~G.normalizer_mask(lvl.subgroup.members) == 0 for lvl in trace.tower
        ) and norm & ~G.normalizer_mask(trace.envelope.members) == 0
        note(None, f"tower and envelope are normalized by the normalizer of the {who} subgroup", ok)

    return EnvelopeReport(tuple(entries))


def trace_to_dict(trace: EnvelopeTrace) -> dict:
    """A JSON-ready description of an envelope construction."""
    return {
        "group": trace.group.name,
        "order": trace.group.order,
        "original": subgroup_to_dict(trace.original),
        "replaced": subgroup_to_dict(trace.replaced),
        "nilpotence_class": trace.nilpotence_class,
        "tower": [
            {
                "level": lvl.level,
                "subgroup": subgroup_to_dict(lvl.subgroup),
                "order": lvl.subgroup.order,
                "witnesses": list(lvl.witnesses),
            }
            for lvl in trace.tower
        ],
        "envelope": subgroup_to_dict(trace.envelope),
        "envelope_order": trace.envelope.order,
        "parameters": list(trace.parameters),
    }


def envelope_of_normal(G: FiniteGroup, H: Subgroup) -> EnvelopeTrace:
    """Envelope of a normal nilpotent subgroup; the result is checked normal."""
    if H.parent is not G:
        raise ParentMismatchError("subgroup belongs to a different group")
    if not H.is_normal:
        raise NotNormalError("subgroup is not normal in its parent")
    trace = build_envelope(G, H)
    if not trace.envelope.is_normal:
        raise InternalCheckError("envelope of a normal subgroup came out non-normal")
    return trace


# -- Fitting subgroup ----------------------------------------------------


def engel_iterate(G: FiniteGroup, g: int, x: int, max_steps: int | None = None) -> int | None:
    """Least i with [g, x, x, ..., x] (i copies of x) equal to the identity.

    Returns None when the iteration cycles without reaching the identity;
    within order(G) steps the sequence must repeat, so None is definitive.
    """
    G._check_index(g)
    G._check_index(x)
    if max_steps is None:
        max_steps = G.order
    c = g
    if c == 0:
        return 0
    seen = {c}
    for i in range(1, max_steps + 1):
        c = G._comm(c, x)
        if c == 0:
            return i
        if c in seen:
            return None
        seen.add(c)
    return None


def _prime_factors(n: int) -> tuple[int, ...]:
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return tuple(out)


def _is_prime_power(n: int, p: int) -> bool:
    while n % p == 0:
        n //= p
    return n == 1


def p_core(G: FiniteGroup, p: int) -> Subgroup:
    """The largest normal p-subgroup: elements whose normal closure is a p-group."""
    mask = 0
    for x in range(G.order):
        if _is_prime_power(len(normal_closure(G, x)), p):
            mask |= 1 << x
    if not is_subgroup_mask(G, mask):
        raise InternalCheckError(f"{p}-core candidate set is not a subgroup")
    return Subgroup(G, mask)


@dataclass(frozen=True)
class FittingReport:
    """The Fitting subgroup computed three independent ways."""

    fitting: Subgroup
    by_op_cores: Subgroup
    by_envelope: Subgroup
    by_engel: Subgroup
    engel_bound_n: int


def fitting(G: FiniteGroup) -> FittingReport:
    """The Fitting subgroup, cross-checked three ways.

    (i) the product of the p-cores over primes dividing the order, (ii) the
    envelope of that product, which must reproduce it, and (iii) the set of
    bounded left Engel elements.  Disagreement raises
    :class:`InternalCheckError`.
    """
    cores = G.trivial_subgroup()
    for p in _prime_factors(G.order):
        cores = product_set(cores, p_core(G, p))
    by_cores = cores

    if nilpotence_class(by_cores) is None:
        raise InternalCheckError("product of p-cores is not nilpotent")
    trace = build_envelope(G, by_cores)
    by_envelope = trace.envelope

    engel_mask = 0
    bound = 0
    for x in range(G.order):
        steps = []
        for g in range(G.order):
            s = engel_iterate(G, g, x)
            if s is None:
                break
            steps.append(s)
        else:
            engel_mask |= 1 << x
            bound = max(bound, max(steps))
    if not is_subgroup_mask(G, engel_mask):
        raise InternalCheckError("bounded Engel set is not a subgroup")
    by_engel = Subgroup(G, engel_mask)

    if not by_cores.members == by_envelope.members == by_engel.members:
        raise InternalCheckError("fitting computations disagree")
    return FittingReport(by_cores, by_cores, by_envelope, by_engel, bound)
