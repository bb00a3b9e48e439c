"""Named group tables, normal-subgroup enumeration, and the pair classifier.

The catalog ships as a JSON file of groups with presentations and, for the
small models, outer-automorphism data.  On top of it sit two drivers:
`enumerate_complete_normals`, which lists the complete normal subgroups of a
catalog group spanned by bounded primitive vectors, and `classify`, which
partitions the resulting pairs into affine isomorphism classes.  The
classifier works in two stages: coarse buckets by the outer conjugation
invariant, then bounded conjugacy searches inside each bucket, every merge
cross-checked cohomologically and every split recorded with a witness.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from itertools import product
from math import gcd
from pathlib import Path
from typing import Iterator, Sequence

from . import SCHEMA_TAG
from .exactalg import QMat, QSubspace, ZLattice, kernel_rational, saturation, solve_mixed_integer
from .spacegroup import (
    Isometry,
    Presentation,
    SpaceGroup,
    SubgroupHandle,
    compose,
    evaluate_word,
    invert,
)
from .fibration import FibrationSplit, fibration_split, is_complete
from .pairiso import SearchBounds, conjugation_test, group_isomorphism_search, pair_isomorphism_search
from .cohomology import (
    BaseReference,
    CohStructure,
    FiberReference,
    KappaCokernel,
    OmegaInvariant,
    _aut_maps,
    _out_reps,
    build_fiber_class,
    class_in_kappa_image,
    h1_gamma_mod_n,
    kappa_star_cokernel,
    lift_fiber_automorphism,
    omega,
    omega_equal,
)

__all__ = [
    "CatalogError",
    "CatalogEntry",
    "Catalog",
    "load_catalog",
    "save_catalog",
    "catalog_from_json",
    "catalog_to_json",
    "group_from_json",
    "group_to_json",
    "enumerate_complete_normals",
    "PairRef",
    "MergeCertificate",
    "SplitWitness",
    "PairClassRecord",
    "ClassifyResult",
    "classify",
    "result_to_json",
    "result_from_json",
    "save_result",
    "load_result",
    "verify_classification",
]

IDENTIFICATION_WORD_BOUND = 3


class CatalogError(ValueError):
    """Raised for malformed catalog files and classification inconsistencies."""


# ---------------------------------------------------------------------------
# Catalog containers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CatalogEntry:
    """One named group, with optional automorphism data for use as a model.

    out_generators are affinities generating the outer automorphisms of the
    group (used when it names a fiber model); aut_generators are word maps,
    one word per group generator, generating the automorphisms of the group
    (used when it names a base model).
    """

    name: str
    group: SpaceGroup
    out_generators: tuple[Isometry, ...] | None = None
    aut_generators: tuple[tuple[tuple[str, ...], ...], ...] | None = None

    def fiber_reference(self) -> FiberReference:
        return FiberReference(self.name, self.group, self.out_generators)

    def base_reference(self) -> BaseReference:
        return BaseReference(self.name, self.group, self.aut_generators)


@dataclass(frozen=True)
class Catalog:
    """Immutable name-indexed collection of catalog entries."""

    entries: tuple[CatalogEntry, ...]

    def __post_init__(self) -> None:
        index = {}
        for e in self.entries:
            if e.name in index:
                raise CatalogError(f"duplicate catalog entry: {e.name}")
            index[e.name] = e
        object.__setattr__(self, "_index", index)

    def names(self) -> tuple[str, ...]:
        return tuple(e.name for e in self.entries)

    def entry(self, name: str) -> CatalogEntry:
        hit = self._index.get(name)
        if hit is None:
            raise CatalogError(f"unknown catalog group: {name}")
        return hit

    def group(self, name: str) -> SpaceGroup:
        return self.entry(name).group

    def of_dimension(self, n: int) -> tuple[CatalogEntry, ...]:
        return tuple(e for e in self.entries if e.group.dimension == n)


# ---------------------------------------------------------------------------
# JSON serialization
#
# Rationals travel as "p/q" strings so round-trips are exact; files carry a
# schema tag and are dumped with sorted keys for canonical ordering.
# ---------------------------------------------------------------------------


def _frac_out(x: Fraction) -> str:
    return str(x)


def _frac_in(s) -> Fraction:
    try:
        return Fraction(str(s))
    except (ValueError, ZeroDivisionError) as err:
        raise CatalogError(f"bad rational literal {s!r}: {err}") from None


def _mat_out(m: QMat) -> list[list[str]]:
    return [[_frac_out(x) for x in row] for row in m.rows]


def _mat_in(rows, what: str) -> QMat:
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise CatalogError(f"{what} must be a list of rows")
    return QMat([[_frac_in(x) for x in r] for r in rows])


def _iso_out(g: Isometry) -> dict:
    return {"matrix": _mat_out(g.matrix), "translation": [_frac_out(x) for x in g.translation]}


def _iso_in(obj, what: str) -> Isometry:
    if not isinstance(obj, dict) or "matrix" not in obj or "translation" not in obj:
        raise CatalogError(f"{what} must carry matrix and translation")
    mat = _mat_in(obj["matrix"], f"{what} matrix")
    return Isometry(mat, [_frac_in(x) for x in obj["translation"]])


def group_to_json(entry: CatalogEntry) -> dict:
    g = entry.group
    pres = g.presentation
    payload = {
        "name": entry.name,
        "dimension": g.dimension,
        "gram": _mat_out(g.gram),
        "lattice": _mat_out(g.lattice.basis),
        "coset_reps": [_iso_out(r) for r in g.coset_reps],
        "presentation": None
        if pres is None
        else {
            "generators": [_iso_out(x) for x in pres.generators],
            "relators": [list(w) for w in pres.relators],
        },
        "out_generators": None
        if entry.out_generators is None
        else [_iso_out(x) for x in entry.out_generators],
        "aut_generators": None
        if entry.aut_generators is None
        else [[list(w) for w in word_map] for word_map in entry.aut_generators],
    }
    return payload


def _check_closure(name: str, reps: Sequence[Isometry], lattice: ZLattice) -> None:
    # Representative products must land back on a representative modulo the
    # lattice; a failure names the offending index pair.
    by_point = {r.matrix.rows: r for r in reps}
    if len(by_point) != len(reps):
        raise CatalogError(f"group {name}: repeated point part among coset representatives")
    for i, a in enumerate(reps):
        for j, b in enumerate(reps):
            prod = compose(a, b)
            hit = by_point.get(prod.matrix.rows)
            if hit is None or not lattice.contains(
                tuple(x - y for x, y in zip(prod.translation, hit.translation))
            ):
                raise CatalogError(
                    f"group {name}: coset representatives ({i}, {j}) break the closure congruence"
                )


def group_from_json(payload: dict) -> CatalogEntry:
    if not isinstance(payload, dict):
        raise CatalogError("group entry must be an object")
    name = payload.get("name")
    if not isinstance(name, str) or not name:
        raise CatalogError("group entry lacks a name")
    for key in ("dimension", "gram", "lattice", "coset_reps"):
        if key not in payload:
            raise CatalogError(f"group {name}: missing field {key}")
    dim = payload["dimension"]
    gram = _mat_in(payload["gram"], f"group {name} gram")
    lattice_mat = _mat_in(payload["lattice"], f"group {name} lattice")
    try:
        lattice = ZLattice(lattice_mat, dim)
    except ValueError as err:
        raise CatalogError(f"group {name}: {err}") from None
    reps = [_iso_in(r, f"group {name} coset rep") for r in payload["coset_reps"]]
    _check_closure(name, reps, lattice)
    try:
        group = SpaceGroup(dim, gram, lattice, tuple(reps), name)
    except ValueError as err:
        raise CatalogError(f"group {name}: {err}") from None
    pres = payload.get("presentation")
    if pres is not None:
        gens = [_iso_in(x, f"group {name} presentation generator") for x in pres["generators"]]
        relators = tuple(tuple(tok for tok in w) for w in pres["relators"])
        group = group.with_presentation(Presentation(tuple(gens), relators))
    out = payload.get("out_generators")
    aut = payload.get("aut_generators")
    return CatalogEntry(
        name,
        group,
        None if out is None else tuple(_iso_in(x, f"group {name} outer generator") for x in out),
        None if aut is None else tuple(tuple(tuple(w) for w in wm) for wm in aut),
    )


def catalog_to_json(catalog: Catalog) -> dict:
    return {
        "schema": SCHEMA_TAG,
        "groups": [group_to_json(e) for e in sorted(catalog.entries, key=lambda e: e.name)],
    }


def catalog_from_json(payload: dict) -> Catalog:
    if not isinstance(payload, dict) or payload.get("schema") != SCHEMA_TAG:
        raise CatalogError(f"catalog file must declare schema {SCHEMA_TAG!r}")
    groups = payload.get("groups")
    if not isinstance(groups, list):
        raise CatalogError("catalog file lacks a group list")
    return Catalog(tuple(group_from_json(g) for g in groups))


def _parse_json_text(text: str) -> dict:
    try:
        return json.loads(text)
    except json.JSONDecodeError as err:
        raise CatalogError(
            f"parse error at line {err.lineno}, column {err.colno}: {err.msg}"
        ) from None


def load_catalog(path: str | Path | None = None) -> Catalog:
    """The packaged catalog, or one loaded from an explicit path."""
    if path is None:
        text = resources.files("flatfiber").joinpath("data/groups.json").read_text()
    else:
        text = Path(path).read_text()
    return catalog_from_json(_parse_json_text(text))


def save_catalog(catalog: Catalog, path: str | Path) -> None:
    Path(path).write_text(json.dumps(catalog_to_json(catalog), indent=2, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# Complete normal subgroup enumeration
# ---------------------------------------------------------------------------


def _primitive_vectors(n: int, bound: int) -> list[tuple[Fraction, ...]]:
    """Primitive integer vectors with coordinates in [-bound, bound].

    Sign-normalized: the first nonzero coordinate is positive, so each line
    through the origin appears once.
    """
    out = []
    for tup in product(range(-bound, bound + 1), repeat=n):
        nz = [x for x in tup if x]
        if not nz or nz[0] < 0:
            continue
        g = 0
        for x in nz:
            g = gcd(g, abs(x))
        if g != 1:
            continue
        out.append(tuple(Fraction(x) for x in tup))
    out.sort()
    return out


def _candidate_spans(group: SpaceGroup, fiber_dim: int, bound: int) -> list[QSubspace]:
    n = group.dimension
    prims = _primitive_vectors(n, bound)
    spans: dict = {}
    if fiber_dim == 1:
        for v in prims:
            spans.setdefault((v,), QSubspace(QMat([v], n), n))
    elif fiber_dim == 2:
        for i, v in enumerate(prims):
            for w in prims[i + 1 :]:
                sub = QSubspace(QMat([v, w], n), n)
                if sub.dim != 2:
                    continue
                spans.setdefault(sub.basis.rows, sub)
    else:
        raise ValueError("fiber dimension must be 1 or 2")
    return list(spans.values())


def _point_invariant(group: SpaceGroup, sub: QSubspace) -> bool:
    for rep in group.coset_reps:
        for i in range(sub.basis.nrows):
            if not sub.contains(rep.matrix.matvec(sub.basis.row(i))):
                return False
    return True


def _span_subgroup(group: SpaceGroup, sub: QSubspace) -> SubgroupHandle:
    """The group of all elements translating inside `sub` and fixing its
    orthogonal complement pointwise, as a handle on canonical generators."""
    n = group.dimension
    lat = saturation(group.lattice, sub)
    perp = kernel_rational(sub.basis * group.gram)
    vcols = QMat.from_cols([sub.basis.row(i) for i in range(sub.basis.nrows)], n)
    lcols = group.lattice.basis.transpose()
    gens = [Isometry.translation_by(lat.basis.row(i)) for i in range(lat.rank)]
    extra = []
    for rep in group.coset_reps:
        if rep.is_identity():
            continue
        if any(
            rep.matrix.matvec(perp.row(i)) != perp.row(i) for i in range(perp.nrows)
        ):
            continue
        sol = solve_mixed_integer(vcols, lcols, rep.translation)
        if sol is None:
            continue
        shift = lcols.matvec(sol[1])
        extra.append(Isometry(rep.matrix, [a - s for a, s in zip(rep.translation, shift)]))
    extra.sort(key=lambda g: (g.matrix.rows, g.translation))
    return SubgroupHandle(group, gens + extra)


def subgroup_key(handle: SubgroupHandle):
    """Canonical sort and dedupe key: lattice in HNF plus the point parts."""
    ana = handle.analysis()
    return (ana.translations.basis.rows, tuple(sorted(ana.transversal.keys())))


def enumerate_complete_normals(
    group: SpaceGroup, fiber_dim: int, bound: int
) -> list[SubgroupHandle]:
    """Complete normal subgroups spanned by bounded primitive vectors.

    Candidate spans are lines (fiber_dim 1) or planes (fiber_dim 2) through
    primitive lattice vectors with coordinates up to `bound`.  A span
    survives when every point part preserves it; its span subgroup is kept
    when complete.  The result is deduplicated and canonically sorted, so it
    does not depend on candidate order.
    """
    out = []
    seen = set()
    for sub in _candidate_spans(group, fiber_dim, bound):
        if not _point_invariant(group, sub):
            continue
        handle = _span_subgroup(group, sub)
        if not is_complete(group, handle):
            continue
        key = subgroup_key(handle)
        if key in seen:
            continue
        seen.add(key)
        out.append(handle)
    out.sort(key=subgroup_key)
    return out


# ---------------------------------------------------------------------------
# Classification records
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PairRef:
    """A pair named by ambient group and subgroup generators."""

    group_name: str
    subgroup_generators: tuple[Isometry, ...]


@dataclass(frozen=True)
class MergeCertificate:
    """A verified conjugator carrying `source` onto `target`.

    via_kappa records the route: False for a direct bounded search hit,
    True when the conjugator came out of a cohomology class membership
    witness.  Both routes end in the same conjugation test.
    """

    source: PairRef
    target: PairRef
    conjugator: Isometry
    via_kappa: bool


@dataclass(frozen=True)
class SplitWitness:
    """Recorded evidence that two class representatives stay distinct.

    kind is "omega-image" (outer invariants differ), "cohomology" (every
    bounded identification leaves an obstruction class outside the
    comparison image), or "unresolved-within-bounds" (no evidence either
    way; the run is marked indeterminate).
    """

    first: PairRef
    second: PairRef
    kind: str
    detail: str


@dataclass(frozen=True)
class PairClassRecord:
    """One isomorphism class of pairs, with invariants and certificates."""

    group_name: str
    subgroup_generators: tuple[Isometry, ...]
    fiber_name: str
    base_name: str
    omega_invariant: OmegaInvariant = field(compare=False)
    h1_structure: CohStructure
    kappa_cokernel: KappaCokernel
    members: tuple[PairRef, ...]
    certificates: tuple[MergeCertificate, ...]

    def representative(self) -> PairRef:
        return PairRef(self.group_name, self.subgroup_generators)


@dataclass(frozen=True)
class ClassifyResult:
    """Full outcome of one classification run."""

    base_name: str
    fiber_name: str
    bound: int
    pool: tuple[str, ...]
    records: tuple[PairClassRecord, ...]
    splits: tuple[SplitWitness, ...]
    indeterminate: bool


# ---------------------------------------------------------------------------
# The classifier
# ---------------------------------------------------------------------------


@dataclass
class _Candidate:
    entry: CatalogEntry
    handle: SubgroupHandle
    split: FibrationSplit
    alpha: Isometry  # fiber of the split -> fiber model
    beta: Isometry  # base model -> base of the split
    invariant: OmegaInvariant

    @property
    def ref(self) -> PairRef:
        return PairRef(self.entry.name, self.handle.gens)


def _model_identifications(
    fiber_ref: FiberReference, base_ref: BaseReference, word_bound: int
) -> tuple[list[Isometry], list[Isometry]]:
    """Outer representatives of the fiber model and automorphism affinities
    of the base model, enumerated once per run."""
    psis = _out_reps(fiber_ref, word_bound)
    auts = []
    gens = base_ref.group.generators()
    for word_map in _aut_maps(base_ref, word_bound):
        images = [evaluate_word(gens, w) for w in word_map]
        try:
            auts.append(lift_fiber_automorphism(base_ref.group, base_ref.group, images))
        except ValueError:
            continue
    return psis, auts


def _identifications(
    r: _Candidate, c: _Candidate, psis: Sequence[Isometry], auts: Sequence[Isometry]
) -> Iterator[tuple[Isometry, Isometry]]:
    # Identifications r -> c through the models: alpha_c^(-1) psi alpha_r on
    # fibers and beta_c aut beta_r^(-1) on bases.
    inv_alpha_c = invert(c.alpha)
    inv_beta_r = invert(r.beta)
    for psi in psis:
        alpha_rc = compose(compose(inv_alpha_c, psi), r.alpha)
        for aut in auts:
            beta_rc = compose(compose(c.beta, aut), inv_beta_r)
            yield alpha_rc, beta_rc


def _attempt_merge(
    member: _Candidate,
    cand: _Candidate,
    bounds: SearchBounds,
    psis: Sequence[Isometry],
    auts: Sequence[Isometry],
) -> MergeCertificate | None:
    res = pair_isomorphism_search(member.split, cand.split, bounds)
    if res.found:
        obstruction = build_fiber_class(
            member.split, cand.split, res.fiber_affinity, res.base_affinity
        )
        if class_in_kappa_image(obstruction) is None:
            raise CatalogError("merge certificate failed its cohomological cross-check")
        return MergeCertificate(member.ref, cand.ref, res.conjugator, False)
    for alpha_rc, beta_rc in _identifications(member, cand, psis, auts):
        try:
            obstruction = build_fiber_class(member.split, cand.split, alpha_rc, beta_rc)
        except ValueError:
            continue
        witness = class_in_kappa_image(obstruction)
        if witness is not None:
            return MergeCertificate(member.ref, cand.ref, witness.conjugator, True)
    return None


def _split_witness(
    a: _Candidate, b: _Candidate, psis: Sequence[Isometry], auts: Sequence[Isometry]
) -> SplitWitness:
    if not omega_equal(a.invariant, b.invariant, IDENTIFICATION_WORD_BOUND):
        if a.invariant.image_order() != b.invariant.image_order():
            detail = (
                f"outer images have orders {a.invariant.image_order()} "
                f"and {b.invariant.image_order()}"
            )
        else:
            detail = "no outer identification aligns the conjugation data within the word bound"
        return SplitWitness(a.ref, b.ref, "omega-image", detail)
    obstructed = 0
    for alpha_rc, beta_rc in _identifications(a, b, psis, auts):
        try:
            obstruction = build_fiber_class(a.split, b.split, alpha_rc, beta_rc)
        except ValueError:
            continue
        if class_in_kappa_image(obstruction) is not None:
            raise CatalogError("split pair admits a conjugator; classification is inconsistent")
        obstructed += 1
    if obstructed:
        return SplitWitness(
            a.ref,
            b.ref,
            "cohomology",
            f"{obstructed} compatible identification(s), each leaving its class "
            "outside the comparison image",
        )
    return SplitWitness(
        a.ref,
        b.ref,
        "unresolved-within-bounds",
        "outer data matches but no bounded identification is affinely compatible",
    )


@dataclass
class _ClassBuilder:
    members: list
    certificates: list

    def __init__(self, first: _Candidate):
        self.members = [first]
        self.certificates = []

    @property
    def rep(self) -> _Candidate:
        return self.members[0]


def _gather_candidates(
    pool_entries: Sequence[CatalogEntry],
    fiber_entry: CatalogEntry,
    base_entry: CatalogEntry,
    fiber_ref: FiberReference,
    base_ref: BaseReference,
    bound: int,
    bounds: SearchBounds,
) -> list[_Candidate]:
    fiber_dim = fiber_entry.group.dimension
    out = []
    for entry in pool_entries:
        for handle in enumerate_complete_normals(entry.group, fiber_dim, bound):
            split = fibration_split(entry.group, handle)
            alpha = group_isomorphism_search(split.fiber, fiber_entry.group, bounds)
            if alpha is None:
                continue
            beta = group_isomorphism_search(base_entry.group, split.base, bounds)
            if beta is None:
                continue
            inv = omega(split, fiber_ref, base_ref, alpha=alpha, beta=beta)
            out.append(_Candidate(entry, handle, split, alpha, beta, inv))
    out.sort(key=lambda c: (c.entry.name, subgroup_key(c.handle)))
    return out


def classify(
    catalog: Catalog,
    base_name: str,
    fiber_name: str,
    bound: int = 2,
    pool: Sequence[str] | None = None,
    bounds: SearchBounds | None = None,
) -> ClassifyResult:
    """Isomorphism classes of pairs with the given base and fiber models.

    Scans every catalog group of the right dimension (or the named pool),
    enumerates complete normal subgroups up to the primitive-vector bound,
    keeps the pairs whose fiber and base match the models, and partitions
    them.  Merges carry verified conjugators; splits carry witnesses.  The
    result is deterministic: candidates are processed in canonical order.
    """
    bounds = bounds or SearchBounds()
    fiber_entry = catalog.entry(fiber_name)
    base_entry = catalog.entry(base_name)
    if fiber_entry.out_generators is None:
        raise CatalogError(f"fiber model {fiber_name} lacks outer-automorphism data")
    if base_entry.aut_generators is None:
        raise CatalogError(f"base model {base_name} lacks automorphism data")
    fiber_ref = fiber_entry.fiber_reference()
    base_ref = base_entry.base_reference()
    ambient_dim = fiber_entry.group.dimension + base_entry.group.dimension
    if pool is None:
        pool_entries = catalog.of_dimension(ambient_dim)
    else:
        pool_entries = tuple(catalog.entry(name) for name in pool)
        for e in pool_entries:
            if e.group.dimension != ambient_dim:
                raise CatalogError(f"pool group {e.name} has the wrong dimension")
    psis, auts = _model_identifications(fiber_ref, base_ref, IDENTIFICATION_WORD_BOUND)

    candidates = _gather_candidates(
        pool_entries, fiber_entry, base_entry, fiber_ref, base_ref, bound, bounds
    )
    classes: list[_ClassBuilder] = []
    for cand in candidates:
        placed = False
        for cls in classes:
            if not omega_equal(cls.rep.invariant, cand.invariant, IDENTIFICATION_WORD_BOUND):
                continue
            for member in cls.members:
                cert = _attempt_merge(member, cand, bounds, psis, auts)
                if cert is not None:
                    cls.members.append(cand)
                    cls.certificates.append(cert)
                    placed = True
                    break
            if placed:
                break
        if not placed:
            classes.append(_ClassBuilder(cand))

    splits = []
    indeterminate = False
    for i, a in enumerate(classes):
        for b in classes[i + 1 :]:
            w = _split_witness(a.rep, b.rep, psis, auts)
            if w.kind == "unresolved-within-bounds":
                indeterminate = True
            splits.append(w)

    records = []
    for cls in classes:
        rep = cls.rep
        records.append(
            PairClassRecord(
                group_name=rep.entry.name,
                subgroup_generators=rep.handle.gens,
                fiber_name=fiber_name,
                base_name=base_name,
                omega_invariant=rep.invariant,
                h1_structure=h1_gamma_mod_n(rep.split, "K").structure,
                kappa_cokernel=kappa_star_cokernel(rep.split),
                members=tuple(m.ref for m in cls.members),
                certificates=tuple(cls.certificates),
            )
        )
    return ClassifyResult(
        base_name=base_name,
        fiber_name=fiber_name,
        bound=bound,
        pool=tuple(e.name for e in pool_entries),
        records=tuple(records),
        splits=tuple(splits),
        indeterminate=indeterminate,
    )


# ---------------------------------------------------------------------------
# Classification persistence
# ---------------------------------------------------------------------------


def _ref_out(ref: PairRef) -> dict:
    return {
        "group": ref.group_name,
        "subgroup_generators": [_iso_out(g) for g in ref.subgroup_generators],
    }


def _ref_in(obj, what: str) -> PairRef:
    if not isinstance(obj, dict) or "group" not in obj:
        raise CatalogError(f"{what} must name a group")
    return PairRef(
        obj["group"],
        tuple(_iso_in(g, f"{what} generator") for g in obj.get("subgroup_generators", [])),
    )


def _structure_out(s: CohStructure) -> dict:
    return {
        "divisible_rank": s.divisible_rank,
        "invariant_factors": list(s.invariant_factors),
        "divisible_symbol": s.divisible_symbol,
    }


def _omega_out(inv: OmegaInvariant) -> dict:
    return {
        "fiber": inv.fiber_name,
        "base": inv.base_name,
        "image_order": inv.image_order(),
        "image_classes": list(inv.image_classes),
        "hom_images": [[_iso_out(g) for g in row] for row in inv.hom_images],
    }


def result_to_json(result: ClassifyResult) -> dict:
    return {
        "schema": SCHEMA_TAG,
        "kind": "pair-classification",
        "base": result.base_name,
        "fiber": result.fiber_name,
        "bound": result.bound,
        "pool": list(result.pool),
        "indeterminate": result.indeterminate,
        "records": [
            {
                "group": r.group_name,
                "subgroup_generators": [_iso_out(g) for g in r.subgroup_generators],
                "fiber_name": r.fiber_name,
                "base_name": r.base_name,
                "omega": _omega_out(r.omega_invariant),
                "h1_structure": _structure_out(r.h1_structure),
                "kappa_cokernel": {
                    "structure": _structure_out(r.kappa_cokernel.structure),
                    "hom_level": _structure_out(r.kappa_cokernel.hom_level),
                    "finite_level": _structure_out(r.kappa_cokernel.finite_level),
                },
                "members": [_ref_out(m) for m in r.members],
                "certificates": [
                    {
                        "source": _ref_out(c.source),
                        "target": _ref_out(c.target),
                        "conjugator": _iso_out(c.conjugator),
                        "via_kappa": c.via_kappa,
                    }
                    for c in r.certificates
                ],
            }
            for r in result.records
        ],
        "splits": [
            {
                "first": _ref_out(w.first),
                "second": _ref_out(w.second),
                "kind": w.kind,
                "detail": w.detail,
            }
            for w in result.splits
        ],
    }


def result_from_json(payload: dict) -> dict:
    """Light validation of a stored classification; returns the payload."""
    if not isinstance(payload, dict) or payload.get("schema") != SCHEMA_TAG:
        raise CatalogError(f"classification file must declare schema {SCHEMA_TAG!r}")
    if payload.get("kind") != "pair-classification":
        raise CatalogError("file does not hold a pair classification")
    for key in ("base", "fiber", "bound", "records", "splits"):
        if key not in payload:
            raise CatalogError(f"classification file missing field {key}")
    return payload


def save_result(result: ClassifyResult, path: str | Path) -> None:
    Path(path).write_text(json.dumps(result_to_json(result), indent=2, sort_keys=True) + "\n")


def load_result(path: str | Path) -> dict:
    return result_from_json(_parse_json_text(Path(path).read_text()))


def verify_classification(catalog: Catalog, payload: dict) -> int:
    """Re-verifies every merge certificate in a stored classification.

    Subgroups are rebuilt from their generators over the named catalog
    groups and each conjugator is re-run through the pair conjugation test.
    Returns the number of certificates checked; raises on any failure.
    """
    payload = result_from_json(payload)
    checked = 0
    for rec in payload["records"]:
        for cert in rec["certificates"]:
            src = _ref_in(cert["source"], "certificate source")
            dst = _ref_in(cert["target"], "certificate target")
            phi = _iso_in(cert["conjugator"], "certificate conjugator")
            g1 = catalog.group(src.group_name)
            g2 = catalog.group(dst.group_name)
            sub1 = SubgroupHandle(g1, src.subgroup_generators)
            sub2 = SubgroupHandle(g2, dst.subgroup_generators)
            if not conjugation_test(phi, g1, sub1, g2, sub2):
                raise CatalogError(
                    f"certificate {src.group_name} -> {dst.group_name} failed re-verification"
                )
            checked += 1
    return checked
