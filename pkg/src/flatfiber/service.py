"""HTTP face of the toolkit: a FastAPI app over the packaged catalog.

Every endpoint takes and returns plain JSON with rationals as "p/q"
strings, mirroring the on-disk formats, so responses can be saved and fed
back (the /verify endpoint accepts exactly what /classify produces).
"""

from __future__ import annotations

import functools
from fractions import Fraction
from functools import lru_cache

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from . import SCHEMA_TAG, __version__
from .catalog import (
    Catalog,
    CatalogEntry,
    CatalogError,
    _iso_in,
    _iso_out,
    _point_invariant,
    _span_subgroup,
    _structure_out,
    classify,
    enumerate_complete_normals,
    group_to_json,
    load_catalog,
    result_to_json,
    verify_classification,
)
from .cohomology import h1_gamma_mod_n, kappa_star_cokernel
from .exactalg import QMat, QSubspace
from .fibration import fibration_split, is_complete, theorem1_check
from .pairiso import SearchBounds, pair_isomorphism_search
from .spacegroup import SpaceGroup, SubgroupHandle


# ---------------------------------------------------------------------------
# Wire models
# ---------------------------------------------------------------------------


class IsometryModel(BaseModel):
    matrix: list[list[str]]
    translation: list[str]


class PairSpec(BaseModel):
    """A pair named by catalog group plus either a span or explicit generators."""

    group: str
    span: list[list[str | int]] | None = None
    subgroup_generators: list[IsometryModel] | None = None


class HealthResponse(BaseModel):
    status: str
    version: str
    schema_tag: str


class CatalogItem(BaseModel):
    name: str
    dimension: int
    point_group_order: int
    has_model_data: bool


class CatalogListResponse(BaseModel):
    groups: list[CatalogItem]


class NormalsRequest(BaseModel):
    group: str
    fiber_dim: int = 1
    bound: int = 2


class SubgroupSummary(BaseModel):
    generators: list[IsometryModel]
    lattice: list[list[str]]
    point_part_count: int


class NormalsResponse(BaseModel):
    group: str
    fiber_dim: int
    bound: int
    subgroups: list[SubgroupSummary]


class AnalyzeRequest(BaseModel):
    pair: PairSpec


class AnalyzeResponse(BaseModel):
    group: str
    complete: bool
    theorem1_ok: bool
    fiber: dict | None = None
    base: dict | None = None
    fiber_dimension: int | None = None
    base_dimension: int | None = None


class PairIsoRequest(BaseModel):
    first: PairSpec
    second: PairSpec
    linear_bound: int = 2
    translation_denominator: int = 2


class PairIsoResponse(BaseModel):
    verdict: str
    conjugator: IsometryModel | None = None


class StructureData(BaseModel):
    divisible_rank: int
    invariant_factors: list[int]
    divisible_symbol: str


class KappaData(BaseModel):
    structure: StructureData
    hom_level: StructureData
    finite_level: StructureData


class CohomologyRequest(BaseModel):
    pair: PairSpec


class CohomologyResponse(BaseModel):
    group: str
    h1_torus: StructureData
    h1_torus_description: str
    h1_span: StructureData
    kappa_cokernel: KappaData


class ClassifyRequest(BaseModel):
    base: str
    fiber: str
    bound: int = 2
    pool: list[str] | None = None
    linear_bound: int = 2
    translation_denominator: int = 2


class VerifyResponse(BaseModel):
    certificates_checked: int


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------


def _pair_handle(cat: Catalog, spec: PairSpec) -> tuple[SpaceGroup, SubgroupHandle]:
    group = cat.group(spec.group)
    if (spec.span is None) == (spec.subgroup_generators is None):
        raise CatalogError("specify exactly one of span or subgroup_generators")
    if spec.span is not None:
        rows = [[Fraction(str(x)) for x in row] for row in spec.span]
        sub = QSubspace(QMat(rows, group.dimension), group.dimension)
        if sub.dim != len(rows):
            raise CatalogError("span vectors are linearly dependent")
        if not _point_invariant(group, sub):
            raise CatalogError("span is not invariant under the point group")
        return group, _span_subgroup(group, sub)
    gens = [_iso_in(g.model_dump(), "subgroup generator") for g in spec.subgroup_generators]
    return group, SubgroupHandle(group, gens)


def _split_of(cat: Catalog, spec: PairSpec):
    group, handle = _pair_handle(cat, spec)
    if not is_complete(group, handle):
        raise CatalogError("subgroup is not complete; the pair operations need a complete normal subgroup")
    return fibration_split(group, handle)


# ---------------------------------------------------------------------------
# App factory
# ---------------------------------------------------------------------------


def create_app(catalog: Catalog | None = None) -> FastAPI:
    app = FastAPI(title="flatfiber", version=__version__)
    cat = catalog if catalog is not None else load_catalog()

    def guard(fn):
        # Domain failures arrive as ValueError subclasses; expose them as 422.
        # functools.wraps keeps the signature visible for request binding.
        @functools.wraps(fn)
        def run(*args, **kwargs):
            try:
                return fn(*args, **kwargs)
            except (CatalogError, ValueError) as err:
                raise HTTPException(status_code=422, detail=str(err)) from None

        return run

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", version=__version__, schema_tag=SCHEMA_TAG)

    @app.get("/catalog", response_model=CatalogListResponse)
    def catalog_list() -> CatalogListResponse:
        items = [
            CatalogItem(
                name=e.name,
                dimension=e.group.dimension,
                point_group_order=e.group.point_group_order,
                has_model_data=e.out_generators is not None and e.aut_generators is not None,
            )
            for e in cat.entries
        ]
        return CatalogListResponse(groups=sorted(items, key=lambda i: (i.dimension, i.name)))

    @app.get("/catalog/{name}")
    def catalog_show(name: str) -> dict:
        try:
            entry = cat.entry(name)
        except CatalogError as err:
            raise HTTPException(status_code=404, detail=str(err)) from None
        return group_to_json(entry)

    @app.post("/normal-subgroups", response_model=NormalsResponse)
    @guard
    def normals(req: NormalsRequest) -> NormalsResponse:
        group = cat.group(req.group)
        subs = []
        for handle in enumerate_complete_normals(group, req.fiber_dim, req.bound):
            ana = handle.analysis()
            subs.append(
                SubgroupSummary(
                    generators=[IsometryModel(**_iso_out(g)) for g in handle.gens],
                    lattice=[[str(x) for x in row] for row in ana.translations.basis.rows],
                    point_part_count=len(ana.transversal),
                )
            )
        return NormalsResponse(
            group=req.group, fiber_dim=req.fiber_dim, bound=req.bound, subgroups=subs
        )

    @app.post("/analyze", response_model=AnalyzeResponse)
    @guard
    def analyze(req: AnalyzeRequest) -> AnalyzeResponse:
        group, handle = _pair_handle(cat, req.pair)
        report = theorem1_check(group, handle)
        complete = is_complete(group, handle)
        if not complete:
            return AnalyzeResponse(group=req.pair.group, complete=False, theorem1_ok=report.passed)
        split = fibration_split(group, handle)
        fiber_entry = CatalogEntry(split.fiber.name or "fiber", split.fiber, None, None)
        base_entry = CatalogEntry(split.base.name or "base", split.base, None, None)
        return AnalyzeResponse(
            group=req.pair.group,
            complete=True,
            theorem1_ok=report.passed,
            fiber=group_to_json(fiber_entry),
            base=group_to_json(base_entry),
            fiber_dimension=split.fiber.dimension,
            base_dimension=split.base.dimension,
        )

    @app.post("/pair-iso", response_model=PairIsoResponse)
    @guard
    def pair_iso(req: PairIsoRequest) -> PairIsoResponse:
        split1 = _split_of(cat, req.first)
        split2 = _split_of(cat, req.second)
        bounds = SearchBounds(req.linear_bound, req.translation_denominator)
        res = pair_isomorphism_search(split1, split2, bounds)
        return PairIsoResponse(
            verdict=res.verdict,
            conjugator=None if res.conjugator is None else IsometryModel(**_iso_out(res.conjugator)),
        )

    @app.post("/cohomology", response_model=CohomologyResponse)
    @guard
    def cohomology(req: CohomologyRequest) -> CohomologyResponse:
        split = _split_of(cat, req.pair)
        torus = h1_gamma_mod_n(split, "K").structure
        span = h1_gamma_mod_n(split, "C").structure
        kap = kappa_star_cokernel(split)
        return CohomologyResponse(
            group=req.pair.group,
            h1_torus=StructureData(**_structure_out(torus)),
            h1_torus_description=torus.describe(),
            h1_span=StructureData(**_structure_out(span)),
            kappa_cokernel=KappaData(
                structure=StructureData(**_structure_out(kap.structure)),
                hom_level=StructureData(**_structure_out(kap.hom_level)),
                finite_level=StructureData(**_structure_out(kap.finite_level)),
            ),
        )

    @app.post("/classify")
    @guard
    def classify_pairs(req: ClassifyRequest) -> dict:
        result = classify(
            cat,
            req.base,
            req.fiber,
            bound=req.bound,
            pool=req.pool,
            bounds=SearchBounds(req.linear_bound, req.translation_denominator),
        )
        return result_to_json(result)

    @app.post("/verify", response_model=VerifyResponse)
    @guard
    def verify(payload: dict) -> VerifyResponse:
        return VerifyResponse(certificates_checked=verify_classification(cat, payload))

    return app


@lru_cache(maxsize=1)
def default_app() -> FastAPI:
    """Process-wide app over the packaged catalog (one catalog load)."""
    return create_app()
