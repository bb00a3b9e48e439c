"""Geometry of a normal subgroup: span, completeness, and the fiber/base split.

A normal subgroup N of an n-dimensional space group spans a rational subspace
V.  Every group element then acts diagonally on V and its Gram-orthogonal
complement, and when N is "complete" (it already contains everything in the
ambient group that moves only along V), the two diagonal actions are space
groups in their own right: an m-dimensional fiber group on V and an
(n-m)-dimensional base group on the complement.  This module computes the
split, decides completeness, and packages the projection and section maps the
rest of the toolkit consumes.

All coordinates are exact rationals.  Fiber coordinates are taken in the
Hermite basis of (lattice cap V) and base coordinates in the Hermite basis of
(lattice cap V-perp), so results are reproducible across runs.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .exactalg import (
    QMat,
    QSubspace,
    ZLattice,
    g_orthogonal_complement,
    lattice_sum,
    row_hnf_rational,
    saturation,
    solve_integer_linear,
)
from .spacegroup import (
    Isometry,
    SpaceGroup,
    SubgroupHandle,
    closure_with_transform,
    compose,
    group_from_generators,
    invert,
    is_normal,
    translation_subgroup,
)

Vec = tuple[Fraction, ...]


@dataclass(frozen=True)
class SpanData:
    """Rational splitting of ambient space induced by a subgroup's translations.

    `fiber_basis` rows span V and are a Hermite basis of (lattice cap V);
    `base_basis` rows play the same role for the orthogonal complement.  The
    embed/project matrices convert between ambient coordinates and the two
    block coordinate systems; the projectors are the associated idempotents
    on ambient space.
    """

    ambient_dim: int
    gram: QMat
    lattice: ZLattice
    V: QSubspace
    Vperp: QSubspace
    fiber_basis: QMat
    base_basis: QMat
    fiber_embed: QMat
    fiber_project: QMat
    base_embed: QMat
    base_project: QMat
    projector_V: QMat
    projector_Vperp: QMat

    @property
    def fiber_dim(self) -> int:
        return self.fiber_basis.nrows

    @property
    def base_dim(self) -> int:
        return self.base_basis.nrows

    @property
    def fiber_gram(self) -> QMat:
        return self.fiber_embed.transpose() * self.gram * self.fiber_embed

    @property
    def base_gram(self) -> QMat:
        return self.base_embed.transpose() * self.gram * self.base_embed


@dataclass(frozen=True)
class SplitIsometry:
    """Diagonal action of one isometry: an affine map on each block."""

    fiber_part: Isometry
    base_part: Isometry


@dataclass(frozen=True)
class Theorem1Report:
    """Structural facts about a normal subgroup's span.

    `span_preserved`: every ambient generator maps V onto V.
    `members_aligned`: every subgroup generator translates along V and fixes
    the complement pointwise.  Both hold for any genuinely normal subgroup,
    so a failure indicates corrupted input.
    """

    span_preserved: bool
    members_aligned: bool
    failures: tuple[str, ...]

    @property
    def passed(self) -> bool:
        return self.span_preserved and self.members_aligned


def span(subgroup: SubgroupHandle) -> SpanData:
    """Rational span of a subgroup's translations, with charts for both blocks."""
    group = subgroup.parent
    n = group.dimension
    trans = translation_subgroup(subgroup)
    v_space = QSubspace(trans.basis, n)
    vperp = g_orthogonal_complement(v_space, group.gram)
    fiber_lat = saturation(group.lattice, v_space)
    base_lat = saturation(group.lattice, vperp)
    fiber_basis = fiber_lat.basis
    if base_lat.rank == vperp.dim:
        base_basis = base_lat.basis
    else:
        # Complement not lattice-rational; fall back to a canonical rational
        # basis.  Unreachable for rational Gram forms, kept for safety.
        base_basis = row_hnf_rational(vperp.basis.rows, n)
    stacked = QMat(list(fiber_basis.rows) + list(base_basis.rows), n)
    if stacked.nrows != n:
        raise ValueError("span and complement do not fill ambient space")
    coords = stacked.transpose().inverse()
    m = fiber_basis.nrows
    fiber_project = QMat(coords.rows[:m], n)
    base_project = QMat(coords.rows[m:], n)
    fiber_embed = fiber_basis.transpose()
    base_embed = base_basis.transpose()
    return SpanData(
        ambient_dim=n,
        gram=group.gram,
        lattice=group.lattice,
        V=v_space,
        Vperp=vperp,
        fiber_basis=fiber_basis,
        base_basis=base_basis,
        fiber_embed=fiber_embed,
        fiber_project=fiber_project,
        base_embed=base_embed,
        base_project=base_project,
        projector_V=fiber_embed * fiber_project,
        projector_Vperp=base_embed * base_project,
    )


def decompose(gamma: Isometry, span_data: SpanData) -> SplitIsometry:
    """Split an isometry into its fiber and base actions.

    Requires the point part to preserve V (and hence the complement); raises
    "subspace not invariant" otherwise.
    """
    b = gamma.matrix
    low = span_data.base_project * b * span_data.fiber_embed
    high = span_data.fiber_project * b * span_data.base_embed
    if not low.is_zero() or not high.is_zero():
        raise ValueError("subspace not invariant")
    fiber_mat = span_data.fiber_project * b * span_data.fiber_embed
    base_mat = span_data.base_project * b * span_data.base_embed
    return SplitIsometry(
        fiber_part=Isometry(fiber_mat, span_data.fiber_project.matvec(gamma.translation)),
        base_part=Isometry(base_mat, span_data.base_project.matvec(gamma.translation)),
    )


def reassemble(split: SplitIsometry, span_data: SpanData) -> Isometry:
    """Inverse of decompose: rebuild the ambient isometry from its two blocks."""
    mat = (
        span_data.fiber_embed * split.fiber_part.matrix * span_data.fiber_project
        + span_data.base_embed * split.base_part.matrix * span_data.base_project
    )
    tr = tuple(
        x + y
        for x, y in zip(
            span_data.fiber_embed.matvec(split.fiber_part.translation),
            span_data.base_embed.matvec(split.base_part.translation),
        )
    )
    return Isometry(mat, tr)


def theorem1_check(group: SpaceGroup, subgroup: SubgroupHandle) -> Theorem1Report:
    """Verify the two structural clauses a normal subgroup's span must satisfy."""
    _require_normal(group, subgroup)
    sp = span(subgroup)
    failures: list[str] = []
    span_ok = True
    for i, g in enumerate(group.generators()):
        if not (sp.base_project * g.matrix * sp.fiber_embed).is_zero():
            span_ok = False
            failures.append(f"ambient generator {i} does not preserve the span")
    members_ok = True
    for i, g in enumerate(subgroup.gens):
        if any(x != 0 for x in sp.base_project.matvec(g.translation)):
            members_ok = False
            failures.append(f"subgroup generator {i} translates off the span")
        if (g.matrix * sp.base_embed).rows != sp.base_embed.rows:
            members_ok = False
            failures.append(f"subgroup generator {i} moves the complement")
    return Theorem1Report(span_ok, members_ok, tuple(failures))


def _require_normal(group: SpaceGroup, subgroup: SubgroupHandle) -> None:
    if subgroup.parent is not group and subgroup.parent != group:
        raise ValueError("subgroup handle belongs to a different group")
    if not is_normal(group, subgroup):
        raise ValueError("subgroup is not normal")


def _aligned_subgroup(
    group: SpaceGroup, move_along: QSubspace, fix_space_basis: QMat
) -> list[Isometry]:
    """Generators of {a+A in the group : a in move_along, A fixes fix_space pointwise}.

    One representative per qualifying point coset plus the translation
    generators inside move_along.  fix_space_basis is an n x k matrix whose
    columns span the directions that must be fixed pointwise.
    """
    gens: list[Isometry] = []
    lat = saturation(group.lattice, move_along)
    for i in range(lat.rank):
        gens.append(Isometry.translation_by(lat.basis.row(i)))
    ann = move_along.annihilator()
    basis_t = group.lattice.basis.transpose()
    for rep in group.coset_reps:
        if rep.is_identity():
            continue
        if (rep.matrix * fix_space_basis).rows != fix_space_basis.rows:
            continue
        if ann.nrows == 0:
            gens.append(rep)
            continue
        # Solve ann @ (b + L^T c) = 0 for integer lattice coordinates c.
        m = ann * basis_t
        rhs = tuple(-x for x in ann.matvec(rep.translation))
        sol = solve_integer_linear(m, rhs)
        if sol is None:
            continue
        particular, _ = sol
        shift = basis_t.matvec(particular)
        gens.append(Isometry(rep.matrix, tuple(a + b for a, b in zip(rep.translation, shift))))
    return gens


def is_complete(group: SpaceGroup, subgroup: SubgroupHandle) -> bool:
    """Whether the subgroup equals everything in the group supported on its span."""
    _require_normal(group, subgroup)
    sp = span(subgroup)
    candidates = _aligned_subgroup(group, sp.V, sp.base_embed)
    for g in candidates:
        if not subgroup.contains(g):
            return False
    # Containment the other way: each subgroup generator satisfies the
    # defining conditions of the aligned set.
    for g in subgroup.gens:
        if any(x != 0 for x in sp.base_project.matvec(g.translation)):
            return False
        if (g.matrix * sp.base_embed).rows != sp.base_embed.rows:
            return False
    return True


def complete_closure(group: SpaceGroup, subgroup: SubgroupHandle) -> SubgroupHandle:
    """Smallest complete normal subgroup containing the given one.

    Collects everything supported on the current span and repeats until the
    span stops growing (one pass suffices in theory; the loop is defensive).
    """
    _require_normal(group, subgroup)
    current = subgroup
    for _ in range(group.dimension + 1):
        sp = span(current)
        gens = _aligned_subgroup(group, sp.V, sp.base_embed)
        enlarged = SubgroupHandle(group, tuple(gens) if gens else (Isometry.identity(group.dimension),))
        new_span = span(enlarged)
        if new_span.V.dim == sp.V.dim:
            return enlarged
        current = enlarged
    raise RuntimeError("span failed to stabilize")  # pragma: no cover


def action_kernel(group: SpaceGroup, span_data: SpanData) -> SubgroupHandle:
    """Subgroup acting trivially on the fiber directions.

    Elements translating along the complement whose point parts fix V
    pointwise; computed exactly like completeness with the roles of the two
    blocks swapped.
    """
    gens = _aligned_subgroup(group, span_data.Vperp, span_data.fiber_embed)
    if not gens:
        gens = [Isometry.identity(group.dimension)]
    return SubgroupHandle(group, tuple(gens))


def base_discreteness_check(
    group: SpaceGroup, subgroup: SubgroupHandle, kernel: SubgroupHandle
) -> bool:
    """Whether the subgroup and the action kernel together have finite index.

    True exactly when their translation lattices sum to full rank; the point
    group is finite, so full-rank translations force finite index.
    """
    t_n = translation_subgroup(subgroup)
    t_k = translation_subgroup(kernel)
    return lattice_sum(t_n, t_k).rank == group.dimension


def fiber_group(group: SpaceGroup, subgroup: SubgroupHandle, span_data: SpanData) -> SpaceGroup:
    """The subgroup's action on its own span, in fiber coordinates.

    For a complete subgroup the translation lattice in these coordinates is
    exactly Z^m, so no rebase happens and fiber coordinates stay aligned with
    the Hermite basis of (lattice cap V).
    """
    m = span_data.fiber_dim
    parts = [decompose(g, span_data).fiber_part for g in subgroup.gens]
    name = f"{group.name}|fiber" if group.name else "fiber"
    return group_from_generators(m, span_data.fiber_gram, parts, name=name)


@dataclass(frozen=True)
class BaseGroupResult:
    """Base space group plus the data of the projection onto it.

    `p_map` pairs each ambient coset representative with its image, already
    expressed in the base group's final coordinates.  `transform` converts
    final base coordinates back to raw complement coordinates (identity
    unless the projected lattice needed a rebase).
    """

    group: SpaceGroup
    p_map: tuple[tuple[Isometry, Isometry], ...]
    transform: QMat


def base_group(
    group: SpaceGroup, subgroup: SubgroupHandle, span_data: SpanData
) -> BaseGroupResult:
    """Quotient action on the complement; fails unless the subgroup is complete.

    Builds the image of the projection homomorphism and verifies its kernel
    lies in the subgroup.  An incomplete subgroup leaves extra elements in the
    kernel, in which case the quotient is not discrete and a ValueError
    "quotient not a space group" is raised.
    """
    sp = span_data
    m, k = sp.fiber_dim, sp.base_dim
    # Kernel check data: the subgroup's fiber action, with no completeness
    # assumption baked in.
    nbar_parts = [decompose(g, sp).fiber_part for g in subgroup.gens]
    nbar = group_from_generators(m, sp.fiber_gram, nbar_parts)
    if nbar.lattice.basis.rows != QMat.identity(m).rows:
        raise ValueError("quotient not a space group")
    basis_t = group.lattice.basis.transpose()
    proj_lat = sp.base_project * basis_t
    ident_base = QMat.identity(k)
    for rep in group.coset_reps:
        split = decompose(rep, sp)
        if split.base_part.matrix.rows != ident_base.rows:
            continue
        rhs = tuple(-x for x in split.base_part.translation)
        sol = solve_integer_linear(proj_lat, rhs)
        if sol is None:
            continue
        particular, _ = sol
        shift = basis_t.matvec(particular)
        candidate = Isometry(
            rep.matrix, tuple(a + b for a, b in zip(rep.translation, shift))
        )
        fiber_part = decompose(candidate, sp).fiber_part
        if not nbar.contains(fiber_part):
            raise ValueError("quotient not a space group")
    # Kernel is trivial; build the image group.
    parts = [decompose(g, sp).base_part for g in group.generators()]
    name = f"{group.name}|base" if group.name else "base"
    base, s = closure_with_transform(k, sp.base_gram, parts, name=name)
    s_inv = s.inverse()
    pairs = []
    for rep in group.coset_reps:
        raw = decompose(rep, sp).base_part
        final = Isometry(s_inv * raw.matrix * s, s_inv.matvec(raw.translation))
        assert base.contains(final)
        pairs.append((rep, final))
    return BaseGroupResult(base, tuple(pairs), s)


@dataclass(frozen=True)
class FibrationSplit:
    """Full fiber/base package for a complete normal subgroup."""

    group: SpaceGroup
    subgroup: SubgroupHandle
    span_data: SpanData
    fiber: SpaceGroup
    base: SpaceGroup
    kernel: SubgroupHandle
    p_map: tuple[tuple[Isometry, Isometry], ...]
    base_transform: QMat

    def xi(self, gamma: Isometry) -> Isometry:
        """Fiber action of an ambient element, as an affinity in fiber coordinates."""
        return decompose(gamma, self.span_data).fiber_part

    def p(self, gamma: Isometry) -> Isometry:
        """Base action of an ambient element, in the base group's coordinates."""
        raw = decompose(gamma, self.span_data).base_part
        s = self.base_transform
        s_inv = s.inverse()
        return Isometry(s_inv * raw.matrix * s, s_inv.matvec(raw.translation))

    def p1(self, gamma: Isometry) -> Vec:
        """Translation component of the base action: the crossed map."""
        return self.p(gamma).translation

    def lift_of_base(self, beta: Isometry) -> Isometry:
        """Some ambient group element projecting onto the given base element."""
        s = self.base_transform
        raw_mat = s * beta.matrix * s.inverse()
        raw_tr = s.matvec(beta.translation)
        sp = self.span_data
        basis_t = self.group.lattice.basis.transpose()
        proj_lat = sp.base_project * basis_t
        for rep in self.group.coset_reps:
            split = decompose(rep, sp)
            if split.base_part.matrix.rows != raw_mat.rows:
                continue
            rhs = tuple(a - b for a, b in zip(raw_tr, split.base_part.translation))
            sol = solve_integer_linear(proj_lat, rhs)
            if sol is None:
                continue
            particular, _ = sol
            shift = basis_t.matvec(particular)
            return Isometry(
                rep.matrix, tuple(a + b for a, b in zip(rep.translation, shift))
            )
        raise ValueError("element is not in the base group")


def fibration_split(group: SpaceGroup, subgroup: SubgroupHandle) -> FibrationSplit:
    """Assemble the complete fiber/base analysis for a normal subgroup.

    Raises if the subgroup is not normal or not complete.
    """
    report = theorem1_check(group, subgroup)
    if not report.passed:
        raise ValueError("; ".join(report.failures))
    sp = span(subgroup)
    result = base_group(group, subgroup, sp)
    fiber = fiber_group(group, subgroup, sp)
    kernel = action_kernel(group, sp)
    return FibrationSplit(
        group=group,
        subgroup=subgroup,
        span_data=sp,
        fiber=fiber,
        base=result.group,
        kernel=kernel,
        p_map=result.p_map,
        base_transform=result.transform,
    )
