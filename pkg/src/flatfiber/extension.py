"""Building a space group from a fiber group, a base group, and a twisting action.

Given an m-dimensional space group M, a presented (n-m)-dimensional space
group and, for each of its generators, an affine lift describing how that
generator should act on the flat quotient of the fiber, this module
assembles the unique n-dimensional space group containing M as a complete
normal subgroup with the prescribed quotient action.  The fiber sits in the
first m coordinates, the base in the last n-m, and each base generator
acquires a block-diagonal "hat" combining its lift with itself.
"""

from __future__ import annotations

from dataclasses import dataclass

from .exactalg import QMat
from .fibration import FibrationSplit, fibration_split
from .spacegroup import (
    DEFAULT_POINT_GROUP_BOUND,
    Isometry,
    SpaceGroup,
    SubgroupHandle,
    closure_with_transform,
    compose,
    evaluate_word,
    express_as_word,
    invert,
    rebase_to_lattice,
)


@dataclass(frozen=True)
class ThetaSpec:
    """Input data: fiber group, presented base group, one lift per base generator.

    Each lift is an affine map of fiber space (rational, preserving the fiber
    Gram form) describing the action of the corresponding base generator on
    the fiber quotient.  The lifts are indexed by the order of the base
    presentation's generators.
    """

    fiber: SpaceGroup
    base: SpaceGroup
    lifts: tuple[Isometry, ...]

    def __init__(self, fiber: SpaceGroup, base: SpaceGroup, lifts) -> None:
        object.__setattr__(self, "fiber", fiber)
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "lifts", tuple(lifts))


@dataclass(frozen=True)
class ThetaReport:
    ok: bool
    failures: tuple[str, ...]


@dataclass(frozen=True)
class ExtensionResult:
    """Constructed ambient group with its embedded fiber subgroup.

    `hat_lifts` are the images of the base generators inside the new group;
    `fiber_lifts` are the input lifts transported into the fiber chart of the
    split (used by verify_uniqueness); `transform` maps the group's final
    coordinates back to the raw fiber-by-base product coordinates.
    """

    group: SpaceGroup
    embedded: SubgroupHandle
    hat_lifts: tuple[Isometry, ...]
    fiber_lifts: tuple[Isometry, ...]
    split: FibrationSplit
    transform: QMat


def _block_diag(a: QMat, b: QMat) -> QMat:
    rows = []
    for i in range(a.nrows):
        rows.append(list(a.row(i)) + [0] * b.cols)
    for i in range(b.nrows):
        rows.append([0] * a.cols + list(b.row(i)))
    return QMat(rows, a.cols + b.cols)


def _embed_fiber(iso: Isometry, k: int) -> Isometry:
    mat = _block_diag(iso.matrix, QMat.identity(k))
    return Isometry(mat, tuple(iso.translation) + (0,) * k)


def _hat(lift: Isometry, delta: Isometry) -> Isometry:
    mat = _block_diag(lift.matrix, delta.matrix)
    return Isometry(mat, tuple(lift.translation) + tuple(delta.translation))


def validate_theta(spec: ThetaSpec) -> ThetaReport:
    """Check that the lifts define a genuine action on the fiber quotient.

    Verifies per lift: correct dimension, fiber Gram preservation, and that
    conjugation maps the fiber group onto itself.  Then evaluates every
    relator of the base presentation in the lifts; each result must lie in
    the fiber group.  Failures name the offending generator or relator.
    """
    failures: list[str] = []
    if spec.base.presentation is None:
        return ThetaReport(False, ("base group lacks a presentation",))
    pres = spec.base.presentation
    if len(spec.lifts) != len(pres.generators):
        return ThetaReport(
            False, (f"expected {len(pres.generators)} lifts, got {len(spec.lifts)}",)
        )
    m = spec.fiber.dimension
    gram = spec.fiber.gram
    fiber_gens = spec.fiber.generators()
    for i, lift in enumerate(spec.lifts):
        if lift.matrix.shape != (m, m):
            failures.append(f"lift {i} has wrong dimension")
            continue
        if (lift.matrix.transpose() * gram * lift.matrix).rows != gram.rows:
            failures.append(f"lift {i} does not preserve the fiber Gram form")
            continue
        ok = True
        inv = invert(lift)
        for g in fiber_gens:
            if not spec.fiber.contains(compose(compose(lift, g), inv)):
                ok = False
            if not spec.fiber.contains(compose(compose(inv, g), lift)):
                ok = False
        if not ok:
            failures.append(f"lift {i} does not normalize the fiber group")
    if failures:
        return ThetaReport(False, tuple(failures))
    for j, rel in enumerate(pres.relators):
        value = evaluate_word(spec.lifts, rel)
        if not spec.fiber.contains(value):
            failures.append(f"relator {j} evaluates outside the fiber group")
    return ThetaReport(not failures, tuple(failures))


def _transport(iso: Isometry, s: QMat, s_inv: QMat) -> Isometry:
    return Isometry(s_inv * iso.matrix * s, s_inv.matvec(iso.translation))


def _same_group(a: SpaceGroup, b: SpaceGroup) -> bool:
    if a.dimension != b.dimension or a.gram.rows != b.gram.rows:
        return False
    if a.lattice.basis.rows != b.lattice.basis.rows:
        return False
    key = lambda r: (r.matrix.rows, r.translation)
    return {key(r) for r in a.coset_reps} == {key(r) for r in b.coset_reps}


def build_extension(
    spec: ThetaSpec, point_group_bound: int = DEFAULT_POINT_GROUP_BOUND
) -> ExtensionResult:
    """Assemble the extension group prescribed by a validated ThetaSpec.

    The result is generated by the embedded fiber group together with one
    hat per base generator.  After closure the construction re-verifies its
    own contract: the embedded copy is complete normal, the quotient action
    reproduces the base group in its lattice coordinates, and the fiber
    action of each hat agrees with the input lift modulo the fiber group.
    """
    report = validate_theta(spec)
    if not report.ok:
        raise ValueError("; ".join(report.failures))
    m, k = spec.fiber.dimension, spec.base.dimension
    gram = _block_diag(spec.fiber.gram, spec.base.gram)
    embedded_raw = [_embed_fiber(g, k) for g in spec.fiber.generators()]
    pres = spec.base.presentation
    assert pres is not None
    hats_raw = [_hat(lift, delta) for lift, delta in zip(spec.lifts, pres.generators)]
    name = f"ext({spec.fiber.name},{spec.base.name})" if spec.base.name else "ext"
    group, s = closure_with_transform(
        m + k, gram, embedded_raw + hats_raw, name=name, point_group_bound=point_group_bound
    )
    s_inv = s.inverse()
    embedded_gens = tuple(_transport(g, s, s_inv) for g in embedded_raw)
    hats = tuple(_transport(h, s, s_inv) for h in hats_raw)
    handle = SubgroupHandle(group, embedded_gens)
    split = fibration_split(group, handle)

    expected_base, _ = rebase_to_lattice(spec.base)
    if not _same_group(split.base, expected_base):
        raise AssertionError("internal error: quotient action does not reproduce the base")

    # Xi = Theta P on generators: each hat's fiber action must differ from
    # the input lift by a fiber group element.  The input lift is expressed
    # in chart coordinates first: chart vectors are the rows of the fiber
    # basis pushed through the ambient transform, whose leading components
    # recover the change of frame on fiber space.
    fchart = _fiber_chart_matrix(split, s, m)
    fchart_inv = fchart.inverse()
    checked_lifts = []
    for lift, hat in zip(spec.lifts, hats):
        lift_chart = Isometry(
            fchart_inv * lift.matrix * fchart, fchart_inv.matvec(lift.translation)
        )
        diff = compose(split.xi(hat), invert(lift_chart))
        if not split.fiber.contains(diff):
            raise AssertionError("internal error: fiber action deviates from the lift")
        checked_lifts.append(lift_chart)
    return ExtensionResult(
        group=group,
        embedded=handle,
        hat_lifts=hats,
        fiber_lifts=tuple(checked_lifts),
        split=split,
        transform=s,
    )


def _fiber_chart_matrix(split: FibrationSplit, s: QMat, m: int) -> QMat:
    """Matrix of the fiber chart basis in raw fiber coordinates.

    Chart basis vectors live in the group's final ambient coordinates; push
    them through the ambient transform S and keep the first m (product)
    coordinates to express them in the original fiber frame.
    """
    cols = []
    fb = split.span_data.fiber_basis
    for i in range(fb.nrows):
        ambient = s.matvec(fb.row(i))
        cols.append(ambient[:m])
    return QMat.from_cols(cols, m)


def verify_uniqueness(result: ExtensionResult, candidate: Isometry) -> bool:
    """Membership test backing the uniqueness property of the construction.

    Preconditions (each reported distinctly when violated): the candidate
    normalizes the embedded fiber subgroup, its quotient action lies in the
    base group, and its fiber action agrees with the prescribed action of
    its quotient part modulo the fiber group.  Under those conditions the
    candidate must already belong to the constructed group; the returned
    boolean is the membership answer.
    """
    split = result.split
    inv_candidate = invert(candidate)
    for g in result.embedded.gens:
        if not result.embedded.contains(compose(compose(candidate, g), inv_candidate)):
            raise ValueError("candidate does not normalize the fiber subgroup")
        if not result.embedded.contains(compose(compose(inv_candidate, g), candidate)):
            raise ValueError("candidate does not normalize the fiber subgroup")
    try:
        base_part = split.p(candidate)
    except ValueError:
        raise ValueError("candidate does not preserve the fiber directions") from None
    if not split.base.contains(base_part):
        raise ValueError("base part lies outside the base group")
    base_gens = [split.p(h) for h in result.hat_lifts]
    word = express_as_word(split.base, base_part, base_gens)
    prescribed = evaluate_word(result.fiber_lifts, word)
    diff = compose(split.xi(candidate), invert(prescribed))
    if not split.fiber.contains(diff):
        raise ValueError("fiber part is not the prescribed action")
    return result.group.contains(candidate)
