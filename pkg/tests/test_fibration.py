"""Tests for span computation, completeness, and the fiber/base split."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest
from helpers import (
    glide_of_fix_pg,
    make_fix_pg,
    make_p1,
    make_p2,
    make_pm,
    reflection_x_axis,
    t,
)

from flatfiber.exactalg import QMat, QSubspace
from flatfiber.fibration import (
    action_kernel,
    base_discreteness_check,
    base_group,
    complete_closure,
    decompose,
    fiber_group,
    fibration_split,
    is_complete,
    reassemble,
    span,
    theorem1_check,
)
from flatfiber.spacegroup import Isometry, SubgroupHandle, compose, invert

rng = random.Random(40961)


def x_axis_sub(group, vec=(1, 0)):
    return SubgroupHandle(group, [t(vec)])


def test_span_examples():
    p1 = make_p1()
    sp = span(x_axis_sub(p1))
    assert sp.V.contains((5, 0)) and not sp.V.contains((0, 1))
    assert sp.fiber_dim == 1 and sp.base_dim == 1

    pg = make_fix_pg()
    h = SubgroupHandle(pg, [glide_of_fix_pg()])
    sp2 = span(h)
    assert sp2.V.contains((0, 1)) and not sp2.V.contains((1, 0))
    assert sp2.fiber_basis.to_lists() == [[0, 2]]

    trivial = SubgroupHandle(p1, [Isometry.identity(2)])
    sp3 = span(trivial)
    assert sp3.fiber_dim == 0 and sp3.base_dim == 2


def test_span_projector_invariants():
    pm = make_pm()
    h = SubgroupHandle(pm, [t([0, 1]), reflection_x_axis()])
    sp = span(h)
    pv, pw = sp.projector_V, sp.projector_Vperp
    assert (pv * pv).rows == pv.rows
    assert (pw * pw).rows == pw.rows
    assert (pv + pw).rows == QMat.identity(2).rows
    # Gram self-adjointness: (G P)^T = G P for both projectors.
    gp = sp.gram * pv
    assert gp.transpose().rows == gp.rows
    # Charts invert each other.
    assert (sp.fiber_project * sp.fiber_embed).rows == QMat.identity(1).rows
    assert (sp.base_project * sp.base_embed).rows == QMat.identity(1).rows
    assert (sp.fiber_project * sp.base_embed).is_zero()


def test_theorem1_check_passes_for_normal_subgroups():
    p1 = make_p1()
    assert theorem1_check(p1, x_axis_sub(p1)).passed
    pg = make_fix_pg()
    assert theorem1_check(pg, SubgroupHandle(pg, [t([0, 2])])).passed
    pm = make_pm()
    rep = theorem1_check(pm, SubgroupHandle(pm, [t([0, 1]), reflection_x_axis()]))
    assert rep.passed and rep.failures == ()


def test_theorem1_check_rejects_non_normal():
    pg = make_fix_pg()
    with pytest.raises(ValueError, match="not normal"):
        theorem1_check(pg, SubgroupHandle(pg, [glide_of_fix_pg()]))


def test_is_complete_examples():
    p1 = make_p1()
    assert is_complete(p1, x_axis_sub(p1))
    assert not is_complete(p1, x_axis_sub(p1, (2, 0)))
    pm = make_pm()
    dinf_fiber = SubgroupHandle(pm, [t([0, 1]), reflection_x_axis()])
    assert is_complete(pm, dinf_fiber)
    assert not is_complete(pm, SubgroupHandle(pm, [t([0, 1])]))
    # Translations along x in pm: no reflection fixes the y axis, so complete.
    assert is_complete(pm, x_axis_sub(pm))


def test_complete_closure_examples():
    p1 = make_p1()
    closed = complete_closure(p1, x_axis_sub(p1, (2, 0)))
    assert closed.contains(t([1, 0]))
    assert is_complete(p1, closed)
    pm = make_pm()
    closed2 = complete_closure(pm, SubgroupHandle(pm, [t([0, 1])]))
    assert closed2.contains(reflection_x_axis())
    assert is_complete(pm, closed2)
    # Idempotence.
    closed3 = complete_closure(pm, closed2)
    assert sorted(closed3.gens, key=repr) == sorted(closed2.gens, key=repr)


def test_decompose_examples():
    p1 = make_p1()
    sp = span(x_axis_sub(p1))
    split = decompose(t([1, 1]), sp)
    assert split.fiber_part.translation == (Fraction(1),)
    assert split.base_part.translation == (Fraction(1),)

    pg = make_fix_pg()
    sp2 = span(SubgroupHandle(pg, [t([0, 2])]))
    split2 = decompose(glide_of_fix_pg(), sp2)
    # Fiber chart is the basis vector (0,2): the glide advances half of it.
    assert split2.fiber_part.matrix.rows == QMat.identity(1).rows
    assert split2.fiber_part.translation == (Fraction(1, 2),)
    assert split2.base_part.matrix.to_lists() == [[-1]]

    ident = Isometry.identity(2)
    split3 = decompose(ident, sp2)
    assert split3.fiber_part.is_identity() and split3.base_part.is_identity()


def test_decompose_rejects_non_invariant_subspace():
    p1 = make_p1()
    sp = span(x_axis_sub(p1))
    rot = Isometry(QMat([[0, -1], [1, 0]]), [0, 0])
    with pytest.raises(ValueError, match="subspace not invariant"):
        decompose(rot, sp)


def test_decompose_multiplicative_on_random_words():
    pm = make_pm()
    sp = span(SubgroupHandle(pm, [t([0, 1]), reflection_x_axis()]))
    gens = pm.generators()
    for _ in range(150):
        g = Isometry.identity(2)
        h = Isometry.identity(2)
        for _ in range(rng.randint(1, 5)):
            g = compose(g, rng.choice(gens))
            h = compose(h, invert(rng.choice(gens)))
        sg, sh, sgh = decompose(g, sp), decompose(h, sp), decompose(compose(g, h), sp)
        assert compose(sg.fiber_part, sh.fiber_part) == sgh.fiber_part
        assert compose(sg.base_part, sh.base_part) == sgh.base_part
        assert reassemble(sg, sp) == g


def test_action_kernel_examples():
    p1 = make_p1()
    sp = span(x_axis_sub(p1))
    k = action_kernel(p1, sp)
    assert k.contains(t([0, 1])) and not k.contains(t([1, 0]))

    pm = make_pm()
    spm = span(SubgroupHandle(pm, [t([0, 1]), reflection_x_axis()]))
    km = action_kernel(pm, spm)
    assert km.contains(t([1, 0]))
    assert not km.contains(reflection_x_axis())

    pg = make_fix_pg()
    spg = span(SubgroupHandle(pg, [t([0, 2])]))
    kg = action_kernel(pg, spg)
    assert kg.contains(t([1, 0]))
    assert not kg.contains(glide_of_fix_pg())


def test_base_discreteness_check():
    p1 = make_p1()
    n = x_axis_sub(p1)
    assert base_discreteness_check(p1, n, action_kernel(p1, span(n)))
    pm = make_pm()
    n2 = SubgroupHandle(pm, [t([0, 1]), reflection_x_axis()])
    assert base_discreteness_check(pm, n2, action_kernel(pm, span(n2)))
    # A kernel handle with no translations cannot complement the span.
    starved = SubgroupHandle(pm, [Isometry.identity(2)])
    assert not base_discreteness_check(pm, n2, starved)


def test_fiber_group_examples():
    p1 = make_p1()
    f = fiber_group(p1, x_axis_sub(p1), span(x_axis_sub(p1)))
    assert f.dimension == 1 and f.point_group_order == 1
    assert f.lattice.basis.to_lists() == [[1]]

    pm = make_pm()
    n = SubgroupHandle(pm, [t([0, 1]), reflection_x_axis()])
    f2 = fiber_group(pm, n, span(n))
    assert f2.point_group_order == 2

    pg = make_fix_pg()
    n3 = SubgroupHandle(pg, [t([0, 2])])
    f3 = fiber_group(pg, n3, span(n3))
    # Ambient shift by (0,2) is one step of the fiber chart.
    assert f3.dimension == 1 and f3.point_group_order == 1
    assert f3.lattice.basis.to_lists() == [[1]]


def test_base_group_examples():
    p1 = make_p1()
    n = x_axis_sub(p1)
    res = base_group(p1, n, span(n))
    assert res.group.dimension == 1 and res.group.point_group_order == 1

    pm = make_pm()
    n2 = SubgroupHandle(pm, [t([0, 1]), reflection_x_axis()])
    res2 = base_group(pm, n2, span(n2))
    assert res2.group.point_group_order == 1

    # x-translations in pm: the reflection survives into the base.
    n3 = x_axis_sub(pm)
    res3 = base_group(pm, n3, span(n3))
    assert res3.group.point_group_order == 2


def test_base_group_rejects_incomplete_subgroup():
    p1 = make_p1()
    n = x_axis_sub(p1, (2, 0))
    with pytest.raises(ValueError, match="quotient not a space group"):
        base_group(p1, n, span(n))


def test_completeness_equivalence_battery():
    """is_complete and base_group must agree on every candidate."""
    cases = []
    p1 = make_p1()
    cases += [(p1, x_axis_sub(p1)), (p1, x_axis_sub(p1, (2, 0))), (p1, x_axis_sub(p1, (0, 1)))]
    pm = make_pm()
    cases += [
        (pm, SubgroupHandle(pm, [t([0, 1]), reflection_x_axis()])),
        (pm, SubgroupHandle(pm, [t([0, 1])])),
        (pm, SubgroupHandle(pm, [t([0, 2]), reflection_x_axis()])),
        (pm, x_axis_sub(pm)),
    ]
    pg = make_fix_pg()
    cases += [
        (pg, SubgroupHandle(pg, [t([0, 2])])),
        (pg, SubgroupHandle(pg, [t([0, 4])])),
        (pg, x_axis_sub(pg)),
    ]
    for group, handle in cases:
        complete = is_complete(group, handle)
        try:
            base_group(group, handle, span(handle))
            built = True
        except ValueError:
            built = False
        assert complete == built, f"{group.name}: routes disagree"


def test_fibration_split_package():
    pg = make_fix_pg()
    n = SubgroupHandle(pg, [t([0, 2])])
    fs = fibration_split(pg, n)
    assert fs.fiber.dimension == 1 and fs.base.dimension == 1
    assert fs.base.point_group_order == 2  # glide becomes a base reflection

    # p is a homomorphism into the base group.
    gens = pg.generators()
    for _ in range(80):
        g = Isometry.identity(2)
        h = Isometry.identity(2)
        for _ in range(rng.randint(1, 4)):
            g = compose(g, rng.choice(gens))
            h = compose(h, rng.choice(gens))
        assert fs.p(compose(g, h)) == compose(fs.p(g), fs.p(h))
        assert fs.base.contains(fs.p(g))
        # Crossed-map identity for the translation component.
        lhs = fs.p1(compose(g, h))
        bg = fs.p(g)
        rhs = tuple(a + b for a, b in zip(bg.translation, bg.matrix.matvec(fs.p1(h))))
        assert lhs == rhs

    # Xi values normalize the fiber group.
    for g in gens:
        xi = fs.xi(g)
        for fg in fs.fiber.generators():
            conj = compose(compose(xi, fg), invert(xi))
            assert fs.fiber.contains(conj)

    # Section property of lift_of_base.
    for b in fs.base.generators():
        lifted = fs.lift_of_base(b)
        assert pg.contains(lifted)
        assert fs.p(lifted) == b


def test_fibration_split_p2():
    """Half-turn group over x-translations: base sees the negation."""
    p2 = make_p2()
    n = x_axis_sub(p2)
    assert is_complete(p2, n)
    fs = fibration_split(p2, n)
    assert fs.fiber.point_group_order == 1
    assert fs.base.point_group_order == 2
    half_turn = Isometry(QMat([[-1, 0], [0, -1]]), [0, 0])
    assert fs.p(half_turn).matrix.to_lists() == [[-1]]
