"""Block decomposition and pair-isomorphism search tests."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from flatfiber.exactalg import QMat
from flatfiber.fibration import fibration_split, is_complete
from flatfiber.pairiso import (
    AffinityBlocks,
    SearchBounds,
    assemble_conjugator,
    assemble_phi,
    blocks_of,
    center_span_in_fiber,
    compose_blocks,
    conjugation_test,
    conjugator_candidates,
    group_isomorphism_search,
    invert_blocks,
    pair_isomorphism_search,
    solve_mixed_block,
    theorem3_condition,
    theorem3_condition_source,
)
from flatfiber.spacegroup import (
    Isometry,
    SubgroupHandle,
    compose,
    conjugate_isometry,
    invert,
)

from helpers import (
    make_fix_pg,
    make_p1,
    make_p1_3d,
    make_p2,
    make_pg_yflip,
    make_pm,
    make_pm_vertical,
    make_z_1d,
    t,
)


def split_of(group, gens):
    return fibration_split(group, SubgroupHandle(group, tuple(gens)))


# ---------------------------------------------------------------------------
# Block decomposition
# ---------------------------------------------------------------------------


def test_blocks_of_identity():
    fs = split_of(make_pm(), [t([1, 0])])
    sp = fs.span_data
    b = blocks_of(Isometry.identity(2), sp, sp)
    assert b.fiber_block.rows == QMat.identity(1).rows
    assert b.base_block.rows == QMat.identity(1).rows
    assert b.mixed_block.is_zero()
    assert b.fiber_translation == (Fraction(0),)
    assert b.base_translation == (Fraction(0),)


def test_blocks_of_rejects_span_violation():
    fs = split_of(make_pm(), [t([1, 0])])
    sp = fs.span_data
    quarter = Isometry(QMat([[0, -1], [1, 0]]), [0, 0])
    with pytest.raises(ValueError, match="affinity does not respect spans"):
        blocks_of(quarter, sp, sp)


def test_blocks_center_condition():
    # D-infinity fiber has trivial center, so any nonzero mixed block must
    # be rejected once the center span is supplied.
    pmv = make_pm_vertical()
    sigma = Isometry(QMat([[-1, 0], [0, 1]]), [0, 0])
    fs = split_of(pmv, [t([1, 0]), sigma])
    sp = fs.span_data
    center = center_span_in_fiber(fs)
    assert center.dim == 0
    shear = Isometry(QMat([[1, Fraction(1, 2)], [0, 1]]), [0, 0])
    blocks_of(shear, sp, sp)  # fine without the center constraint
    with pytest.raises(ValueError, match="affinity does not respect spans"):
        blocks_of(shear, sp, sp, center2=center)


def test_center_span_of_translation_fiber_is_full():
    fs = split_of(make_pm(), [t([1, 0])])
    assert center_span_in_fiber(fs).dim == 1


def _random_blocks(rng, m, k):
    def val():
        return Fraction(rng.randint(-4, 4), rng.choice([1, 1, 2]))

    while True:
        fb = QMat([[val() for _ in range(m)] for _ in range(m)], m)
        if fb.det() != 0:
            break
    while True:
        bb = QMat([[val() for _ in range(k)] for _ in range(k)], k)
        if bb.det() != 0:
            break
    mixed = QMat([[val() for _ in range(k)] for _ in range(m)], k)
    ft = tuple(val() for _ in range(m))
    bt = tuple(val() for _ in range(k))
    return AffinityBlocks(fb, bb, mixed, ft, bt)


def test_block_round_trip_and_inverse_compose_identities():
    # On a 3-dimensional pair with a 2-dimensional fiber, random invertible
    # block data must round-trip through assembly, and the closed-form
    # inverse/composition formulas must match direct decomposition.
    p13 = make_p1_3d()
    fs = split_of(p13, [t([1, 0, 0]), t([0, 1, 0])])
    sp = fs.span_data
    rng = random.Random(20240817)
    for _ in range(100):
        blocks = _random_blocks(rng, 2, 1)
        phi = assemble_phi(blocks, sp, sp)
        again = blocks_of(phi, sp, sp)
        assert again == blocks
        inv_direct = blocks_of(invert(phi), sp, sp)
        assert inv_direct == invert_blocks(blocks)
        other = _random_blocks(rng, 2, 1)
        psi = assemble_phi(other, sp, sp)
        comp_direct = blocks_of(compose(psi, phi), sp, sp)
        assert comp_direct == compose_blocks(other, blocks)


# ---------------------------------------------------------------------------
# Quotient-action conditions
# ---------------------------------------------------------------------------


def test_theorem3_identity_pair():
    fs = split_of(make_pm(), [t([1, 0])])
    ident = Isometry.identity(1)
    zero = QMat.zero(1, 1)
    assert theorem3_condition(fs, fs, ident, ident, zero)
    assert theorem3_condition_source(fs, fs, ident, ident, zero)


def test_theorem3_agreement_on_good_and_bad_mixed():
    fs = split_of(make_p1(), [t([1, 0])])
    ident = Isometry.identity(1)
    good = QMat([[1]], 1)  # integral shear: lands in the deck group
    bad = QMat([[Fraction(1, 3)]], 1)
    for mixed, expected in [(good, True), (bad, False)]:
        r1 = theorem3_condition(fs, fs, ident, ident, mixed)
        r2 = theorem3_condition_source(fs, fs, ident, ident, mixed)
        phi = assemble_conjugator(fs, fs, ident, ident, mixed)
        r3 = conjugation_test(phi, fs.group, fs.subgroup, fs.group, fs.subgroup)
        assert r1 == r2 == r3 == expected


def test_mixed_equivariance_rejected():
    # In the glide group the fiber action of the glide is -1 while its base
    # action is +1, so only the zero mixed block is equivariant.
    fs = split_of(make_fix_pg(), [t([1, 0])])
    ident = Isometry.identity(1)
    with pytest.raises(ValueError, match="not equivariant"):
        theorem3_condition(fs, fs, ident, ident, QMat([[Fraction(1, 2)]], 1))


def test_theorem3_rejects_non_conjugating_alpha():
    fs = split_of(make_pm(), [t([1, 0])])
    bad_alpha = Isometry(QMat([[Fraction(1, 3)]], 1), [0])
    with pytest.raises(ValueError, match="fiber groups"):
        theorem3_condition(fs, fs, bad_alpha, Isometry.identity(1), QMat.zero(1, 1))


def test_solver_forces_zero_mixed_when_action_flips():
    fs = split_of(make_fix_pg(), [t([1, 0])])
    ident = Isometry.identity(1)
    mixed = solve_mixed_block(fs, fs, ident, ident)
    assert mixed is not None and mixed.is_zero()


# ---------------------------------------------------------------------------
# Bounded searches
# ---------------------------------------------------------------------------


def test_group_isomorphism_search_examples():
    p1 = make_p1()
    found = group_isomorphism_search(p1, p1)
    assert found is not None and found.is_identity()
    # Horizontal and vertical mirror groups are conjugate by the axis swap.
    phi = group_isomorphism_search(make_pm(), make_pm_vertical())
    assert phi is not None
    # Mirror versus glide: nothing within bounds (and indeed never).
    assert group_isomorphism_search(make_pm(), make_pg_yflip()) is None
    # Same point-group order but non-conjugate point parts.
    assert group_isomorphism_search(make_pm(), make_p2()) is None


def test_candidates_verified_both_ways():
    pm, pmv = make_pm(), make_pm_vertical()
    count = 0
    for phi in conjugator_candidates(pm, pmv):
        for g in pm.generators():
            assert pmv.contains(conjugate_isometry(phi, g))
        for g in pmv.generators():
            assert pm.contains(conjugate_isometry(invert(phi), g))
        count += 1
        if count >= 5:
            break
    assert count > 0


def test_pair_search_self():
    fs = split_of(make_pm(), [t([1, 0])])
    r = pair_isomorphism_search(fs, fs)
    assert r.verdict == "isomorphic"
    assert conjugation_test(r.conjugator, fs.group, fs.subgroup, fs.group, fs.subgroup)


def test_pair_search_axis_versus_diagonal():
    # Same translation group, x-axis line versus diagonal line: a shear in
    # GL(2,Z) carries one pair onto the other.  The complement chart of the
    # diagonal needs a rebase, so this also exercises coordinate transport.
    p1 = make_p1()
    fs1 = split_of(p1, [t([1, 0])])
    fs2 = split_of(p1, [t([1, 1])])
    r = pair_isomorphism_search(fs1, fs2)
    assert r.verdict == "isomorphic"
    phi = r.conjugator
    assert conjugation_test(phi, fs1.group, fs1.subgroup, fs2.group, fs2.subgroup)
    image = conjugate_isometry(phi, t([1, 0]))
    assert fs2.subgroup.contains(image)


def test_pair_search_mirror_versus_glide_negative():
    # Both pairs have fiber Z and an infinite dihedral base, but the glide
    # forces a half-integer fiber shift with zero base translation, which no
    # mixed block can absorb.  The search must come back empty-handed.
    fs1 = split_of(make_pm(), [t([1, 0])])
    fs2 = split_of(make_pg_yflip(), [t([1, 0])])
    r = pair_isomorphism_search(fs1, fs2)
    assert r.verdict == "not-found-within-bounds"
    assert r.conjugator is None


def test_pair_search_dimension_mismatch():
    fs1 = split_of(make_pm(), [t([1, 0])])
    z1 = make_z_1d()
    fs2 = split_of(z1, [t([1])])
    assert pair_isomorphism_search(fs1, fs2).verdict == "not-found-within-bounds"


def test_pair_search_dihedral_fiber_self():
    # Centerless fiber: the zero-block shortcut in the solver.
    pmv = make_pm_vertical()
    sigma = Isometry(QMat([[-1, 0], [0, 1]]), [0, 0])
    fs = split_of(pmv, [t([1, 0]), sigma])
    assert is_complete(pmv, fs.subgroup)
    r = pair_isomorphism_search(fs, fs)
    assert r.verdict == "isomorphic"


def test_pair_search_whole_group_as_fiber():
    # N = Gamma gives a 0-dimensional base; the search still runs.
    p1 = make_p1()
    fs = split_of(p1, [t([1, 0]), t([0, 1])])
    assert fs.span_data.base_dim == 0
    r = pair_isomorphism_search(fs, fs)
    assert r.verdict == "isomorphic"


def test_search_bounds_are_honoured():
    # With a crippled linear bound the diagonal pair is out of reach; the
    # verdict must degrade to not-found, never to a wrong claim.
    p1 = make_p1()
    fs1 = split_of(p1, [t([1, 0])])
    fs2 = split_of(p1, [t([1, 1])])
    wide = pair_isomorphism_search(fs1, fs2, SearchBounds(linear_bound=2))
    assert wide.verdict == "isomorphic"
