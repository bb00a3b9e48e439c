"""Shared fixture groups for the test suite.  Exact data only."""

from __future__ import annotations

from fractions import Fraction

from flatfiber.exactalg import QMat
from flatfiber.spacegroup import Isometry, SpaceGroup, group_from_generators

I2 = QMat.identity(2)


def t(v) -> Isometry:
    return Isometry.translation_by(v)


def make_p1() -> SpaceGroup:
    return group_from_generators(2, I2, [t([1, 0]), t([0, 1])], name="p1")


def make_pm() -> SpaceGroup:
    sigma = Isometry(QMat([[1, 0], [0, -1]]), [0, 0])
    return group_from_generators(2, I2, [t([1, 0]), t([0, 1]), sigma], name="pm")


def make_fix_pg() -> SpaceGroup:
    """Glide group with lattice Z x 2Z; the glide is (0,1) + diag(-1,1)."""
    glide = Isometry(QMat([[-1, 0], [0, 1]]), [0, 1])
    return group_from_generators(2, I2, [t([1, 0]), glide], name="fix_pg")


def make_p2() -> SpaceGroup:
    half_turn = Isometry(QMat([[-1, 0], [0, -1]]), [0, 0])
    return group_from_generators(2, I2, [t([1, 0]), t([0, 1]), half_turn], name="p2")


def make_p4() -> SpaceGroup:
    quarter_turn = Isometry(QMat([[0, -1], [1, 0]]), [0, 0])
    return group_from_generators(2, I2, [t([1, 0]), t([0, 1]), quarter_turn], name="p4")


def make_z_1d() -> SpaceGroup:
    return group_from_generators(1, QMat.identity(1), [t([1])], name="p1_1d")


def make_dinf_1d() -> SpaceGroup:
    flip = Isometry(QMat([[-1]]), [0])
    return group_from_generators(1, QMat.identity(1), [t([1]), flip], name="pm_1d")


def make_pm_vertical() -> SpaceGroup:
    """Mirror group whose reflection fixes the y axis; x-axis fiber is D-infinity."""
    sigma = Isometry(QMat([[-1, 0], [0, 1]]), [0, 0])
    return group_from_generators(2, I2, [t([1, 0]), t([0, 1]), sigma], name="pm_vertical")


def make_pg_yflip() -> SpaceGroup:
    """Standard-lattice glide group: (1/2,0) + diag(1,-1), glide axis along x."""
    glide = Isometry(QMat([[1, 0], [0, -1]]), half(1, 0))
    return group_from_generators(2, I2, [t([1, 0]), t([0, 1]), glide], name="pg")


def make_p1_3d() -> SpaceGroup:
    return group_from_generators(
        3, QMat.identity(3), [t([1, 0, 0]), t([0, 1, 0]), t([0, 0, 1])], name="p1_3d"
    )


def glide_of_fix_pg() -> Isometry:
    return Isometry(QMat([[-1, 0], [0, 1]]), [0, 1])


def reflection_x_axis() -> Isometry:
    """Reflection fixing the x axis pointwise."""
    return Isometry(QMat([[1, 0], [0, -1]]), [0, 0])


def half(*nums) -> list[Fraction]:
    return [Fraction(n, 2) for n in nums]
