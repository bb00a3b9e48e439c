#!/usr/bin/env python3
"""Regenerates src/flatfiber/data/groups.json from the definitions below.

The packaged catalog is data; this script is its single source.  Every group
is written with an explicit coset-representative list, run through the same
loader that validates packaged files, and saved with a computed presentation.
"""

from __future__ import annotations

import argparse
from fractions import Fraction
from pathlib import Path

from flatfiber.catalog import Catalog, CatalogEntry, catalog_from_json, catalog_to_json, save_catalog
from flatfiber.exactalg import QMat, ZLattice
from flatfiber.spacegroup import Isometry, SpaceGroup, space_group_presentation

H = Fraction(1, 2)


def iso(rows, translation=None):
    mat = QMat(rows)
    return Isometry(mat, translation if translation is not None else [0] * mat.nrows)


def make(name, dim, reps, gram=None, lattice=None):
    gram_m = QMat(gram) if gram is not None else QMat.identity(dim)
    lat = ZLattice(QMat(lattice), dim) if lattice is not None else ZLattice.standard(dim)
    group = SpaceGroup(dim, gram_m, lat, tuple(reps), name)
    return group.with_presentation(space_group_presentation(group))


I1 = [[1]]
I2 = [[1, 0], [0, 1]]
I3 = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]

# 2D point parts used below.
NEG2 = [[-1, 0], [0, -1]]
MX = [[1, 0], [0, -1]]  # fixes the x-axis
MY = [[-1, 0], [0, 1]]  # fixes the y-axis
SWAP = [[0, 1], [1, 0]]
NSWAP = [[0, -1], [-1, 0]]
R4 = [[0, -1], [1, 0]]
R4C = [[0, 1], [-1, 0]]
R3 = [[0, -1], [1, -1]]
R3S = [[-1, 1], [-1, 0]]
R6 = [[1, -1], [1, 0]]
HEX = [[1, Fraction(-1, 2)], [Fraction(-1, 2), 1]]
RHOMB = [[1, Fraction(1, 3)], [Fraction(1, 3), 1]]


def mul(a, b):
    return (QMat(a) * QMat(b)).rows


def build_groups():
    groups = []

    # One-dimensional models.
    groups.append(make("p1_1d", 1, [iso(I1)]))
    groups.append(make("pm_1d", 1, [iso(I1), iso([[-1]])]))

    # The seventeen wallpaper groups.
    groups.append(make("p1", 2, [iso(I2)]))
    groups.append(make("p2", 2, [iso(I2), iso(NEG2)]))
    groups.append(make("pm", 2, [iso(I2), iso(MX)]))
    groups.append(make("pg", 2, [iso(I2), iso(MX, [H, 0])]))
    groups.append(make("cm", 2, [iso(I2), iso(SWAP)], gram=RHOMB))
    groups.append(make("pmm", 2, [iso(I2), iso(NEG2), iso(MX), iso(MY)]))
    groups.append(make("pmg", 2, [iso(I2), iso(NEG2), iso(MX, [H, 0]), iso(MY, [H, 0])]))
    groups.append(make("pgg", 2, [iso(I2), iso(NEG2), iso(MX, [H, H]), iso(MY, [H, H])]))
    groups.append(make("cmm", 2, [iso(I2), iso(SWAP), iso(NSWAP), iso(NEG2)], gram=RHOMB))
    groups.append(make("p4", 2, [iso(I2), iso(R4), iso(NEG2), iso(R4C)]))
    groups.append(
        make(
            "p4m",
            2,
            [iso(I2), iso(R4), iso(NEG2), iso(R4C), iso(MX), iso(MY), iso(SWAP), iso(NSWAP)],
        )
    )
    groups.append(
        make(
            "p4g",
            2,
            [
                iso(I2),
                iso(R4),
                iso(NEG2),
                iso(R4C),
                iso(MX, [H, H]),
                iso(MY, [H, H]),
                iso(SWAP, [H, H]),
                iso(NSWAP, [H, H]),
            ],
        )
    )
    groups.append(make("p3", 2, [iso(I2), iso(R3), iso(R3S)], gram=HEX))
    m31 = [[0, -1], [-1, 0]]
    groups.append(
        make(
            "p3m1",
            2,
            [iso(I2), iso(R3), iso(R3S), iso(m31), iso(mul(m31, R3)), iso(mul(m31, R3S))],
            gram=HEX,
        )
    )
    groups.append(
        make(
            "p31m",
            2,
            [iso(I2), iso(R3), iso(R3S), iso(SWAP), iso(mul(SWAP, R3)), iso(mul(SWAP, R3S))],
            gram=HEX,
        )
    )
    r6_powers = [I2]
    for _ in range(5):
        r6_powers.append(mul(r6_powers[-1], R6))
    groups.append(make("p6", 2, [iso(p) for p in r6_powers], gram=HEX))
    groups.append(
        make(
            "p6m",
            2,
            [iso(p) for p in r6_powers] + [iso(mul(SWAP, p)) for p in r6_powers],
            gram=HEX,
        )
    )

    # A second glide realization on a stretched lattice; the glide closes
    # through (0, 2) rather than a basis vector.
    groups.append(
        make("pg_alt", 2, [iso(I2), iso(MY, [0, 1])], lattice=[[1, 0], [0, 2]])
    )

    # Three-dimensional groups: enough to pool n = 3 runs.
    groups.append(make("p1_3d", 3, [iso(I3)]))
    groups.append(make("pinv_3d", 3, [iso(I3), iso([[-1, 0, 0], [0, -1, 0], [0, 0, -1]])]))
    rot2 = [[-1, 0, 0], [0, 1, 0], [0, 0, -1]]
    groups.append(make("p2_3d", 3, [iso(I3), iso(rot2)]))
    groups.append(make("p21_3d", 3, [iso(I3), iso(rot2, [0, H, 0])]))
    mz = [[1, 0, 0], [0, 1, 0], [0, 0, -1]]
    groups.append(make("pm_3d", 3, [iso(I3), iso(mz)]))
    groups.append(make("pc_3d", 3, [iso(I3), iso(mz, [H, 0, 0])]))
    groups.append(
        make(
            "p222_3d",
            3,
            [
                iso(I3),
                iso([[1, 0, 0], [0, -1, 0], [0, 0, -1]]),
                iso([[-1, 0, 0], [0, 1, 0], [0, 0, -1]]),
                iso([[-1, 0, 0], [0, -1, 0], [0, 0, 1]]),
            ],
        )
    )
    return groups


# Outer-automorphism affinities for fiber models and automorphism word maps
# for base models.  Words follow generator order: lattice translations first,
# then non-identity coset representatives.
GL2_S = iso(R4)
GL2_T = iso([[1, 1], [0, 1]])

OUT_DATA = {
    "p1_1d": (iso([[-1]]),),
    "pm_1d": (iso(I1, [H]),),
    "p1": (GL2_S, GL2_T),
    "p2": (GL2_S, GL2_T),
}

AUT_DATA = {
    "p1_1d": ((("-g0",),),),
    "pm_1d": (
        (("-g0",), ("g1",)),
        (("g0",), ("g0", "g1")),
    ),
    "p1": (
        (("g1",), ("-g0",)),
        (("g0",), ("g0", "g1")),
    ),
    "p2": (
        (("g1",), ("-g0",), ("g2",)),
        (("g0",), ("g0", "g1"), ("g2",)),
    ),
}


def build_catalog() -> Catalog:
    entries = []
    for group in build_groups():
        entries.append(
            CatalogEntry(
                group.name,
                group,
                OUT_DATA.get(group.name),
                AUT_DATA.get(group.name),
            )
        )
    return Catalog(tuple(entries))


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    default_out = Path(__file__).resolve().parent.parent / "src" / "flatfiber" / "data" / "groups.json"
    parser.add_argument("--out", type=Path, default=default_out)
    args = parser.parse_args()

    catalog = build_catalog()
    # Round-trip through the loader so the written file is known-valid.
    reloaded = catalog_from_json(catalog_to_json(catalog))
    assert reloaded.names() == tuple(sorted(catalog.names()))
    args.out.parent.mkdir(parents=True, exist_ok=True)
    save_catalog(catalog, args.out)
    dims = {}
    for e in catalog.entries:
        dims[e.group.dimension] = dims.get(e.group.dimension, 0) + 1
    print(f"wrote {len(catalog.entries)} groups to {args.out}")
    print("per dimension:", dict(sorted(dims.items())))


if __name__ == "__main__":
    main()
