"""Catalog loading, normal-subgroup enumeration, and the pair classifier."""

import json
import time

import pytest

from flatfiber.catalog import (
    CatalogError,
    catalog_from_json,
    catalog_to_json,
    classify,
    enumerate_complete_normals,
    load_catalog,
    load_result,
    result_to_json,
    save_catalog,
    save_result,
    subgroup_key,
    verify_classification,
)
from flatfiber.exactalg import QMat
from flatfiber.spacegroup import Isometry

WALLPAPER = [
    "p1", "p2", "pm", "pg", "cm", "pmm", "pmg", "pgg", "cmm",
    "p4", "p4m", "p4g", "p3", "p3m1", "p31m", "p6", "p6m",
]


@pytest.fixture(scope="module")
def catalog():
    return load_catalog()


@pytest.fixture(scope="module")
def one_dim_runs(catalog):
    combos = [
        ("p1_1d", "p1_1d"),
        ("pm_1d", "p1_1d"),
        ("p1_1d", "pm_1d"),
        ("pm_1d", "pm_1d"),
    ]
    return {
        combo: {k: classify(catalog, combo[0], combo[1], bound=k) for k in (2, 3)}
        for combo in combos
    }


# ---------------------------------------------------------------------------
# Loading and persistence
# ---------------------------------------------------------------------------


def test_catalog_contents_load_quickly():
    t0 = time.time()
    cat = load_catalog()
    elapsed = time.time() - t0
    names = set(cat.names())
    assert set(WALLPAPER) <= names
    assert {"p1_1d", "pm_1d"} <= names
    assert sum(1 for e in cat.entries if e.group.dimension == 3) >= 5
    assert elapsed < 5.0
    for entry in cat.entries:
        # Construction re-ran every group invariant; spot-check the rest.
        assert entry.group.presentation is not None
        assert entry.group.coset_reps[0].is_identity()


def test_model_entries_carry_automorphism_data(catalog):
    for name in ("p1_1d", "pm_1d", "p1", "p2"):
        entry = catalog.entry(name)
        assert entry.out_generators
        assert entry.aut_generators
    assert catalog.entry("p4m").out_generators is None


def test_round_trip_is_lossless(catalog, tmp_path):
    path = tmp_path / "groups.json"
    save_catalog(catalog, path)
    again = load_catalog(path)
    assert again.names() == tuple(sorted(catalog.names()))
    for entry in catalog.entries:
        twin = again.entry(entry.name)
        assert twin.group.gram.rows == entry.group.gram.rows
        assert twin.group.lattice.basis.rows == entry.group.lattice.basis.rows
        assert twin.group.coset_reps == entry.group.coset_reps
        assert twin.group.presentation.relators == entry.group.presentation.relators
        assert twin.out_generators == entry.out_generators
        assert twin.aut_generators == entry.aut_generators


def test_broken_closure_names_the_pair(catalog):
    payload = json.loads(json.dumps(catalog_to_json(catalog)))
    grp = next(g for g in payload["groups"] if g["name"] == "p4")
    grp["coset_reps"][1]["translation"] = ["1/3", "0"]
    with pytest.raises(CatalogError, match=r"\(\d+, \d+\).*closure congruence"):
        catalog_from_json(payload)


def test_parse_error_reports_location(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"schema": "flatfiber/1", "groups": [')
    with pytest.raises(CatalogError, match="line 1"):
        load_catalog(path)


def test_unknown_group_and_schema_errors(catalog):
    with pytest.raises(CatalogError, match="unknown catalog group"):
        catalog.entry("p5")
    with pytest.raises(CatalogError, match="schema"):
        catalog_from_json({"schema": "flatfiber/0", "groups": []})


# ---------------------------------------------------------------------------
# Enumeration
# ---------------------------------------------------------------------------


def test_enumerate_counts_on_p1(catalog):
    p1 = catalog.group("p1")
    assert len(enumerate_complete_normals(p1, 1, 1)) == 4
    assert len(enumerate_complete_normals(p1, 1, 2)) == 8


def test_enumerate_rotation_group_has_no_invariant_line(catalog):
    assert enumerate_complete_normals(catalog.group("p4"), 1, 3) == []


def test_enumerate_mirror_group_axes(catalog):
    subs = enumerate_complete_normals(catalog.group("pm"), 1, 1)
    assert len(subs) == 2
    lattices = sorted(h.analysis().translations.basis.rows for h in subs)
    assert lattices == [((0, 1),), ((1, 0),)]
    # The y-axis subgroup swallows the mirror, the x-axis one stays free.
    sizes = sorted(len(h.analysis().transversal) for h in subs)
    assert sizes == [1, 2]


def test_enumerate_output_is_order_invariant(catalog, monkeypatch):
    import flatfiber.catalog as catmod

    p1 = catalog.group("p1")
    reference = [subgroup_key(h) for h in enumerate_complete_normals(p1, 1, 2)]
    original = catmod._primitive_vectors

    def permuted(n, bound):
        vecs = list(original(n, bound))
        vecs.reverse()
        return vecs

    monkeypatch.setattr(catmod, "_primitive_vectors", permuted)
    shuffled = [subgroup_key(h) for h in enumerate_complete_normals(p1, 1, 2)]
    assert shuffled == reference


def test_enumerate_rejects_large_fiber_dimension(catalog):
    with pytest.raises(ValueError, match="fiber dimension"):
        enumerate_complete_normals(catalog.group("p1_3d"), 3, 1)


# ---------------------------------------------------------------------------
# Classification
# ---------------------------------------------------------------------------


def test_small_pool_splits_straight_from_glide(catalog):
    res = classify(catalog, "p1_1d", "p1_1d", bound=2, pool=["p1", "pg"])
    assert len(res.records) == 2
    orders = {r.group_name: r.omega_invariant.image_order() for r in res.records}
    assert orders == {"p1": 1, "pg": 2}
    assert all(w.kind == "omega-image" for w in res.splits)
    assert not res.indeterminate


def test_z_over_z_merges_both_glide_realizations(one_dim_runs):
    res = one_dim_runs[("p1_1d", "p1_1d")][2]
    assert len(res.records) == 2
    glide = next(r for r in res.records if r.omega_invariant.image_order() == 2)
    assert {m.group_name for m in glide.members} == {"pg", "pg_alt"}
    cross = [c for c in glide.certificates if c.source.group_name != c.target.group_name]
    assert len(cross) == 1
    straight = next(r for r in res.records if r.omega_invariant.image_order() == 1)
    assert {m.group_name for m in straight.members} == {"p1"}
    assert len(straight.members) == 8
    assert len(straight.certificates) == 7


def test_dihedral_base_classes(one_dim_runs):
    res = one_dim_runs[("pm_1d", "p1_1d")][2]
    families = sorted(tuple(sorted({m.group_name for m in r.members})) for r in res.records)
    assert families == [
        ("cm",), ("p2",), ("pg", "pg_alt"), ("pgg",), ("pm",), ("pmg",)
    ]
    assert not res.indeterminate
    by_rep = {r.group_name: r for r in res.records}
    # The mirror and both glides have the same outer invariant and the same
    # cohomology; only the obstruction class tells them apart.
    assert by_rep["pm"].omega_invariant.image_order() == 1
    assert by_rep["pg"].omega_invariant.image_order() == 1
    assert by_rep["pm"].h1_structure.invariant_factors == (2, 2)
    assert by_rep["pg"].h1_structure.invariant_factors == (2, 2)
    witness = {
        frozenset((w.first.group_name, w.second.group_name)): w.kind for w in res.splits
    }
    assert witness[frozenset(("pm", "pg"))] == "cohomology"
    assert witness[frozenset(("pm", "cm"))] == "cohomology"
    assert witness[frozenset(("pgg", "pmg"))] == "cohomology"
    # Same image order on both sides, split by the hom itself.
    assert witness[frozenset(("p2", "pgg"))] == "omega-image"
    assert by_rep["p2"].omega_invariant.image_order() == 2
    assert by_rep["pgg"].omega_invariant.image_order() == 2


def test_z_base_dihedral_fiber_detects_centering(one_dim_runs):
    res = one_dim_runs[("p1_1d", "pm_1d")][2]
    assert len(res.records) == 2
    orders = {r.group_name: r.omega_invariant.image_order() for r in res.records}
    assert orders == {"pm": 1, "cm": 2}


def test_dihedral_dihedral_classes(one_dim_runs):
    res = one_dim_runs[("pm_1d", "pm_1d")][2]
    families = sorted(tuple(sorted({m.group_name for m in r.members})) for r in res.records)
    assert families == [("cmm",), ("pmg",), ("pmm",)]
    assert all(w.kind == "omega-image" for w in res.splits)


def test_class_counts_stable_under_bound_increase(one_dim_runs):
    for combo, runs in one_dim_runs.items():
        assert len(runs[2].records) == len(runs[3].records), combo
        reps2 = sorted(r.group_name for r in runs[2].records)
        reps3 = sorted(r.group_name for r in runs[3].records)
        assert reps2 == reps3, combo


def test_three_dimensional_partial_pool(catalog):
    res = classify(
        catalog, "p1_1d", "p1", bound=1, pool=["p1_3d", "p2_3d", "p21_3d"]
    )
    assert len(res.records) == 2
    orders = {r.group_name: r.omega_invariant.image_order() for r in res.records}
    assert orders == {"p1_3d": 1, "p21_3d": 2}
    # The half-turn screw group only fibers over the plane orthogonal to its axis.
    screw = next(r for r in res.records if r.group_name == "p21_3d")
    assert len(screw.members) == 1
    assert verify_classification(catalog, result_to_json(res)) == sum(
        len(r.certificates) for r in res.records
    )


def test_model_data_requirements(catalog):
    with pytest.raises(CatalogError, match="automorphism data"):
        classify(catalog, "pm", "p1_1d")
    with pytest.raises(CatalogError, match="outer-automorphism data"):
        classify(catalog, "p1_1d", "pm")


def test_pool_dimension_mismatch(catalog):
    with pytest.raises(CatalogError, match="wrong dimension"):
        classify(catalog, "p1_1d", "p1_1d", bound=1, pool=["p1_3d"])


# ---------------------------------------------------------------------------
# Result persistence
# ---------------------------------------------------------------------------


def test_result_round_trip_and_reverification(catalog, one_dim_runs, tmp_path):
    res = one_dim_runs[("p1_1d", "p1_1d")][2]
    path = tmp_path / "classes.json"
    save_result(res, path)
    payload = load_result(path)
    assert payload["base"] == "p1_1d" and payload["fiber"] == "p1_1d"
    total = sum(len(r.certificates) for r in res.records)
    assert verify_classification(catalog, payload) == total


def test_tampered_certificate_fails_reverification(catalog, one_dim_runs):
    res = one_dim_runs[("p1_1d", "p1_1d")][2]
    payload = json.loads(json.dumps(result_to_json(res)))
    rec = next(r for r in payload["records"] if r["certificates"])
    # The identity no longer carries the source span onto the target span.
    rec["certificates"][0]["conjugator"]["matrix"] = [["1", "0"], ["0", "1"]]
    with pytest.raises(CatalogError, match="failed re-verification"):
        verify_classification(catalog, payload)


def test_result_files_reject_wrong_kind(tmp_path):
    path = tmp_path / "odd.json"
    path.write_text(json.dumps({"schema": "flatfiber/1", "kind": "something-else"}))
    with pytest.raises(CatalogError, match="pair classification"):
        load_result(path)
