"""Crystallographic groups in lattice coordinates.

A group of Euclidean isometries is stored in a basis adapted to its
translation lattice: point parts are integral matrices preserving a
rational positive definite Gram form, translation parts are rational
vectors, and the full translation lattice is an integral lattice of full
rank.  The group is finitely described by its lattice together with one
coset representative per point-group element.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .exactalg import (
    ONE,
    ZERO,
    QMat,
    QSubspace,
    Rat,
    ZLattice,
    coordinates_in_rowspace,
    kernel_int,
    left_kernel_int,
    rat,
    row_hnf_rational,
    solve_integer_linear,
)

__all__ = [
    "Isometry",
    "SpaceGroup",
    "SubgroupHandle",
    "Presentation",
    "compose",
    "invert",
    "group_from_generators",
    "raw_closure",
    "translation_subgroup",
    "center_lattice",
    "is_normal",
    "space_group_presentation",
    "evaluate_word",
    "express_as_word",
    "conjugate_isometry",
    "affine_conjugate_group",
    "DEFAULT_POINT_GROUP_BOUND",
]

DEFAULT_POINT_GROUP_BOUND = 448

Vec = tuple[Fraction, ...]


def _vec(v: Iterable[int | str | Fraction]) -> Vec:
    return tuple(rat(x) for x in v)


@dataclass(frozen=True)
class Isometry:
    """Affine map x -> translation + matrix * x."""

    matrix: QMat
    translation: Vec

    def __init__(self, matrix: QMat | Iterable[Iterable[int | Fraction]], translation: Iterable[int | Fraction]):
        if not isinstance(matrix, QMat):
            matrix = QMat(matrix)
        t = _vec(translation)
        if matrix.nrows != matrix.cols or matrix.nrows != len(t):
            raise ValueError("isometry dimension mismatch")
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "translation", t)

    @property
    def dim(self) -> int:
        return len(self.translation)

    def apply(self, x: Sequence[Fraction]) -> Vec:
        return tuple(a + b for a, b in zip(self.translation, self.matrix.matvec(x)))

    def is_identity(self) -> bool:
        return self.matrix.rows == QMat.identity(self.dim).rows and not any(self.translation)

    def is_translation(self) -> bool:
        return self.matrix.rows == QMat.identity(self.dim).rows

    @staticmethod
    def identity(n: int) -> "Isometry":
        return Isometry(QMat.identity(n), [ZERO] * n)

    @staticmethod
    def translation_by(v: Iterable[int | Fraction]) -> "Isometry":
        t = _vec(v)
        return Isometry(QMat.identity(len(t)), t)


def compose(a: Isometry, b: Isometry) -> Isometry:
    """Composite a after b: x -> a(b(x))."""
    return Isometry(a.matrix * b.matrix, tuple(x + y for x, y in zip(a.translation, a.matrix.matvec(b.translation))))


def invert(a: Isometry) -> Isometry:
    inv = a.matrix.inverse()
    return Isometry(inv, tuple(-x for x in inv.matvec(a.translation)))


def conjugate_isometry(phi: Isometry, g: Isometry) -> Isometry:
    """phi g phi^(-1) for an invertible affinity phi."""
    return compose(compose(phi, g), invert(phi))


def _point_key(m: QMat) -> tuple:
    return m.rows


@dataclass(frozen=True)
class Presentation:
    """Finite presentation with generators given as explicit isometries.

    Relator words use tokens "gK" and "-gK" referring to the K-th generator
    and its inverse.
    """

    generators: tuple[Isometry, ...]
    relators: tuple[tuple[str, ...], ...]


@dataclass(frozen=True)
class SpaceGroup:
    """Cocompact discrete isometry group in lattice coordinates."""

    dimension: int
    gram: QMat
    lattice: ZLattice
    coset_reps: tuple[Isometry, ...]
    name: str = ""
    presentation: Presentation | None = None

    def __post_init__(self):
        n = self.dimension
        if self.gram.shape != (n, n):
            raise ValueError("Gram shape mismatch")
        if self.lattice.ambient_dim != n or self.lattice.rank != n:
            raise ValueError("not cocompact")
        if not self.coset_reps or not self.coset_reps[0].is_identity():
            raise ValueError("first coset representative must be the identity")
        seen = set()
        for rep in self.coset_reps:
            key = _point_key(rep.matrix)
            if key in seen:
                raise ValueError("duplicate point part among coset representatives")
            seen.add(key)
            if not rep.matrix.is_integral():
                raise ValueError("point parts must be integral")
            if (rep.matrix.transpose() * self.gram * rep.matrix).rows != self.gram.rows:
                raise ValueError("point part does not preserve the Gram form")
            # Lattice invariance A L = L.
            for i in range(n):
                img = rep.matrix.matvec(self.lattice.basis.row(i))
                if not self.lattice.contains(img):
                    raise ValueError("point part does not preserve the lattice")

    # -- basic structure ----------------------------------------------------

    @property
    def point_group_order(self) -> int:
        return len(self.coset_reps)

    def rep_by_point(self) -> dict:
        return {_point_key(r.matrix): r for r in self.coset_reps}

    def reduce_translation(self, v: Sequence[Fraction]) -> Vec:
        """Representative of v modulo the lattice with coefficients in [0,1)."""
        coords = coordinates_in_rowspace(self.lattice.basis, v)
        assert coords is not None
        frac = [c - (c.numerator // c.denominator) for c in coords]
        return QMat([frac], self.dimension).__mul__(self.lattice.basis).row(0)

    def canonical_rep(self, g: Isometry) -> Isometry:
        return Isometry(g.matrix, self.reduce_translation(g.translation))

    def contains(self, g: Isometry) -> bool:
        if g.dim != self.dimension:
            return False
        rep = self.rep_by_point().get(_point_key(g.matrix))
        if rep is None:
            return False
        diff = tuple(a - b for a, b in zip(g.translation, rep.translation))
        return self.lattice.contains(diff)

    def generators(self) -> list[Isometry]:
        """Standard generating set: lattice basis translations plus the
        non-identity coset representatives."""
        gens = [Isometry.translation_by(self.lattice.basis.row(i)) for i in range(self.dimension)]
        gens.extend(r for r in self.coset_reps if not r.is_identity())
        return gens

    def elements_with_point(self, m: QMat):
        rep = self.rep_by_point().get(_point_key(m))
        return rep

    def with_name(self, name: str) -> "SpaceGroup":
        return SpaceGroup(self.dimension, self.gram, self.lattice, self.coset_reps, name, self.presentation)

    def with_presentation(self, pres: Presentation) -> "SpaceGroup":
        return SpaceGroup(self.dimension, self.gram, self.lattice, self.coset_reps, self.name, pres)


def _frobenius_ok(group: SpaceGroup) -> bool:
    """Composites of coset representatives land in the represented cosets."""
    table = group.rep_by_point()
    for a in group.coset_reps:
        for b in group.coset_reps:
            c = compose(a, b)
            rep = table.get(_point_key(c.matrix))
            if rep is None:
                return False
            if not group.lattice.contains(tuple(x - y for x, y in zip(c.translation, rep.translation))):
                return False
    return True


# ---------------------------------------------------------------------------
# Closure from generators
# ---------------------------------------------------------------------------


class ClosureError(ValueError):
    pass


def raw_closure(
    dim: int,
    gens: Sequence[Isometry],
    point_group_bound: int = DEFAULT_POINT_GROUP_BOUND,
):
    """Point-group coset table and translation subgroup generated by gens.

    Point parts must be integral.  Translation parts may be rational, so
    the translation subgroup is returned as canonical rational basis rows
    (possibly of deficient rank).  Returns (reps, trans_rows) where reps is
    a dict point-part-key -> Isometry containing the identity.
    """
    for g in gens:
        if not g.matrix.is_integral():
            raise ClosureError("generator point parts must be integral")
    reps: dict = {QMat.identity(dim).rows: Isometry.identity(dim)}
    trans: list[Vec] = []
    trans_basis = QMat([], dim)

    def trans_contains(v: Vec) -> bool:
        if not any(v):
            return True
        c = coordinates_in_rowspace(trans_basis, v)
        return c is not None and all(x.denominator == 1 for x in c)

    def add_translation(v: Vec) -> bool:
        nonlocal trans_basis
        if trans_contains(v):
            return False
        trans.append(v)
        trans_basis = row_hnf_rational(trans, dim)
        return True

    gen_list = list(gens) + [invert(g) for g in gens]
    changed = True
    while changed:
        changed = False
        worklist = list(reps.values())
        for r in worklist:
            for g in gen_list:
                c = compose(r, g)
                key = c.matrix.rows
                if key not in reps:
                    if len(reps) >= point_group_bound:
                        raise ClosureError("point group not finite within bound")
                    reps[key] = c
                    changed = True
                else:
                    diff = tuple(a - b for a, b in zip(c.translation, reps[key].translation))
                    if add_translation(diff):
                        changed = True
        # Closes the translation subgroup under the point action.
        for key in list(reps):
            mat = QMat(key)
            for i in range(trans_basis.nrows):
                if add_translation(mat.matvec(trans_basis.row(i))):
                    changed = True
    return reps, trans_basis


def closure_with_transform(
    dim: int,
    gram: QMat,
    gens: Sequence[Isometry],
    name: str = "",
    point_group_bound: int = DEFAULT_POINT_GROUP_BOUND,
) -> tuple[SpaceGroup, QMat]:
    """Closure of a generating set plus the coordinate change that was applied.

    Returns (group, S) where S maps the group's final coordinates back to the
    input coordinates (x_input = S @ x_group).  S is the identity whenever the
    generated translation subgroup was already integral; otherwise the group
    was conjugated into a basis of its own translation lattice and S holds
    that basis in its columns.
    """
    for g in gens:
        if (g.matrix.transpose() * gram * g.matrix).rows != gram.rows:
            raise ClosureError("generator does not preserve the Gram form")
    reps, trans_basis = raw_closure(dim, gens, point_group_bound)
    if trans_basis.nrows < dim:
        raise ClosureError("not cocompact")
    ident_key = QMat.identity(dim).rows
    if trans_basis.is_integral():
        lattice = ZLattice(trans_basis, dim)
        ordered = [Isometry.identity(dim)] + [
            Isometry(r.matrix, _reduce_mod_lattice(lattice, r.translation))
            for k, r in reps.items()
            if k != ident_key
        ]
        group = SpaceGroup(dim, gram, lattice, tuple(ordered), name)
        assert _frobenius_ok(group)
        return group, QMat.identity(dim)
    # Rebase into the translation lattice: x = S y with S columns the basis.
    s = trans_basis.transpose()
    s_inv = s.inverse()
    new_gram = s.transpose() * gram * s
    new_reps = []
    for k, r in reps.items():
        mat = s_inv * r.matrix * s
        tr = s_inv.matvec(r.translation)
        new_reps.append(Isometry(mat, tr))
    lattice = ZLattice.standard(dim)
    ordered = [Isometry.identity(dim)] + [
        Isometry(r.matrix, _reduce_mod_lattice(lattice, r.translation))
        for r in new_reps
        if r.matrix.rows != QMat.identity(dim).rows
    ]
    group = SpaceGroup(dim, new_gram, lattice, tuple(ordered), name)
    assert _frobenius_ok(group)
    return group, s


def group_from_generators(
    dim: int,
    gram: QMat,
    gens: Sequence[Isometry],
    name: str = "",
    point_group_bound: int = DEFAULT_POINT_GROUP_BOUND,
) -> SpaceGroup:
    """Closure of a generating set into a SpaceGroup.

    The input coordinate system is kept whenever the generated translation
    subgroup is integral; otherwise the group is conjugated into a basis of
    its own translation lattice (so the lattice becomes Z^n).  Raises
    "not cocompact" when the translation subgroup has deficient rank and
    "point group not finite within bound" when the point closure overflows.
    """
    group, _ = closure_with_transform(dim, gram, gens, name, point_group_bound)
    return group


def _reduce_mod_lattice(lattice: ZLattice, v: Sequence[Fraction]) -> Vec:
    coords = coordinates_in_rowspace(lattice.basis, v)
    assert coords is not None
    frac = [c - (c.numerator // c.denominator) for c in coords]
    return QMat([frac], lattice.ambient_dim).__mul__(lattice.basis).row(0)


def rebase_to_lattice(group: SpaceGroup) -> tuple[SpaceGroup, QMat]:
    """Conjugate a group so its translation lattice becomes the standard Z^n.

    Returns (rebased_group, S) with S mapping new coordinates to old ones
    (x_old = S @ x_new); S is the identity when the lattice is already
    standard and the group is returned unchanged.
    """
    n = group.dimension
    if group.lattice.basis.rows == QMat.identity(n).rows:
        return group, QMat.identity(n)
    s = group.lattice.basis.transpose()
    rebased = affine_conjugate_group(group, Isometry(s.inverse(), [0] * n), name=group.name)
    return rebased, s


def affine_conjugate_group(group: SpaceGroup, phi: Isometry, name: str = "") -> SpaceGroup:
    """Transport of a group along an invertible affinity: phi G phi^(-1).

    The point part of phi must map the lattice onto an integral lattice and
    conjugated point parts must stay integral; otherwise a ValueError is
    raised by the SpaceGroup validator.
    """
    c = phi.matrix
    c_inv = c.inverse()
    new_lattice_rows = [c.matvec(group.lattice.basis.row(i)) for i in range(group.dimension)]
    lat_mat = QMat(new_lattice_rows, group.dimension)
    lattice = ZLattice(lat_mat, group.dimension)
    gram = c_inv.transpose() * group.gram * c_inv
    reps = [Isometry.identity(group.dimension)]
    for r in group.coset_reps:
        if r.is_identity():
            continue
        g = conjugate_isometry(phi, r)
        reps.append(Isometry(g.matrix, _reduce_mod_lattice(lattice, g.translation)))
    return SpaceGroup(group.dimension, gram, lattice, tuple(reps), name)


# ---------------------------------------------------------------------------
# Subgroups
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SubgroupHandle:
    """Finitely generated subgroup of a SpaceGroup, held by generators."""

    parent: SpaceGroup
    gens: tuple[Isometry, ...]

    def __init__(self, parent: SpaceGroup, gens: Sequence[Isometry]):
        for g in gens:
            if not parent.contains(g):
                raise ValueError("generator outside the parent group")
        object.__setattr__(self, "parent", parent)
        object.__setattr__(self, "gens", tuple(gens))

    def analysis(self) -> "SubgroupAnalysis":
        return _analyze_subgroup(self)

    def contains(self, g: Isometry) -> bool:
        return self.analysis().contains(g)


@dataclass(frozen=True)
class SubgroupAnalysis:
    """Coset-enumeration data: point transversal plus translation lattice."""

    handle: SubgroupHandle
    transversal: dict
    translations: ZLattice

    def point_parts(self) -> list[QMat]:
        return [QMat(k) for k in self.transversal]

    def contains(self, g: Isometry) -> bool:
        t = self.transversal.get(_point_key(g.matrix))
        if t is None:
            return False
        resid = compose(g, invert(t))
        assert resid.is_translation()
        return self.translations.contains(resid.translation)


_analysis_cache: dict = {}


def _analyze_subgroup(handle: SubgroupHandle) -> SubgroupAnalysis:
    key = handle
    hit = _analysis_cache.get(key)
    if hit is not None:
        return hit
    dim = handle.parent.dimension
    gens = list(handle.gens)
    gen_list = gens + [invert(g) for g in gens]
    transversal: dict = {QMat.identity(dim).rows: Isometry.identity(dim)}
    trans_rows: list[Vec] = []
    basis = QMat([], dim)

    def add_trans(v: Vec):
        nonlocal basis
        if not any(v):
            return
        c = coordinates_in_rowspace(basis, v)
        if c is not None and all(x.denominator == 1 for x in c):
            return
        trans_rows.append(v)
        basis = row_hnf_rational(trans_rows, dim)

    # Schreier generators of the kernel of the point-part map.  The point
    # image is finite so the transversal closes quickly.
    changed = True
    while changed:
        changed = False
        for t in list(transversal.values()):
            for g in gen_list:
                c = compose(t, g)
                key2 = c.matrix.rows
                if key2 not in transversal:
                    transversal[key2] = c
                    changed = True
                else:
                    resid = compose(c, invert(transversal[key2]))
                    before = basis.nrows, basis.rows
                    add_trans(resid.translation)
                    if (basis.nrows, basis.rows) != before:
                        changed = True
    if not basis.is_integral():
        raise ValueError("subgroup translations are not integral in these coordinates")
    lat = ZLattice(basis, dim) if basis.nrows else ZLattice(QMat([], dim), dim)
    out = SubgroupAnalysis(handle, transversal, lat)
    _analysis_cache[key] = out
    return out


def translation_subgroup(handle: SubgroupHandle) -> ZLattice:
    """Lattice of pure translations contained in the subgroup."""
    return handle.analysis().translations


def center_lattice(handle: SubgroupHandle) -> ZLattice:
    """Translations in the subgroup fixed by all of its point parts."""
    a = handle.analysis()
    t = a.translations
    dim = handle.parent.dimension
    if t.rank == 0:
        return t
    mats = a.point_parts()
    # u = c * basis with (A - I)(u) = 0 for every point part A.
    rows = []
    for m in mats:
        diff = m - QMat.identity(dim)
        block = t.basis * diff.transpose()  # rows: (A - I) applied to basis rows
        rows.extend(block.transpose().rows)  # constraint matrix on coords c
    if not rows:
        return t
    constraint = QMat(rows, t.rank)
    sol = solve_integer_linear(constraint, [ZERO] * constraint.nrows)
    assert sol is not None
    _, kern = sol
    out_rows = [QMat([kern.row(i)], t.rank).__mul__(t.basis).row(0) for i in range(kern.nrows)]
    return ZLattice(QMat(out_rows, dim) if out_rows else QMat([], dim), dim)


def is_normal(group: SpaceGroup, handle: SubgroupHandle) -> bool:
    """Whether the subgroup is normal in the ambient group."""
    for g in group.generators():
        for h in handle.gens:
            if not handle.contains(conjugate_isometry(g, h)):
                return False
            if not handle.contains(conjugate_isometry(invert(g), h)):
                return False
    return True


# ---------------------------------------------------------------------------
# Words and presentations
# ---------------------------------------------------------------------------


def evaluate_word(gens: Sequence[Isometry], word: Sequence[str]) -> Isometry:
    """Evaluates a relator-style word ("g0", "-g1", ...) over generators."""
    if not gens:
        raise ValueError("empty generator list")
    out = Isometry.identity(gens[0].dim)
    for tok in word:
        inv = tok.startswith("-")
        idx = int(tok.lstrip("-").lstrip("g"))
        g = gens[idx]
        out = compose(out, invert(g) if inv else g)
    return out


def space_group_presentation(group: SpaceGroup) -> Presentation:
    """Multiplication-table presentation over the standard generating set.

    Generators are the lattice basis translations followed by the
    non-identity coset representatives.  Relators cover translation
    commutativity, the point action on the lattice, and the coset
    multiplication table with its translation corrections.
    """
    n = group.dimension
    gens = group.generators()
    t_count = n

    def t_word(v: Sequence[Fraction], inverse: bool = False) -> list[str]:
        coords = coordinates_in_rowspace(group.lattice.basis, v)
        assert coords is not None and all(c.denominator == 1 for c in coords)
        out: list[str] = []
        for i, c in enumerate(coords):
            k = int(c)
            if inverse:
                k = -k
            tok = f"g{i}" if k > 0 else f"-g{i}"
            out.extend([tok] * abs(k))
        return out

    relators: list[tuple[str, ...]] = []
    for i in range(t_count):
        for j in range(i + 1, t_count):
            relators.append((f"g{i}", f"g{j}", f"-g{i}", f"-g{j}"))
    reps = [r for r in group.coset_reps if not r.is_identity()]
    rep_index = {(_point_key(r.matrix)): t_count + k for k, r in enumerate(reps)}
    for k, r in enumerate(reps):
        gk = t_count + k
        for i in range(t_count):
            v = group.lattice.basis.row(i)
            img = r.matrix.matvec(v)
            word = [f"g{gk}", f"g{i}", f"-g{gk}"] + t_word(img, inverse=True)
            relators.append(tuple(word))
    table = group.rep_by_point()
    for a in [group.coset_reps[0]] + reps:
        for b in [group.coset_reps[0]] + reps:
            if a.is_identity() and b.is_identity():
                continue
            c = compose(a, b)
            rep = table[_point_key(c.matrix)]
            corr = tuple(x - y for x, y in zip(c.translation, rep.translation))
            word: list[str] = []
            if not a.is_identity():
                word.append(f"g{rep_index[_point_key(a.matrix)]}")
            if not b.is_identity():
                word.append(f"g{rep_index[_point_key(b.matrix)]}")
            if not rep.is_identity():
                word.append(f"-g{rep_index[_point_key(rep.matrix)]}")
            word.extend(t_word(corr, inverse=True))
            if word:
                relators.append(tuple(word))
    pres = Presentation(tuple(gens), tuple(relators))
    for rel in pres.relators:
        assert evaluate_word(gens, rel).is_identity()
    return pres


def express_as_word(group: SpaceGroup, target: Isometry, gens: Sequence[Isometry] | None = None) -> list[str]:
    """Writes a group element as a word over a generating set.

    With the default generating set this is direct; for a custom set a
    breadth-first search over the finite point image finds a word with the
    right point part, after which the translation residue is solved in the
    lattice of Schreier translations.
    """
    if gens is None:
        gens = group.generators()
    if not group.contains(target):
        raise ValueError("target outside the group")
    dim = group.dimension
    # BFS over point parts reachable by generator words.
    start = QMat.identity(dim).rows
    frontier = {start: []}
    seen = {start}
    reach: dict = {start: []}
    gen_list = [(i, g, False) for i, g in enumerate(gens)] + [
        (i, invert(g), True) for i, g in enumerate(gens)
    ]
    while frontier:
        nxt = {}
        for key, word in frontier.items():
            mat = QMat(key)
            for i, g, inv in gen_list:
                nk = (mat * g.matrix).rows
                if nk not in seen:
                    seen.add(nk)
                    tok = f"-g{i}" if inv else f"g{i}"
                    nxt[nk] = word + [tok]
                    reach[nk] = word + [tok]
        frontier = nxt
    tk = _point_key(target.matrix)
    if tk not in reach:
        raise ValueError("target point part not generated")
    word = reach[tk]
    w = evaluate_word(gens, word)
    resid = compose(invert(w), target)
    assert resid.is_translation()
    # Schreier translation generators with their defining words.
    trans_gens: list[tuple[Vec, list[str]]] = []
    transversal: dict = {start: []}
    changed = True
    while changed:
        changed = False
        for key, tword in list(transversal.items()):
            mat_rep = evaluate_word(gens, tword) if tword else Isometry.identity(dim)
            for i, g, inv in gen_list:
                tok = f"-g{i}" if inv else f"g{i}"
                c = compose(mat_rep, g)
                nk = c.matrix.rows
                if nk not in transversal:
                    transversal[nk] = tword + [tok]
                    changed = True
                else:
                    other = evaluate_word(gens, transversal[nk]) if transversal[nk] else Isometry.identity(dim)
                    schreier = compose(c, invert(other))
                    if schreier.is_translation() and any(schreier.translation):
                        wlist = tword + [tok] + _invert_word(transversal[nk])
                        if (schreier.translation, wlist) not in trans_gens:
                            trans_gens.append((schreier.translation, wlist))
    if any(resid.translation):
        rows = [tg[0] for tg in trans_gens]
        if not rows:
            raise ValueError("translation residue not generated")
        sol = solve_integer_linear(QMat(rows, dim).transpose(), list(resid.translation))
        if sol is None:
            raise ValueError("translation residue not generated")
        coeffs, _ = sol
        for c, (_, wl) in zip(coeffs, trans_gens):
            k = int(c)
            if k > 0:
                word = word + wl * k
            elif k < 0:
                word = word + _invert_word(wl) * (-k)
    check = evaluate_word(gens, word)
    if not (check.matrix.rows == target.matrix.rows and check.translation == target.translation):
        # The Schreier solve works modulo nothing, so this is a hard error.
        raise ValueError("word reconstruction failed")
    return word


def _invert_word(word: Sequence[str]) -> list[str]:
    out = []
    for tok in reversed(word):
        out.append(tok[1:] if tok.startswith("-") else "-" + tok)
    return out
