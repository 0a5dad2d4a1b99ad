"""Finite local systems of DG algebras over ordered simplicial complexes.

A system assigns a truncated DG algebra to every simplex and a DG morphism to
every facet inclusion; deeper restrictions are composites (functoriality is a
validation check, so composites are path-independent).  The module provides
the standard predicates (locally constant, extendable), global sections as a
DG algebra, pullback along simplicial vertex maps, objectwise fiber products,
the vertexwise cohomology local coefficients with their edge transports, and
twisted simplicial cohomology with those coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional

from .cdga import (
    DGMorphism,
    GradedCohomology,
    TruncatedDGA,
    cohomology,
    induced_map,
    is_quasi_iso,
    tensor_product,
)
from .errors import InputError, PreconditionError
from .exactlin import (
    ONE,
    QMatrix,
    Vector,
    ZERO,
    concat,
    kernel_basis,
    rank,
    solve,
    solve_many,
    unit_vector,
    zero_vector,
)
from .gluing import FiberProductDGA, _kernel_carrier, fiber_product, interval_forms
from .polyforms import (
    SimplicialComplexK,
    Simplex,
    face_restriction_matrices,
    forms_dga,
)


@dataclass
class FiniteLocalSystem:
    """Contravariant assignment of DG algebras to the simplices of a complex."""

    base: SimplicialComplexK
    fibers: dict[Simplex, TruncatedDGA]
    facet_restrictions: dict[tuple[Simplex, int], DGMorphism]

    def fiber(self, s: Simplex) -> TruncatedDGA:
        return self.fibers[tuple(s)]

    def restriction(self, s: Simplex, t: Simplex) -> DGMorphism:
        """Composite restriction along t included in s (any codimension)."""
        s, t = tuple(s), tuple(t)
        if not set(t) <= set(s):
            raise InputError(f"{t} is not a face of {s}")
        if s == t:
            return DGMorphism.identity(self.fibers[s])
        extras = [p for p, v in enumerate(s) if v not in t]
        p = extras[-1]
        facet = s[:p] + s[p + 1 :]
        first = self.facet_restrictions[(s, p)]
        if facet == t:
            return first
        return self.restriction(facet, t).compose(first)

    def min_cutoff(self) -> int:
        return min(f.cutoff for f in self.fibers.values())


def validate(e: FiniteLocalSystem) -> list[str]:
    """Functoriality and morphism checks; returns violation descriptions."""
    problems: list[str] = []
    for s in e.base.all_simplices():
        if s not in e.fibers:
            problems.append(f"no fiber assigned to {s}")
    for (s, i), r in e.facet_restrictions.items():
        if not e.base.contains(s):
            problems.append(f"restriction on unknown simplex {s}")
            continue
        facet = s[:i] + s[i + 1 :]
        if r.source is not e.fibers[s] or r.target is not e.fibers[facet]:
            problems.append(f"restriction endpoints wrong at ({s}, {i})")
        try:
            r._verify("auto")
        except Exception as exc:  # noqa: BLE001
            problems.append(f"restriction at ({s}, {i}) is not a DG morphism: {exc}")
    for s in e.base.all_simplices():
        n = len(s) - 1
        if n < 2:
            continue
        for j in range(n + 1):
            for i in range(j):
                left_mid = s[:j] + s[j + 1 :]
                right_mid = s[:i] + s[i + 1 :]
                left = e.facet_restrictions[(left_mid, i)].compose(
                    e.facet_restrictions[(s, j)]
                )
                right = e.facet_restrictions[(right_mid, j - 1)].compose(
                    e.facet_restrictions[(s, i)]
                )
                if left.mats != right.mats:
                    problems.append(f"functoriality fails on {s} with faces {i}<{j}")
    return problems


@dataclass
class SystemMorphism:
    """Fiberwise DG morphisms commuting with the restrictions."""

    source: FiniteLocalSystem
    target: FiniteLocalSystem
    maps: dict[Simplex, DGMorphism]

    def validate(self) -> list[str]:
        problems = []
        if self.source.base != self.target.base:
            problems.append("source and target live over different bases")
            return problems
        for s in self.source.base.all_simplices():
            if s not in self.maps:
                problems.append(f"no component at {s}")
        for (s, i), r_src in self.source.facet_restrictions.items():
            facet = s[:i] + s[i + 1 :]
            r_tgt = self.target.facet_restrictions[(s, i)]
            left = r_tgt.compose(self.maps[s])
            right = self.maps[facet].compose(r_src)
            if left.mats != right.mats:
                problems.append(f"naturality fails at ({s}, {i})")
        return problems


# ---------------------------------------------------------------------------
# builders
# ---------------------------------------------------------------------------

def constant_system(base: SimplicialComplexK, fiber: TruncatedDGA) -> FiniteLocalSystem:
    """All fibers equal, all restrictions the identity."""
    fibers = {s: fiber for s in base.all_simplices()}
    restr = {}
    for s in base.all_simplices():
        for i, _facet in base.facets(s):
            restr[(s, i)] = DGMorphism.identity(fiber)
    return FiniteLocalSystem(base, fibers, restr)


def forms_system(
    base: SimplicialComplexK, total_cutoff: int, cutoff: Optional[int] = None
) -> FiniteLocalSystem:
    """Polynomial forms on each simplex with face restrictions.

    This is the ambient admissible algebra regarded as a local system; its
    global sections are the compatible polynomial forms on the complex.
    """
    dim = base.dim()
    if cutoff is None:
        cutoff = dim + 1
    per_dim = {n: forms_dga(n, total_cutoff, cutoff=cutoff) for n in range(dim + 1)}
    fibers = {s: per_dim[len(s) - 1] for s in base.all_simplices()}
    restr = {}
    for s in base.all_simplices():
        n = len(s) - 1
        for i, _facet in base.facets(s):
            mats = face_restriction_matrices(per_dim[n], per_dim[n - 1], i)
            restr[(s, i)] = DGMorphism(per_dim[n], per_dim[n - 1], mats, check="none")
    return FiniteLocalSystem(base, fibers, restr)


def tensor_system(
    e: FiniteLocalSystem, factor: TruncatedDGA, cutoff: int
) -> FiniteLocalSystem:
    """Objectwise tensor with a fixed algebra, restrictions r (x) id."""
    tensored: dict[int, TruncatedDGA] = {}
    fibers = {}
    for s in e.base.all_simplices():
        key = id(e.fibers[s])
        if key not in tensored:
            tensored[key] = tensor_product(e.fibers[s], factor, cutoff=cutoff)
        fibers[s] = tensored[key]
    restr = {}
    for (s, i), r in e.facet_restrictions.items():
        src = fibers[s]
        tgt = fibers[s[:i] + s[i + 1 :]]
        mats = []
        for k in range(min(src.cutoff, tgt.cutoff) + 1):
            entries = {}
            tindex = tgt.tensor_index[k]  # type: ignore[attr-defined]
            for col, (d1, a1, d2, b1) in enumerate(src.tensor_pairs[k]):  # type: ignore[attr-defined]
                rcol = r.mats[d1].column(a1)
                for row, v in enumerate(rcol):
                    if v:
                        entries[(tindex[(d1, row, d2, b1)], col)] = v
            mats.append(QMatrix(tgt.dim(k), src.dim(k), entries))
        restr[(s, i)] = DGMorphism(src, tgt, mats, check="none")
    return FiniteLocalSystem(e.base, fibers, restr)


def tensor_system_morphism(
    src: FiniteLocalSystem, dst: FiniteLocalSystem, leg: DGMorphism
) -> SystemMorphism:
    """id (x) leg between two tensor systems over the same forms factor.

    ``src`` and ``dst`` must be tensor systems whose simplexwise first factor
    agrees; ``leg`` maps the second factor of src to the second factor of dst.
    """
    maps = {}
    for s in src.base.all_simplices():
        a = src.fibers[s]
        b = dst.fibers[s]
        mats = []
        for k in range(min(a.cutoff, b.cutoff) + 1):
            entries = {}
            tindex = b.tensor_index[k]  # type: ignore[attr-defined]
            for col, (i, ia, j, jb) in enumerate(a.tensor_pairs[k]):  # type: ignore[attr-defined]
                img = leg.mats[j].column(jb)
                for r, v in enumerate(img):
                    if v:
                        key = (i, ia, j, r)
                        if key not in tindex:
                            raise InputError("tensor structures do not match")
                        entries[(tindex[key], col)] = v
            mats.append(QMatrix(b.dim(k), a.dim(k), entries))
        maps[s] = DGMorphism(a, b, mats, check="none")
    return SystemMorphism(src, dst, maps)


def twist_restriction(
    e: FiniteLocalSystem, s: Simplex, i: int, automorphism: DGMorphism
) -> FiniteLocalSystem:
    """Replace one facet restriction by automorphism o restriction."""
    s = tuple(s)
    restr = dict(e.facet_restrictions)
    old = restr[(s, i)]
    if automorphism.source is not old.target or automorphism.target is not old.target:
        raise InputError("twist must be an automorphism of the facet fiber")
    restr[(s, i)] = automorphism.compose(old)
    return FiniteLocalSystem(e.base, dict(e.fibers), restr)


# ---------------------------------------------------------------------------
# predicates
# ---------------------------------------------------------------------------

def _fiber_cohomologies(e: FiniteLocalSystem, upto: int) -> dict[int, GradedCohomology]:
    out: dict[int, GradedCohomology] = {}
    for f in e.fibers.values():
        if id(f) not in out:
            out[id(f)] = cohomology(f, upto)
    return out


def is_locally_constant(e: FiniteLocalSystem, upto: int) -> bool:
    """Every restriction a quasi-isomorphism in degrees <= upto."""
    hs = _fiber_cohomologies(e, upto)
    for (s, i), r in e.facet_restrictions.items():
        ok, _ = is_quasi_iso(r, upto, source_h=hs[id(r.source)], target_h=hs[id(r.target)])
        if not ok:
            return False
    return True


def is_extendable(e: FiniteLocalSystem, upto: Optional[int] = None):
    """Sections over each simplex surject onto sections over its boundary.

    Over the full complex of a simplex the sections are the top fiber, so the
    check is: the boundary-restriction map from the fiber is degreewise onto
    the global sections of the boundary system.  Returns (bool, witnesses).
    """
    if upto is None:
        upto = e.min_cutoff()
    witnesses = []
    ok = True
    for s in e.base.all_simplices():
        n = len(s) - 1
        if n < 1:
            continue
        boundary = SimplicialComplexK.from_maximal(
            [s[:i] + s[i + 1 :] for i in range(n + 1)]
        )
        sub = FiniteLocalSystem(
            boundary,
            {t: e.fibers[t] for t in boundary.all_simplices()},
            {
                (t, i): e.facet_restrictions[(t, i)]
                for t in boundary.all_simplices()
                for i, _f in boundary.facets(t)
            },
        )
        gamma, incl, layout = _sections_basis(sub, upto)
        fib = e.fibers[s]
        for k in range(min(upto, fib.cutoff) + 1):
            cols = []
            for t in range(fib.dim(k)):
                x = unit_vector(fib.dim(k), t)
                amb = []
                for tau in layout:
                    amb.append(e.restriction(s, tau).apply(k, x))
                target = concat(*amb) if amb else ()
                sol = solve(incl[k], target)
                if sol is None:
                    raise InputError("boundary image is not a compatible family")
                cols.append(sol)
            m = (
                QMatrix.from_cols(cols, len(gamma[k]))
                if cols
                else QMatrix.zero(len(gamma[k]), 0)
            )
            if rank(m) != len(gamma[k]):
                ok = False
                witnesses.append((s, k, len(gamma[k]), rank(m)))
    return ok, witnesses


# ---------------------------------------------------------------------------
# global sections
# ---------------------------------------------------------------------------

def _sections_basis(e: FiniteLocalSystem, upto: int):
    """Kernel bases of the facet-compatibility map, per degree.

    Returns (bases, inclusion matrices, simplex layout); the ambient space in
    degree k is the direct sum of the fibers over all simplices in layout
    order.
    """
    layout = e.base.all_simplices()
    offsets_per_degree = []
    kernels = []
    incl = []
    pairs = [(s, i, s[:i] + s[i + 1 :]) for s in layout for i, _t in e.base.facets(s)]
    for k in range(upto + 1):
        offs = {}
        pos = 0
        for s in layout:
            offs[s] = pos
            pos += e.fibers[s].dim(k)
        ambient_dim = pos
        offsets_per_degree.append(offs)
        entries = {}
        row = 0
        for s, i, t in pairs:
            r = e.facet_restrictions[(s, i)]
            for (rr, cc), v in r.mats[k].entries.items():
                entries[(row + rr, offs[s] + cc)] = v
            tdim = e.fibers[t].dim(k)
            for rr in range(tdim):
                entries[(row + rr, offs[t] + rr)] = entries.get(
                    (row + rr, offs[t] + rr), ZERO
                ) - ONE
            row += tdim
        m = QMatrix(row, ambient_dim, entries)
        ker = kernel_basis(m)
        kernels.append(ker)
        incl.append(QMatrix.from_cols(ker, ambient_dim))
    return kernels, incl, layout


def global_sections(e: FiniteLocalSystem, upto: int) -> TruncatedDGA:
    """Compatible families as a DG algebra (the limit over the face poset)."""
    if upto > e.min_cutoff():
        raise InputError("global_sections cutoff exceeds a fiber cutoff")
    layout = e.base.all_simplices()
    kernels, incl, _ = _sections_basis(e, upto)

    def dims_at(k):
        return [e.fibers[s].dim(k) for s in layout]

    ambient_dims = [sum(dims_at(k)) for k in range(upto + 1)]
    ambient_d = []
    for k in range(upto):
        entries = {}
        row_off = 0
        col_off = 0
        for s in layout:
            f = e.fibers[s]
            for (rr, cc), v in f.d_matrix(k).entries.items():
                entries[(row_off + rr, col_off + cc)] = v
            row_off += f.dim(k + 1)
            col_off += f.dim(k)
        ambient_d.append(QMatrix(ambient_dims[k + 1], ambient_dims[k], entries))

    def split(k: int, v: Vector):
        out = {}
        pos = 0
        for s in layout:
            n = e.fibers[s].dim(k)
            out[s] = v[pos : pos + n]
            pos += n
        return out

    def ambient_mult(i, va, j, vb):
        xs = split(i, va)
        ys = split(j, vb)
        parts = [e.fibers[s].multiply(i, xs[s], j, ys[s]) for s in layout]
        return concat(*parts)

    def ambient_levels(k, p):
        out = []
        pos = 0
        for s in layout:
            f = e.fibers[s]
            for v in f.level_subspace(k, p):
                out.append(
                    zero_vector(pos) + tuple(v) + zero_vector(ambient_dims[k] - pos - f.dim(k))
                )
            pos += f.dim(k)
        return out

    has_levels = any(
        f.levels is not None or f._level_fn is not None for f in e.fibers.values()
    )
    unit = concat(*[e.fibers[s].unit for s in layout])
    carrier, incl_mats = _kernel_carrier(
        ambient_dims,
        kernels,
        ambient_d,
        ambient_mult,
        unit,
        upto,
        ambient_level_subspace=ambient_levels if has_levels else None,
        name="global_sections",
    )
    carrier.section_layout = layout  # type: ignore[attr-defined]
    carrier.section_inclusions = incl_mats  # type: ignore[attr-defined]
    carrier.section_system = e  # type: ignore[attr-defined]
    return carrier


# ---------------------------------------------------------------------------
# pullback and fiber products
# ---------------------------------------------------------------------------

def pullback(
    e: FiniteLocalSystem, u: Mapping[int, int], new_base: SimplicialComplexK
) -> FiniteLocalSystem:
    """Pullback along the simplicial vertex map u: new_base -> base of e."""
    for s in new_base.all_simplices():
        imgs = [u.get(v) for v in s]
        if any(w is None for w in imgs):
            raise InputError(f"vertex map undefined on {s}")
        if any(x > y for x, y in zip(imgs, imgs[1:])):
            raise InputError(f"vertex map is not order-preserving on {s}")
        img = tuple(sorted(set(imgs)))
        if not e.base.contains(img):
            raise InputError(f"image of {s} is not a simplex of the base")

    def image(s: Simplex) -> Simplex:
        return tuple(sorted({u[v] for v in s}))

    fibers = {s: e.fibers[image(s)] for s in new_base.all_simplices()}
    restr = {}
    for s in new_base.all_simplices():
        for i, t in new_base.facets(s):
            restr[(s, i)] = e.restriction(image(s), image(t))
    return FiniteLocalSystem(new_base, fibers, restr)


def fiber_product_system(
    f: SystemMorphism, g: SystemMorphism, upto: int
) -> tuple[FiniteLocalSystem, dict[Simplex, FiberProductDGA]]:
    """Objectwise fiber product of E1 -> E0 <- E2 with induced restrictions.

    The first leg must be objectwise surjective in degrees <= upto (checked);
    this is what makes the result behave like the algebra of a gluing.
    """
    same_target = f.target is g.target or (
        f.target.base == g.target.base
        and all(
            f.target.fibers[s] is g.target.fibers[s]
            for s in f.target.base.all_simplices()
        )
    )
    if not same_target:
        raise InputError("legs need a common target system")
    base = f.source.base
    carriers: dict[Simplex, FiberProductDGA] = {}
    for s in base.all_simplices():
        for k in range(upto + 1):
            if rank(f.maps[s].mats[k]) != f.target.fibers[s].dim(k):
                raise PreconditionError(
                    f"first leg not surjective at simplex {s}, degree {k}"
                )
        carriers[s] = fiber_product(f.maps[s], g.maps[s], upto)
    fibers = {s: carriers[s].carrier for s in base.all_simplices()}
    restr = {}
    for s in base.all_simplices():
        a1 = f.source
        a2 = g.source
        for i, t in base.facets(s):
            src = carriers[s]
            tgt = carriers[t]
            mats = []
            for k in range(upto + 1):
                imgs = []
                for col in range(src.carrier.dim(k)):
                    amb = src.inclusions[k].column(col)
                    d1 = a1.fibers[s].dim(k)
                    x1 = amb[:d1]
                    x2 = amb[d1:]
                    y1 = a1.facet_restrictions[(s, i)].apply(k, x1)
                    y2 = a2.facet_restrictions[(s, i)].apply(k, x2)
                    imgs.append(concat(y1, y2))
                sols = solve_many(tgt.inclusions[k], imgs)
                entries = {}
                for c, sol in enumerate(sols):
                    if sol is None:
                        raise InputError("restriction leaves the fiber product")
                    for r, v in enumerate(sol):
                        if v:
                            entries[(r, c)] = v
                mats.append(QMatrix(tgt.carrier.dim(k), src.carrier.dim(k), entries))
            restr[(s, i)] = DGMorphism(src.carrier, tgt.carrier, mats, check="none")
    return FiniteLocalSystem(base, fibers, restr), carriers


# ---------------------------------------------------------------------------
# local coefficients
# ---------------------------------------------------------------------------

@dataclass
class LocalCoefficients:
    """Graded vector spaces at vertices with edge transport isomorphisms.

    ``edges[(u, v)][q]`` transports the fiber at v to the fiber at u (toward
    the smaller vertex, matching the twisted coboundary below).
    """

    base: SimplicialComplexK
    vertex_dims: dict[int, dict[int, int]]
    edges: dict[tuple[int, int], dict[int, QMatrix]]

    def validate_cocycle(self) -> list[str]:
        problems = []
        for s in self.base.simplices_of_dim(2):
            u, v, w = s
            for q in self.vertex_dims[u]:
                lhs = self.edges[(u, v)][q].matmul(self.edges[(v, w)][q])
                rhs = self.edges[(u, w)][q]
                if lhs != rhs:
                    problems.append(f"cocycle fails on {s} in fiber degree {q}")
        return problems


def cohomology_local_system(e: FiniteLocalSystem, upto: int) -> LocalCoefficients:
    """Vertexwise cohomology with zig-zag edge transports.

    Requires a locally constant system; the transport along an edge (u, v) is
    H(restrict to u) composed with the inverse of H(restrict to v).
    """
    if not is_locally_constant(e, upto):
        raise PreconditionError("system is not locally constant in the range")
    hs = _fiber_cohomologies(e, upto)
    vertex_dims = {}
    for (v,) in e.base.simplices_of_dim(0):
        vertex_dims[v] = {q: hs[id(e.fibers[(v,)])].dims[q] for q in range(upto + 1)}
    edges = {}
    for s in e.base.simplices_of_dim(1):
        u, v = s
        h_e = hs[id(e.fibers[s])]
        to_u = induced_map(
            e.restriction(s, (u,)), upto, source_h=h_e, target_h=hs[id(e.fibers[(u,)])]
        )
        to_v = induced_map(
            e.restriction(s, (v,)), upto, source_h=h_e, target_h=hs[id(e.fibers[(v,)])]
        )
        per_q = {}
        for q in range(upto + 1):
            inv_cols = solve_many(to_v[q], [unit_vector(to_v[q].rows, r) for r in range(to_v[q].rows)])
            if any(c is None for c in inv_cols):
                raise PreconditionError(f"transport not invertible on edge {s}")
            inv = QMatrix.from_cols([c for c in inv_cols if c is not None], to_v[q].cols)
            per_q[q] = to_u[q].matmul(inv)
        edges[(u, v)] = per_q
    return LocalCoefficients(e.base, vertex_dims, edges)


def h_local_coefficients(
    base: SimplicialComplexK, c: LocalCoefficients, p_max: int, q_max: int
) -> dict[tuple[int, int], int]:
    """Twisted simplicial cohomology dimensions H^p(base; H^q).

    The coboundary twists the face omitting the least vertex:
    (delta x)(v0...vp) = rho_{v0 v1} x(v1...vp) + sum_{i>=1} (-1)^i x(... v_i hat ...).
    """
    problems = c.validate_cocycle()
    if problems:
        raise InputError("local coefficients fail the cocycle condition: " + problems[0])
    out = {}
    for q in range(q_max + 1):
        spaces = []
        offsets = []
        for p in range(p_max + 2):
            simp = base.simplices_of_dim(p)
            offs = {}
            pos = 0
            for s in simp:
                offs[s] = pos
                pos += c.vertex_dims[s[0]].get(q, 0)
            spaces.append((simp, offs, pos))
        deltas = []
        for p in range(p_max + 1):
            simp_p, offs_p, dim_p = spaces[p]
            simp_p1, offs_p1, dim_p1 = spaces[p + 1]
            entries = {}
            for s in simp_p1:
                row0 = offs_p1[s]
                # face omitting the least vertex, twisted by the first edge
                tau0 = s[1:]
                rho = c.edges[(s[0], s[1])][q]
                for (rr, cc), v in rho.entries.items():
                    entries[(row0 + rr, offs_p[tau0] + cc)] = v
                for i in range(1, p + 2):
                    tau = s[:i] + s[i + 1 :]
                    sign = -1 if i % 2 else 1
                    n = c.vertex_dims[s[0]].get(q, 0)
                    for rr in range(n):
                        key = (row0 + rr, offs_p[tau] + rr)
                        entries[key] = entries.get(key, ZERO) + sign
            deltas.append(QMatrix(dim_p1, dim_p, {k: v for k, v in entries.items() if v}))
        for p in range(p_max + 1):
            dim_p = spaces[p][2]
            ker = dim_p - rank(deltas[p])
            im_prev = rank(deltas[p - 1]) if p >= 1 else 0
            out[(p, q)] = ker - im_prev
    return out


# ---------------------------------------------------------------------------
# cylinder
# ---------------------------------------------------------------------------

def cylinder(e: FiniteLocalSystem, interval_total: int = 2):
    """The system E (x) I with I the constant truncated interval algebra.

    Returns (cylinder system, evaluation at 0, evaluation at 1) where the
    evaluations are system morphisms back to e.
    """
    i_forms = interval_forms(interval_total)
    cutoff = e.min_cutoff()
    cyl = tensor_system(e, i_forms, cutoff=cutoff)
    evals = []
    for endpoint in (0, 1):
        maps = {}
        for s in e.base.all_simplices():
            src = cyl.fibers[s]
            tgt = e.fibers[s]
            mats = []
            for k in range(min(src.cutoff, tgt.cutoff) + 1):
                entries = {}
                for col, (d1, a1, d2, b1) in enumerate(src.tensor_pairs[k]):  # type: ignore[attr-defined]
                    if d2 != 0:
                        continue
                    val = ONE if (endpoint == 1 or b1 == 0) else ZERO
                    if val:
                        entries[(a1, col)] = val
                mats.append(QMatrix(tgt.dim(k), src.dim(k), entries))
            maps[s] = DGMorphism(src, tgt, mats, check="none")
        evals.append(SystemMorphism(cyl, e, maps))
    return cyl, evals[0], evals[1]
