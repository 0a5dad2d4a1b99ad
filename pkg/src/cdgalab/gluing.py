"""Fiber products of CDGA maps, Mayer-Vietoris, and suspension models.

The fiber product of f: A -> C and g: B -> C is carried by the kernel of
(f, -g) on A (+) B with componentwise product and differential re-expressed
in the kernel basis.  It models the algebra of an adjunction space; the long
exact sequence of

    0 -> A x_C B -> A (+) B -> C -> 0

(valid when one leg is surjective) is produced with exactness verified at
every node.  The suspension algebra of a connected algebra m is the
subalgebra spanned by the unit and shifted elements w*dt with every positive
product zero; its cohomology is the reduced cohomology of m shifted up once.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .cdga import (
    DGMorphism,
    TruncatedDGA,
    cohomology,
    direct_sum,
    is_quasi_iso,
    point_dga,
    tensor_product,
)
from .errors import CutoffTooSmallError, InputError, PreconditionError
from .exactlin import (
    ONE,
    QMatrix,
    Vector,
    ZERO,
    column_space_basis,
    complement_basis,
    concat,
    kernel_basis,
    rank,
    solve,
    solve_many,
    unit_vector,
    vec_is_zero,
    zero_vector,
)


@dataclass
class FiberProductDGA:
    """Kernel model of A x_C B together with its structure maps."""

    f: DGMorphism
    g: DGMorphism
    carrier: TruncatedDGA
    inclusions: list[QMatrix]  # carrier basis written in A (+) B coordinates
    proj_a: DGMorphism
    proj_b: DGMorphism

    @property
    def a(self) -> TruncatedDGA:
        return self.f.source

    @property
    def b(self) -> TruncatedDGA:
        return self.g.source


def _kernel_carrier(
    ambient_dims: list[int],
    kernel_vectors: list[list[Vector]],
    ambient_d: list[QMatrix],
    ambient_mult,
    ambient_unit: Vector,
    cutoff: int,
    ambient_level_subspace=None,
    name: str = "",
) -> tuple[TruncatedDGA, list[QMatrix]]:
    """Shared construction: a sub-DG-algebra presented by kernel bases.

    ``ambient_mult(k1, v1, k2, v2)`` multiplies ambient vectors (may raise
    CutoffTooSmallError), ``ambient_d[k]`` differentiates them.  Returns the
    TruncatedDGA in the kernel bases plus the per-degree inclusion matrices.
    """
    dims = [len(kernel_vectors[k]) for k in range(cutoff + 1)]
    incl = [
        QMatrix.from_cols(kernel_vectors[k], ambient_dims[k]) for k in range(cutoff + 1)
    ]

    diff_mats = []
    for k in range(cutoff):
        images = [ambient_d[k].matvec(v) for v in kernel_vectors[k]]
        sols = solve_many(incl[k + 1], images)
        entries = {}
        for c, sol in enumerate(sols):
            if sol is None:
                raise InputError("differential does not preserve the kernel subspace")
            for r, val in enumerate(sol):
                if val:
                    entries[(r, c)] = val
        diff_mats.append(QMatrix(dims[k + 1], dims[k], entries))

    def mult_fn(i, a, j, b):
        try:
            prod = ambient_mult(i, kernel_vectors[i][a], j, kernel_vectors[j][b])
        except CutoffTooSmallError:
            return None
        sol = solve(incl[i + j], prod)
        if sol is None:
            raise InputError("product does not preserve the kernel subspace")
        return sol

    unit_sol = solve(incl[0], ambient_unit)
    if unit_sol is None:
        raise InputError("the unit is not a compatible family")

    level_fn = None
    if ambient_level_subspace is not None:
        def level_fn(k, p, _incl=incl, _dims=dims):
            sub = ambient_level_subspace(k, p)
            if not sub:
                return []
            # x in carrier coords with incl * x inside span(sub)
            sub_m = QMatrix.from_cols(sub, ambient_dims[k])
            stacked = _incl[k].hstack(sub_m.scale(-1))
            out = []
            seen = set()
            for v in kernel_basis(stacked):
                head = v[: _dims[k]]
                if not vec_is_zero(head) and head not in seen:
                    seen.add(head)
                    out.append(head)
            # reduce to an independent set
            from .exactlin import RowSpace

            rs = RowSpace(_dims[k])
            return [v for v in out if rs.add(v)]

    carrier = TruncatedDGA(
        cutoff,
        dims,
        unit_sol,
        diff_mats,
        mult_fn,
        level_fn=level_fn,
        check=False,
        name=name,
    )
    return carrier, incl


def fiber_product(f: DGMorphism, g: DGMorphism, upto: int) -> FiberProductDGA:
    """The pullback of f: A -> C, g: B -> C in DG algebras, up to degree upto."""
    if f.target is not g.target:
        raise InputError("fiber_product needs a common target")
    a, b, c = f.source, g.source, f.target
    cutoff = min(upto, a.cutoff, b.cutoff, f.cap, g.cap)
    if cutoff < upto:
        raise InputError(
            f"fiber_product up to degree {upto} needs leg cutoffs at least {upto}"
        )

    ambient_dims = [a.dim(k) + b.dim(k) for k in range(cutoff + 1)]
    kernels = []
    for k in range(cutoff + 1):
        m = f.mats[k].hstack(g.mats[k].scale(-1))
        kernels.append(kernel_basis(m))

    ambient_d = []
    for k in range(cutoff):
        entries = {}
        for (r, cc), v in a.d_matrix(k).entries.items():
            entries[(r, cc)] = v
        for (r, cc), v in b.d_matrix(k).entries.items():
            entries[(r + a.dim(k + 1), cc + a.dim(k))] = v
        ambient_d.append(QMatrix(ambient_dims[k + 1], ambient_dims[k], entries))

    def ambient_mult(i, va, j, vb):
        pa = a.multiply(i, va[: a.dim(i)], j, vb[: a.dim(j)])
        pb = b.multiply(i, va[a.dim(i) :], j, vb[a.dim(j) :])
        return pa + pb

    def ambient_levels(k, p):
        out = []
        for v in a.level_subspace(k, p):
            out.append(tuple(v) + zero_vector(b.dim(k)))
        for v in b.level_subspace(k, p):
            out.append(zero_vector(a.dim(k)) + tuple(v))
        return out

    has_levels = (
        a.levels is not None
        or a._level_fn is not None
        or b.levels is not None
        or b._level_fn is not None
    )
    carrier, incl = _kernel_carrier(
        ambient_dims,
        kernels,
        ambient_d,
        ambient_mult,
        a.unit + b.unit,
        cutoff,
        ambient_level_subspace=ambient_levels if has_levels else None,
        name="fiber_product",
    )

    proj_a = DGMorphism(
        carrier,
        a,
        [
            QMatrix(
                a.dim(k),
                carrier.dim(k),
                {
                    (r, cc): v
                    for (r, cc), v in incl[k].entries.items()
                    if r < a.dim(k)
                },
            )
            for k in range(cutoff + 1)
        ],
        check="none",
    )
    proj_b = DGMorphism(
        carrier,
        b,
        [
            QMatrix(
                b.dim(k),
                carrier.dim(k),
                {
                    (r - a.dim(k), cc): v
                    for (r, cc), v in incl[k].entries.items()
                    if r >= a.dim(k)
                },
            )
            for k in range(cutoff + 1)
        ],
        check="none",
    )
    return FiberProductDGA(f, g, carrier, incl, proj_a, proj_b)


# ---------------------------------------------------------------------------
# Mayer-Vietoris
# ---------------------------------------------------------------------------

@dataclass
class MayerVietorisReport:
    upto: int
    restriction: list[QMatrix] = field(default_factory=list)  # H(fp) -> H(A)+H(B)
    difference: list[QMatrix] = field(default_factory=list)  # H(A)+H(B) -> H(C)
    connecting: list[QMatrix] = field(default_factory=list)  # H^k(C) -> H^{k+1}(fp)
    exact_at: dict = field(default_factory=dict)
    failures: list[str] = field(default_factory=list)

    def ok(self) -> bool:
        return not self.failures

    def connecting_rank(self, k: int) -> int:
        return rank(self.connecting[k])


def mayer_vietoris(fp: FiberProductDGA, upto: int) -> MayerVietorisReport:
    """Long exact sequence of the fiber product, exactness verified nodewise.

    Requires one leg surjective in all degrees <= upto (otherwise the short
    sequence is not exact on the right).
    """
    a, b, c = fp.a, fp.b, fp.f.target
    for k in range(upto + 1):
        if rank(fp.f.mats[k]) != c.dim(k) and rank(fp.g.mats[k]) != c.dim(k):
            raise PreconditionError(f"no surjective leg in degree {k}")
    if upto >= fp.carrier.cutoff:
        raise InputError("mayer_vietoris needs upto below the carrier cutoff")

    h_fp = cohomology(fp.carrier, upto)
    h_a = cohomology(a, upto)
    h_b = cohomology(b, upto)
    h_c = cohomology(c, upto)

    rep = MayerVietorisReport(upto=upto)
    # restriction: class of (x_a, x_b) components
    for k in range(upto + 1):
        cols = []
        for v in h_fp.reps[k]:
            amb = fp.inclusions[k].matvec(v)
            ca = h_a.class_of(k, amb[: a.dim(k)])
            cb = h_b.class_of(k, amb[a.dim(k) :])
            cols.append(tuple(ca) + tuple(cb))
        rep.restriction.append(
            QMatrix.from_cols(cols, h_a.dims[k] + h_b.dims[k])
            if cols
            else QMatrix.zero(h_a.dims[k] + h_b.dims[k], 0)
        )
        # difference map f* - g*
        cols = []
        for v in h_a.reps[k]:
            cols.append(h_c.class_of(k, fp.f.apply(k, v)))
        for v in h_b.reps[k]:
            cols.append(tuple(-x for x in h_c.class_of(k, fp.g.apply(k, v))))
        rep.difference.append(
            QMatrix.from_cols(cols, h_c.dims[k]) if cols else QMatrix.zero(h_c.dims[k], 0)
        )
    # connecting map
    for k in range(upto):
        cols = []
        for v in h_c.reps[k]:
            m = fp.f.mats[k].hstack(fp.g.mats[k].scale(-1))
            pre = solve(m, v)
            if pre is None:
                raise PreconditionError(f"no preimage for a class in degree {k}")
            da = a.apply_d(k, pre[: a.dim(k)])
            db = b.apply_d(k, pre[a.dim(k) :])
            sol = solve(fp.inclusions[k + 1], concat(da, db))
            if sol is None:
                raise InputError("connecting image is not in the fiber product")
            cols.append(h_fp.class_of(k + 1, sol))
        rep.connecting.append(
            QMatrix.from_cols(cols, h_fp.dims[k + 1])
            if cols
            else QMatrix.zero(h_fp.dims[k + 1], 0)
        )

    # exactness at every node
    def check(node, incoming: QMatrix, outgoing: QMatrix):
        comp = outgoing.matmul(incoming)
        if not comp.is_zero():
            rep.failures.append(f"composition nonzero at {node}")
            rep.exact_at[node] = False
            return
        r_in = rank(incoming)
        dim_ker = outgoing.cols - rank(outgoing)
        rep.exact_at[node] = r_in == dim_ker
        if r_in != dim_ker:
            rep.failures.append(
                f"exactness fails at {node}: image rank {r_in}, kernel dim {dim_ker}"
            )

    for k in range(upto + 1):
        incoming = (
            rep.connecting[k - 1] if k > 0 else QMatrix.zero(h_fp.dims[0], 0)
        )
        check(("fp", k), incoming, rep.restriction[k])
        check(("sum", k), rep.restriction[k], rep.difference[k])
        if k < upto:
            check(("c", k), rep.difference[k], rep.connecting[k])
    return rep


# ---------------------------------------------------------------------------
# suspension model
# ---------------------------------------------------------------------------

@dataclass
class SuspensionModel:
    carrier: TruncatedDGA
    source: TruncatedDGA
    complement_choice: list[Vector]  # basis of the degree-1 complement of im d^0
    shifted_basis: list[list[Vector]]  # per carrier degree >= 2: vectors in source coords


def suspension_model(m: TruncatedDGA, upto: int) -> SuspensionModel:
    """The algebra Q (+) (positive part of m, shifted up, all products zero).

    The degree-1 piece of m is replaced by a chosen complement of im d^0, so
    the shifted complex computes the reduced cohomology of m one degree up.
    """
    if upto > m.cutoff + 1:
        raise InputError("suspension cutoff exceeds what the source stores")
    h0 = cohomology(m, 0)
    if h0.dims[0] != 1:
        raise PreconditionError("suspension_model needs a connected source algebra")

    image_d0 = column_space_basis(m.d_matrix(0))
    comp = complement_basis(image_d0, m.dim(1))
    shifted: list[list[Vector]] = [[], []]  # degrees 0 and 1 of the carrier
    for k in range(2, upto + 1):
        if k - 1 == 1:
            shifted.append(list(comp))
        else:
            shifted.append([unit_vector(m.dim(k - 1), t) for t in range(m.dim(k - 1))])

    dims = [1, 0] + [len(shifted[k]) for k in range(2, upto + 1)]
    diff_mats = []
    for k in range(upto):
        if k == 0 or k == 1:
            diff_mats.append(QMatrix.zero(dims[k + 1] if k + 1 <= upto else 0, dims[k]))
            continue
        cols = []
        for v in shifted[k]:
            img = m.apply_d(k - 1, v)
            # express in the degree-k shifted basis (full basis for k >= 2)
            cols.append(img)
        entries = {}
        for c, col in enumerate(cols):
            for r, val in enumerate(col):
                if val:
                    entries[(r, c)] = val
        diff_mats.append(QMatrix(dims[k + 1], dims[k], entries))

    def mult_fn(i, a, j, b):
        k = i + j
        if k > upto:
            return None
        if i == 0:
            return unit_vector(dims[k], b) if dims[k] else ()
        if j == 0:
            return unit_vector(dims[k], a) if dims[k] else ()
        return tuple([ZERO] * dims[k])

    labels = [["1"], []] + [
        [f"({m.labels[k - 1][_label_index(m, k - 1, v)]})*dt" if _label_index(m, k - 1, v) is not None else f"w{k}_{t}*dt" for t, v in enumerate(shifted[k])]
        for k in range(2, upto + 1)
    ]
    carrier = TruncatedDGA(
        upto,
        dims,
        (ONE,),
        diff_mats,
        mult_fn,
        labels=labels,
        check=False,
        name="suspension",
    )
    return SuspensionModel(carrier=carrier, source=m, complement_choice=comp, shifted_basis=shifted)


def _label_index(m: TruncatedDGA, k: int, v: Vector) -> Optional[int]:
    nz = [t for t, x in enumerate(v) if x != 0]
    if len(nz) == 1 and v[nz[0]] == 1:
        return nz[0]
    return None


def induced_fp_map(
    src: FiberProductDGA,
    dst: FiberProductDGA,
    on_a: DGMorphism,
    on_b: DGMorphism,
    check: str = "auto",
) -> DGMorphism:
    """Map of fiber products induced by componentwise maps of the corners.

    ``on_a`` and ``on_b`` must commute with the legs; the image of a kernel
    vector is re-expressed in the target kernel basis.
    """
    cap = min(src.carrier.cutoff, dst.carrier.cutoff)
    mats = []
    for k in range(cap + 1):
        imgs = []
        for col in range(src.carrier.dim(k)):
            amb = src.inclusions[k].column(col)
            da = src.a.dim(k)
            x1 = on_a.apply(k, amb[:da])
            x2 = on_b.apply(k, amb[da:])
            imgs.append(concat(x1, x2))
        sols = solve_many(dst.inclusions[k], imgs)
        entries = {}
        for c, sol in enumerate(sols):
            if sol is None:
                raise InputError("image does not satisfy the target leg equation")
            for r, v in enumerate(sol):
                if v:
                    entries[(r, c)] = v
        mats.append(QMatrix(dst.carrier.dim(k), src.carrier.dim(k), entries))
    return DGMorphism(src.carrier, dst.carrier, mats, check=check)


def theta_equivalence_check(
    fp: FiberProductDGA, glued: TruncatedDGA, theta: DGMorphism, upto: int
) -> tuple[bool, Optional[int]]:
    """Is the comparison map glued -> fiber product a quasi-isomorphism?"""
    if theta.source is not glued or theta.target is not fp.carrier:
        raise InputError("theta must map the glued model into the fiber product carrier")
    return is_quasi_iso(theta, upto)


# ---------------------------------------------------------------------------
# suspension triple helpers
# ---------------------------------------------------------------------------

def interval_forms(total_cutoff: int, cutoff: int = 2) -> TruncatedDGA:
    """Polynomial forms on the interval, levelled as a fiber direction.

    The filtration levels are cleared: when this algebra appears as a tensor
    factor of a local-system fiber, its dt points along the fiber, not the
    base, so it must not contribute to the skeletal filtration.
    """
    from .polyforms import forms_dga

    dga = forms_dga(1, total_cutoff, cutoff=cutoff)
    dga.levels = None
    return dga


def endpoint_evaluations(cyl: TruncatedDGA, m: TruncatedDGA, mm: TruncatedDGA) -> DGMorphism:
    """Evaluation (t=0, t=1) from m (x) interval-forms onto m x m."""
    pairs = cyl.tensor_pairs  # type: ignore[attr-defined]
    mats = []
    cap = min(cyl.cutoff, mm.cutoff)
    for k in range(cap + 1):
        entries = {}
        for col, (i, ia, j, jb) in enumerate(pairs[k]):
            if j != 0:
                continue  # dt-terms vanish at the endpoints
            # the degree-0 interval basis is 1, t, t^2, ... in that order
            # value at 0: coefficient of t^0; at 1: sum of coefficients
            if k != i:
                continue
            at0 = ONE if jb == 0 else ZERO
            at1 = ONE
            if at0:
                entries[(ia, col)] = at0
            entries[(ia + m.dim(k), col)] = entries.get((ia + m.dim(k), col), ZERO) + at1
        mats.append(QMatrix(mm.dim(k), cyl.dim(k), entries))
    return DGMorphism(cyl, mm, mats, check="auto", name="endpoint evaluation")


def two_point_unit_leg(mm: TruncatedDGA, m: TruncatedDGA, cutoff: int) -> tuple[TruncatedDGA, DGMorphism]:
    """The algebra Q x Q with its unit-pair inclusion into m x m."""
    qq = direct_sum(point_dga(cutoff), point_dga(cutoff))
    mats = [QMatrix.zero(mm.dim(k), qq.dim(k)) for k in range(min(qq.cutoff, mm.cutoff) + 1)]
    entries = {}
    for r, v in enumerate(m.unit):
        if v:
            entries[(r, 0)] = v
            entries[(r + m.dim(0), 1)] = v
    mats[0] = QMatrix(mm.dim(0), 2, entries)
    return qq, DGMorphism(qq, mm, mats, check="auto", name="unit pair")


def suspension_triple(m: TruncatedDGA, upto: int, interval_total: int = 2) -> tuple[DGMorphism, DGMorphism]:
    """Legs (evaluation, unit pair) whose fiber product models the suspension.

    A = m (x) interval forms, C = m x m, B = Q x Q.
    """
    cutoff = min(m.cutoff, upto + 1)
    i_forms = interval_forms(interval_total)
    cyl = tensor_product(m, i_forms, cutoff=cutoff)
    mm = direct_sum(m, m, cutoff=cutoff)
    f = endpoint_evaluations(cyl, m, mm)
    _, g = two_point_unit_leg(mm, m, cutoff)
    return f, g


def suspension_inclusion(susp: SuspensionModel, fp: FiberProductDGA) -> DGMorphism:
    """The map 1 -> (1,1), w*dt -> (w (x) dt, 0) into the fiber product."""
    cyl = fp.a
    pairs = cyl.tensor_pairs  # type: ignore[attr-defined]
    m = susp.source
    cap = min(susp.carrier.cutoff, fp.carrier.cutoff)
    # index of dt among the degree-1 interval basis: interval pairs are
    # (i, ia, 1, jb) with jb indexing t^l dt; dt itself is jb = 0
    mats = []
    for k in range(cap + 1):
        cols = []
        for t in range(susp.carrier.dim(k)):
            if k == 0:
                amb = concat(cyl.unit, fp.b.unit)
            else:
                w = susp.shifted_basis[k][t]
                amb_a = [ZERO] * cyl.dim(k)
                for r, val in enumerate(w):
                    if val:
                        amb_a[cyl.tensor_index[k][(k - 1, r, 1, 0)]] = val  # type: ignore[attr-defined]
                amb = tuple(amb_a) + zero_vector(fp.b.dim(k))
            sol = solve(fp.inclusions[k], amb)
            if sol is None:
                raise InputError("suspension element is not in the fiber product")
            cols.append(sol)
        mats.append(
            QMatrix.from_cols(cols, fp.carrier.dim(k))
            if cols
            else QMatrix.zero(fp.carrier.dim(k), 0)
        )
    return DGMorphism(susp.carrier, fp.carrier, mats, check="auto", name="suspension inclusion")
