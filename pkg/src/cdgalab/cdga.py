"""Differentials, cohomology and morphisms for free and truncated DG algebras.

Two presentations are used throughout the library:

* :class:`FreeCDGA` -- a free graded-commutative algebra with a differential
  given on generators and extended by the Leibniz rule;
* :class:`TruncatedDGA` -- an explicit basis per degree up to a cutoff, with
  multiplication tables and differential matrices.  This is the home of
  fiber products, quotients and global sections.

Truncation semantics: a product that would land above the cutoff (or that a
constructor could not represent) is recorded as *dropped*; using it raises
:class:`CutoffTooSmallError` instead of silently returning garbage.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Optional, Sequence

from .errors import CutoffTooSmallError, InputError
from .exactlin import (
    ONE,
    QMatrix,
    RowSpace,
    Vector,
    ZERO,
    column_space_basis,
    kernel_basis,
    rat,
    solve,
    unit_vector,
    vec_is_zero,
    zero_vector,
)
from .graded import Element, FreeGCA, Monomial, apply_odd_derivation


class FreeCDGA:
    """Free CDGA: a free algebra plus a degree +1 differential on generators."""

    def __init__(self, gca: FreeGCA, diff: Mapping[str, Element], check: bool = True):
        self.gca = gca
        images: dict[str, Element] = {}
        for g in gca.generators:
            img = diff.get(g.name)
            if img is None:
                img = gca.zero()
            if img.algebra is not gca:
                raise InputError(f"differential image of {g.name!r} lives in a different algebra")
            if not img.is_zero() and img.degree() != g.degree + 1:
                raise InputError(
                    f"differential of {g.name!r} must be homogeneous of degree {g.degree + 1}"
                )
            images[g.name] = img
        for name in diff:
            if name not in gca.index:
                raise InputError(f"differential given for unknown generator {name!r}")
        self.diff = images
        if check:
            ok, offender = check_d_squared(self)
            if not ok:
                name, residue = offender
                raise InputError(f"d squared is nonzero on generator {name!r}: {residue!r}")

    def d(self, x: Element) -> Element:
        if x.algebra is not self.gca:
            raise InputError("element of a different algebra")
        return apply_odd_derivation(self.diff, x)

    def d_gen(self, name: str) -> Element:
        return self.diff[name]

    def __repr__(self):
        return f"FreeCDGA({self.gca!r})"


def check_d_squared(f: FreeCDGA):
    """Verify d(d(g)) = 0 for every generator; return (ok, counterexample)."""
    for g in f.gca.generators:
        residue = apply_odd_derivation(f.diff, f.diff[g.name])
        if not residue.is_zero():
            return False, (g.name, residue)
    return True, None


# ---------------------------------------------------------------------------
# Truncated DG algebras
# ---------------------------------------------------------------------------

MultFn = Callable[[int, int, int, int], Optional[Vector]]


class TruncatedDGA:
    """DG algebra presented by explicit bases up to ``cutoff``.

    ``mult_fn(i, a, j, b)`` returns the structure-constant vector of the
    product of basis elements ``a`` (degree ``i``) and ``b`` (degree ``j``)
    for ``i <= j``, or None when the product was dropped.  Tables may be
    supplied lazily; results are cached.  ``levels`` optionally attaches a
    filtration level to every basis element (used by the spectral sequence
    machinery); ``level_fn(k, p)`` may instead return a basis of the level
    ``>= p`` subspace in degree ``k``.
    """

    def __init__(
        self,
        cutoff: int,
        dims: Sequence[int],
        unit: Vector,
        diff_mats: Sequence[Optional[QMatrix]],
        mult_fn: MultFn,
        labels: Optional[Sequence[Sequence[str]]] = None,
        levels: Optional[Sequence[Sequence[int]]] = None,
        level_fn: Optional[Callable[[int, int], list[Vector]]] = None,
        monomials: Optional[Sequence[Sequence[Monomial]]] = None,
        check: bool = True,
        name: str = "",
    ):
        if cutoff < 0:
            raise InputError("cutoff must be non-negative")
        if len(dims) != cutoff + 1:
            raise InputError("dims must list every degree from 0 to the cutoff")
        if dims[0] < 1:
            raise InputError("degree 0 must contain the unit")
        self.cutoff = cutoff
        self.dims = list(dims)
        if len(unit) != dims[0]:
            raise InputError("unit vector has the wrong length")
        self.unit = tuple(rat(u) for u in unit)
        if vec_is_zero(self.unit):
            raise InputError("unit must be nonzero")
        mats = list(diff_mats)
        if len(mats) != cutoff:
            raise InputError("diff_mats must cover degrees 0..cutoff-1")
        for k, m in enumerate(mats):
            if m is None:
                mats[k] = QMatrix.zero(dims[k + 1], dims[k])
            elif (m.rows, m.cols) != (dims[k + 1], dims[k]):
                raise InputError(f"differential matrix at degree {k} has the wrong shape")
        self.diff_mats: list[QMatrix] = mats  # type: ignore[assignment]
        self._mult_fn = mult_fn
        self._mult_cache: dict[tuple[int, int, int, int], Optional[Vector]] = {}
        if labels is None:
            labels = [[f"e{k}_{a}" for a in range(dims[k])] for k in range(cutoff + 1)]
        self.labels = [list(l) for l in labels]
        self.levels = [list(l) for l in levels] if levels is not None else None
        self._level_fn = level_fn
        self.monomials = [list(m) for m in monomials] if monomials is not None else None
        self.name = name
        if check:
            self._check_d_squared()

    # -- basics ---------------------------------------------------------
    def __repr__(self):
        tag = f" {self.name!r}" if self.name else ""
        return f"TruncatedDGA{tag}(cutoff={self.cutoff}, dims={self.dims})"

    def dim(self, k: int) -> int:
        return self.dims[k] if 0 <= k <= self.cutoff else 0

    def zero(self, k: int) -> Vector:
        return zero_vector(self.dim(k))

    def d_matrix(self, k: int) -> QMatrix:
        if not 0 <= k < self.cutoff:
            raise CutoffTooSmallError(
                f"differential out of degree {k} is not stored (cutoff {self.cutoff})"
            )
        return self.diff_mats[k]

    def apply_d(self, k: int, v: Vector) -> Vector:
        return self.d_matrix(k).matvec(v)

    def _check_d_squared(self):
        for k in range(self.cutoff - 1):
            prod = self.diff_mats[k + 1].matmul(self.diff_mats[k])
            if not prod.is_zero():
                raise InputError(f"d squared is nonzero from degree {k}")

    # -- products ---------------------------------------------------------
    def product_basis(self, i: int, a: int, j: int, b: int) -> Vector:
        """Structure constants of e_a^{(i)} * e_b^{(j)} as a degree i+j vector."""
        if i + j > self.cutoff:
            raise CutoffTooSmallError(
                f"product of degrees {i} and {j} exceeds cutoff {self.cutoff}"
            )
        if not (0 <= a < self.dim(i) and 0 <= b < self.dim(j)):
            raise InputError("basis index out of range")
        if i > j or (i == j and a > b):
            # graded commutativity fixes the other triangle
            base = self.product_basis(j, b, i, a)
            sign = -1 if (i * j) % 2 else 1
            return base if sign == 1 else tuple(-x for x in base)
        key = (i, a, j, b)
        if key in self._mult_cache:
            val = self._mult_cache[key]
        else:
            val = self._mult_fn(i, a, j, b)
            if val is not None:
                val = tuple(val)
                if len(val) != self.dim(i + j):
                    raise InputError("mult_fn returned a vector of the wrong length")
            self._mult_cache[key] = val
        if val is None:
            raise CutoffTooSmallError(
                f"product of basis elements ({i},{a}) and ({j},{b}) was dropped; "
                "rebuild with a larger cutoff"
            )
        return val

    def multiply(self, i: int, va: Vector, j: int, vb: Vector) -> Vector:
        """Bilinear product of a degree-i vector and a degree-j vector."""
        if i + j > self.cutoff:
            raise CutoffTooSmallError(
                f"product of degrees {i} and {j} exceeds cutoff {self.cutoff}"
            )
        acc = [ZERO] * self.dim(i + j)
        for a, ca in enumerate(va):
            if not ca:
                continue
            for b, cb in enumerate(vb):
                if not cb:
                    continue
                pv = self.product_basis(i, a, j, b)
                c = ca * cb
                for t, x in enumerate(pv):
                    if x:
                        acc[t] += c * x
        return tuple(acc)

    def one_times(self, k: int, v: Vector) -> Vector:
        return self.multiply(0, self.unit, k, v)

    # -- filtration levels -------------------------------------------------
    def level_subspace(self, k: int, p: int) -> list[Vector]:
        """Basis of the subspace of degree-k elements of level >= p."""
        if p <= 0:
            return [unit_vector(self.dim(k), a) for a in range(self.dim(k))]
        if self._level_fn is not None:
            return self._level_fn(k, p)
        if self.levels is not None:
            return [
                unit_vector(self.dim(k), a)
                for a, lv in enumerate(self.levels[k])
                if lv >= p
            ]
        return []

    def basis_level(self, k: int, a: int) -> int:
        return self.levels[k][a] if self.levels is not None else 0

    # -- validation ---------------------------------------------------------
    def validate(self, full: bool = True, rng=None, samples: int = 120) -> list[str]:
        """Check unit laws, Leibniz, graded commutativity and associativity.

        Returns a list of human-readable failure descriptions (empty = ok).
        Pairs whose product was dropped are skipped, not reported.
        """
        problems: list[str] = []

        def safe_product(i, a, j, b):
            try:
                return self.product_basis(i, a, j, b)
            except CutoffTooSmallError:
                return None

        # unit laws
        for k in range(self.cutoff + 1):
            for a in range(self.dim(k)):
                try:
                    lhs = self.one_times(k, unit_vector(self.dim(k), a))
                except CutoffTooSmallError:
                    continue
                if lhs != unit_vector(self.dim(k), a):
                    problems.append(f"unit law fails on basis ({k},{a})")
        # Leibniz
        pairs = [
            (i, a, j, b)
            for i in range(self.cutoff + 1)
            for j in range(i, self.cutoff + 1 - i)
            if i + j + 1 <= self.cutoff
            for a in range(self.dim(i))
            for b in range(self.dim(j))
        ]
        if not full and rng is not None and len(pairs) > samples:
            pairs = [pairs[rng.randrange(len(pairs))] for _ in range(samples)]
        for i, a, j, b in pairs:
            ab = safe_product(i, a, j, b)
            if ab is None:
                continue
            try:
                lhs = self.apply_d(i + j, ab)
                da = self.apply_d(i, unit_vector(self.dim(i), a))
                db = self.apply_d(j, unit_vector(self.dim(j), b))
                term1 = self.multiply(i + 1, da, j, unit_vector(self.dim(j), b))
                term2 = self.multiply(i, unit_vector(self.dim(i), a), j + 1, db)
            except CutoffTooSmallError:
                continue
            sign = -1 if i % 2 else 1
            rhs = tuple(x + sign * y for x, y in zip(term1, term2))
            if lhs != rhs:
                problems.append(f"Leibniz fails on basis pair ({i},{a}),({j},{b})")
        # associativity (sampled when lazy tables are large)
        triples = []
        if rng is not None:
            for _ in range(samples):
                i = rng.randint(0, self.cutoff)
                j = rng.randint(0, self.cutoff - i)
                k = rng.randint(0, self.cutoff - i - j)
                if self.dim(i) and self.dim(j) and self.dim(k):
                    triples.append(
                        (
                            i,
                            rng.randrange(self.dim(i)),
                            j,
                            rng.randrange(self.dim(j)),
                            k,
                            rng.randrange(self.dim(k)),
                        )
                    )
        else:
            for i in range(self.cutoff + 1):
                for j in range(self.cutoff + 1 - i):
                    for k in range(self.cutoff + 1 - i - j):
                        for a in range(self.dim(i)):
                            for b in range(self.dim(j)):
                                for c in range(self.dim(k)):
                                    triples.append((i, a, j, b, k, c))
        for i, a, j, b, k, c in triples:
            try:
                ab = self.product_basis(i, a, j, b)
                left = self.multiply(i + j, ab, k, unit_vector(self.dim(k), c))
                bc = self.product_basis(j, b, k, c)
                right = self.multiply(i, unit_vector(self.dim(i), a), j + k, bc)
            except CutoffTooSmallError:
                continue
            if left != right:
                problems.append(f"associativity fails on ({i},{a}),({j},{b}),({k},{c})")
        return problems


def from_tables(
    cutoff: int,
    dims: Sequence[int],
    unit: Vector,
    diff_mats: Sequence[Optional[QMatrix]],
    mult: Mapping[tuple[int, int, int, int], Vector],
    **kw,
) -> TruncatedDGA:
    """TruncatedDGA from an explicit (possibly partial) product table."""

    def mult_fn(i, a, j, b):
        return mult.get((i, a, j, b))

    return TruncatedDGA(cutoff, dims, unit, diff_mats, mult_fn, **kw)


# ---------------------------------------------------------------------------
# constructions
# ---------------------------------------------------------------------------

def truncate(f: FreeCDGA, cutoff: int) -> TruncatedDGA:
    """Faithful truncation of a free CDGA to degrees 0..cutoff."""
    if cutoff < 0:
        raise InputError("cutoff must be non-negative")
    gca = f.gca
    bases = [gca.basis_in_degree(k) for k in range(cutoff + 1)]
    index = [{m: a for a, m in enumerate(basis)} for basis in bases]
    dims = [len(b) for b in bases]

    def elt_vector(k: int, x: Element) -> Vector:
        acc = [ZERO] * dims[k]
        for m, c in x.terms.items():
            acc[index[k][m]] += c
        return tuple(acc)

    diff_mats = []
    for k in range(cutoff):
        entries = {}
        for a, mono in enumerate(bases[k]):
            dx = f.d(gca.element({mono: ONE}))
            for m, c in dx.terms.items():
                entries[(index[k + 1][m], a)] = c
        diff_mats.append(QMatrix(dims[k + 1], dims[k], entries))

    def mult_fn(i, a, j, b):
        prod = gca.element({bases[i][a]: ONE}) * gca.element({bases[j][b]: ONE})
        return elt_vector(i + j, prod)

    labels = [[gca.mono_str(m) for m in basis] for basis in bases]
    return TruncatedDGA(
        cutoff,
        dims,
        unit_vector(dims[0], index[0][gca.unit_monomial()]),
        diff_mats,
        mult_fn,
        labels=labels,
        monomials=bases,
        check=False,
    )


def free_element(gca: FreeGCA, trunc: TruncatedDGA, k: int, v: Vector) -> Element:
    if trunc.monomials is None:
        raise InputError("this truncated algebra does not come from a free algebra")
    if len(v) != trunc.dim(k):
        raise InputError("vector length does not match the degree dimension")
    return gca.element({m: c for m, c in zip(trunc.monomials[k], v) if c != 0})


def element_vector(gca: FreeGCA, trunc: TruncatedDGA, x: Element) -> tuple[int, Vector]:
    deg = x.degree()
    if deg is None:
        raise InputError("cannot place the zero element without a degree")
    basis = trunc.monomials[deg]
    idx = {m: a for a, m in enumerate(basis)}
    acc = [ZERO] * trunc.dim(deg)
    for m, c in x.terms.items():
        acc[idx[m]] += c
    return deg, tuple(acc)


def point_dga(cutoff: int) -> TruncatedDGA:
    """The base field as a DG algebra."""
    dims = [1] + [0] * cutoff
    return TruncatedDGA(
        cutoff,
        dims,
        (ONE,),
        [QMatrix.zero(dims[k + 1], dims[k]) for k in range(cutoff)],
        lambda i, a, j, b: (ONE,) if i == j == 0 else (),
        labels=[["1"]] + [[] for _ in range(cutoff)],
        check=False,
        name="Q",
    )


def power_quotient_dga(degree: int, power: int, cutoff: int) -> TruncatedDGA:
    """Q[x]/(x^power) with |x| = degree (even) and zero differential."""
    if degree % 2 != 0 or degree < 2:
        raise InputError("power quotients need one even positive generator degree")
    if power < 1:
        raise InputError("power must be at least 1")
    dims = [0] * (cutoff + 1)
    exps = {}
    for e in range(power):
        if e * degree <= cutoff:
            dims[e * degree] = 1
            exps[e * degree] = e

    def mult_fn(i, a, j, b):
        k = i + j
        if k > cutoff:
            return None
        e = exps.get(i, None)
        f = exps.get(j, None)
        if e is None or f is None:
            return ()
        if e + f < power and k in exps and exps[k] == e + f:
            return (ONE,)
        return tuple([ZERO] * dims[k]) if dims[k] else ()

    labels = [
        (["1"] if k == 0 else ([f"x^{exps[k]}"] if dims[k] else []))
        for k in range(cutoff + 1)
    ]
    return TruncatedDGA(
        cutoff,
        dims,
        (ONE,),
        [QMatrix.zero(dims[k + 1], dims[k]) for k in range(cutoff)],
        mult_fn,
        labels=labels,
        check=False,
        name=f"Q[x]/(x^{power})",
    )


def direct_sum(a: TruncatedDGA, b: TruncatedDGA, cutoff: Optional[int] = None) -> TruncatedDGA:
    """Product DG algebra A x B (componentwise operations, unit (1,1))."""
    if cutoff is None:
        cutoff = min(a.cutoff, b.cutoff)
    if cutoff > min(a.cutoff, b.cutoff):
        raise InputError("cutoff exceeds a summand cutoff")
    dims = [a.dim(k) + b.dim(k) for k in range(cutoff + 1)]
    diff_mats = []
    for k in range(cutoff):
        entries = {}
        for (r, c), v in a.d_matrix(k).entries.items():
            entries[(r, c)] = v
        for (r, c), v in b.d_matrix(k).entries.items():
            entries[(r + a.dim(k + 1), c + a.dim(k))] = v
        diff_mats.append(QMatrix(dims[k + 1], dims[k], entries))

    def mult_fn(i, ia, j, jb):
        k = i + j
        acc = [ZERO] * dims[k]
        if ia < a.dim(i) and jb < a.dim(j):
            try:
                pv = a.product_basis(i, ia, j, jb)
            except CutoffTooSmallError:
                return None
            for t, x in enumerate(pv):
                acc[t] = x
        elif ia >= a.dim(i) and jb >= a.dim(j):
            try:
                pv = b.product_basis(i, ia - a.dim(i), j, jb - a.dim(j))
            except CutoffTooSmallError:
                return None
            for t, x in enumerate(pv):
                acc[t + a.dim(k)] = x
        return tuple(acc)

    labels = [
        [f"({l},0)" for l in a.labels[k]] + [f"(0,{l})" for l in b.labels[k]]
        for k in range(cutoff + 1)
    ]
    levels = None
    if a.levels is not None or b.levels is not None:
        levels = [
            [a.basis_level(k, t) for t in range(a.dim(k))]
            + [b.basis_level(k, t) for t in range(b.dim(k))]
            for k in range(cutoff + 1)
        ]
    return TruncatedDGA(
        cutoff,
        dims,
        a.unit + b.unit,
        diff_mats,
        mult_fn,
        labels=labels,
        levels=levels,
        check=False,
        name=f"({a.name})x({b.name})" if a.name or b.name else "",
    )


def tensor_product(a: TruncatedDGA, b: TruncatedDGA, cutoff: Optional[int] = None) -> TruncatedDGA:
    """Graded tensor product with Koszul signs."""
    if cutoff is None:
        cutoff = a.cutoff + b.cutoff
    pairs: list[list[tuple[int, int, int, int]]] = []
    pair_index: list[dict[tuple[int, int, int, int], int]] = []
    for k in range(cutoff + 1):
        lst = []
        for i in range(max(0, k - b.cutoff), min(k, a.cutoff) + 1):
            j = k - i
            for ia in range(a.dim(i)):
                for jb in range(b.dim(j)):
                    lst.append((i, ia, j, jb))
        pairs.append(lst)
        pair_index.append({p: t for t, p in enumerate(lst)})
    dims = [len(p) for p in pairs]
    if dims[0] == 0:
        raise InputError("tensor product lost the unit; lower the cutoff")

    diff_mats = []
    for k in range(cutoff):
        entries: dict[tuple[int, int], Fraction] = {}
        for col, (i, ia, j, jb) in enumerate(pairs[k]):
            # d(a (x) b) = da (x) b + (-1)^i a (x) db; both factor
            # differentials must be stored (give factors a spare zero degree)
            if i == a.cutoff or j == b.cutoff:
                raise CutoffTooSmallError(
                    "tensor factor differential missing at its cutoff; lower the "
                    "tensor cutoff or rebuild the factor with a larger cutoff"
                )
            for r, v in enumerate(a.d_matrix(i).column(ia)):
                if v:
                    entries[(pair_index[k + 1][(i + 1, r, j, jb)], col)] = v
            sign = -1 if i % 2 else 1
            for r, v in enumerate(b.d_matrix(j).column(jb)):
                if v:
                    entries[(pair_index[k + 1][(i, ia, j + 1, r)], col)] = sign * v
        diff_mats.append(QMatrix(dims[k + 1], dims[k], entries))

    def mult_fn(i, x, j, y):
        i1, a1, j1, b1 = pairs[i][x]
        i2, a2, j2, b2 = pairs[j][y]
        if i1 + i2 > a.cutoff or j1 + j2 > b.cutoff:
            return None
        try:
            pa = a.product_basis(i1, a1, i2, a2)
            pb = b.product_basis(j1, b1, j2, b2)
        except CutoffTooSmallError:
            return None
        sign = -1 if (j1 * i2) % 2 else 1
        acc = [ZERO] * dims[i + j]
        for r, va in enumerate(pa):
            if not va:
                continue
            for s, vb in enumerate(pb):
                if vb:
                    acc[pair_index[i + j][(i1 + i2, r, j1 + j2, s)]] += sign * va * vb
        return tuple(acc)

    unit = [ZERO] * dims[0]
    for t, (i, ia, j, jb) in enumerate(pairs[0]):
        unit[t] = a.unit[ia] * b.unit[jb]
    labels = [
        [f"{a.labels[i][ia]}(x){b.labels[j][jb]}" for (i, ia, j, jb) in pairs[k]]
        for k in range(cutoff + 1)
    ]
    levels = None
    if a.levels is not None or b.levels is not None:
        levels = [
            [a.basis_level(i, ia) + b.basis_level(j, jb) for (i, ia, j, jb) in pairs[k]]
            for k in range(cutoff + 1)
        ]
    t = TruncatedDGA(
        cutoff,
        dims,
        tuple(unit),
        diff_mats,
        mult_fn,
        labels=labels,
        levels=levels,
        check=False,
        name=f"({a.name})(x)({b.name})" if a.name or b.name else "",
    )
    t.tensor_pairs = pairs  # type: ignore[attr-defined]
    t.tensor_index = pair_index  # type: ignore[attr-defined]
    return t


# ---------------------------------------------------------------------------
# cohomology
# ---------------------------------------------------------------------------

@dataclass
class GradedCohomology:
    """Chosen cocycle representatives and class arithmetic up to a degree."""

    algebra: TruncatedDGA
    upto: int
    dims: list[int]
    reps: list[list[Vector]]
    boundaries: list[list[Vector]]
    _tables: dict = field(default_factory=dict, repr=False)

    def dim(self, k: int) -> int:
        return self.dims[k] if 0 <= k <= self.upto else 0

    def class_of(self, k: int, v: Vector) -> Vector:
        """Coordinates of [v] in the chosen representatives of H^k."""
        if not 0 <= k <= self.upto:
            raise InputError(f"degree {k} outside the computed range")
        if k < self.algebra.cutoff and not vec_is_zero(self.algebra.apply_d(k, v)):
            raise InputError("class_of called on a non-cocycle")
        cols = [list(r) for r in self.reps[k]] + [list(b) for b in self.boundaries[k]]
        if not cols:
            if vec_is_zero(v):
                return ()
            raise InputError("nonzero vector in a degree with no cocycles")
        m = QMatrix.from_cols([tuple(c) for c in cols], self.algebra.dim(k))
        sol = solve(m, v)
        if sol is None:
            raise InputError("vector is not a cocycle modulo boundaries")
        return tuple(sol[: len(self.reps[k])])

    def cup(self, p: int, i: int, q: int, j: int) -> Vector:
        """Class coordinates of [rep_i^p * rep_j^q] in H^{p+q}."""
        if p + q > self.upto:
            raise InputError("product degree exceeds the computed range")
        key = (p, i, q, j)
        if key not in self._tables:
            prod = self.algebra.multiply(p, self.reps[p][i], q, self.reps[q][j])
            self._tables[key] = self.class_of(p + q, prod)
        return self._tables[key]

    def product_table(self) -> dict:
        out = {}
        for p in range(self.upto + 1):
            for q in range(p, self.upto + 1 - p):
                for i in range(self.dims[p]):
                    for j in range(self.dims[q]):
                        out[(p, i, q, j)] = self.cup(p, i, q, j)
        return out


def cohomology(a: TruncatedDGA, upto: int) -> GradedCohomology:
    """H^k = ker d_k / im d_{k-1} for k <= upto, with canonical representatives.

    ``upto`` must be strictly below the cutoff: H at the cutoff would need the
    differential leaving the top stored degree.
    """
    if upto >= a.cutoff:
        raise InputError(
            f"cohomology up to degree {upto} needs cutoff > {upto} (have {a.cutoff})"
        )
    dims: list[int] = []
    reps: list[list[Vector]] = []
    bnds: list[list[Vector]] = []
    for k in range(upto + 1):
        cocycles = kernel_basis(a.d_matrix(k))
        boundary = column_space_basis(a.d_matrix(k - 1)) if k >= 1 else []
        rs = RowSpace(a.dim(k), boundary)
        chosen = [v for v in cocycles if rs.add(v)]
        dims.append(len(chosen))
        reps.append(chosen)
        bnds.append(boundary)
    return GradedCohomology(a, upto, dims, reps, bnds)


def cohomology_dims(a: TruncatedDGA, upto: int) -> list[int]:
    return cohomology(a, upto).dims


# ---------------------------------------------------------------------------
# morphisms
# ---------------------------------------------------------------------------

class DGMorphism:
    """Degreewise linear map between truncated DG algebras.

    Checked at construction: unit to unit, commutation with differentials,
    multiplicativity on basis pairs within the common cutoff (full check for
    small algebras, deterministic sampling for large ones, skipping dropped
    products).
    """

    def __init__(
        self,
        source: TruncatedDGA,
        target: TruncatedDGA,
        mats: Sequence[QMatrix],
        check: str = "auto",
        name: str = "",
    ):
        self.source = source
        self.target = target
        self.cap = min(source.cutoff, target.cutoff)
        if len(mats) != self.cap + 1:
            raise InputError(
                f"morphism needs matrices for degrees 0..{self.cap}, got {len(mats)}"
            )
        for k, m in enumerate(mats):
            if (m.rows, m.cols) != (target.dim(k), source.dim(k)):
                raise InputError(f"morphism matrix at degree {k} has the wrong shape")
        self.mats = list(mats)
        self.name = name
        if check != "none":
            self._verify(check)

    @classmethod
    def identity(cls, a: TruncatedDGA) -> "DGMorphism":
        return cls(a, a, [QMatrix.identity(a.dim(k)) for k in range(a.cutoff + 1)], check="none")

    def apply(self, k: int, v: Vector) -> Vector:
        if k > self.cap:
            raise CutoffTooSmallError(f"morphism not stored above degree {self.cap}")
        return self.mats[k].matvec(v)

    def compose(self, other: "DGMorphism") -> "DGMorphism":
        """self after other (source of self must be target of other)."""
        if other.target is not self.source:
            raise InputError("composition mismatch")
        cap = min(self.cap, other.cap)
        return DGMorphism(
            other.source,
            self.target,
            [self.mats[k].matmul(other.mats[k]) for k in range(cap + 1)],
            check="none",
        )

    def _verify(self, mode: str):
        src, tgt = self.source, self.target
        if self.mats[0].matvec(src.unit) != tgt.unit:
            raise InputError("morphism does not send the unit to the unit")
        for k in range(self.cap):
            lhs = tgt.d_matrix(k).matmul(self.mats[k])
            rhs = self.mats[k + 1].matmul(src.d_matrix(k))
            if lhs != rhs:
                raise InputError(f"morphism is not a cochain map at degree {k}")
        pairs = [
            (i, a, j, b)
            for i in range(self.cap + 1)
            for j in range(i, self.cap + 1 - i)
            for a in range(src.dim(i))
            for b in range(src.dim(j))
        ]
        if mode == "auto":
            mode = "full" if len(pairs) <= 4000 else "sample"
        if mode == "sample" and len(pairs) > 400:
            import random

            rng = random.Random(0)
            pairs = [pairs[rng.randrange(len(pairs))] for _ in range(400)]
        for i, a, j, b in pairs:
            try:
                pv = src.product_basis(i, a, j, b)
            except CutoffTooSmallError:
                continue
            lhs = self.apply(i + j, pv)
            try:
                rhs = tgt.multiply(
                    i,
                    self.apply(i, unit_vector(src.dim(i), a)),
                    j,
                    self.apply(j, unit_vector(src.dim(j), b)),
                )
            except CutoffTooSmallError:
                continue
            if lhs != rhs:
                raise InputError(
                    f"morphism is not multiplicative on basis pair ({i},{a}),({j},{b})"
                )


def induced_map(
    h: DGMorphism,
    upto: int,
    source_h: Optional[GradedCohomology] = None,
    target_h: Optional[GradedCohomology] = None,
) -> list[QMatrix]:
    """Per-degree matrices of H(h) in the canonical representative bases."""
    if upto >= min(h.source.cutoff, h.target.cutoff):
        raise InputError("induced_map needs upto below both cutoffs")
    hs = source_h if source_h is not None else cohomology(h.source, upto)
    ht = target_h if target_h is not None else cohomology(h.target, upto)
    out = []
    for k in range(upto + 1):
        cols = []
        for r in hs.reps[k]:
            img = h.apply(k, r)
            cols.append(ht.class_of(k, img))
        entries = {}
        for c, col in enumerate(cols):
            for r, v in enumerate(col):
                if v:
                    entries[(r, c)] = v
        out.append(QMatrix(ht.dims[k], hs.dims[k], entries))
    return out


def is_quasi_iso(
    h: DGMorphism,
    upto: int,
    source_h: Optional[GradedCohomology] = None,
    target_h: Optional[GradedCohomology] = None,
) -> tuple[bool, Optional[int]]:
    """True iff H(h) is bijective in all degrees <= upto; else first failure."""
    hs = source_h if source_h is not None else cohomology(h.source, upto)
    ht = target_h if target_h is not None else cohomology(h.target, upto)
    mats = induced_map(h, upto, hs, ht)
    from .exactlin import rank as _rank

    for k in range(upto + 1):
        if hs.dims[k] != ht.dims[k] or _rank(mats[k]) != hs.dims[k]:
            return False, k
    return True, None
