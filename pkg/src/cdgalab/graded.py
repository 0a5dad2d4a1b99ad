"""Free graded-commutative algebras on finitely many generators.

Monomials are exponent tuples aligned with the declared generator order;
odd-degree generators square to zero, and reordering products into that
canonical order accumulates the Koszul sign.  Because every generator has
positive degree, each graded piece is finite dimensional.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional

from .errors import InputError
from .exactlin import ONE, ZERO, rat, format_rat

Monomial = tuple[int, ...]


@dataclass(frozen=True)
class GeneratorSpec:
    name: str
    degree: int

    def __post_init__(self):
        if self.degree < 1:
            raise InputError(f"generator {self.name!r} must have positive degree")


class FreeGCA:
    """Free graded-commutative algebra over the rationals."""

    def __init__(self, generators: Iterable):
        specs = []
        for g in generators:
            if isinstance(g, GeneratorSpec):
                specs.append(g)
            else:
                name, degree = g
                specs.append(GeneratorSpec(str(name), int(degree)))
        names = [g.name for g in specs]
        if len(set(names)) != len(names):
            raise InputError("generator names must be unique")
        self.generators: tuple[GeneratorSpec, ...] = tuple(specs)
        self.index = {g.name: i for i, g in enumerate(self.generators)}
        self.degrees = tuple(g.degree for g in self.generators)
        self._basis_cache: dict[int, list[Monomial]] = {}

    @property
    def ngens(self) -> int:
        return len(self.generators)

    def __repr__(self):
        gens = ", ".join(f"{g.name}:{g.degree}" for g in self.generators)
        return f"FreeGCA({gens})"

    # -- monomials ------------------------------------------------------
    def unit_monomial(self) -> Monomial:
        return (0,) * self.ngens

    def generator_monomial(self, name: str) -> Monomial:
        i = self.index[name]
        return tuple(1 if j == i else 0 for j in range(self.ngens))

    def mono_degree(self, m: Monomial) -> int:
        return sum(e * d for e, d in zip(m, self.degrees))

    def word_length(self, m: Monomial) -> int:
        return sum(m)

    def mono_valid(self, m: Monomial) -> bool:
        return len(m) == self.ngens and all(
            e >= 0 and (e <= 1 or d % 2 == 0) for e, d in zip(m, self.degrees)
        )

    def mono_mul(self, a: Monomial, b: Monomial) -> Optional[tuple[int, Monomial]]:
        """Product of monomials: ``(koszul_sign, monomial)`` or None for zero."""
        sign = 0
        # moving each odd generator of b leftwards past the odd generators of
        # a that sit at a later position costs one transposition each
        odd_a_after = 0
        for j in range(self.ngens - 1, -1, -1):
            if self.degrees[j] % 2 == 1:
                if b[j]:
                    sign += odd_a_after * b[j]
                if a[j]:
                    odd_a_after += a[j]
            # even generators commute freely
        prod = tuple(x + y for x, y in zip(a, b))
        for e, d in zip(prod, self.degrees):
            if d % 2 == 1 and e > 1:
                return None
        return (-1) ** sign, prod

    def mono_str(self, m: Monomial) -> str:
        parts = []
        for g, e in zip(self.generators, m):
            if e == 1:
                parts.append(g.name)
            elif e > 1:
                parts.append(f"{g.name}^{e}")
        return "*".join(parts) if parts else "1"

    # -- per-degree bases ------------------------------------------------
    def basis_in_degree(self, n: int) -> list[Monomial]:
        """All monomials of total degree ``n``, lexicographic on exponents.

        Descending order, so powers of earlier generators come first and the
        listing follows the declaration order of the generators.
        """
        if n < 0:
            raise InputError("degree must be non-negative")
        cached = self._basis_cache.get(n)
        if cached is not None:
            return cached
        out: list[Monomial] = []
        expo = [0] * self.ngens

        def rec(i: int, remaining: int):
            if i == self.ngens:
                if remaining == 0:
                    out.append(tuple(expo))
                return
            d = self.degrees[i]
            max_e = remaining // d
            if d % 2 == 1:
                max_e = min(max_e, 1)
            for e in range(max_e + 1):
                expo[i] = e
                rec(i + 1, remaining - e * d)
            expo[i] = 0

        rec(0, n)
        out.sort(reverse=True)
        self._basis_cache[n] = out
        return out

    # -- elements ----------------------------------------------------------
    def element(self, terms: Mapping[Monomial, Fraction] | Iterable) -> "Element":
        if isinstance(terms, Mapping):
            items = terms.items()
        else:
            items = terms
        data: dict[Monomial, Fraction] = {}
        for m, c in items:
            m = tuple(m)
            if not self.mono_valid(m):
                raise InputError(f"invalid monomial {m} for {self}")
            fc = rat(c)
            if fc != 0:
                data[m] = data.get(m, ZERO) + fc
        return Element(self, {m: c for m, c in data.items() if c != 0})

    def zero(self) -> "Element":
        return Element(self, {})

    def one(self) -> "Element":
        return Element(self, {self.unit_monomial(): ONE})

    def gen(self, name: str) -> "Element":
        return Element(self, {self.generator_monomial(name): ONE})


class Element:
    """Finite rational combination of monomials of a fixed free algebra."""

    __slots__ = ("algebra", "terms")

    def __init__(self, algebra: FreeGCA, terms: dict[Monomial, Fraction]):
        self.algebra = algebra
        self.terms = terms

    def is_zero(self) -> bool:
        return not self.terms

    def degrees(self) -> set[int]:
        return {self.algebra.mono_degree(m) for m in self.terms}

    def degree(self) -> Optional[int]:
        """Degree of a homogeneous element (None for 0)."""
        degs = self.degrees()
        if not degs:
            return None
        if len(degs) > 1:
            raise InputError(f"element is not homogeneous: degrees {sorted(degs)}")
        return degs.pop()

    def homogeneous_part(self, n: int) -> "Element":
        alg = self.algebra
        return Element(alg, {m: c for m, c in self.terms.items() if alg.mono_degree(m) == n})

    def _require_same(self, other: "Element"):
        if self.algebra is not other.algebra:
            raise InputError("elements of different algebras")

    def __add__(self, other: "Element") -> "Element":
        self._require_same(other)
        data = dict(self.terms)
        for m, c in other.terms.items():
            v = data.get(m, ZERO) + c
            if v:
                data[m] = v
            elif m in data:
                del data[m]
        return Element(self.algebra, data)

    def __sub__(self, other: "Element") -> "Element":
        return self + (-other)

    def __neg__(self) -> "Element":
        return Element(self.algebra, {m: -c for m, c in self.terms.items()})

    def scale(self, c) -> "Element":
        c = rat(c)
        if c == 0:
            return Element(self.algebra, {})
        return Element(self.algebra, {m: c * v for m, v in self.terms.items()})

    def __rmul__(self, c):
        if isinstance(c, (int, Fraction)):
            return self.scale(c)
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        self._require_same(other)
        alg = self.algebra
        data: dict[Monomial, Fraction] = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                sm = alg.mono_mul(ma, mb)
                if sm is None:
                    continue
                sign, m = sm
                v = data.get(m, ZERO) + sign * ca * cb
                if v:
                    data[m] = v
                elif m in data:
                    del data[m]
        return Element(alg, data)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Element)
            and self.algebra is other.algebra
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((id(self.algebra), tuple(sorted(self.terms.items()))))

    def __repr__(self):
        if not self.terms:
            return "0"
        alg = self.algebra
        parts = []
        for m in sorted(self.terms):
            c = self.terms[m]
            mono = alg.mono_str(m)
            if mono == "1":
                parts.append(format_rat(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append(f"-{mono}")
            else:
                parts.append(f"{format_rat(c)}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


def multiply(a: Element, b: Element) -> Element:
    """Graded-commutative product (function form of ``a * b``)."""
    return a * b


def basis_in_degree(alg: FreeGCA, n: int) -> list[Monomial]:
    return alg.basis_in_degree(n)


def apply_odd_derivation(images: Mapping[str, Element], x: Element) -> Element:
    """Extend ``gen -> images[gen]`` to an odd derivation and apply it to x.

    The sign rule is D(a b) = D(a) b + (-1)^{|a|} a D(b); on a monomial the
    term for the i-th generator picks up (-1)^{degree of the prefix}.  The
    images must live in the same algebra as ``x``.
    """
    alg = x.algebra
    out = alg.zero()
    for mono, coeff in x.terms.items():
        for i, e in enumerate(mono):
            if e == 0:
                continue
            gname = alg.generators[i].name
            img = images.get(gname)
            if img is None:
                raise InputError(f"no derivation image for generator {gname!r}")
            if img.algebra is not alg:
                raise InputError("derivation images must live in the algebra of x")
            prefix_deg = sum(mono[j] * alg.degrees[j] for j in range(i))
            sign = -1 if prefix_deg % 2 else 1
            # g_i^{e} contributes e * g_i^{e-1} D(g_i); the leftover power is
            # even unless e == 1, so parking it in the prefix costs no sign
            left = alg.element(
                {tuple(mono[j] if j < i else (e - 1 if j == i else 0) for j in range(len(mono))): ONE}
            )
            right = alg.element({tuple(0 if j <= i else mono[j] for j in range(len(mono))): ONE})
            term = (sign * e) * (left * img * right)
            out = out + coeff * term
    return out
