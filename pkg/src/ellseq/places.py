"""Place classes on the projective line and finitely supported divisors.

A place class bundles a Galois orbit of geometric points of P^1: either a
squarefree monic polynomial (its roots) with degree weight deg(poly), or
the place at infinity with degree 1.  Working sets of classes are kept
pairwise coprime by gcd refinement, so no irreducible factorization is
ever needed: every valuation that matters is constant along a class.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .errors import IncoherentPlaces, NonUniformPlace, ZeroInput
from .fields import Poly, RatFunc


@dataclass(frozen=True)
class PlaceClass:
    """A squarefree monic polynomial class, or the place at infinity."""

    poly: Poly | None  # None encodes infinity
    degree: int

    @classmethod
    def finite(cls, poly: Poly) -> "PlaceClass":
        if poly.is_zero() or poly.is_constant():
            raise ZeroInput("finite place needs a non-constant polynomial")
        poly = poly.monic()
        return cls(poly, int(poly.degree))

    @classmethod
    def infinity(cls) -> "PlaceClass":
        return cls(None, 1)

    @property
    def is_infinite(self) -> bool:
        return self.poly is None

    def sort_key(self):
        if self.poly is None:
            return (1, 0, ())
        return (0, self.degree, tuple(str(c) for c in self.poly.coeffs))

    def __str__(self):
        return "(inf)" if self.poly is None else f"({self.poly})"


INF = PlaceClass.infinity()


def _coprime_basis(polys: Iterable[Poly]) -> list[Poly]:
    basis: list[Poly] = []
    queue = [q.monic() for q in polys if not q.is_constant()]
    while queue:
        q = queue.pop()
        if q.is_constant():
            continue
        for i, e in enumerate(basis):
            g = q.gcd(e)
            if not g.is_constant():
                basis.pop(i)
                queue.extend([g, e // g, q // g])
                break
        else:
            basis.append(q)
    return basis


def refine_places(polys: Iterable[Poly]) -> list[PlaceClass]:
    """Split inputs into pairwise-coprime squarefree monic classes.

    Every input polynomial has constant multiplicity along each returned
    class; infinity is never returned (callers add it when relevant).
    """
    parts = []
    for poly in polys:
        if poly.is_zero():
            raise ZeroInput("cannot refine the zero polynomial")
        for part in poly.squarefree_decomposition().values():
            parts.append(part)
    basis = _coprime_basis(parts)
    classes = [PlaceClass.finite(b) for b in basis]
    classes.sort(key=PlaceClass.sort_key)
    return classes


def _uniform_multiplicity(poly: Poly, g: Poly) -> int:
    """Multiplicity of the class g in poly, demanding uniformity."""
    count = 0
    current = poly
    while True:
        q, r = divmod(current, g)
        if not r.is_zero():
            break
        current = q
        count += 1
    if not current.gcd(g).is_constant():
        raise NonUniformPlace(
            f"multiplicity of {g} is not uniform across the class"
        )
    return count


def ord_at(f: RatFunc | Poly, v: PlaceClass) -> int:
    """Normalized valuation of f along the class v (uniform by contract)."""
    if isinstance(f, Poly):
        f = RatFunc.from_poly(f)
    if f.is_zero():
        raise ZeroInput("ord of the zero function is undefined")
    if v.is_infinite:
        return int(f.den.degree) - int(f.num.degree)
    return _uniform_multiplicity(f.num, v.poly) - _uniform_multiplicity(f.den, v.poly)


class FunctionDivisor:
    """Finitely supported map from place classes to integers."""

    __slots__ = ("entries",)

    def __init__(self, entries=None):
        cleaned = {}
        if entries:
            for place, mult in dict(entries).items():
                if mult != 0:
                    cleaned[place] = int(mult)
        self.entries = cleaned

    @classmethod
    def zero(cls) -> "FunctionDivisor":
        return cls()

    @classmethod
    def single(cls, place: PlaceClass, mult: int = 1) -> "FunctionDivisor":
        return cls({place: mult})

    def is_zero(self) -> bool:
        return not self.entries

    def is_effective(self) -> bool:
        return all(m >= 0 for m in self.entries.values())

    def support(self) -> set[PlaceClass]:
        return set(self.entries)

    def degree(self) -> int:
        return sum(m * v.degree for v, m in self.entries.items())

    def multiplicity(self, place: PlaceClass) -> int:
        return self.entries.get(place, 0)

    def ord_along(self, place: PlaceClass) -> int:
        """Multiplicity at a class that may be finer than the stored ones."""
        if place in self.entries:
            return self.entries[place]
        if place.is_infinite:
            return 0
        for v, m in self.entries.items():
            if v.is_infinite:
                continue
            if place.poly.divides(v.poly):
                return m
        return 0

    def items_sorted(self):
        return sorted(self.entries.items(), key=lambda kv: kv[0].sort_key())

    def __add__(self, other: "FunctionDivisor") -> "FunctionDivisor":
        a, b = corefine([self, other])
        merged = dict(a.entries)
        for place, mult in b.entries.items():
            merged[place] = merged.get(place, 0) + mult
        return FunctionDivisor(merged)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, k: int) -> "FunctionDivisor":
        return FunctionDivisor({v: k * m for v, m in self.entries.items()})

    def __eq__(self, other):
        if not isinstance(other, FunctionDivisor):
            return NotImplemented
        a, b = corefine([self, other])
        return a.entries == b.entries

    def __le__(self, other: "FunctionDivisor") -> bool:
        a, b = corefine([self, other])
        places = set(a.entries) | set(b.entries)
        return all(a.entries.get(v, 0) <= b.entries.get(v, 0) for v in places)

    def __str__(self):
        if not self.entries:
            return "0"
        return " + ".join(f"{m}*{v}" for v, m in self.items_sorted())

    def __repr__(self):
        return f"FunctionDivisor({self})"


def check_coherent(places: Iterable[PlaceClass]):
    """Raise IncoherentPlaces if two distinct finite classes share a factor."""
    finite = [v for v in places if not v.is_infinite]
    for i, a in enumerate(finite):
        for b in finite[i + 1 :]:
            if a != b and not a.poly.gcd(b.poly).is_constant():
                raise IncoherentPlaces(f"classes {a} and {b} overlap")


def divisor_sum(divisors: Iterable[FunctionDivisor]) -> FunctionDivisor:
    total = FunctionDivisor.zero()
    for d in divisors:
        total = total + d
    return total


def corefine(divisors: list[FunctionDivisor]) -> list[FunctionDivisor]:
    """Re-express divisors on a common pairwise-coprime refinement.

    Classes that already agree are kept; overlapping classes split, with
    multiplicities inherited by the pieces.
    """
    finite_polys = []
    for d in divisors:
        for v in d.entries:
            if not v.is_infinite:
                finite_polys.append(v.poly)
    needs_split = False
    seen = {}
    for poly in finite_polys:
        key = poly
        if key in seen:
            continue
        seen[key] = True
    polys = list(seen)
    for i, a in enumerate(polys):
        for b in polys[i + 1 :]:
            if not a.gcd(b).is_constant():
                needs_split = True
                break
        if needs_split:
            break
    if not needs_split:
        return divisors
    basis = _coprime_basis(polys)
    out = []
    for d in divisors:
        entries = {}
        for v, m in d.entries.items():
            if v.is_infinite:
                entries[v] = entries.get(v, 0) + m
                continue
            for b in basis:
                if b.divides(v.poly):
                    place = PlaceClass.finite(b)
                    entries[place] = entries.get(place, 0) + m
        out.append(FunctionDivisor(entries))
    return out


def support_contained(d: FunctionDivisor, places: Iterable[PlaceClass]) -> bool:
    """Is supp(d) contained in the union of the given classes?

    d's classes are refined against the given set so partial overlaps split.
    """
    place_list = list(places)
    has_inf = any(v.is_infinite for v in place_list)
    for v in d.entries:
        if v.is_infinite:
            if not has_inf:
                return False
            continue
        residual = v.poly
        for s in place_list:
            if s.is_infinite:
                continue
            g = residual.gcd(s.poly)
            if not g.is_constant():
                residual = residual // g
            if residual.is_constant():
                break
        if not residual.is_constant():
            return False
    return True


def principal_divisor(f: RatFunc, extra_polys: Iterable[Poly] = ()) -> FunctionDivisor:
    """Divisor of zeros and poles of f, including infinity.

    The support is resolved against a refinement of num, den and any extra
    polynomials supplied (useful to align with an existing working set).
    """
    if f.is_zero():
        raise ZeroInput("zero function has no divisor")
    polys = [p for p in (f.num, f.den) if not p.is_constant()]
    polys.extend(p for p in extra_polys if not p.is_constant())
    entries = {}
    for place in refine_places(polys):
        m = ord_at(f, place)
        if m:
            entries[place] = m
    inf_ord = ord_at(f, INF)
    if inf_ord:
        entries[INF] = inf_ord
    return FunctionDivisor(entries)
