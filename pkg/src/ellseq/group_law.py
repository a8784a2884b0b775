"""Chord-tangent arithmetic on long Weierstrass curves and EDS extraction.

The group law works in every characteristic.  Denominator divisors are
read off per place from the coordinates in the locally minimal model:
a pole of even order -2m in x contributes multiplicity m, the pullback
multiplicity of the zero section.  Sequences D_nP are produced
incrementally with primitivity flags maintained by gcd arithmetic on a
running support radical, so no factorization is ever required.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .curves import LocalModel, SurfaceData, WeierstrassCurve, local_minimal_model
from .errors import (
    NonUniformPlace,
    ParityViolation,
    PointNotOnCurve,
    TorsionPoint,
    ZeroSection,
)
from .fields import Poly, RatFunc
from .places import INF, FunctionDivisor, PlaceClass, ord_at, refine_places


class CurvePoint:
    """A point of E(K(t)): either infinity or an affine pair of RatFuncs."""

    __slots__ = ("curve", "x", "y")

    def __init__(self, curve, x, y, check=True):
        self.curve = curve
        self.x = x
        self.y = y
        if check and x is not None and not curve.contains(x, y):
            raise PointNotOnCurve(f"({x}, {y}) does not satisfy the curve equation")

    @classmethod
    def infinity(cls, curve):
        return cls(curve, None, None, check=False)

    @classmethod
    def affine(cls, curve, x, y):
        return cls(curve, x, y)

    @property
    def is_infinity(self):
        return self.x is None

    def __eq__(self, other):
        return (
            isinstance(other, CurvePoint)
            and self.curve == other.curve
            and self.x == other.x
            and self.y == other.y
        )

    def __repr__(self):
        return "O" if self.is_infinity else f"({self.x}, {self.y})"


def negate(P: CurvePoint) -> CurvePoint:
    if P.is_infinity:
        return P
    E = P.curve
    return CurvePoint(E, P.x, -P.y - E.a1 * P.x - E.a3, check=False)


def add(P: CurvePoint, Q: CurvePoint) -> CurvePoint:
    if P.curve != Q.curve:
        raise PointNotOnCurve("points on different curves")
    if P.is_infinity:
        return Q
    if Q.is_infinity:
        return P
    E = P.curve
    x1, y1, x2, y2 = P.x, P.y, Q.x, Q.y
    if x1 == x2:
        if y2 == -y1 - E.a1 * x1 - E.a3:
            return CurvePoint.infinity(E)
        denom_inv = (2 * y1 + E.a1 * x1 + E.a3).inverse()
        lam = (3 * (x1**2) + 2 * E.a2 * x1 + E.a4 - E.a1 * y1) * denom_inv
        nu = (-(x1**3) + E.a4 * x1 + 2 * E.a6 - E.a3 * y1) * denom_inv
    else:
        dx_inv = (x2 - x1).inverse()
        lam = (y2 - y1) * dx_inv
        nu = (y1 * x2 - y2 * x1) * dx_inv
    x3 = lam**2 + E.a1 * lam - E.a2 - x1 - x2
    y3 = -(lam + E.a1) * x3 - nu - E.a3
    return CurvePoint(E, x3, y3, check=False)


def multiply(n: int, P: CurvePoint) -> CurvePoint:
    if n < 0:
        return multiply(-n, negate(P))
    result = CurvePoint.infinity(P.curve)
    base = P
    while n:
        if n & 1:
            result = add(result, base)
        n >>= 1
        if n:
            base = add(base, base)
    return result


# ---------------------------------------------------------------------------
# minimal-model context (chars 2/3 get denominator clearing only)
# ---------------------------------------------------------------------------


class ModelContext:
    """Provides per-place minimal models plus the curve's bad-place data."""

    def __init__(self, curve: WeierstrassCurve, surface: SurfaceData | None = None):
        self.curve = curve
        self.surface = surface
        self._cache: dict[PlaceClass, LocalModel] = {}
        if surface is not None:
            for fibre in surface.fibres:
                self._cache[fibre.place] = fibre.model
            for model in surface.rescaled_good:
                self._cache[model.place] = model

    @classmethod
    def from_surface(cls, surface: SurfaceData) -> "ModelContext":
        return cls(surface.curve, surface)

    @classmethod
    def small_characteristic(cls, curve: WeierstrassCurve) -> "ModelContext":
        """Caller asserts the given model is globally minimal (chars 2/3)."""
        return cls(curve, None)

    def local_model(self, place: PlaceClass) -> LocalModel:
        model = self._cache.get(place)
        if model is None:
            model = local_minimal_model(self.curve, place)
            self._cache[place] = model
        return model

    def attention_polys(self) -> list[Poly]:
        """Finite classes where the global model may not be minimal."""
        if self.surface is not None:
            polys = [
                f.place.poly for f in self.surface.fibres if not f.place.is_infinite
            ]
            polys += [
                m.place.poly
                for m in self.surface.rescaled_good
                if not m.place.is_infinite
            ]
            return polys
        disc = self.curve.disc
        return [p for p in (disc.num, disc.den) if not p.is_constant()]


def _pole_multiplicity(model: LocalModel, x, y, place_poly: Poly) -> int:
    """Intersection multiplicity with the zero section at one class."""
    sub_place = PlaceClass.finite(place_poly)
    if x.is_zero():
        return 0
    vx = ord_at(x, sub_place)
    if vx >= 0:
        return 0
    if vx % 2 != 0:
        raise ParityViolation(
            f"x has odd pole order {vx} at {sub_place}: non-minimal model?"
        )
    vy = ord_at(y, sub_place)
    if 2 * vy != 3 * vx:
        raise ParityViolation(
            f"ord(y) = {vy} inconsistent with ord(x) = {vx} at {sub_place}"
        )
    return -vx // 2


def denominator_divisor(ctx: ModelContext, P: CurvePoint) -> FunctionDivisor:
    """Pullback divisor of the zero section along the section of P.

    Finite places are refined against den(x) and the bad-place classes;
    infinity is always inspected through the chart swap.  If a class fails
    to behave uniformly it is split and retried.
    """
    if P.is_infinity:
        raise ZeroSection("the zero section meets itself everywhere")
    entries = {}
    polys = [P.x.den] + ctx.attention_polys()
    polys = [p for p in polys if not p.is_constant()]
    queue = [v for v in refine_places(polys)] if polys else []
    queue.append(INF)
    while queue:
        place = queue.pop()
        model = ctx.local_model(place)
        x, y = model.point_coords(P.x, P.y)
        if place.is_infinite:
            mult = _pole_multiplicity(model, x, y, model.uniformizer)
            if mult:
                entries[INF] = mult
            continue
        try:
            mult = _pole_multiplicity(model, x, y, place.poly)
        except NonUniformPlace:
            splitters = [place.poly] + [
                p for p in (x.num, x.den) if not p.is_constant()
            ]
            pieces = [
                v
                for v in refine_places(splitters)
                if v.poly.divides(place.poly) and v != place
            ]
            if not pieces:
                raise
            queue.extend(pieces)
            continue
        if mult:
            entries[place] = mult
    return FunctionDivisor(entries)


# ---------------------------------------------------------------------------
# elliptic divisibility sequences
# ---------------------------------------------------------------------------


@dataclass
class EdsRecord:
    n: int
    point: CurvePoint
    divisor: FunctionDivisor
    degree: int
    primitive: bool
    new_places: frozenset[PlaceClass]


@dataclass
class EdsSequence:
    records: list[EdsRecord]
    meeting: dict[PlaceClass, int]
    meeting_order: dict[PlaceClass, int]  # ord_v(D_{m(v)P})
    context: ModelContext = field(repr=False)

    def record(self, n: int) -> EdsRecord:
        return self.records[n - 1]

    def divisor(self, n: int) -> FunctionDivisor:
        return self.records[n - 1].divisor

    def degree(self, n: int) -> int:
        return self.records[n - 1].degree

    def ord_of(self, n: int, place: PlaceClass) -> int:
        return self.records[n - 1].divisor.ord_along(place)

    def nonprimitive_indices(self, include_first=False) -> list[int]:
        start = 1 if include_first else 2
        return [r.n for r in self.records if r.n >= start and not r.primitive]

    @property
    def nmax(self) -> int:
        return len(self.records)


def eds_generate(ctx: ModelContext, P: CurvePoint, nmax: int) -> EdsSequence:
    """Records for D_nP, n = 1..nmax, with primitivity and meeting indices.

    Primitivity is decided by comparing each support against the radical
    of everything seen before; a divisor is primitive exactly when it
    contributes a new class.  In characteristic zero the constancy
    ord_v(D_nP) = ord_v(D_m(v)P) is asserted along the way.
    """
    if P.is_infinity:
        raise ZeroSection("need a nonzero point")
    field_char = ctx.curve.field.char
    records = []
    meeting: dict[PlaceClass, int] = {}
    meeting_order: dict[PlaceClass, int] = {}
    seen_radical = Poly.const(ctx.curve.field, 1)
    seen_infinity = False
    current = P
    for n in range(1, nmax + 1):
        if current.is_infinity:
            raise TorsionPoint(f"{n}P = O: the point has finite order")
        divisor = denominator_divisor(ctx, current)
        new_places = []
        for place, mult in divisor.entries.items():
            if place.is_infinite:
                if not seen_infinity:
                    new_places.append(place)
                continue
            g = place.poly.gcd(seen_radical)
            if g.is_constant():
                new_places.append(place)
            elif g != place.poly:
                # partial overlap: the new part of the class is new
                new_places.append(PlaceClass.finite(place.poly // g))
        for place in new_places:
            meeting[place] = n
            meeting_order[place] = divisor.ord_along(place)
            if place.is_infinite:
                seen_infinity = True
            else:
                seen_radical = seen_radical * place.poly
        if field_char == 0:
            for place in divisor.entries:
                base = _meeting_lookup(meeting, place)
                if base is not None and meeting[base] < n:
                    expected = meeting_order[base]
                    got = divisor.ord_along(base)
                    if got != expected:
                        raise NonUniformPlace(
                            f"char-0 constancy fails at {base}: "
                            f"ord(D_{n}) = {got} != ord(D_{meeting[base]}) = {expected}"
                        )
        records.append(
            EdsRecord(
                n=n,
                point=current,
                divisor=divisor,
                degree=divisor.degree(),
                primitive=bool(new_places),
                new_places=frozenset(new_places),
            )
        )
        if n < nmax:
            current = add(current, P)
    return EdsSequence(records, meeting, meeting_order, ctx)


def _meeting_lookup(meeting: dict[PlaceClass, int], place: PlaceClass):
    """Find the recorded meeting class containing the given class."""
    if place in meeting:
        return place
    if place.is_infinite:
        return None
    for candidate in meeting:
        if candidate.is_infinite:
            continue
        if candidate.poly.divides(place.poly) or place.poly.divides(candidate.poly):
            return candidate
    return None


def meeting_index(seq: EdsSequence, place: PlaceClass) -> int | None:
    """m(v) = least n >= 1 with ord_v(D_nP) >= 1, if seen within range."""
    base = _meeting_lookup(seq.meeting, place)
    return None if base is None else seq.meeting[base]
