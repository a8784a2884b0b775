"""Long Weierstrass models over K(t) and their fibre geometry.

Covers the standard b/c invariants, admissible coordinate changes,
per-place minimal models (residue characteristic not 2 or 3), the
Kodaira classification in table form, component groups, the Euler
characteristic of the attached elliptic surface, conductor and Szpiro
ratio, and the inseparable degree of the j-map.

The place at infinity is handled by the chart swap t -> 1/s, after which
it is an ordinary finite place (s) of K(s).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import floor, lcm

from .errors import (
    BadCharacteristic,
    EverywhereGoodReduction,
    InconsistentValuations,
    InvalidComponent,
    NotMinimal,
    SingularCurve,
)
from .fields import Poly, RatFunc
from .places import INF, FunctionDivisor, PlaceClass, ord_at, refine_places


class WeierstrassCurve:
    """y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 over K(t)."""

    def __init__(self, a1, a2, a3, a4, a6):
        self.field = a1.field
        self.a1, self.a2, self.a3, self.a4, self.a6 = a1, a2, a3, a4, a6
        if self.disc.is_zero():
            raise SingularCurve("discriminant vanishes identically")

    @classmethod
    def from_strings(cls, field, a1="0", a2="0", a3="0", a4="0", a6="0"):
        from .fields import parse_ratfunc

        return cls(*(parse_ratfunc(field, s) for s in (a1, a2, a3, a4, a6)))

    @classmethod
    def short(cls, A: RatFunc, B: RatFunc):
        zero = RatFunc.const(A.field, 0)
        return cls(zero, zero, zero, A, B)

    @cached_property
    def b2(self):
        return self.a1 * self.a1 + 4 * self.a2

    @cached_property
    def b4(self):
        return 2 * self.a4 + self.a1 * self.a3

    @cached_property
    def b6(self):
        return self.a3 * self.a3 + 4 * self.a6

    @cached_property
    def b8(self):
        return (
            self.a1 * self.a1 * self.a6
            + 4 * self.a2 * self.a6
            - self.a1 * self.a3 * self.a4
            + self.a2 * self.a3 * self.a3
            - self.a4 * self.a4
        )

    @cached_property
    def c4(self):
        return self.b2 * self.b2 - 24 * self.b4

    @cached_property
    def c6(self):
        return -(self.b2**3) + 36 * self.b2 * self.b4 - 216 * self.b6

    @cached_property
    def disc(self):
        b2, b4, b6, b8 = self.b2, self.b4, self.b6, self.b8
        return -(b2 * b2 * b8) - 8 * (b4**3) - 27 * (b6 * b6) + 9 * b2 * b4 * b6

    @cached_property
    def j(self):
        return (self.c4**3) / self.disc

    def invariants(self):
        return (self.b2, self.b4, self.b6, self.b8, self.c4, self.c6, self.disc, self.j)

    def rhs(self, x: RatFunc) -> RatFunc:
        return ((x + self.a2) * x + self.a4) * x + self.a6

    def contains(self, x: RatFunc, y: RatFunc) -> bool:
        lhs = y * y + self.a1 * x * y + self.a3 * y
        return lhs == self.rhs(x)

    def infinity_chart(self) -> "WeierstrassCurve":
        """Same curve with coefficients rewritten in s = 1/t."""
        return WeierstrassCurve(
            *(a.substitute_reciprocal() for a in (self.a1, self.a2, self.a3, self.a4, self.a6))
        )

    def __eq__(self, other):
        return isinstance(other, WeierstrassCurve) and all(
            getattr(self, n) == getattr(other, n) for n in ("a1", "a2", "a3", "a4", "a6")
        )

    def __repr__(self):
        return (
            f"WeierstrassCurve(a1={self.a1}, a2={self.a2}, a3={self.a3}, "
            f"a4={self.a4}, a6={self.a6})"
        )


@dataclass(frozen=True)
class ModelTransform:
    """Admissible change of coordinates x = u^2 x' + r, y = u^3 y' + s u^2 x' + t."""

    u: RatFunc
    r: RatFunc
    s: RatFunc
    t: RatFunc

    @classmethod
    def identity(cls, field):
        one = RatFunc.const(field, 1)
        zero = RatFunc.const(field, 0)
        return cls(one, zero, zero, zero)

    @classmethod
    def scaling(cls, u: RatFunc):
        zero = RatFunc.const(u.field, 0)
        return cls(u, zero, zero, zero)

    def apply(self, curve: WeierstrassCurve) -> WeierstrassCurve:
        u, r, s, t = self.u, self.r, self.s, self.t
        a1, a2, a3, a4, a6 = curve.a1, curve.a2, curve.a3, curve.a4, curve.a6
        u2 = u * u
        u3 = u2 * u
        b1 = (a1 + 2 * s) / u
        b2 = (a2 - s * a1 + 3 * r - s * s) / u2
        b3 = (a3 + r * a1 + 2 * t) / u3
        b4 = (a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t) / (u2 * u2)
        b6 = (
            a6 + r * a4 + r * r * a2 + r**3 - t * a3 - t * t - r * t * a1
        ) / (u3 * u3)
        return WeierstrassCurve(b1, b2, b3, b4, b6)

    def point_to_new(self, x: RatFunc, y: RatFunc):
        u, r, s, t = self.u, self.r, self.s, self.t
        x_new = (x - r) / (u * u)
        y_new = (y - s * (x - r) - t) / (u**3)
        return x_new, y_new

    def point_to_old(self, x: RatFunc, y: RatFunc):
        u, r, s, t = self.u, self.r, self.s, self.t
        x_old = u * u * x + r
        y_old = u**3 * y + s * u * u * x + t
        return x_old, y_old

    def compose(self, inner: "ModelTransform") -> "ModelTransform":
        """Transform equal to applying self first, then inner."""
        u1, r1, s1, t1 = self.u, self.r, self.s, self.t
        u2, r2, s2, t2 = inner.u, inner.r, inner.s, inner.t
        return ModelTransform(
            u=u1 * u2,
            r=u1 * u1 * r2 + r1,
            s=u1 * s2 + s1,
            t=u1**3 * t2 + s1 * u1 * u1 * r2 + t1,
        )

    def inverse(self) -> "ModelTransform":
        u, r, s, t = self.u, self.r, self.s, self.t
        ui = u.inverse()
        ui2 = ui * ui
        return ModelTransform(
            u=ui,
            r=-r * ui2,
            s=-s * ui,
            t=(r * s - t) * (ui2 * ui),
        )


# ---------------------------------------------------------------------------
# Kodaira types and component groups (Fig. 1 data)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class KodairaType:
    kind: str  # "I", "II", "III", "IV", "I*", "IV*", "III*", "II*"
    n: int = 0  # only for "I" and "I*"

    @property
    def tag(self) -> str:
        if self.kind == "I":
            return f"I{self.n}"
        if self.kind == "I*":
            return f"I{self.n}*"
        return self.kind

    @property
    def is_good(self) -> bool:
        return self.kind == "I" and self.n == 0

    @property
    def is_multiplicative(self) -> bool:
        return self.kind == "I" and self.n >= 1

    @property
    def is_additive(self) -> bool:
        return not (self.kind == "I")

    @property
    def components(self) -> int:
        """Number m_v of irreducible components of the fibre."""
        if self.kind == "I":
            return max(self.n, 1)
        return {"II": 1, "III": 2, "IV": 3, "I*": self.n + 5, "IV*": 7, "III*": 8, "II*": 9}[
            self.kind
        ]

    @property
    def euler_number(self) -> int:
        if self.is_good:
            return 0
        if self.is_multiplicative:
            return self.components
        return self.components + 1

    @property
    def group_name(self) -> str:
        if self.kind == "I":
            return "trivial" if self.n <= 1 else f"Z/{self.n}"
        if self.kind == "I*":
            return "Z/2 x Z/2" if self.n % 2 == 0 else "Z/4"
        return {"II": "trivial", "II*": "trivial", "III": "Z/2", "III*": "Z/2",
                "IV": "Z/3", "IV*": "Z/3"}[self.kind]

    @property
    def group_order(self) -> int:
        if self.kind == "I":
            return max(self.n, 1)
        return {"II": 1, "II*": 1, "III": 2, "III*": 2, "IV": 3, "IV*": 3, "I*": 4}[self.kind]

    @property
    def group_exponent(self) -> int:
        if self.kind == "I":
            return max(self.n, 1)
        if self.kind == "I*":
            return 2 if self.n % 2 == 0 else 4
        return self.group_order

    # component-group combinatorics used by the height solver; elements are
    # small ints, 0 is the identity component

    def group_elements(self) -> list[int]:
        return list(range(self.group_order))

    def element_times(self, element: int, k: int) -> int:
        """k-fold multiple of a component-group element."""
        if self.kind == "I":
            return (element * k) % max(self.n, 1)
        if self.kind == "I*" and self.n % 2 == 0:
            return element if k % 2 else 0  # (Z/2)^2
        return (element * k) % self.group_order

    def component_label(self, element: int) -> int:
        """Simple-component index of a group element (Theta numbering)."""
        if self.kind == "I*" and self.n % 2 == 1:
            # Z/4: the order-2 element is Theta_1, generators are Theta_2/3
            return {0: 0, 2: 1, 1: 2, 3: 3}[element]
        return element

    def __str__(self):
        return self.tag


def component_correction(kod: KodairaType, element: int) -> Fraction:
    """Correcting term c_v(P,P) when P meets the given component-group element."""
    if element not in kod.group_elements():
        raise InvalidComponent(f"{element} is not a component of {kod.tag}")
    if element == 0:
        return Fraction(0)
    if kod.kind == "I":
        return Fraction(element * (kod.n - element), kod.n)
    if kod.kind == "III":
        return Fraction(1, 2)
    if kod.kind == "III*":
        return Fraction(3, 2)
    if kod.kind == "IV":
        return Fraction(2, 3)
    if kod.kind == "IV*":
        return Fraction(4, 3)
    if kod.kind == "I*":
        label = kod.component_label(element)
        return Fraction(1) if label == 1 else 1 + Fraction(kod.n, 4)
    raise InvalidComponent(f"{kod.tag} has a trivial component group")


def kodaira_type(v_c4, v_c6, v_delta: int) -> KodairaType:
    """Classify a minimal fibre from its invariant valuations (char not 2,3).

    v_c4 / v_c6 may be None when the invariant is identically zero.
    """
    if v_delta < 0:
        raise InconsistentValuations("negative discriminant valuation")
    if v_delta == 0:
        return KodairaType("I", 0)
    if v_c4 == 0:
        return KodairaType("I", v_delta)
    # additive reduction from here on
    if v_delta >= 12 and (v_c4 is None or v_c4 >= 4):
        raise NotMinimal(f"(v_c4, v_delta) = ({v_c4}, {v_delta}) is not minimal")
    if v_delta == 2:
        return KodairaType("II")
    if v_delta == 3:
        return KodairaType("III")
    if v_delta == 4:
        return KodairaType("IV")
    if v_delta == 6:
        return KodairaType("I*", 0)
    if v_delta >= 7 and v_c4 == 2:
        return KodairaType("I*", v_delta - 6)
    if v_delta == 8 and (v_c4 is None or v_c4 >= 3):
        return KodairaType("IV*")
    if v_delta == 9 and v_c4 == 3:
        return KodairaType("III*")
    if v_delta == 10 and (v_c4 is None or v_c4 >= 4):
        return KodairaType("II*")
    raise InconsistentValuations(
        f"no Kodaira type for (v_c4, v_c6, v_delta) = ({v_c4}, {v_c6}, {v_delta})"
    )


# ---------------------------------------------------------------------------
# local minimal models
# ---------------------------------------------------------------------------


@dataclass
class LocalModel:
    """A model of the curve that is integral and minimal at one place."""

    place: PlaceClass
    chart_infinite: bool
    uniformizer: Poly  # in the chart variable
    curve: WeierstrassCurve  # minimal model, chart coordinates
    transform: ModelTransform  # chart curve -> minimal model
    n_shift: int
    v_c4: int | None
    v_c6: int | None
    v_delta: int
    kodaira: KodairaType | None

    def point_coords(self, x: RatFunc, y: RatFunc):
        """Coordinates of a global point on the local minimal model."""
        if self.chart_infinite:
            x = x.substitute_reciprocal()
            y = y.substitute_reciprocal()
        return self.transform.point_to_new(x, y)


def _ord_or_none(f: RatFunc, place: PlaceClass):
    if f.is_zero():
        return None
    return ord_at(f, place)


def _trivially_minimal(curve: WeierstrassCurve, place: PlaceClass) -> bool:
    """True when the global model is visibly integral and minimal at the place."""
    if place.is_infinite:
        return False
    polys = [curve.disc.num, curve.disc.den]
    polys += [a.den for a in (curve.a1, curve.a2, curve.a3, curve.a4, curve.a6)]
    return all(
        p.is_constant() or place.poly.gcd(p).is_constant() for p in polys
    )


def _shortening_transform(curve: WeierstrassCurve) -> ModelTransform:
    """Kill a1, a3 and then a2; valid away from characteristic 2 and 3."""
    field = curve.field
    half = RatFunc.const(field, Fraction(1, 2)) if field.char == 0 else RatFunc.const(
        field, pow(2, -1, field.char)
    )
    first = ModelTransform(
        u=RatFunc.const(field, 1),
        r=RatFunc.const(field, 0),
        s=-curve.a1 * half,
        t=-curve.a3 * half,
    )
    mid = first.apply(curve)
    twelfth = RatFunc.const(
        field, Fraction(1, 12) if field.char == 0 else pow(12, -1, field.char)
    )
    second = ModelTransform(
        u=RatFunc.const(field, 1),
        r=-mid.b2 * twelfth,
        s=RatFunc.const(field, 0),
        t=RatFunc.const(field, 0),
    )
    return first.compose(second)


def local_minimal_model(curve: WeierstrassCurve, place: PlaceClass) -> LocalModel:
    """Integral model at the place with minimal discriminant valuation.

    For residue characteristic not in {2, 3} the model is provably minimal
    (u-scaling on a short model).  In characteristic 2/3 only u-power
    denominator clearing is performed and no Kodaira data is attached.
    """
    field = curve.field
    chart_infinite = place.is_infinite
    if _trivially_minimal(curve, place):
        return LocalModel(
            place=place,
            chart_infinite=False,
            uniformizer=place.poly,
            curve=curve,
            transform=ModelTransform.identity(field),
            n_shift=0,
            v_c4=None,
            v_c6=None,
            v_delta=0,
            kodaira=None if field.char in (2, 3) else KodairaType("I", 0),
        )
    chart_curve = curve.infinity_chart() if chart_infinite else curve
    pi = Poly.variable(field) if chart_infinite else place.poly
    pi_place = PlaceClass.finite(pi)

    if field.char in (2, 3):
        ords = []
        for i, a in (
            (1, chart_curve.a1),
            (2, chart_curve.a2),
            (3, chart_curve.a3),
            (4, chart_curve.a4),
            (6, chart_curve.a6),
        ):
            if not a.is_zero():
                ords.append(Fraction(ord_at(a, pi_place), i))
        k = floor(min(ords)) if ords else 0
        u = RatFunc.from_poly(pi) ** k
        transform = ModelTransform.scaling(u)
        model = transform.apply(chart_curve)
        v_delta = ord_at(model.disc, pi_place)
        return LocalModel(
            place=place,
            chart_infinite=chart_infinite,
            uniformizer=pi,
            curve=model,
            transform=transform,
            n_shift=k,
            v_c4=_ord_or_none(model.c4, pi_place),
            v_c6=_ord_or_none(model.c6, pi_place),
            v_delta=v_delta,
            kodaira=None,
        )

    shorten = _shortening_transform(chart_curve)
    short = shorten.apply(chart_curve)
    v_delta = ord_at(short.disc, pi_place)
    v_c4 = _ord_or_none(short.c4, pi_place)
    v_c6 = _ord_or_none(short.c6, pi_place)
    bounds = [Fraction(v_delta, 12)]
    if v_c4 is not None:
        bounds.append(Fraction(v_c4, 4))
    if v_c6 is not None:
        bounds.append(Fraction(v_c6, 6))
    k = floor(min(bounds))
    scale = ModelTransform.scaling(RatFunc.from_poly(pi) ** k)
    transform = shorten.compose(scale)
    model = transform.apply(chart_curve)
    v_delta_min = v_delta - 12 * k
    v_c4_min = None if v_c4 is None else v_c4 - 4 * k
    v_c6_min = None if v_c6 is None else v_c6 - 6 * k
    return LocalModel(
        place=place,
        chart_infinite=chart_infinite,
        uniformizer=pi,
        curve=model,
        transform=transform,
        n_shift=k,
        v_c4=v_c4_min,
        v_c6=v_c6_min,
        v_delta=v_delta_min,
        kodaira=kodaira_type(v_c4_min, v_c6_min, v_delta_min),
    )


def minimalize_at(curve: WeierstrassCurve, place: PlaceClass):
    """Minimal model at a place together with the shift n_v; spec surface."""
    if curve.field.char in (2, 3):
        raise BadCharacteristic("automatic minimalization needs char not in {2, 3}")
    model = local_minimal_model(curve, place)
    return model.curve, model.n_shift


# ---------------------------------------------------------------------------
# surface-level data
# ---------------------------------------------------------------------------


@dataclass
class FibreReport:
    place: PlaceClass
    v_delta: int
    v_c4: int | None
    v_c6: int | None
    kodaira: KodairaType
    n_shift: int
    model: LocalModel

    @property
    def components(self) -> int:
        return self.kodaira.components

    @property
    def euler_number(self) -> int:
        return self.kodaira.euler_number

    @property
    def group_name(self) -> str:
        return self.kodaira.group_name

    @property
    def conductor_exponent(self) -> int:
        if self.kodaira.is_good:
            return 0
        return 1 if self.kodaira.is_multiplicative else 2


@dataclass
class SurfaceData:
    curve: WeierstrassCurve
    chi: int
    fibres: list[FibreReport]  # bad fibres only
    rescaled_good: list[LocalModel]  # good reduction but n_shift != 0
    minimal_disc: FunctionDivisor
    conductor_degree: int
    genus: int = 0

    @property
    def szpiro(self) -> Fraction:
        return Fraction(self.minimal_disc.degree(), self.conductor_degree)

    @property
    def disc_degree(self) -> int:
        return self.minimal_disc.degree()

    def fibre_at(self, place: PlaceClass) -> FibreReport | None:
        for fibre in self.fibres:
            if fibre.place == place:
                return fibre
        return None

    def local_model(self, place: PlaceClass) -> LocalModel:
        """Local minimal model at any place, cached for analyzed ones."""
        for fibre in self.fibres:
            if fibre.place == place:
                return fibre.model
        for model in self.rescaled_good:
            if model.place == place:
                return model
        return local_minimal_model(self.curve, place)

    @property
    def component_exponent_lcm(self) -> int:
        return lcm(*(f.kodaira.group_exponent for f in self.fibres))

    @property
    def component_order_lcm(self) -> int:
        return lcm(*(f.kodaira.group_order for f in self.fibres))


def bad_place_candidates(curve: WeierstrassCurve) -> list[PlaceClass]:
    """Finite classes that could carry bad reduction or a rescaled model."""
    polys = [curve.disc.num, curve.disc.den]
    for f in (curve.c4, curve.c6):
        if not f.is_zero():
            polys.extend([f.num, f.den])
    for a in (curve.a1, curve.a2, curve.a3, curve.a4, curve.a6):
        if not a.is_zero():
            polys.append(a.den)
    polys = [p for p in polys if not p.is_constant()]
    if not polys:
        return []
    return refine_places(polys)


def surface_data(curve: WeierstrassCurve) -> SurfaceData:
    """Analyze all fibres: types, chi, conductor, Szpiro ratio.

    Requires residue characteristic not in {2, 3} and at least one bad
    fibre (the standing assumption that the fibration is not smooth).
    """
    if curve.field.char in (2, 3):
        raise BadCharacteristic("fibre classification needs char not in {2, 3}")
    fibres = []
    rescaled_good = []
    disc_entries = {}
    for place in bad_place_candidates(curve) + [INF]:
        model = local_minimal_model(curve, place)
        if model.v_delta > 0:
            fibres.append(
                FibreReport(
                    place=place,
                    v_delta=model.v_delta,
                    v_c4=model.v_c4,
                    v_c6=model.v_c6,
                    kodaira=model.kodaira,
                    n_shift=model.n_shift,
                    model=model,
                )
            )
            disc_entries[place] = model.v_delta
        elif model.n_shift != 0:
            rescaled_good.append(model)
    if not fibres:
        raise EverywhereGoodReduction("the fibration is smooth")
    euler_total = sum(f.euler_number * f.place.degree for f in fibres)
    if euler_total % 12 != 0:
        raise InconsistentValuations(f"sum of Euler numbers {euler_total} not divisible by 12")
    chi = euler_total // 12
    conductor_degree = sum(f.conductor_exponent * f.place.degree for f in fibres)
    return SurfaceData(
        curve=curve,
        chi=chi,
        fibres=sorted(fibres, key=lambda f: f.place.sort_key()),
        rescaled_good=rescaled_good,
        minimal_disc=FunctionDivisor(disc_entries),
        conductor_degree=conductor_degree,
    )


def insep_degree_j(curve: WeierstrassCurve) -> int:
    """Inseparable degree p^r of the j-map; 1 in char 0 or for constant j."""
    p = curve.field.char
    j = curve.j
    if p == 0 or j.is_constant():
        return 1
    degree = 1
    num, den = j.num, j.den
    while True:
        if any(c != curve.field.zero for i, c in enumerate(num.coeffs) if i % p):
            break
        if any(c != curve.field.zero for i, c in enumerate(den.coeffs) if i % p):
            break
        num, den = num.pth_root(), den.pth_root()
        degree *= p
        if num.is_constant() and den.is_constant():
            break
    return degree
