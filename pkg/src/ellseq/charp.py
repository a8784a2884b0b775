"""Characteristic-p machinery: Hasse invariants, tame/wild sorting, and
the valuation recursion for divisibility sequences.

The Hasse invariant of a short model y^2 = x^3 + Ax + B is computed as
the x^{p-1} coefficient of (x^3 + Ax + B)^{(p-1)/2}; it is a weight
(p-1) modular quantity, so per-place valuations transform through
minimalization shifts exactly like the discriminant does with weight 12.
A truncated formal-group multiplication-by-p series is provided as an
independent (slow, small-p) oracle for the same valuations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .arith import v_p
from .curves import SurfaceData, WeierstrassCurve
from .errors import (
    BadCharacteristic,
    BoundViolation,
    ConstraintViolation,
    NegativeHasseValuation,
    NotOrdinary,
    RecursionViolation,
    SumMismatch,
)
from .fields import Poly, RatFunc
from .group_law import EdsSequence
from .places import INF, PlaceClass, ord_at, refine_places

_P_GUARD = 101


def short_coefficients(curve: WeierstrassCurve):
    """(A, B) with y^2 = x^3 + Ax + B equivalent to the curve; char > 3."""
    p = curve.field.char
    if p in (0, 2, 3):
        raise BadCharacteristic("short coefficients need char p > 3")
    inv48 = RatFunc.const(curve.field, pow(48, -1, p))
    inv864 = RatFunc.const(curve.field, pow(864, -1, p))
    return -curve.c4 * inv48, -curve.c6 * inv864


def hasse_invariant(curve: WeierstrassCurve, guard: int = _P_GUARD) -> RatFunc:
    """Coefficient of x^{p-1} in (x^3 + Ax + B)^{(p-1)/2}; zero iff
    supersingular somewhere (i.e. the curve fails to be ordinary)."""
    p = curve.field.char
    if p in (0, 2, 3):
        raise BadCharacteristic("Hasse invariant needs char p > 3")
    if p > guard:
        raise BadCharacteristic(f"p = {p} beyond the practical guard {guard}")
    A, B = short_coefficients(curve)
    m = (p - 1) // 2
    total = RatFunc.const(curve.field, 0)
    # x-degree 3i + j = p - 1 over i + j + k = m
    a_pows = {0: RatFunc.const(curve.field, 1)}
    b_pows = {0: RatFunc.const(curve.field, 1)}
    for i in range((p - 1) // 3, m + 1):
        j = (p - 1) - 3 * i
        if j < 0 or i + j > m:
            continue
        k = m - i - j
        coeff = math.comb(m, i) * math.comb(m - i, j) % p
        if coeff == 0:
            continue
        if j not in a_pows:
            a_pows[j] = A**j
        if k not in b_pows:
            b_pows[k] = B**k
        total = total + RatFunc.const(curve.field, coeff) * a_pows[j] * b_pows[k]
    return total


@dataclass
class HasseProfile:
    p: int
    global_h: RatFunc
    per_place: dict[PlaceClass, int]
    ordinary: bool
    tame: bool
    chi: int

    def h_at(self, place: PlaceClass) -> int:
        if place in self.per_place:
            return self.per_place[place]
        for v, h in self.per_place.items():
            if not v.is_infinite and not place.is_infinite:
                if place.poly.divides(v.poly):
                    return h
        return 0


def hasse_valuations(surface: SurfaceData, global_h: RatFunc) -> dict[PlaceClass, int]:
    """Per-place h_{E,v} = ord_v(H) - (p-1) n_v, including infinity."""
    p = surface.curve.field.char
    if global_h.is_zero():
        raise NotOrdinary("Hasse invariant vanishes identically")
    shift_places = {f.place: f.n_shift for f in surface.fibres}
    shift_places.update({m.place: m.n_shift for m in surface.rescaled_good})
    polys = [q for q in (global_h.num, global_h.den) if not q.is_constant()]
    polys += [v.poly for v in shift_places if not v.is_infinite]
    classes = refine_places(polys) if polys else []
    out = {}
    for place in classes + [INF]:
        n_v = 0
        for v, shift in shift_places.items():
            if v == place or (
                not v.is_infinite
                and not place.is_infinite
                and place.poly.divides(v.poly)
            ):
                n_v = shift
                break
        h = ord_at(global_h, place) - (p - 1) * n_v
        if h < 0:
            raise NegativeHasseValuation(f"h_(E,{place}) = {h} < 0")
        if h:
            out[place] = h
    total = sum(h * v.degree for v, h in out.items())
    if total != (p - 1) * surface.chi:
        raise SumMismatch(
            f"sum of Hasse valuations {total} != (p-1) chi = {(p - 1) * surface.chi}"
        )
    return out


def hasse_profile(surface: SurfaceData, guard: int = _P_GUARD) -> HasseProfile:
    p = surface.curve.field.char
    H = hasse_invariant(surface.curve, guard=guard)
    if H.is_zero():
        return HasseProfile(
            p=p, global_h=H, per_place={}, ordinary=False, tame=False, chi=surface.chi
        )
    per_place = hasse_valuations(surface, H)
    tame = all(h <= p - 1 for h in per_place.values())
    return HasseProfile(
        p=p, global_h=H, per_place=per_place, ordinary=True, tame=tame, chi=surface.chi
    )


def classify(profile: HasseProfile) -> dict:
    return {
        "ordinary": profile.ordinary,
        "tame": profile.tame if profile.ordinary else None,
        "max_h": max(profile.per_place.values(), default=0),
        "checksum": sum(h * v.degree for v, h in profile.per_place.items()),
    }


def wild_threshold(p: int, chi: int) -> int:
    """Least k with p^k >= (p + (p-1)^2 chi) / (2p - 1)."""
    target = Fraction(p + (p - 1) ** 2 * chi, 2 * p - 1)
    k = 0
    power = 1
    while power < target:
        power *= p
        k += 1
    return k


@dataclass
class OrdPrediction:
    place: PlaceClass
    m_v: int
    e: int
    predicted: int | None  # exact value in the tame case, else None
    interval: tuple[Fraction, Fraction] | None
    delta_bounds: tuple[Fraction, Fraction] | None


def predict_ord(
    profile: HasseProfile,
    seq: EdsSequence,
    place: PlaceClass,
    n: int,
    pairing: Fraction | None = None,
) -> OrdPrediction:
    """Predicted ord_v(D_nP) from the meeting index and the Hasse data."""
    if not profile.ordinary:
        raise NotOrdinary("order recursion needs an ordinary curve")
    from .group_law import meeting_index

    p = profile.p
    m_v = meeting_index(seq, place)
    if m_v is None or n % m_v != 0:
        return OrdPrediction(place, m_v or 0, 0, 0, None, None)
    e = v_p(n // m_v, p)
    base = seq.ord_of(m_v, place)
    h = profile.h_at(place)
    if h <= p - 1:
        predicted = p**e * base + (p**e - 1) // (p - 1) * h
        return OrdPrediction(place, m_v, e, predicted, None, None)
    # wild place: only a certified interval is available
    if pairing is None:
        raise BadCharacteristic("wild prediction needs the height pairing")
    height = pairing / 2
    k = wild_threshold(p, profile.chi)
    lo_delta = Fraction(p * (p**e - 1), p - 1)
    hi_delta = p ** (2 * e) * m_v**2 * height + Fraction(profile.chi, 2) - p**e
    if e <= k:
        lo = p**e * base + lo_delta
        hi = p**e * base + hi_delta
        bounds = (lo_delta, hi_delta)
    else:
        lo_k = Fraction(p * (p**k - 1), p - 1)
        hi_k = p ** (2 * k) * m_v**2 * height + Fraction(profile.chi, 2) - p**k
        tail = Fraction(p ** (e - k) - 1, p - 1) * h
        lo = p**e * base + tail + p ** (e - k) * lo_k
        hi = p**e * base + tail + p ** (e - k) * hi_k
        bounds = (lo_k, hi_k)
    return OrdPrediction(place, m_v, e, None, (lo, hi), bounds)


def verify_ord_recursion(
    profile: HasseProfile, seq: EdsSequence, pairing: Fraction | None = None
) -> dict:
    """Check predicted against actual ord_v(D_nP) for all seen places, n <= nmax."""
    checked = 0
    wild_checked = 0
    for place in seq.meeting:
        for n in range(1, seq.nmax + 1):
            actual = seq.ord_of(n, place)
            pred = predict_ord(profile, seq, place, n, pairing=pairing)
            if pred.predicted is not None:
                if actual != pred.predicted:
                    raise RecursionViolation(
                        f"ord_{place}(D_{n}) = {actual}, predicted {pred.predicted}"
                    )
                checked += 1
            else:
                lo, hi = pred.interval
                if not (lo <= actual <= hi):
                    raise RecursionViolation(
                        f"ord_{place}(D_{n}) = {actual} outside [{lo}, {hi}]"
                    )
                wild_checked += 1
    return {"exact_checks": checked, "interval_checks": wild_checked}


def meeting_constraints(
    surface: SurfaceData, profile: HasseProfile, seq: EdsSequence
) -> list[dict]:
    """Structural constraints on m(v) at places with positive Hasse valuation."""
    from .group_law import meeting_index

    p = profile.p
    out = []
    for place, h in profile.per_place.items():
        fibre = None
        for f in surface.fibres:
            if f.place == place or (
                not f.place.is_infinite
                and not place.is_infinite
                and place.poly.divides(f.place.poly)
            ):
                fibre = f
                break
        m_v = meeting_index(seq, place)
        if fibre is None:
            kind = "good"
            if m_v is not None and m_v % p == 0:
                raise ConstraintViolation(
                    f"good reduction at {place} but p | m(v) = {m_v}"
                )
        elif fibre.kodaira.is_multiplicative:
            raise ConstraintViolation(
                f"multiplicative reduction at {place} with h = {h} > 0"
            )
        else:
            kind = "additive"
            if m_v is not None and (12 * p) % m_v != 0:
                raise ConstraintViolation(
                    f"additive reduction at {place}: m(v) = {m_v} does not divide 12p"
                )
        out.append({"place": str(place), "kind": kind, "h": h, "m": m_v})
    return out


@dataclass
class WReport:
    n: int
    e: int
    exact_degree: int
    tame_bound: int | None
    wild_bound: Fraction | None
    threshold_k: int
    cap_m: int | None


def w_ledger(
    profile: HasseProfile,
    seq: EdsSequence,
    n: int,
    pairing: Fraction,
    surface: SurfaceData,
) -> WReport:
    """Exact deg W(E,P,n) together with the applicable tame/wild caps."""
    from .group_law import meeting_index

    p = profile.p
    divisor = seq.divisor(n)
    exact = 0
    for place in divisor.entries:
        m_v = meeting_index(seq, place)
        if m_v is None or m_v >= n:
            continue
        e_v = v_p(n // m_v, p)
        f_val = divisor.entries[place] - p**e_v * seq.ord_of(m_v, place)
        exact += f_val * place.degree
    e = v_p(n, p)
    k = wild_threshold(p, profile.chi)
    chi = profile.chi
    height = pairing / 2
    tame_bound = None
    wild_bound = None
    cap_m = None
    if profile.tame:
        tame_bound = (p**e - 1) * chi
        if exact > tame_bound:
            raise BoundViolation(
                f"deg W = {exact} exceeds tame cap {tame_bound} at n = {n}"
            )
    else:
        good_meetings = [
            meeting_index(seq, v) or 0
            for v in profile.per_place
            if surface.fibre_at(v) is None
        ]
        cap_m = max([144 * p * p] + [m * m for m in good_meetings])
        if e <= k:
            wild_bound = (
                (p**e - 1) * chi
                + chi * p ** (2 * e) * height * cap_m
                + Fraction(chi * chi, 2)
            )
        else:
            wild_bound = chi * (
                (p**e - 1)
                + p ** (e - k) * (1 + p ** (2 * k) * cap_m * height + Fraction(chi, 2))
            )
        if exact > wild_bound:
            raise BoundViolation(
                f"deg W = {exact} exceeds wild cap {wild_bound} at n = {n}"
            )
    return WReport(
        n=n,
        e=e,
        exact_degree=exact,
        tame_bound=tame_bound,
        wild_bound=wild_bound,
        threshold_k=k,
        cap_m=cap_m,
    )


# ---------------------------------------------------------------------------
# formal group oracle (small p): [p](T) to precision T^{p+1}
# ---------------------------------------------------------------------------


def _series_trunc(coeffs: list, prec: int) -> list:
    return coeffs[:prec] + [None] * 0


def formal_w_expansion(curve: WeierstrassCurve, prec: int) -> list[RatFunc]:
    """w(z) = z^3 + a1 z w + a2 z^2 w + a3 w^2 + a4 z w^2 + a6 w^3 to O(z^prec)."""
    zero = RatFunc.const(curve.field, 0)
    w = [zero] * prec
    if prec > 3:
        w[3] = RatFunc.const(curve.field, 1)
    for _ in range(prec):
        w2 = _series_mul(w, w, prec)
        w3 = _series_mul(w2, w, prec)
        new = [zero] * prec
        if prec > 3:
            new[3] = RatFunc.const(curve.field, 1)
        for i in range(prec):
            acc = new[i]
            if i >= 1:
                acc = acc + curve.a1 * w[i - 1]
            if i >= 2:
                acc = acc + curve.a2 * w[i - 2]
            acc = acc + curve.a3 * w2[i]
            if i >= 1:
                acc = acc + curve.a4 * w2[i - 1]
            acc = acc + curve.a6 * w3[i]
            new[i] = acc
        if new == w:
            break
        w = new
    return w


def _series_mul(a: list, b: list, prec: int) -> list:
    zero = a[0] - a[0] if a else b[0] - b[0]
    out = [zero] * prec
    for i, ai in enumerate(a):
        if ai.is_zero():
            continue
        for j, bj in enumerate(b):
            if i + j >= prec:
                break
            if bj.is_zero():
                continue
            out[i + j] = out[i + j] + ai * bj
    return out


class _Bivariate:
    """Truncated bivariate series with RatFunc coefficients."""

    def __init__(self, field, data=None, prec=8):
        self.field = field
        self.prec = prec
        self.data = dict(data or {})

    def add(self, other):
        out = dict(self.data)
        for key, val in other.data.items():
            out[key] = out.get(key, RatFunc.const(self.field, 0)) + val
        return _Bivariate(self.field, out, self.prec)

    def mul(self, other):
        out = {}
        for (i1, j1), v1 in self.data.items():
            if v1.is_zero():
                continue
            for (i2, j2), v2 in other.data.items():
                i, j = i1 + i2, j1 + j2
                if i + j >= self.prec:
                    continue
                if v2.is_zero():
                    continue
                key = (i, j)
                out[key] = out.get(key, RatFunc.const(self.field, 0)) + v1 * v2
        return _Bivariate(self.field, out, self.prec)

    def scale(self, c: RatFunc):
        return _Bivariate(
            self.field, {k: v * c for k, v in self.data.items()}, self.prec
        )

    def constant_term(self):
        return self.data.get((0, 0), RatFunc.const(self.field, 0))

    def inverse(self):
        """Inverse of a unit series (nonzero constant term)."""
        c0 = self.constant_term()
        rest = _Bivariate(
            self.field,
            {k: v for k, v in self.data.items() if k != (0, 0)},
            self.prec,
        ).scale(c0.inverse() * RatFunc.const(self.field, -1))
        acc = _Bivariate(self.field, {(0, 0): RatFunc.const(self.field, 1)}, self.prec)
        term = acc
        for _ in range(self.prec):
            term = term.mul(rest)
            if not term.data:
                break
            acc = acc.add(term)
        return acc.scale(c0.inverse())


def formal_group_law(curve: WeierstrassCurve, prec: int) -> _Bivariate:
    """F(z1, z2) truncated to total degree < prec."""
    field = curve.field
    w = formal_w_expansion(curve, prec)
    one = RatFunc.const(field, 1)

    lam = _Bivariate(field, prec=prec)
    for n in range(3, prec):
        if w[n].is_zero():
            continue
        for i in range(n):
            j = n - 1 - i
            if i + j >= prec:
                continue
            key = (i, j)
            lam.data[key] = lam.data.get(key, RatFunc.const(field, 0)) + w[n]
    z1 = _Bivariate(field, {(1, 0): one}, prec)
    w1 = _Bivariate(field, {(n, 0): w[n] for n in range(prec) if not w[n].is_zero()}, prec)
    nu = w1.add(lam.mul(z1).scale(RatFunc.const(field, -1)))

    a1, a2, a3, a4, a6 = curve.a1, curve.a2, curve.a3, curve.a4, curve.a6
    lam2 = lam.mul(lam)
    lamnu = lam.mul(nu)
    numer = (
        lam.scale(a1)
        .add(nu.scale(a2))
        .add(lam2.scale(a3))
        .add(lamnu.scale(2 * a4))
        .add(lam2.mul(nu).scale(3 * a6))
    )
    denom = _Bivariate(field, {(0, 0): one}, prec)
    denom = denom.add(lam.scale(a2)).add(lam2.scale(a4)).add(lam2.mul(lam).scale(a6))
    z2 = _Bivariate(field, {(0, 1): one}, prec)
    z3 = (
        z1.scale(RatFunc.const(field, -1))
        .add(z2.scale(RatFunc.const(field, -1)))
        .add(numer.mul(denom.inverse()).scale(RatFunc.const(field, -1)))
    )
    # formal inverse i(z) = z / (-1 + a1 z + a3 w(z)) applied to z3
    inv_den_univ = [RatFunc.const(field, -1)] + [RatFunc.const(field, 0)] * (prec - 1)
    inv_den_univ[1] = inv_den_univ[1] + a1
    for n in range(prec):
        if not w[n].is_zero():
            inv_den_univ[n] = inv_den_univ[n] + a3 * w[n]
    inv_num = _compose_univariate([RatFunc.const(field, 0), one], z3, prec)
    inv_den = _compose_univariate(inv_den_univ, z3, prec)
    return inv_num.mul(inv_den.inverse())


def _compose_univariate(coeffs: list, series: _Bivariate, prec: int) -> _Bivariate:
    field = series.field
    out = _Bivariate(field, prec=prec)
    power = _Bivariate(field, {(0, 0): RatFunc.const(field, 1)}, prec)
    for k, c in enumerate(coeffs):
        if k > 0:
            power = power.mul(series)
            if not power.data:
                break
        if not c.is_zero():
            out = out.add(power.scale(c))
    return out


def formal_multiplication(curve: WeierstrassCurve, m: int, prec: int) -> list[RatFunc]:
    """Coefficients of [m](T) to O(T^prec) via iterated formal addition."""
    field = curve.field
    zero = RatFunc.const(field, 0)
    one = RatFunc.const(field, 1)
    F = formal_group_law(curve, prec)
    current = [zero, one] + [zero] * (prec - 2)  # [1](T) = T
    for _ in range(m - 1):
        powers = [[one] + [zero] * (prec - 1)]
        for _k in range(1, prec):
            powers.append(_series_mul(powers[-1], current, prec))
        out = [zero] * prec
        for (i, j), c in F.data.items():
            if c.is_zero():
                continue
            base = powers[i]
            for idx in range(prec - j):
                if base[idx].is_zero():
                    continue
                out[idx + j] = out[idx + j] + c * base[idx]
        current = out
    return current
