"""Exact group algebra of the delta-torsion of a two-dimensional real torus.

The delta-torsion points of an elliptic curve E = (R/Z)^2 form the group
(Z/delta)^2.  A :class:`GroupAlgebraElement` is a finitely supported map
from these points to exact rationals; multiplication is convolution for
the group law.  Besides the ring structure the module provides the
averaging projectors theta(delta, d), the pushforward along
multiplication by k, and its section dividing by k (averaging over k-th
roots), which together drive every refined invariant downstream.

All values are immutable; operations return fresh elements.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable, Mapping


@dataclass(frozen=True)
class TorsionPoint:
    """A point of (Z/delta)^2, i.e. a delta-torsion point of the curve."""

    delta: int
    u: int
    v: int

    def __post_init__(self) -> None:
        if self.delta < 1:
            raise ValueError(f"delta must be >= 1, got {self.delta}")
        object.__setattr__(self, "u", self.u % self.delta)
        object.__setattr__(self, "v", self.v % self.delta)

    @property
    def order(self) -> int:
        """Smallest n >= 1 with n * (u, v) = 0 in (Z/delta)^2."""
        return self.delta // gcd(self.u, self.v, self.delta)


def order(p: TorsionPoint) -> int:
    return p.order


class GroupAlgebraElement:
    """Finitely supported Q-valued function on (Z/delta)^2.

    Zero coefficients are never stored.  Instances are immutable; all
    arithmetic returns new elements.  `x * y` is convolution when y is an
    element and scaling when y is an int or Fraction.
    """

    __slots__ = ("delta", "_terms")

    def __init__(
        self,
        delta: int,
        terms: Mapping[tuple[int, int], Fraction | int] | None = None,
    ) -> None:
        if delta < 1:
            raise ValueError(f"delta must be >= 1, got {delta}")
        clean: dict[tuple[int, int], Fraction] = {}
        if terms:
            for (u, v), c in terms.items():
                c = Fraction(c)
                if c:
                    clean[(u % delta, v % delta)] = (
                        clean.get((u % delta, v % delta), Fraction(0)) + c
                    )
        object.__setattr__(self, "delta", delta)
        object.__setattr__(
            self, "_terms", {k: c for k, c in clean.items() if c}
        )

    def __setattr__(self, name, value):  # pragma: no cover - defensive
        raise AttributeError("GroupAlgebraElement is immutable")

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, delta: int) -> "GroupAlgebraElement":
        return cls(delta)

    @classmethod
    def unit(cls, delta: int) -> "GroupAlgebraElement":
        return cls(delta, {(0, 0): Fraction(1)})

    @classmethod
    def point(cls, p: TorsionPoint) -> "GroupAlgebraElement":
        return cls(p.delta, {(p.u, p.v): Fraction(1)})

    # -- inspection ---------------------------------------------------

    def coefficient(self, u: int, v: int) -> Fraction:
        return self._terms.get((u % self.delta, v % self.delta), Fraction(0))

    @property
    def support(self) -> list[tuple[int, int]]:
        return sorted(self._terms)

    def items(self) -> Iterable[tuple[tuple[int, int], Fraction]]:
        return self._terms.items()

    @property
    def total_mass(self) -> Fraction:
        return sum(self._terms.values(), Fraction(0))

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GroupAlgebraElement):
            return NotImplemented
        return self.delta == other.delta and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((self.delta, frozenset(self._terms.items())))

    def __repr__(self) -> str:
        body = ", ".join(
            f"({u},{v}): {c}" for (u, v), c in sorted(self._terms.items())
        )
        return f"GA[{self.delta}]{{{body}}}"

    # -- linear structure ----------------------------------------------

    def _check_level(self, other: "GroupAlgebraElement") -> None:
        if self.delta != other.delta:
            raise ValueError(
                f"ambient level mismatch: {self.delta} vs {other.delta}"
            )

    def __add__(self, other: "GroupAlgebraElement") -> "GroupAlgebraElement":
        self._check_level(other)
        terms = dict(self._terms)
        for k, c in other._terms.items():
            terms[k] = terms.get(k, Fraction(0)) + c
        return GroupAlgebraElement(self.delta, terms)

    def __sub__(self, other: "GroupAlgebraElement") -> "GroupAlgebraElement":
        return self + (other * -1)

    def __mul__(self, other):
        if isinstance(other, GroupAlgebraElement):
            return convolve(self, other)
        if isinstance(other, (int, Fraction)):
            return GroupAlgebraElement(
                self.delta, {k: c * other for k, c in self._terms.items()}
            )
        return NotImplemented

    __rmul__ = __mul__

    # -- group-algebra operators ----------------------------------------

    def translate(self, u0: int, v0: int) -> "GroupAlgebraElement":
        """Convolve with the generator at (u0, v0): shift every support point."""
        d = self.delta
        return GroupAlgebraElement(
            d, {((u + u0) % d, (v + v0) % d): c for (u, v), c in self._terms.items()}
        )

    def m_push(self, k: int) -> "GroupAlgebraElement":
        """Pushforward along multiplication by k; preserves total mass."""
        if k < 1:
            raise ValueError(f"m_push expects k >= 1, got {k}")
        d = self.delta
        terms: dict[tuple[int, int], Fraction] = {}
        for (u, v), c in self._terms.items():
            key = ((k * u) % d, (k * v) % d)
            terms[key] = terms.get(key, Fraction(0)) + c
        return GroupAlgebraElement(d, terms)

    def divide(self, k: int) -> "GroupAlgebraElement":
        """Replace each generator by the average of its k^2 k-th roots.

        Requires k | delta and every support point to be divisible by k in
        (Z/delta)^2 (equivalently, delta/k-torsion); otherwise the roots do
        not exist at this ambient level and a ValueError signals that the
        level was chosen too small.
        """
        if k < 1:
            raise ValueError(f"divide expects k >= 1, got {k}")
        d = self.delta
        if d % k:
            raise ValueError(f"divide expects k | delta, got k={k}, delta={d}")
        step = d // k
        ksq = Fraction(1, k * k)
        terms: dict[tuple[int, int], Fraction] = {}
        for (u, v), c in self._terms.items():
            if u % k or v % k:
                raise ValueError(
                    f"support point ({u},{v}) has no {k}-th root at level {d}"
                )
            w = c * ksq
            for i in range(k):
                for j in range(k):
                    key = ((u // k + i * step) % d, (v // k + j * step) % d)
                    terms[key] = terms.get(key, Fraction(0)) + w
        return GroupAlgebraElement(d, terms)

    def rebase(self, new_delta: int) -> "GroupAlgebraElement":
        """Represent the same abstract element of Q[E] at another level.

        Embeds when new_delta is a multiple of the current level; restricts
        when it is a divisor and every support point is new_delta-torsion.
        """
        d = self.delta
        if new_delta < 1:
            raise ValueError(f"rebase expects a positive level, got {new_delta}")
        if new_delta == d:
            return self
        if new_delta % d == 0:
            f = new_delta // d
            return GroupAlgebraElement(
                new_delta, {(u * f, v * f): c for (u, v), c in self._terms.items()}
            )
        if d % new_delta == 0:
            terms = {}
            for (u, v), c in self._terms.items():
                if (u * new_delta) % d or (v * new_delta) % d:
                    raise ValueError(
                        f"support point ({u},{v}) is not {new_delta}-torsion"
                    )
                terms[(u * new_delta // d, v * new_delta // d)] = c
            return GroupAlgebraElement(new_delta, terms)
        raise ValueError(f"incompatible levels: {d} and {new_delta}")

    # -- serialization ---------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "delta": self.delta,
            "terms": [
                {"u": u, "v": v, "num": c.numerator, "den": c.denominator}
                for (u, v), c in sorted(self._terms.items())
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), separators=(",", ":"))

    @classmethod
    def from_json_dict(cls, data: dict) -> "GroupAlgebraElement":
        return cls(
            data["delta"],
            {
                (t["u"], t["v"]): Fraction(t["num"], t["den"])
                for t in data["terms"]
            },
        )

    @classmethod
    def from_json(cls, text: str) -> "GroupAlgebraElement":
        return cls.from_json_dict(json.loads(text))


def convolve(x: GroupAlgebraElement, y: GroupAlgebraElement) -> GroupAlgebraElement:
    """Group-algebra product: (x*y)(t) = sum over t1 + t2 = t of x(t1) y(t2)."""
    if x.delta != y.delta:
        raise ValueError(f"ambient level mismatch: {x.delta} vs {y.delta}")
    d = x.delta
    terms: dict[tuple[int, int], Fraction] = {}
    for (u1, v1), c1 in x.items():
        for (u2, v2), c2 in y.items():
            key = ((u1 + u2) % d, (v1 + v2) % d)
            terms[key] = terms.get(key, Fraction(0)) + c1 * c2
    return GroupAlgebraElement(d, terms)


def m_push(k: int, x: GroupAlgebraElement) -> GroupAlgebraElement:
    return x.m_push(k)


def divide(k: int, x: GroupAlgebraElement) -> GroupAlgebraElement:
    return x.divide(k)


def rebase(x: GroupAlgebraElement, new_delta: int) -> GroupAlgebraElement:
    return x.rebase(new_delta)


@lru_cache(maxsize=None)
def theta(delta: int, d: int) -> GroupAlgebraElement:
    """Averaging projector: mass 1/d^2 on each point of order dividing d.

    Requires d | delta.  These satisfy theta(delta, d1) * theta(delta, d2)
    = theta(delta, lcm(d1, d2)); theta(delta, 1) is the unit.
    """
    if delta < 1:
        raise ValueError(f"delta must be >= 1, got {delta}")
    if delta % d:
        raise ValueError(f"theta expects d | delta, got d={d}, delta={delta}")
    step = delta // d
    c = Fraction(1, d * d)
    return GroupAlgebraElement(
        delta, {(i * step, j * step): c for i in range(d) for j in range(d)}
    )


def unrefine(x: GroupAlgebraElement, new_delta: int) -> GroupAlgebraElement:
    """Push x along multiplication by delta/new_delta and restrict the level.

    This is the coarsening that relates refinements at nested levels:
    unrefine(bold_sigma(delta, a), delta') = bold_sigma(delta', a).
    """
    if x.delta % new_delta:
        raise ValueError(
            f"unrefine expects new_delta | delta, got {new_delta}, {x.delta}"
        )
    return x.m_push(x.delta // new_delta).rebase(new_delta)
