"""Refined divisor sums with values in the torsion group algebra.

bold_sigma(delta, a) refines the divisor sum sigma(a) into an element of
Q[(Z/delta)^2]: its coefficient at a torsion point records how many of the
sigma(a) weighted covers of the curve land on that correlator.  Two
independent closed forms exist for it; both are computed on every call and
compared, so the pair acts as a built-in regression check.

local_invariant packages the closed form of the genus-one, one-interior-
point correlated count: a^(n-1) w1^2 bold_sigma(delta, a), optionally
translated by a special correlator shift.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .arith import divisors, factorize, sigma_bar, upsilon
from .torsion import GroupAlgebraElement, TorsionPoint, theta


class ConsistencyError(RuntimeError):
    """Two independent routes to the same value disagreed (internal bug)."""


@lru_cache(maxsize=None)
def theta_delta_d(delta: int, d: int) -> GroupAlgebraElement:
    """Prime-by-prime difference of projectors attached to a divisor d of delta.

    Convolution over primes p | delta of theta_{p^v(d)} minus, when the
    valuation of d is below that of delta, theta_{p^(v(d)+1)}.  For d = delta
    this is just theta(delta, delta).
    """
    if delta % d:
        raise ValueError(f"theta_delta_d expects d | delta, got {d}, {delta}")
    out = GroupAlgebraElement.unit(delta)
    fd = factorize(d)
    for p, vdelta in factorize(delta).factors:
        vd = fd.valuation(p)
        factor = theta(delta, p**vd)
        if vd < vdelta:
            factor = factor - theta(delta, p ** (vd + 1))
        out = out * factor
    return out


@lru_cache(maxsize=None)
def bold_sigma(delta: int, a: int) -> GroupAlgebraElement:
    """Correlated refinement of sigma(a) at torsion level delta.

    Computed two ways -- as sum over d | delta of sigma_bar^(delta/d)(a)
    theta_delta_d(delta, d), and as sum of upsilon(delta, d, a)
    theta(delta, delta/d) -- and the results are required to agree exactly.
    Total mass is sigma(a); coefficients depend only on the order of the
    point.
    """
    if delta < 1 or a < 1:
        raise ValueError("bold_sigma expects positive arguments")
    via_projectors = GroupAlgebraElement.zero(delta)
    via_upsilon = GroupAlgebraElement.zero(delta)
    for d in divisors(delta):
        via_projectors = via_projectors + sigma_bar(delta // d, a) * theta_delta_d(
            delta, d
        )
        via_upsilon = via_upsilon + upsilon(delta, d, a) * theta(delta, delta // d)
    if via_projectors != via_upsilon:
        raise ConsistencyError(
            f"bold_sigma routes disagree for delta={delta}, a={a}"
        )
    return via_projectors


def local_invariant(
    a: int,
    w1: int,
    n: int,
    delta: int,
    shift: TorsionPoint | None = None,
) -> GroupAlgebraElement:
    """Full correlated count for a genus-one cover with one interior point.

    Equals a^(n-1) w1^2 bold_sigma(delta, a), translated by the optional
    special-correlator shift.  Total mass is a^(n-1) sigma(a) w1^2, the
    unrefined count.
    """
    if a < 1 or w1 < 1:
        raise ValueError("local_invariant expects a >= 1 and w1 >= 1")
    if n < 2:
        raise ValueError(f"local_invariant expects n >= 2, got {n}")
    if w1 % delta:
        raise ValueError(
            f"local_invariant expects delta | w1, got delta={delta}, w1={w1}"
        )
    out = a ** (n - 1) * w1 * w1 * bold_sigma(delta, a)
    if shift is not None:
        if shift.delta != delta:
            raise ValueError(
                f"shift lives at level {shift.delta}, expected {delta}"
            )
        out = out.translate(shift.u, shift.v)
    return out


def coefficient_by_order(delta: int, a: int, r: int) -> Fraction:
    """Coefficient of any order-r point in delta^2 bold_sigma(delta, a).

    Well defined because coefficients only depend on the order; agrees with
    arith.s_delta_order(delta, r, a).
    """
    if delta % r:
        raise ValueError(f"expected r | delta, got r={r}, delta={delta}")
    x = bold_sigma(delta, a)
    # (delta/r, 0) has order exactly r.
    return delta * delta * x.coefficient(delta // r, 0)


__all__ = [
    "ConsistencyError",
    "theta_delta_d",
    "bold_sigma",
    "local_invariant",
    "coefficient_by_order",
]
