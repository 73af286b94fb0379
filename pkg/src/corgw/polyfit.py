"""Piecewise-polynomial structure of the invariants in the tangency orders.

A diagram template fixes everything about a floor diagram except its edge
weights; the admissible weightings are the positive lattice points of the
flow polytope cut out by the signed incidence matrix.  Summing the weight
monomial over weightings restricted to gcd classes, with group-algebra
coefficients obtained from a Moebius-style triangular system, rebuilds the
per-template invariant and exposes it as a polynomial in the tangency
order on each divisibility chamber.  Polynomial identification is exact
Newton interpolation over rationals with held-out validation points.

The fit operates on the two-end profile family (w, -w); richer profile
grids would need the full chamber complex, which is out of scope.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .arith import divisors
from .diagrams import (
    BOTTOM,
    TOP,
    Edge,
    Flat,
    Floor,
    FloorDiagram,
    TangencyProfile,
    _floor_core,
    multiplicity,
)
from .torsion import GroupAlgebraElement, theta


@dataclass(frozen=True)
class DiagramTemplate:
    """Floor diagram with edge weights erased; orientation and labels kept."""

    levels: tuple
    edges: tuple[tuple, ...]  # (lo, hi) pairs in the diagram's endpoint syntax

    @classmethod
    def from_diagram(cls, diagram: FloorDiagram) -> "DiagramTemplate":
        return cls(diagram.levels, tuple((e.lo, e.hi) for e in diagram.edges))

    def with_weights(self, omega: Sequence[int]) -> FloorDiagram:
        if len(omega) != len(self.edges):
            raise ValueError("weight vector length mismatch")
        return FloorDiagram(
            self.levels,
            tuple(Edge(lo, hi, w) for (lo, hi), w in zip(self.edges, omega)),
        )

    @property
    def floor_info(self) -> tuple[tuple[int, int], ...]:
        """Sorted multiset of (label, valency) over the floors."""
        out = []
        for i, lv in enumerate(self.levels):
            if isinstance(lv, Floor):
                val = sum((lo == i) + (hi == i) for lo, hi in self.edges)
                out.append((lv.a_v, val))
        return tuple(sorted(out))

    @property
    def bounded_columns(self) -> tuple[int, ...]:
        return tuple(
            j
            for j, (lo, hi) in enumerate(self.edges)
            if isinstance(lo, int) and isinstance(hi, int)
        )

    @property
    def open_columns(self) -> tuple[int, ...]:
        """Edge columns with no flat endpoint (weight squared in f)."""
        flats = {i for i, lv in enumerate(self.levels) if isinstance(lv, Flat)}
        return tuple(
            j
            for j, (lo, hi) in enumerate(self.edges)
            if not (lo in flats or hi in flats)
        )

    def monomial(self, omega: Sequence[int]) -> int:
        """f(omega): product of weights over bounded columns, squared over
        flat-free columns."""
        out = 1
        for j in self.bounded_columns:
            out *= omega[j]
        for j in self.open_columns:
            out *= omega[j] * omega[j]
        return out

    @property
    def monomial_degree(self) -> int:
        return len(self.bounded_columns) + 2 * len(self.open_columns)

    def to_json_dict(self) -> dict:
        return {
            "levels": [
                {"kind": "floor", "a": lv.a_v} if isinstance(lv, Floor) else
                {"kind": "flat"}
                for lv in self.levels
            ],
            "edges": [{"lo": lo, "hi": hi} for lo, hi in self.edges],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), separators=(",", ":"))

    @classmethod
    def from_json_dict(cls, data: dict) -> "DiagramTemplate":
        levels = tuple(
            Floor(lv["a"]) if lv["kind"] == "floor" else Flat()
            for lv in data["levels"]
        )
        edges = tuple((e["lo"], e["hi"]) for e in data["edges"])
        return cls(levels, edges)

    @classmethod
    def from_json(cls, text: str) -> "DiagramTemplate":
        return cls.from_json_dict(json.loads(text))


def adjacency_matrix(template: DiagramTemplate) -> list[list[int]]:
    """Signed incidence matrix: rows vertices (levels, then one infinite
    vertex per end edge), columns edges; +1 where an edge ends, -1 where it
    starts.  A @ omega is the divergence at every vertex."""
    n = len(template.levels)
    ends = [
        ("end", j)
        for j, (lo, hi) in enumerate(template.edges)
        for side in (lo, hi)
        if side in (BOTTOM, TOP)
    ]
    rows = [("level", i) for i in range(n)] + ends
    index = {r: k for k, r in enumerate(rows)}
    mat = [[0] * len(template.edges) for _ in rows]
    for j, (lo, hi) in enumerate(template.edges):
        lo_row = index[("level", lo)] if isinstance(lo, int) else index[("end", j)]
        hi_row = index[("level", hi)] if isinstance(hi, int) else index[("end", j)]
        mat[lo_row][j] -= 1
        mat[hi_row][j] += 1
    return mat


def _compositions(total: int, k: int) -> Iterator[tuple[int, ...]]:
    """Ordered k-tuples of positive integers summing to total, lex-decreasing."""
    if k == 0:
        if total == 0:
            yield ()
        return
    if k == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(total - k + 1, 0, -1):
        for rest in _compositions(total - first, k - 1):
            yield (first,) + rest


def _multiset_assignments(values: tuple[int, ...], slots: int) -> Iterator[tuple[int, ...]]:
    """Distinct orderings of a multiset over the given number of slots."""
    if len(values) != slots:
        return
    seen = set()
    from itertools import permutations

    for perm in permutations(values):
        if perm not in seen:
            seen.add(perm)
            yield perm


def weightings(
    template: DiagramTemplate, profile: TangencyProfile
) -> list[tuple[int, ...]]:
    """All strictly positive integer weightings inducing the profile.

    The vector is indexed by template.edges.  End weights realize the
    profile multisets on the source and sink edges; bounded weights are
    propagated level by level, each level's outgoing flow enumerated as a
    lex-decreasing composition of its incoming flow.
    """
    n = len(template.levels)
    bottom_cols = [j for j, (lo, _hi) in enumerate(template.edges) if lo == BOTTOM]
    top_cols = [j for j, (_lo, hi) in enumerate(template.edges) if hi == TOP]
    if len(bottom_cols) != len(profile.sources) or len(top_cols) != len(
        profile.sinks
    ):
        return []
    out_bounded = {
        i: [
            j
            for j, (lo, hi) in enumerate(template.edges)
            if lo == i and isinstance(hi, int)
        ]
        for i in range(n)
    }
    in_cols = {
        i: [j for j, (_lo, hi) in enumerate(template.edges) if hi == i]
        for i in range(n)
    }
    out_top = {
        i: [j for j, (lo, hi) in enumerate(template.edges) if lo == i and hi == TOP]
        for i in range(n)
    }
    results: list[tuple[int, ...]] = []

    def propagate(level: int, omega: list):
        if level == n:
            results.append(tuple(omega))
            return
        inflow = sum(omega[j] for j in in_cols[level])
        fixed_out = sum(omega[j] for j in out_top[level])
        rest = inflow - fixed_out
        cols = out_bounded[level]
        if not cols:
            if rest == 0:
                propagate(level + 1, omega)
            return
        for parts in _compositions(rest, len(cols)):
            for j, w in zip(cols, parts):
                omega[j] = w
            propagate(level + 1, omega)
        for j in cols:
            omega[j] = 0

    for src in _multiset_assignments(profile.sources, len(bottom_cols)):
        for snk in _multiset_assignments(profile.sinks, len(top_cols)):
            omega = [0] * len(template.edges)
            for j, w in zip(bottom_cols, src):
                omega[j] = w
            for j, w in zip(top_cols, snk):
                omega[j] = w
            propagate(0, omega)
    return results


def gamma_coeffs(
    template: DiagramTemplate, delta: int
) -> dict[int, GroupAlgebraElement]:
    """Summation-by-parts coefficients for the gcd-stratified weighting sum.

    Solves, smallest divisors first, the triangular system requiring that
    for every possible weighting gcd e | delta the partial sums of the
    gammas reproduce the division-averaged floor product at level e.
    """
    if delta < 1:
        raise ValueError(f"expected delta >= 1, got {delta}")
    floors = template.floor_info
    gammas: dict[int, GroupAlgebraElement] = {}
    for e in divisors(delta):
        phi = _floor_core(delta, e, floors)
        acc = GroupAlgebraElement.zero(delta)
        for d in divisors(e):
            if d != e:
                acc = acc + gammas[d]
        gammas[e] = phi - acc
    return gammas


def invariant_by_template(
    template: DiagramTemplate, profile: TangencyProfile, delta: int
) -> GroupAlgebraElement:
    """Per-template invariant via the gamma resummation.

    sum over d | delta of gamma_d times the weight-monomial sum over
    weightings whose coordinates are all divisible by d.  Equals the direct
    sum of multiplicities over the same weightings.
    """
    if delta < 1 or profile.gcd_abs % delta:
        raise ValueError(
            f"delta={delta} must divide the profile gcd {profile.gcd_abs}"
        )
    omegas = weightings(template, profile)
    gammas = gamma_coeffs(template, delta)
    total = GroupAlgebraElement.zero(delta)
    for d in divisors(delta):
        s = 0
        for omega in omegas:
            if all(w % d == 0 for w in omega):
                s += template.monomial(omega)
        if s:
            total = total + gammas[d] * s
    return total


def direct_sum_over_weightings(
    template: DiagramTemplate, profile: TangencyProfile, delta: int
) -> GroupAlgebraElement:
    """Reference route: sum of diagram multiplicities over all weightings."""
    total = GroupAlgebraElement.zero(delta)
    for omega in weightings(template, profile):
        total = total + multiplicity(template.with_weights(omega), delta)
    return total


def flow_degrees_of_freedom(template: DiagramTemplate) -> int:
    """Dimension of the space of flows once the end weights are fixed:
    bounded columns minus the rank of the level rows of the incidence
    matrix restricted to them."""
    cols = template.bounded_columns
    n = len(template.levels)
    full = adjacency_matrix(template)
    rows = [[Fraction(full[i][j]) for j in cols] for i in range(n)]
    rank = 0
    for col in range(len(cols)):
        pivot = None
        for r in range(rank, len(rows)):
            if rows[r][col]:
                pivot = r
                break
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        pr = rows[rank]
        inv = Fraction(1) / pr[col]
        rows[rank] = [x * inv for x in pr]
        for r in range(len(rows)):
            if r != rank and rows[r][col]:
                f = rows[r][col]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[rank])]
        rank += 1
    return len(cols) - rank


# -- exact polynomial helpers ----------------------------------------------


def interpolate(points: Sequence[tuple[int, Fraction]]) -> list[Fraction]:
    """Monomial coefficients of the unique minimal-degree interpolant,
    via Newton divided differences over exact rationals."""
    xs = [Fraction(x) for x, _ in points]
    if len(set(xs)) != len(xs):
        raise ValueError("interpolation nodes must be distinct")
    dd = [Fraction(y) for _, y in points]
    n = len(points)
    newton = []
    for level in range(n):
        newton.append(dd[0])
        dd = [
            (dd[i + 1] - dd[i]) / (xs[i + level + 1] - xs[i])
            for i in range(len(dd) - 1)
        ]
    coeffs = [Fraction(0)] * n
    basis = [Fraction(1)] + [Fraction(0)] * (n - 1)
    for level in range(n):
        for k in range(n):
            coeffs[k] += newton[level] * basis[k]
        if level < n - 1:
            shifted = [Fraction(0)] * n
            for k in range(n - 1):
                shifted[k + 1] += basis[k]
                shifted[k] -= xs[level] * basis[k]
            basis = shifted
    while len(coeffs) > 1 and not coeffs[-1]:
        coeffs.pop()
    return coeffs


def poly_eval(coeffs: Sequence[Fraction], x: int) -> Fraction:
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def poly_degree(coeffs: Sequence[Fraction]) -> int:
    deg = -1
    for k, c in enumerate(coeffs):
        if c:
            deg = k
    return deg


def theta_coordinates(x: GroupAlgebraElement) -> dict[int, Fraction]:
    """Coordinates of x in the projector basis theta(delta, d), d | delta.

    Solved largest divisor first from coefficients at points of exact
    order; raises ValueError when x is not in the projector span.
    """
    delta = x.delta
    coords: dict[int, Fraction] = {}
    for d in sorted(divisors(delta), reverse=True):
        # (delta/d, 0) has order exactly d.
        val = x.coefficient(delta // d, 0)
        for e in divisors(delta):
            if e % d == 0 and e != d and coords.get(e):
                val -= coords[e] * Fraction(1, e * e)
        coords[d] = val * d * d
    recon = GroupAlgebraElement.zero(delta)
    for d, c in coords.items():
        if c:
            recon = recon + c * theta(delta, d)
    if recon != x:
        raise ValueError("element is not in the span of the projectors")
    return coords


@dataclass(frozen=True)
class CoordinateFit:
    divisor: int
    coeffs: tuple[Fraction, ...]
    degree: int
    holdout_ok: bool


@dataclass(frozen=True)
class PolyFitReport:
    ok: bool
    delta: int
    chamber: tuple[int, int] | None
    degree_bound: int
    fit_points: tuple[int, ...]
    holdout_points: tuple[int, ...]
    coordinates: tuple[CoordinateFit, ...]

    def to_json_dict(self) -> dict:
        return {
            "ok": self.ok,
            "delta": self.delta,
            "chamber": list(self.chamber) if self.chamber else None,
            "degree_bound": self.degree_bound,
            "fit_points": list(self.fit_points),
            "holdout_points": list(self.holdout_points),
            "coordinates": {
                str(c.divisor): {
                    "coeffs": [f"{x.numerator}/{x.denominator}" for x in c.coeffs],
                    "degree": c.degree,
                    "holdout_ok": c.holdout_ok,
                }
                for c in self.coordinates
            },
        }


def polynomial_fit(
    template: DiagramTemplate,
    delta: int,
    fit_ws: Sequence[int],
    holdout_ws: Sequence[int],
    chamber: tuple[int, int] | None = None,
) -> PolyFitReport:
    """Exact polynomial identification of the per-template invariant.

    Interpolates each projector coordinate of w -> invariant on the fit
    points of the two-end profile (w, -w), checks the interpolant's degree
    against the structural bound (monomial degree plus flow dimension), and
    validates it exactly on the held-out points.
    """
    if chamber is not None:
        mod, res = chamber
        bad = [w for w in (*fit_ws, *holdout_ws) if w % mod != res]
        if bad:
            raise ValueError(f"samples {bad} lie outside chamber {chamber}")
    bound = template.monomial_degree + flow_degrees_of_freedom(template)

    def coords_at(w: int) -> dict[int, Fraction]:
        value = invariant_by_template(
            template, TangencyProfile((w, -w)), delta
        )
        return theta_coordinates(value)

    fit_data = {w: coords_at(w) for w in fit_ws}
    holdout_data = {w: coords_at(w) for w in holdout_ws}
    fits = []
    ok = True
    for d in divisors(delta):
        pts = [(w, fit_data[w].get(d, Fraction(0))) for w in fit_ws]
        coeffs = interpolate(pts)
        degree = poly_degree(coeffs)
        good = degree <= bound and all(
            poly_eval(coeffs, w) == holdout_data[w].get(d, Fraction(0))
            for w in holdout_ws
        )
        ok = ok and good
        fits.append(
            CoordinateFit(
                divisor=d,
                coeffs=tuple(coeffs),
                degree=degree,
                holdout_ok=good,
            )
        )
    return PolyFitReport(
        ok=ok,
        delta=delta,
        chamber=chamber,
        degree_bound=bound,
        fit_points=tuple(fit_ws),
        holdout_points=tuple(holdout_ws),
        coordinates=tuple(fits),
    )
