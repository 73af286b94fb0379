"""Truncated generating series in the curve-class direction.

Series are exact and normalization-free: a series is just its list of
coefficients for q^1 .. q^N, either plain integers (sigma_series) or
group-algebra elements (GASeries).  Quasi-modularity of the invariant
series is verified structurally: factorization_check rewrites the series
as a sum over weight-stripped diagram templates of division-averaged
products of the building-block series sum_a a^(k) bold_sigma(d, a) q^a,
i.e. exhibits membership in the ring generated by the shifted Eisenstein
blocks sum_a sigma_bar^d(a) q^a.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

from .arith import sigma_bar
from .diagrams import (
    FloorDiagram,
    TangencyProfile,
    enumerate_diagrams,
    invariant,
)
from .refined import bold_sigma, local_invariant
from .torsion import GroupAlgebraElement


@dataclass(frozen=True)
class GASeries:
    """Truncated q-series with group-algebra coefficients for q^1..q^N."""

    delta: int
    coeffs: tuple[GroupAlgebraElement, ...]

    def __post_init__(self) -> None:
        for c in self.coeffs:
            if c.delta != self.delta:
                raise ValueError("coefficient level mismatch")

    @property
    def truncation(self) -> int:
        return len(self.coeffs)

    @classmethod
    def zero(cls, delta: int, truncation: int) -> "GASeries":
        z = GroupAlgebraElement.zero(delta)
        return cls(delta, (z,) * truncation)

    def coefficient(self, a: int) -> GroupAlgebraElement:
        """Coefficient of q^a, 1-indexed."""
        return self.coeffs[a - 1]

    def __add__(self, other: "GASeries") -> "GASeries":
        if self.delta != other.delta or self.truncation != other.truncation:
            raise ValueError("series shape mismatch")
        return GASeries(
            self.delta,
            tuple(x + y for x, y in zip(self.coeffs, other.coeffs)),
        )

    def cauchy(self, other: "GASeries") -> "GASeries":
        """Cauchy product; both factors start at q^1, truncation preserved."""
        if self.delta != other.delta or self.truncation != other.truncation:
            raise ValueError("series shape mismatch")
        n = self.truncation
        z = GroupAlgebraElement.zero(self.delta)
        out = [z] * n
        for i in range(1, n + 1):
            x = self.coeffs[i - 1]
            if not x:
                continue
            for j in range(1, n - i + 1):
                y = other.coeffs[j - 1]
                if y:
                    out[i + j - 1] = out[i + j - 1] + x * y
        return GASeries(self.delta, tuple(out))

    def map_coefficients(self, fn) -> "GASeries":
        mapped = tuple(fn(c) for c in self.coeffs)
        return GASeries(mapped[0].delta if mapped else self.delta, mapped)

    def scale(self, k) -> "GASeries":
        return GASeries(self.delta, tuple(c * k for c in self.coeffs))


def sigma_series(d: int, truncation: int) -> list[int]:
    """Coefficients sigma_bar^d(a) for a = 1..N; index 0 is unused."""
    if d < 1:
        raise ValueError(f"expected d >= 1, got {d}")
    return [0] + [sigma_bar(d, a) for a in range(1, truncation + 1)]


def q_derivative(series):
    """q d/dq: multiply the coefficient of q^a by a."""
    if isinstance(series, GASeries):
        return GASeries(
            series.delta,
            tuple((a + 1) * c for a, c in enumerate(series.coeffs)),
        )
    return [0] + [a * series[a] for a in range(1, len(series))]


def local_series(n: int, w1: int, delta: int, truncation: int) -> GASeries:
    """Series of local correlated counts: coefficient at q^a is
    local_invariant(a, w1, n, delta)."""
    if w1 % delta:
        raise ValueError(f"expected delta | w1, got delta={delta}, w1={w1}")
    return GASeries(
        delta,
        tuple(
            local_invariant(a, w1, n, delta) for a in range(1, truncation + 1)
        ),
    )


def invariant_series(
    genus: int, profile: TangencyProfile, delta: int, truncation: int
) -> GASeries:
    """Series of diagram-summed invariants in the class direction."""
    return GASeries(
        delta,
        tuple(
            invariant(genus, a, profile, delta) for a in range(1, truncation + 1)
        ),
    )


@dataclass(frozen=True)
class TemplateReport:
    template: dict
    weight_monomial: int
    delta_gcd: int


@dataclass(frozen=True)
class FactorizationReport:
    ok: bool
    genus: int
    profile: tuple[int, ...]
    delta: int
    truncation: int
    templates: tuple[TemplateReport, ...]
    mismatch_at: int | None = None


def _strip_labels(diagram: FloorDiagram) -> FloorDiagram:
    """Canonical all-ones representative of the weight-labeled template."""
    from .diagrams import Flat, Floor

    levels = tuple(
        Floor(1) if isinstance(lv, Floor) else Flat() for lv in diagram.levels
    )
    return FloorDiagram(levels, diagram.edges)


def templates_for(genus: int, profile: TangencyProfile) -> list[FloorDiagram]:
    """Weight-carrying templates: diagrams with floor labels stripped to 1.

    A template with F floors is valid for every labeling with a_V >= 1, so
    the all-ones diagrams at class F, F = 1..genus, list each exactly once.
    """
    seen = set()
    out = []
    for n_floors in range(1, genus + 1):
        for diagram in enumerate_diagrams(genus, n_floors, profile):
            rep = _strip_labels(diagram)
            key = rep.to_json()
            if key not in seen:
                seen.add(key)
                out.append(rep)
    return out


def _template_series(
    rep: FloorDiagram, delta: int, truncation: int
) -> tuple[GASeries, TemplateReport]:
    delta_t = rep.delta_gcd(delta)
    w_mon = 1
    for e in rep.bounded_edges:
        w_mon *= e.w
    for e in rep.open_edges:
        w_mon *= e.w * e.w
    prod: GASeries | None = None
    for i in rep.floor_indices:
        val = rep.valency(i)
        block = GASeries(
            delta_t,
            tuple(
                a ** (val - 1) * bold_sigma(delta_t, a)
                for a in range(1, truncation + 1)
            ),
        )
        prod = block if prod is None else prod.cauchy(block)
    assert prod is not None
    lifted = prod.map_coefficients(
        lambda c: c.rebase(delta).divide(delta // delta_t)
    )
    return lifted.scale(w_mon), TemplateReport(
        template=rep.to_json_dict(), weight_monomial=w_mon, delta_gcd=delta_t
    )


def factorization_check(
    genus: int, profile: TangencyProfile, delta: int, truncation: int
) -> FactorizationReport:
    """Verify the per-template factorization of the invariant series.

    Groups diagrams by weight-carrying template, rebuilds each template's
    series as the division-averaged Cauchy product of its per-floor blocks
    scaled by the weight monomial, sums over templates, and requires exact
    equality with the coefficient-by-coefficient diagram sum.
    """
    if delta < 1 or profile.gcd_abs % delta:
        raise ValueError(
            f"delta={delta} must divide the profile gcd {profile.gcd_abs}"
        )
    lhs = GASeries.zero(delta, truncation)
    reports = []
    for rep in templates_for(genus, profile):
        series, report = _template_series(rep, delta, truncation)
        lhs = lhs + series
        reports.append(report)
    rhs = invariant_series(genus, profile, delta, truncation)
    mismatch = None
    for a in range(1, truncation + 1):
        if lhs.coefficient(a) != rhs.coefficient(a):
            mismatch = a
            break
    return FactorizationReport(
        ok=mismatch is None,
        genus=genus,
        profile=tuple(profile.weights),
        delta=delta,
        truncation=truncation,
        templates=tuple(reports),
        mismatch_at=mismatch,
    )


def write_series_csv(series: GASeries, fh) -> None:
    """One row per a; one column per support point; cells are num/den."""
    support = sorted({pt for c in series.coeffs for pt in c.support})
    writer = csv.writer(fh)
    writer.writerow(["a"] + [f"({u},{v})" for u, v in support])
    for a in range(1, series.truncation + 1):
        c = series.coefficient(a)
        row = [str(a)]
        for u, v in support:
            x = c.coefficient(u, v)
            row.append(f"{x.numerator}/{x.denominator}")
        writer.writerow(row)


__all__ = [
    "GASeries",
    "sigma_series",
    "q_derivative",
    "local_series",
    "invariant_series",
    "factorization_check",
    "FactorizationReport",
    "TemplateReport",
    "templates_for",
    "write_series_csv",
]
