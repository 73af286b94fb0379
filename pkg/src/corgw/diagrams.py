"""Floor diagrams for curves in a P1-bundle over an elliptic curve.

A floor diagram is a totally ordered, weighted, oriented graph recording
the combinatorial type of a curve in a maximal degeneration of E x P1:
floors are genus-one components carrying a class label a_V, flat vertices
are marked genus-zero fiber components, and infinite ends carry the
tangency profile.  One marked point lives on every floor or flat vertex,
so a diagram for genus g and an n-end profile has exactly n + g - 1
ordered levels, one vertex per level.

The correlated invariant is the sum over all such diagrams of a
multiplicity with values in the torsion group algebra: a division-average
of the product of refined divisor sums of the floor labels, times a
monomial in the edge weights.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterator, Union

from .arith import sigma
from .refined import bold_sigma
from .torsion import GroupAlgebraElement

BOTTOM = "B"
TOP = "T"

Endpoint = Union[int, str]


@dataclass(frozen=True)
class Floor:
    """Genus-one level carrying the curve-class label a_v >= 1."""

    a_v: int

    def __post_init__(self) -> None:
        if self.a_v < 1:
            raise ValueError(f"floor label must be >= 1, got {self.a_v}")


@dataclass(frozen=True)
class Flat:
    """Marked genus-zero fiber level; bivalent with equal in/out weight."""


LevelNode = Union[Floor, Flat]


@dataclass(frozen=True)
class Edge:
    """Oriented weighted edge; lo < hi in the order BOTTOM < levels < TOP."""

    lo: Endpoint
    hi: Endpoint
    w: int


@dataclass(frozen=True)
class TangencyProfile:
    """Nonzero integer tangency orders summing to zero."""

    weights: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.weights:
            raise ValueError("profile must be non-empty")
        if any(w == 0 for w in self.weights):
            raise ValueError("profile entries must be non-zero")
        if sum(self.weights) != 0:
            raise ValueError(f"profile must sum to zero, got {self.weights}")

    @property
    def b(self) -> int:
        """Total positive flow b(w)."""
        return sum(w for w in self.weights if w > 0)

    @property
    def sources(self) -> tuple[int, ...]:
        return tuple(sorted(-w for w in self.weights if w < 0))

    @property
    def sinks(self) -> tuple[int, ...]:
        return tuple(sorted(w for w in self.weights if w > 0))

    @property
    def gcd_abs(self) -> int:
        g = 0
        for w in self.weights:
            g = gcd(g, abs(w))
        return g


def _pos(endpoint: Endpoint, n_levels: int) -> int:
    if endpoint == BOTTOM:
        return -1
    if endpoint == TOP:
        return n_levels
    return endpoint


@dataclass(frozen=True)
class FloorDiagram:
    levels: tuple[LevelNode, ...]
    edges: tuple[Edge, ...]

    def __post_init__(self) -> None:
        _structural_check(self)
        # Canonical edge order so that equal diagrams compare equal.
        n = len(self.levels)
        object.__setattr__(
            self,
            "edges",
            tuple(
                sorted(
                    self.edges,
                    key=lambda e: (_pos(e.lo, n), _pos(e.hi, n), e.w),
                )
            ),
        )

    # -- basic derived data -------------------------------------------

    @property
    def floor_indices(self) -> tuple[int, ...]:
        return tuple(i for i, lv in enumerate(self.levels) if isinstance(lv, Floor))

    @property
    def flat_indices(self) -> tuple[int, ...]:
        return tuple(i for i, lv in enumerate(self.levels) if isinstance(lv, Flat))

    @property
    def degree(self) -> int:
        """Curve class in the elliptic direction: sum of floor labels."""
        return sum(self.levels[i].a_v for i in self.floor_indices)

    def profile(self) -> tuple[int, ...]:
        """Induced tangency multiset, positives for sinks, sorted."""
        out = []
        for e in self.edges:
            if e.lo == BOTTOM:
                out.append(-e.w)
            if e.hi == TOP:
                out.append(e.w)
        return tuple(sorted(out))

    def valency(self, i: int) -> int:
        return sum((e.lo == i) + (e.hi == i) for e in self.edges)

    def in_flow(self, i: int) -> int:
        return sum(e.w for e in self.edges if e.hi == i)

    def out_flow(self, i: int) -> int:
        return sum(e.w for e in self.edges if e.lo == i)

    def delta_gcd(self, delta: int) -> int:
        g = delta
        for e in self.edges:
            g = gcd(g, e.w)
        return g

    @property
    def bounded_edges(self) -> tuple[Edge, ...]:
        """Edges with both endpoints at levels."""
        return tuple(
            e for e in self.edges if isinstance(e.lo, int) and isinstance(e.hi, int)
        )

    @property
    def open_edges(self) -> tuple[Edge, ...]:
        """Edges, bounded or not, with no flat endpoint."""
        flats = set(self.flat_indices)
        return tuple(
            e
            for e in self.edges
            if not (e.lo in flats or e.hi in flats)
        )

    # -- graph structure ------------------------------------------------

    def _vertices_and_edges(self):
        """Vertices as tags; each infinite end is its own univalent vertex."""
        verts = [("L", i) for i in range(len(self.levels))]
        pairs = []
        for idx, e in enumerate(self.edges):
            lo = ("L", e.lo) if isinstance(e.lo, int) else ("B", idx)
            hi = ("L", e.hi) if isinstance(e.hi, int) else ("T", idx)
            if lo[0] == "B":
                verts.append(lo)
            if hi[0] == "T":
                verts.append(hi)
            pairs.append((lo, hi))
        return verts, pairs

    def first_betti(self) -> int:
        verts, pairs = self._vertices_and_edges()
        comp = _components(verts, pairs)
        return len(pairs) - len(verts) + len(comp)

    @property
    def genus(self) -> int:
        """Graph genus with floors counted once: b1 + number of floors."""
        return self.first_betti() + len(self.floor_indices)

    def is_connected(self) -> bool:
        verts, pairs = self._vertices_and_edges()
        return len(_components(verts, pairs)) <= 1

    # -- serialization ----------------------------------------------------

    def sorted_edges(self) -> tuple[Edge, ...]:
        n = len(self.levels)
        return tuple(
            sorted(self.edges, key=lambda e: (_pos(e.lo, n), _pos(e.hi, n), e.w))
        )

    def to_json_dict(self) -> dict:
        return {
            "levels": [
                {"kind": "floor", "a": lv.a_v} if isinstance(lv, Floor) else
                {"kind": "flat"}
                for lv in self.levels
            ],
            "edges": [
                {"lo": e.lo, "hi": e.hi, "w": e.w} for e in self.sorted_edges()
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), separators=(",", ":"))

    @classmethod
    def from_json_dict(cls, data: dict) -> "FloorDiagram":
        levels = tuple(
            Floor(lv["a"]) if lv["kind"] == "floor" else Flat()
            for lv in data["levels"]
        )
        edges = tuple(Edge(e["lo"], e["hi"], e["w"]) for e in data["edges"])
        return cls(levels, edges)

    @classmethod
    def from_json(cls, text: str) -> "FloorDiagram":
        return cls.from_json_dict(json.loads(text))


def canonical_key(diagram: FloorDiagram) -> bytes:
    """Injective key on diagrams: level sequence plus sorted edge list."""
    return diagram.to_json().encode()


def _components(verts, pairs) -> dict:
    parent = {v: v for v in verts}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in pairs:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
    groups: dict = {}
    for v in verts:
        groups.setdefault(find(v), []).append(v)
    return groups


def bivalent_contribution(w: int, marked: bool) -> Fraction:
    """Count attached to a bivalent fiber vertex: 1 if marked, 1/w if not.

    Exposed for documentation and tests only; unmarked bivalent vertices are
    never materialized because their 1/w cancels against the weight factors
    of the two edges they would subdivide.
    """
    if w < 1:
        raise ValueError(f"expected w >= 1, got {w}")
    return Fraction(1) if marked else Fraction(1, w)


# -- validation ----------------------------------------------------------


def _structural_check(diagram: FloorDiagram) -> None:
    """Raise on malformed input (bad references, non-positive data)."""
    n = len(diagram.levels)
    if n == 0:
        raise ValueError("diagram has no levels")
    for e in diagram.edges:
        for end in (e.lo, e.hi):
            if isinstance(end, int):
                if not 0 <= end < n:
                    raise ValueError(f"edge endpoint {end} out of range")
            elif end not in (BOTTOM, TOP):
                raise ValueError(f"bad endpoint {end!r}")
        if e.lo == TOP or e.hi == BOTTOM:
            raise ValueError(f"edge {e} oriented against the level order")
        if e.w < 1:
            raise ValueError(f"edge weight must be >= 1, got {e.w}")
        if _pos(e.lo, n) >= _pos(e.hi, n):
            raise ValueError(f"edge {e} must go strictly upward")


def _simple_paths(adj, x, y) -> Iterator[frozenset]:
    """Internal-vertex sets of all simple paths from x to y."""
    stack = [(x, {x})]
    path = []

    def dfs(v, visited):
        if v == y:
            yield frozenset(path)
            return
        for w in adj.get(v, ()):  # deterministic: adj built in sorted order
            if w not in visited:
                if w != y:
                    path.append(w)
                yield from dfs(w, visited | {w})
                if w != y:
                    path.pop()

    yield from dfs(x, {x})


def _has_two_flat_cycle(diagram: FloorDiagram) -> bool:
    """True when some simple cycle passes through two distinct flat vertices."""
    flats = [("L", i) for i in diagram.flat_indices]
    if len(flats) < 2:
        return False
    _, pairs = diagram._vertices_and_edges()
    adj: dict = {}
    for a, b in pairs:
        adj.setdefault(a, set()).add(b)
        adj.setdefault(b, set()).add(a)
    adj = {v: sorted(ws) for v, ws in adj.items()}
    for i in range(len(flats)):
        for j in range(i + 1, len(flats)):
            internals = list(_simple_paths(adj, flats[i], flats[j]))
            for p in range(len(internals)):
                for q in range(p + 1, len(internals)):
                    if not (internals[p] & internals[q]):
                        return True
    return False


def validate(
    diagram: FloorDiagram,
    genus: int,
    degree: int,
    profile: TangencyProfile,
) -> tuple[bool, str | None]:
    """Check every diagram invariant; report the first violated clause.

    Malformed structure (dangling edge references, bad weights) raises;
    everything else returns (False, clause-name).
    """
    _structural_check(diagram)
    n_levels = len(diagram.levels)

    if n_levels != len(profile.weights) + genus - 1:
        return False, "level-count"

    for i in range(n_levels):
        if diagram.in_flow(i) != diagram.out_flow(i):
            return False, f"balancing at level {i}"

    for i in diagram.flat_indices:
        n_in = sum(e.hi == i for e in diagram.edges)
        n_out = sum(e.lo == i for e in diagram.edges)
        if n_in != 1 or n_out != 1:
            return False, f"flat bivalency at level {i}"

    if diagram.profile() != tuple(sorted(profile.weights)):
        return False, "tangency profile"

    b = profile.b
    for gap in range(n_levels + 1):
        crossing = sum(
            e.w
            for e in diagram.edges
            if _pos(e.lo, n_levels) < gap <= _pos(e.hi, n_levels)
        )
        if crossing != b:
            return False, f"cross-flow at gap {gap}"

    if not diagram.is_connected():
        return False, "connectivity"

    if diagram.genus != genus:
        return False, "genus"

    if diagram.degree != degree:
        return False, "class"

    # Forest condition: delete flats (edges to them become stubs); every
    # remaining component must be acyclic with exactly one infinite end.
    flats = set(diagram.flat_indices)
    verts, pairs = diagram._vertices_and_edges()
    keep_verts = [v for v in verts if not (v[0] == "L" and v[1] in flats)]
    keep = set(keep_verts)
    keep_pairs = [(a, b) for a, b in pairs if a in keep and b in keep]
    parent = {v: v for v in keep_verts}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in keep_pairs:
        ra, rb = find(a), find(b)
        if ra == rb:
            return False, "forest: cycle avoiding all flats"
        parent[ra] = rb
    ends_per_root: dict = {}
    for v in keep_verts:
        r = find(v)
        ends_per_root.setdefault(r, 0)
        if v[0] in ("B", "T"):
            ends_per_root[r] += 1
    for r, cnt in ends_per_root.items():
        if cnt != 1:
            return False, "forest: component without a unique infinite end"

    # Every cycle must carry exactly one flat vertex.  Cycles with none are
    # already excluded above; cycles through two or more flats have all
    # their fiber chains pinned by point constraints, leave no gluing
    # parameter, and contribute zero.
    if _has_two_flat_cycle(diagram):
        return False, "cycle through two flat vertices"

    return True, None


# -- multiplicity ----------------------------------------------------------


@lru_cache(maxsize=None)
def _floor_core(delta: int, delta_d: int, floors: tuple[tuple[int, int], ...]):
    """Division-averaged product of refined divisor sums over the floors.

    floors is a multiset of (label, valency) pairs; the product is taken at
    level delta_d and lifted to the ambient level delta by averaging over
    (delta/delta_d)-th roots.
    """
    if delta_d == 1:
        scalar = 1
        for a_v, val in floors:
            scalar *= a_v ** (val - 1) * sigma(a_v)
        core = scalar * GroupAlgebraElement.unit(1)
    else:
        core = GroupAlgebraElement.unit(delta_d)
        for a_v, val in floors:
            core = core * (a_v ** (val - 1) * bold_sigma(delta_d, a_v))
    return core.rebase(delta).divide(delta // delta_d)


def multiplicity(diagram: FloorDiagram, delta: int) -> GroupAlgebraElement:
    """Correlated multiplicity of a floor diagram at refinement level delta.

    The division-average (over delta/delta_D-th roots) of the product over
    floors of a_V^(valency-1) bold_sigma(delta_D, a_V), scaled by the weight
    monomial: bounded edges contribute w_e, and edges without a flat
    endpoint contribute w_e^2 on top.
    """
    if delta < 1:
        raise ValueError(f"expected delta >= 1, got {delta}")
    for w in diagram.profile():
        if w % delta:
            raise ValueError(
                f"profile weight {w} not divisible by delta={delta}"
            )
    delta_d = diagram.delta_gcd(delta)
    floors = tuple(
        sorted((diagram.levels[i].a_v, diagram.valency(i)) for i in diagram.floor_indices)
    )
    core = _floor_core(delta, delta_d, floors)
    scale = 1
    for e in diagram.bounded_edges:
        scale *= e.w
    for e in diagram.open_edges:
        scale *= e.w * e.w
    return core * scale


# -- enumeration -----------------------------------------------------------


def _partitions_desc(m: int, cap: int | None = None) -> Iterator[tuple[int, ...]]:
    """Partitions of m into parts >= 1, decreasing-lex order."""
    cap = m if cap is None else cap
    if m == 0:
        yield ()
        return
    for first in range(min(m, cap), 0, -1):
        for rest in _partitions_desc(m - first, first):
            yield (first,) + rest


def _origin_key(origin) -> int:
    return -1 if origin == BOTTOM else origin


def _compositions_asc(total: int, k: int):
    """Ordered k-tuples of positive integers summing to total, lex ascending."""
    if k == 0:
        if total == 0:
            yield ()
        return
    if k == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - k + 2):
        for rest in _compositions_asc(total - first, k - 1):
            yield (first,) + rest


@lru_cache(maxsize=None)
def _structures(genus: int, weights: tuple[int, ...]) -> tuple[FloorDiagram, ...]:
    """All diagram structures (floor labels stripped to 1) for a profile.

    Level-by-level transfer search: at each of the n + g - 1 levels place a
    flat vertex or a floor, threading the multiset of open upward edges
    (whose total weight always equals b).  Flats are tried before floors
    and flow partitions descend, so discovery order is deterministic.  The
    search tracks connected components of the partial graph and prunes any
    branch whose first Betti number exceeds genus minus the floor count;
    completed candidates still pass through validate, and duplicates are
    removed by canonical key.
    """
    profile = TangencyProfile(weights)
    n_levels = len(profile.weights) + genus - 1
    sinks = tuple(sorted(profile.sinks))
    results: list[FloorDiagram] = []
    seen: set[bytes] = set()

    # Open edge classes: (weight, origin) -> count.  Edges from BOTTOM share
    # the origin tag but each is its own fresh component.
    init_open: dict = {}
    for w in profile.sources:
        init_open[(w, BOTTOM)] = init_open.get((w, BOTTOM), 0) + 1

    def emit(levels_acc, edges_acc, open_cnt):
        tops = []
        for (w, origin), cnt in sorted(
            open_cnt.items(), key=lambda kv: (kv[0][0], _origin_key(kv[0][1]))
        ):
            tops.extend([Edge(origin, TOP, w)] * cnt)
        diagram = FloorDiagram(tuple(levels_acc), tuple(edges_acc) + tuple(tops))
        ok, _ = validate(diagram, genus, len(diagram.floor_indices), profile)
        if not ok:
            return
        key = canonical_key(diagram)
        if key not in seen:
            seen.add(key)
            results.append(diagram)

    def sub_multisets(classes):
        """Non-empty sub-multisets of open classes, deterministic order."""

        def rec(i):
            if i == len(classes):
                yield ()
                return
            (wo, avail) = classes[i]
            for rest in rec(i + 1):
                for take in range(avail + 1):
                    yield ((wo, take),) + rest if take else rest

        for choice in rec(0):
            if choice:
                yield choice

    def weight_multiset(open_cnt):
        return tuple(sorted(w for (w, _o), c in open_cnt.items() for _ in range(c)))

    def search(level, open_cnt, comp_of, next_comp, b1, levels_acc, edges_acc, floors):
        if level == n_levels:
            if b1 == genus - floors and weight_multiset(open_cnt) == sinks:
                emit(levels_acc, edges_acc, open_cnt)
            return
        # With no floors left to place, flats cannot change the weight
        # multiset, which must therefore already match the sinks.
        if floors == genus and weight_multiset(open_cnt) != sinks:
            return
        # Flat vertex: pass one open edge through.  Consuming a flat-emitted
        # edge would create a flat-flat edge, impossible at this level count.
        classes = sorted(open_cnt, key=lambda wo: (wo[0], _origin_key(wo[1])))
        for wo in classes:
            w, origin = wo
            if isinstance(origin, int) and isinstance(levels_acc[origin], Flat):
                continue
            nxt = dict(open_cnt)
            nxt[wo] -= 1
            if not nxt[wo]:
                del nxt[wo]
            nxt[(w, level)] = nxt.get((w, level), 0) + 1
            comp2 = dict(comp_of)
            comp2[level] = next_comp if origin == BOTTOM else comp_of[origin]
            search(
                level + 1,
                nxt,
                comp2,
                next_comp + (origin == BOTTOM),
                b1,
                levels_acc + [Flat()],
                edges_acc + [Edge(origin, level, w)],
                floors,
            )
        # Floor: consume a sub-multiset of open edges, re-emit its flow.
        if floors < genus:
            class_list = sorted(
                open_cnt.items(), key=lambda kv: (kv[0][0], _origin_key(kv[0][1]))
            )
            for consumed in sub_multisets(class_list):
                flow = sum(w * c for (w, _o), c in consumed)
                in_edges = []
                merged = set()
                cycles = 0
                for (w, origin), c in consumed:
                    in_edges.extend([Edge(origin, level, w)] * c)
                    if origin == BOTTOM:
                        continue  # each end edge is a fresh component
                    root = comp_of[origin]
                    if root in merged:
                        cycles += c
                    else:
                        merged.add(root)
                        cycles += c - 1
                b1_new = b1 + cycles
                if b1_new > genus - (floors + 1):
                    continue
                base = dict(open_cnt)
                for (wo, c) in consumed:
                    base[wo] -= c
                    if not base[wo]:
                        del base[wo]
                comp2 = {
                    v: (next_comp if c in merged else c) for v, c in comp_of.items()
                }
                comp2[level] = next_comp
                for parts in _partitions_desc(flow):
                    nxt = dict(base)
                    for p in parts:
                        nxt[(p, level)] = nxt.get((p, level), 0) + 1
                    search(
                        level + 1,
                        nxt,
                        comp2,
                        next_comp + 1,
                        b1_new,
                        levels_acc + [Floor(1)],
                        edges_acc + in_edges,
                        floors + 1,
                    )
        return

    search(0, init_open, {}, 0, 0, [], [], 0)
    return tuple(results)


def enumerate_diagrams(
    genus: int, degree: int, profile: TangencyProfile
) -> list[FloorDiagram]:
    """Every valid floor diagram for the given genus, class and profile.

    Structures (floor labels stripped) are searched once per genus and
    profile; floor labels then run over the compositions of the class,
    which touches no validity clause.  Output order is deterministic:
    structure discovery order, then labels ascending lexicographically.
    """
    if genus < 1:
        raise ValueError(f"expected genus >= 1, got {genus}")
    if degree < 1:
        raise ValueError(f"expected degree >= 1, got {degree}")
    out: list[FloorDiagram] = []
    for struct in _structures(genus, tuple(sorted(profile.weights))):
        idx = struct.floor_indices
        if len(idx) > degree:
            continue
        for labels in _compositions_asc(degree, len(idx)):
            levels = list(struct.levels)
            for i, a_v in zip(idx, labels):
                levels[i] = Floor(a_v)
            out.append(FloorDiagram(tuple(levels), struct.edges))
    return out


@lru_cache(maxsize=None)
def _invariant_cached(
    genus: int, degree: int, weights: tuple[int, ...], delta: int
) -> GroupAlgebraElement:
    profile = TangencyProfile(weights)
    total = GroupAlgebraElement.zero(delta)
    for diagram in enumerate_diagrams(genus, degree, profile):
        total = total + multiplicity(diagram, delta)
    return total


def invariant(
    genus: int, degree: int, profile: TangencyProfile, delta: int
) -> GroupAlgebraElement:
    """Correlated count: sum of multiplicities over all floor diagrams."""
    if delta < 1 or profile.gcd_abs % delta:
        raise ValueError(
            f"delta={delta} must divide the profile gcd {profile.gcd_abs}"
        )
    return _invariant_cached(genus, degree, tuple(sorted(profile.weights)), delta)
