"""Grid-world model of RCC8 and a point model of the cardinal directions.

A region is a nonempty set of closed unit cells on an ``n`` by ``n`` grid,
stored as a bitmask.  Two cells are connected when their closures meet,
i.e. when they are 8-neighbours.  With the grid sitting in the plane, a
cell on the grid border touches the outside of every region.

Small grids can only under-approximate composition: an atom missing from
the observed triples may still be in the table.  So the oracle refutes
table over-claims and witnesses membership, never completeness.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from functools import lru_cache

from ..spatial.algebra import QualitativeAlgebra, load_algebra


@dataclass(frozen=True)
class GridRegion:
    n: int
    cells: int          # bit r*n + c set when cell (r, c) belongs to the region

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("grid size must be positive")
        if self.cells <= 0 or self.cells >> (self.n * self.n):
            raise ValueError("a region is a nonempty set of cells inside the grid")

    @classmethod
    def rect(cls, n: int, r0: int, c0: int, r1: int, c1: int) -> "GridRegion":
        """Cells with ``r0 <= r <= r1`` and ``c0 <= c <= c1``."""
        bits = 0
        for r in range(r0, r1 + 1):
            for c in range(c0, c1 + 1):
                bits |= 1 << (r * n + c)
        return cls(n, bits)

    def __or__(self, other: "GridRegion") -> "GridRegion":
        return GridRegion(self.n, self.cells | other.cells)

    def cell_list(self):
        return [(i // self.n, i % self.n) for i in range(self.n * self.n) if self.cells >> i & 1]


@lru_cache(maxsize=64)
def _dilation_table(n: int) -> tuple[int, ...]:
    table = []
    for i in range(n * n):
        r, c = divmod(i, n)
        m = 0
        for dr in (-1, 0, 1):
            for dc in (-1, 0, 1):
                rr, cc = r + dr, c + dc
                if 0 <= rr < n and 0 <= cc < n:
                    m |= 1 << (rr * n + cc)
        table.append(m)
    return tuple(table)


@lru_cache(maxsize=64)
def _border(n: int) -> int:
    m = 0
    for i in range(n * n):
        r, c = divmod(i, n)
        if r in (0, n - 1) or c in (0, n - 1):
            m |= 1 << i
    return m


def _dilate(bits: int, n: int) -> int:
    table = _dilation_table(n)
    out, i = 0, 0
    while bits:
        if bits & 1:
            out |= table[i]
        bits >>= 1
        i += 1
    return out


def _inside_interior(a: GridRegion, b: GridRegion) -> bool:
    """Whether the closure of ``a`` avoids the boundary of ``b``."""
    n = a.n
    if a.cells & _border(n):
        # border cells touch the unbounded outside, which is never part of b
        return False
    return _dilate(a.cells, n) & ~b.cells == 0


def rcc8_relation(a: GridRegion, b: GridRegion) -> str:
    """The RCC8 atom holding between two grid regions."""
    if a.n != b.n:
        raise ValueError("regions live on different grids")
    n = a.n
    facts = []
    if a.cells == b.cells:
        facts.append("EQ")
    overlap = a.cells & b.cells
    if not overlap:
        touching = _dilate(a.cells, n) & b.cells
        facts.append("EC" if touching else "DC")
    elif a.cells != b.cells:
        a_in_b = a.cells & ~b.cells == 0
        b_in_a = b.cells & ~a.cells == 0
        if a_in_b:
            facts.append("NTPP" if _inside_interior(a, b) else "TPP")
        elif b_in_a:
            facts.append("NTPPi" if _inside_interior(b, a) else "TPPi")
        else:
            facts.append("PO")
    assert len(facts) == 1, facts
    return facts[0]


def region_catalog(n: int = 8, seed: int = 0, extra: int = 40) -> list[GridRegion]:
    """Deterministic catalog: every rectangle up to size 3 at a few anchors plus random unions."""
    rng = random.Random(seed)
    rects = []
    for r0 in range(0, n, 2):
        for c0 in range(0, n, 2):
            for h in (1, 2, 3):
                for w in (1, 2, 3):
                    if r0 + h <= n and c0 + w <= n:
                        rects.append(GridRegion.rect(n, r0, c0, r0 + h - 1, c0 + w - 1))
    big = [GridRegion.rect(n, 1, 1, n - 2, n - 2), GridRegion.rect(n, 0, 0, n - 1, n - 1),
           GridRegion.rect(n, 2, 2, n - 3, n - 3)]
    out = list(dict.fromkeys(rects + big))
    for _ in range(extra):
        a, b = rng.sample(rects, 2)
        out.append(a | b)
    return list(dict.fromkeys(out))


def random_region(rng: random.Random, n: int = 8) -> GridRegion:
    """Rectangle or union of two rectangles."""
    def rect():
        r0, r1 = sorted(rng.randrange(n) for _ in range(2))
        c0, c1 = sorted(rng.randrange(n) for _ in range(2))
        return GridRegion.rect(n, r0, c0, r1, c1)
    return rect() if rng.random() < 0.6 else rect() | rect()


def composition_witnesses(triples, algebra: QualitativeAlgebra | None = None):
    """Observed ``(r(a,b), r(b,c)) -> {r(a,c)}`` over region triples."""
    seen: dict[tuple[str, str], set[str]] = {}
    for a, b, c in triples:
        key = (rcc8_relation(a, b), rcc8_relation(b, c))
        seen.setdefault(key, set()).add(rcc8_relation(a, c))
    return seen


def table_violations(algebra: QualitativeAlgebra, observed) -> list[str]:
    """Observed atoms missing from the composition table entry."""
    bad = []
    for (r1, r2), atoms in sorted(observed.items()):
        entry = algebra.compose_masks(algebra.mask([r1]), algebra.mask([r2]))
        for atom in sorted(atoms):
            if not entry & algebra.mask([atom]):
                bad.append(f"{r1};{r2} misses {atom}")
    return bad


def relation_matrix(catalog, relation=rcc8_relation) -> list[list[str]]:
    """``m[i][j]`` is the atom between catalog values ``i`` and ``j``."""
    return [[relation(a, b) for b in catalog] for a in catalog]


def grid_csp_solve(constraints: dict, catalog, relation=rcc8_relation, matrix=None):
    """Search an assignment of catalog values satisfying ``{(x, y): atoms}``.

    Plain backtracking with forward checking over catalog indices.
    Returns ``var -> value`` or ``None`` when the catalog admits none.
    """
    matrix = matrix or relation_matrix(catalog, relation)
    variables = sorted({v for pair in constraints for v in pair}, key=repr)
    domains = {v: set(range(len(catalog))) for v in variables}
    for (x, y), atoms in constraints.items():
        if x == y:
            domains[x] = {i for i in domains[x] if matrix[i][i] in atoms}
    arcs: dict = {v: [] for v in variables}
    for (x, y), atoms in constraints.items():
        if x != y:
            arcs[x].append((y, atoms, True))
            arcs[y].append((x, atoms, False))

    def go(doms, i):
        if i == len(variables):
            return {v: next(iter(doms[v])) for v in variables}
        v = variables[i]
        for val in sorted(doms[v]):
            nd = dict(doms)
            nd[v] = {val}
            dead = False
            for w, atoms, forward in arcs[v]:
                if forward:
                    keep = {j for j in nd[w] if matrix[val][j] in atoms}
                else:
                    keep = {j for j in nd[w] if matrix[j][val] in atoms}
                if not keep:
                    dead = True
                    break
                nd[w] = keep
            if not dead:
                found = go(nd, i + 1)
                if found is not None:
                    return found
        return None

    found = go(domains, 0)
    return None if found is None else {v: catalog[i] for v, i in found.items()}


# -- cardinal directions on points ---------------------------------------------

CDA_POINTS = tuple(itertools.product(range(3), range(3)))


def cda_relation(a: tuple[int, int], b: tuple[int, int]) -> str:
    """Cardinal direction of point ``a`` relative to point ``b`` (x east, y north)."""
    dx = (a[0] > b[0]) - (a[0] < b[0])
    dy = (a[1] > b[1]) - (a[1] < b[1])
    return {(0, 1): "N", (1, 1): "NE", (1, 0): "E", (1, -1): "SE", (0, -1): "S",
            (-1, -1): "SW", (-1, 0): "W", (-1, 1): "NW", (0, 0): "EQ"}[(dx, dy)]


@dataclass(frozen=True)
class Domain:
    """Finite value catalog with a relation function, for the model enumerator."""

    values: tuple
    relation: object


def rcc8_domain(n: int = 6) -> Domain:
    """Six regions realising every RCC8 atom against the first."""
    base = GridRegion.rect(n, 1, 1, 4, 4)
    vals = (base, GridRegion.rect(n, 2, 2, 3, 3), GridRegion.rect(n, 1, 1, 2, 2),
            GridRegion.rect(n, 3, 3, 5, 5), GridRegion.rect(n, 1, 5, 2, 5),
            GridRegion.rect(n, 0, 0, 5, 5))
    return Domain(vals, rcc8_relation)


def cda_domain() -> Domain:
    return Domain(CDA_POINTS, cda_relation)


def load_rcc8() -> QualitativeAlgebra:
    return load_algebra("rcc8")


__all__ = [
    "CDA_POINTS", "Domain", "GridRegion", "cda_domain", "cda_relation", "composition_witnesses",
    "grid_csp_solve", "random_region", "relation_matrix", "rcc8_domain", "rcc8_relation", "region_catalog",
    "table_violations",
]
