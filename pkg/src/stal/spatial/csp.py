"""Qualitative constraint networks and their consistency checks."""
from __future__ import annotations

from typing import Hashable, Iterable

from ..errors import AlgebraError
from . import kernel
from .algebra import QualitativeAlgebra, Relation


class QCSP:
    """A binary qualitative CSP with one stored constraint per unordered pair.

    Adding ``r(y, x)`` when ``(x, y)`` is already stored intersects the
    converse of ``r`` into the stored entry.
    """

    def __init__(self, algebra: QualitativeAlgebra, variables: Iterable[Hashable] = ()):
        if not algebra.is_binary:
            raise AlgebraError(f"{algebra.name}: only binary algebras have a constraint solver")
        self.algebra = algebra
        self._vars: dict[Hashable, int] = {}
        self.constraints: dict[tuple, int] = {}
        for v in variables:
            self.add_variable(v)

    @property
    def variables(self) -> list:
        return list(self._vars)

    def add_variable(self, v) -> None:
        if v not in self._vars:
            self._vars[v] = len(self._vars)

    def add(self, x, y, relation: Relation | int) -> None:
        mask = relation.mask if isinstance(relation, Relation) else relation
        if isinstance(relation, Relation) and relation.algebra != self.algebra:
            raise AlgebraError(f"relation from {relation.algebra.name} in a {self.algebra.name} network")
        self.add_variable(x)
        self.add_variable(y)
        if (y, x) in self.constraints and x != y:
            self.constraints[(y, x)] &= self.algebra.converse_mask[mask]
        elif (x, y) in self.constraints:
            self.constraints[(x, y)] &= mask
        else:
            self.constraints[(x, y)] = mask

    def get(self, x, y) -> Relation:
        alg = self.algebra
        if (x, y) in self.constraints:
            m = self.constraints[(x, y)]
            if x == y:
                m &= alg.mask([alg.identity])
            return Relation(alg, m)
        if (y, x) in self.constraints:
            return Relation(alg, alg.converse_mask[self.constraints[(y, x)]])
        if x == y:
            return alg.identity_relation()
        return alg.full()

    def copy(self) -> "QCSP":
        out = QCSP(self.algebra, self._vars)
        out.constraints = dict(self.constraints)
        return out

    def __len__(self):
        return len(self.constraints)

    def __repr__(self):
        return f"QCSP({self.algebra.name}, {len(self._vars)} vars, {len(self.constraints)} constraints)"

    def to_matrix(self) -> list[int]:
        alg = self.algebra
        n = len(self._vars)
        ident = alg.mask([alg.identity])
        m = [alg.full_mask] * (n * n)
        for i in range(n):
            m[i * n + i] = ident
        conv = alg.converse_mask
        for (x, y), mask in self.constraints.items():
            i, j = self._vars[x], self._vars[y]
            if i == j:
                m[i * n + i] &= mask
            else:
                m[i * n + j] &= mask
                m[j * n + i] &= conv[mask]
        return m

    def from_matrix(self, m: list[int]) -> "QCSP":
        """Network over the same variables with every pair constrained by ``m``."""
        out = QCSP(self.algebra, self._vars)
        names = self.variables
        n = len(names)
        for i in range(n):
            for j in range(i + 1, n):
                out.constraints[(names[i], names[j])] = m[i * n + j]
        return out


def path_consistency(csp: QCSP, refine=None) -> QCSP | None:
    """Refine every triangle to a fixpoint; ``None`` when some relation empties."""
    refine = refine or kernel.refine
    alg = csp.algebra
    m = csp.to_matrix()
    out = refine(m, len(csp.variables), alg.comp_by_mask, alg.converse_mask, len(alg.atoms))
    return None if out is None else csp.from_matrix(out)


def _solve_matrix(m, n, alg, refine):
    m = refine(m, n, alg.comp_by_mask, alg.converse_mask, len(alg.atoms))
    if m is None:
        return None
    best = None
    for i in range(n):
        for j in range(i + 1, n):
            r = m[i * n + j]
            if r & (r - 1):
                size = bin(r).count("1")
                if best is None or size < best[0]:
                    best = (size, i, j)
    if best is None:
        return m
    _, i, j = best
    r = m[i * n + j]
    while r:
        low = r & -r
        r ^= low
        trial = list(m)
        trial[i * n + j] = low
        trial[j * n + i] = alg.converse_mask[low]
        found = _solve_matrix(trial, n, alg, refine)
        if found is not None:
            return found
    return None


def csp_solve(csp: QCSP, refine=None) -> dict | None:
    """Return an atomic scenario ``{(x, y): atom}`` for every stored pair, or ``None``.

    Backtracks over atom choices with path consistency at each node, which
    decides consistency for RCC8 and the cardinal direction algebra.
    """
    refine = refine or kernel.refine
    alg = csp.algebra
    names = csp.variables
    n = len(names)
    m = _solve_matrix(csp.to_matrix(), n, alg, refine)
    if m is None:
        return None
    index = {v: i for i, v in enumerate(names)}
    scenario = {}
    for (x, y) in csp.constraints:
        atoms = alg.atoms_of(m[index[x] * n + index[y]])
        scenario[(x, y)] = atoms[0]
    return scenario


def csp_consistent(csp: QCSP, refine=None) -> bool:
    if not csp.constraints:
        return True
    return csp_solve(csp, refine) is not None
