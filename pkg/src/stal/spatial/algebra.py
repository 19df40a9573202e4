"""Qualitative relation algebras over JEPD atoms.

Relations are sets of atoms stored as bitmasks; bit ``i`` stands for
``algebra.atoms[i]``.  Tables are loaded from JSON and checked against the
relation-algebra axioms before they are handed out.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from itertools import product
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from ..errors import AlgebraError

ALGEBRA_DIR_ENV = "STAL_ALGEBRA_DIR"


@dataclass(frozen=True, eq=False)
class QualitativeAlgebra:
    """A p-ary qualitative algebra.

    Binary algebras carry an identity atom, a converse table and a
    composition table.  A ternary algebra may be declared with its atoms
    only; the constraint solvers refuse it.
    """

    name: str
    atoms: tuple[str, ...]
    arity: int = 2
    identity: str | None = None
    converse_table: Mapping[str, str] = field(default_factory=dict)
    composition_table: Mapping[tuple[str, str], frozenset[str]] = field(default_factory=dict)

    def __post_init__(self):
        if len(set(self.atoms)) != len(self.atoms) or not self.atoms:
            raise AlgebraError(f"{self.name}: atoms must be a nonempty list without repeats")
        index = {a: i for i, a in enumerate(self.atoms)}
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "full_mask", (1 << len(self.atoms)) - 1)
        if self.arity == 2 and self.composition_table:
            self._build_masks(index)

    def _build_masks(self, index):
        n = len(self.atoms)
        conv_atom = [index[self.converse_table[a]] for a in self.atoms]
        comp_atoms = [[0] * n for _ in range(n)]
        for (a, b), out in self.composition_table.items():
            comp_atoms[index[a]][index[b]] = self.mask(out)
        size = 1 << n
        conv_mask = [0] * size
        for m in range(size):
            out = 0
            for i in range(n):
                if m >> i & 1:
                    out |= 1 << conv_atom[i]
            conv_mask[m] = out
        # comp_by_mask[i * size + m] = compose({atoms[i]}, m)
        comp_by_mask = [0] * (n * size)
        for i in range(n):
            row = comp_atoms[i]
            for m in range(1, size):
                low = m & -m
                j = low.bit_length() - 1
                comp_by_mask[i * size + m] = comp_by_mask[i * size + (m ^ low)] | row[j]
        object.__setattr__(self, "converse_atom_index", tuple(conv_atom))
        object.__setattr__(self, "converse_mask", tuple(conv_mask))
        object.__setattr__(self, "comp_atoms", tuple(tuple(r) for r in comp_atoms))
        object.__setattr__(self, "comp_by_mask", tuple(comp_by_mask))

    def __eq__(self, other):
        return isinstance(other, QualitativeAlgebra) and other.name == self.name

    def __hash__(self):
        return hash(("algebra", self.name))

    def __repr__(self):
        return f"QualitativeAlgebra({self.name!r})"

    @property
    def is_binary(self) -> bool:
        return self.arity == 2 and bool(self.composition_table)

    def index(self, atom: str) -> int:
        try:
            return self._index[atom]
        except KeyError:
            raise AlgebraError(f"{atom!r} is not an atom of {self.name}") from None

    def mask(self, atoms: Iterable[str]) -> int:
        m = 0
        for a in atoms:
            m |= 1 << self.index(a)
        return m

    def relation(self, atoms: Iterable[str] | str) -> "Relation":
        if isinstance(atoms, str):
            atoms = [atoms]
        return Relation(self, self.mask(atoms))

    def full(self) -> "Relation":
        return Relation(self, self.full_mask)

    def empty(self) -> "Relation":
        return Relation(self, 0)

    def identity_relation(self) -> "Relation":
        if self.identity is None:
            raise AlgebraError(f"{self.name} has no identity atom")
        return self.relation(self.identity)

    def atoms_of(self, mask: int) -> tuple[str, ...]:
        return tuple(a for i, a in enumerate(self.atoms) if mask >> i & 1)

    def compose_masks(self, m1: int, m2: int) -> int:
        size = 1 << len(self.atoms)
        table = self.comp_by_mask
        out = 0
        while m1:
            low = m1 & -m1
            out |= table[(low.bit_length() - 1) * size + m2]
            m1 ^= low
        return out


@dataclass(frozen=True)
class Relation:
    """A disjunction of atoms of one algebra."""

    algebra: QualitativeAlgebra
    mask: int

    def __post_init__(self):
        if self.mask & ~self.algebra.full_mask or self.mask < 0:
            raise AlgebraError(f"mask {self.mask:#x} outside {self.algebra.name}")

    @property
    def atoms(self) -> tuple[str, ...]:
        return self.algebra.atoms_of(self.mask)

    def is_empty(self) -> bool:
        return self.mask == 0

    def is_atomic(self) -> bool:
        return self.mask != 0 and self.mask & (self.mask - 1) == 0

    def __len__(self):
        return bin(self.mask).count("1")

    def __iter__(self):
        return iter(self.atoms)

    def __contains__(self, atom):
        return bool(self.mask >> self.algebra.index(atom) & 1)

    def _check(self, other):
        if other.algebra != self.algebra:
            raise AlgebraError(f"cannot mix {self.algebra.name} and {other.algebra.name}")

    def __and__(self, other: "Relation") -> "Relation":
        self._check(other)
        return Relation(self.algebra, self.mask & other.mask)

    def __or__(self, other: "Relation") -> "Relation":
        self._check(other)
        return Relation(self.algebra, self.mask | other.mask)

    def __le__(self, other: "Relation") -> bool:
        self._check(other)
        return self.mask & ~other.mask == 0

    def __str__(self):
        return "{" + ",".join(self.atoms) + "}"

    def __repr__(self):
        return f"Relation({self.algebra.name}, {self})"


def complement(r: Relation) -> Relation:
    return Relation(r.algebra, r.algebra.full_mask & ~r.mask)


def converse(r: Relation) -> Relation:
    if not r.algebra.is_binary:
        raise AlgebraError(f"{r.algebra.name} has no converse table")
    return Relation(r.algebra, r.algebra.converse_mask[r.mask])


def compose(r1: Relation, r2: Relation) -> Relation:
    """Weak composition: union of the table entries over all atom pairs."""
    r1._check(r2)
    if not r1.algebra.is_binary:
        raise AlgebraError(f"{r1.algebra.name} has no composition table")
    return Relation(r1.algebra, r1.algebra.compose_masks(r1.mask, r2.mask))


def check_axioms(alg: QualitativeAlgebra) -> list[str]:
    """Return every violated relation-algebra law (empty list when sound)."""
    problems = []
    conv = alg.converse_table
    ident = alg.identity
    for a in alg.atoms:
        if conv.get(conv.get(a)) != a:
            problems.append(f"converse is not an involution at {a}")
    if ident is None or conv.get(ident) != ident:
        problems.append("converse(identity) != identity")
    comp = alg.composition_table
    for a, b in product(alg.atoms, repeat=2):
        if (a, b) not in comp:
            problems.append(f"missing composition entry {a},{b}")
    if problems:
        return problems
    for a in alg.atoms:
        if comp[(ident, a)] != {a}:
            problems.append(f"comp({ident},{a}) != {{{a}}}")
        if comp[(a, ident)] != {a}:
            problems.append(f"comp({a},{ident}) != {{{a}}}")
    for a, b in product(alg.atoms, repeat=2):
        lhs = comp[(a, b)]
        rhs = {conv[c] for c in comp[(conv[b], conv[a])]}
        if lhs != rhs:
            problems.append(f"Peircean law fails at {a},{b}: {sorted(lhs)} vs {sorted(rhs)}")
    return problems


def algebra_from_dict(data: Mapping) -> QualitativeAlgebra:
    try:
        name = data["name"]
        atoms = tuple(data["atoms"])
        arity = int(data.get("arity", 2))
    except (KeyError, TypeError) as exc:
        raise AlgebraError(f"malformed algebra data: {exc}") from None
    if arity != 2:
        return QualitativeAlgebra(name, atoms, arity)
    unknown = set()
    composition = {}
    for key, out in data.get("composition", {}).items():
        a, _, b = key.partition(",")
        composition[(a.strip(), b.strip())] = frozenset(out)
        unknown |= {a.strip(), b.strip(), *out} - set(atoms)
    converse_table = dict(data.get("converse", {}))
    unknown |= (set(converse_table) | set(converse_table.values())) - set(atoms)
    if unknown:
        raise AlgebraError(f"{name}: unknown atoms {sorted(unknown)}")
    alg = QualitativeAlgebra(name, atoms, 2, data.get("identity"), converse_table, composition)
    problems = check_axioms(alg)
    if problems:
        raise AlgebraError(f"{name}: " + "; ".join(problems[:5]))
    return alg


def _data_source(name: str):
    override = os.environ.get(ALGEBRA_DIR_ENV)
    if override:
        return Path(override) / f"{name}.json"
    return resources.files("stal.spatial").joinpath("data", f"{name}.json")


@lru_cache(maxsize=None)
def _load_cached(name: str, override: str | None) -> QualitativeAlgebra:
    source = _data_source(name)
    try:
        text = source.read_text(encoding="utf-8")
    except (FileNotFoundError, OSError):
        raise AlgebraError(f"no data for algebra {name!r}") from None
    return algebra_from_dict(json.loads(text))


def load_algebra(name: str) -> QualitativeAlgebra:
    """Load (and validate) an algebra by name, honouring ``STAL_ALGEBRA_DIR``."""
    return _load_cached(name.lower(), os.environ.get(ALGEBRA_DIR_ENV))


def available_algebras() -> Sequence[str]:
    return ("rcc8", "cda")
