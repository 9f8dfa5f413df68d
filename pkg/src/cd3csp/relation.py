"""Relations over products of finite domains, constraints and instances.

A Relation stores its tuples sorted lexicographically with duplicates
removed, so equality is structural.  Scopes are strictly increasing tuples
of variable indices; raw scopes with repeats or out-of-order variables are
normalized by constraint_from_raw.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .algebra import Algebra
from .errors import InvarianceViolation


@dataclass(frozen=True)
class Relation:
    sizes: tuple[int, ...]
    tuples: tuple[tuple[int, ...], ...]
    _set: frozenset = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.sizes:
            raise ValueError("relations need at least one coordinate")
        canon = sorted(set(self.tuples))
        for t in canon:
            if len(t) != len(self.sizes):
                raise ValueError(f"tuple {t} has wrong arity")
            for v, s in zip(t, self.sizes):
                if not (0 <= v < s):
                    raise ValueError(f"tuple {t} out of domain range {self.sizes}")
        object.__setattr__(self, "tuples", tuple(canon))
        object.__setattr__(self, "_set", frozenset(canon))

    def __repr__(self):
        return f"Relation(sizes={self.sizes}, tuples={len(self.tuples)})"

    def __contains__(self, t) -> bool:
        return t in self._set

    def __len__(self) -> int:
        return len(self.tuples)

    @property
    def arity(self) -> int:
        return len(self.sizes)

    @property
    def is_empty(self) -> bool:
        return not self.tuples

    @staticmethod
    def from_tuples(sizes, tuples) -> "Relation":
        return Relation(tuple(sizes), tuple(tuple(t) for t in tuples))

    @staticmethod
    def full(sizes) -> "Relation":
        sizes = tuple(sizes)
        return Relation(sizes, tuple(itertools.product(*(range(s) for s in sizes))))

    @staticmethod
    def empty(sizes) -> "Relation":
        return Relation(tuple(sizes), ())


def project(rel: Relation, positions) -> Relation:
    """Project onto a strictly increasing list of coordinate positions."""
    positions = tuple(positions)
    if not positions:
        raise ValueError("cannot project onto no coordinates")
    if any(not (0 <= p < rel.arity) for p in positions):
        raise ValueError(f"positions {positions} out of range for arity {rel.arity}")
    if any(a >= b for a, b in zip(positions, positions[1:])):
        raise ValueError(f"positions must be strictly increasing, got {positions}")
    sizes = tuple(rel.sizes[p] for p in positions)
    return Relation(sizes, tuple(tuple(t[p] for p in positions) for t in rel.tuples))


def natural_join(r1: Relation, scope1, r2: Relation, scope2):
    """Join two relations on overlapping scopes.

    Returns (scope, relation) where scope is the sorted union of the two
    input scopes.  Shared variables must carry the same domain size.
    """
    scope1, scope2 = tuple(scope1), tuple(scope2)
    if len(scope1) != r1.arity or len(scope2) != r2.arity:
        raise ValueError("scope length must match relation arity")
    size_of = {}
    for scope, rel in ((scope1, r1), (scope2, r2)):
        for v, s in zip(scope, rel.sizes):
            if size_of.setdefault(v, s) != s:
                raise ValueError(f"domain mismatch on shared variable {v}")
    out_scope = tuple(sorted(size_of))
    shared = sorted(set(scope1) & set(scope2))
    pos1 = {v: i for i, v in enumerate(scope1)}
    pos2 = {v: i for i, v in enumerate(scope2)}
    by_key = {}
    for t in r2.tuples:
        key = tuple(t[pos2[v]] for v in shared)
        by_key.setdefault(key, []).append(t)
    out = []
    for t1 in r1.tuples:
        key = tuple(t1[pos1[v]] for v in shared)
        for t2 in by_key.get(key, ()):
            merged = tuple(
                t1[pos1[v]] if v in pos1 else t2[pos2[v]] for v in out_scope
            )
            out.append(merged)
    sizes = tuple(size_of[v] for v in out_scope)
    return out_scope, Relation(sizes, tuple(out))


def is_invariant(rel: Relation, algs) -> bool:
    """Whether every stored operation, applied coordinatewise, maps the
    relation into itself.  One algebra per coordinate, same op names."""
    algs = tuple(algs)
    if len(algs) != rel.arity:
        raise ValueError("one algebra per coordinate required")
    names = algs[0].op_names()
    for a in algs[1:]:
        if a.op_names() != names:
            raise ValueError("coordinate algebras must share operation names")
    for a, s in zip(algs, rel.sizes):
        if a.size != s:
            raise ValueError("coordinate algebra size does not match relation")
    if rel.is_empty:
        return True
    for name in names:
        tables = tuple(a.op(name) for a in algs)
        m = tables[0].arity
        for rows in itertools.product(rel.tuples, repeat=m):
            image = tuple(
                tables[c].apply(*(rows[i][c] for i in range(m)))
                for c in range(rel.arity)
            )
            if image not in rel:
                return False
    return True


def is_subdirect(rel: Relation, algs) -> bool:
    """Every coordinate projection covers its full domain."""
    algs = tuple(algs)
    if len(algs) != rel.arity:
        raise ValueError("one algebra per coordinate required")
    for c, a in enumerate(algs):
        seen = {t[c] for t in rel.tuples}
        if len(seen) != a.size:
            return False
    return True


def generated_subpower(algs, seeds) -> Relation:
    """Close a set of tuples under the coordinatewise operations.

    Semi-naive rounds: each round only applies the operations to argument
    tuples touching at least one element added in the previous round.
    """
    algs = tuple(algs)
    sizes = tuple(a.size for a in algs)
    width = len(algs)
    names = algs[0].op_names() if algs else ()
    for a in algs[1:]:
        if a.op_names() != names:
            raise ValueError("coordinate algebras must share operation names")
    ops = []
    for name in names:
        tables = tuple(a.op(name) for a in algs)
        ops.append((tables[0].arity, tuple(t.table for t in tables)))
    current = set()
    for t in seeds:
        t = tuple(t)
        if len(t) != width:
            raise ValueError(f"seed tuple {t} has wrong arity")
        for v, s in zip(t, sizes):
            if not (0 <= v < s):
                raise ValueError(f"seed tuple {t} out of domain range")
        current.add(t)
    frontier = sorted(current)
    while frontier:
        snapshot = sorted(current)
        added = []
        for m, tables in ops:
            for p in range(m):
                pools = [frontier if i == p else snapshot for i in range(m)]
                for rows in itertools.product(*pools):
                    image = []
                    for c in range(width):
                        idx = 0
                        sc = sizes[c]
                        for r in rows:
                            idx = idx * sc + r[c]
                        image.append(tables[c][idx])
                    image = tuple(image)
                    if image not in current:
                        current.add(image)
                        added.append(image)
        frontier = sorted(set(added))
    return Relation(sizes, tuple(current))


@dataclass(frozen=True)
class Signature:
    """Per-variable domain algebras of an instance."""

    domains: tuple[Algebra, ...]

    def __post_init__(self):
        if not isinstance(self.domains, tuple):
            object.__setattr__(self, "domains", tuple(self.domains))
        names = self.domains[0].op_names() if self.domains else ()
        for a in self.domains[1:]:
            if a.op_names() != names:
                raise ValueError("domains must share operation names")

    @property
    def nvars(self) -> int:
        return len(self.domains)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(a.size for a in self.domains)


@dataclass(frozen=True)
class Constraint:
    scope: tuple[int, ...]
    rel: Relation

    def __post_init__(self):
        if not isinstance(self.scope, tuple):
            object.__setattr__(self, "scope", tuple(self.scope))
        if len(self.scope) != self.rel.arity:
            raise ValueError("scope length must match relation arity")
        if any(a >= b for a, b in zip(self.scope, self.scope[1:])):
            raise ValueError(f"scope must be strictly increasing, got {self.scope}")


def constraint_from_raw(scope, rel: Relation) -> Constraint:
    """Normalize a raw scope: fuse repeated variables, sort the rest."""
    scope = tuple(scope)
    if len(scope) != rel.arity:
        raise ValueError("scope length must match relation arity")
    out_scope = tuple(sorted(set(scope)))
    first_pos = {}
    for i, v in enumerate(scope):
        first_pos.setdefault(v, i)
    for i, v in enumerate(scope):
        if rel.sizes[i] != rel.sizes[first_pos[v]]:
            raise ValueError(f"repeated variable {v} with differing domain sizes")
    kept = []
    for t in rel.tuples:
        if all(t[i] == t[first_pos[v]] for i, v in enumerate(scope)):
            kept.append(tuple(t[first_pos[v]] for v in out_scope))
    sizes = tuple(rel.sizes[first_pos[v]] for v in out_scope)
    return Constraint(out_scope, Relation(sizes, tuple(kept)))


@dataclass(frozen=True)
class Instance:
    """A constraint satisfaction instance over per-variable finite algebras."""

    sig: Signature
    constraints: tuple[Constraint, ...]
    k: int | None = None

    def __post_init__(self):
        if not isinstance(self.constraints, tuple):
            object.__setattr__(self, "constraints", tuple(self.constraints))
        n = self.sig.nvars
        for c in self.constraints:
            if any(not (0 <= v < n) for v in c.scope):
                raise ValueError(f"scope {c.scope} out of range for {n} variables")
            expected = tuple(self.sig.domains[v].size for v in c.scope)
            if c.rel.sizes != expected:
                raise ValueError(
                    f"relation sizes {c.rel.sizes} do not match domains {expected} on {c.scope}"
                )

    @property
    def domains(self) -> tuple[Algebra, ...]:
        return self.sig.domains

    @property
    def nvars(self) -> int:
        return self.sig.nvars


def scope_algebras(inst: Instance, scope) -> tuple[Algebra, ...]:
    return tuple(inst.sig.domains[v] for v in scope)


def validate_invariance(inst: Instance) -> None:
    """Raise unless every constraint relation is preserved by its domains."""
    for c in inst.constraints:
        if not is_invariant(c.rel, scope_algebras(inst, c.scope)):
            raise InvarianceViolation(
                f"constraint on scope {c.scope} is not preserved by the domain operations"
            )


def satisfies(inst: Instance, assignment) -> bool:
    assignment = tuple(assignment)
    if len(assignment) != inst.nvars:
        return False
    for v, a in zip(assignment, inst.sig.domains):
        if not (0 <= v < a.size):
            return False
    for c in inst.constraints:
        if tuple(assignment[v] for v in c.scope) not in c.rel:
            return False
    return True
