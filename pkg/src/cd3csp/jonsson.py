"""Ideal structure induced by the designated ternary pair.

The derived multiplication x*y = j1(x,y,y) (= j2(x,y,y)) turns each
algebra into a groupoid; an ideal is a subuniverse closed under u*x for
every universe element u.  Ideals drive the first reduction of the solver:
entry systems restricted toward an ideal stay nonempty and compatible, and
in the global regime whole constraint relations can be filtered tuplewise.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .algebra import Algebra, is_simple, subuniverse_closure
from .consistency import KSystem
from .errors import (
    Cd3Violation,
    InvarianceViolation,
    LemmaViolation,
    NotAnIdeal,
    NotSubdirect,
)
from .relation import Relation, is_invariant, is_subdirect, project


def _positions(scope, subset):
    return tuple(scope.index(v) for v in subset)


def mult(alg: Algebra, x: int, y: int) -> int:
    """Derived binary product; the two designated ops must agree on it."""
    a = alg.j1.apply(x, y, y)
    b = alg.j2.apply(x, y, y)
    if a != b:
        raise Cd3Violation(
            f"designated pair disagrees on ({x},{y}): {alg.jonsson[0]}={a}, {alg.jonsson[1]}={b}"
        )
    return a


def jonsson_ideal(alg: Algebra, gens) -> frozenset[int]:
    """Least subuniverse containing gens closed under u*x for all u."""
    current = set(subuniverse_closure(alg, gens))
    changed = bool(current)
    while changed:
        changed = False
        for x in sorted(current):
            for u in alg.universe:
                v = mult(alg, u, x)
                if v not in current:
                    current.add(v)
                    changed = True
        if changed:
            grown = subuniverse_closure(alg, current)
            if grown != current:
                current = set(grown)
    return frozenset(current)


def is_jonsson_trivial(alg: Algebra) -> bool:
    """Every single element generates the whole algebra as an ideal."""
    full = frozenset(alg.universe)
    return all(jonsson_ideal(alg, {b}) == full for b in alg.universe)


def some_proper_ideal(alg: Algebra) -> frozenset[int] | None:
    """Smallest proper singleton-generated ideal (least generator on ties)."""
    full = frozenset(alg.universe)
    best = None
    for b in alg.universe:
        j = jonsson_ideal(alg, {b})
        if j != full and (best is None or len(j) < len(best)):
            best = j
    return best


@dataclass(frozen=True)
class DistanceProfile:
    """Reachability layers of a binary relation, measured on the left domain.

    layers[k] holds the pairs of left-domain elements at distance <= k;
    layers[0] is the diagonal and layers[1] relates elements sharing a
    right neighbour.  dist maps each related pair to its least layer.
    """

    left_size: int
    layers: tuple[frozenset, ...]
    dist: dict

    @property
    def connected(self) -> bool:
        return len(self.dist) == self.left_size**2

    @property
    def diameter(self) -> int:
        return max(self.dist.values(), default=0)

    def distance(self, a: int, c: int) -> int | None:
        return self.dist.get((a, c))


def distance_profile(rel: Relation) -> DistanceProfile:
    """Layered distances between left-domain elements of a binary relation."""
    if rel.arity != 2:
        raise ValueError("distance profile needs a binary relation")
    n = rel.sizes[0]
    diagonal = frozenset((a, a) for a in range(n))
    by_right: dict[int, set] = {}
    for a, b in rel.tuples:
        by_right.setdefault(b, set()).add(a)
    step = set()
    for group in by_right.values():
        for a in group:
            for c in group:
                step.add((a, c))
    step = frozenset(step)
    layers = [diagonal, step]
    while True:
        prev = layers[-1]
        nxt = set(prev)
        for a, e in prev:
            for e2, c in step:
                if e == e2:
                    nxt.add((a, c))
        nxt = frozenset(nxt)
        if nxt == prev:
            break
        layers.append(nxt)
    dist = {}
    for k, layer in enumerate(layers):
        for p in layer:
            if p not in dist:
                dist[p] = k
    return DistanceProfile(n, tuple(layers), dist)


@dataclass(frozen=True)
class BinaryClassification:
    kind: str  # "full" or "hom_graph"
    hom: tuple[int, ...] | None = None


def classify_binary(rel: Relation, alg_a: Algebra, alg_b: Algebra) -> BinaryClassification:
    """Shape of a subdirect invariant relation under a simple ideal-free left factor.

    Either the full product, or the graph of an onto homomorphism from the
    right factor to the left one.  Anything else raises LemmaViolation.
    """
    if rel.arity != 2 or rel.sizes != (alg_a.size, alg_b.size):
        raise ValueError("relation shape does not match the two algebras")
    if not is_simple(alg_a):
        raise ValueError("left factor must be simple")
    if not is_jonsson_trivial(alg_a):
        raise ValueError("left factor must have no proper ideal")
    if not is_subdirect(rel, (alg_a, alg_b)):
        raise NotSubdirect("classification needs a subdirect relation")
    if not is_invariant(rel, (alg_a, alg_b)):
        raise InvarianceViolation("classification needs an invariant relation")

    if len(rel) == alg_a.size * alg_b.size:
        return BinaryClassification("full")

    hom = [None] * alg_b.size
    for a, b in rel.tuples:
        if hom[b] is not None:
            raise LemmaViolation(
                f"relation is neither full nor functional: right element {b} has two left matches"
            )
        hom[b] = a
    if any(h is None for h in hom):
        raise LemmaViolation("relation is not subdirect on the right factor")
    if set(hom) != set(alg_a.universe):
        raise LemmaViolation("functional relation is not onto the left factor")
    for name in alg_a.op_names():
        fa, fb = alg_a.op(name), alg_b.op(name)
        for args in itertools.product(alg_b.universe, repeat=fb.arity):
            if hom[fb.apply(*args)] != fa.apply(*(hom[x] for x in args)):
                raise LemmaViolation(
                    f"functional relation does not commute with {name} at {args}"
                )
    return BinaryClassification("hom_graph", tuple(hom))


@dataclass(frozen=True)
class IdealReduction:
    """Ideal-restricted entry relations on all level-size variable sets."""

    coord: int
    ideal: frozenset
    mode: str
    level: int
    lamj: dict

    def entry(self, subset) -> Relation:
        return self.lamj[tuple(subset)]

    def derived(self, subset) -> Relation:
        """Restriction projected down to a smaller variable set."""
        subset = tuple(subset)
        if subset in self.lamj:
            return self.lamj[subset]
        for key in sorted(self.lamj):
            if set(subset) <= set(key):
                return project(self.lamj[key], _positions(key, subset))
        raise KeyError(subset)


def build_lambda_J(
    system: KSystem,
    coord: int,
    ideal,
    algebra: Algebra,
    mode: str = "global",
) -> IdealReduction:
    """Restrict every level-size entry toward an ideal at one coordinate.

    Sets containing the coordinate are filtered directly; the others keep
    the tuples whose one-variable-removed projections extend into the
    already-filtered sets through the coordinate.  The construction is
    guaranteed to leave every entry nonempty, projecting exactly onto the
    ideal at the coordinate, with all pairwise projections compatible;
    failures raise LemmaViolation.
    """
    ideal = frozenset(ideal)
    if not ideal or not ideal < frozenset(algebra.universe):
        raise NotAnIdeal(f"{set(ideal)} is not a proper nonempty subset")
    if jonsson_ideal(algebra, ideal) != ideal:
        raise NotAnIdeal(f"{set(ideal)} is not closed as an ideal")
    level = system.level
    if level < 2:
        raise ValueError("entry system must have level at least 2")
    if not (0 <= coord < system.nvars):
        raise ValueError(f"coordinate {coord} out of range")
    if mode not in ("local", "global"):
        raise ValueError(f"unknown mode {mode!r}")
    for I in itertools.combinations(range(system.nvars), level):
        if I not in system.entries:
            raise ValueError(f"entry system is missing the set {I}")

    level_sets = system.level_sets()
    lamj: dict = {}
    for I in level_sets:
        if coord in I:
            c = I.index(coord)
            entry = system.entry(I)
            lamj[I] = Relation(
                entry.sizes, tuple(t for t in entry.tuples if t[c] in ideal)
            )
    for I in level_sets:
        if coord in I:
            continue
        entry = system.entry(I)
        conditions = []
        for i in I:
            rest = tuple(v for v in I if v != i)
            through = tuple(sorted((coord,) + rest))
            allowed = {
                tuple(t[p] for p in _positions(through, rest))
                for t in lamj[through].tuples
            }
            conditions.append((_positions(I, rest), allowed))
        kept = tuple(
            t
            for t in entry.tuples
            if all(tuple(t[p] for p in pos) in allowed for pos, allowed in conditions)
        )
        lamj[I] = Relation(entry.sizes, kept)

    for I in level_sets:
        if lamj[I].is_empty:
            raise LemmaViolation(f"ideal restriction emptied the entry on {I}")
        if coord in I:
            c = I.index(coord)
            seen = {t[c] for t in lamj[I].tuples}
            if seen != ideal:
                raise LemmaViolation(
                    f"entry on {I} projects onto {seen} at the coordinate, expected {set(ideal)}"
                )
    for I, K in itertools.combinations(level_sets, 2):
        shared = tuple(sorted(set(I) & set(K)))
        if not shared:
            continue
        pi = project(lamj[I], _positions(I, shared))
        pk = project(lamj[K], _positions(K, shared))
        if pi != pk:
            raise LemmaViolation(
                f"restricted entries on {I} and {K} disagree on {shared}"
            )
    return IdealReduction(coord, ideal, mode, level, lamj)


def reduce_constraint_RJ(
    rel: Relation, scope, reduction: IdealReduction, algs=None
) -> Relation:
    """Keep the tuples whose level-size projections all lie in the
    restricted entries.  Valid in the global regime, where the level is at
    least the squared maximum domain size."""
    if reduction.mode != "global":
        raise ValueError("tuplewise constraint filtering needs global mode")
    scope = tuple(scope)
    if len(scope) != rel.arity:
        raise ValueError("scope length must match relation arity")
    level = reduction.level
    checks = [
        (_positions(scope, I), reduction.lamj[I])
        for I in itertools.combinations(scope, level)
    ]
    kept = tuple(
        t
        for t in rel.tuples
        if all(tuple(t[p] for p in pos) in lam for pos, lam in checks)
    )
    out = Relation(rel.sizes, kept)
    if out.is_empty:
        raise LemmaViolation(f"constraint on {scope} emptied under the ideal filter")
    for pos, lam in checks:
        got = {tuple(t[p] for p in pos) for t in kept}
        if got != set(lam.tuples):
            raise LemmaViolation(
                f"filtered constraint on {scope} does not project back onto a restricted entry"
            )
    if algs is not None and not is_invariant(out, algs):
        raise LemmaViolation(
            f"filtered constraint on {scope} is not preserved by the domain operations"
        )
    return out
