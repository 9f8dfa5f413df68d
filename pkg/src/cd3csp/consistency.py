"""Propagation to a k-minimal fixpoint.

A k-minimal instance satisfies two conditions: every set of at most k
variables is covered by some constraint scope, and any two constraints
agree on projections onto shared variable sets of size at most k.  The
engine materializes an entry relation for every nonempty variable set of
size at most min(k, n) and runs a FIFO worklist over (constraint, subset)
pairs until nothing shrinks.  At the fixpoint each entry equals the
projection of every constraint covering it.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field

from .algebra import restrict
from .errors import EmptyDomain
from .relation import (
    Constraint,
    Instance,
    Relation,
    Signature,
    natural_join,
    project,
)


@dataclass(frozen=True)
class KSystem:
    """Entry relations for all variable sets of size <= min(k, nvars)."""

    k: int
    nvars: int
    entries: dict

    @property
    def level(self) -> int:
        return min(self.k, self.nvars)

    def entry(self, subset) -> Relation:
        return self.entries[tuple(subset)]

    def subsets(self):
        return sorted(self.entries, key=lambda s: (len(s), s))

    def level_sets(self):
        return tuple(s for s in self.subsets() if len(s) == self.level)


@dataclass(frozen=True)
class MinimalizedInstance:
    base: Instance
    system: KSystem
    empty_flag: bool
    certificate: tuple[int, ...] | None = field(default=None)


def _positions(scope, subset):
    return tuple(scope.index(v) for v in subset)


def _intersect(a: Relation, b: Relation) -> Relation:
    if a.sizes != b.sizes:
        raise ValueError("cannot intersect relations of different shapes")
    return Relation(a.sizes, tuple(t for t in a.tuples if t in b))


def k_minimalize(inst: Instance, k: int) -> MinimalizedInstance:
    """Propagate to the k-minimal fixpoint, materializing all entries.

    Constraints sharing a scope are merged by intersection first.  Returns
    empty_flag=True (with the scope that emptied as certificate) as soon as
    any relation runs out of tuples.
    """
    if k < 1:
        raise ValueError("k must be positive")
    n = inst.nvars
    if n == 0:
        raise ValueError("instance has no variables")
    level = min(k, n)
    sizes = inst.sig.sizes

    merged: dict[tuple, Relation] = {}
    for c in inst.constraints:
        if c.scope in merged:
            merged[c.scope] = _intersect(merged[c.scope], c.rel)
        else:
            merged[c.scope] = c.rel
    base_scopes = sorted(merged, key=lambda s: (len(s), s))

    rels: dict = {("b", s): merged[s] for s in base_scopes}
    subsets_by_size = [
        tuple(I)
        for r in range(1, level + 1)
        for I in itertools.combinations(range(n), r)
    ]
    subsets_by_size.sort(key=lambda s: (len(s), s))

    for I in subsets_by_size:
        covers = [s for s in base_scopes if set(I) <= set(s)]
        if covers:
            acc = None
            for s in covers:
                p = project(merged[s], _positions(s, I))
                acc = p if acc is None else _intersect(acc, p)
            rels[("e", I)] = acc
        elif len(I) == 1:
            rels[("e", I)] = Relation.full((sizes[I[0]],))
        else:
            # no covering constraint: join the already-seeded smaller entries
            scope_acc, acc = (I[0],), rels[("e", (I[0],))]
            for v in I[1:]:
                scope_acc, acc = natural_join(acc, scope_acc, rels[("e", (v,))], (v,))
            for r in range(2, len(I)):
                for J in itertools.combinations(I, r):
                    keep = tuple(
                        t
                        for t in acc.tuples
                        if tuple(t[I.index(w)] for w in J) in rels[("e", J)]
                    )
                    acc = Relation(acc.sizes, keep)
            rels[("e", I)] = acc

    cids = [("b", s) for s in base_scopes] + [("e", I) for I in subsets_by_size]
    scope_of = {cid: cid[1] for cid in cids}
    subs: dict = {}
    for cid in cids:
        s = scope_of[cid]
        out = []
        for r in range(1, min(level, len(s)) + 1):
            for I in itertools.combinations(s, r):
                if cid == ("e", I):
                    continue
                out.append(I)
        subs[cid] = out
    cover: dict = {I: [] for I in subsets_by_size}
    for cid in cids:
        s = set(scope_of[cid])
        for I in subsets_by_size:
            if set(I) <= s:
                cover[I].append(cid)

    def finish(empty_scope):
        base = Instance(
            inst.sig,
            tuple(Constraint(s, rels[("b", s)]) for s in base_scopes),
            k,
        )
        system = KSystem(k, n, {I: rels[("e", I)] for I in subsets_by_size})
        return MinimalizedInstance(base, system, empty_scope is not None, empty_scope)

    for s in base_scopes:
        if rels[("b", s)].is_empty:
            return finish(s)

    queue = deque((cid, I) for cid in cids for I in subs[cid])
    pending = set(queue)
    while queue:
        cid, I = queue.popleft()
        pending.discard((cid, I))
        R = rels[cid]
        ekey = ("e", I)
        E = rels[ekey]
        pos = _positions(scope_of[cid], I)
        keep = tuple(t for t in R.tuples if tuple(t[p] for p in pos) in E)
        changed_r = len(keep) < len(R.tuples)
        if changed_r:
            rels[cid] = Relation(R.sizes, keep)
            if not keep:
                return finish(scope_of[cid])
        proj_set = {tuple(t[p] for p in pos) for t in keep}
        changed_e = proj_set != set(E.tuples)
        if changed_e:
            rels[ekey] = Relation(E.sizes, tuple(proj_set))
            if not proj_set:
                return finish(I)

        def push(item):
            if item not in pending:
                pending.add(item)
                queue.append(item)

        if changed_r:
            for J in subs[cid]:
                if J != I:
                    push((cid, J))
        if changed_e:
            for other in cover[I]:
                if other not in (cid, ekey):
                    push((other, I))
            for J in subs[ekey]:
                push((ekey, J))
    return finish(None)


def make_subdirect(mi: MinimalizedInstance):
    """Restrict every domain to its unary entry.

    Returns (instance, maps) where maps[i] sends new element indices of
    variable i back to the elements they came from.  The system stays
    k-minimal: renaming elements is a per-variable bijection.
    """
    if mi.empty_flag:
        raise EmptyDomain("cannot make an emptied system subdirect")
    doms = mi.base.sig.domains
    n = len(doms)
    values = []
    for i in range(n):
        vals = tuple(t[0] for t in mi.system.entry((i,)).tuples)
        if not vals:
            raise EmptyDomain(f"variable {i} has no remaining values")
        values.append(vals)
    if all(len(v) == d.size for v, d in zip(values, doms)):
        return mi, [tuple(range(d.size)) for d in doms]

    new_doms, maps, index = [], [], []
    for i in range(n):
        sub, emb = restrict(doms[i], values[i])
        new_doms.append(sub)
        maps.append(emb)
        index.append({old: new for new, old in enumerate(emb)})

    def remap(rel: Relation, scope) -> Relation:
        new_sizes = tuple(new_doms[v].size for v in scope)
        mapped = tuple(
            tuple(index[v][x] for v, x in zip(scope, t)) for t in rel.tuples
        )
        return Relation(new_sizes, mapped)

    sig = Signature(tuple(new_doms))
    base = Instance(
        sig,
        tuple(Constraint(c.scope, remap(c.rel, c.scope)) for c in mi.base.constraints),
        mi.base.k,
    )
    entries = {I: remap(rel, I) for I, rel in mi.system.entries.items()}
    system = KSystem(mi.system.k, n, entries)
    return MinimalizedInstance(base, system, False, None), maps


def effective_instance(mi: MinimalizedInstance) -> Instance:
    """The instance carrying both refined base constraints and all entries."""
    by_scope: dict[tuple, Relation] = {}
    for c in mi.base.constraints:
        by_scope[c.scope] = (
            _intersect(by_scope[c.scope], c.rel) if c.scope in by_scope else c.rel
        )
    for I, rel in mi.system.entries.items():
        by_scope[I] = _intersect(by_scope[I], rel) if I in by_scope else rel
    scopes = sorted(by_scope, key=lambda s: (len(s), s))
    return Instance(
        mi.base.sig,
        tuple(Constraint(s, by_scope[s]) for s in scopes),
        mi.base.k,
    )


def is_k_minimal(inst: Instance, k: int) -> bool:
    """Check the two defining conditions directly."""
    n = inst.nvars
    level = min(k, n)
    scopes = [c.scope for c in inst.constraints]
    scope_sets = [set(s) for s in scopes]
    for r in range(1, level + 1):
        for I in itertools.combinations(range(n), r):
            if not any(set(I) <= s for s in scope_sets):
                return False
    for a in range(len(scopes)):
        for b in range(a + 1, len(scopes)):
            shared = tuple(sorted(scope_sets[a] & scope_sets[b]))
            if not shared:
                continue
            if len(shared) <= k:
                checks = [shared]
            else:
                checks = list(itertools.combinations(shared, k))
            for I in checks:
                pa = project(inst.constraints[a].rel, _positions(scopes[a], I))
                pb = project(inst.constraints[b].rel, _positions(scopes[b], I))
                if pa != pb:
                    return False
    return True
