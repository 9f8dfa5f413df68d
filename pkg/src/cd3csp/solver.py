"""Decision pipeline for instances over algebras with a two-step chain.

The solver propagates to a k-minimal fixpoint and then shrinks domains
until the instance is directly readable: restrict a domain toward a proper
ideal whenever one exists, otherwise split a non-simple domain through a
maximal congruence, solve the quotient instance recursively and pull one
solution class back.  Once every domain is simple (or one-element) with no
proper ideal, the pairwise entries decompose into bijection graphs and
full products, and a lexicographically least assignment is assembled
classwise.  Every shape the theory guarantees is asserted; a failed
assertion raises LemmaViolation, and a failed final assembly falls back to
exhaustive search with a diagnostics flag on the outcome.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .algebra import (
    Congruence,
    check_cd3,
    is_simple,
    maximal_proper_congruence,
    quotient,
)
from .consistency import (
    MinimalizedInstance,
    effective_instance,
    k_minimalize,
    make_subdirect,
)
from .errors import LemmaViolation, NotCd3
from .jonsson import (
    build_lambda_J,
    classify_binary,
    is_jonsson_trivial,
    reduce_constraint_RJ,
    some_proper_ideal,
)
from .relation import (
    Constraint,
    Instance,
    Relation,
    Signature,
    satisfies,
    scope_algebras,
    validate_invariance,
)


@dataclass(frozen=True)
class SolveOutcome:
    solution: tuple[int, ...] | None
    certificate: tuple[int, ...] | None = None
    fallback: bool = False

    @property
    def sat(self) -> bool:
        return self.solution is not None


@dataclass(frozen=True)
class QuotientPlan:
    """How one non-simple coordinate splits the instance.

    members lists the coordinates tied to the split coordinate by a
    functional pairwise entry; maps sends each member's elements onto the
    split coordinate's quotient labels; thetas records the kernel per
    member (the zero congruence elsewhere).
    """

    coord: int
    members: tuple[int, ...]
    maps: dict
    thetas: dict


@dataclass(frozen=True)
class AlmostTrivialDecomposition:
    """Coordinate classes and the bijections tying each class together."""

    classes: tuple[tuple[int, ...], ...]
    bijections: dict


def brute_force_solve(inst: Instance) -> SolveOutcome:
    """Exhaustive search in lexicographic order; independent of the pipeline."""
    n = inst.nvars
    sizes = inst.sig.sizes
    by_last: dict[int, list] = {}
    for c in inst.constraints:
        by_last.setdefault(max(c.scope), []).append(c)

    assignment = [0] * n

    def extend(v):
        if v == n:
            return True
        for val in range(sizes[v]):
            assignment[v] = val
            ok = all(
                tuple(assignment[u] for u in c.scope) in c.rel
                for c in by_last.get(v, ())
            )
            if ok and extend(v + 1):
                return True
        return False

    if extend(0):
        return SolveOutcome(tuple(assignment))
    return SolveOutcome(None)


def _pair_shape(rel: Relation) -> tuple[str, tuple[int, ...] | None]:
    """Classify a binary relation as a bijection graph or a full product."""
    na, nb = rel.sizes
    if len(rel) == na * nb:
        return "full", None
    if na == nb and len(rel) == na:
        fwd = [None] * na
        back = [None] * nb
        for a, b in rel.tuples:
            if fwd[a] is not None or back[b] is not None:
                return "other", None
            fwd[a] = b
            back[b] = a
        if all(x is not None for x in fwd):
            return "bijection", tuple(fwd)
    return "other", None


def almost_trivial_decomposition(rel: Relation) -> AlmostTrivialDecomposition:
    """Split coordinates into classes glued by bijections, others free.

    Verifies that the relation is exactly the product of its classwise
    diagonal blocks; any mismatch raises LemmaViolation.
    """
    m = rel.arity
    if rel.is_empty:
        raise LemmaViolation("cannot decompose an empty relation")
    shapes = {}
    for i, j in itertools.combinations(range(m), 2):
        pair = Relation(
            (rel.sizes[i], rel.sizes[j]),
            tuple((t[i], t[j]) for t in rel.tuples),
        )
        shapes[(i, j)] = _pair_shape(pair)
        if shapes[(i, j)][0] == "other":
            raise LemmaViolation(
                f"projection onto coordinates ({i},{j}) is neither a bijection graph nor full"
            )

    parent = list(range(m))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for (i, j), (kind, _) in shapes.items():
        if kind == "bijection":
            parent[find(i)] = find(j)
    groups: dict[int, list] = {}
    for i in range(m):
        groups.setdefault(find(i), []).append(i)
    classes = tuple(tuple(sorted(g)) for g in sorted(groups.values()))

    for cls in classes:
        for i, j in itertools.combinations(cls, 2):
            if shapes[(i, j)][0] != "bijection":
                raise LemmaViolation(
                    f"coordinates ({i},{j}) fall in one class but are not glued by a bijection"
                )
    for ca, cb in itertools.combinations(classes, 2):
        for i in ca:
            for j in cb:
                key = (i, j) if i < j else (j, i)
                if shapes[key][0] != "full":
                    raise LemmaViolation(
                        f"coordinates {key} fall in different classes but are not free"
                    )

    bijections = {}
    for cls in classes:
        anchor = cls[0]
        bijections[(anchor, anchor)] = tuple(range(rel.sizes[anchor]))
        for j in cls[1:]:
            bijections[(anchor, j)] = shapes[(anchor, j)][1]

    expected = set()
    choices = [range(rel.sizes[cls[0]]) for cls in classes]
    for combo in itertools.product(*choices):
        t = [None] * m
        for cls, aval in zip(classes, combo):
            anchor = cls[0]
            for j in cls:
                t[j] = bijections[(anchor, j)][aval]
        expected.add(tuple(t))
    if expected != set(rel.tuples):
        raise LemmaViolation("relation is not the product of its classwise blocks")
    return AlmostTrivialDecomposition(classes, bijections)


def base_case_solve(mi: MinimalizedInstance) -> tuple[int, ...]:
    """Assemble the least assignment of an ideal-free, simple-domain system.

    Anchors every bijection class at value 0 and propagates through the
    pairwise entries, then checks the result against every relation in the
    system.  Raises LemmaViolation when the entries do not decompose or the
    assembled assignment misses a relation.
    """
    doms = mi.base.sig.domains
    n = len(doms)
    for i, a in enumerate(doms):
        if a.size >= 2 and not (is_simple(a) and is_jonsson_trivial(a)):
            raise ValueError(f"domain {i} is not simple with trivial ideal structure")
    if mi.empty_flag:
        raise ValueError("cannot assemble from an emptied system")
    if n == 1:
        return (mi.system.entry((0,)).tuples[0][0],)

    shapes = {}
    for i, j in itertools.combinations(range(n), 2):
        shapes[(i, j)] = _pair_shape(mi.system.entry((i, j)))
        if shapes[(i, j)][0] == "other":
            raise LemmaViolation(
                f"pair entry ({i},{j}) is neither a bijection graph nor full"
            )

    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for (i, j), (kind, _) in shapes.items():
        if kind == "bijection":
            parent[find(i)] = find(j)
    groups: dict[int, list] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)

    for g in groups.values():
        for i, j in itertools.combinations(sorted(g), 2):
            if shapes[(i, j)][0] != "bijection":
                raise LemmaViolation(
                    f"variables ({i},{j}) share a class without a bijection entry"
                )
    for ga, gb in itertools.combinations(sorted(map(tuple, groups.values())), 2):
        for i in ga:
            for j in gb:
                key = (i, j) if i < j else (j, i)
                if shapes[key][0] != "full":
                    raise LemmaViolation(
                        f"variables {key} sit in different classes but are constrained"
                    )

    assignment = [None] * n
    for g in sorted(groups.values()):
        anchor = min(g)
        assignment[anchor] = 0
        for j in sorted(g):
            if j == anchor:
                continue
            assignment[j] = shapes[(anchor, j)][1][0]

    sol = tuple(assignment)
    for c in mi.base.constraints:
        if tuple(sol[v] for v in c.scope) not in c.rel:
            raise LemmaViolation(
                f"assembled assignment violates the constraint on {c.scope}"
            )
    for I, rel in mi.system.entries.items():
        if tuple(sol[v] for v in I) not in rel:
            raise LemmaViolation(f"assembled assignment violates the entry on {I}")
    return sol


def _identity_maps(mi: MinimalizedInstance):
    return [tuple(range(a.size)) for a in mi.base.sig.domains]


def _compose_maps(outer, inner):
    return [tuple(o[x] for x in i) for o, i in zip(outer, inner)]


def reduce_to_ideal(mi: MinimalizedInstance, coord: int, ideal, mode: str):
    """Shrink one domain onto a proper ideal and re-minimalize.

    Returns (instance, maps).  The restricted system is guaranteed to stay
    nonempty with the coordinate's domain landing exactly on the ideal.
    """
    doms = mi.base.sig.domains
    red = build_lambda_J(mi.system, coord, ideal, doms[coord], mode)
    level = red.level

    new_constraints = []
    for c in mi.base.constraints:
        if len(c.scope) < level:
            new_constraints.append(Constraint(c.scope, red.derived(c.scope)))
        elif len(c.scope) == level:
            new_constraints.append(Constraint(c.scope, red.entry(c.scope)))
        elif mode == "global":
            filtered = reduce_constraint_RJ(
                c.rel, c.scope, red, scope_algebras(mi.base, c.scope)
            )
            new_constraints.append(Constraint(c.scope, filtered))
        else:
            raise ValueError(
                f"scope {c.scope} exceeds the entry level; local mode cannot filter it"
            )
    covered = {c.scope for c in new_constraints}
    for I in mi.system.level_sets():
        if I not in covered:
            new_constraints.append(Constraint(I, red.entry(I)))

    inst = Instance(mi.base.sig, tuple(new_constraints), mi.base.k)
    refined = k_minimalize(inst, mi.system.k)
    if refined.empty_flag:
        raise LemmaViolation(
            f"system emptied while restricting variable {coord} to {set(ideal)}"
        )
    shrunk, maps = make_subdirect(refined)
    if set(maps[coord]) != set(ideal):
        raise LemmaViolation(
            f"variable {coord} landed on {set(maps[coord])}, expected {set(ideal)}"
        )
    return shrunk, maps


def quotient_reduce(mi: MinimalizedInstance, coord: int):
    """Split through a maximal congruence on one non-simple domain.

    Classifies every pairwise entry against the quotient: coordinates tied
    by a functional shape join the split (their kernel is pulled in), the
    rest stay untouched.  Returns the plan and the quotient instance.
    """
    doms = mi.base.sig.domains
    alg = doms[coord]
    if alg.size < 2 or is_simple(alg):
        raise ValueError(f"domain {coord} has no proper congruence to split on")
    for i, a in enumerate(doms):
        if not is_jonsson_trivial(a):
            raise ValueError(f"domain {i} still has a proper ideal; reduce it first")

    theta1 = maximal_proper_congruence(alg)
    if theta1 is None:
        raise ValueError(f"domain {coord} has no proper congruence")
    qalg, proj = quotient(alg, theta1)
    if not is_simple(qalg):
        raise LemmaViolation("quotient by a maximal congruence failed to be simple")
    if not is_jonsson_trivial(qalg):
        raise LemmaViolation("quotient lost ideal-freeness")

    members = [coord]
    maps = {coord: tuple(proj)}
    thetas = {coord: theta1}
    for i in range(len(doms)):
        if i == coord:
            continue
        pair = tuple(sorted((coord, i)))
        entry = mi.system.entry(pair)
        cpos = pair.index(coord)
        ipos = 1 - cpos
        lifted = Relation(
            (qalg.size, doms[i].size),
            tuple((proj[t[cpos]], t[ipos]) for t in entry.tuples),
        )
        shape = classify_binary(lifted, qalg, doms[i])
        if shape.kind == "hom_graph":
            members.append(i)
            maps[i] = shape.hom
            thetas[i] = Congruence(doms[i].size, shape.hom)
        else:
            thetas[i] = Congruence.zero(doms[i].size)

    members = tuple(sorted(members))
    plan = QuotientPlan(coord, members, maps, thetas)

    q_domains = tuple(qalg if i in maps else doms[i] for i in range(len(doms)))
    phi = [maps.get(i, tuple(range(doms[i].size))) for i in range(len(doms))]
    flat = effective_instance(mi)
    q_constraints = tuple(
        Constraint(
            c.scope,
            Relation(
                tuple(q_domains[v].size for v in c.scope),
                tuple(
                    tuple(phi[v][x] for v, x in zip(c.scope, t)) for t in c.rel.tuples
                ),
            ),
        )
        for c in flat.constraints
    )
    q_inst = Instance(Signature(q_domains), q_constraints, mi.base.k)
    return plan, q_inst


def pullback(mi: MinimalizedInstance, plan: QuotientPlan, q_solution):
    """Restrict the split coordinates to one quotient solution class.

    Coordinates outside the plan keep their full domains.  The filtered
    system is guaranteed to stay nonempty and strictly smaller at the
    split coordinate.
    """
    doms = mi.base.sig.domains
    n = len(doms)
    q_solution = tuple(q_solution)
    if len(q_solution) != n:
        raise ValueError("quotient solution has the wrong number of variables")
    allowed = []
    for i in range(n):
        if i in plan.maps:
            block = frozenset(
                a for a in doms[i].universe if plan.maps[i][a] == q_solution[i]
            )
            if not block:
                raise ValueError(f"quotient value at {i} selects an empty class")
            allowed.append(block)
        else:
            allowed.append(frozenset(doms[i].universe))
    if len(allowed[plan.coord]) >= doms[plan.coord].size:
        raise LemmaViolation("pullback did not shrink the split coordinate")

    def filter_rel(rel: Relation, scope) -> Relation:
        kept = tuple(
            t for t in rel.tuples if all(x in allowed[v] for v, x in zip(scope, t))
        )
        if not kept:
            raise LemmaViolation(f"pullback emptied the relation on {scope}")
        return Relation(rel.sizes, kept)

    constraints = [
        Constraint(c.scope, filter_rel(c.rel, c.scope)) for c in mi.base.constraints
    ]
    covered = {c.scope for c in constraints}
    for I, rel in mi.system.entries.items():
        if I not in covered:
            constraints.append(Constraint(I, filter_rel(rel, I)))
    inst = Instance(mi.base.sig, tuple(constraints), mi.base.k)
    refined = k_minimalize(inst, mi.system.k)
    if refined.empty_flag:
        raise LemmaViolation("pullback emptied the system during re-minimalization")
    return make_subdirect(refined)


def choose_k(inst: Instance) -> int:
    arity = max((len(c.scope) for c in inst.constraints), default=1)
    if arity <= 3:
        return 3
    biggest = max(a.size for a in inst.sig.domains)
    return max(3, biggest * biggest)


def choose_mode(inst: Instance, k: int) -> str:
    biggest = max(a.size for a in inst.sig.domains)
    return "global" if k >= biggest * biggest else "local"


def solve(inst: Instance, k: int | None = None, mode: str | None = None) -> SolveOutcome:
    """Decide an instance and produce a witness or an emptiness certificate.

    k defaults to 3 for arity-3 instances and to the squared maximum
    domain size otherwise; mode picks the global tuplewise filter exactly
    when k reaches that square.
    """
    n = inst.nvars
    if n == 0:
        raise ValueError("instance has no variables")
    for i, a in enumerate(inst.sig.domains):
        report = check_cd3(a)
        if not report.ok:
            raise NotCd3(f"domain {i} fails the chain identities: {report.failures}")
    validate_invariance(inst)

    if k is None:
        k = inst.k if inst.k is not None else choose_k(inst)
    if k < 3:
        raise ValueError("the pipeline needs k at least 3")
    biggest = max(a.size for a in inst.sig.domains)
    arity = max((len(c.scope) for c in inst.constraints), default=1)
    if mode is None:
        mode = choose_mode(inst, k)
    if mode not in ("local", "global"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "local" and arity > k:
        raise ValueError(f"local mode cannot handle arity {arity} with k={k}")
    if mode == "global" and k < biggest * biggest:
        raise ValueError(
            f"global mode needs k >= {biggest * biggest} for domains of size {biggest}"
        )

    mi = k_minimalize(inst, k)
    if mi.empty_flag:
        return SolveOutcome(None, certificate=mi.certificate)
    mi, total = make_subdirect(mi)

    def finish(local_sol) -> SolveOutcome:
        sol = tuple(total[i][x] for i, x in enumerate(local_sol))
        if not satisfies(inst, sol):
            raise LemmaViolation("assembled solution fails an original constraint")
        return SolveOutcome(sol)

    if n <= k:
        # at the fixpoint the top entry is exactly the solution set
        top = mi.system.entry(tuple(range(n)))
        if top.is_empty:
            raise LemmaViolation("nonempty system carries an empty top entry")
        return finish(top.tuples[0])

    while True:
        doms = mi.base.sig.domains
        total_size = sum(a.size for a in doms)

        ideal_at = None
        for i, a in enumerate(doms):
            j = some_proper_ideal(a)
            if j is not None:
                ideal_at = (i, j)
                break
        if ideal_at is not None:
            mi, step = reduce_to_ideal(mi, ideal_at[0], ideal_at[1], mode)
            total = _compose_maps(total, step)
            if sum(a.size for a in mi.base.sig.domains) >= total_size:
                raise LemmaViolation("ideal restriction failed to shrink the instance")
            continue

        split_at = None
        for i, a in enumerate(doms):
            if a.size >= 2 and not is_simple(a):
                split_at = i
                break
        if split_at is not None:
            plan, q_inst = quotient_reduce(mi, split_at)
            q_out = solve(q_inst, k=k, mode=mode)
            if q_out.solution is None:
                raise LemmaViolation("quotient instance is unexpectedly unsatisfiable")
            mi, step = pullback(mi, plan, q_out.solution)
            total = _compose_maps(total, step)
            if sum(a.size for a in mi.base.sig.domains) >= total_size:
                raise LemmaViolation("quotient split failed to shrink the instance")
            continue

        try:
            return finish(base_case_solve(mi))
        except LemmaViolation:
            fallback = brute_force_solve(inst)
            return SolveOutcome(fallback.solution, fallback.certificate, fallback=True)
