"""Structured text formats for algebras and instances.

Both kinds are JSON documents with an explicit format_version and a kind
tag.  Instance files list each distinct domain algebra once and reference
it per variable by index; relation tuples are plain integer lists.
Generated files may carry a generator stanza naming the drawing algorithm
and seed.
"""

from __future__ import annotations

import json

from .algebra import Algebra, OperationTable
from .errors import EmptyDomain, FormatError
from .relation import Instance, Relation, Signature, constraint_from_raw

FORMAT_VERSION = 1


def _need(obj, key, kind, path):
    if not isinstance(obj, dict):
        raise FormatError(f"{path}: expected an object")
    if key not in obj:
        raise FormatError(f"{path}: missing field {key!r}")
    val = obj[key]
    if kind is int and isinstance(val, bool):
        raise FormatError(f"{path}.{key}: expected an integer")
    if not isinstance(val, kind):
        raise FormatError(f"{path}.{key}: expected {kind.__name__}")
    return val


def _check_header(obj, kind, path):
    ver = _need(obj, "format_version", int, path)
    if ver != FORMAT_VERSION:
        raise FormatError(f"{path}.format_version: unsupported version {ver}")
    got = _need(obj, "kind", str, path)
    if got != kind:
        raise FormatError(f"{path}.kind: expected {kind!r}, got {got!r}")


def algebra_to_obj(alg: Algebra, generator=None) -> dict:
    obj = {
        "format_version": FORMAT_VERSION,
        "kind": "algebra",
        "size": alg.size,
        "ops": [
            {"name": name, "arity": op.arity, "table": list(op.table)}
            for name, op in alg.ops
        ],
        "jonsson": list(alg.jonsson),
    }
    if generator is not None:
        obj["generator"] = generator
    return obj


def algebra_from_obj(obj, path="algebra") -> Algebra:
    _check_header(obj, "algebra", path)
    size = _need(obj, "size", int, path)
    raw_ops = _need(obj, "ops", list, path)
    ops = []
    for i, op in enumerate(raw_ops):
        here = f"{path}.ops[{i}]"
        name = _need(op, "name", str, here)
        arity = _need(op, "arity", int, here)
        table = _need(op, "table", list, here)
        if not all(isinstance(v, int) and not isinstance(v, bool) for v in table):
            raise FormatError(f"{here}.table: entries must be integers")
        try:
            ops.append((name, OperationTable(arity, size, tuple(table))))
        except ValueError as e:
            raise FormatError(f"{here}: {e}") from e
    jonsson = _need(obj, "jonsson", list, path)
    if len(jonsson) != 2 or not all(isinstance(s, str) for s in jonsson):
        raise FormatError(f"{path}.jonsson: expected two operation names")
    try:
        return Algebra(size, tuple(ops), (jonsson[0], jonsson[1]))
    except (ValueError, EmptyDomain) as e:
        raise FormatError(f"{path}: {e}") from e


def instance_to_obj(inst: Instance, generator=None) -> dict:
    domains: list[Algebra] = []
    var_refs = []
    for a in inst.sig.domains:
        for i, seen in enumerate(domains):
            if seen == a:
                var_refs.append(i)
                break
        else:
            domains.append(a)
            var_refs.append(len(domains) - 1)
    obj = {
        "format_version": FORMAT_VERSION,
        "kind": "instance",
        "domains": [algebra_to_obj(a) for a in domains],
        "variables": var_refs,
        "constraints": [
            {"scope": list(c.scope), "tuples": [list(t) for t in c.rel.tuples]}
            for c in inst.constraints
        ],
        "k": inst.k,
    }
    if generator is not None:
        obj["generator"] = generator
    return obj


def instance_from_obj(obj, path="instance") -> Instance:
    _check_header(obj, "instance", path)
    raw_domains = _need(obj, "domains", list, path)
    domains = [
        algebra_from_obj(d, f"{path}.domains[{i}]") for i, d in enumerate(raw_domains)
    ]
    refs = _need(obj, "variables", list, path)
    if not refs:
        raise FormatError(f"{path}.variables: need at least one variable")
    for i, r in enumerate(refs):
        if not isinstance(r, int) or isinstance(r, bool) or not (0 <= r < len(domains)):
            raise FormatError(f"{path}.variables[{i}]: bad domain reference {r!r}")
    var_domains = tuple(domains[r] for r in refs)
    raw_cons = _need(obj, "constraints", list, path)
    constraints = []
    for i, c in enumerate(raw_cons):
        here = f"{path}.constraints[{i}]"
        scope = _need(c, "scope", list, here)
        if not all(isinstance(v, int) and not isinstance(v, bool) for v in scope):
            raise FormatError(f"{here}.scope: entries must be integers")
        if any(not (0 <= v < len(refs)) for v in scope):
            raise FormatError(f"{here}.scope: variable out of range")
        raw_tuples = _need(c, "tuples", list, here)
        tuples = []
        for j, t in enumerate(raw_tuples):
            if not isinstance(t, list) or len(t) != len(scope):
                raise FormatError(f"{here}.tuples[{j}]: expected a list of length {len(scope)}")
            if not all(isinstance(v, int) and not isinstance(v, bool) for v in t):
                raise FormatError(f"{here}.tuples[{j}]: entries must be integers")
            tuples.append(tuple(t))
        sizes = tuple(var_domains[v].size for v in scope)
        try:
            rel = Relation(sizes, tuple(tuples))
            constraints.append(constraint_from_raw(tuple(scope), rel))
        except ValueError as e:
            raise FormatError(f"{here}: {e}") from e
    k = obj.get("k")
    if k is not None and (not isinstance(k, int) or isinstance(k, bool)):
        raise FormatError(f"{path}.k: expected an integer or null")
    try:
        return Instance(Signature(var_domains), tuple(constraints), k)
    except ValueError as e:
        raise FormatError(f"{path}: {e}") from e


def dumps(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def write_algebra(path, alg: Algebra, generator=None) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(algebra_to_obj(alg, generator)))


def write_instance(path, inst: Instance, generator=None) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(instance_to_obj(inst, generator)))


def _load(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as e:
        raise FormatError(f"cannot read {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise FormatError(f"{path}: not valid JSON: {e}") from e


def read_algebra(path) -> Algebra:
    return algebra_from_obj(_load(path), str(path))


def read_instance(path) -> Instance:
    return instance_from_obj(_load(path), str(path))
