"""Shared test helpers: independent oracles and seeded random generators.

The depth oracle here deliberately avoids the library's bitmask search: it
recurses on restricted expression sets and memoizes on the member truth
tables, so agreement with the optimized search is meaningful evidence.
"""

from __future__ import annotations

import json
import random
from importlib import resources

import pytest

from probedepth import expr as ex
from probedepth.expr import And, Const, Expression, ExpressionSet, Not, Or, Var


# --- independent depth oracle ----------------------------------------------

def naive_depth(s: ExpressionSet, _memo=None) -> int:
    """Minimax probe depth by repeated restriction.  Usable up to ~8 support
    variables."""
    if _memo is None:
        _memo = {}
    key = tuple((t.names, t.bits) for t in (ex.truth_table(m) for m in s.members))
    if key in _memo:
        return _memo[key]
    if all(ex.is_constant(m) is not None for m in s.members):
        _memo[key] = 0
        return 0
    live: list[str] = []
    for m in s.members:
        for name in m.support():
            if name not in live:
                live.append(name)
    best = None
    for name in live:
        d = 1 + max(naive_depth(ex.restrict_set(s, name, True), _memo),
                    naive_depth(ex.restrict_set(s, name, False), _memo))
        if best is None or d < best:
            best = d
    _memo[key] = best
    return best


def naive_evasive(s: ExpressionSet) -> bool:
    return naive_depth(s) == s.n


def single(e_text: str) -> ExpressionSet:
    return ex.parse_expressions(e_text)


def all_valuations(universe: ex.VariableUniverse):
    for i in range(1 << universe.n):
        yield ex.Valuation(universe, tuple(bool((i >> p) & 1) for p in range(universe.n)))


def dnf_holds(dnf: ex.MonotoneDnf, v: ex.Valuation) -> bool:
    """Direct DNF semantics, bypassing expression conversion."""
    return any(all(v.of(name) for name in term) for term in dnf.terms)


# --- random generators ------------------------------------------------------

def random_read_once_node(rng: random.Random, indices: list[int],
                          negate_p: float = 0.2):
    if len(indices) == 1:
        node = Var(indices[0])
    else:
        cut = rng.randint(1, len(indices) - 1)
        left = random_read_once_node(rng, indices[:cut], negate_p)
        right = random_read_once_node(rng, indices[cut:], negate_p)
        node = And((left, right)) if rng.random() < 0.5 else Or((left, right))
    if rng.random() < negate_p:
        node = Not(node)
    return node


def random_read_once_set(rng: random.Random, max_vars: int = 10) -> ExpressionSet:
    """Overall read-once, non-simplifiable set whose universe is its support."""
    n = rng.randint(1, max_vars)
    universe = ex.VariableUniverse(tuple(f"x{i}" for i in range(n)))
    indices = list(range(n))
    rng.shuffle(indices)
    member_count = rng.randint(1, min(3, n))
    cuts = sorted(rng.sample(range(1, n), member_count - 1)) if member_count > 1 else []
    members = []
    start = 0
    for end in cuts + [n]:
        members.append(Expression(universe,
                                  random_read_once_node(rng, indices[start:end])))
        start = end
    return ExpressionSet(universe, tuple(members))


def random_cnf_dnf(rng: random.Random, conjunctive: bool) -> Expression:
    """Random 3-CNF or 3-DNF over 3..10 variables; may contain repeats."""
    n = rng.randint(3, 10)
    universe = ex.VariableUniverse(tuple(f"x{i}" for i in range(n)))
    clauses = []
    for _ in range(rng.randint(2, 3 * n)):
        lits = []
        for idx in rng.sample(range(n), 3):
            lit = Var(idx)
            if rng.random() < 0.5:
                lit = Not(lit)
            lits.append(lit)
        clauses.append(Or(tuple(lits)) if conjunctive else And(tuple(lits)))
    root = And(tuple(clauses)) if conjunctive else Or(tuple(clauses))
    return Expression(universe, root)


def random_monotone_dnf(rng: random.Random, max_vars: int = 8,
                        max_term: int = 3) -> ex.MonotoneDnf:
    """Non-constant monotone k-DNF with no empty term."""
    n = rng.randint(1, max_vars)
    universe = ex.VariableUniverse(tuple(f"x{i}" for i in range(n)))
    terms = set()
    for _ in range(rng.randint(1, 5)):
        size = rng.randint(1, min(max_term, n))
        terms.add(frozenset(f"x{i}" for i in rng.sample(range(n), size)))
    return ex.MonotoneDnf(universe, frozenset(terms))


def random_expression(rng: random.Random, universe: ex.VariableUniverse,
                      depth: int = 3):
    """Arbitrary expression node, possibly with repeats, negation, constants."""
    if depth == 0 or rng.random() < 0.3:
        if rng.random() < 0.1:
            return Const(rng.random() < 0.5)
        return Var(rng.randrange(universe.n))
    roll = rng.random()
    if roll < 0.2:
        return Not(random_expression(rng, universe, depth - 1))
    children = tuple(random_expression(rng, universe, depth - 1)
                     for _ in range(rng.randint(2, 3)))
    return And(children) if roll < 0.6 else Or(children)


_POOL = ("p", "q", "r", "s")


def random_annotated_db(rng: random.Random, max_tuples: int = 12):
    """Small annotated database with string values and distinct annotations."""
    from probedepth import provenance as pv

    relations = []
    counter = 0
    rel_count = rng.randint(1, 3)
    per_relation = max(1, rng.randint(2, max_tuples) // rel_count)
    for ri in range(rel_count):
        cols = tuple(f"c{j}" for j in range(rng.randint(1, 2)))
        tuples = []
        for _ in range(rng.randint(1, per_relation)):
            values = tuple(rng.choice(_POOL) for _ in cols)
            tuples.append(pv.AnnotatedTuple(values, f"x{counter}"))
            counter += 1
        relations.append(pv.Relation(f"R{ri}", cols, tuple(tuples)))
    return pv.AnnotatedDatabase(tuple(relations))


def random_spju_query(rng: random.Random, db, depth: int = 4):
    """Random select/project/join/union tree over the database's schema.

    Scans get globally unique aliases so join inputs never collide.
    """
    from itertools import count

    from probedepth import provenance as pv

    counter = count()

    def atoms(columns):
        out = []
        for _ in range(rng.randint(1, 2)):
            col = rng.choice(columns)
            if rng.random() < 0.5:
                out.append(pv.ContainsCI(col, rng.choice(_POOL)))
            else:
                op = rng.choice(("=", "!=", "<", "<=", ">", ">="))
                out.append(pv.Compare(pv.ColRef(col), op, pv.Lit(rng.choice(_POOL))))
        return tuple(out)

    def gen(d):
        if d == 0 or rng.random() < 0.3:
            rel = rng.choice(db.relations)
            alias = f"t{next(counter)}"
            return pv.Scan(rel.name, alias), tuple(f"{alias}.{c}" for c in rel.columns)
        roll = rng.random()
        if roll < 0.3:
            q, cols = gen(d - 1)
            return pv.Select(atoms(cols), q), cols
        if roll < 0.55:
            q, cols = gen(d - 1)
            keep = sorted(rng.sample(range(len(cols)), rng.randint(1, len(cols))))
            kept = tuple(cols[i] for i in keep)
            return pv.Project(kept, q), kept
        if roll < 0.8:
            lq, lcols = gen(d - 1)
            rq, rcols = gen(d - 1)
            on = ((rng.choice(lcols), rng.choice(rcols)),)
            return pv.Join(on, lq, rq), lcols + rcols
        q, cols = gen(d - 1)
        return pv.Union_((pv.Select(atoms(cols), q),
                          pv.Select(atoms(cols), q))), cols

    return gen(depth)[0]


def possible_worlds_agree(db, query, v) -> bool:
    """Def-4 check: a row's annotation is True under ``v`` exactly when the
    row appears in the query result over the possible world."""
    from probedepth import provenance as pv

    full = pv.eval_query(db, query)
    world_rows = {values for values, _ in
                  pv.eval_query(pv.possible_world(db, v), query).rows}
    claimed = {values for values, dnf in full.rows if dnf_holds(dnf, v)}
    return claimed == world_rows


# --- fixtures ---------------------------------------------------------------

def fixture_text(name: str) -> str:
    return resources.files("probedepth").joinpath(f"fixtures/{name}").read_text()


def load_schema(name: str) -> dict:
    raw = resources.files("probedepth").joinpath(f"schemas/{name}").read_text()
    return json.loads(raw)


@pytest.fixture
def rng():
    return random.Random(0)
