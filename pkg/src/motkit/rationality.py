"""Rational cycles over a poset of fields.

The model assigns to every (field node, expression) pair a subspace of the
split Chow group. User generators are completed to the least family closed
under the operations that preserve rationality of genuine cycles:

* fundamental classes and diagonals of equal atomic factors (base content);
* homogeneous components;
* intersection products;
* factor permutations between expressions of the universe;
* external products along splits ``e = e1 + e2``;
* composition ``A|B`` with ``B|C`` into ``A|C``;
* pullback along a diagonal identifying two equal factors;
* pushforward dropping a factor;
* restriction: every node contains the spaces of the nodes below it.

The universe of expressions is finite and fixed before closing, so the least
fixpoint exists and is reached after finitely many rounds. Function-field
rational cycles (``F(X)``) are not poset nodes: they are the generic-fiber
image of the ``X×Y×X`` space.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from . import ff
from .chow import ChowModel, Expr
from .correspondence import Correspondence, contract_pair, permute_cycle
from .errors import HypothesisViolation, ModelFormatError


class FieldPoset:
    """Finite partial order of field labels with a unique minimum."""

    def __init__(self, nodes: Iterable[str], leq: Iterable[tuple] = ()):
        self.nodes = tuple(dict.fromkeys(nodes))
        if not self.nodes:
            raise ModelFormatError("field poset has no nodes")
        idx = {n: k for k, n in enumerate(self.nodes)}
        n = len(self.nodes)
        rel = np.eye(n, dtype=bool)
        for a, b in leq:
            if a not in idx or b not in idx:
                raise ModelFormatError(f"field order mentions unknown node {a if a not in idx else b!r}")
            rel[idx[a], idx[b]] = True
        for k in range(n):  # transitive closure
            rel |= rel[:, [k]] & rel[[k], :]
        for a in range(n):
            for b in range(a + 1, n):
                if rel[a, b] and rel[b, a]:
                    raise ModelFormatError(f"field order is not antisymmetric: {self.nodes[a]} ≡ {self.nodes[b]}")
        minima = [self.nodes[a] for a in range(n) if rel[a].all()]
        if len(minima) != 1:
            raise ModelFormatError("field order needs a unique minimum (the base field)")
        self.base = minima[0]
        self._idx = idx
        self._rel = rel

    def leq(self, a: str, b: str) -> bool:
        return bool(self._rel[self._idx[a], self._idx[b]])

    def below(self, node: str) -> list:
        """Nodes strictly below ``node``."""
        return [m for m in self.nodes if m != node and self.leq(m, node)]

    def topological(self) -> list:
        return sorted(self.nodes, key=lambda m: (int(self._rel[:, self._idx[m]].sum()), self._idx[m]))

    def __contains__(self, node) -> bool:
        return node in self._idx

    def pairs(self) -> list:
        return [(a, b) for a in self.nodes for b in self.nodes if a != b and self.leq(a, b)
                and not any(self.leq(a, c) and self.leq(c, b) for c in self.nodes if c not in (a, b))]


@dataclass
class ClosureReport:
    rounds: dict = field(default_factory=dict)
    dims: dict = field(default_factory=dict)

    def lines(self) -> list:
        return [f"{node} {'×'.join(e) or 'pt'}: dim {d}" for (node, e), d in sorted(self.dims.items())]


class RationalityModel:
    """User data (generators, split nodes) plus, once closed, the rational spaces."""

    def __init__(self, model: ChowModel, poset: FieldPoset):
        self.model = model
        self.poset = poset
        self.exprs: list = []
        self.generators: dict = {}
        self.full_nodes: set = set()
        self.full_pairs: set = set()
        self.spaces: dict = {}
        self.closed = False
        self.report: Optional[ClosureReport] = None

    # -- building ------------------------------------------------------------------
    def ensure(self, *exprs) -> None:
        for e in exprs:
            e = self.model.expr(e)
            if e not in self.exprs:
                self.exprs.append(e)
                self.closed = False

    def _check_node(self, node: str) -> None:
        if node not in self.poset:
            raise ModelFormatError(f"unknown field node {node!r}")

    def add_generators(self, node: str, expr, vectors) -> None:
        self._check_node(node)
        e = self.model.expr(expr)
        self.ensure(e)
        v = ff.as_fp(np.asarray(vectors, dtype=np.int64).reshape(-1, self.model.size(e)), self.model.p)
        self.generators.setdefault((node, e), []).extend(list(v))
        self.closed = False

    def set_full(self, node: str, expr=None) -> None:
        """Declare every cycle rational over ``node`` (a splitting field), or only on ``expr``."""
        self._check_node(node)
        if expr is None:
            self.full_nodes.add(node)
        else:
            e = self.model.expr(expr)
            self.ensure(e)
            self.full_pairs.add((node, e))
        self.closed = False

    # -- queries -------------------------------------------------------------------
    def space(self, node: str, expr) -> ff.Subspace:
        self._check_node(node)
        e = self.model.expr(expr)
        if not self.closed:
            raise RuntimeError("rationality model is not closed; call close_and_validate first")
        try:
            return self.spaces[(node, e)]
        except KeyError:
            raise KeyError(f"no rational space for {'×'.join(e) or 'pt'} over {node}; "
                           "add the expression to the model") from None

    def is_full(self, node: str) -> bool:
        return any(self.poset.leq(f, node) for f in self.full_nodes)


# --- closure ---------------------------------------------------------------------------

def _base_content(model: ChowModel, e: Expr) -> list:
    """Fundamental class and every diagonal of two equal atomic factors."""
    out = [model.fundamental_class(e)]
    for i, j in itertools.combinations(range(len(e)), 2):
        if e[i] != e[j]:
            continue
        # Δ on factors i, j and fundamental classes elsewhere, as a tensor
        parts = []
        for k, name in enumerate(e):
            if k in (i, j):
                continue
            parts.append(k)
        inv = model.gram_inverse((e[i],))
        shape = model.shape(e)
        t = np.zeros(shape, dtype=np.int64)
        idx_other = tuple(model[e[k]].fundamental_index for k in parts)
        for a in range(shape[i]):
            for b in range(shape[j]):
                if inv[a, b]:
                    full_idx = [0] * len(e)
                    full_idx[i], full_idx[j] = a, b
                    for k, fi in zip(parts, idx_other):
                        full_idx[k] = fi
                    t[tuple(full_idx)] = inv[a, b]
        out.append(t.ravel())
    return out


def _pushforward(model: ChowModel, e: Expr, vec: np.ndarray, drop: int) -> np.ndarray:
    deg = model.degree((e[drop],))
    t = np.asarray(vec, dtype=np.int64).reshape(model.shape(e))
    return (np.tensordot(t, deg, axes=([drop], [0])) % model.p).ravel()


class _Closer:
    def __init__(self, rm: RationalityModel):
        self.rm = rm
        self.m = rm.model
        self.p = rm.model.p
        self.exprs = list(rm.exprs)
        self.eset = set(self.exprs)
        self._plan()

    def _plan(self) -> None:
        ex = self.exprs
        self.perms = []  # (src, dst, order)
        for a in ex:
            for b in ex:
                if len(a) != len(b) or sorted(a) != sorted(b):
                    continue
                for order in set(itertools.permutations(range(len(a)))):
                    if tuple(a[k] for k in order) == b and list(order) != list(range(len(a))):
                        self.perms.append((a, b, order))
        self.splits = [(e, e[:k], e[k:]) for e in ex for k in range(1, len(e))
                       if e[:k] in self.eset and e[k:] in self.eset]
        self.composes = []  # (e1, e2, A, B, C)
        for e1 in ex:
            for k in range(len(e1)):
                a_part, b_part = e1[:k], e1[k:]
                for e2 in ex:
                    if e2[:len(b_part)] != b_part:
                        continue
                    c_part = e2[len(b_part):]
                    res = a_part + c_part
                    if res and res in self.eset:
                        self.composes.append((e1, e2, a_part, b_part, c_part))
        self.contractions = [(e, i, j, tuple(n for k, n in enumerate(e) if k != j))
                             for e in ex for i, j in itertools.permutations(range(len(e)), 2)
                             if e[i] == e[j]]
        self.contractions = [c for c in self.contractions if c[3] in self.eset]
        self.pushes = [(e, k, e[:k] + e[k + 1:]) for e in ex for k in range(len(e))
                       if e[:k] + e[k + 1:] in self.eset]

    def _span(self, e, vecs) -> ff.Subspace:
        return ff.Subspace.span(np.asarray(vecs, dtype=np.int64).reshape(-1, self.m.size(e)), self.p, self.m.size(e))

    def close_node(self, node: str, seed: dict) -> tuple:
        sp = dict(seed)
        rounds = 0
        while True:
            rounds += 1
            new = {e: [] for e in self.exprs}
            for e in self.exprs:
                for v in sp[e].basis:
                    parts = self.m.homogeneous_parts(e, v)
                    if len(parts) > 1:
                        new[e].extend(parts.values())
                b = sp[e].basis
                for x, y in itertools.combinations_with_replacement(range(len(b)), 2):
                    new[e].append(self.m.product(e, b[x], b[y]))
            for a, b, order in self.perms:
                for v in sp[a].basis:
                    new[b].append(permute_cycle(self.m, a, v, order)[1])
            for e, e1, e2 in self.splits:
                for u in sp[e1].basis:
                    for w in sp[e2].basis:
                        new[e].append(np.kron(u, w) % self.p)
            for e1, e2, a_part, b_part, c_part in self.composes:
                g = self.m.gram(b_part)
                sa, sb, sc = self.m.size(a_part), self.m.size(b_part), self.m.size(c_part)
                b1, b2 = sp[e1].basis, sp[e2].basis
                if not len(b1) or not len(b2):
                    continue
                left = ff.mat_mul(b1.reshape(-1, sb), g, self.p).reshape(len(b1), sa, sb)
                for u in left:
                    for w in b2:
                        new[a_part + c_part].append(ff.mat_mul(u, w.reshape(sb, sc), self.p).ravel())
            for e, i, j, out in self.contractions:
                for v in sp[e].basis:
                    new[out].append(contract_pair(self.m, e, v, i, j)[1])
            for e, k, out in self.pushes:
                for v in sp[e].basis:
                    new[out].append(_pushforward(self.m, e, v, k))
            changed = False
            for e in self.exprs:
                if not new[e]:
                    continue
                cand = self._span(e, new[e])
                if not sp[e].contains_space(cand):
                    sp[e] = sp[e] + cand
                    changed = True
            if not changed:
                return sp, rounds


def close_and_validate(rm: RationalityModel) -> RationalityModel:
    """Complete every space to the least closed family; idempotent."""
    m = rm.model
    closer = _Closer(rm)
    report = ClosureReport()
    spaces: dict = {}
    for node in rm.poset.topological():
        seed = {}
        for e in closer.exprs:
            size = m.size(e)
            if rm.is_full(node) or (node, e) in rm.full_pairs:
                seed[e] = ff.Subspace.full(size, m.p)
                continue
            vecs = _base_content(m, e) + list(rm.generators.get((node, e), []))
            for lower in rm.poset.below(node):
                vecs.extend(spaces[(lower, e)].basis)
            seed[e] = ff.Subspace.span(np.array(vecs, dtype=np.int64).reshape(-1, size), m.p, size)
        closed, rounds = closer.close_node(node, seed)
        report.rounds[node] = rounds
        for e, s in closed.items():
            spaces[(node, e)] = s
            report.dims[(node, e)] = s.dim
    rm.spaces = spaces
    rm.closed = True
    rm.report = report
    for a, b in itertools.permutations(rm.poset.nodes, 2):
        if rm.poset.leq(a, b):
            for e in closer.exprs:
                if not spaces[(b, e)].contains_space(spaces[(a, e)]):
                    raise HypothesisViolation(f"rational spaces not monotone along {a} ≤ {b}")
    return rm


# --- queries on a closed model ----------------------------------------------------------

def is_rational(rm: RationalityModel, v, node: str, expr=None) -> bool:
    if isinstance(v, Correspondence):
        e = v.expr
        vec = v.flat
    else:
        if expr is None:
            raise ValueError("expression needed for a bare cycle vector")
        e = rm.model.expr(expr)
        vec = np.asarray(v)
    return rm.space(node, e).contains(vec)


def function_field_space(rm: RationalityModel, node: str, x, y) -> ff.Subspace:
    """Cycles on ``X×Y`` rational over ``node(X)``: ε* of the ``X×Y×X`` space."""
    m = rm.model
    x, y = m.expr(x), m.expr(y)
    if rm.is_full(node):
        return ff.Subspace.full(m.size(x + y), m.p)
    big = rm.space(node, x + y + x)
    fi = m.fundamental_index(x)
    sl = big.basis.reshape(big.dim, m.size(x + y), m.size(x))[:, :, fi]
    return ff.Subspace.span(sl, m.p, m.size(x + y))


@dataclass
class Hypothesis1Report:
    ok: bool
    field_big: str
    field_small: str
    witnesses: list  # flat cycles on X×Y spanning a complement of the small space inside the big one
    labels: list

    def describe(self, model: ChowModel, x, y) -> list:
        e = model.expr(x) + model.expr(y)
        lab = model.labels(e)
        out = []
        for w in self.witnesses:
            terms = [f"{c}·{lab[k]}" if c != 1 else lab[k] for k, c in enumerate(w) if c]
            out.append(" + ".join(terms))
        return out


def check_hypothesis1(rm: RationalityModel, big: str, small: str, x, y) -> Hypothesis1Report:
    """Is every ``big(X)``-rational cycle on ``X×Y`` already ``small(X)``-rational?"""
    m = rm.model
    s_big = function_field_space(rm, big, x, y)
    s_small = function_field_space(rm, small, x, y)
    if s_small.contains_space(s_big):
        return Hypothesis1Report(True, big, small, [], [])
    reduced = s_small.reduce(s_big.basis)
    comp = ff.Subspace.span(reduced, m.p, s_big.ambient)
    wit = [w for w in comp.basis]
    lab = [Hypothesis1Report(False, big, small, [w], []).describe(m, x, y)[0] for w in wit]
    return Hypothesis1Report(False, big, small, wit, lab)


@dataclass
class RestrictionReport:
    lower: str
    upper: str
    expr: tuple
    kernel_dim: int
    message: str


def restriction_kernel_check(rm: RationalityModel, lower: str, upper: str, expr) -> RestrictionReport:
    """Restriction ``Ch(X_L) → Ch(X_L')`` is an inclusion here, so its kernel is zero."""
    if not rm.poset.leq(lower, upper):
        raise ValueError(f"{lower} is not below {upper}")
    e = rm.model.expr(expr)
    a, b = rm.space(lower, e), rm.space(upper, e)
    if not b.contains_space(a):
        raise HypothesisViolation(f"restriction {lower}→{upper} is not defined on {e}")
    # the map sends each basis vector of a to itself in b; its kernel is the kernel of a.basis
    kernel_dim = a.dim - ff.rank(a.basis, rm.model.p) if a.dim else 0
    return RestrictionReport(lower, upper, e, kernel_dim,
                             "nilpotence principle holds trivially (faithful model): "
                             "restriction of scalars is injective")
