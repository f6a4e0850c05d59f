"""Krull–Schmidt decomposition of motivic summands over a field node."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import ff
from .algebra import FiniteAlgebra, jacobson_radical, primitive_decomposition
from .correspondence import Correspondence, compose, hom_positions
from .errors import HypothesisViolation, VerificationError
from .motive import MotiveSummand, profile, summand_isomorphism_witness
from .rationality import RationalityModel


class EndAlgebra:
    """``End_L(N) = π ∘ Ch_{dim X}(X×X)_L ∘ π`` with composition as product.

    Elements are flat cycles on ``X×X``; ``self.algebra`` is the same algebra in
    coordinates of ``self.space``.
    """

    def __init__(self, n: MotiveSummand, rm: Optional[RationalityModel] = None, node: Optional[str] = None):
        self.summand = n
        self.node = node
        m = n.model
        e = n.expr
        size = m.size(e) ** 2
        pos = hom_positions(m, e, e, 0, 0)
        if rm is None:
            gens = np.zeros((pos.size, size), dtype=np.int64)
            gens[np.arange(pos.size), pos] = 1
        else:
            rat = rm.space(node, e + e)
            if not rat.contains(n.projector.flat):
                raise HypothesisViolation(f"projector is not {node}-rational")
            mask = np.zeros(size, dtype=bool)
            mask[pos] = True
            deg0 = ff.Subspace.span(np.eye(size, dtype=np.int64)[mask], m.p, size)
            gens = (rat & deg0).basis
        pc = n.projector.coeffs
        g = m.gram(e)
        pg, gp = ff.mat_mul(pc, g, m.p), ff.mat_mul(g, pc, m.p)
        k = m.size(e)
        imgs = [ff.mat_mul(ff.mat_mul(pg, v.reshape(k, k), m.p), gp, m.p).ravel() for v in gens]
        imgs.append(n.projector.flat)
        self.algebra, self.space = FiniteAlgebra.from_basis(
            np.array(imgs).reshape(-1, size), self._mul, n.projector.flat, m.p)

    def _mul(self, x, y) -> np.ndarray:
        return self.to_corr(x, raw=True).__matmul__(self.to_corr(y, raw=True)).flat

    @property
    def dim(self) -> int:
        return self.algebra.n

    def to_corr(self, v, raw: bool = False) -> Correspondence:
        """Correspondence from a flat cycle (``raw``) or from algebra coordinates."""
        n = self.summand
        flat = v if raw else ff.mat_mul(np.asarray(v)[None, :], self.space.basis, n.p)[0]
        return Correspondence.from_flat(n.model, n.expr, n.expr, flat, n.twist, n.twist)

    def coords(self, c: Correspondence) -> np.ndarray:
        return self.space.coords(c.flat)

    def radical(self) -> ff.Subspace:
        return jacobson_radical(self.algebra)


@dataclass
class Decomposition:
    summand: MotiveSummand
    node: Optional[str]
    seed: int
    idempotents: list
    summands: list
    certificates: list
    end_dim: int
    radical_dim: int
    checks: list = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.summands)

    def profiles(self) -> list:
        return sorted((sorted(profile(s).base) for s in self.summands))


def krull_schmidt(n: MotiveSummand, rm: Optional[RationalityModel] = None, node: Optional[str] = None,
                  seed: int = 0, certify_bound: int = 1 << 20) -> Decomposition:
    """Split ``N`` into indecomposable summands rational over ``node``.

    Without a rationality model every cycle counts as rational (split case).
    The result is verified: orthogonal idempotents summing to ``π``, each one
    primitive in ``End_L(N)``.
    """
    if n.is_zero():
        return Decomposition(n, node, seed, [], [], [], 0, 0, ["zero summand: empty decomposition"])
    end = EndAlgebra(n, rm, node)
    alg = end.algebra
    prims = primitive_decomposition(alg, seed=seed, certify_bound=certify_bound)
    idems = [end.to_corr(pr.element) for pr in prims]
    checks = []
    total = Correspondence.zero(n.model, n.expr, n.expr, n.twist, n.twist)
    for a, ea in enumerate(idems):
        total = total + ea
        for b, eb in enumerate(idems):
            prod = compose(ea, eb)
            expect = ea if a == b else None
            if (expect is None and not prod.is_zero()) or (expect is not None and prod != expect):
                raise VerificationError(f"idempotents {a} and {b} are not orthogonal idempotents")
    checks.append("pairwise orthogonal idempotents")
    if total != n.projector:
        raise VerificationError("idempotents do not sum to the projector")
    checks.append("idempotents sum to π")
    checks.append("each idempotent primitive in End")
    bases = [sorted(profile(MotiveSummand(e)).base) for e in idems]
    order = sorted(range(len(idems)), key=lambda k: (bases[k], idems[k].flat.tobytes()))
    summands = [MotiveSummand(idems[k], f"{n.name or 'N'}_{pos}") for pos, k in enumerate(order)]
    return Decomposition(n, node, seed, [idems[k] for k in order], summands,
                         [prims[k].certificate for k in order], alg.n, end.radical().dim, checks)


def is_indecomposable(n: MotiveSummand, rm: Optional[RationalityModel] = None, node: Optional[str] = None,
                      seed: int = 0) -> bool:
    return len(krull_schmidt(n, rm, node, seed)) == 1


def rational_hom_space(rm: Optional[RationalityModel], node: Optional[str], a: MotiveSummand, b: MotiveSummand):
    if rm is None:
        return None
    return rm.space(node, a.expr + b.expr)


def match_decompositions(d1: Decomposition, d2: Decomposition, rm: Optional[RationalityModel] = None,
                         node: Optional[str] = None, bound: int = 1 << 20) -> Optional[list]:
    """Pair the summands of two decompositions by isomorphism, or return None.

    Witnesses are searched among ``node``-rational correspondences.
    """
    if len(d1) != len(d2):
        return None
    free = list(range(len(d2)))
    pairing = []
    for i, a in enumerate(d1.summands):
        for j in free:
            b = d2.summands[j]
            res = summand_isomorphism_witness(a, b, bound=bound,
                                              space_ab=rational_hom_space(rm, node, a, b),
                                              space_ba=rational_hom_space(rm, node, b, a))
            if res.found:
                pairing.append((i, j))
                free.remove(j)
                break
        else:
            return None
    return pairing
