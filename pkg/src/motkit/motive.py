"""Motivic direct summands ``(X, π)[t]`` of split varieties.

Chow groups follow the rule ``Ch_i(N) = Hom(𝔽[i], N)``: for ``N = (X, π)[t]``
this is the image under ``π`` of the cycles of codimension ``i - t`` on ``X``.
The base of ``N`` is the set of ``i`` with ``Ch_i(N) ≠ 0``; it can also be read
off the mixed expansion ``π = Σ π_{a,b} x_a × x*_b`` (rows of ``P·G``).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import ff
from .chow import ChowModel
from .correspondence import Correspondence, compose, diagonal, hom_positions, transpose
from .errors import HypothesisViolation


@dataclass(frozen=True, eq=False)
class MotiveSummand:
    """``(expr, π)[twist]``; the projector is stored with both twists equal to ``twist``."""

    projector: Correspondence
    name: str = ""

    def __post_init__(self):
        pi = self.projector
        if pi.source != pi.target or pi.source_twist != pi.target_twist:
            raise ValueError("projector must be an endomorphism of degree 0")

    @classmethod
    def make(cls, model: ChowModel, expr, coeffs, twist: int = 0, name: str = "") -> "MotiveSummand":
        e = model.expr(expr)
        return cls(Correspondence(model, e, e, coeffs, twist, twist), name)

    @classmethod
    def whole(cls, model: ChowModel, expr, twist: int = 0, name: str = "") -> "MotiveSummand":
        """The motive of ``expr`` itself, with the diagonal as projector."""
        return cls(diagonal(model, expr, twist), name)

    @property
    def model(self) -> ChowModel:
        return self.projector.model

    @property
    def expr(self):
        return self.projector.source

    @property
    def twist(self) -> int:
        return self.projector.source_twist

    @property
    def p(self) -> int:
        return self.model.p

    def is_zero(self) -> bool:
        return self.projector.is_zero()

    def with_projector(self, coeffs, name: str = "") -> "MotiveSummand":
        return MotiveSummand(self.projector._like(coeffs), name)

    def shift(self, s: int) -> "MotiveSummand":
        return MotiveSummand(self.projector.shift(s), self.name)

    def __eq__(self, other) -> bool:
        if not isinstance(other, MotiveSummand):
            return NotImplemented
        return self.projector == other.projector

    def __hash__(self) -> int:
        return hash(self.projector)

    def __repr__(self) -> str:
        label = f"{self.name} " if self.name else ""
        return f"<summand {label}({'×'.join(self.expr) or 'pt'}, π)[{self.twist}] rank {ff.rank(self.projector.coeffs, self.p)}>"


@dataclass(frozen=True)
class SummandProfile:
    base: frozenset
    bottom: int
    top: int

    @classmethod
    def of(cls, base) -> "SummandProfile":
        base = frozenset(int(b) for b in base)
        if not base:
            raise ValueError("empty base: the projector is zero")
        return cls(base, min(base), max(base))

    def as_dict(self) -> dict:
        return {"base": sorted(self.base), "bottom": self.bottom, "top": self.top}


@dataclass(frozen=True)
class Classification:
    upper: bool
    lower: bool

    @property
    def outer(self) -> bool:
        return self.upper and self.lower

    def as_dict(self) -> dict:
        return {"upper": self.upper, "lower": self.lower, "outer": self.outer}


# --- predicates ------------------------------------------------------------------

def is_degree_zero_endo(a: Correspondence) -> bool:
    return a.is_endo() and (a.is_zero() or a.total_dim == a.model.dim(a.source)) and a.is_homogeneous()


def is_projector(a: Correspondence) -> bool:
    if a.source != a.target:
        raise ValueError("is_projector needs an endo-correspondence")
    if not is_degree_zero_endo(a):
        return False
    return compose(a, a) == a


def _check_compatible(rho: MotiveSummand, pi: MotiveSummand) -> None:
    if rho.expr != pi.expr or rho.twist != pi.twist:
        raise ValueError("summands live on different expressions or twists")


def is_summand_of(rho: MotiveSummand, pi: MotiveSummand) -> bool:
    """``ρ`` defines a direct summand of ``(X, π)`` iff ``π∘ρ∘π = ρ``."""
    _check_compatible(rho, pi)
    return compose(pi.projector, compose(rho.projector, pi.projector)) == rho.projector


# --- Chow groups and profiles -------------------------------------------------------

def chow_group(n: MotiveSummand, i: int, codim: bool = False) -> ff.Subspace:
    """``Ch_i(N)`` as a subspace of cycles on ``n.expr``.

    With ``codim=True`` this is ``Ch^i(N) = Hom(N, 𝔽[i])``, computed by composing
    with the projector on the other side.
    """
    m = n.model
    e = n.expr
    size = m.size(e)
    codims = m.dim(e) - m.dims(e)
    sel = np.flatnonzero(codims == i - n.twist) if not codim else np.flatnonzero(m.dims(e) == i + n.twist)
    if sel.size == 0:
        return ff.Subspace.zero(size, m.p)
    g = m.gram(e)
    pc = n.projector.coeffs
    if codim:
        # α : X[t] ⇝ pt[i], α ∘ π has coefficient column P G v
        rows = ff.mat_mul(ff.mat_mul(pc, g, m.p), ff.identity(size)[:, sel], m.p).T
    else:
        rows = ff.mat_mul(g[sel], pc, m.p)
    return ff.Subspace.span(rows, m.p, size)


def chow_dims(n: MotiveSummand) -> dict:
    """Nonzero ``dim Ch_i(N)`` keyed by ``i``."""
    m = n.model
    out = {}
    for c in sorted(set(int(x) for x in m.dim(n.expr) - m.dims(n.expr))):
        d = chow_group(n, c + n.twist).dim
        if d:
            out[c + n.twist] = d
    return out


def mixed_coefficients(n: MotiveSummand) -> np.ndarray:
    """``π_{a,b}`` in ``π = Σ π_{a,b} x_a × x*_b``; equals ``P·G``."""
    m = n.model
    return ff.mat_mul(n.projector.coeffs, m.gram(n.expr), m.p)


def profile(n: MotiveSummand, method: str = "matrix") -> SummandProfile:
    """Base, bottom and top of a nonzero summand.

    ``method="matrix"`` reads dimensions of the nonzero rows of the mixed
    coefficient matrix; ``method="chow"`` scans the Chow groups.
    """
    if n.is_zero():
        raise ValueError("profile of the zero summand is undefined")
    m = n.model
    if method == "matrix":
        q = mixed_coefficients(n)
        rows = np.flatnonzero(q.any(axis=1))
        return SummandProfile.of(m.dims(n.expr)[rows] + n.twist)
    if method == "chow":
        return SummandProfile.of(chow_dims(n).keys())
    raise ValueError(f"unknown profile method {method!r}")


def random_projector(model: ChowModel, expr, rng: np.random.Generator, twist: int = 0,
                     nonzero: bool = True) -> MotiveSummand:
    """A random projector of degree 0 on ``expr``.

    ``π`` is a projector exactly when ``Q = P·G`` is an idempotent matrix that
    preserves dimensions, so we draw ``Q = A·D·A⁻¹`` blockwise per dimension
    with ``D`` a random 0/1 diagonal and ``A`` random invertible.
    """
    e = model.expr(expr)
    p = model.p
    dims = model.dims(e)
    size = model.size(e)
    while True:
        q = np.zeros((size, size), dtype=np.int64)
        for d in np.unique(dims):
            idx = np.flatnonzero(dims == d)
            k = idx.size
            while True:
                a = rng.integers(0, p, (k, k))
                if ff.rank(a, p) == k:
                    break
            diag = np.diag(rng.integers(0, 2, k))
            block = ff.mat_mul(ff.mat_mul(a, diag, p), ff.inverse(a, p), p)
            q[np.ix_(idx, idx)] = block
        if q.any() or not nonzero:
            break
    coeffs = ff.mat_mul(q, model.gram_inverse(e), p)
    return MotiveSummand.make(model, e, coeffs, twist)


def classify(sub: MotiveSummand, ambient: MotiveSummand) -> Classification:
    if not is_summand_of(sub, ambient):
        raise HypothesisViolation("not a summand: π∘ρ∘π ≠ ρ")
    ps, pa = profile(sub), profile(ambient)
    return Classification(upper=ps.bottom == pa.bottom, lower=ps.top == pa.top)


def dual_summand(n: MotiveSummand) -> MotiveSummand:
    """``(X, π)[t] ↦ (X, ᵗπ)[-dim X - t]``."""
    return MotiveSummand(transpose(n.projector), n.name + "†" if n.name else "")


# --- morphisms between summands and isomorphism search ------------------------------

def hom_basis(a: MotiveSummand, b: MotiveSummand, space: Optional[ff.Subspace] = None) -> np.ndarray:
    """Basis (flat rows on a.expr × b.expr) of ``π_b ∘ Hom(X_a[t_a], X_b[t_b]) ∘ π_a``.

    ``space`` optionally restricts the correspondences (e.g. to rational ones).
    """
    m = a.model
    s, t = a.expr, b.expr
    n_flat = m.size(s) * m.size(t)
    pos = hom_positions(m, s, t, a.twist, b.twist)
    if space is None:
        gens = np.zeros((pos.size, n_flat), dtype=np.int64)
        gens[np.arange(pos.size), pos] = 1
    else:
        mask = np.zeros(n_flat, dtype=bool)
        mask[pos] = True
        allowed = ff.Subspace.span(np.eye(n_flat, dtype=np.int64)[mask], m.p, n_flat)
        gens = (space & allowed).basis
    if gens.shape[0] == 0:
        return np.zeros((0, n_flat), dtype=np.int64)
    g_s, g_t = m.gram(s), m.gram(t)
    pa, pb = a.projector.coeffs, b.projector.coeffs
    left = ff.mat_mul(pa, g_s, m.p)  # π_a then α: P_a G_s A G_t P_b
    right = ff.mat_mul(g_t, pb, m.p)
    imgs = [ff.mat_mul(ff.mat_mul(left, g.reshape(m.size(s), m.size(t)), m.p), right, m.p).ravel()
            for g in gens]
    return ff.Subspace.span(np.array(imgs), m.p, n_flat).basis


@dataclass
class WitnessResult:
    """Outcome of an isomorphism search.

    ``status`` is ``"found"``, ``"none"`` (proved by exhaustion or an invariant)
    or ``"bound"`` (search budget exhausted without a witness).
    """

    status: str
    u: Optional[Correspondence] = None
    v: Optional[Correspondence] = None
    reason: str = ""
    tried: int = 0
    seed: Optional[int] = None
    extra: dict = field(default_factory=dict)

    @property
    def found(self) -> bool:
        return self.status == "found"


def _as_corr(a: MotiveSummand, b: MotiveSummand, vec) -> Correspondence:
    return Correspondence.from_flat(a.model, a.expr, b.expr, vec, a.twist, b.twist)


def summand_isomorphism_witness(a: MotiveSummand, b: MotiveSummand, bound: int = 1 << 20,
                                seed: int = 0, samples: int = 4096,
                                space_ab: Optional[ff.Subspace] = None,
                                space_ba: Optional[ff.Subspace] = None,
                                one_sided: bool = False) -> WitnessResult:
    """Search ``u : a → b`` and ``v : b → a`` with ``v∘u = π_a`` and ``u∘v = π_b``.

    With ``one_sided=True`` only ``v∘u = π_a`` is required, i.e. ``a`` is
    isomorphic to a direct summand of ``b``.

    For each candidate ``u`` the conditions are linear in ``v``, so only ``u``
    is enumerated (all of ``Hom(a, b)`` when it has at most ``bound`` elements,
    otherwise ``samples`` seeded random draws).
    """
    m = a.model
    p = m.p
    if a.is_zero() and b.is_zero():
        return WitnessResult("found", _as_corr(a, b, np.zeros(m.size(a.expr) * m.size(b.expr))),
                             _as_corr(b, a, np.zeros(m.size(a.expr) * m.size(b.expr))), "both zero")
    if a.is_zero() and one_sided:
        return WitnessResult("found", _as_corr(a, b, np.zeros(m.size(a.expr) * m.size(b.expr))),
                             _as_corr(b, a, np.zeros(m.size(a.expr) * m.size(b.expr))), "zero summand")
    if a.is_zero() != b.is_zero():
        return WitnessResult("none", reason="exactly one summand is zero")
    da, db = chow_dims(a), chow_dims(b)
    if one_sided:
        if any(db.get(i, 0) < d for i, d in da.items()):
            return WitnessResult("none", reason="Chow groups of the first summand do not fit")
    elif da != db:
        return WitnessResult("none", reason="Chow group dimensions differ")
    hab = hom_basis(a, b, space_ab)
    hba = hom_basis(b, a, space_ba)
    if hab.shape[0] == 0 or hba.shape[0] == 0:
        return WitnessResult("none", reason="Hom space is zero")

    sa, sb = m.size(a.expr), m.size(b.expr)
    g_a, g_b = m.gram(a.expr), m.gram(b.expr)
    pa, pb = a.projector.flat, b.projector.flat
    target = pa if one_sided else np.concatenate([pa, pb])
    vs = hba.reshape(-1, sb, sa)

    def try_u(ucoef: np.ndarray):
        u = ff.mat_mul(ucoef[None, :], hab, p)[0].reshape(sa, sb)
        ug = ff.mat_mul(u, g_b, p)  # v∘u = U G_b V
        gu = ff.mat_mul(g_a, u, p)  # u∘v = V G_a U
        if one_sided:
            cols = [ff.mat_mul(ug, w, p).ravel() for w in vs]
        else:
            cols = [np.concatenate([ff.mat_mul(ug, w, p).ravel(), ff.mat_mul(w, gu, p).ravel()]) for w in vs]
        x, _ = ff.solve_linear(np.stack(cols, axis=1), target, p)
        if x is None:
            return None
        v = ff.mat_mul(x[None, :], hba, p)[0]
        return u.ravel(), v

    k = hab.shape[0]
    total = p ** k
    tried = 0
    if total <= bound:
        for coeffs in itertools.product(range(p), repeat=k):
            c = np.array(coeffs, dtype=np.int64)
            if not c.any():
                continue
            tried += 1
            hit = try_u(c)
            if hit is not None:
                return WitnessResult("found", _as_corr(a, b, hit[0]), _as_corr(b, a, hit[1]),
                                     "enumeration", tried)
        return WitnessResult("none", reason=f"exhausted all {total} elements of Hom", tried=tried)
    rng = np.random.default_rng(seed)
    for _ in range(samples):
        c = rng.integers(0, p, size=k)
        tried += 1
        hit = try_u(c)
        if hit is not None:
            return WitnessResult("found", _as_corr(a, b, hit[0]), _as_corr(b, a, hit[1]),
                                 "random search", tried, seed)
    return WitnessResult("bound", reason=f"Hom has {total} elements > bound {bound}; "
                                         f"{samples} samples found nothing", tried=tried, seed=seed)


def verify_witness(a: MotiveSummand, b: MotiveSummand, u: Correspondence, v: Correspondence) -> bool:
    return compose(v, u) == a.projector and compose(u, v) == b.projector
