"""Correspondences between twisted split varieties and their calculus.

A correspondence ``α : X[i] ⇝ Y[j]`` is stored as the coefficient matrix of
``α = Σ c[a, b] · x_a × y_b`` over the product bases of the source and target
expressions. It is homogeneous when every nonzero ``c[a, b]`` satisfies

    dim x_a + dim y_b = dim Y + j - i,

so the same cycle read as ``X[i] ⇝ Y[j]`` and ``X[i+s] ⇝ Y[j+s]`` are both
valid. Composition is Gram contraction: ``(β∘α).c = α.c · G_Y · β.c``.

A cycle on ``X`` of dimension ``d`` is the correspondence ``pt[dim X - d] ⇝ X[0]``.
"""

from __future__ import annotations

import os
from typing import Sequence

import numpy as np

from . import ff
from .chow import ChowModel, Expr

_DEBUG = os.environ.get("MOTKIT_DEBUG", "").strip() not in ("", "0")


class Correspondence:
    __slots__ = ("model", "source", "target", "coeffs", "source_twist", "target_twist")

    def __init__(self, model: ChowModel, source, target, coeffs,
                 source_twist: int = 0, target_twist: int = 0):
        self.model = model
        self.source = model.expr(source)
        self.target = model.expr(target)
        c = ff.as_fp(coeffs, model.p).reshape(model.size(self.source), model.size(self.target))
        c.setflags(write=False)
        self.coeffs = c
        self.source_twist = int(source_twist)
        self.target_twist = int(target_twist)
        if _DEBUG and not self.is_homogeneous():
            raise AssertionError(f"inhomogeneous result: {self!r}")

    # -- construction ---------------------------------------------------------
    @classmethod
    def zero(cls, model, source, target, source_twist=0, target_twist=0):
        s, t = model.expr(source), model.expr(target)
        return cls(model, s, t, np.zeros((model.size(s), model.size(t)), dtype=np.int64),
                   source_twist, target_twist)

    @classmethod
    def from_flat(cls, model, source, target, vec, source_twist=0, target_twist=0):
        return cls(model, source, target, np.asarray(vec).reshape(
            model.size(model.expr(source)), model.size(model.expr(target))), source_twist, target_twist)

    @classmethod
    def from_terms(cls, model, source, target, terms, source_twist=0, target_twist=None):
        """Build from ``[(coeff, (label, ...)), ...]`` with one label per factor.

        When ``target_twist`` is None it is chosen so the result is homogeneous.
        """
        s, t = model.expr(source), model.expr(target)
        full = s + t
        vec = np.zeros(model.size(full), dtype=np.int64)
        for coeff, labels in terms:
            if isinstance(labels, str):
                labels = (labels,)
            if len(labels) != len(full):
                raise ValueError(f"term {labels} does not match expression {full}")
            idx = 0
            for name, lab in zip(full, labels):
                st = model[name]
                idx = idx * st.size + st.index(lab)
            vec[idx] += coeff
        vec %= model.p
        if target_twist is None:
            target_twist = _twist_for(model, full, s, t, vec, source_twist)
        return cls.from_flat(model, s, t, vec, source_twist, target_twist)

    # -- basic properties -------------------------------------------------------
    @property
    def p(self) -> int:
        return self.model.p

    @property
    def expr(self) -> Expr:
        return self.source + self.target

    @property
    def flat(self) -> np.ndarray:
        return self.coeffs.ravel()

    @property
    def total_dim(self) -> int:
        """Dimension of the underlying cycle on source × target."""
        return self.model.dim(self.target) + self.target_twist - self.source_twist

    @property
    def T(self) -> "Correspondence":
        return transpose(self)

    def is_zero(self) -> bool:
        return not self.coeffs.any()

    def is_homogeneous(self) -> bool:
        if self.is_zero():
            return True
        m = self.model
        a, b = np.nonzero(self.coeffs)
        return bool(np.all(m.dims(self.source)[a] + m.dims(self.target)[b] == self.total_dim))

    def is_endo(self) -> bool:
        return self.source == self.target and self.source_twist == self.target_twist

    def shift(self, s: int) -> "Correspondence":
        """Same cycle read as X[i+s] ⇝ Y[j+s]."""
        return Correspondence(self.model, self.source, self.target, self.coeffs,
                              self.source_twist + s, self.target_twist + s)

    def with_twists(self, source_twist: int, target_twist: int) -> "Correspondence":
        return Correspondence(self.model, self.source, self.target, self.coeffs, source_twist, target_twist)

    def _like(self, coeffs) -> "Correspondence":
        return Correspondence(self.model, self.source, self.target, coeffs,
                              self.source_twist, self.target_twist)

    def _check_same(self, other: "Correspondence") -> None:
        if (self.source, self.target) != (other.source, other.target):
            raise ValueError(f"expression mismatch: {self.source}⇝{self.target} vs {other.source}⇝{other.target}")
        if (self.target_twist - self.source_twist) != (other.target_twist - other.source_twist) \
                and not (self.is_zero() or other.is_zero()):
            raise ValueError("adding correspondences of different degrees")

    # -- arithmetic -------------------------------------------------------------
    def __add__(self, other: "Correspondence") -> "Correspondence":
        self._check_same(other)
        return self._like(self.coeffs + other.coeffs)

    def __sub__(self, other: "Correspondence") -> "Correspondence":
        self._check_same(other)
        return self._like(self.coeffs - other.coeffs)

    def __neg__(self) -> "Correspondence":
        return self._like(-self.coeffs)

    def __rmul__(self, scalar: int) -> "Correspondence":
        return self._like(int(scalar) * self.coeffs)

    def __matmul__(self, inner: "Correspondence") -> "Correspondence":
        return compose(self, inner)

    def __pow__(self, n: int) -> "Correspondence":
        if n < 1:
            raise ValueError("only positive powers are defined")
        out = self
        for _ in range(n - 1):
            out = compose(self, out)
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, Correspondence):
            return NotImplemented
        return (self.source == other.source and self.target == other.target
                and self.source_twist == other.source_twist and self.target_twist == other.target_twist
                and bool(np.array_equal(self.coeffs, other.coeffs)))

    def same_cycle(self, other: "Correspondence") -> bool:
        """Equality of the underlying cycles, ignoring twists."""
        return (self.source == other.source and self.target == other.target
                and bool(np.array_equal(self.coeffs, other.coeffs)))

    def __hash__(self) -> int:
        return hash((self.source, self.target, self.source_twist, self.target_twist, self.coeffs.tobytes()))

    def terms(self) -> list:
        labels_s = self.model.labels(self.source)
        labels_t = self.model.labels(self.target)
        a, b = np.nonzero(self.coeffs)
        return [(int(self.coeffs[i, j]), labels_s[i], labels_t[j]) for i, j in zip(a, b)]

    def __repr__(self) -> str:
        src = "×".join(self.source) or "pt"
        tgt = "×".join(self.target) or "pt"
        body = " + ".join(f"{c}·({s} ⊠ {t})" if c != 1 else f"({s} ⊠ {t})" for c, s, t in self.terms()) or "0"
        return f"<{src}[{self.source_twist}] ⇝ {tgt}[{self.target_twist}]: {body}>"


def _twist_for(model: ChowModel, full: Expr, source: Expr, target: Expr, vec, source_twist: int) -> int:
    dims = model.cycle_dims(vec, full)
    if len(dims) > 1:
        raise ValueError(f"inhomogeneous cycle with dimensions {sorted(dims)}")
    total = dims.pop() if dims else model.dim(target)
    return total - model.dim(target) + source_twist


def _retwist(model, source, target, total_dim: int, source_twist: int):
    return source_twist, total_dim - model.dim(target) + source_twist


# --- cycles -------------------------------------------------------------------------

def cycle(model: ChowModel, e, vec, dim: int | None = None) -> Correspondence:
    """A cycle on ``e`` as the correspondence ``pt[codim] ⇝ e[0]``."""
    e = model.expr(e)
    v = ff.as_fp(vec, model.p)
    if dim is None:
        dims = model.cycle_dims(v, e)
        if len(dims) > 1:
            raise ValueError(f"inhomogeneous cycle with dimensions {sorted(dims)}")
        dim = dims.pop() if dims else model.dim(e)
    return Correspondence(model, (), e, v[None, :], model.dim(e) - dim, 0)


def fundamental(model: ChowModel, e) -> Correspondence:
    e = model.expr(e)
    return cycle(model, e, model.fundamental_class(e))


def basis_cycle(model: ChowModel, e, index: int) -> Correspondence:
    e = model.expr(e)
    v = np.zeros(model.size(e), dtype=np.int64)
    v[index] = 1
    return cycle(model, e, v)


def intersection_product(u: Correspondence, v: Correspondence) -> Correspondence:
    if (u.source, u.target) != (v.source, v.target):
        raise ValueError("intersection product of cycles on different expressions")
    m = u.model
    e = u.expr
    prod = m.product(e, u.flat, v.flat)
    total = u.total_dim + v.total_dim - m.dim(e)
    i, j = _retwist(m, u.source, u.target, total, u.source_twist)
    return Correspondence.from_flat(m, u.source, u.target, prod, i, j)


# --- the calculus ------------------------------------------------------------------

def compose(outer: Correspondence, inner: Correspondence) -> Correspondence:
    """``outer ∘ inner`` for ``inner: X[i] ⇝ Y[j]`` and ``outer: Y[j] ⇝ Z[k]``."""
    if inner.target != outer.source:
        raise ValueError(f"cannot compose: inner target {inner.target} != outer source {outer.source}")
    if inner.target_twist != outer.source_twist:
        raise ValueError(f"twist mismatch: inner target twist {inner.target_twist} "
                         f"!= outer source twist {outer.source_twist}")
    m = inner.model
    p = m.p
    g = m.gram(inner.target)
    c = ff.mat_mul(ff.mat_mul(inner.coeffs, g, p), outer.coeffs, p)
    return Correspondence(m, inner.source, outer.target, c, inner.source_twist, outer.target_twist)


def transpose(a: Correspondence) -> Correspondence:
    """Exchange of factors; ``X[i] ⇝ Y[j]`` becomes ``Y[-dim Y - j] ⇝ X[-dim X - i]``."""
    m = a.model
    return Correspondence(m, a.target, a.source, a.coeffs.T,
                          -m.dim(a.target) - a.target_twist, -m.dim(a.source) - a.source_twist)


def external_product(a: Correspondence, b: Correspondence) -> Correspondence:
    """``(X×X')[i+i'] ⇝ (Y×Y')[j+j']`` with coefficients in Kronecker order."""
    m = a.model
    sa, ta = a.coeffs.shape
    sb, tb = b.coeffs.shape
    c = np.einsum("ab,cd->acbd", a.coeffs, b.coeffs).reshape(sa * sb, ta * tb) % m.p
    return Correspondence(m, a.source + b.source, a.target + b.target, c,
                          a.source_twist + b.source_twist, a.target_twist + b.target_twist)


def permute_cycle(model: ChowModel, e: Expr, vec: np.ndarray, order: Sequence[int]) -> tuple:
    """Reorder the factors of a flat cycle on ``e``; factor k of the result is ``e[order[k]]``."""
    order = list(order)
    if sorted(order) != list(range(len(e))):
        raise ValueError(f"invalid permutation {order} for {len(e)} factors")
    shape = model.shape(e)
    t = np.asarray(vec).reshape(shape) if e else np.asarray(vec).reshape(())
    new_e = tuple(e[k] for k in order)
    return new_e, np.ascontiguousarray(np.transpose(t, order)).ravel()


def regroup(a: Correspondence, order: Sequence[int], split: int,
            source_twist: int | None = None) -> Correspondence:
    """View the cycle of ``a`` on a permuted factor list, split as source | target.

    ``order`` permutes the factors of ``a.source + a.target``; the first
    ``split`` factors of the result form the new source. Twists are recomputed
    so the underlying cycle keeps its dimension.
    """
    m = a.model
    e = a.expr
    new_e, vec = permute_cycle(m, e, a.flat, order)
    if not 0 <= split <= len(new_e):
        raise ValueError("split point outside the factor list")
    src, tgt = new_e[:split], new_e[split:]
    i = a.source_twist if source_twist is None else source_twist
    i, j = _retwist(m, src, tgt, a.total_dim, i)
    return Correspondence.from_flat(m, src, tgt, vec, i, j)


def diagonal(model: ChowModel, e, twist: int = 0) -> Correspondence:
    """Class of the diagonal, ``Σ (G⁻¹)[a, b] x_a × x_b``; the identity of ``e[twist]``."""
    e = model.expr(e)
    return Correspondence(model, e, e, model.gram_inverse(e), twist, twist)


def _contract_factors(model: ChowModel, e: Expr, vec: np.ndarray, keep: int, drop: int) -> tuple:
    """Pull back along the diagonal identifying factors ``keep`` and ``drop``."""
    if e[keep] != e[drop]:
        raise ValueError("diagonal pullback needs equal factors")
    t = model.mult(e[keep])
    shape = model.shape(e)
    x = np.asarray(vec, dtype=np.int64).reshape(shape)
    x = np.moveaxis(x, (keep, drop), (0, 1))
    rest = x.shape[2:]
    flat = x.reshape(shape[keep] * shape[drop], -1)
    out = ff.mat_mul(np.ascontiguousarray(t.reshape(shape[keep] * shape[drop], -1).T),
                     np.ascontiguousarray(flat), model.p)
    out = out.reshape((t.shape[2],) + rest)
    new_pos = keep if keep < drop else keep - 1
    out = np.moveaxis(out, 0, new_pos)
    new_e = tuple(n for k, n in enumerate(e) if k != drop)
    return new_e, np.ascontiguousarray(out).ravel()


def contract_pair(model: ChowModel, e: Expr, vec: np.ndarray, keep: int, drop: int) -> tuple:
    return _contract_factors(model, e, vec, keep, drop)


def diag_pullback(t: Correspondence, x) -> Correspondence:
    """Δ* along ``X×Y → X×Y×X``: ``a×b×c ↦ (a·c)×b``.

    ``t`` must live on ``x + y + x`` (any source/target split); the result is
    the correspondence ``X ⇝ Y``.
    """
    m = t.model
    x = m.expr(x)
    e = t.expr
    k = len(x)
    if len(e) < 2 * k or e[:k] != x or e[-k:] != x:
        raise ValueError(f"diag_pullback: expression {e} is not X×Y×X for X={x}")
    vec = t.flat
    cur = e
    # contract factor pairs (q, last block position q); dropping from the end keeps indices stable
    for q in range(k - 1, -1, -1):
        drop = len(cur) - k + q
        cur, vec = _contract_factors(m, cur, vec, q, drop)
    y = e[k:-k]
    total = t.total_dim - m.dim(x)
    src_twist = t.source_twist if t.source[:k] == x else 0
    i, j = _retwist(m, x, y, total, src_twist)
    return Correspondence.from_flat(m, x, y, vec, i, j)


def generic_fiber(t: Correspondence, x) -> Correspondence:
    """ε*: keep the slice whose last factor block is the fundamental class of ``X``.

    ``t`` lives on ``X×Y×X`` (any split); returns ``X ⇝ Y``.
    """
    m = t.model
    x = m.expr(x)
    e = t.expr
    k = len(x)
    if len(e) < k or e[-k:] != x:
        raise ValueError(f"generic_fiber: last factors of {e} are not {x}")
    rest = e[:-k]
    vec = t.flat.reshape(m.size(rest), m.size(x))[:, m.fundamental_index(x)]
    total = t.total_dim - m.dim(x)
    if rest[:k] == x:
        src, tgt = x, rest[k:]
    else:
        src, tgt = (), rest
    i, j = _retwist(m, src, tgt, total, t.source_twist if t.source == src else 0)
    return Correspondence.from_flat(m, src, tgt, vec, i, j)


def act_on_cycle(a: Correspondence, v) -> Correspondence:
    """Push a cycle on the source through ``a``: ``a ∘ v`` with ``v : pt ⇝ X``."""
    m = a.model
    if not isinstance(v, Correspondence):
        v = cycle(m, a.source, v)
    if v.target != a.source or v.source != ():
        raise ValueError("act_on_cycle: cycle does not live on the source of the correspondence")
    v = v.with_twists(v.source_twist + a.source_twist - v.target_twist, a.source_twist)
    return compose(a, v)


def hom_positions(model: ChowModel, source, target, source_twist: int, target_twist: int) -> np.ndarray:
    """Flat indices of ``x_a × y_b`` allowed in ``Hom(X[i], Y[j])``."""
    s, t = model.expr(source), model.expr(target)
    total = model.dim(t) + target_twist - source_twist
    mask = (model.dims(s)[:, None] + model.dims(t)[None, :]) == total
    return np.flatnonzero(mask.ravel())


def random_homogeneous(model: ChowModel, source, target, source_twist: int, target_twist: int,
                       rng: np.random.Generator) -> Correspondence:
    s, t = model.expr(source), model.expr(target)
    vec = np.zeros(model.size(s) * model.size(t), dtype=np.int64)
    pos = hom_positions(model, s, t, source_twist, target_twist)
    vec[pos] = rng.integers(0, model.p, size=pos.size)
    return Correspondence.from_flat(model, s, t, vec, source_twist, target_twist)
