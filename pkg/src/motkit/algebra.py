"""Finite-dimensional associative algebras over GF(p).

An algebra is given by structure constants ``C[i, j, k]`` (``b_i b_j = Σ_k C[i,j,k] b_k``)
and the coordinates of its unit. Elements are coordinate vectors. The module
provides eventual powers, the Jacobson radical, idempotent lifting and the
splitting of an idempotent into primitive orthogonal ones.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import ff
from .errors import VerificationError


class FiniteAlgebra:
    def __init__(self, p: int, consts: np.ndarray, unit: np.ndarray):
        self.p = p
        self.C = ff.as_fp(consts, p)
        self.n = self.C.shape[0]
        if self.C.shape != (self.n, self.n, self.n):
            raise ValueError("structure constants must have shape (n, n, n)")
        self.unit = ff.as_fp(unit, p).reshape(self.n)

    @classmethod
    def from_basis(cls, basis: np.ndarray, mul: Callable, unit_vec: np.ndarray, p: int) -> "FiniteAlgebra":
        """Algebra spanned by the rows of ``basis`` under ``mul``; returns ``(algebra, span)``."""
        space = ff.Subspace.span(basis, p)
        b = space.basis
        n = b.shape[0]
        consts = np.zeros((n, n, n), dtype=np.int64)
        for i in range(n):
            for j in range(n):
                consts[i, j] = space.coords(mul(b[i], b[j]))
        return cls(p, consts, space.coords(unit_vec)), space

    # -- arithmetic ----------------------------------------------------------------
    def mul(self, x, y) -> np.ndarray:
        return np.einsum("i,j,ijk->k", x, y, self.C) % self.p

    def mul_many(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        """Row-wise products of two stacks of elements."""
        return np.einsum("ni,nj,ijk->nk", xs, ys, self.C) % self.p

    def left_matrix(self, x) -> np.ndarray:
        """``L`` with ``x·y = y @ L``."""
        return np.einsum("i,ijk->jk", x, self.C) % self.p

    def right_matrix(self, x) -> np.ndarray:
        return np.einsum("j,ijk->ik", x, self.C) % self.p

    def power(self, x, k: int) -> np.ndarray:
        if k < 1:
            return self.unit.copy()
        out = np.asarray(x) % self.p
        for _ in range(k - 1):
            out = self.mul(out, x)
        return out

    def zero(self) -> np.ndarray:
        return np.zeros(self.n, dtype=np.int64)

    def is_commutative(self) -> bool:
        return bool(np.array_equal(self.C, self.C.transpose(1, 0, 2)))

    def center(self) -> ff.Subspace:
        # x central iff x b_j = b_j x for all j: Σ_i x_i (C[i,j,:] - C[j,i,:]) = 0
        d = (self.C - self.C.transpose(1, 0, 2)) % self.p
        return ff.Subspace.span(ff.left_nullspace(d.reshape(self.n, -1), self.p), self.p, self.n)

    def product_space(self, s: ff.Subspace, t: ff.Subspace) -> ff.Subspace:
        if s.dim == 0 or t.dim == 0:
            return ff.Subspace.zero(self.n, self.p)
        prods = np.einsum("si,tj,ijk->stk", s.basis, t.basis, self.C) % self.p
        return ff.Subspace.span(prods.reshape(-1, self.n), self.p, self.n)

    def is_ideal(self, j: ff.Subspace) -> bool:
        full = ff.Subspace.full(self.n, self.p)
        return j.contains_space(self.product_space(full, j)) and j.contains_space(self.product_space(j, full))

    def is_nilpotent_space(self, s: ff.Subspace) -> bool:
        cur = s
        for _ in range(self.n + 1):
            if cur.dim == 0:
                return True
            cur = self.product_space(cur, s)
        return cur.dim == 0

    def quotient(self, j: ff.Subspace) -> "FiniteAlgebra":
        """``A/J`` on the complement spanned by the non-pivot coordinates of ``J``."""
        comp = j.complement_coords()
        r = comp.size
        consts = np.zeros((r, r, r), dtype=np.int64)
        for a, ia in enumerate(comp):
            for b, ib in enumerate(comp):
                consts[a, b] = j.reduce(self.C[ia, ib])[comp]
        return FiniteAlgebra(self.p, consts, j.reduce(self.unit)[comp]), comp

    def subalgebra(self, basis: np.ndarray, unit: np.ndarray):
        """Subalgebra spanned by ``basis`` (rows in A-coordinates) with the given unit."""
        return FiniteAlgebra.from_basis(basis, self.mul, unit, self.p)


# --- eventual powers -------------------------------------------------------------------

@dataclass
class IdempotentPower:
    n: int
    e: object
    m: int
    r: int

    @property
    def trivial(self) -> bool:
        e = self.e
        return bool(not (e.coeffs if hasattr(e, "coeffs") else np.asarray(e)).any())


def idempotent_power(x, mul: Callable, key: Callable = None, limit: int = 1 << 20) -> IdempotentPower:
    """Smallest ``m, r`` with ``x^m = x^(m+r)``; ``e = x^n`` for the least multiple ``n ≥ m`` of ``r``.

    ``e`` is idempotent. ``key`` turns an element into a hashable value.
    """
    if key is None:
        key = _default_key
    seen = {}
    powers = []
    cur = x
    k = 1
    while True:
        h = key(cur)
        if h in seen:
            m = seen[h]
            r = k - m
            n = r * max(1, math.ceil(m / r))
            return IdempotentPower(n, powers[n - 1] if n - 1 < len(powers) else _pow_from(powers, n, mul), m, r)
        seen[h] = k
        powers.append(cur)
        if k >= limit:
            raise RuntimeError("eventual period exceeds the search limit")
        cur = mul(cur, x)
        k += 1


def _pow_from(powers, n, mul):
    x = powers[0]
    cur = powers[-1]
    for _ in range(n - len(powers)):
        cur = mul(cur, x)
    return cur


def _default_key(v):
    if hasattr(v, "coeffs"):
        return v.coeffs.tobytes()
    return np.asarray(v, dtype=np.int64).tobytes()


# --- Jacobson radical -----------------------------------------------------------------

def _int_matpow_mod(m: np.ndarray, e: int, modulus: int) -> np.ndarray:
    n = m.shape[0]
    big = modulus * modulus * max(n, 1) >= (1 << 62)
    dtype = object if big else np.int64
    base = np.asarray(m, dtype=dtype) % modulus
    out = np.eye(n, dtype=np.int64).astype(dtype)
    while e:
        if e & 1:
            out = (out @ base) % modulus
        e >>= 1
        if e:
            base = (base @ base) % modulus
    return out


def radical_trace(alg: FiniteAlgebra) -> ff.Subspace:
    """Radical by iterated p-power trace forms (Cohen–Ivanyos–Wales style)."""
    p, n = alg.p, alg.n
    if n == 0:
        return ff.Subspace.zero(0, p)
    l_max = 0
    while p ** (l_max + 1) <= n:
        l_max += 1
    current = ff.Subspace.full(n, p)
    basis_all = ff.identity(n)
    for i in range(l_max + 1):
        if current.dim == 0:
            break
        q = p ** i
        modulus = p ** (i + 1)
        g = np.zeros((current.dim, n), dtype=np.int64)
        for s, u in enumerate(current.basis):
            for k, b in enumerate(basis_all):
                mat = alg.left_matrix(alg.mul(u, b))
                tr = int(np.trace(_int_matpow_mod(mat, q, modulus))) % modulus
                g[s, k] = (tr // q) % p
        ker = ff.left_nullspace(g, p)
        if ker.shape[0] == 0:
            current = ff.Subspace.zero(n, p)
        else:
            current = ff.Subspace.span(ff.mat_mul(ker, current.basis, p), p, n)
    return current


BRUTE_FORCE_LIMIT = 1 << 12


def radical_brute_force(alg: FiniteAlgebra) -> ff.Subspace:
    """``J = {a : aA is nilpotent}`` by enumerating the algebra; tiny algebras only."""
    p, n = alg.p, alg.n
    if p ** n > BRUTE_FORCE_LIMIT:
        raise ValueError(f"algebra with {p}^{n} elements is too large to enumerate")
    full = ff.Subspace.full(n, p)
    found = ff.Subspace.zero(n, p)
    for coeffs in itertools.product(range(p), repeat=n):
        a = np.array(coeffs, dtype=np.int64)
        if not a.any() or found.contains(a):
            continue
        right = alg.product_space(ff.Subspace.span(a, p, n), full)
        if alg.is_nilpotent_space(right):
            found = found.extend(a)
    return found


def verify_radical(alg: FiniteAlgebra, j: ff.Subspace, check_quotient: bool = True) -> Optional[str]:
    if not alg.is_ideal(j):
        return "not a two-sided ideal"
    if not alg.is_nilpotent_space(j):
        return "not nilpotent"
    if check_quotient and j.dim < alg.n:
        quot, _ = alg.quotient(j)
        if radical_trace(quot).dim != 0:
            return "quotient has a nonzero radical"
    return None


def jacobson_radical(alg: FiniteAlgebra, method: str = "auto") -> ff.Subspace:
    """Largest nilpotent two-sided ideal, post-verified.

    ``auto`` runs the trace method, verifies the result and falls back to
    enumeration if verification fails (raising if that is impossible).
    """
    if method == "brute":
        return radical_brute_force(alg)
    j = radical_trace(alg)
    if method == "trace":
        return j
    problem = verify_radical(alg, j)
    if problem is None:
        return j
    if alg.p ** alg.n <= BRUTE_FORCE_LIMIT:
        j = radical_brute_force(alg)
        if verify_radical(alg, j) is None:
            return j
    raise VerificationError(f"radical computation failed verification: {problem}")


# --- idempotents ------------------------------------------------------------------------

def lift_idempotent(alg: FiniteAlgebra, e: np.ndarray, max_iter: int = 64) -> np.ndarray:
    """Iterate ``e ← 3e² - 2e³`` until ``e² = e``; ``e² - e`` must be nilpotent."""
    p = alg.p
    e = np.asarray(e, dtype=np.int64) % p
    for _ in range(max_iter):
        e2 = alg.mul(e, e)
        if np.array_equal(e2, e):
            return e
        e3 = alg.mul(e2, e)
        e = (3 * e2 - 2 * e3) % p
    raise VerificationError("idempotent lifting did not converge (e² - e not nilpotent?)")


def _poly_eval(alg: FiniteAlgebra, poly, x) -> np.ndarray:
    out = alg.zero()
    for c in reversed(ff.poly_trim(poly) or [0]):
        out = (alg.mul(out, x) + c * alg.unit) % alg.p
    return out


def _berlekamp_kernel(alg: FiniteAlgebra) -> ff.Subspace:
    """``{x : x^p = x}`` for a commutative algebra (a linear condition)."""
    n, p = alg.n, alg.p
    frob = np.array([alg.power(b, p) for b in ff.identity(n)]) if n else np.zeros((0, 0), dtype=np.int64)
    return ff.Subspace.span(ff.left_nullspace((frob - ff.identity(n)) % p, p), p, n)


def is_field(alg: FiniteAlgebra) -> bool:
    """A semisimple algebra is a field iff it is commutative with a 1-dimensional Berlekamp kernel."""
    return alg.n > 0 and alg.is_commutative() and _berlekamp_kernel(alg).dim == 1


def _split_commutative(alg: FiniteAlgebra) -> Optional[np.ndarray]:
    """A nontrivial idempotent of a commutative semisimple algebra, or None."""
    ker = _berlekamp_kernel(alg)
    p = alg.p
    for x in ker.basis:
        poly = ff.min_poly_of_powers(alg.unit, lambda y: alg.mul(y, x), p)
        roots = [r for r in range(p) if sum(c * pow(r, k, p) for k, c in enumerate(poly)) % p == 0]
        if len(roots) < 2:
            continue
        lam = roots[0]
        num = [1]
        den = 1
        for mu in roots[1:]:
            num = ff.poly_mul(num, [-mu % p, 1], p)
            den = den * (lam - mu) % p
        inv = ff.inv_mod(den, p)
        return _poly_eval(alg, [c * inv % p for c in num], x)
    return None


def _crt_idempotent(alg: FiniteAlgebra, x: np.ndarray) -> Optional[np.ndarray]:
    """Idempotent from coprime factors of the minimal polynomial of ``x``."""
    p = alg.p
    poly = ff.min_poly_of_powers(alg.unit, lambda y: alg.mul(y, x), p)
    factors = ff.factor_poly(poly, p)
    if len(factors) < 2:
        return None
    f0, k0 = factors[0]
    g = ff.poly_pow(f0, k0, p)
    h, rem = ff.poly_divmod(poly, g, p)
    assert not ff.poly_trim(rem)
    # s g + t h = 1; t h ≡ 1 mod g and ≡ 0 mod h
    _, s, t = ff.poly_gcdex(g, h, p)
    return _poly_eval(alg, ff.poly_mul(t, h, p), x)


def split_semisimple(alg: FiniteAlgebra, rng: np.random.Generator, tries: int = 256) -> Optional[np.ndarray]:
    """Nontrivial idempotent of a semisimple algebra, or None when it is a field."""
    if alg.is_commutative():
        return _split_commutative(alg)
    center = alg.center()
    if center.dim > 1:
        zalg, zspace = alg.subalgebra(center.basis, alg.unit)
        ez = _split_commutative(zalg)
        if ez is not None:
            return ff.mat_mul(ez[None, :], zspace.basis, alg.p)[0]
    for _ in range(tries):
        x = rng.integers(0, alg.p, size=alg.n)
        e = _crt_idempotent(alg, x)
        if e is not None:
            return e
    raise VerificationError("failed to split a noncommutative semisimple algebra")


@dataclass
class PrimitiveIdempotent:
    element: np.ndarray
    corner_dim: int
    certificate: str


def corner(alg: FiniteAlgebra, e: np.ndarray):
    """``eAe`` as an algebra with unit ``e`` plus its basis in A-coordinates."""
    n, p = alg.n, alg.p
    rows = np.array([alg.mul(alg.mul(e, b), e) for b in ff.identity(n)]).reshape(-1, n)
    span = ff.Subspace.span(rows, p, n)
    sub, space = alg.subalgebra(span.basis, e)
    return sub, space


def _certify_by_enumeration(sub: FiniteAlgebra) -> bool:
    """True iff 0 and 1 are the only idempotents of ``sub``."""
    p, n = sub.p, sub.n
    chunk = 1 << 14
    it = itertools.product(range(p), repeat=n)
    while True:
        block = np.array(list(itertools.islice(it, chunk)), dtype=np.int64)
        if block.size == 0:
            return True
        sq = sub.mul_many(block, block)
        idem = np.all(sq == block, axis=1)
        for row in block[idem]:
            if row.any() and not np.array_equal(row, sub.unit):
                return False


def primitive_decomposition(alg: FiniteAlgebra, e: Optional[np.ndarray] = None, seed: int = 0,
                            certify_bound: int = 1 << 20) -> list:
    """Orthogonal primitive idempotents summing to ``e`` (default: the unit)."""
    rng = np.random.default_rng(seed)
    p = alg.p
    start = alg.unit if e is None else np.asarray(e, dtype=np.int64) % p
    if not start.any():
        return []
    out = []
    stack = [start]
    while stack:
        f = stack.pop()
        sub, space = corner(alg, f)
        j = jacobson_radical(sub)
        quot, comp = sub.quotient(j)
        if is_field(quot):
            if p ** sub.n <= certify_bound:
                if not _certify_by_enumeration(sub):
                    raise VerificationError("corner algebra has a nontrivial idempotent after all")
                cert = f"enumerated all {p}^{sub.n} elements of eAe"
            else:
                cert = "eAe modulo its radical is a field"
            out.append(PrimitiveIdempotent(f, sub.n, cert))
            continue
        ebar = split_semisimple(quot, rng)
        if ebar is None:
            raise VerificationError("semisimple quotient neither a field nor splittable")
        pre = np.zeros(sub.n, dtype=np.int64)
        pre[comp] = ebar
        g_sub = lift_idempotent(sub, pre)
        g = ff.mat_mul(g_sub[None, :], space.basis, p)[0]
        h = (f - g) % p
        if not g.any() or not h.any():
            raise VerificationError("splitting produced a trivial idempotent")
        stack.append(h)
        stack.append(g)
    return out
