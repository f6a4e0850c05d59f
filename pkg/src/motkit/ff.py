"""Exact dense linear algebra over a prime field GF(p).

Matrices are plain ``numpy.int64`` arrays with entries reduced to ``[0, p)``.
The modulus travels explicitly with every call; there is no global field.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import _kernels

# n * (p-1)**2 must fit in int64 for the unreduced dot products
MAX_PRIME = 1 << 20


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


def check_prime(p: int) -> int:
    p = int(p)
    if not is_prime(p):
        raise ValueError(f"modulus {p} is not prime")
    if p >= MAX_PRIME:
        raise ValueError(f"modulus {p} too large (limit {MAX_PRIME})")
    return p


def as_fp(a, p: int) -> np.ndarray:
    """Copy ``a`` into a contiguous int64 array reduced mod p."""
    return np.ascontiguousarray(np.asarray(a, dtype=np.int64) % p)


def inv_mod(a: int, p: int) -> int:
    a = int(a) % p
    if a == 0:
        raise ZeroDivisionError("0 has no inverse mod p")
    return pow(a, p - 2, p)


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.int64)


def mat_mul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    if a.ndim != 2 or b.ndim != 2:
        raise ValueError("mat_mul expects 2-d arrays")
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"dimension mismatch: {a.shape} x {b.shape}")
    if a.size == 0 or b.size == 0:
        return np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    return _kernels.matmul(np.ascontiguousarray(a, dtype=np.int64),
                           np.ascontiguousarray(b, dtype=np.int64), p)


def mat_pow(m: np.ndarray, e: int, p: int) -> np.ndarray:
    result = identity(m.shape[0])
    base = m
    while e:
        if e & 1:
            result = mat_mul(result, base, p)
        e >>= 1
        if e:
            base = mat_mul(base, base, p)
    return result


def rref(m: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
    """Reduced row-echelon form; returns (nonzero rows, pivot columns)."""
    m = np.asarray(m, dtype=np.int64)
    if m.ndim != 2:
        raise ValueError("rref expects a 2-d array")
    if m.shape[0] == 0 or m.shape[1] == 0:
        return np.zeros((0, m.shape[1]), dtype=np.int64), np.zeros(0, dtype=np.int64)
    r, piv = _kernels.rref(m, p)
    return np.ascontiguousarray(r[: len(piv)]), np.asarray(piv, dtype=np.int64)


def rank(m: np.ndarray, p: int) -> int:
    return len(rref(m, p)[1])


def nullspace(m: np.ndarray, p: int) -> np.ndarray:
    """Basis (as rows) of the right kernel ``{x : m @ x = 0}``."""
    m = np.asarray(m, dtype=np.int64)
    ncols = m.shape[1]
    r, piv = rref(m, p)
    free = [c for c in range(ncols) if c not in set(piv.tolist())]
    basis = np.zeros((len(free), ncols), dtype=np.int64)
    for k, c in enumerate(free):
        basis[k, c] = 1
        for row, pc in enumerate(piv):
            basis[k, pc] = (-r[row, c]) % p
    return basis


def left_nullspace(m: np.ndarray, p: int) -> np.ndarray:
    """Basis (as rows) of ``{y : y @ m = 0}``."""
    return nullspace(np.asarray(m).T, p)


def solve_linear(a: np.ndarray, target: np.ndarray, p: int):
    """Solve ``a @ x = target``.

    Returns ``(x, kernel)`` where ``x`` is one particular solution (free
    variables set to zero) or ``None`` when the system is inconsistent, and
    ``kernel`` holds a basis of ker(a) as rows. ``target`` may be a vector or a
    matrix of several right-hand sides.
    """
    a = np.asarray(a, dtype=np.int64) % p
    t = np.asarray(target, dtype=np.int64) % p
    vec = t.ndim == 1
    if vec:
        t = t[:, None]
    if a.shape[0] != t.shape[0]:
        raise ValueError(f"row mismatch: {a.shape} vs {t.shape}")
    ncols = a.shape[1]
    kernel = nullspace(a, p)
    aug = np.concatenate([a, t], axis=1)
    r, piv = rref(aug, p)
    if len(piv) and piv[-1] >= ncols:
        return None, kernel
    x = np.zeros((ncols, t.shape[1]), dtype=np.int64)
    for row, pc in enumerate(piv):
        x[pc] = r[row, ncols:]
    return (x[:, 0] if vec else x), kernel


def inverse(m: np.ndarray, p: int) -> np.ndarray:
    n = m.shape[0]
    if m.shape != (n, n):
        raise ValueError("inverse of a non-square matrix")
    r, piv = rref(np.concatenate([np.asarray(m, dtype=np.int64), identity(n)], axis=1), p)
    if len(piv) < n or piv[n - 1] >= n:
        raise ZeroDivisionError("matrix is singular mod p")
    return np.ascontiguousarray(r[:, n:])


@dataclass(frozen=True, eq=False)
class Subspace:
    """A subspace of GF(p)^n held by its reduced row-echelon basis.

    Two subspaces are equal exactly when their canonical bases are equal.
    """

    p: int
    ambient: int
    basis: np.ndarray
    pivots: np.ndarray

    @classmethod
    def span(cls, vectors, p: int, ambient: Optional[int] = None) -> "Subspace":
        v = np.asarray(vectors, dtype=np.int64)
        if v.ndim == 1:
            v = v[None, :] if v.size else np.zeros((0, ambient or 0), dtype=np.int64)
        if ambient is None:
            ambient = v.shape[1]
        if v.shape[0] == 0:
            v = np.zeros((0, ambient), dtype=np.int64)
        if v.shape[1] != ambient:
            raise ValueError(f"ambient mismatch: vectors of length {v.shape[1]}, expected {ambient}")
        r, piv = rref(v, p)
        r.setflags(write=False)
        piv.setflags(write=False)
        return cls(p, ambient, r, piv)

    @classmethod
    def zero(cls, ambient: int, p: int) -> "Subspace":
        return cls.span(np.zeros((0, ambient), dtype=np.int64), p, ambient)

    @classmethod
    def full(cls, ambient: int, p: int) -> "Subspace":
        return cls.span(identity(ambient), p, ambient)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def _check(self, other: "Subspace") -> None:
        if other.ambient != self.ambient or other.p != self.p:
            raise ValueError("ambient mismatch between subspaces")

    def __add__(self, other: "Subspace") -> "Subspace":
        self._check(other)
        if other.dim == 0:
            return self
        if self.dim == 0:
            return other
        return Subspace.span(np.concatenate([self.basis, other.basis]), self.p, self.ambient)

    def __and__(self, other: "Subspace") -> "Subspace":
        return self.intersect(other)

    def intersect(self, other: "Subspace") -> "Subspace":
        self._check(other)
        if self.dim == 0 or other.dim == 0:
            return Subspace.zero(self.ambient, self.p)
        # x = a@B1 = b@B2  <=>  (a, -b) in left kernel of [B1; B2]
        stacked = np.concatenate([self.basis, other.basis])
        ker = left_nullspace(stacked, self.p)
        vecs = mat_mul(ker[:, : self.dim], self.basis, self.p) if len(ker) else ker[:, :0]
        return Subspace.span(vecs.reshape(-1, self.ambient), self.p, self.ambient)

    def extend(self, vectors) -> "Subspace":
        v = np.asarray(vectors, dtype=np.int64).reshape(-1, self.ambient)
        if v.shape[0] == 0:
            return self
        return Subspace.span(np.concatenate([self.basis, v]), self.p, self.ambient)

    def reduce(self, v: np.ndarray) -> np.ndarray:
        """Remainder of ``v`` (vector or rows) modulo this subspace."""
        v = np.array(v, dtype=np.int64) % self.p
        single = v.ndim == 1
        if single:
            v = v[None, :]
        for row, pc in enumerate(self.pivots):
            f = v[:, pc].copy()
            if f.any():
                v = (v - np.outer(f, self.basis[row])) % self.p
        return v[0] if single else v

    def contains(self, v) -> bool:
        return not self.reduce(v).any()

    def __contains__(self, v) -> bool:
        return self.contains(v)

    def contains_space(self, other: "Subspace") -> bool:
        self._check(other)
        return other.dim == 0 or not self.reduce(other.basis).any()

    def coords(self, v) -> np.ndarray:
        """Coordinates of ``v`` (vector or rows) in the canonical basis."""
        v = np.asarray(v, dtype=np.int64) % self.p
        single = v.ndim == 1
        if single:
            v = v[None, :]
        c = v[:, self.pivots] if self.dim else np.zeros((v.shape[0], 0), dtype=np.int64)
        if self.reduce(v).any() or (self.dim and (mat_mul(c, self.basis, self.p) != v).any()):
            raise ValueError("vector not in subspace")
        return c[0] if single else c

    def complement_coords(self) -> np.ndarray:
        """Non-pivot coordinate positions, i.e. a basis of a complement."""
        piv = set(self.pivots.tolist())
        return np.array([c for c in range(self.ambient) if c not in piv], dtype=np.int64)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return (self.p == other.p and self.ambient == other.ambient
                and self.basis.shape == other.basis.shape
                and bool(np.array_equal(self.basis, other.basis)))

    def __hash__(self) -> int:
        return hash((self.p, self.ambient, self.basis.tobytes()))

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}, ambient={self.ambient}, p={self.p})"


# --- polynomials: coefficient lists, lowest degree first ---------------------

def poly_trim(f: Sequence[int]) -> list[int]:
    f = list(f)
    while f and f[-1] == 0:
        f.pop()
    return f


def poly_mul(f: Sequence[int], g: Sequence[int], p: int) -> list[int]:
    if not f or not g:
        return []
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] = (out[i + j] + a * b) % p
    return poly_trim(out)


def poly_divmod(f: Sequence[int], g: Sequence[int], p: int) -> tuple[list[int], list[int]]:
    f = poly_trim([c % p for c in f])
    g = poly_trim([c % p for c in g])
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    inv = inv_mod(g[-1], p)
    q = [0] * max(len(f) - len(g) + 1, 0)
    r = list(f)
    while len(r) >= len(g) and r:
        shift = len(r) - len(g)
        c = (r[-1] * inv) % p
        q[shift] = c
        for i, b in enumerate(g):
            r[shift + i] = (r[shift + i] - c * b) % p
        r = poly_trim(r)
    return poly_trim(q), r


def poly_gcdex(f: Sequence[int], g: Sequence[int], p: int):
    """Return (d, s, t) with s*f + t*g = d, d monic."""
    r0, r1 = poly_trim([c % p for c in f]), poly_trim([c % p for c in g])
    s0, s1 = [1], []
    t0, t1 = [], [1]
    while r1:
        q, r = poly_divmod(r0, r1, p)
        r0, r1 = r1, r
        s0, s1 = s1, poly_sub(s0, poly_mul(q, s1, p), p)
        t0, t1 = t1, poly_sub(t0, poly_mul(q, t1, p), p)
    if not r0:
        return [], s0, t0
    inv = inv_mod(r0[-1], p)
    scale = lambda h: poly_trim([(c * inv) % p for c in h])  # noqa: E731
    return scale(r0), scale(s0), scale(t0)


def poly_sub(f: Sequence[int], g: Sequence[int], p: int) -> list[int]:
    n = max(len(f), len(g))
    out = [((f[i] if i < len(f) else 0) - (g[i] if i < len(g) else 0)) % p for i in range(n)]
    return poly_trim(out)


def poly_pow(f: Sequence[int], e: int, p: int) -> list[int]:
    out = [1]
    for _ in range(e):
        out = poly_mul(out, f, p)
    return out


def factor_poly(f: Sequence[int], p: int) -> list[tuple[list[int], int]]:
    """Factor a monic polynomial into (monic irreducible, multiplicity) pairs."""
    from sympy import ZZ
    from sympy.polys.galoistools import gf_factor

    high_first = [int(c) % p for c in reversed(poly_trim(f))]
    _, factors = gf_factor(high_first, p, ZZ)
    out = [([int(c) % p for c in reversed(g)], int(k)) for g, k in factors]
    out.sort(key=lambda gk: (len(gk[0]), gk[0]))
    return out


def min_poly(m: np.ndarray, p: int) -> list[int]:
    """Monic minimal polynomial of a square matrix, lowest degree first."""
    m = as_fp(m, p)
    n = m.shape[0]
    if m.shape != (n, n):
        raise ValueError("min_poly of a non-square matrix")
    return min_poly_of_powers(identity(n).ravel(), lambda x: mat_mul(x.reshape(n, n), m, p).ravel(), p)


def min_poly_of_powers(one: np.ndarray, times, p: int) -> list[int]:
    """Find the first linear dependency among one, x, x^2, ... .

    ``times`` maps the flattened power x^k to x^(k+1).
    """
    powers = [np.asarray(one, dtype=np.int64) % p]
    space = Subspace.zero(len(powers[0]), p)
    while True:
        cur = powers[-1]
        if space.contains(cur):
            # solve cur = sum c_k powers[k]
            a = np.stack(powers[:-1], axis=1)
            x, _ = solve_linear(a, cur, p)
            assert x is not None
            return [int(-c) % p for c in x] + [1]
        space = space.extend(cur)
        powers.append(np.asarray(times(cur), dtype=np.int64) % p)
