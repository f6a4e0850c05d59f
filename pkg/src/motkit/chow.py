"""Split Chow rings: graded bases, structure constants and the degree pairing.

A :class:`SplitChowStructure` is input data (labels, dimensions, integer
structure constants, degree functional). A :class:`ChowModel` binds a set of
structures to a prime ``p`` and answers questions about formal products of
them ("expressions", tuples of structure names; the empty tuple is the point).
Product bases are ordered lexicographically, i.e. Kronecker order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import ff
from .errors import StructureError

Expr = tuple  # tuple[str, ...]


@dataclass(frozen=True)
class SplitChowStructure:
    name: str
    labels: tuple
    dims: tuple
    dim: int
    products: tuple  # (a, b, c, coeff) integer triples: x_a * x_b = sum coeff * x_c
    degree: tuple  # (index, value) pairs on dimension-0 classes
    fundamental_index: int

    def __post_init__(self):
        # canonical form, so equality does not depend on how the data was listed
        object.__setattr__(self, "products", _merge_terms(self.products, 3))
        object.__setattr__(self, "degree", _merge_terms(self.degree, 1))

    @property
    def size(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"{self.name}: unknown basis label {label!r}") from None


def _merge_terms(rows, width: int) -> tuple:
    """Sum coefficients of repeated keys (the first ``width`` entries), drop zeros, sort."""
    acc: dict = {}
    for row in rows:
        key = tuple(int(x) for x in row[:width])
        acc[key] = acc.get(key, 0) + int(row[width])
    return tuple(sorted(key + (c,) for key, c in acc.items() if c))


@dataclass
class ValidationReport:
    name: str
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __str__(self) -> str:
        if self.ok:
            return f"{self.name}: pass"
        return f"{self.name}: fail: " + "; ".join(self.violations)


def mult_tensor(s: SplitChowStructure, p: int) -> np.ndarray:
    n = s.size
    t = np.zeros((n, n, n), dtype=np.int64)
    for a, b, c, coeff in s.products:
        t[a, b, c] = (t[a, b, c] + coeff) % p
    return t


def degree_vector(s: SplitChowStructure, p: int) -> np.ndarray:
    d = np.zeros(s.size, dtype=np.int64)
    for i, v in s.degree:
        d[i] = (d[i] + v) % p
    return d


def validate_structure(s: SplitChowStructure, p: int) -> ValidationReport:
    """Check every structural invariant exhaustively; never raises."""
    rep = ValidationReport(s.name)
    v = rep.violations
    n = s.size
    if len(s.dims) != n:
        v.append("labels and dims differ in length")
        return rep
    if len(set(s.labels)) != n:
        v.append("duplicate basis labels")
    if any(d < 0 or d > s.dim for d in s.dims):
        v.append("basis dimension outside [0, D]")
    tops = [i for i, d in enumerate(s.dims) if d == s.dim]
    if len(tops) > 1:
        v.append("multiple top classes")
    elif not tops:
        v.append("no top class")
    if not 0 <= s.fundamental_index < n or s.dims[s.fundamental_index] != s.dim:
        v.append("fundamental class is not the top-dimensional class")
    for a, b, c, _ in s.products:
        if not (0 <= a < n and 0 <= b < n and 0 <= c < n):
            v.append(f"structure constant index out of range: {(a, b, c)}")
            return rep
    for i, _ in s.degree:
        if not 0 <= i < n:
            v.append(f"degree index out of range: {i}")
            return rep
    t = mult_tensor(s, p)
    deg = degree_vector(s, p)
    if any(deg[i] and s.dims[i] != 0 for i in range(n)):
        v.append("degree functional is nonzero off dimension 0")
    dims = np.array(s.dims)
    bad_grade = [(a, b, c) for a, b, c in zip(*np.nonzero(t))
                 if dims[c] != dims[a] + dims[b] - s.dim]
    if bad_grade:
        v.append(f"product not graded at {tuple(int(x) for x in bad_grade[0])}")
    if not np.array_equal(t, t.transpose(1, 0, 2)):
        v.append("product not commutative")
    # (x_a x_b) x_c == x_a (x_b x_c) for all triples
    left = np.einsum("abk,kcl->abcl", t, t) % p
    right = np.einsum("bck,akl->abcl", t, t) % p
    if not np.array_equal(left, right):
        v.append("product not associative")
    if 0 <= s.fundamental_index < n:
        unit = t[s.fundamental_index]
        if not np.array_equal(unit, ff.identity(n)):
            v.append("fundamental class is not the unit")
    gram = (np.einsum("abc,c->ab", t, deg) % p) if n else np.zeros((0, 0), dtype=np.int64)
    if n and ff.rank(gram, p) < n:
        v.append("Ψ degenerate")
    return rep


# --- builders -----------------------------------------------------------------

def point_structure(name: str = "pt") -> SplitChowStructure:
    return SplitChowStructure(name, ("1",), (0,), 0, ((0, 0, 0, 1),), ((0, 1),), 0)


def projective_space(n: int, name: str | None = None) -> SplitChowStructure:
    """P^n: classes e_0..e_n with dim e_k = k and e_a e_b = e_{a+b-n}."""
    if n < 0:
        raise ValueError("projective space of negative dimension")
    labels = tuple(f"e{k}" for k in range(n + 1))
    prods = tuple((a, b, a + b - n, 1) for a in range(n + 1) for b in range(n + 1) if a + b >= n)
    return SplitChowStructure(name or f"P{n}", labels, tuple(range(n + 1)), n, prods, ((0, 1),), n)


def split_quadric_odd(d: int, name: str | None = None) -> SplitChowStructure:
    """Split smooth quadric of odd dimension d.

    Basis in increasing dimension: l_0..l_m, h^m..h^0 with m = (d-1)/2,
    dim l_j = j and dim h^i = d - i.
    """
    if d < 1 or d % 2 == 0:
        raise ValueError("middle-dimension split classes unsupported" if d % 2 == 0 and d > 0
                         else "quadric dimension must be a positive odd integer")
    m = (d - 1) // 2
    labels = tuple(f"l{j}" for j in range(m + 1)) + tuple(f"h{i}" for i in range(m, -1, -1))
    dims = tuple(range(m + 1)) + tuple(d - i for i in range(m, -1, -1))
    l_ = lambda j: j  # noqa: E731
    h_ = lambda i: m + 1 + (m - i)  # noqa: E731
    prods = []
    for i in range(m + 1):
        for j in range(m + 1):
            if i + j <= m:
                prods.append((h_(i), h_(j), h_(i + j), 1))
            else:
                prods.append((h_(i), h_(j), l_(d - i - j), 2))
    for i in range(m + 1):
        for j in range(m + 1):
            if j >= i:
                prods.append((h_(i), l_(j), l_(j - i), 1))
                prods.append((l_(j), h_(i), l_(j - i), 1))
    return SplitChowStructure(name or f"Q{d}", labels, dims, d, tuple(prods), ((0, 1),), h_(0))


def two_point_structure(name: str = "TwoPt") -> SplitChowStructure:
    """Spec of a split quadratic étale algebra: two disjoint points."""
    return SplitChowStructure(name, ("p1", "p2"), (0, 0), 0,
                              ((0, 0, 0, 1), (1, 1, 1, 1)), ((0, 1), (1, 1)), 0)


def tensor_product(a: SplitChowStructure, b: SplitChowStructure,
                   name: str | None = None) -> SplitChowStructure:
    nb = b.size
    labels = tuple(f"{x}*{y}" for x in a.labels for y in b.labels)
    dims = tuple(x + y for x in a.dims for y in b.dims)
    prods: dict = {}
    for a1, a2, a3, c1 in a.products:
        for b1, b2, b3, c2 in b.products:
            key = (a1 * nb + b1, a2 * nb + b2, a3 * nb + b3)
            prods[key] = prods.get(key, 0) + c1 * c2
    degree = tuple((i * nb + j, u * w) for i, u in a.degree for j, w in b.degree)
    return SplitChowStructure(
        name or f"{a.name}x{b.name}", labels, dims, a.dim + b.dim,
        tuple((k[0], k[1], k[2], v) for k, v in sorted(prods.items()) if v),
        degree, a.fundamental_index * nb + b.fundamental_index)


# --- the p-bound model -----------------------------------------------------------

class ChowModel:
    """A prime ``p`` plus a registry of validated split Chow structures.

    Expressions are tuples of registered names. All per-expression data
    (dimensions, Gram matrix, ante-dual basis, multiplication tensor) is cached.
    """

    def __init__(self, p: int, structures: Iterable[SplitChowStructure] = ()):
        self.p = ff.check_prime(p)
        self.structures: dict[str, SplitChowStructure] = {}
        self._cache: dict = {}
        for s in structures:
            self.add(s)

    def add(self, s: SplitChowStructure) -> None:
        if s.name in self.structures:
            if self.structures[s.name] == s:
                return
            raise StructureError(f"structure name {s.name!r} already registered")
        rep = validate_structure(s, self.p)
        if not rep.ok:
            raise StructureError(str(rep), report=rep)
        self.structures[s.name] = s

    def __getitem__(self, name: str) -> SplitChowStructure:
        return self.structures[name]

    def expr(self, e) -> Expr:
        if isinstance(e, str):
            e = (e,)
        e = tuple(e)
        for name in e:
            if name not in self.structures:
                raise KeyError(f"unknown variety {name!r}")
        return e

    def _cached(self, key, fn):
        if key not in self._cache:
            val = fn()
            if isinstance(val, np.ndarray):
                val.setflags(write=False)
            self._cache[key] = val
        return self._cache[key]

    def size(self, e: Expr) -> int:
        return int(np.prod([self.structures[n].size for n in e], dtype=np.int64)) if e else 1

    def dim(self, e: Expr) -> int:
        return sum(self.structures[n].dim for n in e)

    def shape(self, e: Expr) -> tuple:
        return tuple(self.structures[n].size for n in e)

    def dims(self, e: Expr) -> np.ndarray:
        def build():
            out = np.zeros(1, dtype=np.int64)
            for n in e:
                out = (out[:, None] + np.array(self.structures[n].dims)[None, :]).ravel()
            return out
        return self._cached(("dims", e), build)

    def labels(self, e: Expr) -> list:
        if not e:
            return ["1"]
        return ["×".join(t) for t in itertools.product(*(self.structures[n].labels for n in e))]

    def mult(self, name: str) -> np.ndarray:
        return self._cached(("mult", name), lambda: mult_tensor(self.structures[name], self.p))

    def mult_expr(self, e: Expr) -> np.ndarray:
        def build():
            out = np.ones((1, 1, 1), dtype=np.int64)
            for n in e:
                t = self.mult(n)
                out = np.einsum("abc,ijk->aibjck", out, t).reshape(
                    out.shape[0] * t.shape[0], out.shape[1] * t.shape[1], out.shape[2] * t.shape[2]) % self.p
            return out
        return self._cached(("mult_expr", e), build)

    def degree(self, e: Expr) -> np.ndarray:
        def build():
            out = np.ones(1, dtype=np.int64)
            for n in e:
                out = np.kron(out, degree_vector(self.structures[n], self.p)) % self.p
            return out
        return self._cached(("degree", e), build)

    def gram_atomic(self, name: str) -> np.ndarray:
        def build():
            s = self.structures[name]
            return np.einsum("abc,c->ab", self.mult(name), degree_vector(s, self.p)) % self.p
        return self._cached(("gram", name), build)

    def gram(self, e: Expr) -> np.ndarray:
        """Matrix of the pairing deg(x_a · x_b) on the product basis."""
        def build():
            out = np.ones((1, 1), dtype=np.int64)
            for n in e:
                out = np.kron(out, self.gram_atomic(n)) % self.p
            return out
        return self._cached(("gram", e), build)

    def gram_inverse(self, e: Expr) -> np.ndarray:
        def build():
            out = np.ones((1, 1), dtype=np.int64)
            for n in e:
                out = np.kron(out, ff.inverse(self.gram_atomic(n), self.p)) % self.p
            return out
        return self._cached(("gram_inv", e), build)

    def ante_dual(self, e: Expr) -> np.ndarray:
        """Columns give the ante-dual basis: x*_j = sum_b D[b, j] x_b, with G·D = 1."""
        return self.gram_inverse(e)

    def fundamental_index(self, e: Expr) -> int:
        idx = 0
        for n in e:
            s = self.structures[n]
            idx = idx * s.size + s.fundamental_index
        return idx

    def fundamental_class(self, e: Expr) -> np.ndarray:
        v = np.zeros(self.size(e), dtype=np.int64)
        v[self.fundamental_index(e)] = 1
        return v

    def product(self, e: Expr, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Intersection product of flat cycle vectors on ``e``."""
        return _factorwise_product([self.mult(n) for n in e], self.shape(e),
                                   np.asarray(u, dtype=np.int64), np.asarray(v, dtype=np.int64), self.p)

    def homogeneous_parts(self, e: Expr, v: np.ndarray) -> dict:
        dims = self.dims(e)
        v = np.asarray(v, dtype=np.int64) % self.p
        out = {}
        for d in np.unique(dims[np.nonzero(v)[0]]):
            w = np.where(dims == d, v, 0)
            out[int(d)] = w
        return out

    def cycle_dims(self, v: np.ndarray, e: Expr) -> set:
        v = np.asarray(v) % self.p
        return set(int(d) for d in self.dims(e)[np.nonzero(v)[0]])


def _factorwise_product(tensors: Sequence[np.ndarray], shape: tuple,
                        u: np.ndarray, w: np.ndarray, p: int) -> np.ndarray:
    k = len(tensors)
    if k == 0:
        return (u.reshape(1) * w.reshape(1)) % p
    # outer product u ⊗ w, then fold each factor pair (a_i, b_i) -> c_i
    cur = np.multiply.outer(u.reshape(shape) % p, w.reshape(shape) % p) % p
    for i, t in enumerate(tensors):
        # axes now: (c_0..c_{i-1}, a_i..a_{k-1}, b_i..b_{k-1})
        a_ax, b_ax = i, i + (k - i)
        cur = np.moveaxis(cur, (a_ax, b_ax), (0, 1))
        lead = cur.shape[:2]
        rest = cur.shape[2:]
        flat = cur.reshape(lead[0] * lead[1], -1)
        folded = ff.mat_mul(np.ascontiguousarray(t.reshape(lead[0] * lead[1], -1).T),
                            np.ascontiguousarray(flat), p)
        cur = folded.reshape((t.shape[2],) + rest)
        cur = np.moveaxis(cur, 0, i)
    return np.ascontiguousarray(cur).ravel()


def parse_expr(text: str) -> Expr:
    """Parse ``"C*P1"`` / ``"C×P1"`` / ``"pt"`` into an expression tuple."""
    text = text.strip()
    if text in ("", "pt", "()", "point"):
        return ()
    return tuple(part.strip() for part in text.replace("×", "*").split("*"))
