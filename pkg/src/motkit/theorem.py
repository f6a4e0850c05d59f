"""Self-checking construction of the lifting lemma and the main theorem.

Both constructions record every step in a :class:`Transcript` and re-verify
each claim they rely on. They raise :class:`HypothesisViolation` when an
input fails a hypothesis and :class:`VerificationError` when a computed
object fails its postcondition.

Notation: ``N = (X, π)[t]`` and ``M = (Y, ρ)[i]`` with ``h : N_E → M_E`` and
``k : M_E → N_E`` rational over the field node ``E``, ``F ≤ E``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import numpy as np

from . import ff
from .algebra import idempotent_power
from .correspondence import Correspondence, compose, diag_pullback, generic_fiber, transpose
from .decompose import krull_schmidt
from .errors import HypothesisViolation, VerificationError
from .motive import MotiveSummand, classify, is_summand_of, profile, summand_isomorphism_witness
from .rationality import RationalityModel, check_hypothesis1, is_rational


@dataclass
class Step:
    name: str
    ok: bool
    detail: str = ""

    def as_dict(self) -> dict:
        return {"step": self.name, "ok": self.ok, "detail": self.detail}


@dataclass
class Transcript:
    steps: list = field(default_factory=list)

    def record(self, name: str, ok: bool, detail: str = "") -> bool:
        self.steps.append(Step(name, bool(ok), detail))
        return bool(ok)

    def note(self, name: str, detail: str) -> None:
        self.steps.append(Step(name, True, detail))

    @property
    def ok(self) -> bool:
        return all(s.ok for s in self.steps)

    @property
    def failures(self) -> list:
        return [s.name for s in self.steps if not s.ok]

    def extend(self, other: "Transcript", prefix: str) -> None:
        for s in other.steps:
            self.steps.append(Step(f"{prefix}{s.name}", s.ok, s.detail))

    def as_list(self) -> list:
        return [s.as_dict() for s in self.steps]

    def __str__(self) -> str:
        return "\n".join(f"[{'ok' if s.ok else 'FAIL'}] {s.name}" + (f": {s.detail}" if s.detail else "")
                         for s in self.steps)


@dataclass
class LemmaInstance:
    rm: RationalityModel
    N: MotiveSummand
    M: MotiveSummand
    E: str
    F: str
    h: Correspondence
    k: Correspondence

    @property
    def X(self):
        return self.N.expr

    @property
    def Y(self):
        return self.M.expr


@dataclass
class LemmaResult:
    f: Correspondence
    g: Correspondence
    P: Correspondence
    n1: int
    h1: Correspondence
    h2: Correspondence
    h3: Correspondence
    power_m: int
    power_r: int
    transcript: Transcript


def _same_hom(c: Correspondence, src: MotiveSummand, tgt: MotiveSummand) -> bool:
    return (c.source == src.expr and c.target == tgt.expr
            and c.source_twist == src.twist and c.target_twist == tgt.twist)


def validate_instance(inst: LemmaInstance, tr: Transcript) -> Correspondence:
    """Check the lemma hypotheses and return ``κ = k∘h``."""
    rm, N, M = inst.rm, inst.N, inst.M
    if not rm.poset.leq(inst.F, inst.E):
        raise HypothesisViolation(f"field {inst.F} is not below {inst.E}")
    if not _same_hom(inst.h, N, M) or not _same_hom(inst.k, M, N):
        raise HypothesisViolation("h must map N to M and k must map M to N (expressions and twists)")
    checks = [
        ("π is F-rational", is_rational(rm, N.projector, inst.F)),
        ("ρ is F-rational", is_rational(rm, M.projector, inst.F)),
        ("π is a projector", compose(N.projector, N.projector) == N.projector),
        ("ρ is a projector", compose(M.projector, M.projector) == M.projector),
        ("h is E-rational", is_rational(rm, inst.h, inst.E)),
        ("k is E-rational", is_rational(rm, inst.k, inst.E)),
        ("h = ρ∘h∘π", compose(M.projector, compose(inst.h, N.projector)) == inst.h),
        ("k = π∘k∘ρ", compose(N.projector, compose(inst.k, M.projector)) == inst.k),
    ]
    for name, ok in checks:
        if not tr.record(name, ok):
            raise HypothesisViolation(f"hypothesis failed: {name}")
    kappa = compose(inst.k, inst.h)
    if not tr.record("k∘h is a projector", compose(kappa, kappa) == kappa):
        raise HypothesisViolation("hypothesis failed: k∘h is not a projector")
    sub = MotiveSummand(kappa)
    if not tr.record("(X, k∘h) is a summand of N", is_summand_of(sub, N)):
        raise HypothesisViolation("hypothesis failed: (X, k∘h) is not a summand of N")
    if kappa.is_zero():
        tr.record("(X, k∘h) is lower in N_E", False, "k∘h = 0")
        raise HypothesisViolation("lower-ness violated: k∘h = 0")
    if not tr.record("(X, k∘h) is lower in N_E", classify(sub, N).lower,
                     f"t(k∘h) = {profile(sub).top}, t(N) = {profile(N).top}"):
        raise HypothesisViolation("lower-ness violated: (X, k∘h) is not lower in N_E")
    hyp = check_hypothesis1(rm, inst.E, inst.F, inst.X, inst.Y)
    detail = "" if hyp.ok else "witnesses: " + "; ".join(hyp.labels)
    if not tr.record("every E(X)-rational cycle on X×Y is F(X)-rational", hyp.ok, detail):
        raise HypothesisViolation("hypothesis-1 violated: " + detail)
    return kappa


def _lift_generic_fiber(inst: LemmaInstance) -> Correspondence:
    """An F-rational ``h₁`` on ``X×Y×X`` whose generic fiber is ``h``."""
    rm, h = inst.rm, inst.h
    m = rm.model
    x, y = inst.X, inst.Y
    big = rm.space(inst.F, x + y + x)
    fi = m.fundamental_index(x)
    slices = big.basis.reshape(big.dim, m.size(x + y), m.size(x))[:, :, fi]
    sol, _ = ff.solve_linear(slices.T, h.flat, m.p) if big.dim else (None, None)
    if sol is None:
        raise HypothesisViolation("hypothesis-1 violated: h has no F-rational lift along ε*")
    vec = ff.mat_mul(sol[None, :], big.basis, m.p)[0]
    want = h.total_dim + m.dim(x)
    vec = m.homogeneous_parts(x + y + x, vec).get(want, np.zeros_like(vec))
    # cycle on X×Y×X read as X[t] ⇝ (Y×X)[·]
    src_twist = inst.N.twist
    tgt_twist = want - m.dim(y + x) + src_twist
    return Correspondence.from_flat(m, x, y + x, vec, src_twist, tgt_twist)


def lemma3_construct(inst: LemmaInstance, contain_bound: int = 1 << 20, seed: int = 0,
                     transcript: Transcript | None = None) -> LemmaResult:
    """Produce ``f : N → M`` (F-rational), ``g : M_E → N_E`` and the projector ``P = g∘f``.

    Steps are recorded into ``transcript`` when one is passed, so a caller
    still sees them if a hypothesis check raises halfway.
    """
    tr = Transcript() if transcript is None else transcript
    kappa = validate_instance(inst, tr)
    rm, N, M = inst.rm, inst.N, inst.M
    pi, rho = N.projector, M.projector

    h1 = _lift_generic_fiber(inst)
    tr.record("h₁ is F-rational", is_rational(rm, h1, inst.F))
    tr.record("ε*(h₁) = h", generic_fiber(h1, inst.X).flat.tolist() == inst.h.flat.tolist())
    h2 = compose(h1, pi)
    tr.record("h₂ = h₁∘π is F-rational", is_rational(rm, h2, inst.F))
    h3 = diag_pullback(h2, inst.X)
    tr.record("h₃ = Δ*(h₂) is F-rational", is_rational(rm, h3, inst.F))
    tr.note("h₃ differs from h∘π" if h3 != compose(inst.h, pi) else "h₃ equals h∘π",
            f"h₃ = {h3!r}")
    f = compose(rho, compose(h3, pi))
    tr.record("f = ρ∘h₃∘π is F-rational", is_rational(rm, f, inst.F))

    q = compose(pi, compose(inst.k, compose(h3, pi)))
    pw = idempotent_power(q, compose)
    tr.note("powering", f"q = π∘k∘h₃∘π has q^{pw.m} = q^{pw.m + pw.r}; n₁ = {pw.n}. "
                        "Restriction is injective in this model, so one powering step covers both "
                        "the split level and the level E.")
    if pw.trivial:
        tr.record("(π∘k∘h₃∘π)^n₁ is nonzero", False)
        raise HypothesisViolation("lower-ness violated: the idempotent power of π∘k∘h₃∘π is zero")
    n1 = pw.n
    g = compose(pi, inst.k)
    if n1 > 1:
        g = compose(q ** (n1 - 1), g)
    P = compose(g, f)
    checks = [
        ("P = g∘f equals (π∘k∘h₃∘π)^n₁", P == pw.e),
        ("P is a projector", compose(P, P) == P),
        ("(X, P) is a summand of N: π∘P∘π = P", is_summand_of(MotiveSummand(P), N)),
        ("t((X, P)) = t((X, k∘h))", profile(MotiveSummand(P)).top == profile(MotiveSummand(kappa)).top),
        ("g is E-rational", is_rational(rm, g, inst.E)),
    ]
    for name, ok in checks:
        tr.record(name, ok)
    if is_rational(rm, inst.k, inst.F):
        tr.record("k is F-rational, hence g is F-rational", is_rational(rm, g, inst.F))
    _containment(inst, kappa, P, tr, contain_bound, seed)
    if not tr.ok:
        raise VerificationError("verification failed: " + ", ".join(tr.failures))
    return LemmaResult(f, g, P, n1, h1, h2, h3, pw.m, pw.r, tr)


def _containment(inst: LemmaInstance, kappa: Correspondence, P: Correspondence, tr: Transcript,
                 bound: int, seed: int) -> None:
    """Embed each lower indecomposable factor of ``(X, κ)`` into ``(X, P)`` when feasible."""
    rm = inst.rm
    sub = MotiveSummand(kappa)
    try:
        dec = krull_schmidt(sub, rm, inst.E, seed=seed)
    except Exception as exc:  # decomposition is an optional strengthening
        tr.note("containment witnesses skipped", str(exc))
        return
    target = MotiveSummand(P)
    space = rm.space(inst.E, inst.X + inst.X)
    for idx, factor in enumerate(dec.summands):
        if not classify(factor, inst.N).lower:
            continue
        res = summand_isomorphism_witness(factor, target, bound=bound, seed=seed, one_sided=True,
                                          space_ab=space, space_ba=space)
        if res.status == "bound":
            tr.note(f"lower factor {idx} of (X, k∘h) embeds into (X, P)", "search bound reached; not decided")
        else:
            tr.record(f"lower factor {idx} of (X, k∘h) embeds into (X, P)", res.found, res.reason)


# --- the theorem ----------------------------------------------------------------------

@dataclass
class TheoremCertificate:
    theta: Correspondence
    r: Correspondence
    s: Correspondence
    e: Correspondence
    n1_first: int
    n1_second: int
    transcript: Transcript


def verify_certificate(c: TheoremCertificate, N: MotiveSummand, M: MotiveSummand,
                       rm: RationalityModel, F: str) -> Transcript:
    """Re-check every conclusion of the theorem on a certificate; never raises."""
    tr = Transcript()
    theta, r, s, e = c.theta, c.r, c.s, c.e
    try:
        th = MotiveSummand(theta)
        tr.record("θ∘θ = θ", compose(theta, theta) == theta)
        tr.record("(X, θ) is a summand of N", is_summand_of(th, N))
        try:
            outer = not theta.is_zero() and classify(th, N).outer
        except HypothesisViolation:
            outer = False
        tr.record("outer", outer)
        tr.record("s∘r = θ", compose(s, r) == theta)
        tr.record("e = r∘θ∘s", compose(r, compose(theta, s)) == e)
        tr.record("e∘e = e", compose(e, e) == e)
        tr.record("(Y, e) is a summand of M", is_summand_of(MotiveSummand(e), M))
        u, v = compose(r, theta), compose(theta, s)
        tr.record("(θ∘s)∘(r∘θ) = θ", compose(v, u) == theta)
        tr.record("(r∘θ)∘(θ∘s) = e", compose(u, v) == e)
        for name, obj in (("θ", theta), ("r", r), ("s", s), ("e", e)):
            tr.record(f"{name} is {F}-rational", is_rational(rm, obj, F))
    except ValueError as exc:
        tr.record("certificate is well formed", False, str(exc))
    return tr


def _lemma_pass(inst: LemmaInstance, bound: int, seed: int, tr: Transcript, prefix: str) -> LemmaResult:
    inner = Transcript()
    try:
        return lemma3_construct(inst, bound, seed, inner)
    finally:
        tr.extend(inner, prefix)


def main_theorem(rm: RationalityModel, N: MotiveSummand, M: MotiveSummand, E: str, F: str,
                 O: MotiveSummand, h: Correspondence, k: Correspondence,
                 seed: int = 0, contain_bound: int = 1 << 20,
                 transcript: Transcript | None = None) -> TheoremCertificate:
    """An outer summand of ``N`` defined over ``E`` forces a summand of ``N`` over ``F`` inside ``M``."""
    tr = Transcript() if transcript is None else transcript
    m = rm.model
    dX = m.dim(N.expr)
    if O.expr != N.expr or O.twist != N.twist:
        raise HypothesisViolation("O must live on the same expression and twist as N")
    if not tr.record("k∘h = κ", compose(k, h) == O.projector):
        raise HypothesisViolation("k∘h differs from the projector of O")
    if not tr.record("O is E-rational", is_rational(rm, O.projector, E)):
        raise HypothesisViolation("O is not E-rational")
    if not tr.record("O is a summand of N", is_summand_of(O, N)):
        raise HypothesisViolation("O not a summand of N")
    if not tr.record("O is outer in N_E", not O.is_zero() and classify(O, N).outer):
        raise HypothesisViolation("O not outer")
    dec = krull_schmidt(O, rm, E, seed=seed)
    if not tr.record("O is indecomposable over E", len(dec) == 1, f"{len(dec)} factors"):
        raise HypothesisViolation("O not indecomposable")

    first = _lemma_pass(LemmaInstance(rm, N, M, E, F, h, k), contain_bound, seed, tr, "lemma (first pass): ")
    h_p, k_p = first.f, first.g
    O2 = MotiveSummand(compose(k_p, h_p))
    if not tr.record("O₂ = (X, k'∘h') is outer in N_E", classify(O2, N).outer):
        raise VerificationError("verification failed: O₂ not outer")

    shift = dX + N.twist
    Nd = MotiveSummand(transpose(N.projector).shift(shift))
    Md = MotiveSummand(transpose(M.projector).shift(shift))
    O2d = MotiveSummand(transpose(O2.projector).shift(shift))
    pb, pd = profile(O2), profile(O2d)
    tr.record("O₂† profile matches duality: b(O₂†) = -t(O₂), t(O₂†) = -b(O₂) (after the shift)",
              pd.bottom == shift - pb.top and pd.top == shift - pb.bottom,
              f"base {sorted(pd.base)}")
    if not tr.record("O₂† is lower in N†", classify(O2d, Nd).lower):
        raise VerificationError("verification failed: dual of O₂ is not lower")
    h_d = transpose(k_p).shift(shift)
    k_d = transpose(h_p).shift(shift)
    tr.record("ᵗh' is F-rational", is_rational(rm, k_d, F))

    second = _lemma_pass(LemmaInstance(rm, Nd, Md, E, F, h_d, k_d), contain_bound, seed, tr, "lemma (dual pass): ")
    back = dX + N.twist
    r = transpose(second.g).shift(back)
    s = transpose(second.f).shift(back)
    theta = compose(s, r)
    e = compose(r, compose(theta, s))
    cert = TheoremCertificate(theta, r, s, e, first.n1, second.n1, tr)
    check = verify_certificate(cert, N, M, rm, F)
    tr.extend(check, "certificate: ")
    if not check.ok:
        raise VerificationError("verification failed: " + ", ".join(check.failures))
    return cert
