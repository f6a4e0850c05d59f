import itertools

import numpy as np
import pytest

from motkit.chow import ChowModel, projective_space, split_quadric_odd
from motkit.correspondence import Correspondence, compose, diagonal, transpose
from motkit.errors import HypothesisViolation, ModelFormatError
from motkit.rationality import (FieldPoset, RationalityModel, check_hypothesis1, close_and_validate,
                                function_field_space, is_rational, restriction_kernel_check)


def test_poset_basics():
    po = FieldPoset(["F", "K", "E"], [("F", "K"), ("K", "E")])
    assert po.base == "F"
    assert po.leq("F", "E") and not po.leq("E", "F")
    assert po.below("E") == ["F", "K"]
    assert po.topological() == ["F", "K", "E"]
    assert po.pairs() == [("F", "K"), ("K", "E")]


@pytest.mark.parametrize("nodes,leq,msg", [
    (["A", "B"], [("A", "B"), ("B", "A")], "antisymmetric"),
    (["A", "B"], [], "unique minimum"),
    (["A"], [("A", "Z")], "unknown node"),
    ([], [], "no nodes"),
])
def test_poset_rejects(nodes, leq, msg):
    with pytest.raises(ModelFormatError, match=msg):
        FieldPoset(nodes, leq)


def test_conic_spaces(conic):
    rm = conic.rm
    assert rm.space("F", ("C", "C")).dim == 2
    assert rm.space("E", ("C", "C")).dim == 4
    assert rm.space("F", ("C",)).dim == 1  # only [C]: the conic has no rational point over F
    assert is_rational(rm, diagonal(conic.model, "C"), "F")
    pt_c = Correspondence.from_terms(conic.model, (), "C", [(1, ("l0",))])
    assert not is_rational(rm, pt_c, "F") and is_rational(rm, pt_c, "E")


def test_spaces_monotone(conic, synth1):
    for loaded in (conic, synth1):
        rm = loaded.rm
        for a, b in itertools.permutations(rm.poset.nodes, 2):
            if rm.poset.leq(a, b):
                for e in rm.exprs:
                    assert rm.space(b, e).contains_space(rm.space(a, e))


def _square_exprs(rm):
    return [e for e in rm.exprs if len(e) == 2 and e[0] == e[1]]


def test_closed_under_composition_transpose_product(conic, synth1):
    for loaded in (conic, synth1):
        rm, m = loaded.rm, loaded.model
        for node in rm.poset.nodes:
            for e in _square_exprs(rm):
                sp = rm.space(node, e)
                x = e[:1]
                for u, v in itertools.product(sp.basis, repeat=2):
                    cu = Correspondence.from_flat(m, x, x, u, 0, 0)
                    cv = Correspondence.from_flat(m, x, x, v, 0, 0)
                    assert sp.contains(compose(cu, cv).flat)
                    assert sp.contains(transpose(cu).flat)
                    assert sp.contains(m.product(e, u, v))


def test_closure_is_idempotent(conic):
    rm = conic.rm
    before = {k: v for k, v in rm.spaces.items()}
    close_and_validate(rm)
    assert rm.spaces == before


def test_queries_need_closure():
    m = ChowModel(2, [projective_space(1, "P1")])
    rm = RationalityModel(m, FieldPoset(["F"]))
    rm.ensure(("P1",))
    with pytest.raises(RuntimeError):
        rm.space("F", ("P1",))
    with pytest.raises(ModelFormatError):
        rm.add_generators("G", ("P1",), [[1, 0]])


def test_base_content_only():
    """With no generators the closure holds the fundamental class, diagonals and their consequences."""
    m = ChowModel(2, [split_quadric_odd(1, "C")])
    rm = RationalityModel(m, FieldPoset(["F"]))
    rm.ensure(("C",), ("C", "C"))
    close_and_validate(rm)
    assert rm.space("F", ("C",)).dim == 1
    # [C×C], Δ; and pushforwards/products give nothing new
    assert rm.space("F", ("C", "C")).dim == 2


def test_hypothesis1_adversarial(adversarial):
    rep = check_hypothesis1(adversarial.rm, "E", "F", ("P1",), ("C",))
    assert not rep.ok
    assert rep.labels == ["e0×l0", "e1×l0"]


def test_hypothesis1_synth1(synth1):
    rm = synth1.rm
    assert check_hypothesis1(rm, "K", "F", ("X",), ("Y",)).ok
    h = synth1.correspondences["h"]
    assert is_rational(rm, h, "K") and not is_rational(rm, h, "F")
    assert function_field_space(rm, "F", ("X",), ("Y",)).contains(h.flat)


def test_restriction_is_injective(synth1):
    rep = restriction_kernel_check(synth1.rm, "F", "E", ("X", "X"))
    assert rep.kernel_dim == 0
    with pytest.raises(ValueError):
        restriction_kernel_check(synth1.rm, "E", "F", ("X", "X"))


def test_nonmonotone_generators_are_completed():
    """Generators declared at a lower node propagate to every node above it."""
    m = ChowModel(3, [projective_space(1, "P1")])
    rm = RationalityModel(m, FieldPoset(["F", "E"], [("F", "E")]))
    rm.add_generators("F", ("P1",), [[1, 0]])
    close_and_validate(rm)
    assert rm.space("E", ("P1",)).contains(np.array([1, 0]))


def test_bare_vector_needs_expression(conic):
    with pytest.raises(ValueError):
        is_rational(conic.rm, np.array([1, 0]), "F")
    assert is_rational(conic.rm, np.array([0, 1]), "F", ("C",))


def test_model_raises_on_violation_message():
    assert issubclass(ModelFormatError, HypothesisViolation)
