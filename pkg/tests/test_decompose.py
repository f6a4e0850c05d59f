import numpy as np
import pytest

from motkit.chow import ChowModel, point_structure, projective_space, split_quadric_odd
from motkit.correspondence import compose, diagonal
from motkit.decompose import EndAlgebra, is_indecomposable, krull_schmidt, match_decompositions
from motkit.motive import MotiveSummand, profile, summand_isomorphism_witness


@pytest.mark.parametrize("n", range(0, 4))
def test_projective_space_splits_into_tate_motives(n):
    m = ChowModel(2, [projective_space(n, "P"), point_structure("pt")])
    whole = MotiveSummand.whole(m, "P")
    dec = krull_schmidt(whole)
    assert len(dec) == n + 1
    assert dec.profiles() == [[k] for k in range(n + 1)]
    total = dec.idempotents[0]
    for e in dec.idempotents[1:]:
        total = total + e
    assert total == diagonal(m, "P")
    for k, s in enumerate(dec.summands):
        assert summand_isomorphism_witness(s, MotiveSummand.whole(m, "pt", twist=k)).found


def test_end_algebra_of_conic(conic):
    n = conic.summands["N"]
    assert EndAlgebra(n, conic.rm, "F").dim == 1
    assert EndAlgebra(n, conic.rm, "E").dim == 2
    assert EndAlgebra(n).dim == 2


def test_conic_indecomposable_over_F_split_over_E(conic):
    n = conic.summands["N"]
    assert is_indecomposable(n, conic.rm, "F")
    dec = krull_schmidt(n, conic.rm, "E")
    assert dec.profiles() == [[0], [1]]


def test_synth1_decompositions(synth1):
    n = synth1.summands["N"]
    f = krull_schmidt(n, synth1.rm, "F")
    k = krull_schmidt(n, synth1.rm, "K")
    e = krull_schmidt(n, synth1.rm, "E")
    assert (len(f), len(k), len(e)) == (1, 1, 4)
    assert (f.end_dim, k.end_dim, e.end_dim) == (1, 2, 6)
    assert k.radical_dim == 1  # the nilpotent k∘(h₃ - h) part
    assert e.profiles() == [[0], [1], [1], [2]]


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_seed_independence(synth1, seed):
    n = synth1.summands["N"]
    d0 = krull_schmidt(n, synth1.rm, "E", seed=0)
    d1 = krull_schmidt(n, synth1.rm, "E", seed=seed)
    assert d0.profiles() == d1.profiles()
    pairing = match_decompositions(d0, d1, synth1.rm, "E")
    assert pairing is not None and len(pairing) == 4


def test_match_rejects_different_lengths(conic):
    n = conic.summands["N"]
    a = krull_schmidt(n, conic.rm, "F")
    b = krull_schmidt(n, conic.rm, "E")
    assert match_decompositions(a, b, conic.rm, "E") is None


def test_decomposition_of_quadric_three_split():
    m = ChowModel(3, [split_quadric_odd(3, "Q")])
    dec = krull_schmidt(MotiveSummand.whole(m, "Q"))
    assert dec.profiles() == [[0], [1], [2], [3]]


def test_zero_summand():
    m = ChowModel(2, [projective_space(1, "P1")])
    z = MotiveSummand.make(m, "P1", np.zeros((2, 2), dtype=np.int64))
    assert len(krull_schmidt(z)) == 0


def test_idempotents_orthogonal_on_product():
    m = ChowModel(3, [projective_space(1, "P1")])
    whole = MotiveSummand.whole(m, ("P1", "P1"))
    dec = krull_schmidt(whole, seed=4)
    assert dec.profiles() == [[0], [1], [1], [2]]
    for a in dec.idempotents:
        for b in dec.idempotents:
            prod = compose(a, b)
            assert prod == a if a is b else prod.is_zero()
    assert sorted(profile(s).top for s in dec.summands) == [0, 1, 1, 2]
