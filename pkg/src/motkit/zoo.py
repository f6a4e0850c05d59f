"""Built-in example models.

Each preset is a plain model document (the same structure that
:mod:`motkit.modelfile` reads from JSON), so presets double as format examples.
Load one with ``modelfile.load("zoo:conic")``.
"""

from __future__ import annotations

import copy

from .chow import point_structure, projective_space, split_quadric_odd, tensor_product

FORMAT_VERSION = "1.0"


def preset_conic() -> dict:
    """Conic ``C`` over ``F`` without a rational point, split over ``E``.

    ``F`` sees the diagonal of ``C``, the partial diagonal on ``C×C×C`` and the
    point class of ``P¹``; the point class of ``C`` only becomes rational over ``E``.
    """
    return {
        "format_version": FORMAT_VERSION,
        "name": "conic",
        "p": 2,
        "varieties": [
            {"name": "C", "builder": "quadric", "d": 1},
            {"name": "P1", "builder": "projective_space", "n": 1},
        ],
        "fields": {"nodes": ["F", "E"], "leq": [["F", "E"]]},
        "rational": [
            {"field": "E", "full": True},
            {"field": "F", "expr": "C*C", "generators": [{"diagonal": [[0, 1]]}]},
            {"field": "F", "expr": "C*C*C", "generators": [{"diagonal": [[0, 2]]}]},
            {"field": "F", "expr": "P1", "generators": [{"classes": {"0": "e0"}}]},
        ],
        "summands": {
            "N": {"expr": "C", "projector": "identity"},
            "M": {"expr": "C*P1",
                  "projector": {"product": [{"diagonal": [[0, 2]]}, {"classes": {"1": "e0"}}]}},
        },
        "correspondences": {
            "delta": {"source": "C", "target": "C", "cycle": "identity"},
            "zero": {"source": "C", "target": "C", "cycle": "zero"},
            "incl": {"source": "C", "target": "C*P1", "cycle": {"diagonal": [[0, 1]]}},
            "proj": {"source": "C*P1", "target": "C",
                     "cycle": {"product": [{"diagonal": [[0, 2]]}, {"classes": {"1": "e0"}}]}},
        },
        "runs": {
            "lemma3-smoke": {"task": "lemma3", "N": "N", "M": "N", "E": "F", "F": "F",
                             "h": "delta", "k": "delta", "expect": {"n1": 1}},
            "theorem-smoke": {"task": "theorem", "N": "N", "M": "M", "O": "N", "E": "F", "F": "F",
                              "h": "incl", "k": "proj"},
            "zero-h": {"task": "lemma3", "N": "N", "M": "N", "E": "F", "F": "F",
                       "h": "zero", "k": "zero"},
            "decompose-F": {"task": "decompose", "summand": "N", "field": "F",
                            "expect": {"summands": 1}},
            "decompose-E": {"task": "decompose", "summand": "N", "field": "E",
                            "expect": {"summands": 2, "profiles": [[0], [1]]}},
            "classify-N": {"task": "classify", "inner": "N", "outer_ambient": "N"},
        },
    }


_Q_DIAGONAL_XY = [["e0*e0", "e1*e1"], ["e0*e1", "e1*e0"], ["e1*e0", "e0*e1"], ["e1*e1", "e0*e0"]]


def preset_synth1() -> dict:
    """Three fields ``F ≤ K ≤ E`` over two copies of ``P¹×P¹`` at ``p = 2``.

    ``h`` and ``k`` (graphs of the identification ``X ≅ Y``) are only
    ``K``-rational. ``F`` gets a lift ``h₁`` of ``h`` along the generic fibre
    that carries an extra nilpotent term, so that ``h₃ = Δ*(h₁∘π)`` differs
    from ``h`` and ``π∘k∘h₃∘π = Δ + (nilpotent)`` only becomes idempotent
    after squaring. ``h`` itself is not ``F``-rational.
    """
    lift = [[1, [a, b, "e1*e1"]] for a, b in _Q_DIAGONAL_XY]
    lift += [[1, ["e1*e0", "e1*e1", "e1*e0"]], [1, ["e1*e1", "e1*e0", "e1*e0"]]]
    quad = {"builder": "tensor", "factors": [{"builder": "projective_space", "n": 1},
                                              {"builder": "projective_space", "n": 1}]}
    return {
        "format_version": FORMAT_VERSION,
        "name": "synth1",
        "p": 2,
        "varieties": [dict(quad, name="X"), dict(quad, name="Y")],
        "fields": {"nodes": ["F", "K", "E"], "leq": [["F", "K"], ["K", "E"]]},
        "rational": [
            {"field": "E", "full": True},
            {"field": "K", "expr": "X*Y", "generators": [{"terms": [[1, t] for t in _Q_DIAGONAL_XY]}]},
            {"field": "K", "expr": "Y*X", "generators": [{"terms": [[1, t] for t in _Q_DIAGONAL_XY]}]},
            {"field": "F", "expr": "X*Y*X", "generators": [{"terms": lift}]},
        ],
        "summands": {
            "N": {"expr": "X", "projector": "identity"},
            "M": {"expr": "Y", "projector": "identity"},
        },
        "correspondences": {
            "h": {"source": "X", "target": "Y", "cycle": {"terms": [[1, t] for t in _Q_DIAGONAL_XY]}},
            "k": {"source": "Y", "target": "X", "cycle": {"terms": [[1, t] for t in _Q_DIAGONAL_XY]}},
        },
        "runs": {
            "lemma3": {"task": "lemma3", "N": "N", "M": "M", "E": "K", "F": "F", "h": "h", "k": "k",
                       "expect": {"n1": 2, "hypothesis1": True}},
            "theorem": {"task": "theorem", "N": "N", "M": "M", "O": "N", "E": "K", "F": "F",
                        "h": "h", "k": "k", "expect": {"n1_min": 2}},
            "decompose-F": {"task": "decompose", "summand": "N", "field": "F", "expect": {"summands": 1}},
            "decompose-K": {"task": "decompose", "summand": "N", "field": "K", "expect": {"summands": 1}},
            "decompose-E": {"task": "decompose", "summand": "N", "field": "E",
                            "expect": {"summands": 4, "profiles": [[0], [1], [1], [2]]}},
        },
    }


def preset_adversarial() -> dict:
    """``P¹`` and a conic: the point class of ``C`` is rational over ``E`` only.

    Every cycle on ``P¹×C`` is ``E(P¹)``-rational, but ``[P¹]×pt`` is not
    ``F(P¹)``-rational, so the lifting lemma must refuse.
    """
    return {
        "format_version": FORMAT_VERSION,
        "name": "adversarial",
        "p": 2,
        "varieties": [
            {"name": "P1", "builder": "projective_space", "n": 1},
            {"name": "C", "builder": "quadric", "d": 1},
        ],
        "fields": {"nodes": ["F", "E"], "leq": [["F", "E"]]},
        "rational": [
            {"field": "E", "full": True},
            {"field": "F", "expr": "C*C", "generators": [{"diagonal": [[0, 1]]}]},
        ],
        "summands": {
            "N": {"expr": "P1", "projector": "identity"},
            "M": {"expr": "C", "projector": "identity"},
        },
        "correspondences": {
            "h": {"source": "P1", "target": "C", "cycle": {"terms": [[1, ["e1", "l0"]]]}},
            "k": {"source": "C", "target": "P1", "cycle": {"terms": [[1, ["h0", "e0"]]]}},
        },
        "runs": {
            "lemma3": {"task": "lemma3", "N": "N", "M": "M", "E": "E", "F": "F", "h": "h", "k": "k",
                       "expect": {"hypothesis1": False}},
            "theorem": {"task": "theorem", "N": "N", "M": "M", "O": "N", "E": "E", "F": "F",
                        "h": "h", "k": "k"},
        },
    }


def preset_twopoint() -> dict:
    """Two disjoint points as one variety; rejected because it has two top classes."""
    return {
        "format_version": FORMAT_VERSION,
        "name": "twopoint",
        "p": 2,
        "varieties": [{"name": "T", "builder": "two_point"}],
        "fields": {"nodes": ["F", "E"], "leq": [["F", "E"]]},
        "rational": [{"field": "E", "full": True}],
        "summands": {"N": {"expr": "T", "projector": "identity"}},
        "correspondences": {"delta": {"source": "T", "target": "T", "cycle": "identity"}},
        "runs": {
            "theorem": {"task": "theorem", "N": "N", "M": "N", "O": "N", "E": "E", "F": "F",
                        "h": "delta", "k": "delta"},
        },
    }


def preset_projective(n: int = 3, p: int = 2) -> dict:
    """``Pⁿ`` with every cycle rational over the single field ``k``."""
    name = f"P{n}"
    return {
        "format_version": FORMAT_VERSION,
        "name": f"p{n}",
        "p": p,
        "varieties": [{"name": name, "builder": "projective_space", "n": n}],
        "fields": {"nodes": ["k"], "leq": []},
        "rational": [{"field": "k", "full": True}],
        "summands": {"N": {"expr": name, "projector": "identity"}},
        "runs": {
            "decompose": {"task": "decompose", "summand": "N", "field": "k",
                          "expect": {"summands": n + 1, "profiles": [[i] for i in range(n + 1)]}},
        },
    }


PRESETS = {
    "conic": preset_conic,
    "synth1": preset_synth1,
    "adversarial": preset_adversarial,
    "twopoint": preset_twopoint,
    "p3": lambda: preset_projective(3),
}


def preset(name: str) -> dict:
    """A fresh copy of a preset document; ``pN`` gives projective space of dimension N."""
    if name in PRESETS:
        return copy.deepcopy(PRESETS[name]())
    if name.startswith("p") and name[1:].isdigit():
        return preset_projective(int(name[1:]))
    raise KeyError(f"unknown preset {name!r}; known: {', '.join(sorted(PRESETS))}, pN")


def builder_structures(n_max: int = 3) -> list:
    """Every structure the builders produce at desk scale (used by validation sweeps)."""
    out = [point_structure()]
    out += [projective_space(n) for n in range(n_max + 1)]
    out += [split_quadric_odd(d) for d in (1, 3, 5)]
    out.append(tensor_product(projective_space(1), projective_space(1)))
    return out
