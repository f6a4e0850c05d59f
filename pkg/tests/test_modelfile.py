import pytest

from motkit import modelfile, zoo
from motkit.errors import ModelFormatError, StructureError


@pytest.mark.parametrize("name", ["conic", "synth1", "adversarial", "p3", "p5"])
def test_presets_round_trip(name):
    loaded = modelfile.load(f"zoo:{name}")
    text = modelfile.dumps(modelfile.serialize(loaded))
    again = modelfile.build(modelfile.parse_text(text))
    assert modelfile.equivalent(loaded, again)


def test_round_trip_through_file(tmp_path):
    path = tmp_path / "conic.json"
    path.write_text(modelfile.dumps(zoo.preset("conic")))
    assert modelfile.equivalent(modelfile.load(str(path)), modelfile.load("zoo:conic"))


def test_serialized_document_is_stable():
    doc = modelfile.serialize(modelfile.load("zoo:conic"))
    twice = modelfile.serialize(modelfile.build(doc))
    assert modelfile.dumps(doc) == modelfile.dumps(twice)


def test_syntax_error_has_line_and_column():
    with pytest.raises(ModelFormatError, match=r"^m\.json:3:5: "):
        modelfile.parse_text('{\n  "p": 2,\n    oops\n}', "m.json")


def test_top_level_must_be_object():
    with pytest.raises(ModelFormatError, match="top level must be an object"):
        modelfile.parse_text("[1, 2]")


def test_missing_file():
    with pytest.raises(ModelFormatError, match="cannot read file"):
        modelfile.read_document("/nonexistent/model.json")


def test_unknown_preset():
    with pytest.raises(ModelFormatError, match="unknown preset"):
        modelfile.load("zoo:nope")


def _mutated(change):
    doc = zoo.preset("conic")
    change(doc)
    return doc


@pytest.mark.parametrize("change, pattern", [
    (lambda d: d.update(format_version="2.0"), r"format_version: unsupported major version 2"),
    (lambda d: d.pop("format_version"), r"missing field 'format_version'"),
    (lambda d: d.update(p=4), r"^p: "),
    (lambda d: d.update(p="2"), r"p: expected an integer"),
    (lambda d: d["varieties"][0].update(builder="torus"), r"varieties\[0\]"),
    (lambda d: d["rational"][1].update(field="G"), r"rational\[1\]\.field: unknown field node 'G'"),
    (lambda d: d["rational"][1].update(expr="C*D"), r"rational\[1\]\.expr"),
    (lambda d: d["summands"]["M"].update(projector="fundamental"), r"summands\.M\.projector: not an idempotent"),
    (lambda d: d["correspondences"]["incl"].update(target_twist=3), r"correspondences\.incl\.target_twist"),
    (lambda d: d["correspondences"]["proj"].update(cycle={"sum": [{"terms": [[1, ["l0", "e0", "h0"]]]},
                                                                   {"terms": [[1, ["h0", "e0", "h0"]]]}]}),
     r"inhomogeneous"),
    (lambda d: d["runs"]["decompose-F"].update(summand="Z"), r"runs\.decompose-F\.summand: unknown summand 'Z'"),
    (lambda d: d["runs"]["lemma3-smoke"].update(h="nope"), r"runs\.lemma3-smoke\.h: unknown correspondence"),
    (lambda d: d["runs"]["lemma3-smoke"].update(E="Q"), r"runs\.lemma3-smoke\.E: unknown field node"),
    (lambda d: d["runs"]["classify-N"].update(task="prove"), r"runs\.classify-N\.task: unknown task"),
    (lambda d: d["fields"].update(leq=[["F", "E"], ["E", "F"]]), r"^fields: "),
])
def test_errors_name_the_field(change, pattern):
    with pytest.raises(ModelFormatError, match=pattern):
        modelfile.build(_mutated(change))


def test_two_point_variety_is_a_structure_error():
    with pytest.raises(StructureError, match="multiple top classes"):
        modelfile.load("zoo:twopoint")


def test_explicit_structure_matches_builder():
    loaded = modelfile.load("zoo:conic")
    doc = modelfile.structure_to_doc(loaded.model.structures["C"])
    assert "builder" not in doc
    rebuilt = modelfile.build({"format_version": "1.0", "p": 2, "varieties": [doc]})
    assert rebuilt.model.structures["C"] == loaded.model.structures["C"]


def test_inline_summand_reference():
    loaded = modelfile.load("zoo:conic")
    inline = loaded.summand({"expr": "C", "projector": "identity"})
    assert inline.projector == loaded.summands["N"].projector


def test_dense_cycle_length_checked():
    doc = _mutated(lambda d: d["correspondences"]["delta"].update(cycle={"dense": [1, 0]}))
    with pytest.raises(ModelFormatError, match=r"correspondences\.delta\.cycle"):
        modelfile.build(doc)


def test_dumps_parses_back():
    doc = {"b": 1, "a": [1, 2]}
    assert modelfile.parse_text(modelfile.dumps(doc)) == doc


def test_explicit_structure_ignores_listing_order():
    doc = {"format_version": "1.0", "p": 2, "varieties": [
        {"name": "C", "labels": ["l0", "h0"], "dims": [0, 1], "dim": 1,
         "products": [["l0", "h0", "l0", 1], ["h0", "l0", "l0", 1], ["h0", "h0", "h0", 1]],
         "degree": [["l0", 1]], "fundamental": "h0"}]}
    conic = modelfile.load("zoo:conic", close=False)
    assert modelfile.build(doc).model.structures["C"] == conic.model.structures["C"]
