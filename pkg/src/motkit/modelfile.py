"""JSON model files: parsing with located diagnostics, building, serializing.

A model document names a prime, a list of varieties (builder calls or
explicit structure constants), a field poset, rational generators, and
optionally named summands, correspondences and runs. ``docs/model_format.md``
describes the schema; :mod:`motkit.zoo` holds complete examples.

Cycles inside a document use a small vocabulary:

``"zero"`` / ``"fundamental"`` / ``"identity"``
    the zero cycle, ``[e]``, or the diagonal when ``e = A×A``;
``{"terms": [[coeff, [label, ...]], ...]}``
    one label per factor;
``{"diagonal": [[i, j], ...]}``
    product of the partial diagonals ``Δ_ij`` (fundamental class elsewhere);
``{"classes": {"i": label, ...}}``
    the listed classes on the listed factors, fundamental class elsewhere;
``{"product": [...]}`` / ``{"sum": [...]}``
    intersection product / sum of sub-cycles;
``{"dense": [...]}``
    a coefficient vector in Kronecker order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import ff, zoo
from .chow import (ChowModel, SplitChowStructure, parse_expr, point_structure, projective_space,
                   split_quadric_odd, tensor_product, two_point_structure)
from .correspondence import Correspondence
from .errors import ModelFormatError
from .motive import MotiveSummand, is_projector
from .rationality import FieldPoset, RationalityModel, close_and_validate

SUPPORTED_MAJOR = 1
TASKS = ("validate", "decompose", "classify", "lemma3", "theorem")


def _fail(path: str, msg: str):
    raise ModelFormatError(f"{path}: {msg}" if path else msg)


def _need(obj, key: str, path: str, kind=None):
    if not isinstance(obj, dict):
        _fail(path, "expected an object")
    if key not in obj:
        _fail(path, f"missing field {key!r}")
    val = obj[key]
    if kind is not None and not isinstance(val, kind):
        _fail(f"{path}.{key}", f"expected {getattr(kind, '__name__', kind)}")
    return val


# --- text -----------------------------------------------------------------------

def parse_text(text: str, source: str = "<string>") -> dict:
    """JSON text to a document; syntax errors carry ``source:line:column``."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise ModelFormatError(f"{source}:1:1: top level must be an object")
    return doc


def read_document(ref: str) -> dict:
    """``zoo:<preset>`` or a path to a JSON file."""
    if ref.startswith("zoo:"):
        try:
            return zoo.preset(ref[4:])
        except KeyError as exc:
            raise ModelFormatError(str(exc.args[0])) from None
    path = Path(ref)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ModelFormatError(f"{ref}: cannot read file ({exc.strerror})") from None
    return parse_text(text, str(path))


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=False, ensure_ascii=False) + "\n"


# --- varieties --------------------------------------------------------------------

def _structure(spec, path: str) -> SplitChowStructure:
    if not isinstance(spec, dict):
        _fail(path, "expected an object")
    name = spec.get("name")
    builder = spec.get("builder")
    try:
        if builder is None:
            return _explicit_structure(spec, path)
        if builder in ("projective_space", "P"):
            return projective_space(int(_need(spec, "n", path)), name)
        if builder == "quadric":
            return split_quadric_odd(int(_need(spec, "d", path)), name)
        if builder == "point":
            return point_structure(name or "pt")
        if builder == "two_point":
            return two_point_structure(name or "TwoPt")
        if builder == "tensor":
            factors = _need(spec, "factors", path, list)
            if len(factors) < 2:
                _fail(f"{path}.factors", "need at least two factors")
            parts = [_structure(f, f"{path}.factors[{i}]") for i, f in enumerate(factors)]
            out = parts[0]
            for nxt in parts[1:]:
                out = tensor_product(out, nxt)
            return SplitChowStructure(name or out.name, out.labels, out.dims, out.dim, out.products,
                                      out.degree, out.fundamental_index)
    except (ValueError, TypeError) as exc:
        _fail(path, str(exc))
    _fail(f"{path}.builder", f"unknown builder {builder!r}")


def _explicit_structure(spec: dict, path: str) -> SplitChowStructure:
    name = _need(spec, "name", path, str)
    labels = tuple(_need(spec, "labels", path, list))
    dims = tuple(int(d) for d in _need(spec, "dims", path, list))
    if len(dims) != len(labels):
        _fail(f"{path}.dims", f"{len(dims)} entries for {len(labels)} labels")

    def idx(x, where):
        if isinstance(x, int) and 0 <= x < len(labels):
            return x
        if isinstance(x, str) and x in labels:
            return labels.index(x)
        _fail(where, f"unknown basis element {x!r}")

    prods = []
    for i, row in enumerate(_need(spec, "products", path, list)):
        where = f"{path}.products[{i}]"
        if not isinstance(row, list) or len(row) != 4:
            _fail(where, "expected [a, b, c, coeff]")
        prods.append((idx(row[0], where), idx(row[1], where), idx(row[2], where), int(row[3])))
    degree = []
    for i, row in enumerate(_need(spec, "degree", path, list)):
        where = f"{path}.degree[{i}]"
        if not isinstance(row, list) or len(row) != 2:
            _fail(where, "expected [class, value]")
        degree.append((idx(row[0], where), int(row[1])))
    fund = idx(_need(spec, "fundamental", path), f"{path}.fundamental")
    dim = int(spec.get("dim", max(dims) if dims else 0))
    return SplitChowStructure(name, labels, dims, dim, tuple(prods), tuple(degree), fund)


def structure_to_doc(s: SplitChowStructure) -> dict:
    lab = s.labels
    return {
        "name": s.name,
        "labels": list(lab),
        "dims": list(s.dims),
        "dim": s.dim,
        "products": [[lab[a], lab[b], lab[c], int(v)] for a, b, c, v in s.products],
        "degree": [[lab[i], int(v)] for i, v in s.degree],
        "fundamental": lab[s.fundamental_index],
    }


# --- cycles -----------------------------------------------------------------------

def _expr(model: ChowModel, text, path: str) -> tuple:
    try:
        if isinstance(text, list):
            return model.expr(tuple(text))
        if not isinstance(text, str):
            _fail(path, "expected an expression string such as \"C*P1\"")
        return model.expr(parse_expr(text))
    except KeyError as exc:
        _fail(path, str(exc.args[0]))


def _factor_vectors(model: ChowModel, e: tuple) -> list:
    return [model.fundamental_class((name,)) for name in e]


def _kron(vectors: list, p: int) -> np.ndarray:
    out = np.ones(1, dtype=np.int64)
    for v in vectors:
        out = np.kron(out, v) % p
    return out


def _partial_diagonal(model: ChowModel, e: tuple, i: int, j: int, path: str) -> np.ndarray:
    if not (0 <= i < len(e) and 0 <= j < len(e)) or i == j:
        _fail(path, f"bad factor pair ({i}, {j}) for {'×'.join(e)}")
    if e[i] != e[j]:
        _fail(path, f"factors {i} and {j} differ ({e[i]} vs {e[j]})")
    shape = model.shape(e)
    ginv = model.gram_inverse((e[i],))
    fund = [model.fundamental_index((name,)) for name in e]
    out = np.zeros(shape, dtype=np.int64)
    index = list(fund)
    for a in range(shape[i]):
        for b in range(shape[j]):
            if ginv[a, b]:
                index[i], index[j] = a, b
                out[tuple(index)] = ginv[a, b]
    return out.ravel()


def _labels_of(item, path: str) -> list:
    if isinstance(item, list):
        return [str(x) for x in item]
    if isinstance(item, str):
        return [t for t in item.replace("×", " ").replace("|", " ").split()]
    _fail(path, "expected a list of labels")


def cycle_vector(model: ChowModel, e: tuple, spec, path: str) -> np.ndarray:
    """Evaluate the cycle vocabulary above on the expression ``e``."""
    p = model.p
    size = model.size(e)
    if spec == "zero":
        return np.zeros(size, dtype=np.int64)
    if spec == "fundamental":
        return model.fundamental_class(e).astype(np.int64)
    if spec == "identity":
        half = len(e) // 2
        if len(e) % 2 or e[:half] != e[half:]:
            _fail(path, f"'identity' needs an expression A×A, got {'×'.join(e) or 'pt'}")
        return np.ascontiguousarray(model.gram_inverse(e[:half])).ravel() % p
    if not isinstance(spec, dict) or len(spec) != 1:
        _fail(path, "a cycle is 'zero', 'fundamental', 'identity' or an object with one key "
                    "(terms, diagonal, classes, product, sum, dense)")
    (kind, body), = spec.items()
    where = f"{path}.{kind}"
    if kind == "dense":
        if not isinstance(body, list) or len(body) != size:
            _fail(where, f"expected {size} coefficients")
        return ff.as_fp(np.array(body, dtype=np.int64), p)
    if kind == "terms":
        out = np.zeros(size, dtype=np.int64)
        if not isinstance(body, list):
            _fail(where, "expected a list of [coeff, labels]")
        for n, term in enumerate(body):
            tw = f"{where}[{n}]"
            if not isinstance(term, list) or len(term) != 2:
                _fail(tw, "expected [coeff, labels]")
            labels = _labels_of(term[1], tw)
            if len(labels) != len(e):
                _fail(tw, f"{len(labels)} labels for {len(e)} factors")
            try:
                index = tuple(model[name].index(lab) for name, lab in zip(e, labels))
            except KeyError as exc:
                _fail(tw, str(exc.args[0]))
            out[np.ravel_multi_index(index, model.shape(e))] += int(term[0])
        return ff.as_fp(out, p)
    if kind == "diagonal":
        if not isinstance(body, list) or not body:
            _fail(where, "expected a non-empty list of factor pairs")
        out = model.fundamental_class(e).astype(np.int64)
        for n, pair in enumerate(body):
            if not isinstance(pair, list) or len(pair) != 2:
                _fail(f"{where}[{n}]", "expected [i, j]")
            out = model.product(e, out, _partial_diagonal(model, e, int(pair[0]), int(pair[1]), f"{where}[{n}]"))
        return out
    if kind == "classes":
        if not isinstance(body, dict):
            _fail(where, "expected {factor: label}")
        vecs = _factor_vectors(model, e)
        for key, lab in body.items():
            try:
                i = int(key)
                vec = np.zeros(model.size((e[i],)), dtype=np.int64)
                vec[model[e[i]].index(lab)] = 1
            except (ValueError, IndexError):
                _fail(f"{where}.{key}", f"no factor {key} in {'×'.join(e)}")
            except KeyError as exc:
                _fail(f"{where}.{key}", str(exc.args[0]))
            vecs[i] = vec
        return _kron(vecs, p)
    if kind in ("product", "sum"):
        if not isinstance(body, list) or not body:
            _fail(where, "expected a non-empty list of cycles")
        parts = [cycle_vector(model, e, sub, f"{where}[{n}]") for n, sub in enumerate(body)]
        out = parts[0]
        for nxt in parts[1:]:
            out = model.product(e, out, nxt) if kind == "product" else (out + nxt) % p
        return out
    _fail(path, f"unknown cycle kind {kind!r}")


# --- the loaded model -------------------------------------------------------------

@dataclass
class LoadedModel:
    doc: dict
    name: str
    model: ChowModel
    rm: Optional[RationalityModel]
    summands: dict = field(default_factory=dict)
    correspondences: dict = field(default_factory=dict)
    runs: dict = field(default_factory=dict)

    def summand(self, ref, path: str = "summand") -> MotiveSummand:
        """A named summand, or an inline ``{"expr", "projector", "twist"}`` object."""
        if isinstance(ref, str):
            if ref in self.summands:
                return self.summands[ref]
            _fail(path, f"unknown summand {ref!r}; known: {', '.join(sorted(self.summands)) or 'none'}")
        return _summand(self.model, ref, path, ref.get("name", "") if isinstance(ref, dict) else "")

    def correspondence(self, ref, path: str = "correspondence") -> Correspondence:
        if isinstance(ref, str):
            if ref in self.correspondences:
                return self.correspondences[ref]
            _fail(path, f"unknown correspondence {ref!r}")
        return _correspondence(self.model, ref, path)

    def run(self, name: str) -> dict:
        if name not in self.runs:
            _fail("runs", f"unknown run {name!r}; known: {', '.join(sorted(self.runs)) or 'none'}")
        return self.runs[name]

    def field_node(self, node, path: str) -> str:
        if self.rm is None:
            _fail(path, "the model declares no fields")
        if node not in self.rm.poset:
            _fail(path, f"unknown field node {node!r}")
        return node


def _summand(model: ChowModel, spec, path: str, name: str = "") -> MotiveSummand:
    e = _expr(model, _need(spec, "expr", path), f"{path}.expr")
    twist = int(spec.get("twist", 0))
    vec = cycle_vector(model, e + e, _need(spec, "projector", path), f"{path}.projector")
    n = MotiveSummand.make(model, e, vec.reshape(model.size(e), model.size(e)), twist, name)
    if not is_projector(n.projector):
        _fail(f"{path}.projector", "not an idempotent correspondence of degree 0")
    return n


def _correspondence(model: ChowModel, spec, path: str) -> Correspondence:
    src = _expr(model, _need(spec, "source", path), f"{path}.source")
    tgt = _expr(model, _need(spec, "target", path), f"{path}.target")
    vec = cycle_vector(model, src + tgt, _need(spec, "cycle", path), f"{path}.cycle")
    dims = model.cycle_dims(vec, src + tgt)
    if len(dims) > 1:
        _fail(f"{path}.cycle", f"inhomogeneous cycle (dimensions {sorted(dims)})")
    s_tw = int(spec.get("source_twist", 0))
    if "target_twist" in spec:
        t_tw = int(spec["target_twist"])
        if dims and dims.pop() != model.dim(tgt) + t_tw - s_tw:
            _fail(f"{path}.target_twist", "does not match the dimension of the cycle")
    else:
        t_tw = (dims.pop() - model.dim(tgt) + s_tw) if dims else s_tw
    return Correspondence.from_flat(model, src, tgt, vec, s_tw, t_tw)


def run_expressions(run: dict, loaded: LoadedModel) -> list:
    """Expressions whose rational spaces a run will query."""
    task = run.get("task")
    out = []
    if task == "decompose":
        e = loaded.summand(run.get("summand"), "run.summand").expr
        out.append(e + e)
    elif task in ("lemma3", "theorem"):
        x = loaded.summand(run.get("N"), "run.N").expr
        y = loaded.summand(run.get("M"), "run.M").expr
        out += [x, y, x + x, x + y, y + x, y + y, x + y + x]
    return out


def _check_version(doc: dict) -> None:
    ver = _need(doc, "format_version", "")
    try:
        major = int(str(ver).split(".")[0])
    except ValueError:
        _fail("format_version", f"cannot read version {ver!r}")
    if major != SUPPORTED_MAJOR:
        _fail("format_version", f"unsupported major version {major} (this build reads {SUPPORTED_MAJOR}.x)")


def build(doc: dict, close: bool = True) -> LoadedModel:
    """Validate a document and build the model; closes the rationality data by default.

    Structure violations raise :class:`StructureError`; every other problem
    raises :class:`ModelFormatError` naming the offending field.
    """
    _check_version(doc)
    p = _need(doc, "p", "")
    if not isinstance(p, int) or isinstance(p, bool):
        _fail("p", "expected an integer")
    try:
        ff.check_prime(p)
    except ValueError as exc:
        _fail("p", str(exc))
    model = ChowModel(p)
    for i, spec in enumerate(_need(doc, "varieties", "", list)):
        model.add(_structure(spec, f"varieties[{i}]"))

    rm = None
    if "fields" in doc:
        fields = _need(doc, "fields", "", dict)
        nodes = _need(fields, "nodes", "fields", list)
        leq = [tuple(x) for x in fields.get("leq", [])]
        try:
            poset = FieldPoset(nodes, leq)
        except (ValueError, ModelFormatError) as exc:
            _fail("fields", str(exc))
        rm = RationalityModel(model, poset)
        for i, entry in enumerate(doc.get("rational", [])):
            where = f"rational[{i}]"
            node = _need(entry, "field", where, str)
            if node not in poset:
                _fail(f"{where}.field", f"unknown field node {node!r}")
            e = _expr(model, entry["expr"], f"{where}.expr") if "expr" in entry else None
            if entry.get("full"):
                rm.set_full(node, e)
                continue
            if e is None:
                _fail(where, "generators need an 'expr'")
            gens = _need(entry, "generators", where, list)
            vecs = [cycle_vector(model, e, g, f"{where}.generators[{n}]") for n, g in enumerate(gens)]
            if vecs:
                rm.add_generators(node, e, np.array(vecs))
            else:
                rm.ensure(e)
        for i, text in enumerate(doc.get("expressions", [])):
            rm.ensure(_expr(model, text, f"expressions[{i}]"))
    elif doc.get("rational"):
        _fail("rational", "rational generators given but no 'fields'")

    loaded = LoadedModel(doc, str(doc.get("name", "model")), model, rm)
    for key, spec in doc.get("summands", {}).items():
        loaded.summands[key] = _summand(model, spec, f"summands.{key}", key)
    for key, spec in doc.get("correspondences", {}).items():
        loaded.correspondences[key] = _correspondence(model, spec, f"correspondences.{key}")
    for key, run in doc.get("runs", {}).items():
        where = f"runs.{key}"
        task = _need(run, "task", where, str)
        if task not in TASKS:
            _fail(f"{where}.task", f"unknown task {task!r}; expected one of {', '.join(TASKS)}")
        loaded.runs[key] = run
        _resolve_run(loaded, run, where)
    if rm is not None:
        for n in loaded.summands.values():
            rm.ensure(n.expr + n.expr)
        for run in loaded.runs.values():
            rm.ensure(*run_expressions(run, loaded))
        if close:
            close_and_validate(rm)
    return loaded


def _resolve_run(loaded: LoadedModel, run: dict, where: str) -> None:
    """Check that every name a run mentions exists."""
    task = run["task"]
    if task == "decompose":
        loaded.summand(run.get("summand"), f"{where}.summand")
        if "field" in run:
            loaded.field_node(run["field"], f"{where}.field")
    elif task == "classify":
        loaded.summand(run.get("inner"), f"{where}.inner")
        loaded.summand(run.get("outer_ambient"), f"{where}.outer_ambient")
    elif task in ("lemma3", "theorem"):
        keys = ("N", "M", "O") if task == "theorem" else ("N", "M")
        for key in keys:
            loaded.summand(run.get(key), f"{where}.{key}")
        for key in ("h", "k"):
            loaded.correspondence(run.get(key), f"{where}.{key}")
        for key in ("E", "F"):
            loaded.field_node(run.get(key), f"{where}.{key}")


def load(ref: str, close: bool = True) -> LoadedModel:
    return build(read_document(ref), close=close)


# --- serialization ---------------------------------------------------------------

def serialize(loaded: LoadedModel) -> dict:
    """A self-contained document: explicit structure constants and dense cycles."""
    m = loaded.model
    doc = {
        "format_version": f"{SUPPORTED_MAJOR}.0",
        "name": loaded.name,
        "p": m.p,
        "varieties": [structure_to_doc(s) for s in m.structures.values()],
    }
    rm = loaded.rm
    if rm is not None:
        doc["fields"] = {"nodes": list(rm.poset.nodes),
                         "leq": [list(pair) for pair in rm.poset.pairs()]}
        rational = [{"field": node, "full": True} for node in sorted(rm.full_nodes)]
        rational += [{"field": node, "expr": "*".join(e), "full": True} for node, e in sorted(rm.full_pairs)]
        for (node, e), vecs in rm.generators.items():
            rational.append({"field": node, "expr": "*".join(e),
                             "generators": [{"dense": [int(x) for x in v]} for v in vecs]})
        doc["rational"] = rational
        doc["expressions"] = ["*".join(e) for e in rm.exprs if e]
    doc["summands"] = {
        key: {"expr": "*".join(n.expr), "twist": n.twist,
              "projector": {"dense": [int(x) for x in n.projector.flat]}}
        for key, n in loaded.summands.items()}
    doc["correspondences"] = {
        key: {"source": "*".join(c.source), "target": "*".join(c.target),
              "source_twist": c.source_twist, "target_twist": c.target_twist,
              "cycle": {"dense": [int(x) for x in c.flat]}}
        for key, c in loaded.correspondences.items()}
    doc["runs"] = json.loads(json.dumps(loaded.runs))
    return doc


def equivalent(a: LoadedModel, b: LoadedModel) -> bool:
    """Same prime, structures, closed rational spaces, summands and correspondences."""
    if a.model.p != b.model.p or a.model.structures != b.model.structures:
        return False
    if (a.rm is None) != (b.rm is None):
        return False
    if a.rm is not None:
        if set(a.rm.spaces) != set(b.rm.spaces):
            return False
        if any(a.rm.spaces[key] != b.rm.spaces[key] for key in a.rm.spaces):
            return False
    if a.summands.keys() != b.summands.keys() or a.correspondences.keys() != b.correspondences.keys():
        return False
    return (all(a.summands[k] == b.summands[k] for k in a.summands)
            and all(a.correspondences[k] == b.correspondences[k] for k in a.correspondences)
            and a.runs == b.runs)
