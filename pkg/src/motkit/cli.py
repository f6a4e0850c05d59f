"""``motkit`` command line: validate models, decompose and classify summands, run the constructions.

Exit codes: 0 when every verification passed, 2 when an input violates a
hypothesis (including malformed or invalid model files), 1 when a computed
result fails its own verification or a run's declared expectations.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Optional

from . import __version__
from .chow import point_structure
from .correspondence import Correspondence, compose
from .decompose import krull_schmidt
from .errors import HypothesisViolation, ModelFormatError, MotkitError, StructureError, VerificationError
from .modelfile import LoadedModel, load, parse_text
from .motive import MotiveSummand, classify, profile, summand_isomorphism_witness
from .rationality import check_hypothesis1
from .theorem import LemmaInstance, Transcript, lemma3_construct, main_theorem

EXIT_OK, EXIT_VERIFY, EXIT_HYPOTHESIS = 0, 1, 2


def corr_doc(c: Correspondence) -> dict:
    return {
        "source": "×".join(c.source) or "pt",
        "target": "×".join(c.target) or "pt",
        "source_twist": c.source_twist,
        "target_twist": c.target_twist,
        "terms": [[coeff, s, t] for coeff, s, t in c.terms()],
    }


def summand_doc(n: MotiveSummand) -> dict:
    out = {"name": n.name, "expr": "×".join(n.expr) or "pt", "twist": n.twist,
           "projector": corr_doc(n.projector)["terms"]}
    if not n.is_zero():
        out["profile"] = profile(n).as_dict()
    return out


class Report:
    """Accumulates one command's machine-readable report."""

    def __init__(self, command: str, model_ref: str, seed: int, inputs: dict):
        self.doc = {"tool": "motkit", "version": __version__, "command": command, "model": model_ref,
                    "seed": seed, "inputs": inputs, "assertions": [], "transcript": [], "result": {}}

    def check(self, name: str, ok: bool, detail: str = "") -> bool:
        self.doc["assertions"].append({"name": name, "ok": bool(ok), "detail": detail})
        return bool(ok)

    def transcript(self, tr: Transcript) -> None:
        self.doc["transcript"].extend(tr.as_list())

    @property
    def ok(self) -> bool:
        return all(a["ok"] for a in self.doc["assertions"]) and all(s["ok"] for s in self.doc["transcript"])


# --- commands ------------------------------------------------------------------

def _load_run(loaded: LoadedModel, config: Optional[str], task: str) -> dict:
    if config is None:
        return {"task": task}
    if config.lstrip().startswith("{"):
        run = parse_text(config, "--config")
    elif config in loaded.runs:
        run = dict(loaded.runs[config])
    elif Path(config).is_file():
        run = parse_text(Path(config).read_text(encoding="utf-8"), config)
    else:
        raise ModelFormatError(f"--config: no run named {config!r} and no such file")
    if run.get("task", task) != task:
        raise ModelFormatError(f"--config: run {config!r} is a {run.get('task')!r} task, not {task!r}")
    return run


def _ref(text: Optional[str]):
    """CLI summand reference: a name, or inline JSON."""
    if text is not None and text.lstrip().startswith("{"):
        return parse_text(text, "argument")
    return text


def _check_expectations(rep: Report, expect: dict, observed: dict) -> None:
    for key, want in sorted(expect.items()):
        if key == "n1_min":
            rep.check(f"expected n₁ ≥ {want}", observed.get("n1_max", 0) >= want,
                      f"observed {observed.get('n1_max')}")
        elif key in observed:
            rep.check(f"expected {key} = {want}", observed[key] == want, f"observed {observed[key]}")


def cmd_validate(loaded: LoadedModel, args, rep: Report) -> None:
    m = loaded.model
    res = rep.doc["result"]
    res["p"] = m.p
    res["varieties"] = {name: {"dim": s.dim, "labels": list(s.labels), "dims": list(s.dims)}
                        for name, s in m.structures.items()}
    rep.check("split Chow structures validate", True, f"{len(m.structures)} structures")
    if loaded.rm is not None:
        rm = loaded.rm
        res["fields"] = {"nodes": list(rm.poset.nodes), "base": rm.poset.base}
        res["rational_dims"] = {f"{node}:{'×'.join(e) or 'pt'}": sp.dim
                                for (node, e), sp in sorted(rm.spaces.items())}
        res["closure"] = rm.report.lines() if rm.report else []
        rep.check("rational spaces closed and monotone along the field order", rm.closed)
    res["summands"] = {k: summand_doc(n) for k, n in sorted(loaded.summands.items())}
    rep.check("summand projectors are idempotent", True, f"{len(loaded.summands)} summands")
    res["correspondences"] = {k: corr_doc(c) for k, c in sorted(loaded.correspondences.items())}
    hyp = {}
    for name, run in sorted(loaded.runs.items()):
        if run["task"] not in ("lemma3", "theorem"):
            continue
        x = loaded.summand(run["N"]).expr
        y = loaded.summand(run["M"]).expr
        h1 = check_hypothesis1(loaded.rm, run["E"], run["F"], x, y)
        hyp[name] = {"holds": h1.ok, "witnesses": list(h1.labels)}
        if "hypothesis1" in run.get("expect", {}):
            rep.check(f"run {name}: hypothesis 1 is {run['expect']['hypothesis1']}",
                      h1.ok == run["expect"]["hypothesis1"])
    if hyp:
        res["hypothesis1"] = hyp
    res["runs"] = sorted(loaded.runs)


def _tate_witness(n: MotiveSummand, k: int, bound: int, seed: int):
    m = n.model
    m.add(point_structure("pt"))
    tate = MotiveSummand.whole(m, ("pt",), k, name=f"F[{k}]")
    return summand_isomorphism_witness(n, tate, bound=bound, seed=seed)


def cmd_decompose(loaded: LoadedModel, args, rep: Report) -> None:
    run = _load_run(loaded, args.config, "decompose")
    ref = _ref(args.summand) if args.summand is not None else run.get("summand")
    node = args.field if args.field is not None else run.get("field")
    if ref is None:
        raise ModelFormatError("decompose: give --summand or a run with a 'summand'")
    n = loaded.summand(ref, "--summand")
    rm = loaded.rm
    if node is not None:
        loaded.field_node(node, "--field")
    elif rm is not None:
        raise ModelFormatError("decompose: the model has fields; choose one with --field")
    rep.doc["inputs"].update({"summand": summand_doc(n), "field": node})
    dec = krull_schmidt(n, rm, node, seed=rep.doc["seed"], certify_bound=args.enum_bound)
    for c in dec.checks:
        rep.check(c, True)
    split = rm is None or rm.is_full(node)
    items = []
    for s, cert in zip(dec.summands, dec.certificates):
        doc = summand_doc(s)
        doc["certificate"] = cert
        base = doc["profile"]["base"]
        if split and len(base) == 1:
            w = _tate_witness(s, base[0], args.enum_bound, rep.doc["seed"])
            doc["tate"] = base[0] if w.found else None
            rep.check(f"{s.name} ≅ F[{base[0]}]", w.found, w.reason)
        items.append(doc)
    rep.doc["result"].update({"count": len(dec), "end_dim": dec.end_dim, "radical_dim": dec.radical_dim,
                              "summands": items})
    _check_expectations(rep, run.get("expect", {}), {"summands": len(dec), "profiles": dec.profiles()})


def cmd_classify(loaded: LoadedModel, args, rep: Report) -> None:
    run = _load_run(loaded, args.config, "classify")
    inner = _ref(args.inner) if args.inner is not None else run.get("inner")
    outer = _ref(args.outer_ambient) if args.outer_ambient is not None else run.get("outer_ambient")
    if inner is None or outer is None:
        raise ModelFormatError("classify: give --inner and --outer-ambient")
    a, b = loaded.summand(inner, "--inner"), loaded.summand(outer, "--outer-ambient")
    rep.doc["inputs"].update({"inner": summand_doc(a), "outer_ambient": summand_doc(b)})
    cls = classify(a, b)
    rep.check("inner is a summand of the ambient", True)
    rep.doc["result"].update(cls.as_dict())
    rep.doc["result"]["profiles"] = {"inner": profile(a).as_dict(), "ambient": profile(b).as_dict()}
    _check_expectations(rep, run.get("expect", {}), cls.as_dict())


def _lemma_inputs(loaded: LoadedModel, run: dict, keys) -> dict:
    out = {key: loaded.summand(run.get(key), f"run.{key}") for key in keys}
    out["h"] = loaded.correspondence(run.get("h"), "run.h")
    out["k"] = loaded.correspondence(run.get("k"), "run.k")
    out["E"] = loaded.field_node(run.get("E"), "run.E")
    out["F"] = loaded.field_node(run.get("F"), "run.F")
    return out


def cmd_lemma3(loaded: LoadedModel, args, rep: Report) -> None:
    run = _load_run(loaded, args.config, "lemma3")
    x = _lemma_inputs(loaded, run, ("N", "M"))
    rep.doc["inputs"].update({"N": summand_doc(x["N"]), "M": summand_doc(x["M"]), "E": x["E"], "F": x["F"],
                              "h": corr_doc(x["h"]), "k": corr_doc(x["k"])})
    tr = Transcript()
    try:
        res = lemma3_construct(LemmaInstance(loaded.rm, x["N"], x["M"], x["E"], x["F"], x["h"], x["k"]),
                               args.enum_bound, rep.doc["seed"], tr)
    finally:
        rep.transcript(tr)
    rep.doc["result"].update({
        "n1": res.n1, "power_m": res.power_m, "power_r": res.power_r,
        "h3_equals_h_pi": res.h3 == compose(x["h"], x["N"].projector),
        "f": corr_doc(res.f), "g": corr_doc(res.g), "P": corr_doc(res.P),
        "h1": corr_doc(res.h1), "h3": corr_doc(res.h3),
    })
    _check_expectations(rep, run.get("expect", {}), {"n1": res.n1, "n1_max": res.n1, "hypothesis1": True})


def cmd_theorem(loaded: LoadedModel, args, rep: Report) -> None:
    run = _load_run(loaded, args.config, "theorem")
    x = _lemma_inputs(loaded, run, ("N", "M", "O"))
    rep.doc["inputs"].update({k: summand_doc(x[k]) for k in ("N", "M", "O")})
    rep.doc["inputs"].update({"E": x["E"], "F": x["F"], "h": corr_doc(x["h"]), "k": corr_doc(x["k"])})
    tr = Transcript()
    try:
        cert = main_theorem(loaded.rm, x["N"], x["M"], x["E"], x["F"], x["O"], x["h"], x["k"],
                            seed=rep.doc["seed"], contain_bound=args.enum_bound, transcript=tr)
    finally:
        rep.transcript(tr)
    rep.doc["result"].update({
        "theta": corr_doc(cert.theta), "r": corr_doc(cert.r), "s": corr_doc(cert.s), "e": corr_doc(cert.e),
        "n1_first": cert.n1_first, "n1_second": cert.n1_second,
        "theta_profile": profile(MotiveSummand(cert.theta)).as_dict(),
    })
    _check_expectations(rep, run.get("expect", {}),
                        {"n1_max": max(cert.n1_first, cert.n1_second), "hypothesis1": True})


COMMANDS = {"validate": cmd_validate, "decompose": cmd_decompose, "classify": cmd_classify,
            "lemma3": cmd_lemma3, "theorem": cmd_theorem}


# --- plumbing ------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", choices=("text", "machine"), default="text",
                        help="human-readable text or one JSON document")
    common.add_argument("--seed", type=int, default=None,
                        help="random seed (default: the run's seed, then $MOTKIT_SEED, then 0)")
    common.add_argument("--enum-bound", type=int, default=1 << 20,
                        help="budget for exhaustive searches (isomorphism witnesses, primitivity)")
    common.add_argument("--config", help="run name from the model, a JSON file, or inline JSON")

    parser = argparse.ArgumentParser(prog="motkit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"motkit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("validate", parents=[common], help="load, validate and close a model")
    p.add_argument("model", help="model file or zoo:<preset>")
    p = sub.add_parser("decompose", parents=[common], help="Krull-Schmidt decomposition over a field")
    p.add_argument("model")
    p.add_argument("--summand", help="summand name or inline JSON")
    p.add_argument("--field", help="field node")
    p = sub.add_parser("classify", parents=[common], help="upper/lower/outer classification")
    p.add_argument("model")
    p.add_argument("--inner")
    p.add_argument("--outer-ambient", dest="outer_ambient")
    for name, text in (("lemma3", "run the lifting lemma"), ("theorem", "run the main theorem")):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("model")
    return parser


def _seed(args, loaded: Optional[LoadedModel]) -> int:
    if args.seed is not None:
        return args.seed
    if loaded is not None and args.config in getattr(loaded, "runs", {}) and "seed" in loaded.runs[args.config]:
        return int(loaded.runs[args.config]["seed"])
    env = os.environ.get("MOTKIT_SEED")
    if env:
        try:
            return int(env)
        except ValueError:
            raise ModelFormatError(f"MOTKIT_SEED: not an integer: {env!r}") from None
    return 0


def _render_text(doc: dict) -> str:
    lines = [f"motkit {doc['command']} {doc['model']} (seed {doc['seed']}): {doc['status']}"]
    if "error" in doc:
        lines.append(f"error: {doc['error']}")
    for step in doc["transcript"]:
        mark = "ok" if step["ok"] else "FAIL"
        lines.append(f"  [{mark}] {step['step']}" + (f": {step['detail']}" if step["detail"] else ""))
    for a in doc["assertions"]:
        mark = "ok" if a["ok"] else "FAIL"
        lines.append(f"  [{mark}] {a['name']}" + (f": {a['detail']}" if a["detail"] else ""))
    res = doc["result"]
    if doc["command"] == "decompose" and "summands" in res:
        lines.append(f"{res['count']} indecomposable summand(s); End has dimension {res['end_dim']}, "
                     f"radical {res['radical_dim']}")
        for s in res["summands"]:
            tate = f"  ≅ F[{s['tate']}]" if s.get("tate") is not None else ""
            lines.append(f"  {s['name']}: base {s['profile']['base']}{tate}")
    elif doc["command"] == "classify" and "outer" in res:
        lines.append(f"upper={res['upper']} lower={res['lower']} outer={res['outer']}")
    elif doc["command"] == "lemma3" and "n1" in res:
        lines.append(f"n₁ = {res['n1']}; P = {_terms(res['P'])}")
    elif doc["command"] == "theorem" and "theta" in res:
        lines.append(f"θ = {_terms(res['theta'])}; n₁ = {res['n1_first']}, {res['n1_second']}")
    elif doc["command"] == "validate" and "rational_dims" in res:
        for key, dim in res["rational_dims"].items():
            lines.append(f"  {key}: {dim}")
        for run, h in res.get("hypothesis1", {}).items():
            lines.append(f"  run {run}: hypothesis 1 {'holds' if h['holds'] else 'fails: ' + '; '.join(h['witnesses'])}")
    return "\n".join(lines)


def _terms(c: dict) -> str:
    return " + ".join((f"{k}·" if k != 1 else "") + f"({s} ⊠ {t})" for k, s, t in c["terms"]) or "0"


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    inputs = {"config": args.config, "enum_bound": args.enum_bound}
    loaded = None
    rep = Report(args.command, args.model, 0, inputs)
    code = EXIT_OK
    try:
        rep.doc["seed"] = _seed(args, None)
        loaded = load(args.model)
        rep.doc["seed"] = _seed(args, loaded)
        rep.doc["model_name"] = loaded.name
        COMMANDS[args.command](loaded, args, rep)
        if not rep.ok:
            code = EXIT_VERIFY
            rep.doc["error"] = "verification failed: " + ", ".join(
                [a["name"] for a in rep.doc["assertions"] if not a["ok"]]
                + [s["step"] for s in rep.doc["transcript"] if not s["ok"]])
    except StructureError as exc:
        code, rep.doc["error"] = EXIT_HYPOTHESIS, f"invalid structure: {exc}"
    except HypothesisViolation as exc:  # includes model format errors
        code, rep.doc["error"] = EXIT_HYPOTHESIS, str(exc)
    except VerificationError as exc:
        code, rep.doc["error"] = EXIT_VERIFY, str(exc)
    except MotkitError as exc:
        code, rep.doc["error"] = EXIT_VERIFY, f"internal error: {exc}"
    except (ArithmeticError, ValueError, KeyError) as exc:
        code, rep.doc["error"] = EXIT_VERIFY, f"internal error: {type(exc).__name__}: {exc}"
    rep.doc["status"] = {EXIT_OK: "verified", EXIT_VERIFY: "verification-failed",
                         EXIT_HYPOTHESIS: "hypothesis-violated"}[code]
    rep.doc["exit_code"] = code
    if args.output == "machine":
        sys.stdout.write(json.dumps(rep.doc, sort_keys=True, ensure_ascii=False) + "\n")
    else:
        sys.stdout.write(_render_text(rep.doc) + "\n")
    return code


if __name__ == "__main__":
    raise SystemExit(main())
