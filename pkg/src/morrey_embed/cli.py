"""Command-line front end.

Every structured argument (weight, space spec, witness family, sequence) is
accepted as a path to a JSON file, inline JSON, or a short call-like form:

    power(u=2)   piecewise(2, 4)   powerlog(p0=2, a=-1)   logexample()   constant()
    E(s=0, p=2, q=inf, phi=power(u=2))
    local_blowup(phi=power(u=2), s=1, p=1, q=1)
    single_coeff(j=3)          (a sequence: witness kind plus its depth as N, j or k)

Exit codes: 0 success/Holds, 1 Fails/violation, 2 Inconclusive,
3 usage error, 4 data error.
"""
from __future__ import annotations

import argparse
import ast
import csv
import json
import os
import sys

import numpy as np

from . import __version__
from .dyadic import PreconditionError
from .oracle import SCHEMA, Decision, EmbeddingVerdict, SpaceSpec, decide
from .seqnorm import CoeffSequence, NormRequest, SizeError, space_norm
from .verifier import VerificationReport, crosscheck, ratio_scan
from .weights import (INF, InconclusiveError, Power, WeightRangeError, check_gp, check_intc, parse_number, rphi,
                      weight_from_json)
from .witnesses import KINDS, WitnessFamily

EXIT_USAGE = 3
EXIT_DATA = 4

WEIGHT_POSITIONAL = {"power": ("u",), "piecewise": ("u", "v"), "powerlog": ("p0", "a", "L"), "logexample": (),
                     "tabulated": ()}
SPEC_POSITIONAL = ("s", "p", "q", "phi")
DEPTH_KEYS = ("N", "j", "k")


class DataError(ValueError):
    """Malformed or inadmissible input data (exit 4)."""


# ---------------------------------------------------------------------------
# short forms

def _literal(node):
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float, str)):
        return node.value
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _literal(node.operand)
        if isinstance(v, (int, float)):
            return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.Name):
        if node.id.lower() in ("inf", "oo", "infinity"):
            return "inf"
        return node.id
    if isinstance(node, ast.Call):
        return _call(node)
    if isinstance(node, (ast.List, ast.Tuple)):
        return [_literal(e) for e in node.elts]
    raise DataError(f"cannot read {ast.unparse(node)!r} in a short form")


def _call(node) -> tuple:
    if not isinstance(node.func, ast.Name):
        raise DataError(f"expected name(...) but got {ast.unparse(node.func)!r}")
    return node.func.id, [_literal(a) for a in node.args], {kw.arg: _literal(kw.value) for kw in node.keywords}


def parse_short(text: str) -> tuple:
    """'name(a, k=v)' -> (name, [a], {k: v}), recursively for nested calls."""
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError as exc:
        raise DataError(f"cannot parse {text!r}: {exc.msg}") from None
    if not isinstance(tree.body, ast.Call):
        raise DataError(f"expected name(...), got {text!r}")
    return _call(tree.body)


def _bind(name, args, kwargs, order) -> dict:
    if len(args) > len(order):
        raise DataError(f"{name}() takes at most {len(order)} positional argument(s)")
    out = dict(zip(order, args))
    dup = set(out) & set(kwargs)
    if dup:
        raise DataError(f"{name}() got duplicate argument(s) {sorted(dup)}")
    out.update(kwargs)
    return out


def _weight_from_call(call, d=None) -> object:
    name, args, kw = call
    name = name.lower()
    if name == "constant":
        if args or set(kw) - {"d"}:
            raise DataError("constant() only takes d")
        return Power(INF, int(kw.get("d", d or 1)))
    if name not in WEIGHT_POSITIONAL:
        raise DataError(f"unknown weight family {name!r}")
    params = _bind(name, args, kw, WEIGHT_POSITIONAL[name])
    dd = params.pop("d", d if d is not None else 1)
    return weight_from_json({"family": name, "params": params, "d": int(dd)})


def _load(text: str):
    """File path, inline JSON, or short form -> JSON object or parsed call."""
    if os.path.isfile(text):
        with open(text, encoding="utf-8") as fh:
            try:
                return json.load(fh)
            except json.JSONDecodeError as exc:
                raise DataError(f"{text}: invalid JSON ({exc.msg} at line {exc.lineno})") from None
    s = text.strip()
    if s.startswith("{") or s.startswith("["):
        try:
            return json.loads(s)
        except json.JSONDecodeError as exc:
            raise DataError(f"invalid JSON ({exc.msg} at column {exc.colno})") from None
    return parse_short(s)


def _strip_schema(obj: dict, what: str) -> dict:
    if "schema" in obj and obj["schema"] != SCHEMA:
        raise DataError(f"{what}: unsupported schema {obj['schema']!r}")
    return obj


def load_weight(text: str, d: int | None = None):
    obj = _load(text)
    if isinstance(obj, tuple):
        return _weight_from_call(obj, d)
    if not isinstance(obj, dict):
        raise DataError("weight must be a JSON object or a short form")
    obj = _strip_schema(obj, "weight")
    if d is not None and "d" not in obj:
        obj = dict(obj, d=d)
    return weight_from_json(obj)


def _spec_from_call(call, d=None) -> SpaceSpec:
    name, args, kw = call
    params = _bind(name, args, kw, SPEC_POSITIONAL)
    missing = {"s", "p", "phi"} - set(params)
    if missing:
        raise DataError(f"space spec {name}(...) missing field(s): {sorted(missing)}")
    extra = set(params) - {"s", "p", "q", "phi", "d"}
    if extra:
        raise DataError(f"unknown space-spec field(s): {sorted(extra)}")
    dd = params.get("d", d)
    phi = params["phi"]
    phi = _weight_from_call(phi, dd) if isinstance(phi, tuple) else load_weight(json.dumps(phi), dd)
    return SpaceSpec(name.upper(), parse_number(params["s"]), parse_number(params["p"]),
                     parse_number(params.get("q", "inf")), phi, None if dd is None else int(dd))


def load_spec(text: str, allow_c: bool = False):
    if allow_c and text.strip().upper() == "C":
        return "C"
    obj = _load(text)
    if isinstance(obj, tuple):
        return _spec_from_call(obj)
    if not isinstance(obj, dict):
        raise DataError("space spec must be a JSON object or a short form")
    return SpaceSpec.from_json(obj)


def _family_from_call(call, d=None) -> tuple[WitnessFamily, int | None]:
    name, args, kw = call
    if name not in KINDS:
        raise DataError(f"unknown witness kind {name!r}; expected one of {', '.join(KINDS)}")
    if args:
        raise DataError(f"{name}(...) takes keyword arguments only")
    depth = None
    params = {}
    for key, v in kw.items():
        if key in DEPTH_KEYS:
            if depth is not None:
                raise DataError(f"{name}(...): depth given twice")
            depth = int(v)
        elif key == "phi":
            params[key] = _weight_from_call(v, d) if isinstance(v, tuple) else load_weight(json.dumps(v), d)
        elif key == "exponent_source":
            params[key] = str(v)
        elif key == "d":
            params[key] = int(v)
        else:
            params[key] = parse_number(v)
    if d is not None and "d" not in params and name in ("single_level", "single_coeff", "fine_index"):
        params["d"] = int(d)
    return WitnessFamily(name, params), depth


def load_family(text: str, d: int | None = None) -> tuple[WitnessFamily, int | None]:
    obj = _load(text)
    if isinstance(obj, tuple):
        return _family_from_call(obj, d)
    if not isinstance(obj, dict):
        raise DataError("witness family must be a JSON object or a short form")
    return WitnessFamily.from_json(_strip_schema(obj, "witness family")), None


def load_sequence(text: str, d: int | None = None) -> CoeffSequence:
    obj = _load(text)
    if isinstance(obj, tuple):
        fam, depth = _family_from_call(obj, d)
        if depth is None:
            raise DataError(f"sequence short form {obj[0]}(...) needs its depth as N=, j= or k=")
        return fam.generate(depth)
    if not isinstance(obj, dict):
        raise DataError("sequence must be a JSON object or a short form")
    seq = CoeffSequence.from_json(_strip_schema(obj, "sequence"))
    if d is not None and seq.d != d:
        raise DataError(f"sequence dimension {seq.d} disagrees with --d {d}")
    return seq


def _int_list(text: str) -> list:
    try:
        out = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise DataError(f"expected comma-separated integers, got {text!r}") from None
    if not out:
        raise DataError("empty depth list")
    return out


def _grid(text: str) -> np.ndarray:
    """'a:b:n' (n evenly spaced points) or a comma list."""
    try:
        if ":" in text:
            a, b, n = text.split(":")
            return np.linspace(float(a), float(b), int(n))
        return np.array([float(x) for x in text.split(",")])
    except ValueError:
        raise DataError(f"bad grid {text!r}; use start:stop:count or a comma list") from None


# ---------------------------------------------------------------------------
# output

def fmt_number(x: float) -> str:
    if x == INF:
        return "inf"
    if float(x).is_integer() and abs(x) < 1e15:
        return str(int(x))
    return repr(float(x))


def _num(x):
    return "inf" if x == INF else x


def emit(obj, out: str | None = None):
    text = json.dumps(obj, indent=2, ensure_ascii=False, allow_nan=False) + "\n"
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


REPORT_FIELDS = {
    "check-class": {"schema", "report", "phi", "p", "member", "witness", "reason"},
    "intc": {"schema", "report", "phi", "holds", "eps", "C", "witness"},
    "rphi": {"schema", "report", "phi", "value"},
    "norm": {"schema", "report", "scale", "s", "p", "q", "phi", "value", "argmax_cube", "flags"},
    "crosscheck": {"schema", "report", "status", "details", "offending", "verdict", "scan"},
}


def parse_report(obj: dict):
    """Re-parse any report the CLI emits; raises ValueError on schema violations."""
    if not isinstance(obj, dict):
        raise ValueError("report must be a JSON object")
    if obj.get("schema") != SCHEMA:
        raise ValueError(f"unsupported schema {obj.get('schema')!r}")
    kind = obj.get("report")
    if kind is None:
        if "decision" in obj:
            return EmbeddingVerdict.from_json(obj)
        if "trend" in obj:
            return VerificationReport.from_json(obj)
        if "entries" in obj:
            return CoeffSequence.from_json(obj)
        raise ValueError("unrecognised report")
    if kind not in REPORT_FIELDS:
        raise ValueError(f"unknown report kind {kind!r}")
    unknown = set(obj) - REPORT_FIELDS[kind]
    if unknown:
        raise ValueError(f"unknown field(s) in {kind} report: {sorted(unknown)}")
    if "phi" in obj:
        weight_from_json(obj["phi"])
    if kind == "crosscheck":
        EmbeddingVerdict.from_json(obj["verdict"])
        VerificationReport.from_json(obj["scan"])
    return obj


# ---------------------------------------------------------------------------
# subcommands

def cmd_check_class(a) -> int:
    phi = load_weight(a.phi, a.d)
    res = check_gp(phi, a.p)
    emit({"schema": SCHEMA, "report": "check-class", "phi": phi.to_json(), "p": a.p, "member": res.member,
          "witness": None if res.witness is None else [_num(x) for x in res.witness], "reason": res.reason}, a.out)
    return 0 if res.member else 1


def cmd_intc(a) -> int:
    phi = load_weight(a.phi, a.d)
    res = check_intc(phi)
    emit({"schema": SCHEMA, "report": "intc", "phi": phi.to_json(), "holds": res.holds, "eps": res.eps, "C": res.C,
          "witness": None if res.witness is None else [_num(x) for x in res.witness]}, a.out)
    return 0 if res.holds else 1


def cmd_rphi(a) -> int:
    phi = load_weight(a.phi, a.d)
    r = rphi(phi)
    if a.json:
        emit({"schema": SCHEMA, "report": "rphi", "phi": phi.to_json(), "value": _num(r)}, a.out)
    else:
        print(fmt_number(r))
    return 0


def cmd_norm(a) -> int:
    phi = load_weight(a.phi, a.d)
    seq = load_sequence(a.seq, phi.d)
    req = NormRequest(a.scale, a.s, a.p, a.q, phi)
    res = space_norm(seq, req)
    if a.json:
        body = res.to_json()
        emit({"schema": SCHEMA, "report": "norm", "scale": a.scale, "s": a.s, "p": a.p, "q": _num(a.q),
              "phi": phi.to_json(), **body}, a.out)
    else:
        print(fmt_number(res.value))
    return 0


def cmd_embed(a) -> int:
    src = load_spec(a.src)
    tgt = load_spec(a.tgt, allow_c=True)
    v = decide(src, tgt)
    emit(v.to_json(), a.out)
    return v.exit_code


def cmd_witness(a) -> int:
    fam, depth = load_family(a.family, a.d)
    n = a.depth if a.depth is not None else depth
    if n is None:
        raise DataError("witness needs a depth (--depth, or N= in the short form)")
    seq = fam.generate(n)
    emit({"schema": SCHEMA, **seq.to_json()}, a.out)
    return 0


WITNESS_DEPTHS = (2, 4, 8, 16)
RANDOM_DEPTHS = (2, 3, 4, 5, 6)


def cmd_verify(a) -> int:
    src = load_spec(a.src)
    tgt = load_spec(a.tgt, allow_c=True)
    verdict = decide(src, tgt)
    choice = (a.family or "auto").strip()
    if choice.lower() == "auto":
        # a bounded random scan cannot confirm a Fails verdict, so follow the verdict's witness
        fam = verdict.witness if verdict.decision == Decision.FAILS else None
    elif choice.lower() == "random":
        fam = None
    else:
        fam, _ = load_family(choice, src.d)
    depths = _int_list(a.depths) if a.depths else (WITNESS_DEPTHS if fam is not None else RANDOM_DEPTHS)
    rep = ratio_scan(src, tgt, fam, depths, seed=a.seed, n_draws=a.draws, decay=a.decay, budget=a.budget)
    res = crosscheck(verdict, [rep])
    rep.agreement = res.consistent
    if a.csv:
        with open(a.csv, "w", encoding="utf-8", newline="") as fh:
            fh.write(rep.to_csv())
    if a.crosscheck:
        emit({"schema": SCHEMA, "report": "crosscheck", "status": res.status, "details": res.details,
              "offending": None if res.offending is None else res.offending.family_id,
              "verdict": verdict.to_json(), "scan": rep.to_json()}, a.out)
    else:
        emit(rep.to_json(), a.out)
    return 0 if res.consistent else 1


def cmd_atlas(a) -> int:
    src = load_spec(a.src)
    s2 = _grid(a.s2)
    inv = _grid(a.inv_p2)
    fixed_phi = None if a.phi2 in (None, "lebesgue") else load_weight(a.phi2, src.d)
    rows = []
    for x in s2:
        for y in inv:
            if not y > 0:
                raise DataError("inv_p2 values must be positive")
            p2 = 1.0 / y
            phi2 = fixed_phi if fixed_phi is not None else Power(p2, src.phi.d)
            try:
                tgt = SpaceSpec(a.tgt_scale, float(x), p2, a.q2, phi2, src.d)
            except PreconditionError:
                rows.append((x, y, "NotAdmissible"))
                continue
            rows.append((x, y, decide(src, tgt).decision.value))
    fh = open(a.out, "w", encoding="utf-8", newline="") if a.out else sys.stdout
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["s2", "inv_p2", "decision"])
        for x, y, dec in rows:
            w.writerow([f"{x:.12g}", f"{y:.12g}", dec])
    finally:
        if a.out:
            fh.close()
    return 0


# ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _qvalue(text: str) -> float:
    try:
        v = parse_number(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="morrey-embed", description="Embeddings between generalised Morrey smoothness spaces.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def weight_args(p):
        p.add_argument("--phi", required=True, help="weight: JSON, file, or short form like power(u=2)")
        p.add_argument("--d", type=int, default=None, help="dimension (default: the weight's own, else 1)")
        p.add_argument("--out", help="write the report here instead of stdout")

    p = sub.add_parser("check-class", help="decide phi in G_p")
    weight_args(p)
    p.add_argument("--p", type=_qvalue, required=True)
    p.set_defaults(fn=cmd_check_class)

    p = sub.add_parser("intc", help="polynomial lower growth condition")
    weight_args(p)
    p.set_defaults(fn=cmd_intc)

    p = sub.add_parser("rphi", help="local integrability exponent r_phi")
    weight_args(p)
    p.add_argument("--json", action="store_true", help="emit a JSON report instead of the bare number")
    p.set_defaults(fn=cmd_rphi)

    p = sub.add_parser("norm", help="sequence-space quasi-norm")
    weight_args(p)
    p.add_argument("--scale", choices=["b", "f", "n", "e"], required=True)
    p.add_argument("--seq", required=True, help="sequence: JSON, file, or witness short form with depth")
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--p", type=_qvalue, required=True)
    p.add_argument("--q", type=_qvalue, default=INF)
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_norm)

    p = sub.add_parser("embed", help="decide src into tgt")
    p.add_argument("--src", required=True)
    p.add_argument("--tgt", required=True, help='target spec, or "C" for bounded continuous functions')
    p.add_argument("--out")
    p.set_defaults(fn=cmd_embed)

    p = sub.add_parser("witness", help="generate a witness sequence")
    p.add_argument("--family", required=True)
    p.add_argument("--depth", type=int)
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_witness)

    p = sub.add_parser("verify", help="ratio scan plus cross-check against the verdict")
    p.add_argument("--src", required=True)
    p.add_argument("--tgt", required=True)
    p.add_argument("--family", help='witness family short form, "random", or "auto" (default: the verdict\'s '
                                    'witness on Fails, random sequences otherwise)')
    p.add_argument("--depths", help="comma-separated depths (default 2,4,8,16 for witnesses, 2..6 for random)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--draws", type=int, default=200)
    p.add_argument("--decay", type=float, default=None)
    p.add_argument("--budget", type=int, default=2)
    p.add_argument("--csv", help="also write the ratio table as CSV")
    p.add_argument("--crosscheck", action="store_true", help="emit the cross-check report wrapping the scan")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("atlas", help="verdict map over (s2, 1/p2) for a fixed source")
    p.add_argument("--src", required=True)
    p.add_argument("--tgt-scale", choices=["N", "E", "B", "F"], default="E")
    p.add_argument("--s2", default="-1:2:13")
    p.add_argument("--inv-p2", default="0.25:2:8")
    p.add_argument("--q2", type=_qvalue, default=INF)
    p.add_argument("--phi2", default=None, help='target weight; default "lebesgue" uses power(u=p2)')
    p.add_argument("--out")
    p.set_defaults(fn=cmd_atlas)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (DataError, ValueError, PreconditionError, InconclusiveError, WeightRangeError, SizeError, KeyError,
            TypeError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"morrey-embed {args.command}: error: {msg}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
