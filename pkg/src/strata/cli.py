"""Command-line front end: ``strata info|strata|check|system|ringel|univext``."""

from __future__ import annotations

import argparse
import hashlib
import json
import re
import sys
from collections.abc import Sequence
from pathlib import Path

from . import __version__
from .algebra import AdmissibilityError, Algebra, DSLParseError, parse_document
from .exactlin import QQ, Field
from .module import from_literal, injective, is_brick, projective, simple
from .strata import (
    DEFAULT_CHOICE_BOUND,
    DEFAULT_NODE_BUDGET,
    PreconditionError,
    costandard_module,
    enumerate_mixed_choices,
    family,
    is_mixed_stratified,
    is_stone,
    parse_choice,
    proper_costandard_module,
    proper_standard_module,
    standard_module,
)
from .systems import (
    CapExceeded,
    build_cosystem,
    build_system,
    default_cap,
    universal_extension_sequence,
)

SCHEMA = "strata-report/1"

EXIT_PASS, EXIT_FAIL, EXIT_UNDECIDED, EXIT_INPUT = 0, 1, 2, 3

CONFIG_KEYS = {"cap", "budget", "bound", "degree_cap", "coresolution_cap"}


class InputError(Exception):
    pass


def parse_field(text: str) -> Field:
    t = text.replace(" ", "")
    if t in ("Q", "QQ"):
        return QQ
    m = re.fullmatch(r"(?:F|GF)(\d+)", t)
    if not m:
        raise InputError(f"unknown field {text!r}; use Q or F<p>")
    p = int(m.group(1))
    if p < 2 or any(p % q == 0 for q in range(2, int(p**0.5) + 1)):
        raise InputError(f"{p} is not prime")
    return Field(p)


_MODULE_EXPR = re.compile(r"^(P|I|S|Delta|pDelta|Nabla|pNabla)\((.+)\)$")


def parse_module(A: Algebra, literals: dict, text: str):
    """``P(v)``, ``I(v)``, ``S(v)``, ``Delta(v)``, ``pDelta(v)``, ``Nabla(v)``, ``pNabla(v)`` or a named literal."""
    text = text.strip()
    m = _MODULE_EXPR.match(text)
    if m:
        kind, label = m.group(1), m.group(2).strip()
        if label not in A.vertices:
            raise InputError(f"unknown vertex {label!r}")
        i = A.vertex_index(label)
        build = {
            "P": projective,
            "I": injective,
            "S": simple,
            "Delta": standard_module,
            "pDelta": proper_standard_module,
            "Nabla": costandard_module,
            "pNabla": proper_costandard_module,
        }[kind]
        return build(A, i)
    if text in literals:
        return from_literal(A, literals[text])
    raise InputError(f"unknown module {text!r}")


def _digest(text: str, config: dict) -> str:
    h = hashlib.sha256()
    h.update(text.encode())
    h.update(json.dumps(config, sort_keys=True).encode())
    return h.hexdigest()


def _load(args) -> tuple[Algebra, dict, str]:
    try:
        text = Path(args.file).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {args.file}: {exc.strerror or exc}") from exc
    field = parse_field(args.field) if args.field else None
    try:
        A, lits = parse_document(text, field)
    except DSLParseError as exc:
        raise InputError(f"{args.file}: {exc}") from exc
    except (AdmissibilityError, ValueError) as exc:
        raise InputError(f"{args.file}: {exc}") from exc
    return A, lits, text


def _config(args) -> dict:
    cfg: dict = {}
    if args.config:
        try:
            cfg = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(cfg, dict) or set(cfg) - CONFIG_KEYS:
            raise InputError(f"config keys must be among {sorted(CONFIG_KEYS)}")
    if getattr(args, "cap", None) is not None:
        cfg["cap"] = args.cap
    return cfg


def _choice(A: Algebra, args) -> tuple[str, ...]:
    if not args.choice:
        raise InputError("--choice is required")
    try:
        return parse_choice(args.choice, A.n)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def _algebra_summary(A: Algebra) -> dict:
    return {
        "field": A.field.describe(),
        "vertices": list(A.vertices),
        "arrows": [{"name": a.name, "source": A.vertices[a.source], "target": A.vertices[a.target]} for a in A.arrows],
        "relations": [A.relation_text(r) for r in A.relations],
        "dim": A.dim,
        "loewy_length": A.loewy_length,
        "cartan": A.cartan(),
        "basis": [A.path_name(p) for p in A.basis],
    }


# -- subcommands -----------------------------------------------------------


def cmd_info(A, lits, args, cfg):
    return _algebra_summary(A), "pass"


def cmd_strata(A, lits, args, cfg):
    rows = []
    for i in range(A.n):
        D, pD = standard_module(A, i), proper_standard_module(A, i)
        N, pN = costandard_module(A, i), proper_costandard_module(A, i)
        rows.append(
            {
                "vertex": A.vertices[i],
                "standard": {"dims": list(D.dims), "stone": is_stone(D), "brick": is_brick(D)},
                "proper_standard": {"dims": list(pD.dims), "stone": is_stone(pD), "brick": is_brick(pD)},
                "costandard": {"dims": list(N.dims)},
                "proper_costandard": {"dims": list(pN.dims)},
            }
        )
    return {"strata": rows}, "pass"


def cmd_check(A, lits, args, cfg):
    budget = cfg.get("budget", DEFAULT_NODE_BUDGET)
    if args.all:
        reports = enumerate_mixed_choices(A, bound=cfg.get("bound", DEFAULT_CHOICE_BOUND), budget=budget)
        results = {
            "choices": [r.to_json() for r in reports],
            "passing": ["".join(r.choice) for r in reports if r.passed],
        }
        status = "undecided" if any(r.undecided for r in reports) else "pass"
        return results, status
    rep = is_mixed_stratified(A, _choice(A, args), budget=budget)
    status = "pass" if rep.passed else ("undecided" if rep.undecided else "fail")
    return rep.to_json(), status


def cmd_system(A, lits, args, cfg):
    choice = _choice(A, args)
    theta = family(A, choice)
    cap = cfg.get("cap", default_cap(A))
    try:
        built = build_cosystem(theta, cap) if args.cosystem else build_system(theta, cap)
    except CapExceeded as exc:
        return {"choice": list(choice), "cap": cap, "failed_index": exc.index, "reason": str(exc)}, "cap_exceeded"
    except PreconditionError as exc:
        return {"choice": list(choice), "reason": str(exc)}, "fail"
    out = {"choice": list(choice), "cap": cap, "kind": "cosystem" if args.cosystem else "system"}
    out.update(built.to_json())
    return out, "pass" if built.check.passed else "fail"


def cmd_ringel(A, lits, args, cfg):
    from .ringel import (
        DEFAULT_CORESOLUTION_CAP,
        DEFAULT_WAKAMATSU_DEGREE_CAP,
        ringel_dual,
        wakamatsu_check,
    )

    choice = _choice(A, args)
    cap = cfg.get("cap", default_cap(A))
    try:
        rd = ringel_dual(A, choice, cap)
    except PreconditionError as exc:
        return {"choice": list(choice), "reason": str(exc)}, "fail"
    except CapExceeded as exc:
        return {"choice": list(choice), "cap": cap, "failed_index": exc.index, "reason": str(exc)}, "cap_exceeded"
    out = rd.to_json()
    out["cartan_A"] = A.cartan()
    wk = wakamatsu_check(
        rd.cosystem.injectives,
        cfg.get("degree_cap", DEFAULT_WAKAMATSU_DEGREE_CAP),
        cfg.get("coresolution_cap", DEFAULT_CORESOLUTION_CAP),
    )
    out["cogenerator"] = wk.to_json()
    return out, "pass" if rd.passed and wk.wakamatsu else "fail"


def cmd_univext(A, lits, args, cfg):
    M = parse_module(A, lits, args.M)
    N = parse_module(A, lits, args.N)
    cap = cfg.get("cap", default_cap(A))
    if cap < 1:
        raise InputError("cap must be at least 1")
    try:
        tr = universal_extension_sequence(M, N, cap)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    out = {"M": args.M, "N": args.N, "cap": cap}
    out.update(tr.to_json())
    return out, "pass" if tr.status == "stabilized" else "cap_exceeded"


COMMANDS = {
    "info": cmd_info,
    "strata": cmd_strata,
    "check": cmd_check,
    "system": cmd_system,
    "ringel": cmd_ringel,
    "univext": cmd_univext,
}

EXIT_FOR_STATUS = {"pass": EXIT_PASS, "fail": EXIT_FAIL, "undecided": EXIT_UNDECIDED, "cap_exceeded": EXIT_UNDECIDED}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="strata", description=__doc__)
    parser.add_argument("--version", action="version", version=f"strata {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("file", help="algebra description file")
    common.add_argument("--field", help="override the field: Q or F<p>")
    common.add_argument("--json", metavar="OUT", help="write the report to OUT instead of stdout")
    common.add_argument("--config", help="JSON file with cap, budget, bound, degree_cap, coresolution_cap")
    for name in ("info", "strata"):
        sub.add_parser(name, parents=[common])
    p = sub.add_parser("check", parents=[common])
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--choice", help="comma list of d (standard) and p (proper standard)")
    g.add_argument("--all", action="store_true", help="try every choice")
    for name in ("system", "ringel"):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("--choice", required=True)
        p.add_argument("--cap", type=int)
        if name == "system":
            p.add_argument("--cosystem", action="store_true", help="build the injective side instead")
    p = sub.add_parser("univext", parents=[common])
    p.add_argument("M", help="module expression such as P(1), Delta(2) or a named module")
    p.add_argument("N", help="module expression for the extending module")
    p.add_argument("--cap", type=int)
    return parser


def render(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config(args)
        A, lits, text = _load(args)
        results, status = COMMANDS[args.command](A, lits, args, cfg)
    except InputError as exc:
        print(f"strata: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    inputs = {"file": Path(args.file).name, "digest": _digest(text, cfg), "field": A.field.describe()}
    for key in ("choice", "M", "N"):
        if getattr(args, key, None):
            inputs[key] = getattr(args, key)
    if getattr(args, "all", False):
        inputs["all"] = True
    if getattr(args, "cosystem", False):
        inputs["cosystem"] = True
    inputs["config"] = cfg
    report = {"schema": SCHEMA, "command": args.command, "inputs": inputs, "results": results, "status": status}
    body = render(report)
    if args.json:
        try:
            Path(args.json).write_text(body)
        except OSError as exc:
            print(f"strata: error: cannot write {args.json}: {exc.strerror or exc}", file=sys.stderr)
            return EXIT_INPUT
        print(f"{args.command}: {status}")
    else:
        sys.stdout.write(body)
    return EXIT_FOR_STATUS[status]


if __name__ == "__main__":
    sys.exit(main())
