"""``persilat`` command-line front end.

Lattices come either from ``--input`` (a diagram JSON, or a filtration for
``ingest``/``rank``) or from ``--shape`` (``chain:N``, ``grid:M,N``,
``zigzag:N``, ``m3``).  Exit codes: 0 ok, 1 input error, 2 non-distributive,
3 budget exceeded, 4 internal check failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from . import diagram as dg
from . import heyting as hy
from . import homology as ho
from . import shapes as sh
from .errors import (InputError, InternalCheckFailure, NonCommutativeDiagram,
                     NonDistributiveLattice, PersilatError,
                     PrimeMismatch)
from .lattice import (DEFAULT_ELEMENT_BUDGET, DEFAULT_SEED, Lattice, Provenance, hasse_dot,
                      infinite_distributivity_check, is_distributive, join, m3_lattice, meet)
from .linalg import is_prime


@dataclass
class CliConfig:
    input_path: Path | None = None
    shape: str | None = None
    prime: int = 2
    prime_given: bool = False
    seed: int = DEFAULT_SEED
    element_budget: int = DEFAULT_ELEMENT_BUDGET
    var_budget: int = 3
    output_format: str = "text"
    allow_noncommutative: bool = False

    def __post_init__(self):
        if not is_prime(self.prime):
            raise InputError(f"--prime {self.prime} is not prime")
        if self.element_budget < 1 or self.var_budget < 1:
            raise InputError("budgets must be positive")
        if self.output_format not in ("text", "json", "dot"):
            raise InputError(f"unknown format {self.output_format!r}")


@dataclass
class Context:
    """A lattice plus whatever is known about its shape."""

    lattice: Lattice
    kind: str | None = None            # "chain" | "grid" | "zigzag" | None
    params: dict[str, int] = field(default_factory=dict)
    diagram: dg.Diagram | None = None
    notes: list[str] = field(default_factory=list)


# --------------------------------------------------------------------------
# loading


def _parse_shape(text: str) -> tuple[str, list[int]]:
    kind, _, rest = text.partition(":")
    try:
        nums = [int(t) for t in rest.replace("x", ",").split(",") if t]
    except ValueError:
        raise InputError(f"bad --shape {text!r}") from None
    return kind, nums


def shape_context(kind: str, nums: list[int]) -> Context:
    if kind == "chain" and len(nums) == 1:
        return Context(sh.chain_lattice(nums[0]), "chain", {"n": nums[0]})
    if kind == "grid" and len(nums) == 2:
        m, n = nums
        return Context(sh.grid_lattice(m, n), "grid", {"m": m, "n": n})
    if kind == "zigzag" and len(nums) == 1:
        return Context(sh.zigzag_lattice(nums[0]), "zigzag", {"n": nums[0]})
    if kind == "m3" and not nums:
        return Context(m3_lattice())
    raise InputError(f"unknown shape {kind}:{nums}; use chain:N, grid:M,N, zigzag:N or m3")


def _read_input(cfg: CliConfig) -> str:
    if cfg.input_path is None:
        raise InputError("need --input or --shape")
    try:
        return Path(cfg.input_path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {cfg.input_path}: {exc.strerror}") from None


def _looks_like_filtration(text: str) -> bool:
    s = text.lstrip()
    if not s.startswith("{"):
        return True
    try:
        return "simplices" in json.loads(s)
    except json.JSONDecodeError:
        return False


def load_filtration_input(cfg: CliConfig) -> ho.FilteredComplex:
    fc = ho.load_filtration(_read_input(cfg))
    if cfg.prime_given and fc.prime != cfg.prime:
        if fc.prime != 2 or _read_input(cfg).lstrip().startswith("{"):
            raise PrimeMismatch(f"filtration is over F_{fc.prime}, --prime says {cfg.prime}")
        fc = ho.FilteredComplex(fc.simplices, fc.max_level, cfg.prime)
    return fc


def load_diagram_input(cfg: CliConfig, degree: int = 0) -> dg.Diagram:
    text = _read_input(cfg)
    if _looks_like_filtration(text):
        return ho.diagram_from_filtration(load_filtration_input(cfg), degree)
    d = dg.load_diagram(text)
    if cfg.prime_given and d.prime != cfg.prime:
        raise PrimeMismatch(f"diagram is over F_{d.prime}, --prime says {cfg.prime}")
    return d


def diagram_context(d: dg.Diagram, cfg: CliConfig) -> Context:
    violations = dg.check_commutativity(d)
    notes = []
    if violations:
        v = violations[0]
        msg = f"paths {list(v.path_a)} and {list(v.path_b)} from {v.source} to {v.target} differ"
        if not cfg.allow_noncommutative:
            raise NonCommutativeDiagram(msg)
        notes.append(f"warning: diagram does not commute ({len(violations)} violations); {msg}")
    l = dg.complete(d, cfg.element_budget)
    ctx = Context(l, diagram=d, notes=notes)
    p = d.shape_params
    if d.shape == "zigzag":
        n = int(p.get("n", (len(d.nodes) - 1) // 2))
        ctx.lattice = l.relabel(sh.zigzag_diagram_relabel(l, n))
        ctx.kind, ctx.params = "zigzag", {"n": n}
    elif d.shape == "grid" and "m" in p and "n" in p:
        m, n = int(p["m"]), int(p["n"])
        defects = sh.grid_square_defects(d, m, n)
        if defects or len(l) != (m + 1) * (n + 1):
            ctx.notes.append(f"grid-needs-bicartesian: squares {defects} are not bicartesian")
        else:
            ctx.kind, ctx.params = "grid", {"m": m, "n": n}
    elif d.shape == "chain" and all(x == f"X{i}" for i, x in enumerate(l.ids)):
        ctx.kind, ctx.params = "chain", {"n": len(l)}
    return ctx


def build_context(cfg: CliConfig, degree: int = 0) -> Context:
    if cfg.shape:
        return shape_context(*_parse_shape(cfg.shape))
    return diagram_context(load_diagram_input(cfg, degree), cfg)


# --------------------------------------------------------------------------
# commands; each returns (payload for JSON, text, exit code)


def lattice_json(l: Lattice) -> dict[str, Any]:
    cov = l.covers()
    return {
        "elements": [{"id": x, "provenance": p.value} for x, p in zip(l.ids, l.provenance)],
        "covers": sorted([l.ids[a], l.ids[b]] for a in range(len(l)) for b in range(len(l)) if cov[a, b]),
        "bottom": l.ids[l.bottom],
        "top": l.ids[l.top],
    }


def _summary_text(l: Lattice, distributive: bool, boolean: bool | None) -> str:
    counts = l.provenance_counts()
    prov = ", ".join(f"{counts[p.value]} {p.value}" for p in Provenance if counts[p.value])
    text = f"{len(l)} elements; {prov}; distributive: {'yes' if distributive else 'no'}"
    if boolean is not None:
        text += f"; boolean: {'yes' if boolean else 'no'}"
    return text


def cmd_complete(ctx: Context, cfg: CliConfig) -> tuple[dict, str, int]:
    l = ctx.lattice
    ok, witness = is_distributive(l)
    payload = {"elements": len(l), "provenance": l.provenance_counts(), "distributive": ok}
    if not ok:
        payload["witness"] = list(witness)
        text = _summary_text(l, False, None) + f"; witness {witness}"
        return payload, text, NonDistributiveLattice.exit_code
    if not infinite_distributivity_check(l, seed=cfg.seed):
        raise InternalCheckFailure("finite distributive lattice fails the subset-join check")
    boolean = hy.is_boolean(hy.heyting(l))
    payload["boolean"] = boolean
    payload["lattice"] = lattice_json(l)
    return payload, _summary_text(l, True, boolean), 0


def _closed_form(ctx: Context, a: str, b: str) -> tuple[str | None, str | None]:
    """(closed-form answer, whitelist key if the table is known to be wrong here)."""
    p = ctx.params
    if ctx.kind == "chain":
        i, j = int(a[1:]), int(b[1:])
        return f"X{sh.chain_implies(p['n'], i, j)}", None
    if ctx.kind == "grid":
        m, n = p["m"], p["n"]
        r = sh.grid_implies(m, n, sh.grid_index(m, n, a), sh.grid_index(m, n, b))
        return sh.grid_id(r.i, r.j, m, n), None
    if ctx.kind == "zigzag":
        n = p["n"]
        cf = sh.zigzag_closed_form(n, sh.zigzag_element(n, a), sh.zigzag_element(n, b))
        if cf is None:
            return None, None
        return cf.value.id(n), "Xik-implies-Xi" if cf.clause == "Xik=>Xi" else None
    return None, None


def cmd_implies(ctx: Context, cfg: CliConfig, a: str, b: str) -> tuple[dict, str, int]:
    h = hy.heyting(ctx.lattice)
    oracle = hy.implication(h, a, b)
    payload: dict[str, Any] = {"a": a, "b": b, "result": oracle}
    text = f"{a} => {b} = {oracle}"
    closed, key = _closed_form(ctx, ctx.lattice.ids[ctx.lattice.index(a)],
                               ctx.lattice.ids[ctx.lattice.index(b)])
    code = 0
    if closed is not None:
        agree = closed == oracle
        payload.update(closed_form=closed, shape=ctx.kind, agree=agree)
        text += f"; closed form ({ctx.kind}) {closed}; agree: {'yes' if agree else 'no'}"
        if not agree:
            if key in sh.ZIGZAG_WHITELIST:
                payload["whitelisted"] = key
                text += f"; whitelisted: {key}"
            else:
                code = InternalCheckFailure.exit_code
    for note in ctx.notes:
        payload.setdefault("notes", []).append(note)
        text += f"; {note}" if note.startswith("warning") else f"; closed form not asserted ({note})"
    return payload, text, code


def cmd_laws(ctx: Context, cfg: CliConfig) -> tuple[dict, str, int]:
    rep = hy.law_suite(hy.heyting(ctx.lattice), cfg.var_budget)
    ok, total = rep.numbered_laws_passing()
    payload = {
        "passing": ok, "total": total,
        "laws": [{"law": r.law, "status": r.status,
                  "witness": list(r.witness) if r.witness else None} for r in rep.results],
        "cl_valid": {k: v.valid for k, v in rep.cl_results.items()},
    }
    code = InternalCheckFailure.exit_code if rep.hard_failures or not rep.cl_all_valid() else 0
    return payload, rep.summary(), code


def cmd_valid(ctx: Context, cfg: CliConfig, formula: str) -> tuple[dict, str, int]:
    v = hy.is_valid(hy.heyting(ctx.lattice), formula, cfg.var_budget)
    if v.valid:
        return {"formula": formula, "valid": True}, "valid", 0
    cv = dict(sorted(v.counter_valuation.items()))
    text = "invalid; " + ", ".join(f"v({k})={x}" for k, x in cv.items())
    return {"formula": formula, "valid": False, "counter_valuation": cv, "value": v.value}, text, 0


def cmd_neg(ctx: Context, cfg: CliConfig, a: str) -> tuple[dict, str, int]:
    r = hy.pseudo_complement(hy.heyting(ctx.lattice), a)
    return {"a": a, "result": r}, r, 0


def cmd_meet(ctx: Context, cfg: CliConfig, a: str, b: str) -> tuple[dict, str, int]:
    r = meet(ctx.lattice, a, b)
    return {"a": a, "b": b, "result": r}, r, 0


def cmd_join(ctx: Context, cfg: CliConfig, a: str, b: str) -> tuple[dict, str, int]:
    r = join(ctx.lattice, a, b)
    return {"a": a, "b": b, "result": r}, r, 0


def cmd_rank(d: dg.Diagram, cfg: CliConfig, a: str, b: str) -> tuple[dict, str, int]:
    r = dg.persistence_rank(d, a, b)
    return {"a": a, "b": b, "rank": r}, str(r), 0


def cmd_ingest(cfg: CliConfig, degree: int) -> tuple[dict, str, int]:
    d = ho.diagram_from_filtration(load_filtration_input(cfg), degree)
    doc = d.to_json()
    return doc, json.dumps(doc, sort_keys=True, indent=2), 0


def cmd_shape(kind: str, nums: list[int], want_diagram: bool) -> tuple[Context, dict | None]:
    ctx = shape_context(kind, nums)
    if not want_diagram:
        return ctx, None
    if kind == "chain":
        from .linalg import PrimeFieldMatrix
        d = dg.chain_diagram([PrimeFieldMatrix.identity(1)] * (nums[0] - 1), [1] * nums[0])
    elif kind == "grid":
        d = sh.grid_diagram(*nums)
    else:
        d = sh.ZigzagModule.generic(nums[0]).to_diagram()
    return ctx, d.to_json()


# --------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", type=Path, help="diagram JSON or filtration file")
    common.add_argument("--shape", help="synthetic lattice: chain:N, grid:M,N, zigzag:N or m3")
    common.add_argument("--prime", type=int, help="coefficient field (default 2)")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--format", dest="output_format", default="text",
                        choices=["text", "json", "dot"])
    common.add_argument("--element-budget", type=int, default=DEFAULT_ELEMENT_BUDGET)
    common.add_argument("--var-budget", type=int, default=3)
    common.add_argument("--allow-noncommutative", action="store_true",
                        help="warn instead of failing on non-commuting diagrams")

    parser = argparse.ArgumentParser(prog="persilat", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("complete", parents=[common], help="complete to a lattice and summarize")
    for name in ("meet", "join", "implies"):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("a")
        p.add_argument("b")
    sub.add_parser("neg", parents=[common]).add_argument("a")
    sub.add_parser("laws", parents=[common], help="run the Heyting law suite")
    sub.add_parser("valid", parents=[common]).add_argument("formula")
    sub.add_parser("hasse", parents=[common], help="Hasse diagram as DOT")
    p = sub.add_parser("rank", parents=[common], help="persistence rank between two nodes")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--degree", "-k", type=int, default=0, help="homology degree for filtrations")
    p = sub.add_parser("ingest", parents=[common], help="filtration to diagram JSON")
    p.add_argument("--degree", "-k", type=int, default=0)
    for name, nargs in (("grid", 2), ("zigzag", 1), ("chain", 1)):
        p = sub.add_parser(name, parents=[common], help=f"synthesize a {name}")
        p.add_argument("size", type=int, nargs=nargs)
        p.add_argument("--diagram", action="store_true", help="emit the shape's diagram JSON")
    return parser


def _config(args) -> CliConfig:
    return CliConfig(args.input, args.shape, args.prime if args.prime is not None else 2,
                     args.prime is not None, args.seed, args.element_budget, args.var_budget,
                     args.output_format, args.allow_noncommutative)


def run(argv: list[str] | None = None) -> tuple[int, str, str]:
    """Run a command; returns (exit code, stdout text, stderr text)."""
    args = build_parser().parse_args(argv)
    cfg = None
    warn = ""
    try:
        cfg = _config(args)
        cmd = args.command
        if cmd == "ingest":
            payload, text, code = cmd_ingest(cfg, args.degree)
            return code, text + "\n", ""
        if cmd == "rank":
            if cfg.shape:
                raise InputError("rank needs a diagram or filtration --input")
            payload, text, code = cmd_rank(load_diagram_input(cfg, args.degree), cfg, args.a, args.b)
        elif cmd in ("grid", "zigzag", "chain"):
            ctx, diagram_doc = cmd_shape(cmd, list(args.size), args.diagram)
            if diagram_doc is not None:
                return 0, json.dumps(diagram_doc, sort_keys=True, indent=2) + "\n", ""
            payload, text, code = cmd_complete(ctx, cfg)
            if cfg.output_format == "dot":
                return code, hasse_dot(ctx.lattice, cmd), ""
        else:
            ctx = build_context(cfg, getattr(args, "degree", 0))
            if cmd == "hasse" or cfg.output_format == "dot":
                return 0, hasse_dot(ctx.lattice), ""
            if cmd == "complete":
                payload, text, code = cmd_complete(ctx, cfg)
            elif cmd in ("meet", "join", "implies"):
                fn = {"meet": cmd_meet, "join": cmd_join, "implies": cmd_implies}[cmd]
                payload, text, code = fn(ctx, cfg, args.a, args.b)
            elif cmd == "neg":
                payload, text, code = cmd_neg(ctx, cfg, args.a)
            elif cmd == "laws":
                payload, text, code = cmd_laws(ctx, cfg)
            else:
                payload, text, code = cmd_valid(ctx, cfg, args.formula)
            if cmd != "implies":
                warn = "".join(f"{n}\n" for n in ctx.notes if n.startswith("warning"))
    except PersilatError as exc:
        return _error(exc, cfg)
    except AssertionError as exc:
        return _error(InternalCheckFailure(f"self-check failed: {exc}"), cfg)
    if cfg.output_format == "json":
        payload = {"command": args.command, "exit_code": code, **payload}
        return code, json.dumps(payload, sort_keys=True, indent=2) + "\n", warn
    return code, text + "\n", warn


def _error(exc: PersilatError, cfg: CliConfig | None) -> tuple[int, str, str]:
    code = exc.exit_code
    doc = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    witness = getattr(exc, "witness", None)
    if witness is not None:
        doc["witness"] = list(witness)
    if cfg is not None and cfg.output_format == "json":
        return code, json.dumps(doc, sort_keys=True, indent=2) + "\n", ""
    return code, "", f"error: {doc['error']}: {doc['message']}\n"


def main(argv: list[str] | None = None) -> int:
    code, out, err = run(argv)
    sys.stdout.write(out)
    sys.stderr.write(err)
    return code


if __name__ == "__main__":
    sys.exit(main())
