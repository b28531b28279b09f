"""Command-line front end.

Subcommands: family, expand, reduce, verify, rank, hadamard, compose.
All outputs are deterministic (identical inputs give byte-identical
files) and written atomically.  Exit codes: 0 success, 1 a verification
found a mismatch, 2 usage or parse errors.
"""

import argparse
import os
import sys
import tempfile
from dataclasses import dataclass
from pathlib import Path

from .abp import abp_eval, hankel_rank, parse_abp
from .algebra import (
    DEFAULT_TERM_BUDGET,
    TermBudgetError,
    VarTable,
    format_poly,
    parse_poly,
)
from .circuits import CircuitFormatError, expand, parse_circuit
from .families import ChiTable, FAMILY_SPEC_HELP, FamilyInstance, make_family
from .fields import Field, FieldError, field_from_spec
from .reductions import (
    compose_abp,
    dk_to_d2_reduction,
    dyck_completeness_reduction,
    dyck_depth_reduction,
    format_reduction,
    hierarchy_iproj,
    iproj_to_abp,
    pal_to_d2_reduction,
    pal_vsk_reduction,
    palsq_to_d2_reduction,
    parse_reduction,
    per_to_idstar_reduction,
    per_to_perstar_chi_reduction,
    vbp_trivial_reduction,
    verify_reduction,
)
from .automata import hadamard_via_matrices


@dataclass
class WorkspaceConfig:
    field: Field
    term_budget: int
    state_budget: int
    seed: int
    fmt: str


class UsageError(ValueError):
    pass


def _write_atomic(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".ncpoly-")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _params(tokens) -> dict:
    out = {}
    for tok in tokens:
        key, eq, value = tok.partition("=")
        if not eq:
            raise UsageError(f"expected key=value, got {tok!r}")
        out[key] = value
    return out


def _need(params: dict, key: str) -> str:
    if key not in params:
        raise UsageError(f"missing parameter {key}=...")
    return params[key]


def cmd_family(args, cfg: WorkspaceConfig) -> int:
    inst = make_family(args.spec, cfg.field, term_budget=cfg.term_budget)
    _write_atomic(args.out, format_poly(inst.poly))
    return 0


def cmd_expand(args, cfg: WorkspaceConfig) -> int:
    circuit = parse_circuit(Path(args.circuit).read_text(), VarTable(field=cfg.field))
    poly = expand(circuit, degree_cap=args.cap, term_budget=cfg.term_budget)
    _write_atomic(args.out, format_poly(poly))
    return 0


def _build_reduction(kind: str, params: dict, cfg: WorkspaceConfig):
    """Returns (reduction, source polynomial to embed or None)."""
    field = cfg.field
    if kind == "dyck-complete":
        circuit = parse_circuit(Path(_need(params, "circuit")).read_text(), VarTable(field=field))
        r = dyck_completeness_reduction(circuit)
        return r, expand(circuit, term_budget=cfg.term_budget)
    if kind == "pal-vsk":
        circuit = parse_circuit(Path(_need(params, "circuit")).read_text(), VarTable(field=field))
        r = pal_vsk_reduction(circuit)
        return r, expand(circuit, term_budget=cfg.term_budget)
    if kind == "pal-d2":
        return pal_to_d2_reduction(int(_need(params, "n")), field), None
    if kind == "palsq-d2":
        return palsq_to_d2_reduction(int(_need(params, "n")), field), None
    if kind == "dk-d2":
        return dk_to_d2_reduction(int(_need(params, "k")), int(_need(params, "d")), field), None
    if kind == "depth":
        return (
            dyck_depth_reduction(
                int(_need(params, "k1")), int(_need(params, "k2")), int(_need(params, "n")), field
            ),
            None,
        )
    if kind == "per-idstar":
        return per_to_idstar_reduction(int(_need(params, "n")), field), None
    if kind == "per-chi":
        n = int(_need(params, "n"))
        chi_path = _need(params, "chi")
        chi = ChiTable.parse(Path(chi_path).read_text(), n, field)
        r = per_to_perstar_chi_reduction(n, chi, field)
        # verify must be able to rebuild the weighted target from the file
        r.target = f"perstarchi:n={n},chi={chi_path}"
        return r, None
    if kind == "hier-iproj":
        i = int(_need(params, "i"))
        n = int(_need(params, "n"))
        m = hierarchy_iproj(i, n, field)
        target = make_family(f"hier:i={i + 1},n={n}", field)
        r = iproj_to_abp(m, target.poly.degree(), source=f"hier:i={i},n={n}", target=target.spec_string)
        r.kind = "hier-iproj"
        return r, None
    if kind == "vbp-trivial":
        abp = parse_abp(Path(_need(params, "abp")).read_text(), VarTable(field=field))
        target = make_family(_need(params, "target"), field)
        witness = tuple(target.table.var(name).id for name in _need(params, "witness").split(","))
        r = vbp_trivial_reduction(abp, target, witness)
        return r, abp_eval(abp, term_budget=cfg.term_budget)
    raise UsageError(f"unknown reduction kind {kind!r}")


def cmd_reduce(args, cfg: WorkspaceConfig) -> int:
    r, source_poly = _build_reduction(args.kind, _params(args.params), cfg)
    if r.dim > cfg.state_budget:
        raise UsageError(f"substitution dimension {r.dim} exceeds the state budget")
    _write_atomic(args.out, format_reduction(r, source_poly=source_poly))
    return 0


def _resolve_source(spec: str | None, embedded, r, cfg: WorkspaceConfig) -> FamilyInstance:
    if spec:
        # file-based sources are read against the reduction's output alphabet
        # so that comparison happens termwise, not by table identity
        table = VarTable(r.substitution.output_table.names, field=cfg.field)
        if spec.startswith("circuit:"):
            circuit = parse_circuit(Path(spec[8:]).read_text(), table)
            return FamilyInstance.from_poly("circuit", expand(circuit, term_budget=cfg.term_budget))
        if spec.startswith("poly:"):
            return FamilyInstance.from_poly("poly", parse_poly(Path(spec[5:]).read_text(), table))
        return make_family(spec, cfg.field)
    if embedded is not None:
        return FamilyInstance.from_poly("embedded", embedded)
    return make_family(r.source, cfg.field)


def cmd_verify(args, cfg: WorkspaceConfig) -> int:
    r, embedded = parse_reduction(Path(args.reduction).read_text(), cfg.field)
    source = _resolve_source(args.source, embedded, r, cfg)
    target = make_family(args.target or r.target, cfg.field)
    if target.table != r.substitution.input_table:
        raise UsageError("target family alphabet does not match the reduction")
    verdict = verify_reduction(r, source, target)
    print(verdict)
    return 0 if verdict.passed else 1


def cmd_rank(args, cfg: WorkspaceConfig) -> int:
    inst = make_family(args.spec, cfg.field)
    poly = inst.poly
    if not poly.is_homogeneous():
        raise UsageError("Hankel ranks need a homogeneous family")
    lines = []
    for cut in args.cut:
        rank = hankel_rank(poly, cut)
        if cfg.fmt == "structured":
            lines.append(f"cut={cut} rank={rank}")
        else:
            lines.append(f"{cut} {rank}")
    text = "\n".join(lines) + "\n"
    if args.out:
        _write_atomic(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_hadamard(args, cfg: WorkspaceConfig) -> int:
    table = VarTable(field=cfg.field)
    if args.circuit:
        f = parse_circuit(Path(args.circuit).read_text(), table)
    else:
        f = parse_poly(Path(args.poly).read_text(), table)
    g = parse_abp(Path(args.abp).read_text(), table)
    result = hadamard_via_matrices(f, g)
    _write_atomic(args.out, format_poly(result))
    return 0


def cmd_compose(args, cfg: WorkspaceConfig) -> int:
    r1, poly1 = parse_reduction(Path(args.first).read_text(), cfg.field)
    r2, _poly2 = parse_reduction(Path(args.second).read_text(), cfg.field)
    composed = compose_abp(r1, r2)
    _write_atomic(args.out, format_reduction(composed, source_poly=poly1))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ncpoly",
        description="Exact workbench for noncommutative polynomial families and reductions.",
    )
    parser.add_argument("--field", default="q", help="coefficient field: q or p=<prime>")
    parser.add_argument("--term-budget", type=int, default=DEFAULT_TERM_BUDGET)
    parser.add_argument("--state-budget", type=int, default=10**5)
    parser.add_argument("--seed", type=int, default=0, help="seed for randomized helpers")
    parser.add_argument("--format", dest="fmt", choices=["text", "structured"], default="text")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("family", help="write a family instance as polynomial text")
    p.add_argument("spec", help=FAMILY_SPEC_HELP)
    p.add_argument("--out", default="-")

    p = sub.add_parser("expand", help="expand a circuit file into polynomial text")
    p.add_argument("circuit")
    p.add_argument("--cap", type=int, default=None)
    p.add_argument("--out", default="-")

    p = sub.add_parser("reduce", help="build a named reduction and serialize it")
    p.add_argument(
        "kind",
        choices=[
            "dyck-complete",
            "pal-vsk",
            "pal-d2",
            "palsq-d2",
            "dk-d2",
            "depth",
            "per-idstar",
            "per-chi",
            "hier-iproj",
            "vbp-trivial",
        ],
    )
    p.add_argument("params", nargs="*", help="key=value parameters for the construction")
    p.add_argument("--out", default="-")

    p = sub.add_parser("verify", help="check a serialized reduction against its families")
    p.add_argument("reduction")
    p.add_argument("--source", default=None, help="family spec, circuit:PATH or poly:PATH")
    p.add_argument("--target", default=None, help="family spec (default: the file header)")

    p = sub.add_parser("rank", help="Hankel ranks of a family at the given cuts")
    p.add_argument("spec")
    p.add_argument("--cut", type=int, action="append", required=True)
    p.add_argument("--out", default=None)

    p = sub.add_parser("hadamard", help="coefficientwise product of a circuit/poly with an ABP")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--circuit")
    group.add_argument("--poly")
    p.add_argument("--abp", required=True)
    p.add_argument("--out", default="-")

    p = sub.add_parser("compose", help="compose two serialized reductions")
    p.add_argument("first", help="reduction for source <= mid")
    p.add_argument("second", help="reduction for mid <= target")
    p.add_argument("--out", default="-")
    return parser


COMMANDS = {
    "family": cmd_family,
    "expand": cmd_expand,
    "reduce": cmd_reduce,
    "verify": cmd_verify,
    "rank": cmd_rank,
    "hadamard": cmd_hadamard,
    "compose": cmd_compose,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = WorkspaceConfig(
            field=field_from_spec(args.field),
            term_budget=args.term_budget,
            state_budget=args.state_budget,
            seed=args.seed,
            fmt=args.fmt,
        )
        return COMMANDS[args.command](args, cfg)
    except (
        UsageError,
        FieldError,
        CircuitFormatError,
        TermBudgetError,
        ValueError,
        KeyError,
        OSError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
