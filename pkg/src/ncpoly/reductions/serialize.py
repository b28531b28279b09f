"""Reduction interchange files: a header naming source and target, the
matrix substitution, and (for circuit-derived reductions) the source
polynomial inline so verification is self-contained."""

from ..algebra import NCPoly, VarTable, format_poly, parse_poly
from ..automata import format_substitution, parse_substitution
from ..fields import Field
from .base import AbpReduction


def format_reduction(r: AbpReduction, source_poly: NCPoly | None = None) -> str:
    parts = [
        f"reduction {r.kind or 'abp'}",
        f"source {r.source}",
        f"target {r.target}",
        format_substitution(r.substitution).rstrip("\n"),
    ]
    if source_poly is not None:
        parts.append("source-poly")
        body = format_poly(source_poly).rstrip("\n")
        if body:
            parts.append(body)
        parts.append("end-poly")
    return "\n".join(parts) + "\n"


def parse_reduction(text: str, field: Field):
    """Returns (reduction, embedded source polynomial or None)."""
    kind = source = target = None
    sub_lines: list[str] = []
    poly_lines: list[str] = []
    section = "header"
    for raw in text.splitlines():
        stripped = raw.strip()
        if section == "header":
            if stripped.startswith("reduction "):
                kind = stripped.split(None, 1)[1]
            elif stripped.startswith("source "):
                source = stripped.split(None, 1)[1]
            elif stripped.startswith("target "):
                target = stripped.split(None, 1)[1]
            elif stripped == "substitution":
                section = "substitution"
                sub_lines.append(stripped)
            elif stripped:
                raise ValueError(f"unexpected header line {raw!r}")
        elif section == "substitution":
            if stripped == "source-poly":
                section = "poly"
            else:
                sub_lines.append(raw)
        elif section == "poly":
            if stripped == "end-poly":
                section = "done"
            else:
                poly_lines.append(raw)
    if kind is None or source is None or target is None:
        raise ValueError("reduction file is missing header lines")
    input_table = VarTable(field=field)
    output_table = VarTable(field=field)
    sub = parse_substitution("\n".join(sub_lines), input_table, output_table)
    poly = None
    if poly_lines or section in ("poly", "done"):
        poly = parse_poly("\n".join(poly_lines), output_table)
    return AbpReduction(sub, source, target, kind=kind), poly
