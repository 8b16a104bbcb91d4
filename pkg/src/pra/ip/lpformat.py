"""CPLEX LP text export.

The file optimises the first objective of the priority list; the full list
is recorded in the leading comment block so a reader can rerun the later
stages by hand.
"""

from __future__ import annotations

from pra.ip.model import IpModel

_LINE = 80


def _expr(terms) -> str:
    if not terms:
        return "0"
    parts = []
    for i, (name, coef) in enumerate(terms):
        sign = "-" if coef < 0 else "+"
        mag = abs(coef)
        body = name if mag == 1 else f"{mag} {name}"
        if i == 0:
            parts.append(body if coef >= 0 else f"- {body}")
        else:
            parts.append(f"{sign} {body}")
    return " ".join(parts)


def _wrap(text: str, indent: str = "   ") -> list[str]:
    out: list[str] = []
    line = ""
    for token in text.split(" "):
        if line and len(line) + 1 + len(token) > _LINE:
            out.append(line)
            line = indent + token
        else:
            line = f"{line} {token}" if line else token
    out.append(line)
    return out


def export_lp(model: IpModel) -> str:
    lines = [f"\\ variant {model.variant}, periods {model.start}..{model.end}"]
    lines.append("\\ lexicographic objectives (highest priority first):")
    for i, obj in enumerate(model.objectives, 1):
        lines.append(f"\\   {i}. {obj.sense} {obj.name}")
    first = model.objectives[0]
    lines.append("Maximize" if first.sense == "max" else "Minimize")
    lines += _wrap(f" obj: {_expr(first.terms)}")
    lines.append("Subject To")
    for c in model.constraints:
        lines += _wrap(f" {c.name}: {_expr(c.terms)} {c.sense} {c.rhs}")
    lines.append("Bounds")
    lines += [f" 0 <= {v} <= 1" for v in model.variables]
    lines.append("Binaries")
    lines += _wrap(" " + " ".join(model.variables))
    lines.append("End")
    return "\n".join(lines) + "\n"
