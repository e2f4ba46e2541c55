"""Deterministic report files: structured text, CSV sidecar and figures.

Reports must be byte-identical for identical configurations, so floats are
always rendered with 17 significant digits, mapping keys are emitted in
sorted order, and nothing time- or host-dependent is written.  Figures are
rendered headlessly next to the text output.
"""

from __future__ import annotations

import csv

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

SCHEMA_VERSION = 1


def format_float(x):
    return format(float(x), ".17g")


def _emit(obj, indent):
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        lines = ["{"]
        for key in sorted(obj, key=str):
            lines.append(f'{pad}  "{key}": {_emit(obj[key], indent + 1)},')
        lines[-1] = lines[-1].rstrip(",")
        lines.append(pad + "}")
        return "\n".join(lines)
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        lines = ["["]
        for item in obj:
            lines.append(f"{pad}  {_emit(item, indent + 1)},")
        lines[-1] = lines[-1].rstrip(",")
        lines.append(pad + "]")
        return "\n".join(lines)
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (float, np.floating)):
        return format_float(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    text = str(obj).replace("\\", "\\\\").replace('"', '\\"')
    return f'"{text}"'


def render_tree(data):
    """Serialize a report tree to canonical JSON-compatible text."""
    return _emit(data, 0) + "\n"


def majorant_report_dict(rep):
    out = {
        "kind": rep.kind,
        "value": rep.value,
        "terms": {k: float(v) for k, v in rep.terms.items()},
        "parameters": {k: float(v) for k, v in rep.parameters.items()},
        "exact_error": rep.exact_error,
        "efficiency_index": rep.efficiency_index,
    }
    if rep.constants_used is not None:
        out["constants"] = rep.constants_used.as_dict()
    if rep.iteration_values:
        out["iteration_values"] = list(rep.iteration_values)
    if rep.notes:
        out["notes"] = rep.notes
    return out


def build_report_file(config_echo, reports, diagnostics=None):
    return {
        "schema_version": SCHEMA_VERSION,
        "config": config_echo,
        "reports": {name: majorant_report_dict(r) for name, r in reports.items()},
        "diagnostics": diagnostics or {},
    }


def write_report(path, data):
    with open(path, "w") as fh:
        fh.write(render_tree(data))


def write_terms_csv(path, reports):
    """CSV sidecar with one (report, term, value) row per majorant term."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["report", "term", "value"])
        for name in sorted(reports):
            rep = reports[name]
            writer.writerow([name, "value", format_float(rep.value)])
            for term in sorted(rep.terms):
                writer.writerow([name, term, format_float(rep.terms[term])])
            if rep.exact_error is not None:
                writer.writerow([name, "exact_error", format_float(rep.exact_error)])
            if rep.efficiency_index is not None:
                writer.writerow(
                    [name, "efficiency_index", format_float(rep.efficiency_index)]
                )


def render_terms_figure(path, reports):
    """Horizontal bar chart of the term breakdown of every report."""
    labels = []
    values = []
    for name in sorted(reports):
        rep = reports[name]
        labels.append(f"{name}: value")
        values.append(rep.value)
        for term in sorted(rep.terms):
            labels.append(f"{name}: {term}")
            values.append(rep.terms[term])
    fig, ax = plt.subplots(figsize=(8, max(2.0, 0.4 * len(labels))))
    ax.barh(range(len(labels)), values, color="#3b6ea5")
    ax.set_yticks(range(len(labels)))
    ax.set_yticklabels(labels, fontsize=8)
    ax.invert_yaxis()
    ax.set_xlabel("value")
    ax.set_title("majorant term breakdown")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_iteration_figure(path, iteration_values, floor=None):
    """Monotone descent curve of the minimization loop."""
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(range(len(iteration_values)), iteration_values, marker="o")
    if floor is not None:
        ax.axhline(floor, color="gray", linestyle="--", label="exact error")
        ax.legend()
    ax.set_xlabel("iteration")
    ax.set_ylabel("majorant value")
    ax.set_title("majorant minimization")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
