"""Render figures from wiresoup JSON/JSONL outputs.

Reads only the documented output schemas of the simulator (samples.jsonl and
the report.json files of the pd-table, xy-crosscheck, and verify-bounds
tasks); no access to simulator internals.  Rendering is deterministic: fixed
style, fixed dpi, no timestamps in the images, inputs never mutated.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

try:
    import jsonschema
except ImportError:  # pragma: no cover
    jsonschema = None

FIGURES = ("loop_partition", "pd_table", "tilde_m", "survival")

REPORT_SPEC_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "wiresoup-report specification",
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "inputs": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "samples": {"type": "string"},
                "pd_table": {"type": "string"},
                "xy_crosscheck": {"type": "string"},
                "bounds": {"type": "string"},
            },
        },
        "figures": {"type": "array", "items": {"enum": list(FIGURES)}},
        "out_dir": {"type": "string"},
        "format": {"enum": ["png"]},
    },
    "required": ["inputs", "figures", "out_dir"],
}

_FIGURE_INPUT = {
    "loop_partition": "samples",
    "pd_table": "pd_table",
    "tilde_m": "xy_crosscheck",
    "survival": "bounds",
}

_STYLE = {
    "figure.figsize": (6.0, 3.6),
    "figure.dpi": 110,
    "savefig.dpi": 110,
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.3,
}


@dataclass(frozen=True)
class ReportSpec:
    inputs: dict[str, Path]
    figures: tuple[str, ...]
    out_dir: Path
    format: str = "png"

    @classmethod
    def from_json(cls, text: str, base: Path | None = None) -> "ReportSpec":
        raw = json.loads(text)
        if jsonschema is not None:
            validator = jsonschema.Draft202012Validator(REPORT_SPEC_SCHEMA)
            errs = sorted(validator.iter_errors(raw), key=lambda e: e.json_path)
            if errs:
                msgs = "\n".join(f"{e.json_path}: {e.message}" for e in errs)
                raise ValueError(f"invalid report spec:\n{msgs}")
        base = base or Path(".")
        inputs = {k: (base / v) for k, v in raw["inputs"].items()}
        for fig in raw["figures"]:
            need = _FIGURE_INPUT[fig]
            if need not in inputs:
                raise ValueError(f"figure {fig} needs the '{need}' input")
            if not inputs[need].exists():
                raise ValueError(f"input file missing: {inputs[need]}")
        return cls(inputs=inputs, figures=tuple(raw["figures"]),
                   out_dir=base / raw["out_dir"], format=raw.get("format", "png"))


def _save(fig, path: Path) -> None:
    # constant metadata so repeated runs are byte-identical
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)


def _placeholder(title: str, message: str):
    fig, ax = plt.subplots()
    ax.set_axis_off()
    ax.text(0.5, 0.5, message, ha="center", va="center")
    ax.set_title(title)
    return fig


def render_loop_partition(samples_path: Path, out: Path) -> list[str]:
    records = [json.loads(line) for line in samples_path.read_text().splitlines()
               if line.strip()]
    warnings = []
    with_loops = [r for r in records if r.get("loop_lengths")]
    if not with_loops:
        warnings.append("samples file has no loop lengths; placeholder written")
        fig = _placeholder("loop length partition", "no samples")
        _save(fig, out)
        return warnings
    rec = with_loops[-1]
    lengths = sorted(rec["loop_lengths"], reverse=True)
    V = sum(lengths)
    fracs = [l / V for l in lengths]
    fig, ax = plt.subplots()
    left = 0.0
    for i, f in enumerate(fracs):
        ax.barh(0, f, left=left, height=0.6,
                color=plt.cm.viridis(0.15 + 0.7 * (i % 5) / 4), edgecolor="white")
        left += f
    ax.set_xlim(0, 1)
    ax.set_yticks([])
    ax.set_xlabel("fraction of total loop length")
    ax.set_title(f"loop length partition (sweep {rec['sweep']}, V={V})")
    _save(fig, out)
    return warnings


def render_pd_table(pd_path: Path, out: Path) -> list[str]:
    data = json.loads(pd_path.read_text())
    rows = data.get("rows", [])
    if not rows:
        _save(_placeholder("PD correlations", "no rows"), out)
        return ["pd table has no rows; placeholder written"]
    fig, axes = plt.subplots(1, 2, figsize=(8.0, 3.6))
    for ax, stat, label in ((axes[0], "same_block", "P(same block)"),
                            (axes[1], "even", "P(even partition)")):
        thetas = sorted({r["theta"] for r in rows})
        for i, theta in enumerate(thetas):
            sub = sorted((r for r in rows if r["theta"] == theta),
                         key=lambda r: r["k"])
            ks = [r["k"] for r in sub]
            closed = [r[stat]["closed_form"] for r in sub]
            mc = [r[stat]["mc_estimate"] for r in sub]
            err = [3 * r[stat]["stderr"] for r in sub]
            ax.plot(ks, closed, "-", color=f"C{i}", label=f"closed, theta={theta}")
            ax.errorbar(ks, mc, yerr=err, fmt="o", ms=4, color=f"C{i}",
                        capsize=3, label=f"MC +-3se, theta={theta}")
        ax.set_xlabel("k")
        ax.set_title(label)
        ax.legend(fontsize=7)
    fig.tight_layout()
    _save(fig, out)
    return []


def render_tilde_m(xy_path: Path, out: Path) -> list[str]:
    data = json.loads(xy_path.read_text())
    results = sorted(data.get("results", []), key=lambda r: r["J"])
    if not results:
        _save(_placeholder("boundary-pair density", "no results"), out)
        return ["xy-crosscheck report empty; placeholder written"]
    J = [r["J"] for r in results]
    wire = [r["wire_half_ratio"] for r in results]
    werr = [3 * r["wire_stderr"] for r in results]
    xy = [r["xy"]["mean"] for r in results]
    xerr = [3 * r["xy"]["stderr"] for r in results]
    fig, ax = plt.subplots()
    ax.errorbar(J, wire, yerr=werr, fmt="o-", capsize=3,
                label="wire chain: E[n~/(n+1)]/2")
    ax.errorbar(J, xy, yerr=xerr, fmt="s--", capsize=3,
                label="XY Metropolis: <phi1 phi2>")
    ax.set_xlabel("J")
    ax.set_ylabel("estimate")
    ax.set_title("boundary-connected pair density vs coupling")
    ax.legend(fontsize=8)
    _save(fig, out)
    return []


def render_survival(bounds_path: Path, out: Path) -> list[str]:
    data = json.loads(bounds_path.read_text())
    surv = data.get("survival")
    if not surv:
        _save(_placeholder("longest-loop survival", "no survival data"), out)
        return ["bounds report has no survival block; placeholder written"]
    n = surv["n"]
    floor = 1e-7
    fig, ax = plt.subplots()
    ax.semilogy(n, [max(b, floor) for b in surv["bound"]], "k-",
                label="walk-sum bound")
    ax.semilogy(n, [max(p, floor) for p in surv["p"]], "o", ms=4,
                label="empirical survival")
    ax.fill_between(n, [max(v, floor) for v in surv["lower"]],
                    [max(v, floor) for v in surv["upper"]],
                    alpha=0.25, label="Wilson 95%")
    ax.set_xlabel("n")
    ax.set_ylabel("P(longest loop at origin >= n)")
    ax.set_title(f"survival vs bound (J={surv['J']:.3e}, {surv['trials']} samples)")
    ax.legend(fontsize=8)
    _save(fig, out)
    return []


_RENDERERS = {
    "loop_partition": render_loop_partition,
    "pd_table": render_pd_table,
    "tilde_m": render_tilde_m,
    "survival": render_survival,
}


def render(spec: ReportSpec) -> dict:
    """Render all requested figures plus an HTML index; returns a manifest."""
    spec.out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    warnings = []
    with plt.rc_context(_STYLE):
        for fig_name in spec.figures:
            src = spec.inputs[_FIGURE_INPUT[fig_name]]
            out = spec.out_dir / f"{fig_name}.{spec.format}"
            warnings += [f"{fig_name}: {w}" for w in _RENDERERS[fig_name](src, out)]
            written.append(out.name)
    index = spec.out_dir / "index.html"
    rows = "\n".join(
        f'<section><h2>{name}</h2><img src="{name}.{spec.format}" '
        f'alt="{name}"/></section>' for name in spec.figures
    )
    index.write_text(
        "<!DOCTYPE html>\n<html><head><meta charset='utf-8'/>"
        "<title>wiresoup report</title></head>\n"
        f"<body><h1>wiresoup report</h1>\n{rows}\n</body></html>\n"
    )
    written.append(index.name)
    for w in warnings:
        print(f"warning: {w}")
    return {"written": written, "warnings": warnings}
