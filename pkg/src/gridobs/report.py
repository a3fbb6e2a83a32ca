"""Report documents and their machine/human renderings.

One structured body per report; JSON, aligned text, and CSV renderings all
derive from it. Percentages are rounded to 2 decimals in bodies and to
integers in the side-by-side ranking view, mirroring the published table
layout. CLI renderings avoid volatile fields so identical inputs give
byte-identical output.
"""
from __future__ import annotations

import io
import csv as _csv
import json
from dataclasses import dataclass
from datetime import datetime

from .ahp import WeightTableBuild
from .scoring import ComparisonReport, ObservabilityScore, utc_now


@dataclass(frozen=True)
class ReportDocument:
    kind: str  # weights | scores | comparison
    body: dict
    generated_at: datetime

    def to_json(self) -> dict:
        from .store import format_rfc3339

        return {"kind": self.kind, "generated_at": format_rfc3339(self.generated_at),
                "body": self.body}


def _pct(x: float) -> float:
    return round(x, 2)


def _rank(scores: list[ObservabilityScore], key: str) -> list[dict]:
    ordered = sorted(scores, key=lambda s: (-getattr(s, key), s.scope))
    return [{"scope": s.scope, "value": _pct(getattr(s, key))} for s in ordered]


def build_scores_report(scores: list[ObservabilityScore], group_by: str = "area") -> ReportDocument:
    rows = [
        {
            "scope": s.scope,
            "total_raw": s.total_raw,
            "invalid_raw": s.invalid_raw,
            "unweighted": _pct(s.unweighted),
            "total_weighted": s.total_weighted,
            "invalid_weighted": s.invalid_weighted,
            "weighted": _pct(s.weighted),
        }
        for s in scores
    ]
    total_raw = sum(s.total_raw for s in scores)
    invalid_raw = sum(s.invalid_raw for s in scores)
    total_w = sum(s.total_weighted for s in scores)
    invalid_w = sum(s.invalid_weighted for s in scores)
    body = {
        "group_by": group_by,
        "scores": rows,
        "rankings": {
            "unweighted": _rank(scores, "unweighted"),
            "weighted": _rank(scores, "weighted"),
        },
        "totals": {
            "total_raw": total_raw,
            "invalid_raw": invalid_raw,
            "unweighted": _pct(100.0 * (total_raw - invalid_raw) / total_raw) if total_raw else None,
            "total_weighted": total_w,
            "invalid_weighted": invalid_w,
            "weighted": _pct(100.0 * (total_w - invalid_w) / total_w) if total_w else None,
        },
    }
    return ReportDocument("scores", body, utc_now())


def build_weights_report(build: WeightTableBuild, cr_threshold: float) -> ReportDocument:
    consistency = [
        {
            "context": c.context.label(),
            "expert_id": c.expert_id,
            "lambda_max": c.report.lambda_max,
            "consistency_index": c.report.consistency_index,
            "consistency_ratio": c.report.consistency_ratio,
            "acceptable": c.report.acceptable,
        }
        for c in build.consistency
    ]
    body = {
        "tables": build.tables.to_json(),
        "cr_threshold": cr_threshold,
        "consistency": consistency,
        "warning_count": len(build.warnings),
    }
    return ReportDocument("weights", body, utc_now())


def build_comparison_report(comparison: ComparisonReport,
                            before_id: str, after_id: str) -> ReportDocument:
    body = {
        "before": before_id,
        "after": after_id,
        "areas": [d.to_json() for d in comparison.deltas],
        "counts": comparison.counts(),
    }
    return ReportDocument("comparison", body, utc_now())


# --- renderings --------------------------------------------------------------


def render(document: ReportDocument, format: str = "text") -> str:
    if format == "json":
        return json.dumps(document.body, indent=2) + "\n"
    if format == "csv":
        return _render_csv(document)
    if format == "text":
        return _render_text(document)
    raise ValueError(f"unknown format: {format!r}")


def _render_csv(document: ReportDocument) -> str:
    out = io.StringIO()
    writer = _csv.writer(out, lineterminator="\n")
    body = document.body
    if document.kind == "scores":
        writer.writerow(["scope", "total_raw", "invalid_raw", "unweighted",
                         "total_weighted", "invalid_weighted", "weighted"])
        for r in body["scores"]:
            writer.writerow([r["scope"], r["total_raw"], r["invalid_raw"],
                             f"{r['unweighted']:.2f}", repr(r["total_weighted"]),
                             repr(r["invalid_weighted"]), f"{r['weighted']:.2f}"])
    elif document.kind == "comparison":
        writer.writerow(["area", "unweighted_before", "unweighted_after",
                         "unweighted_delta", "unweighted_change",
                         "weighted_before", "weighted_after",
                         "weighted_delta", "weighted_change"])
        for r in body["areas"]:
            u, w = r["unweighted"], r["weighted"]
            writer.writerow([r["area"],
                             f"{u['before']:.2f}", f"{u['after']:.2f}",
                             f"{u['delta']:+.2f}", u["change"],
                             f"{w['before']:.2f}", f"{w['after']:.2f}",
                             f"{w['delta']:+.2f}", w["change"]])
    elif document.kind == "weights":
        writer.writerow(["table", "column", "item", "weight"])
        for comp, cells in body["tables"]["m_table"].items():
            for quant, v in cells.items():
                writer.writerow(["M", comp, quant, f"{v:.2f}"])
        for quant, cells in body["tables"]["n_table"].items():
            for comp, v in cells.items():
                writer.writerow(["N", quant, comp, f"{v:.2f}"])
    else:
        raise ValueError(f"no CSV rendering for {document.kind!r}")
    return out.getvalue()


def _grid(title: str, col_labels: list[str], row_labels: list[str],
          cell) -> list[str]:
    widths = [max(len(c), 8) for c in col_labels]
    label_w = max((len(r) for r in row_labels), default=4)
    lines = [title]
    header = " " * label_w + "  " + "  ".join(c.rjust(w) for c, w in zip(col_labels, widths))
    lines.append(header)
    for r in row_labels:
        cells = []
        for cname, w in zip(col_labels, widths):
            v = cell(r, cname)
            cells.append(("-" if v is None else f"{v:.2f}").rjust(w))
        lines.append(r.ljust(label_w) + "  " + "  ".join(cells))
    return lines


def _render_text(document: ReportDocument) -> str:
    body = document.body
    lines: list[str] = []
    if document.kind == "scores":
        lines.append(f"Observability by {body['group_by']}")
        lines.append("")
        ru, rw = body["rankings"]["unweighted"], body["rankings"]["weighted"]
        lines.append("Without weighting        With weighting")
        lines.append(f"{'Scope':<10}{'Index':>6}     {'Scope':<10}{'Index':>6}")
        for u, w in zip(ru, rw):
            lines.append(
                f"{u['scope']:<10}{round(u['value']):>5}%     "
                f"{w['scope']:<10}{round(w['value']):>5}%"
            )
        lines.append("")
        lines.append("Detail")
        lines.append(f"{'Scope':<10}{'Signals':>8}{'Invalid':>8}{'Plain %':>9}{'Weighted %':>12}")
        for r in body["scores"]:
            lines.append(
                f"{r['scope']:<10}{r['total_raw']:>8}{r['invalid_raw']:>8}"
                f"{r['unweighted']:>9.2f}{r['weighted']:>12.2f}"
            )
        t = body["totals"]
        lines.append("")
        lines.append(
            f"Totals: {t['total_raw']} signals, {t['invalid_raw']} invalid, "
            f"plain {t['unweighted']:.2f}%, weighted {t['weighted']:.2f}%"
        )
    elif document.kind == "comparison":
        lines.append(f"Snapshot comparison: {body['before']} -> {body['after']}")
        lines.append("")
        lines.append(
            f"{'Area':<10}{'Plain':>14}{'Delta':>8}  {'Class':<10}"
            f"{'Weighted':>14}{'Delta':>8}  {'Class':<10}"
        )
        for r in body["areas"]:
            u, w = r["unweighted"], r["weighted"]
            lines.append(
                f"{r['area']:<10}"
                f"{u['before']:>6.2f}->{u['after']:>6.2f}{u['delta']:>+8.2f}  {u['change']:<10}"
                f"{w['before']:>6.2f}->{w['after']:>6.2f}{w['delta']:>+8.2f}  {w['change']:<10}"
            )
        c = body["counts"]
        lines.append("")
        lines.append(
            "Plain index: "
            f"{c['unweighted']['improved']} improved, "
            f"{c['unweighted']['unchanged']} unchanged, "
            f"{c['unweighted']['declined']} declined"
        )
        lines.append(
            "Weighted index: "
            f"{c['weighted']['improved']} improved, "
            f"{c['weighted']['unchanged']} unchanged, "
            f"{c['weighted']['declined']} declined"
        )
    elif document.kind == "weights":
        m = body["tables"]["m_table"]
        n = body["tables"]["n_table"]
        comps = list(m.keys())
        quants = list(n.keys())
        lines += _grid("Quantity weights within each component",
                       comps, quants, lambda q, c: m[c].get(q))
        lines.append("")
        lines += _grid("Component weights within each quantity",
                       quants, comps, lambda c, q: n[q].get(c))
        lines.append("")
        lines.append(f"Consistency (threshold {body['cr_threshold']:.2f})")
        lines.append(f"{'Context':<54}{'Expert':<16}{'CR':>8}  OK")
        for e in body["consistency"]:
            lines.append(
                f"{e['context']:<54}{e['expert_id']:<16}"
                f"{e['consistency_ratio']:>8.4f}  {'yes' if e['acceptable'] else 'NO'}"
            )
        if body["warning_count"]:
            lines.append(f"WARNING: {body['warning_count']} matrices over the CR threshold")
    else:
        raise ValueError(f"no text rendering for {document.kind!r}")
    return "\n".join(lines) + "\n"
