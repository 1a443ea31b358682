from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import Iterable, Sequence, TextIO

import config
from bounds.classical import InequalityReport, WitnessBound
from bounds.rac import EaCeilingReport
from bounds.seesaw import SeesawResult
from models.behavior import correlators


def format_number(value: float, digits: int = config.CSV_SIGNIFICANT_DIGITS) -> str:
    """Fixed significant-digit rendering used by every CSV column."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    text = f"{float(value):.{digits}g}"
    return "0" if text == "-0" else text


def write_csv(rows: Iterable[Sequence], header: Sequence[str], out: TextIO | str | Path | None = None) -> str:
    """
    Render rows as CSV with a header line and '.' decimals.

    Args:
        rows (Iterable[Sequence]): Row values; floats use 12 significant digits.
        header (Sequence[str]): Column names.
        out (TextIO | str | Path | None): Stream or path to write to; only rendered when None.

    Returns:
        str: The CSV text.
    """
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([v if isinstance(v, str) else format_number(v) for v in row])
    text = buffer.getvalue()
    if isinstance(out, (str, Path)):
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text, encoding="utf-8")
    elif out is not None:
        out.write(text)
    return text


def render_witness_bound(name: str, alpha: float, bound: WitnessBound, reports: Sequence[InequalityReport]) -> str:
    lines = [
        f"witness       {name}",
        f"alpha         {format_number(alpha)} bits (cap P_g = {format_number(bound.cap)})",
        f"bound         {format_number(bound.value)}",
        "mixture:",
    ]
    for weight, vertex in bound.mixture:
        table = vertex.behavior.table
        outputs = table.argmax(axis=2).tolist()
        lines.append(f"  {format_number(weight)} x outputs {outputs} (P_g {format_number(vertex.cost)})")
    if reports:
        lines.append("facet check:")
        for report in reports:
            lines.append(
                f"  cap {format_number(report.cap)}: value {format_number(report.value)}"
                f" claimed {format_number(report.claimed_bound)} valid={report.valid}"
                f" tight={report.tight} facet={report.facet}"
            )
    return "\n".join(lines)


def render_info(info: float, guessing: float, eigen_bound: float, tight: bool, certificate_trace: float) -> str:
    return "\n".join(
        [
            f"information   {info:.6f} bits",
            f"guessing      {format_number(guessing)}",
            f"eigen bound   {format_number(eigen_bound)} bits ({'tight' if tight else 'not tight'})",
            f"Tr(Y)         {format_number(certificate_trace)}",
        ]
    )


def render_seesaw(result: SeesawResult, alpha: float) -> str:
    behavior = result.strategy.behavior()
    meta = result.metadata
    lines = [
        f"alpha         {format_number(alpha)} bits",
        f"value         {format_number(result.value)}",
        f"information   {format_number(result.info)} bits",
        f"best restart  {meta.get('best_restart')} of {meta.get('restarts')}",
        f"branch weight {format_number(meta.get('mixing_weight', 1.0))}",
    ]
    if behavior.scenario.k == 2:
        lines.append(f"correlators   {correlators(behavior).round(9).tolist()}")
    return "\n".join(lines)


def render_ea_report(report: EaCeilingReport) -> str:
    status = "passed" if report.passed else "FAILED: " + "; ".join(report.violations())
    return (
        f"P_g {format_number(report.guessing)} <= {format_number(report.ceiling)}; "
        f"no-signalling deviation {report.no_signaling_deviation:.2e}; {status}"
    )
