"""Text and TSV rendering of run reports and parameter tables."""

import logging
from typing import List, Optional

import pandas as pd

from models import RunReport, SdsParams, SymmetryType
from sds import feasible_params, type_compatible

logger = logging.getLogger(__name__)

SKEW_TYPES = ("ssss", "ksss", "kkss", "kkks")


def params_frame(n: int, rows: Optional[List[SdsParams]] = None) -> pd.DataFrame:
    """Feasible rows for n with a compatibility mark per symmetry type ("x" = incompatible)."""
    rows = feasible_params(n) if rows is None else rows
    records = []
    for params in rows:
        record = {
            "n": params.n,
            "k": ",".join(str(k) for k in params.k),
            "lambda": params.lam,
            "a": ",".join(str(a) for a in sorted(params.a)),
        }
        for letters in SKEW_TYPES:
            record[letters] = "ok" if type_compatible(params, SymmetryType(letters=letters)) else "x"
        records.append(record)
    return pd.DataFrame.from_records(records, columns=["n", "k", "lambda", "a", *SKEW_TYPES])


def render_frame(frame: pd.DataFrame, tsv: bool = False) -> str:
    if tsv:
        return frame.to_csv(sep="\t", index=False)
    if frame.empty:
        return "(no rows)\n"
    return frame.to_string(index=False) + "\n"


class ReportRenderer:
    """Builds the human-readable or tab-separated form of a RunReport."""

    def render(self, report: RunReport, tsv: bool = False) -> str:
        if tsv:
            return self._render_tsv(report)
        return self._render_text(report)

    def _render_text(self, report: RunReport) -> str:
        parts = []
        for item in report.items:
            status = "PASS" if item.passed else "FAIL"
            line = f"{status}  {item.locator}"
            if item.detail:
                line += f"  {item.detail}"
            parts.append(line)

        passed = sum(1 for item in report.items if item.passed)
        summary = f"{report.command}: {passed}/{len(report.items)} passed"
        if report.elapsed is not None:
            summary += f" in {report.elapsed:.2f}s"
        summary += f", exit code {report.exit_code}"
        parts.append(summary)
        return "\n".join(parts) + "\n"

    def _render_tsv(self, report: RunReport) -> str:
        frame = pd.DataFrame.from_records(
            [
                {"command": report.command, "locator": item.locator,
                 "status": "pass" if item.passed else "fail", "detail": item.detail}
                for item in report.items
            ],
            columns=["command", "locator", "status", "detail"],
        )
        return frame.to_csv(sep="\t", index=False)
