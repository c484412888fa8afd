"""
Report emitters: budget and scaling CSVs, the symmetric/asymmetric table, gnuplot scripts.

All output is deterministic text; nothing here reads clocks or environment.
"""

import csv
import io
from typing import Iterable, List, Mapping, Sequence, Tuple

from models.error_functionals import (
    FUNCTIONAL_ORDER,
    PUBLISHED_CELLS,
    BudgetClassification,
    ErrorBudget,
    Functional,
    PulseFamily,
    ZeroFlag,
    compare_with_published,
)
from models.evolution_sim import ScalingSeries

AC_DISPLAY = {"no AC": "no AC", "Phi=pi": "Phi=pi", "triangle": "(triangle)"}


def format_value(value: float) -> str:
    """17 significant digits, enough to round-trip a double."""
    return f"{value:.17g}"


def _writer(buffer: io.StringIO):
    return csv.writer(buffer, lineterminator="\n")


def budget_csv(budgets: Iterable[ErrorBudget]) -> str:
    """
    One row per budget, epsilon included in the direction-error terms.

    Header: eta_tau_1,...,eta_eps1_4
    """
    buffer = io.StringIO()
    writer = _writer(buffer)
    writer.writerow([f.value for f in FUNCTIONAL_ORDER])
    for budget in budgets:
        values = budget.values()
        writer.writerow([format_value(values[f]) for f in FUNCTIONAL_ORDER])
    return buffer.getvalue()


def scaling_csv(series: ScalingSeries) -> str:
    """k,param,deviation rows followed by '#'-prefixed slope and residual footer lines."""
    buffer = io.StringIO()
    writer = _writer(buffer)
    writer.writerow(["k", "param", "deviation"])
    for k, (param, value) in enumerate(series.samples):
        writer.writerow([k, format_value(param), format_value(value)])

    buffer.write(f"# metric,{series.metric.value}\n")
    buffer.write(f"# slope,{format_value(series.fitted_slope)}\n")
    buffer.write(f"# residual,{format_value(series.fit_residual)}\n")
    for note in series.diagnostics:
        buffer.write(f"# diagnostic,{note}\n")
    return buffer.getvalue()


def quantities_csv(quantities: Mapping[str, float]) -> str:
    """quantity,value rows in insertion order."""
    buffer = io.StringIO()
    writer = _writer(buffer)
    writer.writerow(["quantity", "value"])
    for name, value in quantities.items():
        writer.writerow([name, format_value(value)])
    return buffer.getvalue()


def cell_comparison_report(
    symmetric: BudgetClassification, asymmetric: BudgetClassification
) -> Tuple[str, List[Tuple[PulseFamily, Functional, ZeroFlag, ZeroFlag]]]:
    """
    Render the grouped zero/nonzero comparison of designed SP and AP pulses.

    Returns:
        (report text, mismatches as (family, functional, expected, measured))
    """
    header = ("terms", "SP", "AP", "AC")
    rows: List[Sequence[str]] = []
    for row in PUBLISHED_CELLS:
        terms = ", ".join(f.label for f in row.terms)
        rows.append(
            (
                terms,
                _group_flag(symmetric.row_flags(row)),
                _group_flag(asymmetric.row_flags(row)),
                AC_DISPLAY.get(row.condition, row.condition),
            )
        )

    widths = [max(len(r[i]) for r in [header, *rows]) for i in range(len(header))]
    lines = ["  ".join(cell.ljust(width) for cell, width in zip(line, widths)).rstrip() for line in [header, *rows]]

    mismatches = [
        (PulseFamily.SYMMETRIC, *m) for m in compare_with_published(symmetric, PulseFamily.SYMMETRIC)
    ] + [
        (PulseFamily.ASYMMETRIC, *m) for m in compare_with_published(asymmetric, PulseFamily.ASYMMETRIC)
    ]

    lines.append("")
    if mismatches:
        lines.append(f"MISMATCH: {len(mismatches)} cell(s) disagree")
        for family, functional, expected, measured in mismatches:
            lines.append(
                f"  {family.value} {functional.value}: expected {expected.value}, got {measured.value}"
            )
    else:
        lines.append("all cells match")
    return "\n".join(lines) + "\n", mismatches


def _group_flag(flags: Sequence[ZeroFlag]) -> str:
    if len(set(flags)) == 1:
        return flags[0].value
    return "/".join(flag.value for flag in flags)


def gnuplot_script(series: ScalingSeries, data_path: str) -> str:
    """A gnuplot script plotting the sweep with its fitted power law on log-log axes."""
    param0, value0 = series.samples[0]
    return "\n".join(
        [
            "set logscale xy",
            'set xlabel "tau_p"',
            f'set ylabel "{series.metric.value}"',
            "set datafile separator ','",
            "set key left top",
            f"slope = {format_value(series.fitted_slope)}",
            f"c = {format_value(value0)} / {format_value(param0)}**slope",
            f"plot '{data_path}' skip 1 using 2:3 with points pt 7 title 'measured', \\",
            "     c * x**slope with lines title sprintf('slope %.3f', slope)",
            "",
        ]
    )
