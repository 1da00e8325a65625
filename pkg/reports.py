#!/usr/bin/env python3
"""
Deterministic plain-text reports

A report is a header (tool version, title, config echo), a list of
sections holding one table each, and trailing summary lines. Nothing
time- or host-dependent is ever written, so identical runs produce
identical bytes.
"""

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence

import constants
from common import format_table


@dataclass
class Section:
    title: str
    headers: List[str]
    rows: List[List[str]] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)


@dataclass
class Report:
    title: str
    config_lines: List[str] = field(default_factory=list)
    header_notes: List[str] = field(default_factory=list)
    sections: List[Section] = field(default_factory=list)
    summary: List[str] = field(default_factory=list)

    def add_section(self, title: str, headers: Sequence[str],
                    rows: Sequence[Sequence[str]] = (), notes: Sequence[str] = ()) -> Section:
        section = Section(title, list(headers), [list(r) for r in rows], list(notes))
        self.sections.append(section)
        return section

    def add_summary(self, line: str):
        self.summary.append(line)


def report_header(report: Report) -> List[str]:
    lines = [f"# {constants.TOOL_NAME} {constants.VERSION}: {report.title}"]
    lines.extend(f"# config {line}" for line in report.config_lines)
    lines.extend(f"# {note}" for note in report.header_notes)
    return lines


def emit_report(report: Report) -> str:
    """Render a report as text

    Sections keep their insertion order and rows their given order, which
    callers fix by chart or branch index.

    Args:
        report: The report to render

    Returns:
        Newline-terminated report text
    """
    lines = report_header(report)
    for section in report.sections:
        lines.append('')
        lines.append(f"== {section.title}")
        if section.rows:
            lines.append(format_table(section.headers, section.rows))
        else:
            lines.append('(none)')
        lines.extend(section.notes)
    if report.summary:
        lines.append('')
        lines.extend(report.summary)
    return '\n'.join(lines) + '\n'


def write_report(report: Report, path: Optional[str] = None) -> str:
    """Write the report to `path`, or stdout when no path is given"""
    text = emit_report(report)
    if path:
        Path(path).write_text(text, encoding='utf-8')
    else:
        print(text, end='')
    return text


def write_csv(report: Report, path: str):
    """All section tables in one CSV, with a leading section column"""
    with open(path, 'w', newline='', encoding='utf-8') as f:
        writer = csv.writer(f, lineterminator='\n')
        for section in report.sections:
            writer.writerow(['section'] + section.headers)
            for row in section.rows:
                writer.writerow([section.title] + list(row))
