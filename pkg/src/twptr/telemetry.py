"""CSV telemetry: one row per sample, 17 significant digits per number."""

import csv
import io
import math

from twptr.closed_loop import CSV_COLUMNS, Trajectory, TrajectorySample
from twptr.errors import TwptrError

HEADER = ",".join(CSV_COLUMNS)


class CsvFormatError(TwptrError, ValueError):
    pass


def format_float(value):
    return f"{float(value):.16e}"


def format_csv(traj):
    lines = [HEADER]
    lines.extend(",".join(format_float(v) for v in row) for row in traj.rows())
    return "\n".join(lines) + "\n"


def write_csv(traj, path):
    # newline="" keeps the bytes identical across platforms.
    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write(format_csv(traj))


def parse_csv(text):
    """Inverse of :func:`format_csv`.

    Raises:
        CsvFormatError: empty input, header mismatch, or a bad row.
    """
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None:
        raise CsvFormatError("empty CSV file")
    if tuple(h.strip() for h in header) != CSV_COLUMNS:
        raise CsvFormatError(f"expected header {HEADER!r}, got {','.join(header)!r}")
    traj = Trajectory()
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(CSV_COLUMNS):
            raise CsvFormatError(f"line {lineno}: expected {len(CSV_COLUMNS)} fields, got {len(row)}")
        try:
            values = [float(v) for v in row]
        except ValueError as exc:
            raise CsvFormatError(f"line {lineno}: {exc}") from None
        if not all(math.isfinite(v) for v in values):
            raise CsvFormatError(f"line {lineno}: non-finite value")
        traj.samples.append(TrajectorySample(*values))
    return traj


def read_csv(path):
    with open(path, encoding="ascii", newline="") as fh:
        return parse_csv(fh.read())
