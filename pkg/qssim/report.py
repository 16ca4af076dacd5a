import csv
import io
import logging as log
from collections import OrderedDict

from qssim.pretty import QSSIM_REPORT_SORTING_RULES, format_float, pretty
from qssim.utils import save_file
from qssim.version import string as version

CSV_COLUMNS = (
    "trial",
    "protocol",
    "attack",
    "epsilon_r",
    "p_m",
    "verdict",
    "recovery_rate",
    "ambiguous_count",
    "misidentified_count",
    "signals",
)


class ReportIOError(OSError):
    def __init__(self, path, error):
        self.path = path
        super().__init__("Cannot write report '%s': %s" % (path, error))


def transcript_path(path: str) -> str:
    return path + ".transcripts.json"


def _cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format_float(value)
    return str(value)


def _table_csv(rows, columns) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row[c]) for c in columns])
    return buffer.getvalue()


def render_json(command: str, config_echo, stats=None, records=(), rows=None) -> str:
    document = OrderedDict()
    document["command"] = command
    document["version"] = version()
    document["config"] = OrderedDict(config_echo)
    if stats is not None:
        document["stats"] = stats.to_dict()
    if rows is not None:
        document["rows"] = [row.to_dict() for row in rows]
    if records:
        document["trials"] = [record.to_dict() for record in records]
    return pretty(document, QSSIM_REPORT_SORTING_RULES) + "\n"


def render_csv(records=(), rows=None) -> str:
    if rows is not None:
        dicts = [row.to_dict() for row in rows]
        columns = tuple(dicts[0].keys()) if dicts else ()
        return _table_csv(dicts, columns)
    return _table_csv([r.to_dict() for r in records], CSV_COLUMNS)


def _write(path: str, data: str):
    try:
        save_file(path, data)
    except OSError as e:
        raise ReportIOError(path, e.strerror or e)
    log.info("Wrote '%s'" % path)


def write_report(
    stats,
    records,
    fmt: str,
    path: str,
    config_echo=None,
    command: str = "run",
    rows=None,
    save_transcripts: bool = False,
):
    """Write a run report (stats and records) or a table report (rows).

    JSON documents embed the resolved configuration; CSV holds one line per
    trial or table row. With save_transcripts the SignalRecords of every
    trial go to a sidecar file next to the report.
    """
    if fmt == "json":
        data = render_json(command, config_echo or {}, stats, records, rows)
    elif fmt == "csv":
        data = render_csv(records, rows)
    else:
        raise ValueError("Unknown report format '%s'" % fmt)
    _write(path, data)

    if save_transcripts:
        sidecar = OrderedDict()
        for record in records:
            sidecar[str(record.trial)] = record.transcript or []
        _write(transcript_path(path), pretty(sidecar) + "\n")
    return path
