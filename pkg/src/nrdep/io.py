"""CSV matrix interchange, run manifests and staged (all-or-nothing) outputs."""

import contextlib
import csv
import io
import json
import os
import shutil
import tempfile
from pathlib import Path

import numpy as np

from .data import as_feature_matrix
from .exceptions import ParseError, RaggedRows


def _is_number(cell):
    try:
        float(cell)
    except ValueError:
        return False
    return True


def load_view_csv(path):
    """Read a comma-separated matrix of reals, one sample per row.

    A single header row is skipped when none of its cells is numeric.
    Blank lines are ignored.
    """
    with open(path, newline="") as fh:
        rows = [(i, r) for i, r in enumerate(csv.reader(fh), start=1) if any(c.strip() for c in r)]
    if rows and not any(_is_number(c) for c in rows[0][1]):
        rows = rows[1:]
    if not rows:
        raise ParseError(f"{path}: no data rows")
    width = len(rows[0][1])
    data = np.empty((len(rows), width))
    for r, (line, cells) in enumerate(rows):
        if len(cells) != width:
            raise RaggedRows(f"{path}: expected {width} columns, got {len(cells)}", line=line)
        for c, cell in enumerate(cells):
            try:
                data[r, c] = float(cell)
            except ValueError:
                raise ParseError(f"{path}: non-numeric cell {cell!r}", line=line,
                                 column=c + 1) from None
    return as_feature_matrix(data, name=str(path))


def format_matrix_csv(a, header=None):
    a = np.atleast_2d(np.asarray(a, dtype=np.float64))
    buf = io.StringIO()
    if header:
        buf.write(",".join(header) + "\n")
    for row in a:
        buf.write(",".join(f"{v:.17g}" for v in row) + "\n")
    return buf.getvalue()


def atomic_write_text(path, text):
    """Write ``text`` to ``path`` through a temporary file and a rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        with contextlib.suppress(FileNotFoundError):
            os.unlink(tmp)
        raise


def save_matrix_csv(path, a, header=None):
    atomic_write_text(path, format_matrix_csv(a, header))


def write_json(path, obj):
    atomic_write_text(path, json.dumps(obj, indent=2, sort_keys=True, default=_jsonable) + "\n")


def _jsonable(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, Path):
        return str(o)
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def trace_csv(traces):
    """Per-round optimizer records of every restart as CSV text."""
    n_views = len(traces[0][0].w_norms)
    cols = ["restart", "round", "gamma", "sim", "penalty", "total", "grad_norm",
            "n_iter", "converged", "line_search_failed"]
    cols += [f"w_norm_{v + 1}" for v in range(n_views)]
    out = [",".join(cols)]
    for trace in traces:
        for r in trace:
            vals = [str(r.restart), str(r.round)]
            vals += [f"{x:.17g}" for x in (r.gamma, r.sim, r.penalty, r.total, r.grad_norm)]
            vals += [str(r.n_iter), str(int(r.converged)), str(int(r.line_search_failed))]
            vals += [f"{x:.17g}" for x in r.w_norms]
            out.append(",".join(vals))
    return "\n".join(out) + "\n"


def report_csv(report):
    lines = ["k_retrieved,mean_precision,mean_recall"]
    for k, p, r in report.points:
        lines.append(f"{k},{p:.17g},{r:.17g}")
    return "\n".join(lines) + "\n"


def load_config_file(path):
    """Read a JSON object of setting names to values."""
    with open(path) as fh:
        try:
            cfg = json.load(fh)
        except json.JSONDecodeError as e:
            raise ParseError(f"{path}: {e.msg}", line=e.lineno, column=e.colno) from None
    if not isinstance(cfg, dict):
        raise ParseError(f"{path}: top level must be an object")
    return cfg


@contextlib.contextmanager
def staged_output(out_dir):
    """Collect output files in a scratch directory and publish them on success.

    Nothing appears in ``out_dir`` if the block raises.
    """
    out_dir = Path(out_dir)
    parent = out_dir.resolve().parent
    parent.mkdir(parents=True, exist_ok=True)
    stage = Path(tempfile.mkdtemp(dir=parent, prefix=f".{out_dir.name}.stage-"))
    try:
        yield stage
        out_dir.mkdir(parents=True, exist_ok=True)
        for f in sorted(stage.iterdir()):
            os.replace(f, out_dir / f.name)
    finally:
        shutil.rmtree(stage, ignore_errors=True)
