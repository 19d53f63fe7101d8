"""Plain-text matrix files (MTXT v1).

Line 1 is `rows cols field` with field in {real, complex}; each of the
following `rows` lines holds `cols` whitespace-separated entries, a complex
entry being the pair `re im`. Writers emit 17 significant decimal digits.
"""

import numpy as np

from .core import as_matrix
from .errors import IoError

_FMT = "%.17g"


def write_mtxt(path, a):
    a = as_matrix(a, "a")
    rows, cols = a.shape
    field = "complex" if np.iscomplexobj(a) else "real"
    try:
        with open(path, "w") as fh:
            fh.write(f"{rows} {cols} {field}\n")
            for i in range(rows):
                if field == "complex":
                    parts = [
                        f"{_FMT % a[i, j].real} {_FMT % a[i, j].imag}"
                        for j in range(cols)
                    ]
                else:
                    parts = [_FMT % a[i, j] for j in range(cols)]
                fh.write(" ".join(parts) + "\n")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from None


def read_mtxt(path):
    try:
        with open(path) as fh:
            header = fh.readline().split()
            if len(header) != 3:
                raise IoError(f"{path}: malformed header")
            try:
                rows, cols = int(header[0]), int(header[1])
            except ValueError:
                raise IoError(f"{path}: malformed header") from None
            field = header[2]
            if field not in ("real", "complex"):
                raise IoError(f"{path}: unknown field {field!r}")
            per_row = 2 * cols if field == "complex" else cols
            data = np.zeros((rows, per_row))
            for i in range(rows):
                line = fh.readline()
                if not line:
                    raise IoError(f"{path}: truncated at row {i}")
                vals = line.split()
                if len(vals) != per_row:
                    raise IoError(f"{path}: row {i} has {len(vals)} values, "
                                  f"expected {per_row}")
                data[i] = [float(v) for v in vals]
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from None
    except ValueError as exc:
        raise IoError(f"{path}: bad entry ({exc})") from None
    if field == "complex":
        return data[:, 0::2] + 1j * data[:, 1::2]
    return data
