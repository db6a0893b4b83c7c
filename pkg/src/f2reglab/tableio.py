"""Binary file format for dense function tables.

Layout: 4-byte magic "F2FN", one format version byte, n as a 32-bit
little-endian unsigned integer, then 2^n IEEE-754 binary64 values in
little-endian index order.  Reads and writes round-trip bit-exactly.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .fourier import FunctionTable
from .gf2 import DEFAULT_DENSE_LIMIT, check_dense

MAGIC = b"F2FN"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sBI")


class TableFormatError(Exception):
    """Base class for table file problems."""


class MalformedHeaderError(TableFormatError):
    pass


class TruncatedPayloadError(TableFormatError):
    pass


class ValueRangeError(TableFormatError):
    pass


def write_table(path: "str | Path", f: FunctionTable) -> None:
    payload = np.ascontiguousarray(f.values, dtype="<f8").tobytes()
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, FORMAT_VERSION, f.n))
        fh.write(payload)


def read_table(path: "str | Path", dense_limit: int = DEFAULT_DENSE_LIMIT) -> FunctionTable:
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise MalformedHeaderError(f"file shorter than the {_HEADER.size}-byte header")
    magic, version, n = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise MalformedHeaderError(f"bad magic {magic!r}")
    if version != FORMAT_VERSION:
        raise MalformedHeaderError(f"unsupported format version {version}")
    if n == 0 or n > 62:
        raise MalformedHeaderError(f"implausible dimension n={n}")
    check_dense(n, dense_limit, "table entries")
    expected = _HEADER.size + 8 * (1 << n)
    if len(data) < expected:
        raise TruncatedPayloadError(
            f"payload holds {len(data) - _HEADER.size} bytes, need {expected - _HEADER.size}"
        )
    if len(data) > expected:
        raise MalformedHeaderError("payload longer than the header's dimension implies")
    values = np.frombuffer(data, dtype="<f8", offset=_HEADER.size).astype(np.float64)
    if not np.all((values >= 0.0) & (values <= 1.0)):
        raise ValueRangeError("table values outside [0, 1]")
    return FunctionTable(n, values)
