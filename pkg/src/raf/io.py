"""Atomic file output and the binary point-cloud format.

Point clouds are raw little-endian float64 pairs (re, im) with a JSON
sidecar at ``<path>.json``.
"""

from __future__ import annotations

import json
import os
import tempfile

import numpy as np


def atomic_write_bytes(path, data: bytes) -> None:
    path = os.fspath(path)
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_text(path, text: str) -> None:
    atomic_write_bytes(path, text.encode("utf-8"))


def write_json(path, obj) -> None:
    atomic_write_text(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def write_points(path, points, meta: dict) -> None:
    p = np.asarray(points, dtype=complex).ravel()
    pairs = np.empty((len(p), 2), dtype="<f8")
    pairs[:, 0] = p.real
    pairs[:, 1] = p.imag
    atomic_write_bytes(path, pairs.tobytes())
    write_json(str(path) + ".json", {**meta, "count": len(p), "format": "f64le (re, im) pairs"})


def read_points(path) -> np.ndarray:
    pairs = np.fromfile(path, dtype="<f8").reshape(-1, 2)
    return pairs[:, 0] + 1j * pairs[:, 1]
