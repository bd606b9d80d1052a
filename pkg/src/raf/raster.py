"""Windowed hit-count grids and their PGM export."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .io import atomic_write_bytes, atomic_write_text


@dataclass
class RasterGrid:
    """Counts on a ``height x width`` grid over ``window = (xmin, xmax, ymin, ymax)``.

    Row 0 is the top of the image (largest imaginary part).  ``samples``
    is the number of experiments pooled; ``mean()`` divides by it.
    """

    counts: np.ndarray
    window: tuple[float, float, float, float]
    samples: int = 1

    @classmethod
    def empty(cls, window, resolution) -> "RasterGrid":
        w, h = _wh(resolution)
        return cls(np.zeros((h, w), dtype=np.int64), tuple(map(float, window)), 0)

    @property
    def shape(self):
        return self.counts.shape

    def mean(self) -> np.ndarray:
        return self.counts / max(self.samples, 1)

    def pixel_index(self, points):
        """(row, col, inside) for complex points; half-open cells."""
        xmin, xmax, ymin, ymax = self.window
        h, w = self.counts.shape
        p = np.asarray(points, dtype=complex).ravel()
        col = np.floor((p.real - xmin) / (xmax - xmin) * w).astype(np.int64)
        row_from_bottom = np.floor((p.imag - ymin) / (ymax - ymin) * h).astype(np.int64)
        inside = (col >= 0) & (col < w) & (row_from_bottom >= 0) & (row_from_bottom < h)
        return h - 1 - row_from_bottom, col, inside

    def add(self, points, samples: int = 0) -> "RasterGrid":
        row, col, inside = self.pixel_index(points)
        np.add.at(self.counts, (row[inside], col[inside]), 1)
        self.samples += samples
        return self

    def __add__(self, other: "RasterGrid") -> "RasterGrid":
        if self.window != other.window or self.shape != other.shape:
            raise ValueError("rasters differ in window or resolution")
        return RasterGrid(self.counts + other.counts, self.window, self.samples + other.samples)

    def to_pgm16(self) -> bytes:
        """Binary P5, maxval 65535, log-scaled: round(65535 log1p(c) / log1p(max c))."""
        h, w = self.counts.shape
        c = self.counts.astype(float)
        top = c.max()
        if top > 0:
            img = np.rint(65535.0 * np.log1p(c) / np.log1p(top))
        else:
            img = np.zeros_like(c)
        header = f"P5\n{w} {h}\n65535\n".encode("ascii")
        return header + img.astype(">u2").tobytes()

    def sidecar(self) -> dict:
        h, w = self.counts.shape
        return {
            "window": list(self.window),
            "width": w,
            "height": h,
            "samples": self.samples,
            "total_hits": int(self.counts.sum()),
            "max_count": int(self.counts.max()) if self.counts.size else 0,
            "normalization": "log1p(count)/log1p(max_count)*65535",
            "row0": "top (max imaginary part)",
        }

    def write(self, path) -> None:
        atomic_write_bytes(path, self.to_pgm16())
        atomic_write_text(str(path) + ".json", json.dumps(self.sidecar(), indent=2, sort_keys=True) + "\n")


def read_pgm16(path) -> np.ndarray:
    data = open(path, "rb").read()
    parts = data.split(maxsplit=4)
    if parts[0] != b"P5":
        raise ValueError("not a binary PGM")
    w, h, maxval = int(parts[1]), int(parts[2]), int(parts[3])
    dtype = ">u2" if maxval > 255 else "u1"
    return np.frombuffer(parts[4], dtype=dtype, count=w * h).reshape(h, w)


def _wh(resolution):
    if np.isscalar(resolution):
        return int(resolution), int(resolution)
    w, h = resolution
    return int(w), int(h)


def raster_accumulate(points, window, resolution) -> RasterGrid:
    w, h = _wh(resolution)
    if max(w, h) > 1 << 14:
        raise ValueError("resolution is capped at 2^14 per side")
    return RasterGrid.empty(window, (w, h)).add(points, samples=1)
