"""Weighted atomic measures on the sphere, with columnar binary file IO."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import sphere

_MAGIC = "corrdyn-cloud 1"


@dataclass
class PointCloudMeasure:
    """Finite atomic measure: atoms as canonical (chart, coord) pairs.

    Weights are nonnegative and sum to one (up to 1e-12) for every cloud
    produced by the transport operations.
    """

    chart: np.ndarray
    coord: np.ndarray
    weight: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.chart = np.asarray(self.chart, dtype=np.uint8)
        self.coord = np.asarray(self.coord, dtype=complex)
        self.weight = np.asarray(self.weight, dtype=float)

    def __len__(self):
        return len(self.weight)

    @property
    def mass(self) -> float:
        return float(np.sum(self.weight))

    def normalized(self) -> "PointCloudMeasure":
        m = self.mass
        if m <= 0:
            raise ValueError("cannot normalize a cloud with zero total mass")
        return PointCloudMeasure(self.chart, self.coord, self.weight / m, dict(self.meta))

    def embed(self) -> np.ndarray:
        return sphere.embed(self.chart, self.coord)

    def extended(self) -> np.ndarray:
        return sphere.from_chart(self.chart, self.coord)

    @staticmethod
    def dirac(a) -> "PointCloudMeasure":
        ch, w = sphere.to_chart(np.asarray([a], dtype=complex))
        return PointCloudMeasure(ch, w, np.array([1.0]))

    @staticmethod
    def from_points(points, weights=None, meta=None) -> "PointCloudMeasure":
        ch, w = sphere.to_chart(np.asarray(points, dtype=complex))
        if weights is None:
            weights = np.full(len(w), 1.0 / len(w))
        return PointCloudMeasure(ch, w, np.asarray(weights, float), meta or {})


def save_cloud(path, cloud: PointCloudMeasure):
    """Text header plus little-endian columns (chart u8, re f8, im f8, weight f8)."""
    meta = cloud.meta
    header = [
        _MAGIC,
        f"count={len(cloud)}",
        f"seed={meta.get('seed', '-')}",
        f"n={meta.get('n', '-')}",
        f"correspondence={meta.get('correspondence', '-')}",
        "end",
    ]
    with open(path, "wb") as fh:
        fh.write(("\n".join(header) + "\n").encode("ascii"))
        fh.write(cloud.chart.astype("u1").tobytes())
        fh.write(cloud.coord.real.astype("<f8").tobytes())
        fh.write(cloud.coord.imag.astype("<f8").tobytes())
        fh.write(cloud.weight.astype("<f8").tobytes())


def load_cloud(path) -> PointCloudMeasure:
    with open(path, "rb") as fh:
        lines = []
        while True:
            line = fh.readline().decode("ascii").rstrip("\n")
            lines.append(line)
            if line == "end":
                break
            if len(lines) > 16:
                raise ValueError("malformed cloud header")
        if lines[0] != _MAGIC:
            raise ValueError("not a corrdyn cloud file")
        fields = dict(kv.split("=", 1) for kv in lines[1:-1])
        n = int(fields["count"])
        chart = np.frombuffer(fh.read(n), dtype="u1")
        re = np.frombuffer(fh.read(8 * n), dtype="<f8")
        im = np.frombuffer(fh.read(8 * n), dtype="<f8")
        wt = np.frombuffer(fh.read(8 * n), dtype="<f8")
    meta = {k: v for k, v in fields.items() if k != "count" and v != "-"}
    if "n" in meta:
        meta["n"] = int(meta["n"])
    if "seed" in meta:
        meta["seed"] = int(meta["seed"])
    return PointCloudMeasure(chart.copy(), re + 1j * im, wt.copy(), meta)
