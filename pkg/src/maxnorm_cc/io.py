"""Text formats for affinities, partitions and feature files.

Affinity files hold ``n`` on the first line followed by ``n`` rows of ``n``
space-separated reals.  Partition files are CSV with a ``node,cluster``
header.  Reals are written with 17 significant digits so a save/load round
trip is exact.
"""

from __future__ import annotations

import csv

import numpy as np

from .core import SYMMETRY_TOL, AffinityMatrix, Partition

__all__ = [
    "load_affinity",
    "save_affinity",
    "load_partition",
    "save_partition",
    "load_features",
]


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def save_affinity(A: AffinityMatrix, path) -> None:
    a = A.entries if isinstance(A, AffinityMatrix) else np.asarray(A, dtype=float)
    with open(path, "w") as fh:
        fh.write(f"{a.shape[0]}\n")
        for row in a:
            fh.write(" ".join(_fmt(v) for v in row) + "\n")


def load_affinity(path) -> AffinityMatrix:
    """Read and validate an affinity file.

    Asymmetry up to 1e-9 is averaged away; anything larger is an error.
    """
    with open(path) as fh:
        lines = [ln.split() for ln in fh if ln.strip()]
    if not lines or len(lines[0]) != 1:
        raise ValueError(f"{path}: first line must hold the node count")
    try:
        n = int(lines[0][0])
        rows = [[float(v) for v in ln] for ln in lines[1:]]
    except ValueError as exc:
        raise ValueError(f"{path}: malformed number ({exc})") from None
    if n < 1 or len(rows) != n or any(len(r) != n for r in rows):
        raise ValueError(f"{path}: expected {n} rows of {n} values")
    a = np.array(rows)
    if np.max(np.abs(a - a.T)) > SYMMETRY_TOL:
        raise ValueError(f"{path}: affinity matrix is not symmetric")
    return AffinityMatrix(0.5 * (a + a.T))


def save_partition(p: Partition, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["node", "cluster"])
        for u, c in enumerate(p.labels):
            w.writerow([u, int(c)])


def load_partition(path) -> Partition:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["node", "cluster"]:
            raise ValueError(f"{path}: expected header 'node,cluster'")
        pairs = []
        for row in reader:
            if not row:
                continue
            if len(row) != 2:
                raise ValueError(f"{path}: bad row {row!r}")
            pairs.append((int(row[0]), int(row[1])))
    nodes = sorted(u for u, _ in pairs)
    if nodes != list(range(len(pairs))):
        raise ValueError(f"{path}: nodes must be 0..n-1, each exactly once")
    labels = np.empty(len(pairs), dtype=np.int64)
    for u, c in pairs:
        labels[u] = c
    return Partition(labels)


def load_features(path) -> tuple[np.ndarray, np.ndarray | None]:
    """CSV of points, one per row; a trailing ``label`` column is split off.

    A header row is optional; it is detected by a non-numeric first cell.
    """
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if not rows:
        raise ValueError(f"{path}: empty feature file")
    labels = None
    header = None
    try:
        float(rows[0][0])
    except ValueError:
        header, rows = [h.strip() for h in rows[0]], rows[1:]
    if header is not None and header[-1] == "label":
        labels = np.array([r[-1] for r in rows])
        rows = [r[:-1] for r in rows]
    return np.array(rows, dtype=float), labels
