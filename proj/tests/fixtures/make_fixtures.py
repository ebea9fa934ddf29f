#!/usr/bin/env python3
"""Regenerates the sparse Matrix Market fixtures used by the tests.

ls219.mtx    219 x 85, two +-1 entries per row, integer field (ash219 shape)
wl1033.mtx   1033 x 320, ~4700 real entries, graded columns (well1033 shape)
"""
import pathlib

import numpy as np

HERE = pathlib.Path(__file__).resolve().parent


def write_coordinate(path, m, n, entries, field):
    with open(path, "w") as f:
        f.write(f"%%MatrixMarket matrix coordinate {field} general\n")
        f.write("% synthetic fixture, see make_fixtures.py\n")
        f.write(f"{m} {n} {len(entries)}\n")
        for i, j, v in sorted(entries, key=lambda e: (e[1], e[0])):
            if field == "integer":
                f.write(f"{i + 1} {j + 1} {int(v)}\n")
            else:
                f.write(f"{i + 1} {j + 1} {v:.17g}\n")


def to_dense(m, n, entries):
    A = np.zeros((m, n))
    for i, j, v in entries:
        A[i, j] += v
    return A


def least_squares_pattern(rng):
    m, n = 219, 85
    while True:
        entries = []
        for i in range(m):
            # every column appears at least twice
            if i < 2 * n:
                j1 = i % n
            else:
                j1 = rng.integers(n)
            j2 = rng.integers(n - 1)
            j2 = j2 + (j2 >= j1)
            entries.append((i, j1, 1))
            entries.append((i, j2, -1 if rng.random() < 0.5 else 1))
        if np.linalg.matrix_rank(to_dense(m, n, entries)) == n:
            return m, n, entries


def graded_sparse(rng):
    m, n, nnz = 1033, 320, 4732
    cells = set()
    for j in range(n):  # no empty columns
        cells.add((int(rng.integers(m)), j))
    for i in range(m):  # no empty rows
        cells.add((i, int(rng.integers(n))))
    while len(cells) < nnz:
        cells.add((int(rng.integers(m)), int(rng.integers(n))))
    scale = np.logspace(0, -2, n)
    entries = [(i, j, float(rng.uniform(0.1, 1.0) * scale[j])) for i, j in cells]
    assert np.linalg.matrix_rank(to_dense(m, n, entries)) == n
    return m, n, entries


def main():
    rng = np.random.default_rng(20240607)
    m, n, e = least_squares_pattern(rng)
    write_coordinate(HERE / "ls219.mtx", m, n, e, "integer")
    m, n, e = graded_sparse(rng)
    write_coordinate(HERE / "wl1033.mtx", m, n, e, "real")


if __name__ == "__main__":
    main()
