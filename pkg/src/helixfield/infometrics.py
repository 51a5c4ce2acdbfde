"""Shannon entropies and signed mutual redundancy on contingency tables.

All logarithms are base 2.  Empty cells contribute nothing (0 log 0 = 0);
there is no smoothing, since pseudo-counts would shift the signed measures.

The three-dimensional redundancy is the alternating entropy sum

    R_ijk = H_i + H_j + H_k - H_ij - H_ik - H_jk + H_ijk

and the four-dimensional one continues the same inclusion-exclusion
pattern (McGill 1954).  Both may be negative.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

__all__ = [
    "Dimension",
    "ContingencyTable",
    "RedundancySeries",
    "SchemaError",
    "entropy",
    "mutual_information2",
    "mutual_redundancy3",
    "mutual_redundancy4",
    "measure",
    "subset_label",
    "series",
    "read_table_csv",
    "write_table_csv",
    "read_table_dir",
]


class SchemaError(ValueError):
    pass


@dataclass(frozen=True)
class Dimension:
    name: str
    size: int

    def __post_init__(self):
        if self.size < 2:
            raise ValueError(f"dimension {self.name!r} needs an alphabet of size >= 2")


@dataclass(frozen=True, eq=False)
class ContingencyTable:
    """Nonnegative (possibly fractional) counts over a grid of categories.

    ``counts`` is a dense array with one axis per dimension.
    """

    dims: tuple[Dimension, ...]
    counts: np.ndarray

    def __post_init__(self):
        dims = tuple(self.dims)
        counts = np.array(self.counts, dtype=float)
        if counts.shape != tuple(d.size for d in dims):
            raise ValueError(
                f"counts shape {counts.shape} does not match dimension sizes "
                f"{tuple(d.size for d in dims)}"
            )
        if not np.all(np.isfinite(counts)) or np.any(counts < 0):
            raise ValueError("counts must be finite and nonnegative")
        if not counts.sum() > 0:
            raise ValueError("table has zero total count")
        counts.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "counts", counts)

    @classmethod
    def from_cells(cls, dims: Sequence[Dimension | tuple[str, int]],
                   cells: Mapping[tuple[int, ...], float]) -> "ContingencyTable":
        dims = tuple(d if isinstance(d, Dimension) else Dimension(*d) for d in dims)
        counts = np.zeros(tuple(d.size for d in dims))
        for cell, n in cells.items():
            if len(cell) != len(dims):
                raise ValueError(f"cell {cell} has the wrong number of coordinates")
            for c, d in zip(cell, dims):
                if not 0 <= c < d.size:
                    raise ValueError(f"cell {cell}: code {c} outside alphabet of {d.name!r}")
            if n < 0:
                raise ValueError(f"negative count {n} at cell {cell}")
            counts[tuple(cell)] += n
        return cls(dims, counts)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(d.name for d in self.dims)

    def index(self, key: int | str) -> int:
        if isinstance(key, str):
            try:
                return self.names.index(key)
            except ValueError:
                raise KeyError(f"no dimension named {key!r}") from None
        if not 0 <= key < len(self.dims):
            raise IndexError(f"dimension index {key} out of range")
        return key

    def marginal(self, subset) -> np.ndarray:
        keep = sorted({self.index(k) for k in subset})
        drop = tuple(ax for ax in range(len(self.dims)) if ax not in keep)
        return self.counts.sum(axis=drop)


def _entropy_of_counts(counts: np.ndarray) -> float:
    p = counts.ravel() / counts.sum()
    # filter after normalising: a subnormal count can underflow to p == 0
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum())


def entropy(table: ContingencyTable, subset) -> float:
    """Joint entropy (bits) of the dimensions in ``subset``."""
    subset = list(subset)
    if not subset:
        raise ValueError("entropy of an empty subset is undefined")
    return _entropy_of_counts(table.marginal(subset))


def _distinct(table, idx, k):
    idx = tuple(table.index(i) for i in idx)
    if len(idx) != k or len(set(idx)) != k:
        raise ValueError(f"need {k} distinct dimensions, got {idx}")
    return idx


def _alternating(table, idx) -> float:
    # sum over nonempty subsets S of (-1)**(|S|+1) H(S)
    total = 0.0
    for size in range(1, len(idx) + 1):
        sign = 1.0 if size % 2 else -1.0
        total += sign * sum(entropy(table, s) for s in combinations(idx, size))
    return total


def mutual_information2(table: ContingencyTable, pair) -> float:
    i, j = _distinct(table, pair, 2)
    # clip rounding below zero; the quantity is nonnegative
    return max(0.0, entropy(table, [i]) + entropy(table, [j]) - entropy(table, [i, j]))


def mutual_redundancy3(table: ContingencyTable, triple) -> float:
    return _alternating(table, _distinct(table, triple, 3))


def mutual_redundancy4(table: ContingencyTable, quad) -> float:
    return _alternating(table, _distinct(table, quad, 4))


_MEASURES = {2: mutual_information2, 3: mutual_redundancy3, 4: mutual_redundancy4}


def measure(table: ContingencyTable, subset) -> float:
    """Dispatch on subset size: 2 -> mutual information, 3/4 -> redundancy."""
    fn = _MEASURES.get(len(subset))
    if fn is None:
        raise ValueError(f"subsets must have 2, 3 or 4 dimensions, got {len(subset)}")
    return fn(table, subset)


def subset_label(names: Sequence[str]) -> str:
    if all(len(n) == 1 for n in names):
        return "".join(names)
    return ":".join(names)


@dataclass(frozen=True)
class RedundancySeries:
    labels: tuple[str, ...]
    years: tuple
    values: dict[str, tuple[float, ...]] = field(default_factory=dict)

    def rows(self):
        for label in self.labels:
            for year, v in zip(self.years, self.values[label]):
                yield year, label, v


def _resolve_subset(table: ContingencyTable, subset) -> tuple[str, ...]:
    if isinstance(subset, str):
        if subset in table.names:
            return (subset,)
        if ":" in subset:
            parts = subset.split(":")
        else:
            parts = list(subset)
        return tuple(table.names[table.index(p)] for p in parts)
    return tuple(table.names[table.index(p)] for p in subset)


def series(tables: Mapping, subsets: Sequence) -> RedundancySeries:
    """Evaluate every subset on every year's table.

    ``tables`` maps year -> :class:`ContingencyTable`; all must share the same
    dimension schema.  Subsets are given as name sequences, index sequences or
    label strings such as ``"uig"`` / ``"univ:ind:gov"``.
    """
    if not tables:
        raise ValueError("no tables given")
    if not subsets:
        raise ValueError("no subsets given")
    years = sorted(tables)
    schema = tables[years[0]].dims
    for y in years:
        if tables[y].dims != schema:
            raise SchemaError(
                f"year {y}: dimensions {tables[y].dims} differ from {schema}"
            )
    first = tables[years[0]]
    resolved = [_resolve_subset(first, s) for s in subsets]
    labels = tuple(subset_label(s) for s in resolved)
    if len(set(labels)) != len(labels):
        raise ValueError(f"duplicate subsets: {labels}")
    values = {
        label: tuple(measure(tables[y], s) for y in years)
        for label, s in zip(labels, resolved)
    }
    return RedundancySeries(labels, tuple(years), values)


def _parse_rows(path: Path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise SchemaError(f"{path}: empty file") from None
        if len(header) < 2 or header[-1] != "count":
            raise SchemaError(f"{path}: header must be dimension columns followed by 'count'")
        names = header[:-1]
        if len(set(names)) != len(names):
            raise SchemaError(f"{path}: duplicate dimension names {names}")
        cells = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not x.strip() for x in row):
                continue
            if len(row) != len(header):
                raise SchemaError(f"{path}:{lineno}: expected {len(header)} fields")
            try:
                codes = tuple(int(x) for x in row[:-1])
                n = float(row[-1])
            except ValueError as exc:
                raise SchemaError(f"{path}:{lineno}: {exc}") from None
            if any(c < 0 for c in codes):
                raise SchemaError(f"{path}:{lineno}: category codes must be >= 0")
            if not math.isfinite(n) or n < 0:
                raise SchemaError(f"{path}:{lineno}: count must be finite and >= 0")
            cells.append((codes, n))
    return names, cells


def _build(names, cells, sizes=None) -> ContingencyTable:
    if sizes is None:
        sizes = [2] * len(names)
        for codes, _ in cells:
            sizes = [max(s, c + 1) for s, c in zip(sizes, codes)]
    dims = [Dimension(n, s) for n, s in zip(names, sizes)]
    counts = {}
    for codes, n in cells:
        counts[codes] = counts.get(codes, 0.0) + n
    return ContingencyTable.from_cells(dims, counts)


def read_table_csv(path, sizes: Sequence[int] | None = None) -> ContingencyTable:
    """Read one-row-per-cell CSV (dimension codes, then ``count``).

    Alphabet sizes default to ``max(code) + 1`` (at least 2) per column.
    Missing cells count as zero.
    """
    names, cells = _parse_rows(Path(path))
    return _build(names, cells, sizes)


def write_table_csv(table: ContingencyTable, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(list(table.names) + ["count"])
        for cell in np.ndindex(*table.counts.shape):
            w.writerow(list(cell) + [repr(float(table.counts[cell]))])


def read_table_dir(directory) -> dict[int | str, ContingencyTable]:
    """Read every ``*.csv`` in ``directory``; the file stem is the year.

    Alphabet sizes are unified across years (a category absent in one year is
    an all-zero slice there, which changes no entropy).
    """
    directory = Path(directory)
    files = sorted(directory.glob("*.csv"))
    if not files:
        raise SchemaError(f"{directory}: no .csv files found")
    parsed = {}
    for f in files:
        year: int | str = int(f.stem) if f.stem.lstrip("-").isdigit() else f.stem
        parsed[year] = _parse_rows(f)
    names0 = next(iter(parsed.values()))[0]
    sizes = [2] * len(names0)
    for year, (names, cells) in parsed.items():
        if names != names0:
            raise SchemaError(f"year {year}: columns {names} differ from {names0}")
        for codes, _ in cells:
            sizes = [max(s, c + 1) for s, c in zip(sizes, codes)]
    tables = {}
    for year, (names, cells) in parsed.items():
        try:
            tables[year] = _build(names, cells, sizes)
        except ValueError as exc:
            raise SchemaError(f"year {year}: {exc}") from None
    return tables
