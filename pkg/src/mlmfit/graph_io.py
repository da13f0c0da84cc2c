"""Edge-list parsing, degree extraction and degree-histogram CSV files."""
from __future__ import annotations

import csv
import io
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, TextIO

import numpy as np

from .estimation import Sample

MODES = ("in", "out", "total")


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int = 1, source: str = "<stream>"):
        super().__init__(f"{source}:{line}:{column}: {message}")
        self.line = line
        self.column = column
        self.source = source


@dataclass(frozen=True)
class DegreeHistogram:
    """Sparse (degree, count) table; degrees strictly increasing and >= 1."""

    degrees: np.ndarray
    counts: np.ndarray
    excluded_zero_degree: int = 0

    def __post_init__(self):
        d = np.asarray(self.degrees, dtype=np.int64).ravel()
        c = np.asarray(self.counts, dtype=np.int64).ravel()
        if d.shape != c.shape:
            raise ValueError("degrees and counts differ in length")
        if d.size == 0:
            raise ValueError("empty histogram")
        if np.any(d < 1) or np.any(c < 1):
            raise ValueError("degrees and counts must be positive")
        if np.any(np.diff(d) <= 0):
            raise ValueError("degrees must be strictly increasing")
        object.__setattr__(self, "degrees", d)
        object.__setattr__(self, "counts", c)

    @classmethod
    def from_values(cls, values, excluded_zero_degree: int = 0) -> "DegreeHistogram":
        """Histogram of positive integer observations (zeros are counted as excluded)."""
        v = np.asarray(values, dtype=np.int64).ravel()
        zeros = int(np.sum(v <= 0))
        d, c = np.unique(v[v > 0], return_counts=True)
        return cls(d, c, excluded_zero_degree + zeros)

    @property
    def n(self) -> int:
        return int(self.counts.sum())

    def rows(self):
        return list(zip(self.degrees.tolist(), self.counts.tolist()))

    def to_sample(self) -> Sample:
        return Sample(self.degrees.astype(float), self.counts.astype(float))

    def expand(self) -> np.ndarray:
        return np.repeat(self.degrees, self.counts)

    def __eq__(self, other):
        if not isinstance(other, DegreeHistogram):
            return NotImplemented
        # the (degree, count) table is the histogram; the exclusion tally is metadata
        return np.array_equal(self.degrees, other.degrees) and np.array_equal(self.counts, other.counts)


@dataclass
class EdgeList:
    """Edges as dense integer node indices; ``ids`` maps index -> original token."""

    sources: np.ndarray
    targets: np.ndarray
    ids: list = field(default_factory=list)
    directed: bool = True

    @property
    def num_edges(self) -> int:
        return int(self.sources.size)

    @property
    def num_nodes(self) -> int:
        return len(self.ids)

    def edges(self) -> Iterator[tuple]:
        for a, b in zip(self.sources.tolist(), self.targets.tolist()):
            yield self.ids[a], self.ids[b]


def iter_edges(stream: Iterable[str], source: str = "<stream>") -> Iterator[tuple[str, str]]:
    """Yield (source, target) tokens, skipping blank and '#'/'%' comment lines."""
    for lineno, line in enumerate(stream, 1):
        stripped = line.strip()
        if not stripped or stripped[0] in "#%":
            continue
        tok = stripped.split()
        if len(tok) < 2:
            col = len(line) - len(line.lstrip()) + 1
            raise ParseError(f"expected two node ids, got {stripped!r}", lineno, col, source)
        yield tok[0], tok[1]


def parse_edge_list(stream: TextIO | Iterable[str], directed: bool = True,
                    source: str = "<stream>") -> EdgeList:
    index: dict[str, int] = {}
    ids: list[str] = []
    src, dst = [], []

    def idx(tok):
        i = index.get(tok)
        if i is None:
            i = index[tok] = len(ids)
            ids.append(tok)
        return i

    for a, b in iter_edges(stream, source):
        src.append(idx(a))
        dst.append(idx(b))
    return EdgeList(np.asarray(src, dtype=np.int64), np.asarray(dst, dtype=np.int64), ids, directed)


def degree_histogram(edges: EdgeList | Iterable[tuple], mode: str = "total", dedup: bool = False,
                     drop_self_loops: bool = False) -> DegreeHistogram:
    """Degree histogram under ``mode`` in {'in', 'out', 'total'}.

    Accepts a parsed :class:`EdgeList` or any iterable of (source, target)
    pairs, the latter consumed in one pass with memory proportional to the
    number of nodes (plus the edge set when ``dedup`` is on). Every node that
    appears in any edge is counted; nodes left with degree 0 are reported in
    ``excluded_zero_degree`` and left out of the rows. Duplicate edges count
    once each unless ``dedup``; a self-loop adds 2 to the total degree.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    pairs = edges.edges() if isinstance(edges, EdgeList) else edges
    deg: Counter = Counter()
    seen_nodes: set = set()
    seen_edges: set = set()
    any_edge = False
    for a, b in pairs:
        any_edge = True
        seen_nodes.add(a)
        seen_nodes.add(b)
        if drop_self_loops and a == b:
            continue
        if dedup:
            key = (a, b)
            if key in seen_edges:
                continue
            seen_edges.add(key)
        if mode in ("out", "total"):
            deg[a] += 1
        if mode in ("in", "total"):
            deg[b] += 1
    if not any_edge:
        raise ValueError("empty graph: no edges")
    values = np.fromiter(deg.values(), dtype=np.int64, count=len(deg))
    zero = len(seen_nodes) - int(np.count_nonzero(values))
    if not np.any(values > 0):
        raise ValueError("every node has degree 0 after filtering")
    d, c = np.unique(values[values > 0], return_counts=True)
    return DegreeHistogram(d, c, zero)


def save_histogram(h: DegreeHistogram, path: str | Path | TextIO) -> None:
    """Write ``degree,count`` CSV with LF line endings."""
    def write(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["degree", "count"])
        w.writerows(h.rows())

    if isinstance(path, (str, Path)):
        with open(path, "w", newline="") as fh:
            write(fh)
    else:
        write(path)


def load_histogram(path: str | Path | TextIO) -> DegreeHistogram:
    if isinstance(path, (str, Path)):
        with open(path, newline="") as fh:
            return _read_histogram(fh, str(path))
    return _read_histogram(path, "<stream>")


def _read_histogram(fh, source) -> DegreeHistogram:
    reader = csv.reader(fh)
    header = next(reader, None)
    if header is None or [h.strip() for h in header] != ["degree", "count"]:
        raise ParseError("missing 'degree,count' header", 1, 1, source)
    rows = {}
    for lineno, row in enumerate(reader, 2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 2:
            raise ParseError(f"expected 2 fields, got {len(row)}", lineno, 1, source)
        try:
            d, c = int(row[0]), int(row[1])
        except ValueError:
            raise ParseError(f"non-integer field in {row!r}", lineno, 1, source) from None
        if d < 1 or c < 1:
            raise ParseError(f"degree and count must be positive, got {d},{c}", lineno, 1, source)
        if d in rows:
            raise ParseError(f"duplicate degree {d}", lineno, 1, source)
        rows[d] = c
    if not rows:
        raise ParseError("no histogram rows", 2, 1, source)
    d = np.array(sorted(rows), dtype=np.int64)
    return DegreeHistogram(d, np.array([rows[k] for k in d.tolist()], dtype=np.int64))


def read_histogram_text(text: str) -> DegreeHistogram:
    return _read_histogram(io.StringIO(text), "<string>")
