import io

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mlmfit.graph_io import (
    DegreeHistogram, ParseError, degree_histogram, load_histogram, parse_edge_list,
    read_histogram_text, save_histogram,
)


def test_parse_examples():
    e = parse_edge_list(io.StringIO("1 2\n2 3\n# comment\n"))
    assert e.num_edges == 2 and e.num_nodes == 3
    e = parse_edge_list(io.StringIO("a\tb\n% note\n\n"))
    assert list(e.edges()) == [("a", "b")]
    e = parse_edge_list(io.StringIO("1 2 0.5 extra\n"))
    assert list(e.edges()) == [("1", "2")]


def test_parse_error_location():
    with pytest.raises(ParseError) as exc:
        parse_edge_list(io.StringIO("1\n"))
    assert exc.value.line == 1
    with pytest.raises(ParseError) as exc:
        parse_edge_list(io.StringIO("1 2\n\n  7\n"), source="g.txt")
    assert exc.value.line == 3 and exc.value.column == 3 and "g.txt:3" in str(exc.value)


def test_degree_modes():
    e = parse_edge_list(io.StringIO("1 2\n2 3\n"))
    h = degree_histogram(e, "in")
    assert h.rows() == [(1, 2)] and h.excluded_zero_degree == 1
    assert degree_histogram(e, "total").rows() == [(1, 2), (2, 1)]
    assert degree_histogram(e, "out").rows() == [(1, 2)]
    with pytest.raises(ValueError):
        degree_histogram(e, "both")


def test_self_loops_and_duplicates():
    e = parse_edge_list(io.StringIO("1 1\n2 3\n"))
    h = degree_histogram(e, "total", drop_self_loops=True)
    assert h.excluded_zero_degree == 1 and h.rows() == [(1, 2)]
    assert degree_histogram(e, "total").rows() == [(1, 2), (2, 1)]
    e = parse_edge_list(io.StringIO("1 2\n1 2\n"))
    assert degree_histogram(e, "in").rows() == [(2, 1)]
    assert degree_histogram(e, "in", dedup=True).rows() == [(1, 1)]


def test_empty_graph():
    with pytest.raises(ValueError):
        degree_histogram(parse_edge_list(io.StringIO("# nothing\n")))


def test_streaming_iterable_input():
    pairs = ((str(i), str(i + 1)) for i in range(1000))
    h = degree_histogram(pairs, "total")
    assert h.rows() == [(1, 2), (2, 999)]


@given(st.lists(st.tuples(st.integers(0, 30), st.integers(0, 30)), min_size=1, max_size=200))
def test_handshake(edges):
    edges = [(str(a), str(b)) for a, b in edges if a != b]
    if not edges:
        return
    h = degree_histogram(edges, "total")
    assert int(np.dot(h.degrees, h.counts)) == 2 * len(edges)
    assert h.n == h.expand().size


def test_histogram_csv_examples(tmp_path):
    h = read_histogram_text("degree,count\n1,10\n5,2\n")
    assert h.rows() == [(1, 10), (5, 2)] and h.n == 12
    for bad, line in [("degree,count\n1,0\n", 2), ("degree,count\n1,3\n1,4\n", 3),
                      ("deg,count\n1,3\n", 1), ("degree,count\n1,x\n", 2), ("", 1)]:
        with pytest.raises(ParseError) as exc:
            read_histogram_text(bad)
        assert exc.value.line == line
    with pytest.raises(FileNotFoundError):
        load_histogram(tmp_path / "missing.csv")


def test_save_format(tmp_path):
    h = DegreeHistogram(np.array([1, 3]), np.array([4, 1]))
    p = tmp_path / "h.csv"
    save_histogram(h, p)
    assert p.read_bytes() == b"degree,count\n1,4\n3,1\n"


@given(st.dictionaries(st.integers(1, 10**9), st.integers(1, 10**6), min_size=1, max_size=50))
def test_round_trip(table):
    d = np.array(sorted(table))
    h = DegreeHistogram(d, np.array([table[k] for k in d]))
    buf = io.StringIO()
    save_histogram(h, buf)
    buf.seek(0)
    assert load_histogram(buf) == h


def test_histogram_invariants():
    with pytest.raises(ValueError):
        DegreeHistogram(np.array([2, 1]), np.array([1, 1]))
    with pytest.raises(ValueError):
        DegreeHistogram(np.array([0, 1]), np.array([1, 1]))
    h = DegreeHistogram.from_values(np.array([0, 0, 3, 1, 3]))
    assert h.rows() == [(1, 1), (3, 2)] and h.excluded_zero_degree == 2
    s = h.to_sample()
    assert s.n == 3 and np.array_equal(s.values, [1.0, 3.0])
