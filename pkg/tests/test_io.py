import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from chaosgraph import (
    Partition,
    Support,
    build_homsum,
    build_hypergraph,
    complete,
    io,
    rook,
    triangle_hypergraph,
)
from chaosgraph.errors import LoopEdge, SchemaError


def same(a, b):
    assert type(a) is type(b)
    for field in ("n_vertices", "d", "labels"):
        assert getattr(a, field, None) == getattr(b, field, None)
    for field in ("edges", "keys", "coefs", "weights", "tuples"):
        x, y = getattr(a, field, None), getattr(b, field, None)
        if isinstance(x, np.ndarray):
            assert np.array_equal(x, y)
        else:
            assert x == y


@pytest.mark.parametrize(
    "obj",
    [
        complete(4),
        rook(3, 2),
        build_hypergraph(4, [(0, 1, 2), (1, 2, 3)], [0.1, 1 / 3]),
        build_homsum(3, 4, [((0, 1, 2), 0.7), ((1, 2, 3), -1e-9)]),
        triangle_hypergraph(4),
        Support.of(2, 3, [(0, 1), (1, 2)], labels=["a", "b", "c"]),
    ],
)
def test_round_trip(obj, tmp_path):
    path = tmp_path / "obj.json"
    io.save(obj, path)
    same(io.load(path), obj)


def test_partition_round_trip():
    p = Partition.of([[0, 1], [3]], 5)
    back, vprime = io.loads(io.dumps(io.partition_doc(p, vprime=[0, 1, 3])))
    assert back == p and vprime == [0, 1, 3]


def test_documented_layouts():
    doc = io.to_doc(complete(3))
    assert doc == {"type": "graph", "n": 3, "edges": [[0, 1], [0, 2], [1, 2]]}
    doc = io.to_doc(build_hypergraph(3, [(0, 1, 2)]))
    assert doc["edges"] == [{"verts": [0, 1, 2], "w": 1.0}]
    doc = io.to_doc(build_homsum(2, 2, [((0, 1), 2.5)]))
    assert doc == {"type": "homsum", "d": 2, "n": 2, "terms": [{"verts": [0, 1], "q": 2.5}]}


@pytest.mark.parametrize(
    "doc",
    [
        [],
        {"type": "tree"},
        {"type": "graph", "edges": []},
        {"type": "graph", "n": "4", "edges": []},
        {"type": "graph", "n": 3, "edges": [[0, 1, 2]]},
        {"type": "graph", "n": 3, "edges": [[0, 1.5]]},
        {"type": "hypergraph", "n": 3, "edges": [[0, 1, 2]]},
        {"type": "homsum", "d": 2, "n": 3, "terms": [{"verts": [0, 1]}]},
        {"type": "homsum", "d": 2, "n": 3, "terms": [{"verts": [0, 1], "q": "x"}]},
        {"type": "partition", "blocks": [[0], "1"]},
        {"type": "support", "d": 2, "n": 3, "tuples": [[0, 1]], "labels": [1]},
    ],
)
def test_schema_errors(doc):
    with pytest.raises(SchemaError):
        io.from_doc(doc)


def test_invalid_json():
    with pytest.raises(SchemaError):
        io.loads("{not json")


def test_module_errors_pass_through():
    with pytest.raises(LoopEdge):
        io.from_doc({"type": "graph", "n": 2, "edges": [[0, 0]]})


@given(st.lists(st.floats(allow_nan=False, allow_infinity=False), min_size=1, max_size=20))
def test_csv_floats_round_trip(values):
    text = io.to_csv(["x"], [[v] for v in values])
    assert [r[0] for r in io.read_csv_floats(text)] == values


@given(st.lists(st.floats(0.01, 100), min_size=1, max_size=6))
def test_weighted_hypergraph_json_is_lossless(ws):
    edges = [(i, i + 1) for i in range(len(ws))]
    h = build_hypergraph(len(ws) + 1, edges, ws)
    back = io.loads(io.dumps(h))
    assert back.weights.tolist() == h.weights.tolist()


def test_jsonable():
    out = io.jsonable({"a": np.float64(1.5), "b": (np.int64(2), frozenset({3, 1})), "c": np.array([1, 2]), "d": np.inf})
    assert out == {"a": 1.5, "b": [2, [1, 3]], "c": [1, 2], "d": "inf"}
    json.dumps(out)
