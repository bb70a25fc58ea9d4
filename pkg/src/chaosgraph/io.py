"""JSON documents for every structure, plus CSV emission.

Documents are plain dicts tagged by ``"type"``::

    {"type": "graph", "n": 4, "edges": [[0, 1], ...]}
    {"type": "hypergraph", "n": 3, "edges": [{"verts": [0, 1, 2], "w": 1.0}, ...]}
    {"type": "homsum", "d": 2, "n": 4, "terms": [{"verts": [0, 1], "q": 0.5}, ...]}
    {"type": "partition", "blocks": [[0, 1], [2]], "vprime": [0, 1, 2]}
    {"type": "support", "d": 2, "n": 4, "tuples": [[0, 1], [1, 0], ...]}

Any document may carry ``"labels"``, one entry per vertex. Product families
label vertex ``u * |V_h| + w`` with the pair of factor labels; grid families
label vertex ``(a - 1) * n + (b - 1)`` with the 1-based coordinate ``[a, b]``.
Floats are written with ``repr`` so loading reproduces them bit for bit.
"""

from __future__ import annotations

import csv
import io as _io
import json
import math
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from .errors import SchemaError
from .graphs import Graph, Partition, build_graph
from .homsum import HomogeneousSum, build_homsum
from .hypergraphs import WeightedHypergraph, build_hypergraph
from .support import Support

TYPES = ("graph", "hypergraph", "homsum", "partition", "support")


def _labels_out(labels) -> list | None:
    if labels is None:
        return None
    return [_plain(x) for x in labels]


def _plain(x):
    if isinstance(x, (tuple, list, np.ndarray)):
        return [_plain(y) for y in x]
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    return x


def _tuplify(x):
    return tuple(_tuplify(y) for y in x) if isinstance(x, list) else x


def _labels_in(doc: dict, n: int) -> tuple | None:
    labels = doc.get("labels")
    if labels is None:
        return None
    if not isinstance(labels, list) or len(labels) != n:
        raise SchemaError(f"'labels' must be a list of length {n}")
    return tuple(_tuplify(x) for x in labels)


def _require(doc: dict, key: str, kind: type | tuple[type, ...]):
    if key not in doc:
        raise SchemaError(f"missing field {key!r}")
    value = doc[key]
    if isinstance(value, bool) or not isinstance(value, kind):
        raise SchemaError(f"field {key!r} has the wrong type")
    return value


def _int_rows(rows, what: str, width: int | None = None) -> list[list[int]]:
    if not isinstance(rows, list):
        raise SchemaError(f"{what} must be a list")
    out = []
    for r in rows:
        if not isinstance(r, list) or not all(isinstance(v, int) and not isinstance(v, bool) for v in r):
            raise SchemaError(f"{what} entries must be lists of integers")
        if width is not None and len(r) != width:
            raise SchemaError(f"{what} entries must have length {width}")
        out.append(r)
    return out


def _number(x, what: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise SchemaError(f"{what} must be a number")
    return float(x)


def to_doc(obj) -> dict:
    if isinstance(obj, Graph):
        doc = {"type": "graph", "n": obj.n_vertices, "edges": obj.edges.tolist()}
    elif isinstance(obj, WeightedHypergraph):
        doc = {
            "type": "hypergraph",
            "n": obj.n_vertices,
            "edges": [{"verts": list(e), "w": float(w)} for e, w in zip(obj.edges, obj.weights)],
        }
    elif isinstance(obj, HomogeneousSum):
        doc = {
            "type": "homsum",
            "d": obj.d,
            "n": obj.n_vertices,
            "terms": [{"verts": k, "q": float(q)} for k, q in zip(obj.keys.tolist(), obj.coefs)],
        }
    elif isinstance(obj, Support):
        doc = {"type": "support", "d": obj.d, "n": obj.n_vertices, "tuples": obj.tuples.tolist()}
    elif isinstance(obj, Partition):
        doc = {"type": "partition", "blocks": [sorted(b) for b in obj.blocks]}
        if obj.n_vertices is not None:
            doc["n"] = obj.n_vertices
        return doc
    else:
        raise TypeError(f"cannot serialise {type(obj).__name__}")
    labels = _labels_out(getattr(obj, "labels", None))
    if labels is not None:
        doc["labels"] = labels
    return doc


def partition_doc(p: Partition, vprime: Iterable[int] | None = None) -> dict:
    doc = to_doc(p)
    if vprime is not None:
        doc["vprime"] = sorted(int(v) for v in vprime)
    return doc


def from_doc(doc: Any):
    """Validate a document and build the object it describes.

    Partitions come back as ``(Partition, vprime or None)``.
    """
    if not isinstance(doc, dict):
        raise SchemaError("document must be a JSON object")
    kind = doc.get("type")
    if kind not in TYPES:
        raise SchemaError(f"'type' must be one of {', '.join(TYPES)}")

    if kind == "partition":
        blocks = _int_rows(_require(doc, "blocks", list), "'blocks'")
        n = doc.get("n")
        if n is not None:
            n = _require(doc, "n", int)
        vprime = doc.get("vprime")
        if vprime is not None:
            if not isinstance(vprime, list) or not all(isinstance(v, int) and not isinstance(v, bool) for v in vprime):
                raise SchemaError("'vprime' must be a list of integers")
        return Partition.of(blocks, n), vprime

    n = _require(doc, "n", int)
    labels = _labels_in(doc, n)
    if kind == "graph":
        edges = _int_rows(_require(doc, "edges", list), "'edges'", 2)
        return build_graph(n, np.array(edges, dtype=np.int64).reshape(-1, 2), labels=labels)
    if kind == "hypergraph":
        raw = _require(doc, "edges", list)
        edges, weights = [], []
        for e in raw:
            if not isinstance(e, dict):
                raise SchemaError("hypergraph edges must be objects with 'verts' and 'w'")
            edges.append(_int_rows([_require(e, "verts", list)], "'verts'")[0])
            weights.append(_number(e.get("w", 1.0), "'w'"))
        return build_hypergraph(n, edges, weights, labels=labels)

    d = _require(doc, "d", int)
    if kind == "homsum":
        terms = []
        for t in _require(doc, "terms", list):
            if not isinstance(t, dict):
                raise SchemaError("homsum terms must be objects with 'verts' and 'q'")
            verts = _int_rows([_require(t, "verts", list)], "'verts'", d)[0]
            terms.append((verts, _number(_require(t, "q", (int, float)), "'q'")))
        return build_homsum(d, n, terms, labels)
    tuples = _int_rows(_require(doc, "tuples", list), "'tuples'", d)
    return Support.of(d, n, tuples, labels)


def dumps(obj, **extra) -> str:
    doc = obj if isinstance(obj, dict) else to_doc(obj)
    return json.dumps({**doc, **extra}, indent=None, separators=(",", ":"), allow_nan=False) + "\n"


def save(obj, path: str | Path) -> None:
    Path(path).write_text(dumps(obj))


def loads(text: str):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from exc
    return from_doc(doc)


def load(path: str | Path):
    return loads(Path(path).read_text())


def fmt_float(x: float) -> str:
    """17 significant digits: enough to round-trip any double."""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x) or math.isinf(x):
            return str(x)
        return f"{x:.17g}"
    return "" if x is None else str(x)


def to_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt_float(v) for v in r])
    return buf.getvalue()


def read_csv_floats(text: str) -> list[list[float]]:
    rows = list(csv.reader(_io.StringIO(text)))
    return [[float(v) for v in r] for r in rows[1:]]


def jsonable(x):
    """Convert numpy scalars/arrays and tuples into JSON-ready values."""
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        items = sorted(x) if isinstance(x, (set, frozenset)) else x
        return [jsonable(v) for v in items]
    if isinstance(x, np.ndarray):
        return jsonable(x.tolist())
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    return x
