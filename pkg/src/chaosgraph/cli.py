"""``chaosgraph`` command-line front end.

Exit codes: 0 on success, 2 for invalid input, 3 for numerical failure. Errors
are printed to stderr as a single JSON object.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import itertools
import json
import math
import sys
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import __version__, constructions as C, io
from .combdim import combdim_family_report
from .errors import ChaosGraphError, SchemaError, SeedRequired, ValidationError
from .graphs import Graph, cheeger_check, normalized_laplacian_spectrum, adjacency_spectrum
from .homsum import DISTRIBUTIONS, HomogeneousSum, clt_report, from_graph, sample
from .hypergraphs import (
    WeightedHypergraph,
    homsum_to_hypergraph,
    hyper_adjacency_spectrum,
    hyper_cheeger_check,
    hyper_laplacian_spectrum,
)
from .reducibility import (
    block_grid_boxes,
    column_boxes,
    component_boxes,
    evaluate_partition,
    hypercube_boxes,
    partial_reduction_eval,
    random_balanced_partition,
    row_boxes,
    spectral_certificate,
)
from .support import Support

MANIFEST = "index.json"

# the default d=3, b=2 partition: blocks {(1,2),(2,2)}, {(2,1),(3,1)}, {(3,2),(1,1)}
DEFAULT_FP_BLOCKS = [[[1, 2], [2, 2]], [[2, 1], [3, 1]], [[3, 2], [1, 1]]]


# families ---------------------------------------------------------------------------

def _need(params: dict, *keys: str) -> None:
    missing = [k for k in keys if params.get(k) is None]
    if missing:
        raise SchemaError(f"missing family parameter(s): {', '.join(missing)}")


def _grid(p: dict):
    _need(p, "n", "beta")
    if p.get("layout", "contiguous") == "random":
        _need(p, "seed")
        layout = C.GridLayout.random(p["n"], p["beta"], p["seed"])
    else:
        layout = C.GridLayout.contiguous(p["n"], p["beta"])
    return C.grid_family(layout)


def _fractional(p: dict):
    _need(p, "n")
    blocks = p.get("blocks") or DEFAULT_FP_BLOCKS
    d = p.get("d") or len(blocks)
    b = p.get("b") or len(blocks[0])
    return C.fractional_product(p["n"], C.FractionalPartition.of(d, b, blocks))


def _rook_variant(p: dict):
    _need(p, "n")
    k = p.get("k_n")
    return C.rook_variant(p["n"], k if k is not None else math.floor(p["n"] ** 0.9))


def _union(p: dict):
    _need(p, "n")
    m = p.get("m")
    return C.union_with_isolated(p["n"], m if m is not None else p["n"] // 2)


def _random_support(p: dict):
    _need(p, "n", "alpha")
    if p.get("seed") is None:
        raise SeedRequired("random-support needs --seed")
    return C.random_support(p["n"], p["alpha"], p.get("d") or 2, p["seed"])


# name -> (builder, size parameter used by --sizes)
FAMILIES: dict[str, tuple[Callable[[dict], Any], str]] = {
    "complete": (lambda p: (_need(p, "n"), C.complete(p["n"]))[1], "n"),
    "complete-bipartite": (lambda p: (_need(p, "n"), C.complete_bipartite(p["n"]))[1], "n"),
    "hypercube": (lambda p: (_need(p, "n"), C.hypercube(p["n"]))[1], "n"),
    "rook": (lambda p: (_need(p, "q"), C.rook(p["q"], p.get("m") or 2))[1], "q"),
    "rook-variant": (_rook_variant, "n"),
    "grid": (_grid, "n"),
    "union-isolated": (_union, "n"),
    "fractional-product": (_fractional, "n"),
    "triangle": (lambda p: (_need(p, "n"), C.triangle_hypergraph(p["n"]))[1], "n"),
    "rooklike": (lambda p: (_need(p, "n", "d"), C.rooklike_hypergraph(p["n"], p["d"]))[1], "n"),
    "random-support": (_random_support, "n"),
}

FAMILY_PARAMS = ("n", "q", "m", "d", "b", "k_n", "beta", "alpha", "layout", "blocks")


def build_family(name: str, params: dict):
    if name not in FAMILIES:
        raise SchemaError(f"unknown family {name!r}; choose from {', '.join(FAMILIES)}")
    return FAMILIES[name][0](params)


def _expand(params: dict) -> list[dict]:
    """Cartesian product over list-valued parameters (``blocks`` is never expanded)."""
    keys = [k for k, v in params.items() if isinstance(v, list) and k != "blocks"]
    if not keys:
        return [dict(params)]
    out = []
    for combo in itertools.product(*(params[k] for k in keys)):
        out.append({**params, **dict(zip(keys, combo))})
    return out


# inputs ------------------------------------------------------------------------------

def _load_structure(path: str):
    obj = io.load(path)
    if isinstance(obj, tuple):
        raise SchemaError(f"{path}: expected a graph, hypergraph, homsum or support document")
    return obj


def _load_many(paths: list[str]) -> list:
    """Files, or directories holding an index manifest, in the given order."""
    out = []
    for p in paths:
        path = Path(p)
        if path.is_dir():
            manifest = json.loads((path / MANIFEST).read_text())
            out.extend(_load_structure(str(path / m["file"])) for m in manifest["members"])
        else:
            out.append(_load_structure(p))
    return out


def _as_homsum(obj) -> HomogeneousSum:
    if isinstance(obj, HomogeneousSum):
        return obj
    if isinstance(obj, Graph):
        return from_graph(obj)
    if isinstance(obj, Support):
        return obj.to_homsum()
    raise SchemaError("this command needs a graph, homsum or support")


def _as_spectral(obj) -> Graph | WeightedHypergraph:
    if isinstance(obj, (Graph, WeightedHypergraph)):
        return obj
    if isinstance(obj, Support):
        obj = obj.to_homsum()
    return homsum_to_hypergraph(obj)


# output ------------------------------------------------------------------------------

def _params(args: argparse.Namespace) -> dict:
    skip = {"func", "out", "format", "no_timestamp", "command"}
    return io.jsonable({k: v for k, v in vars(args).items() if k not in skip})


def _envelope(args, report: dict) -> dict:
    doc = {
        "tool": "chaosgraph",
        "version": __version__,
        "command": args.command,
        "params": _params(args),
    }
    if not args.no_timestamp:
        doc["timestamp"] = _dt.datetime.now(_dt.timezone.utc).isoformat()
    doc["report"] = io.jsonable(report)
    return doc


def _emit(args, report: dict, header: list[str], rows: list) -> None:
    if args.format == "csv":
        text = io.to_csv(header, rows)
    else:
        text = json.dumps(_envelope(args, report), indent=2) + "\n"
    _write(args.out, text)


def _write(out: str | None, text: str) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


# commands ----------------------------------------------------------------------------

def _family_params(args) -> dict:
    params = {k: getattr(args, k) for k in FAMILY_PARAMS if getattr(args, k, None) is not None}
    if params.get("blocks") is not None:
        params["blocks"] = json.loads(params["blocks"])
    if args.seed is not None:
        params["seed"] = args.seed
    return params


def cmd_build(args) -> None:
    if args.config:
        cfg = json.loads(Path(args.config).read_text())
        if not isinstance(cfg, dict) or "family" not in cfg:
            raise SchemaError("config must be an object with a 'family' field")
        family, params = cfg["family"], dict(cfg.get("params", {}))
        if "seed" in cfg:
            params.setdefault("seed", cfg["seed"])
    else:
        if not args.family:
            raise SchemaError("build needs --family or --config")
        family, params = args.family, _family_params(args)
    members = _expand(params)
    meta = {"tool": "chaosgraph", "version": __version__, "family": family}
    if len(members) == 1:
        obj = build_family(family, members[0])
        if args.format == "csv":
            _write(args.out, _object_csv(obj))
        else:
            _write(args.out, io.dumps(obj, meta={**meta, "params": io.jsonable(members[0])}))
        return
    if not args.out or args.out == "-":
        raise SchemaError("a family with parameter ranges needs --out DIRECTORY")
    root = Path(args.out)
    root.mkdir(parents=True, exist_ok=True)
    index = []
    for i, p in enumerate(members):
        name = f"member_{i:03d}.json"
        obj = build_family(family, p)
        (root / name).write_text(io.dumps(obj, meta={**meta, "params": io.jsonable(p)}))
        index.append({"file": name, "params": io.jsonable(p), "n_vertices": obj.n_vertices})
    (root / MANIFEST).write_text(json.dumps({**meta, "members": index}, indent=2) + "\n")


def _object_csv(obj) -> str:
    if isinstance(obj, Graph):
        return io.to_csv(["u", "v"], obj.edges.tolist())
    if isinstance(obj, WeightedHypergraph):
        r = obj.rank
        rows = [list(e) + [None] * (r - len(e)) + [w] for e, w in zip(obj.edges, obj.weights)]
        return io.to_csv([f"v{i}" for i in range(r)] + ["w"], rows)
    if isinstance(obj, HomogeneousSum):
        rows = [k + [q] for k, q in zip(obj.keys.tolist(), obj.coefs)]
        return io.to_csv([f"v{i}" for i in range(obj.d)] + ["q"], rows)
    return io.to_csv([f"v{i}" for i in range(obj.d)], obj.tuples.tolist())


def cmd_spectrum(args) -> None:
    obj = _as_spectral(_load_structure(args.input))
    if isinstance(obj, Graph):
        rep = normalized_laplacian_spectrum(obj) if args.matrix == "laplacian" else adjacency_spectrum(obj)
    else:
        rep = hyper_laplacian_spectrum(obj) if args.matrix == "laplacian" else hyper_adjacency_spectrum(obj)
    _emit(args, rep.to_dict(), ["index", "eigenvalue", "group_value", "multiplicity"], rep.rows())


def cmd_cheeger(args) -> None:
    obj = _as_spectral(_load_structure(args.input))
    if isinstance(obj, Graph):
        rep = cheeger_check(obj, args.k, args.mode, args.exact_limit)
    else:
        rep = hyper_cheeger_check(obj, args.k, args.mode, args.exact_limit)
    rows = [(r.k, r.mu_k, r.phi_k, r.exact, r.factor, r.ok) for r in rep.rows]
    _emit(args, rep.to_dict(), ["k", "mu_k", "phi_k", "exact", "factor", "ok"], rows)


def _named_partition(args, obj):
    name = args.named
    if name == "hypercube-boxes":
        n = obj.n_vertices.bit_length() - 1
        if 1 << n != obj.n_vertices:
            raise SchemaError("hypercube-boxes needs 2^n vertices")
        h = args.h if args.h is not None else int(math.floor(math.log2(n))) if n > 0 else 0
        return hypercube_boxes(n, h)
    if name == "rows":
        return row_boxes(obj)
    if name == "columns":
        return column_boxes(obj)
    if name == "blocks":
        if args.m is None:
            raise SchemaError("--named blocks needs --m (tiles per side)")
        return block_grid_boxes(obj, args.m)
    if name == "components":
        if not isinstance(obj, Graph):
            raise SchemaError("--named components needs a graph")
        return component_boxes(obj)
    if name == "random":
        if args.seed is None:
            raise SeedRequired("--named random needs --seed")
        if args.m is None:
            raise SchemaError("--named random needs --m (number of blocks)")
        return random_balanced_partition(obj.n_vertices, args.m, args.seed)
    raise SchemaError(f"unknown named reduction {name!r}")


def cmd_reduce(args) -> None:
    obj = _load_structure(args.input)
    if isinstance(obj, Support):
        obj = obj.to_homsum()
    vprime = None
    if args.partition:
        loaded = io.load(args.partition)
        if not isinstance(loaded, tuple):
            raise SchemaError(f"{args.partition}: expected a partition document")
        part, vprime = loaded
    elif args.named:
        part = _named_partition(args, obj)
    else:
        raise SchemaError("reduce needs --partition or --named")
    rep = evaluate_partition(obj, part)
    out = rep.to_dict()
    if vprime is not None:
        if not isinstance(obj, Graph):
            raise SchemaError("partial reductions need a graph")
        out["partial"] = partial_reduction_eval(obj, vprime, part).to_dict()
    rows = [(b.block, b.sigma2, b.vol, b.phi) for b in rep.per_block]
    _emit(args, out, ["block", "sigma2", "vol", "phi"], rows)


def cmd_clt(args) -> None:
    z = _as_homsum(_load_structure(args.input))
    if args.samples > 0 and args.seed is None:
        raise SeedRequired("Monte Carlo sampling needs --seed")
    seed = args.seed if args.seed is not None else 0
    rep = clt_report(z, args.samples, seed, args.dist)
    if args.samples_out:
        draws = sample(z, args.dist, args.samples, seed)
        if args.samples_out.endswith(".npy"):
            np.save(args.samples_out, draws)
        else:
            Path(args.samples_out).write_text(io.to_csv(["z"], ([x] for x in draws)))
    d = rep.to_dict()
    scalars = [(k, v) for k, v in d.items() if isinstance(v, (int, float, str)) or v is None]
    scalars += [(f"flag_{k}", v) for k, v in d["criteria_flags"].items()]
    _emit(args, d, ["field", "value"], scalars)


def cmd_combdim(args) -> None:
    family = _load_many(args.inputs)
    seed = args.seed if args.seed is not None else 0
    rep = combdim_family_report(family, args.alpha, args.mode, seed=seed, exact_limit=args.exact_limit)
    rows = [(r.n_vertices, r.size, r.density_ratio, r.rect_ratio, r.rect_exact) for r in rep.rows]
    _emit(args, rep.to_dict(), ["n_vertices", "size", "density_ratio", "rect_ratio", "rect_exact"], rows)


def cmd_certify(args) -> None:
    if args.family:
        if not args.sizes:
            raise SchemaError("--family needs --sizes")
        key = FAMILIES.get(args.family, (None, "n"))[1]
        base = _family_params(args)
        family = [build_family(args.family, {**base, key: s}) for s in args.sizes]
    elif args.inputs:
        family = _load_many(args.inputs)
    else:
        raise SchemaError("certify needs input files or --family with --sizes")
    family = [_as_spectral(f) for f in family]
    rep = spectral_certificate(family, args.k, args.threshold)
    rows = [
        (m.index, m.n_vertices, m.mu_k, m.largest_component_fraction, m.largest_component_mu2)
        for m in rep.members
    ]
    header = ["index", "n_vertices", "mu_k", "largest_component_fraction", "largest_component_mu2"]
    _emit(args, rep.to_dict(), header, rows)


# parser ------------------------------------------------------------------------------

def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--seed", type=int, help="seed for every randomized step")
    common.add_argument("--no-timestamp", action="store_true",
                        help="omit the timestamp so repeated runs are byte-identical")

    fam = argparse.ArgumentParser(add_help=False)
    fam.add_argument("--family", choices=sorted(FAMILIES))
    fam.add_argument("--n", type=int)
    fam.add_argument("--q", type=int)
    fam.add_argument("--m", type=int)
    fam.add_argument("--d", type=int)
    fam.add_argument("--b", type=int)
    fam.add_argument("--k-n", dest="k_n", type=int)
    fam.add_argument("--beta", type=float)
    fam.add_argument("--alpha", type=float)
    fam.add_argument("--layout", choices=("contiguous", "random"))
    fam.add_argument("--blocks", help="fractional partition as JSON, e.g. [[[1,2],[2,2]],...]")

    p = argparse.ArgumentParser(prog="chaosgraph", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"chaosgraph {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("build", parents=[common, fam], help="construct a family member or family")
    s.add_argument("--config", help="JSON {family, params, seed}; list-valued params expand to a family")
    s.set_defaults(func=cmd_build)

    s = sub.add_parser("spectrum", parents=[common], help="normalized Laplacian or adjacency spectrum")
    s.add_argument("input")
    s.add_argument("--matrix", choices=("laplacian", "adjacency"), default="laplacian")
    s.set_defaults(func=cmd_spectrum)

    s = sub.add_parser("cheeger", parents=[common], help="check mu_k against phi_k")
    s.add_argument("input")
    s.add_argument("--k", type=int, default=3, help="largest k to check")
    s.add_argument("--mode", choices=("auto", "exact", "heuristic"), default="auto")
    s.add_argument("--exact-limit", type=int)
    s.set_defaults(func=cmd_cheeger)

    s = sub.add_parser("reduce", parents=[common], help="variance captured by a box partition")
    s.add_argument("input")
    s.add_argument("--partition", help="partition JSON (with optional vprime)")
    s.add_argument("--named", choices=("hypercube-boxes", "rows", "columns", "blocks", "components", "random"))
    s.add_argument("--h", type=int, help="fixed coordinates for hypercube-boxes")
    s.add_argument("--m", type=int, help="tiles per side (blocks) or block count (random)")
    s.set_defaults(func=cmd_reduce)

    s = sub.add_parser("clt", parents=[common], help="fourth moment, contractions and Monte Carlo")
    s.add_argument("input")
    s.add_argument("--samples", type=int, default=0)
    s.add_argument("--dist", choices=DISTRIBUTIONS, default="gaussian")
    s.add_argument("--samples-out", help="write draws as CSV, or binary when the name ends in .npy")
    s.set_defaults(func=cmd_clt)

    s = sub.add_parser("combdim", parents=[common], help="combinatorial dimension diagnostics")
    s.add_argument("inputs", nargs="+", help="support files or family directories")
    s.add_argument("--alpha", type=float, help="dimension to test (default: fitted)")
    s.add_argument("--mode", choices=("auto", "exact", "heuristic"), default="auto")
    s.add_argument("--exact-limit", type=int)
    s.set_defaults(func=cmd_combdim)

    s = sub.add_parser("certify", parents=[common, fam], help="spectral irreducibility evidence")
    s.add_argument("inputs", nargs="*", help="member files or family directories")
    s.add_argument("--sizes", type=_int_list, help="member sizes for --family, e.g. 5,10,20")
    s.add_argument("--k", type=int, default=2)
    s.add_argument("--threshold", type=float, default=1e-3)
    s.set_defaults(func=cmd_certify)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except ChaosGraphError as exc:
        return _fail(exc.name, str(exc), exc.exit_code)
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        return _fail(type(exc).__name__, str(exc), ValidationError.exit_code)
    return 0


def _fail(name: str, message: str, code: int) -> int:
    sys.stderr.write(json.dumps({"error": name, "message": message, "exit_code": code}) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
