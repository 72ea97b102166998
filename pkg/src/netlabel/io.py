"""Text formats for edges, attributes and labelsets; CSV/JSON report writers.

Edges: one ``u<TAB>v`` per line. Symmetric (undirected) edge-sets list each
pair once with ``u < v``; directed ones list every arc.
Attributes: ``u<TAB>dim<TAB>count`` triples.
Labels: one file per labelset, ``u<TAB>0|1`` for every node.
Header lines start with ``#`` and carry ``key: value`` metadata.
"""
from __future__ import annotations

import csv
import hashlib
import json
import math
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .errors import InputError, ParseError
from .graph import PROVENANCES, AttributedGraph, EdgeSet, LabelSet

SCHEMA_VERSION = 1
EDGES_MAGIC = "netlabel-edges"
ATTRIBUTES_MAGIC = "netlabel-attributes"
LABELS_MAGIC = "netlabel-labels"
NULL = "null"


def _open_write(path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    return open(path, "w", encoding="utf-8", newline="\n")


def _read_table(path, magic, ncols):
    """Yield ``(header dict, [(lineno, fields)])`` from a headed TSV file."""
    header, rows = {}, []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n").rstrip("\r")
            if not line.strip():
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if lineno == 1:
                    parts = body.split()
                    if len(parts) != 2 or parts[0] != magic:
                        raise ParseError(f"expected header '# {magic} {SCHEMA_VERSION}'", path, lineno)
                    if parts[1] != str(SCHEMA_VERSION):
                        raise ParseError(f"unsupported schema version {parts[1]}", path, lineno)
                    header["schema"] = int(parts[1])
                elif ":" in body:
                    key, value = body.split(":", 1)
                    header[key.strip()] = value.strip()
                continue
            if "schema" not in header:
                raise ParseError(f"missing '# {magic}' header", path, lineno)
            fields = line.split("\t")
            if len(fields) != ncols:
                raise ParseError(f"expected {ncols} tab-separated fields, got {len(fields)}", path, lineno)
            rows.append((lineno, fields))
    if "schema" not in header:
        raise ParseError(f"missing '# {magic}' header", path, None)
    return header, rows


def _int(text, path, lineno, what):
    try:
        return int(text)
    except ValueError:
        raise ParseError(f"{what} {text!r} is not an integer", path, lineno) from None


def _header_int(header, key, path):
    if key not in header:
        raise ParseError(f"missing header field {key!r}", path)
    return _int(header[key], path, None, key)


# ---------------------------------------------------------------------------
# edges


def write_edges(e: EdgeSet, path):
    with _open_write(path) as fh:
        fh.write(f"# {EDGES_MAGIC} {SCHEMA_VERSION}\n")
        fh.write(f"# provenance: {e.provenance}\n")
        fh.write(f"# num_nodes: {e.num_nodes}\n")
        fh.write(f"# directed: {0 if e.symmetric else 1}\n")
        if e.symmetric:
            src, dst = e.arcs()
            keep = src < dst
            src, dst = src[keep], dst[keep]
        else:
            src, dst = e.arcs()
        fh.writelines(f"{u}\t{v}\n" for u, v in zip(src.tolist(), dst.tolist()))


def read_edges(path, num_nodes: int | None = None) -> EdgeSet:
    header, rows = _read_table(path, EDGES_MAGIC, 2)
    n = _header_int(header, "num_nodes", path) if "num_nodes" in header else num_nodes
    if n is None:
        raise ParseError("missing header field 'num_nodes'", path)
    provenance = header.get("provenance", "observed")
    if provenance not in PROVENANCES:
        raise ParseError(f"unknown provenance {provenance!r}", path)
    directed = header.get("directed", "0") == "1"
    seen = set()
    src, dst = [], []
    for lineno, (a, b) in rows:
        u, v = _int(a, path, lineno, "node id"), _int(b, path, lineno, "node id")
        if not (0 <= u < n and 0 <= v < n):
            raise ParseError(f"node id out of range [0, {n})", path, lineno)
        if u == v:
            raise ParseError(f"self-loop on node {u}", path, lineno)
        key = (u, v) if directed else (min(u, v), max(u, v))
        if key in seen:
            raise ParseError(f"duplicate edge {u}\t{v}", path, lineno)
        seen.add(key)
        src.append(u)
        dst.append(v)
    if directed:
        return EdgeSet.from_arcs(n, src, dst, provenance)
    pairs = np.column_stack([np.array(src, dtype=np.int64), np.array(dst, dtype=np.int64)])
    return EdgeSet.from_pairs(n, pairs, provenance)


# ---------------------------------------------------------------------------
# attributes


def write_attributes(A: sp.csr_matrix, path):
    A = sp.csr_matrix(A)
    A.sort_indices()
    with _open_write(path) as fh:
        fh.write(f"# {ATTRIBUTES_MAGIC} {SCHEMA_VERSION}\n")
        fh.write(f"# num_nodes: {A.shape[0]}\n")
        fh.write(f"# num_dimensions: {A.shape[1]}\n")
        rows = np.repeat(np.arange(A.shape[0]), np.diff(A.indptr))
        for u, d, c in zip(rows.tolist(), A.indices.tolist(), A.data.tolist()):
            if c:
                fh.write(f"{u}\t{d}\t{c}\n")


def read_attributes(path) -> sp.csr_matrix:
    header, rows = _read_table(path, ATTRIBUTES_MAGIC, 3)
    n = _header_int(header, "num_nodes", path)
    d = _header_int(header, "num_dimensions", path)
    us, ds, cs = [], [], []
    seen = set()
    for lineno, (a, b, c) in rows:
        u = _int(a, path, lineno, "node id")
        k = _int(b, path, lineno, "dimension")
        count = _int(c, path, lineno, "count")
        if not 0 <= u < n:
            raise ParseError(f"node id out of range [0, {n})", path, lineno)
        if not 0 <= k < d:
            raise ParseError(f"dimension out of range [0, {d})", path, lineno)
        if count < 0:
            raise ParseError("counts must be non-negative", path, lineno)
        if (u, k) in seen:
            raise ParseError(f"duplicate entry for node {u}, dimension {k}", path, lineno)
        seen.add((u, k))
        if count:
            us.append(u)
            ds.append(k)
            cs.append(count)
    A = sp.csr_matrix((np.array(cs, dtype=np.int64), (np.array(us, dtype=np.int64),
                                                      np.array(ds, dtype=np.int64))), shape=(n, d))
    A.sort_indices()
    return A


# ---------------------------------------------------------------------------
# labels


def _label_path(directory, name):
    if not name or "/" in name or "\\" in name or name.startswith("."):
        raise InputError(f"labelset name {name!r} cannot be used as a file name")
    return Path(directory) / f"{name}.tsv"


def write_labelset(L: LabelSet, directory):
    with _open_write(_label_path(directory, L.name)) as fh:
        fh.write(f"# {LABELS_MAGIC} {SCHEMA_VERSION}\n")
        fh.write(f"# name: {L.name}\n")
        fh.write(f"# prevalence: {L.prevalence!r}\n")
        fh.writelines(f"{u}\t{v}\n" for u, v in enumerate(L.labels.tolist()))


def read_labelset(path, num_nodes: int | None = None) -> LabelSet:
    header, rows = _read_table(path, LABELS_MAGIC, 2)
    name = header.get("name", Path(path).stem)
    n = num_nodes if num_nodes is not None else len(rows)
    labels = np.full(n, -1, dtype=np.int64)
    for lineno, (a, b) in rows:
        u = _int(a, path, lineno, "node id")
        v = _int(b, path, lineno, "label")
        if not 0 <= u < n:
            raise ParseError(f"node id out of range [0, {n})", path, lineno)
        if v not in (0, 1):
            raise ParseError(f"label must be 0 or 1, got {v}", path, lineno)
        if labels[u] >= 0:
            raise ParseError(f"duplicate label for node {u}", path, lineno)
        labels[u] = v
    if np.any(labels < 0):
        raise ParseError(f"labelset {name!r} misses node {int(np.flatnonzero(labels < 0)[0])}", path)
    stored = header.get("prevalence")
    try:
        return LabelSet(name, labels, float(stored) if stored is not None else None)
    except InputError as exc:
        raise ParseError(str(exc), path) from None


def read_labels_dir(directory, num_nodes: int | None = None) -> dict:
    out = {}
    for path in sorted(Path(directory).glob("*.tsv")):
        L = read_labelset(path, num_nodes)
        out[L.name] = L
    return out


# ---------------------------------------------------------------------------
# graph bundles


def write_graph(G: AttributedGraph, directory):
    directory = Path(directory)
    write_edges(G.edges, directory / "edges.tsv")
    write_attributes(G.attributes, directory / "attributes.tsv")
    for L in G.labelsets.values():
        write_labelset(L, directory / "labels")


def parse_graph(edges, attributes, labels=None) -> AttributedGraph:
    """Load a graph from an edge file, an attribute file and a labels directory."""
    A = read_attributes(attributes)
    e = read_edges(edges, A.shape[0])
    if e.num_nodes != A.shape[0]:
        raise ParseError(f"edge file has {e.num_nodes} nodes, attributes have {A.shape[0]}", edges)
    labelsets = read_labels_dir(labels, A.shape[0]) if labels is not None else {}
    return AttributedGraph(A.shape[0], e, A, labelsets)


def read_graph(directory) -> AttributedGraph:
    directory = Path(directory)
    labels = directory / "labels"
    return parse_graph(directory / "edges.tsv", directory / "attributes.tsv",
                       labels if labels.is_dir() else None)


# ---------------------------------------------------------------------------
# reports


def format_value(value) -> str:
    if value is None:
        return NULL
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return NULL
        return repr(value)
    if isinstance(value, np.integer):
        return str(int(value))
    return str(value)


def write_csv(path, header, rows):
    with _open_write(path) as fh:
        writer = csv.writer(fh, delimiter=",", lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_value(v) for v in row])


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), default=_json_default)


def _json_default(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def config_hash(config) -> str:
    return hashlib.sha256(canonical_json(config).encode("utf-8")).hexdigest()


def file_hash(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_report(report: dict, path, config=None, seed=None):
    """JSON report with schema version, config hash and seed."""
    body = {"schema_version": SCHEMA_VERSION, "seed": seed,
            "config_hash": config_hash(config) if config is not None else None}
    body.update(report)
    with _open_write(path) as fh:
        json.dump(body, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")
    return body
