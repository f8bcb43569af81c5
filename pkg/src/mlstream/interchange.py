"""Versioned JSON on-disk format for multilayer stream graphs.

Layout (all integers except node ids and labels):

    {"header": {"format_version": 1, "tick_resolution": r,
                "study_interval": [s, e]},
     "aspects": [{"name": ..., "layers": [...]}, ...],
     "nodes": [... ids, ints or strings ...],
     "layers": [["work"], ["home"], ...],
     "layer_presence": [[layer_index, [[s, e], ...]], ...],
     "node_layer_presence": [[node_index, layer_index, [[s, e], ...]], ...],
     "links": [[s, e, node_a, layer_a, node_b, layer_b], ...],
     "checksum": "sha256 hex of the canonical document minus this field"}

Every array is sorted and the JSON is emitted in canonical form
(sorted keys, no whitespace), so identical graphs produce identical
bytes. The reader re-derives the checksum and rebuilds the graph through
the strict builder, so a hand-edited document that breaks closure or
strays outside the study interval fails with a pointer to the offending
entry.
"""
from __future__ import annotations

import hashlib
import json
from typing import List, Union

from .errors import (ChecksumMismatch, FormatVersionMismatch, MlsError,
                     SchemaError)
from .model import (Aspect, BuildMode, GraphBuilder, MultilayerStreamGraph,
                    node_sort_key)

FORMAT_VERSION = 1

_PathLike = Union[str, "os.PathLike[str]"]  # noqa: F821 - doc only


def _canonical(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def _digest(doc: dict) -> str:
    return hashlib.sha256(_canonical(doc).encode("utf-8")).hexdigest()


def document_for(g: MultilayerStreamGraph) -> dict:
    """The interchange document for a graph, checksum included."""
    nodes = sorted(g.nodes, key=node_sort_key)
    node_index = {n: i for i, n in enumerate(nodes)}
    layers = list(g.layers)
    layer_index = {l: i for i, l in enumerate(layers)}
    doc = {
        "header": {
            "format_version": FORMAT_VERSION,
            "tick_resolution": g.resolution,
            "study_interval": [g.study_interval.start, g.study_interval.end],
        },
        "aspects": [{"name": a.name, "layers": list(a.elementary_layers)}
                    for a in g.aspects],
        "nodes": nodes,
        "layers": [list(l) for l in layers],
        "layer_presence": [
            [layer_index[l], [[s, e] for s, e in g.layer_presence[l]]]
            for l in layers],
        "node_layer_presence": sorted(
            [node_index[n], layer_index[l],
             [[s, e] for s, e in times]]
            for (n, l), times in g.node_layer_presence.items()),
        "links": sorted(
            [l.time.start, l.time.end,
             node_index[l.a[0]], layer_index[l.a[1]],
             node_index[l.b[0]], layer_index[l.b[1]]]
            for l in g.links),
    }
    doc["checksum"] = _digest(doc)
    return doc


def write_interchange(g: MultilayerStreamGraph, path: _PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fp:
        fp.write(_canonical(document_for(g)))
        fp.write("\n")


# --- reading -----------------------------------------------------------------


def _want(doc, key, kind, path):
    if not isinstance(doc, dict) or key not in doc:
        raise SchemaError(f"missing field {key!r}", path=path)
    value = doc[key]
    if not isinstance(value, kind):
        raise SchemaError(
            f"field {key!r} should be {kind.__name__}, "
            f"got {type(value).__name__}", path=f"{path}.{key}" if path
            else key)
    return value


def _int(value, path):
    if type(value) is not int:
        raise SchemaError(f"expected integer, got {value!r}", path=path)
    return value


def _intervals(value, path) -> List[tuple]:
    if not isinstance(value, list):
        raise SchemaError("expected interval array", path=path)
    out = []
    for k, pair in enumerate(value):
        here = f"{path}[{k}]"
        if not (isinstance(pair, list) and len(pair) == 2):
            raise SchemaError("interval must be [start, end]", path=here)
        s, e = _int(pair[0], here), _int(pair[1], here)
        if s > e:
            raise SchemaError(f"interval start {s} after end {e}", path=here)
        out.append((s, e))
    return out


def _index(value, limit, what, path):
    i = _int(value, path)
    if not 0 <= i < limit:
        raise SchemaError(f"{what} index {i} out of range", path=path)
    return i


def read_interchange(path: _PathLike) -> MultilayerStreamGraph:
    with open(path, "r", encoding="utf-8") as fp:
        raw = fp.read()
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise SchemaError("top level must be an object")

    header = _want(doc, "header", dict, "")
    version = _want(header, "format_version", int, "header")
    if version != FORMAT_VERSION:
        raise FormatVersionMismatch(
            f"format_version {version}, expected {FORMAT_VERSION}")

    stored = _want(doc, "checksum", str, "")
    body = {k: v for k, v in doc.items() if k != "checksum"}
    actual = _digest(body)
    if actual != stored:
        raise ChecksumMismatch(
            f"checksum {stored[:12]}… does not match content {actual[:12]}…")

    resolution = _want(header, "tick_resolution", int, "header")
    study = _intervals([_want(header, "study_interval", list, "header")],
                       "header.study_interval")[0]

    aspects = []
    for i, entry in enumerate(_want(doc, "aspects", list, "")):
        here = f"aspects[{i}]"
        name = _want(entry, "name", str, here)
        coords = _want(entry, "layers", list, here)
        if not all(isinstance(c, str) for c in coords):
            raise SchemaError("aspect layers must be strings", path=here)
        try:
            aspects.append(Aspect(name, tuple(coords)))
        except (ValueError, TypeError) as exc:
            raise SchemaError(str(exc), path=here) from exc

    nodes = _want(doc, "nodes", list, "")
    for i, n in enumerate(nodes):
        if not isinstance(n, (int, str)) or isinstance(n, bool):
            raise SchemaError(f"node id must be int or string, got {n!r}",
                              path=f"nodes[{i}]")
    if len(set(nodes)) != len(nodes):
        raise SchemaError("duplicate node ids", path="nodes")

    layers = []
    for i, coords in enumerate(_want(doc, "layers", list, "")):
        here = f"layers[{i}]"
        if not (isinstance(coords, list)
                and all(isinstance(c, str) for c in coords)):
            raise SchemaError("layer must be an array of strings", path=here)
        layers.append(tuple(coords))

    try:
        builder = GraphBuilder(study, aspects, mode=BuildMode.STRICT,
                               resolution=resolution)
    except (MlsError, ValueError) as exc:
        raise SchemaError(str(exc), path="aspects") from exc
    for node in nodes:
        builder.add_node(node)

    for i, entry in enumerate(_want(doc, "layer_presence", list, "")):
        here = f"layer_presence[{i}]"
        if not (isinstance(entry, list) and len(entry) == 2):
            raise SchemaError("expected [layer_index, intervals]", path=here)
        li = _index(entry[0], len(layers), "layer", here)
        ivs = _intervals(entry[1], here)
        try:
            builder.declare_layer_presence(layers[li], ivs)
        except MlsError as exc:
            raise SchemaError(str(exc), path=here) from exc

    for i, entry in enumerate(_want(doc, "node_layer_presence", list, "")):
        here = f"node_layer_presence[{i}]"
        if not (isinstance(entry, list) and len(entry) == 3):
            raise SchemaError("expected [node_index, layer_index, intervals]",
                              path=here)
        ni = _index(entry[0], len(nodes), "node", here)
        li = _index(entry[1], len(layers), "layer", here)
        ivs = _intervals(entry[2], here)
        try:
            builder.declare_node_layer((nodes[ni], layers[li]), ivs)
        except MlsError as exc:
            raise SchemaError(str(exc), path=here) from exc

    for i, entry in enumerate(_want(doc, "links", list, "")):
        here = f"links[{i}]"
        if not (isinstance(entry, list) and len(entry) == 6):
            raise SchemaError(
                "expected [start, end, node_a, layer_a, node_b, layer_b]",
                path=here)
        s, e = _int(entry[0], here), _int(entry[1], here)
        na = _index(entry[2], len(nodes), "node", here)
        la = _index(entry[3], len(layers), "layer", here)
        nb = _index(entry[4], len(nodes), "node", here)
        lb = _index(entry[5], len(layers), "layer", here)
        try:
            builder.add_link((s, e), (nodes[na], layers[la]),
                             (nodes[nb], layers[lb]))
        except (MlsError, ValueError) as exc:
            raise SchemaError(str(exc), path=here) from exc

    try:
        return builder.finish()
    except MlsError as exc:
        raise SchemaError(f"graph fails validation: {exc}") from exc
