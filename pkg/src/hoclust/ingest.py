"""Turn delimited edge-list and event files into dense tensors.

Both ingesters are deterministic given the input bytes: entities are ranked
by activity with lexicographic tie-breaks, duplicate records collapse to a
single binary entry, and the returned id maps fix the axis order used in the
tensor.
"""

from __future__ import annotations

import numpy as np


class DataError(Exception):
    """Input data cannot be turned into a tensor."""


def _split_line(line: str) -> list:
    if "\t" in line:
        return [f.strip() for f in line.split("\t")]
    return [f.strip() for f in line.split(",")]


def _read_rows(path, n_fields: int, header: bool) -> list:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = fh.read()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    rows = []
    skip_next = header
    for lineno, line in enumerate(raw.splitlines(), start=1):
        if not line.strip():
            continue
        if skip_next:
            skip_next = False
            continue
        fields = _split_line(line)
        if len(fields) != n_fields:
            raise DataError(
                f"{path}:{lineno}: expected {n_fields} fields, got {len(fields)}"
            )
        if any(not f for f in fields):
            raise DataError(f"{path}:{lineno}: empty field")
        rows.append(fields)
    return rows


def _rank_ids(counts: dict, top: int) -> list:
    order = sorted(counts, key=lambda k: (-counts[k], k))
    return order[:top]


def ingest_edgelist(path, top_entities: int, top_layers: int | None = None, *, header: bool = False):
    """Build a binary (layer, source, target) tensor from an edge list.

    Rows are `layer,source,target` (comma or tab separated); duplicates
    collapse. The shared entity axis keeps the `top_entities` ids with the
    highest degree (each deduplicated edge adds one to both endpoints), then
    layers are ranked by how many edges survive the entity cut and the top
    `top_layers` of those with at least one edge are kept (all of them when
    `top_layers` is None). Ties break lexicographically; axis order follows
    the ranking.

    Returns (tensor, id_maps) with id_maps a list of {"axis": k, "ids": [...]}
    dictionaries; axes 1 and 2 share the same entity ids.
    """
    if top_entities < 1:
        raise DataError("top_entities must be at least 1")
    if top_layers is not None and top_layers < 1:
        raise DataError("top_layers must be at least 1")
    rows = _read_rows(path, 3, header)
    edges = sorted({(layer, src, dst) for layer, src, dst in rows})
    if not edges:
        raise DataError(f"{path}: no edges")
    degree: dict = {}
    for _, src, dst in edges:
        degree[src] = degree.get(src, 0) + 1
        degree[dst] = degree.get(dst, 0) + 1
    entities = _rank_ids(degree, top_entities)
    ent_index = {e: i for i, e in enumerate(entities)}
    retained = [e for e in edges if e[1] in ent_index and e[2] in ent_index]
    layer_count: dict = {}
    for layer, _, _ in retained:
        layer_count[layer] = layer_count.get(layer, 0) + 1
    layers = _rank_ids(layer_count, len(layer_count) if top_layers is None else top_layers)
    if not layers:
        raise DataError(f"{path}: no layer has an edge between retained entities")
    layer_index = {l: i for i, l in enumerate(layers)}
    tensor = np.zeros((len(layers), len(entities), len(entities)))
    for layer, src, dst in retained:
        if layer in layer_index:
            tensor[layer_index[layer], ent_index[src], ent_index[dst]] = 1.0
    id_maps = [
        {"axis": 0, "ids": list(layers)},
        {"axis": 1, "ids": list(entities)},
        {"axis": 2, "ids": list(entities)},
    ]
    return tensor, id_maps


def ingest_events(paths, top_a: int, top_b: int, buckets: int, *, header: bool = False):
    """Average per-group binary (a, b, bucket) tensors into one tensor.

    Each path holds one group's events as `a,b,bucket` rows with integer
    buckets in [0, buckets). Within a group duplicates collapse, so each
    group contributes a binary tensor; the result is their entrywise mean,
    with entries in [0, 1]. The `top_a` / `top_b` ids are ranked by how many
    deduplicated events across all groups touch them (ties lexicographic).

    Returns (tensor, id_maps); the bucket axis ids are "0".."buckets-1".
    """
    paths = list(paths)
    if not paths:
        raise DataError("no event files given")
    if top_a < 1 or top_b < 1:
        raise DataError("top_a and top_b must be at least 1")
    if buckets < 1:
        raise DataError("buckets must be at least 1")
    groups = []
    for path in paths:
        events = set()
        for lineno, (a, b, bucket_s) in enumerate(_read_rows(path, 3, header)):
            try:
                bucket = int(bucket_s)
            except ValueError as exc:
                raise DataError(f"{path}: bucket {bucket_s!r} is not an integer") from exc
            if not 0 <= bucket < buckets:
                raise DataError(
                    f"{path}: bucket {bucket} outside [0, {buckets})"
                )
            events.add((a, b, bucket))
        groups.append(events)
    count_a: dict = {}
    count_b: dict = {}
    for events in groups:
        for a, b, _ in events:
            count_a[a] = count_a.get(a, 0) + 1
            count_b[b] = count_b.get(b, 0) + 1
    if not count_a:
        raise DataError("no events in any group")
    ids_a = _rank_ids(count_a, top_a)
    ids_b = _rank_ids(count_b, top_b)
    index_a = {a: i for i, a in enumerate(ids_a)}
    index_b = {b: i for i, b in enumerate(ids_b)}
    tensor = np.zeros((len(ids_a), len(ids_b), buckets))
    for events in groups:
        for a, b, bucket in events:
            if a in index_a and b in index_b:
                tensor[index_a[a], index_b[b], bucket] += 1.0
    tensor /= len(groups)
    id_maps = [
        {"axis": 0, "ids": list(ids_a)},
        {"axis": 1, "ids": list(ids_b)},
        {"axis": 2, "ids": [str(i) for i in range(buckets)]},
    ]
    return tensor, id_maps
