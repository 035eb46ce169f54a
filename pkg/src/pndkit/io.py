"""File formats, dataset preparation and result serialisation.

Edge-list multiplexes are plain text lines ``layer_id src dst`` (comma- or
whitespace-separated, optional header, ``#`` comments). Node labels are
strings and map to dense indices in first-appearance order across the whole
file, so layer selection never renumbers nodes. CSV outputs use '.'
decimals and LF line endings; identical inputs and seed reproduce them
byte for byte.
"""

from __future__ import annotations

import csv
import json
import warnings
from math import floor
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    AlignmentError,
    OverlappingGroups,
    ParityWarning,
    ParseError,
    SizeMismatch,
    TargetTooLarge,
    UnknownLayer,
)
from .graph import Graph, union_graphs
from .lattice import Multiplex, PNDResult
from .pathstats import (
    LengthProfile,
    character_keys,
    edgewise_networks,
    mode_proportions,
    proportions_by_length,
)


# ----------------------------------------------------------------- loading

def _tokenize(line: str) -> list[str]:
    line = line.strip()
    if "," in line:
        return [t.strip() for t in line.split(",")]
    return line.split()


def _is_header(fields: list[str]) -> bool:
    return fields and fields[0].lower() in ("layer", "layer_id", "layerid")


def _is_number(token: str) -> bool:
    try:
        float(token)
    except ValueError:
        return False
    return True


def load_multiplex(path, layer_selection: Sequence[str] | None = None) -> Multiplex:
    """Read an edge-list multiplex, optionally keeping only some layers.

    The node universe is the union of every label in the file regardless
    of the selection. A numeric fourth field (a weight) is tolerated and
    ignored; anything else is a parse error naming the offending line.
    """
    path = Path(path)
    node_index: dict[str, int] = {}
    layer_edges: dict[str, set[tuple[int, int]]] = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            fields = _tokenize(raw)
            if not fields or raw.lstrip().startswith("#"):
                continue
            if lineno == 1 and _is_header(fields):
                continue
            if len(fields) == 4 and _is_number(fields[3]):
                fields = fields[:3]
            if len(fields) != 3:
                raise ParseError(
                    f"{path.name}:{lineno}: expected 'layer src dst', got "
                    f"{len(fields)} fields"
                )
            layer, src, dst = fields
            if src == dst:
                raise ParseError(f"{path.name}:{lineno}: self-loop at {src!r}")
            for label in (src, dst):
                if label not in node_index:
                    node_index[label] = len(node_index)
            edges = layer_edges.setdefault(layer, set())
            i, j = node_index[src], node_index[dst]
            edges.add((i, j) if i < j else (j, i))
    if not layer_edges:
        raise ParseError(f"{path.name}: no edges found")

    names = list(layer_edges)
    if layer_selection is not None:
        missing = [x for x in layer_selection if x not in layer_edges]
        if missing:
            raise UnknownLayer(
                f"layers {missing} not in file (has {names})"
            )
        names = list(layer_selection)
    n = len(node_index)
    layers = [Graph(n, sorted(layer_edges[name])) for name in names]
    return Multiplex(layers, layer_names=names, node_labels=tuple(node_index))


def save_multiplex(m: Multiplex, path) -> None:
    """Write ``layer src dst`` lines in canonical order (LF endings)."""
    labels = m.node_labels or tuple(str(i) for i in range(m.node_count))
    with open(path, "w", newline="\n") as fh:
        for name, g in zip(m.layer_names, m.layers):
            for i, j in g.edge_array:
                fh.write(f"{name} {labels[i]} {labels[j]}\n")


def merge_layers(m: Multiplex, groups: Sequence[Sequence[str]]) -> Multiplex:
    """Union each group of layers into one layer named by its members.

    Groups must not overlap; layers outside any group pass through. The
    merged layer sits at its first member's position.
    """
    name_to_idx = {name: k for k, name in enumerate(m.layer_names)}
    seen: set[str] = set()
    for group in groups:
        for name in group:
            if name not in name_to_idx:
                raise UnknownLayer(f"layer {name!r} not in {list(m.layer_names)}")
            if name in seen:
                raise OverlappingGroups(f"layer {name!r} appears in two groups")
            seen.add(name)

    grouped: dict[int, Sequence[str]] = {
        min(name_to_idx[name] for name in group): group for group in groups
    }
    new_layers = []
    new_names = []
    for k, name in enumerate(m.layer_names):
        if k in grouped:
            group = grouped[k]
            new_layers.append(union_graphs([m.layers[name_to_idx[g]] for g in group]))
            new_names.append("+".join(group))
        elif name not in seen:
            new_layers.append(m.layers[k])
            new_names.append(name)
    return Multiplex(new_layers, layer_names=new_names, node_labels=m.node_labels)


def load_weighted_matrix(path) -> np.ndarray:
    """Square, symmetric (1e-9), non-negative CSV matrix; diagonal zeroed."""
    path = Path(path)
    try:
        try:
            mat = np.loadtxt(path, delimiter=",", dtype=float, ndmin=2)
        except ValueError:
            mat = np.loadtxt(path, dtype=float, ndmin=2)
    except Exception as exc:
        raise ParseError(f"{path.name}: {exc}") from exc
    if mat.shape[0] != mat.shape[1]:
        raise ParseError(f"{path.name}: matrix is {mat.shape[0]}x{mat.shape[1]}")
    if not np.isfinite(mat).all():
        raise ParseError(f"{path.name}: non-finite entries")
    if (mat < 0).any():
        raise ParseError(f"{path.name}: negative weights")
    if np.abs(mat - mat.T).max() > 1e-9:
        raise ParseError(f"{path.name}: matrix is not symmetric")
    mat = (mat + mat.T) / 2.0
    np.fill_diagonal(mat, 0.0)
    return mat


def load_coordinates(path) -> dict[str, np.ndarray]:
    """Read ``node_label x y z`` lines into an ordered label -> xyz map."""
    path = Path(path)
    coords: dict[str, np.ndarray] = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            fields = _tokenize(raw)
            if not fields or raw.lstrip().startswith("#"):
                continue
            if lineno == 1 and not all(_is_number(t) for t in fields[1:]):
                continue
            if len(fields) != 4 or not all(_is_number(t) for t in fields[1:]):
                raise ParseError(
                    f"{path.name}:{lineno}: expected 'label x y z'"
                )
            if fields[0] in coords:
                raise ParseError(f"{path.name}:{lineno}: duplicate label {fields[0]!r}")
            coords[fields[0]] = np.array([float(t) for t in fields[1:]])
    if not coords:
        raise ParseError(f"{path.name}: no coordinates found")
    return coords


# ------------------------------------------------------------- preparation

def _coord_array(
    coords, n: int, node_labels: Sequence[str] | None
) -> np.ndarray:
    if isinstance(coords, dict):
        if node_labels is not None:
            missing = [x for x in node_labels if x not in coords]
            if missing:
                raise AlignmentError(f"no coordinates for nodes {missing[:5]}")
            arr = np.array([coords[x] for x in node_labels], dtype=float)
        else:
            arr = np.array(list(coords.values()), dtype=float)
    else:
        arr = np.asarray(coords, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != n:
        raise AlignmentError(
            f"matrix has {n} nodes but coordinates describe {arr.shape[0]}"
        )
    return arr


def split_by_distance(
    weighted: np.ndarray,
    coords,
    quantile: float = 0.5,
    node_labels: Sequence[str] | None = None,
) -> Multiplex:
    """Two-layer multiplex from one network, cut by edge length.

    Non-zero entries become binary edges, ranked by the Euclidean distance
    of their endpoints (ties broken by canonical edge order). The shortest
    ``quantile`` share goes to layer "short", the rest to layer "long";
    with an odd split the extra edge lands in "long" and a parity warning
    is raised.
    """
    weighted = np.asarray(weighted, dtype=float)
    n = weighted.shape[0]
    if not 0.0 <= quantile <= 1.0:
        raise ValueError(f"quantile must lie in [0, 1], got {quantile}")
    if node_labels is None and isinstance(coords, dict):
        node_labels = tuple(coords)
    xyz = _coord_array(coords, n, node_labels)
    iu, ju = np.triu_indices(n, k=1)
    nz = weighted[iu, ju] != 0
    ei, ej = iu[nz], ju[nz]
    dist = np.linalg.norm(xyz[ei] - xyz[ej], axis=1)
    # stable sort on distance keeps canonical (i, j) order among ties
    order = np.argsort(dist, kind="stable")
    m_edges = ei.size
    n_short = floor(quantile * m_edges)
    if (quantile * m_edges) != n_short:
        warnings.warn(
            f"{m_edges} edges do not split at {quantile} exactly; "
            f"layer 'long' keeps the remainder",
            ParityWarning,
        )
    short_idx = order[:n_short]
    long_idx = order[n_short:]
    short = Graph(n, np.column_stack([ei[short_idx], ej[short_idx]]))
    long = Graph(n, np.column_stack([ei[long_idx], ej[long_idx]]))
    return Multiplex(
        [short, long],
        layer_names=("short", "long"),
        node_labels=tuple(node_labels) if node_labels is not None else None,
    )


def density_match_threshold(weighted: np.ndarray, target_edge_count: int) -> Graph:
    """Keep the strongest entries as binary edges, exactly ``target`` many.

    Equal weights are resolved by canonical (i, j) order, so the result is
    deterministic.
    """
    weighted = np.asarray(weighted, dtype=float)
    n = weighted.shape[0]
    iu, ju = np.triu_indices(n, k=1)
    w = weighted[iu, ju]
    nz = np.flatnonzero(w != 0)
    if target_edge_count > nz.size:
        raise TargetTooLarge(
            f"asked for {target_edge_count} edges, matrix has {nz.size} non-zero"
        )
    if target_edge_count < 0:
        raise ValueError("target edge count must be non-negative")
    # descending weight; stable keeps canonical order among equal weights
    order = nz[np.argsort(-w[nz], kind="stable")][:target_edge_count]
    return Graph(n, np.column_stack([iu[order], ju[order]]))


def consensus_network(matrices: Sequence[np.ndarray]) -> np.ndarray:
    """Mean over the non-zero subjects, where a strict majority is non-zero."""
    mats = [np.asarray(m, dtype=float) for m in matrices]
    if not mats:
        raise SizeMismatch("no matrices given")
    shape = mats[0].shape
    for m in mats[1:]:
        if m.shape != shape:
            raise SizeMismatch(f"matrix shapes differ: {shape} vs {m.shape}")
    stack = np.stack(mats)
    nonzero = stack != 0
    count = nonzero.sum(axis=0)
    total = stack.sum(axis=0)
    out = np.zeros(shape)
    majority = count > len(mats) / 2
    out[majority] = total[majority] / count[majority]
    return out


# ------------------------------------------------------------ result bundle

def _csv_writer(fh):
    return csv.writer(fh, lineterminator="\n")


def write_pairs_csv(result: PNDResult, path) -> None:
    """Per-pair table: endpoints, joint length, character, one atom column
    per lattice element (element labels as headers)."""
    labels = result.node_labels or tuple(str(i) for i in range(result.node_count))
    elements = [e.label for e in result.lattice.elements]
    with open(path, "w", newline="\n") as fh:
        w = _csv_writer(fh)
        w.writerow(["src", "dst", "joint_length", "character", *elements])
        hop = result.joint_distances
        for k, (i, j) in enumerate(result.pairs):
            d = hop[i, j]
            length = "" if np.isinf(d) else str(int(d))
            w.writerow(
                [
                    labels[i],
                    labels[j],
                    length,
                    result.characters[k],
                    *(str(float(v)) for v in result.f_partial[:, k]),
                ]
            )


def write_length_profile_csv(profile: LengthProfile, path) -> None:
    keys = list(next(iter(profile.counts.values())).keys()) if profile.counts else []
    with open(path, "w", newline="\n") as fh:
        w = _csv_writer(fh)
        w.writerow(
            ["joint_length"]
            + [f"count_{k}" for k in keys]
            + [f"fraction_{k}" for k in keys]
        )
        for l, row in profile.counts.items():
            frac = profile.fractions[l]
            w.writerow(
                [str(l)]
                + [str(row[k]) for k in keys]
                + [str(float(frac[k])) for k in keys]
            )


def write_mode_matrix_csv(matrix: np.ndarray, path) -> None:
    with open(path, "w", newline="\n") as fh:
        for row in matrix:
            fh.write(",".join(str(float(v)) for v in row))
            fh.write("\n")


def write_sweep_csv(records, path) -> None:
    """Sweep table; coordinate columns depend on the sweep type."""
    records = list(records)
    if not records:
        raise ValueError("no sweep records to write")
    first = records[0]
    coord_cols = []
    if first.density_a is not None:
        coord_cols += ["density_a", "density_b"]
    if first.rewire_fraction is not None:
        coord_cols += ["rewire_fraction", "achieved_fraction"]
    keys = list(first.fractions.keys())
    has_swp = first.swp is not None
    with open(path, "w", newline="\n") as fh:
        w = _csv_writer(fh)
        w.writerow(
            coord_cols
            + ["replicates"]
            + [f"fraction_{k}" for k in keys]
            + (["swp"] if has_swp else [])
        )
        for rec in records:
            row = []
            if rec.density_a is not None:
                row += [str(float(rec.density_a)), str(float(rec.density_b))]
            if rec.rewire_fraction is not None:
                row += [
                    str(float(rec.rewire_fraction)),
                    str(float(rec.achieved_fraction)),
                ]
            row.append(str(rec.replicates))
            row += [str(float(rec.fractions[k])) for k in keys]
            if has_swp:
                row.append(str(float(rec.swp)))
            w.writerow(row)


def write_nulls_csv(nulls, path) -> None:
    with open(path, "w", newline="\n") as fh:
        w = _csv_writer(fh)
        keys = list(nulls[0].fractions.keys())
        w.writerow(["replicate"] + [f"fraction_{k}" for k in keys])
        for idx, props in enumerate(nulls):
            w.writerow([str(idx)] + [str(float(props.fractions[k])) for k in keys])


def write_result_bundle(result: PNDResult, out_dir, config: dict) -> dict:
    """Write summary.json, pairs.csv, length_profile.csv and mode matrices.

    Returns the summary dictionary that went into summary.json.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    props = mode_proportions(result)
    summary = {
        "config": config,
        "node_count": result.node_count,
        "layer_names": list(result.layer_names),
        "node_labels": list(result.node_labels) if result.node_labels else None,
        "averaged_atoms": {
            e.label: float(v)
            for e, v in zip(result.lattice.elements, result.averaged_atoms)
        },
        "joint_global_efficiency": float(result.averaged_atoms.sum()),
        "mode_counts": props.counts,
        "mode_fractions": props.fractions,
        "reachable_pairs": props.reachable_pairs,
        "disconnected_pairs": props.disconnected_pairs,
        "ambiguous_pairs": int(result.ambiguous.sum()),
    }
    if result.lattice.n_layers == 2:
        r, u1, u2, s = result.two_layer_averages()
        summary["two_layer"] = {"R": r, "U1": u1, "U2": u2, "S": s}
    with open(out / "summary.json", "w", newline="\n") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    write_pairs_csv(result, out / "pairs.csv")
    write_length_profile_csv(proportions_by_length(result), out / "length_profile.csv")
    nets = edgewise_networks(result)
    for key, matrix in nets.matrices.items():
        write_mode_matrix_csv(matrix, out / f"mode_{key}.csv")
    return summary
