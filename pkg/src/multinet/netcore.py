"""Weighted directed graphs stored as dense adjacency matrices.

A :class:`LayerGraph` is one network layer (node labels plus an ``n x n``
nonnegative, loop-free weight matrix); a :class:`MultiNet` is an ordered
stack of layers over one shared node sequence.  Everything here is
immutable: weight matrices are copied on construction and flagged
read-only.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components


class InputError(ValueError):
    """Malformed input file or inconsistent input data."""


def _frozen(a, dtype=float) -> np.ndarray:
    out = np.array(a, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class LayerGraph:
    """One network layer.

    ``weights[i, j]`` is the weight of the arc ``labels[i] -> labels[j]``.
    Undirected layers keep a symmetric matrix.  ``meta`` carries free-form
    provenance (e.g. how many raw rows a loader dropped).
    """

    labels: tuple[str, ...]
    weights: np.ndarray
    name: str = ""
    directed: bool = True
    meta: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        labels = tuple(str(x) for x in self.labels)
        w = _frozen(self.weights)
        n = len(labels)
        if w.shape != (n, n):
            raise ValueError(f"weights shape {w.shape} does not match {n} labels")
        if len(set(labels)) != n:
            raise ValueError("node labels must be unique")
        if not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite")
        if np.any(w < 0):
            raise ValueError("weights must be nonnegative")
        if np.any(np.diag(w) != 0):
            raise ValueError("layer graphs are loop-free: diagonal must be zero")
        if not self.directed and not np.array_equal(w, w.T):
            raise ValueError("undirected layer requires a symmetric weight matrix")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "meta", dict(self.meta))

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def num_edges(self) -> int:
        """Edge count ``m``; an undirected edge is counted once."""
        nz = int(np.count_nonzero(self.weights))
        return nz if self.directed else nz // 2

    def density(self) -> float:
        n = self.n
        if n < 2:
            return 0.0
        return np.count_nonzero(self.weights) / (n * (n - 1))

    def index(self, label: str) -> int:
        return self.labels.index(label)


@dataclass(frozen=True, eq=False)
class MultiNet:
    """Ordered stack of layers sharing one node sequence."""

    layers: tuple[LayerGraph, ...]

    def __post_init__(self):
        layers = tuple(self.layers)
        if not layers:
            raise ValueError("a MultiNet needs at least one layer")
        labels = layers[0].labels
        for g in layers[1:]:
            if g.labels != labels:
                raise ValueError(f"layer {g.name!r} has a different node sequence")
        object.__setattr__(self, "layers", layers)

    @property
    def labels(self) -> tuple[str, ...]:
        return self.layers[0].labels

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def num_layers(self) -> int:
        return len(self.layers)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(g.name for g in self.layers)


@dataclass(frozen=True)
class SccPartition:
    """Strongly connected components, largest first.

    Ties in size are ordered by the smallest node index they contain, so the
    partition is deterministic.
    """

    component_of: np.ndarray
    components: tuple[frozenset[int], ...]

    @property
    def largest(self) -> frozenset[int]:
        return self.components[0]

    def __len__(self):
        return len(self.components)


def degree(g: LayerGraph, node: int, mode: str = "total") -> int:
    """Number of incident edges of ``node``.

    ``mode`` is ``"in"`` (nonzero column entries), ``"out"`` (nonzero row
    entries) or ``"total"``.  For undirected layers ``total`` is the number
    of neighbours; for directed layers it is the number of distinct nodes
    linked in either direction.
    """
    if not 0 <= node < g.n:
        raise IndexError(f"node {node} out of range for {g.n} nodes")
    row = g.weights[node, :] != 0
    col = g.weights[:, node] != 0
    if mode == "out":
        return int(row.sum())
    if mode == "in":
        return int(col.sum())
    if mode == "total":
        return int((row | col).sum())
    raise ValueError(f"unknown degree mode {mode!r}")


def strongly_connected_components(g: LayerGraph) -> SccPartition:
    n = g.n
    if n == 0:
        return SccPartition(np.zeros(0, dtype=int), ())
    ncomp, lab = connected_components(
        csr_matrix(g.weights != 0), directed=True, connection="strong"
    )
    groups = [np.flatnonzero(lab == c) for c in range(ncomp)]
    groups.sort(key=lambda idx: (-len(idx), idx[0]))
    component_of = np.empty(n, dtype=int)
    for cid, idx in enumerate(groups):
        component_of[idx] = cid
    component_of.setflags(write=False)
    return SccPartition(component_of, tuple(frozenset(int(i) for i in idx) for idx in groups))


def _binary_stack(m: MultiNet) -> np.ndarray:
    return np.stack([g.weights != 0 for g in m.layers])


def intersection_network(m: MultiNet, name: str = "intersection") -> LayerGraph:
    """Binary layer with an edge wherever *every* layer has one."""
    if not m.layers:
        raise ValueError("empty layer list")
    a = np.logical_and.reduce(_binary_stack(m), axis=0).astype(float)
    directed = any(g.directed for g in m.layers)
    return LayerGraph(m.labels, a, name=name, directed=directed)


def union_network(m: MultiNet, name: str = "union") -> LayerGraph:
    """Binary layer with an edge wherever *any* layer has one."""
    if not m.layers:
        raise ValueError("empty layer list")
    a = (sum(g.weights for g in m.layers) != 0).astype(float)
    np.fill_diagonal(a, 0.0)
    directed = any(g.directed for g in m.layers)
    return LayerGraph(m.labels, a, name=name, directed=directed)


def restrict_layer(g: LayerGraph, keep: Sequence[int]) -> LayerGraph:
    idx = np.asarray(keep, dtype=int)
    return LayerGraph(
        tuple(g.labels[i] for i in idx),
        g.weights[np.ix_(idx, idx)],
        name=g.name,
        directed=g.directed,
        meta=g.meta,
    )


def restrict(m: MultiNet, keep: Iterable[int]) -> MultiNet:
    """Sub-multinet induced on ``keep``.

    Kept nodes retain their original relative order regardless of the order
    of ``keep``.
    """
    idx = sorted(set(int(i) for i in keep))
    if not idx:
        raise ValueError("restrict needs a nonempty node set")
    if idx[0] < 0 or idx[-1] >= m.n:
        raise IndexError("node index out of range")
    return MultiNet(tuple(restrict_layer(g, idx) for g in m.layers))


def align(layer: LayerGraph, labels: Sequence[str]) -> LayerGraph:
    """Re-express ``layer`` on ``labels``, zero-padding absent nodes.

    Every label of ``layer`` must appear in ``labels``.
    """
    labels = tuple(labels)
    pos = {lab: i for i, lab in enumerate(labels)}
    missing = [lab for lab in layer.labels if lab not in pos]
    if missing:
        raise ValueError(f"labels {missing[:5]} are not in the target node set")
    idx = np.array([pos[lab] for lab in layer.labels], dtype=int)
    w = np.zeros((len(labels), len(labels)))
    w[np.ix_(idx, idx)] = layer.weights
    return LayerGraph(labels, w, name=layer.name, directed=layer.directed, meta=layer.meta)


# ---------------------------------------------------------------------------
# Edge-list files
# ---------------------------------------------------------------------------


def read_roster(path) -> tuple[str, ...]:
    """Label roster: one label per line, blank lines ignored."""
    with open(path, encoding="utf-8") as fh:
        labels = tuple(line.strip() for line in fh if line.strip())
    if len(set(labels)) != len(labels):
        raise InputError(f"{path}: duplicate labels in roster")
    return labels


def read_csv_rows(path, expected: Sequence[str]) -> list[tuple[int, list[str]]]:
    """Rows of a headed CSV as ``(line_number, fields)``.

    The header must equal ``expected`` (whitespace and case ignored).
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise InputError(f"{path}: empty file") from None
        if [h.strip().lower() for h in header] != list(expected):
            raise InputError(
                f"{path}:1: expected header {','.join(expected)!r}, got {','.join(header)!r}"
            )
        rows = []
        for row in reader:
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(expected):
                raise InputError(
                    f"{path}:{reader.line_num}: expected {len(expected)} fields, got {len(row)}"
                )
            rows.append((reader.line_num, [c.strip() for c in row]))
    return rows


def _parse_float(path, line, text) -> float:
    try:
        x = float(text)
    except ValueError:
        raise InputError(f"{path}:{line}: cannot parse number {text!r}") from None
    if not np.isfinite(x):
        raise InputError(f"{path}:{line}: non-finite value {text!r}")
    return x


def _label_index(labels: list[str], pos: dict[str, int], lab: str, roster: bool, where: str) -> int:
    if lab not in pos:
        if roster:
            raise InputError(f"{where}: label {lab!r} is not in the roster")
        pos[lab] = len(labels)
        labels.append(lab)
    return pos[lab]


def read_edge_list(
    path,
    roster: Sequence[str] | None = None,
    directed: bool = True,
    name: str = "",
    value_column: str = "weight",
    self_loops: str = "error",
) -> LayerGraph:
    """Read a ``src,dst,weight`` edge list into a layer.

    Labels are indexed in first-appearance order unless ``roster`` fixes the
    node sequence.  Duplicate arcs are input errors; self-loops with nonzero
    weight are errors too unless ``self_loops="drop"``, in which case they
    are discarded and counted in ``meta["dropped_self_loops"]``.  With ``directed=False`` each row sets both ``(i, j)``
    and ``(j, i)``; a pair listed in both directions must carry equal
    weights.
    """
    rows = read_csv_rows(path, ("src", "dst", value_column))
    labels = list(roster) if roster is not None else []
    pos = {lab: i for i, lab in enumerate(labels)}
    if self_loops not in ("error", "drop"):
        raise ValueError(f"self_loops must be 'error' or 'drop', got {self_loops!r}")
    entries = {}
    dropped = []
    for line, (src, dst, val) in rows:
        where = f"{path}:{line}"
        if not src or not dst:
            raise InputError(f"{where}: empty node label")
        w = _parse_float(path, line, val)
        if w < 0:
            raise InputError(f"{where}: negative weight {w}")
        i = _label_index(labels, pos, src, roster is not None, where)
        j = _label_index(labels, pos, dst, roster is not None, where)
        if i == j:
            if w != 0 and self_loops == "error":
                raise InputError(f"{where}: self-loop {src}->{dst}")
            dropped.append((src, dst))
            continue
        key = (i, j) if directed else (min(i, j), max(i, j))
        if key in entries:
            if directed or entries[key] != w:
                kind = "duplicate arc" if directed else "non-symmetric or duplicate edge"
                raise InputError(f"{where}: {kind} {src}->{dst}")
        entries[key] = w
    n = len(labels)
    a = np.zeros((n, n))
    for (i, j), w in entries.items():
        a[i, j] = w
        if not directed:
            a[j, i] = w
    meta = {"source": str(path), "rows": len(rows), "dropped_self_loops": dropped}
    return LayerGraph(tuple(labels), a, name=name, directed=directed, meta=meta)
