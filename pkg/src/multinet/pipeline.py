"""From raw governance files to an analysis-ready layer stack.

Three layer builders and an assembler:

* :func:`load_shareholding` - directed ownership fractions, small stakes dropped.
* :func:`load_board` - undirected shared-director counts.
* :func:`correlation_layer` - binary undirected layer of strongly
  co-moving price returns.
* :func:`assemble` - label alignment, union-SCC restriction, per-layer
  Frobenius normalization and stacking into a :class:`~multinet.tensor.Tensor3`.

Threshold semantics: a stake is kept when ``weight >= sh_threshold``; a
correlation edge needs ``rho > corr_threshold`` (strict).
"""
from __future__ import annotations

import csv
import datetime as dt
import json
import logging
from dataclasses import asdict, dataclass, field
from itertools import combinations
from pathlib import Path
from typing import Sequence

import numpy as np

from .netcore import (
    InputError,
    LayerGraph,
    MultiNet,
    _label_index,
    _parse_float,
    align,
    read_csv_rows,
    restrict,
    strongly_connected_components,
    union_network,
)
from .tensor import Tensor3, from_multinet

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class PipelineConfig:
    sh_threshold: float = 0.02
    corr_threshold: float = 0.65
    normalize_layers: bool = True
    zero_diagonal: bool = True
    restrict_to_union_scc: bool = True
    return_kind: str = "simple"
    rank: int = 30
    tol: float = 1e-10
    max_iter: int = 1000
    restarts: int = 1
    seed: int = 0

    def __post_init__(self):
        if not 0 <= self.sh_threshold < 1:
            raise ValueError(f"sh_threshold must be in [0, 1), got {self.sh_threshold}")
        if not -1 < self.corr_threshold < 1:
            raise ValueError(f"corr_threshold must be in (-1, 1), got {self.corr_threshold}")
        if self.return_kind not in ("simple", "log"):
            raise ValueError(f"return_kind must be 'simple' or 'log', got {self.return_kind!r}")
        if self.rank < 1 or self.restarts < 1 or self.max_iter < 1:
            raise ValueError("rank, restarts and max_iter must be positive")

    def to_dict(self) -> dict:
        return asdict(self)


# ---------------------------------------------------------------------------
# Shareholding
# ---------------------------------------------------------------------------


def load_shareholding(path, cfg: PipelineConfig | None = None, roster: Sequence[str] | None = None) -> LayerGraph:
    """Directed ownership layer from a ``src,dst,weight`` file.

    ``weight`` is the fraction of ``dst`` held by ``src``.  Stakes below
    ``cfg.sh_threshold`` are dropped, as are self-holdings (rejected instead
    when ``cfg.zero_diagonal`` is false).  Every company named in the file
    becomes a node even if all its stakes are dropped.
    """
    cfg = cfg or PipelineConfig()
    rows = read_csv_rows(path, ("src", "dst", "weight"))
    labels = list(roster) if roster is not None else []
    pos = {lab: i for i, lab in enumerate(labels)}
    entries: dict[tuple[int, int], float] = {}
    seen = set()
    dropped_threshold = []
    dropped_self = []
    for line, (src, dst, val) in rows:
        where = f"{path}:{line}"
        if not src or not dst:
            raise InputError(f"{where}: empty company label")
        w = _parse_float(path, line, val)
        if not 0 <= w <= 1:
            raise InputError(f"{where}: holding fraction {w} outside [0, 1]")
        i = _label_index(labels, pos, src, roster is not None, where)
        j = _label_index(labels, pos, dst, roster is not None, where)
        if (i, j) in seen:
            raise InputError(f"{where}: duplicate holding {src}->{dst}")
        seen.add((i, j))
        if i == j:
            if not cfg.zero_diagonal:
                raise InputError(f"{where}: self-holding {src}->{dst} with zero_diagonal disabled")
            dropped_self.append((src, dst))
            continue
        if w < cfg.sh_threshold:
            dropped_threshold.append((src, dst))
            continue
        if w > 0:
            entries[(i, j)] = w
    n = len(labels)
    a = np.zeros((n, n))
    for (i, j), w in entries.items():
        a[i, j] = w
    meta = {
        "source": str(path),
        "rows": len(rows),
        "dropped_below_threshold": dropped_threshold,
        "dropped_self_loops": dropped_self,
    }
    return LayerGraph(tuple(labels), a, name="SH", directed=True, meta=meta)


# ---------------------------------------------------------------------------
# Board interlocks
# ---------------------------------------------------------------------------


def _board_format(path) -> tuple[str, ...]:
    with open(path, newline="", encoding="utf-8") as fh:
        header = next(csv.reader(fh), None)
    if header is None:
        raise InputError(f"{path}: empty file")
    header = tuple(h.strip().lower() for h in header)
    if header in (("company", "director"), ("src", "dst", "count")):
        return header
    raise InputError(f"{path}:1: expected header 'company,director' or 'src,dst,count', got {','.join(header)!r}")


def board_from_memberships(memberships: dict[str, set[str]], labels: Sequence[str]) -> np.ndarray:
    """Shared-director counts between every pair of companies."""
    n = len(labels)
    a = np.zeros((n, n))
    for i, j in combinations(range(n), 2):
        c = len(memberships.get(labels[i], set()) & memberships.get(labels[j], set()))
        a[i, j] = a[j, i] = c
    return a


def load_board(path, roster: Sequence[str] | None = None) -> LayerGraph:
    """Undirected board-interlock layer.

    Accepts either a ``company,director`` membership list, in which case the
    weight of ``(i, j)`` is the number of directors sitting on both boards,
    or a precomputed ``src,dst,count`` edge list.
    """
    header = _board_format(path)
    labels = list(roster) if roster is not None else []
    pos = {lab: i for i, lab in enumerate(labels)}
    rows = read_csv_rows(path, header)
    if header == ("company", "director"):
        members: dict[str, set[str]] = {}
        for line, (company, director) in rows:
            where = f"{path}:{line}"
            if not company or not director:
                raise InputError(f"{where}: empty company or director")
            _label_index(labels, pos, company, roster is not None, where)
            members.setdefault(company, set()).add(director)
        a = board_from_memberships(members, labels)
        meta = {"source": str(path), "rows": len(rows), "format": "membership", "directors": len(set().union(*members.values())) if members else 0}
        return LayerGraph(tuple(labels), a, name="BD", directed=False, meta=meta)

    entries: dict[tuple[int, int], float] = {}
    for line, (src, dst, val) in rows:
        where = f"{path}:{line}"
        c = _parse_float(path, line, val)
        if c < 0:
            raise InputError(f"{where}: negative director count {c}")
        if c != int(c):
            raise InputError(f"{where}: director count {val!r} is not an integer")
        i = _label_index(labels, pos, src, roster is not None, where)
        j = _label_index(labels, pos, dst, roster is not None, where)
        if i == j:
            continue
        key = (min(i, j), max(i, j))
        if key in entries and entries[key] != c:
            raise InputError(f"{where}: conflicting counts for {src},{dst}")
        entries[key] = c
    n = len(labels)
    a = np.zeros((n, n))
    for (i, j), c in entries.items():
        a[i, j] = a[j, i] = c
    return LayerGraph(tuple(labels), a, name="BD", directed=False, meta={"source": str(path), "rows": len(rows), "format": "edges"})


# ---------------------------------------------------------------------------
# Prices and correlations
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PriceTable:
    """Daily closes, ``closes[t, c]`` for date ``t`` and ticker ``c``; NaN = missing."""

    tickers: tuple[str, ...]
    dates: tuple[dt.date, ...]
    closes: np.ndarray

    def __post_init__(self):
        closes = np.array(self.closes, dtype=float)
        if closes.shape != (len(self.dates), len(self.tickers)):
            raise ValueError("closes must be dates x tickers")
        if any(b <= a for a, b in zip(self.dates, self.dates[1:])):
            raise ValueError("dates must be strictly increasing")
        obs = closes[~np.isnan(closes)]
        if np.any(obs <= 0) or not np.all(np.isfinite(obs)):
            raise ValueError("prices must be positive and finite")
        closes.setflags(write=False)
        object.__setattr__(self, "closes", closes)
        object.__setattr__(self, "tickers", tuple(self.tickers))
        object.__setattr__(self, "dates", tuple(self.dates))

    def returns(self, kind: str = "simple") -> np.ndarray:
        """Returns between consecutive dates; NaN where either close is missing."""
        p0, p1 = self.closes[:-1], self.closes[1:]
        if kind == "simple":
            return p1 / p0 - 1.0
        if kind == "log":
            return np.log(p1 / p0)
        raise ValueError(f"unknown return kind {kind!r}")


def read_prices(path) -> PriceTable:
    """Wide price CSV: ``date,<ticker>,...`` with ISO dates; empty cell = missing."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[0].strip().lower() != "date" or len(header) < 2:
            raise InputError(f"{path}:1: expected header 'date,<ticker>,...'")
        tickers = [h.strip() for h in header[1:]]
        if len(set(tickers)) != len(tickers):
            raise InputError(f"{path}:1: duplicate ticker columns")
        dates, rows = [], []
        for row in reader:
            if not row or all(not c.strip() for c in row):
                continue
            line = reader.line_num
            if len(row) != len(header):
                raise InputError(f"{path}:{line}: expected {len(header)} fields, got {len(row)}")
            try:
                dates.append(dt.date.fromisoformat(row[0].strip()))
            except ValueError:
                raise InputError(f"{path}:{line}: bad ISO date {row[0]!r}") from None
            vals = []
            for cell in row[1:]:
                cell = cell.strip()
                if not cell:
                    vals.append(np.nan)
                    continue
                x = _parse_float(path, line, cell)
                if x <= 0:
                    raise InputError(f"{path}:{line}: non-positive price {cell}")
                vals.append(x)
            rows.append(vals)
    if len(dates) < 2:
        raise InputError(f"{path}: need at least two dates")
    if any(b <= a for a, b in zip(dates, dates[1:])):
        raise InputError(f"{path}: dates must be strictly increasing")
    return PriceTable(tuple(tickers), tuple(dates), np.array(rows, dtype=float))


def pairwise_correlation(returns: np.ndarray, min_obs: int = 2) -> tuple[np.ndarray, np.ndarray]:
    """Pearson correlation over pairwise-complete rows.

    Returns ``(rho, nobs)``; ``rho`` is NaN where fewer than ``min_obs``
    common observations exist or either series is constant over them.
    """
    r = np.asarray(returns, dtype=float)
    n = r.shape[1]
    rho = np.full((n, n), np.nan)
    nobs = np.zeros((n, n), dtype=int)
    ok = ~np.isnan(r)
    for i in range(n):
        for j in range(i, n):
            mask = ok[:, i] & ok[:, j]
            k = int(mask.sum())
            nobs[i, j] = nobs[j, i] = k
            if k < min_obs:
                continue
            x = r[mask, i] - r[mask, i].mean()
            y = r[mask, j] - r[mask, j].mean()
            den = np.sqrt((x @ x) * (y @ y))
            if den > 0:
                rho[i, j] = rho[j, i] = (x @ y) / den
    return rho, nobs


def correlation_layer(p: PriceTable, cfg: PipelineConfig | None = None, name: str = "CORR") -> LayerGraph:
    """Binary undirected layer: edge iff return correlation ``> cfg.corr_threshold``."""
    cfg = cfg or PipelineConfig()
    if len(p.dates) < 2:
        raise ValueError("need at least two dates")
    rho, nobs = pairwise_correlation(p.returns(cfg.return_kind))
    n = len(p.tickers)
    undefined = []
    for i, j in combinations(range(n), 2):
        if np.isnan(rho[i, j]):
            undefined.append((p.tickers[i], p.tickers[j]))
            log.info("no correlation for %s/%s (%d common returns)", p.tickers[i], p.tickers[j], nobs[i, j])
    a = np.where(np.nan_to_num(rho, nan=-np.inf) > cfg.corr_threshold, 1.0, 0.0)
    np.fill_diagonal(a, 0.0)
    iu = np.triu_indices(n, 1)
    below = [(p.tickers[i], p.tickers[j]) for i, j in zip(*iu) if not np.isnan(rho[i, j]) and a[i, j] == 0]
    meta = {"undefined_pairs": undefined, "dropped_below_threshold": below, "return_kind": cfg.return_kind}
    return LayerGraph(p.tickers, a, name=name, directed=False, meta=meta)


# ---------------------------------------------------------------------------
# Assembly
# ---------------------------------------------------------------------------


@dataclass
class AssembleReport:
    nodes_before: int
    nodes_after: int
    labels: list[str]
    removed: list[str]
    layers: list[dict] = field(default_factory=list)
    union_scc_sizes: list[int] = field(default_factory=list)
    config: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, default=str)


def union_labels(layers: Sequence[LayerGraph], roster: Sequence[str] | None = None) -> tuple[str, ...]:
    if roster is not None:
        return tuple(roster)
    seen: dict[str, None] = {}
    for g in layers:
        for lab in g.labels:
            seen.setdefault(lab, None)
    return tuple(seen)


def _drop_stats(g: LayerGraph) -> dict:
    return {k: len(v) for k, v in g.meta.items() if k.startswith("dropped") and isinstance(v, list)}


def assemble(
    layers: Sequence[LayerGraph] | MultiNet,
    cfg: PipelineConfig | None = None,
    roster: Sequence[str] | None = None,
) -> tuple[MultiNet, Tensor3, AssembleReport]:
    """Align, restrict, normalize and stack layers.

    Steps, in order: union of labels (first appearance, or ``roster``)
    with zero-padding; restriction to the largest strongly connected
    component of the union network; division of each nonzero layer by its
    Frobenius norm.  Restriction precedes normalization.  The diagonal is
    already zero by the layer invariant, so ``zero_diagonal`` acts in the
    loaders.
    """
    cfg = cfg or PipelineConfig()
    layers = list(layers.layers) if isinstance(layers, MultiNet) else list(layers)
    if not layers:
        raise ValueError("assemble needs at least one layer")
    labels = union_labels(layers, roster)
    m = MultiNet(tuple(align(g, labels) for g in layers))
    nodes_before = m.n
    scc_sizes: list[int] = []
    if cfg.restrict_to_union_scc:
        scc = strongly_connected_components(union_network(m))
        scc_sizes = [len(c) for c in scc.components]
        if not scc.components or len(scc.largest) < 2:
            raise ValueError("union network has no strongly connected component with an edge")
        m = restrict(m, scc.largest)
    stats = []
    out = []
    for g in m.layers:
        nrm = float(np.linalg.norm(g.weights))
        entry = {
            "name": g.name,
            "directed": g.directed,
            "edges": g.num_edges,
            "density": g.density(),
            "frobenius_norm": nrm,
            **_drop_stats(g),
        }
        stats.append(entry)
        if cfg.normalize_layers and nrm > 0:
            g = LayerGraph(g.labels, g.weights / nrm, name=g.name, directed=g.directed, meta=g.meta)
        out.append(g)
    m = MultiNet(tuple(out))
    report = AssembleReport(
        nodes_before=nodes_before,
        nodes_after=m.n,
        labels=list(m.labels),
        removed=[lab for lab in labels if lab not in set(m.labels)],
        layers=stats,
        union_scc_sizes=scc_sizes,
        config=cfg.to_dict(),
    )
    return m, from_multinet(m), report


DATA_FILES = (("shareholding.csv", "SH"), ("board.csv", "BD"), ("prices.csv", "CORR"))


def load_directory(path, cfg: PipelineConfig | None = None) -> list[LayerGraph]:
    """Load whichever of ``shareholding.csv``, ``board.csv``, ``prices.csv`` exist.

    Layers come back in that order.  A ``roster.txt`` in the directory fixes
    the node ordering of every layer.
    """
    from .netcore import read_roster

    cfg = cfg or PipelineConfig()
    d = Path(path)
    roster = read_roster(d / "roster.txt") if (d / "roster.txt").exists() else None
    layers = []
    if (d / "shareholding.csv").exists():
        layers.append(load_shareholding(d / "shareholding.csv", cfg, roster))
    if (d / "board.csv").exists():
        layers.append(load_board(d / "board.csv", roster))
    if (d / "prices.csv").exists():
        layers.append(correlation_layer(read_prices(d / "prices.csv"), cfg))
    if not layers:
        raise InputError(f"{d}: no shareholding.csv, board.csv or prices.csv found")
    return layers
