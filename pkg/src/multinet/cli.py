"""Command-line front end.

Subcommands: ``ingest``, ``hits``, ``eigencentrality``, ``tophits``,
``rank-sweep`` and ``subgroup``.  Score tables print five significant
digits; ``--format json`` and ``--format tsv`` keep full precision.

Exit codes: 0 success, 1 input error, 2 numerical non-convergence (the
output is still written).
"""
from __future__ import annotations

import argparse
import datetime as dt
import hashlib
import io
import json
import logging
import os
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .decomp import Ranked, cp_als, fit_sweep, fit_of, tophits_rank1, triplets
from .netcore import InputError, LayerGraph, degree, read_edge_list, read_roster
from .pipeline import PipelineConfig, assemble, load_board, load_directory
from .spectral import eigencentrality, hits
from .tensor import Tensor3, read_tensor, write_tensor

log = logging.getLogger("multinet")

EXIT_OK, EXIT_INPUT, EXIT_NONCONVERGED = 0, 1, 2


class _NotConverged(Exception):
    pass


def fmt(x: float) -> str:
    """Five significant digits, as in published score tables."""
    return f"{x:.5g}"


#: Scores that agree to this many significant digits (relative to the
#: largest score) are ties in printed tables and are ordered by label.
TIE_DIGITS = 12


def ranked(scores, labels, k: int) -> list[Ranked]:
    """Top ``k`` scores for display, ties ordered by label.

    Ordering by label rather than node index keeps tables unchanged when the
    input files list nodes in a different order.
    """
    scores = np.asarray(scores, dtype=float)
    scale = float(np.abs(scores).max()) if scores.size else 0.0
    key = np.round(scores / scale, TIE_DIGITS) if scale > 0 else scores
    order = sorted(range(scores.size), key=lambda i: (-key[i], labels[i]))
    return [Ranked(i, float(scores[i])) for i in order[: max(int(k), 0)]]


def _digest(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _input_files(args) -> list[Path]:
    target = getattr(args, "layer_file", None) or getattr(args, "data_dir", None)
    if target is None:
        return []
    p = Path(target)
    if p.is_dir():
        return sorted(f for f in p.iterdir() if f.is_file())
    return [p] if p.exists() else []


def write_manifest(args, cfg: PipelineConfig, path: Path, argv) -> None:
    manifest = {
        "command": args.command,
        "argv": list(argv),
        "config": cfg.to_dict(),
        "inputs": {str(f): _digest(f) for f in _input_files(args)},
        "timestamp": dt.datetime.now(dt.timezone.utc).isoformat(),
        "version": __version__,
    }
    path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------


def _text_table(header, rows) -> str:
    cells = [list(header)] + [list(r) for r in rows]
    widths = [max(len(row[c]) for row in cells) for c in range(len(header))]
    lines = ["  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip() for row in cells]
    return "\n".join(lines) + "\n"


def _paired(labels, left: list[Ranked], right: list[Ranked]):
    rows = []
    for a, b in zip(left, right):
        rows.append((labels[a.index], a.score, labels[b.index], b.score))
    return rows


def render_pairs(title_cols, labels, hubs, auths, fmt_kind) -> str:
    rows = _paired(labels, hubs, auths)
    if fmt_kind == "tsv":
        out = io.StringIO()
        out.write("\t".join(title_cols) + "\n")
        for a, sa, b, sb in rows:
            out.write(f"{a}\t{sa!r}\t{b}\t{sb!r}\n")
        return out.getvalue()
    return _text_table(title_cols, [(a, fmt(sa), b, fmt(sb)) for a, sa, b, sb in rows])


# ---------------------------------------------------------------------------
# Data access
# ---------------------------------------------------------------------------


def _config(args) -> PipelineConfig:
    return PipelineConfig(
        sh_threshold=args.sh_threshold,
        corr_threshold=args.corr_threshold,
        normalize_layers=not args.no_normalize,
        restrict_to_union_scc=not args.no_scc_restrict,
        return_kind=args.returns,
        rank=args.rank,
        tol=args.tol,
        max_iter=args.max_iter,
        restarts=args.restarts,
        seed=args.seed,
    )


def load_dataset(data_dir, cfg: PipelineConfig):
    """``(labels, layer names, tensor)`` from an ingested or a raw data directory."""
    d = Path(data_dir)
    if not d.is_dir():
        raise InputError(f"{d}: not a directory")
    if (d / "tensor.txt").exists():
        t = read_tensor(d / "tensor.txt")
        labels = read_roster(d / "labels.txt")
        names_file = d / "layers.txt"
        names = read_roster(names_file) if names_file.exists() else tuple(f"L{k + 1}" for k in range(t.shape[2]))
        if t.shape[:2] != (len(labels), len(labels)) or len(names) != t.shape[2]:
            raise InputError(f"{d}: tensor shape {t.shape} disagrees with labels/layers files")
        return labels, names, t
    roster = read_roster(d / "roster.txt") if (d / "roster.txt").exists() else None
    m, t, _ = assemble(load_directory(d, cfg), cfg, roster=roster)
    return m.labels, m.names, t


def _read_undirected(path) -> LayerGraph:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip().lower().replace(" ", "")
    if header in ("company,director", "src,dst,count"):
        return load_board(path)
    return read_edge_list(path, directed=False, name=Path(path).stem, self_loops="drop")


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_hits(args, cfg) -> str:
    g = read_edge_list(args.layer_file, name=Path(args.layer_file).stem, self_loops="drop")
    res = hits(g, tol=args.tol, max_iter=args.max_iter)
    k = args.top if args.top is not None else 10
    hubs, auths = ranked(res.hubs, g.labels, k), ranked(res.authorities, g.labels, k)
    if args.format == "json":
        out = json.dumps(
            {
                "labels": list(g.labels),
                "hubs": res.hubs.tolist(),
                "authorities": res.authorities.tolist(),
                "sigma": res.sigma,
                "iterations": res.iterations,
                "converged": res.converged,
                "gap_ok": res.gap_ok,
                "top_hubs": [[g.labels[r.index], r.score] for r in hubs],
                "top_authorities": [[g.labels[r.index], r.score] for r in auths],
            },
            indent=2,
        ) + "\n"
    else:
        out = render_pairs(("company", "hubs score", "company", "authority score"), g.labels, hubs, auths, args.format)
    if not res.converged:
        raise _NotConverged(out)
    return out


def cmd_eigencentrality(args, cfg) -> str:
    g = _read_undirected(args.layer_file)
    res = eigencentrality(g, tol=args.tol, max_iter=args.max_iter)
    k = args.top if args.top is not None else 10
    rows = ranked(res.scores, g.labels, k)
    deg = [degree(g, i) for i in range(g.n)]
    if args.format == "json":
        out = json.dumps(
            {
                "labels": list(g.labels),
                "scores": res.scores.tolist(),
                "degrees": deg,
                "eigenvalue": res.eigenvalue,
                "iterations": res.iterations,
                "converged": res.converged,
                "top": [[g.labels[r.index], r.score, deg[r.index]] for r in rows],
            },
            indent=2,
        ) + "\n"
    elif args.format == "tsv":
        out = "company\teigencentrality\tdegree\n" + "".join(
            f"{g.labels[r.index]}\t{r.score!r}\t{deg[r.index]}\n" for r in rows
        )
    else:
        out = _text_table(
            ("company", "eigencentrality", "degree"),
            [(g.labels[r.index], fmt(r.score), str(deg[r.index])) for r in rows],
        )
    if not res.converged:
        raise _NotConverged(out)
    return out


def _decompose(t: Tensor3, cfg: PipelineConfig):
    """Triplets and fit; rank 1 uses the TOPHITS power iteration directly."""
    if cfg.rank == 1:
        trip = tophits_rank1(t, tol=cfg.tol, max_iter=cfg.max_iter)
        xhat = trip.weight * np.einsum("i,j,k->ijk", trip.hubs, trip.authorities, trip.topics)
        return [trip], fit_of(t.data, xhat), trip.converged
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        model = cp_als(t, cfg.rank, tol=cfg.tol, max_iter=cfg.max_iter, restarts=cfg.restarts, seed=cfg.seed)
        return triplets(model), model.fit, model.converged


def _factor_report(args, cfg, top_default) -> str:
    labels, names, t = load_dataset(args.data_dir, cfg)
    r = args.factor
    if r < 1:
        raise InputError("factor index must be >= 1")
    if r > cfg.rank:
        raise InputError(f"factor index exceeds rank ({r} > {cfg.rank})")
    trips, fit, converged = _decompose(t, cfg)
    trip = trips[r - 1]
    k = args.top if args.top is not None else top_default
    hubs, auths = ranked(trip.hubs, labels, k), ranked(trip.authorities, labels, k)
    topics = trip.topics_normalized
    if args.format == "json":
        out = json.dumps(
            {
                "rank": cfg.rank,
                "factor": r,
                "weight": trip.weight,
                "fit": fit,
                "converged": converged,
                "labels": list(labels),
                "layers": list(names),
                "hubs": trip.hubs.tolist(),
                "authorities": trip.authorities.tolist(),
                "topics": trip.topics.tolist(),
                "topics_normalized": topics.tolist(),
                "top_hubs": [[labels[x.index], x.score] for x in hubs],
                "top_authorities": [[labels[x.index], x.score] for x in auths],
            },
            indent=2,
        ) + "\n"
    else:
        body = render_pairs(("company", "hubs score", "company", "authority score"), labels, hubs, auths, args.format)
        if args.format == "tsv":
            topic_line = "layer\ttopic score\n" + "".join(f"{n}\t{s!r}\n" for n, s in zip(names, topics))
            out = body + "\n" + topic_line
        else:
            head = f"TOPHITS factor {r} of {cfg.rank} ({len(names)} layers, weight {fmt(trip.weight)}, fit {fmt(fit)})\n"
            topic_line = "topic scores: " + ", ".join(f"{n} {fmt(s)}" for n, s in zip(names, topics)) + "\n"
            out = head + body + topic_line
    if not converged:
        raise _NotConverged(out)
    return out


def cmd_tophits(args, cfg) -> str:
    return _factor_report(args, cfg, top_default=10)


def cmd_subgroup(args, cfg) -> str:
    return _factor_report(args, cfg, top_default=5)


def parse_ranks(text: str) -> list[int]:
    text = text.strip()
    if ".." in text:
        a, b = text.split("..", 1)
        lo, hi = int(a), int(b)
        if lo < 1 or hi < lo:
            raise InputError(f"bad rank range {text!r}")
        return list(range(lo, hi + 1))
    ranks = [int(x) for x in text.split(",") if x.strip()]
    if not ranks or min(ranks) < 1:
        raise InputError(f"bad rank list {text!r}")
    return ranks


def cmd_rank_sweep(args, cfg) -> str:
    _, _, t = load_dataset(args.data_dir, cfg)
    rows = fit_sweep(
        t, parse_ranks(args.ranks), tol=cfg.tol, max_iter=cfg.max_iter,
        restarts=cfg.restarts, seed=cfg.seed, warm_start=args.warm_start,
    )
    if args.format == "json":
        out = json.dumps([r._asdict() for r in rows], indent=2) + "\n"
    elif args.format == "tsv":
        out = "rank\tfit\tcorcondia\tstability\n" + "".join(
            f"{r.rank}\t{r.fit!r}\t{r.corcondia!r}\t{r.stability!r}\n" for r in rows
        )
    else:
        out = _text_table(
            ("rank", "fit", "corcondia", "stability"),
            [(str(r.rank), f"{r.fit:.6f}", "n/a" if np.isnan(r.corcondia) else f"{r.corcondia:.4f}",
              "" if np.isnan(r.stability) else f"{r.stability:.4f}") for r in rows],
        )
    if not all(r.converged for r in rows):
        raise _NotConverged(out)
    return out


def cmd_ingest(args, cfg) -> str:
    d = Path(args.data_dir)
    roster = read_roster(d / "roster.txt") if (d / "roster.txt").exists() else None
    m, t, report = assemble(load_directory(d, cfg), cfg, roster=roster)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_tensor(t, out_dir / "tensor.txt")
    (out_dir / "labels.txt").write_text("".join(f"{x}\n" for x in m.labels), encoding="utf-8")
    (out_dir / "layers.txt").write_text("".join(f"{x}\n" for x in m.names), encoding="utf-8")
    (out_dir / "report.json").write_text(report.to_json() + "\n", encoding="utf-8")
    return (
        f"ingested {report.nodes_before} -> {report.nodes_after} nodes, "
        f"{len(m.layers)} layers ({', '.join(m.names)}) into {out_dir}\n"
    )


COMMANDS = {
    "ingest": cmd_ingest,
    "hits": cmd_hits,
    "eigencentrality": cmd_eigencentrality,
    "tophits": cmd_tophits,
    "rank-sweep": cmd_rank_sweep,
    "subgroup": cmd_subgroup,
}


def build_parser() -> argparse.ArgumentParser:
    env_seed = os.environ.get("MULTINET_SEED")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--sh-threshold", type=float, default=0.02)
    common.add_argument("--corr-threshold", type=float, default=0.65)
    common.add_argument("--returns", choices=("simple", "log"), default="simple")
    common.add_argument("--rank", type=int, default=30)
    common.add_argument("--factor", type=int, default=1)
    common.add_argument("--top", type=int, default=None, help="rows per table (10; 5 for subgroup)")
    common.add_argument("--seed", type=int, default=int(env_seed) if env_seed else 0)
    common.add_argument("--tol", type=float, default=1e-10)
    common.add_argument("--max-iter", type=int, default=1000)
    common.add_argument("--restarts", type=int, default=1)
    common.add_argument("--format", choices=("table", "json", "tsv"), default="table")
    common.add_argument("--no-normalize", action="store_true")
    common.add_argument("--no-scc-restrict", action="store_true")
    common.add_argument("-o", "--output", help="write the table here instead of stdout")
    common.add_argument("--manifest", help="run manifest path (default: next to --output, else ./multinet_manifest.json)")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="multinet", description=__doc__.split("\n")[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("ingest", parents=[common], help="assemble raw files into a tensor dataset")
    s.add_argument("data_dir")
    s.add_argument("--out-dir", required=True)
    s = sub.add_parser("hits", parents=[common], help="hub/authority scores of one directed layer")
    s.add_argument("layer_file")
    s = sub.add_parser("eigencentrality", parents=[common], help="eigencentrality of one undirected layer")
    s.add_argument("layer_file")
    s = sub.add_parser("tophits", parents=[common], help="TOPHITS hub/authority/topic scores")
    s.add_argument("data_dir")
    s = sub.add_parser("rank-sweep", parents=[common], help="fit and CORCONDIA per CP rank")
    s.add_argument("data_dir")
    s.add_argument("--ranks", default="1..10", help="'a..b' or comma list")
    s.add_argument("--warm-start", action="store_true")
    s = sub.add_parser("subgroup", parents=[common], help="top nodes of one CP factor")
    s.add_argument("data_dir")
    return p


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    code = EXIT_OK
    try:
        cfg = _config(args)
        try:
            out = COMMANDS[args.command](args, cfg)
        except _NotConverged as exc:
            out = exc.args[0]
            print("multinet: iteration did not converge; scores are provisional", file=sys.stderr)
            code = EXIT_NONCONVERGED
    except (InputError, OSError, ValueError, IndexError) as exc:
        print(f"multinet: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.output:
        Path(args.output).write_text(out, encoding="utf-8")
    else:
        sys.stdout.write(out)
    if args.manifest:
        manifest = Path(args.manifest)
    elif args.command == "ingest":
        manifest = Path(args.out_dir) / "manifest.json"
    elif args.output:
        manifest = Path(args.output + ".manifest.json")
    else:
        manifest = Path("multinet_manifest.json")
    write_manifest(args, cfg, manifest, argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
