"""Command-line entry points.

Subcommands: prep, solve, simulate, suggest, serve, export. Every option
can also come from a key=value config file (--config) or an environment
variable RANKPROP_<NAME>; explicit flags win over the environment, which
wins over the file. Exit codes: 0 success, 2 invalid input, 3 numerical
failure.
"""
import argparse
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from .active_dense import (DENSE_CAP, choose_subset, init_covariance,
                           observe_label, suggest)
from .active_sparse import (compute_eigenbasis, init_lowrank, load_eigenbasis,
                            observe_label_sparse, save_eigenbasis,
                            suggest_sparse)
from .dataset import load_dataset
from .errors import NumericalError, ValidationError
from .labels import Placement2D, Ranking, placement_to_labels, ranking_to_labels
from .neighbors import build_knn
from .propagation import SolverConfig, export_criterion_csv, solve_multi
from .regularizer import (ManifoldConfig, build_regularizer, load_regularizer,
                          save_regularizer)
from .service import ServiceConfig, cache_paths, run_service
from .simulate import OracleLabeler, export_curves_csv, run_learning_curve

STRATEGY_NAMES = {
    "random": "random",
    "variance": "max-variance",
    "amershi": "amershi",
    "infogain-dense": "info-gain",
    "infogain-sparse": "info-gain-sparse",
}


def _read_config_file(path):
    out = {}
    for ln, line in enumerate(Path(path).read_text().splitlines()):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValidationError(f"config line {ln + 1} is not key=value")
        key, _, val = line.partition("=")
        out[key.strip().replace("-", "_")] = val.strip()
    return out


def _resolve(args, name, cast, default):
    """Flag > environment > config file > default."""
    val = getattr(args, name, None)
    if val is not None:
        return val
    env = os.environ.get(f"RANKPROP_{name.upper()}")
    if env is not None:
        return cast(env)
    if getattr(args, "_config_values", None) and name in args._config_values:
        return cast(args._config_values[name])
    return default


def _load_labels_file(path, u, catalog):
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"labels file not found: {path}")
    try:
        doc = json.loads(path.read_text())
    except OSError as e:
        raise ValidationError(f"labels file unreadable: {e}") from None
    except json.JSONDecodeError as e:
        raise ValidationError(f"labels file is not valid JSON: {e}") from None
    if not isinstance(doc, dict):
        raise ValidationError("labels file must be a JSON object")

    def to_index(ref):
        if isinstance(ref, str):
            try:
                return catalog.index_of(ref)
            except KeyError:
                raise ValidationError(f"unknown item id {ref!r}")
        return int(ref)

    try:
        if "placements" in doc:
            pts = [(to_index(p["id"]), float(p["x"]), float(p["y"]))
                   for p in doc["placements"]]
            return list(placement_to_labels(Placement2D(pts), u))
        if "groups" in doc:
            labels = [ranking_to_labels(
                Ranking([[to_index(i) for i in grp]
                         for grp in doc["groups"]]), u)]
            if "groups_y" in doc:
                labels.append(ranking_to_labels(
                    Ranking([[to_index(i) for i in grp]
                             for grp in doc["groups_y"]]), u))
            return labels
    except (KeyError, TypeError, ValueError) as e:
        raise ValidationError(f"malformed labels file: {e!r}") from None
    raise ValidationError("labels file needs groups or placements")


def _regularizer_for(manifest, args):
    """Load the prep cache when present, build in memory otherwise."""
    reg_path, _ = cache_paths(manifest)
    if reg_path.exists():
        return load_regularizer(reg_path)
    ds = load_dataset(manifest)
    k = _resolve(args, "k", int, 20)
    m = _resolve(args, "m", int, 10)
    graph = build_knn(ds.features, k)
    return build_regularizer(ds.features, graph,
                             ManifoldConfig(k=k, m=min(m, k)))


def cmd_prep(args):
    manifest = Path(_resolve(args, "dataset", str, None) or "")
    ds = load_dataset(manifest)
    k = _resolve(args, "k", int, 20)
    m = _resolve(args, "m", int, 10)
    lam = _resolve(args, "lam", float, 1e-6)
    r = _resolve(args, "r", int, 0)
    out_dir = _resolve(args, "out_dir", str, None)
    reg_path, eig_path = cache_paths(manifest)
    if out_dir:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        reg_path, eig_path = out / reg_path.name, out / eig_path.name
    if reg_path.exists() and not args.force:
        print(f"cache {reg_path} exists; nothing to do (use --force to rebuild)")
        return 0
    t0 = time.perf_counter()
    graph = build_knn(ds.features, k)
    t1 = time.perf_counter()
    reg = build_regularizer(ds.features, graph, ManifoldConfig(k=k, m=m))
    t2 = time.perf_counter()
    save_regularizer(reg_path, reg)
    print(f"graph: {t1 - t0:.2f}s  regularizer: {t2 - t1:.2f}s  "
          f"nnz={reg.matrix.nnz}  epsilon={reg.epsilon:.3e}")
    print(f"wrote {reg_path}")
    if r > 0:
        t3 = time.perf_counter()
        basis = compute_eigenbasis(reg, lam, min(r, ds.u))
        save_eigenbasis(eig_path, basis)
        print(f"eigenbasis: {time.perf_counter() - t3:.2f}s  r={basis.r}")
        print(f"wrote {eig_path}")
    return 0


def _solve_common(args):
    manifest = Path(_resolve(args, "dataset", str, None) or "")
    ds = load_dataset(manifest)
    labels_path = _resolve(args, "labels", str, None)
    if not labels_path:
        raise ValidationError("a labels file is required")
    labels = _load_labels_file(labels_path, ds.u, ds.catalog)
    reg = _regularizer_for(manifest, args)
    lam = _resolve(args, "lam", float, 1e-6)
    crit = solve_multi(reg, labels, SolverConfig(lam=lam))
    return ds, reg, crit


def cmd_solve(args):
    ds, _, crit = _solve_common(args)
    out = _resolve(args, "out", str, None)
    for d in range(crit.dims):
        f = crit.f[d]
        print(f"dim{d}: f in [{f.min():+.4f}, {f.max():+.4f}]  "
              f"median |f| = {np.median(np.abs(f)):.4f}")
    if out:
        export_criterion_csv(out, crit, ds.catalog.ids)
        print(f"wrote {out}")
    return 0


def cmd_export(args):
    ds, _, crit = _solve_common(args)
    out = _resolve(args, "out", str, None)
    if not out:
        raise ValidationError("--out is required for export")
    export_criterion_csv(out, crit, ds.catalog.ids)
    print(f"wrote {out}")
    return 0


def cmd_suggest(args):
    manifest = Path(_resolve(args, "dataset", str, None) or "")
    ds = load_dataset(manifest)
    lam = _resolve(args, "lam", float, 1e-6)
    n = _resolve(args, "n", int, 5)
    pool = _resolve(args, "pool_size", int, 1000)
    cap = _resolve(args, "dense_cap", int, DENSE_CAP)
    seed = _resolve(args, "seed", int, 0)
    labels_path = _resolve(args, "labels", str, None)
    labeled = []
    if labels_path:
        for lab in _load_labels_file(labels_path, ds.u, ds.catalog):
            labeled.extend(int(i) for i in lab.labeled_indices)
    labeled = sorted(set(labeled))
    reg = _regularizer_for(manifest, args)
    _, eig_path = cache_paths(manifest)
    if ds.u > cap and eig_path.exists():
        state = init_lowrank(load_eigenbasis(eig_path))
        for i in labeled:
            observe_label_sparse(state, i)
        sugg = suggest_sparse(state, pool, n, seed)
        pairs = sugg.items
    else:
        subset = choose_subset(ds.u, cap, seed)
        state = init_covariance(reg, lam, subset, cap=cap)
        pos = {int(v): j for j, v in enumerate(subset)}
        for i in labeled:
            if i in pos:
                observe_label(state, pos[i])
        sugg = suggest(state, pool, n, seed)
        pairs = [(int(subset[j]), gain) for j, gain in sugg.items]
    for idx, gain in pairs:
        print(f"{ds.catalog.ids[idx]}\t{gain:.6g}")
    return 0


def cmd_simulate(args):
    manifest = Path(_resolve(args, "dataset", str, None) or "")
    ds = load_dataset(manifest)
    if ds.ground_truth is None:
        raise ValidationError("simulate needs a dataset with ground truth")
    strategy_flag = _resolve(args, "strategy", str, "random")
    if strategy_flag not in STRATEGY_NAMES:
        raise ValidationError(
            f"unknown strategy {strategy_flag!r}; "
            f"expected one of {sorted(STRATEGY_NAMES)}")
    strategy = STRATEGY_NAMES[strategy_flag]
    trials = _resolve(args, "trials", int, 10)
    start = _resolve(args, "start_labels", int, 2)
    end = _resolve(args, "end_labels", int, 50)
    seed = _resolve(args, "seed", int, 7000)
    lam = _resolve(args, "lam", float, 1e-6)
    cap = _resolve(args, "dense_cap", int, DENSE_CAP)
    out = _resolve(args, "out", str, None)
    record = None
    if args.record:
        record = tuple(int(x) for x in args.record.split(","))
    reg = _regularizer_for(manifest, args)
    subset = None
    if ds.u > cap:
        subset = choose_subset(ds.u, cap, seed)
    basis = None
    if strategy == "info-gain-sparse":
        _, eig_path = cache_paths(manifest)
        if not eig_path.exists():
            raise ValidationError(
                f"missing eigenbasis cache {eig_path}; run prep with r>0")
        basis = load_eigenbasis(eig_path)
        if subset is not None:
            raise ValidationError(
                "info-gain-sparse runs on the full database; raise dense_cap")
    oracle = OracleLabeler(ds.ground_truth,
                           mode=_resolve(args, "oracle", str, "exact-rank"),
                           sigma=_resolve(args, "sigma", float, 0.0))
    res = run_learning_curve(
        reg, oracle, strategy, trials=trials, start_labels=start,
        end_labels=end, record_at=record,
        seeds=[seed + t for t in range(trials)], lam=lam, subset=subset,
        basis=basis)
    for n_labels, mm, ms, tm, tsd in res.summary():
        print(f"n={n_labels:3d}  mae {mm:.4f} +- {ms:.4f}  "
              f"tau {tm:+.4f} +- {tsd:.4f}")
    if out:
        summary = _resolve(args, "summary", str, None)
        export_curves_csv(out, [res], summary)
        print(f"wrote {out}")
    return 0


def cmd_serve(args):
    cfg = ServiceConfig(
        dataset=_resolve(args, "dataset", str, "dataset.json"),
        lam=_resolve(args, "lam", float, 1e-6),
        k=_resolve(args, "k", int, 20),
        m=_resolve(args, "m", int, 10),
        r=_resolve(args, "r", int, 100),
        dense_cap=_resolve(args, "dense_cap", int, DENSE_CAP),
        pool_size=_resolve(args, "pool_size", int, 1000),
        suggestion_count=_resolve(args, "suggestion_count", int, 5),
        bind=_resolve(args, "bind", str, "127.0.0.1:8787"),
        store=_resolve(args, "store", str, "sessions"),
        mode=_resolve(args, "mode", str, "auto"),
        seed=_resolve(args, "seed", int, 0),
    )
    run_service(cfg)
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="rankprop", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="key=value option file")
        sp.add_argument("--dataset", help="dataset manifest path")
        sp.add_argument("--seed", type=int, help="random seed")
        sp.add_argument("--lam", type=float, help="propagation weight")
        sp.add_argument("--k", type=int, help="neighbor count")
        sp.add_argument("--m", type=int, help="local model dimension")

    sp = sub.add_parser("prep", help="build and cache the regularizer")
    common(sp)
    sp.add_argument("--r", type=int, help="eigenbasis rank (0 skips)")
    sp.add_argument("--out-dir", dest="out_dir", help="cache directory")
    sp.add_argument("--force", action="store_true",
                    help="rebuild even if the cache exists")
    sp.set_defaults(fn=cmd_prep)

    sp = sub.add_parser("solve", help="propagate labels, print a summary")
    common(sp)
    sp.add_argument("--labels", help="JSON labels file (groups or placements)")
    sp.add_argument("--out", help="optional criterion CSV")
    sp.set_defaults(fn=cmd_solve)

    sp = sub.add_parser("export", help="propagate labels, write criterion CSV")
    common(sp)
    sp.add_argument("--labels", help="JSON labels file")
    sp.add_argument("--out", help="criterion CSV path")
    sp.set_defaults(fn=cmd_export)

    sp = sub.add_parser("suggest", help="print the next items to label")
    common(sp)
    sp.add_argument("--labels", help="JSON labels file (optional)")
    sp.add_argument("--n", type=int, help="suggestion count")
    sp.add_argument("--pool-size", dest="pool_size", type=int)
    sp.add_argument("--dense-cap", dest="dense_cap", type=int)
    sp.set_defaults(fn=cmd_suggest)

    sp = sub.add_parser("simulate", help="run a simulated learning curve")
    common(sp)
    sp.add_argument("--strategy",
                    help="random | variance | amershi | infogain-dense | "
                         "infogain-sparse")
    sp.add_argument("--trials", type=int)
    sp.add_argument("--start-labels", dest="start_labels", type=int)
    sp.add_argument("--end-labels", dest="end_labels", type=int)
    sp.add_argument("--record", help="comma-separated label counts to record")
    sp.add_argument("--oracle",
                    help="exact-rank | forced-binary | noisy-rank")
    sp.add_argument("--sigma", type=float, help="noisy-rank noise level")
    sp.add_argument("--dense-cap", dest="dense_cap", type=int)
    sp.add_argument("--out", help="per-trial CSV path")
    sp.add_argument("--summary", help="summary CSV path")
    sp.set_defaults(fn=cmd_simulate)

    sp = sub.add_parser("serve", help="run the session service")
    common(sp)
    sp.add_argument("--r", type=int)
    sp.add_argument("--dense-cap", dest="dense_cap", type=int)
    sp.add_argument("--pool-size", dest="pool_size", type=int)
    sp.add_argument("--suggestion-count", dest="suggestion_count", type=int)
    sp.add_argument("--bind", help="host:port")
    sp.add_argument("--store", help="session store directory")
    sp.add_argument("--mode", help="dense | sparse | auto")
    sp.set_defaults(fn=cmd_serve)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.config:
            args._config_values = _read_config_file(args.config)
        return args.fn(args)
    except ValidationError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except NumericalError as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
