"""Stateful HTTP/JSON service hosting interactive ranking sessions.

A session holds the user's current ranking (or 2D placement), the latest
propagated criterion, and the active-suggestion state. Every ranking
submission recomputes labels, re-solves, and rebuilds the suggestion state
by replaying one observation per labeled item from the zero-label
covariance; replay order is ascending item index, so rebuilt states are
deterministic. Suggestion pools are seeded from the configured seed plus
the criterion version, which makes a replayed session reproduce its
suggestion lists exactly.

Endpoints:
    POST /sessions {dataset, dims}            -> {session_id}
    PUT  /sessions/{id}/ranking {groups|placements} -> {criterion_version}
    GET  /sessions/{id}/ordering?subsample=N  -> [{id, f, rank}]
    GET  /sessions/{id}/suggestions?n=5       -> [{id, gain}]
    GET  /items?ids=a,b,c                     -> catalog entries

Datasets must be preprocessed (the prep subcommand writes the caches);
the service only loads them.
"""
import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .active_dense import (DENSE_CAP, choose_subset, init_covariance,
                           observe_label, suggest)
from .active_sparse import (init_lowrank, load_eigenbasis,
                            observe_label_sparse, suggest_sparse)
from .dataset import load_dataset
from .errors import NumericalError, ValidationError
from .labels import Placement2D, Ranking, placement_to_labels, ranking_to_labels
from .propagation import SolverConfig, solve_multi
from .regularizer import load_regularizer
from .store import SessionStore


@dataclass
class ServiceConfig:
    dataset: str = "dataset.json"
    lam: float = 1e-6
    k: int = 20
    m: int = 10
    r: int = 100
    dense_cap: int = DENSE_CAP
    pool_size: int = 1000
    suggestion_count: int = 5
    bind: str = "127.0.0.1:8787"
    store: str = "sessions"
    mode: str = "auto"
    seed: int = 0

    def __post_init__(self):
        if self.mode not in ("dense", "sparse", "auto"):
            raise ValidationError(f"unknown mode {self.mode!r}")


def cache_paths(manifest_path):
    p = Path(manifest_path)
    return p.with_suffix(".csrg"), p.with_suffix(".cseb")


class DatasetEngine:
    """Loaded dataset + caches + zero-label covariance, shared by sessions."""

    def __init__(self, manifest_path, cfg: ServiceConfig):
        self.dataset = load_dataset(manifest_path)
        reg_path, eig_path = cache_paths(manifest_path)
        if not reg_path.exists():
            raise ValidationError(
                f"missing regularizer cache {reg_path}; run prep first")
        self.reg = load_regularizer(reg_path)
        if self.reg.u != self.dataset.u:
            raise ValidationError("regularizer cache does not match dataset")
        u = self.dataset.u
        self.mode = cfg.mode if cfg.mode != "auto" else (
            "sparse" if u > cfg.dense_cap else "dense")
        self.cfg = cfg
        if self.mode == "dense":
            self.subset = choose_subset(u, cfg.dense_cap, cfg.seed)
            self.C0 = init_covariance(self.reg, cfg.lam, self.subset,
                                      cap=cfg.dense_cap).C
            self.pos_in_subset = {int(v): j for j, v in enumerate(self.subset)}
        else:
            if not eig_path.exists():
                raise ValidationError(
                    f"missing eigenbasis cache {eig_path}; run prep with r>0")
            self.basis = load_eigenbasis(eig_path)
            if self.basis.u != u:
                raise ValidationError("eigenbasis cache does not match dataset")

    def fresh_active_state(self):
        if self.mode == "dense":
            from .active_dense import CovarianceState
            return CovarianceState(self.C0.copy(), self.subset)
        return init_lowrank(self.basis)

    def observe(self, state, item_index):
        if self.mode == "dense":
            j = self.pos_in_subset.get(int(item_index))
            if j is not None:
                observe_label(state, j)
        else:
            observe_label_sparse(state, int(item_index))

    def suggestions(self, state, n, rng_seed):
        if self.mode == "dense":
            sugg = suggest(state, self.cfg.pool_size, n, rng_seed)
            return [(int(self.subset[j]), gain) for j, gain in sugg.items]
        sugg = suggest_sparse(state, self.cfg.pool_size, n, rng_seed)
        return list(sugg.items)


@dataclass
class SessionState:
    session_id: str
    dataset_ref: str
    dims: int
    mutation_count: int = 0
    criterion_version: int = 0
    labels = None
    criterion = None
    active = None
    last_payload = None
    lock: threading.Lock = field(default_factory=threading.Lock)


def _group_payload_to_ranking(engine, groups):
    catalog = engine.dataset.catalog
    try:
        idx_groups = [[catalog.index_of(str(i)) for i in grp] for grp in groups]
    except KeyError as e:
        raise ValidationError(f"unknown item id {e.args[0]!r}")
    return Ranking(idx_groups)


def _apply_mutation(engine, sess: SessionState, payload):
    """Recompute labels, criterion, and active state from one PUT body."""
    if "placements" in payload:
        if sess.dims != 2:
            raise ValidationError("placements need a 2-dim session")
        catalog = engine.dataset.catalog
        pts = []
        for p in payload["placements"]:
            try:
                idx = catalog.index_of(str(p["id"]))
            except KeyError:
                raise ValidationError(f"unknown item id {p['id']!r}")
            pts.append((idx, float(p["x"]), float(p["y"])))
        labels = list(placement_to_labels(Placement2D(pts), engine.dataset.u))
    elif "groups" in payload:
        labels = [ranking_to_labels(
            _group_payload_to_ranking(engine, payload["groups"]),
            engine.dataset.u)]
        if sess.dims == 2:
            if "groups_y" not in payload:
                raise ValidationError(
                    "2-dim session needs groups_y or placements")
            labels.append(ranking_to_labels(
                _group_payload_to_ranking(engine, payload["groups_y"]),
                engine.dataset.u))
    else:
        raise ValidationError("body needs either groups or placements")

    criterion = solve_multi(engine.reg, labels,
                            SolverConfig(lam=engine.cfg.lam))
    active = engine.fresh_active_state()
    labeled_union = sorted(set(
        int(i) for lab in labels for i in lab.labeled_indices))
    for i in labeled_union:
        engine.observe(active, i)
    sess.labels = labels
    sess.criterion = criterion
    sess.active = active
    sess.last_payload = payload
    sess.criterion_version += 1
    return criterion


def build_app(cfg: ServiceConfig):
    """FastAPI application factory."""
    from fastapi import Body, FastAPI, HTTPException
    from fastapi.middleware.cors import CORSMiddleware

    app = FastAPI(title="criteria sessions")
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])
    store = SessionStore(cfg.store)
    engines = {}
    sessions = {}
    root = Path(cfg.dataset)
    app.state.sessions = sessions
    app.state.engines = engines
    app.state.store = store

    def engine_for(ref):
        key = str(ref)
        if key not in engines:
            if root.is_file() and (not ref or key in (str(root), root.name)):
                path = root
            elif root.is_dir():
                path = root / key
                if not path.exists():
                    raise ValidationError(f"unknown dataset {key!r}")
            elif root.exists():
                raise ValidationError(f"unknown dataset {key!r}")
            else:
                raise ValidationError(f"dataset root {root} does not exist")
            engines[key] = DatasetEngine(path, cfg)
        return engines[key]

    def replay(session_id):
        """Rebuild a persisted session from its mutation log."""
        log = store.read_log(session_id)
        if not log or log[0].get("op") != "create":
            raise ValidationError(f"corrupt session log {session_id!r}")
        head = log[0]
        sess = SessionState(session_id, head["dataset"], int(head["dims"]))
        engine = engine_for(sess.dataset_ref)
        for rec in log[1:]:
            if rec.get("op") != "ranking":
                raise ValidationError(f"corrupt session log {session_id!r}")
            _apply_mutation(engine, sess, rec["payload"])
            sess.mutation_count += 1
        sessions[session_id] = sess
        return sess

    def get_session(session_id):
        if session_id in sessions:
            return sessions[session_id]
        if store.exists(session_id):
            return replay(session_id)
        raise HTTPException(404, f"unknown session {session_id!r}")

    @app.exception_handler(ValidationError)
    async def _validation(request, exc):
        from fastapi.responses import JSONResponse
        return JSONResponse(status_code=400, content={"error": str(exc)})

    @app.exception_handler(NumericalError)
    async def _numerical(request, exc):
        from fastapi.responses import JSONResponse
        return JSONResponse(status_code=500, content={"error": str(exc)})

    @app.post("/sessions")
    def create_session(payload: dict = Body(...)):
        dims = int(payload.get("dims", 1))
        if dims not in (1, 2):
            raise ValidationError(f"dims must be 1 or 2, got {dims}")
        ref = str(payload.get("dataset", "") or "")
        engine_for(ref)   # validates dataset + caches before creating
        session_id = uuid.uuid4().hex[:16]
        sess = SessionState(session_id, ref, dims)
        sessions[session_id] = sess
        store.append(session_id, {"op": "create", "dataset": ref,
                                  "dims": dims})
        store.write_snapshot(session_id, {
            "dataset": ref, "dims": dims, "criterion_version": 0})
        return {"session_id": session_id}

    @app.get("/sessions/{session_id}")
    def session_detail(session_id: str):
        """Current session state, enough for a client to rebuild its view."""
        sess = get_session(session_id)
        body = sess.last_payload or {}
        return {"session_id": sess.session_id,
                "dataset": sess.dataset_ref,
                "dims": sess.dims,
                "criterion_version": sess.criterion_version,
                "groups": body.get("groups", []),
                "groups_y": body.get("groups_y", []),
                "placements": body.get("placements", [])}

    @app.put("/sessions/{session_id}/ranking")
    def put_ranking(session_id: str, payload: dict = Body(...)):
        sess = get_session(session_id)
        if not sess.lock.acquire(blocking=False):
            raise HTTPException(409, "another mutation is in flight")
        try:
            engine = engine_for(sess.dataset_ref)
            _apply_mutation(engine, sess, payload)
            sess.mutation_count += 1
            store.append(session_id, {"op": "ranking", "payload": payload})
            store.write_snapshot(session_id, {
                "dataset": sess.dataset_ref, "dims": sess.dims,
                "criterion_version": sess.criterion_version})
            return {"criterion_version": sess.criterion_version}
        finally:
            sess.lock.release()

    @app.get("/sessions/{session_id}/ordering")
    def get_ordering(session_id: str, subsample: int = 0):
        sess = get_session(session_id)
        if sess.criterion is None:
            raise ValidationError("no criterion yet; submit a ranking first")
        engine = engine_for(sess.dataset_ref)
        crit = sess.criterion
        ids = engine.dataset.catalog.ids
        u = crit.u
        chosen = np.arange(u)
        if 0 < subsample < u:
            chosen = _even_subsample(crit.f[0], subsample)
        ranks = np.empty((crit.dims, u), dtype=int)
        for d in range(crit.dims):
            ranks[d, crit.ordering[d]] = np.arange(u)
        chosen = chosen[np.argsort(crit.f[0][chosen], kind="stable")]
        return [{"id": ids[i],
                 "f": [float(crit.f[d, i]) for d in range(crit.dims)],
                 "rank": [int(ranks[d, i]) for d in range(crit.dims)]}
                for i in chosen]

    @app.get("/sessions/{session_id}/suggestions")
    def get_suggestions(session_id: str, n: int = 0):
        sess = get_session(session_id)
        engine = engine_for(sess.dataset_ref)
        n = n or cfg.suggestion_count
        if sess.active is None:
            active = engine.fresh_active_state()
        else:
            active = sess.active
        rng_seed = cfg.seed + sess.criterion_version
        items = engine.suggestions(active, n, rng_seed)
        ids = engine.dataset.catalog.ids
        return [{"id": ids[i], "gain": gain} for i, gain in items]

    @app.get("/items")
    def get_items(ids: str = "", dataset: str = ""):
        catalog = engine_for(dataset).dataset.catalog
        wanted = [s for s in ids.split(",") if s] if ids else catalog.ids
        out = []
        for iid in wanted:
            try:
                e = catalog[catalog.index_of(iid)]
            except KeyError:
                continue
            out.append({"id": e.item_id, "display": e.display,
                        "tags": e.tags})
        return out

    return app


def _even_subsample(f, n):
    """Indices of n items spread evenly along the value interval of f."""
    order = np.argsort(f, kind="stable")
    fs = f[order]
    targets = np.linspace(fs[0], fs[-1], n)
    chosen, used = [], set()
    for t in targets:
        j = int(np.searchsorted(fs, t))
        best, bestd = None, np.inf
        for cand in (j - 1, j, j + 1):
            if 0 <= cand < fs.size:
                d = abs(fs[cand] - t)
                if d < bestd:
                    best, bestd = cand, d
        step = 0
        while best is not None and order[best] in used:
            step += 1
            lo, hi = best - step, best + step
            best = None
            for cand in (lo, hi):
                if 0 <= cand < fs.size and order[cand] not in used:
                    best = cand
                    break
        if best is not None:
            used.add(int(order[best]))
            chosen.append(int(order[best]))
    return np.asarray(sorted(chosen), dtype=int)


def run_service(cfg: ServiceConfig):
    import uvicorn

    host, _, port = cfg.bind.partition(":")
    uvicorn.run(build_app(cfg), host=host or "127.0.0.1",
                port=int(port or 8787), log_level="warning")
