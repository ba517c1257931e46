"""Dataset loading: binary feature files plus a JSON manifest.

Features live in a purpose-built flat binary format so tests can be
bit-exact and loading needs nothing beyond numpy:

    magic "CSFD" | u32 version=1 | u64 rows | u64 cols | rows*cols float32

all little-endian, row-major. The manifest is a UTF-8 JSON document

    {"version": 1, "features": "<relative path>", "dims": d,
     "items": [{"id": ..., "display": ..., "tags": [...]}, ...]}

with an optional "ground_truth" list (length u) used by the simulated-user
harness on synthetic data.
"""
import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .validation import check_features

MAGIC = b"CSFD"
VERSION = 1
_HEADER = struct.Struct("<4sIQQ")


@dataclass
class CatalogEntry:
    item_id: str
    display: str | None = None
    tags: list = field(default_factory=list)


@dataclass
class ItemCatalog:
    entries: list

    def __post_init__(self):
        ids = [e.item_id for e in self.entries]
        if len(set(ids)) != len(ids):
            seen = set()
            dup = next(i for i in ids if i in seen or seen.add(i))
            raise ValidationError(f"duplicate item id {dup!r}")

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    @property
    def ids(self):
        return [e.item_id for e in self.entries]

    def index_of(self, item_id):
        try:
            return self._by_id[item_id]
        except AttributeError:
            self._by_id = {e.item_id: i for i, e in enumerate(self.entries)}
            return self._by_id[item_id]


@dataclass
class Dataset:
    features: np.ndarray    # (u, d) float32
    catalog: ItemCatalog
    ground_truth: np.ndarray | None = None

    @property
    def u(self):
        return self.features.shape[0]

    @property
    def d(self):
        return self.features.shape[1]


def write_features(path, X):
    """Write a float32 feature matrix in the flat binary format."""
    X = check_features(X)
    u, d = X.shape
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, u, d))
        fh.write(X.astype("<f4").tobytes())


def read_features(path):
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"feature file not found: {path}")
    raw = path.read_bytes()
    if len(raw) < _HEADER.size:
        raise ValidationError(f"feature file truncated: {path}")
    magic, version, rows, cols = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise ValidationError(f"bad magic in {path}: {magic!r}")
    if version != VERSION:
        raise ValidationError(f"unsupported feature file version {version}")
    expect = _HEADER.size + rows * cols * 4
    if len(raw) != expect:
        raise ValidationError(
            f"feature file size mismatch: header says {rows}x{cols} "
            f"({expect} bytes), file has {len(raw)}")
    X = np.frombuffer(raw, dtype="<f4", offset=_HEADER.size)
    return check_features(X.reshape(rows, cols))


def write_manifest(path, features_rel, dims, item_ids, displays=None,
                   ground_truth=None):
    ids = [str(i) for i in item_ids]
    if len(set(ids)) != len(ids):
        raise ValidationError("item ids must be unique")
    items = []
    for i, iid in enumerate(item_ids):
        entry = {"id": str(iid)}
        if displays is not None and displays[i] is not None:
            entry["display"] = displays[i]
        items.append(entry)
    doc = {"version": 1, "features": str(features_rel), "dims": int(dims),
           "items": items}
    if ground_truth is not None:
        doc["ground_truth"] = [float(v) for v in ground_truth]
    Path(path).write_text(json.dumps(doc, indent=1), encoding="utf-8")


def save_dataset(manifest_path, X, item_ids=None, ground_truth=None):
    """Write features + manifest next to each other. Convenience wrapper."""
    manifest_path = Path(manifest_path)
    X = check_features(X)
    if item_ids is None:
        item_ids = [f"item{i:05d}" for i in range(X.shape[0])]
    feat_name = manifest_path.stem + ".csfd"
    write_features(manifest_path.parent / feat_name, X)
    write_manifest(manifest_path, feat_name, X.shape[1], item_ids,
                   ground_truth=ground_truth)
    return manifest_path


def load_dataset(manifest_path):
    """Load and cross-validate a dataset from its manifest.

    Returns a Dataset; every mismatch between manifest and feature file is
    reported with the offending item or dimension.
    """
    manifest_path = Path(manifest_path)
    if not manifest_path.exists():
        raise ValidationError(f"manifest not found: {manifest_path}")
    try:
        doc = json.loads(manifest_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ValidationError(f"manifest is not valid JSON: {e}") from None
    for key in ("version", "features", "dims", "items"):
        if key not in doc:
            raise ValidationError(f"manifest missing key {key!r}")
    if doc["version"] != 1:
        raise ValidationError(f"unsupported manifest version {doc['version']}")

    X = read_features(manifest_path.parent / doc["features"])
    u, d = X.shape
    if d != doc["dims"]:
        raise ValidationError(
            f"manifest dims={doc['dims']} but feature file has {d} columns")
    items = doc["items"]
    if len(items) != u:
        raise ValidationError(
            f"feature file has {u} rows but catalog lists {len(items)} items")
    entries = []
    seen = set()
    for i, it in enumerate(items):
        iid = it.get("id")
        if not isinstance(iid, str) or not iid:
            raise ValidationError(f"item {i} has no usable id")
        if iid in seen:
            raise ValidationError(f"duplicate item id {iid!r} at position {i}")
        seen.add(iid)
        entries.append(CatalogEntry(iid, it.get("display"),
                                    list(it.get("tags", []))))
    gt = None
    if "ground_truth" in doc:
        gt = np.asarray(doc["ground_truth"], dtype=np.float64)
        if gt.shape != (u,):
            raise ValidationError(
                f"ground_truth length {gt.size} does not match {u} items")
        if not np.all(np.isfinite(gt)):
            raise ValidationError("ground_truth contains non-finite values")
    return Dataset(X, ItemCatalog(entries), gt)
