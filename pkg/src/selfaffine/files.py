"""File formats: system specs, the neighbor-set cache, graph and certificate
exports, and PPM rendering.  Every writer goes through :func:`atomic_write`."""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .affine_core import AffineSystem, offsets_at_level, validate_system, map_fixed_point
from .augmented_tree import TreeExpansion
from .errors import NotPlanar, SelfAffineError, SpecFormatError
from .neighbor_set import NeighborSet, compute, verify_fixed_point
from .simplicity import Limits, SimplicityVerdict

CACHE_ENV = "SELFAFFINE_CACHE_DIR"
CACHE_FORMAT = "selfaffine.neighbors/1"


# ---------------------------------------------------------------------------
# system specification files
# ---------------------------------------------------------------------------

@dataclass
class SystemSpec:
    matrix: list[list[int]]
    digits: list[list[int]]
    label: str | None = None
    assert_osc: bool = False
    limits: dict[str, int] | None = None

    def to_system(self) -> AffineSystem:
        return validate_system(self.matrix, self.digits)

    def to_limits(self) -> Limits:
        return Limits(**(self.limits or {}))


_LIMIT_KEYS = {"max_types", "max_cardinality", "max_rounds"}


def _int_rows(value, name, expect_len=None):
    if not isinstance(value, list) or not value:
        raise SpecFormatError(f"field '{name}': expected a nonempty list")
    for i, row in enumerate(value):
        if not isinstance(row, list) or not row:
            raise SpecFormatError(f"field '{name}[{i}]': expected a nonempty list of integers")
        for j, x in enumerate(row):
            if isinstance(x, bool) or not isinstance(x, int):
                raise SpecFormatError(f"field '{name}[{i}][{j}]': expected an integer, got {x!r}")
        if expect_len is not None and len(row) != expect_len:
            raise SpecFormatError(f"field '{name}[{i}]': expected {expect_len} entries, got {len(row)}")


def spec_from_dict(data: Any, source: str = "<spec>") -> SystemSpec:
    if not isinstance(data, dict):
        raise SpecFormatError(f"{source}: top level must be a JSON object")
    unknown = set(data) - {"label", "matrix", "digits", "assert_osc", "limits"}
    if unknown:
        raise SpecFormatError(f"{source}: unknown field(s) {sorted(unknown)}")
    for key in ("matrix", "digits"):
        if key not in data:
            raise SpecFormatError(f"{source}: missing field '{key}'")
    matrix = data["matrix"]
    _int_rows(matrix, "matrix")
    d = len(matrix)
    for i, row in enumerate(matrix):
        if len(row) != d:
            raise SpecFormatError(f"{source}: field 'matrix[{i}]': matrix is not square ({len(row)} != {d})")
    _int_rows(data["digits"], "digits", expect_len=d)
    label = data.get("label")
    if label is not None and not isinstance(label, str):
        raise SpecFormatError(f"{source}: field 'label': expected a string")
    assert_osc = data.get("assert_osc", False)
    if not isinstance(assert_osc, bool):
        raise SpecFormatError(f"{source}: field 'assert_osc': expected true/false")
    limits = data.get("limits")
    if limits is not None:
        if not isinstance(limits, dict) or set(limits) - _LIMIT_KEYS:
            raise SpecFormatError(f"{source}: field 'limits': allowed keys are {sorted(_LIMIT_KEYS)}")
        for k, v in limits.items():
            if isinstance(v, bool) or not isinstance(v, int) or v < 1:
                raise SpecFormatError(f"{source}: field 'limits.{k}': expected a positive integer")
    return SystemSpec(matrix, data["digits"], label, assert_osc, limits)


def parse_spec(path) -> SystemSpec:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise SpecFormatError(f"{path}:{e.lineno}:{e.colno}: {e.msg}") from None
    try:
        return spec_from_dict(data, str(path))
    except SpecFormatError as e:
        msg = str(e)
        if not msg.startswith(str(path)):
            msg = f"{path}: {msg}"
        raise SpecFormatError(msg) from None


def serialize_spec(spec: SystemSpec) -> str:
    data: dict[str, Any] = {}
    if spec.label is not None:
        data["label"] = spec.label
    data["matrix"] = spec.matrix
    data["digits"] = spec.digits
    if spec.assert_osc:
        data["assert_osc"] = True
    if spec.limits:
        data["limits"] = {k: spec.limits[k] for k in sorted(spec.limits)}
    return json.dumps(data, indent=2) + "\n"


def load_fixture(name: str) -> SystemSpec:
    """One of the shipped diag(3,4) carpets: 'd1', 'd2' or 'd3'."""
    return parse_spec(Path(__file__).parent / "fixtures" / f"{name}.json")


# ---------------------------------------------------------------------------
# atomic output
# ---------------------------------------------------------------------------

def atomic_write(path, data: str | bytes) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    mode = "wb" if isinstance(data, bytes) else "w"
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, mode, **({} if mode == "wb" else {"encoding": "utf-8"})) as f:
            f.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# ---------------------------------------------------------------------------
# neighbor-set cache
# ---------------------------------------------------------------------------

def system_key(system: AffineSystem, mode: str = "K") -> str:
    payload = json.dumps({"matrix": [list(r) for r in system.matrix],
                          "digits": [list(d) for d in system.digits],
                          "mode": mode}, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode()).hexdigest()


def resolve_cache_dir(cache_dir=None) -> Path | None:
    if cache_dir is not None:
        return Path(cache_dir)
    env = os.environ.get(CACHE_ENV)
    return Path(env) if env else None


def verdict_to_dict(verdict: SimplicityVerdict) -> dict:
    ids = {t: i for i, t in enumerate(verdict.types)}
    return {
        "status": verdict.status.value,
        "rounds": verdict.rounds,
        "reason": verdict.reason,
        "max_cardinality_per_round": verdict.max_cardinality_per_round,
        "types": [[list(o) for o in t.offsets] for t in verdict.types],
        "transitions": {str(ids[t]): [ids[k] for k in kids] for t, kids in verdict.transitions.items()
                        if all(k in ids for k in kids)},
    }


def store_neighbors(ns: NeighborSet, cache_dir, verdict: SimplicityVerdict | None = None) -> Path:
    system = ns.system
    path = Path(cache_dir) / f"{system_key(system, ns.mode)}.json"
    record = {
        "format": CACHE_FORMAT,
        "matrix": [list(r) for r in system.matrix],
        "digits": [list(d) for d in system.digits],
        "mode": ns.mode,
        "vectors": [list(t) for t in sorted(ns.vectors)],
    }
    if verdict is not None:
        record["simplicity"] = verdict_to_dict(verdict)
    atomic_write(path, json.dumps(record, indent=1) + "\n")
    return path


def load_neighbors(system: AffineSystem, cache_dir, mode: str = "K") -> NeighborSet | None:
    path = Path(cache_dir) / f"{system_key(system, mode)}.json"
    if not path.exists():
        return None
    try:
        record = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError:
        return None
    if (record.get("format") != CACHE_FORMAT
            or record.get("matrix") != [list(r) for r in system.matrix]
            or record.get("digits") != [list(d) for d in system.digits]):
        return None
    ns = NeighborSet(system, frozenset(tuple(t) for t in record["vectors"]), mode)
    return ns if verify_fixed_point(ns) else None


def cached_neighbor_set(system: AffineSystem, mode: str = "K", cache_dir=None) -> NeighborSet:
    directory = resolve_cache_dir(cache_dir)
    if directory is not None:
        ns = load_neighbors(system, directory, mode)
        if ns is not None:
            return ns
    ns = compute(system, mode)
    if directory is not None:
        store_neighbors(ns, directory)
    return ns


# ---------------------------------------------------------------------------
# exports
# ---------------------------------------------------------------------------

def _vertex_name(level, offset) -> str:
    return f"{level}:" + ",".join(str(x) for x in offset)


def graph_to_dot(expansion: TreeExpansion) -> str:
    lines = ["graph augmented_tree {", "  node [shape=point];"]
    for s in expansion.slices:
        for o in s.offsets:
            lines.append(f'  "{_vertex_name(s.level, o)}";')
    for s in expansion.slices[1:]:
        prev = expansion.slices[s.level - 1]
        for i, o in enumerate(s.offsets):
            for p in s.parents[i]:
                lines.append(f'  "{_vertex_name(s.level - 1, prev.offsets[p])}" -- "{_vertex_name(s.level, o)}";')
        for i, j in s.horizontal_edges:
            lines.append(f'  "{_vertex_name(s.level, s.offsets[i])}" -- "{_vertex_name(s.level, s.offsets[j])}"'
                         " [style=dashed];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def graph_to_records(expansion: TreeExpansion) -> str:
    out = []
    for s in expansion.slices:
        prev = expansion.slices[s.level - 1] if s.level else None
        for i, o in enumerate(s.offsets):
            parents = [list(prev.offsets[p]) for p in s.parents[i]] if prev else []
            out.append({"kind": "vertex", "level": s.level, "offset": list(o), "parents": parents})
    for s in expansion.slices[1:]:
        for i, j in s.horizontal_edges:
            out.append({"kind": "edge", "type": "horizontal", "level": s.level,
                        "u": list(s.offsets[i]), "v": list(s.offsets[j])})
    return "".join(json.dumps(r, separators=(",", ":")) + "\n" for r in out)


def export_graph(expansion: TreeExpansion, fmt: str, path) -> None:
    if fmt == "dot":
        atomic_write(path, graph_to_dot(expansion))
    elif fmt == "records":
        atomic_write(path, graph_to_records(expansion))
    else:
        raise ValueError(f"unknown graph format {fmt!r}")


def verdict_to_records(verdict: SimplicityVerdict) -> str:
    data = verdict_to_dict(verdict)
    rows = [{"kind": "verdict", "status": data["status"], "rounds": data["rounds"], "reason": data["reason"],
             "max_cardinality_per_round": data["max_cardinality_per_round"]}]
    rows += [{"kind": "type", "id": i, "offsets": t} for i, t in enumerate(data["types"])]
    rows += [{"kind": "transition", "from": int(k), "to": v} for k, v in data["transitions"].items()]
    return "".join(json.dumps(r, separators=(",", ":")) + "\n" for r in rows)


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------

def render_array(system: AffineSystem, depth: int, width: int, height: int) -> np.ndarray:
    """Boolean (height, width) raster of the level-``depth`` approximation of K.

    Diagonal A: every cell A^{-L}(B + d_u) of the hull box B is filled (pixel
    centres inside the closed cell).  Otherwise the points S_u(x0) are
    plotted.  Row 0 is the top of the picture.
    """
    if system.dim != 2:
        raise NotPlanar("rendering needs d = 2")
    box = system.box
    lo = np.array(box.core_lo)
    hi = np.array(box.core_hi)
    span = np.where(hi - lo > 0, hi - lo, 1.0)
    img = np.zeros((height, width), dtype=bool)
    offsets = np.array(offsets_at_level(system, depth), dtype=float)
    if system.is_diagonal():
        scale = np.array([system.matrix[0][0], system.matrix[1][1]], dtype=float) ** depth
        cell_lo = (lo + offsets) / scale
        cell_hi = (hi + offsets) / scale
        # pixel i has centre lo + (i + 1/2) span / size
        c0 = np.ceil((cell_lo[:, 0] - lo[0]) / span[0] * width - 0.5 - 1e-9).astype(int)
        c1 = np.floor((cell_hi[:, 0] - lo[0]) / span[0] * width - 0.5 + 1e-9).astype(int)
        r0 = np.ceil((cell_lo[:, 1] - lo[1]) / span[1] * height - 0.5 - 1e-9).astype(int)
        r1 = np.floor((cell_hi[:, 1] - lo[1]) / span[1] * height - 0.5 + 1e-9).astype(int)
        for a, b, c, d in zip(c0, c1, r0, r1):
            a, b = max(a, 0), min(b, width - 1)
            c, d = max(c, 0), min(d, height - 1)
            if a <= b and c <= d:
                img[height - 1 - d:height - c, a:b + 1] = True
        return img
    x0 = np.array([float(c) for c in map_fixed_point(system, 0)])
    pts = x0[None, :] + offsets
    ainv = system.inverse_float
    for _ in range(depth):
        pts = pts @ ainv.T
    cols = np.clip(((pts[:, 0] - lo[0]) / span[0] * width).astype(int), 0, width - 1)
    rows = np.clip(((pts[:, 1] - lo[1]) / span[1] * height).astype(int), 0, height - 1)
    img[height - 1 - rows, cols] = True
    return img


def ppm_bytes(img: np.ndarray) -> bytes:
    h, w = img.shape
    rgb = np.where(img[:, :, None], 0, 255).astype(np.uint8).repeat(3, axis=2)
    return f"P6\n{w} {h}\n255\n".encode("ascii") + rgb.tobytes()


def render(system: AffineSystem, depth: int, width: int, height: int, path) -> np.ndarray:
    img = render_array(system, depth, width, height)
    atomic_write(path, ppm_bytes(img))
    return img


def read_ppm(path) -> np.ndarray:
    """Inverse of :func:`ppm_bytes` for our own output (boolean raster)."""
    data = Path(path).read_bytes()
    parts = data.split(b"\n", 3)
    if parts[0] != b"P6":
        raise SelfAffineError("not a binary PPM")
    w, h = (int(x) for x in parts[1].split())
    rgb = np.frombuffer(parts[3], dtype=np.uint8).reshape(h, w, 3)
    return rgb[:, :, 0] == 0
