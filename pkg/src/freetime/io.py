"""Problem files, trajectory/series serialization and canonical JSON output.

All documents are JSON; floats are written with 17 significant digits so
that parsing and re-serializing is byte-identical.  Diagnostic series can
additionally be exported as CSV.
"""
import csv
import hashlib
import io as _io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .action import DiscretePath
from .configuration import MassSystem
from .dynamics import DiagnosticsSeries, Trajectory

# gravitational units: G = 1, so only mass and length are free
UNITS = {
    "t": "time", "I": "mass*length^2", "U": "mass^2/length", "T": "mass^2/length",
    "g": "mass^(3/4)*length^(3/2)/time", "h": "mass^2/length", "com": "length",
    "I_dot": "mass*length^2/time",
}
SERIES_COLUMNS = ("t", "I", "U", "T", "g", "h", "com", "I_dot")

PROBLEM_KEYS = ("dim", "masses", "configurations", "velocities", "path", "options")
OPTION_KEYS = ("tau", "nodes", "tol", "max_iters", "restarts", "seed", "t0", "t1",
               "lambda_list", "collision_guard", "integrator_tol", "samples")


class ProblemError(ValueError):
    """Malformed problem document; the message names the offending line or field."""


@dataclass
class ProblemFile:
    dim: int
    masses: list
    configurations: dict = field(default_factory=dict)
    velocities: dict = field(default_factory=dict)
    path: DiscretePath = None
    options: dict = field(default_factory=dict)

    def system(self):
        return MassSystem(tuple(self.masses), self.dim)

    def configuration(self, name):
        try:
            return self.configurations[name]
        except KeyError:
            raise ProblemError(f"configurations: no configuration named {name!r}") from None

    def __eq__(self, other):
        if not isinstance(other, ProblemFile):
            return NotImplemented
        return canonical_json(self.to_document()) == canonical_json(other.to_document())

    def to_document(self):
        doc = {"dim": self.dim, "masses": [float(m) for m in self.masses],
               "configurations": {k: v for k, v in self.configurations.items()}}
        if self.velocities:
            doc["velocities"] = dict(self.velocities)
        if self.path is not None:
            doc["path"] = {"times": self.path.times, "nodes": self.path.nodes}
        if self.options:
            doc["options"] = dict(self.options)
        return doc


def _fmt_float(x):
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"non-finite value {x} cannot be serialized")
    s = format(x, ".17g")
    if s in ("-0", "0"):
        return "0.0"
    if "e" not in s and "." not in s:
        s += ".0"
    return s


def _encode(obj, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}"
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (list, tuple, dict, np.ndarray)) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def canonical_json(obj, indent=2):
    """Deterministic JSON text with 17-significant-digit floats."""
    return _encode(obj, indent, 0) + "\n"


def _reject_constant(name):
    raise ProblemError(f"non-finite number {name} is not allowed")


def _load(data):
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        return json.loads(data, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise ProblemError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def _array(value, shape, where):
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError):
        raise ProblemError(f"{where}: not a numeric array") from None
    if shape is not None and arr.shape != shape:
        raise ProblemError(f"{where}: expected shape {shape}, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ProblemError(f"{where}: contains a non-finite value")
    return arr


def parse_problem(data):
    doc = _load(data)
    if not isinstance(doc, dict):
        raise ProblemError("top level must be an object")
    unknown = sorted(set(doc) - set(PROBLEM_KEYS))
    if unknown:
        raise ProblemError(f"unknown field(s): {', '.join(unknown)}")
    for key in ("dim", "masses"):
        if key not in doc:
            raise ProblemError(f"missing required field {key!r}")
    dim = doc["dim"]
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise ProblemError("dim: must be a positive integer")
    masses = _array(doc["masses"], None, "masses")
    if masses.ndim != 1 or len(masses) < 2 or np.any(masses <= 0):
        raise ProblemError("masses: need at least two positive values")
    shape = (len(masses), dim)
    configs = {}
    for name, value in (doc.get("configurations") or {}).items():
        configs[name] = _array(value, shape, f"configurations.{name}")
    vels = {}
    for name, value in (doc.get("velocities") or {}).items():
        vels[name] = _array(value, shape, f"velocities.{name}")
    path = None
    if "path" in doc:
        p = doc["path"]
        if not isinstance(p, dict) or set(p) != {"times", "nodes"}:
            raise ProblemError("path: must have exactly the fields 'times' and 'nodes'")
        times = _array(p["times"], None, "path.times")
        nodes = _array(p["nodes"], (len(times),) + shape, "path.nodes")
        try:
            path = DiscretePath(times, nodes)
        except ValueError as exc:
            raise ProblemError(f"path: {exc}") from None
    options = doc.get("options") or {}
    if not isinstance(options, dict):
        raise ProblemError("options: must be an object")
    bad = sorted(set(options) - set(OPTION_KEYS))
    if bad:
        raise ProblemError(f"options: unknown key(s): {', '.join(bad)}")
    for k, v in options.items():
        if isinstance(v, float) and not math.isfinite(v):
            raise ProblemError(f"options.{k}: non-finite value")
    return ProblemFile(dim=dim, masses=[float(m) for m in masses], configurations=configs,
                       velocities=vels, path=path, options=dict(options))


def serialize_problem(problem):
    return canonical_json(problem.to_document()).encode()


def digest(data):
    return hashlib.sha256(data).hexdigest()


def trajectory_document(traj):
    return {
        "units": {"times": "time", "positions": "length", "velocities": "length/time",
                  "energy0": "mass^2/length"},
        "times": traj.times,
        "positions": traj.positions,
        "velocities": traj.velocities,
        "energy0": traj.energy0,
        "max_energy_drift": traj.max_energy_drift,
        "collision_approach": bool(traj.collision_approach),
    }


def serialize_trajectory(traj):
    return canonical_json(trajectory_document(traj)).encode()


def parse_trajectory(data):
    doc = _load(data)
    times = np.array(doc["times"], dtype=float)
    return Trajectory(times=times, positions=np.array(doc["positions"], dtype=float),
                      velocities=np.array(doc["velocities"], dtype=float),
                      energy0=float(doc["energy0"]),
                      max_energy_drift=float(doc["max_energy_drift"]),
                      collision_approach=bool(doc["collision_approach"]))


def _series_columns(series):
    return {"t": series.times, "I": series.I, "U": series.U, "T": series.T, "g": series.g,
            "h": series.h, "com": series.com, "I_dot": series.I_dot}


def series_document(series):
    cols = _series_columns(series)
    rows = np.column_stack([cols[c] for c in SERIES_COLUMNS])
    return {"columns": list(SERIES_COLUMNS), "units": [UNITS[c] for c in SERIES_COLUMNS],
            "rows": rows}


def serialize_series(series, fmt="json"):
    if fmt == "json":
        return canonical_json(series_document(series)).encode()
    if fmt != "csv":
        raise ValueError(f"unknown format {fmt!r}")
    cols = _series_columns(series)
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"{c} [{UNITS[c]}]" for c in SERIES_COLUMNS])
    for row in zip(*(cols[c] for c in SERIES_COLUMNS)):
        w.writerow([_fmt_float(v) for v in row])
    return buf.getvalue().encode()


def parse_series(data, fmt="json"):
    if fmt == "json":
        doc = _load(data)
        rows = np.array(doc["rows"], dtype=float).reshape(-1, len(doc["columns"]))
        cols = dict(zip(doc["columns"], rows.T))
    else:
        text = data.decode() if isinstance(data, bytes) else data
        reader = csv.reader(_io.StringIO(text))
        header = [h.split(" [")[0] for h in next(reader)]
        rows = np.array([[float(v) for v in r] for r in reader], dtype=float)
        cols = dict(zip(header, rows.reshape(-1, len(header)).T))
    return DiagnosticsSeries(times=cols["t"], I=cols["I"], U=cols["U"], T=cols["T"],
                             g=cols["g"], h=cols["h"], com=cols["com"], I_dot=cols["I_dot"])
