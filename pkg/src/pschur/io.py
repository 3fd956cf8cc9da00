"""JSON instance files and run records.

Numbers travel as strings: ``"p/q"`` or ``"p/q+r/si"`` on the exact backend,
decimal literals on the float backend. Exact strings are parsed straight into
:class:`~pschur.scalars.QQi` and never touch a float.
"""

from __future__ import annotations

import hashlib
import json
import platform
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from importlib import resources

import jsonschema
import numpy as np
import scipy

from .errors import BackendError, InstanceParseError
from .scalars import EXACT, FLOAT, as_array, format_exact, format_float, parse_exact, parse_float

KINDS = ("coeffs", "moments", "interpolation", "kernel_sample", "hermitian_matrix")
VECTOR_FIELDS = {
    "coeffs": ("a",),
    "moments": ("c",),
    "interpolation": ("points", "A", "B"),
    "kernel_sample": ("points", "values"),
    "hermitian_matrix": (),
}
__version__ = "0.1.0"


@lru_cache(maxsize=None)
def load_schema(name: str) -> dict:
    text = resources.files("pschur").joinpath("schemas", f"{name}.schema.json").read_text()
    return json.loads(text)


def _validate(obj, name: str):
    try:
        jsonschema.validate(obj, load_schema(name))
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise InstanceParseError(f"{name} schema violation at {path}: {exc.message}") from None


@dataclass(frozen=True)
class Instance:
    """A parsed instance file. ``data`` holds exact (object) or complex arrays."""

    kind: str
    backend: str
    data: dict = field(default_factory=dict)

    def vector(self, name: str) -> np.ndarray:
        return self.data[name]


def _scalar_parser(file_backend: str, backend: str):
    if file_backend == FLOAT and backend == EXACT:
        raise BackendError("a float instance cannot be run on the exact backend")
    if file_backend == EXACT and backend == EXACT:
        return parse_exact
    if file_backend == EXACT:
        # explicit, requested rounding of exact data onto the float backend
        return lambda s: complex(parse_exact(s))
    return parse_float


def _parse_vector(strings, conv, where: str) -> np.ndarray:
    out = []
    for k, s in enumerate(strings):
        try:
            out.append(conv(s))
        except ValueError as exc:
            raise InstanceParseError(f"{where}[{k}]: {exc}") from None
    return out


def parse_instance(text: str, backend: str | None = None) -> Instance:
    """Parse and validate an instance; ``backend`` overrides the file's own."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceParseError(f"invalid JSON: {exc}") from None
    _validate(obj, "instance")
    kind, file_backend, payload = obj["kind"], obj["backend"], obj["payload"]
    backend = backend or file_backend
    conv = _scalar_parser(file_backend, backend)
    data: dict = {}
    for name in VECTOR_FIELDS[kind]:
        if name in payload:
            data[name] = as_array(_parse_vector(payload[name], conv, name), backend)
    if kind == "hermitian_matrix":
        rows = payload["matrix"]
        if len({len(r) for r in rows}) != 1:
            raise InstanceParseError("matrix rows have different lengths")
        data["matrix"] = as_array(
            [_parse_vector(r, conv, f"matrix[{i}]") for i, r in enumerate(rows)], backend)
    if kind == "interpolation":
        m = len(data["points"])
        if "A" not in data:
            data["A"] = as_array([conv("1")] * m, backend)
        if not (len(data["A"]) == len(data["B"]) == m):
            raise InstanceParseError("points, A and B must have equal length")
        data["w0_index"] = int(payload.get("w0_index", 0))
    if kind == "kernel_sample" and len(data["values"]) != len(data["points"]):
        raise InstanceParseError("points and values must have equal length")
    return Instance(kind, backend, data)


def _fmt(backend: str):
    return format_exact if backend == EXACT else format_float


def dump_instance(inst: Instance) -> str:
    """Canonical text: sorted keys, two-space indent, trailing newline."""
    fmt = _fmt(inst.backend)
    payload: dict = {}
    for name in VECTOR_FIELDS[inst.kind]:
        if name in inst.data:
            payload[name] = [fmt(x) for x in inst.data[name]]
    if inst.kind == "hermitian_matrix":
        payload["matrix"] = [[fmt(x) for x in row] for row in inst.data["matrix"]]
    if inst.kind == "interpolation":
        payload["w0_index"] = inst.data.get("w0_index", 0)
    return dumps({"kind": inst.kind, "backend": inst.backend, "payload": payload})


def make_instance(kind: str, backend: str, **vectors) -> Instance:
    """Build an :class:`Instance` from Python scalars (used by tests and scripts)."""
    if kind not in KINDS:
        raise ValueError(f"unknown kind {kind!r}")
    data = {}
    for name, v in vectors.items():
        data[name] = v if name == "w0_index" else as_array(v, backend)
    return Instance(kind, backend, data)


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=True) + "\n"


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def versions() -> dict:
    return {
        "pschur": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
    }


@dataclass
class RunRecord:
    """Everything needed to rerun a command: argv, input texts, seed and the output bytes."""

    argv: list
    inputs: dict
    versions: dict
    seed: int
    output: str
    exit_code: int
    timing: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return dumps(asdict(self))

    @classmethod
    def from_json(cls, text: str) -> "RunRecord":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InstanceParseError(f"invalid run record: {exc}") from None
        _validate(obj, "runrecord")
        for path, entry in obj["inputs"].items():
            if sha256_text(entry["content"]) != entry["sha256"]:
                raise InstanceParseError(f"digest mismatch for recorded input {path}")
        return cls(**obj)
