"""JSON input documents and report serialization."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from typing import Any

import jsonschema

from . import __version__
from .contractions import ContractionSystem
from .errors import InputError
from .geometry import AffineIFS
from .pressure import DiagnosticRow, DimensionReport
from .sofic import LabeledGraph
from .symbolic import Alphabet, ForbiddenSet, normalize_forbidden_set

_NUMBER = {"type": "number"}
_VECTOR = {"type": "array", "items": _NUMBER, "minItems": 1, "maxItems": 2}

SYSTEM_SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["alphabet_size", "contractions", "presentation"],
    "additionalProperties": False,
    "properties": {
        "alphabet_size": {"type": "integer", "minimum": 1},
        "letters": {"type": "array", "items": {"type": "string", "minLength": 1}},
        "contractions": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "required": ["lower", "upper"],
                "additionalProperties": False,
                "properties": {"lower": _NUMBER, "upper": _NUMBER},
            },
        },
        "presentation": {
            "type": "object",
            "minProperties": 1,
            "maxProperties": 1,
            "additionalProperties": False,
            "properties": {
                "forbidden_words": {"type": "array", "items": {"type": "string"}},
                "graph": {
                    "type": "object",
                    "required": ["vertices", "edges"],
                    "additionalProperties": False,
                    "properties": {
                        "vertices": {"type": "integer", "minimum": 1},
                        "edges": {
                            "type": "array",
                            "items": {
                                "type": "array",
                                "prefixItems": [{"type": "integer"}, {"type": "integer"},
                                                {"type": "string"}],
                                "items": False,
                                "minItems": 3,
                            },
                        },
                    },
                },
            },
        },
        "ifs": {
            "type": "object",
            "required": ["maps"],
            "additionalProperties": False,
            "properties": {
                "maps": {
                    "type": "object",
                    "additionalProperties": {
                        "type": "object",
                        "required": ["linear", "offset"],
                        "additionalProperties": False,
                        "properties": {
                            "linear": {"type": "array", "items": _VECTOR, "minItems": 1,
                                       "maxItems": 2},
                            "offset": _VECTOR,
                        },
                    },
                },
                "osc_box": {"type": "array", "items": _VECTOR, "minItems": 2, "maxItems": 2},
            },
        },
        "settings": {"type": "object"},
    },
}


@dataclass(frozen=True)
class SystemDocument:
    """Parsed input: alphabet, constants, presentation and optional IFS.

    Forbidden words are kept as written so that serialization reproduces
    the input; :attr:`presentation` builds the normalized object.
    """

    alphabet: Alphabet
    contractions: ContractionSystem
    forbidden_words: tuple[str, ...] | None = None
    graph_vertices: int | None = None
    graph_edges: tuple[tuple[int, int, str], ...] | None = None
    ifs_maps: tuple[tuple[tuple[tuple[float, ...], ...], tuple[float, ...]], ...] | None = None
    osc_box: tuple[tuple[float, ...], tuple[float, ...]] | None = None
    settings: dict = field(default_factory=dict, compare=True, hash=False)

    @property
    def presentation(self) -> ForbiddenSet | LabeledGraph:
        if self.forbidden_words is not None:
            return normalize_forbidden_set([self.alphabet.parse(w) for w in self.forbidden_words],
                                           self.alphabet)
        edges = tuple((s, d, self.alphabet.index(lab)) for s, d, lab in self.graph_edges)
        return LabeledGraph(self.graph_vertices, edges, self.alphabet)

    @property
    def ifs(self) -> AffineIFS | None:
        if self.ifs_maps is None:
            return None
        return AffineIFS(tuple(m[0] for m in self.ifs_maps), tuple(m[1] for m in self.ifs_maps),
                         self.osc_box)

    def to_dict(self) -> dict:
        names = self.alphabet.names
        doc: dict[str, Any] = {"alphabet_size": self.alphabet.size}
        if names != Alphabet(self.alphabet.size).names:
            doc["letters"] = list(names)
        doc["contractions"] = {
            names[i]: {"lower": self.contractions.lower[i], "upper": self.contractions.upper[i]}
            for i in range(self.alphabet.size)}
        if self.forbidden_words is not None:
            doc["presentation"] = {"forbidden_words": list(self.forbidden_words)}
        else:
            doc["presentation"] = {"graph": {"vertices": self.graph_vertices,
                                             "edges": [list(e) for e in self.graph_edges]}}
        if self.ifs_maps is not None:
            doc["ifs"] = {"maps": {names[i]: {"linear": [list(r) for r in lin],
                                              "offset": list(off)}
                                   for i, (lin, off) in enumerate(self.ifs_maps)}}
            if self.osc_box is not None:
                doc["ifs"]["osc_box"] = [list(c) for c in self.osc_box]
        if self.settings:
            doc["settings"] = dict(self.settings)
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "SystemDocument":
        try:
            jsonschema.validate(doc, SYSTEM_SCHEMA)
        except jsonschema.ValidationError as exc:
            where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
            raise InputError(f"schema error at {where}: {exc.message}") from None
        m = doc["alphabet_size"]
        alphabet = Alphabet(m, tuple(doc.get("letters", ())))
        table = doc["contractions"]
        if set(table) != set(alphabet.names):
            raise InputError(f"contractions must list exactly the letters {list(alphabet.names)}, "
                             f"got {sorted(table)}")
        contractions = ContractionSystem(tuple(table[n]["lower"] for n in alphabet.names),
                                         tuple(table[n]["upper"] for n in alphabet.names))
        pres = doc["presentation"]
        kwargs: dict[str, Any] = {}
        if "forbidden_words" in pres:
            words = tuple(pres["forbidden_words"])
            for w in words:
                alphabet.parse(w)
            kwargs["forbidden_words"] = words
        else:
            g = pres["graph"]
            edges = tuple((int(s), int(d), str(lab)) for s, d, lab in g["edges"])
            for _, _, lab in edges:
                alphabet.index(lab)
            kwargs["graph_vertices"] = g["vertices"]
            kwargs["graph_edges"] = edges
        if "ifs" in doc:
            maps = doc["ifs"]["maps"]
            if set(maps) != set(alphabet.names):
                raise InputError(f"ifs maps must list exactly the letters {list(alphabet.names)}")
            kwargs["ifs_maps"] = tuple(
                (tuple(tuple(float(x) for x in row) for row in maps[n]["linear"]),
                 tuple(float(x) for x in maps[n]["offset"])) for n in alphabet.names)
            if "osc_box" in doc["ifs"]:
                kwargs["osc_box"] = tuple(tuple(float(x) for x in c) for c in doc["ifs"]["osc_box"])
        result = cls(alphabet, contractions, settings=dict(doc.get("settings", {})), **kwargs)
        result.presentation  # noqa: B018 - surfaces empty or malformed presentations early
        ifs = result.ifs
        if ifs is not None:
            ifs.check_constants(contractions)
        return result

    @classmethod
    def from_json(cls, text: str) -> "SystemDocument":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"input is not valid JSON: {exc}") from None
        return cls.from_dict(doc)


def digest(data: bytes) -> str:
    return "sha256:" + hashlib.sha256(data).hexdigest()


@dataclass(frozen=True)
class ReportDocument:
    report: DimensionReport
    input_digest: str
    wall_time: float
    tool_version: str = __version__
    diagnostics: tuple[DiagnosticRow, ...] | None = None

    def to_dict(self) -> dict:
        doc = {"tool_version": self.tool_version, "input_digest": self.input_digest,
               "wall_time": self.wall_time, **self.report.to_dict()}
        if self.diagnostics is not None:
            doc["diagnostics"] = [[r.n, r.lower_sum, r.upper_sum] for r in self.diagnostics]
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "ReportDocument":
        diag = doc.get("diagnostics")
        return cls(
            report=DimensionReport.from_dict(doc),
            input_digest=str(doc["input_digest"]),
            wall_time=float(doc["wall_time"]),
            tool_version=str(doc["tool_version"]),
            diagnostics=None if diag is None else tuple(
                DiagnosticRow(int(n), float(lo), float(hi)) for n, lo, hi in diag),
        )


def dumps(obj, indent: int = 2) -> str:
    """JSON with every float written to 17 significant digits."""
    return _encode(obj, indent, 0)


def _encode(obj, indent: int, level: int) -> str:
    pad = "\n" + " " * (indent * (level + 1))
    end = "\n" + " " * (indent * level)
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return json.dumps(obj)
    if isinstance(obj, float):
        if not math.isfinite(obj):
            raise ValueError(f"cannot serialize non-finite float {obj}")
        text = f"{obj:.17g}"
        return text if any(c in text for c in ".en") else text + ".0"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [json.dumps(str(k)) + ": " + _encode(v, indent, level + 1) for k, v in obj.items()]
        return "{" + pad + ("," + pad).join(items) + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        items = [_encode(v, indent, level + 1) for v in obj]
        return "[" + pad + ("," + pad).join(items) + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")
