"""Spec loading, CSV tables with metadata headers, and run manifests."""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .domains import SpecError

TOOL = f"apollon {__version__}"


def load_spec(path) -> dict:
    """Read a YAML (or JSON) key-value document into a dict."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise SpecError(f"cannot read spec {path}: {exc.strerror}") from exc
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" at line {mark.line + 1}, column {mark.column + 1}" if mark else ""
        raise SpecError(f"{path}: parse error{where}") from exc
    if not isinstance(doc, dict):
        raise SpecError(f"{path}: expected a mapping at top level")
    return doc


def canonical_json(obj) -> str:
    return json.dumps(_plain(obj), sort_keys=True, separators=(",", ":"))


def digest(obj) -> str:
    return hashlib.sha256(canonical_json(obj).encode()).hexdigest()[:16]


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, float) and not np.isfinite(obj):
        return repr(obj)
    return obj


@dataclass
class RunManifest:
    command: str
    argv: list
    specs: dict = field(default_factory=dict)  # role -> {"hash", "content"}
    seeds: list = field(default_factory=list)
    resolutions: list = field(default_factory=list)
    levels: list = field(default_factory=list)
    counts: list = field(default_factory=list)
    tool: str = TOOL
    extra: dict = field(default_factory=dict)

    def add_spec(self, role: str, content: dict) -> None:
        self.specs[role] = {"hash": digest(content), "content": content}

    def to_dict(self) -> dict:
        return _plain(asdict(self))

    @property
    def hash(self) -> str:
        # the hash covers what determines the output, not the bookkeeping in extra
        d = self.to_dict()
        d.pop("extra")
        return digest(d)

    def dumps(self) -> str:
        return json.dumps(dict(self.to_dict(), manifest_hash=self.hash), sort_keys=True, indent=2) + "\n"


def fmt(v) -> str:
    """Stable text for a CSV cell: floats use repr (shortest round-trip)."""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if v is None:
        return ""
    if isinstance(v, (list, tuple, np.ndarray)):
        return ";".join(fmt(x) for x in np.asarray(v, dtype=object).ravel())
    return str(v)


def csv_text(manifest: RunManifest | None, header: list, rows: list[dict]) -> str:
    buf = io.StringIO()
    buf.write(f"# tool={TOOL}\n")
    if manifest is not None:
        buf.write(f"# manifest={manifest.hash}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(r.get(k)) for k in header])
    return buf.getvalue()


def write_outputs(out, manifest: RunManifest, tables: dict) -> str:
    """Write ``tables`` (name -> (header, rows)) as CSV. With ``out`` the first
    table goes to ``out``, others to ``out`` with ``.<name>.csv`` appended to
    the stem, and the manifest to ``<out>.manifest.json``. Returns the text of
    all tables concatenated (what is printed when ``out`` is None)."""
    texts = {name: csv_text(manifest, *tab) for name, tab in tables.items()}
    if out is not None:
        out = Path(out)
        for i, (name, text) in enumerate(texts.items()):
            p = out if i == 0 else out.with_name(f"{out.stem}.{name}{out.suffix or '.csv'}")
            p.write_text(text)
        Path(f"{out}.manifest.json").write_text(manifest.dumps())
    return "\n".join(texts.values())
