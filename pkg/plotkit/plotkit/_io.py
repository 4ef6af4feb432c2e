"""CSV/provenance loading shared by the renderers.

Pure helpers only; every renderer stays a standalone script.  Each simulation
CSV ships with a sidecar JSON header carrying a config digest; renderers
refuse inputs whose digests disagree and propagate the digest into the image
metadata so figures stay traceable to the run that produced them.
"""

from __future__ import annotations

import csv
import json
import os


class SchemaError(ValueError):
    """The CSV does not match the expected column layout for this plot kind."""


def sidecar_path(csv_path: str) -> str:
    base, _ = os.path.splitext(csv_path)
    return base + ".json"


def load_header(csv_path: str) -> dict:
    path = sidecar_path(csv_path)
    if not os.path.exists(path):
        raise SchemaError(f"missing provenance header {path}")
    with open(path) as fh:
        return json.load(fh)


def load_table(csv_path: str, required: tuple[str, ...]) -> dict[str, list[float]]:
    with open(csv_path, newline="") as fh:
        reader = csv.DictReader(fh)
        cols = tuple(reader.fieldnames or ())
        missing = [c for c in required if c not in cols]
        if missing:
            raise SchemaError(f"{csv_path}: missing columns {missing}; found {list(cols)}")
        data: dict[str, list[float]] = {c: [] for c in cols}
        for row in reader:
            for c in cols:
                data[c].append(float(row[c]))
    return data


def common_digest(csv_paths) -> str:
    digests = {load_header(p).get("config_digest", "") for p in csv_paths}
    if len(digests) != 1:
        raise SchemaError(f"provenance digests disagree across inputs: {sorted(digests)}")
    return digests.pop()


def save_figure(fig, out_path: str, digest: str) -> None:
    meta = {"provenance": digest}
    if out_path.endswith(".svg"):
        meta = {"Description": f"provenance:{digest}", "Date": None}
    fig.savefig(out_path, dpi=150, metadata=meta)
