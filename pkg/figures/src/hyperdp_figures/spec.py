"""FigureSpec parsing and CSV schema validation.

The renderers consume only the documented CSV schemas of the hyperdp
harness (region grids `a,eps,region` and sweep summaries
`sweep_param,sweep_value,mean_error,success_rate,stderr,trials`), so this
package builds and runs without the primary package installed.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

REGION_HEADER = ["a", "eps", "region"]
SUMMARY_HEADER = ["sweep_param", "sweep_value", "mean_error", "success_rate", "stderr", "trials"]
KINDS = ("region_map", "error_curve")


class SchemaError(ValueError):
    """Input file does not match the documented CSV schema."""


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    inputs: tuple[str, ...]
    output: str
    labels: tuple[str, ...] = ()
    annotations: dict = field(default_factory=dict)

    @classmethod
    def from_json_file(cls, path: str) -> "FigureSpec":
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
        unknown = set(obj) - {"kind", "inputs", "output", "labels", "annotations"}
        if unknown:
            raise SchemaError(f"unknown FigureSpec fields: {sorted(unknown)}")
        try:
            kind = obj["kind"]
            inputs = tuple(obj["inputs"])
            output = obj["output"]
        except KeyError as exc:
            raise SchemaError(f"FigureSpec missing field: {exc}") from exc
        if kind not in KINDS:
            raise SchemaError(f"unknown figure kind {kind!r}; expected one of {KINDS}")
        if not inputs:
            raise SchemaError("FigureSpec needs at least one input CSV")
        return cls(
            kind=kind,
            inputs=inputs,
            output=output,
            labels=tuple(obj.get("labels", ())),
            annotations=dict(obj.get("annotations", {})),
        )


def _read_csv(path: str, expected_header: list[str]) -> list[dict]:
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames != expected_header:
                raise SchemaError(
                    f"{path}: header {reader.fieldnames} does not match {expected_header}"
                )
            rows = list(reader)
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return rows


def read_region_csv(path: str) -> list[dict]:
    rows = _read_csv(path, REGION_HEADER)
    out = []
    for row in rows:
        try:
            out.append({"a": float(row["a"]), "eps": float(row["eps"]), "region": row["region"]})
        except ValueError as exc:
            raise SchemaError(f"{path}: bad row {row}: {exc}") from exc
        if out[-1]["region"] not in ("gray", "white", "green"):
            raise SchemaError(f"{path}: unknown region label {row['region']!r}")
    return out


def read_summary_csv(path: str) -> list[dict]:
    rows = _read_csv(path, SUMMARY_HEADER)
    out = []
    for row in rows:
        try:
            out.append(
                {
                    "sweep_param": row["sweep_param"],
                    "sweep_value": float(row["sweep_value"]),
                    "mean_error": float(row["mean_error"]),
                    "success_rate": float(row["success_rate"]),
                    "stderr": float(row["stderr"]),
                    "trials": int(row["trials"]),
                }
            )
        except ValueError as exc:
            raise SchemaError(f"{path}: bad row {row}: {exc}") from exc
    return out
