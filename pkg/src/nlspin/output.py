"""CSV and JSON serialization of results.

Numbers are written with 12 significant digits.  CSV output starts with
``#`` comment lines carrying the command, its parameters and the seed,
followed by a header row.  JSON output carries the same metadata as fields.
Nothing time- or host-dependent is written, so identical inputs give
byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
from typing import Any, List, Mapping, Sequence, Tuple

import numpy as np

from .discrimination import Povm, TrialStats
from .purification import Trajectory
from .states import matrix_to_json
from .transform import SpherePoint, TransformResult

SIG_DIGITS = 12

TRAJECTORY_COLUMNS = ["iteration", "fidelity", "yield", "cumulative_yield", "variant", "f0"]
SWEEP_COLUMNS = ["theta", "overlap", "method", "analytic_success", "empirical_success", "n_trials", "seed"]
SPHERE_COLUMNS = [
    "theta", "phi",
    "in_x", "in_y", "in_z",
    "out_x", "out_y", "out_z",
    "out_nx", "out_ny", "out_nz",
    "p_success",
]
POVM_COLUMNS = ["label", "row", "col", "re", "im"]
TRANSFORM_COLUMNS = ["row", "col", "re", "im", "success_probability"]


def fmt(x: Any) -> str:
    """Render one CSV cell."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        v = float(x)
        if v == 0.0:
            v = 0.0  # drop negative zero
        return format(v, f".{SIG_DIGITS}g")
    return str(x)


def rounded(obj: Any) -> Any:
    """Recursively round floats to 12 significant digits for JSON."""
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(format(float(obj), f".{SIG_DIGITS}g"))
        return 0.0 if v == 0.0 else v
    if isinstance(obj, Mapping):
        return {k: rounded(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [rounded(v) for v in obj]
    return obj


def _matrix_rows(m, extra: Sequence = ()) -> List[list]:
    m = np.asarray(m)
    return [[i, j, m[i, j].real, m[i, j].imag, *extra] for i in range(m.shape[0]) for j in range(m.shape[1])]


def tabulate(result) -> Tuple[List[str], List[list], dict]:
    """Return ``(csv_columns, csv_rows, json_payload)`` for a result object."""
    if isinstance(result, Trajectory):
        v = result.variant.value
        rows = [[s.iteration, s.fidelity, s.yield_probability, s.cumulative_yield, v, result.f0] for s in result.steps]
        payload = {
            "steps": [dict(zip(TRAJECTORY_COLUMNS, r)) for r in rows],
            "final_state": result.final_state.to_json(),
        }
        return TRAJECTORY_COLUMNS, rows, payload

    if isinstance(result, TransformResult):
        rows = _matrix_rows(result.rho_out.mat, [result.success_probability])
        payload = {
            "rho_out": result.rho_out.to_json(),
            "success_probability": result.success_probability,
            "factored": result.factored,
        }
        return TRANSFORM_COLUMNS, rows, payload

    if isinstance(result, Povm):
        rows = []
        for label, m in result.elements:
            rows += [[label.value, *r] for r in _matrix_rows(m)]
        payload = {
            "x": result.x,
            "overlap": result.overlap,
            "elements": [{"label": label.value, **matrix_to_json(m)} for label, m in result.elements],
        }
        return POVM_COLUMNS, rows, payload

    items = list(result)
    if items and all(isinstance(r, TrialStats) for r in items):
        rows = [
            [r.params.get("theta", ""), r.overlap, r.strategy, r.analytic_success,
             r.empirical_success, r.n_trials, r.seed]
            for r in items
        ]
        payload = {
            "rows": [
                {**dict(zip(SWEEP_COLUMNS, row)), "counts": r.counts, "generator": r.generator}
                for row, r in zip(rows, items)
            ]
        }
        return SWEEP_COLUMNS, rows, payload

    if items and all(isinstance(p, SpherePoint) for p in items):
        rows = [
            [p.theta, p.phi,
             p.bloch_in.x, p.bloch_in.y, p.bloch_in.z,
             p.bloch_out.x, p.bloch_out.y, p.bloch_out.z,
             p.bloch_out_normalized.x, p.bloch_out_normalized.y, p.bloch_out_normalized.z,
             p.success_probability]
            for p in items
        ]
        return SPHERE_COLUMNS, rows, {"points": [dict(zip(SPHERE_COLUMNS, r)) for r in rows]}

    raise TypeError(f"no output schema for {type(result).__name__}")


def render(result, fmt_name: str, command: str, parameters: Mapping[str, Any], seed: int) -> str:
    columns, rows, payload = tabulate(result)
    if fmt_name == "csv":
        buf = io.StringIO()
        buf.write(f"# command={command}\n")
        for key in sorted(parameters):
            buf.write(f"# {key}={fmt(parameters[key])}\n")
        buf.write(f"# seed={seed}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([fmt(x) for x in row])
        return buf.getvalue()
    if fmt_name == "json":
        doc = {"command": command, "parameters": dict(sorted(parameters.items())), "seed": seed, **payload}
        return json.dumps(rounded(doc), indent=2, allow_nan=False) + "\n"
    raise ValueError(f"unknown format {fmt_name!r}")


def emit(result, fmt_name: str, destination, command: str = "", parameters: Mapping | None = None, seed: int = 0) -> None:
    """Write ``result`` to ``destination`` (a path, or a text stream such as stdout)."""
    text = render(result, fmt_name, command, parameters or {}, seed)
    if hasattr(destination, "write"):
        destination.write(text)
    else:
        with open(destination, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
